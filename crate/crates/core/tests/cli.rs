use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};

static COUNTER: AtomicUsize = AtomicUsize::new(0);

struct Scratch(PathBuf);

impl Scratch {
    fn new() -> Scratch {
        let n = COUNTER.fetch_add(1, Ordering::SeqCst);
        let dir = std::env::temp_dir().join(format!("treequiv-cli-{}-{n}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.0.join(name);
        fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["treequiv"];
    full.extend_from_slice(args);
    let code = treequiv::cli::run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn field<'a>(out: &'a str, key: &str) -> Option<&'a str> {
    out.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix(": "))
}

fn string_transducer(states: &str, rules: &str) -> String {
    format!(
        "(transducer (mode string) (alphabet (f 2) (e 0)) (output a a- b b-) (states {states}) (init {}) {rules})",
        states.split_whitespace().next().unwrap()
    )
}

/// `f(x1, x2) -> u q(x1) v q(x2) w`, `e -> z`.
fn shape(u: &str, v: &str, w: &str, z: &str) -> String {
    let outs = |s: &str| s.split_whitespace().map(|l| format!("(out {l}) ")).collect::<String>();
    string_transducer(
        "q",
        &format!(
            "(rule q f (x1 x2) {}(call q x1) {}(call q x2) {}) (rule q e () {})",
            outs(u),
            outs(v),
            outs(w),
            outs(z)
        ),
    )
}

#[test]
fn product_pair_is_equivalent() {
    let (code, out, _) = run(&["check", &data("product.tdx"), &data("product_swapped.tdx")]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(field(&out, "verdict"), Some("equivalent"));
}

#[test]
fn perturbed_product_is_separated() {
    let (code, out, _) = run(&["check", &data("product.tdx"), &data("product_plus_one.tdx")]);
    assert_eq!(code, 1, "{out}");
    assert_eq!(field(&out, "verdict"), Some("not-equivalent"));
    let witness = field(&out, "witness").unwrap().to_string();
    let (_, a, _) = run(&["eval", &data("product.tdx"), &witness]);
    let (_, b, _) = run(&["eval", &data("product_plus_one.tdx"), &witness]);
    assert_eq!(a.trim(), field(&out, "output-1").unwrap());
    assert_eq!(b.trim(), field(&out, "output-2").unwrap());
    assert_ne!(a, b);
}

#[test]
fn relative_check_and_eval() {
    let (code, out, _) = run(&[
        "check",
        &data("product.tdx"),
        &data("product_swapped.tdx"),
        "--relative-to",
        &data("product.dtta"),
    ]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = run(&["eval", &data("product.tdx"), "(f (a (a (e))) (a (a (a (e)))))"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "6");
}

#[test]
fn intro_pair_certificate_round_trip() {
    let dir = Scratch::new();
    let cert = dir.0.join("intro.cert").to_string_lossy().into_owned();
    let (code, out, err) = run(&[
        "certify",
        &data("intro_m.tdx"),
        &data("intro_m_prime.tdx"),
        "--out",
        &cert,
    ]);
    assert_eq!(code, 0, "{out}{err}");
    let (code, out, _) = run(&["verify", &cert, &data("intro_m.tdx"), &data("intro_m_prime.tdx")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("certificate: valid"));

    // replayed against a different pair it must be rejected
    let (code, out, _) = run(&["verify", &cert, &data("intro_m.tdx"), &data("intro_m.tdx")]);
    assert_ne!(code, 0, "{out}");

    // flipping a coefficient breaks inductiveness or target containment
    let text = fs::read_to_string(&cert).unwrap();
    let tampered = dir.file("tampered.cert", &tamper(&text));
    assert_ne!(tampered, cert);
    let (code, out, err) = run(&["verify", &tampered, &data("intro_m.tdx"), &data("intro_m_prime.tdx")]);
    assert!(
        (code == 1 && out.contains("certificate: invalid")) || code == 3,
        "code {code}: {out}{err}"
    );
}

/// Adds a constant to the first generator of the certificate.
fn tamper(text: &str) -> String {
    let mut done = false;
    let mut out = String::new();
    for l in text.lines() {
        if !done && l.starts_with("generator: ") {
            out.push_str(&format!("{l} + 1\n"));
            done = true;
        } else {
            out.push_str(l);
            out.push('\n');
        }
    }
    assert!(done, "no generator in\n{text}");
    out
}

#[test]
fn verdicts_are_deterministic() {
    let args = ["check", &data("intro_m.tdx"), &data("intro_m_prime.tdx")].map(String::from);
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let (_, first, _) = run(&refs);
    for _ in 0..3 {
        assert_eq!(run(&refs).1, first);
    }
    let args = ["check", &data("product.tdx"), &data("product_plus_one.tdx"), "--prime-trials", "4"].map(String::from);
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let (_, first, _) = run(&refs);
    assert_eq!(run(&refs).1, first);
}

#[test]
fn input_errors_exit_with_three() {
    let dir = Scratch::new();
    let bad = dir.file("bad.tdx", "(transducer (mode numeric) (states q)");
    let (code, _, err) = run(&["check", &bad, &data("product.tdx")]);
    assert_eq!(code, 3);
    assert!(err.contains("error"), "{err}");
    let (code, _, _) = run(&["check", "/nonexistent/file.tdx", &data("product.tdx")]);
    assert_eq!(code, 3);
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 3);
    let (code, _, _) = run(&["check", &data("intro_m.tdx"), &data("intro_m_prime.tdx"), "--mode", "nonsense"]);
    assert_eq!(code, 3);
}

#[test]
fn degree_limit_zero_on_self_nested_is_unknown() {
    let pair = [data("square.tdx"), data("square_counted.tdx")];
    let (code, out, _) = run(&["check", &pair[0], &pair[1], "--max-depth", "0"]);
    assert_eq!(code, 2, "{out}");
    assert_eq!(field(&out, "verdict"), Some("unknown"));
    let (code, out, _) = run(&["check", &pair[0], &pair[1]]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("degree=2"), "{out}");
}

#[test]
fn environment_variables_configure_the_binary() {
    let bin = env!("CARGO_BIN_EXE_treequiv");
    let out = Command::new(bin)
        .args(["check", &data("square.tdx"), &data("square_counted.tdx")])
        .env("TREEQUIV_MAX_DEPTH", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let dir = Scratch::new();
    let m1 = dir.file("ab.tdx", &shape("", "", "", "a b"));
    let m2 = dir.file("ba.tdx", &shape("", "", "", "b a"));
    let out = Command::new(bin)
        .args(["check", &m1, &m2])
        .env("TREEQUIV_MODE", "abelian")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(field(&text, "interpretation"), Some("abelian"));
}

#[test]
fn abelian_ignores_order_but_not_counts() {
    let dir = Scratch::new();
    let ab = dir.file("ab.tdx", &shape("a", "b", "", "a"));
    let ba = dir.file("ba.tdx", &shape("b", "a", "", "a"));
    let aab = dir.file("aab.tdx", &shape("a a", "b", "", "a"));
    let (code, out, _) = run(&["check", &ab, &ba, "--mode", "abelian"]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = run(&["check", &ab, &ba]);
    assert_eq!(code, 1, "{out}");
    let (code, out, _) = run(&["check", &ab, &aab, "--mode", "abelian"]);
    assert_eq!(code, 1, "{out}");
}

#[test]
fn free_group_cancels_inverse_pairs() {
    let dir = Scratch::new();
    let ab = dir.file("ab.tdx", &shape("a", "b", "", "b"));
    let ba = dir.file("ba.tdx", &shape("b", "a", "", "b"));
    let padded = dir.file("padded.tdx", &shape("a a a-", "b- b b", "b- b", "b"));
    let (code, out, _) = run(&["check", &ab, &ba, "--mode", "f2"]);
    assert_eq!(code, 1, "{out}");
    let (code, out, _) = run(&["check", &ab, &padded, "--mode", "f2"]);
    assert_eq!(code, 0, "{out}");
    // as plain strings the padded variant differs
    let (code, out, _) = run(&["check", &ab, &padded]);
    assert_eq!(code, 1, "{out}");
}

#[test]
fn matrix_mode_reads_a_letter_map() {
    let dir = Scratch::new();
    // two commuting matrices: the images cannot tell `ab` from `ba`
    let alpha = dir.file("shear.mat", "(matrices (a (1 1) (0 1)) (b (1 2) (0 1)) (a- (1 -1) (0 1)) (b- (1 -2) (0 1)))");
    let ab = dir.file("ab.tdx", &shape("a", "b", "", "b"));
    let ba = dir.file("ba.tdx", &shape("b", "a", "", "b"));
    let mode = format!("matrix:{alpha}");
    let (code, out, err) = run(&["check", &ab, &ba, "--mode", &mode]);
    assert_eq!(code, 0, "{out}{err}");
    let (code, out, err) = run(&["check", &ab, &ba, "--mode", "f2"]);
    assert_eq!(code, 1, "{out}{err}");
}

#[test]
fn domain_mismatch_is_reported() {
    let dir = Scratch::new();
    let full = dir.file("full.tdx", &shape("a", "", "", "b"));
    // undefined whenever the right subtree is not a leaf
    let partial = dir.file(
        "partial.tdx",
        &string_transducer(
            "q r",
            "(rule q f (x1 x2) (out a) (call q x1) (call r x2)) (rule q e () (out b)) (rule r e () (out b))",
        ),
    );
    let (code, out, err) = run(&["check", &full, &partial]);
    assert_eq!(code, 1, "{out}{err}");
    assert_eq!(field(&out, "cause"), Some("domain"));
}

#[test]
fn single_transducer_commands() {
    let (code, out, _) = run(&["classify", &data("product.tdx")]);
    assert_eq!(code, 0);
    assert!(out.contains("parameters: 1"), "{out}");
    let (code, out, _) = run(&["unarize", &data("intro_m_prime.tdx")]);
    assert_eq!(code, 0);
    assert!(out.contains("(mode numeric)"), "{out}");
    let (code, out, _) = run(&["binarize", &data("intro_m.tdx")]);
    assert_eq!(code, 0);
    assert!(out.contains("(dtta"), "{out}");
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("check"));
}
