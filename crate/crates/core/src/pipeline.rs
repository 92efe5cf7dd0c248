//! End-to-end equivalence checks: domain comparison, encoding of the input,
//! construction of a vector system and dispatch to an engine.

use std::time::{Duration, Instant};

use num_bigint::BigInt;

use crate::affine::{decide_affine, decide_modular, AffineVerdict, ModularOptions, ModularVerdict};
use crate::dtta::{binary_lift, difference_witness, Dtta};
use crate::error::{input, Error, Result};
use crate::invariant::{decide, from_affine, monadic_decide, DecideOptions, EngineVerdict, InvariantMap, Strategy};
use crate::system::{Targets, UnarySystem, VectorSystem};
use crate::transducer::{word_to_string, Binarized, Mode, Transducer};
use crate::tree::{RankedAlphabet, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    Auto,
    Affine,
    Invariant,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Auto => "auto",
            Engine::Affine => "affine",
            Engine::Invariant => "invariant",
        }
    }
}

/// When string transducers are moved to binary input trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BinarizePolicy {
    /// Only for input ranks above two.
    #[default]
    Auto,
    Always,
    Never,
}

#[derive(Debug, Clone)]
pub struct Options {
    pub engine: Engine,
    pub max_degree: u32,
    pub strategy: Strategy,
    pub monadic_budget: usize,
    /// Modular screening rounds before the exact affine run; 0 disables it.
    pub prime_trials: usize,
    pub seed: u64,
    pub binarize: BinarizePolicy,
    pub time_limit: Option<Duration>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            engine: Engine::Auto,
            max_degree: 4,
            strategy: Strategy::default(),
            monadic_budget: 2000,
            prime_trials: 0,
            seed: 0,
            binarize: BinarizePolicy::Auto,
            time_limit: None,
        }
    }
}

/// Why two transducers differ on a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cause {
    Domain,
    Output,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    /// A tree over [`Counterexample::alphabet`].
    pub tree: Tree,
    pub alphabet: RankedAlphabet,
    /// Rendered outputs, `undefined` outside a domain.
    pub outputs: [String; 2],
    pub cause: Cause,
    /// Set when a modular run found the difference.
    pub prime: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificatePart {
    pub label: String,
    pub engine: String,
    pub automaton_states: Vec<String>,
    pub system_states: Vec<String>,
    /// Entries per system state.
    pub width: usize,
    pub invariant: InvariantMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub interpretation: String,
    pub binarized: bool,
    pub parts: Vec<CertificatePart>,
}

impl Certificate {
    pub fn degree(&self) -> u32 {
        self.parts.iter().map(|p| p.invariant.degree).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Equivalent(Certificate),
    NotEquivalent(Counterexample),
    Unknown(String),
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Equivalent(_) => "equivalent",
            Verdict::NotEquivalent(_) => "not-equivalent",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

/// The union of two transducers restricted to their common domain.
#[derive(Debug, Clone)]
pub struct Merged {
    /// Total transducer, over the binary alphabet when `binarized` is set.
    pub transducer: Transducer,
    pub first: usize,
    pub second: usize,
    /// Trimmed automaton over the input alphabet of `transducer`.
    pub automaton: Dtta,
    pub binarized: Option<Binarized>,
    /// Merged input alphabet of the original transducers.
    pub alphabet: RankedAlphabet,
}

impl Merged {
    /// Maps a tree over the system alphabet back to the original input.
    pub fn decode(&self, t: &Tree) -> Result<Tree> {
        match &self.binarized {
            None => Ok(t.clone()),
            Some(b) => b
                .decode(t)
                .ok_or_else(|| Error::Internal("witness is not the encoding of a tree".into())),
        }
    }
}

pub enum Prepared {
    /// The domains differ on `tree`, which the first transducer accepts iff
    /// `first_defined`.
    DomainMismatch {
        tree: Tree,
        alphabet: RankedAlphabet,
        first_defined: bool,
    },
    Ready(Merged),
}

/// Compares the domains (relative to `relative` when given) and builds the
/// merged, total transducer together with the automaton of the common domain.
pub fn merge_pair(m1: &Transducer, m2: &Transducer, relative: Option<&Dtta>, binarize: bool) -> Result<Prepared> {
    let (u, q1, q2) = m1.union(m2)?;
    let mut alph = u.input().clone();
    if let Some(a) = relative {
        alph = alph.merge(a.alphabet())?;
    }
    let u = u.with_input_alphabet(&alph)?;
    let mut d1 = u.domain_automaton(q1);
    let mut d2 = u.domain_automaton(q2);
    if let Some(a) = relative {
        let a = a.with_alphabet(&alph)?;
        d1 = d1.product(&a)?;
        d2 = d2.product(&a)?;
    }
    if let Some((tree, first_defined)) = difference_witness(&d1, &d2)? {
        return Ok(Prepared::DomainMismatch {
            tree,
            alphabet: alph,
            first_defined,
        });
    }
    let dom = d1.trim();
    let merged = if binarize {
        let b = u.binarize()?;
        Merged {
            transducer: b.transducer.totalize(),
            first: b.state(q1, 1),
            second: b.state(q2, 1),
            automaton: binary_lift(&dom)?.trim(),
            binarized: Some(b),
            alphabet: alph,
        }
    } else {
        Merged {
            transducer: u.totalize(),
            first: q1,
            second: q2,
            automaton: dom,
            binarized: None,
            alphabet: alph,
        }
    };
    Ok(Prepared::Ready(merged))
}

/// What an engine concluded, on the system alphabet.
#[derive(Debug, Clone)]
pub enum EngineResult {
    Equivalent { invariant: InvariantMap, engine: &'static str },
    Counterexample { tree: Tree, prime: Option<u64> },
    Unknown(String),
}

/// Runs the engine selected by `opts` (or chosen from the shape of the
/// system) on `targets` relative to `aut`.
pub fn run_engines<S: VectorSystem>(sys: &S, aut: &Dtta, targets: &Targets, opts: &Options) -> Result<EngineResult> {
    let affine = match opts.engine {
        Engine::Affine => true,
        Engine::Invariant => false,
        Engine::Auto => sys.multi_affine(),
    };
    if affine {
        if opts.prime_trials > 0 {
            let m = ModularOptions {
                trials: opts.prime_trials,
                seed: opts.seed,
                bound_bits: 64,
            };
            if let ModularVerdict::NotEquivalent { prime, witness } = decide_modular(sys, aut, targets, &m)? {
                return Ok(EngineResult::Counterexample {
                    tree: witness,
                    prime: Some(prime),
                });
            }
        }
        return Ok(match decide_affine(sys, aut, targets)? {
            AffineVerdict::Equivalent(cl) => EngineResult::Equivalent {
                invariant: from_affine(&cl),
                engine: "affine",
            },
            AffineVerdict::NotEquivalent(tree) => EngineResult::Counterexample { tree, prime: None },
        });
    }
    if opts.max_degree == 0 {
        return Ok(EngineResult::Unknown("invariant degree budget is zero".into()));
    }
    let verdict = if sys.alphabet().is_monadic() {
        monadic_decide(sys, aut, targets, opts.monadic_budget)?
    } else {
        let d = DecideOptions {
            max_degree: opts.max_degree,
            strategy: opts.strategy,
            deadline: opts.time_limit.map(|t| Instant::now() + t),
        };
        decide(sys, aut, targets, &d)?
    };
    let engine = if sys.alphabet().is_monadic() { "monadic" } else { "invariant" };
    Ok(match verdict {
        EngineVerdict::Equivalent(invariant) => EngineResult::Equivalent { invariant, engine },
        EngineVerdict::NotEquivalent(tree) => EngineResult::Counterexample { tree, prime: None },
        EngineVerdict::Unknown(why) => EngineResult::Unknown(why),
    })
}

/// Renders the output of `m` on a tree over `alph`, or `undefined`.
pub type Render<'a> = dyn Fn(&Transducer, &Tree) -> Result<Option<String>> + 'a;

pub fn render_exact(m: &Transducer, t: &Tree) -> Result<Option<String>> {
    Ok(match m.mode() {
        Mode::String => m.translate_string(t)?.map(|w| word_to_string(m.output(), &w)),
        Mode::Numeric => m.translate_unary(t)?.map(|v| v.to_string()),
    })
}

/// Evaluates both transducers on a tree over `alph`.
pub fn outputs(m1: &Transducer, m2: &Transducer, alph: &RankedAlphabet, t: &Tree, render: &Render) -> Result<[String; 2]> {
    let one = |m: &Transducer| -> Result<String> {
        match t.remap(alph, m.input()) {
            Err(_) => Ok("undefined".to_string()),
            Ok(local) => Ok(render(m, &local)?.unwrap_or_else(|| "undefined".to_string())),
        }
    };
    Ok([one(m1)?, one(m2)?])
}

/// Builds the counterexample and confirms that the outputs differ.
pub fn confirm(
    m1: &Transducer,
    m2: &Transducer,
    alph: &RankedAlphabet,
    tree: Tree,
    cause: Cause,
    prime: Option<u64>,
    render: &Render,
) -> Result<Verdict> {
    let outs = outputs(m1, m2, alph, &tree, render)?;
    if outs[0] == outs[1] {
        return Err(Error::Internal(format!(
            "witness {} does not separate the transducers",
            tree.display(alph)
        )));
    }
    Ok(Verdict::NotEquivalent(Counterexample {
        tree,
        alphabet: alph.clone(),
        outputs: outs,
        cause,
        prime,
    }))
}

fn should_binarize(m1: &Transducer, m2: &Transducer, policy: BinarizePolicy) -> bool {
    let string = m1.mode() == Mode::String;
    match policy {
        BinarizePolicy::Never => false,
        BinarizePolicy::Always => string,
        BinarizePolicy::Auto => string && m1.input().max_rank().max(m2.input().max_rank()) > 2,
    }
}

/// The unary system of a merged pair: string transducers are unarized.
pub fn exact_system(merged: &Merged) -> Result<(UnarySystem, Targets)> {
    let numeric = match merged.transducer.mode() {
        Mode::String => merged.transducer.unarize()?,
        Mode::Numeric => merged.transducer.clone(),
    };
    let sys = UnarySystem::new(numeric)?;
    let targets = sys.target(merged.first, merged.second);
    Ok((sys, targets))
}

fn check_modes(m1: &Transducer, m2: &Transducer) -> Result<()> {
    if m1.mode() != m2.mode() {
        return input("cannot compare a string-mode transducer with a numeric-mode one");
    }
    if m1.mode() == Mode::String && (m1.params() > 0 || m2.params() > 0) {
        return Err(Error::Unsupported(
            "string-mode transducers with parameters are only handled for unary output; \
             use numeric mode"
                .into(),
        ));
    }
    Ok(())
}

pub(crate) fn part(label: &str, engine: &str, merged: &Merged, sys: &impl SystemShape, invariant: InvariantMap) -> CertificatePart {
    CertificatePart {
        label: label.to_string(),
        engine: engine.to_string(),
        automaton_states: merged.automaton.state_names().to_vec(),
        system_states: sys.state_names(),
        width: sys.width(),
        invariant,
    }
}

/// Names and block width of the states behind a system's coordinates.
pub trait SystemShape {
    fn state_names(&self) -> Vec<String>;
    fn width(&self) -> usize;
}

impl SystemShape for UnarySystem {
    fn state_names(&self) -> Vec<String> {
        self.transducer().state_names().to_vec()
    }

    fn width(&self) -> usize {
        UnarySystem::width(self)
    }
}

/// Equivalence of two transducers (both numeric, or both parameterless
/// string transducers) on the trees of `relative`, or everywhere.
pub fn decide_partial(m1: &Transducer, m2: &Transducer, relative: Option<&Dtta>, opts: &Options) -> Result<Verdict> {
    check_modes(m1, m2)?;
    let bin = should_binarize(m1, m2, opts.binarize);
    let merged = match merge_pair(m1, m2, relative, bin)? {
        Prepared::DomainMismatch { tree, alphabet, .. } => {
            return confirm(m1, m2, &alphabet, tree, Cause::Domain, None, &render_exact);
        }
        Prepared::Ready(m) => m,
    };
    let (sys, targets) = exact_system(&merged)?;
    match run_engines(&sys, &merged.automaton, &targets, opts)? {
        EngineResult::Equivalent { invariant, engine } => Ok(Verdict::Equivalent(Certificate {
            interpretation: "exact".into(),
            binarized: merged.binarized.is_some(),
            parts: vec![part("main", engine, &merged, &sys, invariant)],
        })),
        EngineResult::Counterexample { tree, prime } => {
            let tree = merged.decode(&tree)?;
            confirm(m1, m2, &merged.alphabet, tree, Cause::Output, prime, &render_exact)
        }
        EngineResult::Unknown(why) => Ok(Verdict::Unknown(why)),
    }
}

/// Letter counts of the output as a space-separated `letter=count` list.
pub fn render_counts(m: &Transducer, t: &Tree) -> Result<Option<String>> {
    Ok(m.translate_string(t)?.map(|w| {
        let mut counts = vec![0usize; m.output().len()];
        for a in w {
            counts[a] += 1;
        }
        let mut v: Vec<(String, usize)> = m.output().iter().cloned().zip(counts).filter(|x| x.1 > 0).collect();
        v.sort();
        v.iter().map(|(l, c)| format!("{l}={c}")).collect::<Vec<_>>().join(" ")
    }))
}

/// Output letters of both transducers in first-appearance order.
fn shared_letters(m1: &Transducer, m2: &Transducer) -> Vec<String> {
    let mut letters = m1.output().to_vec();
    for l in m2.output() {
        if !letters.contains(l) {
            letters.push(l.clone());
        }
    }
    letters
}

/// The per-letter projections of a merged string pair.
pub fn abelian_systems(merged: &Merged, letters: &[String]) -> Result<Vec<(String, UnarySystem, Targets)>> {
    let m = merged.transducer.with_output_letters(letters)?;
    letters
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let w: Vec<BigInt> = (0..letters.len()).map(|j| BigInt::from((i == j) as u8)).collect();
            let sys = UnarySystem::new(m.count_projection(&w)?)?;
            let targets = sys.target(merged.first, merged.second);
            Ok((format!("letter {l}"), sys, targets))
        })
        .collect()
}

/// Equality of outputs up to reordering of letters.
pub fn abelian_decide(m1: &Transducer, m2: &Transducer, relative: Option<&Dtta>, opts: &Options) -> Result<Verdict> {
    if m1.mode() != Mode::String || m2.mode() != Mode::String {
        return input("abelian equivalence needs string-mode transducers");
    }
    check_modes(m1, m2)?;
    let merged = match merge_pair(m1, m2, relative, false)? {
        Prepared::DomainMismatch { tree, alphabet, .. } => {
            return confirm(m1, m2, &alphabet, tree, Cause::Domain, None, &render_counts);
        }
        Prepared::Ready(m) => m,
    };
    let letters = shared_letters(m1, m2);
    let mut parts = Vec::new();
    for (label, sys, targets) in abelian_systems(&merged, &letters)? {
        match run_engines(&sys, &merged.automaton, &targets, opts)? {
            EngineResult::Equivalent { invariant, engine } => parts.push(part(&label, engine, &merged, &sys, invariant)),
            EngineResult::Counterexample { tree, prime } => {
                return confirm(m1, m2, &merged.alphabet, tree, Cause::Output, prime, &render_counts)
            }
            EngineResult::Unknown(why) => return Ok(Verdict::Unknown(format!("{label}: {why}"))),
        }
    }
    Ok(Verdict::Equivalent(Certificate {
        interpretation: "abelian".into(),
        binarized: false,
        parts,
    }))
}

/// Replays one certificate part against a freshly built system.
pub fn check_part<S: VectorSystem + SystemShape>(
    part: &CertificatePart,
    sys: &S,
    merged: &Merged,
    targets: &Targets,
) -> Result<std::result::Result<(), String>> {
    if part.automaton_states != merged.automaton.state_names() {
        return Ok(Err(format!("{}: automaton states do not match", part.label)));
    }
    if part.system_states != sys.state_names() || part.width != sys.width() {
        return Ok(Err(format!("{}: system states do not match", part.label)));
    }
    crate::invariant::check_certificate(sys, &merged.automaton, targets, &part.invariant)
}

/// How outputs are compared.
#[derive(Debug, Clone, PartialEq)]
pub enum Interpretation {
    /// Equal strings (or numbers in numeric mode).
    Exact,
    /// Equal letter counts.
    Abelian,
    /// Equal in the free group on `a`.
    F1,
    /// Equal in the free group on `a`, `b`.
    F2,
    /// Equal images under a letter-to-matrix homomorphism.
    Matrix(crate::group::Alpha),
}

impl Interpretation {
    pub fn name(&self) -> &'static str {
        match self {
            Interpretation::Exact => "exact",
            Interpretation::Abelian => "abelian",
            Interpretation::F1 => "f1",
            Interpretation::F2 => "f2",
            Interpretation::Matrix(_) => "matrix",
        }
    }
}

/// Decides equivalence under the given interpretation.
pub fn check(
    interp: &Interpretation,
    m1: &Transducer,
    m2: &Transducer,
    relative: Option<&Dtta>,
    opts: &Options,
) -> Result<Verdict> {
    match interp {
        Interpretation::Exact => decide_partial(m1, m2, relative, opts),
        Interpretation::Abelian => abelian_decide(m1, m2, relative, opts),
        other => crate::group::decide_group(other, m1, m2, relative, opts),
    }
}

/// Rebuilds the systems a certificate speaks about and checks every part.
pub fn verify_certificate(
    cert: &Certificate,
    interp: &Interpretation,
    m1: &Transducer,
    m2: &Transducer,
    relative: Option<&Dtta>,
) -> Result<std::result::Result<(), String>> {
    if cert.interpretation != interp.name() {
        return Ok(Err(format!(
            "certificate is for `{}`, not `{}`",
            cert.interpretation,
            interp.name()
        )));
    }
    let merged = match merge_pair(m1, m2, relative, cert.binarized)? {
        Prepared::DomainMismatch { .. } => return Ok(Err("the domains differ".into())),
        Prepared::Ready(m) => m,
    };
    let systems: Vec<(String, UnarySystem, Targets)> = match interp {
        Interpretation::Exact => {
            let (s, t) = exact_system(&merged)?;
            vec![("main".to_string(), s, t)]
        }
        Interpretation::Abelian => abelian_systems(&merged, &shared_letters(m1, m2))?,
        other => return crate::group::verify_group_certificate(cert, other, &merged),
    };
    check_parts(cert, &merged, &systems)
}

pub(crate) fn check_parts<S: VectorSystem + SystemShape>(
    cert: &Certificate,
    merged: &Merged,
    systems: &[(String, S, Targets)],
) -> Result<std::result::Result<(), String>> {
    if systems.len() != cert.parts.len() {
        return Ok(Err(format!("expected {} parts, found {}", systems.len(), cert.parts.len())));
    }
    for ((label, sys, targets), part) in systems.iter().zip(&cert.parts) {
        if &part.label != label {
            return Ok(Err(format!("unexpected part `{}`", part.label)));
        }
        if let Err(e) = check_part(part, sys, merged, targets)? {
            return Ok(Err(e));
        }
    }
    Ok(Ok(()))
}
