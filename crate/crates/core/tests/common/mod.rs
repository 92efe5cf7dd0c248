#![allow(dead_code)]

//! Random instances and brute-force oracles shared by the integration tests.
//! The evaluators here walk right-hand sides directly and never touch the
//! semantic systems the engines work on.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treequiv::transducer::{Mode, Rhs, Transducer};
use treequiv::tree::{all_trees, RankedAlphabet, Tree};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn alphabet(symbols: &[(&str, usize)]) -> RankedAlphabet {
    RankedAlphabet::new(symbols.iter().map(|&(n, r)| (n, r))).unwrap()
}

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

// ---------------------------------------------------------------- evaluation

pub fn eval_num(m: &Transducer, q: usize, t: &Tree, params: &[BigInt]) -> Option<BigInt> {
    let rhs = m.rule(q, t.symbol())?;
    num_value(m, rhs, t, params)
}

fn num_value(m: &Transducer, rhs: &Rhs, t: &Tree, params: &[BigInt]) -> Option<BigInt> {
    Some(match rhs {
        Rhs::Const(c) => c.clone(),
        Rhs::Param(j) => params[*j].clone(),
        Rhs::Add(ts) => {
            let mut s = BigInt::zero();
            for x in ts {
                s += num_value(m, x, t, params)?;
            }
            s
        }
        Rhs::Scale(c, x) => c * num_value(m, x, t, params)?,
        Rhs::Call { state, child, args } => {
            let vals = args
                .iter()
                .map(|a| num_value(m, a, t, params))
                .collect::<Option<Vec<_>>>()?;
            eval_num(m, *state, &t.children()[*child], &vals)?
        }
        other => panic!("string item {other:?} in a numeric rule"),
    })
}

pub fn eval_str(m: &Transducer, q: usize, t: &Tree) -> Option<Vec<usize>> {
    let rhs = m.rule(q, t.symbol())?;
    let mut out = Vec::new();
    str_value(m, rhs, t, &mut out)?;
    Some(out)
}

fn str_value(m: &Transducer, rhs: &Rhs, t: &Tree, out: &mut Vec<usize>) -> Option<()> {
    match rhs {
        Rhs::Seq(items) => {
            for i in items {
                str_value(m, i, t, out)?;
            }
        }
        Rhs::Out(a) => out.push(*a),
        Rhs::Call { state, child, args } => {
            assert!(args.is_empty(), "string oracle handles parameterless rules only");
            out.extend(eval_str(m, *state, &t.children()[*child])?);
        }
        other => panic!("unexpected item {other:?} in a string rule"),
    }
    Some(())
}

/// Output of the initial state with zero parameters.
pub fn translate_num(m: &Transducer, t: &Tree) -> Option<BigInt> {
    eval_num(m, m.initial(), t, &vec![BigInt::zero(); m.params()])
}

/// `[c, a_1, …, a_l]` with `⟦q⟧(t)(y) = c + Σ a_k y_k`, read off by probing
/// the unit vectors.
pub fn affine_row(m: &Transducer, q: usize, t: &Tree) -> Option<Vec<BigRational>> {
    let l = m.params();
    let zero = vec![BigInt::zero(); l];
    let c = eval_num(m, q, t, &zero)?;
    let mut row = vec![rat(&c)];
    for k in 0..l {
        let mut y = zero.clone();
        y[k] = BigInt::one();
        row.push(rat(&(eval_num(m, q, t, &y)? - &c)));
    }
    Some(row)
}

/// `Σ_{j≥1} w_j (s+1)^j` with letters numbered from 1.
pub fn base_number(w: &[usize], s: usize) -> BigInt {
    let base = BigInt::from(s + 1);
    let mut acc = BigInt::zero();
    let mut power = base.clone();
    for &a in w {
        acc += BigInt::from(a + 1) * &power;
        power *= &base;
    }
    acc
}

/// Free reduction by a stack; letters are names such as `a` and `a-`.
pub fn free_reduce(word: &[&str]) -> Vec<String> {
    let mut st: Vec<String> = Vec::new();
    for &x in word {
        let inv = match x.strip_suffix('-') {
            Some(b) => b.to_string(),
            None => format!("{x}-"),
        };
        if st.last() == Some(&inv) {
            st.pop();
        } else {
            st.push(x.to_string());
        }
    }
    st
}

pub fn reduced_output(m: &Transducer, t: &Tree) -> Option<Vec<String>> {
    let w = eval_str(m, m.initial(), t)?;
    let names: Vec<&str> = w.iter().map(|&a| m.output()[a].as_str()).collect();
    Some(free_reduce(&names))
}

pub type Mat2 = [[BigInt; 2]; 2];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn mat_identity() -> Mat2 {
    [[int(1), int(0)], [int(0), int(1)]]
}

/// The four generator images `a ↦ [[1,0],[2,1]]`, `b ↦ [[1,2],[0,1]]` and
/// their inverses.
pub fn sanov_image(letter: &str) -> Mat2 {
    let m = |a, b, c, d| [[int(a), int(b)], [int(c), int(d)]];
    match letter {
        "a" => m(1, 0, 2, 1),
        "a-" => m(1, 0, -2, 1),
        "b" => m(1, 2, 0, 1),
        "b-" => m(1, -2, 0, 1),
        other => panic!("no image for {other}"),
    }
}

pub fn sanov_word<S: AsRef<str>>(w: &[S]) -> Mat2 {
    w.iter().fold(mat_identity(), |acc, l| mat_mul(&acc, &sanov_image(l.as_ref())))
}

// ---------------------------------------------------------------- brute force

/// The first tree (in enumeration order) on which the two numeric
/// transducers differ, undefinedness included.
pub fn first_numeric_difference(m1: &Transducer, m2: &Transducer, trees: &[Tree]) -> Option<Tree> {
    trees
        .iter()
        .find(|t| translate_num(m1, t) != translate_num(m2, t))
        .cloned()
}

pub fn first_string_difference(m1: &Transducer, m2: &Transducer, trees: &[Tree]) -> Option<Tree> {
    trees
        .iter()
        .find(|t| {
            let a = eval_str(m1, m1.initial(), t).map(|w| names(m1, &w));
            let b = eval_str(m2, m2.initial(), t).map(|w| names(m2, &w));
            a != b
        })
        .cloned()
}

pub fn first_group_difference(m1: &Transducer, m2: &Transducer, trees: &[Tree]) -> Option<Tree> {
    trees
        .iter()
        .find(|t| reduced_output(m1, t) != reduced_output(m2, t))
        .cloned()
}

pub fn names(m: &Transducer, w: &[usize]) -> Vec<String> {
    w.iter().map(|&a| m.output()[a].clone()).collect()
}

pub fn trees_up_to(alph: &RankedAlphabet, d: usize) -> Vec<Tree> {
    all_trees(alph, d)
}

// ---------------------------------------------------------------- generators

pub fn binary_alphabets() -> Vec<RankedAlphabet> {
    vec![
        alphabet(&[("f", 2), ("e", 0)]),
        alphabet(&[("f", 2), ("g", 1), ("e", 0)]),
        alphabet(&[("f", 2), ("a", 0), ("b", 0)]),
        alphabet(&[("g", 1), ("h", 1), ("e", 0)]),
    ]
}

pub fn monadic_alphabet() -> RankedAlphabet {
    alphabet(&[("a", 1), ("b", 1), ("e", 0)])
}

fn state_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("q{i}")).collect()
}

/// Total parameterless numeric transducer: every rule is a constant plus a
/// few (possibly scaled, possibly repeated) calls.
pub fn random_numeric_ydt(rng: &mut dyn RngCore, alph: &RankedAlphabet, states: usize) -> Transducer {
    let mut m = Transducer::new(Mode::Numeric, alph.clone(), Vec::new(), state_names(states), 0, 0).unwrap();
    for q in 0..states {
        for f in alph.symbols() {
            let rank = alph.rank(f);
            let mut terms = vec![Rhs::constant(rng.gen_range(0..=2))];
            let calls = if rank == 0 { 0 } else { rng.gen_range(0..=2) };
            for _ in 0..calls {
                let c = Rhs::call(rng.gen_range(0..states), rng.gen_range(0..rank), Vec::new());
                terms.push(if rng.gen_bool(0.25) {
                    Rhs::Scale(int(2), Box::new(c))
                } else {
                    c
                });
            }
            m.add_rule(q, f, Rhs::Add(terms)).unwrap();
        }
    }
    m
}

fn random_expr(rng: &mut dyn RngCore, states: usize, params: usize, rank: usize, depth: u32, nest: bool) -> Rhs {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        return if params > 0 && rng.gen_bool(0.6) {
            Rhs::Param(rng.gen_range(0..params))
        } else {
            Rhs::constant(rng.gen_range(0..=2))
        };
    }
    let choice = rng.gen_range(0..if rank > 0 { 4 } else { 2 });
    match choice {
        0 => Rhs::Add(vec![
            random_expr(rng, states, params, rank, depth - 1, nest),
            random_expr(rng, states, params, rank, depth - 1, nest),
        ]),
        1 => Rhs::Scale(int(2), Box::new(random_expr(rng, states, params, rank, depth - 1, nest))),
        _ => {
            let args = (0..params)
                .map(|_| {
                    if nest {
                        random_expr(rng, states, params, rank, depth - 1, nest)
                    } else {
                        random_expr(rng, states, params, 0, depth - 1, false)
                    }
                })
                .collect();
            Rhs::call(rng.gen_range(0..states), rng.gen_range(0..rank), args)
        }
    }
}

/// Total numeric transducer with `params` parameters. With `nest` set the
/// arguments of a call may themselves contain calls.
pub fn random_numeric_ydmtt(
    rng: &mut dyn RngCore,
    alph: &RankedAlphabet,
    states: usize,
    params: usize,
    nest: bool,
) -> Transducer {
    let mut m = Transducer::new(Mode::Numeric, alph.clone(), Vec::new(), state_names(states), params, 0).unwrap();
    for q in 0..states {
        for f in alph.symbols() {
            let rank = alph.rank(f);
            let rhs = random_expr(rng, states, params, rank, 3, nest);
            m.add_rule(q, f, rhs).unwrap();
        }
    }
    m
}

/// Total parameterless string transducer. When `linear` is set every child
/// is visited at most once per rule.
pub fn random_string_ydt(
    rng: &mut dyn RngCore,
    alph: &RankedAlphabet,
    states: usize,
    letters: &[&str],
    linear: bool,
) -> Transducer {
    let output = letters.iter().map(|s| s.to_string()).collect();
    let mut m = Transducer::new(Mode::String, alph.clone(), output, state_names(states), 0, 0).unwrap();
    for q in 0..states {
        for f in alph.symbols() {
            let rank = alph.rank(f);
            let mut items = Vec::new();
            let mut children: Vec<usize> = (0..rank).collect();
            children.shuffle(rng);
            for _ in 0..rng.gen_range(0..=3) {
                items.push(Rhs::Out(rng.gen_range(0..letters.len())));
            }
            let ncalls = if rank == 0 { 0 } else { rng.gen_range(0..=rank.min(2)) };
            for i in 0..ncalls {
                let child = if linear { children[i] } else { rng.gen_range(0..rank) };
                let at = rng.gen_range(0..=items.len());
                items.insert(at, Rhs::call(rng.gen_range(0..states), child, Vec::new()));
            }
            m.add_rule(q, f, Rhs::Seq(items)).unwrap();
        }
    }
    m
}

// ---------------------------------------------------------------- rewrites

fn rebuild(m: &Transducer, states: Vec<String>, initial: usize) -> Transducer {
    Transducer::new(m.mode(), m.input().clone(), m.output().to_vec(), states, m.params(), initial).unwrap()
}

fn map_calls(rhs: &Rhs, k: &mut impl FnMut(usize, usize, Vec<Rhs>) -> Rhs) -> Rhs {
    match rhs {
        Rhs::Seq(ts) => Rhs::Seq(ts.iter().map(|t| map_calls(t, k)).collect()),
        Rhs::Add(ts) => Rhs::Add(ts.iter().map(|t| map_calls(t, k)).collect()),
        Rhs::Scale(c, t) => Rhs::Scale(c.clone(), Box::new(map_calls(t, k))),
        Rhs::Call { state, child, args } => {
            let args = args.iter().map(|a| map_calls(a, k)).collect();
            k(*state, *child, args)
        }
        other => other.clone(),
    }
}

/// Renames states by a random permutation.
pub fn permute_states(rng: &mut dyn RngCore, m: &Transducer) -> Transducer {
    let n = m.num_states();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut names = vec![String::new(); n];
    for q in 0..n {
        names[perm[q]] = format!("s{}", perm[q]);
    }
    let mut out = rebuild(m, names, perm[m.initial()]);
    for (q, f, rhs) in m.rules() {
        let r = map_calls(rhs, &mut |s, c, a| Rhs::call(perm[s], c, a));
        out.add_rule(perm[q], f, r).unwrap();
    }
    out
}

/// Adds a copy of a random state and sends some calls to the copy.
pub fn duplicate_state(rng: &mut dyn RngCore, m: &Transducer) -> Transducer {
    let n = m.num_states();
    let dup = rng.gen_range(0..n);
    let mut names = m.state_names().to_vec();
    names.push(format!("{}'", names[dup]));
    let mut out = rebuild(m, names, m.initial());
    let redirect = |s: usize, c: usize, a: Vec<Rhs>, rng: &mut dyn RngCore| {
        if s == dup && rng.gen_bool(0.5) {
            Rhs::call(n, c, a)
        } else {
            Rhs::call(s, c, a)
        }
    };
    for (q, f, rhs) in m.rules() {
        let r = map_calls(rhs, &mut |s, c, a| redirect(s, c, a, rng));
        if q == dup {
            out.add_rule(n, f, r.clone()).unwrap();
        }
        out.add_rule(q, f, r).unwrap();
    }
    out
}

/// Rewrites numeric expressions into equal ones: constants are split,
/// scalings distributed or expanded into sums, and sums shuffled.
pub fn reshape_numeric(rng: &mut dyn RngCore, m: &Transducer) -> Transducer {
    fn go(rng: &mut dyn RngCore, r: &Rhs) -> Rhs {
        match r {
            Rhs::Const(c) if rng.gen_bool(0.5) => {
                let k = int(rng.gen_range(-1..=2));
                Rhs::Add(vec![Rhs::Const(c - &k), Rhs::Const(k)])
            }
            Rhs::Add(ts) => {
                let mut v: Vec<Rhs> = ts.iter().map(|t| go(rng, t)).collect();
                v.shuffle(rng);
                Rhs::Add(v)
            }
            Rhs::Scale(c, t) => {
                let inner = go(rng, t);
                if *c == int(2) && rng.gen_bool(0.5) {
                    return Rhs::Add(vec![inner.clone(), inner]);
                }
                match inner {
                    Rhs::Add(ts) if rng.gen_bool(0.5) => {
                        Rhs::Add(ts.into_iter().map(|t| Rhs::Scale(c.clone(), Box::new(t))).collect())
                    }
                    other => Rhs::Scale(c.clone(), Box::new(other)),
                }
            }
            Rhs::Call { state, child, args } => Rhs::Call {
                state: *state,
                child: *child,
                args: args.iter().map(|a| go(rng, a)).collect(),
            },
            other => other.clone(),
        }
    }
    let mut out = rebuild(m, m.state_names().to_vec(), m.initial());
    for (q, f, rhs) in m.rules() {
        out.add_rule(q, f, go(rng, rhs)).unwrap();
    }
    out
}

/// Swaps two parameters of a non-initial state, in its rules and at every
/// call site.
pub fn swap_parameters(rng: &mut dyn RngCore, m: &Transducer) -> Transducer {
    if m.params() < 2 || m.num_states() < 2 {
        return m.clone();
    }
    let q0 = m.initial();
    let target = (q0 + rng.gen_range(1..m.num_states())) % m.num_states();
    fn swap_params(r: &Rhs) -> Rhs {
        match r {
            Rhs::Param(0) => Rhs::Param(1),
            Rhs::Param(1) => Rhs::Param(0),
            Rhs::Add(ts) => Rhs::Add(ts.iter().map(swap_params).collect()),
            Rhs::Scale(c, t) => Rhs::Scale(c.clone(), Box::new(swap_params(t))),
            Rhs::Call { state, child, args } => Rhs::Call {
                state: *state,
                child: *child,
                args: args.iter().map(swap_params).collect(),
            },
            other => other.clone(),
        }
    }
    let mut out = rebuild(m, m.state_names().to_vec(), q0);
    for (q, f, rhs) in m.rules() {
        let body = if q == target { swap_params(rhs) } else { rhs.clone() };
        let r = map_calls(&body, &mut |s, c, mut a| {
            if s == target {
                a.swap(0, 1);
            }
            Rhs::call(s, c, a)
        });
        out.add_rule(q, f, r).unwrap();
    }
    out
}

/// Inserts a cancelling pair `x x-` somewhere in every rule with probability
/// one half; equal in the free group, different as strings.
pub fn insert_cancelling(rng: &mut dyn RngCore, m: &Transducer) -> Transducer {
    let mut out = rebuild(m, m.state_names().to_vec(), m.initial());
    let inverse = |a: usize| {
        let name = &m.output()[a];
        let inv = match name.strip_suffix('-') {
            Some(b) => b.to_string(),
            None => format!("{name}-"),
        };
        m.output().iter().position(|x| *x == inv).expect("inverse letters are declared")
    };
    for (q, f, rhs) in m.rules() {
        let Rhs::Seq(items) = rhs else { unreachable!() };
        let mut items = items.clone();
        if rng.gen_bool(0.5) {
            let a = rng.gen_range(0..m.output().len());
            let at = rng.gen_range(0..=items.len());
            items.insert(at, Rhs::Out(inverse(a)));
            items.insert(at, Rhs::Out(a));
        }
        out.add_rule(q, f, Rhs::Seq(items)).unwrap();
    }
    out
}

/// A random chain of equivalence-preserving rewrites.
pub fn equivalent_variant(rng: &mut dyn RngCore, m: &Transducer) -> Transducer {
    let mut v = m.clone();
    if m.mode() == Mode::Numeric {
        v = reshape_numeric(rng, &v);
        if rng.gen_bool(0.5) {
            v = swap_parameters(rng, &v);
        }
    }
    if rng.gen_bool(0.5) {
        v = duplicate_state(rng, &v);
    }
    permute_states(rng, &v)
}

/// Changes one rule slightly: a constant moves by one, or a letter is
/// replaced. The result may still be equivalent when the rule is not used.
pub fn perturb(rng: &mut dyn RngCore, m: &Transducer) -> Transducer {
    let rules: Vec<(usize, treequiv::tree::Symbol)> = m.rules().map(|(q, f, _)| (q, f)).collect();
    let (tq, tf) = *rules.choose(rng).unwrap();
    let mut out = rebuild(m, m.state_names().to_vec(), m.initial());
    for (q, f, rhs) in m.rules() {
        let r = if (q, f) == (tq, tf) {
            match m.mode() {
                Mode::Numeric => Rhs::Add(vec![rhs.clone(), Rhs::constant(1)]),
                Mode::String => {
                    let Rhs::Seq(items) = rhs else { unreachable!() };
                    let mut items = items.clone();
                    let a = rng.gen_range(0..m.output().len());
                    let at = rng.gen_range(0..=items.len());
                    items.insert(at, Rhs::Out(a));
                    Rhs::Seq(items)
                }
            }
        } else {
            rhs.clone()
        };
        out.add_rule(q, f, r).unwrap();
    }
    out
}
