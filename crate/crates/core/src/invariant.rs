//! Polynomial invariants per automaton state.
//!
//! An invariant map assigns an ideal `I_p ⊆ Q[z]` to each state. It is
//! inductive when `wp(g, f) ∈ ⟨I_{p_1}(x_1), …, I_{p_k}(x_k)⟩` for every
//! transition `ρ(p, f) = (p_1 … p_k)` and every `g ∈ I_p`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::time::Instant;

use num_rational::BigRational;

use crate::dtta::{for_each_product, Dtta};
use crate::error::{Error, Result};
use crate::field::Rationals;
use crate::linalg::{kernel, SparseVec};
use crate::poly::{
    buchberger, degree_truncate, eliminate, intersect, vanishing_ideal, GroebnerBasis, Monomial,
    MonomialOrder, Polynomial,
};
use crate::system::{SymbolCache, Targets, VectorSystem};
use crate::tree::{Symbol, Tree};

const GRLEX: MonomialOrder = MonomialOrder::Grlex;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantMap {
    pub ideals: Vec<GroebnerBasis>,
    /// Degree bound the map was computed for.
    pub degree: u32,
}

impl InvariantMap {
    pub fn contains_targets(&self, initial: usize, targets: &Targets) -> bool {
        let ideal = &self.ideals[initial];
        targets.polys(ideal.nvars()).iter().all(|h| ideal.contains(h))
    }
}

#[derive(Debug, Clone)]
pub enum EngineVerdict {
    Equivalent(InvariantMap),
    NotEquivalent(Tree),
    Unknown(String),
}

struct Context<'a, S: VectorSystem> {
    aut: Dtta,
    n: usize,
    total: usize,
    trans: Vec<(usize, Symbol, Vec<usize>)>,
    cache: SymbolCache<'a, S>,
}

impl<'a, S: VectorSystem> Context<'a, S> {
    fn new(sys: &'a S, aut: &Dtta) -> Result<Self> {
        let aut = aut.with_alphabet(sys.alphabet())?;
        let n = sys.dim();
        let total = n * (sys.alphabet().max_rank() + 1);
        let trans = aut.transitions().map(|(p, f, cs)| (p, f, cs.to_vec())).collect();
        Ok(Context {
            aut,
            n,
            total,
            trans,
            cache: SymbolCache::new(sys),
        })
    }

    /// `⟨I_{p_1}(x_1), …, I_{p_k}(x_k)⟩` over the full space.
    fn children_ideal(&self, ideals: &[GroebnerBasis], cs: &[usize]) -> GroebnerBasis {
        let parts: Vec<GroebnerBasis> = cs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let map: Vec<usize> = (0..self.n).map(|j| (i + 1) * self.n + j).collect();
                ideals[c].rename(&map, self.total)
            })
            .collect();
        GroebnerBasis::disjoint_union(&parts, self.total, GRLEX)
    }

    fn wp(&mut self, g: &Polynomial, f: Symbol) -> Polynomial {
        g.substitute(self.cache.get(f))
    }

    /// `f♯(I_1, …, I_k) = {g : g∘r^{(f)} ∈ ⟨I_i(x_i)⟩}` by elimination.
    fn preimage(&mut self, ideals: &[GroebnerBasis], f: Symbol, cs: &[usize]) -> GroebnerBasis {
        let j = self.children_ideal(ideals, cs);
        if j.is_unit() {
            return GroebnerBasis::unit(self.n, GRLEX);
        }
        let r = self.cache.get(f).to_vec();
        let mut gens: Vec<Polynomial> = r
            .iter()
            .enumerate()
            .map(|(k, rk)| Polynomial::var(self.total, GRLEX, k).sub(rk))
            .collect();
        gens.extend(j.gens().iter().cloned());
        eliminate(&gens, self.n)
    }
}

/// `wp(g, f)`: the precondition on the children for `g` to hold at `f(…)`.
pub fn wp<S: VectorSystem>(sys: &S, g: &Polynomial, f: Symbol) -> Polynomial {
    g.substitute(&sys.symbol_polys(f))
}

/// The first transition and generator where inductiveness fails.
pub fn inductive_violation<S: VectorSystem>(
    sys: &S,
    aut: &Dtta,
    inv: &InvariantMap,
) -> Result<Option<(usize, Symbol, Polynomial)>> {
    let mut cx = Context::new(sys, aut)?;
    if inv.ideals.len() != cx.aut.num_states() {
        return Err(Error::Dimension {
            expected: cx.aut.num_states(),
            found: inv.ideals.len(),
        });
    }
    if let Some(bad) = inv.ideals.iter().find(|i| i.nvars() != cx.n) {
        return Err(Error::Dimension {
            expected: cx.n,
            found: bad.nvars(),
        });
    }
    for (p, f, cs) in cx.trans.clone() {
        let j = cx.children_ideal(&inv.ideals, &cs);
        if j.is_unit() {
            continue;
        }
        for g in inv.ideals[p].gens() {
            if !j.contains(&cx.wp(g, f)) {
                return Ok(Some((p, f, g.clone())));
            }
        }
    }
    Ok(None)
}

pub fn is_inductive<S: VectorSystem>(sys: &S, aut: &Dtta, inv: &InvariantMap) -> Result<bool> {
    Ok(inductive_violation(sys, aut, inv)?.is_none())
}

/// Replays a certificate: inductive, and the targets lie in the ideal of
/// the initial state.
pub fn check_certificate<S: VectorSystem>(
    sys: &S,
    aut: &Dtta,
    targets: &Targets,
    inv: &InvariantMap,
) -> Result<std::result::Result<(), String>> {
    if let Some((p, f, g)) = inductive_violation(sys, aut, inv)? {
        let vars = sys.variables(0);
        return Ok(Err(format!(
            "not inductive at state {} under `{}`: {}",
            aut.state_name(p),
            sys.alphabet().name(f),
            g.display(&vars)
        )));
    }
    if !inv.contains_targets(aut.initial(), targets) {
        return Ok(Err("targets are not in the ideal of the initial state".into()));
    }
    Ok(Ok(()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Vanishing ideals of the evaluated point sets.
    PointSet,
    /// Iterated preimages by elimination.
    Symbolic,
    /// Point sets up to depth `switch`, elimination beyond.
    Auto { switch: usize },
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy::Auto { switch: 3 }
    }
}

/// Reachable vectors of all trees of depth at most `d`, per state.
pub fn point_sets<S: VectorSystem>(sys: &S, aut: &Dtta, d: usize) -> Result<Vec<Vec<Vec<BigRational>>>> {
    let aut = aut.with_alphabet(sys.alphabet())?;
    let np = aut.num_states();
    let mut layers: Vec<Vec<Vec<BigRational>>> = vec![Vec::new(); np];
    for _ in 0..d {
        let mut next: Vec<Vec<Vec<BigRational>>> = vec![Vec::new(); np];
        let mut seen: Vec<HashSet<Vec<BigRational>>> = vec![HashSet::new(); np];
        for (p, f, cs) in aut.transitions() {
            let lists: Vec<&[Vec<BigRational>]> = cs.iter().map(|&c| layers[c].as_slice()).collect();
            for_each_product(&lists, |kids| {
                let v = sys.apply(&Rationals, f, kids);
                if seen[p].insert(v.clone()) {
                    next[p].push(v);
                }
            });
        }
        layers = next;
    }
    Ok(layers)
}

/// `I(⟦dom_d(p)⟧)` for every state `p`.
pub fn counterexample_pass<S: VectorSystem>(
    sys: &S,
    aut: &Dtta,
    d: usize,
    strategy: Strategy,
) -> Result<Vec<GroebnerBasis>> {
    let symbolic = match strategy {
        Strategy::PointSet => false,
        Strategy::Symbolic => true,
        Strategy::Auto { switch } => d > switch,
    };
    if !symbolic {
        let n = sys.dim();
        return Ok(point_sets(sys, aut, d)?.iter().map(|pts| vanishing_ideal(pts, n)).collect());
    }
    let mut cx = Context::new(sys, aut)?;
    let np = cx.aut.num_states();
    let mut ideals = vec![GroebnerBasis::unit(cx.n, GRLEX); np];
    for _ in 0..d {
        let mut next = vec![GroebnerBasis::unit(cx.n, GRLEX); np];
        for (p, f, cs) in cx.trans.clone() {
            let pre = cx.preimage(&ideals, f, &cs);
            next[p] = intersect(&next[p], &pre);
        }
        ideals = next;
    }
    Ok(ideals)
}

/// All monomials of degree at most `d` in `n` variables, by degree.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Monomial> {
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == cur.len() {
            out.push(Monomial::from_exps(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, d, &mut vec![0; n], &mut out);
    out.sort_by(|a, b| GRLEX.cmp(a, b));
    out
}

/// `wp(μ, f)` for every monomial, each built from a smaller one.
fn monomial_images(monos: &[Monomial], r: &[Polynomial], total: usize) -> Vec<Polynomial> {
    let mut by_mono: HashMap<Monomial, Polynomial> = HashMap::new();
    let mut out = Vec::with_capacity(monos.len());
    for m in monos {
        let img = match m.exps().iter().position(|&e| e > 0) {
            None => Polynomial::one(total, GRLEX),
            Some(i) => {
                let mut smaller = m.exps().to_vec();
                smaller[i] -= 1;
                let prev = &by_mono[&Monomial::from_exps(smaller)];
                prev.mul(&r[i])
            }
        };
        by_mono.insert(m.clone(), img.clone());
        out.push(img);
    }
    out
}

/// The greatest degree-`d` invariant map, by descending iteration from
/// the unit ideals. Each step takes, per state, the polynomials of degree
/// at most `d` whose preconditions hold under every transition, as the
/// kernel of a linear map on the coefficients.
pub fn invariant_pass<S: VectorSystem>(sys: &S, aut: &Dtta, d: u32) -> Result<InvariantMap> {
    invariant_pass_until(sys, aut, d, None)
}

fn invariant_pass_until<S: VectorSystem>(
    sys: &S,
    aut: &Dtta,
    d: u32,
    stop: Option<&Targets>,
) -> Result<InvariantMap> {
    let mut cx = Context::new(sys, aut)?;
    let np = cx.aut.num_states();
    let monos = monomials_up_to(cx.n, d);
    let mut images: HashMap<Symbol, Vec<Polynomial>> = HashMap::new();
    for &(_, f, _) in &cx.trans {
        if !images.contains_key(&f) {
            let r = cx.cache.get(f).to_vec();
            images.insert(f, monomial_images(&monos, &r, cx.total));
        }
    }
    let mut ideals = vec![GroebnerBasis::unit(cx.n, GRLEX); np];
    loop {
        let mut next = Vec::with_capacity(np);
        for p in 0..np {
            let mut columns: HashMap<(usize, Monomial), usize> = HashMap::new();
            let mut rows: Vec<SparseVec<BigRational>> = vec![SparseVec::new(); monos.len()];
            for (ti, (tp, f, cs)) in cx.trans.iter().enumerate() {
                if *tp != p {
                    continue;
                }
                let j = cx.children_ideal(&ideals, cs);
                if j.is_unit() {
                    continue;
                }
                for (row, img) in rows.iter_mut().zip(&images[f]) {
                    for (m, c) in j.normal_form(img).terms() {
                        let next_col = columns.len();
                        let col = *columns.entry((ti, m.clone())).or_insert(next_col);
                        row.insert(col, c.clone());
                    }
                }
            }
            let gens: Vec<Polynomial> = kernel(&Rationals, rows)
                .into_iter()
                .map(|k| Polynomial::from_terms(cx.n, GRLEX, k.into_iter().map(|(i, c)| (monos[i].clone(), c))))
                .collect();
            next.push(buchberger(&gens, cx.n, GRLEX));
        }
        let stable = next.iter().zip(&ideals).all(|(a, b)| a.same_ideal(b));
        ideals = next;
        let inv = InvariantMap { ideals, degree: d };
        if stable {
            return Ok(inv);
        }
        if let Some(t) = stop {
            if !inv.contains_targets(cx.aut.initial(), t) {
                return Ok(inv);
            }
        }
        ideals = inv.ideals;
    }
}

/// The same fixpoint computed with elimination and degree truncation.
pub fn invariant_pass_symbolic<S: VectorSystem>(sys: &S, aut: &Dtta, d: u32) -> Result<InvariantMap> {
    let mut cx = Context::new(sys, aut)?;
    let np = cx.aut.num_states();
    let mut ideals = vec![GroebnerBasis::unit(cx.n, GRLEX); np];
    loop {
        let mut next = vec![GroebnerBasis::unit(cx.n, GRLEX); np];
        for (p, f, cs) in cx.trans.clone() {
            let pre = cx.preimage(&ideals, f, &cs);
            next[p] = intersect(&next[p], &pre);
        }
        let next: Vec<GroebnerBasis> = next.iter().map(|i| degree_truncate(i, d)).collect();
        if next.iter().zip(&ideals).all(|(a, b)| a.same_ideal(b)) {
            return Ok(InvariantMap { ideals: next, degree: d });
        }
        ideals = next;
    }
}

/// The first tree of `dom_d(p_0)` (in enumeration order) violating the targets.
pub fn find_violation<S: VectorSystem>(sys: &S, aut: &Dtta, targets: &Targets, d: usize) -> Result<Option<Tree>> {
    let aut = aut.with_alphabet(sys.alphabet())?;
    Ok(aut
        .enumerate_dom(aut.initial(), d)
        .into_iter()
        .find(|t| !targets.holds_at(&sys.eval(t))))
}

#[derive(Debug, Clone)]
pub struct DecideOptions {
    pub max_degree: u32,
    pub strategy: Strategy,
    pub deadline: Option<Instant>,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            max_degree: 4,
            strategy: Strategy::default(),
            deadline: None,
        }
    }
}

/// Alternates the counterexample and invariant passes for `d = 1, 2, …`.
pub fn decide<S: VectorSystem>(sys: &S, aut: &Dtta, targets: &Targets, opts: &DecideOptions) -> Result<EngineVerdict> {
    let aut = aut.with_alphabet(sys.alphabet())?;
    let p0 = aut.initial();
    let hs = targets.polys(sys.dim());
    for d in 1..=opts.max_degree {
        if opts.deadline.is_some_and(|t| Instant::now() >= t) {
            return Ok(EngineVerdict::Unknown(format!("time limit reached before degree {d}")));
        }
        let cex = counterexample_pass(sys, &aut, d as usize, opts.strategy)?;
        if !hs.iter().all(|h| cex[p0].contains(h)) {
            return match find_violation(sys, &aut, targets, d as usize)? {
                Some(t) => Ok(EngineVerdict::NotEquivalent(t)),
                None => Err(Error::Internal(format!(
                    "depth-{d} ideal excludes the targets but no tree of that depth violates them"
                ))),
            };
        }
        if opts.deadline.is_some_and(|t| Instant::now() >= t) {
            return Ok(EngineVerdict::Unknown(format!("time limit reached at degree {d}")));
        }
        let inv = invariant_pass_until(sys, &aut, d, Some(targets))?;
        if inv.contains_targets(p0, targets) {
            return Ok(EngineVerdict::Equivalent(inv));
        }
    }
    Ok(EngineVerdict::Unknown(format!(
        "no invariant or counterexample up to degree {}",
        opts.max_degree
    )))
}

struct Demand {
    state: usize,
    poly: Polynomial,
    parent: Option<(usize, Symbol)>,
}

/// Least fixpoint for monadic automata: the target ideal is pushed down
/// transitions, one generator at a time. Every new demand is checked at the
/// leaves of its state as soon as it is created, and demands of lower degree
/// are absorbed first. A degree-one inductive map containing the targets
/// contains the least solution, so it is tried before propagating.
pub fn monadic_decide<S: VectorSystem>(
    sys: &S,
    aut: &Dtta,
    targets: &Targets,
    budget: usize,
) -> Result<EngineVerdict> {
    if !sys.alphabet().is_monadic() {
        return Err(Error::Unsupported("monadic_decide needs symbols of rank at most one".into()));
    }
    let linear = invariant_pass_until(sys, aut, 1, Some(targets))?;
    let aut = aut.with_alphabet(sys.alphabet())?;
    if linear.contains_targets(aut.initial(), targets) {
        return Ok(EngineVerdict::Equivalent(linear));
    }
    propagate(sys, &aut, targets, budget)
}

fn propagate<S: VectorSystem>(sys: &S, aut: &Dtta, targets: &Targets, budget: usize) -> Result<EngineVerdict> {
    let mut cx = Context::new(sys, aut)?;
    let n = cx.n;
    let np = cx.aut.num_states();
    let back: Vec<usize> = (0..cx.total).map(|j| j % n).collect();
    let mut ideals = vec![GroebnerBasis::zero_ideal(n, GRLEX); np];
    let mut demands: Vec<Demand> = Vec::new();
    let mut queue = BinaryHeap::new();

    let witness = |demands: &[Demand], leaf: Symbol, mut at: usize| {
        let mut t = Tree::leaf(leaf);
        while let Some((parent, sym)) = demands[at].parent {
            t = Tree::new(sym, vec![t]);
            at = parent;
        }
        t
    };
    // Records a demand; returns a witness when it fails at a leaf.
    let push = |cx: &mut Context<'_, S>,
                    demands: &mut Vec<Demand>,
                    queue: &mut BinaryHeap<Reverse<(u32, usize)>>,
                    d: Demand|
     -> Option<Tree> {
        let (state, degree) = (d.state, d.poly.total_degree());
        demands.push(d);
        let i = demands.len() - 1;
        for (tp, f, cs) in cx.trans.clone() {
            if tp == state && cs.is_empty() && !cx.wp(&demands[i].poly, f).is_zero() {
                return Some(witness(demands, f, i));
            }
        }
        queue.push(Reverse((degree, i)));
        None
    };

    for h in targets.polys(n) {
        let d = Demand {
            state: cx.aut.initial(),
            poly: h,
            parent: None,
        };
        if let Some(t) = push(&mut cx, &mut demands, &mut queue, d) {
            return Ok(EngineVerdict::NotEquivalent(t));
        }
    }
    let mut accepted = 0usize;
    while let Some(Reverse((_, i))) = queue.pop() {
        let (p, g) = (demands[i].state, demands[i].poly.clone());
        if ideals[p].contains(&g) {
            continue;
        }
        accepted += 1;
        if accepted > budget {
            return Ok(EngineVerdict::Unknown(format!("generator budget {budget} exhausted")));
        }
        let mut gens = ideals[p].gens().to_vec();
        gens.push(g.clone());
        ideals[p] = buchberger(&gens, n, GRLEX);
        for (tp, f, cs) in cx.trans.clone() {
            if tp != p || cs.is_empty() {
                continue;
            }
            let pulled = cx.wp(&g, f).map_vars(&back, n, GRLEX);
            if pulled.is_zero() {
                continue;
            }
            let d = Demand {
                state: cs[0],
                poly: pulled,
                parent: Some((i, f)),
            };
            if let Some(t) = push(&mut cx, &mut demands, &mut queue, d) {
                return Ok(EngineVerdict::NotEquivalent(t));
            }
        }
    }
    let degree = ideals.iter().map(GroebnerBasis::max_degree).max().unwrap_or(0);
    Ok(EngineVerdict::Equivalent(InvariantMap { ideals, degree }))
}

/// Turns the affine hulls of a finished affine run into a degree-one map.
pub fn from_affine(closure: &crate::affine::AffineClosure<BigRational>) -> InvariantMap {
    InvariantMap {
        ideals: closure.bases.iter().map(|b| b.ideal()).collect(),
        degree: 1,
    }
}
