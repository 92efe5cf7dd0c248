//! Affine hulls of reachable semantic vectors, for systems that are
//! affine in every argument block (non-self-nested transducers).
//!
//! The hull at each automaton state is kept as a base point plus a reduced
//! row echelon basis. Insertions only happen when the hull grows, so the
//! fixpoint performs at most `|P|·(N+1)` of them.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dtta::{for_each_product, Dtta};
use crate::error::{Error, Result};
use crate::field::{prime_interval, sample_prime, Field, PrimeField, Rationals};
use crate::poly::{buchberger, GroebnerBasis, MonomialOrder, Polynomial};
use crate::system::{Targets, VectorSystem};
use crate::tree::{Symbol, Tree};

/// `aff(S)` for a finite `S ⊆ F^dim` as base point plus reduced echelon rows.
#[derive(Debug, Clone)]
pub struct AffineBasis<E> {
    dim: usize,
    base: Option<Vec<E>>,
    rows: Vec<Vec<E>>,
    pivots: Vec<usize>,
}

impl<E: Clone + PartialEq + std::fmt::Debug> AffineBasis<E> {
    pub fn empty(dim: usize) -> Self {
        AffineBasis {
            dim,
            base: None,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_none()
    }

    pub fn base(&self) -> Option<&[E]> {
        self.base.as_deref()
    }

    pub fn rows(&self) -> &[Vec<E>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Dimension of the hull; `None` for the empty set.
    pub fn dimension(&self) -> Option<usize> {
        self.base.as_ref().map(|_| self.rows.len())
    }

    /// `v - base` reduced against the rows.
    fn residual<F: Field<Elem = E>>(&self, field: &F, v: &[E]) -> Vec<E> {
        let base = self.base.as_ref().expect("non-empty basis");
        let mut w: Vec<E> = v.iter().zip(base).map(|(a, b)| field.sub(a, b)).collect();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if field.is_zero(&w[p]) {
                continue;
            }
            let c = w[p].clone();
            for (x, r) in w.iter_mut().zip(row) {
                if !field.is_zero(r) {
                    *x = field.sub(x, &field.mul(&c, r));
                }
            }
        }
        w
    }

    pub fn contains<F: Field<Elem = E>>(&self, field: &F, v: &[E]) -> bool {
        match &self.base {
            None => false,
            Some(_) => self.residual(field, v).iter().all(|x| field.is_zero(x)),
        }
    }

    /// Adds `v`; returns whether the hull grew.
    pub fn insert<F: Field<Elem = E>>(&mut self, field: &F, v: &[E]) -> Result<bool> {
        if v.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: v.len(),
            });
        }
        if self.base.is_none() {
            self.base = Some(v.to_vec());
            return Ok(true);
        }
        let mut w = self.residual(field, v);
        let Some(p) = w.iter().position(|x| !field.is_zero(x)) else {
            return Ok(false);
        };
        let inv = field.inv(&w[p]);
        for x in w.iter_mut() {
            *x = field.mul(x, &inv);
        }
        for row in self.rows.iter_mut() {
            if field.is_zero(&row[p]) {
                continue;
            }
            let c = row[p].clone();
            for (x, y) in row.iter_mut().zip(&w) {
                *x = field.sub(x, &field.mul(&c, y));
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, w);
        Ok(true)
    }

    /// Linear equations cutting out the hull: `⟨1⟩` when empty.
    pub fn equations<F: Field<Elem = E>>(&self, field: &F) -> Option<Vec<(Vec<E>, E)>> {
        let base = self.base.as_ref()?;
        let mut out = Vec::new();
        for j in (0..self.dim).filter(|j| !self.pivots.contains(j)) {
            let mut c = vec![field.zero(); self.dim];
            c[j] = field.one();
            for (row, &p) in self.rows.iter().zip(&self.pivots) {
                c[p] = field.neg(&row[j]);
            }
            let rhs = c.iter().zip(base).fold(field.zero(), |s, (a, b)| field.add(&s, &field.mul(a, b)));
            out.push((c, rhs));
        }
        Some(out)
    }
}

impl AffineBasis<BigRational> {
    /// The vanishing ideal of the hull, generated by linear polynomials.
    pub fn ideal(&self) -> GroebnerBasis {
        let o = MonomialOrder::Grlex;
        match self.equations(&Rationals) {
            None => GroebnerBasis::unit(self.dim, o),
            Some(eqs) => {
                let polys: Vec<Polynomial> = eqs
                    .into_iter()
                    .map(|(c, rhs)| {
                        let mut p = Polynomial::constant(self.dim, o, -rhs);
                        for (j, cj) in c.into_iter().enumerate() {
                            if !cj.is_zero() {
                                p = p.add(&Polynomial::var(self.dim, o, j).scale(&cj));
                            }
                        }
                        p
                    })
                    .collect();
                buchberger(&polys, self.dim, o)
            }
        }
    }
}

/// The state of a completed (or interrupted) fixpoint run.
#[derive(Debug, Clone)]
pub struct AffineClosure<E> {
    pub bases: Vec<AffineBasis<E>>,
    /// The vectors that made each hull grow, with the trees producing them.
    pub points: Vec<Vec<(Vec<E>, Tree)>>,
    pub insertions: usize,
}

/// Runs the worklist fixpoint. With `targets`, stops at the first vector
/// reaching the initial state that violates them and returns its tree.
pub fn closure_fixpoint<S: VectorSystem, F: Field>(
    sys: &S,
    aut: &Dtta,
    field: &F,
    targets: Option<&Targets>,
) -> Result<(AffineClosure<F::Elem>, Option<Tree>)> {
    let aut = aut.with_alphabet(sys.alphabet())?;
    let np = aut.num_states();
    let dim = sys.dim();
    let trans: Vec<(usize, Symbol, Vec<usize>)> =
        aut.transitions().map(|(p, f, cs)| (p, f, cs.to_vec())).collect();
    let mut uses: Vec<Vec<(usize, usize)>> = vec![Vec::new(); np];
    for (t, (_, _, cs)) in trans.iter().enumerate() {
        for (i, &c) in cs.iter().enumerate() {
            uses[c].push((t, i));
        }
    }
    let mut cl = AffineClosure {
        bases: (0..np).map(|_| AffineBasis::empty(dim)).collect(),
        points: vec![Vec::new(); np],
        insertions: 0,
    };
    let mut queue = VecDeque::new();
    let mut seen: HashSet<(usize, Vec<usize>)> = HashSet::new();

    let add = |cl: &mut AffineClosure<F::Elem>,
                   queue: &mut VecDeque<(usize, usize)>,
                   p: usize,
                   v: Vec<F::Elem>,
                   t: Tree|
     -> Result<Option<Tree>> {
        let violates = p == aut.initial() && targets.is_some_and(|g| !g.holds_at(&v));
        if cl.bases[p].insert(field, &v)? {
            cl.insertions += 1;
            cl.points[p].push((v, t.clone()));
            queue.push_back((p, cl.points[p].len() - 1));
        }
        Ok(violates.then_some(t))
    };

    for (p, f, cs) in &trans {
        if cs.is_empty() {
            let v = sys.apply(field, *f, &[]);
            if let Some(t) = add(&mut cl, &mut queue, *p, v, Tree::leaf(*f))? {
                return Ok((cl, Some(t)));
            }
        }
    }
    while let Some((q, j)) = queue.pop_front() {
        for &(ti, pos) in &uses[q] {
            let (p, f, cs) = &trans[ti];
            let ranges: Vec<Vec<usize>> = cs
                .iter()
                .enumerate()
                .map(|(i, &c)| if i == pos { vec![j] } else { (0..cl.points[c].len()).collect() })
                .collect();
            let refs: Vec<&[usize]> = ranges.iter().map(Vec::as_slice).collect();
            let mut tuples = Vec::new();
            for_each_product(&refs, |tu| tuples.push(tu.to_vec()));
            for tu in tuples {
                if !seen.insert((ti, tu.clone())) {
                    continue;
                }
                let kids: Vec<Vec<F::Elem>> =
                    tu.iter().zip(cs).map(|(&k, &c)| cl.points[c][k].0.clone()).collect();
                let trees: Vec<Tree> = tu.iter().zip(cs).map(|(&k, &c)| cl.points[c][k].1.clone()).collect();
                let v = sys.apply(field, *f, &kids);
                if let Some(t) = add(&mut cl, &mut queue, *p, v, Tree::new(*f, trees))? {
                    return Ok((cl, Some(t)));
                }
            }
        }
    }
    Ok((cl, None))
}

#[derive(Debug, Clone)]
pub enum AffineVerdict {
    /// The targets hold on the hull at the initial state.
    Equivalent(AffineClosure<BigRational>),
    NotEquivalent(Tree),
}

fn require_multi_affine<S: VectorSystem>(sys: &S) -> Result<()> {
    if sys.multi_affine() {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "the system is not affine in its arguments (self-nested transducer)".into(),
        ))
    }
}

/// Exact decision over the rationals.
pub fn decide_affine<S: VectorSystem>(sys: &S, aut: &Dtta, targets: &Targets) -> Result<AffineVerdict> {
    require_multi_affine(sys)?;
    let (cl, bad) = closure_fixpoint(sys, aut, &Rationals, Some(targets))?;
    Ok(match bad {
        Some(t) => AffineVerdict::NotEquivalent(t),
        None => AffineVerdict::Equivalent(cl),
    })
}

/// `(h+1)^((|M|(m+1))^N)`, with the outer exponent capped at `2^20`.
pub fn length_bound(size: usize, max_rank: usize, h: &BigInt, n: usize) -> BigInt {
    let base = h + BigInt::one();
    base.pow(capped_exponent(size, max_rank, n))
}

pub const EXPONENT_CAP: u32 = 1 << 20;

fn capped_exponent(size: usize, max_rank: usize, n: usize) -> u32 {
    let b = BigInt::from(size * (max_rank + 1));
    let e = if n >= 64 && b > BigInt::one() {
        None
    } else {
        b.pow(n as u32).to_u32()
    };
    e.map_or(EXPONENT_CAP, |e| e.min(EXPONENT_CAP))
}

/// Bit length of `length_bound`, computed without materialising it.
pub fn bit_bound(size: usize, max_rank: usize, h: &BigInt, n: usize) -> u64 {
    let base = h + BigInt::one();
    let bits = base.bits().max(1);
    bits * capped_exponent(size, max_rank, n) as u64
}

#[derive(Debug, Clone)]
pub struct ModularOptions {
    pub trials: usize,
    pub seed: u64,
    /// The `D` of the prime interval `[2, D·e^D)`.
    pub bound_bits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModularVerdict {
    NotEquivalent { prime: u64, witness: Tree },
    /// No trial found a difference.
    ProbablyEquivalent { primes: Vec<u64> },
}

/// Repeats the fixpoint over random prime fields.
pub fn decide_modular<S: VectorSystem>(
    sys: &S,
    aut: &Dtta,
    targets: &Targets,
    opts: &ModularOptions,
) -> Result<ModularVerdict> {
    require_multi_affine(sys)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let hi = prime_interval(opts.bound_bits);
    let mut primes = Vec::new();
    for _ in 0..opts.trials {
        let p = sample_prime(&mut rng, hi, 10_000)
            .ok_or_else(|| Error::Internal("no prime found in the sampling interval".into()))?;
        let field = PrimeField::new(p).expect("sampled a prime");
        let (_, bad) = closure_fixpoint(sys, aut, &field, Some(targets))?;
        if let Some(witness) = bad {
            return Ok(ModularVerdict::NotEquivalent { prime: p, witness });
        }
        primes.push(p);
    }
    Ok(ModularVerdict::ProbablyEquivalent { primes })
}
