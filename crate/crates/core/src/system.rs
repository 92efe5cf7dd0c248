//! Vector semantics shared by the affine and invariant engines.
//!
//! A system assigns to every tree a vector in `F^N` computed bottom-up by a
//! polynomial map per input symbol. For a unary transducer `N = n(l+1)` and
//! coordinate `q(l+1)+k` holds `v_{qk}`.

use std::collections::HashMap;

use num_rational::BigRational;

use crate::error::{input, Result};
use crate::field::{Rationals, Ring};
use crate::poly::{MonomialOrder, PolyRing, Polynomial, VariableSpace};
use crate::transducer::{Mode, Transducer};
use crate::tree::{RankedAlphabet, Symbol, Tree};

pub trait VectorSystem {
    fn alphabet(&self) -> &RankedAlphabet;

    /// Length `N` of the semantic vectors.
    fn dim(&self) -> usize;

    /// `⟦f⟧(children)` over any ring; each child is a vector of length `N`.
    fn apply<R: Ring>(&self, ring: &R, f: Symbol, children: &[Vec<R::Elem>]) -> Vec<R::Elem>;

    /// Names of the variable space `z, x_1, …, x_blocks`.
    fn variables(&self, blocks: usize) -> VariableSpace;

    /// `r^{(f)}` as `N` polynomials over `N(m+1)` variables, where the `z`
    /// block is unused and `x_i` occupies `[iN, (i+1)N)`.
    fn symbol_polys(&self, f: Symbol) -> Vec<Polynomial> {
        let n = self.dim();
        let m = self.alphabet().max_rank();
        let ring = PolyRing {
            nvars: n * (m + 1),
            order: MonomialOrder::Grlex,
        };
        let kids: Vec<Vec<Polynomial>> = (1..=self.alphabet().rank(f))
            .map(|i| (0..n).map(|j| Polynomial::var(ring.nvars, ring.order, i * n + j)).collect())
            .collect();
        self.apply(&ring, f, &kids)
    }

    /// Degree at most one in every argument block for every symbol.
    fn multi_affine(&self) -> bool {
        let n = self.dim();
        self.alphabet().symbols().all(|f| {
            let polys = self.symbol_polys(f);
            (1..=self.alphabet().rank(f))
                .all(|i| polys.iter().all(|p| p.degree_in(i * n..(i + 1) * n) <= 1))
        })
    }

    fn eval_in<R: Ring>(&self, ring: &R, t: &Tree) -> Vec<R::Elem> {
        let kids: Vec<Vec<R::Elem>> = t.children().iter().map(|c| self.eval_in(ring, c)).collect();
        self.apply(ring, t.symbol(), &kids)
    }

    fn eval(&self, t: &Tree) -> Vec<BigRational> {
        self.eval_in(&Rationals, t)
    }
}

/// The semantics of a total numeric transducer.
#[derive(Debug, Clone)]
pub struct UnarySystem {
    transducer: Transducer,
}

impl UnarySystem {
    pub fn new(transducer: Transducer) -> Result<UnarySystem> {
        if transducer.mode() != Mode::Numeric {
            return input("a unary system needs a numeric transducer");
        }
        if !transducer.is_total() {
            return input("a unary system needs a total transducer; totalize first");
        }
        Ok(UnarySystem { transducer })
    }

    /// The union of two transducers, totalized, with the target comparing
    /// their initial states.
    pub fn pair(a: &Transducer, b: &Transducer) -> Result<(UnarySystem, Targets)> {
        let (u, q1, q2) = a.union(b)?;
        let sys = UnarySystem::new(u.totalize())?;
        let targets = sys.target(q1, q2);
        Ok((sys, targets))
    }

    pub fn transducer(&self) -> &Transducer {
        &self.transducer
    }

    pub fn width(&self) -> usize {
        self.transducer.params() + 1
    }

    /// Coordinate of `v_{q,k}`.
    pub fn coord(&self, q: usize, k: usize) -> usize {
        q * self.width() + k
    }

    /// `H_{qq'}`: the constant parts of two states.
    pub fn target(&self, q: usize, q2: usize) -> Targets {
        Targets::new(vec![(self.coord(q, 0), self.coord(q2, 0))])
    }
}

impl VectorSystem for UnarySystem {
    fn alphabet(&self) -> &RankedAlphabet {
        self.transducer.input()
    }

    fn dim(&self) -> usize {
        self.transducer.num_states() * self.width()
    }

    fn apply<R: Ring>(&self, ring: &R, f: Symbol, children: &[Vec<R::Elem>]) -> Vec<R::Elem> {
        let w = self.width();
        let blocks: Vec<Vec<Vec<R::Elem>>> = children
            .iter()
            .map(|c| c.chunks(w).map(|r| r.to_vec()).collect())
            .collect();
        let mut out = Vec::with_capacity(self.dim());
        for q in 0..self.transducer.num_states() {
            let rhs = self.transducer.rule(q, f).expect("total transducer");
            out.extend(self.transducer.apply_affine(ring, rhs, &blocks));
        }
        out
    }

    fn variables(&self, blocks: usize) -> VariableSpace {
        VariableSpace::semantic(self.transducer.num_states(), self.transducer.params(), blocks)
    }
}

/// Equalities `v_a = v_b` to be proved for all trees of the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Targets {
    pub pairs: Vec<(usize, usize)>,
}

impl Targets {
    pub fn new(pairs: Vec<(usize, usize)>) -> Targets {
        Targets { pairs }
    }

    pub fn holds_at<E: PartialEq>(&self, v: &[E]) -> bool {
        self.pairs.iter().all(|&(a, b)| v[a] == v[b])
    }

    /// The polynomials `z_a - z_b` over `nvars` variables.
    pub fn polys(&self, nvars: usize) -> Vec<Polynomial> {
        let o = MonomialOrder::Grlex;
        self.pairs
            .iter()
            .map(|&(a, b)| Polynomial::var(nvars, o, a).sub(&Polynomial::var(nvars, o, b)))
            .filter(|p| !p.is_zero())
            .collect()
    }
}

/// Caches `r^{(f)}` per symbol.
pub struct SymbolCache<'a, S: VectorSystem> {
    sys: &'a S,
    polys: HashMap<Symbol, Vec<Polynomial>>,
}

impl<'a, S: VectorSystem> SymbolCache<'a, S> {
    pub fn new(sys: &'a S) -> Self {
        SymbolCache {
            sys,
            polys: HashMap::new(),
        }
    }

    pub fn get(&mut self, f: Symbol) -> &[Polynomial] {
        let sys = self.sys;
        self.polys.entry(f).or_insert_with(|| sys.symbol_polys(f))
    }
}

/// `wp(g, f) = g[r^{(f)}/z]`, over the full space `z, x_1, …, x_m`.
pub fn weakest_precondition(g: &Polynomial, r: &[Polynomial]) -> Polynomial {
    g.substitute(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::all_trees;

    fn product() -> UnarySystem {
        let m = Transducer::parse(include_str!("../data/product.tdx")).unwrap();
        UnarySystem::new(m.totalize()).unwrap()
    }

    #[test]
    fn symbol_polynomials_of_the_product_example() {
        let sys = product();
        let vars = sys.variables(2);
        let f = sys.alphabet().lookup("f").unwrap();
        let a = sys.alphabet().lookup("a").unwrap();
        let e = sys.alphabet().lookup("e").unwrap();
        let rf = sys.symbol_polys(f);
        assert_eq!(
            rf[sys.coord(0, 0)].display(&vars).to_string(),
            "x[1,1,1]*x[2,1,0] + x[1,1,1]*x[2,1,1] + x[1,1,0]"
        );
        assert!(rf[sys.coord(0, 1)].is_zero());
        let ra = sys.symbol_polys(a);
        assert_eq!(ra[sys.coord(1, 0)].display(&vars).to_string(), "x[1,1,0]");
        assert_eq!(ra[sys.coord(1, 1)].display(&vars).to_string(), "x[1,1,1] + 1");
        assert!(sys.symbol_polys(e).iter().take(2).all(Polynomial::is_zero));
        assert!(sys.multi_affine());
    }

    #[test]
    fn substituted_polynomials_reproduce_evaluation() {
        let sys = product();
        let n = sys.dim();
        for t in all_trees(sys.alphabet(), 3) {
            let kids: Vec<Vec<BigRational>> = t.children().iter().map(|c| sys.eval(c)).collect();
            let mut point = vec![BigRational::from_integer(0.into()); n];
            for k in &kids {
                point.extend(k.iter().cloned());
            }
            point.resize(n * 3, BigRational::from_integer(0.into()));
            let via_polys: Vec<BigRational> =
                sys.symbol_polys(t.symbol()).iter().map(|p| p.eval(&point)).collect();
            assert_eq!(via_polys, sys.eval(&t));
            let direct = sys.transducer().semantics(&t).unwrap().flat();
            assert_eq!(direct, sys.eval(&t));
        }
    }

    #[test]
    fn self_nesting_breaks_multi_affinity() {
        let m = Transducer::parse(
            "(transducer (mode numeric) (params 1) (alphabet (g 1) (e 0)) (states q) (init q)
               (rule q g (x1) (call q x1 (call q x1 (param 1))))
               (rule q e () (add (param 1) (const 1))))",
        )
        .unwrap();
        assert!(!UnarySystem::new(m).unwrap().multi_affine());
    }
}
