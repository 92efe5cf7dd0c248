//! Buchberger's algorithm and the ideal operations built on it.

use std::collections::HashSet;

use super::{MonomialOrder, Polynomial, VariableSpace};

/// A reduced, monic Gröbner basis sorted by ascending leading monomial.
/// The empty basis is the zero ideal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroebnerBasis {
    nvars: usize,
    order: MonomialOrder,
    gens: Vec<Polynomial>,
}

impl GroebnerBasis {
    pub fn zero_ideal(nvars: usize, order: MonomialOrder) -> GroebnerBasis {
        GroebnerBasis {
            nvars,
            order,
            gens: Vec::new(),
        }
    }

    pub fn unit(nvars: usize, order: MonomialOrder) -> GroebnerBasis {
        GroebnerBasis {
            nvars,
            order,
            gens: vec![Polynomial::one(nvars, order)],
        }
    }

    /// Wraps generators that already form a reduced monic basis.
    pub(crate) fn from_reduced(nvars: usize, order: MonomialOrder, mut gens: Vec<Polynomial>) -> GroebnerBasis {
        gens.sort_by(|a, b| order.cmp(a.leading_monomial().unwrap(), b.leading_monomial().unwrap()));
        GroebnerBasis { nvars, order, gens }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn gens(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn is_unit(&self) -> bool {
        self.gens.iter().any(Polynomial::is_unit)
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn normal_form(&self, f: &Polynomial) -> Polynomial {
        normal_form(f, &self.gens)
    }

    pub fn contains(&self, f: &Polynomial) -> bool {
        self.normal_form(f).is_zero()
    }

    /// `other ⊆ self`.
    pub fn contains_ideal(&self, other: &GroebnerBasis) -> bool {
        other.gens.iter().all(|g| self.contains(g))
    }

    pub fn same_ideal(&self, other: &GroebnerBasis) -> bool {
        self.contains_ideal(other) && other.contains_ideal(self)
    }

    /// Buchberger's criterion: every S-polynomial reduces to zero.
    pub fn is_groebner(&self) -> bool {
        for i in 0..self.gens.len() {
            for j in i + 1..self.gens.len() {
                if !self.normal_form(&s_polynomial(&self.gens[i], &self.gens[j])).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Renames variable `i` to `map[i]`. The map must be increasing so
    /// that the result is again a reduced basis under grlex.
    pub fn rename(&self, map: &[usize], nvars: usize) -> GroebnerBasis {
        debug_assert!(map.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(self.order, MonomialOrder::Grlex);
        GroebnerBasis {
            nvars,
            order: self.order,
            gens: self.gens.iter().map(|g| g.map_vars(map, nvars, self.order)).collect(),
        }
    }

    /// Union of bases over pairwise disjoint sets of variables, which is
    /// again a reduced Gröbner basis.
    pub fn disjoint_union(parts: &[GroebnerBasis], nvars: usize, order: MonomialOrder) -> GroebnerBasis {
        if parts.iter().any(GroebnerBasis::is_unit) {
            return GroebnerBasis::unit(nvars, order);
        }
        let mut gens: Vec<Polynomial> = parts.iter().flat_map(|p| p.gens.iter().cloned()).collect();
        gens.sort_by(|a, b| order.cmp(a.leading_monomial().unwrap(), b.leading_monomial().unwrap()));
        GroebnerBasis { nvars, order, gens }
    }

    pub fn max_degree(&self) -> u32 {
        self.gens.iter().map(Polynomial::total_degree).max().unwrap_or(0)
    }

    pub fn display(&self, vars: &VariableSpace) -> String {
        let v: Vec<String> = self.gens.iter().map(|g| g.display(vars).to_string()).collect();
        format!("<{}>", v.join(", "))
    }
}

/// Fully reduces `f` by `gens`.
pub fn normal_form(f: &Polynomial, gens: &[Polynomial]) -> Polynomial {
    normal_form_with_cofactors(f, gens).1
}

/// `(q, r)` with `f = Σ q_i·gens_i + r` and no term of `r` divisible by a
/// leading monomial of `gens`.
pub fn normal_form_with_cofactors(f: &Polynomial, gens: &[Polynomial]) -> (Vec<Polynomial>, Polynomial) {
    let (nv, ord) = (f.nvars(), f.order());
    let mut q = vec![Polynomial::zero(nv, ord); gens.len()];
    let mut rest = Vec::new();
    let mut p = f.clone();
    while let Some((m, c)) = p.terms.first().cloned() {
        let found = gens.iter().enumerate().find(|(_, g)| {
            g.leading_monomial().is_some_and(|lm| lm.divides(&m))
        });
        match found {
            Some((i, g)) => {
                let lm = g.leading_monomial().unwrap();
                let factor = &c / g.leading_coefficient().unwrap();
                let shift = lm.quotient(&m);
                p = p.sub(&g.mul_term(&shift, &factor));
                q[i] = q[i].add(&Polynomial::from_terms(nv, ord, [(shift, factor)]));
            }
            None => {
                rest.push(p.terms.remove(0));
            }
        }
    }
    (
        q,
        Polynomial {
            nvars: nv,
            order: ord,
            terms: rest,
        },
    )
}

pub fn s_polynomial(f: &Polynomial, g: &Polynomial) -> Polynomial {
    let (a, b) = (f.leading_monomial().unwrap(), g.leading_monomial().unwrap());
    let l = a.lcm(b);
    let fa = f.mul_term(&a.quotient(&l), &f.leading_coefficient().unwrap().recip());
    let gb = g.mul_term(&b.quotient(&l), &g.leading_coefficient().unwrap().recip());
    fa.sub(&gb)
}

/// Reduced Gröbner basis of `⟨gens⟩` under `order`, using the product and
/// chain criteria and the normal selection strategy.
pub fn buchberger(gens: &[Polynomial], nvars: usize, order: MonomialOrder) -> GroebnerBasis {
    let mut g: Vec<Polynomial> = Vec::new();
    for p in gens {
        assert_eq!(p.nvars(), nvars, "generator over a different ring");
        let p = if p.order() == order { p.clone() } else { p.with_order(order) };
        if p.is_zero() {
            continue;
        }
        if p.is_unit() {
            return GroebnerBasis::unit(nvars, order);
        }
        g.push(p.monic());
    }
    let lm = |p: &Polynomial| p.leading_monomial().unwrap().clone();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    for j in 0..g.len() {
        for i in 0..j {
            pending.insert((i, j));
        }
    }
    while !pending.is_empty() {
        // smallest lcm first; ties broken by indices for determinism
        let &(i, j) = pending
            .iter()
            .min_by(|&&(a, b), &&(c, d)| {
                order
                    .cmp(&lm(&g[a]).lcm(&lm(&g[b])), &lm(&g[c]).lcm(&lm(&g[d])))
                    .then((a, b).cmp(&(c, d)))
            })
            .unwrap();
        pending.remove(&(i, j));
        let (li, lj) = (lm(&g[i]), lm(&g[j]));
        if li.is_coprime(&lj) {
            continue;
        }
        let l = li.lcm(&lj);
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        let chain = (0..g.len()).any(|k| {
            k != i
                && k != j
                && lm(&g[k]).divides(&l)
                && !pending.contains(&key(i, k))
                && !pending.contains(&key(j, k))
        });
        if chain {
            continue;
        }
        let h = normal_form(&s_polynomial(&g[i], &g[j]), &g);
        if h.is_zero() {
            continue;
        }
        if h.is_unit() {
            return GroebnerBasis::unit(nvars, order);
        }
        let n = g.len();
        g.push(h.monic());
        for k in 0..n {
            pending.insert((k, n));
        }
    }
    reduce_basis(g, nvars, order)
}

fn reduce_basis(g: Vec<Polynomial>, nvars: usize, order: MonomialOrder) -> GroebnerBasis {
    let mut minimal: Vec<Polynomial> = Vec::new();
    for (i, p) in g.iter().enumerate() {
        let m = p.leading_monomial().unwrap();
        let redundant = g.iter().enumerate().any(|(j, q)| {
            let n = q.leading_monomial().unwrap();
            j != i && n.divides(m) && (n != m || j < i)
        });
        if !redundant {
            minimal.push(p.clone());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Polynomial> = minimal
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, p)| p.clone())
            .collect();
        let lead = Polynomial {
            nvars,
            order,
            terms: vec![minimal[i].terms[0].clone()],
        };
        let tail = minimal[i].sub(&lead);
        out.push(lead.add(&normal_form(&tail, &others)).monic());
    }
    out.sort_by(|a, b| order.cmp(a.leading_monomial().unwrap(), b.leading_monomial().unwrap()));
    GroebnerBasis {
        nvars,
        order,
        gens: out,
    }
}

pub fn member(f: &Polynomial, ideal: &GroebnerBasis) -> bool {
    ideal.contains(f)
}

pub fn ideal_sum(a: &GroebnerBasis, b: &GroebnerBasis) -> GroebnerBasis {
    assert_eq!(a.nvars, b.nvars);
    let gens: Vec<Polynomial> = a.gens.iter().chain(&b.gens).cloned().collect();
    buchberger(&gens, a.nvars, a.order)
}

/// `⟨gens⟩ ∩ Q[v_0 … v_{keep-1}]` as a grlex basis over `keep` variables.
pub fn eliminate(gens: &[Polynomial], keep: usize) -> GroebnerBasis {
    let Some(first) = gens.first() else {
        return GroebnerBasis::zero_ideal(keep, MonomialOrder::Grlex);
    };
    let nvars = first.nvars();
    let gb = buchberger(gens, nvars, MonomialOrder::Block { keep });
    if gb.is_unit() {
        return GroebnerBasis::unit(keep, MonomialOrder::Grlex);
    }
    let mut kept: Vec<Polynomial> = gb
        .gens
        .iter()
        .filter(|g| !g.uses_vars_from(keep))
        .map(|g| g.truncate(keep, MonomialOrder::Grlex))
        .collect();
    kept.sort_by(|a, b| {
        MonomialOrder::Grlex.cmp(a.leading_monomial().unwrap(), b.leading_monomial().unwrap())
    });
    GroebnerBasis {
        nvars: keep,
        order: MonomialOrder::Grlex,
        gens: kept,
    }
}

/// `I ∩ J` via `t·I + (1-t)·J` with a fresh last variable `t`.
pub fn intersect(a: &GroebnerBasis, b: &GroebnerBasis) -> GroebnerBasis {
    assert_eq!(a.nvars, b.nvars);
    let n = a.nvars;
    let ext = MonomialOrder::Grlex;
    let t = Polynomial::var(n + 1, ext, n);
    let one_minus_t = Polynomial::one(n + 1, ext).sub(&t);
    let mut gens: Vec<Polynomial> = a.gens.iter().map(|g| g.extend(n + 1, ext).mul(&t)).collect();
    gens.extend(b.gens.iter().map(|g| g.extend(n + 1, ext).mul(&one_minus_t)));
    if gens.is_empty() {
        return GroebnerBasis::zero_ideal(n, a.order);
    }
    let r = eliminate(&gens, n);
    if a.order == MonomialOrder::Grlex {
        r
    } else {
        buchberger(&r.gens, n, a.order)
    }
}

/// `α_d(I)`: the ideal generated by the basis elements of degree at most `d`.
pub fn degree_truncate(ideal: &GroebnerBasis, d: u32) -> GroebnerBasis {
    let low: Vec<Polynomial> = ideal
        .gens
        .iter()
        .filter(|g| g.total_degree() <= d)
        .cloned()
        .collect();
    if low.len() == ideal.gens.len() {
        return ideal.clone();
    }
    buchberger(&low, ideal.nvars, ideal.order)
}
