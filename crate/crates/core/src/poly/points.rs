//! Vanishing ideals of finite point sets.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::groebner::{intersect, GroebnerBasis};
use super::{Monomial, MonomialOrder, Polynomial};

/// `I(V)` for a finite `V ⊆ Q^nvars` by the Buchberger–Möller algorithm
/// (grlex). The empty set gives the unit ideal.
pub fn vanishing_ideal(points: &[Vec<BigRational>], nvars: usize) -> GroebnerBasis {
    let ord = MonomialOrder::Grlex;
    let mut pts: Vec<&Vec<BigRational>> = Vec::new();
    for p in points {
        assert_eq!(p.len(), nvars, "point of the wrong dimension");
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let k = pts.len();
    // echelon rows: (pivot, evaluation vector, polynomial it evaluates)
    let mut rows: Vec<(usize, Vec<BigRational>, Polynomial)> = Vec::new();
    let mut basis: Vec<Polynomial> = Vec::new();
    let mut candidates = vec![Monomial::one(nvars)];
    while !candidates.is_empty() {
        let (idx, _) = candidates
            .iter()
            .enumerate()
            .min_by(|a, b| ord.cmp(a.1, b.1))
            .unwrap();
        let t = candidates.swap_remove(idx);
        if basis.iter().any(|g| g.leading_monomial().unwrap().divides(&t)) {
            continue;
        }
        let mut combo = Polynomial::from_terms(nvars, ord, [(t.clone(), BigRational::one())]);
        let mut v: Vec<BigRational> = pts.iter().map(|p| combo.eval(p)).collect();
        for (piv, row, poly) in &rows {
            if v[*piv].is_zero() {
                continue;
            }
            let f = &v[*piv] / &row[*piv];
            for (a, b) in v.iter_mut().zip(row) {
                *a -= &f * b;
            }
            combo = combo.sub(&poly.scale(&f));
        }
        match v.iter().position(|x| !x.is_zero()) {
            None => basis.push(combo.monic()),
            Some(piv) => {
                rows.push((piv, v, combo));
                for i in 0..nvars {
                    let c = t.mul(&Monomial::var(nvars, i));
                    if !candidates.contains(&c) {
                        candidates.push(c);
                    }
                }
            }
        }
        debug_assert!(rows.len() <= k);
    }
    GroebnerBasis::from_reduced(nvars, ord, basis)
}

/// `I(V)` as the intersection of the maximal ideals `⟨x_j - v_j⟩`.
pub fn vanishing_ideal_by_intersection(points: &[Vec<BigRational>], nvars: usize) -> GroebnerBasis {
    let ord = MonomialOrder::Grlex;
    let mut acc = GroebnerBasis::unit(nvars, ord);
    for p in points {
        let gens: Vec<Polynomial> = (0..nvars)
            .map(|j| {
                Polynomial::var(nvars, ord, j).sub(&Polynomial::constant(nvars, ord, p[j].clone()))
            })
            .collect();
        let m = super::buchberger(&gens, nvars, ord);
        acc = intersect(&acc, &m);
    }
    acc
}
