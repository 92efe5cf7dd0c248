//! Call-by-value evaluation and the affine semantics of numeric transducers.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use super::{Mode, Rhs, Transducer};
use crate::error::{input, Result};
use crate::field::{Rationals, Ring};
use crate::tree::Tree;

/// `⟦t⟧ ∈ Q^{n×(l+1)}`: row `q` holds the coefficients of the affine function
/// `y ↦ v[q][0] + Σ_k v[q][k]·y_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SemanticsVector {
    pub rows: Vec<Vec<BigRational>>,
}

impl SemanticsVector {
    pub fn flat(&self) -> Vec<BigRational> {
        self.rows.iter().flatten().cloned().collect()
    }

    pub fn apply(&self, q: usize, y: &[BigRational]) -> BigRational {
        let row = &self.rows[q];
        let mut v = row[0].clone();
        for (c, yk) in row[1..].iter().zip(y) {
            v += c * yk;
        }
        v
    }
}

impl fmt::Display for SemanticsVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, row) in self.rows.iter().enumerate() {
            if q > 0 {
                f.write_str("; ")?;
            }
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Joins letters; names longer than one character are separated by spaces.
pub fn word_to_string(letters: &[String], w: &[usize]) -> String {
    let sep = if letters.iter().all(|l| l.chars().count() == 1) { "" } else { " " };
    w.iter().map(|&a| letters[a].as_str()).collect::<Vec<_>>().join(sep)
}

impl Transducer {
    fn check_call(&self, mode: Mode, q: usize, t: &Tree, nparams: usize) -> Result<()> {
        if self.mode != mode {
            return input(format!("transducer is in {} mode", self.mode.as_str()));
        }
        if q >= self.states.len() {
            return input("state out of range");
        }
        if nparams != self.params {
            return input(format!("expected {} parameters, got {nparams}", self.params));
        }
        t.check(&self.input)
    }

    /// `⟦q⟧(t)(params)` in string mode, `None` where undefined.
    pub fn eval_string(&self, q: usize, t: &Tree, params: &[Vec<usize>]) -> Result<Option<Vec<usize>>> {
        self.check_call(Mode::String, q, t, params.len())?;
        Ok(self.run_string(q, t, params))
    }

    fn run_string(&self, q: usize, t: &Tree, params: &[Vec<usize>]) -> Option<Vec<usize>> {
        let rhs = self.rule(q, t.symbol())?;
        let mut out = Vec::new();
        self.emit_string(rhs, t, params, &mut out)?;
        Some(out)
    }

    fn emit_string(&self, rhs: &Rhs, t: &Tree, params: &[Vec<usize>], out: &mut Vec<usize>) -> Option<()> {
        match rhs {
            Rhs::Seq(items) => {
                for i in items {
                    self.emit_string(i, t, params, out)?;
                }
            }
            Rhs::Out(a) => out.push(*a),
            Rhs::Param(j) => out.extend_from_slice(&params[*j]),
            Rhs::Call { state, child, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    let mut w = Vec::new();
                    self.emit_string(a, t, params, &mut w)?;
                    vals.push(w);
                }
                out.extend(self.run_string(*state, &t.children()[*child], &vals)?);
            }
            _ => unreachable!("numeric expression in a string-mode rule"),
        }
        Some(())
    }

    /// `⟦q⟧(t)(params)` in numeric mode, `None` where undefined.
    pub fn eval_unary(&self, q: usize, t: &Tree, params: &[BigRational]) -> Result<Option<BigRational>> {
        self.check_call(Mode::Numeric, q, t, params.len())?;
        Ok(self.run_unary(q, t, params))
    }

    fn run_unary(&self, q: usize, t: &Tree, params: &[BigRational]) -> Option<BigRational> {
        let rhs = self.rule(q, t.symbol())?;
        self.value(rhs, t, params)
    }

    fn value(&self, rhs: &Rhs, t: &Tree, params: &[BigRational]) -> Option<BigRational> {
        Some(match rhs {
            Rhs::Const(c) => BigRational::from_integer(c.clone()),
            Rhs::Param(j) => params[*j].clone(),
            Rhs::Add(ts) => {
                let mut s = BigRational::zero();
                for x in ts {
                    s += self.value(x, t, params)?;
                }
                s
            }
            Rhs::Scale(c, x) => BigRational::from_integer(c.clone()) * self.value(x, t, params)?,
            Rhs::Call { state, child, args } => {
                let vals = args
                    .iter()
                    .map(|a| self.value(a, t, params))
                    .collect::<Option<Vec<_>>>()?;
                self.run_unary(*state, &t.children()[*child], &vals)?
            }
            _ => unreachable!("string expression in a numeric rule"),
        })
    }

    /// Output of the initial state with empty (string) or zero (numeric) parameters.
    pub fn translate_string(&self, t: &Tree) -> Result<Option<Vec<usize>>> {
        self.eval_string(self.initial, t, &vec![Vec::new(); self.params])
    }

    pub fn translate_unary(&self, t: &Tree) -> Result<Option<BigRational>> {
        self.eval_unary(self.initial, t, &vec![BigRational::zero(); self.params])
    }

    /// Evaluates a numeric right-hand side over affine functions: the child
    /// blocks `x[i][q][k]` are the coefficient matrices of the children and the
    /// result is the coefficient vector (length `l+1`) of the rule's value.
    pub fn apply_affine<R: Ring>(&self, ring: &R, rhs: &Rhs, x: &[Vec<Vec<R::Elem>>]) -> Vec<R::Elem> {
        let l = self.params;
        match rhs {
            Rhs::Const(c) => {
                let mut v = vec![ring.zero(); l + 1];
                v[0] = ring.from_int(c);
                v
            }
            Rhs::Param(j) => {
                let mut v = vec![ring.zero(); l + 1];
                v[j + 1] = ring.one();
                v
            }
            Rhs::Add(ts) => {
                let mut v = vec![ring.zero(); l + 1];
                for t in ts {
                    let w = self.apply_affine(ring, t, x);
                    for (a, b) in v.iter_mut().zip(&w) {
                        *a = ring.add(a, b);
                    }
                }
                v
            }
            Rhs::Scale(c, t) => {
                let c = ring.from_int(c);
                self.apply_affine(ring, t, x)
                    .iter()
                    .map(|a| ring.mul(&c, a))
                    .collect()
            }
            Rhs::Call { state, child, args } => {
                let coeffs = &x[*child][*state];
                let mut v = vec![ring.zero(); l + 1];
                v[0] = coeffs[0].clone();
                for (k, a) in args.iter().enumerate() {
                    if ring.is_zero(&coeffs[k + 1]) {
                        continue;
                    }
                    let w = self.apply_affine(ring, a, x);
                    for (acc, b) in v.iter_mut().zip(&w) {
                        *acc = ring.add(acc, &ring.mul(&coeffs[k + 1], b));
                    }
                }
                v
            }
            _ => panic!("apply_affine needs a numeric transducer"),
        }
    }

    /// `⟦t⟧` over an arbitrary ring; `None` if a rule needed at some node is
    /// missing for any state.
    pub fn semantics_in<R: Ring>(&self, ring: &R, t: &Tree) -> Option<Vec<Vec<R::Elem>>> {
        assert_eq!(self.mode, Mode::Numeric, "semantics needs a numeric transducer");
        let kids = t
            .children()
            .iter()
            .map(|c| self.semantics_in(ring, c))
            .collect::<Option<Vec<_>>>()?;
        (0..self.states.len())
            .map(|q| {
                self.rule(q, t.symbol())
                    .map(|r| self.apply_affine(ring, r, &kids))
            })
            .collect()
    }

    pub fn semantics(&self, t: &Tree) -> Option<SemanticsVector> {
        self.semantics_in(&Rationals, t)
            .map(|rows| SemanticsVector { rows })
    }
}
