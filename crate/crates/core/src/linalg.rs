//! Sparse Gaussian elimination with combination tracking.

use std::collections::{BTreeMap, HashMap};

use crate::field::Field;

pub type SparseVec<E> = BTreeMap<usize, E>;

/// `a += c·b`, dropping cancelled entries.
pub fn axpy<F: Field>(field: &F, a: &mut SparseVec<F::Elem>, c: &F::Elem, b: &SparseVec<F::Elem>) {
    for (&k, v) in b {
        let add = field.mul(c, v);
        match a.get_mut(&k) {
            Some(x) => {
                *x = field.add(x, &add);
                if field.is_zero(x) {
                    a.remove(&k);
                }
            }
            None => {
                if !field.is_zero(&add) {
                    a.insert(k, add);
                }
            }
        }
    }
}

struct Row<E> {
    vec: SparseVec<E>,
    combo: SparseVec<E>,
}

/// Rows in semi-echelon form: each row's pivot is its smallest key and
/// pivots are distinct. Every row remembers which inputs it combines.
pub struct Echelon<F: Field> {
    field: F,
    rows: Vec<Row<F::Elem>>,
    by_pivot: HashMap<usize, usize>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: F) -> Self {
        Echelon {
            field,
            rows: Vec::new(),
            by_pivot: HashMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` (with its combination) against the rows.
    pub fn reduce(
        &self,
        mut v: SparseVec<F::Elem>,
        mut combo: SparseVec<F::Elem>,
    ) -> (SparseVec<F::Elem>, SparseVec<F::Elem>) {
        let mut from = 0;
        loop {
            let hit = v
                .range(from..)
                .find(|(k, _)| self.by_pivot.contains_key(k))
                .map(|(&k, c)| (k, c.clone()));
            let Some((k, c)) = hit else { break };
            let row = &self.rows[self.by_pivot[&k]];
            let factor = self.field.neg(&self.field.div(&c, &row.vec[&k]));
            axpy(&self.field, &mut v, &factor, &row.vec);
            axpy(&self.field, &mut combo, &factor, &row.combo);
            from = k + 1;
        }
        (v, combo)
    }

    /// Adds `v`; when it is dependent, returns the combination that
    /// vanishes instead.
    pub fn insert(
        &mut self,
        v: SparseVec<F::Elem>,
        combo: SparseVec<F::Elem>,
    ) -> Option<SparseVec<F::Elem>> {
        let (v, combo) = self.reduce(v, combo);
        match v.keys().next() {
            None => Some(combo),
            Some(&p) => {
                self.by_pivot.insert(p, self.rows.len());
                self.rows.push(Row { vec: v, combo });
                None
            }
        }
    }

    pub fn contains(&self, v: &SparseVec<F::Elem>) -> bool {
        self.reduce(v.clone(), SparseVec::new()).0.is_empty()
    }
}

/// A basis of `{c : Σ c_i images[i] = 0}`.
pub fn kernel<F: Field + Clone>(field: &F, images: Vec<SparseVec<F::Elem>>) -> Vec<SparseVec<F::Elem>> {
    let mut ech = Echelon::new(field.clone());
    let mut out = Vec::new();
    for (i, v) in images.into_iter().enumerate() {
        let combo = SparseVec::from([(i, field.one())]);
        if let Some(k) = ech.insert(v, combo) {
            out.push(k);
        }
    }
    out
}
