//! Constructions on transducers: domain automata, totalization, binary
//! encoding of the input, unarization and disjoint unions.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;

use super::{Mode, Rhs, Transducer};
use crate::dtta::{bin_checker, Dtta};
use crate::error::{input, Result};
use crate::tree::{bin_decode, bin_encode, RankedAlphabet, Symbol, Tree};

/// A transducer over `bin(Σ)` together with the checker automaton `B`.
#[derive(Debug, Clone)]
pub struct Binarized {
    pub transducer: Transducer,
    pub checker: Dtta,
    pub bottom: Symbol,
    pub original: RankedAlphabet,
    /// `max(1, m)` copies `⟨q,1⟩…⟨q,m⟩` per state.
    pub width: usize,
}

impl Binarized {
    pub fn encode(&self, t: &Tree) -> Tree {
        bin_encode(std::slice::from_ref(t), self.bottom)
    }

    /// Decodes an encoding of a single tree.
    pub fn decode(&self, t: &Tree) -> Option<Tree> {
        let mut v = bin_decode(t, &self.original, self.bottom)?;
        (v.len() == 1).then(|| v.pop().unwrap())
    }

    /// Index of `⟨q,i⟩` for `i ≥ 1`.
    pub fn state(&self, q: usize, i: usize) -> usize {
        q * self.width + (i - 1)
    }
}

impl Transducer {
    /// The subset automaton accepting `dom(⟦q_start⟧)`. The empty set of
    /// states accepts every tree.
    pub fn domain_automaton(&self, q_start: usize) -> Dtta {
        let mut ids: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut sets: Vec<BTreeSet<usize>> = Vec::new();
        let mut queue = VecDeque::new();
        let start = BTreeSet::from([q_start]);
        ids.insert(start.clone(), 0);
        sets.push(start.clone());
        queue.push_back(start);
        let mut rules = Vec::new();
        while let Some(set) = queue.pop_front() {
            let id = ids[&set];
            'sym: for f in self.input.symbols() {
                let rank = self.input.rank(f);
                let mut kids = vec![BTreeSet::new(); rank];
                for &q in &set {
                    let Some(rhs) = self.rule(q, f) else { continue 'sym };
                    for (q2, i) in rhs.calls() {
                        kids[i].insert(q2);
                    }
                }
                let mut targets = Vec::with_capacity(rank);
                for k in kids {
                    let n = sets.len();
                    let k_id = *ids.entry(k.clone()).or_insert(n);
                    if k_id == n {
                        sets.push(k.clone());
                        queue.push_back(k);
                    }
                    targets.push(k_id);
                }
                rules.push((id, f, targets));
            }
        }
        let names = sets
            .iter()
            .map(|s| {
                let v: Vec<&str> = s.iter().map(|&q| self.states[q].as_str()).collect();
                format!("{{{}}}", v.join(","))
            })
            .collect();
        let mut a = Dtta::new(self.input.clone(), names, 0).unwrap();
        for (p, f, t) in rules {
            a.add_rule(p, f, t).unwrap();
        }
        a
    }

    /// Adds `ε` (string mode) or `0` (numeric mode) for every missing rule.
    pub fn totalize(&self) -> Transducer {
        let mut m = self.clone();
        let fill = match self.mode {
            Mode::String => Rhs::eps(),
            Mode::Numeric => Rhs::constant(0),
        };
        for q in 0..self.states.len() {
            for f in self.input.symbols() {
                m.rules.entry((q, f)).or_insert_with(|| fill.clone());
            }
        }
        m
    }

    /// Transducer over `bin(Σ)` with states `⟨q,i⟩`: `⟨q,1⟩` runs the rules
    /// of `q` with `q'(x_i, …)` rewritten to `⟨q',i⟩(x1, …)`, and `⟨q,i⟩` for
    /// `i ≥ 2` skips one sibling.
    pub fn binarize(&self) -> Result<Binarized> {
        let width = self.input.max_rank().max(1);
        let checker = bin_checker(&self.input)?;
        let (balph, bottom) = self.input.binary()?;
        let idx = |q: usize, i: usize| q * width + (i - 1);
        let mut states = Vec::with_capacity(self.states.len() * width);
        for q in &self.states {
            for i in 1..=width {
                states.push(format!("<{q},{i}>"));
            }
        }
        let mut m = Transducer::new(
            self.mode,
            balph,
            self.output.clone(),
            states,
            self.params,
            idx(self.initial, 1),
        )?;
        fn rewrite(r: &Rhs, idx: &dyn Fn(usize, usize) -> usize) -> Rhs {
            match r {
                Rhs::Call { state, child, args } => Rhs::Call {
                    state: idx(*state, child + 1),
                    child: 0,
                    args: args.iter().map(|a| rewrite(a, idx)).collect(),
                },
                Rhs::Seq(ts) => Rhs::Seq(ts.iter().map(|t| rewrite(t, idx)).collect()),
                Rhs::Add(ts) => Rhs::Add(ts.iter().map(|t| rewrite(t, idx)).collect()),
                Rhs::Scale(c, t) => Rhs::Scale(c.clone(), Box::new(rewrite(t, idx))),
                other => other.clone(),
            }
        }
        let params: Vec<Rhs> = (0..self.params)
            .map(|k| match self.mode {
                Mode::String => Rhs::Seq(vec![Rhs::Param(k)]),
                Mode::Numeric => Rhs::Param(k),
            })
            .collect();
        let bottom_rhs = match self.mode {
            Mode::String => Rhs::eps(),
            Mode::Numeric => Rhs::constant(0),
        };
        for q in 0..self.states.len() {
            for f in self.input.symbols() {
                if let Some(r) = self.rule(q, f) {
                    m.add_rule(idx(q, 1), f, rewrite(r, &idx))?;
                }
                for i in 2..=width {
                    m.add_rule(idx(q, i), f, Rhs::call(idx(q, i - 1), 1, params.clone()))?;
                }
            }
            for i in 1..=width {
                m.add_rule(idx(q, i), bottom, bottom_rhs.clone())?;
            }
        }
        Ok(Binarized {
            transducer: m,
            checker,
            bottom,
            original: self.input.clone(),
            width,
        })
    }

    /// Numeric transducer with one parameter such that
    /// `⟦q⟧_N(t)(y) = [w] + (s+1)^{|w|}·y` where `w = ⟦q⟧_M(t)` and
    /// `[w] = Σ_j w_j (s+1)^j`, letters numbered `1..s` in declaration order.
    pub fn unarize(&self) -> Result<Transducer> {
        if self.mode != Mode::String {
            return input("unarize needs a string-mode transducer");
        }
        if self.params != 0 {
            return input("unarize needs a transducer without parameters");
        }
        if !self.is_total() {
            return input("unarize needs a total transducer");
        }
        let base = BigInt::from(self.output.len() + 1);
        let mut n = Transducer::new(
            Mode::Numeric,
            self.input.clone(),
            Vec::new(),
            self.states.clone(),
            1,
            self.initial,
        )?;
        for (&(q, f), rhs) in &self.rules {
            let Rhs::Seq(items) = rhs else { unreachable!() };
            let mut acc = Rhs::Param(0);
            for it in items.iter().rev() {
                acc = match it {
                    Rhs::Out(a) => Rhs::Add(vec![
                        Rhs::Const(&base * BigInt::from(a + 1)),
                        Rhs::Scale(base.clone(), Box::new(acc)),
                    ]),
                    Rhs::Call { state, child, .. } => Rhs::call(*state, *child, vec![acc]),
                    _ => unreachable!(),
                };
            }
            n.add_rule(q, f, acc)?;
        }
        Ok(n)
    }

    /// Numeric transducer computing `Σ weight(a)` over the output letters
    /// (parameters are summed through).
    pub fn count_projection(&self, weight: &[BigInt]) -> Result<Transducer> {
        if self.mode != Mode::String {
            return input("projection needs a string-mode transducer");
        }
        if weight.len() != self.output.len() {
            return input("one weight per output letter expected");
        }
        let mut n = Transducer::new(
            Mode::Numeric,
            self.input.clone(),
            Vec::new(),
            self.states.clone(),
            self.params,
            self.initial,
        )?;
        fn project(r: &Rhs, w: &[BigInt]) -> Rhs {
            match r {
                Rhs::Seq(ts) => Rhs::Add(ts.iter().map(|t| project(t, w)).collect()),
                Rhs::Out(a) => Rhs::Const(w[*a].clone()),
                Rhs::Param(j) => Rhs::Param(*j),
                Rhs::Call { state, child, args } => Rhs::Call {
                    state: *state,
                    child: *child,
                    args: args.iter().map(|a| project(a, w)).collect(),
                },
                _ => unreachable!(),
            }
        }
        for (&(q, f), r) in &self.rules {
            n.add_rule(q, f, project(r, weight))?;
        }
        Ok(n)
    }

    /// The same transducer over a larger input alphabet, symbols matched by name.
    pub fn with_input_alphabet(&self, target: &RankedAlphabet) -> Result<Transducer> {
        let mut m = Transducer::new(
            self.mode,
            target.clone(),
            self.output.clone(),
            self.states.clone(),
            self.params,
            self.initial,
        )?;
        for (&(q, f), r) in &self.rules {
            let name = self.input.name(f);
            let Some(g) = target.lookup(name) else {
                return input(format!("symbol `{name}` missing from target alphabet"));
            };
            m.add_rule(q, g, r.clone())?;
        }
        Ok(m)
    }

    /// The same transducer with a larger output alphabet, letters matched by name.
    pub fn with_output_letters(&self, letters: &[String]) -> Result<Transducer> {
        let map: Vec<usize> = self
            .output
            .iter()
            .map(|l| letters.iter().position(|x| x == l))
            .collect::<Option<_>>()
            .ok_or_else(|| crate::error::Error::Input("output letter missing".into()))?;
        fn relabel(r: &Rhs, map: &[usize]) -> Rhs {
            match r {
                Rhs::Out(a) => Rhs::Out(map[*a]),
                Rhs::Seq(ts) => Rhs::Seq(ts.iter().map(|t| relabel(t, map)).collect()),
                Rhs::Call { state, child, args } => Rhs::Call {
                    state: *state,
                    child: *child,
                    args: args.iter().map(|a| relabel(a, map)).collect(),
                },
                other => other.clone(),
            }
        }
        let mut m = Transducer::new(
            self.mode,
            self.input.clone(),
            letters.to_vec(),
            self.states.clone(),
            self.params,
            self.initial,
        )?;
        for (&(q, f), r) in &self.rules {
            m.add_rule(q, f, relabel(r, &map))?;
        }
        Ok(m)
    }

    /// Disjoint union; states are prefixed `1:` and `2:`, input alphabets and
    /// output letters are merged by name. Returns the union (initial state
    /// that of `self`) and the two initial states.
    pub fn union(&self, other: &Transducer) -> Result<(Transducer, usize, usize)> {
        if self.mode != other.mode {
            return input("cannot combine a string-mode and a numeric-mode transducer");
        }
        if self.params != other.params {
            return input("transducers have different parameter counts");
        }
        let alph = self.input.merge(&other.input)?;
        let mut letters = self.output.clone();
        for l in &other.output {
            if !letters.contains(l) {
                letters.push(l.clone());
            }
        }
        let a = self.with_input_alphabet(&alph)?.with_output_letters(&letters)?;
        let b = other.with_input_alphabet(&alph)?.with_output_letters(&letters)?;
        let off = a.states.len();
        let states = a
            .states
            .iter()
            .map(|s| format!("1:{s}"))
            .chain(b.states.iter().map(|s| format!("2:{s}")))
            .collect();
        let mut m = Transducer::new(self.mode, alph, letters, states, self.params, a.initial)?;
        fn shift(r: &Rhs, off: usize) -> Rhs {
            match r {
                Rhs::Call { state, child, args } => Rhs::Call {
                    state: state + off,
                    child: *child,
                    args: args.iter().map(|a| shift(a, off)).collect(),
                },
                Rhs::Seq(ts) => Rhs::Seq(ts.iter().map(|t| shift(t, off)).collect()),
                Rhs::Add(ts) => Rhs::Add(ts.iter().map(|t| shift(t, off)).collect()),
                Rhs::Scale(c, t) => Rhs::Scale(c.clone(), Box::new(shift(t, off))),
                other => other.clone(),
            }
        }
        for (&(q, f), r) in &a.rules {
            m.add_rule(q, f, r.clone())?;
        }
        for (&(q, f), r) in &b.rules {
            m.add_rule(q + off, f, shift(r, off))?;
        }
        Ok((m, a.initial, b.initial + off))
    }
}
