//! Deterministic top-down tree automata.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use crate::error::{input, Result};
use crate::sexp::{self, Sexp};
use crate::tree::{cmp_trees, RankedAlphabet, Symbol, Tree};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dtta {
    alphabet: RankedAlphabet,
    states: Vec<String>,
    initial: usize,
    rules: BTreeMap<(usize, Symbol), Vec<usize>>,
}

impl Dtta {
    pub fn new(alphabet: RankedAlphabet, states: Vec<String>, initial: usize) -> Result<Dtta> {
        if initial >= states.len() {
            return input("initial state out of range");
        }
        let mut seen = std::collections::HashSet::new();
        for s in &states {
            if !seen.insert(s) {
                return input(format!("duplicate state `{s}`"));
            }
        }
        Ok(Dtta {
            alphabet,
            states,
            initial,
            rules: BTreeMap::new(),
        })
    }

    pub fn add_rule(&mut self, p: usize, f: Symbol, children: Vec<usize>) -> Result<()> {
        if p >= self.states.len() || children.iter().any(|&c| c >= self.states.len()) {
            return input("transition mentions an undeclared state");
        }
        if !self.alphabet.contains(f) {
            return input("transition on an unknown symbol");
        }
        if self.alphabet.rank(f) != children.len() {
            return input(format!(
                "symbol `{}` has rank {} but the transition lists {} states",
                self.alphabet.name(f),
                self.alphabet.rank(f),
                children.len()
            ));
        }
        if self.rules.contains_key(&(p, f)) {
            return input(format!(
                "two transitions for state `{}` and symbol `{}`",
                self.states[p],
                self.alphabet.name(f)
            ));
        }
        self.rules.insert((p, f), children);
        Ok(())
    }

    /// The automaton with a single state accepting every tree.
    pub fn universal(alphabet: &RankedAlphabet) -> Dtta {
        let mut a = Dtta::new(alphabet.clone(), vec!["*".into()], 0).unwrap();
        for f in alphabet.symbols() {
            a.rules.insert((0, f), vec![0; alphabet.rank(f)]);
        }
        a
    }

    pub fn alphabet(&self) -> &RankedAlphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, p: usize) -> &str {
        &self.states[p]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn rule(&self, p: usize, f: Symbol) -> Option<&[usize]> {
        self.rules.get(&(p, f)).map(Vec::as_slice)
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, Symbol, &[usize])> + '_ {
        self.rules.iter().map(|(&(p, f), c)| (p, f, c.as_slice()))
    }

    pub fn num_transitions(&self) -> usize {
        self.rules.len()
    }

    /// Number of states plus the sizes of all transitions.
    pub fn size(&self) -> usize {
        self.states.len() + self.rules.values().map(|c| 2 + c.len()).sum::<usize>()
    }

    /// Membership `t ∈ dom(p)`.
    pub fn accepts(&self, p: usize, t: &Tree) -> Result<bool> {
        t.check(&self.alphabet)?;
        Ok(self.accepts_unchecked(p, t))
    }

    fn accepts_unchecked(&self, p: usize, t: &Tree) -> bool {
        match self.rule(p, t.symbol()) {
            None => false,
            Some(cs) => cs
                .iter()
                .zip(t.children())
                .all(|(&c, u)| self.accepts_unchecked(c, u)),
        }
    }

    /// `dom_d(p)` in enumeration order; leaves have depth 1.
    pub fn enumerate_dom(&self, p: usize, d: usize) -> Vec<Tree> {
        let mut layers = self.dom_layers(d);
        let mut v = std::mem::take(&mut layers[p]);
        v.sort_by(|a, b| cmp_trees(&self.alphabet, a, b));
        v
    }

    /// `dom_d(p)` for every state at once, each sorted.
    pub fn enumerate_all(&self, d: usize) -> Vec<Vec<Tree>> {
        let mut layers = self.dom_layers(d);
        for v in &mut layers {
            v.sort_by(|a, b| cmp_trees(&self.alphabet, a, b));
        }
        layers
    }

    fn dom_layers(&self, d: usize) -> Vec<Vec<Tree>> {
        let n = self.states.len();
        let mut cur: Vec<Vec<Tree>> = vec![Vec::new(); n];
        for _ in 0..d {
            let mut next: Vec<Vec<Tree>> = vec![Vec::new(); n];
            for (&(p, f), cs) in &self.rules {
                let lists: Vec<&[Tree]> = cs.iter().map(|&c| cur[c].as_slice()).collect();
                for_each_product(&lists, |kids| next[p].push(Tree::new(f, kids.to_vec())));
            }
            cur = next;
        }
        cur
    }

    /// States with a non-empty domain.
    pub fn productive(&self) -> Vec<bool> {
        let mut prod = vec![false; self.states.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for (&(p, _), cs) in &self.rules {
                if !prod[p] && cs.iter().all(|&c| prod[c]) {
                    prod[p] = true;
                    changed = true;
                }
            }
        }
        prod
    }

    pub fn is_empty(&self) -> bool {
        !self.productive()[self.initial]
    }

    /// Drops every transition that touches a state with an empty domain.
    pub fn trim(&self) -> Dtta {
        let prod = self.productive();
        let mut a = self.clone();
        a.rules
            .retain(|&(p, _), cs| prod[p] && cs.iter().all(|&c| prod[c]));
        a
    }

    /// A smallest tree of each state's domain, if any.
    pub fn min_trees(&self) -> Vec<Option<Tree>> {
        let n = self.states.len();
        let mut best: Vec<Option<Tree>> = vec![None; n];
        loop {
            let mut found: Vec<(usize, Tree)> = Vec::new();
            for (&(p, f), cs) in &self.rules {
                if best[p].is_some() || !cs.iter().all(|&c| best[c].is_some()) {
                    continue;
                }
                let t = Tree::new(f, cs.iter().map(|&c| best[c].clone().unwrap()).collect());
                match found.iter_mut().find(|(q, _)| *q == p) {
                    Some((_, old)) => {
                        if cmp_trees(&self.alphabet, &t, old).is_lt() {
                            *old = t;
                        }
                    }
                    None => found.push((p, t)),
                }
            }
            if found.is_empty() {
                return best;
            }
            for (p, t) in found {
                best[p] = Some(t);
            }
        }
    }

    /// The same automaton over a larger alphabet, symbols matched by name.
    pub fn with_alphabet(&self, target: &RankedAlphabet) -> Result<Dtta> {
        let mut a = Dtta::new(target.clone(), self.states.clone(), self.initial)?;
        for (&(p, f), cs) in &self.rules {
            let name = self.alphabet.name(f);
            match target.lookup(name) {
                Some(g) => a.add_rule(p, g, cs.clone())?,
                None => return input(format!("symbol `{name}` missing from target alphabet")),
            }
        }
        Ok(a)
    }

    /// The reachable part of the product automaton, accepting `L(self) ∩ L(other)`.
    pub fn product(&self, other: &Dtta) -> Result<Dtta> {
        let other = if other.alphabet == self.alphabet {
            other.clone()
        } else {
            other.with_alphabet(&self.alphabet)?
        };
        let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut names = Vec::new();
        let mut queue = VecDeque::new();
        let start = (self.initial, other.initial);
        ids.insert(start, 0);
        names.push(format!("{}&{}", self.states[start.0], other.states[start.1]));
        queue.push_back(start);
        let mut rules = Vec::new();
        while let Some((p, q)) = queue.pop_front() {
            let id = ids[&(p, q)];
            for f in self.alphabet.symbols() {
                let (Some(a), Some(b)) = (self.rule(p, f), other.rule(q, f)) else {
                    continue;
                };
                let mut kids = Vec::with_capacity(a.len());
                for (&x, &y) in a.iter().zip(b) {
                    let k = *ids.entry((x, y)).or_insert_with(|| {
                        names.push(format!("{}&{}", self.states[x], other.states[y]));
                        queue.push_back((x, y));
                        names.len() - 1
                    });
                    kids.push(k);
                }
                rules.push((id, f, kids));
            }
        }
        let mut out = Dtta::new(self.alphabet.clone(), names, 0)?;
        for (p, f, k) in rules {
            out.add_rule(p, f, k)?;
        }
        Ok(out)
    }

    pub fn to_sexp(&self) -> Sexp {
        let mut items = vec![Sexp::atom("dtta"), self.alphabet.to_sexp()];
        let mut st = vec![Sexp::atom("states")];
        st.extend(self.states.iter().map(|s| Sexp::atom(s.clone())));
        items.push(Sexp::list(st));
        items.push(Sexp::list(vec![
            Sexp::atom("init"),
            Sexp::atom(self.states[self.initial].clone()),
        ]));
        for (&(p, f), cs) in &self.rules {
            items.push(Sexp::list(vec![
                Sexp::atom("rule"),
                Sexp::atom(self.states[p].clone()),
                Sexp::atom(self.alphabet.name(f)),
                Sexp::list(cs.iter().map(|&c| Sexp::atom(self.states[c].clone())).collect()),
            ]));
        }
        Sexp::list(items)
    }

    /// Reads a `(dtta ...)` form. Without an `(alphabet ...)` clause the
    /// alphabet is `default`, or is inferred from the transitions.
    pub fn from_sexp(s: &Sexp, default: Option<&RankedAlphabet>) -> Result<Dtta> {
        let items = s.expect_list("automaton")?;
        if s.head() != Some("dtta") {
            return s.error("expected (dtta ...)");
        }
        let mut alphabet = None;
        let mut states: Vec<String> = Vec::new();
        let mut init = None;
        let mut rules = Vec::new();
        for it in &items[1..] {
            let parts = it.expect_list("clause")?;
            match it.head() {
                Some("alphabet") => alphabet = Some(RankedAlphabet::from_sexp(it)?),
                Some("states") => {
                    for st in &parts[1..] {
                        let name = st.expect_atom("state")?;
                        if states.iter().any(|s| s == name) {
                            return st.error(format!("duplicate state `{name}`"));
                        }
                        states.push(name.to_string());
                    }
                }
                Some("init") if parts.len() == 2 => init = Some(&parts[1]),
                Some("rule") if parts.len() == 4 => rules.push(it),
                _ => return it.error("expected (alphabet ...), (states ...), (init p) or (rule p f (p ...))"),
            }
        }
        let inferred = alphabet.is_none() && default.is_none();
        let mut alphabet = alphabet.or_else(|| default.cloned()).unwrap_or_default();
        let state_of = |x: &Sexp| -> Result<usize> {
            let name = x.expect_atom("state")?;
            match states.iter().position(|s| s == name) {
                Some(i) => Ok(i),
                None => x.error(format!("undeclared state `{name}`")),
            }
        };
        let Some(init) = init else {
            return s.error("missing (init p)");
        };
        let initial = state_of(init)?;
        let mut parsed = Vec::new();
        for r in rules {
            let parts = r.as_list().unwrap();
            let p = state_of(&parts[1])?;
            let fname = parts[2].expect_atom("symbol")?;
            let kids = parts[3]
                .expect_list("child states")?
                .iter()
                .map(&state_of)
                .collect::<Result<Vec<_>>>()?;
            let f = if inferred {
                match alphabet.insert(fname, kids.len()) {
                    Ok(f) => f,
                    Err(e) => return parts[2].error(e.to_string()),
                }
            } else {
                match alphabet.lookup(fname) {
                    Some(f) => f,
                    None => return parts[2].error(format!("unknown symbol `{fname}`")),
                }
            };
            parsed.push((r, p, f, kids));
        }
        let mut a = Dtta::new(alphabet, states, initial)?;
        for (r, p, f, kids) in parsed {
            if let Err(e) = a.add_rule(p, f, kids) {
                return r.error(e.to_string());
            }
        }
        Ok(a)
    }

    pub fn parse(text: &str, default: Option<&RankedAlphabet>) -> Result<Dtta> {
        Dtta::from_sexp(&sexp::parse_one(text)?, default)
    }
}

impl fmt::Display for Dtta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.to_sexp();
        let items = s.as_list().unwrap();
        writeln!(f, "(dtta")?;
        for it in &items[1..] {
            writeln!(f, "  {it}")?;
        }
        write!(f, ")")
    }
}

/// Calls `k` on every tuple of the cartesian product of `lists`.
pub(crate) fn for_each_product<T: Clone>(lists: &[&[T]], mut k: impl FnMut(&[T])) {
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; lists.len()];
    let mut buf: Vec<T> = lists.iter().map(|l| l[0].clone()).collect();
    loop {
        k(&buf);
        let mut i = lists.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < lists[i].len() {
                buf[i] = lists[i][idx[i]].clone();
                break;
            }
            idx[i] = 0;
            buf[i] = lists[i][0].clone();
        }
    }
}

/// The automaton `B` accepting exactly the encodings `bin(t)` of trees over `alph`.
///
/// State `j` accepts encodings of sequences of exactly `j` trees; the initial
/// state is 1.
pub fn bin_checker(alph: &RankedAlphabet) -> Result<Dtta> {
    let (balph, bot) = alph.binary()?;
    let m = alph.max_rank().max(1);
    let states = (0..=m).map(|j| j.to_string()).collect();
    let mut b = Dtta::new(balph, states, 1)?;
    b.add_rule(0, bot, vec![])?;
    for j in 0..m {
        for f in alph.symbols() {
            b.add_rule(j + 1, f, vec![alph.rank(f), j])?;
        }
    }
    Ok(b)
}

/// The automaton accepting `{bin(t) : t ∈ L(a)}` over `bin(Σ)`. Its states
/// are sequences of states of `a`, one per tree still to be read.
pub fn binary_lift(a: &Dtta) -> Result<Dtta> {
    let (balph, bot) = a.alphabet.binary()?;
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut seqs: Vec<Vec<usize>> = Vec::new();
    let mut rules: Vec<(usize, Symbol, Vec<usize>)> = Vec::new();
    let mut intern = |s: Vec<usize>, seqs: &mut Vec<Vec<usize>>, queue: &mut VecDeque<usize>| {
        *ids.entry(s.clone()).or_insert_with(|| {
            seqs.push(s);
            queue.push_back(seqs.len() - 1);
            seqs.len() - 1
        })
    };
    let mut queue = VecDeque::new();
    intern(vec![a.initial], &mut seqs, &mut queue);
    while let Some(id) = queue.pop_front() {
        let seq = seqs[id].clone();
        let Some((&p, rest)) = seq.split_first() else {
            rules.push((id, bot, vec![]));
            continue;
        };
        for f in a.alphabet.sorted_symbols() {
            if let Some(cs) = a.rule(p, f) {
                let first = intern(cs.to_vec(), &mut seqs, &mut queue);
                let next = intern(rest.to_vec(), &mut seqs, &mut queue);
                rules.push((id, f, vec![first, next]));
            }
        }
    }
    let names = seqs
        .iter()
        .map(|s| {
            let v: Vec<&str> = s.iter().map(|&p| a.state_name(p)).collect();
            format!("[{}]", v.join(" "))
        })
        .collect();
    let mut b = Dtta::new(balph, names, 0)?;
    for (p, f, cs) in rules {
        b.add_rule(p, f, cs)?;
    }
    Ok(b)
}

/// A tree in exactly one of the two languages, with `true` when it lies in
/// `L(a) \ L(b)`. `None` iff the languages are equal.
///
/// The tree is over `a.alphabet().merge(b.alphabet())`, which keeps the
/// symbol ids of `a`.
pub fn difference_witness(a: &Dtta, b: &Dtta) -> Result<Option<(Tree, bool)>> {
    let alph = a.alphabet.merge(&b.alphabet)?;
    let a = a.with_alphabet(&alph)?.trim();
    let b = b.with_alphabet(&alph)?.trim();
    let (ma, mb) = (a.min_trees(), b.min_trees());
    match (&ma[a.initial], &mb[b.initial]) {
        (None, None) => return Ok(None),
        (Some(t), None) => return Ok(Some((t.clone(), true))),
        (None, Some(t)) => return Ok(Some((t.clone(), false))),
        _ => {}
    }
    // parent link: (parent pair, symbol, child position)
    let mut parent: HashMap<(usize, usize), Option<((usize, usize), Symbol, usize)>> =
        HashMap::new();
    let start = (a.initial, b.initial);
    parent.insert(start, None);
    let mut queue = VecDeque::from([start]);
    let symbols = alph.sorted_symbols();
    while let Some((p, q)) = queue.pop_front() {
        for &f in &symbols {
            match (a.rule(p, f), b.rule(q, f)) {
                (Some(x), Some(y)) => {
                    for (i, (&c, &d)) in x.iter().zip(y).enumerate() {
                        if let std::collections::hash_map::Entry::Vacant(e) = parent.entry((c, d)) {
                            e.insert(Some(((p, q), f, i)));
                            queue.push_back((c, d));
                        }
                    }
                }
                (None, None) => {}
                (x, _) => {
                    let in_a = x.is_some();
                    let (auto, mins) = if in_a { (&a, &ma) } else { (&b, &mb) };
                    let side = |pair: (usize, usize)| if in_a { pair.0 } else { pair.1 };
                    let kids = auto.rule(side((p, q)), f).unwrap();
                    let mut t = Tree::new(f, kids.iter().map(|&c| mins[c].clone().unwrap()).collect());
                    let mut cur = (p, q);
                    while let Some(((pp, pq), g, i)) = parent[&cur] {
                        let ks = auto.rule(side((pp, pq)), g).unwrap();
                        let children = ks
                            .iter()
                            .enumerate()
                            .map(|(j, &c)| if j == i { t.clone() } else { mins[c].clone().unwrap() })
                            .collect();
                        t = Tree::new(g, children);
                        cur = (pp, pq);
                    }
                    return Ok(Some((t, in_a)));
                }
            }
        }
    }
    Ok(None)
}

/// Language equality `L(a) = L(b)`.
pub fn dtta_equiv(a: &Dtta, b: &Dtta) -> Result<bool> {
    Ok(difference_witness(a, b)?.is_none())
}
