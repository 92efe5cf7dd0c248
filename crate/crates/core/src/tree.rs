//! Ranked alphabets, trees and the first-child-next-sibling encoding.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{input, Result};
use crate::sexp::{self, Sexp};

/// Name of the nullary end marker added by [`RankedAlphabet::binary`].
pub const BOTTOM: &str = "⊥";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedAlphabet {
    symbols: Vec<(String, usize)>,
    index: HashMap<String, Symbol>,
    // position of each symbol when sorted by name
    order: Vec<u32>,
}

impl Default for RankedAlphabet {
    fn default() -> Self {
        RankedAlphabet {
            symbols: Vec::new(),
            index: HashMap::new(),
            order: Vec::new(),
        }
    }
}

impl RankedAlphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut a = RankedAlphabet::default();
        for (name, rank) in symbols {
            let name = name.into();
            if a.index.contains_key(&name) {
                return input(format!("duplicate symbol `{name}`"));
            }
            a.push(name, rank);
        }
        Ok(a)
    }

    fn push(&mut self, name: String, rank: usize) -> Symbol {
        let s = Symbol(self.symbols.len() as u32);
        self.index.insert(name.clone(), s);
        self.symbols.push((name, rank));
        let mut idx: Vec<usize> = (0..self.symbols.len()).collect();
        idx.sort_by(|&a, &b| self.symbols[a].0.cmp(&self.symbols[b].0));
        self.order = vec![0; idx.len()];
        for (pos, i) in idx.into_iter().enumerate() {
            self.order[i] = pos as u32;
        }
        s
    }

    /// Adds `name` with `rank`, or returns the existing symbol if the ranks agree.
    pub fn insert(&mut self, name: &str, rank: usize) -> Result<Symbol> {
        match self.index.get(name) {
            Some(&s) if self.rank(s) == rank => Ok(s),
            Some(&s) => input(format!(
                "symbol `{name}` used with rank {rank} but declared with rank {}",
                self.rank(s)
            )),
            None => Ok(self.push(name.to_string(), rank)),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.symbols.len() as u32).map(Symbol)
    }

    /// Symbols in name order, the order used for enumeration.
    pub fn sorted_symbols(&self) -> Vec<Symbol> {
        let mut v: Vec<Symbol> = self.symbols().collect();
        v.sort_by_key(|s| self.order[s.index()]);
        v
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.symbols[s.index()].0
    }

    pub fn rank(&self, s: Symbol) -> usize {
        self.symbols[s.index()].1
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, s: Symbol) -> bool {
        s.index() < self.symbols.len()
    }

    pub fn max_rank(&self) -> usize {
        self.symbols.iter().map(|s| s.1).max().unwrap_or(0)
    }

    pub fn is_monadic(&self) -> bool {
        self.max_rank() <= 1
    }

    pub fn cmp_symbols(&self, a: Symbol, b: Symbol) -> Ordering {
        self.order[a.index()].cmp(&self.order[b.index()])
    }

    /// Union of two alphabets; symbols of `self` keep their ids.
    pub fn merge(&self, other: &RankedAlphabet) -> Result<RankedAlphabet> {
        let mut a = self.clone();
        for s in other.symbols() {
            a.insert(other.name(s), other.rank(s))?;
        }
        Ok(a)
    }

    /// bin(Σ): every symbol becomes binary and [`BOTTOM`] is appended with id `|Σ|`.
    pub fn binary(&self) -> Result<(RankedAlphabet, Symbol)> {
        if self.index.contains_key(BOTTOM) {
            return input("alphabet already contains the end marker");
        }
        let mut a = RankedAlphabet::default();
        for (name, _) in &self.symbols {
            a.push(name.clone(), 2);
        }
        let bot = a.push(BOTTOM.to_string(), 0);
        Ok((a, bot))
    }

    pub fn to_sexp(&self) -> Sexp {
        let mut items = vec![Sexp::atom("alphabet")];
        for (n, r) in &self.symbols {
            items.push(Sexp::list(vec![Sexp::atom(n.clone()), Sexp::atom(r.to_string())]));
        }
        Sexp::list(items)
    }

    /// Reads the body of an `(alphabet (f 2) (e 0) ...)` form.
    pub fn from_sexp(s: &Sexp) -> Result<RankedAlphabet> {
        let items = s.expect_list("alphabet")?;
        let mut a = RankedAlphabet::default();
        for it in items.iter().skip(1) {
            let pair = it.expect_list("(symbol rank)")?;
            if pair.len() != 2 {
                return it.error("expected (symbol rank)");
            }
            let name = pair[0].expect_atom("symbol name")?;
            let rank: usize = match pair[1].expect_atom("rank")?.parse() {
                Ok(r) => r,
                Err(_) => return pair[1].error("rank must be a non-negative integer"),
            };
            if a.lookup(name).is_some() {
                return it.error(format!("duplicate symbol `{name}`"));
            }
            a.push(name.to_string(), rank);
        }
        Ok(a)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    sym: Symbol,
    children: Arc<[Tree]>,
    depth: u32,
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.sym.0)?;
        if !self.children.is_empty() {
            f.debug_list().entries(self.children.iter()).finish()?;
        }
        Ok(())
    }
}

impl Tree {
    pub fn new(sym: Symbol, children: Vec<Tree>) -> Tree {
        let depth = 1 + children.iter().map(|c| c.depth).max().unwrap_or(0);
        Tree {
            sym,
            children: children.into(),
            depth,
        }
    }

    pub fn leaf(sym: Symbol) -> Tree {
        Tree::new(sym, Vec::new())
    }

    pub fn symbol(&self) -> Symbol {
        self.sym
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    /// Leaves have depth 1.
    pub fn depth(&self) -> usize {
        self.depth as usize
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    /// Checks that every symbol is in `alph` and used with its rank.
    pub fn check(&self, alph: &RankedAlphabet) -> Result<()> {
        if !alph.contains(self.sym) {
            return input(format!("unknown symbol #{}", self.sym.0));
        }
        if alph.rank(self.sym) != self.children.len() {
            return input(format!(
                "symbol `{}` has rank {} but {} children",
                alph.name(self.sym),
                alph.rank(self.sym),
                self.children.len()
            ));
        }
        self.children.iter().try_for_each(|c| c.check(alph))
    }

    /// Re-interns the symbols of a tree over `from` into `to` by name.
    pub fn remap(&self, from: &RankedAlphabet, to: &RankedAlphabet) -> Result<Tree> {
        let name = from.name(self.sym);
        let Some(sym) = to.lookup(name) else {
            return input(format!("symbol `{name}` missing from target alphabet"));
        };
        let children = self
            .children
            .iter()
            .map(|c| c.remap(from, to))
            .collect::<Result<Vec<_>>>()?;
        Ok(Tree::new(sym, children))
    }

    pub fn display<'a>(&'a self, alph: &'a RankedAlphabet) -> TreeDisplay<'a> {
        TreeDisplay { tree: self, alph }
    }

    pub fn to_sexp(&self, alph: &RankedAlphabet) -> Sexp {
        let mut items = vec![Sexp::atom(alph.name(self.sym))];
        items.extend(self.children.iter().map(|c| c.to_sexp(alph)));
        Sexp::list(items)
    }

    /// Reads `(f (a (e)) (e))`; a bare atom is accepted for a nullary symbol.
    pub fn from_sexp(s: &Sexp, alph: &RankedAlphabet) -> Result<Tree> {
        let (name, args) = match s {
            Sexp::Atom(a, _) => (a.as_str(), &[][..]),
            Sexp::List(items, _) => match items.split_first() {
                Some((h, rest)) => (h.expect_atom("symbol")?, rest),
                None => return s.error("empty tree"),
            },
        };
        let Some(sym) = alph.lookup(name) else {
            return s.error(format!("unknown symbol `{name}`"));
        };
        if alph.rank(sym) != args.len() {
            return s.error(format!(
                "symbol `{name}` has rank {} but {} children",
                alph.rank(sym),
                args.len()
            ));
        }
        let children = args
            .iter()
            .map(|a| Tree::from_sexp(a, alph))
            .collect::<Result<Vec<_>>>()?;
        Ok(Tree::new(sym, children))
    }

    pub fn parse(text: &str, alph: &RankedAlphabet) -> Result<Tree> {
        Tree::from_sexp(&sexp::parse_one(text)?, alph)
    }
}

pub struct TreeDisplay<'a> {
    tree: &'a Tree,
    alph: &'a RankedAlphabet,
}

impl fmt::Display for TreeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.alph.name(self.tree.sym))?;
        for c in self.tree.children.iter() {
            write!(f, " {}", c.display(self.alph))?;
        }
        f.write_str(")")
    }
}

/// Enumeration order: depth, then root symbol name, then children left to right.
pub fn cmp_trees(alph: &RankedAlphabet, a: &Tree, b: &Tree) -> Ordering {
    a.depth
        .cmp(&b.depth)
        .then_with(|| alph.cmp_symbols(a.sym, b.sym))
        .then_with(|| {
            for (x, y) in a.children.iter().zip(b.children.iter()) {
                let o = cmp_trees(alph, x, y);
                if o != Ordering::Equal {
                    return o;
                }
            }
            a.children.len().cmp(&b.children.len())
        })
}

/// First-child-next-sibling encoding of a sequence of trees.
///
/// Symbol ids are shared with the alphabet returned by [`RankedAlphabet::binary`],
/// whose end marker is `bottom`.
pub fn bin_encode(seq: &[Tree], bottom: Symbol) -> Tree {
    let mut acc = Tree::leaf(bottom);
    for t in seq.iter().rev() {
        let first = bin_encode(t.children(), bottom);
        acc = Tree::new(t.symbol(), vec![first, acc]);
    }
    acc
}

/// Inverse of [`bin_encode`]; `None` when `t` is not the encoding of a sequence
/// of well-ranked trees over `alph`.
pub fn bin_decode(t: &Tree, alph: &RankedAlphabet, bottom: Symbol) -> Option<Vec<Tree>> {
    let mut out = Vec::new();
    let mut cur = t;
    loop {
        if cur.symbol() == bottom {
            return cur.children().is_empty().then_some(out);
        }
        if !alph.contains(cur.symbol()) || cur.children().len() != 2 {
            return None;
        }
        let kids = bin_decode(&cur.children()[0], alph, bottom)?;
        if kids.len() != alph.rank(cur.symbol()) {
            return None;
        }
        out.push(Tree::new(cur.symbol(), kids));
        cur = &cur.children()[1];
    }
}

/// Every tree over `alph` of depth at most `d`, in enumeration order.
pub fn all_trees(alph: &RankedAlphabet, d: usize) -> Vec<Tree> {
    crate::dtta::Dtta::universal(alph).enumerate_dom(0, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn sigma() -> RankedAlphabet {
        RankedAlphabet::new([("f", 3), ("g", 1), ("h", 2), ("b", 0), ("c", 0)]).unwrap()
    }

    #[test]
    fn encodes_worked_example() {
        let s = sigma();
        let (bs, bot) = s.binary().unwrap();
        let t = Tree::parse("(f b (g c) (h b c))", &s).unwrap();
        let e = bin_encode(std::slice::from_ref(&t), bot);
        assert_eq!(
            e.display(&bs).to_string(),
            "(f (b (⊥) (g (c (⊥) (⊥)) (h (b (⊥) (c (⊥) (⊥))) (⊥)))) (⊥))"
        );
        assert_eq!(bin_decode(&e, &s, bot), Some(vec![t]));
        assert_eq!(bin_encode(&[], bot), Tree::leaf(bot));
    }

    #[test]
    fn encodes_small_chain() {
        let s = RankedAlphabet::new([("a", 1), ("e", 0)]).unwrap();
        let (bs, bot) = s.binary().unwrap();
        let t = Tree::parse("(a (e))", &s).unwrap();
        let e = bin_encode(&[t], bot);
        assert_eq!(e.display(&bs).to_string(), "(a (e (⊥) (⊥)) (⊥))");
    }

    #[test]
    fn rejects_bad_encodings() {
        let s = sigma();
        let (bs, bot) = s.binary().unwrap();
        let bad = Tree::parse("(g (⊥) (⊥))", &bs).unwrap();
        assert_eq!(bin_decode(&bad, &s, bot), None);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let s = sigma();
        assert!(matches!(
            Tree::parse("(h b\n (g))", &s),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(Tree::parse("(zz)", &s).is_err());
    }

    #[test]
    fn order_is_depth_then_name() {
        let s = sigma();
        let mut v = vec![
            Tree::parse("(g b)", &s).unwrap(),
            Tree::parse("c", &s).unwrap(),
            Tree::parse("b", &s).unwrap(),
            Tree::parse("(g c)", &s).unwrap(),
        ];
        v.sort_by(|a, b| cmp_trees(&s, a, b));
        let shown: Vec<String> = v.iter().map(|t| t.display(&s).to_string()).collect();
        assert_eq!(shown, ["(b)", "(c)", "(g (b))", "(g (c))"]);
    }
}
