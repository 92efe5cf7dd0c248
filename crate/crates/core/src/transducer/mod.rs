//! Deterministic macro tree-to-string transducers in string and numeric mode.

mod construct;
mod eval;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{input, Result};
use crate::sexp::{self, Sexp};
use crate::tree::{RankedAlphabet, Symbol};

pub use construct::Binarized;
pub use eval::{word_to_string, SemanticsVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Outputs are words over the declared output letters.
    String,
    /// Unary output represented by its length, with `+` and scalar multiples.
    Numeric,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::String => "string",
            Mode::Numeric => "numeric",
        }
    }
}

/// Right-hand side of a rule. String mode uses `Seq`, `Out`, `Param` and
/// `Call`; numeric mode uses `Const`, `Param`, `Call`, `Add` and `Scale`.
/// Parameter and child indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rhs {
    Seq(Vec<Rhs>),
    Out(usize),
    Param(usize),
    Call {
        state: usize,
        child: usize,
        args: Vec<Rhs>,
    },
    Const(BigInt),
    Add(Vec<Rhs>),
    Scale(BigInt, Box<Rhs>),
}

impl Rhs {
    pub fn eps() -> Rhs {
        Rhs::Seq(Vec::new())
    }

    pub fn constant(c: i64) -> Rhs {
        Rhs::Const(BigInt::from(c))
    }

    pub fn call(state: usize, child: usize, args: Vec<Rhs>) -> Rhs {
        Rhs::Call { state, child, args }
    }

    /// Expression size, counting nodes: `|c| = |y| = 1`, `|q(x,T..)| = 2 + Σ|T|`,
    /// `|T1+T2| = 1+|T1|+|T2|`, `|c·T| = 2+|T|`, so `|2+3·q(x1,1,0)| = 8`.
    /// In string mode every letter, parameter and call counts once.
    pub fn size(&self) -> usize {
        match self {
            Rhs::Seq(items) => items.iter().map(Rhs::size).sum(),
            Rhs::Out(_) | Rhs::Param(_) | Rhs::Const(_) => 1,
            Rhs::Call { args, .. } => 2 + args.iter().map(Rhs::size).sum::<usize>(),
            Rhs::Add(ts) if ts.is_empty() => 1,
            Rhs::Add(ts) => ts.len() - 1 + ts.iter().map(Rhs::size).sum::<usize>(),
            Rhs::Scale(_, t) => 2 + t.size(),
        }
    }

    pub fn max_constant(&self) -> BigInt {
        let mut h = BigInt::zero();
        self.visit(&mut |r| match r {
            Rhs::Const(c) | Rhs::Scale(c, _) if c.abs() > h => h = c.abs(),
            _ => {}
        });
        h
    }

    /// Pre-order traversal.
    pub fn visit(&self, k: &mut impl FnMut(&Rhs)) {
        k(self);
        match self {
            Rhs::Seq(ts) | Rhs::Add(ts) | Rhs::Call { args: ts, .. } => {
                ts.iter().for_each(|t| t.visit(k))
            }
            Rhs::Scale(_, t) => t.visit(k),
            _ => {}
        }
    }

    /// Every `(state, child)` pair called anywhere in the expression.
    pub fn calls(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        self.visit(&mut |r| {
            if let Rhs::Call { state, child, .. } = r {
                v.push((*state, *child));
            }
        });
        v
    }

    fn self_nested(&self) -> bool {
        let mut nested = false;
        self.visit(&mut |r| {
            if let Rhs::Call { child, args, .. } = r {
                if args.iter().any(|a| a.calls().iter().any(|&(_, c)| c == *child)) {
                    nested = true;
                }
            }
        });
        nested
    }

    fn flatten_seq(self, out: &mut Vec<Rhs>) {
        match self {
            Rhs::Seq(items) => items.into_iter().for_each(|i| i.flatten_seq(out)),
            Rhs::Call { state, child, args } => out.push(Rhs::Call {
                state,
                child,
                args: args.into_iter().map(Rhs::normalize_string).collect(),
            }),
            other => out.push(other),
        }
    }

    /// String-mode normal form: a flat `Seq` whose calls carry `Seq` arguments.
    pub fn normalize_string(self) -> Rhs {
        let mut v = Vec::new();
        self.flatten_seq(&mut v);
        Rhs::Seq(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Classification {
    pub linear: bool,
    pub non_self_nested: bool,
    pub total: bool,
    pub unary_output: bool,
    pub monadic_input: bool,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "linear: {}", self.linear)?;
        writeln!(f, "non_self_nested: {}", self.non_self_nested)?;
        writeln!(f, "total: {}", self.total)?;
        writeln!(f, "unary_output: {}", self.unary_output)?;
        write!(f, "monadic_input: {}", self.monadic_input)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transducer {
    mode: Mode,
    input: RankedAlphabet,
    output: Vec<String>,
    states: Vec<String>,
    params: usize,
    initial: usize,
    rules: BTreeMap<(usize, Symbol), Rhs>,
}

impl Transducer {
    pub fn new(
        mode: Mode,
        alphabet: RankedAlphabet,
        output: Vec<String>,
        states: Vec<String>,
        params: usize,
        initial: usize,
    ) -> Result<Transducer> {
        if initial >= states.len() {
            return input("initial state out of range");
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return input(format!("duplicate state `{s}`"));
            }
        }
        for (i, a) in output.iter().enumerate() {
            if output[..i].contains(a) {
                return input(format!("duplicate output letter `{a}`"));
            }
        }
        if mode == Mode::Numeric && !output.is_empty() {
            return input("numeric transducers have no output letters");
        }
        Ok(Transducer {
            mode,
            input: alphabet,
            output,
            states,
            params,
            initial,
            rules: BTreeMap::new(),
        })
    }

    pub fn add_rule(&mut self, q: usize, f: Symbol, rhs: Rhs) -> Result<()> {
        if q >= self.states.len() {
            return input("rule for an undeclared state");
        }
        if !self.input.contains(f) {
            return input("rule for an unknown input symbol");
        }
        let rhs = match self.mode {
            Mode::String => rhs.normalize_string(),
            Mode::Numeric => rhs,
        };
        self.check_rhs(&rhs, self.input.rank(f))?;
        if self.rules.contains_key(&(q, f)) {
            return input(format!(
                "two rules for state `{}` and symbol `{}`",
                self.states[q],
                self.input.name(f)
            ));
        }
        self.rules.insert((q, f), rhs);
        Ok(())
    }

    fn check_rhs(&self, rhs: &Rhs, rank: usize) -> Result<()> {
        let string = self.mode == Mode::String;
        match rhs {
            Rhs::Seq(items) if string => {
                items.iter().try_for_each(|i| self.check_rhs(i, rank))
            }
            Rhs::Out(a) if string => {
                if *a >= self.output.len() {
                    return input("output letter out of range");
                }
                Ok(())
            }
            Rhs::Param(j) => {
                if *j >= self.params {
                    return input(format!("parameter y{} but only {} declared", j + 1, self.params));
                }
                Ok(())
            }
            Rhs::Call { state, child, args } => {
                if *state >= self.states.len() {
                    return input("call to an undeclared state");
                }
                if *child >= rank {
                    return input(format!("variable x{} but the symbol has rank {rank}", child + 1));
                }
                if args.len() != self.params {
                    return input(format!(
                        "call passes {} arguments, expected {}",
                        args.len(),
                        self.params
                    ));
                }
                args.iter().try_for_each(|a| self.check_rhs(a, rank))
            }
            Rhs::Const(_) if !string => Ok(()),
            Rhs::Add(ts) if !string => ts.iter().try_for_each(|t| self.check_rhs(t, rank)),
            Rhs::Scale(_, t) if !string => self.check_rhs(t, rank),
            _ => input(format!("expression not allowed in {} mode", self.mode.as_str())),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn input(&self) -> &RankedAlphabet {
        &self.input
    }

    pub fn output(&self) -> &[String] {
        &self.output
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn params(&self) -> usize {
        self.params
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn with_initial(&self, q: usize) -> Transducer {
        assert!(q < self.states.len());
        Transducer {
            initial: q,
            ..self.clone()
        }
    }

    pub fn rule(&self, q: usize, f: Symbol) -> Option<&Rhs> {
        self.rules.get(&(q, f))
    }

    pub fn rules(&self) -> impl Iterator<Item = (usize, Symbol, &Rhs)> + '_ {
        self.rules.iter().map(|(&(q, f), r)| (q, f, r))
    }

    /// Largest absolute constant or scalar factor in any rule.
    pub fn h(&self) -> BigInt {
        self.rules
            .values()
            .map(Rhs::max_constant)
            .max()
            .unwrap_or_default()
    }

    /// `|M|`: alphabet sizes plus one plus `|T|` per rule.
    pub fn size(&self) -> usize {
        let delta = match self.mode {
            Mode::String => self.output.len(),
            Mode::Numeric => 1,
        };
        self.states.len()
            + self.input.len()
            + delta
            + self.rules.values().map(|r| 1 + r.size()).sum::<usize>()
    }

    pub fn is_total(&self) -> bool {
        self.rules.len() == self.states.len() * self.input.len()
    }

    pub fn classify(&self) -> Classification {
        let linear = self.rules.iter().all(|(&(_, f), r)| {
            let mut seen = vec![0usize; self.input.rank(f)];
            r.calls().iter().for_each(|&(_, i)| seen[i] += 1);
            seen.iter().all(|&c| c <= 1)
        });
        Classification {
            linear,
            non_self_nested: !self.rules.values().any(Rhs::self_nested),
            total: self.is_total(),
            unary_output: self.mode == Mode::Numeric || self.output.len() == 1,
            monadic_input: self.input.is_monadic(),
        }
    }

    pub fn to_sexp(&self) -> Sexp {
        fn a(s: impl Into<String>) -> Sexp {
            Sexp::atom(s)
        }
        let mut items = vec![
            a("transducer"),
            Sexp::list(vec![a("mode"), a(self.mode.as_str())]),
            Sexp::list(vec![a("params"), a(self.params.to_string())]),
            self.input.to_sexp(),
        ];
        if self.mode == Mode::String {
            let mut o = vec![a("output")];
            o.extend(self.output.iter().map(|l| a(l.clone())));
            items.push(Sexp::list(o));
        }
        let mut st = vec![a("states")];
        st.extend(self.states.iter().map(|s| a(s.clone())));
        items.push(Sexp::list(st));
        items.push(Sexp::list(vec![a("init"), a(self.states[self.initial].clone())]));
        for (&(q, f), r) in &self.rules {
            let rank = self.input.rank(f);
            let mut rule = vec![
                a("rule"),
                a(self.states[q].clone()),
                a(self.input.name(f)),
                Sexp::list((1..=rank).map(|i| a(format!("x{i}"))).collect()),
            ];
            match (self.mode, r) {
                (Mode::String, Rhs::Seq(ts)) => rule.extend(ts.iter().map(|t| self.rhs_sexp(t))),
                _ => rule.push(self.rhs_sexp(r)),
            }
            items.push(Sexp::list(rule));
        }
        Sexp::list(items)
    }

    fn rhs_sexp(&self, r: &Rhs) -> Sexp {
        fn a(s: impl Into<String>) -> Sexp {
            Sexp::atom(s)
        }
        match r {
            Rhs::Seq(ts) if ts.len() == 1 => self.rhs_sexp(&ts[0]),
            Rhs::Seq(ts) if ts.is_empty() => Sexp::list(vec![a("eps")]),
            Rhs::Seq(ts) => {
                let mut v = vec![a("seq")];
                v.extend(ts.iter().map(|t| self.rhs_sexp(t)));
                Sexp::list(v)
            }
            Rhs::Out(l) => Sexp::list(vec![a("out"), a(self.output[*l].clone())]),
            Rhs::Param(j) => Sexp::list(vec![a("param"), a((j + 1).to_string())]),
            Rhs::Call { state, child, args } => {
                let mut v = vec![a("call"), a(self.states[*state].clone()), a(format!("x{}", child + 1))];
                v.extend(args.iter().map(|t| self.rhs_sexp(t)));
                Sexp::list(v)
            }
            Rhs::Const(c) => Sexp::list(vec![a("const"), a(c.to_string())]),
            Rhs::Add(ts) => {
                let mut v = vec![a("add")];
                v.extend(ts.iter().map(|t| self.rhs_sexp(t)));
                Sexp::list(v)
            }
            Rhs::Scale(c, t) => Sexp::list(vec![a("mul"), a(c.to_string()), self.rhs_sexp(t)]),
        }
    }

    pub fn from_sexp(s: &Sexp) -> Result<Transducer> {
        let items = s.expect_list("transducer")?;
        if s.head() != Some("transducer") {
            return s.error("expected (transducer ...)");
        }
        let mut mode = None;
        let mut params = 0usize;
        let mut alphabet: Option<RankedAlphabet> = None;
        let mut output: Option<Vec<String>> = None;
        let mut states: Vec<String> = Vec::new();
        let mut init = None;
        let mut rules = Vec::new();
        for it in &items[1..] {
            let parts = it.expect_list("clause")?;
            match it.head() {
                Some("mode") if parts.len() == 2 => {
                    mode = Some(match parts[1].expect_atom("mode")? {
                        "string" => Mode::String,
                        "numeric" | "unary" => Mode::Numeric,
                        _ => return parts[1].error("mode must be `string` or `numeric`"),
                    })
                }
                Some("params") if parts.len() == 2 => {
                    params = match parts[1].expect_atom("parameter count")?.parse() {
                        Ok(p) => p,
                        Err(_) => return parts[1].error("expected a non-negative integer"),
                    }
                }
                Some("alphabet") => alphabet = Some(RankedAlphabet::from_sexp(it)?),
                Some("output") => {
                    let mut v: Vec<String> = Vec::new();
                    for l in &parts[1..] {
                        let name = l.expect_atom("output letter")?;
                        if v.iter().any(|x| x == name) {
                            return l.error(format!("duplicate output letter `{name}`"));
                        }
                        v.push(name.to_string());
                    }
                    output = Some(v);
                }
                Some("states") => {
                    for st in &parts[1..] {
                        let name = st.expect_atom("state")?;
                        if states.iter().any(|x| x == name) {
                            return st.error(format!("duplicate state `{name}`"));
                        }
                        states.push(name.to_string());
                    }
                }
                Some("init") if parts.len() == 2 => init = Some(&parts[1]),
                Some("rule") if parts.len() >= 4 => rules.push(it),
                _ => return it.error("unknown clause in transducer"),
            }
        }
        let Some(mode) = mode else {
            return s.error("missing (mode string|numeric)");
        };
        if mode == Mode::Numeric && output.as_ref().is_some_and(|o| !o.is_empty()) {
            return s.error("numeric transducers take no (output ...) clause");
        }
        let infer_alphabet = alphabet.is_none();
        let mut alphabet = alphabet.unwrap_or_default();
        let infer_output = output.is_none();
        let mut output = output.unwrap_or_default();
        let Some(init) = init else {
            return s.error("missing (init q)");
        };
        let state_of = |x: &Sexp| -> Result<usize> {
            let name = x.expect_atom("state")?;
            match states.iter().position(|s| s == name) {
                Some(i) => Ok(i),
                None => x.error(format!("undeclared state `{name}`")),
            }
        };
        let initial = state_of(init)?;
        let mut parsed = Vec::new();
        for r in rules {
            let parts = r.as_list().unwrap();
            let q = state_of(&parts[1])?;
            let fname = parts[2].expect_atom("symbol")?;
            let vars = parts[3].expect_list("variable list (x1 ... xm)")?;
            for (i, v) in vars.iter().enumerate() {
                if v.as_atom() != Some(format!("x{}", i + 1).as_str()) {
                    return v.error(format!("expected variable x{}", i + 1));
                }
            }
            let f = if infer_alphabet {
                match alphabet.insert(fname, vars.len()) {
                    Ok(f) => f,
                    Err(e) => return parts[2].error(e.to_string()),
                }
            } else {
                match alphabet.lookup(fname) {
                    Some(f) if alphabet.rank(f) == vars.len() => f,
                    Some(f) => {
                        return parts[3].error(format!(
                            "symbol `{fname}` has rank {}",
                            alphabet.rank(f)
                        ))
                    }
                    None => return parts[2].error(format!("unknown symbol `{fname}`")),
                }
            };
            let mut ctx = RhsParser {
                states: &states,
                output: &mut output,
                infer_output,
                mode,
            };
            let body = &parts[4..];
            let rhs = match mode {
                Mode::String => Rhs::Seq(
                    body.iter()
                        .map(|b| ctx.parse(b))
                        .collect::<Result<Vec<_>>>()?,
                ),
                Mode::Numeric => match body.len() {
                    0 => return r.error("numeric rule without a right-hand side"),
                    1 => ctx.parse(&body[0])?,
                    _ => Rhs::Add(body.iter().map(|b| ctx.parse(b)).collect::<Result<Vec<_>>>()?),
                },
            };
            parsed.push((r, q, f, rhs));
        }
        let mut m = Transducer::new(mode, alphabet, output, states.clone(), params, initial)?;
        for (r, q, f, rhs) in parsed {
            if let Err(e) = m.add_rule(q, f, rhs) {
                return r.error(e.to_string());
            }
        }
        Ok(m)
    }

    pub fn parse(text: &str) -> Result<Transducer> {
        Transducer::from_sexp(&sexp::parse_one(text)?)
    }
}

struct RhsParser<'a> {
    states: &'a [String],
    output: &'a mut Vec<String>,
    infer_output: bool,
    mode: Mode,
}

impl RhsParser<'_> {
    fn int(s: &Sexp) -> Result<BigInt> {
        let a = s.expect_atom("integer")?;
        match a.parse::<BigInt>() {
            Ok(c) => Ok(c),
            Err(_) => s.error(format!("`{a}` is not an integer")),
        }
    }

    fn index(s: &Sexp, prefix: char) -> Result<usize> {
        let a = s.expect_atom("index")?;
        let digits = a.strip_prefix(prefix).unwrap_or(a);
        match digits.parse::<usize>() {
            Ok(i) if i >= 1 => Ok(i - 1),
            _ => s.error(format!("expected a 1-based index like {prefix}1")),
        }
    }

    fn parse(&mut self, s: &Sexp) -> Result<Rhs> {
        if let Some(a) = s.as_atom() {
            if let Some(rest) = a.strip_prefix('y') {
                if rest.parse::<usize>().is_ok() {
                    return Ok(Rhs::Param(Self::index(s, 'y')?));
                }
            }
            if self.mode == Mode::Numeric {
                return Ok(Rhs::Const(Self::int(s)?));
            }
            return s.error("expected a list such as (out a), (param 1) or (call q x1)");
        }
        let parts = s.as_list().unwrap();
        let arity = |n: usize| -> Result<()> {
            if parts.len() == n {
                Ok(())
            } else {
                s.error(format!("`{}` takes {} argument(s)", s.head().unwrap_or(""), n - 1))
            }
        };
        match s.head() {
            Some("out") => {
                arity(2)?;
                let name = parts[1].expect_atom("output letter")?;
                match self.output.iter().position(|l| l == name) {
                    Some(i) => Ok(Rhs::Out(i)),
                    None if self.infer_output => {
                        self.output.push(name.to_string());
                        Ok(Rhs::Out(self.output.len() - 1))
                    }
                    None => parts[1].error(format!("undeclared output letter `{name}`")),
                }
            }
            Some("param") => {
                arity(2)?;
                Ok(Rhs::Param(Self::index(&parts[1], 'y')?))
            }
            Some("const") => {
                arity(2)?;
                Ok(Rhs::Const(Self::int(&parts[1])?))
            }
            Some("eps") => {
                arity(1)?;
                Ok(Rhs::eps())
            }
            Some("seq") => Ok(Rhs::Seq(
                parts[1..].iter().map(|p| self.parse(p)).collect::<Result<_>>()?,
            )),
            Some("add") => Ok(Rhs::Add(
                parts[1..].iter().map(|p| self.parse(p)).collect::<Result<_>>()?,
            )),
            Some("mul") => {
                arity(3)?;
                Ok(Rhs::Scale(Self::int(&parts[1])?, Box::new(self.parse(&parts[2])?)))
            }
            Some("call") => {
                if parts.len() < 3 {
                    return s.error("expected (call q xi args...)");
                }
                let name = parts[1].expect_atom("state")?;
                let Some(state) = self.states.iter().position(|q| q == name) else {
                    return parts[1].error(format!("undeclared state `{name}`"));
                };
                let child = Self::index(&parts[2], 'x')?;
                let args = parts[3..].iter().map(|p| self.parse(p)).collect::<Result<_>>()?;
                Ok(Rhs::Call { state, child, args })
            }
            _ => s.error("unknown right-hand side form"),
        }
    }
}

impl fmt::Display for Transducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.to_sexp();
        let items = s.as_list().unwrap();
        writeln!(f, "(transducer")?;
        for it in &items[1..] {
            writeln!(f, "  {it}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests;
