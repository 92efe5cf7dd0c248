//! Line-oriented `key: value` records for verdicts and certificates.
//!
//! A certificate lists, per part, the system states, the automaton states
//! and under each automaton state the generators of its ideal:
//!
//! ```text
//! treequiv-certificate 1
//! interpretation: exact
//! binarized: false
//! part: main
//! engine: affine
//! degree: 1
//! width: 2
//! system-state: 1:q0
//! system-state: 2:r0
//! automaton-state: p0
//! generator: z[0,0] - z[1,0]
//! end-part
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::invariant::InvariantMap;
use crate::pipeline::{Cause, Certificate, CertificatePart, Verdict};
use crate::poly::{buchberger, MonomialOrder, Polynomial, VariableSpace};

const MAGIC: &str = "treequiv-certificate 1";

fn variables(part: &CertificatePart) -> VariableSpace {
    VariableSpace::semantic(part.system_states.len(), part.width.saturating_sub(1), 0)
}

pub fn write_certificate(cert: &Certificate) -> String {
    let mut s = String::new();
    writeln!(s, "{MAGIC}").unwrap();
    writeln!(s, "interpretation: {}", cert.interpretation).unwrap();
    writeln!(s, "binarized: {}", cert.binarized).unwrap();
    for part in &cert.parts {
        let vars = variables(part);
        writeln!(s, "part: {}", part.label).unwrap();
        writeln!(s, "engine: {}", part.engine).unwrap();
        writeln!(s, "degree: {}", part.invariant.degree).unwrap();
        writeln!(s, "width: {}", part.width).unwrap();
        for q in &part.system_states {
            writeln!(s, "system-state: {q}").unwrap();
        }
        for (p, ideal) in part.automaton_states.iter().zip(&part.invariant.ideals) {
            writeln!(s, "automaton-state: {p}").unwrap();
            for g in ideal.gens() {
                writeln!(s, "generator: {}", g.display(&vars)).unwrap();
            }
        }
        writeln!(s, "end-part").unwrap();
    }
    s
}

fn bad<T>(line: usize, msg: impl std::fmt::Display) -> Result<T> {
    Err(Error::Certificate(format!("line {line}: {msg}")))
}

struct PartBuilder {
    label: String,
    engine: Option<String>,
    degree: Option<u32>,
    width: Option<usize>,
    system_states: Vec<String>,
    automaton_states: Vec<String>,
    generators: Vec<Vec<(usize, String)>>,
}

impl PartBuilder {
    fn finish(self, line: usize) -> Result<CertificatePart> {
        let Some(width) = self.width.filter(|&w| w > 0) else {
            return bad(line, "part without a positive width");
        };
        if self.system_states.is_empty() {
            return bad(line, "part without system states");
        }
        let vars = VariableSpace::semantic(self.system_states.len(), width - 1, 0);
        let n = vars.len();
        let mut ideals = Vec::new();
        for gens in &self.generators {
            let polys = gens
                .iter()
                .map(|(l, text)| {
                    Polynomial::parse(text, &vars, MonomialOrder::Grlex)
                        .or_else(|e| bad(*l, format!("bad generator: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            ideals.push(buchberger(&polys, n, MonomialOrder::Grlex));
        }
        Ok(CertificatePart {
            label: self.label,
            engine: self.engine.unwrap_or_default(),
            automaton_states: self.automaton_states,
            system_states: self.system_states,
            width,
            invariant: InvariantMap {
                ideals,
                degree: self.degree.unwrap_or(0),
            },
        })
    }
}

/// Reads a certificate. Generators are re-normalised into reduced bases,
/// so a certificate need not list them in canonical form.
pub fn read_certificate(text: &str) -> Result<Certificate> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    match lines.next() {
        Some((_, l)) if l == MAGIC => {}
        _ => return bad(1, format!("expected `{MAGIC}`")),
    }
    let mut interpretation = None;
    let mut binarized = None;
    let mut parts = Vec::new();
    let mut cur: Option<PartBuilder> = None;
    for (ln, line) in lines {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "end-part" {
            match cur.take() {
                Some(p) => parts.push(p.finish(ln)?),
                None => return bad(ln, "`end-part` outside a part"),
            }
            continue;
        }
        let Some((key, value)) = line.split_once(": ") else {
            return bad(ln, "expected `key: value`");
        };
        let value = value.trim().to_string();
        match (key, cur.as_mut()) {
            ("interpretation", None) => interpretation = Some(value),
            ("binarized", None) => {
                binarized = Some(match value.as_str() {
                    "true" => true,
                    "false" => false,
                    _ => return bad(ln, "expected true or false"),
                })
            }
            ("part", None) => {
                cur = Some(PartBuilder {
                    label: value,
                    engine: None,
                    degree: None,
                    width: None,
                    system_states: Vec::new(),
                    automaton_states: Vec::new(),
                    generators: Vec::new(),
                })
            }
            ("engine", Some(p)) => p.engine = Some(value),
            ("degree", Some(p)) => p.degree = Some(value.parse().or_else(|_| bad(ln, "bad degree"))?),
            ("width", Some(p)) => p.width = Some(value.parse().or_else(|_| bad(ln, "bad width"))?),
            ("system-state", Some(p)) => p.system_states.push(value),
            ("automaton-state", Some(p)) => {
                p.automaton_states.push(value);
                p.generators.push(Vec::new());
            }
            ("generator", Some(p)) => match p.generators.last_mut() {
                Some(g) => g.push((ln, value)),
                None => return bad(ln, "generator before any automaton state"),
            },
            (k, _) => return bad(ln, format!("unexpected key `{k}`")),
        }
    }
    if cur.is_some() {
        return bad(text.lines().count(), "unterminated part");
    }
    Ok(Certificate {
        interpretation: interpretation.ok_or_else(|| Error::Certificate("missing interpretation".into()))?,
        binarized: binarized.ok_or_else(|| Error::Certificate("missing binarized flag".into()))?,
        parts,
    })
}

/// The verdict record printed by `check`.
pub fn write_verdict(v: &Verdict, interpretation: &str) -> String {
    let mut s = String::new();
    writeln!(s, "verdict: {}", v.tag()).unwrap();
    writeln!(s, "interpretation: {interpretation}").unwrap();
    match v {
        Verdict::Equivalent(c) => {
            writeln!(s, "binarized: {}", c.binarized).unwrap();
            for p in &c.parts {
                writeln!(s, "part: {} engine={} degree={}", p.label, p.engine, p.invariant.degree).unwrap();
            }
        }
        Verdict::NotEquivalent(cx) => {
            let cause = match cx.cause {
                Cause::Domain => "domain",
                Cause::Output => "output",
            };
            writeln!(s, "cause: {cause}").unwrap();
            writeln!(s, "witness: {}", cx.tree.display(&cx.alphabet)).unwrap();
            writeln!(s, "output-1: {}", cx.outputs[0]).unwrap();
            writeln!(s, "output-2: {}", cx.outputs[1]).unwrap();
            if let Some(p) = cx.prime {
                writeln!(s, "prime: {p}").unwrap();
            }
        }
        Verdict::Unknown(why) => writeln!(s, "reason: {why}").unwrap(),
    }
    s
}
