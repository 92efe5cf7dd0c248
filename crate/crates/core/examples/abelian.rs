//! Weaker readings of the output: letter counts only, or images under a
//! user-supplied map from letters to integer matrices.

use treequiv::error::Result;
use treequiv::group::Alpha;
use treequiv::pipeline::{check, Interpretation, Options};
use treequiv::transducer::Transducer;

fn transducer(rule: &str) -> Result<Transducer> {
    Transducer::parse(&format!(
        "(transducer (mode string) (alphabet (f 2) (e 0)) (output a b) (states q) (init q) {rule} (rule q e () (out a)))"
    ))
}

fn main() -> Result<()> {
    let ab = transducer("(rule q f (x1 x2) (out a) (call q x1) (out b) (call q x2))")?;
    let ba = transducer("(rule q f (x1 x2) (out b) (call q x1) (out a) (call q x2))")?;
    let aab = transducer("(rule q f (x1 x2) (out a) (out a) (call q x1) (out b) (call q x2))")?;
    // shears commute, so they only see letter counts
    let shears = Alpha::parse("(matrices (a (1 1) (0 1)) (b (1 2) (0 1)))")?;

    let readings = [
        Interpretation::Exact,
        Interpretation::Abelian,
        Interpretation::Matrix(shears),
    ];
    for interp in &readings {
        for (name, other) in [("ba", &ba), ("aab", &aab)] {
            let v = check(interp, &ab, other, None, &Options::default())?;
            println!("ab vs {name} under {}: {}", interp.name(), v.tag());
        }
    }
    Ok(())
}
