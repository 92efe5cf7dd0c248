//! Outputs read as elements of free groups: words are reduced, mapped to
//! integer matrices, and compared through the matrix entries.

use treequiv::error::Result;
use treequiv::format::write_verdict;
use treequiv::group::{f1_encode, reduce_word, sanov, GroupWord};
use treequiv::pipeline::{check, Interpretation, Options};
use treequiv::transducer::Transducer;

fn pair(first: &str, second: &str) -> Result<(Transducer, Transducer)> {
    let t = |body: &str| {
        Transducer::parse(&format!(
            "(transducer (mode string) (alphabet (f 2) (e 0)) (output a a- b b-) (states q) (init q) {body} (rule q e () (out b)))"
        ))
    };
    Ok((t(first)?, t(second)?))
}

fn main() -> Result<()> {
    let w = GroupWord::parse("a b b- a- a a b")?;
    println!("{w} reduces to {}", reduce_word(&w));
    println!("image {:?}", sanov(&w).0);
    println!("a a- a a counts to {}", f1_encode(&GroupWord::parse("a a- a a")?)?);

    let (ab, padded) = pair(
        "(rule q f (x1 x2) (out a) (call q x1) (out b) (call q x2))",
        "(rule q f (x1 x2) (out a) (out b) (out b-) (call q x1) (out b) (call q x2) (out a) (out a-))",
    )?;
    let (_, ba) = pair("", "(rule q f (x1 x2) (out b) (call q x1) (out a) (call q x2))")?;
    for (name, other) in [("padded", &padded), ("swapped", &ba)] {
        for interp in [Interpretation::F2, Interpretation::Exact] {
            let v = check(&interp, &ab, other, None, &Options::default())?;
            println!("{name} under {}:\n{}", interp.name(), write_verdict(&v, interp.name()));
        }
    }
    Ok(())
}
