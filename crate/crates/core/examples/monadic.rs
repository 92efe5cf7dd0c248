//! Monadic inputs: target polynomials are pulled back along unary symbols
//! until they stabilise or fail at a leaf.

use treequiv::dtta::Dtta;
use treequiv::error::Result;
use treequiv::invariant::{monadic_decide, EngineVerdict};
use treequiv::system::{UnarySystem, VectorSystem};
use treequiv::transducer::Transducer;

const DOUBLE: &str = "(transducer (mode numeric) (params 1) (alphabet (a 1) (e 0)) (states s) (init s)
  (rule s a (x1) (add (const 2) (call s x1 (const 0))))
  (rule s e () (const 0)))";

fn show(v: Option<num_rational::BigRational>) -> String {
    v.map_or("undefined".into(), |x| x.to_string())
}

fn main() -> Result<()> {
    let square = Transducer::parse(include_str!("../data/square.tdx"))?;
    let counted = Transducer::parse(include_str!("../data/square_counted.tdx"))?;
    let double = Transducer::parse(DOUBLE)?;

    for (name, other) in [("counted square", &counted), ("doubling", &double)] {
        let (sys, targets) = UnarySystem::pair(&square, other)?;
        let aut = Dtta::universal(sys.alphabet());
        match monadic_decide(&sys, &aut, &targets, 1000)? {
            EngineVerdict::Equivalent(inv) => println!("{name}: equivalent, degree {}", inv.degree),
            EngineVerdict::NotEquivalent(t) => println!(
                "{name}: differ on {} ({} vs {})",
                t.display(sys.alphabet()),
                show(square.translate_unary(&t)?),
                show(other.translate_unary(&t)?)
            ),
            EngineVerdict::Unknown(why) => println!("{name}: unknown, {why}"),
        }
    }
    Ok(())
}
