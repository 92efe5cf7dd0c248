//! Polynomial invariants for nested parameter use: the counterexample and
//! invariant passes are alternated for growing degree bounds.

use treequiv::dtta::Dtta;
use treequiv::error::Result;
use treequiv::invariant::{check_certificate, decide, invariant_pass, DecideOptions, EngineVerdict};
use treequiv::system::{UnarySystem, VectorSystem};
use treequiv::transducer::Transducer;

fn main() -> Result<()> {
    let square = Transducer::parse(include_str!("../data/square.tdx"))?;
    let counted = Transducer::parse(include_str!("../data/square_counted.tdx"))?;
    let (sys, targets) = UnarySystem::pair(&square, &counted)?;
    let aut = Dtta::universal(sys.alphabet());
    println!("multi-affine: {}", sys.multi_affine());

    let linear = invariant_pass(&sys, &aut, 1)?;
    println!("degree 1 proves it: {}", linear.contains_targets(aut.initial(), &targets));

    match decide(&sys, &aut, &targets, &DecideOptions::default())? {
        EngineVerdict::Equivalent(inv) => {
            println!("equivalent with invariants of degree {}", inv.degree);
            let vars = sys.variables(0);
            for (p, ideal) in inv.ideals.iter().enumerate() {
                println!("state {}:\n{}", aut.state_name(p), ideal.display(&vars));
            }
            println!("certificate check: {:?}", check_certificate(&sys, &aut, &targets, &inv)?);
        }
        EngineVerdict::NotEquivalent(t) => println!("differ on {}", t.display(sys.alphabet())),
        EngineVerdict::Unknown(why) => println!("unknown: {why}"),
    }
    Ok(())
}
