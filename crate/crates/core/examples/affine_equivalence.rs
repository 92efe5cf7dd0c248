//! Exact equivalence for systems that are affine in every argument: the
//! affine hull of reachable semantic vectors is computed per automaton state.

use treequiv::affine::{decide_affine, AffineVerdict};
use treequiv::dtta::Dtta;
use treequiv::error::Result;
use treequiv::system::{UnarySystem, VectorSystem};
use treequiv::transducer::Transducer;

fn show(v: Option<num_rational::BigRational>) -> String {
    v.map_or("undefined".into(), |x| x.to_string())
}

fn main() -> Result<()> {
    let m1 = Transducer::parse(include_str!("../data/product.tdx"))?;
    let m2 = Transducer::parse(include_str!("../data/product_swapped.tdx"))?;
    let m3 = Transducer::parse(include_str!("../data/product_plus_one.tdx"))?;
    let aut = Dtta::parse(include_str!("../data/product.dtta"), None)?;

    for (name, other) in [("swapped", &m2), ("plus one", &m3)] {
        let (sys, targets) = UnarySystem::pair(&m1, other)?;
        println!("{name}: dimension {}, multi-affine {}", sys.dim(), sys.multi_affine());
        match decide_affine(&sys, &aut, &targets)? {
            AffineVerdict::Equivalent(closure) => {
                for (p, b) in closure.bases.iter().enumerate() {
                    println!("  hull at {}: dimension {:?}", aut.state_name(p), b.dimension());
                }
                println!("  equivalent after {} insertions", closure.insertions);
            }
            AffineVerdict::NotEquivalent(t) => {
                println!(
                    "  differ on {}: {} vs {}",
                    t.display(sys.alphabet()),
                    show(m1.translate_unary(&t)?),
                    show(other.translate_unary(&t)?)
                );
            }
        }
    }
    Ok(())
}
