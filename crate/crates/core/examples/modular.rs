//! Randomised screening: the affine closure is run modulo random primes large
//! enough that a difference on a witness cannot vanish for all of them.

use treequiv::affine::{bit_bound, decide_modular, ModularOptions, ModularVerdict};
use treequiv::dtta::Dtta;
use treequiv::error::Result;
use treequiv::system::{UnarySystem, VectorSystem};
use treequiv::transducer::Transducer;

fn main() -> Result<()> {
    let m1 = Transducer::parse(include_str!("../data/product.tdx"))?;
    let m3 = Transducer::parse(include_str!("../data/product_plus_one.tdx"))?;
    let aut = Dtta::parse(include_str!("../data/product.dtta"), None)?;
    let (sys, targets) = UnarySystem::pair(&m1, &m3)?;

    for depth in [1, 2, 3] {
        println!(
            "outputs on trees of depth {depth} fit in {} bits",
            bit_bound(m1.size(), m1.input().max_rank(), &m1.h(), depth)
        );
    }
    for seed in 0..3 {
        let opts = ModularOptions { trials: 4, seed, bound_bits: 64 };
        match decide_modular(&sys, &aut, &targets, &opts)? {
            ModularVerdict::NotEquivalent { prime, witness } => {
                println!("seed {seed}: separated modulo {prime} on {}", witness.display(sys.alphabet()))
            }
            ModularVerdict::ProbablyEquivalent { primes } => println!("seed {seed}: no difference modulo {primes:?}"),
        }
    }
    Ok(())
}
