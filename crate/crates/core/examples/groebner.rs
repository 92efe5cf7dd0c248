//! Polynomial ideals: Buchberger's algorithm, reduction and the ideal of
//! polynomials vanishing on a finite point set.

use num_bigint::BigInt;
use num_rational::BigRational;
use treequiv::error::Result;
use treequiv::poly::{buchberger, normal_form_with_cofactors, vanishing_ideal, MonomialOrder, Polynomial, VariableSpace};

fn main() -> Result<()> {
    let vars = VariableSpace::named(["x", "y"]);
    let order = MonomialOrder::Grlex;
    let f = Polynomial::parse("x^2*y - 1", &vars, order)?;
    let g = Polynomial::parse("x*y^2 - x", &vars, order)?;
    let gb = buchberger(&[f.clone(), g.clone()], 2, order);
    println!("basis:");
    for p in gb.gens() {
        println!("  {}", p.display(&vars));
    }

    let h = Polynomial::parse("x^3*y^2 + y", &vars, order)?;
    let (q, r) = normal_form_with_cofactors(&h, &[f, g]);
    println!("{} = ({})*f + ({})*g + {}", h.display(&vars), q[0].display(&vars), q[1].display(&vars), r.display(&vars));
    println!("member of the ideal: {}", gb.contains(&h));

    let pt = |a: i64, b: i64| vec![BigRational::from(BigInt::from(a)), BigRational::from(BigInt::from(b))];
    let ideal = vanishing_ideal(&[pt(0, 0), pt(1, 1), pt(2, 4)], 2);
    println!("vanishing on (0,0), (1,1), (2,4):");
    for p in ideal.gens() {
        println!("  {}", p.display(&vars));
    }
    Ok(())
}
