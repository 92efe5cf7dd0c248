use num_rational::BigRational;

use super::*;

const G: MonomialOrder = MonomialOrder::Grlex;

fn space() -> VariableSpace {
    VariableSpace::named(["x", "y", "z"])
}

fn p(s: &str) -> Polynomial {
    Polynomial::parse(s, &space(), G).unwrap()
}

fn gb(gens: &[&str]) -> GroebnerBasis {
    let v: Vec<Polynomial> = gens.iter().map(|s| p(s)).collect();
    buchberger(&v, 3, G)
}

fn show(b: &GroebnerBasis) -> Vec<String> {
    b.gens().iter().map(|g| g.display(&space()).to_string()).collect()
}

fn r(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

#[test]
fn text_round_trip() {
    let vars = VariableSpace::semantic(2, 1, 2);
    let f = Polynomial::parse("3/2*z[1,0]^2*x[2,1,1] - x[1,0,0] + 7", &vars, G).unwrap();
    assert_eq!(f.display(&vars).to_string(), "3/2*z[1,0]^2*x[2,1,1] - x[1,0,0] + 7");
    assert_eq!(Polynomial::parse(&f.display(&vars).to_string(), &vars, G).unwrap(), f);
    assert_eq!(vars.lookup("x[2,1,1]"), Some(2 * 4 + 3));
    assert!(Polynomial::parse("w + 1", &vars, G).is_err());
}

#[test]
fn grlex_order() {
    // degree first, then x > y > z
    let mut v = vec![p("z^2"), p("x"), p("x*y"), p("y^3"), p("1"), p("x^2")];
    v.sort_by(|a, b| G.cmp(a.leading_monomial().unwrap(), b.leading_monomial().unwrap()));
    let s: Vec<String> = v.iter().map(|f| f.display(&space()).to_string()).collect();
    assert_eq!(s, ["1", "x", "z^2", "x*y", "x^2", "y^3"]);
}

#[test]
fn normal_forms() {
    let g = gb(&["x"]);
    assert_eq!(g.normal_form(&p("x^2 + y")), p("y"));
    let f = p("x*y^2 + 3*z - x");
    let once = g.normal_form(&f);
    assert_eq!(g.normal_form(&once), once);
    assert!(g.contains(&p("x*y*z - 2*x")));
}

#[test]
fn textbook_basis() {
    let b = gb(&["x^2 - y", "x^3 - x"]);
    assert_eq!(show(&b), ["y^2 - y", "x*y - x", "x^2 - y"]);
    assert!(b.is_groebner());
    assert!(b.contains(&p("x^2 - y")) && b.contains(&p("x^3 - x")));
}

#[test]
fn trivial_bases() {
    assert_eq!(show(&gb(&["x - 1", "y - 2"])), ["y - 2", "x - 1"]);
    assert!(gb(&["x*y - 1", "3"]).is_unit());
    assert!(gb(&[]).is_zero_ideal());
    assert!(gb(&["x^2", "x*y + 1", "y"]).is_unit());
}

#[test]
fn membership() {
    let i = gb(&["x^2 + y", "y*z - 1"]);
    assert!(i.contains(&Polynomial::zero(3, G)));
    assert!(i.contains(&p("x").mul(&p("x^2 + y")).add(&p("y").mul(&p("y*z - 1")))));
    assert!(!gb(&["x^2"]).contains(&p("x")));
}

#[test]
fn sums_of_ideals() {
    let i = gb(&["x^2 - y"]);
    assert_eq!(ideal_sum(&i, &GroebnerBasis::zero_ideal(3, G)), i);
    assert_eq!(show(&ideal_sum(&gb(&["x"]), &gb(&["y"]))), ["y", "x"]);
}

#[test]
fn elimination() {
    // variable 0 is kept, variable 1 eliminated
    let vars = VariableSpace::named(["z", "x"]);
    let q = |s: &str| Polynomial::parse(s, &vars, G).unwrap();
    assert!(eliminate(&[q("x - z")], 1).is_zero_ideal());
    let e = eliminate(&[q("x"), q("z - 1")], 1);
    assert_eq!(e.gens().len(), 1);
    assert_eq!(e.gens()[0].display(&VariableSpace::named(["z"])).to_string(), "z - 1");
    let e = eliminate(&[q("z - x^2"), q("x - 1")], 1);
    assert_eq!(e.gens()[0].display(&VariableSpace::named(["z"])).to_string(), "z - 1");
}

#[test]
fn truncation() {
    let i = gb(&["x - y", "z^2"]);
    assert_eq!(degree_truncate(&i, 2), i);
    assert!(degree_truncate(&gb(&["x^3"]), 2).is_zero_ideal());
    let once = degree_truncate(&gb(&["x - y", "z^3 - x"]), 1);
    assert_eq!(degree_truncate(&once, 1), once);
}

#[test]
fn intersections_and_points() {
    let pts = vec![vec![r(0), r(1), r(2)], vec![r(1), r(1), r(0)], vec![r(2), r(-1), r(3)]];
    let a = vanishing_ideal(&pts, 3);
    let b = vanishing_ideal_by_intersection(&pts, 3);
    assert!(a.is_groebner());
    assert_eq!(a, b);
    for g in a.gens() {
        for pt in &pts {
            assert_eq!(g.eval(pt), r(0));
        }
    }
    assert!(vanishing_ideal(&[], 3).is_unit());
    let single = vanishing_ideal(&[vec![r(2), r(0), r(5)]], 3);
    assert_eq!(show(&single), ["z - 5", "y", "x - 2"]);
    let i = intersect(&gb(&["x"]), &gb(&["y"]));
    assert_eq!(show(&i), ["x*y"]);
}

#[test]
fn cofactors_reconstruct_input() {
    let gens = vec![p("x^2 - y"), p("x*y - 1")];
    let f = p("x^3*y + 2*x*y^2 - z");
    let (q, rem) = normal_form_with_cofactors(&f, &gens);
    let mut back = rem.clone();
    for (qi, gi) in q.iter().zip(&gens) {
        back = back.add(&qi.mul(gi));
    }
    assert_eq!(back, f);
}

#[test]
fn substitution_and_renaming() {
    let f = p("x*y + 2");
    let images = [p("y + 1"), p("y"), p("z")];
    assert_eq!(f.substitute(&images), p("y^2 + y + 2"));
    let c = p("5");
    assert_eq!(c.substitute(&images), c);
    let vars = VariableSpace::semantic(2, 0, 2);
    let z = Polynomial::parse("z[0,0] - z[1,0]", &VariableSpace::semantic(2, 0, 0), G).unwrap();
    let ideal = buchberger(&[z], 2, G);
    let renamed = ideal.rename(&[2, 3], vars.len());
    assert!(renamed.contains(&Polynomial::parse("x[1,0,0] - x[1,1,0]", &vars, G).unwrap()));
}
