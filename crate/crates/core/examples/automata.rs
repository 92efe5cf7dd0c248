//! Deterministic top-down tree automata: membership, enumeration by depth,
//! products, equivalence and the checker for binary encodings.

use treequiv::dtta::{bin_checker, difference_witness, dtta_equiv, Dtta};
use treequiv::error::Result;
use treequiv::tree::{bin_encode, Tree};

fn main() -> Result<()> {
    let aut = Dtta::parse(include_str!("../data/product.dtta"), None)?;
    let alph = aut.alphabet().clone();
    println!("{aut}");

    for d in 1..=4 {
        println!("depth <= {d}: {} accepted trees", aut.enumerate_dom(aut.initial(), d).len());
    }
    for t in aut.enumerate_dom(aut.initial(), 3) {
        println!("  {}", t.display(&alph));
    }

    let t = Tree::parse("(f (a (e)) (f (e) (e)))", &alph)?;
    println!("accepts {}: {}", t.display(&alph), aut.accepts(aut.initial(), &t)?);

    let all = Dtta::universal(&alph);
    println!("same language as the universal automaton: {}", dtta_equiv(&aut, &all)?);
    if let Some((w, in_first)) = difference_witness(&all, &aut)? {
        println!("separating tree {} (in the first: {in_first})", w.display(&alph));
    }
    let both = aut.product(&all)?;
    println!("product has {} states, equivalent to the first: {}", both.num_states(), dtta_equiv(&both, &aut)?);

    // sequences of trees over f/3 encoded as binary trees
    let wide = treequiv::tree::RankedAlphabet::new([("f", 3), ("e", 0)])?;
    let (_, bot) = wide.binary()?;
    let checker = bin_checker(&wide)?;
    let leaf = Tree::parse("(e)", &wide)?;
    let tree = Tree::parse("(f (e) (e) (e))", &wide)?;
    let enc = bin_encode(std::slice::from_ref(&tree), bot);
    println!("checker accepts a single encoded tree: {}", checker.accepts(checker.initial(), &enc)?);
    let pair = bin_encode(&[leaf.clone(), leaf], bot);
    println!("checker accepts an encoded pair: {}", checker.accepts(checker.initial(), &pair)?);
    Ok(())
}
