//! Running transducers: string outputs, the numeric encoding of strings,
//! syntactic classes and the move to binary input trees.

use treequiv::error::Result;
use treequiv::transducer::{word_to_string, Transducer};
use treequiv::tree::Tree;

fn main() -> Result<()> {
    let m = Transducer::parse(include_str!("../data/intro_m.tdx"))?;
    println!("{}", m.classify());
    let t = Tree::parse("(f (e) (f (e) (e) (e)) (e))", m.input())?;
    let w = m.translate_string(&t)?.expect("total");
    println!("{} -> {}", t.display(m.input()), word_to_string(m.output(), &w));

    // strings over s letters become numbers in base s+1
    let u = m.unarize()?;
    println!("as a number: {}", u.translate_unary(&t)?.expect("total"));

    let b = m.binarize()?;
    let enc = b.encode(&t);
    let w2 = b.transducer.translate_string(&enc)?.expect("encoded trees are in the domain");
    println!("on the encoding {}: {}", enc.display(b.transducer.input()), word_to_string(m.output(), &w2));

    let product = Transducer::parse(include_str!("../data/product.tdx"))?;
    let t = Tree::parse("(f (a (a (e))) (a (a (a (e)))))", product.input())?;
    println!("{}", product.classify());
    println!("product of 2 and 3: {}", product.translate_unary(&t)?.expect("total"));
    println!("size {}, largest constant {}", product.size(), product.h());
    Ok(())
}
