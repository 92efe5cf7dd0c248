//! The full check on a pair of string transducers over a ternary symbol:
//! domains, binary encoding, numeric encoding and a replayable certificate.

use treequiv::error::Result;
use treequiv::format::{read_certificate, write_certificate, write_verdict};
use treequiv::pipeline::{check, verify_certificate, Interpretation, Options, Verdict};
use treequiv::transducer::Transducer;

fn main() -> Result<()> {
    let m = Transducer::parse(include_str!("../data/intro_m.tdx"))?;
    let m2 = Transducer::parse(include_str!("../data/intro_m_prime.tdx"))?;
    let v = check(&Interpretation::Exact, &m, &m2, None, &Options::default())?;
    print!("{}", write_verdict(&v, "exact"));
    if let Verdict::Equivalent(cert) = v {
        let text = write_certificate(&cert);
        println!("certificate: {} lines", text.lines().count());
        let back = read_certificate(&text)?;
        println!("replayed: {:?}", verify_certificate(&back, &Interpretation::Exact, &m, &m2, None)?);
        println!("against the wrong pair: {:?}", verify_certificate(&back, &Interpretation::Exact, &m, &m, None)?);
    }
    Ok(())
}
