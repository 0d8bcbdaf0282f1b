use qsatake::fixtures;
use qsatake::qsympair::*;
use qsatake::quantalg::make_uq;
use qsatake::repnlab::separating_set_greedy;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let maxdeg: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(12);
    let fx = fixtures::CATALOG
        .iter()
        .find(|f| f.realform == "so(1,6)")
        .unwrap();
    let datum = fx.datum().unwrap();
    let diagram = fx.diagram().unwrap();
    let t0 = Instant::now();
    let mut pres = make_uq(datum);
    pres.complete_serre(maxdeg);
    println!(
        "completion maxdeg={} stable={} degree={} rules={} ({:.1?})",
        maxdeg,
        pres.rewrite.stable,
        pres.rewrite.completion_degree,
        pres.rewrite.confluence.len(),
        t0.elapsed()
    );
    let t0 = Instant::now();
    let sep = separating_set_greedy(&pres, fx.bounds.sep_degree, fx.bounds.sep_kband, fx.bounds.sep_height).unwrap();
    let cp = coideal_generators(&pres, &diagram, &sep).unwrap();
    println!("gens ({:.1?}) sep_cert={}", t0.elapsed(), sep.certified);
    for &(d, kband) in &[(4usize, 2i64), (4, 3)] {
        let t0 = Instant::now();
        let span = match monomial_span(&pres, &cp, d, kband) {
            Ok(s) => s,
            Err(e) => {
                println!("span({},{}) ERR {:?}", d, kband, e);
                continue;
            }
        };
        println!("span({},{}) {} words ({:.1?})", d, kband, span.elems.len(), t0.elapsed());
        let t0 = Instant::now();
        for (tag, rep) in [
            ("coideal", check_left_coideal(&pres, &cp, &span)),
            ("star", check_star_closed(&pres, &cp, &span)),
        ] {
            match rep {
                Ok(r) => {
                    for c in &r.checks {
                        for (leg, m) in &c.legs {
                            if !m.is_certified() {
                                println!("  {} FAIL {} leg={:?}", tag, c.generator, leg);
                            }
                        }
                    }
                    println!("  {} pass={} ({:.1?})", tag, r.pass(), t0.elapsed());
                }
                Err(e) => println!("  {} ERR {:?}", tag, e),
            }
        }
    }
}
