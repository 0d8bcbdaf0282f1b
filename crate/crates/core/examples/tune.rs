use std::time::Instant;

use qsatake::fixtures::CATALOG;
use qsatake::qsympair::{check_left_coideal, check_star_closed, monomial_span};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let filter = args.get(1).cloned().unwrap_or_default();
    for fx in CATALOG {
        let name = fx.display();
        if !filter.is_empty() && !name.contains(&filter) {
            continue;
        }
        let t0 = Instant::now();
        let (pres, diagram) = fx.presentation().unwrap();
        let t1 = Instant::now();
        let (sep, cp) = match fx.coideal(&pres, &diagram) {
            Ok(v) => v,
            Err(e) => {
                println!("{name}: COIDEAL ERR {e:?} (complete {:?})", t1 - t0);
                continue;
            }
        };
        let t2 = Instant::now();
        let span = match monomial_span(&pres, &cp, fx.bounds.span_degree, fx.bounds.span_kband) {
            Ok(s) => s,
            Err(e) => {
                println!("{name}: SPAN ERR {e:?}");
                continue;
            }
        };
        let t3 = Instant::now();
        let co = check_left_coideal(&pres, &cp, &span).unwrap();
        let st = check_star_closed(&pres, &cp, &span).unwrap();
        let t4 = Instant::now();
        println!(
            "{name}: sep_cert={} coideal={} star={} | complete {:.1?} gens {:.1?} span({} ,{}) {:.1?} checks {:.1?}",
            sep.certified,
            co.pass(),
            st.pass(),
            t1 - t0,
            t2 - t1,
            fx.bounds.span_degree,
            fx.bounds.span_kband,
            t3 - t2,
            t4 - t3,
        );
    }
}
