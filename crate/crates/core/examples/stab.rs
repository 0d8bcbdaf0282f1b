use qsatake::quantalg::make_uq;
use qsatake::rootdata::{LatticeSpec, RootDatum};
use std::rc::Rc;
use std::time::Instant;

fn main() {
    for kind in ["A1", "A1xA1", "A2", "B2", "G2", "A3", "B3", "C3"] {
        for maxdeg in [6usize, 8, 10, 12] {
            let datum = Rc::new(RootDatum::build(kind, &LatticeSpec::WeightLattice).unwrap());
            let t0 = Instant::now();
            let mut pres = make_uq(datum);
            pres.complete_serre(maxdeg);
            let unresolved = pres
                .rewrite
                .confluence
                .iter()
                .filter(|(_, s)| matches!(s, qsatake::quantalg::ConfluenceStatus::Unresolved))
                .count();
            println!(
                "{kind} maxdeg={maxdeg} stable={} unresolved={} ({:.1?})",
                pres.rewrite.stable,
                unresolved,
                t0.elapsed()
            );
            if pres.rewrite.stable && unresolved == 0 {
                break;
            }
        }
    }
}
