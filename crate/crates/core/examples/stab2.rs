use qsatake::quantalg::make_uq;
use qsatake::rootdata::{LatticeSpec, RootDatum};
use std::rc::Rc;
use std::time::Instant;

fn main() {
    for maxdeg in [12usize, 14] {
        let datum = Rc::new(RootDatum::build("B3", &LatticeSpec::WeightLattice).unwrap());
        let t0 = Instant::now();
        let mut pres = make_uq(datum);
        pres.complete_serre(maxdeg);
        let unresolved: Vec<usize> = pres
            .rewrite
            .confluence
            .iter()
            .filter(|(_, s)| matches!(s, qsatake::quantalg::ConfluenceStatus::Unresolved))
            .map(|(d, _)| *d)
            .collect();
        println!(
            "B3 maxdeg={maxdeg} stable={} unresolved={:?} rules={} ({:.1?})",
            pres.rewrite.stable,
            unresolved,
            pres.rewrite.rule_count(),
            t0.elapsed()
        );
    }
}
