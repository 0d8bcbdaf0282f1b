//! Shipped catalog of validated Satake diagrams of rank at most 3, together
//! with the real-form names they encode and known-good certificate bounds.
//!
//! The catalog is the source of truth for the CLI `catalog` command and for
//! the verification suites that sweep every shipped diagram. Each entry
//! records the bounds (completion degree, separating-set parameters, span
//! degree and K-band) at which the coideal and star certificates are known
//! to close; the bounds are frozen so that reports stay byte-identical.

use std::rc::Rc;

use crate::qsympair::{coideal_generators, CoidealPresentation, QsymError};
use crate::quantalg::{make_uq, Presentation};
use crate::repnlab::{separating_set_greedy, SeparatingSet};
use crate::rootdata::{LatticeSpec, RootDataError, RootDatum, SatakeDiagram};

/// Frozen verification bounds for one diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    /// Serre completion degree.
    pub maxdeg: usize,
    /// Separating-set degree, K-band and weight height for the
    /// `Ad(T_{w_X})` lifts.
    pub sep_degree: usize,
    pub sep_kband: i64,
    pub sep_height: i64,
    /// Monomial-span degree and K-band for the membership certificates.
    pub span_degree: usize,
    pub span_kband: i64,
}

/// One shipped Satake diagram with its real-form bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    /// Root datum kind, e.g. `"B2"` or `"A1xA1"`.
    pub kind: &'static str,
    pub rank: usize,
    /// Painted nodes, 0-indexed.
    pub x_set: &'static [usize],
    /// Whether tau is the order-reversing diagram involution (else identity).
    pub tau_rev: bool,
    /// Real form encoded by the diagram.
    pub realform: &'static str,
    /// Fixed-point subalgebra of the Cartan involution.
    pub compact_subgroup: &'static str,
    /// Compact form containing it.
    pub compact_form: &'static str,
    pub bounds: Bounds,
}

const fn bounds(
    maxdeg: usize,
    sep_degree: usize,
    sep_kband: i64,
    sep_height: i64,
    span_degree: usize,
    span_kband: i64,
) -> Bounds {
    Bounds { maxdeg, sep_degree, sep_kband, sep_height, span_degree, span_kband }
}

/// Every Satake diagram of rank at most 3 over the supported series, one
/// entry per (kind, X, tau) orbit that passes the three diagram axioms.
pub const CATALOG: &[Fixture] = &[
    Fixture {
        kind: "A1", rank: 1, x_set: &[], tau_rev: false,
        realform: "sl(2,R)", compact_subgroup: "so(2)", compact_form: "su(2)",
        bounds: bounds(6, 2, 0, 2, 2, 1),
    },
    Fixture {
        kind: "A1", rank: 1, x_set: &[0], tau_rev: false,
        realform: "su(2)", compact_subgroup: "su(2)", compact_form: "su(2)",
        bounds: bounds(6, 2, 0, 2, 2, 2),
    },
    Fixture {
        kind: "A1xA1", rank: 2, x_set: &[], tau_rev: true,
        realform: "sl(2,C)", compact_subgroup: "su(2)",
        compact_form: "su(2) \u{2295} su(2)",
        bounds: bounds(6, 2, 0, 2, 2, 2),
    },
    Fixture {
        kind: "A2", rank: 2, x_set: &[], tau_rev: false,
        realform: "sl(3,R)", compact_subgroup: "so(3)", compact_form: "su(3)",
        bounds: bounds(6, 2, 0, 2, 2, 1),
    },
    Fixture {
        kind: "A2", rank: 2, x_set: &[], tau_rev: true,
        realform: "su(2,1)", compact_subgroup: "s(u(2)+u(1))",
        compact_form: "su(3)",
        bounds: bounds(6, 2, 0, 2, 2, 3),
    },
    Fixture {
        kind: "A2", rank: 2, x_set: &[0, 1], tau_rev: true,
        realform: "su(3)", compact_subgroup: "su(3)", compact_form: "su(3)",
        bounds: bounds(6, 2, 0, 2, 2, 2),
    },
    Fixture {
        kind: "B2", rank: 2, x_set: &[], tau_rev: false,
        realform: "so(2,3)", compact_subgroup: "so(2)+so(3)",
        compact_form: "so(5)",
        bounds: bounds(6, 2, 0, 2, 2, 1),
    },
    Fixture {
        kind: "B2", rank: 2, x_set: &[1], tau_rev: false,
        realform: "so(1,4)", compact_subgroup: "so(4)", compact_form: "so(5)",
        bounds: bounds(8, 3, 0, 3, 3, 2),
    },
    Fixture {
        kind: "B2", rank: 2, x_set: &[0, 1], tau_rev: false,
        realform: "so(5)", compact_subgroup: "so(5)", compact_form: "so(5)",
        bounds: bounds(6, 2, 0, 2, 2, 2),
    },
    Fixture {
        kind: "C2", rank: 2, x_set: &[], tau_rev: false,
        realform: "sp(4,R)", compact_subgroup: "u(2)", compact_form: "sp(2)",
        bounds: bounds(6, 2, 0, 2, 2, 1),
    },
    Fixture {
        kind: "C2", rank: 2, x_set: &[0], tau_rev: false,
        realform: "sp(1,1)", compact_subgroup: "sp(1)+sp(1)",
        compact_form: "sp(2)",
        bounds: bounds(8, 3, 0, 3, 3, 2),
    },
    Fixture {
        kind: "C2", rank: 2, x_set: &[0, 1], tau_rev: false,
        realform: "sp(2)", compact_subgroup: "sp(2)", compact_form: "sp(2)",
        bounds: bounds(6, 2, 0, 2, 2, 2),
    },
    Fixture {
        kind: "G2", rank: 2, x_set: &[], tau_rev: false,
        realform: "g2(2)", compact_subgroup: "su(2)+su(2)",
        compact_form: "g2",
        bounds: bounds(6, 2, 0, 2, 2, 1),
    },
    Fixture {
        kind: "G2", rank: 2, x_set: &[0, 1], tau_rev: false,
        realform: "g2", compact_subgroup: "g2", compact_form: "g2",
        bounds: bounds(6, 2, 0, 2, 2, 3),
    },
    Fixture {
        kind: "A3", rank: 3, x_set: &[], tau_rev: false,
        realform: "sl(4,R)", compact_subgroup: "so(4)", compact_form: "su(4)",
        bounds: bounds(6, 2, 0, 2, 2, 1),
    },
    Fixture {
        kind: "A3", rank: 3, x_set: &[], tau_rev: true,
        realform: "su(2,2)", compact_subgroup: "s(u(2)+u(2))",
        compact_form: "su(4)",
        bounds: bounds(6, 2, 0, 2, 2, 2),
    },
    Fixture {
        kind: "A3", rank: 3, x_set: &[1], tau_rev: true,
        realform: "su(1,3)", compact_subgroup: "s(u(1)+u(3))",
        compact_form: "su(4)",
        bounds: bounds(8, 2, 0, 3, 4, 2),
    },
    Fixture {
        kind: "A3", rank: 3, x_set: &[0, 2], tau_rev: false,
        realform: "sl(2,H)", compact_subgroup: "sp(2)", compact_form: "su(4)",
        bounds: bounds(8, 3, 0, 3, 3, 2),
    },
    Fixture {
        kind: "A3", rank: 3, x_set: &[0, 1, 2], tau_rev: true,
        realform: "su(4)", compact_subgroup: "su(4)", compact_form: "su(4)",
        bounds: bounds(6, 2, 0, 2, 2, 2),
    },
    Fixture {
        kind: "B3", rank: 3, x_set: &[], tau_rev: false,
        realform: "so(3,4)", compact_subgroup: "so(3)+so(4)",
        compact_form: "so(7)",
        bounds: bounds(6, 2, 0, 2, 2, 1),
    },
    Fixture {
        kind: "B3", rank: 3, x_set: &[2], tau_rev: false,
        realform: "so(2,5)", compact_subgroup: "so(2)+so(5)",
        compact_form: "so(7)",
        bounds: bounds(10, 3, 0, 2, 3, 2),
    },
    Fixture {
        kind: "B3", rank: 3, x_set: &[1, 2], tau_rev: false,
        realform: "so(1,6)", compact_subgroup: "so(6)", compact_form: "so(7)",
        bounds: bounds(12, 5, 0, 2, 2, 3),
    },
    Fixture {
        kind: "B3", rank: 3, x_set: &[0, 1, 2], tau_rev: false,
        realform: "so(7)", compact_subgroup: "so(7)", compact_form: "so(7)",
        bounds: bounds(6, 2, 0, 2, 2, 2),
    },
    Fixture {
        kind: "C3", rank: 3, x_set: &[], tau_rev: false,
        realform: "sp(6,R)", compact_subgroup: "u(3)", compact_form: "sp(3)",
        bounds: bounds(6, 2, 0, 2, 2, 1),
    },
    Fixture {
        kind: "C3", rank: 3, x_set: &[0, 2], tau_rev: false,
        realform: "sp(1,2)", compact_subgroup: "sp(1)+sp(2)",
        compact_form: "sp(3)",
        bounds: bounds(10, 3, 0, 2, 3, 3),
    },
    Fixture {
        kind: "C3", rank: 3, x_set: &[0, 1, 2], tau_rev: false,
        realform: "sp(3)", compact_subgroup: "sp(3)", compact_form: "sp(3)",
        bounds: bounds(6, 2, 0, 2, 2, 2),
    },
];

/// Diagrams over the same series that fail at least one Satake axiom;
/// negative fixtures for the validator.
pub const REJECTED: &[(&str, &[usize], bool)] = &[
    ("A2", &[0, 1], false),
    ("B2", &[0], false),
    ("C2", &[1], false),
    ("G2", &[0], false),
    ("G2", &[1], false),
    ("A3", &[0, 2], true),
    ("B3", &[0], false),
    ("C3", &[0], false),
    ("C3", &[1], false),
];

/// Catalog entry matching the given diagram data, if any.
pub fn lookup(kind: &str, x_set: &[usize], tau: &[usize]) -> Option<&'static Fixture> {
    CATALOG
        .iter()
        .find(|f| f.kind == kind && f.x_set == x_set && f.tau() == tau)
}

impl Fixture {
    /// The involution as a full permutation of node indices.
    pub fn tau(&self) -> Vec<usize> {
        if self.tau_rev {
            (0..self.rank).rev().collect()
        } else {
            (0..self.rank).collect()
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.kind.contains('x')
    }

    pub fn datum(&self) -> Result<Rc<RootDatum>, RootDataError> {
        Ok(Rc::new(RootDatum::build(self.kind, &LatticeSpec::WeightLattice)?))
    }

    pub fn diagram(&self) -> Result<SatakeDiagram, RootDataError> {
        SatakeDiagram::new(self.datum()?, self.x_set.to_vec(), self.tau())
    }

    /// Completed presentation and diagram at the frozen bounds.
    pub fn presentation(&self) -> Result<(Presentation, SatakeDiagram), RootDataError> {
        let datum = self.datum()?;
        let mut pres = make_uq(datum.clone());
        pres.complete_serre(self.bounds.maxdeg);
        let diagram = SatakeDiagram::new(datum, self.x_set.to_vec(), self.tau())?;
        Ok((pres, diagram))
    }

    /// Coideal presentation at the frozen bounds.
    pub fn coideal(
        &self,
        pres: &Presentation,
        diagram: &SatakeDiagram,
    ) -> Result<(SeparatingSet, CoidealPresentation), QsymError> {
        let b = &self.bounds;
        let sep = separating_set_greedy(pres, b.sep_degree, b.sep_kband, b.sep_height)?;
        let cp = coideal_generators(pres, diagram, &sep)?;
        Ok((sep, cp))
    }

    /// Painted-node display, 1-indexed: `∅` or `{2}`.
    pub fn x_display(&self) -> String {
        if self.x_set.is_empty() {
            "\u{2205}".to_string()
        } else {
            let inner: Vec<String> = self.x_set.iter().map(|i| (i + 1).to_string()).collect();
            format!("{{{}}}", inner.join(","))
        }
    }

    /// Involution display: `id` or a product of transpositions like `(1 3)`.
    pub fn tau_display(&self) -> String {
        let tau = self.tau();
        let mut cycles = Vec::new();
        for i in 0..self.rank {
            if tau[i] > i {
                cycles.push(format!("({} {})", i + 1, tau[i] + 1));
            }
        }
        if cycles.is_empty() {
            "id".to_string()
        } else {
            cycles.concat()
        }
    }

    /// One catalog line, e.g. `A1 X=∅ τ=id : sl(2,R) / so(2) ⊆ su(2)`.
    pub fn display(&self) -> String {
        format!(
            "{} X={} \u{3c4}={} : {} / {} \u{2286} {}",
            self.kind,
            self.x_display(),
            self.tau_display(),
            self.realform,
            self.compact_subgroup,
            self.compact_form,
        )
    }

    /// Spec-file text accepted by the CLI for this diagram.
    pub fn spec_text(&self) -> String {
        let (series, rank) = if self.is_diagonal() {
            ("A1xA1", 2)
        } else {
            (&self.kind[..1], self.rank)
        };
        let mut out = String::new();
        out.push_str(&format!("# {}\n", self.display()));
        out.push_str(&format!("type = {series}\n"));
        out.push_str(&format!("rank = {rank}\n"));
        if !self.x_set.is_empty() {
            let inner: Vec<String> = self.x_set.iter().map(|i| (i + 1).to_string()).collect();
            out.push_str(&format!("X = [{}]\n", inner.join(",")));
        }
        let tau = self.tau();
        let pairs: Vec<String> = (0..self.rank)
            .filter(|i| tau[*i] > *i)
            .map(|i| format!("({},{})", i + 1, tau[i] + 1))
            .collect();
        if !pairs.is_empty() {
            out.push_str(&format!("tau = [{}]\n", pairs.join(",")));
        }
        out.push_str("lattice = P\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::validate_satake;

    #[test]
    fn every_catalog_entry_validates() {
        for fx in CATALOG {
            let datum = fx.datum().unwrap();
            assert_eq!(datum.rank, fx.rank, "{}", fx.kind);
            let report = validate_satake(&datum, fx.x_set, &fx.tau());
            assert!(report.pass(), "{}\n{report}", fx.display());
            let diagram = fx.diagram().unwrap();
            assert_eq!(diagram.z.len(), fx.rank);
        }
    }

    #[test]
    fn rejected_entries_fail_an_axiom() {
        for (kind, x_set, rev) in REJECTED {
            let datum =
                Rc::new(RootDatum::build(kind, &LatticeSpec::WeightLattice).unwrap());
            let tau: Vec<usize> = if *rev {
                (0..datum.rank).rev().collect()
            } else {
                (0..datum.rank).collect()
            };
            let report = validate_satake(&datum, x_set, &tau);
            assert!(!report.pass(), "{kind} X={x_set:?} rev={rev}");
        }
    }

    #[test]
    fn catalog_covers_all_valid_rank_le_3_diagrams() {
        // exhaustive sweep over the simple kinds: subsets of nodes crossed
        // with both involutions; the diagonal entry is shipped separately
        let kinds = ["A1", "A2", "A3", "B2", "B3", "C2", "C3", "G2"];
        let mut found = Vec::new();
        for kind in kinds {
            let datum = Rc::new(RootDatum::build(kind, &LatticeSpec::WeightLattice).unwrap());
            let rank = datum.rank;
            for mask in 0u32..(1 << rank) {
                let x: Vec<usize> = (0..rank).filter(|i| mask >> i & 1 == 1).collect();
                for rev in [false, true] {
                    let tau: Vec<usize> = if rev {
                        (0..rank).rev().collect()
                    } else {
                        (0..rank).collect()
                    };
                    if tau.iter().enumerate().all(|(i, t)| *t == i) && rev {
                        continue;
                    }
                    if validate_satake(&datum, &x, &tau).pass() {
                        found.push((kind.to_string(), x.clone(), rev));
                    }
                }
            }
        }
        let catalog: Vec<(String, Vec<usize>, bool)> = CATALOG
            .iter()
            .filter(|f| !f.is_diagonal())
            .map(|f| (f.kind.to_string(), f.x_set.to_vec(), f.tau_rev))
            .collect();
        for item in &found {
            assert!(catalog.contains(item), "missing from catalog: {item:?}");
        }
        for item in &catalog {
            assert!(found.contains(item), "catalog entry does not validate: {item:?}");
        }
    }

    #[test]
    fn display_formats_are_frozen() {
        assert_eq!(
            CATALOG[0].display(),
            "A1 X=\u{2205} \u{3c4}=id : sl(2,R) / so(2) \u{2286} su(2)"
        );
        let diag = CATALOG.iter().find(|f| f.is_diagonal()).unwrap();
        assert_eq!(
            diag.display(),
            "A1xA1 X=\u{2205} \u{3c4}=(1 2) : sl(2,C) / su(2) \u{2286} su(2) \u{2295} su(2)"
        );
        let su13 = CATALOG.iter().find(|f| f.realform == "su(1,3)").unwrap();
        assert_eq!(su13.x_display(), "{2}");
        assert_eq!(su13.tau_display(), "(1 3)");
        assert!(su13.spec_text().contains("X = [2]"));
        assert!(su13.spec_text().contains("tau = [(1,3)]"));
    }
}
