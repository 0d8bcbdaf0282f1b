//! Batch front end: parse a diagram spec file, run selected verification
//! suites, emit a deterministic JSON report.
//!
//! Exit codes: 0 all checks pass, 1 some check fails, 2 some check is
//! undecided at the configured bounds, 3 usage/parse errors, 4 internal
//! computation errors.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::exit;
use std::rc::Rc;

use clap::{Parser, Subcommand};
use serde::Serialize;

use qsatake::cqgdual::{peter_weyl_rank, AElem, CoeffAlgebra, Label};
use qsatake::doublecoid::{
    build_dk_module, dbl_equal, dbl_from_b, dbl_from_u, dbl_multiply, dbl_one, dbl_star,
    dk_compat_witness, i_monomials, verify_dk_compat, DblElem,
};
use qsatake::exactq::Scalar;
use qsatake::fixtures;
use qsatake::linalg::Mat;
use qsatake::qsympair::{
    check_left_coideal, check_star_closed, coideal_generators, monomial_span, spherical_dims,
    CoidealPresentation, GenLabel, QsymError,
};
use qsatake::quantalg::{
    complete_rules, make_uq, AlgElem, ConfluenceStatus, Gen, Presentation, QuantAlgError,
    upper_graded_dim,
};
use qsatake::repnlab::{braid_t, build_irrep, check_star_rep, evaluate, separating_set_greedy};
use qsatake::rootdata::{
    qw, qw_to_iw, validate_satake, IWeight, LatticeSpec, RootDatum, SatakeDiagram,
};

const SUITES: &[&str] = &[
    "satake", "serre", "hopf", "reps", "braid", "coideal", "star", "spherical", "dual", "haar",
    "double", "dkmodule",
];

/// Suites that stay affordable on higher-rank diagrams.
const LIGHT_SUITES: &[&str] = &[
    "satake", "serre", "hopf", "reps", "braid", "coideal", "star", "spherical",
];

#[derive(Parser)]
#[command(name = "qsatake", version, about = "Verification suites for quantum symmetric pairs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a diagram spec file and run verification suites
    Verify {
        /// Path to the key = value diagram spec
        spec: PathBuf,
        /// Comma-separated suite subset (default depends on rank)
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the truncation height
        #[arg(long)]
        height: Option<i64>,
        /// Override the certificate degree
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Print the shipped catalog of validated Satake diagrams
    Catalog,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            exit(code);
        }
    };
    match cli.cmd {
        Cmd::Catalog => {
            for fx in fixtures::CATALOG {
                println!("{}", fx.display());
            }
        }
        Cmd::Verify { spec, suite, out, height, degree } => {
            let text = match std::fs::read_to_string(&spec) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("{}: {e}", spec.display());
                    exit(3);
                }
            };
            let mut file = match parse_spec(&text) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("{}:{}:{}: {}", spec.display(), e.line, e.col, e.msg);
                    exit(3);
                }
            };
            if let Some(h) = height {
                file.height = h;
            }
            if let Some(d) = degree {
                file.degree = d;
            }
            if file.height < 0 || file.degree == 0 || file.maxdeg < 2 {
                eprintln!("{}: bounds must be positive", spec.display());
                exit(3);
            }
            let suites: Vec<String> = if suite.is_empty() {
                default_suites(&file)
            } else {
                for s in &suite {
                    if !SUITES.contains(&s.as_str()) {
                        eprintln!("unknown suite `{s}`");
                        exit(3);
                    }
                }
                let mut ordered: Vec<String> = SUITES
                    .iter()
                    .filter(|s| suite.iter().any(|x| x == *s))
                    .map(|s| s.to_string())
                    .collect();
                ordered.dedup();
                ordered
            };
            let code = run(&file, &suites, out.as_deref());
            exit(code);
        }
    }
}

// ---------------------------------------------------------------------------
// Spec file parsing
// ---------------------------------------------------------------------------

struct ParseError {
    line: usize,
    col: usize,
    msg: String,
}

struct SpecFile {
    kind: String,
    rank: usize,
    /// 0-indexed painted nodes.
    x_set: Vec<usize>,
    /// Full permutation of node indices.
    tau: Vec<usize>,
    lattice: LatticeSpec,
    lattice_raw: String,
    height: i64,
    degree: usize,
    maxdeg: usize,
    q0: Vec<f64>,
    precision: f64,
    /// Index of a Serre relation whose leading coefficient gets scaled by
    /// 1 + q, to exercise the failure path.
    perturb_serre: Option<usize>,
}

fn default_suites(file: &SpecFile) -> Vec<String> {
    let heavy = file.rank == 1 || file.kind.contains('x');
    let list: &[&str] = if heavy { SUITES } else { LIGHT_SUITES };
    list.iter().map(|s| s.to_string()).collect()
}

fn parse_spec(text: &str) -> Result<SpecFile, ParseError> {
    let mut series: Option<String> = None;
    let mut rank: Option<usize> = None;
    let mut x_raw: Option<(Vec<usize>, usize, usize)> = None;
    let mut tau_raw: Option<(Vec<(usize, usize)>, usize, usize)> = None;
    let mut lattice_raw: Option<String> = None;
    let mut lattice = LatticeSpec::WeightLattice;
    let mut height = 2i64;
    let mut degree = 4usize;
    let mut maxdeg = 8usize;
    let mut q0 = vec![0.3, 0.5, 0.8];
    let mut precision = 1e-9;
    let mut perturb_serre = None;

    for (li, raw) in text.lines().enumerate() {
        let line_no = li + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let eq = line.find('=').ok_or(ParseError {
            line: line_no,
            col: line.len(),
            msg: "syntax error: expected `key = value`".into(),
        })?;
        let key = line[..eq].trim();
        let val = line[eq + 1..].trim();
        let vcol = eq + 2 + (line[eq + 1..].len() - line[eq + 1..].trim_start().len());
        let err = |msg: &str| ParseError { line: line_no, col: vcol, msg: msg.into() };
        if val.is_empty() {
            return Err(err("syntax error: missing value"));
        }
        match key {
            "type" => series = Some(val.to_string()),
            "rank" => {
                rank = Some(val.parse().map_err(|_| err("syntax error: rank must be an integer"))?)
            }
            "X" => {
                let items = parse_int_list(val).ok_or_else(|| {
                    err("syntax error: X must be a list like [1,3]")
                })?;
                x_raw = Some((items, line_no, vcol));
            }
            "tau" => {
                let pairs = parse_pair_list(val).ok_or_else(|| {
                    err("syntax error: tau must be a list of pairs like [(1,3)]")
                })?;
                tau_raw = Some((pairs, line_no, vcol));
            }
            "lattice" => {
                lattice_raw = Some(val.to_string());
                lattice = match val {
                    "Q" => LatticeSpec::RootLattice,
                    "P" => LatticeSpec::WeightLattice,
                    rows => {
                        let rows = parse_rows(rows).ok_or_else(|| {
                            err("syntax error: lattice must be Q, P or rows like [[1,-1]]")
                        })?;
                        LatticeSpec::Generators(rows)
                    }
                };
            }
            "height" => {
                height =
                    val.parse().map_err(|_| err("syntax error: height must be an integer"))?
            }
            "degree" => {
                degree =
                    val.parse().map_err(|_| err("syntax error: degree must be an integer"))?
            }
            "maxdeg" => {
                maxdeg =
                    val.parse().map_err(|_| err("syntax error: maxdeg must be an integer"))?
            }
            "q0" => {
                q0 = parse_float_list(val)
                    .ok_or_else(|| err("syntax error: q0 must be a list like [0.3,0.5]"))?;
                if q0.iter().any(|x| !(*x > 0.0 && *x < 1.0)) {
                    return Err(err("q0 samples must lie in (0,1)"));
                }
            }
            "precision" => {
                precision =
                    val.parse().map_err(|_| err("syntax error: precision must be a float"))?
            }
            "perturb" => {
                let rest = val.strip_prefix("serre:").ok_or_else(|| {
                    err("syntax error: perturb must be serre:<index>")
                })?;
                perturb_serre = Some(
                    rest.parse().map_err(|_| err("syntax error: perturb must be serre:<index>"))?,
                );
            }
            other => {
                return Err(ParseError {
                    line: line_no,
                    col: 1,
                    msg: format!("unknown key `{other}`"),
                })
            }
        }
    }

    let series = series.ok_or(ParseError { line: 1, col: 1, msg: "missing key `type`".into() })?;
    // a bare series letter takes the rank from the `rank` key; full kinds
    // like G2 or A1xA1 carry their own
    let (kind, rank) = if series.len() == 1 {
        let r = rank.ok_or(ParseError { line: 1, col: 1, msg: "missing key `rank`".into() })?;
        (format!("{series}{r}"), r)
    } else {
        let r: usize = series
            .split('x')
            .map(|p| p[1..].parse::<usize>().unwrap_or(0))
            .sum();
        if let Some(decl) = rank {
            if decl != r {
                return Err(ParseError {
                    line: 1,
                    col: 1,
                    msg: format!("rank {decl} does not match type {series}"),
                });
            }
        }
        (series, r)
    };
    if rank == 0 {
        return Err(ParseError { line: 1, col: 1, msg: format!("unsupported type/rank: {kind}") });
    }

    let mut x_set = Vec::new();
    if let Some((items, line, col)) = x_raw {
        for i in items {
            if i == 0 || i > rank {
                return Err(ParseError { line, col, msg: "X index out of range".into() });
            }
            x_set.push(i - 1);
        }
        x_set.sort();
        x_set.dedup();
    }
    let mut tau: Vec<usize> = (0..rank).collect();
    if let Some((pairs, line, col)) = tau_raw {
        for (a, b) in pairs {
            if a == 0 || a > rank || b == 0 || b > rank {
                return Err(ParseError { line, col, msg: "tau index out of range".into() });
            }
            tau[a - 1] = b - 1;
            tau[b - 1] = a - 1;
        }
    }

    Ok(SpecFile {
        kind,
        rank,
        x_set,
        tau,
        lattice,
        lattice_raw: lattice_raw.unwrap_or_else(|| "P".to_string()),
        height,
        degree,
        maxdeg,
        q0,
        precision,
        perturb_serre,
    })
}

fn parse_int_list(s: &str) -> Option<Vec<usize>> {
    let inner = s.strip_prefix('[')?.strip_suffix(']')?.trim();
    if inner.is_empty() {
        return Some(Vec::new());
    }
    inner.split(',').map(|p| p.trim().parse().ok()).collect()
}

fn parse_float_list(s: &str) -> Option<Vec<f64>> {
    let inner = s.strip_prefix('[')?.strip_suffix(']')?.trim();
    if inner.is_empty() {
        return None;
    }
    inner.split(',').map(|p| p.trim().parse().ok()).collect()
}

fn parse_pair_list(s: &str) -> Option<Vec<(usize, usize)>> {
    let inner = s.strip_prefix('[')?.strip_suffix(']')?.trim();
    if inner.is_empty() {
        return Some(Vec::new());
    }
    let mut out = Vec::new();
    let mut rest = inner;
    loop {
        rest = rest.trim_start_matches(',').trim();
        if rest.is_empty() {
            return Some(out);
        }
        let close = rest.find(')')?;
        let pair = rest[..close].strip_prefix('(')?;
        let mut it = pair.split(',');
        let a = it.next()?.trim().parse().ok()?;
        let b = it.next()?.trim().parse().ok()?;
        if it.next().is_some() {
            return None;
        }
        out.push((a, b));
        rest = &rest[close + 1..];
    }
}

fn parse_rows(s: &str) -> Option<Vec<IWeight>> {
    let inner = s.strip_prefix('[')?.strip_suffix(']')?.trim();
    let mut out = Vec::new();
    let mut rest = inner;
    loop {
        rest = rest.trim_start_matches(',').trim();
        if rest.is_empty() {
            return if out.is_empty() { None } else { Some(out) };
        }
        let close = rest.find(']')?;
        let row = rest[..close].strip_prefix('[')?;
        let coords: Option<IWeight> = row.split(',').map(|p| p.trim().parse().ok()).collect();
        out.push(coords?);
        rest = &rest[close + 1..];
    }
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct Report {
    input: InputEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    derived: Option<Derived>,
    checks: Vec<Check>,
    tables: Tables,
}

#[derive(Serialize)]
struct InputEcho {
    #[serde(rename = "type")]
    kind: String,
    rank: usize,
    /// 1-indexed painted nodes.
    #[serde(rename = "X")]
    x_set: Vec<usize>,
    /// 1-indexed transpositions.
    tau: Vec<(usize, usize)>,
    lattice: String,
    height: i64,
    degree: usize,
    maxdeg: usize,
    q0: Vec<f64>,
    precision: f64,
    suites: Vec<String>,
}

#[derive(Serialize)]
struct Derived {
    theta: Vec<Vec<i64>>,
    z: Vec<i64>,
    #[serde(rename = "wX")]
    wx: Vec<usize>,
    #[serde(rename = "L")]
    l: i64,
}

#[derive(Serialize)]
struct Check {
    name: String,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<serde_json::Value>,
}

impl Check {
    fn new(name: &str, ok: bool) -> Check {
        Check {
            name: name.to_string(),
            status: if ok { "pass" } else { "fail" },
            witness: None,
            certificate: None,
        }
    }

    fn undecided(name: &str, witness: String) -> Check {
        Check { name: name.to_string(), status: "undecided", witness: Some(witness), certificate: None }
    }

    fn witness(mut self, w: String) -> Check {
        self.witness = Some(w);
        self
    }
}

#[derive(Serialize, Default)]
struct Tables {
    #[serde(skip_serializing_if = "Option::is_none")]
    spherical_dims: Option<BTreeMap<String, usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    peter_weyl_rank: Option<usize>,
}

// ---------------------------------------------------------------------------
// Suite runner
// ---------------------------------------------------------------------------

struct RunError(String);

struct Ctx {
    file_height: i64,
    file_degree: usize,
    precision: f64,
    q0: Vec<f64>,
    perturb_serre: Option<usize>,
    pres: Presentation,
    diagram: SatakeDiagram,
    cp: Option<CoidealPresentation>,
    fixture: Option<&'static fixtures::Fixture>,
}

impl Ctx {
    /// Coideal presentation, built once; separating-set bounds come from the
    /// catalog when the diagram is shipped, else from the lift weights.
    fn coideal(&mut self) -> Result<&CoidealPresentation, RunError> {
        if self.cp.is_none() {
            let (sep_d, sep_kband, sep_h) = match self.fixture {
                Some(fx) => (fx.bounds.sep_degree, fx.bounds.sep_kband, fx.bounds.sep_height),
                None => (self.lift_degree(), 0, self.diagram.base.rank.max(2) as i64),
            };
            let sep = separating_set_greedy(&self.pres, sep_d, sep_kband, sep_h)
                .map_err(|e| RunError(format!("separating set: {e:?}")))?;
            let cp = coideal_generators(&self.pres, &self.diagram, &sep)
                .map_err(|e| RunError(format!("coideal generators: {e:?}")))?;
            self.cp = Some(cp);
        }
        Ok(self.cp.as_ref().unwrap())
    }

    /// Height of `w_X(alpha_{tau(r)})` over the unpainted nodes bounds the
    /// F-word degree of the lift ansatz.
    fn lift_degree(&self) -> usize {
        let datum = &self.diagram.base;
        let mut d = 2usize;
        for r in 0..datum.rank {
            if self.diagram.x_set.contains(&r) {
                continue;
            }
            let img = datum
                .weyl_act(&self.diagram.wx_word, &qw(&datum.alpha(self.diagram.tau[r])))
                .expect("wx word acts");
            let coords = datum.to_root_coords(&img);
            let h: i64 = coords
                .iter()
                .map(|c| c.to_integer().try_into().unwrap_or(0i64))
                .sum();
            d = d.max(h.unsigned_abs() as usize);
        }
        d
    }

    fn span_kband(&self) -> i64 {
        self.fixture.map(|fx| fx.bounds.span_kband).unwrap_or(2)
    }
}

fn run(file: &SpecFile, suites: &[String], out: Option<&std::path::Path>) -> i32 {
    let datum = match RootDatum::build(&file.kind, &file.lattice) {
        Ok(d) => Rc::new(d),
        Err(e) => {
            eprintln!("unsupported type/rank: {e}");
            return 3;
        }
    };

    let mut checks: Vec<Check> = Vec::new();
    let mut tables = Tables::default();

    let axiom_report = validate_satake(&datum, &file.x_set, &file.tau);
    if suites.iter().any(|s| s == "satake") {
        for (name, ok, detail) in &axiom_report.checks {
            let mut c = Check::new(&format!("satake-{name}"), *ok);
            if !ok {
                c = c.witness(detail.clone());
            }
            checks.push(c);
        }
    }
    let input = InputEcho {
        kind: file.kind.clone(),
        rank: file.rank,
        x_set: file.x_set.iter().map(|i| i + 1).collect(),
        tau: (0..file.rank).filter(|i| file.tau[*i] > *i).map(|i| (i + 1, file.tau[i] + 1)).collect(),
        lattice: file.lattice_raw.clone(),
        height: file.height,
        degree: file.degree,
        maxdeg: file.maxdeg,
        q0: file.q0.clone(),
        precision: file.precision,
        suites: suites.to_vec(),
    };
    if !axiom_report.pass() {
        let report = Report { input, derived: None, checks, tables };
        return emit(&report, out, 1);
    }

    let diagram = SatakeDiagram::new(datum.clone(), file.x_set.clone(), file.tau.clone())
        .expect("axioms verified");
    let derived = Derived {
        theta: diagram.theta.clone(),
        z: diagram.z.clone(),
        wx: diagram.wx_word.iter().map(|r| r + 1).collect(),
        l: datum.root_order,
    };

    let mut pres = make_uq(datum.clone());
    pres.complete_serre(file.maxdeg);
    let fixture = fixtures::lookup(&file.kind, &file.x_set, &file.tau);
    let mut ctx = Ctx {
        file_height: file.height,
        file_degree: file.degree,
        precision: file.precision,
        q0: file.q0.clone(),
        perturb_serre: file.perturb_serre,
        pres,
        diagram,
        cp: None,
        fixture,
    };

    for suite in suites {
        let result = match suite.as_str() {
            "satake" => Ok(Vec::new()), // handled above
            "serre" => suite_serre(&ctx),
            "hopf" => suite_hopf(&ctx),
            "reps" => suite_reps(&ctx),
            "braid" => suite_braid(&ctx),
            "coideal" => suite_coideal(&mut ctx),
            "star" => suite_star(&mut ctx),
            "spherical" => suite_spherical(&mut ctx, &mut tables),
            "dual" => suite_dual(&ctx, &mut tables),
            "haar" => suite_haar(&ctx),
            "double" => suite_double(&mut ctx),
            "dkmodule" => suite_dkmodule(&mut ctx),
            _ => unreachable!("suite names validated"),
        };
        match result {
            Ok(cs) => checks.extend(cs),
            Err(RunError(msg)) => {
                eprintln!("suite {suite}: {msg}");
                return 4;
            }
        }
    }

    let any_fail = checks.iter().any(|c| c.status == "fail");
    let any_undecided = checks.iter().any(|c| c.status == "undecided");
    let code = if any_fail { 1 } else if any_undecided { 2 } else { 0 };
    let report = Report { input, derived: Some(derived), checks, tables };
    emit(&report, out, code)
}

fn emit(report: &Report, out: Option<&std::path::Path>, code: i32) -> i32 {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("{}: {e}", path.display());
                return 4;
            }
        }
        None => print!("{text}"),
    }
    code
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

fn suite_serre(ctx: &Ctx) -> Result<Vec<Check>, RunError> {
    let pres = &ctx.pres;
    let mut checks = Vec::new();

    // completion status over the requested degree window
    let rewrite = &pres.rewrite;
    let unresolved: Vec<usize> = rewrite
        .confluence
        .iter()
        .filter(|(_, st)| *st == ConfluenceStatus::Unresolved)
        .map(|(d, _)| *d)
        .collect();
    let ok = rewrite.stable && unresolved.is_empty();
    let mut c = Check::new("serre-completion-confluent", ok);
    if !ok {
        c = c.witness(format!("unresolved critical pairs at degrees {unresolved:?}"));
    }
    checks.push(c);

    // graded dimension of U+ against the Kostant partition count
    let rank = pres.datum.rank;
    let maxd = rewrite.completion_degree.min(4);
    let mut ok = true;
    let mut witness = None;
    for deg in 1..=maxd {
        let mut count = 0u64;
        let mut word = vec![0usize; deg];
        loop {
            if rewrite.is_irreducible(&word) {
                count += 1;
            }
            let mut pos = deg;
            while pos > 0 {
                word[pos - 1] += 1;
                if word[pos - 1] < rank {
                    break;
                }
                word[pos - 1] = 0;
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
        }
        let expected = upper_graded_dim(&pres.datum, deg);
        if count != expected {
            ok = false;
            witness = Some(format!("degree {deg}: {count} irreducible words, expected {expected}"));
            break;
        }
    }
    let mut c = Check::new("serre-graded-dimension", ok);
    if let Some(w) = witness {
        c = c.witness(w);
    }
    checks.push(c);

    if let Some(k) = ctx.perturb_serre {
        checks.push(perturbed_serre_check(pres, k)?);
    }
    Ok(checks)
}

/// Rerun bounded completion with one Serre coefficient scaled by `1 + q`;
/// the perturbed ideal is no longer confluent and the check reports the
/// first critical-pair degree that fails to resolve.
fn perturbed_serre_check(pres: &Presentation, k: usize) -> Result<Check, RunError> {
    if k >= pres.serre_relations.len() {
        return Err(RunError(format!("perturb index {k} out of range")));
    }
    let mut rel = pres.serre_relations[k].clone();
    let first = rel.terms.keys().next().cloned();
    if let Some(w) = first {
        let c = rel.terms[&w].clone();
        let scaled = &c * &(&Scalar::one() + &Scalar::q_pow(1, 1));
        rel.terms.insert(w, scaled);
    }
    // orient every E-family relation deg-lex, swapping in the perturbed one
    let mut initial: Vec<(Vec<usize>, Vec<(Vec<usize>, Scalar)>)> = Vec::new();
    for (i, r) in pres.serre_relations.iter().enumerate() {
        let r = if i == k { &rel } else { r };
        let terms: Vec<(Vec<usize>, Scalar)> = r
            .terms
            .iter()
            .filter_map(|(w, c)| {
                let idx: Option<Vec<usize>> = w
                    .iter()
                    .map(|g| match g {
                        Gen::E(r) => Some(*r),
                        _ => None,
                    })
                    .collect();
                idx.map(|i| (i, c.clone()))
            })
            .collect();
        if terms.len() != r.terms.len() {
            continue; // F-family copy; the index system covers both blocks
        }
        let lead = terms
            .iter()
            .max_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)))
            .unwrap()
            .clone();
        let lead_inv = lead.1.inverse().map_err(|e| RunError(format!("{e:?}")))?;
        let rhs: Vec<(Vec<usize>, Scalar)> = terms
            .iter()
            .filter(|(w, _)| *w != lead.0)
            .map(|(w, c)| (w.clone(), -&(c * &lead_inv)))
            .collect();
        let rule = (lead.0, rhs);
        if !initial.contains(&rule) {
            initial.push(rule);
        }
    }
    let sys = complete_rules(initial, pres.rewrite.completion_degree);
    let unresolved: Vec<usize> = sys
        .confluence
        .iter()
        .filter(|(_, st)| *st == ConfluenceStatus::Unresolved)
        .map(|(d, _)| *d)
        .collect();
    // detected either through unresolved critical pairs or through the
    // graded dimension of the degenerated quotient
    if !sys.stable || !unresolved.is_empty() {
        return Ok(Check::new("serre-perturbation-rejected", true).witness(format!(
            "perturbed relation {k}: critical pairs unresolved at degrees {unresolved:?}"
        )));
    }
    let rank = pres.datum.rank;
    for deg in 1..=sys.completion_degree.min(5) {
        let mut count = 0u64;
        let mut word = vec![0usize; deg];
        loop {
            if sys.is_irreducible(&word) {
                count += 1;
            }
            let mut pos = deg;
            while pos > 0 {
                word[pos - 1] += 1;
                if word[pos - 1] < rank {
                    break;
                }
                word[pos - 1] = 0;
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
        }
        let expected = upper_graded_dim(&pres.datum, deg);
        if count != expected {
            return Ok(Check::new("serre-perturbation-rejected", true).witness(format!(
                "perturbed relation {k}: critical pairs collapse the quotient, \
                 degree {deg} has {count} irreducible words instead of {expected}"
            )));
        }
    }
    Ok(Check::new("serre-perturbation-rejected", false)
        .witness(format!("perturbed relation {k} was not detected")))
}

fn suite_hopf(ctx: &Ctx) -> Result<Vec<Check>, RunError> {
    let pres = &ctx.pres;
    let mut checks = Vec::new();
    let report = pres.hopf_axiom_check(4.min(pres.rewrite.completion_degree));
    for (name, ok) in &report.checks {
        checks.push(Check::new(&format!("hopf-{name}"), *ok));
    }
    // S^2 = Ad(K_{-2 rho}) on the generators
    let two_rho: IWeight = pres.datum.rho.iter().map(|c| 2 * c).collect();
    let neg: IWeight = two_rho.iter().map(|c| -c).collect();
    let km = pres.k_elem(&neg).map_err(alg_err)?;
    let kp = pres.k_elem(&two_rho).map_err(alg_err)?;
    let mut ok = true;
    for g in pres.generators() {
        let s2 = pres.antipode(&pres.antipode(&g).map_err(alg_err)?).map_err(alg_err)?;
        let ad = pres
            .multiply(&pres.multiply(&km, &g).map_err(alg_err)?, &kp)
            .map_err(alg_err)?;
        ok &= s2 == ad;
    }
    checks.push(Check::new("hopf-antipode-square-ad", ok));
    // the unitary antipode is involutive
    let mut ok = true;
    for g in pres.generators() {
        let rr = pres
            .unitary_antipode(&pres.unitary_antipode(&g).map_err(alg_err)?)
            .map_err(alg_err)?;
        ok &= rr == pres.normal_form(&g).map_err(alg_err)?;
    }
    checks.push(Check::new("hopf-unitary-antipode-involutive", ok));
    Ok(checks)
}

fn alg_err(e: QuantAlgError) -> RunError {
    RunError(format!("{e:?}"))
}

fn suite_reps(ctx: &Ctx) -> Result<Vec<Check>, RunError> {
    let pres = &ctx.pres;
    let mut serre = pres.serre_relations.clone();
    if let Some(k) = ctx.perturb_serre {
        if k >= serre.len() {
            return Err(RunError(format!("perturb index {k} out of range")));
        }
        let w = serre[k].terms.keys().next().cloned().expect("nonempty relation");
        let c = serre[k].terms[&w].clone();
        let scaled = &c * &(&Scalar::one() + &Scalar::q_pow(1, 1));
        serre[k].terms.insert(w, scaled);
    }
    let mut relations_ok = true;
    let mut star_ok = true;
    let mut witness = None;
    let mut count = 0usize;
    for lam in pres.datum.dominant_weights_up_to(ctx.file_height) {
        let rep = build_irrep(pres, &lam).map_err(|e| RunError(format!("{e:?}")))?;
        for (i, rel) in pres.cross_relations.iter().chain(&serre).enumerate() {
            count += 1;
            if !evaluate(pres, rel, &rep).is_zero() {
                relations_ok = false;
                witness.get_or_insert(format!("relation {i} nonzero on V_{lam:?}"));
            }
        }
        star_ok &= check_star_rep(pres, &rep).map_err(|e| RunError(format!("{e:?}")))?;
    }
    let mut c = Check::new("reps-relations-vanish", relations_ok)
        .witness(format!("{count} relation/irrep pairs"));
    if let Some(w) = witness {
        c = c.witness(w);
    }
    Ok(vec![c, Check::new("reps-star-unitary", star_ok)])
}

fn suite_braid(ctx: &Ctx) -> Result<Vec<Check>, RunError> {
    let pres = &ctx.pres;
    let datum = &pres.datum;
    let mut inv_ok = true;
    let mut conj_ok = true;
    for lam in datum.dominant_weights_up_to(ctx.file_height.min(2)) {
        let rep = build_irrep(pres, &lam).map_err(|e| RunError(format!("{e:?}")))?;
        for r in 0..datum.rank {
            let (t, tinv) = braid_t(pres, &rep, r);
            inv_ok &= t.matmul(&tinv).sub(&Mat::identity(rep.dim)).is_zero();
            for w in datum.lattice_generators() {
                let kw = rep.k_matrix(pres, w);
                let sw = qw_to_iw(&datum.reflect(r, &qw(w)))
                    .ok_or_else(|| RunError("reflection leaves the lattice".into()))?;
                let ksw = rep.k_matrix(pres, &sw);
                conj_ok &= t.matmul(&kw).matmul(&tinv).sub(&ksw).is_zero();
            }
        }
    }
    let mut checks = vec![
        Check::new("braid-t-invertible", inv_ok),
        Check::new("braid-torus-conjugation", conj_ok),
    ];
    if ctx.pres.datum.name == "A1" {
        let rep = build_irrep(pres, &vec![1]).map_err(|e| RunError(format!("{e:?}")))?;
        let (t, _) = braid_t(pres, &rep, 0);
        let mut expected = Mat::zeros(2, 2);
        expected[(0, 1)] = Scalar::one();
        expected[(1, 0)] = -&Scalar::q_pow(1, 1);
        checks.push(
            Check::new("braid-spin-half-matrix", t.sub(&expected).is_zero())
                .witness("[[0,1],[-q,0]]".to_string()),
        );
    }
    Ok(checks)
}

fn certificate_checks(
    pres: &Presentation,
    report: &qsatake::qsympair::CoidealReport,
    prefix: &str,
    degree: usize,
    kband: i64,
) -> Vec<Check> {
    let _ = pres;
    report
        .checks
        .iter()
        .map(|gc| {
            let undecided = gc
                .legs
                .iter()
                .filter(|(_, m)| !m.is_certified())
                .count();
            let name = format!("{prefix}-{}", gc.generator);
            if undecided == 0 {
                Check::new(&name, true).certificate(serde_json::json!({
                    "degree": degree,
                    "kband": kband,
                    "legs": gc.legs.len(),
                }))
            } else {
                Check::undecided(
                    &name,
                    format!("{undecided} of {} legs undecided at degree {degree}", gc.legs.len()),
                )
            }
        })
        .collect()
}

impl Check {
    fn certificate(mut self, v: serde_json::Value) -> Check {
        self.certificate = Some(v);
        self
    }
}

fn span_or_undecided(
    ctx: &mut Ctx,
    prefix: &str,
) -> Result<Result<qsatake::qsympair::MonomialSpan, Check>, RunError> {
    let degree = ctx.file_degree;
    let kband = ctx.span_kband();
    ctx.coideal()?;
    let pres = &ctx.pres;
    let cp = ctx.cp.as_ref().unwrap();
    match monomial_span(pres, cp, degree, kband) {
        Ok(span) => Ok(Ok(span)),
        Err(QsymError::Alg(QuantAlgError::Undecided { degree: d, completed })) => {
            Ok(Err(Check::undecided(
                &format!("{prefix}-span"),
                format!("normal form undecided at degree {d} (completion to {completed})"),
            )))
        }
        Err(e) => Err(RunError(format!("{e:?}"))),
    }
}

fn suite_coideal(ctx: &mut Ctx) -> Result<Vec<Check>, RunError> {
    let degree = ctx.file_degree;
    let kband = ctx.span_kband();
    let span = match span_or_undecided(ctx, "coideal")? {
        Ok(s) => s,
        Err(c) => return Ok(vec![c]),
    };
    let pres = &ctx.pres;
    let cp = ctx.cp.as_ref().unwrap();
    let report = check_left_coideal(pres, cp, &span).map_err(|e| RunError(format!("{e:?}")))?;
    let mut checks = certificate_checks(pres, &report, "coideal", degree, kband);

    // product stability of the certificate span: every pairwise product of
    // B-generators must itself be a certified member, otherwise the leg
    // certificates only cover the generators and the bound is too small
    let b_gens: Vec<&AlgElem> = cp
        .generators
        .iter()
        .filter(|(l, _)| matches!(l, GenLabel::B(_)))
        .map(|(_, g)| g)
        .collect();
    let mut undecided_products = 0usize;
    let mut total = 0usize;
    for x in &b_gens {
        for y in &b_gens {
            total += 1;
            let prod = pres.multiply(x, y).map_err(alg_err)?;
            if !qsatake::qsympair::membership(pres, &span, &prod)
                .map_err(|e| RunError(format!("{e:?}")))?
                .is_certified()
            {
                undecided_products += 1;
            }
        }
    }
    if total > 0 {
        checks.push(if undecided_products == 0 {
            Check::new("coideal-span-products", true)
                .witness(format!("{total} pairwise products certified"))
        } else {
            Check::undecided(
                "coideal-span-products",
                format!("{undecided_products} of {total} products undecided at degree {degree}"),
            )
        });
    }

    // paper regression: the sl2 coideal generator is E - F K_alpha
    if pres.datum.name == "A1" && ctx.diagram.x_set.is_empty() {
        let b = cp
            .generator(&GenLabel::B(0))
            .ok_or_else(|| RunError("missing B generator".into()))?;
        let fk = AlgElem::gen_f(0).free_mul(&AlgElem::gen_k(pres.datum.alpha(0)));
        let expected = AlgElem::gen_e(0).sub(&fk);
        checks.push(
            Check::new("sl2-B-generator", *b == expected)
                .witness("E \u{2212} F\u{b7}K_\u{3b1}".to_string()),
        );
    }
    Ok(checks)
}

fn suite_star(ctx: &mut Ctx) -> Result<Vec<Check>, RunError> {
    let degree = ctx.file_degree;
    let kband = ctx.span_kband();
    let span = match span_or_undecided(ctx, "star")? {
        Ok(s) => s,
        Err(c) => return Ok(vec![c]),
    };
    let pres = &ctx.pres;
    let cp = ctx.cp.as_ref().unwrap();
    let report = check_star_closed(pres, cp, &span).map_err(|e| RunError(format!("{e:?}")))?;
    Ok(certificate_checks(pres, &report, "star", degree, kband))
}

fn suite_spherical(ctx: &mut Ctx, tables: &mut Tables) -> Result<Vec<Check>, RunError> {
    ctx.coideal()?;
    let pres = &ctx.pres;
    let cp = ctx.cp.as_ref().unwrap();
    let dims =
        spherical_dims(pres, cp, ctx.file_height).map_err(|e| RunError(format!("{e:?}")))?;
    let mut table = BTreeMap::new();
    let mut trivial_ok = false;
    for (lam, dim) in &dims {
        let key: Vec<String> = lam.iter().map(|c| c.to_string()).collect();
        table.insert(key.join(","), *dim);
        if lam.iter().all(|c| *c == 0) {
            trivial_ok = *dim == 1;
        }
    }
    tables.spherical_dims = Some(table);
    Ok(vec![Check::new("spherical-trivial-module", trivial_ok)])
}

fn suite_dual(ctx: &Ctx, tables: &mut Tables) -> Result<Vec<Check>, RunError> {
    let pres = &ctx.pres;
    let h = ctx.file_height.min(2);
    let rank = peter_weyl_rank(pres, h, (h + 1) as usize)
        .map_err(|e| RunError(format!("{e:?}")))?;
    let expected: u64 = pres
        .datum
        .dominant_weights_up_to(h)
        .iter()
        .map(|lam| {
            let d = pres.datum.weyl_dim(lam).expect("dominant");
            d * d
        })
        .sum();
    tables.peter_weyl_rank = Some(rank);
    Ok(vec![Check::new("dual-peter-weyl-rank", rank as u64 == expected)
        .witness(format!("rank {rank}, sum of squares {expected}"))])
}

fn suite_haar(ctx: &Ctx) -> Result<Vec<Check>, RunError> {
    let pres = &ctx.pres;
    let alg = CoeffAlgebra::new(pres);
    let cqg = |e: qsatake::cqgdual::CqgError| RunError(format!("{e:?}"));
    let mut checks = Vec::new();
    checks.push(Check::new("haar-normalized", alg.haar(&alg.one()).map_err(cqg)?.is_one()));

    let mut inv_ok = true;
    for lam in pres.datum.dominant_weights_up_to(ctx.file_height.min(2)) {
        let n = alg.dim(&Label::V(lam.clone())).map_err(cqg)?;
        for i in 0..n {
            for j in 0..n {
                let a = alg.matrix_coeff(Label::V(lam.clone()), i, j);
                let phi = alg.haar(&a).map_err(cqg)?;
                let target = {
                    let mut t = alg.one();
                    t = t.scale(&phi);
                    t
                };
                let legs = alg.coproduct(&a).map_err(cqg)?;
                let mut left = AElem::zero();
                let mut right = AElem::zero();
                for (a1, a2) in &legs {
                    left = left.add(&a1.scale(&alg.haar(a2).map_err(cqg)?));
                    right = right.add(&a2.scale(&alg.haar(a1).map_err(cqg)?));
                }
                inv_ok &= alg.equal(&left, &target, 2).map_err(cqg)?;
                inv_ok &= alg.equal(&right, &target, 2).map_err(cqg)?;
            }
        }
    }
    checks.push(Check::new("haar-invariance", inv_ok));

    // positivity of Phi(a* a) at the sampled q0
    let labels: Vec<Label> = pres
        .datum
        .dominant_weights_up_to(1)
        .into_iter()
        .map(Label::V)
        .collect();
    let mut state: u64 = 0x2545f4914f6cdd1d;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) % 7) as i64 - 3
    };
    let mut pos_ok = true;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mut a = AElem::zero();
        for l in &labels {
            let n = alg.dim(l).map_err(cqg)?;
            for i in 0..n {
                for j in 0..n {
                    a.add_term((l.clone(), i, j), &Scalar::from_int(next()));
                }
            }
        }
        let phi = alg.haar(&alg.product(&alg.star(&a), &a).map_err(cqg)?).map_err(cqg)?;
        for q0 in &ctx.q0 {
            let v = phi
                .specialize(*q0)
                .map_err(|e| RunError(format!("{e:?}")))?;
            worst = worst.min(v);
            pos_ok &= v >= -ctx.precision;
        }
    }
    checks.push(Check::new("haar-positivity", pos_ok).witness(format!("min value {worst:.3e}")));
    Ok(checks)
}

fn suite_double(ctx: &mut Ctx) -> Result<Vec<Check>, RunError> {
    ctx.coideal()?;
    let pres = &ctx.pres;
    let cp = ctx.cp.as_ref().unwrap();
    let alg = CoeffAlgebra::new(pres);
    let cqg = |e: qsatake::cqgdual::CqgError| RunError(format!("{e:?}"));

    let mut gens: Vec<DblElem> = pres.generators().iter().map(|g| dbl_from_u(&alg, g)).collect();
    for lam in pres.datum.dominant_weights_up_to(1) {
        if lam.iter().all(|c| *c == 0) {
            continue;
        }
        let n = alg.dim(&Label::V(lam.clone())).map_err(cqg)?;
        for i in 0..n {
            for j in 0..n {
                gens.push(dbl_from_b(&alg.matrix_coeff(Label::V(lam.clone()), i, j)));
            }
        }
    }
    for (_, g) in &cp.generators {
        gens.push(dbl_from_u(&alg, g));
    }

    let mut state: u64 = 0x9e3779b97f4a7c15;
    let mut next = |m: usize| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % m as u64) as usize
    };
    let mut assoc_ok = true;
    for _ in 0..10 {
        let x = &gens[next(gens.len())];
        let y = &gens[next(gens.len())];
        let z = &gens[next(gens.len())];
        let xy_z = dbl_multiply(&alg, &dbl_multiply(&alg, x, y).map_err(cqg)?, z).map_err(cqg)?;
        let x_yz = dbl_multiply(&alg, x, &dbl_multiply(&alg, y, z).map_err(cqg)?).map_err(cqg)?;
        assoc_ok &= dbl_equal(&alg, &xy_z, &x_yz, 2).map_err(cqg)?;
    }
    let mut star_ok = true;
    for _ in 0..5 {
        let x = dbl_multiply(&alg, &gens[next(gens.len())], &gens[next(gens.len())])
            .map_err(cqg)?;
        let xss = dbl_star(&alg, &dbl_star(&alg, &x).map_err(cqg)?).map_err(cqg)?;
        star_ok &= dbl_equal(&alg, &xss, &x, 2).map_err(cqg)?;
    }
    let one = dbl_one(&alg);
    let mut unit_ok = true;
    for g in gens.iter().take(6) {
        unit_ok &= dbl_equal(&alg, &dbl_multiply(&alg, &one, g).map_err(cqg)?, g, 2)
            .map_err(cqg)?;
        unit_ok &= dbl_equal(&alg, &dbl_multiply(&alg, g, &one).map_err(cqg)?, g, 2)
            .map_err(cqg)?;
    }
    Ok(vec![
        Check::new("double-associative", assoc_ok).witness("10 random triples".to_string()),
        Check::new("double-star-involutive", star_ok),
        Check::new("double-unit", unit_ok),
    ])
}

fn suite_dkmodule(ctx: &mut Ctx) -> Result<Vec<Check>, RunError> {
    ctx.coideal()?;
    let pres = &ctx.pres;
    let cp = ctx.cp.as_ref().unwrap();
    let alg = CoeffAlgebra::new(pres);
    let cqg = |e: qsatake::cqgdual::CqgError| RunError(format!("{e:?}"));
    let module = build_dk_module(&alg, cp, 1, 2).map_err(cqg)?;
    let report = verify_dk_compat(&alg, cp, &module, 1, 1).map_err(cqg)?;
    let mut checks = vec![Check::new("dkmodule-compat", report.pass())
        .witness(format!("{} pairs checked", report.pairs_checked))];

    // a single perturbed structure constant must be rejected
    if module.b_gens.len() > 1 {
        let b = &module.b_gens[1];
        let umonos = alg.monomials(1);
        let imonos = i_monomials(cp, 1);
        let mut legs = alg.coproduct(b).map_err(cqg)?;
        let bump = &Scalar::one() + &Scalar::q_pow(1, 1);
        legs[0].1 = legs[0].1.scale(&bump);
        let witness = dk_compat_witness(&alg, b, &legs, &module.elems[1], &umonos, &imonos)
            .map_err(cqg)?;
        checks.push(Check::new("dkmodule-mutation-rejected", witness.is_some()));
    }
    Ok(checks)
}
