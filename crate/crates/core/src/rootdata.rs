//! Root systems, weight lattices, Weyl combinatorics, and Satake diagrams
//! with axiom validation.
//!
//! Weights are stored as exact rational vectors in the fundamental-weight
//! basis, so lattice membership is an integrality question settled by
//! Hermite normal forms. Supported Cartan types: A (rank <= 4), B/C
//! (rank <= 3), D4, G2, and direct products of these (used for the diagonal
//! embedding fixtures, e.g. `A1xA1`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Weight in fundamental-weight coordinates, possibly non-integral.
pub type QWeight = Vec<BigRational>;
/// Integral weight (an element of P) in fundamental-weight coordinates.
pub type IWeight = Vec<i64>;

pub fn qw(w: &[i64]) -> QWeight {
    w.iter().map(|x| BigRational::from(BigInt::from(*x))).collect()
}

pub fn qw_to_iw(w: &QWeight) -> Option<IWeight> {
    use num_traits::ToPrimitive;
    w.iter()
        .map(|c| {
            if c.is_integer() {
                c.numer().to_i64()
            } else {
                None
            }
        })
        .collect()
}

pub fn qw_add(a: &QWeight, b: &QWeight) -> QWeight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn qw_sub(a: &QWeight, b: &QWeight) -> QWeight {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn qw_neg(a: &QWeight) -> QWeight {
    a.iter().map(|x| -x).collect()
}

pub fn qw_scale(a: &QWeight, s: &BigRational) -> QWeight {
    a.iter().map(|x| x * s).collect()
}

pub fn qw_is_zero(a: &QWeight) -> bool {
    a.iter().all(|x| x.is_zero())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootDataError {
    UnsupportedType(String),
    BadLattice(String),
    BadWeight(String),
    BadWord(String),
    InvalidDiagram(AxiomReport),
}

impl fmt::Display for RootDataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootDataError::UnsupportedType(s) => write!(f, "unsupported Cartan type: {s}"),
            RootDataError::BadLattice(s) => write!(f, "invalid lattice: {s}"),
            RootDataError::BadWeight(s) => write!(f, "invalid weight: {s}"),
            RootDataError::BadWord(s) => write!(f, "invalid Weyl word: {s}"),
            RootDataError::InvalidDiagram(r) => write!(f, "invalid Satake diagram: {r}"),
        }
    }
}

impl std::error::Error for RootDataError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeSpec {
    RootLattice,
    WeightLattice,
    Generators(Vec<IWeight>),
}

// ---------------------------------------------------------------------------
// Integer lattice utilities (Hermite normal form)
// ---------------------------------------------------------------------------

/// Full-rank sublattice of Z^n given by a column-style Hermite normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZLattice {
    /// Lower-triangular basis columns: `basis[j][i]` is row `i` of column `j`,
    /// with positive diagonal pivots.
    basis: Vec<Vec<BigInt>>,
}

impl ZLattice {
    /// Build from spanning columns; fails when the span has rank < n.
    pub fn from_spanning(n: usize, cols: &[Vec<BigInt>]) -> Option<ZLattice> {
        let mut work: Vec<Vec<BigInt>> = cols.to_vec();
        let mut basis: Vec<Vec<BigInt>> = Vec::new();
        for row in 0..n {
            loop {
                let nz: Vec<usize> = (0..work.len())
                    .filter(|j| !work[*j][row].is_zero())
                    .collect();
                if nz.is_empty() {
                    return None;
                }
                if nz.len() == 1 {
                    break;
                }
                // reduce all against the column with the smallest pivot
                let jmin = *nz
                    .iter()
                    .min_by_key(|j| work[**j][row].abs())
                    .unwrap();
                let pivot = work[jmin][row].clone();
                for &j in &nz {
                    if j == jmin {
                        continue;
                    }
                    let f = &work[j][row] / &pivot;
                    if !f.is_zero() {
                        for i in 0..n {
                            let delta = &f * &work[jmin][i];
                            work[j][i] -= delta;
                        }
                    }
                }
                if (0..work.len()).filter(|j| !work[*j][row].is_zero()).count() == 1 {
                    break;
                }
            }
            let j = (0..work.len()).find(|j| !work[*j][row].is_zero()).unwrap();
            let mut col = work.remove(j);
            if col[row].is_negative() {
                for c in col.iter_mut() {
                    *c = -c.clone();
                }
            }
            basis.push(col);
        }
        Some(ZLattice { basis })
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let n = self.basis.len();
        assert_eq!(v.len(), n);
        let mut rem: Vec<BigInt> = v.to_vec();
        for (row, col) in self.basis.iter().enumerate() {
            let piv = &col[row];
            if (&rem[row] % piv).is_zero() {
                let c = &rem[row] / piv;
                for i in 0..n {
                    let delta = &c * &col[i];
                    rem[i] -= delta;
                }
            } else {
                return false;
            }
        }
        rem.iter().all(|x| x.is_zero())
    }

    pub fn basis_columns(&self) -> &[Vec<BigInt>] {
        &self.basis
    }
}

/// Basis of the integer kernel `{x : M x = 0}` via unimodular column
/// operations (`M U = H` with `H` in column echelon form).
pub fn int_kernel(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if m.is_empty() {
        return Vec::new();
    }
    let rows = m.len();
    let cols = m[0].len();
    let mut h: Vec<Vec<BigInt>> = m.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..cols)
        .map(|j| (0..cols).map(|i| BigInt::from((i == j) as i64)).collect())
        .collect();
    // u is stored column-major: u[j] is the j-th column of U
    let col_get = |h: &Vec<Vec<BigInt>>, i: usize, j: usize| h[i][j].clone();
    let mut lead = 0usize;
    for row in 0..rows {
        loop {
            let nz: Vec<usize> = (lead..cols).filter(|j| !h[row][*j].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            if nz.len() == 1 {
                let j = nz[0];
                h.iter_mut().for_each(|r| r.swap(lead, j));
                u.swap(lead, j);
                lead += 1;
                break;
            }
            let jmin = *nz.iter().min_by_key(|j| h[row][**j].abs()).unwrap();
            let pivot = col_get(&h, row, jmin);
            for &j in &nz {
                if j == jmin {
                    continue;
                }
                let f = &h[row][j] / &pivot;
                if !f.is_zero() {
                    for i in 0..rows {
                        let delta = &f * &h[i][jmin];
                        h[i][j] -= delta;
                    }
                    for i in 0..cols {
                        let delta = &f * &u[jmin][i];
                        u[j][i] -= delta;
                    }
                }
            }
        }
    }
    (lead..cols)
        .filter(|j| (0..rows).all(|i| h[i][*j].is_zero()))
        .map(|j| u[j].clone())
        .collect()
}

// ---------------------------------------------------------------------------
// Root datum
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct RootDatum {
    pub name: String,
    pub rank: usize,
    /// Cartan matrix `a[r][s] = (alpha_r^vee, alpha_s)`.
    pub cartan: Vec<Vec<i64>>,
    /// Symmetrizers `d_r = (alpha_r, alpha_r)/2`.
    pub d: Vec<i64>,
    cartan_inv: Vec<Vec<BigRational>>,
    /// Positive roots in simple-root coordinates.
    pub pos_roots: Vec<Vec<i64>>,
    /// Half-sum of positive roots (fundamental-weight coordinates).
    pub rho: IWeight,
    /// Root order: `q`-exponents arising from the representation theory are
    /// integer multiples of `1/L`.
    pub root_order: i64,
    lattice: ZLattice,
    lattice_gens: Vec<IWeight>,
}

fn series_cartan(series: char, rank: usize) -> Result<(Vec<Vec<i64>>, Vec<i64>), RootDataError> {
    let err = || RootDataError::UnsupportedType(format!("{series}{rank}"));
    let mut a = vec![vec![0i64; rank]; rank];
    for i in 0..rank {
        a[i][i] = 2;
    }
    let chain = |a: &mut Vec<Vec<i64>>, upto: usize| {
        for i in 0..upto {
            a[i][i + 1] = -1;
            a[i + 1][i] = -1;
        }
    };
    match series {
        'A' => {
            if rank < 1 || rank > 4 {
                return Err(err());
            }
            chain(&mut a, rank - 1);
            Ok((a, vec![1; rank]))
        }
        'B' => {
            if rank < 2 || rank > 3 {
                return Err(err());
            }
            chain(&mut a, rank - 1);
            a[rank - 1][rank - 2] = -2;
            let mut d = vec![2; rank];
            d[rank - 1] = 1;
            Ok((a, d))
        }
        'C' => {
            if rank < 2 || rank > 3 {
                return Err(err());
            }
            chain(&mut a, rank - 1);
            a[rank - 2][rank - 1] = -2;
            let mut d = vec![1; rank];
            d[rank - 1] = 2;
            Ok((a, d))
        }
        'D' => {
            if rank != 4 {
                return Err(err());
            }
            chain(&mut a, rank - 2);
            a[rank - 3][rank - 1] = -1;
            a[rank - 1][rank - 3] = -1;
            Ok((a, vec![1; rank]))
        }
        'G' => {
            if rank != 2 {
                return Err(err());
            }
            // alpha_1 short, alpha_2 long
            a[0][1] = -3;
            a[1][0] = -1;
            Ok((a, vec![1, 3]))
        }
        _ => Err(err()),
    }
}

fn parse_kind(spec: &str) -> Result<Vec<(char, usize)>, RootDataError> {
    let mut parts = Vec::new();
    for piece in spec.split('x') {
        let piece = piece.trim();
        let mut chars = piece.chars();
        let series = chars
            .next()
            .ok_or_else(|| RootDataError::UnsupportedType(spec.to_string()))?;
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| RootDataError::UnsupportedType(spec.to_string()))?;
        parts.push((series, rank));
    }
    if parts.is_empty() {
        return Err(RootDataError::UnsupportedType(spec.to_string()));
    }
    Ok(parts)
}

fn rat_mat_inverse(a: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let mut aug: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        BigRational::from(BigInt::from(a[i][j]))
                    } else {
                        BigRational::from(BigInt::from((j - n == i) as i64))
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|r| !aug[*r][col].is_zero()).expect("invertible");
        aug.swap(col, p);
        let inv = aug[col][col].recip();
        for j in 0..2 * n {
            aug[col][j] = &aug[col][j] * &inv;
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                for j in 0..2 * n {
                    let delta = &f * &aug[col][j];
                    aug[r][j] -= delta;
                }
            }
        }
    }
    (0..n).map(|i| aug[i][n..].to_vec()).collect()
}

impl RootDatum {
    /// `kind` is e.g. `"A2"`, `"G2"`, or a product such as `"A1xA1"`.
    pub fn build(kind: &str, lattice: &LatticeSpec) -> Result<RootDatum, RootDataError> {
        let parts = parse_kind(kind)?;
        let mut cartan: Vec<Vec<i64>> = Vec::new();
        let mut d: Vec<i64> = Vec::new();
        let mut offset = 0usize;
        for (series, rank) in &parts {
            let (a, dd) = series_cartan(*series, *rank)?;
            let n = offset + rank;
            for row in cartan.iter_mut() {
                row.resize(n, 0);
            }
            for (i, arow) in a.iter().enumerate() {
                let mut row = vec![0i64; n];
                row[offset..].copy_from_slice(arow);
                let _ = i;
                cartan.push(row);
            }
            d.extend(dd);
            offset = n;
        }
        let rank = offset;
        let cartan_inv = rat_mat_inverse(&cartan);

        // positive roots by reflection closure on simple-root coordinates
        let mut pos: Vec<Vec<i64>> = (0..rank)
            .map(|i| (0..rank).map(|j| (i == j) as i64).collect())
            .collect();
        let mut frontier = pos.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for beta in &frontier {
                for r in 0..rank {
                    // (beta, alpha_r^vee) = sum_j beta_j * a[r][j]
                    let pairing: i64 = (0..rank).map(|j| beta[j] * cartan[r][j]).sum();
                    let mut img = beta.clone();
                    img[r] -= pairing;
                    if img.iter().all(|c| *c >= 0) && !pos.contains(&img) {
                        pos.push(img.clone());
                        next.push(img);
                    }
                }
            }
            frontier = next;
        }
        pos.sort();

        // rho: fundamental-weight coords of the half-sum; equals (1,...,1)
        let mut rho_twice = vec![0i64; rank];
        for beta in &pos {
            for i in 0..rank {
                // fw coords of beta: sum_j a[i][j]*beta_j
                rho_twice[i] += (0..rank).map(|j| cartan[i][j] * beta[j]).sum::<i64>();
            }
        }
        assert!(rho_twice.iter().all(|x| x % 2 == 0));
        let rho: IWeight = rho_twice.iter().map(|x| x / 2).collect();
        debug_assert!(rho.iter().all(|x| *x == 1));

        // root order: fractions appearing in (omega_i, omega_j), joined with 2
        // so that the half-integer exponents q^{(alpha+,alpha+)} of the
        // coideal generators are always representable.
        let mut l = BigInt::from(2);
        for i in 0..rank {
            for j in 0..rank {
                // (omega_i, omega_j) = d_j * (A^{-1})[j][i]
                let val = &cartan_inv[j][i] * BigRational::from(BigInt::from(d[j]));
                l = num_integer::lcm(l, val.denom().clone());
            }
        }
        use num_traits::ToPrimitive;
        let root_order = l.to_i64().expect("root order fits i64");

        // lattice generators in fundamental-weight coordinates
        let simple_roots_fw: Vec<IWeight> = (0..rank)
            .map(|r| (0..rank).map(|i| cartan[i][r]).collect())
            .collect();
        let gens: Vec<IWeight> = match lattice {
            LatticeSpec::RootLattice => simple_roots_fw.clone(),
            LatticeSpec::WeightLattice => (0..rank)
                .map(|i| (0..rank).map(|j| (i == j) as i64).collect())
                .collect(),
            LatticeSpec::Generators(g) => {
                let mut all = simple_roots_fw.clone();
                for v in g {
                    if v.len() != rank {
                        return Err(RootDataError::BadLattice(format!(
                            "generator has length {}, expected {rank}",
                            v.len()
                        )));
                    }
                    all.push(v.clone());
                }
                all
            }
        };
        let cols: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| g.iter().map(|x| BigInt::from(*x)).collect())
            .collect();
        let zl = ZLattice::from_spanning(rank, &cols)
            .ok_or_else(|| RootDataError::BadLattice("lattice does not span".into()))?;

        Ok(RootDatum {
            name: kind.to_string(),
            rank,
            cartan,
            d,
            cartan_inv,
            pos_roots: pos,
            rho,
            root_order,
            lattice: zl,
            lattice_gens: gens,
        })
    }

    /// Fundamental-weight coordinates of the simple root `alpha_r`.
    pub fn alpha(&self, r: usize) -> IWeight {
        (0..self.rank).map(|i| self.cartan[i][r]).collect()
    }

    /// Convert fundamental-weight coordinates to simple-root coordinates.
    pub fn to_root_coords(&self, w: &QWeight) -> QWeight {
        (0..self.rank)
            .map(|j| {
                (0..self.rank)
                    .map(|i| &self.cartan_inv[j][i] * &w[i])
                    .sum()
            })
            .collect()
    }

    /// The invariant bilinear form, normalized so short roots have length 2.
    pub fn bilinear(&self, a: &QWeight, b: &QWeight) -> BigRational {
        let rb = self.to_root_coords(b);
        (0..self.rank)
            .map(|j| &a[j] * &rb[j] * BigRational::from(BigInt::from(self.d[j])))
            .sum()
    }

    /// `(lambda, alpha_r^vee)`; just the r-th fundamental-weight coordinate.
    pub fn coroot_pairing(&self, lam: &QWeight, r: usize) -> BigRational {
        lam[r].clone()
    }

    /// Simple reflection `s_r(lambda) = lambda - (lambda, alpha_r^vee) alpha_r`.
    pub fn reflect(&self, r: usize, lam: &QWeight) -> QWeight {
        let c = lam[r].clone();
        let alpha = qw(&self.alpha(r));
        qw_sub(lam, &qw_scale(&alpha, &c))
    }

    /// Apply the word `s_{w[0]} s_{w[1]} ... s_{w[n-1]}` to `lambda`
    /// (rightmost letter acts first).
    pub fn weyl_act(&self, word: &[usize], lam: &QWeight) -> Result<QWeight, RootDataError> {
        let mut out = lam.clone();
        for r in word.iter().rev() {
            if *r >= self.rank {
                return Err(RootDataError::BadWord(format!("letter {r} out of range")));
            }
            out = self.reflect(*r, &out);
        }
        Ok(out)
    }

    /// Reduced word for the longest element of the parabolic Weyl group `W_X`.
    pub fn longest_word(&self, x_set: &[usize]) -> Result<Vec<usize>, RootDataError> {
        for r in x_set {
            if *r >= self.rank {
                return Err(RootDataError::BadWord(format!("letter {r} out of range")));
            }
        }
        if x_set.is_empty() {
            return Ok(Vec::new());
        }
        // BFS on the orbit of a W_X-regular vector
        let mu: QWeight = qw(&(0..self.rank)
            .map(|i| x_set.contains(&i) as i64)
            .collect::<Vec<_>>());
        let mut seen: Vec<(QWeight, Vec<usize>)> = vec![(mu.clone(), Vec::new())];
        let mut frontier = seen.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (v, word) in &frontier {
                for r in x_set {
                    let img = self.reflect(*r, v);
                    if !seen.iter().any(|(w, _)| w == &img) {
                        let mut nw = vec![*r];
                        nw.extend_from_slice(word);
                        seen.push((img.clone(), nw.clone()));
                        next.push((img, nw));
                    }
                }
            }
            frontier = next;
        }
        let (_, word) = seen
            .into_iter()
            .max_by_key(|(_, w)| w.len())
            .expect("nonempty orbit");
        Ok(word)
    }

    /// Up to `limit` distinct reduced words for the longest element of `W_X`.
    pub fn longest_words(
        &self,
        x_set: &[usize],
        limit: usize,
    ) -> Result<Vec<Vec<usize>>, RootDataError> {
        let first = self.longest_word(x_set)?;
        if first.is_empty() {
            return Ok(vec![first]);
        }
        let target_len = first.len();
        let mu: QWeight = qw(&(0..self.rank)
            .map(|i| x_set.contains(&i) as i64)
            .collect::<Vec<_>>());
        let target = self.weyl_act(&first, &mu)?;
        // geodesic BFS keeping several shortest words per orbit point;
        // points seen at earlier depth are excluded so words stay reduced
        let mut seen: Vec<QWeight> = vec![mu.clone()];
        let mut layer: Vec<(QWeight, Vec<Vec<usize>>)> = vec![(mu, vec![Vec::new()])];
        for _ in 0..target_len {
            let mut next: Vec<(QWeight, Vec<Vec<usize>>)> = Vec::new();
            for (v, words) in &layer {
                for r in x_set {
                    let img = self.reflect(*r, v);
                    if seen.contains(&img) {
                        continue;
                    }
                    let entry = match next.iter_mut().find(|(w, _)| w == &img) {
                        Some(e) => e,
                        None => {
                            next.push((img.clone(), Vec::new()));
                            next.last_mut().unwrap()
                        }
                    };
                    for word in words {
                        if entry.1.len() >= limit {
                            break;
                        }
                        let mut nw = vec![*r];
                        nw.extend_from_slice(word);
                        entry.1.push(nw);
                    }
                }
            }
            seen.extend(next.iter().map(|(v, _)| v.clone()));
            layer = next;
        }
        let words = layer
            .into_iter()
            .find(|(v, _)| v == &target)
            .map(|(_, w)| w)
            .unwrap_or_default();
        Ok(words)
    }

    pub fn in_lattice(&self, w: &QWeight) -> bool {
        match qw_to_iw(w) {
            None => false,
            Some(iw) => {
                let v: Vec<BigInt> = iw.iter().map(|x| BigInt::from(*x)).collect();
                self.lattice.contains(&v)
            }
        }
    }

    pub fn lattice_generators(&self) -> &[IWeight] {
        &self.lattice_gens
    }

    /// Weyl dimension formula for a dominant lattice weight.
    pub fn weyl_dim(&self, lam: &IWeight) -> Result<u64, RootDataError> {
        if lam.iter().any(|c| *c < 0) {
            return Err(RootDataError::BadWeight(format!("{lam:?} is not dominant")));
        }
        let lam_rho = qw_add(&qw(lam), &qw(&self.rho));
        let rho = qw(&self.rho);
        let mut num = BigRational::one();
        let mut den = BigRational::one();
        for beta in &self.pos_roots {
            let beta_fw: IWeight = (0..self.rank)
                .map(|i| (0..self.rank).map(|j| self.cartan[i][j] * beta[j]).sum())
                .collect();
            let bq = qw(&beta_fw);
            num *= self.bilinear(&lam_rho, &bq);
            den *= self.bilinear(&rho, &bq);
        }
        let dim = num / den;
        use num_traits::ToPrimitive;
        Ok(dim.to_integer().to_u64().expect("dimension fits u64"))
    }

    /// Dominant lattice weights with coordinate height at most `h`.
    pub fn dominant_weights_up_to(&self, h: i64) -> Vec<IWeight> {
        let mut out = Vec::new();
        let mut stack: Vec<IWeight> = vec![Vec::new()];
        for _ in 0..self.rank {
            let mut next = Vec::new();
            for prefix in &stack {
                let used: i64 = prefix.iter().sum();
                for c in 0..=(h - used) {
                    let mut p = prefix.clone();
                    p.push(c);
                    next.push(p);
                }
            }
            stack = next;
        }
        for cand in stack {
            if self.in_lattice(&qw(&cand)) {
                out.push(cand);
            }
        }
        out.sort();
        out
    }
}

// ---------------------------------------------------------------------------
// Satake diagrams
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub checks: Vec<(String, bool, String)>,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|(_, ok, _)| *ok)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, ok, detail) in &self.checks {
            writeln!(f, "{name}: {} {detail}", if *ok { "pass" } else { "FAIL" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SatakeDiagram {
    pub base: std::rc::Rc<RootDatum>,
    pub x_set: Vec<usize>,
    /// Involution on node indices.
    pub tau: Vec<usize>,
    /// Reduced word for the longest element of `W_X`.
    pub wx_word: Vec<usize>,
    /// Matrix of `Theta = -w_X tau` on fundamental-weight coordinates
    /// (columns indexed by the fundamental weights).
    pub theta: Vec<Vec<i64>>,
    /// `delta_X^vee = (1/2) sum of positive coroots of X` in fw coordinates.
    pub delta_x_coroot: QWeight,
    /// Sign function `z_r`.
    pub z: Vec<i64>,
}

/// Check the Satake axioms; failures are report entries, not errors.
pub fn validate_satake(base: &RootDatum, x_set: &[usize], tau: &[usize]) -> AxiomReport {
    let mut checks = Vec::new();
    let rank = base.rank;
    let mut structural = tau.len() == rank && x_set.iter().all(|r| *r < rank);
    if structural {
        structural = (0..rank).all(|r| tau[r] < rank && tau[tau[r]] == r);
    }
    checks.push((
        "involution".into(),
        structural,
        "tau is an involutive permutation of the nodes".into(),
    ));
    if !structural {
        return AxiomReport { checks };
    }

    // (i) tau preserves the bilinear form on simple roots
    let mut ok_form = true;
    for r in 0..rank {
        for s in 0..rank {
            let lhs = base.bilinear(&qw(&base.alpha(tau[r])), &qw(&base.alpha(tau[s])));
            let rhs = base.bilinear(&qw(&base.alpha(r)), &qw(&base.alpha(s)));
            if lhs != rhs {
                ok_form = false;
            }
        }
    }
    checks.push((
        "form-invariance".into(),
        ok_form,
        "(tau a_r, tau a_s) = (a_r, a_s)".into(),
    ));

    // (ii) tau preserves X and equals -w_X there
    let mut ok_x = x_set.iter().all(|r| x_set.contains(&tau[*r]));
    if ok_x && ok_form {
        if let Ok(wx) = base.longest_word(x_set) {
            for r in x_set {
                let img = base.weyl_act(&wx, &qw(&base.alpha(*r))).unwrap();
                if qw_neg(&img) != qw(&base.alpha(tau[*r])) {
                    ok_x = false;
                }
            }
        }
    }
    checks.push((
        "tau-on-X".into(),
        ok_x,
        "tau(X) = X and tau = -w_X on X".into(),
    ));

    // (iii) integrality at tau-fixed white nodes
    let delta = delta_x_coroot(base, x_set);
    let mut ok_int = true;
    for r in 0..rank {
        if !x_set.contains(&r) && tau[r] == r {
            let val = base.bilinear(&qw(&base.alpha(r)), &delta);
            if !val.is_integer() {
                ok_int = false;
            }
        }
    }
    checks.push((
        "integrality".into(),
        ok_int,
        "(a_r, delta_X^vee) in Z for tau-fixed white nodes".into(),
    ));

    // lattice compatibility: tau must preserve F to integrate theta
    let mut ok_lat = true;
    for g in base.lattice_generators() {
        let img: QWeight = {
            let mut v = vec![BigRational::zero(); rank];
            for (i, c) in g.iter().enumerate() {
                v[tau[i]] = BigRational::from(BigInt::from(*c));
            }
            v
        };
        if !base.in_lattice(&img) {
            ok_lat = false;
        }
    }
    checks.push((
        "lattice-stability".into(),
        ok_lat,
        "tau(F) = F".into(),
    ));

    AxiomReport { checks }
}

/// `delta_X^vee` in fundamental-weight coordinates.
fn delta_x_coroot(base: &RootDatum, x_set: &[usize]) -> QWeight {
    let rank = base.rank;
    let mut acc = vec![BigRational::zero(); rank];
    for beta in &base.pos_roots {
        if (0..rank).any(|j| beta[j] != 0 && !x_set.contains(&j)) {
            continue;
        }
        // beta^vee = 2 beta/(beta,beta)
        let beta_fw: IWeight = (0..rank)
            .map(|i| (0..rank).map(|j| base.cartan[i][j] * beta[j]).sum())
            .collect();
        let bq = qw(&beta_fw);
        let len = base.bilinear(&bq, &bq);
        let covec = qw_scale(&bq, &(BigRational::from(BigInt::from(2)) / len));
        acc = qw_add(&acc, &covec);
    }
    qw_scale(&acc, &BigRational::new(BigInt::one(), BigInt::from(2)))
}

impl SatakeDiagram {
    pub fn new(
        base: std::rc::Rc<RootDatum>,
        x_set: Vec<usize>,
        tau: Vec<usize>,
    ) -> Result<SatakeDiagram, RootDataError> {
        let report = validate_satake(&base, &x_set, &tau);
        if !report.pass() {
            return Err(RootDataError::InvalidDiagram(report));
        }
        let wx_word = base.longest_word(&x_set)?;
        let rank = base.rank;
        // Theta columns: Theta(omega_i) = -w_X(omega_{tau(i)})
        let mut theta = vec![vec![0i64; rank]; rank];
        for i in 0..rank {
            let mut e = vec![BigRational::zero(); rank];
            e[tau[i]] = BigRational::one();
            let img = qw_neg(&base.weyl_act(&wx_word, &e)?);
            let iw = qw_to_iw(&img).expect("Theta is integral on P");
            for (row, c) in iw.iter().enumerate() {
                theta[row][i] = *c;
            }
        }
        let delta = delta_x_coroot(&base, &x_set);
        let mut diagram = SatakeDiagram {
            base,
            x_set,
            tau,
            wx_word,
            theta,
            delta_x_coroot: delta,
            z: Vec::new(),
        };
        diagram.z = diagram.choose_z();
        Ok(diagram)
    }

    /// Canonical choice of the sign function `z`.
    pub fn choose_z(&self) -> Vec<i64> {
        let rank = self.base.rank;
        (0..rank)
            .map(|r| {
                let val = self
                    .base
                    .bilinear(&qw(&self.base.alpha(r)), &self.delta_x_coroot);
                if val.is_integer() {
                    1
                } else if r < self.tau[r] {
                    1
                } else {
                    -1
                }
            })
            .collect()
    }

    /// Apply `Theta` to a weight in fundamental-weight coordinates.
    pub fn theta_map(&self, w: &QWeight) -> QWeight {
        let rank = self.base.rank;
        (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| BigRational::from(BigInt::from(self.theta[i][j])) * &w[j])
                    .sum()
            })
            .collect()
    }

    /// `alpha_r^+ = (alpha_r + Theta(alpha_r)) / 2`.
    pub fn alpha_plus(&self, r: usize) -> QWeight {
        let a = qw(&self.base.alpha(r));
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        qw_scale(&qw_add(&a, &self.theta_map(&a)), &half)
    }

    /// Basis of the Theta-fixed sublattice `{w in F : Theta(w) = w}`,
    /// as weights in fundamental-weight coordinates.
    pub fn theta_fixed_sublattice(&self) -> Vec<IWeight> {
        let rank = self.base.rank;
        let gens = self.base.lattice_generators();
        // M = (Theta - id) * G with G the lattice generator matrix
        let m: Vec<Vec<BigInt>> = (0..rank)
            .map(|i| {
                gens.iter()
                    .map(|g| {
                        let val: i64 = (0..rank)
                            .map(|j| (self.theta[i][j] - ((i == j) as i64)) * g[j])
                            .sum();
                        BigInt::from(val)
                    })
                    .collect()
            })
            .collect();
        let kernel = int_kernel(&m);
        use num_traits::ToPrimitive;
        let mut out: Vec<IWeight> = kernel
            .iter()
            .map(|x| {
                (0..rank)
                    .map(|i| {
                        gens.iter()
                            .enumerate()
                            .map(|(k, g)| x[k].to_i64().unwrap() * g[i])
                            .sum()
                    })
                    .collect()
            })
            .filter(|w: &IWeight| w.iter().any(|c| *c != 0))
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::rc::Rc;

    fn datum(kind: &str, lat: LatticeSpec) -> Rc<RootDatum> {
        Rc::new(RootDatum::build(kind, &lat).unwrap())
    }

    #[test]
    fn a1_weight_lattice_conventions() {
        let d = datum("A1", LatticeSpec::WeightLattice);
        let alpha = qw(&d.alpha(0));
        assert_eq!(d.bilinear(&alpha, &alpha), BigRational::from(BigInt::from(2)));
        assert_eq!(d.rho, vec![1]);
        assert_eq!(d.root_order, 2);
    }

    #[test]
    fn a2_cartan_matrix() {
        let d = datum("A2", LatticeSpec::RootLattice);
        assert_eq!(d.cartan, vec![vec![2, -1], vec![-1, 2]]);
        assert_eq!(d.pos_roots.len(), 3);
    }

    #[test]
    fn g2_enumeration() {
        let d = datum("G2", LatticeSpec::RootLattice);
        assert_eq!(d.d, vec![1, 3]);
        assert_eq!(d.pos_roots.len(), 6);
        // symmetrizability
        for r in 0..2 {
            for s in 0..2 {
                assert_eq!(d.d[r] * d.cartan[r][s], d.d[s] * d.cartan[s][r]);
            }
        }
    }

    #[test]
    fn longest_words() {
        let d = datum("A2", LatticeSpec::WeightLattice);
        assert!(d.longest_word(&[]).unwrap().is_empty());
        let w = d.longest_word(&[0, 1]).unwrap();
        assert_eq!(w.len(), 3);
        // w_X maps all positive roots of X to negatives
        for r in 0..2 {
            let img = d.weyl_act(&w, &qw(&d.alpha(r))).unwrap();
            let rc = d.to_root_coords(&img);
            assert!(rc.iter().all(|c| *c <= BigRational::zero()));
        }
    }

    #[test]
    fn reflection_on_simple_root() {
        let d = datum("A1", LatticeSpec::WeightLattice);
        let a = qw(&d.alpha(0));
        assert_eq!(d.weyl_act(&[0], &a).unwrap(), qw_neg(&a));
    }

    #[test]
    fn satake_a1_trivial() {
        let d = datum("A1", LatticeSpec::WeightLattice);
        let rep = validate_satake(&d, &[], &[0]);
        assert!(rep.pass(), "{rep}");
        let diag = SatakeDiagram::new(d, vec![], vec![0]).unwrap();
        assert_eq!(diag.z, vec![1]);
        // Theta = -id, alpha+ = 0
        assert_eq!(diag.theta, vec![vec![-1]]);
        assert!(qw_is_zero(&diag.alpha_plus(0)));
        assert!(diag.theta_fixed_sublattice().is_empty());
    }

    #[test]
    fn satake_a3_su22() {
        let d = datum("A3", LatticeSpec::WeightLattice);
        let rep = validate_satake(&d, &[1], &[2, 1, 0]);
        assert!(rep.pass(), "{rep}");
        let diag = SatakeDiagram::new(d.clone(), vec![1], vec![2, 1, 0]).unwrap();
        // (alpha_1, delta_X^vee) = -1/2, so z_1 = 1 (1 < tau(1)=3) and z_3 = -1
        let val = d.bilinear(&qw(&d.alpha(0)), &diag.delta_x_coroot);
        assert_eq!(val, BigRational::new(BigInt::from(-1), BigInt::from(2)));
        assert_eq!(diag.z, vec![1, 1, -1]);
        // Theta(alpha_1) = -(alpha_2 + alpha_3)
        let img = diag.theta_map(&qw(&d.alpha(0)));
        let expect = qw_neg(&qw_add(&qw(&d.alpha(1)), &qw(&d.alpha(2))));
        assert_eq!(img, expect);
    }

    #[test]
    fn satake_fails_on_unequal_lengths() {
        // tau swapping a long and a short root cannot preserve the form
        let d = datum("B2", LatticeSpec::RootLattice);
        let rep = validate_satake(&d, &[], &[1, 0]);
        assert!(!rep.pass());
        assert!(!rep.checks.iter().find(|(n, _, _)| n == "form-invariance").unwrap().1);
    }

    #[test]
    fn theta_is_involutive_isometry() {
        let d = datum("A3", LatticeSpec::WeightLattice);
        let diag = SatakeDiagram::new(d.clone(), vec![1], vec![2, 1, 0]).unwrap();
        let samples = [vec![1, 0, 0], vec![0, 1, 0], vec![1, -2, 3], vec![2, 1, 1]];
        for a in &samples {
            let qa = qw(a);
            assert_eq!(diag.theta_map(&diag.theta_map(&qa)), qa);
            for b in &samples {
                let qb = qw(b);
                assert_eq!(
                    d.bilinear(&diag.theta_map(&qa), &diag.theta_map(&qb)),
                    d.bilinear(&qa, &qb)
                );
            }
        }
    }

    #[test]
    fn diagonal_diagram() {
        let d = datum("A1xA1", LatticeSpec::WeightLattice);
        let rep = validate_satake(&d, &[], &[1, 0]);
        assert!(rep.pass(), "{rep}");
        let diag = SatakeDiagram::new(d, vec![], vec![1, 0]).unwrap();
        // z pairs multiply to 1 here since (alpha_r, delta) = 0 is integral
        assert_eq!(diag.z, vec![1, 1]);
        // fixed lattice of Theta(a,b) = (-b,-a): spanned by omega_1 - omega_2
        let fixed = diag.theta_fixed_sublattice();
        assert_eq!(fixed.len(), 1);
        assert!(fixed[0] == vec![1, -1] || fixed[0] == vec![-1, 1]);
    }

    #[test]
    fn weyl_dim_formula() {
        let a1 = datum("A1", LatticeSpec::WeightLattice);
        for n in 0..6 {
            assert_eq!(a1.weyl_dim(&vec![n]).unwrap(), (n + 1) as u64);
        }
        let a2 = datum("A2", LatticeSpec::WeightLattice);
        assert_eq!(a2.weyl_dim(&vec![1, 1]).unwrap(), 8);
        assert_eq!(a2.weyl_dim(&vec![1, 0]).unwrap(), 3);
        assert!(a2.weyl_dim(&vec![-1, 0]).is_err());
    }

    #[test]
    fn dominant_enumeration_respects_lattice() {
        let a1q = datum("A1", LatticeSpec::RootLattice);
        // F = Q: only even multiples of omega
        assert_eq!(a1q.dominant_weights_up_to(2), vec![vec![0], vec![2]]);
        let a1p = datum("A1", LatticeSpec::WeightLattice);
        assert_eq!(a1p.dominant_weights_up_to(2), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn explicit_lattice_between_q_and_p() {
        // For A1xA1 take F generated by Q and (1,-1)
        let spec = LatticeSpec::Generators(vec![vec![1, -1]]);
        let d = RootDatum::build("A1xA1", &spec).unwrap();
        assert!(d.in_lattice(&qw(&[1, -1])));
        assert!(d.in_lattice(&qw(&[2, 0])));
        assert!(!d.in_lattice(&qw(&[1, 0])));
    }
}
