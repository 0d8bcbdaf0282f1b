//! Dense matrices over the exact scalar field, plus the few numeric helpers
//! (Cholesky, Jacobi eigensolver) used for positivity spot-checks.

use crate::exactq::Scalar;
use num_rational::BigRational;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

pub enum SolveOutcome {
    Unique(Vec<Scalar>),
    NonUnique(Vec<Scalar>),
    Inconsistent,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(entries: &[Scalar]) -> Mat {
        let mut m = Mat::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, s: &Scalar) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    out[(i, j)] = &out[(i, j)] + &prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc = &acc + &(&self[(i, j)] * &v[j]);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn kron(&self, rhs: &Mat) -> Mat {
        let mut out = Mat::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self[(i, j)].is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        if rhs[(k, l)].is_zero() {
                            continue;
                        }
                        out[(i * rhs.rows + k, j * rhs.cols + l)] = &self[(i, j)] * &rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Size heuristic used to pick simple pivots during elimination.
    fn complexity(x: &Scalar) -> usize {
        format!("{x}").len()
    }

    /// Row-reduce in place; returns pivot columns. `augment` marks how many
    /// trailing columns are excluded from pivot selection.
    fn rref(&mut self, augment: usize) -> Vec<usize> {
        let pivot_cols_end = self.cols - augment;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..pivot_cols_end {
            // choose the structurally simplest nonzero pivot
            let mut best: Option<(usize, usize)> = None;
            for r in row..self.rows {
                if !self[(r, col)].is_zero() {
                    let c = Mat::complexity(&self[(r, col)]);
                    if best.map_or(true, |(_, bc)| c < bc) {
                        best = Some((r, c));
                    }
                }
            }
            let Some((prow, _)) = best else { continue };
            self.swap_rows(row, prow);
            let inv = self[(row, col)].inverse().unwrap();
            for j in col..self.cols {
                self[(row, j)] = &self[(row, j)] * &inv;
            }
            for r in 0..self.rows {
                if r != row && !self[(r, col)].is_zero() {
                    let factor = self[(r, col)].clone();
                    for j in col..self.cols {
                        let delta = &factor * &self[(row, j)];
                        self[(r, j)] = &self[(r, j)] - &delta;
                    }
                }
            }
            pivots.push(col);
            row += 1;
            if row == self.rows {
                break;
            }
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref(0).len()
    }

    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Scalar::one();
        }
        let pivots = aug.rref(n);
        if pivots.len() < n {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| aug[(i, n + j)].clone()))
    }

    /// Solve `self * x = b` for a single right-hand side.
    pub fn solve(&self, b: &[Scalar]) -> SolveOutcome {
        assert_eq!(self.rows, b.len());
        let mut aug = Mat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref(1);
        // consistency: no pivot row of the form [0 ... 0 | nonzero]
        for i in pivots.len()..self.rows {
            if !aug[(i, self.cols)].is_zero() {
                return SolveOutcome::Inconsistent;
            }
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (row, col) in pivots.iter().enumerate() {
            x[*col] = aug[(row, self.cols)].clone();
        }
        if pivots.len() == self.cols {
            SolveOutcome::Unique(x)
        } else {
            SolveOutcome::NonUnique(x)
        }
    }

    /// Basis of the right null space.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref(0);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::new();
        for f in &free {
            let mut v = vec![Scalar::zero(); self.cols];
            v[*f] = Scalar::one();
            for (row, col) in pivots.iter().enumerate() {
                v[*col] = -&m[(row, *f)];
            }
            basis.push(v);
        }
        basis
    }

    /// Exact rank at a rational sample point; a lower bound for the symbolic
    /// rank, so full rank at the sample certifies full symbolic rank.
    pub fn rank_at(&self, t: &BigRational) -> usize {
        let mut m: Vec<Vec<BigRational>> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self[(i, j)].eval_exact(t).expect("sample avoids poles"))
                    .collect()
            })
            .collect();
        rat_rank(&mut m)
    }

    pub fn specialize(&self, q0: f64) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self[(i, j)].specialize(q0).expect("no pole at sample"))
                    .collect()
            })
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

/// Rank of a rational matrix, destroying the input.
pub fn rat_rank(m: &mut [Vec<BigRational>]) -> usize {
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    let rows = m.len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|r| !m[*r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].recip();
        for j in col..cols {
            let v = &m[rank][j] * &inv;
            m[rank][j] = v;
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in col..cols {
                    let delta = &f * &m[rank][j];
                    m[r][j] -= delta;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Rank over `GF(p)`, destroying the input. A full-rank result lower-bounds
/// (hence certifies) the symbolic rank of any matrix it specializes.
pub fn gfp_rank(m: &mut [Vec<u64>], p: u64) -> usize {
    use crate::exactq::{mul_mod, pow_mod};
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    let rows = m.len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|r| m[*r][col] % p != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][col], p - 2, p);
        for j in col..cols {
            m[rank][j] = mul_mod(m[rank][j], inv, p);
        }
        for r in 0..rows {
            if r != rank && m[r][col] % p != 0 {
                let f = m[r][col];
                for j in col..cols {
                    let sub = mul_mod(f, m[rank][j], p);
                    m[r][j] = (m[r][j] + p - sub % p) % p;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Cholesky decomposition of a symmetric matrix; `None` when not positive
/// definite (within `eps` on the pivots).
pub fn cholesky(a: &[Vec<f64>], eps: f64) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= eps {
                    return None;
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// Eigenvalues and eigenvectors of a symmetric matrix via cyclic Jacobi.
/// Returns `(eigenvalues, columns)`.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for i in 0..n {
        v[i][i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-15 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eigs = (0..n).map(|i| m[i][i]).collect();
    (eigs, v)
}

/// Exact row echelon over the scalar field; tracks a basis of the span of
/// the inserted vectors.
pub struct Echelon {
    rows: Vec<(usize, Vec<Scalar>)>,
}

impl Default for Echelon {
    fn default() -> Echelon {
        Echelon::new()
    }
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon { rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the stored rows; store and report independence
    /// when a nonzero remainder survives.
    pub fn insert(&mut self, mut v: Vec<Scalar>) -> bool {
        loop {
            let pivot = match v.iter().position(|c| !c.is_zero()) {
                Some(p) => p,
                None => return false,
            };
            match self.rows.iter().find(|(p, _)| *p == pivot) {
                Some((_, row)) => {
                    let c = v[pivot].clone();
                    for (x, r) in v.iter_mut().zip(row) {
                        *x = &*x - &(&c * r);
                    }
                }
                None => {
                    let cinv = v[pivot].inverse().expect("pivot nonzero");
                    for x in v.iter_mut() {
                        *x = &*x * &cinv;
                    }
                    self.rows.push((pivot, v));
                    return true;
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Complex floating-point helpers for isotypic decompositions
// ---------------------------------------------------------------------------

/// Complex number as (re, im).
pub type C64 = (f64, f64);
/// Dense complex matrix.
pub type CMat = Vec<Vec<C64>>;

pub fn c_add(a: C64, b: C64) -> C64 {
    (a.0 + b.0, a.1 + b.1)
}

pub fn c_mul(a: C64, b: C64) -> C64 {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

pub fn c_conj(a: C64) -> C64 {
    (a.0, -a.1)
}

pub fn c_abs(a: C64) -> f64 {
    a.0.hypot(a.1)
}

pub fn cmat_zero(n: usize) -> CMat {
    vec![vec![(0.0, 0.0); n]; n]
}

pub fn cmat_id(n: usize) -> CMat {
    let mut m = cmat_zero(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = (1.0, 0.0);
    }
    m
}

pub fn cmat_mul(a: &CMat, b: &CMat) -> CMat {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    let mut out = vec![vec![(0.0, 0.0); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l] == (0.0, 0.0) {
                continue;
            }
            for j in 0..m {
                out[i][j] = c_add(out[i][j], c_mul(a[i][l], b[l][j]));
            }
        }
    }
    out
}

pub fn cmat_adjoint(a: &CMat) -> CMat {
    let n = a.len();
    let m = a[0].len();
    (0..m)
        .map(|i| (0..n).map(|j| c_conj(a[j][i])).collect())
        .collect()
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations: returns (eigenvalues, unitary with eigenvectors as columns).
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.len();
    let mut m = a.clone();
    let mut u = cmat_id(n);
    for _sweep in 0..200 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += c_abs(m[i][j]).powi(2);
            }
        }
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p][q];
                let r = c_abs(apq);
                if r < 1e-15 {
                    continue;
                }
                // step 1: phase the (p,q) entry real — column q by
                // conj(phase), row q by phase, tracking the same column
                // change on u
                let phase = (apq.0 / r, apq.1 / r);
                let pc = c_conj(phase);
                for k in 0..n {
                    m[k][q] = c_mul(m[k][q], pc);
                    u[k][q] = c_mul(u[k][q], pc);
                }
                for k in 0..n {
                    m[q][k] = c_mul(m[q][k], phase);
                }
                // step 2: real Jacobi rotation on the (p,q) plane
                let theta = (m[q][q].0 - m[p][p].0) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = (c * mkp.0 - s * mkq.0, c * mkp.1 - s * mkq.1);
                    m[k][q] = (s * mkp.0 + c * mkq.0, s * mkp.1 + c * mkq.1);
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = (c * mpk.0 - s * mqk.0, c * mpk.1 - s * mqk.1);
                    m[q][k] = (s * mpk.0 + c * mqk.0, s * mpk.1 + c * mqk.1);
                }
                for k in 0..n {
                    let (ukp, ukq) = (u[k][p], u[k][q]);
                    u[k][p] = (c * ukp.0 - s * ukq.0, c * ukp.1 - s * ukq.1);
                    u[k][q] = (s * ukp.0 + c * ukq.0, s * ukp.1 + c * ukq.1);
                }
            }
        }
    }
    let eigs = (0..n).map(|i| m[i][i].0).collect();
    (eigs, u)
}

/// Numeric rank of a complex matrix by Gaussian elimination with a
/// modulus threshold.
pub fn cmat_rank(a: &CMat, eps: f64) -> usize {
    let mut m = a.clone();
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut col = 0;
    while rank < rows && col < cols {
        let mut best = rank;
        for i in (rank + 1)..rows {
            if c_abs(m[i][col]) > c_abs(m[best][col]) {
                best = i;
            }
        }
        if c_abs(m[best][col]) < eps {
            col += 1;
            continue;
        }
        m.swap(rank, best);
        let inv = {
            let d = m[rank][col];
            let nn = d.0 * d.0 + d.1 * d.1;
            (d.0 / nn, -d.1 / nn)
        };
        for j in col..cols {
            m[rank][j] = c_mul(m[rank][j], inv);
        }
        for i in 0..rows {
            if i != rank && c_abs(m[i][col]) > 0.0 {
                let f = m[i][col];
                for j in col..cols {
                    let sub = c_mul(f, m[rank][j]);
                    m[i][j] = (m[i][j].0 - sub.0, m[i][j].1 - sub.1);
                }
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactq::qint;

    fn q() -> Scalar {
        Scalar::q_pow(1, 1)
    }

    #[test]
    fn inverse_and_solve() {
        let m = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => q(),
            (0, 1) => Scalar::one(),
            (1, 0) => Scalar::zero(),
            _ => qint(2, 1),
        });
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), Mat::identity(2));
        match m.solve(&[Scalar::one(), Scalar::zero()]) {
            SolveOutcome::Unique(x) => {
                assert_eq!(x[0], q().inverse().unwrap());
                assert_eq!(x[1], Scalar::zero());
            }
            _ => panic!("expected unique solution"),
        }
    }

    #[test]
    fn nullspace_of_singular() {
        // rows proportional by q
        let m = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Scalar::one(),
            (0, 1) => q(),
            (1, 0) => q(),
            _ => &q() * &q(),
        });
        assert_eq!(m.rank(), 1);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn rank_at_sample_agrees() {
        let m = Mat::from_fn(3, 3, |i, j| {
            if (i + j) % 2 == 0 {
                q().pow((i * j) as i64)
            } else {
                qint((i + j) as i64, 1)
            }
        });
        let t = num_rational::BigRational::new(3.into(), 5.into());
        assert_eq!(m.rank_at(&t), m.rank());
    }

    #[test]
    fn jacobi_recovers_spectrum() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let (mut eigs, _) = jacobi_eigen(&a);
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((eigs[0] - 1.0).abs() < 1e-10 && (eigs[1] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn cholesky_positive_definite() {
        assert!(cholesky(&[vec![2.0, 1.0], vec![1.0, 2.0]], 1e-12).is_some());
        assert!(cholesky(&[vec![1.0, 2.0], vec![2.0, 1.0]], 1e-12).is_none());
    }

    #[test]
    fn hermitian_eigen_recovers_spectrum() {
        // [[1, i],[-i, 1]] has eigenvalues 0 and 2
        let a: CMat = vec![
            vec![(1.0, 0.0), (0.0, 1.0)],
            vec![(0.0, -1.0), (1.0, 0.0)],
        ];
        let (mut eigs, u) = hermitian_eigen(&a);
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((eigs[0] - 0.0).abs() < 1e-10 && (eigs[1] - 2.0).abs() < 1e-10);
        // u is unitary: u* u = id
        let g = cmat_mul(&cmat_adjoint(&u), &u);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(c_abs(c_add(g[i][j], (-want, 0.0))) < 1e-10);
            }
        }
        // a u = u diag(eigs)
        let (ev, u) = hermitian_eigen(&a);
        let au = cmat_mul(&a, &u);
        for i in 0..2 {
            for j in 0..2 {
                let want = c_mul(u[i][j], (ev[j], 0.0));
                assert!(c_abs(c_add(au[i][j], (-want.0, -want.1))) < 1e-10);
            }
        }
    }

    #[test]
    fn exact_echelon_detects_dependence() {
        let mut e = Echelon::new();
        assert!(e.insert(vec![qint(1, 1), q()]));
        assert!(e.insert(vec![q(), qint(0, 1)]));
        assert!(!e.insert(vec![&qint(1, 1) + &q(), q()]));
        assert_eq!(e.dim(), 2);
    }

    #[test]
    fn cmat_rank_thresholds() {
        let a: CMat = vec![
            vec![(1.0, 0.0), (0.0, 1.0)],
            vec![(0.0, -1.0), (1.0, 0.0)],
        ];
        assert_eq!(cmat_rank(&a, 1e-9), 1);
    }
}
