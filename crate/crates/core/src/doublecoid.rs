//! Drinfeld-double coideal D(B, I) in B-tensor-I normal form, Doi-Koppinen
//! modules on truncations of the coefficient algebra, the double
//! representation correspondence, and the cotensor product.

use std::collections::BTreeMap;

use crate::cqgdual::{AElem, CBlock, CoeffAlgebra, CqgError, Label};
use crate::exactq::Scalar;
use crate::linalg::{Echelon, Mat, SolveOutcome};
use crate::qsympair::{membership, CoidealPresentation, Membership, MonomialSpan, QsymError};
use crate::quantalg::{AlgElem, Word};
use crate::repnlab::evaluate;
use crate::rootdata::IWeight;

impl From<QsymError> for CqgError {
    fn from(e: QsymError) -> CqgError {
        match e {
            QsymError::Alg(a) => CqgError::Alg(a),
            QsymError::Repn(r) => CqgError::Repn(r),
        }
    }
}

/// Element of D(B, I) in normal form: a sum of (coefficient key, U-leg)
/// pairs with every scalar folded into the U-leg. The U-legs are general
/// algebra elements; their I-membership is certified lazily.
#[derive(Debug, Clone, Default)]
pub struct DblElem {
    pub terms: BTreeMap<(Label, usize, usize), AlgElem>,
}

impl DblElem {
    pub fn zero() -> DblElem {
        DblElem::default()
    }

    pub fn add_leg(&mut self, key: (Label, usize, usize), u: &AlgElem) {
        if u.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_insert_with(AlgElem::zero);
        *slot = slot.add(u);
    }

    pub fn add(&self, rhs: &DblElem) -> DblElem {
        let mut out = self.clone();
        for (k, u) in &rhs.terms {
            out.add_leg(k.clone(), u);
        }
        out.prune();
        out
    }

    pub fn sub(&self, rhs: &DblElem) -> DblElem {
        let mut out = self.clone();
        for (k, u) in &rhs.terms {
            out.add_leg(k.clone(), &u.scale(&-&Scalar::one()));
        }
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.terms.retain(|_, u| !u.is_zero());
    }
}

pub fn dbl_one(alg: &CoeffAlgebra) -> DblElem {
    dbl_from_b(&alg.one())
}

/// Embed a coefficient-algebra element as B-leg with trivial U-leg.
pub fn dbl_from_b(b: &AElem) -> DblElem {
    let mut out = DblElem::zero();
    for (k, c) in &b.terms {
        out.add_leg(k.clone(), &AlgElem::one().scale(c));
    }
    out.prune();
    out
}

/// Embed an algebra element as U-leg with trivial B-leg.
pub fn dbl_from_u(alg: &CoeffAlgebra, u: &AlgElem) -> DblElem {
    let zero = vec![0i64; alg.pres.datum.rank];
    let mut out = DblElem::zero();
    out.add_leg((Label::V(zero), 0, 0), u);
    out.prune();
    out
}

fn key_elem(key: &(Label, usize, usize)) -> AElem {
    let mut a = AElem::zero();
    a.add_term(key.clone(), &Scalar::one());
    a
}

/// Interchange `u b = tau(b_(1), u_(-1)) b_(0) u_(0)` with
/// `Delta_U(u) = u_(-1) tensor u_(0)` and `Delta_A(b) = b_(0) tensor b_(1)`.
fn interchange(
    alg: &CoeffAlgebra,
    u: &AlgElem,
    bkey: &(Label, usize, usize),
) -> Result<Vec<(AElem, AlgElem)>, CqgError> {
    let nf = alg.pres.normal_form(u)?;
    let cp = alg.pres.coproduct(&nf)?;
    let blegs = alg.coproduct(&key_elem(bkey))?;
    let mut out = Vec::new();
    for (legs, c) in &cp.terms {
        let uleft = AlgElem::from_word(legs[0].clone(), Scalar::one());
        for (b0, b1) in &blegs {
            let s = &alg.pairing(b1, &uleft)? * c;
            if s.is_zero() {
                continue;
            }
            out.push((
                b0.clone(),
                AlgElem::from_word(legs[1].clone(), s),
            ));
        }
    }
    Ok(out)
}

pub fn dbl_multiply(
    alg: &CoeffAlgebra,
    x: &DblElem,
    y: &DblElem,
) -> Result<DblElem, CqgError> {
    let mut out = DblElem::zero();
    for (k1, u1) in &x.terms {
        let b_left = key_elem(k1);
        for (k2, u2) in &y.terms {
            for (b0, umid) in interchange(alg, u1, k2)? {
                let bnew = alg.product(&b_left, &b0)?;
                let unew = alg.pres.multiply(&umid, u2)?;
                for (key, cb) in &bnew.terms {
                    out.add_leg(key.clone(), &unew.scale(cb));
                }
            }
        }
    }
    out.prune();
    Ok(out)
}

/// `(b u)* = u* b*`, re-normalized to B-tensor-I form.
pub fn dbl_star(alg: &CoeffAlgebra, x: &DblElem) -> Result<DblElem, CqgError> {
    let mut out = DblElem::zero();
    for (k, u) in &x.terms {
        let ustar = alg.pres.star(u)?;
        let bstar = alg.star(&key_elem(k));
        let piece = dbl_multiply(alg, &dbl_from_u(alg, &ustar), &dbl_from_b(&bstar))?;
        out = out.add(&piece);
    }
    Ok(out)
}

/// Legwise equality of the canonicalized sums: for every normal U-word the
/// B-coefficient must vanish at pairing level.
pub fn dbl_equal(
    alg: &CoeffAlgebra,
    x: &DblElem,
    y: &DblElem,
    deg: usize,
) -> Result<bool, CqgError> {
    let d = x.sub(y);
    let mut by_word: BTreeMap<Word, AElem> = BTreeMap::new();
    for (k, u) in &d.terms {
        let nf = alg.pres.normal_form(u)?;
        for (w, c) in &nf.terms {
            let entry = by_word.entry(w.clone()).or_insert_with(AElem::zero);
            *entry = entry.add(&key_elem(k).scale(c));
        }
    }
    for b in by_word.values() {
        if !alg.equal(b, &AElem::zero(), deg)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Membership results for each collected U-leg of a normal form.
pub fn dbl_leg_memberships(
    alg: &CoeffAlgebra,
    span: &MonomialSpan,
    x: &DblElem,
) -> Result<Vec<((Label, usize, usize), Membership)>, CqgError> {
    let mut out = Vec::new();
    for (k, u) in &x.terms {
        out.push((k.clone(), membership(alg.pres, span, u)?));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Doi-Koppinen module on a truncation of A
// ---------------------------------------------------------------------------

/// Truncated A as a B-module C-comodule: carrier basis are the matrix
/// coefficients of irreducibles of height `<= h`, the action is left
/// multiplication compressed by the Haar Gram form, the coaction is
/// `(id tensor pi_C) Delta_A`.
pub struct DKModule {
    pub height: i64,
    pub basis: Vec<(IWeight, usize, usize)>,
    pub elems: Vec<AElem>,
    pub b_gens: Vec<AElem>,
    pub gram: Mat,
}

pub fn build_dk_module(
    alg: &CoeffAlgebra,
    cp: &CoidealPresentation,
    h: i64,
    b_height: i64,
) -> Result<DKModule, CqgError> {
    let mut basis = Vec::new();
    let mut elems = Vec::new();
    for lam in alg.pres.datum.dominant_weights_up_to(h) {
        let n = alg.dim(&Label::V(lam.clone()))?;
        for i in 0..n {
            for j in 0..n {
                basis.push((lam.clone(), i, j));
                elems.push(alg.matrix_coeff(Label::V(lam.clone()), i, j));
            }
        }
    }
    let mut b_gens = vec![alg.one()];
    for lam in alg.pres.datum.dominant_weights_up_to(b_height) {
        if lam.iter().all(|c| *c == 0) {
            continue;
        }
        b_gens.extend(crate::cqgdual::homspace_b(alg, cp, &lam, 2)?);
    }
    let dim = elems.len();
    let mut gram = Mat::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let p = alg.product(&alg.star(&elems[i]), &elems[j])?;
            gram[(i, j)] = alg.haar(&p)?;
        }
    }
    Ok(DKModule { height: h, basis, elems, b_gens, gram })
}

/// All words over the coideal generators up to length `d`, as elements.
pub fn i_monomials(cp: &CoidealPresentation, d: usize) -> Vec<AlgElem> {
    let mut out = vec![AlgElem::one()];
    let mut layer = vec![AlgElem::one()];
    for _ in 0..d {
        let mut next = Vec::new();
        for w in &layer {
            for (_, g) in &cp.generators {
                next.push(w.free_mul(g));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Pairing evaluations with a per-label matrix cache.
struct TauCache<'b, 'a> {
    alg: &'b CoeffAlgebra<'a>,
    mats: BTreeMap<(Label, usize), Mat>,
}

impl<'b, 'a> TauCache<'b, 'a> {
    fn new(alg: &'b CoeffAlgebra<'a>) -> TauCache<'b, 'a> {
        TauCache { alg, mats: BTreeMap::new() }
    }

    fn tau(
        &mut self,
        a: &AElem,
        xi: usize,
        x: &AlgElem,
    ) -> Result<Scalar, CqgError> {
        let mut out = Scalar::zero();
        for ((l, i, j), c) in &a.terms {
            let key = (l.clone(), xi);
            if !self.mats.contains_key(&key) {
                let m = self.alg.gram(l)?.0.matmul(&self.alg.act(l, x)?);
                self.mats.insert(key.clone(), m);
            }
            out = &out + &(c * &self.mats[&key][(*i, *j)]);
        }
        Ok(out)
    }
}

/// Exact Doi-Koppinen compatibility on one pair, with the coproduct legs of
/// `b` supplied explicitly so mutated structure constants can be rejected:
/// compares `(id tensor pi_C) Delta_A(b v)` against
/// `sum (b_(1) v_(1)) tensor pi_C(b_(2) v_(2))` as tables over
/// (U-monomial, I-monomial) pairs. Returns the first mismatch witness.
pub fn dk_compat_witness(
    alg: &CoeffAlgebra,
    b: &AElem,
    b_legs: &[(AElem, AElem)],
    v: &AElem,
    umonos: &[AlgElem],
    imonos: &[AlgElem],
) -> Result<Option<(usize, usize)>, CqgError> {
    let mut cache = TauCache::new(alg);
    let bv = alg.product(b, v)?;
    let lhs_legs = alg.coproduct(&bv)?;
    let v_legs = alg.coproduct(v)?;
    for (xi, x) in umonos.iter().enumerate() {
        for (mi, m) in imonos.iter().enumerate() {
            let mut lhs = Scalar::zero();
            for (z1, z2) in &lhs_legs {
                let t1 = cache.tau(z1, xi, x)?;
                if t1.is_zero() {
                    continue;
                }
                lhs = &lhs + &(&t1 * &cache.tau(z2, umonos.len() + mi, m)?);
            }
            let mut rhs = Scalar::zero();
            for (b1, b2) in b_legs {
                for (v1, v2) in &v_legs {
                    let t1 = cache.tau(&alg.product(b1, v1)?, xi, x)?;
                    if t1.is_zero() {
                        continue;
                    }
                    let t2 = cache.tau(&alg.product(b2, v2)?, umonos.len() + mi, m)?;
                    rhs = &rhs + &(&t1 * &t2);
                }
            }
            if !(&lhs - &rhs).is_zero() {
                return Ok(Some((xi, mi)));
            }
        }
    }
    Ok(None)
}

pub struct CompatReport {
    /// (b index, v index, U-monomial index, I-monomial index) per failure.
    pub failures: Vec<(usize, usize, usize, usize)>,
    pub pairs_checked: usize,
}

impl CompatReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_dk_compat(
    alg: &CoeffAlgebra,
    cp: &CoidealPresentation,
    module: &DKModule,
    du: usize,
    di: usize,
) -> Result<CompatReport, CqgError> {
    let umonos = alg.monomials(du);
    let imonos = i_monomials(cp, di);
    let mut failures = Vec::new();
    let mut pairs = 0;
    for (bi, b) in module.b_gens.iter().enumerate() {
        let legs = alg.coproduct(b)?;
        for (vi, v) in module.elems.iter().enumerate() {
            pairs += 1;
            if let Some((xi, mi)) = dk_compat_witness(alg, b, &legs, v, &umonos, &imonos)? {
                failures.push((bi, vi, xi, mi));
            }
        }
    }
    Ok(CompatReport { failures, pairs_checked: pairs })
}

// ---------------------------------------------------------------------------
// The double representation on the truncation
// ---------------------------------------------------------------------------

/// Blockwise action of `x in U` on the carrier: on the coefficients of
/// `V_lam` the canonical restricted-dual action is `U(i,j) -> sum_k
/// U(i,k) M(x)_{kj}`.
pub fn pi_hat(
    alg: &CoeffAlgebra,
    module: &DKModule,
    x: &AlgElem,
) -> Result<Mat, CqgError> {
    let dim = module.basis.len();
    let mut out = Mat::zeros(dim, dim);
    let mut offset = 0;
    while offset < dim {
        let lam = module.basis[offset].0.clone();
        let n = alg.dim(&Label::V(lam.clone()))?;
        let m = alg.act(&Label::V(lam), x)?;
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    out[(offset + i * n + k, offset + i * n + j)] = m[(k, j)].clone();
                }
            }
        }
        offset += n * n;
    }
    Ok(out)
}

/// Left multiplication by `b`, compressed onto the carrier by the Haar
/// Gram form (the Peter-Weyl isotypic projection onto heights `<= h`).
pub fn pi_b(
    alg: &CoeffAlgebra,
    module: &DKModule,
    b: &AElem,
) -> Result<Mat, CqgError> {
    let dim = module.basis.len();
    let mut rhs_cols = Mat::zeros(dim, dim);
    for j in 0..dim {
        let w = alg.product(b, &module.elems[j])?;
        for k in 0..dim {
            let p = alg.product(&alg.star(&module.elems[k]), &w)?;
            rhs_cols[(k, j)] = alg.haar(&p)?;
        }
    }
    let ginv = module
        .gram
        .inverse()
        .ok_or_else(|| CqgError::Decomposition("carrier Gram form is singular".into()))?;
    Ok(ginv.matmul(&rhs_cols))
}

/// Interchange relation as operators on the truncation:
/// `pi_hat(x) pi_b(b) = sum tau(b_(1), x_(1)) pi_b(b_(0)) pi_hat(x_(2))`.
pub fn correspondence_witness(
    alg: &CoeffAlgebra,
    module: &DKModule,
    b: &AElem,
    x: &AlgElem,
) -> Result<Option<Mat>, CqgError> {
    let lhs = pi_hat(alg, module, x)?.matmul(&pi_b(alg, module, b)?);
    let nf = alg.pres.normal_form(x)?;
    let cpx = alg.pres.coproduct(&nf)?;
    let blegs = alg.coproduct(b)?;
    let dim = module.basis.len();
    let mut rhs = Mat::zeros(dim, dim);
    for (legs, c) in &cpx.terms {
        let xleft = AlgElem::from_word(legs[0].clone(), Scalar::one());
        let xright = AlgElem::from_word(legs[1].clone(), Scalar::one());
        let hat = pi_hat(alg, module, &xright)?;
        for (b0, b1) in &blegs {
            let s = &alg.pairing(b1, &xleft)? * c;
            if s.is_zero() {
                continue;
            }
            rhs = rhs.add(&pi_b(alg, module, b0)?.matmul(&hat).scale(&s));
        }
    }
    let diff = lhs.sub(&rhs);
    Ok(if diff.is_zero() { None } else { Some(diff) })
}

pub struct CorrespondenceReport {
    pub identity_ok: bool,
    pub interchange_failures: Vec<(usize, usize)>,
    /// Per carrier block: (dim of the spanned pi-hat image, dim pi(I)).
    pub block_dims: Vec<(usize, usize)>,
}

impl CorrespondenceReport {
    pub fn pass(&self) -> bool {
        self.identity_ok
            && self.interchange_failures.is_empty()
            && self.block_dims.iter().all(|(a, b)| a == b)
    }
}

pub fn double_rep_correspondence(
    alg: &CoeffAlgebra,
    cp: &CoidealPresentation,
    module: &DKModule,
    di: usize,
) -> Result<CorrespondenceReport, CqgError> {
    let dim = module.basis.len();
    let identity_ok = pi_hat(alg, module, &AlgElem::one())?
        .sub(&Mat::identity(dim))
        .is_zero()
        && pi_b(alg, module, &alg.one())?.sub(&Mat::identity(dim)).is_zero();
    let mut interchange_failures = Vec::new();
    for (bi, b) in module.b_gens.iter().enumerate() {
        for (xi, (_, g)) in cp.generators.iter().enumerate() {
            if correspondence_witness(alg, module, b, g)?.is_some() {
                interchange_failures.push((bi, xi));
            }
        }
    }
    // faithfulness echo: on each block the pi-hat image of I-monomials
    // spans exactly pi(I)
    let imonos = i_monomials(cp, di);
    let mut block_dims = Vec::new();
    let mut offset = 0;
    while offset < dim {
        let lam = module.basis[offset].0.clone();
        let rep = alg.rep(&lam)?;
        let n = rep.dim;
        let mut ech = Echelon::new();
        let mut spanned = 0;
        for x in &imonos {
            let m = evaluate(alg.pres, x, &rep);
            let mut flat = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    flat.push(m[(i, j)].clone());
                }
            }
            if ech.insert(flat) {
                spanned += 1;
            }
        }
        let image = crate::qsympair::image_subalgebra(alg.pres, cp, &rep).len();
        block_dims.push((spanned, image));
        offset += n * n;
    }
    Ok(CorrespondenceReport { identity_ok, interchange_failures, block_dims })
}

/// Ordinary Drinfeld-double commutation, checked for the diagonal diagram:
/// `pi_hat(x) pi_b(h) = sum tau(S^{-1}(h_(1)), x_(3)) pi_b(h_(2))
/// pi_hat(x_(2)) tau(h_(3), x_(1))`.
pub fn diagonal_double_witness(
    alg: &CoeffAlgebra,
    module: &DKModule,
    h: &AElem,
    x: &AlgElem,
) -> Result<Option<Mat>, CqgError> {
    let pres = alg.pres;
    let lhs = pi_hat(alg, module, x)?.matmul(&pi_b(alg, module, h)?);
    // Delta^2 on both sides
    let nf = pres.normal_form(x)?;
    let x2 = pres.coproduct_leg(&pres.coproduct(&nf)?, 1)?;
    let mut h_triples: Vec<(AElem, AElem, AElem)> = Vec::new();
    for (h1, hrest) in alg.coproduct(h)? {
        for (h2, h3) in alg.coproduct(&hrest)? {
            h_triples.push((h1.clone(), h2, h3));
        }
    }
    // group scalar weights by the middle legs to keep the matrix work small
    let mut weights: BTreeMap<(usize, Word), Scalar> = BTreeMap::new();
    let mut mid_b: Vec<AElem> = Vec::new();
    let key_of = |a: &AElem, store: &mut Vec<AElem>| -> usize {
        for (i, e) in store.iter().enumerate() {
            if e.terms == a.terms {
                return i;
            }
        }
        store.push(a.clone());
        store.len() - 1
    };
    for (legs, c) in &x2.terms {
        let x1 = AlgElem::from_word(legs[0].clone(), Scalar::one());
        let x3 = AlgElem::from_word(legs[2].clone(), Scalar::one());
        // S^{-1} = * o S o *
        let sinv_x3 = pres.star(&pres.antipode(&pres.star(&x3)?)?)?;
        for (h1, h2, h3) in &h_triples {
            let t1 = alg.pairing(h1, &sinv_x3)?;
            if t1.is_zero() {
                continue;
            }
            let t2 = alg.pairing(h3, &x1)?;
            if t2.is_zero() {
                continue;
            }
            let s = &(&t1 * &t2) * c;
            let bi = key_of(h2, &mut mid_b);
            let entry = weights
                .entry((bi, legs[1].clone()))
                .or_insert_with(Scalar::zero);
            *entry = &*entry + &s;
        }
    }
    let dim = module.basis.len();
    let mut rhs = Mat::zeros(dim, dim);
    for ((bi, w), s) in &weights {
        if s.is_zero() {
            continue;
        }
        let hat = pi_hat(alg, module, &AlgElem::from_word(w.clone(), Scalar::one()))?;
        rhs = rhs.add(&pi_b(alg, module, &mid_b[*bi])?.matmul(&hat).scale(s));
    }
    let diff = lhs.sub(&rhs);
    Ok(if diff.is_zero() { None } else { Some(diff) })
}

// ---------------------------------------------------------------------------
// Cotensor product
// ---------------------------------------------------------------------------

/// Finite-dimensional comodule over a CBlock coalgebra, presented by the
/// per-coordinate coefficient matrices: for a right comodule
/// `delta(e_a) = sum_p e_p tensor c_{pa}` and `coeffs[t][(p, a)] = c_{pa}[t]`;
/// for a left comodule `delta(e_b) = sum_r c_{rb} tensor e_r` with
/// `coeffs[t][(r, b)] = c_{rb}[t]`.
pub struct Comodule {
    pub dim: usize,
    pub coeffs: Vec<Mat>,
}

/// Kernel of `delta_M tensor id - id tensor delta_N` on `M tensor N`:
/// solutions of `C^M_t Z = Z (C^N_t)^T` for every coordinate `t`.
pub fn cotensor(m: &Comodule, n: &Comodule) -> Result<Vec<Vec<Scalar>>, CqgError> {
    if m.coeffs.len() != n.coeffs.len() {
        return Err(CqgError::Decomposition(
            "comodules over different coalgebras".into(),
        ));
    }
    let (dm, dn) = (m.dim, n.dim);
    let cdim = m.coeffs.len();
    let mut rows = Mat::zeros(cdim * dm * dn, dm * dn);
    for t in 0..cdim {
        for p in 0..dm {
            for r in 0..dn {
                let row = t * dm * dn + p * dn + r;
                for a in 0..dm {
                    rows[(row, a * dn + r)] =
                        &rows[(row, a * dn + r)] + &m.coeffs[t][(p, a)];
                }
                for bcol in 0..dn {
                    rows[(row, p * dn + bcol)] =
                        &rows[(row, p * dn + bcol)] - &n.coeffs[t][(r, bcol)];
                }
            }
        }
    }
    Ok(rows.nullspace())
}

/// Multiplication structure constants of `pi(I)` in the CBlock basis:
/// `b_i b_j = sum_k m[k][(i, j)] b_k`.
pub fn structure_constants(block: &CBlock) -> Result<Vec<Mat>, CqgError> {
    let mdim = block.dim();
    let n = block.basis[0].rows;
    let mut cols = Mat::zeros(n * n, mdim);
    for (k, b) in block.basis.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                cols[(i * n + j, k)] = b[(i, j)].clone();
            }
        }
    }
    let mut out = vec![Mat::zeros(mdim, mdim); mdim];
    for (i, bi) in block.basis.iter().enumerate() {
        for (j, bj) in block.basis.iter().enumerate() {
            let prod = bi.matmul(bj);
            let mut rhs = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    rhs.push(prod[(a, b)].clone());
                }
            }
            match cols.solve(&rhs) {
                SolveOutcome::Unique(sol) | SolveOutcome::NonUnique(sol) => {
                    for (k, c) in sol.into_iter().enumerate() {
                        out[k][(i, j)] = c;
                    }
                }
                SolveOutcome::Inconsistent => {
                    return Err(CqgError::Decomposition(
                        "pi(I) is not closed under multiplication".into(),
                    ))
                }
            }
        }
    }
    Ok(out)
}

/// The coalgebra as a right comodule over itself: on the dual basis,
/// `delta(f_k) = sum_i f_i tensor (sum_j m^k_{ij} f_j)`.
pub fn regular_right(block: &CBlock) -> Result<Comodule, CqgError> {
    let sc = structure_constants(block)?;
    let mdim = block.dim();
    let mut coeffs = vec![Mat::zeros(mdim, mdim); mdim];
    for k in 0..mdim {
        for i in 0..mdim {
            for t in 0..mdim {
                coeffs[t][(i, k)] = sc[k][(i, t)].clone();
            }
        }
    }
    Ok(Comodule { dim: mdim, coeffs })
}

/// The coalgebra as a left comodule over itself.
pub fn regular_left(block: &CBlock) -> Result<Comodule, CqgError> {
    let sc = structure_constants(block)?;
    let mdim = block.dim();
    let mut coeffs = vec![Mat::zeros(mdim, mdim); mdim];
    for k in 0..mdim {
        for j in 0..mdim {
            for t in 0..mdim {
                coeffs[t][(j, k)] = sc[k][(t, j)].clone();
            }
        }
    }
    Ok(Comodule { dim: mdim, coeffs })
}

/// Row coefficients of a representation as a right comodule over its
/// CBlock: `delta(U(i0, j)) = sum_k U(i0, k) tensor
/// sum_m (G^{-1})_{km} pi_C(U(m, j))`.
pub fn row_comodule(block: &CBlock) -> Result<Comodule, CqgError> {
    let n = block.gram.rows;
    let ginv = block
        .gram
        .inverse()
        .ok_or_else(|| CqgError::Decomposition("Gram form is singular".into()))?;
    let mdim = block.dim();
    let mut coeffs = vec![Mat::zeros(n, n); mdim];
    for j in 0..n {
        for k in 0..n {
            for m in 0..n {
                let pc = block.project(m, j);
                for t in 0..mdim {
                    coeffs[t][(k, j)] = &coeffs[t][(k, j)] + &(&ginv[(k, m)] * &pc[t]);
                }
            }
        }
    }
    Ok(Comodule { dim: n, coeffs })
}

/// Column coefficients as a left comodule:
/// `delta(U(i, j0)) = sum_m (sum_k pi_C(U(i, k)) (G^{-1})_{km}) tensor U(m, j0)`.
pub fn column_comodule(block: &CBlock) -> Result<Comodule, CqgError> {
    let n = block.gram.rows;
    let ginv = block
        .gram
        .inverse()
        .ok_or_else(|| CqgError::Decomposition("Gram form is singular".into()))?;
    let mdim = block.dim();
    let mut coeffs = vec![Mat::zeros(n, n); mdim];
    for i in 0..n {
        for m in 0..n {
            for k in 0..n {
                let pc = block.project(i, k);
                for t in 0..mdim {
                    coeffs[t][(m, i)] = &coeffs[t][(m, i)] + &(&pc[t] * &ginv[(k, m)]);
                }
            }
        }
    }
    Ok(Comodule { dim: n, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cqgdual::{homspace_b, quotient_block};
    use crate::linalg::cholesky;
    use crate::qsympair::{coideal_generators, invariant_vectors, monomial_span};
    use crate::quantalg::{make_uq, Presentation};
    use crate::repnlab::{build_irrep, separating_set_greedy};
    use crate::rootdata::{LatticeSpec, RootDatum, SatakeDiagram};
    use std::rc::Rc;

    fn a1_setup() -> Presentation {
        let datum = Rc::new(RootDatum::build("A1", &LatticeSpec::WeightLattice).unwrap());
        let mut pres = make_uq(datum);
        pres.complete_serre(6);
        pres
    }

    fn a1_pair(pres: &Presentation) -> CoidealPresentation {
        let diagram = SatakeDiagram::new(pres.datum.clone(), vec![], vec![0]).unwrap();
        let sep = separating_set_greedy(pres, 2, 0, 2).unwrap();
        coideal_generators(pres, &diagram, &sep).unwrap()
    }

    fn a1a1_setup() -> Presentation {
        let datum = Rc::new(RootDatum::build("A1xA1", &LatticeSpec::WeightLattice).unwrap());
        let mut pres = make_uq(datum);
        pres.complete_serre(6);
        pres
    }

    fn a1a1_pair(pres: &Presentation) -> CoidealPresentation {
        let diagram = SatakeDiagram::new(pres.datum.clone(), vec![], vec![1, 0]).unwrap();
        let sep = separating_set_greedy(pres, 2, 0, 2).unwrap();
        coideal_generators(pres, &diagram, &sep).unwrap()
    }

    #[test]
    fn unit_is_neutral() {
        let pres = a1_setup();
        let cp = a1_pair(&pres);
        let alg = CoeffAlgebra::new(&pres);
        let b = homspace_b(&alg, &cp, &vec![2], 2).unwrap().remove(0);
        let bgen = cp.generator(&crate::qsympair::GenLabel::B(0)).unwrap().clone();
        let mut x = dbl_from_b(&b);
        x = dbl_multiply(&alg, &x, &dbl_from_u(&alg, &bgen)).unwrap();
        let one = dbl_one(&alg);
        let left = dbl_multiply(&alg, &one, &x).unwrap();
        let right = dbl_multiply(&alg, &x, &one).unwrap();
        assert!(dbl_equal(&alg, &left, &x, 2).unwrap());
        assert!(dbl_equal(&alg, &right, &x, 2).unwrap());
    }

    #[test]
    fn interchange_matches_manual_expansion() {
        let pres = a1_setup();
        let cp = a1_pair(&pres);
        let alg = CoeffAlgebra::new(&pres);
        let b = homspace_b(&alg, &cp, &vec![2], 2).unwrap().remove(0);
        let bgen = cp.generator(&crate::qsympair::GenLabel::B(0)).unwrap().clone();
        let prod = dbl_multiply(&alg, &dbl_from_u(&alg, &bgen), &dbl_from_b(&b)).unwrap();
        // manual route through Delta(B) = B tensor 1 + K_alpha tensor B
        let kalpha = AlgElem::gen_k(pres.datum.alpha(0));
        let mut manual = DblElem::zero();
        for (b0, b1) in alg.coproduct(&b).unwrap() {
            let c_b = alg.pairing(&b1, &bgen).unwrap();
            let c_k = alg.pairing(&b1, &kalpha).unwrap();
            for (k, c) in &b0.terms {
                manual.add_leg(k.clone(), &AlgElem::one().scale(&(&c_b * c)));
                manual.add_leg(k.clone(), &bgen.scale(&(&c_k * c)));
            }
        }
        assert!(dbl_equal(&alg, &prod, &manual, 2).unwrap());
        // collected U-legs certify membership in I
        let span = monomial_span(&pres, &cp, 2, 0).unwrap();
        for (_, m) in dbl_leg_memberships(&alg, &span, &prod).unwrap() {
            assert!(m.is_certified());
        }
    }

    #[test]
    fn star_is_involutive_and_flips() {
        let pres = a1_setup();
        let cp = a1_pair(&pres);
        let alg = CoeffAlgebra::new(&pres);
        let b = homspace_b(&alg, &cp, &vec![2], 2).unwrap().remove(0);
        let bgen = cp.generator(&crate::qsympair::GenLabel::B(0)).unwrap().clone();
        // (b, 1)* = (b*, 1)
        let bstar = dbl_star(&alg, &dbl_from_b(&b)).unwrap();
        assert!(dbl_equal(&alg, &bstar, &dbl_from_b(&alg.star(&b)), 2).unwrap());
        // (1, B)* = (1, -B) since B* = -B
        let ustar = dbl_star(&alg, &dbl_from_u(&alg, &bgen)).unwrap();
        let minus_b = dbl_from_u(&alg, &bgen.scale(&-&Scalar::one()));
        assert!(dbl_equal(&alg, &ustar, &minus_b, 2).unwrap());
        // involutive on a mixed element
        let x = dbl_multiply(&alg, &dbl_from_b(&b), &dbl_from_u(&alg, &bgen)).unwrap();
        let xss = dbl_star(&alg, &dbl_star(&alg, &x).unwrap()).unwrap();
        assert!(dbl_equal(&alg, &xss, &x, 2).unwrap());
    }

    #[test]
    fn multiplication_is_associative() {
        let pres = a1_setup();
        let cp = a1_pair(&pres);
        let alg = CoeffAlgebra::new(&pres);
        let b = homspace_b(&alg, &cp, &vec![2], 2).unwrap().remove(0);
        let bgen = cp.generator(&crate::qsympair::GenLabel::B(0)).unwrap().clone();
        let x = dbl_from_u(&alg, &bgen);
        let y = dbl_from_b(&b);
        let z = dbl_from_u(&alg, &bgen);
        let xy_z = dbl_multiply(&alg, &dbl_multiply(&alg, &x, &y).unwrap(), &z).unwrap();
        let x_yz = dbl_multiply(&alg, &x, &dbl_multiply(&alg, &y, &z).unwrap()).unwrap();
        assert!(dbl_equal(&alg, &xy_z, &x_yz, 2).unwrap());
    }

    #[test]
    fn dk_module_shape_and_gram() {
        let pres = a1_setup();
        let cp = a1_pair(&pres);
        let alg = CoeffAlgebra::new(&pres);
        let m0 = build_dk_module(&alg, &cp, 0, 2).unwrap();
        assert_eq!(m0.elems.len(), 1);
        let m1 = build_dk_module(&alg, &cp, 1, 2).unwrap();
        assert_eq!(m1.elems.len(), 5);
        // Gram positive definite at q0 = 0.5
        let g0 = m1.gram.specialize(0.5);
        assert!(cholesky(&g0, 1e-12).is_some());
        // and symmetric exactly
        assert!(m1.gram.sub(&m1.gram.transpose()).is_zero());
    }

    #[test]
    fn dk_compatibility_holds_and_rejects_mutants() {
        let pres = a1_setup();
        let cp = a1_pair(&pres);
        let alg = CoeffAlgebra::new(&pres);
        let module = build_dk_module(&alg, &cp, 1, 2).unwrap();
        let report = verify_dk_compat(&alg, &cp, &module, 1, 1).unwrap();
        assert!(report.pass(), "failures: {:?}", report.failures);
        assert_eq!(report.pairs_checked, module.b_gens.len() * 5);
        // perturb one structure constant of delta_B
        let b = &module.b_gens[1];
        let umonos = alg.monomials(1);
        let imonos = i_monomials(&cp, 1);
        let mut legs = alg.coproduct(b).unwrap();
        let q = Scalar::q_pow(1, 1);
        legs[0].1 = legs[0].1.scale(&(&Scalar::one() + &q));
        let witness =
            dk_compat_witness(&alg, b, &legs, &module.elems[1], &umonos, &imonos).unwrap();
        assert!(witness.is_some());
    }

    #[test]
    fn double_correspondence_on_the_truncation() {
        let pres = a1_setup();
        let cp = a1_pair(&pres);
        let alg = CoeffAlgebra::new(&pres);
        let module = build_dk_module(&alg, &cp, 1, 2).unwrap();
        let report = double_rep_correspondence(&alg, &cp, &module, 3).unwrap();
        assert!(report.identity_ok);
        assert!(report.interchange_failures.is_empty(), "{:?}", report.interchange_failures);
        // blocks carry pi(I) of dimensions 1 and 2
        assert_eq!(report.block_dims, vec![(1, 1), (2, 2)]);
        assert!(report.pass());
    }

    #[test]
    fn diagonal_case_matches_the_drinfeld_double() {
        let pres = a1a1_setup();
        let cp = a1a1_pair(&pres);
        let alg = CoeffAlgebra::new(&pres);
        let module = build_dk_module(&alg, &cp, 1, 2).unwrap();
        assert_eq!(module.elems.len(), 9);
        for b in &module.b_gens {
            for (_, g) in &cp.generators {
                let w = diagonal_double_witness(&alg, &module, b, g).unwrap();
                assert!(w.is_none());
            }
        }
    }

    #[test]
    fn cotensor_of_regular_comodules() {
        let pres = a1_setup();
        let cp = a1_pair(&pres);
        let alg = CoeffAlgebra::new(&pres);
        let rep = alg.rep(&vec![1]).unwrap();
        let block = quotient_block(&pres, &cp, &rep).unwrap();
        let m = regular_right(&block).unwrap();
        let n = regular_left(&block).unwrap();
        assert_eq!(cotensor(&m, &n).unwrap().len(), block.dim());
    }

    #[test]
    fn cotensor_with_trivial_comodule_gives_invariants() {
        let pres = a1_setup();
        let cp = a1_pair(&pres);
        let rep = build_irrep(&pres, &vec![2]).unwrap();
        let block = quotient_block(&pres, &cp, &rep).unwrap();
        assert_eq!(block.dim(), 3);
        // group-like functional: 1 on the identity, 0 on B and B^2
        assert!(block.basis[0].sub(&Mat::identity(3)).is_zero());
        let mut coeffs = Vec::new();
        for t in 0..3 {
            let mut c = Mat::zeros(1, 1);
            c[(0, 0)] = if t == 0 { Scalar::one() } else { Scalar::zero() };
            coeffs.push(c);
        }
        let m = Comodule { dim: 1, coeffs };
        let n = column_comodule(&block).unwrap();
        let inv = invariant_vectors(&pres, &cp, &rep);
        assert_eq!(cotensor(&m, &n).unwrap().len(), inv.len());
        assert_eq!(inv.len(), 1);
    }

    #[test]
    fn cotensor_row_column_regression() {
        let pres = a1_setup();
        let cp = a1_pair(&pres);
        let alg = CoeffAlgebra::new(&pres);
        let rep = alg.rep(&vec![1]).unwrap();
        let block = quotient_block(&pres, &cp, &rep).unwrap();
        let m = row_comodule(&block).unwrap();
        let n = column_comodule(&block).unwrap();
        let dim = cotensor(&m, &n).unwrap().len();
        assert_eq!(dim, 2);
    }
}
