//! Lefschetz decomposition, the forms q_ω and h_ω, the Hodge–Riemann
//! relations and signature tests.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{Element, GradedAlgebra, Subspace};
use crate::error::{Error, Result};
use crate::hodge::{validate_hodge, HodgeStructure};
use crate::linalg::{self, Inertia, Matrix};
use crate::scalar::{GaussRational, Rational};
use crate::spec::{element_to_spec, ElementSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LefschetzDegree {
    pub k: usize,
    pub dim: usize,
    pub rank: usize,
    pub isomorphism: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LefschetzReport {
    pub omega: ElementSpec,
    pub n: usize,
    pub degrees: Vec<LefschetzDegree>,
    pub primitive_dims: Vec<usize>,
    pub pass: bool,
}

impl LefschetzReport {
    pub fn first_failure(&self) -> Option<usize> {
        self.degrees.iter().find(|d| !d.isomorphism).map(|d| d.k)
    }
}

fn half_dimension(a: &GradedAlgebra, omega: &Element) -> Result<usize> {
    if a.is_truncated() {
        return Err(Error::Precondition(
            "Lefschetz checks need full mode".into(),
        ));
    }
    if omega.degree != 2 {
        return Err(Error::Dimension(format!(
            "ω has degree {}, expected 2",
            omega.degree
        )));
    }
    if a.dimension() % 2 == 1 {
        return Err(Error::Precondition(format!(
            "formal dimension {} is odd",
            a.dimension()
        )));
    }
    Ok(a.dimension() / 2)
}

/// Ranks of `∪ω^{n-k}: A^k → A^{2n-k}` for `k <= n`.
pub fn lefschetz_check(a: &GradedAlgebra, omega: &Element) -> Result<LefschetzReport> {
    let n = half_dimension(a, omega)?;
    let mut degrees = Vec::new();
    let mut primitive_dims = Vec::new();
    for k in 0..=n {
        let l = a.try_power(omega, n - k)?;
        let m = a.multiplication_matrix(&l, k)?;
        let rank = linalg::rank(&m);
        let dim = a.dim(k);
        degrees.push(LefschetzDegree {
            k,
            dim,
            rank,
            isomorphism: rank == dim && a.dim(2 * n - k) == dim,
        });
        primitive_dims.push(primitive_part(a, omega, k)?.dim());
    }
    let pass = degrees.iter().all(|d| d.isomorphism);
    Ok(LefschetzReport {
        omega: element_to_spec(a, omega),
        n,
        degrees,
        primitive_dims,
        pass,
    })
}

/// `A^k_prim = ker(∪ω^{n+1-k})`.
pub fn primitive_part(a: &GradedAlgebra, omega: &Element, k: usize) -> Result<Subspace<Rational>> {
    let n = half_dimension(a, omega)?;
    if k > n {
        return Err(Error::Dimension(format!(
            "primitive part needs k <= n = {n}"
        )));
    }
    let l = a.try_power(omega, n + 1 - k)?;
    let m = a.multiplication_matrix(&l, k)?;
    Ok(Subspace::new(k, a.dim(k), &linalg::kernel(&m)))
}

#[derive(Clone, Debug)]
pub struct LefschetzDecomposition {
    /// `(i, ω^i·A^{k-2i}_prim)` for `i = 0, 1, ...`.
    pub components: Vec<(usize, Subspace<Rational>)>,
    pub rank_deficit: usize,
}

impl LefschetzDecomposition {
    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(|(_, s)| s.dim()).collect()
    }
}

/// `A^k = ⊕_i ω^i·A^{k-2i}_prim`; a nonzero deficit signals that the
/// Lefschetz property fails.
pub fn lefschetz_decompose(
    a: &GradedAlgebra,
    omega: &Element,
    k: usize,
) -> Result<LefschetzDecomposition> {
    let mut components = Vec::new();
    for i in 0..=k / 2 {
        let prim = primitive_part(a, omega, k - 2 * i)?;
        let wi = a.try_power(omega, i)?;
        let imgs: Vec<Element> = prim
            .elements()
            .iter()
            .map(|x| a.try_mul(&wi, x))
            .collect::<Result<_>>()?;
        components.push((i, Subspace::from_elements(k, a.dim(k), &imgs)));
    }
    let total: usize = components.iter().map(|(_, s)| s.dim()).sum();
    let span = components
        .iter()
        .fold(Subspace::zero(k, a.dim(k)), |acc, (_, s)| acc.sum(s))
        .dim();
    let rank_deficit = a.dim(k) - span.min(a.dim(k)) + (total - span);
    if rank_deficit != 0 {
        return Err(Error::Precondition(format!(
            "Lefschetz decomposition of degree {k} has rank deficit {rank_deficit}"
        )));
    }
    Ok(LefschetzDecomposition {
        components,
        rank_deficit,
    })
}

/// Sign making `trace(ω^n)` positive; the orientation used by every form.
pub fn orientation(a: &GradedAlgebra, omega: &Element) -> Result<Rational> {
    let n = half_dimension(a, omega)?;
    let t = a.trace(&a.try_power(omega, n)?)?;
    if t.is_zero() {
        return Err(Error::Precondition("ω^n = 0".into()));
    }
    Ok(if t.is_positive() {
        Rational::one()
    } else {
        -Rational::one()
    })
}

/// `q_ω(α, β) = trace(ω^{n-k}·α·β)` on `A^k`, in the orientation where
/// `ω^n` is positive when ω^n ≠ 0.
pub fn q_form(a: &GradedAlgebra, omega: &Element, k: usize) -> Result<Matrix<Rational>> {
    let n = half_dimension(a, omega)?;
    if k > n {
        return Err(Error::Dimension(format!("q_ω needs k <= n = {n}")));
    }
    let sign = orientation(a, omega).unwrap_or_else(|_| Rational::one());
    let l = a.try_power(omega, n - k)?;
    let x = a.multiplication_matrix(&l, k)?; // dim(2n-k) x dim(k)
    let p = a.pairing_matrix(2 * n - k)?; // dim(2n-k) x dim(k)
    Ok(x.transpose().mul(&p).map(|v| v * &sign))
}

/// Basis of `ω^r·H^{p,q}_prim` inside degree `p+q+2r`.
pub fn primitive_piece_basis(
    h: &HodgeStructure,
    omega: &Element,
    p: usize,
    q: usize,
    r: usize,
) -> Result<Vec<Vec<GaussRational>>> {
    let a = h.algebra();
    let j = p + q;
    let prim = primitive_part(a, omega, j)?.complexify();
    let piece = h
        .piece(j, p, q)
        .cloned()
        .unwrap_or_else(|| Subspace::zero(j, a.dim(j)));
    let inter = prim.intersection(&piece);
    let wr = a.try_power(omega, r)?;
    let wr_dense: Vec<GaussRational> = wr.to_dense_as(a.dim(2 * r));
    inter
        .basis()
        .iter()
        .map(|v| a.mul_dense(2 * r, &wr_dense, j, v))
        .collect()
}

/// Gram matrix of `h_ω(α, β) = i^k q_ω(α, conj β)` between two lists of
/// vectors in degree k.
pub fn h_gram(
    a: &GradedAlgebra,
    omega: &Element,
    k: usize,
    left: &[Vec<GaussRational>],
    right: &[Vec<GaussRational>],
) -> Result<Matrix<GaussRational>> {
    let q = linalg::to_gauss(&q_form(a, omega, k)?);
    let ik = GaussRational::i_pow(k as i64);
    let rows = left
        .iter()
        .map(|u| {
            let qu = q.transpose().mul_vec(u);
            right
                .iter()
                .map(|v| {
                    let s = qu.iter().zip(v).fold(GaussRational::zero(), |acc, (x, y)| {
                        acc + x.clone() * y.conj()
                    });
                    ik.clone() * s
                })
                .collect()
        })
        .collect::<Vec<Vec<GaussRational>>>();
    Ok(Matrix::with_cols(right.len(), rows))
}

fn require_type_11(h: &HodgeStructure, omega: &Element) -> Result<()> {
    if !h.is_of_type(omega, 1, 1) {
        return Err(Error::Precondition("ω is not of type (1,1)".into()));
    }
    Ok(())
}

/// `h_ω` on `ω^r·H^{p,q}_prim`.
pub fn h_form(
    h: &HodgeStructure,
    omega: &Element,
    p: usize,
    q: usize,
    r: usize,
) -> Result<Matrix<GaussRational>> {
    require_type_11(h, omega)?;
    let a = h.algebra();
    let k = p + q + 2 * r;
    let n = half_dimension(a, omega)?;
    if k > n {
        return Err(Error::Dimension(format!("h_ω needs p+q+2r <= n = {n}")));
    }
    let b = primitive_piece_basis(h, omega, p, q, r)?;
    h_gram(a, omega, k, &b, &b)
}

/// `(−1)^{k(k−1)/2}(−1)^q`: the sign of `h_ω` on `ω^r·H^{p,q}_prim` in
/// degree `k = p+q+2r`, evaluated as `(−1)^{k(k−1)/2}·ι^{p−q−k}·(−1)^r`.
pub fn predicted_sign(p: usize, q: usize, r: usize) -> i32 {
    let k = (p + q + 2 * r) as i64;
    let z = GaussRational::i_pow(p as i64 - q as i64 - k) * GaussRational::i_pow(2 * r as i64);
    assert!(z.is_real(), "sign constant must be real");
    let base = if (k * (k - 1) / 2) % 2 == 0 { 1 } else { -1 };
    let s = if z.re.is_positive() { base } else { -base };
    debug_assert_eq!(s, base * if q.is_multiple_of(2) { 1 } else { -1 });
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub k: usize,
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub dim: usize,
    pub inertia: Inertia,
    pub predicted_sign: i32,
    pub ok: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PolarizationVerdict {
    Polarized,
    NotPolarized,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarizationCheck {
    pub omega: ElementSpec,
    /// +1 when `trace(ω^n) > 0` in the stored fundamental class.
    pub orientation: i32,
    pub blocks: Vec<BlockRecord>,
    pub cross_blocks_orthogonal: bool,
    pub verdict: PolarizationVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<String>,
}

/// Checks that `h_ω` is definite of the predicted sign on every
/// `ω^r·H^{p,q}_prim` with `p+q+2r <= n`.
pub fn hodge_riemann_check(h: &HodgeStructure, omega: &Element) -> Result<PolarizationCheck> {
    let a = h.algebra();
    let lef = lefschetz_check(a, omega)?;
    if !lef.pass {
        return Err(Error::Precondition(format!(
            "Lefschetz property fails in degree {}",
            lef.first_failure().unwrap_or(0)
        )));
    }
    if !validate_hodge(h).valid {
        return Err(Error::Precondition("Hodge structure is not valid".into()));
    }
    require_type_11(h, omega)?;
    let n = lef.n;
    let orient = orientation(a, omega)?;
    let mut blocks = Vec::new();
    let mut cross_ok = true;
    for k in 0..=n {
        let mut bases: Vec<((usize, usize, usize), Vec<Vec<GaussRational>>)> = Vec::new();
        for r in 0..=k / 2 {
            let j = k - 2 * r;
            let pqs: Vec<(usize, usize)> = h.pieces(j).map(|(pq, _)| *pq).collect();
            for (p, q) in pqs {
                let b = primitive_piece_basis(h, omega, p, q, r)?;
                if !b.is_empty() {
                    bases.push(((p, q, r), b));
                }
            }
        }
        for (x, ((p, q, r), b)) in bases.iter().enumerate() {
            let gram = h_gram(a, omega, k, b, b)?;
            let inertia = linalg::hermitian_inertia(&gram)?;
            let sign = predicted_sign(*p, *q, *r);
            blocks.push(BlockRecord {
                k,
                p: *p,
                q: *q,
                r: *r,
                dim: b.len(),
                inertia,
                predicted_sign: sign,
                ok: inertia.is_definite_of_sign(sign),
            });
            for (_, other) in bases.iter().skip(x + 1) {
                if !h_gram(a, omega, k, b, other)?.is_zero() {
                    cross_ok = false;
                }
            }
        }
    }
    let first_violation = blocks.iter().find(|b| !b.ok).map(|b| {
        format!(
            "k={} (p,q)=({},{}) r={}: inertia {:?}, predicted sign {}",
            b.k,
            b.p,
            b.q,
            b.r,
            (b.inertia.pos, b.inertia.neg, b.inertia.null),
            b.predicted_sign
        )
    });
    let verdict = if first_violation.is_none() && cross_ok {
        PolarizationVerdict::Polarized
    } else {
        PolarizationVerdict::NotPolarized
    };
    Ok(PolarizationCheck {
        omega: element_to_spec(a, omega),
        orientation: if orient.is_positive() { 1 } else { -1 },
        blocks,
        cross_blocks_orthogonal: cross_ok,
        verdict,
        first_violation,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignatureVerdict {
    pub inertia: Inertia,
    pub tau: i64,
    pub abs_tau: i64,
    /// `Σ_i (−1)^i b_{2i}`.
    pub betti_alternating_sum: i64,
    pub pass: bool,
}

/// Compares `|τ|` of a middle form with `|Σ_i (−1)^i b_{2i}|`.
pub fn signature_formula_from_parts(
    middle: &Matrix<Rational>,
    even_betti: &[usize],
) -> Result<SignatureVerdict> {
    let inertia = linalg::signature(middle)?;
    let tau = inertia.signature();
    let alt: i64 = even_betti
        .iter()
        .enumerate()
        .map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) })
        .sum();
    Ok(SignatureVerdict {
        inertia,
        tau,
        abs_tau: tau.abs(),
        betti_alternating_sum: alt,
        pass: tau.abs() == alt.abs(),
    })
}

/// Necessary condition for a polarized trivial Hodge structure.
pub fn signature_formula_check(a: &GradedAlgebra) -> Result<SignatureVerdict> {
    if a.is_truncated() {
        return Err(Error::Precondition("signature needs full mode".into()));
    }
    if let Some(k) = (1..=a.dimension()).step_by(2).find(|&k| a.dim(k) > 0) {
        return Err(Error::Precondition(format!(
            "odd cohomology in degree {k}: the test does not apply"
        )));
    }
    if !a.dimension().is_multiple_of(4) {
        return Err(Error::Precondition(format!(
            "dimension {} is not divisible by 4",
            a.dimension()
        )));
    }
    let mid = a.dimension() / 2;
    let even: Vec<usize> = (0..=a.dimension()).step_by(2).map(|d| a.dim(d)).collect();
    signature_formula_from_parts(&a.pairing_matrix(mid)?, &even)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimpsonEntry {
    pub i: usize,
    pub odd_betti: usize,
    /// `h^{2i+1,2i+1}` when a Hodge structure is supplied, else `b_{4i+2}`.
    pub value: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimpsonVerdict {
    pub bigraded: bool,
    pub entries: Vec<SimpsonEntry>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
}

/// For `4i+2 <= n` with `b_{2i+1} ≠ 0`, a polarized structure needs
/// `h^{2i+1,2i+1} >= 2` (or `b_{4i+2} >= 2` without a Hodge structure).
pub fn simpson_lemma_check(a: &GradedAlgebra, hodge: Option<&HodgeStructure>) -> SimpsonVerdict {
    let n = a.dimension() / 2;
    let mut entries = Vec::new();
    let mut i = 0;
    while 4 * i + 2 <= n {
        let odd = a.dim(2 * i + 1);
        if odd > 0 {
            let value = match hodge {
                Some(h) => h
                    .piece(4 * i + 2, 2 * i + 1, 2 * i + 1)
                    .map_or(0, |s| s.dim()),
                None => a.dim(4 * i + 2),
            };
            entries.push(SimpsonEntry {
                i,
                odd_betti: odd,
                value,
                ok: value >= 2,
            });
        }
        i += 1;
    }
    let violation = entries.iter().find(|e| !e.ok).map(|e| {
        format!(
            "b_{} = {} but {} = {} < 2",
            2 * e.i + 1,
            e.odd_betti,
            if hodge.is_some() {
                format!("h^{{{0},{0}}}", 2 * e.i + 1)
            } else {
                format!("b_{}", 4 * e.i + 2)
            },
            e.value
        )
    });
    SimpsonVerdict {
        bigraded: hodge.is_some(),
        pass: violation.is_none(),
        entries,
        violation,
    }
}

/// Summand of an orthogonal middle-form decomposition.
#[derive(Clone, Debug)]
pub enum MiddleBlock {
    Form(Matrix<Rational>),
    /// `[[0, I_d], [I_d, 0]]`.
    Hyperbolic(usize),
    Negated(Matrix<Rational>),
}

pub fn hyperbolic(d: usize) -> Matrix<Rational> {
    let data = (0..2 * d)
        .map(|r| vec![(if r < d { r + d } else { r - d }, Rational::one())])
        .collect();
    Matrix::from_sparse_rows(2 * d, 2 * d, data)
}

/// Orthogonal direct sum of the blocks.
pub fn assemble_middle_form(blocks: &[MiddleBlock]) -> Result<Matrix<Rational>> {
    let parts = blocks
        .iter()
        .map(|b| {
            let m = match b {
                MiddleBlock::Form(f) => f.clone(),
                MiddleBlock::Hyperbolic(d) => hyperbolic(*d),
                MiddleBlock::Negated(f) => f.neg(),
            };
            if !m.is_square() || !m.entries_equal(&m.transpose()) {
                return Err(Error::NotSymmetric);
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(linalg::block_diagonal(&parts))
}

/// Inertia counts keyed for reports.
pub fn inertia_map(i: &Inertia) -> BTreeMap<&'static str, usize> {
    BTreeMap::from([("pos", i.pos), ("neg", i.neg), ("null", i.null)])
}
