//! Decision procedures: tangent-space certificates for components of
//! ring-defined subsets of degree 2, the even-rank test, the half-subspace
//! criterion, and the transfer of Hodge structures to tensor factors and to
//! the base of a projective bundle.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::{AlgebraMap, CheckStatus, Element, GradedAlgebra, Subspace};
use crate::builders::ProjectiveBundle;
use crate::comb::{binomial, rank_lex};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Solve};
use crate::polarization::{lefschetz_check, primitive_part};
use crate::scalar::{int, GaussRational, Rational};
use crate::spec::{element_to_spec, format_vector, ElementSpec};

const WITNESS_SEED: u64 = 0x5eed;
const RANDOM_WITNESSES: usize = 64;
const SWEEP_HEIGHT: i64 = 3;
const SWEEP_MAX_DIM: usize = 3;
/// Above this many monomials the containment `S ⊆ Z` is only sampled.
const CONTAINMENT_BUDGET: u64 = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "OBSTRUCTED")]
    Obstructed,
    /// Every sampled candidate failed; genericity evidence only.
    #[serde(rename = "OBSTRUCTED-HEURISTIC")]
    ObstructedHeuristic,
    #[serde(rename = "CLEAR")]
    Clear,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Obstructed => "OBSTRUCTED",
            Verdict::ObstructedHeuristic => "OBSTRUCTED-HEURISTIC",
            Verdict::Clear => "CLEAR",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }

    /// Matches `obstructed`, `obstructed-heuristic`, `clear`, `inconclusive`.
    pub fn matches(&self, expect: &str) -> bool {
        self.as_str().eq_ignore_ascii_case(expect.trim())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub test: String,
    pub verdict: Verdict,
    pub summary: String,
    pub certificate: serde_json::Value,
}

/// `Z ⊂ A²_C` cut out by ring equations.
#[derive(Clone, Debug)]
pub enum ZSpec {
    /// `{x : x^l = 0}`.
    PowerVanish { l: usize },
    /// `{x : π_*(x^r) = 0}`.
    GysinPowerVanish { r: usize, gysin: AlgebraMap },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZKind {
    PowerVanish { l: usize },
    GysinPowerVanish { r: usize },
}

impl ZSpec {
    pub fn kind(&self) -> ZKind {
        match self {
            ZSpec::PowerVanish { l } => ZKind::PowerVanish { l: *l },
            ZSpec::GysinPowerVanish { r, .. } => ZKind::GysinPowerVanish { r: *r },
        }
    }

    fn exponent(&self) -> usize {
        match self {
            ZSpec::PowerVanish { l } => *l,
            ZSpec::GysinPowerVanish { r, .. } => *r,
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            ZSpec::PowerVanish { l } if *l < 2 => Err(Error::Invalid(format!("power {l} < 2"))),
            ZSpec::GysinPowerVanish { r, gysin } if *r == 0 || gysin.shift > 0 => Err(
                Error::Invalid("Gysin map must lower degree and r must be positive".into()),
            ),
            _ => Ok(()),
        }
    }

    /// The defining equation applied to a product already formed.
    fn finish(&self, product: Element) -> Element {
        match self {
            ZSpec::PowerVanish { .. } => product,
            ZSpec::GysinPowerVanish { gysin, .. } => gysin.apply(&product),
        }
    }
}

fn require_degree_two(x: &Element) -> Result<()> {
    if x.degree != 2 {
        return Err(Error::Dimension(format!(
            "expected a class of degree 2, got degree {}",
            x.degree
        )));
    }
    Ok(())
}

pub fn membership(a: &GradedAlgebra, z: &ZSpec, x: &Element) -> Result<bool> {
    z.check()?;
    require_degree_two(x)?;
    Ok(z.finish(a.try_power(x, z.exponent())?).is_zero())
}

/// Matrix of `m ↦ F(p^{k−1}·m)` on degree 2, the differential of the
/// defining map up to the factor `k`.
fn differential(a: &GradedAlgebra, z: &ZSpec, p: &Element) -> Result<Matrix<Rational>> {
    let pk = a.try_power(p, z.exponent() - 1)?;
    Ok(match z {
        ZSpec::PowerVanish { .. } => a.multiplication_matrix(&pk, 2)?,
        ZSpec::GysinPowerVanish { r, gysin } => {
            let rows = gysin.matrix(2 * r).map_or(0, |m| m.rows());
            let cols: Vec<Vec<Rational>> = (0..a.dim(2))
                .map(|i| {
                    let y = a.try_mul(&pk, &Element::basis(2, i))?;
                    Ok(gysin.apply(&y).to_dense(rows))
                })
                .collect::<Result<_>>()?;
            Matrix::from_columns(rows, &cols)
        }
    })
}

/// Zariski tangent space of `Z` at a rational point `p`.
pub fn tangent_space(a: &GradedAlgebra, z: &ZSpec, p: &Element) -> Result<Subspace<Rational>> {
    if !membership(a, z, p)? {
        return Err(Error::Precondition(format!(
            "{} is not a point of Z",
            a.format_element(p)
        )));
    }
    Ok(Subspace::new(
        2,
        a.dim(2),
        &linalg::kernel(&differential(a, z, p)?),
    ))
}

/// Second-order test when `T_{Z,p}` exceeds `S` by one dimension. A
/// component `Z₁ ⊋ S` through `p` would be smooth at `p` with tangent space
/// `T`, so every `v ∈ T` starts an arc `p + tv + t²w + …` in `Z`, forcing
/// `F(p^{k−2}v²) ∈ Im(m ↦ F(p^{k−1}m))`. Returns the obstructing `v`.
fn second_order(
    a: &GradedAlgebra,
    z: &ZSpec,
    s: &Subspace<Rational>,
    tangent: &Subspace<Rational>,
    p: &Element,
) -> Result<Option<Element>> {
    if tangent.dim() != s.dim() + 1 || z.exponent() < 2 {
        return Ok(None);
    }
    let Some(v) = tangent
        .elements()
        .into_iter()
        .find(|v| !s.contains(&v.to_dense(a.dim(2))))
    else {
        return Ok(None);
    };
    let d = differential(a, z, p)?;
    let pk = a.try_power(p, z.exponent() - 2)?;
    let target = z.finish(a.try_mul(&pk, &a.try_mul(&v, &v)?)?);
    if target.is_zero() {
        return Ok(None);
    }
    Ok(match linalg::solve(&d, &target.to_dense(d.rows())) {
        Solve::Inconsistent => Some(v),
        Solve::Solution(_) => None,
    })
}

/// Whether every symmetric product of `exponent` basis vectors of `s`
/// satisfies the equation; by polarization this is `S ⊆ Z`.
fn containment(a: &GradedAlgebra, z: &ZSpec, s: &Subspace<Rational>) -> Result<(bool, bool)> {
    let basis = s.elements();
    let k = z.exponent();
    let count = binomial(basis.len() + k - 1, k);
    if count <= CONTAINMENT_BUDGET {
        fn walk(
            a: &GradedAlgebra,
            z: &ZSpec,
            basis: &[Element],
            start: usize,
            left: usize,
            prefix: &Element,
        ) -> Result<bool> {
            if left == 0 {
                return Ok(z.finish(prefix.clone()).is_zero());
            }
            for i in start..basis.len() {
                let next = a.try_mul(prefix, &basis[i])?;
                if !walk(a, z, basis, i, left - 1, &next)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        return Ok((walk(a, z, &basis, 0, k, &a.unit())?, true));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED);
    for _ in 0..RANDOM_WITNESSES {
        let x = random_combination(&basis, &mut rng);
        if !z.finish(a.try_power(&x, k)?).is_zero() {
            return Ok((false, true));
        }
    }
    Ok((true, false))
}

fn random_combination(basis: &[Element], rng: &mut ChaCha8Rng) -> Element {
    loop {
        let coefs: Vec<Rational> = basis
            .iter()
            .map(|_| int(rng.gen_range(-SWEEP_HEIGHT..=SWEEP_HEIGHT)))
            .collect();
        if coefs.iter().any(|c| !c.is_zero()) {
            return combine(basis, &coefs);
        }
    }
}

fn combine(basis: &[Element], coefs: &[Rational]) -> Element {
    let terms: Vec<(Rational, &Element)> = coefs.iter().cloned().zip(basis).collect();
    Element::combination(basis[0].degree, &terms)
}

/// Nonzero coefficient vectors of height at most `h`, by increasing height,
/// first nonzero entry positive.
fn sweep(dim: usize, h: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for height in 1..=h {
        let mut v = vec![-height; dim];
        loop {
            let max = v.iter().map(|x| x.abs()).max().unwrap_or(0);
            let lead = v.iter().find(|x| **x != 0).copied().unwrap_or(0);
            if max == height && lead > 0 {
                out.push(v.clone());
            }
            let mut k = 0;
            while k < dim {
                if v[k] < height {
                    v[k] += 1;
                    break;
                }
                v[k] = -height;
                k += 1;
            }
            if k == dim {
                break;
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ComponentVerdict {
    Component,
    /// `S ⊄ Z`, or the tangent space is too large at every point of a line
    /// (all points of `Q·a` are equivalent).
    NotComponent,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentCertificate {
    pub z: ZKind,
    pub subspace: Vec<ElementSpec>,
    pub dim: usize,
    pub contained: bool,
    /// False when containment was only sampled.
    pub containment_exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ElementSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangent_dim: Option<usize>,
    /// Tangent direction outside `S` that no arc of `Z` can follow, when
    /// the tangent space is one dimension too large.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_order: Option<ElementSpec>,
    pub points_tried: usize,
    pub verdict: ComponentVerdict,
    #[serde(skip)]
    pub span: Option<Subspace<Rational>>,
}

impl ComponentCertificate {
    pub fn is_component(&self) -> bool {
        self.verdict == ComponentVerdict::Component
    }
}

fn certificate_shell(a: &GradedAlgebra, s: &Subspace<Rational>, z: &ZSpec) -> ComponentCertificate {
    ComponentCertificate {
        z: z.kind(),
        subspace: s.elements().iter().map(|x| element_to_spec(a, x)).collect(),
        dim: s.dim(),
        contained: false,
        containment_exact: true,
        witness: None,
        tangent_dim: None,
        second_order: None,
        points_tried: 0,
        verdict: ComponentVerdict::Inconclusive,
        span: Some(s.clone()),
    }
}

fn check_span(a: &GradedAlgebra, s: &Subspace<Rational>) -> Result<()> {
    if s.degree != 2 || s.ambient_dim != a.dim(2) {
        return Err(Error::Dimension(
            "candidate component must be a subspace of degree 2".into(),
        ));
    }
    if s.dim() == 0 {
        return Err(Error::Invalid("candidate component is zero".into()));
    }
    Ok(())
}

/// Certifies `S` as an irreducible component of `Z` by a rational point of
/// `S` whose tangent space has dimension `dim S`. Never returns COMPONENT
/// unless `S ⊆ Z` was established exactly.
pub fn certify_component(
    a: &GradedAlgebra,
    s: &Subspace<Rational>,
    z: &ZSpec,
) -> Result<ComponentCertificate> {
    z.check()?;
    check_span(a, s)?;
    let mut cert = certificate_shell(a, s, z);
    let (contained, exact) = containment(a, z, s)?;
    cert.contained = contained;
    cert.containment_exact = exact;
    if !contained {
        cert.verdict = ComponentVerdict::NotComponent;
        return Ok(cert);
    }
    let basis = s.elements();
    let mut candidates: Vec<Element> = Vec::new();
    if basis.len() == 1 {
        candidates.push(basis[0].clone());
    } else {
        if basis.len() <= SWEEP_MAX_DIM {
            for v in sweep(basis.len(), SWEEP_HEIGHT) {
                let coefs: Vec<Rational> = v.into_iter().map(int).collect();
                candidates.push(combine(&basis, &coefs));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED);
        for _ in 0..RANDOM_WITNESSES {
            candidates.push(random_combination(&basis, &mut rng));
        }
    }
    let mut best: Option<(usize, Element)> = None;
    for p in candidates {
        cert.points_tried += 1;
        let tangent = tangent_space(a, z, &p)?;
        let t = tangent.dim();
        if t == s.dim() {
            best = Some((t, p));
            break;
        }
        if let Some(v) = second_order(a, z, s, &tangent, &p)? {
            cert.second_order = Some(element_to_spec(a, &v));
            best = Some((t, p));
            break;
        }
        if best.as_ref().is_none_or(|(b, _)| t < *b) {
            best = Some((t, p));
        }
    }
    if let Some((t, p)) = best {
        cert.tangent_dim = Some(t);
        cert.witness = Some(element_to_spec(a, &p));
        cert.verdict = judge(s.dim(), t, cert.second_order.is_some(), exact);
    }
    Ok(cert)
}

fn judge(dim: usize, tangent: usize, second_order: bool, exact: bool) -> ComponentVerdict {
    if (tangent == dim || second_order) && exact {
        ComponentVerdict::Component
    } else if dim == 1 && !second_order {
        ComponentVerdict::NotComponent
    } else {
        ComponentVerdict::Inconclusive
    }
}

/// Same certificate at a prescribed witness `p ∈ S`.
pub fn certify_at(
    a: &GradedAlgebra,
    s: &Subspace<Rational>,
    z: &ZSpec,
    p: &Element,
) -> Result<ComponentCertificate> {
    z.check()?;
    check_span(a, s)?;
    if !s.contains(&p.to_dense(a.dim(2))) {
        return Err(Error::Precondition(
            "witness does not lie in the subspace".into(),
        ));
    }
    let mut cert = certificate_shell(a, s, z);
    let (contained, exact) = containment(a, z, s)?;
    cert.contained = contained;
    cert.containment_exact = exact;
    cert.points_tried = 1;
    cert.witness = Some(element_to_spec(a, p));
    if !contained {
        cert.verdict = ComponentVerdict::NotComponent;
        return Ok(cert);
    }
    let tangent = tangent_space(a, z, p)?;
    let t = tangent.dim();
    cert.tangent_dim = Some(t);
    if t != s.dim() {
        cert.second_order = second_order(a, z, s, &tangent, p)?.map(|v| element_to_spec(a, &v));
    }
    cert.verdict = judge(s.dim(), t, cert.second_order.is_some(), exact);
    Ok(cert)
}

/// Subspace forced to be a sub-Hodge structure.
#[derive(Clone, Debug)]
pub enum Support {
    Certified(ComponentCertificate),
    /// Taken on trust from the caller.
    Asserted(Subspace<Rational>),
}

impl Support {
    fn span(&self) -> Option<&Subspace<Rational>> {
        match self {
            Support::Certified(c) => c.span.as_ref(),
            Support::Asserted(s) => Some(s),
        }
    }

    fn forced(&self) -> bool {
        match self {
            Support::Certified(c) => c.is_component(),
            Support::Asserted(_) => true,
        }
    }
}

/// Rank of `span(classes) ⊗ A^l → A^{k+l}` for odd `l`. An odd rank is an
/// obstruction once the span is known to be a sub-Hodge structure: it must
/// lie in the sum of the supports and either equal that sum or have only
/// one-dimensional supports (Hodge classes).
pub fn even_rank_test(
    a: &GradedAlgebra,
    classes: &[Element],
    supports: &[Support],
    l: usize,
) -> Result<ObstructionReport> {
    if l.is_multiple_of(2) {
        return Err(Error::Invalid(format!("l = {l} must be odd")));
    }
    let k = classes.first().map_or(0, |c| c.degree);
    if classes.iter().any(|c| c.degree != k) {
        return Err(Error::Dimension("forced classes of mixed degrees".into()));
    }
    if k % 2 == 1 {
        return Err(Error::Dimension(format!(
            "forced classes have odd degree {k}"
        )));
    }
    let rank = a.mult_image_rank(classes, l)?;
    let nk = a.dim(k);
    let span = Subspace::from_elements(k, nk, classes);
    let sum = supports
        .iter()
        .filter_map(Support::span)
        .fold(Subspace::zero(k, nk), |acc, s| acc.sum(s));
    let inside = span.basis().iter().all(|v| sum.contains(v));
    let lines = supports
        .iter()
        .all(|s| s.span().is_some_and(|x| x.dim() == 1));
    let sub_hodge = inside && (lines || span.same_span(&sum));
    let all_forced = supports.iter().all(Support::forced);
    let odd = rank % 2 == 1;
    let verdict = if !odd {
        Verdict::Clear
    } else if sub_hodge && all_forced && !supports.is_empty() {
        Verdict::Obstructed
    } else {
        Verdict::Inconclusive
    };
    let summary = match verdict {
        Verdict::Obstructed => format!(
            "product of the forced classes with degree {l} has odd rank {rank}: no real Hodge structure"
        ),
        Verdict::Clear => format!("rank {rank} is even"),
        _ => format!("rank {rank} is odd but the classes are not certified to span a sub-Hodge structure"),
    };
    let support_json: Vec<serde_json::Value> = supports
        .iter()
        .map(|s| match s {
            Support::Certified(c) => json!({"kind": "certified", "certificate": c}),
            Support::Asserted(s) => json!({
                "kind": "asserted",
                "span": s.elements().iter().map(|x| element_to_spec(a, x)).collect::<Vec<_>>(),
            }),
        })
        .collect();
    Ok(ObstructionReport {
        test: "even-rank".into(),
        verdict,
        summary,
        certificate: json!({
            "degree": k,
            "l": l,
            "rank": rank,
            "parity": if odd { "odd" } else { "even" },
            "classes": classes.iter().map(|c| element_to_spec(a, c)).collect::<Vec<_>>(),
            "span_is_sub_hodge": sub_hodge,
            "supports": support_json,
        }),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CondNum {
    pub n: u64,
    pub q: u64,
    pub q_prime: u64,
    /// `q ∈ {2q', 2q'+1}`.
    pub precondition: bool,
    /// `q' <= n(n-1)/2`.
    pub first: bool,
    /// `(q - q')(n(n-1)/2 - q') > n²`.
    pub second: bool,
    pub holds: bool,
}

pub fn condnum_predicate(n: u64, q: u64, q_prime: u64) -> CondNum {
    let (n_, q_, qp) = (n as i128, q as i128, q_prime as i128);
    let pairs = n_ * (n_ - 1) / 2;
    let precondition = q_ == 2 * qp || q_ == 2 * qp + 1;
    let first = qp <= pairs;
    let second = (q_ - qp) * (pairs - qp) > n_ * n_;
    CondNum {
        n,
        q,
        q_prime,
        precondition,
        first,
        second,
        holds: precondition && first && second,
    }
}

/// Number of generators `h` with `C(h,2) = cols`.
fn wedge_source(cols: usize) -> Result<usize> {
    (0..=2 * cols + 2)
        .find(|h| h * h.saturating_sub(1) / 2 == cols && *h >= 2 || (cols == 0 && *h == 0))
        .ok_or_else(|| Error::Dimension(format!("{cols} columns is not C(h,2) for any h")))
}

/// Gaussian-integer multiple of `v`, split into real and imaginary parts.
fn integral_parts(v: &[GaussRational]) -> (Vec<BigInt>, Vec<BigInt>) {
    let den = v
        .iter()
        .fold(BigInt::one(), |d, x| d.lcm(x.re.denom()).lcm(x.im.denom()));
    let part = |r: &Rational| r.numer() * (&den / r.denom());
    (
        v.iter().map(|x| part(&x.re)).collect(),
        v.iter().map(|x| part(&x.im)).collect(),
    )
}

/// `rank μ(∧²W)` for any spanning set of `W`, in integers: the images are
/// realified so the rank is taken over Q without fractions.
fn restricted_rank(mu: &Matrix<Rational>, gens: &[Vec<GaussRational>]) -> usize {
    let h = gens.first().map_or(0, Vec::len);
    let rows: Vec<Vec<(usize, BigInt)>> = mu
        .dense_rows()
        .iter()
        .map(|row| {
            let den = row.iter().fold(BigInt::one(), |d, x| d.lcm(x.denom()));
            row.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(k, x)| (k, x.numer() * (&den / x.denom())))
                .collect()
        })
        .collect();
    let parts: Vec<(Vec<BigInt>, Vec<BigInt>)> = gens.iter().map(|g| integral_parts(g)).collect();
    let mut real: Vec<Vec<Rational>> = Vec::new();
    for a in 0..parts.len() {
        for b in a + 1..parts.len() {
            let ((ur, ui), (vr, vi)) = (&parts[a], &parts[b]);
            let mut wr = vec![BigInt::zero(); h * (h - 1) / 2];
            let mut wi = wr.clone();
            for i in 0..h {
                for j in i + 1..h {
                    let k = rank_lex((1u64 << i) | (1u64 << j), h);
                    wr[k] = &ur[i] * &vr[j] - &ui[i] * &vi[j] - (&ur[j] * &vr[i] - &ui[j] * &vi[i]);
                    wi[k] = &ur[i] * &vi[j] + &ui[i] * &vr[j] - (&ur[j] * &vi[i] + &ui[j] * &vr[i]);
                }
            }
            let apply = |w: &[BigInt]| -> Vec<BigInt> {
                rows.iter()
                    .map(|row| {
                        row.iter()
                            .fold(BigInt::zero(), |acc, (k, c)| acc + c * &w[*k])
                    })
                    .collect()
            };
            let (re, im) = (apply(&wr), apply(&wi));
            let q = |x: &BigInt| Rational::from_integer(x.clone());
            real.push(re.iter().chain(im.iter()).map(q).collect());
            real.push(im.iter().map(|x| q(&-x)).chain(re.iter().map(q)).collect());
        }
    }
    linalg::rank_of_vectors(&real, 2 * mu.rows()) / 2
}

/// `rank μ|_{∧²W}` for `μ: ∧²H → Q`, given as a matrix on the lex pair basis.
pub fn half_subspace_verify(mu: &Matrix<Rational>, w: &Subspace<GaussRational>) -> Result<usize> {
    let h = wedge_source(mu.cols())?;
    if w.ambient_dim != h || 2 * w.dim() != h {
        return Err(Error::Dimension(format!(
            "W must have dimension {} in C^{h}, got {} in C^{}",
            h / 2,
            w.dim(),
            w.ambient_dim
        )));
    }
    Ok(restricted_rank(mu, w.basis()))
}

/// Generators of a random half-dimensional subspace of `C^h`.
fn random_half_subspace(h: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<GaussRational>> {
    loop {
        let vs: Vec<Vec<GaussRational>> = (0..h / 2)
            .map(|_| {
                (0..h)
                    .map(|_| GaussRational::from_ints(rng.gen_range(-5..=5), rng.gen_range(-5..=5)))
                    .collect()
            })
            .collect();
        if linalg::complex_rank(&vs, h) == h / 2 {
            return vs;
        }
    }
}

/// Looks for a half-dimensional `W` with `rank μ|_{∧²W} <= q'`, first among
/// `candidates`, then among `trials` random Gaussian-rational subspaces.
/// A witness clears the test; otherwise the verdict is heuristic at best.
pub fn half_subspace_search(
    mu: &Matrix<Rational>,
    candidates: &[Subspace<GaussRational>],
    trials: usize,
    seed: u64,
) -> Result<ObstructionReport> {
    let h = wedge_source(mu.cols())?;
    if h % 2 == 1 {
        return Err(Error::Dimension(format!("H has odd dimension {h}")));
    }
    let n = (h / 2) as u64;
    let q = linalg::rank(mu) as u64;
    let qp = q / 2;
    let cond = condnum_predicate(n, q, qp);
    let mut tried = 0;
    let mut min_rank: Option<usize> = None;
    let mut witness: Option<(String, Subspace<GaussRational>, usize)> = None;
    for (k, w) in candidates.iter().enumerate() {
        let r = half_subspace_verify(mu, w)?;
        tried += 1;
        min_rank = Some(min_rank.map_or(r, |m| m.min(r)));
        if r as u64 <= qp {
            witness = Some((format!("candidate {k}"), w.clone(), r));
            break;
        }
    }
    if witness.is_none() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in 0..trials {
            let gens = random_half_subspace(h, &mut rng);
            let r = restricted_rank(mu, &gens);
            tried += 1;
            min_rank = Some(min_rank.map_or(r, |m| m.min(r)));
            if r as u64 <= qp {
                witness = Some((format!("random trial {t}"), Subspace::new(1, h, &gens), r));
                break;
            }
        }
    }
    let (verdict, summary) = match (&witness, cond.holds) {
        (Some((src, _, r)), _) => (Verdict::Clear, format!("{src} has rank {r} <= q' = {qp}")),
        (None, true) => (
            Verdict::ObstructedHeuristic,
            format!("all {tried} sampled subspaces have rank > q' = {qp}; sampling is evidence, not proof"),
        ),
        (None, false) => (
            Verdict::Inconclusive,
            format!("no witness among {tried} subspaces and the dimension count does not apply"),
        ),
    };
    Ok(ObstructionReport {
        test: "half-subspace".into(),
        verdict,
        summary,
        certificate: json!({
            "n": n,
            "q": q,
            "q_prime": qp,
            "condnum": cond,
            "subspaces_tried": tried,
            "seed": seed,
            "min_rank": min_rank,
            "witness": witness.as_ref().map(|(src, w, r)| json!({
                "source": src,
                "rank": r,
                "basis": w.basis().iter().map(|v| format_vector(v)).collect::<Vec<_>>(),
            })),
        }),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub lemma: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuRecord {
    pub factor: String,
    pub n: usize,
    pub s: usize,
    pub i: usize,
    pub nu: String,
    pub pairs: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorSplitReport {
    pub omega: ElementSpec,
    /// Lefschetz property of `(M, ω)`, assumed by the argument.
    pub omega_lefschetz: bool,
    pub a: ElementSpec,
    pub b: ElementSpec,
    pub dims: (usize, usize),
    pub checks: Vec<LemmaCheck>,
    pub nu: Vec<NuRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_lemma: Option<String>,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct TensorSplit {
    /// `ω = a ⊗ 1 + 1 ⊗ b`.
    pub a: Element,
    pub b: Element,
    pub report: TensorSplitReport,
}

impl TensorSplitReport {
    pub fn to_report(&self) -> ObstructionReport {
        let (verdict, summary) = match &self.failed_lemma {
            None => (
                Verdict::Clear,
                "factor structures certified: every sub-lemma holds".to_string(),
            ),
            Some(l) => (Verdict::Inconclusive, format!("sub-lemma {l} fails")),
        };
        ObstructionReport {
            test: "tensor-split".into(),
            verdict,
            summary,
            certificate: serde_json::to_value(self).expect("report serializes"),
        }
    }
}

fn lemma(name: &str, pass: bool, detail: String) -> LemmaCheck {
    LemmaCheck {
        lemma: name.into(),
        status: if pass {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        detail,
    }
}

fn skipped(name: &str) -> LemmaCheck {
    LemmaCheck {
        lemma: name.into(),
        status: CheckStatus::Skipped,
        detail: "an earlier sub-lemma failed".into(),
    }
}

/// ν-identity for one factor: `ν·⟨α, x^{s-i}β⟩_F = ⟨α, ω^{n-i}β⟩_M` on
/// `x`-primitive classes, with top classes `x^s` and `ω^n`.
fn nu_identity(
    m: &GradedAlgebra,
    omega: &Element,
    f: &GradedAlgebra,
    x: &Element,
    embed: &dyn Fn(&Element) -> Result<Element>,
    label: &str,
) -> Result<Vec<NuRecord>> {
    let n = m.dimension() / 2;
    let s = f.dimension() / 2;
    let top_f = f.trace(&f.try_power(x, s)?)?;
    let top_m = m.trace(&m.try_power(omega, n)?)?;
    let mut out = Vec::new();
    for i in 0..=s {
        let nu = Rational::new(
            (binomial(n - i, s - i) as i64).into(),
            (binomial(n, s) as i64).into(),
        );
        let prim = primitive_part(f, x, i)?.elements();
        let xs = f.try_power(x, s - i)?;
        let ws = m.try_power(omega, n - i)?;
        let mut holds = true;
        let mut pairs = 0;
        for al in &prim {
            let al_m = embed(al)?;
            for be in &prim {
                let lhs =
                    nu.clone() * f.trace(&f.try_mul(&f.try_mul(al, &xs)?, be)?)? / top_f.clone();
                let prod = m.try_mul(&m.try_mul(&al_m, &ws)?, &embed(be)?)?;
                let rhs = m.trace(&prod)? / top_m.clone();
                holds &= lhs == rhs;
                pairs += 1;
            }
        }
        out.push(NuRecord {
            factor: label.into(),
            n,
            s,
            i,
            nu: nu.to_string(),
            pairs,
            holds,
        });
    }
    Ok(out)
}

/// Splits a Lefschetz class of `M = A ⊗ B` (with `A¹ = 0` or `B¹ = 0`) and
/// runs the sub-lemmas showing the factors inherit polarized structures.
pub fn tensor_split(m: &GradedAlgebra, omega: &Element) -> Result<TensorSplit> {
    let (fa, fb) = m
        .factors()
        .ok_or_else(|| Error::Precondition(format!("{} is not a tensor product", m.name())))?;
    let (fa, fb) = (fa.clone(), fb.clone());
    if fa.dim(1) > 0 && fb.dim(1) > 0 {
        return Err(Error::Precondition(
            "both factors have degree-one classes (a torus splits into odd-dimensional factors)"
                .into(),
        ));
    }
    if m.is_truncated() || fa.is_truncated() || fb.is_truncated() {
        return Err(Error::Precondition("tensor split needs full mode".into()));
    }
    require_degree_two(omega)?;
    let (a, b, mixed) = m.split_pure(omega)?;
    if mixed {
        return Err(Error::Precondition(
            "ω has a mixed Künneth component".into(),
        ));
    }
    let omega_lefschetz = lefschetz_check(m, omega).map(|r| r.pass).unwrap_or(false);
    let mut checks = Vec::new();
    let mut nu = Vec::new();

    let (da, db) = (fa.dimension(), fb.dimension());
    let even = da % 2 == 0 && db % 2 == 0;
    let (s, t) = (da / 2, db / 2);
    let a_top = if even {
        fa.try_power(&a, s)?
    } else {
        Element::zero(da)
    };
    let b_top = if even {
        fb.try_power(&b, t)?
    } else {
        Element::zero(db)
    };
    let ledim = even && !a_top.is_zero() && !b_top.is_zero();
    checks.push(lemma(
        "ledim",
        ledim,
        if !even {
            format!("factor dimensions {da} and {db} are not both even")
        } else {
            format!(
                "a^{s} {} 0, b^{t} {} 0",
                if a_top.is_zero() { "=" } else { "≠" },
                if b_top.is_zero() { "=" } else { "≠" }
            )
        },
    ));

    if ledim {
        let eta = fa.dim(da) == 1 && fb.dim(db) == 1;
        checks.push(lemma(
            "eta",
            eta,
            format!("A^{da} = Q·a^{s} and B^{db} = Q·b^{t} generate the top classes"),
        ));

        let a_m = m.embed_left(&a)?;
        let b_m = m.embed_right(&b)?;
        let a2: Vec<Element> = (0..fa.dim(2))
            .map(|i| m.embed_left(&Element::basis(2, i)))
            .collect::<Result<_>>()?;
        let b2: Vec<Element> = (0..fb.dim(2))
            .map(|i| m.embed_right(&Element::basis(2, i)))
            .collect::<Result<_>>()?;
        let sa = Subspace::from_elements(2, m.dim(2), &a2);
        let sb = Subspace::from_elements(2, m.dim(2), &b2);
        let mut leh2 = true;
        let mut detail = Vec::new();
        for (name, span, w, e) in [("A²⊗1", &sa, &a_m, s), ("1⊗B²", &sb, &b_m, t)] {
            if span.dim() == 0 {
                detail.push(format!("{name} = 0"));
                continue;
            }
            let c = certify_at(m, span, &ZSpec::PowerVanish { l: e + 1 }, w)?;
            leh2 &= c.is_component();
            detail.push(format!(
                "{name}: tangent {} vs dim {} ({:?})",
                c.tangent_dim.unwrap_or(0),
                c.dim,
                c.verdict
            ));
        }
        checks.push(lemma("leh2", leh2, detail.join("; ")));

        let la = lefschetz_check(&fa, &a)?;
        let lb = lefschetz_check(&fb, &b)?;
        checks.push(lemma(
            "lefsch",
            la.pass && lb.pass,
            format!(
                "(A, a) {}, (B, b) {}",
                if la.pass {
                    "Lefschetz"
                } else {
                    "not Lefschetz"
                },
                if lb.pass {
                    "Lefschetz"
                } else {
                    "not Lefschetz"
                }
            ),
        ));

        nu.extend(nu_identity(m, omega, &fa, &a, &|x| m.embed_left(x), "A")?);
        nu.extend(nu_identity(m, omega, &fb, &b, &|x| m.embed_right(x), "B")?);
        let ok = nu.iter().all(|r| r.holds);
        checks.push(lemma(
            "nu",
            ok,
            format!(
                "{} pairings compared",
                nu.iter().map(|r| r.pairs).sum::<usize>()
            ),
        ));
    } else {
        for l in ["eta", "leh2", "lefsch", "nu"] {
            checks.push(skipped(l));
        }
    }
    let failed_lemma = checks
        .iter()
        .find(|c| c.status != CheckStatus::Pass)
        .map(|c| c.lemma.clone());
    let report = TensorSplitReport {
        omega: element_to_spec(m, omega),
        omega_lefschetz,
        a: element_to_spec(&fa, &a),
        b: element_to_spec(&fb, &b),
        dims: (da, db),
        pass: failed_lemma.is_none(),
        checks,
        nu,
        failed_lemma,
    };
    Ok(TensorSplit { a, b, report })
}

/// Whether the algebra is generated by its classes of degree 1 and 2;
/// returns the first degree that is not reached.
pub fn generated_in_low_degrees(a: &GradedAlgebra) -> Result<Option<usize>> {
    let mut spans: Vec<Subspace<Rational>> = vec![Subspace::whole(0, 1)];
    for d in 1..=a.top_degree() {
        let mut vs: Vec<Element> = Vec::new();
        for g in 1..=2.min(d) {
            for prev in spans[d - g].elements() {
                for i in 0..a.dim(g) {
                    vs.push(a.try_mul(&prev, &Element::basis(g, i))?);
                }
            }
        }
        let s = Subspace::from_elements(d, a.dim(d), &vs);
        if s.dim() != a.dim(d) {
            return Ok(Some(d));
        }
        spans.push(s);
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjBundleTransfer {
    pub rank: usize,
    pub base_dimension: usize,
    pub gamma: ComponentCertificate,
    pub beta: ElementSpec,
    /// `π_*(β+π*α)^r − π_*β^r = rα` on every basis class α of `H²(base)`.
    pub linear_term_identity: bool,
    pub beta_unique_mod_gamma: bool,
    pub beta_line: ComponentCertificate,
    pub segre: Vec<ElementSpec>,
    /// `Σ_i c_i σ_{j-i} = 0` for `1 <= j <= j_max`.
    pub segre_inversion: bool,
    /// `σ_1 = −c_1`.
    pub sigma1_is_minus_c1: bool,
    /// `β^r = Σ_i β^{r-i}·π*α_i`.
    pub alphas: Vec<ElementSpec>,
    pub relation_holds: bool,
    /// `α_i = −c_i(E)`.
    pub alphas_match_chern: bool,
}

impl ProjBundleTransfer {
    pub fn certified(&self) -> bool {
        self.gamma.is_component()
            && self.beta_line.is_component()
            && self.linear_term_identity
            && self.beta_unique_mod_gamma
            && self.segre_inversion
            && self.relation_holds
    }

    pub fn to_report(&self) -> ObstructionReport {
        let (verdict, summary) = if self.certified() {
            (
                Verdict::Clear,
                "any Hodge structure on the bundle restricts to the base with Hodge Chern classes"
                    .to_string(),
            )
        } else {
            (
                Verdict::Inconclusive,
                "a transfer certificate failed".to_string(),
            )
        };
        ObstructionReport {
            test: "projbundle-transfer".into(),
            verdict,
            summary,
            certificate: serde_json::to_value(self).expect("report serializes"),
        }
    }
}

/// Transfers a Hodge structure on `P(E)` to the base: certifies
/// `Γ = π*H²(base)` and the line `Q·β` with `π_*β^r = 0` as components,
/// and recovers the relation `β^r = Σ β^{r-i}π*α_i` from Segre classes.
pub fn projbundle_transfer(pb: &ProjectiveBundle) -> Result<ProjBundleTransfer> {
    let (t, base, r) = (&pb.total, &pb.base, pb.rank);
    if r < 2 {
        return Err(Error::Precondition("bundle rank must be at least 2".into()));
    }
    if let Some(d) = generated_in_low_degrees(base)? {
        return Err(Error::Precondition(format!(
            "base cohomology is not generated in degrees 1 and 2 (degree {d} is missed)"
        )));
    }
    if !pb.c(1).is_zero() {
        return Err(Error::Precondition("c_1(E) ≠ 0".into()));
    }
    let n = base.dimension() / 2;
    let b2 = base.dim(2);
    if b2 == 0 {
        return Err(Error::Precondition("H²(base) = 0".into()));
    }
    let gamma_vecs: Vec<Element> = (0..b2)
        .map(|i| pb.pullback(&Element::basis(2, i)))
        .collect();
    let gamma_span = Subspace::from_elements(2, t.dim(2), &gamma_vecs);
    let gamma = certify_component(t, &gamma_span, &ZSpec::PowerVanish { l: n + 1 })?;

    // π_*(β₀+π*α)^r = π_*β₀^r + rα, so α = −π_*β₀^r / r
    let h = pb.h();
    let push_r = |x: &Element| -> Result<Element> { Ok(pb.gysin(&t.try_power(x, r)?)) };
    let base_r = push_r(&h)?;
    let alpha0 = base_r.scale(&-Rational::new(1.into(), (r as i64).into()));
    let beta = h.add(&pb.pullback(&alpha0));
    let beta_ok = push_r(&beta)?.is_zero();
    let pb_r = push_r(&beta)?;
    let mut linear = true;
    let mut images = Vec::new();
    for i in 0..b2 {
        let al = Element::basis(2, i);
        let lhs = push_r(&beta.add(&pb.pullback(&al)))?.sub(&pb_r);
        linear &= lhs == al.scale(&int(r as i64));
        images.push(lhs.to_dense(b2));
    }
    let unique = beta_ok && linalg::rank_of_vectors(&images, b2) == b2;

    let gysin = pb.gysin_map();
    let line = Subspace::from_elements(2, t.dim(2), std::slice::from_ref(&beta));
    let beta_line = certify_at(t, &line, &ZSpec::GysinPowerVanish { r, gysin }, &beta)?;

    let j_max = r.min(n);
    let mut segre = vec![base.unit()];
    let mut power = t.try_power(&beta, r - 1)?;
    for _ in 1..=j_max {
        power = t.try_mul(&power, &beta)?;
        segre.push(pb.gysin(&power));
    }
    let c = |i: usize| if i == 0 { base.unit() } else { pb.c(i) };
    let mut inversion = true;
    for j in 1..=j_max {
        let mut acc = Element::zero(2 * j);
        for i in 0..=j {
            acc = acc.add(&base.try_mul(&c(i), &segre[j - i])?);
        }
        inversion &= acc.is_zero();
    }
    let sigma1 = segre.get(1).is_none_or(|s| *s == pb.c(1).neg());

    // total Chern class as the inverse of the total Segre class
    let mut chern = vec![base.unit()];
    for i in 1..=r {
        let mut acc = Element::zero(2 * i);
        if 2 * i <= base.dimension() {
            for j in 1..=i.min(j_max) {
                acc = acc.sub(&base.try_mul(&segre[j], &chern[i - j])?);
            }
        }
        chern.push(acc);
    }
    let alphas: Vec<Element> = (1..=r).map(|i| chern[i].neg()).collect();
    let mut rhs = Element::zero(2 * r);
    for (k, al) in alphas.iter().enumerate() {
        let i = k + 1;
        if al.is_zero() || al.degree > base.dimension() {
            continue;
        }
        rhs = rhs.add(&t.try_mul(&t.try_power(&beta, r - i)?, &pb.pullback(al))?);
    }
    let relation = t.try_power(&beta, r)? == rhs;
    let matches = (1..=r).all(|i| alphas[i - 1] == pb.c(i).neg());
    Ok(ProjBundleTransfer {
        rank: r,
        base_dimension: base.dimension(),
        gamma,
        beta: element_to_spec(t, &beta),
        linear_term_identity: linear,
        beta_unique_mod_gamma: unique,
        beta_line,
        segre: segre.iter().map(|s| element_to_spec(base, s)).collect(),
        segre_inversion: inversion,
        sigma1_is_minus_c1: sigma1,
        alphas: alphas.iter().map(|x| element_to_spec(base, x)).collect(),
        relation_holds: relation,
        alphas_match_chern: matches,
    })
}

/// Rescales a class to have a positive leading coefficient.
pub fn normalize_sign(x: &Element) -> Element {
    match x.coords.first() {
        Some((_, c)) if c.is_negative() => x.neg(),
        _ => x.clone(),
    }
}

/// `1/ε` as a rational, rejecting zero.
pub fn reciprocal(eps: &Rational) -> Result<Rational> {
    if eps.is_zero() {
        return Err(Error::Invalid("ε must be nonzero".into()));
    }
    Ok(Rational::one() / eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MixedElement;
    use crate::builders::{
        exterior_algebra, projective_bundle, tensor_product, truncated_polynomial,
    };
    use crate::hodge::{exterior_hodge, WeightOneData};
    use crate::spec::parse_element;
    use std::sync::Arc;

    fn el(a: &GradedAlgebra, s: &str) -> Element {
        parse_element(a, s).unwrap()
    }

    #[test]
    fn membership_and_tangents() {
        let p = truncated_polynomial(3);
        let h = el(&p, "h");
        let z = ZSpec::PowerVanish { l: 4 };
        assert!(membership(&p, &z, &h).unwrap());
        assert_eq!(tangent_space(&p, &z, &h).unwrap().dim(), 1);
        let a = exterior_algebra(6);
        let w = el(&a, "w1^w2");
        let z2 = ZSpec::PowerVanish { l: 2 };
        assert_eq!(tangent_space(&a, &z2, &w).unwrap().dim(), 9);
        assert!(tangent_space(&a, &z2, &el(&a, "w1^w2 + w3^w4")).is_err());
    }

    #[test]
    fn tangent_contains_point() {
        let a = exterior_algebra(6);
        let z = ZSpec::PowerVanish { l: 3 };
        let x = el(&a, "w1^w2 + w3^w4");
        let t = tangent_space(&a, &z, &x).unwrap();
        assert!(t.contains(&x.to_dense(a.dim(2))));
    }

    #[test]
    fn component_certificates() {
        let a = exterior_algebra(6);
        let w = el(&a, "w1^w2");
        let s = Subspace::from_elements(2, a.dim(2), &[w]);
        let c = certify_component(&a, &s, &ZSpec::PowerVanish { l: 2 }).unwrap();
        assert_eq!(c.verdict, ComponentVerdict::NotComponent);
        assert_eq!(c.tangent_dim, Some(9));
        let s2 = Subspace::from_elements(2, a.dim(2), &[el(&a, "w1^w2 + w3^w4")]);
        let c2 = certify_component(&a, &s2, &ZSpec::PowerVanish { l: 2 }).unwrap();
        assert!(!c2.contained);
        assert_eq!(c2.verdict, ComponentVerdict::NotComponent);
    }

    #[test]
    fn second_order_certificate() {
        // on P²⊗P¹ the cube x³ = 3α²β h²k vanishes only on Q·k, yet the
        // tangent space at k is all of H² since k² = 0
        let a = tensor_product(
            &Arc::new(truncated_polynomial(2)),
            &Arc::new(truncated_polynomial(1)),
        )
        .unwrap();
        let k = a.embed_right(&el(&truncated_polynomial(1), "h")).unwrap();
        let s = Subspace::from_elements(2, a.dim(2), &[k]);
        let z = ZSpec::PowerVanish { l: 3 };
        let c = certify_component(&a, &s, &z).unwrap();
        assert_eq!(c.tangent_dim, Some(2));
        assert!(c.second_order.is_some());
        assert_eq!(c.verdict, ComponentVerdict::Component);
        // with l = 4 every class is in Z and the line is not a component
        let c4 = certify_component(&a, &s, &ZSpec::PowerVanish { l: 4 }).unwrap();
        assert_eq!(c4.tangent_dim, Some(2));
        assert!(c4.second_order.is_none());
        assert!(!c4.is_component());
    }

    #[test]
    fn sweep_order() {
        let v = sweep(2, 1);
        assert_eq!(v.len(), 4);
        assert!(v.iter().all(|x| x.iter().find(|c| **c != 0).unwrap() > &0));
        assert_eq!(sweep(1, 3), vec![vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn even_rank_examples() {
        let a = exterior_algebra(4);
        let w = el(&a, "w1^w2");
        let s = Subspace::from_elements(2, a.dim(2), std::slice::from_ref(&w));
        let r = even_rank_test(&a, &[w], &[Support::Asserted(s)], 1).unwrap();
        assert_eq!(r.verdict, Verdict::Clear);
        assert_eq!(r.certificate["rank"], 2);
        let z = even_rank_test(&a, &[Element::zero(2)], &[], 1).unwrap();
        assert_eq!(z.verdict, Verdict::Clear);
        assert_eq!(z.certificate["rank"], 0);
        assert!(even_rank_test(&a, &[], &[], 2).is_err());
    }

    #[test]
    fn torus_pair_is_odd_but_unforced() {
        let a = exterior_algebra(6);
        let l1 = el(&a, "w1^w2 + w3^w4");
        let l2 = el(&a, "w3^w5 - w1^w4");
        let r = even_rank_test(&a, &[l1, l2], &[], 1).unwrap();
        assert_eq!(r.certificate["rank"], 11);
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn condnum_examples() {
        assert!(condnum_predicate(5, 11, 5).holds);
        let c = condnum_predicate(2, 5, 0);
        assert!(!c.holds && !c.precondition);
        let d = condnum_predicate(5, 21, 10);
        assert!(d.first && !d.second && !d.holds);
    }

    #[test]
    fn half_subspace_on_torus() {
        let a = exterior_algebra(6);
        let mu = Matrix::<Rational>::identity(15);
        let h = exterior_hodge(Arc::new(a), &WeightOneData::standard(3)).unwrap();
        let f1 = h.piece(1, 1, 0).unwrap().clone();
        assert_eq!(half_subspace_verify(&mu, &f1).unwrap(), 3);
        let r = half_subspace_search(&mu, &[f1], 5, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Clear);
        let w = Subspace::new(
            1,
            2,
            &[vec![GaussRational::from_ints(1, 0), GaussRational::i()]],
        );
        assert_eq!(half_subspace_verify(&Matrix::identity(1), &w).unwrap(), 0);
        let zero = Matrix::<Rational>::zeros(3, 15);
        assert_eq!(
            half_subspace_search(&zero, &[], 3, 0).unwrap().verdict,
            Verdict::Clear
        );
    }

    #[test]
    fn tensor_split_on_p2_times_curve() {
        let p2 = Arc::new(truncated_polynomial(2));
        let e = Arc::new(exterior_algebra(2));
        let m = tensor_product(&p2, &e).unwrap();
        let omega = el(&m, "h⊗1 + 1⊗w1^w2");
        let s = tensor_split(&m, &omega).unwrap();
        assert!(s.report.pass, "{:?}", s.report.checks);
        assert_eq!(s.report.checks.len(), 5);
        assert!(s
            .report
            .nu
            .iter()
            .any(|r| r.factor == "B" && r.i == 1 && r.nu == "1/3" && r.pairs == 4));

        let bad = tensor_split(&m, &el(&m, "h⊗1")).unwrap();
        assert_eq!(bad.report.failed_lemma.as_deref(), Some("ledim"));

        let t = tensor_product(&e, &e).unwrap();
        assert!(tensor_split(&t, &el(&t, "w1⊗w1")).is_err());
    }

    #[test]
    fn nu_half_on_p1_times_curve() {
        let p1 = Arc::new(truncated_polynomial(1));
        let e = Arc::new(exterior_algebra(2));
        let m = tensor_product(&p1, &e).unwrap();
        let s = tensor_split(&m, &el(&m, "h⊗1 + 1⊗w1^w2")).unwrap();
        assert!(s.report.pass);
        let r = s
            .report
            .nu
            .iter()
            .find(|r| r.factor == "B" && r.i == 1)
            .unwrap();
        assert_eq!((r.n, r.s, r.nu.as_str()), (2, 1, "1/2"));
        assert!(r.holds && r.pairs > 0);
    }

    #[test]
    fn bundle_transfer() {
        let base = Arc::new(exterior_algebra(4));
        let trivial = projective_bundle(&base, 2, &MixedElement::one(&base)).unwrap();
        let tr = projbundle_transfer(&trivial).unwrap();
        assert!(tr.certified(), "{tr:?}");
        assert_eq!(tr.beta, element_to_spec(&trivial.total, &trivial.h()));
        assert!(tr.alphas.iter().all(|a| a.is_empty()));

        let mut c = MixedElement::one(&base);
        c.insert(el(&base, "3 w1^w2^w3^w4"));
        let pb = projective_bundle(&base, 2, &c).unwrap();
        let tr = projbundle_transfer(&pb).unwrap();
        assert!(tr.certified());
        assert!(tr.alphas_match_chern && tr.sigma1_is_minus_c1);
        assert_eq!(
            tr.alphas[1].get("w1^w2^w3^w4").map(String::as_str),
            Some("-3")
        );

        let mut c1 = MixedElement::one(&base);
        c1.insert(el(&base, "w1^w2"));
        let twisted = projective_bundle(&base, 2, &c1).unwrap();
        assert!(projbundle_transfer(&twisted).is_err());
    }

    #[test]
    fn low_degree_generation() {
        assert_eq!(
            generated_in_low_degrees(&exterior_algebra(4)).unwrap(),
            None
        );
        let s3 = crate::builders::squarefree_algebra(2, 3, None);
        assert_eq!(generated_in_low_degrees(&s3).unwrap(), Some(3));
    }
}
