//! Finite graded-commutative algebras with a unit and (in full mode) a
//! perfect Poincaré pairing.
//!
//! A `GradedAlgebra` fixes a basis in each degree. Products are given by
//! sparse structure constants, computed on the fly for squarefree monomial
//! algebras and tensor products and stored in a table otherwise. Degree 0 is
//! always spanned by basis vector `(0, 0)`, the unit.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::comb;
use crate::error::{Error, Result};
use crate::linalg::{self, EchelonField, Matrix};
use crate::scalar::{GaussRational, Rational, Scalar};
use crate::spec::AlgebraSpec;

/// Sorted `(basis index, coefficient)` pairs, zeros dropped.
pub type SparseVec = Vec<(usize, Rational)>;

pub(crate) type ProductTable = HashMap<(usize, usize, usize, usize), SparseVec>;

#[derive(Clone, Debug)]
pub(crate) enum Structure {
    /// Squarefree monomials in `generators` generators of a common degree.
    /// Odd degree gives an exterior algebra; even degree a product of
    /// copies of `Q[h]/(h^2)`.
    Monomial {
        generators: usize,
        generator_degree: usize,
        symbol: String,
    },
    /// Koszul-signed tensor product. `blocks[d]` lists `(da, db, start)`.
    Tensor {
        left: Arc<GradedAlgebra>,
        right: Arc<GradedAlgebra>,
        blocks: Vec<Vec<(usize, usize, usize)>>,
    },
    Table {
        labels: Vec<Vec<String>>,
        products: ProductTable,
    },
    /// `H*(P(E)) = H*(base)[h]/(h^r + c_1 h^{r-1} + ... + c_r)`.
    /// `blocks[d]` lists `(power of h, start)`; `chern[i] = c_i`.
    Bundle {
        base: Arc<GradedAlgebra>,
        rank: usize,
        chern: Vec<Option<Element>>,
        symbol: String,
        blocks: Vec<Vec<(usize, usize)>>,
    },
    /// Blow-up along a center of codimension `codim`: `τ*` of the ambient
    /// basis followed by `j_*(h^i·x)`, `0 <= i <= codim - 2`.
    /// `blocks[d]` lists `(None, 0)` for the ambient part and
    /// `(Some(i), start)` for exceptional classes.
    Blowup {
        ambient: Arc<GradedAlgebra>,
        center: Arc<GradedAlgebra>,
        restriction: AlgebraMap,
        codim: usize,
        normal_chern: Vec<Option<Element>>,
        blocks: Vec<Vec<(Option<usize>, usize)>>,
    },
}

/// Sign in `j_*(x)·j_*(y) = EXCEPTIONAL_SIGN · j_*(h·x·y)`.
pub const EXCEPTIONAL_SIGN: i64 = -1;

#[derive(Clone, Debug)]
pub struct GradedAlgebra {
    name: String,
    dimension: usize,
    cap: Option<usize>,
    dims: Vec<usize>,
    structure: Structure,
    spec: Option<AlgebraSpec>,
    label_index: OnceLock<HashMap<String, (usize, usize)>>,
}

/// Homogeneous element: sparse rational coordinates in one degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    pub degree: usize,
    pub coords: SparseVec,
}

impl Element {
    pub fn zero(degree: usize) -> Self {
        Element {
            degree,
            coords: Vec::new(),
        }
    }

    pub fn basis(degree: usize, index: usize) -> Self {
        Element {
            degree,
            coords: vec![(index, Rational::one())],
        }
    }

    pub fn from_sparse(degree: usize, mut coords: SparseVec) -> Self {
        coords.retain(|(_, x)| !x.is_zero());
        coords.sort_by_key(|(k, _)| *k);
        Element { degree, coords }
    }

    pub fn from_dense(degree: usize, v: &[Rational]) -> Self {
        Element {
            degree,
            coords: linalg::sparsify(v),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coefficient(&self, index: usize) -> Rational {
        self.coords
            .binary_search_by_key(&index, |(k, _)| *k)
            .map(|k| self.coords[k].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn to_dense(&self, len: usize) -> Vec<Rational> {
        linalg::densify(&self.coords, len)
    }

    pub fn to_dense_as<F: Scalar>(&self, len: usize) -> Vec<F> {
        let mut out = vec![F::zero(); len];
        for (k, x) in &self.coords {
            out[*k] = F::from_rational(x);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Element {
        if c.is_zero() {
            return Element::zero(self.degree);
        }
        Element {
            degree: self.degree,
            coords: self.coords.iter().map(|(k, x)| (*k, x * c)).collect(),
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        assert_eq!(
            self.degree, other.degree,
            "adding elements of different degree"
        );
        Element {
            degree: self.degree,
            coords: add_sparse(&self.coords, &other.coords, &Rational::one()),
        }
    }

    pub fn sub(&self, other: &Element) -> Element {
        assert_eq!(
            self.degree, other.degree,
            "subtracting elements of different degree"
        );
        Element {
            degree: self.degree,
            coords: add_sparse(&self.coords, &other.coords, &-Rational::one()),
        }
    }

    pub fn neg(&self) -> Element {
        self.scale(&-Rational::one())
    }

    /// Sum of `c_k x_k`.
    pub fn combination(degree: usize, terms: &[(Rational, &Element)]) -> Element {
        terms
            .iter()
            .fold(Element::zero(degree), |acc, (c, x)| acc.add(&x.scale(c)))
    }
}

/// `x + c*y` on sorted sparse vectors.
pub fn add_sparse(x: &SparseVec, y: &SparseVec, c: &Rational) -> SparseVec {
    let mut acc: BTreeMap<usize, Rational> = x.iter().cloned().collect();
    for (k, v) in y {
        let e = acc.entry(*k).or_insert_with(Rational::zero);
        *e += c * v;
    }
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// Degree-indexed element (total Chern or Segre class).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MixedElement {
    pub parts: BTreeMap<usize, Element>,
}

impl MixedElement {
    pub fn one(algebra: &GradedAlgebra) -> Self {
        let mut parts = BTreeMap::new();
        parts.insert(0, algebra.unit());
        MixedElement { parts }
    }

    pub fn component(&self, degree: usize) -> Element {
        self.parts
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| Element::zero(degree))
    }

    pub fn insert(&mut self, x: Element) {
        self.parts.insert(x.degree, x);
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "0[deg {}]", self.degree);
        }
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|(k, x)| format!("{x}*e{}_{k}", self.degree))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl GradedAlgebra {
    pub(crate) fn from_parts(
        name: impl Into<String>,
        dimension: usize,
        cap: Option<usize>,
        dims: Vec<usize>,
        structure: Structure,
    ) -> Self {
        let top = cap.map_or(dimension, |c| c.min(dimension));
        assert_eq!(dims.len(), top + 1, "degree dims must cover 0..=top");
        GradedAlgebra {
            name: name.into(),
            dimension,
            cap: cap.filter(|&c| c < dimension),
            dims,
            structure,
            spec: None,
            label_index: OnceLock::new(),
        }
    }

    pub(crate) fn with_spec(mut self, spec: AlgebraSpec) -> Self {
        self.spec = Some(spec);
        self
    }

    pub(crate) fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn spec(&self) -> Option<&AlgebraSpec> {
        self.spec.as_ref()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rename(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Formal dimension m.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn cap(&self) -> Option<usize> {
        self.cap
    }

    pub fn is_truncated(&self) -> bool {
        self.cap.is_some()
    }

    /// Highest degree carried by the basis.
    pub fn top_degree(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dim(&self, degree: usize) -> usize {
        self.dims.get(degree).copied().unwrap_or(0)
    }

    pub fn betti(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Left and right factors when built as a tensor product.
    pub fn factors(&self) -> Option<(&Arc<GradedAlgebra>, &Arc<GradedAlgebra>)> {
        match &self.structure {
            Structure::Tensor { left, right, .. } => Some((left, right)),
            _ => None,
        }
    }

    pub fn is_exterior(&self) -> Option<usize> {
        match &self.structure {
            Structure::Monomial {
                generators,
                generator_degree: 1,
                ..
            } => Some(*generators),
            _ => None,
        }
    }

    pub fn unit(&self) -> Element {
        Element::basis(0, 0)
    }

    pub fn zero(&self, degree: usize) -> Element {
        Element::zero(degree)
    }

    pub fn basis_element(&self, degree: usize, index: usize) -> Element {
        assert!(index < self.dim(degree), "basis index out of range");
        Element::basis(degree, index)
    }

    pub fn label(&self, degree: usize, index: usize) -> String {
        if degree == 0 {
            return "1".to_string();
        }
        match &self.structure {
            Structure::Monomial {
                generators,
                generator_degree,
                symbol,
            } => {
                let k = degree / generator_degree;
                let mask = comb::unrank_lex(index, *generators, k);
                let sep = if generator_degree % 2 == 1 { "^" } else { "·" };
                comb::indices(mask)
                    .into_iter()
                    .map(|g| format!("{symbol}{}", g + 1))
                    .collect::<Vec<_>>()
                    .join(sep)
            }
            Structure::Tensor {
                left,
                right,
                blocks,
            } => {
                let (da, db, start) = block_of(&blocks[degree], index);
                let nb = right.dim(db);
                let i = (index - start) / nb;
                let j = (index - start) % nb;
                format!("{}⊗{}", left.factor_label(da, i), right.factor_label(db, j))
            }
            Structure::Table { labels, .. } => labels[degree][index].clone(),
            Structure::Bundle {
                base,
                symbol,
                blocks,
                ..
            } => {
                let (i, start) = power_block(&blocks[degree], index);
                power_label(symbol, i, &base.label(degree - 2 * i, index - start))
            }
            Structure::Blowup {
                ambient,
                center,
                blocks,
                ..
            } => match power_block_opt(&blocks[degree], index) {
                (None, _) => format!("τ*({})", ambient.label(degree, index)),
                (Some(i), start) => format!(
                    "j_*({})",
                    power_label("h", i, &center.label(degree - 2 - 2 * i, index - start))
                ),
            },
        }
    }

    /// Label inside a tensor label: the unit of a tensor product is spelled
    /// out as `1⊗1` so that nested labels stay uniform.
    fn factor_label(&self, degree: usize, index: usize) -> String {
        match (&self.structure, degree) {
            (Structure::Tensor { left, right, .. }, 0) => {
                format!("{}⊗{}", left.factor_label(0, 0), right.factor_label(0, 0))
            }
            _ => self.label(degree, index),
        }
    }

    pub fn labels(&self, degree: usize) -> Vec<String> {
        (0..self.dim(degree))
            .map(|i| self.label(degree, i))
            .collect()
    }

    pub fn lookup_label(&self, label: &str) -> Option<(usize, usize)> {
        self.label_index
            .get_or_init(|| {
                let mut map = HashMap::new();
                for d in 0..=self.top_degree() {
                    for i in 0..self.dim(d) {
                        map.insert(self.label(d, i), (d, i));
                    }
                }
                map
            })
            .get(label)
            .copied()
    }

    /// Element from `label -> coefficient` pairs; all labels must share a degree.
    pub fn element_from_labels(&self, terms: &[(String, Rational)]) -> Result<Element> {
        let mut degree = None;
        let mut coords = Vec::new();
        for (label, c) in terms {
            let (d, i) = self
                .lookup_label(label)
                .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
            if *degree.get_or_insert(d) != d {
                return Err(Error::Invalid(format!(
                    "element mixes degrees ({label} has degree {d})"
                )));
            }
            coords.push((i, c.clone()));
        }
        let degree = degree.ok_or_else(|| Error::Invalid("empty element".into()))?;
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, c) in coords {
            *acc.entry(i).or_insert_with(Rational::zero) += c;
        }
        Ok(Element::from_sparse(degree, acc.into_iter().collect()))
    }

    pub fn element_to_labels(&self, x: &Element) -> Vec<(String, Rational)> {
        x.coords
            .iter()
            .map(|(i, c)| (self.label(x.degree, *i), c.clone()))
            .collect()
    }

    pub fn format_element(&self, x: &Element) -> String {
        if x.is_zero() {
            return "0".into();
        }
        self.element_to_labels(x)
            .into_iter()
            .map(|(l, c)| if c.is_one() { l } else { format!("({c})*{l}") })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Product of two basis vectors, in degree `d1 + d2`. The caller is
    /// responsible for staying within the top degree.
    ///
    /// # Panics
    /// When the product needs data the algebra does not carry (see
    /// [`GradedAlgebra::try_basis_product`]).
    pub fn basis_product(&self, d1: usize, i: usize, d2: usize, j: usize) -> SparseVec {
        self.try_basis_product(d1, i, d2, j)
            .unwrap_or_else(|e| panic!("{}: {e}", self.name))
    }

    /// Product of two basis vectors. Fails only for blow-ups whose product
    /// needs unspecified normal data.
    pub fn try_basis_product(&self, d1: usize, i: usize, d2: usize, j: usize) -> Result<SparseVec> {
        if d1 == 0 {
            return Ok(vec![(j, Rational::one())]);
        }
        if d2 == 0 {
            return Ok(vec![(i, Rational::one())]);
        }
        if d1 + d2 > self.dimension {
            return Ok(Vec::new());
        }
        Ok(match &self.structure {
            Structure::Monomial {
                generators,
                generator_degree,
                ..
            } => {
                let n = *generators;
                let g = *generator_degree;
                let a = comb::unrank_lex(i, n, d1 / g);
                let b = comb::unrank_lex(j, n, d2 / g);
                if a & b != 0 {
                    return Ok(Vec::new());
                }
                let sign = if g % 2 == 1 {
                    comb::wedge_sign(a, b)
                } else {
                    1
                };
                vec![(
                    comb::rank_lex(a | b, n),
                    Rational::from_integer(sign.into()),
                )]
            }
            Structure::Tensor {
                left,
                right,
                blocks,
            } => {
                let (da, db, sa) = block_of(&blocks[d1], i);
                let (da2, db2, sb) = block_of(&blocks[d2], j);
                let (ia, ib) = ((i - sa) / right.dim(db), (i - sa) % right.dim(db));
                let (ja, jb) = ((j - sb) / right.dim(db2), (j - sb) % right.dim(db2));
                if da + da2 > left.top_degree() || db + db2 > right.top_degree() {
                    return Ok(Vec::new());
                }
                let pa = left.try_basis_product(da, ia, da2, ja)?;
                if pa.is_empty() {
                    return Ok(Vec::new());
                }
                let pb = right.try_basis_product(db, ib, db2, jb)?;
                if pb.is_empty() {
                    return Ok(Vec::new());
                }
                let sign = if (db * da2) % 2 == 1 {
                    -Rational::one()
                } else {
                    Rational::one()
                };
                let (tda, tdb) = (da + da2, db + db2);
                let start = blocks[d1 + d2]
                    .iter()
                    .find(|(x, y, _)| *x == tda && *y == tdb)
                    .map(|(_, _, s)| *s)
                    .expect("tensor block");
                let nb = right.dim(tdb);
                let mut out: SparseVec = Vec::with_capacity(pa.len() * pb.len());
                for (ka, xa) in &pa {
                    for (kb, xb) in &pb {
                        out.push((start + ka * nb + kb, &sign * xa * xb));
                    }
                }
                out.sort_by_key(|(k, _)| *k);
                out
            }
            Structure::Table { products, .. } => {
                products.get(&(d1, i, d2, j)).cloned().unwrap_or_default()
            }
            Structure::Bundle {
                base,
                rank,
                chern,
                blocks,
                ..
            } => {
                let (p, sa) = power_block(&blocks[d1], i);
                let (k, sb) = power_block(&blocks[d2], j);
                let (dx, dy) = (d1 - 2 * p, d2 - 2 * k);
                let z = base.try_basis_product(dx, i - sa, dy, j - sb)?;
                let mut terms = BTreeMap::new();
                terms.insert(p + k, Element::from_sparse(dx + dy, z));
                let terms = reduce_powers(base, chern, *rank, terms, d1 + d2)?;
                encode_powers(&blocks[d1 + d2], terms)
            }
            Structure::Blowup {
                ambient,
                center,
                restriction,
                codim,
                normal_chern,
                blocks,
            } => {
                let d = d1 + d2;
                let left = power_block_opt(&blocks[d1], i);
                let right = power_block_opt(&blocks[d2], j);
                let exceptional = |power: usize, z: Element| -> Result<SparseVec> {
                    let mut terms = BTreeMap::new();
                    terms.insert(power, z);
                    let terms = reduce_powers(center, normal_chern, *codim, terms, d)?;
                    if let Some(z) = terms.get(&(codim - 1)).filter(|z| !z.is_zero()) {
                        return Err(Error::InsufficientNormalData {
                            degree: d,
                            what: format!(
                                "the Gysin image of the center for j_*(h^{}·x), |x| = {}",
                                codim - 1,
                                z.degree
                            ),
                        });
                    }
                    let encoded: BTreeMap<usize, Element> = terms.into_iter().collect();
                    Ok(encode_exceptional(&blocks[d], encoded))
                };
                match (left, right) {
                    ((None, _), (None, _)) => ambient.try_basis_product(d1, i, d2, j)?,
                    ((None, _), (Some(k), sb)) => {
                        let rg = restriction.apply(&Element::basis(d1, i));
                        let e = d2 - 2 - 2 * k;
                        let z = center.try_mul(&rg, &Element::basis(e, j - sb))?;
                        exceptional(k, z)?
                    }
                    ((Some(p), sa), (None, _)) => {
                        let rg = restriction.apply(&Element::basis(d2, j));
                        let e = d1 - 2 - 2 * p;
                        let z = center.try_mul(&Element::basis(e, i - sa), &rg)?;
                        exceptional(p, z)?
                    }
                    ((Some(p), sa), (Some(k), sb)) => {
                        let ex = d1 - 2 - 2 * p;
                        let ey = d2 - 2 - 2 * k;
                        let z = center
                            .try_mul(&Element::basis(ex, i - sa), &Element::basis(ey, j - sb))?;
                        exceptional(
                            p + k + 1,
                            z.scale(&Rational::from_integer(EXCEPTIONAL_SIGN.into())),
                        )?
                    }
                }
            }
        })
    }

    fn overflow(&self, degree: usize) -> Option<Error> {
        match self.cap {
            Some(cap) if degree > cap && degree <= self.dimension => {
                Some(Error::DegreeOverflow { degree, cap })
            }
            _ => None,
        }
    }

    /// Product; errors when the result lands above the truncation cap.
    pub fn try_mul(&self, x: &Element, y: &Element) -> Result<Element> {
        let d = x.degree + y.degree;
        if let Some(e) = self.overflow(d) {
            return Err(e);
        }
        if d > self.dimension {
            return Ok(Element::zero(d));
        }
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, a) in &x.coords {
            for (j, b) in &y.coords {
                for (k, c) in self.try_basis_product(x.degree, *i, y.degree, *j)? {
                    *acc.entry(k).or_insert_with(Rational::zero) += a * b * c;
                }
            }
        }
        Ok(Element::from_sparse(d, acc.into_iter().collect()))
    }

    /// Product; above the truncation cap the result is a flagged zero.
    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        match self.try_mul(x, y) {
            Ok(p) => p,
            Err(e) => {
                log::warn!("{}: {e}; returning zero", self.name);
                Element::zero(x.degree + y.degree)
            }
        }
    }

    pub fn try_power(&self, x: &Element, k: usize) -> Result<Element> {
        let mut acc = self.unit();
        for _ in 0..k {
            acc = self.try_mul(&acc, x)?;
        }
        Ok(acc)
    }

    pub fn power(&self, x: &Element, k: usize) -> Element {
        match self.try_power(x, k) {
            Ok(p) => p,
            Err(e) => {
                log::warn!("{}: {e}; returning zero", self.name);
                Element::zero(x.degree * k)
            }
        }
    }

    /// Product of dense coordinate vectors over any scalar field.
    pub fn mul_dense<F: Scalar>(&self, d1: usize, x: &[F], d2: usize, y: &[F]) -> Result<Vec<F>> {
        let d = d1 + d2;
        if let Some(e) = self.overflow(d) {
            return Err(e);
        }
        let mut out = vec![F::zero(); self.dim(d)];
        if d > self.dimension {
            return Ok(out);
        }
        for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                for (k, c) in self.try_basis_product(d1, i, d2, j)? {
                    out[k] = out[k].clone() + a.clone() * b.clone() * F::from_rational(&c);
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `y ↦ x·y` from degree `d` to degree `x.degree + d`.
    pub fn multiplication_matrix(&self, x: &Element, d: usize) -> Result<Matrix<Rational>> {
        let target = x.degree + d;
        if let Some(e) = self.overflow(target) {
            return Err(e);
        }
        let cols: Vec<Vec<Rational>> = (0..self.dim(d))
            .map(|j| {
                self.try_mul(x, &Element::basis(d, j))
                    .map(|p| p.to_dense(self.dim(target)))
            })
            .collect::<Result<_>>()?;
        Ok(Matrix::from_columns(self.dim(target), &cols))
    }

    /// Coefficient on the fundamental class (full mode, degree m).
    pub fn trace(&self, x: &Element) -> Result<Rational> {
        if self.is_truncated() {
            return Err(Error::Precondition(
                "trace needs the fundamental class (full mode)".into(),
            ));
        }
        if x.degree != self.dimension {
            return Ok(Rational::zero());
        }
        if self.dim(self.dimension) != 1 {
            return Err(Error::Invalid(format!(
                "top degree {} is {}-dimensional",
                self.dimension,
                self.dim(self.dimension)
            )));
        }
        Ok(x.coefficient(0))
    }

    /// Gram matrix of `A^k ⊗ A^{m-k} → A^m ≅ Q`.
    pub fn pairing_matrix(&self, k: usize) -> Result<Matrix<Rational>> {
        if self.is_truncated() {
            return Err(Error::Precondition(format!(
                "pairing matrix needs full mode (cap {:?})",
                self.cap
            )));
        }
        if k > self.dimension {
            return Err(Error::Dimension(format!("degree {k} above dimension")));
        }
        let m = self.dimension;
        if self.dim(m) != 1 {
            return Err(Error::Invalid(format!(
                "top degree {m} is not one-dimensional"
            )));
        }
        if let Structure::Monomial {
            generators,
            generator_degree,
            ..
        } = &self.structure
        {
            // the partner of a monomial is its complement
            let (n, g) = (*generators, *generator_degree);
            let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            let data = (0..self.dim(k))
                .map(|i| {
                    let a = comb::unrank_lex(i, n, k / g);
                    let b = full & !a;
                    let sign = if g % 2 == 1 {
                        comb::wedge_sign(a, b)
                    } else {
                        1
                    };
                    vec![(comb::rank_lex(b, n), Rational::from_integer(sign.into()))]
                })
                .collect();
            return Ok(Matrix::from_sparse_rows(self.dim(k), self.dim(m - k), data));
        }
        let data = (0..self.dim(k))
            .map(|i| {
                (0..self.dim(m - k))
                    .filter_map(|j| match self.try_basis_product(k, i, m - k, j) {
                        Ok(p) => p
                            .into_iter()
                            .find(|(t, _)| *t == 0)
                            .map(|(_, c)| Ok((j, c))),
                        Err(e) => Some(Err(e)),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_sparse_rows(self.dim(k), self.dim(m - k), data))
    }

    /// Rank of `(α_j) ↦ Σ classes_j · α_j` from `⊕_j A^l` to `A^{k+l}`.
    pub fn mult_image_rank(&self, classes: &[Element], l: usize) -> Result<usize> {
        let Some(k) = classes.first().map(|c| c.degree) else {
            return Ok(0);
        };
        if classes.iter().any(|c| c.degree != k) {
            return Err(Error::Dimension("classes of mixed degrees".into()));
        }
        let target = k + l;
        if let Some(e) = self.overflow(target) {
            return Err(e);
        }
        let mut images = Vec::new();
        for c in classes {
            for t in 0..self.dim(l) {
                images.push(
                    self.try_mul(c, &Element::basis(l, t))?
                        .to_dense(self.dim(target)),
                );
            }
        }
        Ok(linalg::rank_of_vectors(&images, self.dim(target)))
    }

    /// Embedding `x ↦ x ⊗ 1` into a tensor product.
    pub fn embed_left(&self, x: &Element) -> Result<Element> {
        let Structure::Tensor { right, blocks, .. } = &self.structure else {
            return Err(Error::Precondition("not a tensor product".into()));
        };
        if x.is_zero() {
            return Ok(Element::zero(x.degree));
        }
        let start = tensor_start(&blocks[x.degree], x.degree, 0)?;
        let nb = right.dim(0);
        Ok(Element::from_sparse(
            x.degree,
            x.coords
                .iter()
                .map(|(i, c)| (start + i * nb, c.clone()))
                .collect(),
        ))
    }

    /// Embedding `y ↦ 1 ⊗ y` into a tensor product.
    pub fn embed_right(&self, y: &Element) -> Result<Element> {
        let Structure::Tensor { blocks, .. } = &self.structure else {
            return Err(Error::Precondition("not a tensor product".into()));
        };
        if y.is_zero() {
            return Ok(Element::zero(y.degree));
        }
        let start = tensor_start(&blocks[y.degree], 0, y.degree)?;
        Ok(Element::from_sparse(
            y.degree,
            y.coords
                .iter()
                .map(|(j, c)| (start + j, c.clone()))
                .collect(),
        ))
    }

    /// Components of a tensor element in `A^d ⊗ B^0` and `A^0 ⊗ B^d`; the
    /// flag reports whether any mixed component `A^i ⊗ B^{d-i}` is nonzero.
    pub fn split_pure(&self, x: &Element) -> Result<(Element, Element, bool)> {
        let Structure::Tensor {
            left,
            right,
            blocks,
        } = &self.structure
        else {
            return Err(Error::Precondition("not a tensor product".into()));
        };
        let d = x.degree;
        let find = |da: usize, db: usize| {
            blocks[d]
                .iter()
                .find(|(x, y, _)| *x == da && *y == db)
                .map(|(_, _, s)| *s)
        };
        let sa = find(d, 0);
        let sb = find(0, d);
        let (na, nb) = (left.dim(d), right.dim(d));
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut mixed = false;
        for (k, c) in &x.coords {
            match (sa, sb) {
                (Some(s), _) if *k >= s && *k < s + na => a.push((k - s, c.clone())),
                (_, Some(s)) if *k >= s && *k < s + nb => b.push((k - s, c.clone())),
                _ => mixed = true,
            }
        }
        Ok((
            Element::from_sparse(d, a),
            Element::from_sparse(d, b),
            mixed,
        ))
    }

    /// Checks the cohomology-algebra axioms.
    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }
}

fn block_of(blocks: &[(usize, usize, usize)], index: usize) -> (usize, usize, usize) {
    *blocks
        .iter()
        .rev()
        .find(|(_, _, s)| *s <= index)
        .expect("index inside some tensor block")
}

fn tensor_start(blocks: &[(usize, usize, usize)], da: usize, db: usize) -> Result<usize> {
    blocks
        .iter()
        .find(|(x, y, _)| *x == da && *y == db)
        .map(|(_, _, s)| *s)
        .ok_or_else(|| Error::Dimension(format!("no tensor block ({da},{db})")))
}

pub(crate) fn power_block(blocks: &[(usize, usize)], index: usize) -> (usize, usize) {
    *blocks
        .iter()
        .rev()
        .find(|(_, s)| *s <= index)
        .expect("index inside some power block")
}

pub(crate) fn power_block_opt(
    blocks: &[(Option<usize>, usize)],
    index: usize,
) -> (Option<usize>, usize) {
    *blocks
        .iter()
        .rev()
        .find(|(_, s)| *s <= index)
        .expect("index inside some blow-up block")
}

fn power_label(symbol: &str, power: usize, base: &str) -> String {
    let h = match power {
        0 => return base.to_string(),
        1 => symbol.to_string(),
        p => format!("{symbol}^{p}"),
    };
    if base == "1" {
        h
    } else {
        format!("{h}·{base}")
    }
}

/// Rewrites `Σ h^k·z_k` so that every power is below `r`, using
/// `h^r = -Σ_{i=1..r} c_i h^{r-i}`.
pub(crate) fn reduce_powers(
    base: &GradedAlgebra,
    chern: &[Option<Element>],
    r: usize,
    mut terms: BTreeMap<usize, Element>,
    degree: usize,
) -> Result<BTreeMap<usize, Element>> {
    while let Some((&k, _)) = terms.range(r..).next_back() {
        let z = terms.remove(&k).expect("present");
        if z.is_zero() {
            continue;
        }
        for i in 1..=r {
            let c = match chern.get(i) {
                Some(Some(c)) => c,
                Some(None) => {
                    return Err(Error::InsufficientNormalData {
                        degree,
                        what: format!("c_{i} of the normal bundle"),
                    })
                }
                None => continue,
            };
            if c.is_zero() {
                continue;
            }
            let p = base.try_mul(c, &z)?;
            if p.is_zero() {
                continue;
            }
            let slot = terms
                .entry(k - i)
                .or_insert_with(|| Element::zero(p.degree));
            *slot = slot.sub(&p);
        }
    }
    terms.retain(|_, z| !z.is_zero());
    Ok(terms)
}

fn encode_powers(blocks: &[(usize, usize)], terms: BTreeMap<usize, Element>) -> SparseVec {
    let mut out = Vec::new();
    for (p, z) in terms {
        let start = blocks
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, s)| *s)
            .expect("bundle block for nonzero term");
        out.extend(z.coords.into_iter().map(|(k, c)| (start + k, c)));
    }
    out.sort_by_key(|(k, _)| *k);
    out
}

fn encode_exceptional(
    blocks: &[(Option<usize>, usize)],
    terms: BTreeMap<usize, Element>,
) -> SparseVec {
    let mut out = Vec::new();
    for (p, z) in terms {
        let start = blocks
            .iter()
            .find(|(q, _)| *q == Some(p))
            .map(|(_, s)| *s)
            .expect("exceptional block for nonzero term");
        out.extend(z.coords.into_iter().map(|(k, c)| (start + k, c)));
    }
    out.sort_by_key(|(k, _)| *k);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub status: CheckStatus,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ValidationVerdict {
    Pass,
    PassUpToCap,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub algebra: String,
    pub dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    pub betti: Vec<usize>,
    pub checks: Vec<AxiomCheck>,
    pub verdict: ValidationVerdict,
    pub notices: Vec<String>,
}

impl ValidationReport {
    pub fn check(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

/// Exhaustive checks run below these counts; above them, seeded sampling.
const EXHAUSTIVE_PAIRS: usize = 250_000;
const EXHAUSTIVE_TRIPLES: usize = 60_000;
const SAMPLES: usize = 10_000;

fn validate(a: &GradedAlgebra) -> ValidationReport {
    let mut checks = Vec::new();
    let mut notices = Vec::new();
    let top = a.top_degree();
    let basis: Vec<(usize, usize)> = (0..=top)
        .flat_map(|d| (0..a.dim(d)).map(move |i| (d, i)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    let unit_ok = a.dim(0) == 1;
    checks.push(AxiomCheck {
        axiom: "unit".into(),
        status: if unit_ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        detail: format!("dim A^0 = {}", a.dim(0)),
        witness: None,
    });

    let lbl = |d: usize, i: usize| a.label(d, i);

    // graded commutativity
    let pairs: Vec<((usize, usize), (usize, usize))> = {
        let all = basis.len() * basis.len();
        if all <= EXHAUSTIVE_PAIRS {
            basis
                .iter()
                .flat_map(|&x| basis.iter().map(move |&y| (x, y)))
                .filter(|(x, y)| x.0 + y.0 <= top)
                .collect()
        } else {
            notices.push(format!("commutativity sampled on {SAMPLES} pairs"));
            (0..SAMPLES)
                .filter_map(|_| {
                    let x = basis[rng.gen_range(0..basis.len())];
                    let y = basis[rng.gen_range(0..basis.len())];
                    (x.0 + y.0 <= top).then_some((x, y))
                })
                .collect()
        }
    };
    let mut comm_fail = None;
    for &((d1, i), (d2, j)) in &pairs {
        let (xy, yx) = match (
            a.try_basis_product(d1, i, d2, j),
            a.try_basis_product(d2, j, d1, i),
        ) {
            (Ok(xy), Ok(yx)) => (xy, yx),
            (Err(e), _) | (_, Err(e)) => {
                comm_fail = Some(format!("{} * {}: {e}", lbl(d1, i), lbl(d2, j)));
                break;
            }
        };
        let sign = if (d1 * d2) % 2 == 1 {
            -Rational::one()
        } else {
            Rational::one()
        };
        let yx: SparseVec = yx.into_iter().map(|(k, c)| (k, c * &sign)).collect();
        if xy != yx {
            comm_fail = Some(format!("{} * {}", lbl(d1, i), lbl(d2, j)));
            break;
        }
    }
    checks.push(AxiomCheck {
        axiom: "graded_commutativity".into(),
        status: if comm_fail.is_none() {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        detail: format!("{} basis pairs", pairs.len()),
        witness: comm_fail,
    });

    // associativity
    let triples: Vec<[(usize, usize); 3]> = {
        let all = basis.len().pow(3);
        if all <= EXHAUSTIVE_TRIPLES {
            let mut v = Vec::new();
            for &x in &basis {
                for &y in &basis {
                    for &z in &basis {
                        if x.0 + y.0 + z.0 <= top && x.0 > 0 && y.0 > 0 && z.0 > 0 {
                            v.push([x, y, z]);
                        }
                    }
                }
            }
            v
        } else {
            notices.push(format!("associativity fuzzed on {SAMPLES} triples"));
            let positive: Vec<(usize, usize)> = basis.iter().copied().filter(|b| b.0 > 0).collect();
            let mut v = Vec::new();
            let mut attempts = 0;
            while v.len() < SAMPLES && attempts < SAMPLES * 50 && !positive.is_empty() {
                attempts += 1;
                let t = [
                    positive[rng.gen_range(0..positive.len())],
                    positive[rng.gen_range(0..positive.len())],
                    positive[rng.gen_range(0..positive.len())],
                ];
                if t[0].0 + t[1].0 + t[2].0 <= top {
                    v.push(t);
                }
            }
            v
        }
    };
    let mut assoc_fail = None;
    for [x, y, z] in &triples {
        let ex = Element::basis(x.0, x.1);
        let ey = Element::basis(y.0, y.1);
        let ez = Element::basis(z.0, z.1);
        let left = a.try_mul(&ex, &ey).and_then(|p| a.try_mul(&p, &ez));
        let right = a.try_mul(&ey, &ez).and_then(|p| a.try_mul(&ex, &p));
        let agree = matches!((&left, &right), (Ok(l), Ok(r)) if l == r);
        if !agree {
            assoc_fail = Some(format!(
                "({} * {}) * {}",
                lbl(x.0, x.1),
                lbl(y.0, y.1),
                lbl(z.0, z.1)
            ));
            break;
        }
    }
    checks.push(AxiomCheck {
        axiom: "associativity".into(),
        status: if assoc_fail.is_none() {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        detail: format!("{} basis triples", triples.len()),
        witness: assoc_fail,
    });

    // duality
    if a.is_truncated() {
        notices.push(format!(
            "truncated at degree {}: top-degree and duality checks skipped above the cap",
            top
        ));
        checks.push(AxiomCheck {
            axiom: "perfect_pairing".into(),
            status: CheckStatus::Skipped,
            detail: "truncated mode".into(),
            witness: None,
        });
    } else {
        let m = a.dimension();
        let mut fail = None;
        let mut detail = String::new();
        if a.dim(m) != 1 {
            fail = Some(format!("degree {m}"));
            detail = format!("dim A^{m} = {}", a.dim(m));
        } else {
            for k in 0..=m / 2 {
                let (dk, dmk) = (a.dim(k), a.dim(m - k));
                if dk != dmk {
                    fail = Some(format!("degree {k}"));
                    detail = format!("dim A^{k} = {dk} but dim A^{} = {dmk}", m - k);
                    break;
                }
                let r = a.pairing_matrix(k).map(|p| linalg::rank(&p)).unwrap_or(0);
                if r != dk {
                    fail = Some(format!("degree {k}"));
                    detail = format!("pairing A^{k} x A^{} has rank {r} < {dk}", m - k);
                    break;
                }
            }
            if fail.is_none() {
                detail = format!("pairings perfect in degrees 0..={}", m / 2);
            }
        }
        checks.push(AxiomCheck {
            axiom: "perfect_pairing".into(),
            status: if fail.is_none() {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            detail,
            witness: fail,
        });
    }

    let failed = checks.iter().any(|c| c.status == CheckStatus::Fail);
    let verdict = match (failed, a.is_truncated()) {
        (true, _) => ValidationVerdict::Fail,
        (false, true) => ValidationVerdict::PassUpToCap,
        (false, false) => ValidationVerdict::Pass,
    };
    ValidationReport {
        algebra: a.name().to_string(),
        dimension: a.dimension(),
        cap: a.cap(),
        betti: a.betti().to_vec(),
        checks,
        verdict,
        notices,
    }
}

/// Homogeneous span, stored as a reduced echelon basis.
#[derive(Clone, Debug)]
pub struct Subspace<F> {
    pub degree: usize,
    pub ambient_dim: usize,
    basis: Vec<Vec<F>>,
}

impl<F: EchelonField> Subspace<F> {
    pub fn new(degree: usize, ambient_dim: usize, vectors: &[Vec<F>]) -> Self {
        let e = linalg::span_echelon(vectors, ambient_dim);
        Subspace {
            degree,
            ambient_dim,
            basis: e.dense_rows(),
        }
    }

    pub fn whole(degree: usize, ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|k| {
                let mut v = vec![F::zero(); ambient_dim];
                v[k] = F::one();
                v
            })
            .collect();
        Subspace {
            degree,
            ambient_dim,
            basis,
        }
    }

    pub fn zero(degree: usize, ambient_dim: usize) -> Self {
        Subspace {
            degree,
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    pub fn contains(&self, v: &[F]) -> bool {
        linalg::span_echelon(&self.basis, self.ambient_dim).contains(v)
    }

    pub fn sum(&self, other: &Subspace<F>) -> Subspace<F> {
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Subspace::new(self.degree, self.ambient_dim, &all)
    }

    pub fn intersection_dim(&self, other: &Subspace<F>) -> usize {
        self.dim() + other.dim() - self.sum(other).dim()
    }

    /// Basis of the intersection, from the kernel of `[self; -other]`.
    pub fn intersection(&self, other: &Subspace<F>) -> Subspace<F> {
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.degree, self.ambient_dim);
        }
        let mut cols: Vec<Vec<F>> = self.basis.clone();
        cols.extend(
            other
                .basis
                .iter()
                .map(|v| v.iter().map(|x| -x.clone()).collect()),
        );
        let m = Matrix::from_columns(self.ambient_dim, &cols);
        let vectors: Vec<Vec<F>> = linalg::kernel(&m)
            .into_iter()
            .map(|coef| {
                let mut v = vec![F::zero(); self.ambient_dim];
                for (c, b) in coef.iter().zip(&self.basis) {
                    for (k, x) in b.iter().enumerate() {
                        v[k] = v[k].clone() + c.clone() * x.clone();
                    }
                }
                v
            })
            .collect();
        Subspace::new(self.degree, self.ambient_dim, &vectors)
    }

    pub fn same_span(&self, other: &Subspace<F>) -> bool {
        self.dim() == other.dim() && self.sum(other).dim() == self.dim()
    }

    /// Defined over Q: the reduced echelon basis is fixed by conjugation.
    pub fn is_rational(&self) -> bool {
        self.basis.iter().flatten().all(|x| x.is_real())
    }

    pub fn conj(&self) -> Subspace<F> {
        let v: Vec<Vec<F>> = self
            .basis
            .iter()
            .map(|b| b.iter().map(|x| x.conj()).collect())
            .collect();
        Subspace::new(self.degree, self.ambient_dim, &v)
    }
}

impl Subspace<Rational> {
    pub fn from_elements(degree: usize, ambient_dim: usize, xs: &[Element]) -> Self {
        let v: Vec<Vec<Rational>> = xs.iter().map(|x| x.to_dense(ambient_dim)).collect();
        Subspace::new(degree, ambient_dim, &v)
    }

    pub fn elements(&self) -> Vec<Element> {
        self.basis
            .iter()
            .map(|v| Element::from_dense(self.degree, v))
            .collect()
    }

    pub fn complexify(&self) -> Subspace<GaussRational> {
        let v: Vec<Vec<GaussRational>> = self
            .basis
            .iter()
            .map(|b| b.iter().map(|x| GaussRational::real(x.clone())).collect())
            .collect();
        Subspace::new(self.degree, self.ambient_dim, &v)
    }
}

/// Degree-preserving (or uniformly shifted) linear map between graded
/// algebras, one matrix per source degree.
#[derive(Clone, Debug)]
pub struct AlgebraMap {
    pub source: String,
    pub target: String,
    pub shift: i64,
    pub ring_hom: bool,
    matrices: BTreeMap<usize, Matrix<Rational>>,
}

impl AlgebraMap {
    pub fn new(
        source: &GradedAlgebra,
        target: &GradedAlgebra,
        shift: i64,
        ring_hom: bool,
        matrices: BTreeMap<usize, Matrix<Rational>>,
    ) -> Self {
        AlgebraMap {
            source: source.name().to_string(),
            target: target.name().to_string(),
            shift,
            ring_hom,
            matrices,
        }
    }

    pub fn target_degree(&self, d: usize) -> Option<usize> {
        let t = d as i64 + self.shift;
        (t >= 0).then_some(t as usize)
    }

    pub fn matrix(&self, d: usize) -> Option<&Matrix<Rational>> {
        self.matrices.get(&d)
    }

    pub fn apply(&self, x: &Element) -> Element {
        let Some(t) = self.target_degree(x.degree) else {
            return Element::zero(0);
        };
        let Some(m) = self.matrices.get(&x.degree) else {
            return Element::zero(t);
        };
        let v = m.mul_vec(&x.to_dense(m.cols()));
        Element::from_dense(t, &v)
    }

    /// Checks `f(xy) = f(x) f(y)` on all basis pairs within the source's top
    /// degree. Returns the first failing pair.
    pub fn verify_ring_hom(
        &self,
        source: &GradedAlgebra,
        target: &GradedAlgebra,
    ) -> Result<(), String> {
        if self.shift != 0 {
            return Err("shifted maps are not ring homomorphisms".into());
        }
        let top = source.top_degree().min(target.top_degree());
        if !self.apply(&source.unit()).eq(&target.unit()) {
            return Err("unit not preserved".into());
        }
        for d1 in 1..=top {
            for d2 in d1..=top - d1 {
                for i in 0..source.dim(d1) {
                    let x = Element::basis(d1, i);
                    let fx = self.apply(&x);
                    for j in 0..source.dim(d2) {
                        let y = Element::basis(d2, j);
                        let lhs = self.apply(&source.mul(&x, &y));
                        let rhs = target.mul(&fx, &self.apply(&y));
                        if lhs != rhs {
                            return Err(format!(
                                "f({} * {}) != f(x) f(y)",
                                source.label(d1, i),
                                source.label(d2, j)
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Injective in every degree where it is defined.
    pub fn is_injective(&self) -> bool {
        self.matrices.values().all(|m| linalg::rank(m) == m.cols())
    }

    /// Ring homomorphism determined by the images of algebra generators.
    /// The monomials in the generators must span every source degree up to
    /// `top`; the images of basis vectors are solved for exactly.
    pub fn from_generator_images(
        source: &GradedAlgebra,
        target: &GradedAlgebra,
        images: &[(Element, Element)],
    ) -> Result<AlgebraMap> {
        for (g, img) in images {
            if g.degree != img.degree || g.degree == 0 {
                return Err(Error::Invalid(format!(
                    "generator image degree mismatch ({} vs {})",
                    g.degree, img.degree
                )));
            }
        }
        let top = source.top_degree().min(target.top_degree());
        // per degree: pairs (monomial in source, its image)
        let mut layers: Vec<Vec<(Element, Element)>> = vec![Vec::new(); top + 1];
        layers[0].push((source.unit(), target.unit()));
        for d in 1..=top {
            let mut found: Vec<(Element, Element)> = Vec::new();
            let mut span: Vec<Vec<Rational>> = Vec::new();
            for (g, gi) in images {
                if g.degree > d {
                    continue;
                }
                for (x, xi) in layers[d - g.degree].clone() {
                    let p = source.try_mul(&x, g)?;
                    if p.is_zero() {
                        continue;
                    }
                    let dense = p.to_dense(source.dim(d));
                    let mut trial = span.clone();
                    trial.push(dense.clone());
                    if linalg::rank_of_vectors(&trial, source.dim(d)) > span.len() {
                        span.push(dense);
                        found.push((p, target.try_mul(&xi, gi)?));
                    }
                }
            }
            if span.len() < source.dim(d) {
                return Err(Error::Invalid(format!(
                    "generators do not span degree {d} ({} of {})",
                    span.len(),
                    source.dim(d)
                )));
            }
            layers[d] = found;
        }
        let mut matrices = BTreeMap::new();
        for (d, layer) in layers.iter().enumerate() {
            let n = source.dim(d);
            if n == 0 {
                continue;
            }
            // columns: source monomials (basis change), solve M_src^{-1}
            let src = Matrix::from_columns(
                n,
                &layer.iter().map(|(x, _)| x.to_dense(n)).collect::<Vec<_>>(),
            );
            let img = Matrix::from_columns(
                target.dim(d),
                &layer
                    .iter()
                    .map(|(_, y)| y.to_dense(target.dim(d)))
                    .collect::<Vec<_>>(),
            );
            let inv = linalg::inverse(&src)
                .ok_or_else(|| Error::Invalid("monomial basis singular".into()))?;
            matrices.insert(d, img.mul(&inv));
        }
        let map = AlgebraMap::new(source, target, 0, true, matrices);
        map.verify_ring_hom(source, target)
            .map_err(Error::Invalid)?;
        Ok(map)
    }
}
