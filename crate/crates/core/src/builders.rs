//! Constructors for the model algebras: exterior algebras (tori), truncated
//! polynomial algebras (projective spaces), tensor products, projective
//! bundles and blow-ups.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;

use crate::algebra::{
    power_block_opt, AlgebraMap, Element, GradedAlgebra, MixedElement, ProductTable, SparseVec,
    Structure,
};
use crate::comb::binomial;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Rational;
use crate::spec::{element_from_spec, element_to_spec, AlgebraSpec, ElementInput, ProductSpec};

/// Λ(Q^n) with generators `w1..wn` of degree 1.
pub fn exterior_algebra(n: usize) -> GradedAlgebra {
    exterior_algebra_capped(n, None)
}

pub fn exterior_algebra_capped(n: usize, cap: Option<usize>) -> GradedAlgebra {
    assert!(n <= 64, "at most 64 generators");
    let top = cap.map_or(n, |c| c.min(n));
    let dims = (0..=top).map(|k| binomial(n, k) as usize).collect();
    GradedAlgebra::from_parts(
        format!("Λ(Q^{n})"),
        n,
        cap,
        dims,
        Structure::Monomial {
            generators: n,
            generator_degree: 1,
            symbol: "w".into(),
        },
    )
    .with_spec(AlgebraSpec::Exterior {
        generators: n,
        cap: cap.filter(|&c| c < n),
    })
}

/// Squarefree monomials in `n` generators of degree `degree`: the
/// cohomology of `(S^degree)^n`. Degree 2 gives `(P¹)^n`.
pub fn squarefree_algebra(n: usize, degree: usize, symbol: Option<&str>) -> GradedAlgebra {
    assert!(n <= 64 && degree >= 1);
    let dimension = n * degree;
    let dims = (0..=dimension)
        .map(|d| {
            if d % degree == 0 {
                binomial(n, d / degree) as usize
            } else {
                0
            }
        })
        .collect();
    let sym = symbol.unwrap_or(if degree % 2 == 1 { "w" } else { "h" });
    GradedAlgebra::from_parts(
        format!("(S^{degree})^{n}"),
        dimension,
        None,
        dims,
        Structure::Monomial {
            generators: n,
            generator_degree: degree,
            symbol: sym.to_string(),
        },
    )
    .with_spec(AlgebraSpec::Squarefree {
        generators: n,
        degree,
        symbol: symbol.map(str::to_string),
    })
}

/// `(P¹)^n`, generators `h1..hn` of degree 2 with `h_i^2 = 0`.
pub fn p1_power(n: usize) -> GradedAlgebra {
    squarefree_algebra(n, 2, None).rename(format!("(P^1)^{n}"))
}

/// `Q[h]/(h^{N+1})`, `|h| = 2`: the cohomology of P^N.
pub fn truncated_polynomial(n: usize) -> GradedAlgebra {
    assert!(n >= 1, "P^N needs N >= 1");
    let dimension = 2 * n;
    let dims = (0..=dimension).map(|d| usize::from(d % 2 == 0)).collect();
    let labels = (0..=dimension)
        .map(|d| match (d % 2, d / 2) {
            (1, _) => vec![],
            (_, 0) => vec!["1".to_string()],
            (_, 1) => vec!["h".to_string()],
            (_, k) => vec![format!("h^{k}")],
        })
        .collect();
    let mut products = ProductTable::new();
    for a in 1..=n {
        for b in 1..=n - a {
            products.insert((2 * a, 0, 2 * b, 0), vec![(0, Rational::one())]);
        }
    }
    GradedAlgebra::from_parts(
        format!("P^{n}"),
        dimension,
        None,
        dims,
        Structure::Table { labels, products },
    )
    .with_spec(AlgebraSpec::TruncatedPoly { n })
}

/// Surface-type algebra with `H² = Q^b` carrying the intersection form
/// `form`: basis `1`, `x1..xb`, `pt`.
pub fn surface_from_form(name: &str, form: &Matrix<Rational>) -> Result<GradedAlgebra> {
    if !form.is_square() || !form.entries_equal(&form.transpose()) {
        return Err(Error::NotSymmetric);
    }
    let b = form.rows();
    let labels = vec![
        vec!["1".to_string()],
        vec![],
        (1..=b).map(|i| format!("x{i}")).collect(),
        vec![],
        vec!["pt".to_string()],
    ];
    let mut products = ProductTable::new();
    for i in 0..b {
        for (j, q) in form.sparse_row(i) {
            products.insert((2, i, 2, j), vec![(0, q)]);
        }
    }
    let a = GradedAlgebra::from_parts(
        name,
        4,
        None,
        vec![1, 0, b, 0, 1],
        Structure::Table { labels, products },
    );
    let spec = explicit_spec(&a);
    Ok(a.with_spec(spec))
}

/// Koszul-signed tensor product of two full-mode algebras.
pub fn tensor_product(a: &Arc<GradedAlgebra>, b: &Arc<GradedAlgebra>) -> Result<GradedAlgebra> {
    if a.is_truncated() || b.is_truncated() {
        return Err(Error::Precondition(
            "tensor product needs full-mode factors".into(),
        ));
    }
    let dimension = a.dimension() + b.dimension();
    let mut dims = Vec::with_capacity(dimension + 1);
    let mut blocks = Vec::with_capacity(dimension + 1);
    for d in 0..=dimension {
        let mut start = 0;
        let mut row = Vec::new();
        for da in (0..=d.min(a.dimension())).rev() {
            let db = d - da;
            let size = a.dim(da) * b.dim(db);
            if size > 0 {
                row.push((da, db, start));
                start += size;
            }
        }
        dims.push(start);
        blocks.push(row);
    }
    Ok(GradedAlgebra::from_parts(
        format!("{} ⊗ {}", a.name(), b.name()),
        dimension,
        None,
        dims,
        Structure::Tensor {
            left: a.clone(),
            right: b.clone(),
            blocks,
        },
    )
    .with_spec(AlgebraSpec::Tensor {
        left: Box::new(spec_of(a)),
        right: Box::new(spec_of(b)),
    }))
}

/// Total space of a projectivized bundle with its pullback and Gysin maps.
#[derive(Clone, Debug)]
pub struct ProjectiveBundle {
    pub total: Arc<GradedAlgebra>,
    pub base: Arc<GradedAlgebra>,
    pub rank: usize,
    pub chern: MixedElement,
}

pub fn projective_bundle(
    base: &Arc<GradedAlgebra>,
    rank: usize,
    chern: &MixedElement,
) -> Result<ProjectiveBundle> {
    projective_bundle_with_symbol(base, rank, chern, "h")
}

pub fn projective_bundle_with_symbol(
    base: &Arc<GradedAlgebra>,
    rank: usize,
    chern: &MixedElement,
    symbol: &str,
) -> Result<ProjectiveBundle> {
    if base.is_truncated() {
        return Err(Error::Precondition("bundle base must be full mode".into()));
    }
    if rank == 0 {
        return Err(Error::Invalid("bundle rank must be positive".into()));
    }
    let mut cs: Vec<Option<Element>> = vec![Some(base.unit())];
    for i in 1..=rank {
        cs.push(Some(Element::zero(2 * i)));
    }
    for (&k, x) in &chern.parts {
        if x.degree != k {
            return Err(Error::Invalid(format!(
                "chern component keyed {k} has degree {}",
                x.degree
            )));
        }
        if k % 2 == 1 || k / 2 > rank {
            if x.is_zero() {
                continue;
            }
            return Err(Error::Invalid(format!(
                "chern class in degree {k} does not fit a rank {rank} bundle"
            )));
        }
        if k == 0 {
            if *x != base.unit() {
                return Err(Error::Invalid("c_0 must be 1".into()));
            }
            continue;
        }
        if k > base.dimension() && !x.is_zero() {
            return Err(Error::Invalid(format!(
                "c_{} above the base dimension",
                k / 2
            )));
        }
        cs[k / 2] = Some(x.clone());
    }
    let dimension = base.dimension() + 2 * (rank - 1);
    let mut dims = Vec::with_capacity(dimension + 1);
    let mut blocks = Vec::with_capacity(dimension + 1);
    for d in 0..=dimension {
        let mut start = 0;
        let mut row = Vec::new();
        for i in 0..rank {
            if 2 * i > d {
                break;
            }
            let size = base.dim(d - 2 * i);
            if size > 0 {
                row.push((i, start));
                start += size;
            }
        }
        dims.push(start);
        blocks.push(row);
    }
    let chern_spec = cs
        .iter()
        .enumerate()
        .skip(1)
        .filter_map(|(i, c)| {
            c.as_ref()
                .filter(|c| !c.is_zero())
                .map(|c| (i, ElementInput::from_element(base, c)))
        })
        .collect();
    let total = GradedAlgebra::from_parts(
        format!("P(E^{rank}) → {}", base.name()),
        dimension,
        None,
        dims,
        Structure::Bundle {
            base: base.clone(),
            rank,
            chern: cs.clone(),
            symbol: symbol.to_string(),
            blocks,
        },
    )
    .with_spec(AlgebraSpec::ProjectiveBundle {
        base: Box::new(spec_of(base)),
        rank,
        chern: chern_spec,
        symbol: (symbol != "h").then(|| symbol.to_string()),
    });
    let mut parts = BTreeMap::new();
    for (i, c) in cs.into_iter().enumerate() {
        if let Some(c) = c {
            if !c.is_zero() || i == 0 {
                parts.insert(2 * i, c);
            }
        }
    }
    Ok(ProjectiveBundle {
        total: Arc::new(total),
        base: base.clone(),
        rank,
        chern: MixedElement { parts },
    })
}

impl ProjectiveBundle {
    fn blocks(&self) -> &Vec<Vec<(usize, usize)>> {
        match self.total.structure() {
            Structure::Bundle { blocks, .. } => blocks,
            _ => unreachable!("bundle total has bundle structure"),
        }
    }

    fn start(&self, degree: usize, power: usize) -> Option<usize> {
        self.blocks()
            .get(degree)?
            .iter()
            .find(|(p, _)| *p == power)
            .map(|(_, s)| *s)
    }

    /// Chern class `c_i`, zero when not given.
    pub fn c(&self, i: usize) -> Element {
        self.chern.component(2 * i)
    }

    /// `π*`: base degree-`d` coordinates land in the `h^0` block.
    pub fn pullback(&self, x: &Element) -> Element {
        if x.is_zero() {
            return Element::zero(x.degree);
        }
        let s = self.start(x.degree, 0).expect("base degree present");
        Element::from_sparse(
            x.degree,
            x.coords.iter().map(|(k, c)| (s + k, c.clone())).collect(),
        )
    }

    /// The class `h^power · π*x` (power at most `rank - 1`).
    pub fn h_power_times(&self, power: usize, x: &Element) -> Element {
        assert!(power < self.rank);
        let d = x.degree + 2 * power;
        if x.is_zero() {
            return Element::zero(d);
        }
        let s = self.start(d, power).expect("block present");
        Element::from_sparse(
            d,
            x.coords.iter().map(|(k, c)| (s + k, c.clone())).collect(),
        )
    }

    /// Tautological class `h` of degree 2.
    pub fn h(&self) -> Element {
        if self.rank >= 2 {
            self.h_power_times(1, &self.base.unit())
        } else {
            self.pullback(&self.c(1)).neg()
        }
    }

    /// `π_*`: keeps the `h^{r-1}` block, lowering degree by `2(r-1)`.
    pub fn gysin(&self, x: &Element) -> Element {
        let shift = 2 * (self.rank - 1);
        if x.degree < shift {
            return Element::zero(0);
        }
        let d = x.degree - shift;
        let Some(s) = self.start(x.degree, self.rank - 1) else {
            return Element::zero(d);
        };
        let n = self.base.dim(d);
        Element::from_sparse(
            d,
            x.coords
                .iter()
                .filter(|(k, _)| *k >= s && *k < s + n)
                .map(|(k, c)| (k - s, c.clone()))
                .collect(),
        )
    }

    pub fn pullback_map(&self) -> AlgebraMap {
        let matrices = (0..=self.base.dimension())
            .filter(|&d| self.base.dim(d) > 0)
            .map(|d| {
                let cols: Vec<Vec<Rational>> = (0..self.base.dim(d))
                    .map(|i| {
                        self.pullback(&Element::basis(d, i))
                            .to_dense(self.total.dim(d))
                    })
                    .collect();
                (d, Matrix::from_columns(self.total.dim(d), &cols))
            })
            .collect();
        AlgebraMap::new(&self.base, &self.total, 0, true, matrices)
    }

    pub fn gysin_map(&self) -> AlgebraMap {
        let shift = 2 * (self.rank - 1);
        let matrices = (shift..=self.total.dimension())
            .filter(|&d| self.total.dim(d) > 0)
            .map(|d| {
                let cols: Vec<Vec<Rational>> = (0..self.total.dim(d))
                    .map(|i| {
                        self.gysin(&Element::basis(d, i))
                            .to_dense(self.base.dim(d - shift))
                    })
                    .collect();
                (d, Matrix::from_columns(self.base.dim(d - shift), &cols))
            })
            .collect();
        AlgebraMap::new(&self.total, &self.base, -(shift as i64), false, matrices)
    }

    /// Segre classes `σ_j = π_*(h^{r-1+j})` for `0 <= j <= j_max`.
    pub fn segre_classes(&self, j_max: usize) -> Result<MixedElement> {
        if 2 * j_max > self.base.dimension() {
            return Err(Error::Dimension(format!(
                "σ_{j_max} lies above the base dimension {}",
                self.base.dimension()
            )));
        }
        let h = self.h();
        let mut out = MixedElement::default();
        let mut power = self.total.try_power(&h, self.rank - 1)?;
        for j in 0..=j_max {
            if j > 0 {
                power = self.total.try_mul(&power, &h)?;
            }
            out.insert(self.gysin(&power));
        }
        Ok(out)
    }
}

/// Blow-up algebra with `τ*`, `j_*` and the exceptional class.
#[derive(Clone, Debug)]
pub struct Blowup {
    pub total: Arc<GradedAlgebra>,
    pub ambient: Arc<GradedAlgebra>,
    pub center: Arc<GradedAlgebra>,
    pub restriction: AlgebraMap,
    pub codim: usize,
}

/// Blows up `ambient` along `center`, where the restriction is the ring
/// homomorphism determined by `generator_images`. Normal Chern classes not
/// listed in `normal_chern` are unknown; products that need them fail.
pub fn blowup(
    ambient: &Arc<GradedAlgebra>,
    center: &Arc<GradedAlgebra>,
    generator_images: &[(Element, Element)],
    codim: usize,
    normal_chern: &BTreeMap<usize, Element>,
    cap: Option<usize>,
) -> Result<Blowup> {
    if ambient.is_truncated() || center.is_truncated() {
        return Err(Error::Precondition(
            "blow-up inputs must be full mode".into(),
        ));
    }
    if codim < 2 {
        return Err(Error::Invalid(format!("codimension {codim} < 2")));
    }
    if center.dimension() + 2 * codim != ambient.dimension() {
        return Err(Error::Invalid(format!(
            "dim center + 2·codim = {} + {} but the ambient has dimension {}",
            center.dimension(),
            2 * codim,
            ambient.dimension()
        )));
    }
    let restriction = AlgebraMap::from_generator_images(ambient, center, generator_images)?;
    let mut chern: Vec<Option<Element>> = vec![Some(center.unit())];
    for i in 1..=codim {
        let c = match normal_chern.get(&i) {
            Some(c) if c.degree != 2 * i => {
                return Err(Error::Invalid(format!("c_{i}(N) has degree {}", c.degree)))
            }
            Some(c) => Some(c.clone()),
            None if center.dim(2 * i) == 0 => Some(Element::zero(2 * i)),
            None => None,
        };
        chern.push(c);
    }
    let dimension = ambient.dimension();
    let top = cap.map_or(dimension, |c| c.min(dimension));
    let mut dims = Vec::with_capacity(top + 1);
    let mut blocks = Vec::with_capacity(top + 1);
    for d in 0..=top {
        let mut start = ambient.dim(d);
        let mut row = vec![(None, 0)];
        for i in 0..=codim - 2 {
            if 2 + 2 * i > d {
                break;
            }
            let size = center.dim(d - 2 - 2 * i);
            if size > 0 {
                row.push((Some(i), start));
                start += size;
            }
        }
        if ambient.dim(d) == 0 {
            row.remove(0);
        }
        dims.push(start);
        blocks.push(row);
    }
    let spec = AlgebraSpec::Blowup {
        ambient: Box::new(spec_of(ambient)),
        center: Box::new(spec_of(center)),
        restriction: generator_images
            .iter()
            .map(|(g, img)| {
                let key = ambient.format_element(g);
                (key, ElementInput::from_element(center, img))
            })
            .collect(),
        codim,
        normal_chern: normal_chern
            .iter()
            .map(|(i, c)| (*i, ElementInput::from_element(center, c)))
            .collect(),
        cap: cap.filter(|&c| c < dimension),
    };
    let total = GradedAlgebra::from_parts(
        format!("Bl({}, {})", ambient.name(), center.name()),
        dimension,
        cap,
        dims,
        Structure::Blowup {
            ambient: ambient.clone(),
            center: center.clone(),
            restriction: restriction.clone(),
            codim,
            normal_chern: chern,
            blocks,
        },
    )
    .with_spec(spec);
    Ok(Blowup {
        total: Arc::new(total),
        ambient: ambient.clone(),
        center: center.clone(),
        restriction,
        codim,
    })
}

impl Blowup {
    fn blocks(&self) -> &Vec<Vec<(Option<usize>, usize)>> {
        match self.total.structure() {
            Structure::Blowup { blocks, .. } => blocks,
            _ => unreachable!("blow-up total has blow-up structure"),
        }
    }

    /// `τ*`: ambient classes keep their coordinates.
    pub fn tau_star(&self, x: &Element) -> Result<Element> {
        if x.degree > self.total.top_degree() {
            return Err(Error::DegreeOverflow {
                degree: x.degree,
                cap: self.total.top_degree(),
            });
        }
        Ok(x.clone())
    }

    /// `j_*(h^power · x)` for a center class `x`.
    pub fn j_star(&self, power: usize, x: &Element) -> Result<Element> {
        let d = x.degree + 2 + 2 * power;
        if power + 2 > self.codim {
            return Err(Error::InsufficientNormalData {
                degree: d,
                what: format!("the Gysin image of the center for j_*(h^{power}·x)"),
            });
        }
        if d > self.total.top_degree() {
            return Err(Error::DegreeOverflow {
                degree: d,
                cap: self.total.top_degree(),
            });
        }
        if x.is_zero() {
            return Ok(Element::zero(d));
        }
        let start = self.blocks()[d]
            .iter()
            .find(|(p, _)| *p == Some(power))
            .map(|(_, s)| *s)
            .expect("exceptional block");
        Ok(Element::from_sparse(
            d,
            x.coords
                .iter()
                .map(|(k, c)| (start + k, c.clone()))
                .collect(),
        ))
    }

    /// Exceptional class `e = j_*(1)`.
    pub fn exceptional_class(&self) -> Element {
        self.j_star(0, &self.center.unit())
            .expect("degree 2 is below any cap")
    }

    /// Splits a total class into its `τ*` part and `j_*(h^i·x)` parts.
    pub fn decompose(&self, x: &Element) -> (Element, BTreeMap<usize, Element>) {
        let d = x.degree;
        let blocks = &self.blocks()[d];
        let mut amb = Vec::new();
        let mut exc: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (k, c) in &x.coords {
            match power_block_opt(blocks, *k) {
                (None, _) => amb.push((*k, c.clone())),
                (Some(i), s) => exc.entry(i).or_default().push((k - s, c.clone())),
            }
        }
        (
            Element::from_sparse(d, amb),
            exc.into_iter()
                .map(|(i, v)| (i, Element::from_sparse(d - 2 - 2 * i, v)))
                .collect(),
        )
    }
}

/// Stored spec of an algebra, or its explicit structure constants.
pub fn spec_of(a: &GradedAlgebra) -> AlgebraSpec {
    a.spec().cloned().unwrap_or_else(|| explicit_spec(a))
}

/// Explicit description listing every nonzero product of basis vectors of
/// positive degree.
pub fn explicit_spec(a: &GradedAlgebra) -> AlgebraSpec {
    let top = a.top_degree();
    let basis: Vec<Vec<String>> = (0..=top).map(|d| a.labels(d)).collect();
    let mut products = Vec::new();
    for d1 in 1..=top {
        for d2 in 1..=top - d1 {
            for i in 0..a.dim(d1) {
                for j in 0..a.dim(d2) {
                    let Ok(p) = a.try_basis_product(d1, i, d2, j) else {
                        continue;
                    };
                    if p.is_empty() {
                        continue;
                    }
                    products.push(ProductSpec {
                        left: basis[d1][i].clone(),
                        right: basis[d2][j].clone(),
                        result: element_to_spec(a, &Element::from_sparse(d1 + d2, p)),
                    });
                }
            }
        }
    }
    AlgebraSpec::Explicit {
        name: Some(a.name().to_string()),
        dimension: a.dimension(),
        cap: a.cap(),
        basis,
        products,
    }
}

fn explicit_algebra(
    name: Option<&str>,
    dimension: usize,
    cap: Option<usize>,
    basis: &[Vec<String>],
    products: &[ProductSpec],
) -> Result<GradedAlgebra> {
    let top = cap.map_or(dimension, |c| c.min(dimension));
    if basis.len() != top + 1 {
        return Err(Error::Invalid(format!(
            "basis lists {} degrees, expected {} (0..={top})",
            basis.len(),
            top + 1
        )));
    }
    if basis[0] != ["1"] {
        return Err(Error::Invalid("degree 0 must be spanned by \"1\"".into()));
    }
    let mut index = BTreeMap::new();
    for (d, labels) in basis.iter().enumerate() {
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), (d, i)).is_some() {
                return Err(Error::Invalid(format!("duplicate label {l:?}")));
            }
        }
    }
    let dims = basis.iter().map(Vec::len).collect();
    let shell = GradedAlgebra::from_parts(
        name.unwrap_or("explicit"),
        dimension,
        cap,
        dims,
        Structure::Table {
            labels: basis.to_vec(),
            products: ProductTable::new(),
        },
    );
    let mut table = ProductTable::new();
    for p in products {
        let lookup = |l: &str| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| Error::UnknownLabel(l.to_string()))
        };
        let (d1, i) = lookup(&p.left)?;
        let (d2, j) = lookup(&p.right)?;
        let value = if p.result.is_empty() {
            Element::zero(d1 + d2)
        } else {
            element_from_spec(&shell, &p.result)?
        };
        if value.degree != d1 + d2 {
            return Err(Error::Invalid(format!(
                "{} * {} has degree {} but the result has degree {}",
                p.left,
                p.right,
                d1 + d2,
                value.degree
            )));
        }
        if d1 == 0 || d2 == 0 {
            let other = if d1 == 0 {
                Element::basis(d2, j)
            } else {
                Element::basis(d1, i)
            };
            if value != other {
                return Err(Error::Invalid(format!(
                    "product {} * {} contradicts the unit",
                    p.left, p.right
                )));
            }
            continue;
        }
        if d1 + d2 > top {
            return Err(Error::Invalid(format!(
                "product {} * {} lands above the top degree {top}",
                p.left, p.right
            )));
        }
        if !value.is_zero() {
            table.insert((d1, i, d2, j), value.coords);
        }
    }
    let dims = basis.iter().map(Vec::len).collect();
    Ok(GradedAlgebra::from_parts(
        name.unwrap_or("explicit"),
        dimension,
        cap,
        dims,
        Structure::Table {
            labels: basis.to_vec(),
            products: table,
        },
    ))
}

/// Builds the algebra described by a spec.
pub fn build(spec: &AlgebraSpec) -> Result<GradedAlgebra> {
    match spec {
        AlgebraSpec::Exterior { generators, cap } => {
            if *generators > 64 {
                return Err(Error::Invalid("at most 64 generators".into()));
            }
            Ok(exterior_algebra_capped(*generators, *cap))
        }
        AlgebraSpec::TruncatedPoly { n } => {
            if *n == 0 {
                return Err(Error::Invalid("truncated_poly needs n >= 1".into()));
            }
            Ok(truncated_polynomial(*n))
        }
        AlgebraSpec::Squarefree {
            generators,
            degree,
            symbol,
        } => {
            if *generators > 64 || *degree == 0 {
                return Err(Error::Invalid(
                    "squarefree needs <= 64 generators of positive degree".into(),
                ));
            }
            Ok(squarefree_algebra(*generators, *degree, symbol.as_deref()))
        }
        AlgebraSpec::Tensor { left, right } => {
            let a = Arc::new(build(left)?);
            let b = Arc::new(build(right)?);
            tensor_product(&a, &b)
        }
        AlgebraSpec::ProjectiveBundle { .. } => {
            let pb = build_bundle(spec)?;
            Ok(Arc::try_unwrap(pb.total).unwrap_or_else(|a| (*a).clone()))
        }
        AlgebraSpec::Blowup {
            ambient,
            center,
            restriction,
            codim,
            normal_chern,
            cap,
        } => {
            let ambient = Arc::new(build(ambient)?);
            let center = Arc::new(build(center)?);
            let images = restriction
                .iter()
                .map(|(g, img)| {
                    Ok((
                        crate::spec::parse_element(&ambient, g)?,
                        img.resolve(&center)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let normal = normal_chern
                .iter()
                .map(|(i, c)| Ok((*i, c.resolve(&center)?)))
                .collect::<Result<BTreeMap<_, _>>>()?;
            let bl = blowup(&ambient, &center, &images, *codim, &normal, *cap)?;
            Ok(Arc::try_unwrap(bl.total).unwrap_or_else(|a| (*a).clone()))
        }
        AlgebraSpec::Explicit {
            name,
            dimension,
            cap,
            basis,
            products,
        } => Ok(
            explicit_algebra(name.as_deref(), *dimension, *cap, basis, products)?
                .with_spec(spec.clone()),
        ),
    }
}

/// Builds a `projective_bundle` spec keeping its pullback and Gysin data.
pub fn build_bundle(spec: &AlgebraSpec) -> Result<ProjectiveBundle> {
    let AlgebraSpec::ProjectiveBundle {
        base,
        rank,
        chern,
        symbol,
    } = spec
    else {
        return Err(Error::Precondition(
            "expected a projective_bundle spec".into(),
        ));
    };
    let base = Arc::new(build(base)?);
    let mut parts = BTreeMap::new();
    for (i, c) in chern {
        let x = c.resolve(&base)?;
        if x.degree != 2 * i {
            return Err(Error::Invalid(format!("c_{i} has degree {}", x.degree)));
        }
        parts.insert(2 * i, x);
    }
    projective_bundle_with_symbol(
        &base,
        *rank,
        &MixedElement { parts },
        symbol.as_deref().unwrap_or("h"),
    )
}

/// Replaces the truncation cap of a spec where the kind supports one.
pub fn with_cap(spec: &AlgebraSpec, new_cap: usize) -> Result<AlgebraSpec> {
    let mut s = spec.clone();
    match &mut s {
        AlgebraSpec::Exterior { cap, .. } | AlgebraSpec::Blowup { cap, .. } => *cap = Some(new_cap),
        other => {
            return Err(Error::Precondition(format!(
                "--cap applies to exterior and blowup specs, not {}",
                serde_json::to_value(&*other)
                    .ok()
                    .and_then(|v| v.get("kind").and_then(|k| k.as_str().map(str::to_string)))
                    .unwrap_or_default()
            )))
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ValidationVerdict;
    use crate::linalg;
    use crate::scalar::int;
    use crate::spec::parse_element;

    fn el(a: &GradedAlgebra, s: &str) -> Element {
        parse_element(a, s).unwrap()
    }

    #[test]
    fn exterior_dims() {
        assert_eq!(exterior_algebra(6).dim(3), 20);
        let e2 = exterior_algebra(2);
        assert_eq!(e2.label(2, 0), "w1^w2");
        assert_eq!(exterior_algebra(12).dim(6), 924);
    }

    #[test]
    fn exterior_products() {
        let a = exterior_algebra(6);
        let w1 = el(&a, "w1");
        assert!(a.mul(&w1, &w1).is_zero());
        let l = el(&a, "w1^w2 + w3^w4");
        assert_eq!(a.mul(&l, &w1), el(&a, "w1^w3^w4"));
        let omega = el(&a, "w1^w2 + w3^w4 + w5^w6");
        assert_eq!(a.power(&omega, 3), el(&a, "6 w1^w2^w3^w4^w5^w6"));
        assert_eq!(a.mul(&a.unit(), &l), l);
    }

    #[test]
    fn truncated_polynomial_relations() {
        let p1 = truncated_polynomial(1);
        assert_eq!(p1.labels(2), vec!["h"]);
        assert!(p1.power(&el(&p1, "h"), 2).is_zero());
        let p3 = truncated_polynomial(3);
        let h = el(&p3, "h");
        assert!(!p3.power(&h, 3).is_zero());
        assert!(p3.power(&h, 4).is_zero());
        let p2 = truncated_polynomial(2);
        assert_eq!(
            linalg::signature(&p2.pairing_matrix(2).unwrap())
                .unwrap()
                .signature(),
            1
        );
    }

    #[test]
    fn pairing_matrices() {
        let e2 = exterior_algebra(2);
        let q = e2.pairing_matrix(1).unwrap();
        assert_eq!(
            q.dense_rows(),
            vec![vec![int(0), int(1)], vec![int(-1), int(0)]]
        );
        let e6 = exterior_algebra(6);
        let m = e6.pairing_matrix(3).unwrap();
        assert_eq!(linalg::rank(&m), 20);
        assert!(m.entries_equal(&m.transpose().neg()));
    }

    #[test]
    fn tensor_of_projective_lines() {
        let p1 = Arc::new(truncated_polynomial(1));
        let m = tensor_product(&p1, &p1).unwrap();
        assert_eq!(m.betti(), &[1, 0, 2, 0, 1]);
        assert_eq!(m.validate().verdict, ValidationVerdict::Pass);
    }

    #[test]
    fn tensor_of_circles_is_exterior() {
        let e = Arc::new(exterior_algebra(2));
        let m = tensor_product(&e, &e).unwrap();
        let big = exterior_algebra(4);
        // w_i ⊗ 1 ↦ w_i, 1 ⊗ w_j ↦ w_{j+2}
        let gens: Vec<Element> = ["w1⊗1", "w2⊗1", "1⊗w1", "1⊗w2"]
            .iter()
            .map(|l| el(&m, l))
            .collect();
        let targets: Vec<Element> = ["w1", "w2", "w3", "w4"]
            .iter()
            .map(|l| el(&big, l))
            .collect();
        let images: Vec<(Element, Element)> = gens.into_iter().zip(targets).collect();
        let f = AlgebraMap::from_generator_images(&m, &big, &images).unwrap();
        assert!(f.is_injective());
        assert_eq!(m.betti(), big.betti());
    }

    #[test]
    fn tensor_with_projective_plane() {
        let p2 = Arc::new(truncated_polynomial(2));
        let e = Arc::new(exterior_algebra(2));
        let m = tensor_product(&p2, &e).unwrap();
        assert_eq!(m.dimension(), 6);
        assert_eq!(m.dim(1), 2);
        assert_eq!(m.validate().verdict, ValidationVerdict::Pass);
    }

    #[test]
    fn koszul_sign() {
        let e = Arc::new(exterior_algebra(2));
        let m = tensor_product(&e, &e).unwrap();
        // (1⊗w1)(w1⊗1) = -(w1⊗w1)
        let x = m.mul(&el(&m, "1⊗w1"), &el(&m, "w1⊗1"));
        assert_eq!(x, el(&m, "-w1⊗w1"));
    }

    #[test]
    fn trivial_bundle_over_line() {
        let p1 = Arc::new(truncated_polynomial(1));
        let pb = projective_bundle(&p1, 2, &MixedElement::one(&p1)).unwrap();
        assert_eq!(pb.total.betti(), &[1, 0, 2, 0, 1]);
        assert!(pb.total.power(&pb.h(), 2).is_zero());
        assert_eq!(pb.total.validate().verdict, ValidationVerdict::Pass);
    }

    #[test]
    fn bundle_over_four_torus() {
        let base = Arc::new(exterior_algebra(4));
        let mut c = MixedElement::one(&base);
        c.insert(el(&base, "3 w1^w2^w3^w4"));
        let pb = projective_bundle(&base, 2, &c).unwrap();
        let t = &pb.total;
        let h = pb.h();
        assert_eq!(t.power(&h, 2), pb.pullback(&c.component(4)).neg());
        assert_eq!(pb.gysin(&h), base.unit());
        let seg = pb.segre_classes(2).unwrap();
        assert!(seg.component(2).is_zero());
        assert_eq!(seg.component(4), c.component(4).neg());
        assert_eq!(t.validate().verdict, ValidationVerdict::Pass);
        assert_eq!(t.label(2, t.dim(2) - 1), "h");
        assert_eq!(t.label(3, t.dim(3) - 1), "h·w4");
    }

    #[test]
    fn bundle_projection_formula() {
        let base = Arc::new(exterior_algebra(4));
        let mut c = MixedElement::one(&base);
        c.insert(el(&base, "w1^w2 - w3^w4"));
        c.insert(el(&base, "2 w1^w2^w3^w4"));
        let pb = projective_bundle(&base, 2, &c).unwrap();
        let t = &pb.total;
        let h = pb.h();
        for d in 0..=4 {
            for i in 0..base.dim(d) {
                let g = Element::basis(d, i);
                assert!(pb.gysin(&pb.pullback(&g)).is_zero());
                assert_eq!(pb.gysin(&t.mul(&h, &pb.pullback(&g))), g);
                let x = t.mul(&t.mul(&h, &h), &pb.pullback(&g));
                if x.degree <= t.dimension() {
                    let lhs = pb.gysin(&x);
                    let rhs = base.mul(&pb.gysin(&t.mul(&h, &h)), &g);
                    assert_eq!(lhs, rhs);
                }
            }
        }
        assert!(linalg::rank(pb.pullback_map().matrix(2).unwrap()) == base.dim(2));
    }

    #[test]
    fn explicit_round_trip() {
        let base = Arc::new(exterior_algebra(4));
        let mut c = MixedElement::one(&base);
        c.insert(el(&base, "w1^w2^w3^w4"));
        let pb = projective_bundle(&base, 2, &c).unwrap();
        let spec = explicit_spec(&pb.total);
        let back = build(&spec).unwrap();
        assert_eq!(explicit_spec(&back), spec);
        let again = build(&spec_of(&pb.total)).unwrap();
        assert_eq!(explicit_spec(&again), spec);
    }

    #[test]
    fn explicit_rejects_bad_degree() {
        let spec = AlgebraSpec::Explicit {
            name: None,
            dimension: 2,
            cap: None,
            basis: vec![vec!["1".into()], vec!["a".into()], vec!["t".into()]],
            products: vec![ProductSpec {
                left: "a".into(),
                right: "a".into(),
                result: [("a".to_string(), "1".to_string())].into_iter().collect(),
            }],
        };
        assert!(build(&spec).is_err());
    }

    #[test]
    fn surface_forms() {
        let f = Matrix::from_rows(vec![vec![int(1), int(0)], vec![int(0), int(-1)]]);
        let s = surface_from_form("S", &f).unwrap();
        assert_eq!(s.validate().verdict, ValidationVerdict::Pass);
        assert_eq!(
            linalg::signature(&s.pairing_matrix(2).unwrap())
                .unwrap()
                .signature(),
            0
        );
    }

    fn p3_cubed() -> Arc<GradedAlgebra> {
        let p3 = Arc::new(truncated_polynomial(3));
        let pp = Arc::new(tensor_product(&p3, &p3).unwrap());
        Arc::new(tensor_product(&pp, &p3).unwrap())
    }

    #[test]
    fn blowup_basic_rules() {
        let ambient = p3_cubed();
        let center = Arc::new(exterior_algebra(6));
        let l0 = el(&center, "w1^w2 + w3^w4 + w5^w6");
        let images = vec![
            (el(&ambient, "h⊗1⊗1"), l0.clone()),
            (
                el(&ambient, "1⊗h⊗1"),
                l0.add(&el(&center, "1/10 w1^w2 + 1/10 w3^w4")),
            ),
            (
                el(&ambient, "1⊗1⊗h"),
                l0.add(&el(&center, "1/10 w3^w5 - 1/10 w1^w4")),
            ),
        ];
        let bl = blowup(&ambient, &center, &images, 6, &BTreeMap::new(), Some(8)).unwrap();
        let t = &bl.total;
        assert_eq!(t.dim(3), 6);
        assert_eq!(t.dim(5), 26);
        let e = bl.exceptional_class();
        assert_eq!(t.label(2, e.coords[0].0), "j_*(1)");
        assert_eq!(t.mul(&e, &e), bl.j_star(1, &center.unit()).unwrap().neg());
        let g = el(&ambient, "h⊗1⊗1");
        assert_eq!(
            t.mul(&g, &e),
            bl.j_star(0, &bl.restriction.apply(&g)).unwrap()
        );
        let v = t.validate();
        assert_eq!(v.verdict, ValidationVerdict::PassUpToCap, "{v:?}");
        assert!(!v.notices.is_empty());
    }

    #[test]
    fn blowup_needs_normal_data_above_cap() {
        let ambient = p3_cubed();
        let center = Arc::new(exterior_algebra(6));
        let l0 = el(&center, "w1^w2 + w3^w4 + w5^w6");
        let images = vec![
            (el(&ambient, "h⊗1⊗1"), l0.clone()),
            (el(&ambient, "1⊗h⊗1"), l0.clone()),
            (el(&ambient, "1⊗1⊗h"), l0.clone()),
        ];
        let bl = blowup(&ambient, &center, &images, 6, &BTreeMap::new(), Some(14)).unwrap();
        let t = &bl.total;
        let x = bl.j_star(2, &center.unit()).unwrap();
        let y = bl.j_star(2, &center.unit()).unwrap();
        // j_*(h^2) j_*(h^2) = -j_*(h^5) needs the center's Gysin image
        match t.try_mul(&x, &y) {
            Err(Error::InsufficientNormalData { degree, .. }) => assert_eq!(degree, 12),
            other => panic!("expected insufficient normal data, got {other:?}"),
        }
    }

    #[test]
    fn cap_override() {
        let s = AlgebraSpec::Exterior {
            generators: 6,
            cap: None,
        };
        let capped = build(&with_cap(&s, 3).unwrap()).unwrap();
        assert_eq!(capped.top_degree(), 3);
        assert!(with_cap(&AlgebraSpec::TruncatedPoly { n: 2 }, 2).is_err());
    }

    #[test]
    fn degree_overflow_flagged() {
        let a = exterior_algebra_capped(6, Some(3));
        let x = el(&a, "w1^w2");
        assert!(matches!(
            a.try_mul(&x, &x),
            Err(Error::DegreeOverflow { degree: 4, cap: 3 })
        ));
        assert!(a.mul(&x, &x).is_zero());
    }
}
