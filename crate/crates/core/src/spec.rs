//! JSON description files: algebras, elements, subspaces, Hodge structures
//! and the map μ for the half-subspace test.
//!
//! Scalars are strings ("p/q", "p/q+r/s i"). Elements are keyed by basis
//! label, or written inline as `"w1^w2 + w3^w4 - 1/2 w5^w6"`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{Element, GradedAlgebra};
use crate::error::{Error, Result};
use crate::scalar::{parse_rational, GaussRational, Rational, Scalar};

/// Sparse element keyed by basis label.
pub type ElementSpec = BTreeMap<String, String>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraSpec {
    /// Λ(Q^generators), generators of degree 1.
    Exterior {
        generators: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cap: Option<usize>,
    },
    /// Q[h]/(h^{n+1}) with |h| = 2.
    TruncatedPoly { n: usize },
    /// Squarefree monomials in generators of one degree: odd degree is an
    /// exterior algebra, degree 2 gives (P¹)^generators.
    Squarefree {
        generators: usize,
        degree: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        symbol: Option<String>,
    },
    Tensor {
        left: Box<AlgebraSpec>,
        right: Box<AlgebraSpec>,
    },
    ProjectiveBundle {
        base: Box<AlgebraSpec>,
        rank: usize,
        /// Chern classes c_i keyed by i, as base elements.
        #[serde(default, deserialize_with = "index_map")]
        chern: BTreeMap<usize, ElementInput>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        symbol: Option<String>,
    },
    Blowup {
        ambient: Box<AlgebraSpec>,
        center: Box<AlgebraSpec>,
        /// Images of ambient algebra generators (by label) in the center.
        restriction: BTreeMap<String, ElementInput>,
        codim: usize,
        /// Specified normal Chern classes c_i(N) keyed by i; others unknown.
        #[serde(default, deserialize_with = "index_map")]
        normal_chern: BTreeMap<usize, ElementInput>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cap: Option<usize>,
    },
    Explicit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        dimension: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cap: Option<usize>,
        /// Basis labels per degree, degree 0 first (must be `["1"]`).
        basis: Vec<Vec<String>>,
        /// Structure constants for basis pairs of positive degree; missing
        /// pairs multiply to zero.
        products: Vec<ProductSpec>,
    },
}

/// Integer-keyed maps arrive with string keys inside tagged enums.
fn index_map<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> Result<BTreeMap<usize, ElementInput>, D::Error> {
    let raw = BTreeMap::<String, ElementInput>::deserialize(d)?;
    raw.into_iter()
        .map(|(k, v)| {
            k.trim().parse().map(|i| (i, v)).map_err(|_| {
                serde::de::Error::custom(format!("index {k:?} is not a nonnegative integer"))
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpec {
    pub left: String,
    pub right: String,
    pub result: ElementSpec,
}

/// Element given either as an inline expression or a label map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementInput {
    Expr(String),
    Map(ElementSpec),
}

impl ElementInput {
    pub fn resolve(&self, algebra: &GradedAlgebra) -> Result<Element> {
        match self {
            ElementInput::Expr(s) => parse_element(algebra, s),
            ElementInput::Map(m) => element_from_spec(algebra, m),
        }
    }

    pub fn from_element(algebra: &GradedAlgebra, x: &Element) -> Self {
        ElementInput::Map(element_to_spec(algebra, x))
    }
}

pub fn element_from_spec(algebra: &GradedAlgebra, spec: &ElementSpec) -> Result<Element> {
    let terms = spec
        .iter()
        .map(|(l, c)| Ok((l.clone(), parse_rational(c)?)))
        .collect::<Result<Vec<_>>>()?;
    algebra.element_from_labels(&terms)
}

pub fn element_to_spec(algebra: &GradedAlgebra, x: &Element) -> ElementSpec {
    algebra
        .element_to_labels(x)
        .into_iter()
        .map(|(l, c)| (l, c.to_string()))
        .collect()
}

/// Parses `"w1^w2 + w3^w4 - 1/2 w5^w6"`, `"2*h"`, `"-3"` (a multiple of 1).
/// Labels may not contain `+` or `-`; a term's coefficient is a leading
/// rational, optionally followed by `*`.
pub fn parse_element(algebra: &GradedAlgebra, expr: &str) -> Result<Element> {
    let mut terms: Vec<(String, Rational)> = Vec::new();
    let mut sign = Rational::from_integer(1.into());
    let mut current = String::new();
    let flush = |current: &mut String,
                 sign: &Rational,
                 terms: &mut Vec<(String, Rational)>|
     -> Result<()> {
        let t = current.trim();
        if t.is_empty() {
            return Err(Error::Parse(format!("empty term in {expr:?}")));
        }
        if algebra.lookup_label(t).is_some() {
            terms.push((t.to_string(), sign.clone()));
            current.clear();
            return Ok(());
        }
        let digits = t
            .char_indices()
            .take_while(|(_, c)| c.is_ascii_digit() || *c == '/')
            .last()
            .map(|(k, c)| k + c.len_utf8())
            .unwrap_or(0);
        let (coef, rest) = t.split_at(digits);
        let rest = rest.trim_start();
        let (coef, label) = match (coef.is_empty(), rest.is_empty()) {
            (true, _) => (Rational::from_integer(1.into()), rest),
            (false, true) => (parse_rational(coef)?, "1"),
            (false, false) => (
                parse_rational(coef)?,
                rest.strip_prefix('*').unwrap_or(rest).trim(),
            ),
        };
        terms.push((label.to_string(), coef * sign.clone()));
        current.clear();
        Ok(())
    };
    for ch in expr.chars() {
        match ch {
            '+' | '-' if !current.trim().is_empty() => {
                flush(&mut current, &sign, &mut terms)?;
                sign = if ch == '-' {
                    -Rational::from_integer(1.into())
                } else {
                    Rational::from_integer(1.into())
                };
            }
            '+' => {}
            '-' => sign = -sign,
            _ => current.push(ch),
        }
    }
    flush(&mut current, &sign, &mut terms)?;
    algebra.element_from_labels(&terms)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    pub vectors: Vec<ElementInput>,
}

/// Hodge structure description. Vectors are dense coordinate lists in the
/// basis order of their degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HodgeSpec {
    Trivial,
    /// Exterior algebra with H^{1,0} spanned by `h10`.
    WeightOne {
        h10: Vec<Vec<String>>,
    },
    /// Pieces keyed by degree, then by "(p,q)".
    Explicit {
        pieces: BTreeMap<usize, BTreeMap<String, Vec<Vec<String>>>>,
    },
}

/// Matrix of μ: ∧²H¹ → Q^q in the lex basis of pairs w_a^w_b, a < b.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuSpec {
    pub rows: Vec<Vec<String>>,
}

pub fn parse_bidegree(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("bidegree key {key:?} is not of the form \"(p,q)\""));
    let inner = key
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(bad)?;
    let (p, q) = inner.split_once(',').ok_or_else(bad)?;
    Ok((
        p.trim().parse().map_err(|_| bad())?,
        q.trim().parse().map_err(|_| bad())?,
    ))
}

pub fn format_bidegree(p: usize, q: usize) -> String {
    format!("({p},{q})")
}

pub fn parse_vector<F: Scalar>(v: &[String]) -> Result<Vec<F>> {
    v.iter().map(|s| F::parse_text(s)).collect()
}

pub fn format_vector<F: Scalar>(v: &[F]) -> Vec<String> {
    v.iter().map(|x| x.to_text()).collect()
}

pub fn parse_gauss_vectors(vs: &[Vec<String>]) -> Result<Vec<Vec<GaussRational>>> {
    vs.iter().map(|v| parse_vector(v)).collect()
}

/// Reads JSON from a file; errors carry the file name and line/column.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    from_json_text(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn from_json_text<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        if e.line() > 0 {
            return Error::Parse(format!("{e}"));
        }
        // tagged enums lose positions; point at the first quoted name instead
        let msg = e.to_string();
        let located = msg
            .split('`')
            .nth(1)
            .and_then(|name| text.find(&format!("\"{name}\"")))
            .map(|offset| {
                let before = &text[..offset];
                let line = before.matches('\n').count() + 1;
                let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
                format!("{msg} at line {line} column {column}")
            });
        Error::Parse(located.unwrap_or(msg))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::exterior_algebra;
    use crate::scalar::{int, rat};

    #[test]
    fn inline_elements() {
        let a = exterior_algebra(6);
        let x = parse_element(&a, "w1^w2 + w3^w4 - 1/2 w5^w6").unwrap();
        assert_eq!(x.degree, 2);
        assert_eq!(x.coords.len(), 3);
        assert_eq!(
            x.coefficient(a.lookup_label("w5^w6").unwrap().1),
            rat(-1, 2)
        );
        let y = parse_element(&a, "-3").unwrap();
        assert_eq!(y, a.unit().scale(&int(-3)));
        let z = parse_element(&a, "2*w1 - w3").unwrap();
        assert_eq!(z.coefficient(0), int(2));
        assert_eq!(z.coefficient(2), int(-1));
        assert!(parse_element(&a, "w1 + w1^w2").is_err());
        assert!(parse_element(&a, "w9").is_err());
    }

    #[test]
    fn bidegree_keys() {
        assert_eq!(parse_bidegree("(1,0)").unwrap(), (1, 0));
        assert_eq!(parse_bidegree(" ( 2 , 3 ) ").unwrap(), (2, 3));
        assert!(parse_bidegree("1,0").is_err());
        assert_eq!(format_bidegree(0, 1), "(0,1)");
    }

    #[test]
    fn spec_json_shape() {
        let s: AlgebraSpec = from_json_text(r#"{"kind":"exterior","generators":4}"#).unwrap();
        assert_eq!(
            s,
            AlgebraSpec::Exterior {
                generators: 4,
                cap: None
            }
        );
        let err =
            from_json_text::<AlgebraSpec>("{\"kind\":\"exterior\",\n\"gens\":4}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn chern_keys_are_indices() {
        let s: AlgebraSpec = from_json_text(
            r#"{"kind":"projective_bundle","base":{"kind":"exterior","generators":2},"rank":2,"chern":{"1":"w1^w2"}}"#,
        )
        .unwrap();
        let AlgebraSpec::ProjectiveBundle { chern, .. } = s else {
            panic!()
        };
        assert!(chern.contains_key(&1));
        assert!(from_json_text::<AlgebraSpec>(
            r#"{"kind":"projective_bundle","base":{"kind":"exterior","generators":2},"rank":2,"chern":{"x":"w1^w2"}}"#
        )
        .is_err());
    }
}
