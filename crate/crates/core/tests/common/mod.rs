//! Seeded property suites, shared by the `properties` and `acceptance` targets.
//! Each suite panics on the first failing case.

use std::path::Path;
use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use hodge_core::algebra::CheckStatus;
use hodge_core::builders::{
    build, build_bundle, exterior_algebra, p1_power, surface_from_form, tensor_product,
    truncated_polynomial,
};
use hodge_core::gallery::lattice;
use hodge_core::hodge::WeightOneData;
use hodge_core::linalg::{self, Matrix};
use hodge_core::obstructions::{even_rank_test, half_subspace_verify, Support};
use hodge_core::problem::CheckRequest;
use hodge_core::scalar::{int, GaussRational};
use hodge_core::spec::parse_element;
use hodge_core::{Element, GradedAlgebra, Rational, Subspace};

fn runner(cases: u32, seed: u8) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(
        config,
        TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]),
    )
}

fn fuzz_algebras() -> Vec<Arc<GradedAlgebra>> {
    let e = Arc::new(exterior_algebra(2));
    let p2 = Arc::new(truncated_polynomial(2));
    vec![
        Arc::new(exterior_algebra(6)),
        Arc::new(truncated_polynomial(4)),
        Arc::new(p1_power(5)),
        Arc::new(tensor_product(&p2, &e).unwrap()),
        Arc::new(tensor_product(&e, &Arc::new(exterior_algebra(3))).unwrap()),
        Arc::new(surface_from_form("E8", &lattice("e8").unwrap()).unwrap()),
    ]
}

/// A sparse element of the given degree from raw coordinates.
fn element(a: &GradedAlgebra, degree: usize, raw: &[(usize, i64)]) -> Element {
    let n = a.dim(degree);
    if n == 0 {
        return a.zero(degree);
    }
    raw.iter().fold(a.zero(degree), |acc, &(i, c)| {
        acc.add(&a.basis_element(degree, i % n).scale(&int(c)))
    })
}

type Raw = (usize, Vec<(usize, i64)>);

fn raw() -> impl Strategy<Value = Raw> {
    (
        0usize..64,
        prop::collection::vec((0usize..512, -3i64..=3), 1..4),
    )
}

/// Returns the number of triples checked.
pub fn graded_commutativity_and_associativity() -> usize {
    let algebras = fuzz_algebras();
    let triples = std::sync::atomic::AtomicUsize::new(0);
    let mut run = runner(10_000, 1);
    run.run(
        &(0..algebras.len(), raw(), raw(), raw()),
        |(k, (dx, x), (dy, y), (dz, z))| {
            let a = &algebras[k];
            let top = a.top_degree();
            // degrees chosen so every triple lands at or below the top
            let dx = dx % (top + 1);
            let dy = dy % (top - dx + 1);
            let dz = dz % (top - dx - dy + 1);
            let (x, y, z) = (element(a, dx, &x), element(a, dy, &y), element(a, dz, &z));
            let xy = a.try_mul(&x, &y).unwrap();
            let yx = a.try_mul(&y, &x).unwrap();
            let sign = if dx * dy % 2 == 1 { int(-1) } else { int(1) };
            prop_assert_eq!(&xy, &yx.scale(&sign));
            let left = a.try_mul(&xy, &z).unwrap();
            let right = a.try_mul(&x, &a.try_mul(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            triples.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            Ok(())
        },
    )
    .unwrap();
    let n = triples.into_inner();
    assert!(n >= 10_000);
    n
}

fn shipped_algebras() -> Vec<(String, GradedAlgebra)> {
    let mut out: Vec<(String, GradedAlgebra)> = Vec::new();
    for n in 1..=6 {
        out.push((format!("exterior {n}"), exterior_algebra(n)));
    }
    for n in 1..=4 {
        out.push((format!("P^{n}"), truncated_polynomial(n)));
    }
    out.push(("(P^1)^6".into(), p1_power(6)));
    for name in ["u", "e8", "k3", "bl21p2"] {
        out.push((
            format!("surface {name}"),
            surface_from_form(name, &lattice(name).unwrap()).unwrap(),
        ));
    }
    for a in fuzz_algebras() {
        out.push((a.name().to_string(), (*a).clone()));
    }
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("../cli/tests/fixtures");
    let mut files: Vec<_> = std::fs::read_dir(&fixtures)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    for f in files {
        let name = f.file_name().unwrap().to_string_lossy().to_string();
        if name.starts_with("broken") {
            continue;
        }
        let req = CheckRequest::from_text(&std::fs::read_to_string(&f).unwrap()).unwrap();
        if let Some(spec) = &req.algebra {
            out.push((name.clone(), build(spec).unwrap()));
            if let Ok(pb) = build_bundle(spec) {
                out.push((format!("{name} base"), (*pb.base).clone()));
            }
        }
    }
    out
}

pub fn pairing_is_perfect_on_shipped_algebras() -> usize {
    let all = shipped_algebras();
    let count = all.len();
    assert!(count >= 20);
    for (name, a) in all {
        assert!(!a.is_truncated(), "{name}");
        let r = a.validate();
        let check = r.check("perfect_pairing").expect("pairing checked");
        assert_eq!(check.status, CheckStatus::Pass, "{name}: {}", check.detail);
        for k in 0..=a.top_degree() {
            if a.dim(k) > 0 {
                assert_eq!(
                    linalg::rank(&a.pairing_matrix(k).unwrap()),
                    a.dim(k),
                    "{name} degree {k}"
                );
            }
        }
    }
    count
}

fn symmetric(n: usize) -> impl Strategy<Value = Matrix<Rational>> {
    prop::collection::vec(-4i64..=4, n * n).prop_map(move |v| {
        let mut rows = vec![vec![int(0); n]; n];
        for i in 0..n {
            for j in i..n {
                rows[i][j] = int(v[i * n + j]);
                rows[j][i] = int(v[i * n + j]);
            }
        }
        Matrix::from_rows(rows)
    })
}

fn invertible(n: usize) -> impl Strategy<Value = Matrix<Rational>> {
    prop::collection::vec(-3i64..=3, n * n)
        .prop_map(move |v| {
            Matrix::from_rows(
                v.chunks(n)
                    .map(|r| r.iter().map(|&x| int(x)).collect())
                    .collect(),
            )
        })
        .prop_filter("invertible", |p| linalg::rank(p) == p.rows())
}

pub fn signature_is_a_congruence_invariant() -> usize {
    let cases = 200;
    let mut run = runner(cases, 2);
    let strategy = (1usize..=6).prop_flat_map(|n| (symmetric(n), invertible(n)));
    run.run(&strategy, |(s, p)| {
        let moved = p.transpose().mul(&s).mul(&p);
        let (a, b) = (
            linalg::signature(&s).unwrap(),
            linalg::signature(&moved).unwrap(),
        );
        prop_assert_eq!((a.pos, a.neg, a.null), (b.pos, b.neg, b.null));
        Ok(())
    })
    .unwrap();
    cases as usize
}

pub fn even_rank_is_invariant_under_recombination() -> usize {
    let a = exterior_algebra(6);
    let torus = (
        parse_element(&a, "w1^w2 + w3^w4").unwrap(),
        parse_element(&a, "w3^w5 - w1^w4").unwrap(),
    );
    let coords = prop::collection::vec(-2i64..=2, 15);
    let strategy = (
        coords.clone(),
        coords,
        -3i64..=3,
        -3i64..=3,
        -3i64..=3,
        -3i64..=3,
        any::<bool>(),
    )
        .prop_filter("invertible recombination", |(_, _, p, q, r, s, _)| {
            p * s - q * r != 0
        });
    let cases = 100;
    let mut run = runner(cases, 3);
    run.run(&strategy, |(u, v, p, q, r, s, use_torus)| {
        let (x, y) = if use_torus {
            torus.clone()
        } else {
            let mk =
                |c: &[i64]| Element::from_dense(2, &c.iter().map(|&k| int(k)).collect::<Vec<_>>());
            (mk(&u), mk(&v))
        };
        let x2 = x.scale(&int(p)).add(&y.scale(&int(q)));
        let y2 = x.scale(&int(r)).add(&y.scale(&int(s)));
        let test = |xs: [Element; 2]| {
            let span = Subspace::from_elements(2, a.dim(2), &xs);
            even_rank_test(&a, &xs, &[Support::Asserted(span)], 1).unwrap()
        };
        let before = test([x, y]);
        let after = test([x2, y2]);
        prop_assert_eq!(before.verdict, after.verdict);
        prop_assert_eq!(&before.certificate["rank"], &after.certificate["rank"]);
        Ok(())
    })
    .unwrap();
    cases as usize
}

/// Cup product `∧²H¹ → H²` of `Λ(Q^6)` in the lex pair basis.
fn cup_product_mu() -> Matrix<Rational> {
    Matrix::identity(15)
}

pub fn half_subspace_bound_on_weight_one_structures() -> usize {
    let mu = cup_product_mu();
    let rank = linalg::rank(&mu);
    let gauss = prop::collection::vec((-4i64..=4, -4i64..=4), 18).prop_map(|v| {
        v.chunks(6)
            .map(|c| {
                c.iter()
                    .map(|&(re, im)| GaussRational::from_ints(re, im))
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    });
    let valid = gauss.prop_filter("h10 ⊕ conj(h10) = C^6", |h10| {
        WeightOneData { h10: h10.clone() }.validate(6).is_ok()
    });
    let cases = 60;
    let mut run = runner(cases, 4);
    run.run(&valid, |h10| {
        let f1 = Subspace::new(1, 6, &h10);
        let r = half_subspace_verify(&mu, &f1).unwrap();
        prop_assert!(2 * r <= rank, "rank {} on ∧²F¹ exceeds half of {}", r, rank);
        prop_assert_eq!(r, 3);
        Ok(())
    })
    .unwrap();
    cases as usize
}
