mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zhknot::algebra::CyclicGroup;
use zhknot::quandle::{
    builtin_quandles, check_cocycle, cjkls_cocycle, cocycle_invariant, colorings, count_colorings,
    count_colorings_linear, extended_colorings, extended_cocycle_invariant, presentation, FiniteQuandle,
    QuandleError, TwoCocycle,
};

/// Brute-force check of the three axioms on a raw table.
fn is_quandle(t: &[Vec<u32>]) -> bool {
    let n = t.len();
    let op = |x: usize, y: usize| t[x][y] as usize;
    (0..n).all(|x| op(x, x) == x)
        && (0..n).all(|y| {
            let mut col: Vec<usize> = (0..n).map(|x| op(x, y)).collect();
            col.sort();
            col.dedup();
            col.len() == n
        })
        && (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| op(op(x, y), z) == op(op(x, z), op(y, z)))))
}

proptest! {
    #[test]
    fn axiom_validator_agrees_with_brute_force(pick in 0usize..40, i in 0usize..8, j in 0usize..8, v in 0u32..8) {
        let all = builtin_quandles(8);
        let q = &all[pick % all.len()];
        let n = q.size();
        let mut rows = q.rows();
        rows[i % n][j % n] = v % n as u32;
        prop_assert_eq!(FiniteQuandle::from_table("perturbed", &rows).is_ok(), is_quandle(&rows));
    }
}

#[test]
fn builtins_and_their_v_extensions_are_quandles() {
    for q in builtin_quandles(12) {
        assert!(is_quandle(&q.rows()), "{}", q.name);
        let v = q.adjoin_v();
        assert!(v.check_axioms().is_ok(), "{}", v.name);
        assert!(is_quandle(&v.rows()), "{}", v.name);
    }
}

#[test]
fn bad_tables_report_the_failed_axiom() {
    let e = FiniteQuandle::from_table("x", &[vec![1, 0], vec![1, 1]]).unwrap_err();
    assert_eq!(e, QuandleError::AxiomViolation { axiom: 1, witness: vec![0] });
    assert!(matches!(FiniteQuandle::from_table("x", &[vec![0, 0]]), Err(QuandleError::NotSquare)));
    assert!(matches!(FiniteQuandle::alexander(4, 2), Err(QuandleError::AxiomViolation { axiom: 2, .. })));
}

#[test]
fn linear_algebra_and_backtracking_agree() {
    let qs: Vec<FiniteQuandle> = builtin_quandles(9).into_iter().filter(|q| q.linear().is_some()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..60 {
        let n = rng.gen_range(0..=5);
        let c = rng.gen_range(1..=2);
        let d = random_code(&mut rng, n, c);
        let q = &qs[rng.gen_range(0..qs.len())];
        assert_eq!(count_colorings_linear(&d, q), Some(count_colorings(&d, q) as u128), "{d} {}", q.name);
    }
}

#[test]
fn colorings_satisfy_every_relation() {
    let q = FiniteQuandle::dihedral(5).unwrap();
    let d = code(FIGURE_EIGHT);
    let p = presentation(&d);
    let cs = colorings(&d, &q);
    assert_eq!(cs.len(), 25);
    for c in cs {
        for r in &p.relations {
            assert_eq!(q.op(c[r.left], c[r.right]), c[r.result]);
        }
    }
}

#[test]
fn classical_knots_extend_by_a_factor_of_x() {
    for q in builtin_quandles(6) {
        for s in ["", TREFOIL, FIGURE_EIGHT] {
            let d = code(s);
            assert_eq!(extended_colorings(&d, &q), q.size() as u64 * count_colorings(&d, &q), "{s} {}", q.name);
        }
    }
}

#[test]
fn cocycles() {
    let q = FiniteQuandle::dihedral(4).unwrap();
    let phi = cjkls_cocycle();
    assert!(check_cocycle(&q, &phi).is_ok());
    let mut bad = vec![vec![0; 4]; 4];
    bad[1][2] = 1;
    let bad = TwoCocycle::from_exponents(CyclicGroup::Infinite, &bad).unwrap();
    assert!(check_cocycle(&q, &bad).is_err());
    let d3 = FiniteQuandle::dihedral(3).unwrap();
    assert!(matches!(check_cocycle(&d3, &phi), Err(QuandleError::SizeMismatch { .. })));

    // the trivial cocycle counts colorings
    let one = TwoCocycle::trivial(4, CyclicGroup::Infinite);
    let d = code(TREFOIL);
    assert_eq!(cocycle_invariant(&d, &q, &one).unwrap().coefficient(0), count_colorings(&d, &q) as i64);
    assert_eq!(extended_cocycle_invariant(&code(""), &q, &phi).unwrap().to_string(), "16");
}
