mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zhknot::bracket::{zh_bracket, zh_bracket_of};
use zhknot::moves::{as_sites, random_as_walk, random_walk_with, MoveKind, WalkOptions};
use zhknot::quandle::{count_colorings, FiniteQuandle};
use zhknot::zh::{
    canonical_system, canonicalize_alexander_system, solve_alexander_numbering, verify_alexander_system, vlk,
    zh_construct_with, AlexanderSystem, Side,
};
use zhknot::{zh_construct, GaussCode, Orientation, Role};

fn samples() -> Vec<GaussCode> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut out: Vec<GaussCode> = ["", VTREF, TREFOIL, FIGURE_EIGHT, "O1-O2-U1-U2-", "O1+U2-,U1+O2-"].map(code).into();
    for _ in 0..25 {
        let n = rng.gen_range(1..=5);
        let c = rng.gen_range(1..=2);
        out.push(random_code(&mut rng, n, c));
    }
    out
}

#[test]
fn zh_systems_are_valid_and_omega_only_over_crosses() {
    for d in samples() {
        for o in [Orientation::Op, Orientation::Standard] {
            let z = zh_construct(&d, o);
            assert_eq!(z.omega_passages().len(), 2 * d.num_crossings());
            assert!(z.omega_passages().iter().all(|p| p.role == Role::Over));
            assert_eq!(z.base(), d);
            let v = verify_alexander_system(&z.alexander_system());
            assert!(v.is_valid(), "{d} {o:?}: {:?}", v.violations);
            // ω does not link D as a whole
            let total: i64 = (0..z.omega).map(|j| vlk(&z.code, z.omega, j).unwrap()).sum();
            assert_eq!(total, 0, "{d}");
        }
        let z = zh_construct(&d, Orientation::Op);
        assert_eq!(z.reoriented().reoriented(), z);
        assert_eq!(z.reoriented().code, zh_construct(&d, Orientation::Standard).code);
    }
}

#[test]
fn placement_does_not_change_the_zh_invariants() {
    let q = FiniteQuandle::dihedral(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in samples() {
        let right = zh_construct(&d, Orientation::Op);
        let expected = zh_bracket_of(&right.code, right.omega);
        assert_eq!(expected, zh_bracket(&d));
        let colors = count_colorings(&right.code, &q);
        for _ in 0..4 {
            let mask: u64 = rng.gen();
            let z = zh_construct_with(&d, Orientation::Op, |x| if mask >> (x % 64) & 1 == 1 { Side::Left } else { Side::Right });
            assert!(verify_alexander_system(&z.alexander_system()).is_valid(), "{d}");
            assert_eq!(zh_bracket_of(&z.code, z.omega), expected, "{d}");
            assert_eq!(count_colorings(&z.code, &q), colors, "{d}");
        }
    }
}

#[test]
fn omega_moves_do_not_change_the_zh_invariants() {
    let q = FiniteQuandle::alexander(5, 2).unwrap();
    for (i, d) in samples().into_iter().enumerate().take(12) {
        let z = zh_construct(&d, Orientation::Op);
        let expected = zh_bracket_of(&z.code, z.omega);
        let colors = count_colorings(&z.code, &q);
        let opts = WalkOptions { omega: Some(z.omega), ..WalkOptions::default() };
        let walk = random_walk_with(&z.code, 30, i as u64, &MoveKind::OMEGA, opts);
        for step in &walk.steps {
            assert_eq!(zh_bracket_of(&step.code, z.omega), expected, "{d} after {}", step.site);
            assert_eq!(count_colorings(&step.code, &q), colors, "{d} after {}", step.site);
        }
    }
}

#[test]
fn numerable_diagrams_get_consistent_numberings() {
    for d in samples() {
        if let Some(n) = solve_alexander_numbering(&d) {
            let s = AlexanderSystem::split(&d, &n);
            assert_eq!(s.gamma_crossings(), 0);
            assert!(verify_alexander_system(&s).is_valid(), "{d}");
            assert!(n.labels.values().min().copied().unwrap_or(0) == 0);
        }
    }
    for s in ["", TREFOIL, FIGURE_EIGHT] {
        assert!(solve_alexander_numbering(&code(s)).is_some(), "{s}");
    }
    assert!(solve_alexander_numbering(&code(VTREF)).is_none());
}

#[test]
fn canonical_systems() {
    for d in samples() {
        let c = canonical_system(&d);
        assert!(verify_alexander_system(&c).is_valid(), "{d}");
        assert_eq!(c.base_diagram(), d);
        if solve_alexander_numbering(&d).is_some() {
            // a numerable diagram needs no γ at all once its levels are chosen
            assert!(verify_alexander_system(&AlexanderSystem::split(&d, &solve_alexander_numbering(&d).unwrap())).is_valid());
        }
    }
    assert_eq!(canonical_system(&code(VTREF)).gamma_crossings(), 2);
    assert_eq!(canonical_system(&code(TREFOIL)).gamma_crossings(), 0);
}

#[test]
fn as_orbits_canonicalize_to_one_system() {
    for (i, d) in samples().into_iter().enumerate().take(10) {
        let start = zh_construct(&d, Orientation::Op).alexander_system();
        let target = canonicalize_alexander_system(&start).unwrap();
        for (site, s) in random_as_walk(&start, 40, i as u64, &MoveKind::ALEXANDER) {
            assert!(verify_alexander_system(&s).is_valid(), "{d} after {site}");
            assert_eq!(canonicalize_alexander_system(&s).unwrap(), target, "{d} after {site}");
        }
    }
}

#[test]
fn broken_systems_are_rejected() {
    let mut s = zh_construct(&code(VTREF), Orientation::Op).alexander_system();
    let key = *s.labels.keys().next().unwrap();
    *s.labels.get_mut(&key).unwrap() += 5;
    assert!(!verify_alexander_system(&s).is_valid());
    assert!(canonicalize_alexander_system(&s).is_err());
    assert!(!as_sites(&zh_construct(&code(VTREF), Orientation::Op).alexander_system(), MoveKind::As3A).is_empty());
}
