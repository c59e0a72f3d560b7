mod common;

use std::collections::BTreeMap;

use branetile::cover::LiftedTile;
use branetile::fterm::{Engine, Model};
use branetile::{examples, Arrow, BraneTiling, Error, FaceId, Word};
use common::IdealOracle;
use proptest::prelude::*;

fn oracle(m: &Model) -> IdealOracle {
    IdealOracle::new(m.tiling(), m.grading().unwrap().weights.clone())
}

/// Every pair of paths from the root with the same end tile and weight,
/// compared against ideal membership. Returns (pairs, disagreements).
fn compare(t: &BraneTiling, bound: u64, radius: usize) -> (usize, usize) {
    let m = Model::new(t);
    let mut ideal = oracle(&m);
    let mut pairs = 0;
    let mut bad = 0;
    for f in 0..t.faces().len() {
        let e = Engine::develop(&m, FaceId(f), radius).unwrap();
        let root = e.root();
        let mut groups: BTreeMap<(LiftedTile, u64), Vec<Word>> = BTreeMap::new();
        for (w, end) in e.enumerate_words(root, bound) {
            groups.entry((end, m.weight(&w))).or_default().push(w);
        }
        for ws in groups.values() {
            for i in 0..ws.len() {
                for j in i + 1..ws.len() {
                    let got = match e.equivalent(root, &ws[i], &ws[j]) {
                        Ok(b) => b,
                        Err(Error::PatchExhausted { .. }) => continue,
                        Err(err) => panic!("{err}"),
                    };
                    pairs += 1;
                    if got != ideal.equivalent(&ws[i], &ws[j]) {
                        bad += 1;
                    }
                }
            }
        }
    }
    (pairs, bad)
}

#[test]
fn c3_equivalence_matches_ideal_membership() {
    let (pairs, bad) = compare(&examples::c3(), 6, 4);
    assert!(pairs > 10_000, "{pairs}");
    assert_eq!(bad, 0);
}

#[test]
fn conifold_equivalence_matches_ideal_membership() {
    let (pairs, bad) = compare(&examples::conifold(), 6, 4);
    assert!(pairs > 100, "{pairs}");
    assert_eq!(bad, 0);
}

#[test]
fn twisted_conifold_matches_ideal_membership() {
    let (_, bad) = compare(&common::fixture("conifold_twisted"), 5, 5);
    assert_eq!(bad, 0);
}

#[test]
fn omega_is_the_same_at_every_corner() {
    for t in [examples::c3(), examples::conifold()] {
        let m = Model::new(&t);
        for f in 0..t.faces().len() {
            let e = Engine::develop(&m, FaceId(f), 4).unwrap();
            let w0 = m.simple_loop_at_corner(FaceId(f), 0);
            for k in 1..t.face(FaceId(f)).len() {
                let wk = m.simple_loop_at_corner(FaceId(f), k);
                assert!(e.equivalent(e.root(), &w0, &wk).unwrap());
            }
        }
    }
}

#[test]
fn omega_commutes_with_paths() {
    let m = Model::new(&examples::conifold());
    let e = Engine::develop(&m, FaceId(0), 8).unwrap();
    for (w, end) in e.enumerate_words(e.root(), 3) {
        let mut left = m.omega(FaceId(0));
        left.extend_from_slice(&w);
        let mut right = w.clone();
        right.extend(m.omega(e.patch().face(end)));
        assert!(e.equivalent(e.root(), &left, &right).unwrap());
    }
}

#[test]
fn equivalence_does_not_depend_on_the_lift() {
    // the same base words compared from two lifts of face 0
    let m = Model::new(&examples::conifold());
    let e = Engine::develop(&m, FaceId(0), 6).unwrap();
    let p = e.patch();
    let other = p
        .tiles()
        .find(|&t| t != e.root() && p.face(t) == FaceId(0) && p.dist(t) == 2)
        .unwrap();
    for (w, _) in e.enumerate_words(e.root(), 4) {
        for (v, _) in e.enumerate_words(e.root(), 4) {
            let a = e.equivalent(e.root(), &w, &v);
            let b = e.equivalent(other, &w, &v);
            if let (Ok(a), Ok(b)) = (a, b) {
                assert_eq!(a, b);
            }
        }
    }
}

#[test]
fn canonical_form_weights() {
    let m = Model::new(&examples::c3());
    let e = Engine::develop(&m, FaceId(0), 6).unwrap();
    for (w, end) in e.enumerate_words(e.root(), 4) {
        let g = e.canonical_form(&w).unwrap();
        assert_eq!(g.end, end);
        assert_eq!(m.weight(&w), e.min_weight(end) + 3 * g.n);
    }
}

fn random_walk(m: &Model, from: FaceId, picks: &[usize]) -> Word {
    let q = m.quiver();
    let mut at = from;
    let mut w = Vec::new();
    for &p in picks {
        let outs: Vec<Arrow> = q.out_arrows(at).collect();
        let a = outs[p % outs.len()];
        w.push(a);
        at = q.head(a);
    }
    w
}

proptest! {
    #[test]
    fn moves_preserve_weight_and_ends(which in 0usize..2, picks in prop::collection::vec(0usize..8, 1..8)) {
        let t = [examples::c3(), examples::conifold()][which].clone();
        let m = Model::new(&t);
        let w = random_walk(&m, FaceId(0), &picks);
        let e = Engine::develop(&m, FaceId(0), 8).unwrap();
        let end = e.patch().lift_path(e.root(), &w).unwrap();
        for v in m.basic_moves(&w) {
            prop_assert_eq!(m.weight(&v), m.weight(&w));
            prop_assert_eq!(e.patch().lift_path(e.root(), &v).unwrap(), end);
            // every basic move can be undone
            prop_assert!(m.basic_moves(&v).contains(&w));
        }
    }

    #[test]
    fn classes_are_closed_and_shared(picks in prop::collection::vec(0usize..8, 1..6)) {
        let m = Model::new(&examples::conifold());
        let w = random_walk(&m, FaceId(0), &picks);
        let e = Engine::develop(&m, FaceId(0), 6).unwrap();
        let c = e.equiv_class(e.root(), &w).unwrap();
        prop_assert!(c.contains(&w));
        for u in &c.members {
            for v in m.basic_moves(u) {
                prop_assert!(c.contains(&v));
            }
            prop_assert!(std::sync::Arc::ptr_eq(&e.equiv_class(e.root(), u).unwrap(), &c));
        }
    }

    #[test]
    fn minimality_is_weight_minimality(picks in prop::collection::vec(0usize..8, 0..6)) {
        let m = Model::new(&examples::c3());
        let w = random_walk(&m, FaceId(0), &picks);
        let e = Engine::develop(&m, FaceId(0), 7).unwrap();
        let end = e.patch().lift_path(e.root(), &w).unwrap();
        prop_assert_eq!(e.is_minimal(e.root(), &w).unwrap(), m.weight(&w) == e.min_weight(end));
    }
}
