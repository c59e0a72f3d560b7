use branetile::cy3::{cy3_scan_pieces, Cy3Status, GradedComplex, Shape};
use branetile::examples;
use branetile::fterm::Model;

#[test]
fn torus_examples_have_no_loop_pieces() {
    for t in [examples::c3(), examples::conifold()] {
        let m = Model::new(&t);
        let (v, pieces) = cy3_scan_pieces(&m, 6, 7).unwrap();
        assert_eq!(v.status, Cy3Status::Cy3Evidence);
        assert_eq!(v.loops, 0);
        assert_eq!(v.disagreements, 0);
        assert_eq!(v.skipped, 0);
        assert!(pieces.iter().all(|p| p.shape != Shape::Loop && p.exact));
    }
}

#[test]
fn cube_has_a_loop_witness_with_euler_one() {
    let m = Model::new(&examples::cube());
    let (v, pieces) = cy3_scan_pieces(&m, 6, 5).unwrap();
    let Cy3Status::NotCy3 { witness } = &v.status else {
        panic!("{:?}", v.status)
    };
    assert_eq!(witness.shape, Shape::Loop);
    assert!(!witness.exact);
    assert_eq!(witness.euler, 1);
    assert!(v.loops >= 1);
    assert_eq!(v.disagreements, 0);
    assert!(pieces.iter().all(|p| p.agrees()));
}

#[test]
fn exactness_tracks_shape_on_every_piece() {
    for (t, r) in [
        (examples::c3(), 7),
        (examples::conifold(), 7),
        (examples::cube(), 5),
    ] {
        let m = Model::new(&t);
        let (_, pieces) = cy3_scan_pieces(&m, 6, r).unwrap();
        assert!(!pieces.is_empty());
        for p in &pieces {
            assert_eq!(p.exact, p.shape != Shape::Loop, "{p:?}");
            let c = GradedComplex::build(&m, &p.sets);
            assert!(c.is_complex());
            assert_eq!(c.euler(), p.euler);
            if p.shape != Shape::Loop {
                assert_eq!(p.euler, 0);
            }
        }
    }
}
