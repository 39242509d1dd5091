mod common;

use common::*;
use dualpair::corresp::DEFAULT_BUDGET;
use dualpair::{
    verify_theorem, ApartmentPoint, DivisionKind, Mat, Picture, Rational, Sign, TildeModel, Twist,
};

fn point(eps: Sign, plus: &[Rational], aniso: &[Rational]) -> ApartmentPoint {
    ApartmentPoint::new(
        DivisionKind::Split,
        eps,
        plus.to_vec(),
        aniso.to_vec(),
        vec![1; aniso.len()],
    )
    .unwrap()
}

fn models() -> Vec<(&'static str, TildeModel)> {
    let f3 = field(3, 1);
    let f5 = field(5, 1);
    vec![
        (
            "Sp2-O3",
            TildeModel::from_points(
                sp(&f5, 1),
                o(&f5, 3),
                &point(Sign::Minus, &[q(1, 4)], &[]),
                &point(Sign::Plus, &[q(1, 2)], &[q(0, 1)]),
                2,
                Twist::Identity,
                Twist::Identity,
            )
            .unwrap(),
        ),
        (
            "O4-Sp4",
            TildeModel::from_points(
                o(&f3, 4),
                sp(&f3, 2),
                &point(Sign::Plus, &[q(1, 2), q(0, 1)], &[]),
                &point(Sign::Minus, &[q(3, 4), q(1, 4)], &[]),
                2,
                Twist::Identity,
                Twist::Identity,
            )
            .unwrap(),
        ),
        (
            "GL2-GL2",
            TildeModel::gl_inner(&f5, 2, &[0, 1], &[0, 1]).unwrap(),
        ),
        (
            "U2-U2",
            TildeModel::ramified_unitary(&f3, Mat::identity(2), Mat::identity(2)).unwrap(),
        ),
    ]
}

/// Independent fiber count: every `w ∈ 𝔰𝔣X` with the same moment images.
fn brute_fiber(model: &TildeModel, lam: &Mat, lam_p: &Mat) -> usize {
    (0..model.x_size().unwrap())
        .filter(|&i| {
            let (a, b) = model.lambda_pair(&model.x_element(i));
            &a == lam && &b == lam_p
        })
        .count()
}

#[test]
fn correspondence_holds_on_small_models() {
    for (name, model) in models() {
        let found = model.stable_instances(3, DEFAULT_BUDGET).unwrap();
        assert_eq!(found.len(), 3, "{name}");
        for inst in &found {
            let rep = verify_theorem(inst, DEFAULT_BUDGET).unwrap();
            assert!(rep.passed(), "{name}: {:?}", rep.checks);
            assert_eq!(
                rep.fiber_size,
                brute_fiber(&model, &inst.lam, &inst.lam_p),
                "{name}"
            );
            assert_eq!(rep.fiber_size * rep.sbar_order, rep.s_order, "{name}");
            if rep.case_e {
                assert_eq!(rep.picture, Picture::RamifiedUnitary);
                assert_eq!(rep.occurring * rep.sbar_order, rep.s_order);
            } else {
                assert_eq!(rep.sbar_order, 1, "{name}");
                assert_eq!(rep.occurring, rep.s_order, "{name}");
            }
        }
    }
}

#[test]
fn pictures_follow_the_dichotomy() {
    let pictures: Vec<Picture> = models().iter().map(|(_, m)| m.picture).collect();
    assert_eq!(
        pictures,
        [
            Picture::CaseB,
            Picture::CaseA,
            Picture::GeneralLinear,
            Picture::RamifiedUnitary
        ]
    );
}

#[test]
fn unstable_vectors_are_rejected() {
    let (_, model) = models().remove(0);
    let (r, c) = model.setting().w_shape();
    let inst = dualpair::CorrespondenceInstance::new(model, Mat::zeros(r, c)).unwrap();
    let rep = verify_theorem(&inst, DEFAULT_BUDGET).unwrap();
    assert!(!rep.passed());
    assert_eq!(rep.checks[0].name, "preconditions");
}
