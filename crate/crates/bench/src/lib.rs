//! Fixtures shared by the benches under `benches/`.

use std::sync::Arc;

use dualpair::corresp::CorrespondenceInstance;
use dualpair::{
    make_field, witt_basis, ApartmentPoint, DivisionKind, EpsHermSpace, Fe, Field, Involution,
    MomentSetting, Rational, Sign, TildeModel, Twist,
};

pub fn prime_field(p: u32) -> Arc<Field> {
    make_field(p, 1, Involution::Identity).expect("odd prime")
}

pub fn symplectic(f: &Arc<Field>, dim: usize) -> EpsHermSpace {
    witt_basis(f, DivisionKind::Split, dim, Sign::Minus, dim / 2, &[]).expect("even dimension")
}

pub fn orthogonal(f: &Arc<Field>, dim: usize) -> EpsHermSpace {
    witt_basis(
        f,
        DivisionKind::Split,
        dim,
        Sign::Plus,
        dim / 2,
        &vec![Fe::ONE; dim % 2],
    )
    .expect("split space")
}

pub fn sp_o(f: &Arc<Field>, n: usize, np: usize) -> MomentSetting {
    MomentSetting::formed(symplectic(f, n), orthogonal(f, np)).expect("opposite signs")
}

/// The first stable instance of the `Sp2 × O3` model at depth `1/4`.
pub fn sp2_o3_instance(p: u32) -> CorrespondenceInstance {
    let f = prime_field(p);
    let pt = ApartmentPoint::new(
        DivisionKind::Split,
        Sign::Minus,
        vec![Rational::new(1, 4)],
        vec![],
        vec![],
    )
    .expect("point");
    let ptp = ApartmentPoint::new(
        DivisionKind::Split,
        Sign::Plus,
        vec![Rational::new(1, 2)],
        vec![Rational::from_integer(0)],
        vec![1],
    )
    .expect("point");
    let model = TildeModel::from_points(
        symplectic(&f, 2),
        orthogonal(&f, 3),
        &pt,
        &ptp,
        2,
        Twist::Identity,
        Twist::Identity,
    )
    .expect("model");
    model
        .stable_instances(1, 1_000_000)
        .expect("within budget")
        .remove(0)
}
