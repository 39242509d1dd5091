#![allow(dead_code)]

use std::sync::Arc;

use dualpair::lattice::ApartmentPoint;
use dualpair::sample::{random_isometry, random_mat, SampleRng};
use dualpair::{
    make_field, witt_basis, DivisionKind, Fe, Field, Involution, Mat, MomentSetting, Rational, Sign,
};
use rand::Rng;

pub fn field(p: u32, k: u32) -> Arc<Field> {
    let inv = if k == 2 {
        Involution::Frobenius
    } else {
        Involution::Identity
    };
    make_field(p, k, inv).unwrap()
}

pub fn sp(f: &Arc<Field>, n: usize) -> dualpair::EpsHermSpace {
    witt_basis(f, DivisionKind::Split, 2 * n, Sign::Minus, n, &[]).unwrap()
}

pub fn o(f: &Arc<Field>, dim: usize) -> dualpair::EpsHermSpace {
    let aniso = if dim % 2 == 1 { vec![Fe::ONE] } else { vec![] };
    witt_basis(f, DivisionKind::Split, dim, Sign::Plus, dim / 2, &aniso).unwrap()
}

/// Hermitian (`Plus`) or skew-Hermitian (`Minus`) space over `F_{q²}`.
pub fn herm(f: &Arc<Field>, dim: usize, eps: Sign) -> dualpair::EpsHermSpace {
    let e = eps.to_fe(f);
    let d = f
        .elements()
        .find(|&d| !d.is_zero() && d == f.mul(e, f.conj(d)))
        .unwrap();
    let aniso = vec![d; dim % 2];
    witt_basis(f, DivisionKind::Unramified, dim, eps, dim / 2, &aniso).unwrap()
}

/// A spread of settings over small fields: symplectic-orthogonal in both
/// orders, unitary, and general linear.
pub fn settings(p: u32) -> Vec<MomentSetting> {
    let f = field(p, 1);
    let f2 = field(3, 2);
    vec![
        MomentSetting::formed(sp(&f, 1), o(&f, 3)).unwrap(),
        MomentSetting::formed(o(&f, 2), sp(&f, 2)).unwrap(),
        MomentSetting::formed(sp(&f, 2), o(&f, 4)).unwrap(),
        MomentSetting::formed(o(&f, 5), sp(&f, 1)).unwrap(),
        MomentSetting::formed(herm(&f2, 1, Sign::Plus), herm(&f2, 2, Sign::Minus)).unwrap(),
        MomentSetting::gl(&f, 2, 3),
        MomentSetting::gl(&f, 2, 2),
    ]
}

pub fn random_w(s: &MomentSetting, rng: &mut SampleRng) -> Mat {
    let (r, c) = s.w_shape();
    random_mat(s.field(), r, c, rng)
}

pub fn random_invertible(f: &Field, n: usize, rng: &mut SampleRng) -> Mat {
    loop {
        let g = random_mat(f, n, n, rng);
        if !g.det(f).is_zero() {
            return g;
        }
    }
}

/// A random element of each group acting on `W`.
pub fn random_group_pair(s: &MomentSetting, rng: &mut SampleRng) -> (Mat, Mat) {
    match s {
        MomentSetting::Formed { v, vp } => (
            random_isometry(v, &v.lie_basis(), rng),
            random_isometry(vp, &vp.lie_basis(), rng),
        ),
        MomentSetting::Gl { field, n, np } => (
            random_invertible(field, *n, rng),
            random_invertible(field, *np, rng),
        ),
    }
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// A random point with coordinates of denominator at most 12.
pub fn random_point(rng: &mut SampleRng, kind: DivisionKind, eps: Sign) -> ApartmentPoint {
    let nu = kind.nu();
    let n = rng.random_range(0..4usize);
    let plus = (0..n)
        .map(|_| {
            let d = rng.random_range(1..=12i64);
            q(rng.random_range(-d..=d), d)
        })
        .collect();
    let aniso_count = rng.random_range(0..=2usize);
    let aniso = (0..aniso_count)
        .map(|_| {
            if rng.random_bool(0.5) {
                Rational::from_integer(0)
            } else {
                nu / 2
            }
        })
        .collect();
    ApartmentPoint::new(kind, eps, plus, aniso, vec![1; aniso_count]).unwrap()
}

/// A random point with coordinates in `(1/2m)ℤ` and at least one vector.
pub fn random_graded_point(rng: &mut SampleRng, eps: Sign, m: i64) -> ApartmentPoint {
    let n = rng.random_range(1..4usize);
    let plus = (0..n)
        .map(|_| q(rng.random_range(0..2 * m), 2 * m))
        .collect();
    let aniso_count = rng.random_range(0..=1usize);
    let aniso = (0..aniso_count)
        .map(|_| {
            if rng.random_bool(0.5) {
                q(0, 1)
            } else {
                q(1, 2)
            }
        })
        .collect();
    ApartmentPoint::new(DivisionKind::Split, eps, plus, aniso, vec![1; aniso_count]).unwrap()
}
