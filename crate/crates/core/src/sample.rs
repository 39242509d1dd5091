//! Seeded random sampling of field elements, matrices, Lie-algebra elements
//! and isometries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::Mat;
use crate::numeric::{Fe, Field};
use crate::spaces::EpsHermSpace;

/// The generator used for every sampled check.
pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_fe<R: Rng>(field: &Field, rng: &mut R) -> Fe {
    Fe::from_code(rng.random_range(0..field.order()) as u16)
}

pub fn random_nonzero<R: Rng>(field: &Field, rng: &mut R) -> Fe {
    Fe::from_code(rng.random_range(1..field.order()) as u16)
}

pub fn random_mat<R: Rng>(field: &Field, rows: usize, cols: usize, rng: &mut R) -> Mat {
    Mat::from_fn(rows, cols, |_, _| random_fe(field, rng))
}

/// A uniform element of the fixed-field span of `basis`.
pub fn random_combination<R: Rng>(field: &Field, basis: &[Mat], rng: &mut R) -> Mat {
    let fixed = field.fixed_elements();
    let (r, c) = basis.first().map_or((0, 0), |b| (b.rows(), b.cols()));
    basis.iter().fold(Mat::zeros(r, c), |acc, b| {
        let s = fixed[rng.random_range(0..fixed.len())];
        acc.add(field, &b.scale(field, s))
    })
}

/// `(2 + Y)(2 - Y)⁻¹`, an isometry whenever `Y` is in the Lie algebra and
/// `2 - Y` is invertible.
pub fn inverse_cayley(field: &Field, y: &Mat) -> Option<Mat> {
    let two = Mat::scalar(y.rows(), field.from_i64(2));
    let den = two.sub(field, y).inverse(field)?;
    Some(two.add(field, y).mul(field, &den))
}

/// A random isometry built as a product of inverse Cayley transforms of
/// random Lie-algebra elements, optionally negated.
pub fn random_isometry<R: Rng>(space: &EpsHermSpace, basis: &[Mat], rng: &mut R) -> Mat {
    let f = &**space.field();
    let n = space.dim();
    let mut g = Mat::identity(n);
    for _ in 0..3 {
        let y = random_combination(f, basis, rng);
        if let Some(h) = inverse_cayley(f, &y) {
            g = g.mul(f, &h);
        }
    }
    if rng.random_bool(0.5) {
        g = g.neg(f);
    }
    g
}
