//! Cyclic gradings `𝔤 = ⊕_j 𝔤_j` of classical Lie algebras over a finite
//! field, cut out by `θ = Ad(t̄)∘ϑ` with `t̄ = diag(ζ^{u_k})`, where `𝔤_j` is
//! the `ζ^{-j}`-eigenspace of `θ`.
//!
//! `t̄` only needs to be a similitude of the form: `u_k + u_{k̄} ≡ c (mod m)`
//! for every Witt partner pair `(k, k̄)`. Conjugation by a similitude still
//! preserves the Lie algebra, and the shifted weights coming from
//! half-integral points produce exactly such elements.

use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{coefficient_kernel, combine, Mat};
use crate::moment::LieAlgebra;
use crate::numeric::{root_of_unity, Fe, Field, NumericError};
use crate::spaces::EpsHermSpace;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradingError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("{got} weights supplied for a space of dimension {expected}")]
    WeightCount { expected: usize, got: usize },
    #[error("the grading element does not preserve the form up to a scalar")]
    NotSimilitude,
    #[error("the twist does not preserve the Lie algebra")]
    BadTwist,
    #[error("θ^m is not the identity")]
    WrongOrder,
    #[error("θ is not diagonalizable over the fixed field")]
    NotSplit,
}

/// The classical group whose Lie algebra is graded.
#[derive(Clone, Debug)]
pub enum Ambient {
    Formed(EpsHermSpace),
    Gl { field: Arc<Field>, n: usize },
}

impl Ambient {
    pub fn field(&self) -> &Arc<Field> {
        match self {
            Ambient::Formed(s) => s.field(),
            Ambient::Gl { field, .. } => field,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Ambient::Formed(s) => s.dim(),
            Ambient::Gl { n, .. } => *n,
        }
    }

    pub fn lie_basis(&self) -> Vec<Mat> {
        match self {
            Ambient::Formed(s) => s.lie_basis(),
            Ambient::Gl { field, n } => LieAlgebra::gl(field, *n).basis().to_vec(),
        }
    }

    pub fn lie_algebra(&self) -> LieAlgebra {
        match self {
            Ambient::Formed(s) => LieAlgebra::of_space(s),
            Ambient::Gl { field, n } => LieAlgebra::gl(field, *n),
        }
    }

    pub fn lie_member(&self, x: &Mat) -> bool {
        match self {
            Ambient::Formed(s) => s.lie_member(x),
            Ambient::Gl { n, .. } => x.rows() == *n && x.is_square(),
        }
    }

    pub fn group_member(&self, g: &Mat) -> bool {
        match self {
            Ambient::Formed(s) => s.is_isometry(g),
            Ambient::Gl { field, n } => g.rows() == *n && g.is_square() && !g.det(field).is_zero(),
        }
    }
}

/// The outer part `ϑ` of the grading automorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Twist {
    Identity,
    /// `X ↦ SXS⁻¹`, `g ↦ SgS⁻¹`.
    Inner(Mat),
    /// `X ↦ -JXᵀJ⁻¹`, `g ↦ Jg⁻ᵀJ⁻¹`.
    Transpose(Mat),
}

impl Twist {
    fn name(&self) -> &'static str {
        match self {
            Twist::Identity => "identity",
            Twist::Inner(_) => "inner",
            Twist::Transpose(_) => "transpose",
        }
    }
}

/// An element together with the degree it was certified to lie in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedVector {
    pub degree: u32,
    pub value: Mat,
}

#[derive(Clone, Debug)]
pub struct GradedGroup {
    ambient: Ambient,
    m: u32,
    zeta: Fe,
    weights: Vec<i64>,
    t_bar: Mat,
    t_bar_inv: Mat,
    /// `c` with `t̄` scaling the form by `ζ^c`.
    multiplier: i64,
    twist: Twist,
    twist_inv: Option<Mat>,
    basis: Vec<Mat>,
    pieces: Vec<Vec<Mat>>,
    lie: LieAlgebra,
}

/// Builds the grading of `ambient` by `t̄ = diag(ζ^{weights})` and `ϑ`.
pub fn build_grading(
    ambient: Ambient,
    m: u32,
    weights: &[i64],
    twist: Twist,
) -> Result<GradedGroup, GradingError> {
    let field = Arc::clone(ambient.field());
    let f = &*field;
    let n = ambient.dim();
    if weights.len() != n {
        return Err(GradingError::WeightCount {
            expected: n,
            got: weights.len(),
        });
    }
    let zeta = root_of_unity(f, m as u64)?;
    let t_bar = Mat::diag(&weights.iter().map(|&u| f.pow(zeta, u)).collect::<Vec<_>>());
    let t_bar_inv = t_bar.inverse(f).expect("diagonal of roots of unity");
    let multiplier = match &ambient {
        Ambient::Formed(s) => similitude_exponent(f, s, &t_bar, zeta, m)?,
        Ambient::Gl { .. } => 0,
    };
    let twist_inv = match &twist {
        Twist::Identity => None,
        Twist::Inner(s) | Twist::Transpose(s) => Some(s.inverse(f).ok_or(GradingError::BadTwist)?),
    };
    let basis = ambient.lie_basis();
    let lie = ambient.lie_algebra();
    let mut g = GradedGroup {
        ambient,
        m,
        zeta,
        weights: weights.to_vec(),
        t_bar,
        t_bar_inv,
        multiplier,
        twist,
        twist_inv,
        basis,
        pieces: Vec::new(),
        lie,
    };
    for b in &g.basis {
        let image = g.theta(b);
        if !g.ambient.lie_member(&image) {
            return Err(GradingError::BadTwist);
        }
        let mut x = image;
        for _ in 1..m {
            x = g.theta(&x);
        }
        if x != *b {
            return Err(GradingError::WrongOrder);
        }
    }
    g.pieces = (0..m).map(|j| g.eigenspace(j)).collect();
    if g.pieces.iter().map(Vec::len).sum::<usize>() != g.basis.len() {
        return Err(GradingError::NotSplit);
    }
    Ok(g)
}

/// `c` with `conj(t̄)ᵀ G t̄ = ζ^c G`, if any.
fn similitude_exponent(
    f: &Field,
    space: &EpsHermSpace,
    t_bar: &Mat,
    zeta: Fe,
    m: u32,
) -> Result<i64, GradingError> {
    let lhs = t_bar.conj_transpose(f).mul(f, space.gram()).mul(f, t_bar);
    (0..m as i64)
        .find(|&c| lhs == space.gram().scale(f, f.pow(zeta, c)))
        .ok_or(GradingError::NotSimilitude)
}

impl GradedGroup {
    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn field(&self) -> &Arc<Field> {
        self.ambient.field()
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn zeta(&self) -> Fe {
        self.zeta
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn t_bar(&self) -> &Mat {
        &self.t_bar
    }

    /// Exponent `c` of the similitude factor `ζ^c` of `t̄`.
    pub fn multiplier(&self) -> i64 {
        self.multiplier
    }

    pub fn twist(&self) -> &Twist {
        &self.twist
    }

    pub fn twist_name(&self) -> &'static str {
        self.twist.name()
    }

    pub fn lie_algebra(&self) -> &LieAlgebra {
        &self.lie
    }

    pub fn basis(&self) -> &[Mat] {
        &self.basis
    }

    /// Fixed-field basis of `𝔤_j`, `j` taken modulo `m`.
    pub fn piece(&self, j: i64) -> &[Mat] {
        &self.pieces[j.rem_euclid(self.m as i64) as usize]
    }

    pub fn piece_dims(&self) -> Vec<usize> {
        self.pieces.iter().map(Vec::len).collect()
    }

    fn twist_lie(&self, x: &Mat) -> Mat {
        let f = &**self.field();
        match (&self.twist, &self.twist_inv) {
            (Twist::Inner(s), Some(si)) => s.mul(f, x).mul(f, si),
            (Twist::Transpose(j), Some(ji)) => j.mul(f, &x.transpose()).mul(f, ji).neg(f),
            _ => x.clone(),
        }
    }

    /// `θ(X) = t̄ ϑ(X) t̄⁻¹`.
    pub fn theta(&self, x: &Mat) -> Mat {
        let f = &**self.field();
        self.t_bar
            .mul(f, &self.twist_lie(x))
            .mul(f, &self.t_bar_inv)
    }

    /// The induced automorphism on group elements; `None` if `g` is singular.
    pub fn theta_group(&self, g: &Mat) -> Option<Mat> {
        let f = &**self.field();
        let twisted = match (&self.twist, &self.twist_inv) {
            (Twist::Inner(s), Some(si)) => s.mul(f, g).mul(f, si),
            (Twist::Transpose(j), Some(ji)) => j.mul(f, &g.inverse(f)?.transpose()).mul(f, ji),
            _ => g.clone(),
        };
        Some(self.t_bar.mul(f, &twisted).mul(f, &self.t_bar_inv))
    }

    /// `ζ^{-j}`.
    pub fn eigenvalue(&self, j: i64) -> Fe {
        self.field().pow(self.zeta, -j)
    }

    fn eigenspace(&self, j: u32) -> Vec<Mat> {
        let f = &**self.field();
        let mu = self.eigenvalue(j as i64);
        coefficient_kernel(f, self.basis.len(), |c| {
            let x = combine(f, c, &self.basis);
            self.theta(&x).sub(f, &x.scale(f, mu)).into_data()
        })
        .into_iter()
        .map(|c| combine(f, &c, &self.basis))
        .collect()
    }

    pub fn in_piece(&self, x: &Mat, j: i64) -> bool {
        let f = &**self.field();
        self.ambient.lie_member(x) && self.theta(x) == x.scale(f, self.eigenvalue(j))
    }

    /// The degree of a nonzero homogeneous element.
    pub fn degree_of(&self, x: &Mat) -> Option<u32> {
        if x.is_zero() {
            return None;
        }
        (0..self.m).find(|&j| self.in_piece(x, j as i64))
    }

    pub fn graded_vector(&self, x: &Mat, j: i64) -> Option<GradedVector> {
        self.in_piece(x, j).then(|| GradedVector {
            degree: j.rem_euclid(self.m as i64) as u32,
            value: x.clone(),
        })
    }

    /// `θ`-fixed elements of the ambient group.
    pub fn in_degree0_group(&self, g: &Mat) -> bool {
        self.ambient.group_member(g) && self.theta_group(g).as_ref() == Some(g)
    }

    /// `dim {Y ∈ 𝔤₀ : [Y, λ] = 0}` over the fixed field, counted modulo the
    /// central part of `𝔤₀`, which centralizes everything.
    pub fn degree0_centralizer_dim(&self, lam: &Mat) -> usize {
        let f = &**self.field();
        let g0 = self.piece(0);
        let full = coefficient_kernel(f, g0.len(), |c| {
            combine(f, c, g0).bracket(f, lam).into_data()
        })
        .len();
        full - self.central_degree0_dim()
    }

    /// Dimension of the scalar matrices lying in `𝔤₀`.
    pub fn central_degree0_dim(&self) -> usize {
        let f = &**self.field();
        let n = self.ambient.dim();
        let scalars: Vec<Mat> = match f.scalar_degree() {
            1 => vec![Mat::identity(n)],
            _ => vec![Mat::identity(n), Mat::scalar(n, f.generator())],
        };
        coefficient_kernel(f, scalars.len(), |c| {
            let x = combine(f, c, &scalars);
            let mut out = self.theta(&x).sub(f, &x).into_data();
            if let Ambient::Formed(s) = &self.ambient {
                out.extend(x.add(f, &s.adjoint(&x)).into_data());
            }
            out
        })
        .len()
    }

    /// Degree `-1`, regular semisimple, and with degree-zero centralizer
    /// reduced to the center.
    pub fn stable_candidate(&self, lam: &Mat) -> bool {
        self.in_piece(lam, -1)
            && self.lie.is_regular_semisimple(lam)
            && self.degree0_centralizer_dim(lam) == 0
    }
}
