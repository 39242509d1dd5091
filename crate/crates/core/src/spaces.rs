//! ε-Hermitian spaces over a residue field with involution.
//!
//! A vector pairing is `⟨x, y⟩ = conj(x)ᵀ G y`, so the Gram matrix of an
//! ε-Hermitian space satisfies `conj(G)ᵀ = εG`. Witt bases are ordered as
//! `e_1..e_r, anisotropic part, e_{-1}..e_{-r}`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{scalar_kernel, Mat};
use crate::numeric::{Fe, Field, Involution, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("Witt index {witt_index} too large for dimension {dim}")]
    WittIndexTooLarge { dim: usize, witt_index: usize },
    #[error("expected {expected} anisotropic entries, got {got}")]
    AnisotropicCount { expected: usize, got: usize },
    #[error("anisotropic diagonal entry {index} is zero")]
    ZeroAnisotropic { index: usize },
    #[error("no anisotropic diagonal entry {index} satisfies d = ε·conj(d) for this sign and involution")]
    NoDiagonalForm { index: usize },
    #[error("Gram matrix is not ε-Hermitian")]
    NotEpsHermitian,
    #[error("Gram matrix is degenerate")]
    Degenerate,
    #[error("{kind} needs the {expected:?} residue involution")]
    WrongInvolution {
        kind: DivisionKind,
        expected: Involution,
    },
    #[error("matrix is not in the Lie algebra of the form")]
    NotInLieAlgebra,
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    Shape {
        expected: (usize, usize),
        got: (usize, usize),
    },
}

/// The division algebra `D` over the base field, seen through its residue data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivisionKind {
    Split,
    Unramified,
    Ramified,
}

impl fmt::Display for DivisionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DivisionKind::Split => "split",
            DivisionKind::Unramified => "unramified",
            DivisionKind::Ramified => "ramified",
        })
    }
}

impl DivisionKind {
    /// Valuation of a uniformizer of `D`.
    pub fn nu(self) -> Rational {
        match self {
            DivisionKind::Ramified => Rational::new(1, 2),
            _ => Rational::from_integer(1),
        }
    }

    pub fn residue_involution(self) -> Involution {
        match self {
            DivisionKind::Unramified => Involution::Frobenius,
            _ => Involution::Identity,
        }
    }

    /// Degree of the residue field of `D` over that of the base.
    pub fn residue_degree(self) -> usize {
        match self {
            DivisionKind::Unramified => 2,
            _ => 1,
        }
    }

    /// Reduced trace `D -> k` on residues.
    pub fn trace(self, field: &Field, x: Fe) -> Fe {
        match self {
            DivisionKind::Split => x,
            DivisionKind::Unramified => field.add(x, field.conj(x)),
            DivisionKind::Ramified => field.add(x, x),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(s: i64) -> Option<Sign> {
        match s {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, o: Sign) -> Sign {
        if self == o {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn to_fe(self, field: &Field) -> Fe {
        field.from_i64(self.value())
    }
}

/// Sizes of the Witt-basis blocks `I⁺`, `I⁰`, `I⁻`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WittLabels {
    pub plus: usize,
    pub aniso: usize,
    pub minus: usize,
}

impl WittLabels {
    pub fn dim(&self) -> usize {
        self.plus + self.aniso + self.minus
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsHermSpace {
    field: Arc<Field>,
    kind: DivisionKind,
    eps: Sign,
    gram: Mat,
    gram_inv: Mat,
    labels: WittLabels,
}

impl EpsHermSpace {
    /// Validates an explicit Gram matrix.
    pub fn from_gram(
        field: &Arc<Field>,
        kind: DivisionKind,
        eps: Sign,
        gram: Mat,
        labels: WittLabels,
    ) -> Result<Self, SpaceError> {
        if field.involution() != kind.residue_involution() {
            return Err(SpaceError::WrongInvolution {
                kind,
                expected: kind.residue_involution(),
            });
        }
        let n = labels.dim();
        if (gram.rows(), gram.cols()) != (n, n) {
            return Err(SpaceError::Shape {
                expected: (n, n),
                got: (gram.rows(), gram.cols()),
            });
        }
        if gram.conj_transpose(field) != gram.scale(field, eps.to_fe(field)) {
            return Err(SpaceError::NotEpsHermitian);
        }
        let gram_inv = gram.inverse(field).ok_or(SpaceError::Degenerate)?;
        Ok(EpsHermSpace {
            field: Arc::clone(field),
            kind,
            eps,
            gram,
            gram_inv,
            labels,
        })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn kind(&self) -> DivisionKind {
        self.kind
    }

    pub fn eps(&self) -> Sign {
        self.eps
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn gram_inv(&self) -> &Mat {
        &self.gram_inv
    }

    pub fn labels(&self) -> WittLabels {
        self.labels
    }

    pub fn witt_index(&self) -> usize {
        self.labels.plus
    }

    /// `⟨x, y⟩ = conj(x)ᵀ G y`.
    pub fn pairing(&self, x: &[Fe], y: &[Fe]) -> Fe {
        let f = &*self.field;
        let gy = self.gram.mul_vec(f, y);
        x.iter()
            .zip(&gy)
            .fold(Fe::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(f.conj(a), b)))
    }

    /// The adjoint `X⋆ = G⁻¹ conj(X)ᵀ G` of an endomorphism.
    pub fn adjoint(&self, x: &Mat) -> Mat {
        let f = &*self.field;
        self.gram_inv
            .mul(f, &x.conj_transpose(f))
            .mul(f, &self.gram)
    }

    pub fn is_isometry(&self, g: &Mat) -> bool {
        g.rows() == self.dim()
            && g.is_square()
            && g.mul(&self.field, &self.adjoint(g)) == Mat::identity(self.dim())
    }

    pub fn lie_member(&self, x: &Mat) -> bool {
        x.rows() == self.dim() && x.is_square() && x.add(&self.field, &self.adjoint(x)).is_zero()
    }

    /// A basis over the fixed field of the Lie algebra `{X : X + X⋆ = 0}`.
    pub fn lie_basis(&self) -> Vec<Mat> {
        let n = self.dim();
        scalar_kernel(&self.field, n * n, |v| {
            let x = Mat::from_vec(n, n, v.to_vec());
            x.add(&self.field, &self.adjoint(&x)).into_data()
        })
        .into_iter()
        .map(|v| Mat::from_vec(n, n, v))
        .collect()
    }

    /// `½ tr_{D/k} tr(X₂⋆ X₁)` without membership checks.
    pub fn trace_pairing(&self, x1: &Mat, x2: &Mat) -> Fe {
        let f = &*self.field;
        let t = self.adjoint(x2).mul(f, x1).trace(f);
        f.mul(f.half(), self.kind.trace(f, t))
    }

    /// The invariant trace form on the Lie algebra.
    pub fn trace_form(&self, x1: &Mat, x2: &Mat) -> Result<Fe, SpaceError> {
        if !self.lie_member(x1) || !self.lie_member(x2) {
            return Err(SpaceError::NotInLieAlgebra);
        }
        Ok(self.trace_pairing(x1, x2))
    }

    /// Every isometry, by exhaustive search over all matrices.
    pub fn enumerate_isometries(&self) -> Vec<Mat> {
        let n = self.dim();
        let q = self.field.order() as u64;
        let total = q.pow((n * n) as u32);
        (0..total)
            .filter_map(|mut idx| {
                let data = (0..n * n)
                    .map(|_| {
                        let c = Fe::from_code((idx % q) as u16);
                        idx /= q;
                        c
                    })
                    .collect();
                let g = Mat::from_vec(n, n, data);
                self.is_isometry(&g).then_some(g)
            })
            .collect()
    }
}

/// The standard Witt-basis form: hyperbolic pairs `⟨e_i, e_{-i}⟩ = 1` and a
/// diagonal anisotropic block with the given entries.
pub fn witt_basis(
    field: &Arc<Field>,
    kind: DivisionKind,
    dim: usize,
    eps: Sign,
    witt_index: usize,
    anisotropic: &[Fe],
) -> Result<EpsHermSpace, SpaceError> {
    if 2 * witt_index > dim {
        return Err(SpaceError::WittIndexTooLarge { dim, witt_index });
    }
    let aniso = dim - 2 * witt_index;
    if anisotropic.len() != aniso {
        return Err(SpaceError::AnisotropicCount {
            expected: aniso,
            got: anisotropic.len(),
        });
    }
    let f = &**field;
    let e = eps.to_fe(f);
    for (index, &d) in anisotropic.iter().enumerate() {
        if d.is_zero() {
            return Err(SpaceError::ZeroAnisotropic { index });
        }
        if d != f.mul(e, f.conj(d)) {
            return Err(SpaceError::NoDiagonalForm { index });
        }
    }
    let r = witt_index;
    let mut gram = Mat::zeros(dim, dim);
    for i in 0..r {
        gram[(i, dim - r + i)] = Fe::ONE;
        gram[(dim - r + i, i)] = e;
    }
    for (j, &d) in anisotropic.iter().enumerate() {
        gram[(r + j, r + j)] = d;
    }
    EpsHermSpace::from_gram(
        field,
        kind,
        eps,
        gram,
        WittLabels {
            plus: r,
            aniso,
            minus: r,
        },
    )
}

/// The adjoint `w⋆ : V′ → V` of `w : V → V′`, characterised by
/// `⟨w v, v′⟩_{V′} = ⟨v, w⋆ v′⟩_V`.
pub fn star(v: &EpsHermSpace, vp: &EpsHermSpace, w: &Mat) -> Mat {
    let f = &**v.field();
    v.gram_inv().mul(f, &w.conj_transpose(f)).mul(f, vp.gram())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::make_field;

    #[test]
    fn symplectic_plane_gram() {
        let f = make_field(3, 1, Involution::Identity).unwrap();
        let v = witt_basis(&f, DivisionKind::Split, 2, Sign::Minus, 1, &[]).unwrap();
        assert_eq!(v.gram(), &Mat::from_ints(&f, 2, 2, &[0, 1, -1, 0]));
    }

    #[test]
    fn rejects_alternating_anisotropic_part() {
        let f = make_field(3, 1, Involution::Identity).unwrap();
        let err = witt_basis(&f, DivisionKind::Split, 3, Sign::Minus, 1, &[Fe::ONE]);
        assert_eq!(err.unwrap_err(), SpaceError::NoDiagonalForm { index: 0 });
        let err = witt_basis(&f, DivisionKind::Split, 2, Sign::Minus, 2, &[]);
        assert!(matches!(err, Err(SpaceError::WittIndexTooLarge { .. })));
    }

    #[test]
    fn hermitian_diagonal_entries_must_be_fixed() {
        let f = make_field(3, 2, Involution::Frobenius).unwrap();
        let g = f.generator();
        let err = witt_basis(&f, DivisionKind::Unramified, 1, Sign::Plus, 0, &[g]);
        assert!(err.is_err());
        let ok = witt_basis(&f, DivisionKind::Unramified, 1, Sign::Plus, 0, &[Fe::ONE]);
        assert!(ok.is_ok());
        // A skew-Hermitian line needs conj(d) = -d.
        let skew = f.sub(g, f.conj(g));
        assert!(witt_basis(&f, DivisionKind::Unramified, 1, Sign::Minus, 0, &[skew]).is_ok());
    }

    #[test]
    fn star_of_star_is_negation() {
        let f = make_field(5, 1, Involution::Identity).unwrap();
        let v = witt_basis(&f, DivisionKind::Split, 2, Sign::Minus, 1, &[]).unwrap();
        let vp = witt_basis(&f, DivisionKind::Split, 3, Sign::Plus, 1, &[Fe::ONE]).unwrap();
        let w = Mat::from_ints(&f, 3, 2, &[1, 2, 3, 4, 0, 1]);
        let ws = star(&v, &vp, &w);
        assert_eq!(star(&vp, &v, &ws), w.neg(&f));
    }

    #[test]
    fn lie_dimensions() {
        let f3 = make_field(3, 1, Involution::Identity).unwrap();
        let sp2 = witt_basis(&f3, DivisionKind::Split, 2, Sign::Minus, 1, &[]).unwrap();
        assert_eq!(sp2.lie_basis().len(), 3);
        let f5 = make_field(5, 1, Involution::Identity).unwrap();
        let o3 = witt_basis(&f5, DivisionKind::Split, 3, Sign::Plus, 1, &[Fe::ONE]).unwrap();
        assert_eq!(o3.lie_basis().len(), 3);
        let f9 = make_field(3, 2, Involution::Frobenius).unwrap();
        let u2 = witt_basis(&f9, DivisionKind::Unramified, 2, Sign::Plus, 1, &[]).unwrap();
        assert_eq!(u2.lie_basis().len(), 4);
    }
}
