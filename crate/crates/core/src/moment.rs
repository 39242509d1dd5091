//! Moment maps of a dual pair over a residue field, the symplectic pairing
//! on `W`, the adjoint invariant `P`, and the first-order shadow of the
//! oscillator identity in dual numbers.
//!
//! Two models of `W` are supported. In the formed model `W = Hom(V, V′)`,
//! `M(w) = w⋆w`, `M′(w) = ww⋆`, `(g, g′)·w = g′wg⁻¹`, `X·w = -wX`,
//! `X′·w = X′w`, and `⟨w₁, w₂⟩ = tr_{D/k} tr(w₂⋆w₁)`. In the general linear
//! model `W = Mat_{n,n′} ⊕ Mat_{n,n′}` is stored as a stacked `2n × n′`
//! matrix `[x; y]` with `(x, y)⋆ = (y, -x)`, `M = xyᵀ`, `M′ = yᵀx`,
//! `(g, g′)·(x, y) = (gxg′⁻¹, g⁻ᵀyg′ᵀ)` and
//! `⟨w₁, w₂⟩ = tr(x₁ᵀy₂) - tr(y₁ᵀx₂)`.

use std::sync::Arc;

use thiserror::Error;

use crate::linalg::Mat;
use crate::numeric::{DualNumber, Fe, Field, Involution};
use crate::spaces::{star, DivisionKind, EpsHermSpace, Sign};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MomentError {
    #[error("the two spaces must have opposite signs")]
    SameSign,
    #[error("the two spaces live over different fields or division algebras")]
    Mismatch,
    #[error("g + 1 is not invertible")]
    CayleySingular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum LieType {
    Gl(usize),
    /// `Sp(N)` with `N` even.
    Sp(usize),
    O(usize),
    U(usize),
}

impl LieType {
    pub fn rank(self) -> usize {
        match self {
            LieType::Gl(n) | LieType::U(n) => n,
            LieType::Sp(n) | LieType::O(n) => n / 2,
        }
    }

    pub fn of_space(space: &EpsHermSpace) -> LieType {
        let n = space.dim();
        match (space.field().involution(), space.eps()) {
            (Involution::Frobenius, _) => LieType::U(n),
            (Involution::Identity, Sign::Minus) => LieType::Sp(n),
            (Involution::Identity, Sign::Plus) => LieType::O(n),
        }
    }

    pub fn name(self) -> String {
        match self {
            LieType::Gl(n) => format!("GL{n}"),
            LieType::Sp(n) => format!("Sp{n}"),
            LieType::O(n) => format!("O{n}"),
            LieType::U(n) => format!("U{n}"),
        }
    }
}

/// A Lie algebra with a basis over the field, used for adjoint computations.
/// Unitary algebras are replaced by `gl_n` over the larger field, where
/// their adjoint characteristic polynomial lives.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    field: Arc<Field>,
    lie_type: LieType,
    n: usize,
    basis: Vec<Mat>,
    /// Rows of the flattened basis on which it is invertible, and that inverse.
    pivot_rows: Vec<usize>,
    pivot_inv: Mat,
}

impl LieAlgebra {
    fn from_basis(field: &Arc<Field>, lie_type: LieType, n: usize, basis: Vec<Mat>) -> Self {
        let f = &**field;
        let d = basis.len();
        let flat = Mat::from_fn(n * n, d, |i, j| basis[j].data()[i]);
        let (_, pivot_rows) = flat.transpose().rref(f);
        assert_eq!(pivot_rows.len(), d, "Lie algebra basis is dependent");
        let pivot_inv = flat
            .submatrix(&pivot_rows, &(0..d).collect::<Vec<_>>())
            .inverse(f)
            .expect("pivot block is invertible");
        LieAlgebra {
            field: Arc::clone(field),
            lie_type,
            n,
            basis,
            pivot_rows,
            pivot_inv,
        }
    }

    pub fn gl(field: &Arc<Field>, n: usize) -> Self {
        let basis = (0..n * n)
            .map(|k| {
                let mut e = Mat::zeros(n, n);
                e[(k / n, k % n)] = Fe::ONE;
                e
            })
            .collect();
        Self::from_basis(field, LieType::Gl(n), n, basis)
    }

    pub fn of_space(space: &EpsHermSpace) -> Self {
        let lie_type = LieType::of_space(space);
        if let LieType::U(n) = lie_type {
            let mut g = Self::gl(space.field(), n);
            g.lie_type = lie_type;
            return g;
        }
        Self::from_basis(space.field(), lie_type, space.dim(), space.lie_basis())
    }

    pub fn lie_type(&self) -> LieType {
        self.lie_type
    }

    pub fn rank(&self) -> usize {
        self.lie_type.rank()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Mat] {
        &self.basis
    }

    /// Coordinates of an element of the algebra in the basis.
    pub fn coords(&self, x: &Mat) -> Vec<Fe> {
        let picked: Vec<Fe> = self.pivot_rows.iter().map(|&r| x.data()[r]).collect();
        self.pivot_inv.mul_vec(&self.field, &picked)
    }

    /// Matrix of `ad X` in the basis.
    pub fn ad_matrix(&self, x: &Mat) -> Mat {
        let f = &*self.field;
        let d = self.dim();
        let cols: Vec<Vec<Fe>> = self
            .basis
            .iter()
            .map(|b| self.coords(&x.bracket(f, b)))
            .collect();
        Mat::from_fn(d, d, |i, j| cols[j][i])
    }

    /// Coefficient of `z^rank` in `det(z + ad X)`.
    pub fn invariant_p(&self, x: &Mat) -> Fe {
        let f = &*self.field;
        let cp = self.ad_matrix(x).neg(f).charpoly(f);
        cp[self.rank()]
    }

    pub fn is_regular_semisimple(&self, x: &Mat) -> bool {
        !self.invariant_p(x).is_zero()
    }

    /// Independent test: the kernel of `ad X` has dimension `rank` and
    /// coincides with the generalized kernel.
    pub fn centralizer_oracle(&self, x: &Mat) -> bool {
        let f = &*self.field;
        let ad = self.ad_matrix(x);
        let d = self.dim();
        let r1 = ad.rank(f);
        let r2 = ad.mul(f, &ad).rank(f);
        d - r1 == self.rank() && r1 == r2
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug)]
pub enum MomentSetting {
    Formed {
        v: EpsHermSpace,
        vp: EpsHermSpace,
    },
    Gl {
        field: Arc<Field>,
        n: usize,
        np: usize,
    },
}

impl MomentSetting {
    pub fn formed(v: EpsHermSpace, vp: EpsHermSpace) -> Result<Self, MomentError> {
        if v.eps() == vp.eps() {
            return Err(MomentError::SameSign);
        }
        if v.field() != vp.field() || v.kind() != vp.kind() {
            return Err(MomentError::Mismatch);
        }
        Ok(MomentSetting::Formed { v, vp })
    }

    pub fn gl(field: &Arc<Field>, n: usize, np: usize) -> Self {
        MomentSetting::Gl {
            field: Arc::clone(field),
            n,
            np,
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        match self {
            MomentSetting::Formed { v, .. } => v.field(),
            MomentSetting::Gl { field, .. } => field,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        match self {
            MomentSetting::Formed { v, vp } => (v.dim(), vp.dim()),
            MomentSetting::Gl { n, np, .. } => (*n, *np),
        }
    }

    /// Shape of the matrix storing an element of `W`.
    pub fn w_shape(&self) -> (usize, usize) {
        match self {
            MomentSetting::Formed { v, vp } => (vp.dim(), v.dim()),
            MomentSetting::Gl { n, np, .. } => (2 * n, *np),
        }
    }

    pub fn kind(&self) -> DivisionKind {
        match self {
            MomentSetting::Formed { v, .. } => v.kind(),
            MomentSetting::Gl { .. } => DivisionKind::Split,
        }
    }

    fn split_gl(&self, w: &Mat) -> (Mat, Mat) {
        let (n, np) = self.dims();
        let top: Vec<usize> = (0..n).collect();
        let bottom: Vec<usize> = (n..2 * n).collect();
        let cols: Vec<usize> = (0..np).collect();
        (w.submatrix(&top, &cols), w.submatrix(&bottom, &cols))
    }

    fn stack(x: &Mat, y: &Mat) -> Mat {
        let mut data = x.data().to_vec();
        data.extend_from_slice(y.data());
        Mat::from_vec(x.rows() + y.rows(), x.cols(), data)
    }

    /// Builds a general linear element from its two blocks.
    pub fn gl_elem(x: &Mat, y: &Mat) -> Mat {
        Self::stack(x, y)
    }

    pub fn star(&self, w: &Mat) -> Mat {
        match self {
            MomentSetting::Formed { v, vp } => star(v, vp, w),
            MomentSetting::Gl { field, .. } => {
                let (x, y) = self.split_gl(w);
                Self::stack(&y, &x.neg(field))
            }
        }
    }

    pub fn moment(&self, w: &Mat) -> Mat {
        let f = &**self.field();
        match self {
            MomentSetting::Formed { .. } => self.star(w).mul(f, w),
            MomentSetting::Gl { .. } => {
                let (x, y) = self.split_gl(w);
                x.mul(f, &y.transpose())
            }
        }
    }

    pub fn moment_p(&self, w: &Mat) -> Mat {
        let f = &**self.field();
        match self {
            MomentSetting::Formed { .. } => w.mul(f, &self.star(w)),
            MomentSetting::Gl { .. } => {
                let (x, y) = self.split_gl(w);
                y.transpose().mul(f, &x)
            }
        }
    }

    pub fn pairing(&self, w1: &Mat, w2: &Mat) -> Fe {
        let f = &**self.field();
        match self {
            MomentSetting::Formed { v, .. } => {
                let t = self.star(w2).mul(f, w1).trace(f);
                v.kind().trace(f, t)
            }
            MomentSetting::Gl { .. } => {
                let (x1, y1) = self.split_gl(w1);
                let (x2, y2) = self.split_gl(w2);
                f.sub(
                    x1.transpose().mul(f, &y2).trace(f),
                    y1.transpose().mul(f, &x2).trace(f),
                )
            }
        }
    }

    /// Infinitesimal action of the first factor.
    pub fn act_lie(&self, x: &Mat, w: &Mat) -> Mat {
        let f = &**self.field();
        match self {
            MomentSetting::Formed { .. } => w.mul(f, x).neg(f),
            MomentSetting::Gl { .. } => {
                let (a, b) = self.split_gl(w);
                Self::stack(&x.mul(f, &a), &x.transpose().mul(f, &b).neg(f))
            }
        }
    }

    /// Infinitesimal action of the second factor.
    pub fn act_lie_p(&self, xp: &Mat, w: &Mat) -> Mat {
        let f = &**self.field();
        match self {
            MomentSetting::Formed { .. } => xp.mul(f, w),
            MomentSetting::Gl { .. } => {
                let (a, b) = self.split_gl(w);
                Self::stack(&a.mul(f, xp).neg(f), &b.mul(f, &xp.transpose()))
            }
        }
    }

    /// `(g, g′)·w`.
    pub fn act(&self, g: &Mat, gp: &Mat, w: &Mat) -> Option<Mat> {
        let f = &**self.field();
        let gi = g.inverse(f)?;
        let gpi = gp.inverse(f)?;
        Some(match self {
            MomentSetting::Formed { .. } => gp.mul(f, w).mul(f, &gi),
            MomentSetting::Gl { .. } => {
                let (x, y) = self.split_gl(w);
                Self::stack(
                    &g.mul(f, &x).mul(f, &gpi),
                    &gi.transpose().mul(f, &y).mul(f, &gp.transpose()),
                )
            }
        })
    }

    /// Invariant form on the first Lie algebra.
    pub fn b_form(&self, x1: &Mat, x2: &Mat) -> Fe {
        let f = &**self.field();
        match self {
            MomentSetting::Formed { v, .. } => v.trace_pairing(x1, x2),
            MomentSetting::Gl { .. } => x1.mul(f, x2).trace(f),
        }
    }

    /// Invariant form on the second Lie algebra.
    pub fn b_form_p(&self, x1: &Mat, x2: &Mat) -> Fe {
        let f = &**self.field();
        match self {
            MomentSetting::Formed { vp, .. } => vp.trace_pairing(x1, x2),
            MomentSetting::Gl { .. } => x1.mul(f, x2).trace(f),
        }
    }

    /// Fixed-field basis of the first Lie algebra.
    pub fn lie_basis(&self) -> Vec<Mat> {
        match self {
            MomentSetting::Formed { v, .. } => v.lie_basis(),
            MomentSetting::Gl { field, n, .. } => LieAlgebra::gl(field, *n).basis().to_vec(),
        }
    }

    pub fn lie_basis_p(&self) -> Vec<Mat> {
        match self {
            MomentSetting::Formed { vp, .. } => vp.lie_basis(),
            MomentSetting::Gl { field, np, .. } => LieAlgebra::gl(field, *np).basis().to_vec(),
        }
    }

    pub fn lie_algebra(&self) -> LieAlgebra {
        match self {
            MomentSetting::Formed { v, .. } => LieAlgebra::of_space(v),
            MomentSetting::Gl { field, n, .. } => LieAlgebra::gl(field, *n),
        }
    }

    pub fn lie_algebra_p(&self) -> LieAlgebra {
        match self {
            MomentSetting::Formed { vp, .. } => LieAlgebra::of_space(vp),
            MomentSetting::Gl { field, np, .. } => LieAlgebra::gl(field, *np),
        }
    }

    pub fn is_group_member(&self, g: &Mat) -> bool {
        match self {
            MomentSetting::Formed { v, .. } => v.is_isometry(g),
            MomentSetting::Gl { field, .. } => !g.det(field).is_zero(),
        }
    }

    pub fn is_group_member_p(&self, g: &Mat) -> bool {
        match self {
            MomentSetting::Formed { vp, .. } => vp.is_isometry(g),
            MomentSetting::Gl { field, .. } => !g.det(field).is_zero(),
        }
    }

    /// The setting with the roles of the two spaces exchanged.
    pub fn swapped(&self) -> Option<MomentSetting> {
        match self {
            MomentSetting::Formed { v, vp } => Some(MomentSetting::Formed {
                v: vp.clone(),
                vp: v.clone(),
            }),
            MomentSetting::Gl { .. } => None,
        }
    }

    /// Every element of `W`, in canonical order.
    pub fn enumerate_w(&self) -> impl Iterator<Item = Mat> + '_ {
        let (r, c) = self.w_shape();
        enumerate_matrices(self.field(), r, c)
    }
}

/// Every `rows × cols` matrix, last entry varying fastest in code order.
pub fn enumerate_matrices(field: &Field, rows: usize, cols: usize) -> impl Iterator<Item = Mat> {
    let q = field.order() as u64;
    let len = rows * cols;
    let total = q.pow(len as u32);
    (0..total).map(move |idx| matrix_at(q, rows, cols, idx))
}

/// The matrix with index `idx` in [`enumerate_matrices`] order.
pub fn matrix_at(q: u64, rows: usize, cols: usize, mut idx: u64) -> Mat {
    let len = rows * cols;
    let mut data = vec![Fe::ZERO; len];
    for k in (0..len).rev() {
        data[k] = Fe::from_code((idx % q) as u16);
        idx /= q;
    }
    Mat::from_vec(rows, cols, data)
}

/// Outcome of one evaluation of the pairing identities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityValues {
    pub lhs: Fe,
    pub rhs: Fe,
    pub lhs_p: Fe,
    pub rhs_p: Fe,
}

impl IdentityValues {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs && self.lhs_p == self.rhs_p
    }
}

/// `⟨X·w, w⟩ = 2B(M(w), X)` and `⟨X′·w, w⟩ = 2B′(-M′(w), X′)`.
pub fn pairing_identities(setting: &MomentSetting, x: &Mat, xp: &Mat, w: &Mat) -> IdentityValues {
    let f = &**setting.field();
    let two = f.from_i64(2);
    let lhs = setting.pairing(&setting.act_lie(x, w), w);
    let rhs = f.mul(two, setting.b_form(&setting.moment(w), x));
    let lhs_p = setting.pairing(&setting.act_lie_p(xp, w), w);
    let rhs_p = f.mul(two, setting.b_form_p(&setting.moment_p(w).neg(f), xp));
    IdentityValues {
        lhs,
        rhs,
        lhs_p,
        rhs_p,
    }
}

/// `⟨w v, v′⟩_{V′} = ⟨v, w⋆ v′⟩_V` on all pairs of basis vectors.
pub fn star_identity_holds(v: &EpsHermSpace, vp: &EpsHermSpace, w: &Mat) -> bool {
    let f = &**v.field();
    let ws = star(v, vp, w);
    let unit = |n: usize, i: usize| {
        let mut e = vec![Fe::ZERO; n];
        e[i] = Fe::ONE;
        e
    };
    (0..v.dim()).all(|i| {
        (0..vp.dim()).all(|j| {
            let ei = unit(v.dim(), i);
            let ej = unit(vp.dim(), j);
            vp.pairing(&w.mul_vec(f, &ei), &ej) == v.pairing(&ei, &ws.mul_vec(f, &ej))
        })
    })
}

/// `c(g) = 2(g - 1)(g + 1)⁻¹`.
pub fn cayley(field: &Field, g: &Mat) -> Result<Mat, MomentError> {
    let n = g.rows();
    let one = Mat::identity(n);
    let den = g
        .add(field, &one)
        .inverse(field)
        .ok_or(MomentError::CayleySingular)?;
    Ok(g.sub(field, &one)
        .mul(field, &den)
        .scale(field, field.from_i64(2)))
}

/// A matrix over the dual numbers, `re + ε·eps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualMat {
    pub re: Mat,
    pub eps: Mat,
}

impl DualMat {
    pub fn real(re: Mat) -> Self {
        let eps = Mat::zeros(re.rows(), re.cols());
        DualMat { re, eps }
    }

    pub fn add(&self, f: &Field, o: &DualMat) -> DualMat {
        DualMat {
            re: self.re.add(f, &o.re),
            eps: self.eps.add(f, &o.eps),
        }
    }

    pub fn sub(&self, f: &Field, o: &DualMat) -> DualMat {
        DualMat {
            re: self.re.sub(f, &o.re),
            eps: self.eps.sub(f, &o.eps),
        }
    }

    pub fn mul(&self, f: &Field, o: &DualMat) -> DualMat {
        DualMat {
            re: self.re.mul(f, &o.re),
            eps: self.re.mul(f, &o.eps).add(f, &self.eps.mul(f, &o.re)),
        }
    }

    pub fn scale(&self, f: &Field, c: Fe) -> DualMat {
        DualMat {
            re: self.re.scale(f, c),
            eps: self.eps.scale(f, c),
        }
    }

    /// `(A + εB)⁻¹ = A⁻¹ - εA⁻¹BA⁻¹`.
    pub fn inverse(&self, f: &Field) -> Option<DualMat> {
        let ai = self.re.inverse(f)?;
        let eps = ai.mul(f, &self.eps).mul(f, &ai).neg(f);
        Some(DualMat { re: ai, eps })
    }

    /// Applies a real-bilinear (or sesquilinear) scalar function.
    pub fn pair_with(&self, f: &Field, o: &DualMat, form: impl Fn(&Mat, &Mat) -> Fe) -> DualNumber {
        DualNumber::new(
            form(&self.re, &o.re),
            f.add(form(&self.eps, &o.re), form(&self.re, &o.eps)),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OscillatorCheck {
    pub lhs: DualNumber,
    pub rhs: DualNumber,
}

impl OscillatorCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Compares `½⟨(g - 1)·w, w⟩` with `B(M(w), c(g))` for `g = 1 + εX` in
/// dual numbers, where `g` acts through the first factor.
pub fn first_order_osc_check(setting: &MomentSetting, x: &Mat, w: &Mat) -> OscillatorCheck {
    let f = &**setting.field();
    let n = x.rows();
    let one = DualMat::real(Mat::identity(n));
    let g = DualMat {
        re: Mat::identity(n),
        eps: x.clone(),
    };
    let gi = g.inverse(f).expect("1 + εX is invertible");
    let wd = DualMat::real(w.clone());
    let gw = match setting {
        MomentSetting::Formed { .. } => wd.mul(f, &gi),
        MomentSetting::Gl { .. } => {
            let (a, b) = setting.split_gl(w);
            let top = g.mul(f, &DualMat::real(a));
            let bottom = DualMat {
                re: gi.re.transpose(),
                eps: gi.eps.transpose(),
            }
            .mul(f, &DualMat::real(b));
            DualMat {
                re: MomentSetting::stack(&top.re, &bottom.re),
                eps: MomentSetting::stack(&top.eps, &bottom.eps),
            }
        }
    };
    let diff = gw.sub(f, &wd);
    let lhs = diff
        .pair_with(f, &wd, |a, b| setting.pairing(a, b))
        .scale(f, f.half());
    let plus = g.add(f, &one).inverse(f).expect("2 + εX is invertible");
    let c = g.sub(f, &one).mul(f, &plus).scale(f, f.from_i64(2));
    let m = DualMat::real(setting.moment(w));
    let rhs = m.pair_with(f, &c, |a, b| setting.b_form(a, b));
    OscillatorCheck { lhs, rhs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::make_field;
    use crate::spaces::witt_basis;

    fn sp2_o3(p: u32) -> MomentSetting {
        let f = make_field(p, 1, Involution::Identity).unwrap();
        let v = witt_basis(&f, DivisionKind::Split, 2, Sign::Minus, 1, &[]).unwrap();
        let vp = witt_basis(&f, DivisionKind::Split, 3, Sign::Plus, 1, &[Fe::ONE]).unwrap();
        MomentSetting::formed(v, vp).unwrap()
    }

    #[test]
    fn sp_o_witness_moments() {
        let s = sp2_o3(5);
        let f = s.field().clone();
        let (a, b) = (f.from_i64(2), f.from_i64(3));
        let mut w = Mat::zeros(3, 2);
        w[(0, 0)] = a;
        w[(2, 1)] = f.neg(b);
        let ab = f.mul(a, b);
        assert_eq!(s.moment(&w), Mat::diag(&[ab, f.neg(ab)]));
        assert_eq!(s.moment_p(&w), Mat::diag(&[ab, Fe::ZERO, f.neg(ab)]));
    }

    #[test]
    fn gl_witness_moments() {
        let f = make_field(5, 1, Involution::Identity).unwrap();
        let s = MomentSetting::gl(&f, 1, 2);
        let x = Mat::from_ints(&f, 1, 2, &[2, 0]);
        let y = Mat::from_ints(&f, 1, 2, &[4, 0]);
        let w = MomentSetting::gl_elem(&x, &y);
        assert_eq!(s.moment(&w), Mat::from_ints(&f, 1, 1, &[3]));
        assert_eq!(s.moment_p(&w), Mat::from_ints(&f, 2, 2, &[3, 0, 0, 0]));
        assert_eq!(s.star(&s.star(&w)), w.neg(&f));
    }

    #[test]
    fn invariant_p_closed_forms() {
        let f = make_field(5, 1, Involution::Identity).unwrap();
        let gl2 = LieAlgebra::gl(&f, 2);
        let x = Mat::from_ints(&f, 2, 2, &[1, 0, 0, 2]);
        assert_eq!(gl2.invariant_p(&x), f.from_i64(-1));
        assert!(!gl2.is_regular_semisimple(&Mat::identity(2)));
        let nil = Mat::from_ints(&f, 2, 2, &[0, 1, 0, 0]);
        assert_eq!(gl2.invariant_p(&nil), Fe::ZERO);
        assert!(!gl2.centralizer_oracle(&nil));

        let sp2 = LieAlgebra::of_space(
            &witt_basis(&f, DivisionKind::Split, 2, Sign::Minus, 1, &[]).unwrap(),
        );
        for a in 0..5 {
            let x = Mat::from_ints(&f, 2, 2, &[a, 0, 0, -a]);
            assert_eq!(sp2.invariant_p(&x), f.from_i64(-4 * a * a));
        }
    }

    #[test]
    fn cayley_basics() {
        let f = make_field(5, 1, Involution::Identity).unwrap();
        assert!(cayley(&f, &Mat::identity(2)).unwrap().is_zero());
        assert_eq!(
            cayley(&f, &Mat::identity(2).neg(&f)),
            Err(MomentError::CayleySingular)
        );
    }

    #[test]
    fn oscillator_identity_at_zero() {
        let s = sp2_o3(3);
        let w = Mat::from_ints(s.field(), 3, 2, &[1, 2, 0, 1, 2, 2]);
        let chk = first_order_osc_check(&s, &Mat::zeros(2, 2), &w);
        assert!(chk.holds());
        assert_eq!(chk.lhs, DualNumber::ZERO);
    }
}
