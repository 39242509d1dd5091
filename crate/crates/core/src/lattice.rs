//! Self-dual lattice functions through apartment coordinates.
//!
//! A point is a tuple `(a_i)` over the Witt basis with `a_{-i} = -a_i` and
//! anisotropic coordinates in `{0, ν/2}`. The lattice at level `r` is
//! `⊕ e_i 𝔭_D^{⌈(r - a_i)/ν⌉}`, and everything below (jumps, graded pieces,
//! residue groups, Hom bounds, splitting dimensions) is read off from the
//! coordinates.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::numeric::{rational_mod, Fe, Field, Involution, Rational};
use crate::spaces::{witt_basis, DivisionKind, EpsHermSpace, Sign, SpaceError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("{r} is not a jump of the lattice function")]
    NotAJump { r: String },
    #[error("jump sets have different periods")]
    PeriodMismatch,
    #[error("anisotropic coordinate {index} must be 0 or ν/2")]
    BadAnisotropic { index: usize },
    #[error("{0} anisotropic units supplied for {1} coordinates")]
    UnitCount(usize, usize),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

fn ceil_div(x: Rational, nu: Rational) -> i64 {
    (x / nu).ceil().to_integer()
}

fn floor_div(x: Rational, nu: Rational) -> i64 {
    (x / nu).floor().to_integer()
}

/// A point of the apartment of the isometry group of an ε-Hermitian space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ApartmentPoint {
    pub kind: DivisionKind,
    pub eps: Sign,
    /// Coordinates on `I⁺`.
    pub plus: Vec<Rational>,
    /// Coordinates on `I⁻`; `-plus` for a genuine point.
    pub minus: Vec<Rational>,
    /// Coordinates on `I⁰`, each `½ val⟨e_i, e_i⟩`.
    pub aniso: Vec<Rational>,
    /// Residue unit classes of the anisotropic diagonal entries.
    pub aniso_units: Vec<i64>,
}

impl ApartmentPoint {
    pub fn new(
        kind: DivisionKind,
        eps: Sign,
        plus: Vec<Rational>,
        aniso: Vec<Rational>,
        aniso_units: Vec<i64>,
    ) -> Result<Self, LatticeError> {
        if aniso_units.len() != aniso.len() {
            return Err(LatticeError::UnitCount(aniso_units.len(), aniso.len()));
        }
        let half = kind.nu() / Rational::from_integer(2);
        if let Some(index) = aniso
            .iter()
            .position(|a| *a != Rational::from_integer(0) && *a != half)
        {
            return Err(LatticeError::BadAnisotropic { index });
        }
        let minus = plus.iter().map(|a| -a).collect();
        Ok(ApartmentPoint {
            kind,
            eps,
            plus,
            minus,
            aniso,
            aniso_units,
        })
    }

    /// The point with every coordinate zero and unit anisotropic entries.
    pub fn hyperspecial(kind: DivisionKind, eps: Sign, witt_index: usize, aniso: usize) -> Self {
        let zero = Rational::from_integer(0);
        ApartmentPoint::new(
            kind,
            eps,
            vec![zero; witt_index],
            vec![zero; aniso],
            vec![1; aniso],
        )
        .expect("zero coordinates are valid")
    }

    pub fn nu(&self) -> Rational {
        self.kind.nu()
    }

    pub fn dim(&self) -> usize {
        self.plus.len() + self.aniso.len() + self.minus.len()
    }

    pub fn witt_index(&self) -> usize {
        self.plus.len()
    }

    /// All coordinates in basis order `I⁺, I⁰, I⁻`.
    pub fn coords(&self) -> Vec<Rational> {
        let mut out = self.plus.clone();
        out.extend_from_slice(&self.aniso);
        out.extend_from_slice(&self.minus);
        out
    }

    /// Index of the basis vector pairing nontrivially with basis vector `k`.
    fn partner(&self, k: usize) -> usize {
        let n = self.plus.len();
        let a = self.aniso.len();
        if k < n {
            k + n + a
        } else if k < n + a {
            k
        } else {
            k - n - a
        }
    }

    /// Valuation of `⟨e_k, e_partner(k)⟩`.
    fn pair_valuation(&self, k: usize) -> Rational {
        let n = self.plus.len();
        let a = self.aniso.len();
        if (n..n + a).contains(&k) {
            self.aniso[k - n] * Rational::from_integer(2)
        } else {
            Rational::from_integer(0)
        }
    }

    /// Exponent of `𝔭_D` on `e_k` in the lattice at level `r`.
    pub fn exponent(&self, k: usize, r: Rational) -> i64 {
        ceil_div(r - self.coords()[k], self.nu())
    }

    /// Weyl-orbit normal form: absolute values, sorted descending.
    pub fn normal_form(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self.plus.iter().map(|&a| a.max(-a)).collect();
        v.sort_by(|a, b| b.cmp(a));
        v
    }
}

/// A finite multiset of jump representatives in `[0, period)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JumpSet {
    pub period: Rational,
    pub entries: BTreeMap<Rational, usize>,
}

impl JumpSet {
    pub fn new(period: Rational) -> Self {
        JumpSet {
            period,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_pairs(period: Rational, pairs: &[(Rational, usize)]) -> Self {
        let mut j = JumpSet::new(period);
        for &(r, m) in pairs {
            j.insert(r, m);
        }
        j
    }

    pub fn insert(&mut self, r: Rational, mult: usize) {
        if mult > 0 {
            *self
                .entries
                .entry(rational_mod(r, self.period))
                .or_default() += mult;
        }
    }

    pub fn mult(&self, r: Rational) -> usize {
        self.entries
            .get(&rational_mod(r, self.period))
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.entries.values().sum()
    }

    pub fn contains(&self, r: Rational) -> bool {
        self.mult(r) > 0
    }

    /// `Jump = -Jump` with multiplicities.
    pub fn is_symmetric(&self) -> bool {
        self.entries.iter().all(|(&r, &m)| self.mult(-r) == m)
    }

    /// The same jumps viewed with period 1.
    pub fn unfold(&self) -> JumpSet {
        let one = Rational::from_integer(1);
        let mut out = JumpSet::new(one);
        let copies = (one / self.period).to_integer();
        for (&r, &m) in &self.entries {
            for c in 0..copies {
                out.insert(r + self.period * Rational::from_integer(c), m);
            }
        }
        out
    }
}

/// The jump multiset of a point, reduced modulo `ν`.
pub fn jumps(pt: &ApartmentPoint) -> JumpSet {
    let mut j = JumpSet::new(pt.nu());
    for a in pt.coords() {
        j.insert(a, 1);
    }
    j
}

/// Compares the lattice function with its dual, computed from the pairing.
pub fn is_selfdual(pt: &ApartmentPoint) -> bool {
    let coords = pt.coords();
    let nu = pt.nu();
    let n = coords.len();
    let mut shifts = Vec::with_capacity(n);
    for k in 0..n {
        let v = pt.pair_valuation(k) / nu;
        if !v.is_integer() {
            return false;
        }
        shifts.push(v.to_integer());
    }
    // Both sides are step functions; sample every breakpoint and midpoint of
    // one period.
    let mut points: Vec<Rational> = coords
        .iter()
        .flat_map(|&a| [rational_mod(a, nu), rational_mod(-a, nu)])
        .collect();
    points.push(Rational::from_integer(0));
    points.sort();
    points.dedup();
    let mut samples = points.clone();
    for w in 0..points.len() {
        let next = if w + 1 < points.len() {
            points[w + 1]
        } else {
            points[0] + nu
        };
        samples.push((points[w] + next) / Rational::from_integer(2));
    }
    samples.iter().all(|&s| {
        (0..n).all(|k| {
            let own = ceil_div(s - coords[k], nu);
            let dual = -floor_div(-s - coords[pt.partner(k)], nu) - shifts[k];
            own == dual
        })
    })
}

/// `Jump(𝓛 ⊗ 𝓛′) = Jump(𝓛) + Jump(𝓛′)`, returned with period 1.
pub fn tensor_jumps(j: &JumpSet, jp: &JumpSet) -> Result<JumpSet, LatticeError> {
    if j.period != jp.period {
        return Err(LatticeError::PeriodMismatch);
    }
    let mut sum = JumpSet::new(j.period);
    for (&r, &m) in &j.entries {
        for (&rp, &mp) in &jp.entries {
            sum.insert(r + rp, m * mp);
        }
    }
    Ok(sum.unfold())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dichotomy {
    /// `Jump(𝓛) ⊆ (1/m)ℤ` and `Jump(𝓛′) ⊆ 1/(2m) + (1/m)ℤ`.
    CaseI,
    /// The same with the roles of the two sides exchanged.
    CaseII,
    Violation,
}

/// `2m·r` for every unfolded jump, or `None` if some value is not integral.
fn doubled_levels(j: &JumpSet, m: u32) -> Option<Vec<i64>> {
    let scale = Rational::from_integer(2 * m as i64);
    j.unfold()
        .entries
        .keys()
        .map(|&r| {
            let x = r * scale;
            x.is_integer().then(|| x.to_integer())
        })
        .collect()
}

fn all_parity(levels: &Option<Vec<i64>>, odd: bool) -> bool {
    levels
        .as_ref()
        .is_some_and(|ls| ls.iter().all(|l| (l.rem_euclid(2) == 1) == odd))
}

pub fn epipelagic_dichotomy(j: &JumpSet, jp: &JumpSet, m: u32) -> Dichotomy {
    let a = doubled_levels(j, m);
    let b = doubled_levels(jp, m);
    if all_parity(&a, false) && all_parity(&b, true) {
        Dichotomy::CaseI
    } else if all_parity(&a, true) && all_parity(&b, false) {
        Dichotomy::CaseII
    } else {
        Dichotomy::Violation
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PieceForm {
    /// `r ≡ 0` or `r ≡ ν/2`: a formed space.
    Formed(EpsHermSpace),
    /// Other levels pair with the piece at `partner ≡ -r`.
    Paired { partner: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPiece {
    pub r: Rational,
    pub dim: usize,
    pub form: PieceForm,
}

/// Sign of the residue form on the piece at `ν/2`.
fn twisted_sign(pt: &ApartmentPoint) -> Sign {
    match pt.kind {
        DivisionKind::Ramified => pt.eps.flip(),
        _ => pt.eps,
    }
}

/// The graded piece `𝓛_{r:r⁺}` with its induced form or pairing.
pub fn graded_piece(
    pt: &ApartmentPoint,
    r: Rational,
    field: &Arc<Field>,
) -> Result<GradedPiece, LatticeError> {
    let nu = pt.nu();
    let js = jumps(pt);
    let r = rational_mod(r, nu);
    let dim = js.mult(r);
    if dim == 0 {
        return Err(LatticeError::NotAJump {
            r: crate::numeric::format_rational(&r),
        });
    }
    let half = nu / Rational::from_integer(2);
    let zero = Rational::from_integer(0);
    if r != zero && r != half {
        return Ok(GradedPiece {
            r,
            dim,
            form: PieceForm::Paired {
                partner: rational_mod(-r, nu),
            },
        });
    }
    let sign = if r == zero { pt.eps } else { twisted_sign(pt) };
    let hyperbolic = pt
        .plus
        .iter()
        .filter(|&&a| rational_mod(a, nu) == r)
        .count();
    let units: Vec<Fe> = pt
        .aniso
        .iter()
        .zip(&pt.aniso_units)
        .filter(|(a, _)| **a == r)
        .map(|(_, &u)| field.from_i64(u))
        .collect();
    let space = witt_basis(field, pt.kind, dim, sign, hyperbolic, &units)?;
    Ok(GradedPiece {
        r,
        dim,
        form: PieceForm::Formed(space),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FactorKind {
    /// Isometry group of a formed residue space.
    Isometry {
        eps: Sign,
        involution: Involution,
    },
    General,
}

/// One factor of the reductive quotient at a point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupFactor {
    pub r: Rational,
    pub dim: usize,
    pub kind: FactorKind,
}

impl GroupFactor {
    pub fn name(&self) -> String {
        let prefix = match &self.kind {
            FactorKind::General => "GL",
            FactorKind::Isometry {
                involution: Involution::Frobenius,
                ..
            } => "U",
            FactorKind::Isometry {
                eps: Sign::Minus, ..
            } => "Sp",
            FactorKind::Isometry {
                eps: Sign::Plus, ..
            } => "O",
        };
        format!("{prefix}{}", self.dim)
    }
}

/// The factors of `U(𝓛_0) × U(𝓛_{ν/2}) × ∏_{0<r<ν/2} GL(𝓛_r)`, omitting
/// zero-dimensional ones.
pub fn residue_group_shape(pt: &ApartmentPoint) -> Vec<GroupFactor> {
    let nu = pt.nu();
    let half = nu / Rational::from_integer(2);
    let js = jumps(pt);
    let involution = pt.kind.residue_involution();
    let mut out = Vec::new();
    for (r, eps) in [
        (Rational::from_integer(0), pt.eps),
        (half, twisted_sign(pt)),
    ] {
        let dim = js.mult(r);
        if dim > 0 {
            out.push(GroupFactor {
                r,
                dim,
                kind: FactorKind::Isometry { eps, involution },
            });
        }
    }
    for (&r, &dim) in js.entries.range(Rational::from_integer(0)..half) {
        if r > Rational::from_integer(0) {
            out.push(GroupFactor {
                r,
                dim,
                kind: FactorKind::General,
            });
        }
    }
    out
}

/// Entry `(j, i)` is the least valuation `⌈(r + a_i - a′_j)/ν⌉·ν` allowed for
/// the `(j, i)` entry of an element of `Hom(𝓛, 𝓛′)_r`.
pub fn hom_entry_bounds(
    pt: &ApartmentPoint,
    ptp: &ApartmentPoint,
    r: Rational,
) -> Vec<Vec<Rational>> {
    let nu = pt.nu();
    let a = pt.coords();
    let ap = ptp.coords();
    ap.iter()
        .map(|&apj| {
            a.iter()
                .map(|&ai| Rational::from_integer(ceil_div(r + ai - apj, nu)) * nu)
                .collect()
        })
        .collect()
}

/// Min-plus product `(A ⊙ B)_{ki} = min_j A_{kj} + B_{ji}`.
pub fn min_plus(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|i| {
                    row.iter()
                        .zip(b)
                        .map(|(&x, brow)| x + brow[i])
                        .min()
                        .expect("inner dimension is positive")
                })
                .collect()
        })
        .collect()
}

/// Residue-field dimension of `Hom(𝓛, 𝓛′)_{r:r⁺}` counted entry by entry.
pub fn hom_piece_dim(pt: &ApartmentPoint, ptp: &ApartmentPoint, r: Rational) -> usize {
    let nu = pt.nu();
    let a = pt.coords();
    let ap = ptp.coords();
    let hits = ap
        .iter()
        .flat_map(|&apj| a.iter().map(move |&ai| (r + ai - apj) / nu))
        .filter(|x| x.is_integer())
        .count();
    hits * pt.kind.residue_degree()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingDims {
    pub dim_w: usize,
    pub dim_x: usize,
    pub dim_y: usize,
    /// `dim_k X^[μ]` for each class `μ ∈ [0, 1)`.
    pub per_class: BTreeMap<Rational, usize>,
    /// `dim_k W`.
    pub total: usize,
}

/// Dimensions in `0 → 𝔰𝔣Y → 𝔰𝔣W → 𝔰𝔣X → 0` and of the classes `X^[μ]`.
pub fn splitting_dims(
    pt: &ApartmentPoint,
    ptp: &ApartmentPoint,
    m: u32,
) -> Result<SplittingDims, LatticeError> {
    let deg = pt.kind.residue_degree();
    let tj = tensor_jumps(&jumps(pt), &jumps(ptp))?;
    let depth = Rational::new(1, 2 * m as i64);
    let dim_x = tj.mult(-depth) * deg;
    let dim_y = tj.mult(depth) * deg;

    let classes = |p: &ApartmentPoint| {
        let mut c = JumpSet::new(Rational::from_integer(1));
        for a in p.coords() {
            c.insert(a, 1);
            if p.kind == DivisionKind::Ramified {
                c.insert(a + Rational::new(1, 2), 1);
            }
        }
        c
    };
    let (cv, cvp) = (classes(pt), classes(ptp));
    let mut sums = JumpSet::new(Rational::from_integer(1));
    for (&t, &d) in &cv.entries {
        for (&tp, &dp) in &cvp.entries {
            sums.insert(t + tp, d * dp);
        }
    }
    let per_class = sums
        .entries
        .into_iter()
        .map(|(mu, d)| {
            let dim = match pt.kind {
                DivisionKind::Split => d,
                DivisionKind::Unramified => 2 * d,
                DivisionKind::Ramified => d / 2,
            };
            (mu, dim)
        })
        .collect::<BTreeMap<_, _>>();
    let total = pt.dim() * ptp.dim() * if pt.kind == DivisionKind::Split { 1 } else { 2 };
    Ok(SplittingDims {
        dim_w: dim_x + dim_y,
        dim_x,
        dim_y,
        per_class,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::make_field;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn hyperspecial_jumps() {
        let pt = ApartmentPoint::hyperspecial(DivisionKind::Split, Sign::Minus, 2, 0);
        assert_eq!(jumps(&pt), JumpSet::from_pairs(q(1, 1), &[(q(0, 1), 4)]));
        assert!(is_selfdual(&pt));
    }

    #[test]
    fn quarter_point_jumps() {
        let pt = ApartmentPoint::new(
            DivisionKind::Split,
            Sign::Minus,
            vec![q(1, 4)],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(
            jumps(&pt),
            JumpSet::from_pairs(q(1, 1), &[(q(1, 4), 1), (q(3, 4), 1)])
        );
        let ram = ApartmentPoint::new(
            DivisionKind::Ramified,
            Sign::Plus,
            vec![q(1, 4)],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(jumps(&ram), JumpSet::from_pairs(q(1, 2), &[(q(1, 4), 2)]));
    }

    #[test]
    fn broken_symmetry_is_not_selfdual() {
        let mut pt = ApartmentPoint::new(
            DivisionKind::Split,
            Sign::Minus,
            vec![q(1, 4)],
            vec![],
            vec![],
        )
        .unwrap();
        pt.minus = vec![q(1, 4)];
        assert!(!is_selfdual(&pt));
    }

    #[test]
    fn dichotomy_cases() {
        let a = JumpSet::from_pairs(q(1, 1), &[(q(0, 1), 1), (q(1, 2), 1)]);
        let b = JumpSet::from_pairs(q(1, 1), &[(q(1, 4), 1), (q(3, 4), 1)]);
        let z = JumpSet::from_pairs(q(1, 1), &[(q(0, 1), 1)]);
        assert_eq!(epipelagic_dichotomy(&a, &b, 2), Dichotomy::CaseI);
        assert_eq!(epipelagic_dichotomy(&b, &a, 2), Dichotomy::CaseII);
        assert_eq!(epipelagic_dichotomy(&z, &z, 2), Dichotomy::Violation);
        let t = tensor_jumps(&a, &b).unwrap();
        assert!(t.entries.keys().all(|&r| r == q(1, 4) || r == q(3, 4)));
    }

    #[test]
    fn residue_shapes() {
        let sp4 = ApartmentPoint::hyperspecial(DivisionKind::Split, Sign::Minus, 2, 0);
        let names: Vec<_> = residue_group_shape(&sp4).iter().map(|f| f.name()).collect();
        assert_eq!(names, ["Sp4"]);
        let sp2 = ApartmentPoint::new(
            DivisionKind::Split,
            Sign::Minus,
            vec![q(1, 4)],
            vec![],
            vec![],
        )
        .unwrap();
        let names: Vec<_> = residue_group_shape(&sp2).iter().map(|f| f.name()).collect();
        assert_eq!(names, ["GL1"]);
        let o2 = ApartmentPoint::hyperspecial(DivisionKind::Split, Sign::Plus, 1, 0);
        let names: Vec<_> = residue_group_shape(&o2).iter().map(|f| f.name()).collect();
        assert_eq!(names, ["O2"]);
    }

    #[test]
    fn twisted_piece_of_sp4() {
        let f = make_field(5, 1, Involution::Identity).unwrap();
        let pt = ApartmentPoint::new(
            DivisionKind::Split,
            Sign::Minus,
            vec![q(0, 1), q(1, 2)],
            vec![],
            vec![],
        )
        .unwrap();
        let piece = graded_piece(&pt, q(1, 2), &f).unwrap();
        assert_eq!(piece.dim, 2);
        match piece.form {
            PieceForm::Formed(space) => assert_eq!(space.eps(), Sign::Minus),
            PieceForm::Paired { .. } => panic!("expected a formed piece"),
        }
        assert!(graded_piece(&pt, q(1, 4), &f).is_err());
    }
}
