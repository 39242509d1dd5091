//! The finite correspondence check: fibers of the reduced moment maps,
//! stabilizers `S_λ`, the homomorphism `α: S′_λ′ → S_λ`, the exceptional
//! equal-rank ramified unitary case, and the decomposition of the
//! permutation representation on the fiber into characters.
//!
//! Everything is set up in the tilde model: `V` and `V′` carry gradings by
//! `θ` and `θ′`, `W` carries the induced automorphism `θ_W`, and the space
//! `𝔰𝔣X` is the `θ_W`-fixed subspace of `W`. A fixed `w̄` yields
//! `λ = M(w̄)` and `λ′ = -M′(w̄)` of degree `-1`, and `S_λ` is the group of
//! `θ`-fixed elements centralizing `λ`.
//!
//! Characters are never evaluated as complex numbers: a character of a group
//! with invariant factors `d_1 | … | d_r` is an exponent vector, and its
//! values live in `ℤ/N` with `N` the group exponent.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_integer::Integer;
use rayon::prelude::*;
use thiserror::Error;

use crate::grading::{build_grading, Ambient, GradedGroup, GradingError, Twist};
use crate::lattice::{epipelagic_dichotomy, jumps, ApartmentPoint, Dichotomy};
use crate::linalg::{coefficient_kernel, combine, Mat};
use crate::moment::{MomentError, MomentSetting};
use crate::numeric::{Fe, Field, Rational};
use crate::spaces::EpsHermSpace;

/// Default cap on the number of commutant elements enumerated.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorrespError {
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error("enumeration of {needed} elements exceeds the budget of {budget}")]
    Budget { needed: u64, budget: u64 },
    #[error("the element set is not closed under multiplication")]
    NotClosed,
    #[error("the group is not abelian")]
    NotAbelian,
    #[error("θ is not a similitude of the form")]
    NotSimilitude,
    #[error("similitude factors give ζ^{got} instead of ζ on the moment image")]
    Multiplier { got: i64 },
    #[error("the jump sets violate the epipelagic dichotomy")]
    Dichotomy,
    #[error("weight {0} is not integral")]
    FractionalWeight(String),
    #[error("w̄ is not fixed by θ_W")]
    NotFixed,
}

/// A finite abelian group of invertible matrices with an invariant-factor
/// decomposition.
#[derive(Clone, Debug)]
pub struct FiniteAbelianGroup {
    field: Arc<Field>,
    elements: Vec<Mat>,
    index: HashMap<Mat, usize>,
    identity: usize,
    /// Invariant factors `d_1 | d_2 | …`, all greater than one.
    invariants: Vec<u64>,
    /// Generator of the cyclic factor of order `invariants[i]`.
    generators: Vec<usize>,
    /// Exponent vector of every element in the generators.
    coords: Vec<Vec<u64>>,
}

impl FiniteAbelianGroup {
    /// Builds the group from an explicit element list, which must contain the
    /// identity and be closed and commutative.
    pub fn new(field: &Arc<Field>, elements: Vec<Mat>) -> Result<Self, CorrespError> {
        let f = &**field;
        let mut elements = elements;
        elements.sort();
        elements.dedup();
        let index: HashMap<Mat, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i))
            .collect();
        let n = elements.first().map_or(0, Mat::rows);
        let identity = *index
            .get(&Mat::identity(n))
            .ok_or(CorrespError::NotClosed)?;
        for a in &elements {
            for b in &elements {
                let ab = a.mul(f, b);
                if !index.contains_key(&ab) {
                    return Err(CorrespError::NotClosed);
                }
                if ab != b.mul(f, a) {
                    return Err(CorrespError::NotAbelian);
                }
            }
        }
        let mut group = FiniteAbelianGroup {
            field: Arc::clone(field),
            elements,
            index,
            identity,
            invariants: Vec::new(),
            generators: Vec::new(),
            coords: Vec::new(),
        };
        group.decompose();
        Ok(group)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Mat] {
        &self.elements
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn index_of(&self, g: &Mat) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn generators(&self) -> Vec<&Mat> {
        self.generators.iter().map(|&i| &self.elements[i]).collect()
    }

    pub fn coords(&self, i: usize) -> &[u64] {
        &self.coords[i]
    }

    /// The group exponent `N`.
    pub fn exponent(&self) -> u64 {
        self.invariants.iter().fold(1, |acc, &d| acc.lcm(&d))
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].mul(&self.field, &self.elements[b])]
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut k = 1;
        let mut x = a;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    fn powers(&self, a: usize) -> Vec<usize> {
        let mut out = vec![self.identity];
        let mut x = a;
        while x != self.identity {
            out.push(x);
            x = self.mul(x, a);
        }
        out
    }

    /// Finds generators with orders `e_1 ≥ e_2 ≥ …`, each dividing the
    /// previous, whose product map is bijective.
    fn decompose(&mut self) {
        let orders: Vec<u64> = (0..self.order()).map(|a| self.element_order(a)).collect();
        let mut candidates: Vec<usize> = (0..self.order()).filter(|&a| orders[a] > 1).collect();
        candidates.sort_by_key(|&a| (std::cmp::Reverse(orders[a]), a));
        let mut chosen = Vec::new();
        let members = vec![self.identity];
        let found = self.extend_basis(
            &candidates,
            &orders,
            self.exponent_bound(&orders),
            &members,
            &mut chosen,
        );
        assert!(found, "every finite abelian group has a basis");
        chosen.reverse();
        self.invariants = chosen.iter().map(|&g| orders[g]).collect();
        self.generators = chosen;
        let mut coords = vec![Vec::new(); self.order()];
        let r = self.generators.len();
        let mut exps = vec![0u64; r];
        loop {
            let mut x = self.identity;
            for (k, &g) in self.generators.iter().enumerate() {
                for _ in 0..exps[k] {
                    x = self.mul(x, g);
                }
            }
            coords[x] = exps.clone();
            let mut k = 0;
            while k < r {
                exps[k] += 1;
                if exps[k] < self.invariants[k] {
                    break;
                }
                exps[k] = 0;
                k += 1;
            }
            if k == r {
                break;
            }
        }
        self.coords = coords;
    }

    fn exponent_bound(&self, orders: &[u64]) -> u64 {
        orders.iter().fold(1, |acc, &d| acc.lcm(&d))
    }

    fn extend_basis(
        &self,
        candidates: &[usize],
        orders: &[u64],
        max_order: u64,
        members: &[usize],
        chosen: &mut Vec<usize>,
    ) -> bool {
        if members.len() == self.order() {
            return true;
        }
        let inside: BTreeSet<usize> = members.iter().copied().collect();
        for &g in candidates {
            if max_order % orders[g] != 0 || inside.contains(&g) {
                continue;
            }
            let pw = self.powers(g);
            if pw[1..].iter().any(|x| inside.contains(x)) {
                continue;
            }
            let next: Vec<usize> = members
                .iter()
                .flat_map(|&h| pw.iter().map(move |&p| (h, p)))
                .map(|(h, p)| self.mul(h, p))
                .collect();
            chosen.push(g);
            if self.extend_basis(candidates, orders, orders[g], &next, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    /// `χ(g)` in `ℤ/N`, `N` the group exponent.
    pub fn eval(&self, chi: &Character, g: usize) -> u64 {
        let n = self.exponent();
        self.coords[g]
            .iter()
            .zip(&chi.exponents)
            .zip(&self.invariants)
            .map(|((&c, &e), &d)| c * e % d * (n / d))
            .sum::<u64>()
            % n
    }

    /// `χ(g)` as a fraction in `[0, 1)`.
    pub fn eval_fraction(&self, chi: &Character, g: usize) -> Rational {
        Rational::new(self.eval(chi, g) as i64, self.exponent() as i64)
    }

    /// Every character, in lexicographic order of exponent vectors.
    pub fn characters(&self) -> Vec<Character> {
        let mut out = vec![Character {
            exponents: Vec::new(),
        }];
        for &d in &self.invariants {
            out = out
                .into_iter()
                .flat_map(|c| {
                    (0..d).map(move |e| {
                        let mut ex = c.exponents.clone();
                        ex.push(e);
                        Character { exponents: ex }
                    })
                })
                .collect();
        }
        out
    }

    pub fn trivial_character(&self) -> Character {
        Character {
            exponents: vec![0; self.invariants.len()],
        }
    }

    /// The character with the given values, if they define one.
    pub fn character_from_values(&self, value: impl Fn(usize) -> Rational) -> Option<Character> {
        let exponents: Option<Vec<u64>> = self
            .generators
            .iter()
            .zip(&self.invariants)
            .map(|(&g, &d)| {
                let x = value(g) * Rational::from_integer(d as i64);
                x.is_integer()
                    .then(|| x.to_integer().rem_euclid(d as i64) as u64)
            })
            .collect();
        let chi = Character {
            exponents: exponents?,
        };
        (0..self.order())
            .all(|g| {
                crate::numeric::rational_mod(value(g), Rational::from_integer(1))
                    == self.eval_fraction(&chi, g)
            })
            .then_some(chi)
    }

    /// `χ*`.
    pub fn dual(&self, chi: &Character) -> Character {
        Character {
            exponents: chi
                .exponents
                .iter()
                .zip(&self.invariants)
                .map(|(&e, &d)| (d - e) % d)
                .collect(),
        }
    }

    pub fn is_trivial_on(&self, chi: &Character, subset: &[usize]) -> bool {
        subset.iter().all(|&g| self.eval(chi, g) == 0)
    }
}

/// A character, stored as exponents against the invariant-factor generators
/// of its group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    pub exponents: Vec<u64>,
}

/// How `θ_W` acts on `W`.
#[derive(Clone, Debug)]
pub enum WTwist {
    /// `w ↦ θ′ w θ⁻¹` on `Hom(V, V′)`.
    Formed { theta_inv: Mat, theta_p: Mat },
    /// `(x, y) ↦ (t x t′⁻¹, ζ⁻¹ t⁻¹ y t′)`.
    GlInner {
        t: Mat,
        t_inv: Mat,
        tp: Mat,
        tp_inv: Mat,
        zeta_inv: Fe,
    },
    /// `(x, y) ↦ (J y J′⁻¹, J⁻ᵀ x J′ᵀ)`, a Galois involution exchanging the
    /// two factors.
    GlSwap {
        j: Mat,
        jp: Mat,
        jp_inv: Mat,
        j_inv_t: Mat,
    },
}

/// Which tilde picture a model realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Picture {
    /// `V` integral, `V′` half-integral.
    CaseA,
    /// `V` half-integral, `V′` integral.
    CaseB,
    /// General linear pair with an inner grading.
    GeneralLinear,
    /// Equal-rank ramified unitary pair modelled on two copies of `Mat_n`.
    RamifiedUnitary,
}

/// The graded data of a tilde model, shared by all instances over it.
#[derive(Clone, Debug)]
pub struct TildeModel {
    pub picture: Picture,
    setting: MomentSetting,
    grading: GradedGroup,
    grading_p: GradedGroup,
    w_twist: WTwist,
    x_basis: Vec<Mat>,
}

fn similitude_exponent(space: &EpsHermSpace, g: &Mat, zeta: Fe, m: u32) -> Option<i64> {
    let f = &**space.field();
    let lhs = g.conj_transpose(f).mul(f, space.gram()).mul(f, g);
    (0..m as i64).find(|&c| lhs == space.gram().scale(f, f.pow(zeta, c)))
}

/// `θ` as a linear map of the underlying space, when it is one.
fn linear_theta(g: &GradedGroup) -> Option<Mat> {
    let f = &**g.field();
    match g.twist() {
        Twist::Identity => Some(g.t_bar().clone()),
        Twist::Inner(s) => Some(g.t_bar().mul(f, s)),
        Twist::Transpose(_) => None,
    }
}

/// Weights `-m·a_k + shift` of the grading element at a point.
pub fn point_weights(
    pt: &ApartmentPoint,
    m: u32,
    shift: Rational,
) -> Result<Vec<i64>, CorrespError> {
    pt.coords()
        .into_iter()
        .map(|a| {
            let u = -a * Rational::from_integer(m as i64) + shift;
            if u.is_integer() {
                Ok(u.to_integer())
            } else {
                Err(CorrespError::FractionalWeight(
                    crate::numeric::format_rational(&u),
                ))
            }
        })
        .collect()
}

impl TildeModel {
    /// Formed spaces with gradings `t̄·ϑ`. The similitude factors must
    /// satisfy `μ_V / μ_V′ = ζ` so that fixed vectors map to degree `-1`.
    #[allow(clippy::too_many_arguments)]
    pub fn formed(
        v: EpsHermSpace,
        vp: EpsHermSpace,
        m: u32,
        weights: &[i64],
        weights_p: &[i64],
        twist: Twist,
        twist_p: Twist,
        picture: Picture,
    ) -> Result<Self, CorrespError> {
        let setting = MomentSetting::formed(v.clone(), vp.clone())?;
        let grading = build_grading(Ambient::Formed(v.clone()), m, weights, twist)?;
        let grading_p = build_grading(Ambient::Formed(vp.clone()), m, weights_p, twist_p)?;
        let f = Arc::clone(v.field());
        let zeta = grading.zeta();
        let theta = linear_theta(&grading).ok_or(CorrespError::NotSimilitude)?;
        let theta_p = linear_theta(&grading_p).ok_or(CorrespError::NotSimilitude)?;
        let mu = similitude_exponent(&v, &theta, zeta, m).ok_or(CorrespError::NotSimilitude)?;
        let mu_p =
            similitude_exponent(&vp, &theta_p, zeta, m).ok_or(CorrespError::NotSimilitude)?;
        let got = (mu - mu_p).rem_euclid(m as i64);
        if got != 1 % m as i64 {
            return Err(CorrespError::Multiplier { got });
        }
        let w_twist = WTwist::Formed {
            theta_inv: theta.inverse(&f).expect("similitudes are invertible"),
            theta_p,
        };
        Ok(Self::finish(picture, setting, grading, grading_p, w_twist))
    }

    /// Formed spaces graded by the apartment points `pt`, `ptp`; the picture
    /// is read off from the jump dichotomy.
    pub fn from_points(
        v: EpsHermSpace,
        vp: EpsHermSpace,
        pt: &ApartmentPoint,
        ptp: &ApartmentPoint,
        m: u32,
        twist: Twist,
        twist_p: Twist,
    ) -> Result<Self, CorrespError> {
        let zero = Rational::from_integer(0);
        let half = Rational::new(1, 2);
        let (picture, s, sp) = match epipelagic_dichotomy(&jumps(pt), &jumps(ptp), m) {
            Dichotomy::CaseI => (Picture::CaseA, zero, -half),
            Dichotomy::CaseII => (Picture::CaseB, half, zero),
            Dichotomy::Violation => return Err(CorrespError::Dichotomy),
        };
        let weights = point_weights(pt, m, s)?;
        let weights_p = point_weights(ptp, m, sp)?;
        Self::formed(v, vp, m, &weights, &weights_p, twist, twist_p, picture)
    }

    /// `GL_n × GL_n′` with inner gradings `diag(ζ^u)`, `diag(ζ^{u′})`.
    pub fn gl_inner(
        field: &Arc<Field>,
        m: u32,
        weights: &[i64],
        weights_p: &[i64],
    ) -> Result<Self, CorrespError> {
        let f = &**field;
        let (n, np) = (weights.len(), weights_p.len());
        let setting = MomentSetting::gl(field, n, np);
        let grading = build_grading(
            Ambient::Gl {
                field: Arc::clone(field),
                n,
            },
            m,
            weights,
            Twist::Identity,
        )?;
        let grading_p = build_grading(
            Ambient::Gl {
                field: Arc::clone(field),
                n: np,
            },
            m,
            weights_p,
            Twist::Identity,
        )?;
        let t = grading.t_bar().clone();
        let tp = grading_p.t_bar().clone();
        let w_twist = WTwist::GlInner {
            t_inv: t.inverse(f).expect("diagonal"),
            tp_inv: tp.inverse(f).expect("diagonal"),
            t,
            tp,
            zeta_inv: f.inv(grading.zeta()),
        };
        Ok(Self::finish(
            Picture::GeneralLinear,
            setting,
            grading,
            grading_p,
            w_twist,
        ))
    }

    /// The equal-rank ramified unitary pair after base change: `GL_n × GL_n`
    /// acting on `Mat_n ⊕ Mat_n`, with the Galois involution
    /// `(x, y) ↦ (J y J′⁻¹, J⁻ᵀ x J′ᵀ)` and `θ = ϑ: g ↦ J g⁻ᵀ J⁻¹` of order 2.
    pub fn ramified_unitary(field: &Arc<Field>, j: Mat, jp: Mat) -> Result<Self, CorrespError> {
        let f = &**field;
        let n = j.rows();
        let setting = MomentSetting::gl(field, n, jp.rows());
        let weights = vec![0; n];
        let weights_p = vec![0; jp.rows()];
        let grading = build_grading(
            Ambient::Gl {
                field: Arc::clone(field),
                n,
            },
            2,
            &weights,
            Twist::Transpose(j.clone()),
        )?;
        let grading_p = build_grading(
            Ambient::Gl {
                field: Arc::clone(field),
                n: jp.rows(),
            },
            2,
            &weights_p,
            Twist::Transpose(jp.clone()),
        )?;
        let jp_inv = jp.inverse(f).ok_or(GradingError::BadTwist)?;
        let j_inv_t = j.inverse(f).ok_or(GradingError::BadTwist)?.transpose();
        let w_twist = WTwist::GlSwap {
            j,
            jp,
            jp_inv,
            j_inv_t,
        };
        Ok(Self::finish(
            Picture::RamifiedUnitary,
            setting,
            grading,
            grading_p,
            w_twist,
        ))
    }

    fn finish(
        picture: Picture,
        setting: MomentSetting,
        grading: GradedGroup,
        grading_p: GradedGroup,
        w_twist: WTwist,
    ) -> Self {
        let mut model = TildeModel {
            picture,
            setting,
            grading,
            grading_p,
            w_twist,
            x_basis: Vec::new(),
        };
        model.x_basis = model.fixed_basis();
        model
    }

    /// Fixed-field basis of `W` made of matrix units times `1` and, over a
    /// quadratic field, the generator.
    fn w_basis(&self) -> Vec<Mat> {
        let f = self.field();
        let (r, c) = self.setting.w_shape();
        let scalars: Vec<Fe> = match f.scalar_degree() {
            1 => vec![Fe::ONE],
            _ => vec![Fe::ONE, f.generator()],
        };
        (0..r * c)
            .flat_map(|k| {
                scalars.iter().map(move |&s| {
                    let mut e = Mat::zeros(r, c);
                    e[(k / c, k % c)] = s;
                    e
                })
            })
            .collect()
    }

    fn fixed_basis(&self) -> Vec<Mat> {
        let f = &**self.field();
        let basis = self.w_basis();
        coefficient_kernel(f, basis.len(), |c| {
            let w = combine(f, c, &basis);
            self.theta_w(&w).sub(f, &w).into_data()
        })
        .into_iter()
        .map(|c| combine(f, &c, &basis))
        .collect()
    }

    pub fn field(&self) -> &Arc<Field> {
        self.setting.field()
    }

    pub fn setting(&self) -> &MomentSetting {
        &self.setting
    }

    pub fn grading(&self) -> &GradedGroup {
        &self.grading
    }

    pub fn grading_p(&self) -> &GradedGroup {
        &self.grading_p
    }

    /// Fixed-field basis of `𝔰𝔣X = W^{θ_W}`.
    pub fn x_basis(&self) -> &[Mat] {
        &self.x_basis
    }

    pub fn theta_w(&self, w: &Mat) -> Mat {
        let f = &**self.field();
        match &self.w_twist {
            WTwist::Formed { theta_inv, theta_p } => theta_p.mul(f, w).mul(f, theta_inv),
            WTwist::GlInner {
                t,
                t_inv,
                tp,
                tp_inv,
                zeta_inv,
            } => {
                let (x, y) = split(w);
                stack(
                    &t.mul(f, &x).mul(f, tp_inv),
                    &t_inv.mul(f, &y).mul(f, tp).scale(f, *zeta_inv),
                )
            }
            WTwist::GlSwap {
                j,
                jp,
                jp_inv,
                j_inv_t,
            } => {
                let (x, y) = split(w);
                stack(
                    &j.mul(f, &y).mul(f, jp_inv),
                    &j_inv_t.mul(f, &x).mul(f, &jp.transpose()),
                )
            }
        }
    }

    pub fn is_fixed(&self, w: &Mat) -> bool {
        self.theta_w(w) == *w
    }

    /// `|𝔰𝔣X|`, if it fits in a `u64`.
    pub fn x_size(&self) -> Option<u64> {
        crate::linalg::span_size(self.field(), self.x_basis.len())
    }

    /// The element of `𝔰𝔣X` with index `idx` in base-`q0` digit order.
    pub fn x_element(&self, mut idx: u64) -> Mat {
        let f = &**self.field();
        let scalars = f.fixed_elements();
        let q0 = scalars.len() as u64;
        let (r, c) = self.setting.w_shape();
        let mut w = Mat::zeros(r, c);
        for b in &self.x_basis {
            let s = scalars[(idx % q0) as usize];
            idx /= q0;
            if !s.is_zero() {
                w = w.add(f, &b.scale(f, s));
            }
        }
        w
    }

    /// `(M(w), -M′(w))`.
    pub fn lambda_pair(&self, w: &Mat) -> (Mat, Mat) {
        let f = &**self.field();
        (self.setting.moment(w), self.setting.moment_p(w).neg(f))
    }

    pub fn is_stable_pair(&self, lam: &Mat, lam_p: &Mat) -> bool {
        self.grading.stable_candidate(lam) && self.grading_p.stable_candidate(lam_p)
    }

    /// The first `count` elements of `𝔰𝔣X`, in index order, with stable
    /// moment images and pairwise distinct `λ`.
    pub fn stable_instances(
        &self,
        count: usize,
        budget: u64,
    ) -> Result<Vec<CorrespondenceInstance>, CorrespError> {
        let size = self.x_size().unwrap_or(u64::MAX);
        if size > budget {
            return Err(CorrespError::Budget {
                needed: size,
                budget,
            });
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for idx in 0..size {
            if out.len() == count {
                break;
            }
            let w = self.x_element(idx);
            let (lam, lam_p) = self.lambda_pair(&w);
            if !seen.contains(&lam) && self.is_stable_pair(&lam, &lam_p) {
                seen.insert(lam.clone());
                out.push(CorrespondenceInstance {
                    model: self.clone(),
                    w_bar: w,
                    lam,
                    lam_p,
                });
            }
        }
        Ok(out)
    }
}

fn split(w: &Mat) -> (Mat, Mat) {
    let n = w.rows() / 2;
    let cols: Vec<usize> = (0..w.cols()).collect();
    (
        w.submatrix(&(0..n).collect::<Vec<_>>(), &cols),
        w.submatrix(&(n..2 * n).collect::<Vec<_>>(), &cols),
    )
}

fn stack(x: &Mat, y: &Mat) -> Mat {
    MomentSetting::gl_elem(x, y)
}

/// A point `w̄ ∈ 𝔰𝔣X` together with its moment images.
#[derive(Clone, Debug)]
pub struct CorrespondenceInstance {
    pub model: TildeModel,
    pub w_bar: Mat,
    pub lam: Mat,
    pub lam_p: Mat,
}

impl CorrespondenceInstance {
    pub fn new(model: TildeModel, w_bar: Mat) -> Result<Self, CorrespError> {
        if !model.is_fixed(&w_bar) {
            return Err(CorrespError::NotFixed);
        }
        let (lam, lam_p) = model.lambda_pair(&w_bar);
        Ok(CorrespondenceInstance {
            model,
            w_bar,
            lam,
            lam_p,
        })
    }

    pub fn field(&self) -> &Arc<Field> {
        self.model.field()
    }

    pub fn is_stable(&self) -> bool {
        self.model.is_stable_pair(&self.lam, &self.lam_p)
    }
}

/// `(λ, λ′) = (M(w̄), -M′(w̄))`, with a flag telling whether both are stable
/// candidates.
pub fn lambda_from_w(inst: &CorrespondenceInstance) -> (Mat, Mat, bool) {
    (inst.lam.clone(), inst.lam_p.clone(), inst.is_stable())
}

/// `θ`-fixed elements of the ambient group centralizing `lam`, found by
/// enumerating the fixed-field points of the commutant of `lam` (cut down by
/// the linear `θ`-fixed condition when `θ` is linear).
pub fn stabilizer(
    lam: &Mat,
    grading: &GradedGroup,
    budget: u64,
) -> Result<FiniteAbelianGroup, CorrespError> {
    let field = grading.field();
    let f = &**field;
    let n = lam.rows();
    let theta = linear_theta(grading);
    let theta_inv = theta.as_ref().map(|t| t.inverse(f).expect("invertible"));
    let units: Vec<Mat> = (0..n * n)
        .flat_map(|k| {
            let scalars: Vec<Fe> = match f.scalar_degree() {
                1 => vec![Fe::ONE],
                _ => vec![Fe::ONE, f.generator()],
            };
            scalars.into_iter().map(move |s| {
                let mut e = Mat::zeros(n, n);
                e[(k / n, k % n)] = s;
                e
            })
        })
        .collect();
    let basis: Vec<Mat> = coefficient_kernel(f, units.len(), |c| {
        let g = combine(f, c, &units);
        let mut out = g.bracket(f, lam).into_data();
        if let (Some(t), Some(ti)) = (&theta, &theta_inv) {
            out.extend(t.mul(f, &g).mul(f, ti).sub(f, &g).into_data());
        }
        out
    })
    .into_iter()
    .map(|c| combine(f, &c, &units))
    .collect();
    let size = crate::linalg::span_size(f, basis.len()).unwrap_or(u64::MAX);
    if size > budget {
        return Err(CorrespError::Budget {
            needed: size,
            budget,
        });
    }
    let scalars = f.fixed_elements();
    let q0 = scalars.len() as u64;
    let elements: Vec<Mat> = (0..size)
        .into_par_iter()
        .filter_map(|mut idx| {
            let mut g = Mat::zeros(n, n);
            for b in &basis {
                let s = scalars[(idx % q0) as usize];
                idx /= q0;
                if !s.is_zero() {
                    g = g.add(f, &b.scale(f, s));
                }
            }
            grading.in_degree0_group(&g).then_some(g)
        })
        .collect();
    FiniteAbelianGroup::new(field, elements)
}

/// `𝔰𝔣M⁻¹(λ) ∩ 𝔰𝔣M′⁻¹(-λ′)` inside `𝔰𝔣X`, by exhaustive enumeration.
pub fn fiber_exhaustive(
    inst: &CorrespondenceInstance,
    budget: u64,
) -> Result<Vec<Mat>, CorrespError> {
    let model = &inst.model;
    let size = model.x_size().unwrap_or(u64::MAX);
    if size > budget {
        return Err(CorrespError::Budget {
            needed: size,
            budget,
        });
    }
    let mut out: Vec<Mat> = (0..size)
        .into_par_iter()
        .filter_map(|idx| {
            let w = model.x_element(idx);
            let (lam, lam_p) = model.lambda_pair(&w);
            (lam == inst.lam && lam_p == inst.lam_p).then_some(w)
        })
        .collect();
    out.sort();
    Ok(out)
}

/// The `S_λ`-orbit `{w̄ g⁻¹}`, sorted and deduplicated.
pub fn fiber_orbit(inst: &CorrespondenceInstance, s: &FiniteAbelianGroup) -> Vec<Mat> {
    let (_, np) = inst.model.setting.dims();
    let one_p = Mat::identity(np);
    let mut out: Vec<Mat> = s
        .elements()
        .iter()
        .map(|g| {
            inst.model
                .setting
                .act(g, &one_p, &inst.w_bar)
                .expect("group elements are invertible")
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// For each `g′ ∈ S′`, the elements `g ∈ S` with `(g, g′)·w̄ = w̄`.
pub fn alpha_candidates(
    inst: &CorrespondenceInstance,
    s: &FiniteAbelianGroup,
    sp: &FiniteAbelianGroup,
) -> Vec<Vec<usize>> {
    let setting = &inst.model.setting;
    sp.elements()
        .iter()
        .map(|gp| {
            (0..s.order())
                .filter(|&i| {
                    setting.act(&s.elements()[i], gp, &inst.w_bar).as_ref() == Some(&inst.w_bar)
                })
                .collect()
        })
        .collect()
}

/// `α(g′)` for each index of `S′`: the unique solution outside the
/// exceptional case, the least representative of the solution coset in it.
/// `None` if some `g′` has no solution.
pub fn alpha(
    inst: &CorrespondenceInstance,
    s: &FiniteAbelianGroup,
    sp: &FiniteAbelianGroup,
) -> Option<Vec<usize>> {
    alpha_candidates(inst, s, sp)
        .into_iter()
        .map(|c| c.first().copied())
        .collect()
}

/// The equal-rank ramified unitary pair with `rank λ = n - 1`.
pub fn detect_case_e(inst: &CorrespondenceInstance) -> bool {
    let (n, np) = inst.model.setting.dims();
    inst.model.picture == Picture::RamifiedUnitary
        && n == np
        && inst.lam.rank(inst.field()) + 1 == n
}

/// `S̄_λ = {g ∈ S_λ : gλ = λ}`, as indices into `S`.
pub fn sbar_lambda(lam: &Mat, s: &FiniteAbelianGroup, field: &Field) -> Vec<usize> {
    (0..s.order())
        .filter(|&i| s.elements()[i].mul(field, lam) == *lam)
        .collect()
}

/// `Stab_{S_λ}(w̄)` under `g·w = (g, 1)·w`, as indices into `S`.
pub fn stab_w(inst: &CorrespondenceInstance, s: &FiniteAbelianGroup) -> Vec<usize> {
    let (_, np) = inst.model.setting.dims();
    let one_p = Mat::identity(np);
    (0..s.order())
        .filter(|&i| {
            inst.model
                .setting
                .act(&s.elements()[i], &one_p, &inst.w_bar)
                .as_ref()
                == Some(&inst.w_bar)
        })
        .collect()
}

/// Multiplicity of `χ ⊠ χ′` in `ℂ[fiber]` for every pair of characters,
/// computed from the `S × S′`-orbits and their stabilizers: an orbit with
/// stabilizer `H` contributes one exactly when `χ ⊠ χ′` is trivial on `H`.
pub fn perm_character_multiplicities(
    setting: &MomentSetting,
    fiber: &[Mat],
    s: &FiniteAbelianGroup,
    sp: &FiniteAbelianGroup,
) -> BTreeMap<(Character, Character), u32> {
    let mut remaining: BTreeSet<&Mat> = fiber.iter().collect();
    let mut stabilizers: Vec<Vec<(usize, usize)>> = Vec::new();
    while let Some(&rep) = remaining.iter().next() {
        let mut stab = Vec::new();
        for (i, g) in s.elements().iter().enumerate() {
            for (j, gp) in sp.elements().iter().enumerate() {
                let image = setting.act(g, gp, rep).expect("invertible");
                if image == *rep {
                    stab.push((i, j));
                }
                remaining.remove(&image);
            }
        }
        remaining.remove(rep);
        stabilizers.push(stab);
    }
    let chars = s.characters();
    let chars_p = sp.characters();
    let (n, np) = (s.exponent(), sp.exponent());
    let mut out = BTreeMap::new();
    for chi in &chars {
        for chi_p in &chars_p {
            let mult = stabilizers
                .iter()
                .filter(|h| {
                    h.iter().all(|&(i, j)| {
                        let a = Rational::new(s.eval(chi, i) as i64, n as i64);
                        let b = Rational::new(sp.eval(chi_p, j) as i64, np as i64);
                        (a + b).is_integer()
                    })
                })
                .count() as u32;
            out.insert((chi.clone(), chi_p.clone()), mult);
        }
    }
    out
}

/// `χ*∘α` as a character of `S′`, or `None` when it is not well defined:
/// in the exceptional case this happens exactly when `χ` is nontrivial on
/// `S̄_λ`.
pub fn predicted_lift(
    chi: &Character,
    s: &FiniteAbelianGroup,
    sp: &FiniteAbelianGroup,
    alpha: &[usize],
    sbar: &[usize],
) -> Option<Character> {
    if !s.is_trivial_on(chi, sbar) {
        return None;
    }
    let dual = s.dual(chi);
    sp.character_from_values(|j| s.eval_fraction(&dual, alpha[j]))
}

/// One named pass/fail assertion of a theorem check.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct TheoremReport {
    pub picture: Picture,
    pub case_e: bool,
    pub lambda: String,
    pub lambda_p: String,
    pub fiber_size: usize,
    pub s_order: usize,
    pub s_invariants: Vec<u64>,
    pub sp_order: usize,
    pub sp_invariants: Vec<u64>,
    pub sbar_order: usize,
    /// Characters of `S_λ` occurring in the fiber.
    pub occurring: usize,
    pub checks: Vec<Check>,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs the whole finite check on one instance.
pub fn verify_theorem(
    inst: &CorrespondenceInstance,
    budget: u64,
) -> Result<TheoremReport, CorrespError> {
    let field = inst.field();
    let f = &**field;
    let model = &inst.model;
    let mut report = TheoremReport {
        picture: model.picture,
        case_e: false,
        lambda: inst.lam.format(f),
        lambda_p: inst.lam_p.format(f),
        fiber_size: 0,
        s_order: 0,
        s_invariants: Vec::new(),
        sp_order: 0,
        sp_invariants: Vec::new(),
        sbar_order: 0,
        occurring: 0,
        checks: Vec::new(),
    };
    let checks = &mut report.checks;
    let stable = inst.is_stable();
    checks.push(Check::new(
        "preconditions",
        stable,
        if stable {
            "λ and λ′ are stable candidates"
        } else {
            "λ or λ′ is not stable"
        },
    ));
    if !stable {
        return Ok(report);
    }
    let case_e = detect_case_e(inst);
    report.case_e = case_e;
    let s = stabilizer(&inst.lam, model.grading(), budget)?;
    let sp = stabilizer(&inst.lam_p, model.grading_p(), budget)?;
    report.s_order = s.order();
    report.s_invariants = s.invariants().to_vec();
    report.sp_order = sp.order();
    report.sp_invariants = sp.invariants().to_vec();
    let p = f.characteristic() as usize;
    report.checks.push(Check::new(
        "stabilizers_prime_to_p",
        s.order() % p != 0 && sp.order() % p != 0,
        format!("|S| = {}, |S′| = {}", s.order(), sp.order()),
    ));

    let exhaustive = fiber_exhaustive(inst, budget)?;
    let orbit = fiber_orbit(inst, &s);
    report.fiber_size = exhaustive.len();
    report.checks.push(Check::new(
        "fiber_equals_orbit",
        exhaustive == orbit,
        format!(
            "fiber {} points, orbit {} points",
            exhaustive.len(),
            orbit.len()
        ),
    ));

    let stab = stab_w(inst, &s);
    let sbar = sbar_lambda(&inst.lam, &s, f);
    report.sbar_order = sbar.len();
    if case_e {
        report.checks.push(Check::new(
            "stabilizer_of_w_equals_sbar",
            stab == sbar,
            format!("|Stab(w̄)| = {}, |S̄_λ| = {}", stab.len(), sbar.len()),
        ));
        report.checks.push(Check::new(
            "orbit_stabilizer_count",
            exhaustive.len() * sbar.len() == s.order(),
            format!("{} · {} vs {}", exhaustive.len(), sbar.len(), s.order()),
        ));
    } else {
        report.checks.push(Check::new(
            "free_action",
            stab.len() == 1,
            format!("|Stab(w̄)| = {}", stab.len()),
        ));
    }

    let candidates = alpha_candidates(inst, &s, &sp);
    let defined = candidates.iter().all(|c| !c.is_empty());
    let unique = candidates.iter().all(|c| c.len() == 1);
    let alpha_map: Vec<usize> = candidates
        .iter()
        .map(|c| c.first().copied().unwrap_or(0))
        .collect();
    let sbar_set: BTreeSet<usize> = sbar.iter().copied().collect();
    let homomorphism = defined
        && (0..sp.order()).all(|a| {
            (0..sp.order()).all(|b| {
                let lhs = alpha_map[sp.mul(a, b)];
                let rhs = s.mul(alpha_map[a], alpha_map[b]);
                if case_e {
                    // α is only defined modulo S̄_λ.
                    let inv = s
                        .index_of(&s.elements()[rhs].inverse(f).expect("invertible"))
                        .expect("closed");
                    sbar_set.contains(&s.mul(lhs, inv))
                } else {
                    lhs == rhs
                }
            })
        });
    report.checks.push(Check::new(
        "alpha_well_defined",
        defined && (case_e || unique),
        format!(
            "solution counts {:?}",
            candidates.iter().map(Vec::len).collect::<BTreeSet<_>>()
        ),
    ));
    report.checks.push(Check::new(
        "alpha_homomorphism",
        homomorphism,
        if case_e { "modulo S̄_λ" } else { "exact" },
    ));

    let pair_stab: usize = (0..s.order())
        .map(|i| {
            (0..sp.order())
                .filter(|&j| {
                    model
                        .setting
                        .act(&s.elements()[i], &sp.elements()[j], &inst.w_bar)
                        .as_ref()
                        == Some(&inst.w_bar)
                })
                .count()
        })
        .sum();
    let graph_size = if case_e {
        sp.order() * sbar.len()
    } else {
        sp.order()
    };
    report.checks.push(Check::new(
        "stabilizer_is_graph",
        defined && pair_stab == graph_size,
        format!("|Stab_{{S×S′}}(w̄)| = {pair_stab}, graph {graph_size}"),
    ));

    let mults = perm_character_multiplicities(&model.setting, &exhaustive, &s, &sp);
    let zero_one = mults.values().all(|&m| m <= 1);
    let total: u32 = mults.values().sum();
    let trivial = mults
        .get(&(s.trivial_character(), sp.trivial_character()))
        .copied()
        .unwrap_or(0);
    report.checks.push(Check::new(
        "multiplicities_zero_one",
        zero_one,
        format!(
            "max multiplicity {}",
            mults.values().max().copied().unwrap_or(0)
        ),
    ));
    report.checks.push(Check::new(
        "burnside_totals",
        total as usize == exhaustive.len() && trivial == 1,
        format!(
            "Σ multiplicities {total}, fiber {}, trivial pair {trivial}",
            exhaustive.len()
        ),
    ));
    let mut support_ok = defined;
    let mut occurring = 0;
    if defined {
        for chi in s.characters() {
            let lift = predicted_lift(&chi, &s, &sp, &alpha_map, &sbar);
            if lift.is_some() {
                occurring += 1;
            }
            if !case_e && lift.is_none() {
                support_ok = false;
            }
            for chi_p in sp.characters() {
                let m = mults[&(chi.clone(), chi_p.clone())];
                let expected = u32::from(lift.as_ref() == Some(&chi_p));
                if m != expected {
                    support_ok = false;
                }
            }
        }
    }
    report.occurring = occurring;
    report.checks.push(Check::new(
        "support_is_lift_graph",
        support_ok,
        format!("{occurring} of {} characters lift", s.order()),
    ));
    if case_e {
        report.checks.push(Check::new(
            "lift_count_is_index",
            occurring * sbar.len() == s.order(),
            format!(
                "{occurring} lifted, [S:S̄] = {}",
                s.order() / sbar.len().max(1)
            ),
        ));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{make_field, Involution};
    use crate::spaces::{witt_basis, DivisionKind, Sign};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn sp2_o3(p: u32) -> TildeModel {
        let f = make_field(p, 1, Involution::Identity).unwrap();
        let v = witt_basis(&f, DivisionKind::Split, 2, Sign::Minus, 1, &[]).unwrap();
        let vp = witt_basis(&f, DivisionKind::Split, 3, Sign::Plus, 1, &[Fe::ONE]).unwrap();
        let pt = ApartmentPoint::new(
            DivisionKind::Split,
            Sign::Minus,
            vec![q(1, 4)],
            vec![],
            vec![],
        )
        .unwrap();
        let ptp = ApartmentPoint::new(
            DivisionKind::Split,
            Sign::Plus,
            vec![q(1, 2)],
            vec![q(0, 1)],
            vec![1],
        )
        .unwrap();
        TildeModel::from_points(v, vp, &pt, &ptp, 2, Twist::Identity, Twist::Identity).unwrap()
    }

    #[test]
    fn group_decomposition() {
        let f = make_field(7, 1, Involution::Identity).unwrap();
        let g = f.generator();
        let elements: Vec<Mat> = (0..6)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| Mat::diag(&[f.pow(g, i), f.pow(f.from_i64(-1), j)]))
            .collect();
        let group = FiniteAbelianGroup::new(&f, elements).unwrap();
        assert_eq!(group.order(), 12);
        assert_eq!(group.invariants(), [2, 6]);
        assert_eq!(group.exponent(), 6);
        assert_eq!(group.characters().len(), 12);
        let chi = &group.characters()[7];
        for a in 0..12 {
            for b in 0..12 {
                let lhs = group.eval(chi, group.mul(a, b));
                let rhs = (group.eval(chi, a) + group.eval(chi, b)) % 6;
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn sp2_o3_instance() {
        let model = sp2_o3(3);
        assert_eq!(model.picture, Picture::CaseB);
        assert_eq!(model.x_basis().len(), 3);
        let insts = model.stable_instances(3, DEFAULT_BUDGET).unwrap();
        assert!(!insts.is_empty());
        let report = verify_theorem(&insts[0], DEFAULT_BUDGET).unwrap();
        assert!(report.passed(), "{report:#?}");
        assert_eq!(report.s_order, 2);
        assert_eq!(report.fiber_size, 2);
    }

    #[test]
    fn zero_is_not_stable() {
        let model = sp2_o3(3);
        let (r, c) = model.setting().w_shape();
        let inst = CorrespondenceInstance::new(model, Mat::zeros(r, c)).unwrap();
        let report = verify_theorem(&inst, DEFAULT_BUDGET).unwrap();
        assert!(!report.passed());
        assert_eq!(report.checks.len(), 1);
    }

    #[test]
    fn ramified_unitary_rank_one() {
        let f = make_field(3, 1, Involution::Identity).unwrap();
        let model = TildeModel::ramified_unitary(&f, Mat::identity(1), Mat::identity(1)).unwrap();
        let inst = CorrespondenceInstance::new(model, Mat::zeros(2, 1)).unwrap();
        assert!(detect_case_e(&inst));
        let report = verify_theorem(&inst, DEFAULT_BUDGET).unwrap();
        assert!(report.passed(), "{report:#?}");
        assert_eq!(
            (report.s_order, report.sbar_order, report.occurring),
            (2, 2, 1)
        );
    }
}
