//! The invariant checks behind `selftest` and the acceptance target. Each
//! function returns report records; none of them panics on a failed check.

use std::sync::Arc;

use dualpair::classify::{classification_table, DEFAULT_CLASSIFY_BUDGET};
use dualpair::corresp::{verify_theorem, DEFAULT_BUDGET};
use dualpair::lattice::{
    epipelagic_dichotomy, hom_piece_dim, is_selfdual, jumps, splitting_dims, tensor_jumps,
};
use dualpair::moment::{enumerate_matrices, first_order_osc_check};
use dualpair::numeric::rational_mod;
use dualpair::sample::{random_combination, random_isometry, random_mat, rng_from_seed, SampleRng};
use dualpair::{
    make_field, witt_basis, ApartmentPoint, Dichotomy, DivisionKind, EpsHermSpace, Fe, Field,
    Involution, LieAlgebra, Mat, MomentSetting, Rational, Sign, TildeModel, Verdict,
};
use rand::Rng;

use crate::report::Record;

pub fn prime_field(p: u32) -> Arc<Field> {
    make_field(p, 1, Involution::Identity).expect("odd prime")
}

pub fn unitary_field(p: u32) -> Arc<Field> {
    make_field(p, 2, Involution::Frobenius).expect("odd prime")
}

pub fn sp(f: &Arc<Field>, n: usize) -> EpsHermSpace {
    witt_basis(f, DivisionKind::Split, n, Sign::Minus, n / 2, &[]).expect("even dimension")
}

pub fn o(f: &Arc<Field>, n: usize) -> EpsHermSpace {
    witt_basis(
        f,
        DivisionKind::Split,
        n,
        Sign::Plus,
        n / 2,
        &vec![Fe::ONE; n % 2],
    )
    .expect("split orthogonal space")
}

/// Hermitian or skew-Hermitian space of the given dimension over `F_{q²}`.
pub fn herm(f: &Arc<Field>, n: usize, eps: Sign) -> EpsHermSpace {
    let e = eps.to_fe(f);
    let d = f
        .elements()
        .find(|&d| !d.is_zero() && d == f.mul(e, f.conj(d)))
        .expect("a diagonal entry exists");
    witt_basis(f, DivisionKind::Unramified, n, eps, n / 2, &vec![d; n % 2])
        .expect("split unitary space")
}

fn formed(v: EpsHermSpace, vp: EpsHermSpace) -> MomentSetting {
    MomentSetting::formed(v, vp).expect("opposite signs")
}

fn setting_name(s: &MomentSetting) -> String {
    match s {
        MomentSetting::Formed { v, vp } => format!(
            "{}x{} over F{}",
            dualpair::LieType::of_space(v).name(),
            dualpair::LieType::of_space(vp).name(),
            v.field().order()
        ),
        MomentSetting::Gl { field, n, np } => format!("GL{n}xGL{np} over F{}", field.order()),
    }
}

/// Settings with `dim V = 2`, `dim V′ = 3` over `F_3`.
pub fn exhaustive_settings() -> Vec<MomentSetting> {
    let f = prime_field(3);
    vec![formed(sp(&f, 2), o(&f, 3)), MomentSetting::gl(&f, 2, 3)]
}

/// Settings with dimensions up to `(4, 5)` over `F_5` (`F_25` for unitary).
pub fn sampled_settings() -> Vec<MomentSetting> {
    let f = prime_field(5);
    let u = unitary_field(5);
    vec![
        formed(sp(&f, 2), o(&f, 3)),
        formed(sp(&f, 2), o(&f, 5)),
        formed(sp(&f, 4), o(&f, 4)),
        formed(sp(&f, 4), o(&f, 5)),
        formed(o(&f, 2), sp(&f, 4)),
        formed(o(&f, 3), sp(&f, 4)),
        formed(o(&f, 4), sp(&f, 4)),
        formed(herm(&u, 2, Sign::Plus), herm(&u, 3, Sign::Minus)),
        MomentSetting::gl(&f, 2, 3),
        MomentSetting::gl(&f, 4, 5),
    ]
}

/// The adjoint used to form moment images in the checks, optionally with
/// its sign flipped.
fn checked_star(s: &MomentSetting, w: &Mat, flip: bool) -> Mat {
    let st = s.star(w);
    if flip {
        st.neg(s.field())
    } else {
        st
    }
}

fn moments(s: &MomentSetting, w: &Mat, flip: bool) -> (Mat, Mat) {
    let f = &**s.field();
    match s {
        MomentSetting::Formed { .. } => {
            let st = checked_star(s, w, flip);
            (st.mul(f, w), w.mul(f, &st))
        }
        MomentSetting::Gl { .. } => (s.moment(w), s.moment_p(w)),
    }
}

/// Outcome of one identity family over many inputs.
#[derive(Default)]
struct Tally {
    count: u64,
    counterexample: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, f: &Field, w: &Mat) {
        self.count += 1;
        if !ok && self.counterexample.is_none() {
            self.counterexample = Some(w.format(f));
        }
    }

    fn record(self, name: String, anchor: &str) -> Record {
        let passed = self.counterexample.is_none();
        let detail = format!("{} evaluations", self.count);
        let r = Record::new(name, anchor, passed, detail).with_work(self.count);
        match self.counterexample {
            Some(w) => r.with_witness(w),
            None => r,
        }
    }
}

pub const ANCHOR_STAR: &str = "star-adjoint: <w v, v'> = <v, w* v'>";
pub const ANCHOR_TRACE: &str = "pairing-trace: <w1, w2> = tr tr(w2* w1)";
pub const ANCHOR_MOMENT: &str =
    "pairing-moment: <X.w, w> = 2B(M(w), X), <X'.w, w> = 2B'(-M'(w), X')";
pub const ANCHOR_EQUIV: &str = "moment-equivariance";
pub const ANCHOR_OSC: &str = "oscillator-first-order";

fn star_identity(s: &MomentSetting, w: &Mat, flip: bool) -> bool {
    let MomentSetting::Formed { v, vp } = s else {
        return true;
    };
    let f = &**s.field();
    let ws = checked_star(s, w, flip);
    let unit = |n: usize, i: usize| {
        let mut e = vec![Fe::ZERO; n];
        e[i] = Fe::ONE;
        e
    };
    (0..v.dim()).all(|i| {
        (0..vp.dim()).all(|j| {
            let (ei, ej) = (unit(v.dim(), i), unit(vp.dim(), j));
            vp.pairing(&w.mul_vec(f, &ei), &ej) == v.pairing(&ei, &ws.mul_vec(f, &ej))
        })
    })
}

/// Star, trace and moment-pairing identities for every `w` yielded, with
/// `X`, `X′` running over Lie-algebra bases (both sides are linear in `X`).
fn moment_identity_records(
    s: &MomentSetting,
    ws: impl Iterator<Item = Mat>,
    flip: bool,
    label: &str,
) -> Vec<Record> {
    let f = &**s.field();
    let two = f.from_i64(2);
    let basis = s.lie_basis();
    let basis_p = s.lie_basis_p();
    let (mut star_t, mut trace_t, mut moment_t) =
        (Tally::default(), Tally::default(), Tally::default());
    for w in ws {
        star_t.check(star_identity(s, &w, flip), f, &w);
        let (m, mp) = moments(s, &w, flip);
        for x in &basis {
            let xw = s.act_lie(x, &w);
            let lhs = s.pairing(&xw, &w);
            moment_t.check(lhs == f.mul(two, s.b_form(&m, x)), f, &w);
            if let MomentSetting::Formed { v, .. } = s {
                let t = checked_star(s, &w, flip).mul(f, &xw).trace(f);
                trace_t.check(s.pairing(&xw, &w) == v.kind().trace(f, t), f, &w);
            }
        }
        for xp in &basis_p {
            let lhs = s.pairing(&s.act_lie_p(xp, &w), &w);
            moment_t.check(lhs == f.mul(two, s.b_form_p(&mp.neg(f), xp)), f, &w);
        }
    }
    let mut out = vec![moment_t.record(format!("pairing-moment {label}"), ANCHOR_MOMENT)];
    if matches!(s, MomentSetting::Formed { .. }) {
        out.push(star_t.record(format!("star-adjoint {label}"), ANCHOR_STAR));
        out.push(trace_t.record(format!("pairing-trace {label}"), ANCHOR_TRACE));
    }
    out
}

/// Generators of the acting group: all isometries for formed spaces,
/// elementary matrices and a diagonal generator for general linear groups.
fn group_generators(f: &Arc<Field>, space: Option<&EpsHermSpace>, n: usize) -> Vec<Mat> {
    match space {
        Some(v) => v.enumerate_isometries(),
        None => {
            let mut out = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let mut e = Mat::identity(n);
                        e[(i, j)] = Fe::ONE;
                        out.push(e);
                    }
                }
            }
            let mut d = Mat::identity(n);
            d[(0, 0)] = f.generator();
            out.push(d);
            out
        }
    }
}

fn equivariance_ok(s: &MomentSetting, g: &Mat, gp: &Mat, w: &Mat) -> bool {
    let f = &**s.field();
    let Some(moved) = s.act(g, gp, w) else {
        return false;
    };
    let conj = |h: &Mat, x: &Mat| h.mul(f, x).mul(f, &h.inverse(f).expect("invertible"));
    s.moment(&moved) == conj(g, &s.moment(w)) && s.moment_p(&moved) == conj(gp, &s.moment_p(w))
}

/// Moment identities and equivariance: exhaustive over `F_3` in dimensions
/// `(2, 3)` and `samples` random draws per setting over `F_5`.
pub fn moment_checks(samples: u64, seed: u64, flip: bool) -> Vec<Record> {
    let mut out = Vec::new();
    for s in exhaustive_settings() {
        let f = Arc::clone(s.field());
        let (r, c) = s.w_shape();
        let label = format!("{} exhaustive", setting_name(&s));
        out.extend(moment_identity_records(
            &s,
            enumerate_matrices(&f, r, c),
            flip,
            &label,
        ));

        // Equivariance for generators of each factor; the full group follows
        // because both sides are multiplicative in `(g, g′)`.
        let (n, np) = s.dims();
        let (gens, gens_p) = match &s {
            MomentSetting::Formed { v, vp } => (
                group_generators(&f, Some(v), n),
                group_generators(&f, Some(vp), np),
            ),
            MomentSetting::Gl { .. } => (
                group_generators(&f, None, n),
                group_generators(&f, None, np),
            ),
        };
        let (id, id_p) = (Mat::identity(n), Mat::identity(np));
        let mut t = Tally::default();
        for w in enumerate_matrices(&f, r, c) {
            for g in &gens {
                t.check(equivariance_ok(&s, g, &id_p, &w), &f, &w);
            }
            for gp in &gens_p {
                t.check(equivariance_ok(&s, &id, gp, &w), &f, &w);
            }
        }
        out.push(t.record(format!("equivariance {label}"), ANCHOR_EQUIV));
    }
    let mut rng = rng_from_seed(seed);
    for s in sampled_settings() {
        let f = Arc::clone(s.field());
        let (r, c) = s.w_shape();
        let label = format!("{} sampled", setting_name(&s));
        let ws: Vec<Mat> = (0..samples)
            .map(|_| random_mat(&f, r, c, &mut rng))
            .collect();
        out.extend(moment_identity_records(
            &s,
            ws.iter().cloned(),
            flip,
            &label,
        ));
        let mut t = Tally::default();
        for w in &ws {
            let (g, gp) = random_group_pair(&s, &mut rng);
            t.check(equivariance_ok(&s, &g, &gp, w), &f, w);
        }
        out.push(t.record(format!("equivariance {label}"), ANCHOR_EQUIV));
    }
    out
}

fn random_invertible(f: &Field, n: usize, rng: &mut SampleRng) -> Mat {
    loop {
        let g = random_mat(f, n, n, rng);
        if !g.det(f).is_zero() {
            return g;
        }
    }
}

fn random_group_pair(s: &MomentSetting, rng: &mut SampleRng) -> (Mat, Mat) {
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

/// The first-order oscillator identity, exhaustive over `F_3` in dimensions
/// `(2, 3)` and sampled over `F_5`. The `ε`-coefficient is linear in `X`, so
/// `X` runs over a basis in the exhaustive part.
pub fn oscillator_checks(samples: u64, seed: u64) -> Vec<Record> {
    let mut out = Vec::new();
    for s in exhaustive_settings() {
        let f = Arc::clone(s.field());
        let (r, c) = s.w_shape();
        let basis = s.lie_basis();
        let mut t = Tally::default();
        for w in enumerate_matrices(&f, r, c) {
            for x in &basis {
                t.check(first_order_osc_check(&s, x, &w).holds(), &f, &w);
            }
        }
        out.push(t.record(
            format!("oscillator {} exhaustive", setting_name(&s)),
            ANCHOR_OSC,
        ));
    }
    let mut rng = rng_from_seed(seed ^ 0x05c1);
    for s in sampled_settings() {
        let f = Arc::clone(s.field());
        let (r, c) = s.w_shape();
        let basis = s.lie_basis();
        let mut t = Tally::default();
        for _ in 0..samples {
            let w = random_mat(&f, r, c, &mut rng);
            let x = random_combination(&f, &basis, &mut rng);
            t.check(first_order_osc_check(&s, &x, &w).holds(), &f, &w);
        }
        out.push(t.record(
            format!("oscillator {} sampled", setting_name(&s)),
            ANCHOR_OSC,
        ));
    }
    out
}

/// `P ≠ 0` against the centralizer oracle on random elements of each
/// algebra. Half of the samples use a random subset of the basis, which
/// produces singular and non-semisimple elements far more often.
pub fn p_oracle_checks(samples: u64, seed: u64) -> Vec<Record> {
    let f = prime_field(5);
    let u = unitary_field(5);
    let u3 = herm(&u, 3, Sign::Plus);
    let cases: Vec<(String, LieAlgebra, Arc<Field>, Vec<Mat>)> = vec![
        (
            "gl3".into(),
            LieAlgebra::gl(&f, 3),
            f.clone(),
            LieAlgebra::gl(&f, 3).basis().to_vec(),
        ),
        (
            "sp4".into(),
            LieAlgebra::of_space(&sp(&f, 4)),
            f.clone(),
            sp(&f, 4).lie_basis(),
        ),
        (
            "sp6".into(),
            LieAlgebra::of_space(&sp(&f, 6)),
            f.clone(),
            sp(&f, 6).lie_basis(),
        ),
        (
            "o4".into(),
            LieAlgebra::of_space(&o(&f, 4)),
            f.clone(),
            o(&f, 4).lie_basis(),
        ),
        (
            "o5".into(),
            LieAlgebra::of_space(&o(&f, 5)),
            f.clone(),
            o(&f, 5).lie_basis(),
        ),
        (
            "o6".into(),
            LieAlgebra::of_space(&o(&f, 6)),
            f.clone(),
            o(&f, 6).lie_basis(),
        ),
        (
            "u3".into(),
            LieAlgebra::of_space(&u3),
            u.clone(),
            u3.lie_basis(),
        ),
    ];
    let mut rng = rng_from_seed(seed ^ 0x9e37);
    cases
        .into_iter()
        .map(|(name, g, field, basis)| {
            let mut t = Tally::default();
            let mut rs = 0u64;
            for i in 0..samples {
                let chosen: Vec<Mat> = if i % 2 == 0 {
                    basis.clone()
                } else {
                    let k = rng.random_range(1..=basis.len());
                    (0..k)
                        .map(|_| basis[rng.random_range(0..basis.len())].clone())
                        .collect()
                };
                let x = random_combination(&field, &chosen, &mut rng);
                let by_p = g.is_regular_semisimple(&x);
                rs += by_p as u64;
                t.check(by_p == g.centralizer_oracle(&x), &field, &x);
            }
            let mut r = t.record(
                format!("P-oracle {name}"),
                "invariant-P agrees with centralizer dimension",
            );
            r.detail = format!("{} ({rs} regular semisimple)", r.detail);
            r
        })
        .collect()
}

fn random_point(rng: &mut SampleRng, kind: DivisionKind, eps: Sign) -> ApartmentPoint {
    let nu = kind.nu();
    let n = rng.random_range(0..4usize);
    let plus = (0..n)
        .map(|_| {
            let d = rng.random_range(1..=12i64);
            Rational::new(rng.random_range(-d..=d), d)
        })
        .collect();
    let a = rng.random_range(0..=2usize);
    let aniso = (0..a)
        .map(|_| {
            if rng.random_bool(0.5) {
                Rational::from_integer(0)
            } else {
                nu / 2
            }
        })
        .collect();
    ApartmentPoint::new(kind, eps, plus, aniso, vec![1; a]).expect("valid coordinates")
}

/// A split point with coordinates in `(1/2m)ℤ`.
fn random_graded_point(rng: &mut SampleRng, eps: Sign, m: i64) -> ApartmentPoint {
    let n = rng.random_range(1..4usize);
    let plus = (0..n)
        .map(|_| Rational::new(rng.random_range(0..2 * m), 2 * m))
        .collect();
    let a = rng.random_range(0..=1usize);
    let aniso = (0..a)
        .map(|_| {
            if rng.random_bool(0.5) {
                Rational::from_integer(0)
            } else {
                Rational::new(1, 2)
            }
        })
        .collect();
    ApartmentPoint::new(DivisionKind::Split, eps, plus, aniso, vec![1; a])
        .expect("valid coordinates")
}

/// Jump multiplicities read from the exponents `⌈(r - a_k)/ν⌉` at the
/// coordinate levels, where alone they can change.
fn jumps_from_exponents(pt: &ApartmentPoint) -> dualpair::JumpSet {
    let nu = pt.nu();
    let tiny = Rational::new(1, 1_000_003);
    let mut out = dualpair::JumpSet::new(nu);
    let mut levels: Vec<Rational> = pt
        .coords()
        .into_iter()
        .map(|a| rational_mod(a, nu))
        .collect();
    levels.sort();
    levels.dedup();
    for r in levels {
        let count = (0..pt.dim())
            .filter(|&k| pt.exponent(k, r + tiny) > pt.exponent(k, r))
            .count();
        if count > 0 {
            out.insert(r, count);
        }
    }
    out
}

/// Self-duality symmetry, the tensor sum law, and the epipelagic dichotomy.
pub fn jump_checks(samples: u64, seed: u64) -> Vec<Record> {
    let mut rng = rng_from_seed(seed ^ 0x1a77);
    let kinds = [
        DivisionKind::Split,
        DivisionKind::Unramified,
        DivisionKind::Ramified,
    ];
    let (mut sym, mut law, mut dich) = (Tally::default(), Tally::default(), Tally::default());
    let fmt = |pt: &ApartmentPoint| {
        let c: Vec<String> = pt
            .coords()
            .iter()
            .map(dualpair::numeric::format_rational)
            .collect();
        format!("{:?} {:?} [{}]", pt.kind, pt.eps, c.join(", "))
    };
    let note = |t: &mut Tally, ok: bool, what: String| {
        t.count += 1;
        if !ok && t.counterexample.is_none() {
            t.counterexample = Some(what);
        }
    };
    for i in 0..samples {
        let kind = kinds[(i % 3) as usize];
        let eps = if rng.random_bool(0.5) {
            Sign::Plus
        } else {
            Sign::Minus
        };
        let pt = random_point(&mut rng, kind, eps);
        let j = jumps(&pt);
        let ok = is_selfdual(&pt) && j.is_symmetric() && j == jumps_from_exponents(&pt);
        note(&mut sym, ok, fmt(&pt));

        let a = random_point(&mut rng, DivisionKind::Split, Sign::Minus);
        let b = random_point(&mut rng, DivisionKind::Split, Sign::Plus);
        let t = tensor_jumps(&jumps(&a), &jumps(&b)).expect("same period");
        let levels: Vec<Rational> = a
            .coords()
            .iter()
            .flat_map(|x| {
                b.coords()
                    .into_iter()
                    .map(move |y| rational_mod(*x - y, Rational::from_integer(1)))
            })
            .collect();
        let ok = t.total() == a.dim() * b.dim()
            && levels
                .iter()
                .all(|&r| t.mult(r) == hom_piece_dim(&a, &b, r));
        note(&mut law, ok, format!("{} / {}", fmt(&a), fmt(&b)));

        let m = rng.random_range(1..=4i64);
        let a = random_graded_point(&mut rng, Sign::Minus, m);
        let b = random_graded_point(&mut rng, Sign::Plus, m);
        let t = tensor_jumps(&jumps(&a), &jumps(&b)).expect("same period");
        let odd = t.entries.keys().all(|&r| {
            let x = r * Rational::from_integer(2 * m);
            x.is_integer() && x.to_integer().rem_euclid(2) == 1
        });
        let d = epipelagic_dichotomy(&jumps(&a), &jumps(&b), m as u32);
        note(
            &mut dich,
            odd == (d != Dichotomy::Violation),
            format!("m={m} {} / {}", fmt(&a), fmt(&b)),
        );
    }
    vec![
        sym.record(
            "jump symmetry".into(),
            "self-dual jump sets satisfy Jump = -Jump",
        ),
        law.record(
            "tensor sum law".into(),
            "Jump(L (x) L') = Jump(L) + Jump(L')",
        ),
        dich.record(
            "dichotomy".into(),
            "tensor jumps at odd levels iff one side integral, other half-integral",
        ),
    ]
}

/// One configuration for the splitting check: the two points, `m`, and
/// optionally the model whose fixed space should have dimension `dim 𝔰𝔣X`.
pub struct SplitCase {
    pub label: String,
    pub pt: ApartmentPoint,
    pub ptp: ApartmentPoint,
    pub m: u32,
    pub model: Option<TildeModel>,
}

pub fn splitting_record(case: &SplitCase) -> Record {
    let anchor = "sfW = sfX + sfY with sfY maximal isotropic; sum of X^[mu] is W";
    let d = match splitting_dims(&case.pt, &case.ptp, case.m) {
        Ok(d) => d,
        Err(e) => {
            return Record::new(
                format!("splitting {}", case.label),
                anchor,
                false,
                e.to_string(),
            )
        }
    };
    let depth = Rational::new(1, 2 * case.m as i64);
    let deg = case.pt.kind.residue_degree();
    let direct = (hom_piece_dim(&case.pt, &case.ptp, depth)
        + hom_piece_dim(&case.pt, &case.ptp, -depth))
        / deg
        * deg;
    let per_class: usize = d.per_class.values().sum();
    let mut ok = d.dim_w == d.dim_x + d.dim_y
        && d.dim_w == direct
        && 2 * d.dim_y == d.dim_w
        && per_class == d.total;
    let mut detail = format!(
        "dim sfW = {} = {} + {}, direct count {}, sum over classes {} of {}",
        d.dim_w, d.dim_x, d.dim_y, direct, per_class, d.total
    );
    if let Some(model) = &case.model {
        let fixed = model.x_basis().len();
        ok &= fixed == d.dim_x;
        detail.push_str(&format!(", fixed space of the model {fixed}"));
    }
    Record::new(format!("splitting {}", case.label), anchor, ok, detail)
}

/// Random epipelagic-compatible configurations for the splitting check.
pub fn random_split_cases(samples: u64, seed: u64) -> Vec<SplitCase> {
    let mut rng = rng_from_seed(seed ^ 0x5b11);
    let mut out = Vec::new();
    let mut tries = 0u64;
    while (out.len() as u64) < samples && tries < 100 * samples {
        tries += 1;
        let m = rng.random_range(1..=4i64);
        let a = random_graded_point(&mut rng, Sign::Minus, m);
        let b = random_graded_point(&mut rng, Sign::Plus, m);
        if epipelagic_dichotomy(&jumps(&a), &jumps(&b), m as u32) != Dichotomy::Violation {
            out.push(SplitCase {
                label: format!("random #{}", out.len()),
                pt: a,
                ptp: b,
                m: m as u32,
                model: None,
            });
        }
    }
    out
}

/// One record per theorem check of each stable instance of `model`.
pub fn correspondence_records(
    label: &str,
    model: &TildeModel,
    count: usize,
    budget: u64,
) -> Vec<Record> {
    let anchor_of = |check: &str| -> &'static str {
        match check {
            "preconditions" => "lambda, lambda' stable of degree -1",
            "stabilizers_prime_to_p" => "stabilizer orders prime to p",
            "fiber_equals_orbit" => "fiber of the moment maps is one S-orbit",
            "free_action" => "S acts freely on the fiber",
            "stabilizer_of_w_equals_sbar" => "case E: Stab(w) = S-bar",
            "orbit_stabilizer_count" => "case E: |fiber| = [S : S-bar]",
            "alpha_well_defined" => "alpha: S' -> S well defined",
            "alpha_homomorphism" => "alpha is a homomorphism",
            "stabilizer_is_graph" => "Stab(w) is the graph of alpha",
            "multiplicities_zero_one" => "permutation character multiplicities in {0,1}",
            "burnside_totals" => "multiplicities sum to fiber size, trivial pair once",
            "support_is_lift_graph" => "support is {(chi, chi* o alpha)}",
            "lift_count_is_index" => "case E: occurring characters number [S : S-bar]",
            _ => "correspondence",
        }
    };
    let instances = match model.stable_instances(count, budget) {
        Ok(i) => i,
        Err(e) => {
            return vec![Record::new(
                format!("{label} search"),
                "stable search",
                false,
                e.to_string(),
            )]
        }
    };
    let mut out = vec![Record::new(
        format!("{label} stable instances"),
        "stable vectors exist in degree -1",
        instances.len() >= count,
        format!("{} of {count} found", instances.len()),
    )];
    for (i, inst) in instances.iter().enumerate() {
        match verify_theorem(inst, budget) {
            Ok(rep) => {
                let work = rep.fiber_size as u64;
                for c in &rep.checks {
                    out.push(
                        Record::new(
                            format!("{label} #{i} {}", c.name),
                            anchor_of(&c.name),
                            c.passed,
                            c.detail.clone(),
                        )
                        .with_witness(format!(
                            "lambda = {}, lambda' = {}",
                            rep.lambda, rep.lambda_p
                        ))
                        .with_work(work),
                    );
                }
                out.push(Record::info(
                    format!("{label} #{i} summary"),
                    "instance data",
                    format!(
                        "picture {:?}, case E {}, |S| = {} {:?}, |S'| = {}, |S-bar| = {}, fiber {}, occurring {}",
                        rep.picture, rep.case_e, rep.s_order, rep.s_invariants, rep.sp_order,
                        rep.sbar_order, rep.fiber_size, rep.occurring
                    ),
                ));
            }
            Err(e) => out.push(Record::new(
                format!("{label} #{i}"),
                "correspondence",
                false,
                e.to_string(),
            )),
        }
    }
    out
}

/// Exhaustive field axioms on a few small fields.
pub fn field_checks() -> Vec<Record> {
    let fields = [
        prime_field(3),
        prime_field(5),
        unitary_field(3),
        make_field(5, 2, Involution::Identity).unwrap(),
    ];
    fields
        .iter()
        .map(|f| {
            let els: Vec<Fe> = f.elements().collect();
            let mut ok = true;
            let mut count = 0u64;
            for &a in &els {
                ok &= f.conj(f.conj(a)) == a && f.add(a, f.neg(a)) == Fe::ZERO;
                if !a.is_zero() {
                    ok &= f.mul(a, f.inv(a)) == Fe::ONE;
                }
                for &b in &els {
                    count += 1;
                    ok &= f.add(a, b) == f.add(b, a) && f.mul(a, b) == f.mul(b, a);
                    ok &= f.conj(f.mul(a, b)) == f.mul(f.conj(a), f.conj(b));
                    ok &= f.conj(f.add(a, b)) == f.add(f.conj(a), f.conj(b));
                }
            }
            Record::new(
                format!("field axioms F{} ({:?})", f.order(), f.involution()),
                "finite field with involution",
                ok,
                format!("{count} pairs"),
            )
            .with_work(count)
        })
        .collect()
}

/// The classification table, one record per pair plus an overall match.
pub fn classify_records(
    max_rank: usize,
    field: &Arc<Field>,
    budget: Option<u64>,
    seed: u64,
) -> (Vec<Record>, serde_json::Value) {
    let anchor = "admissible pairs: (D_n,C_n), (C_n,D_n+1), (C_n,B_n), (A_n,A_n), (A_n,A_n+1)";
    let table = match classification_table(
        max_rank,
        field,
        budget.unwrap_or(DEFAULT_CLASSIFY_BUDGET),
        seed,
    ) {
        Ok(t) => t,
        Err(e) => {
            return (
                vec![Record::new("classification", anchor, false, e.to_string())],
                serde_json::Value::Null,
            )
        }
    };
    let mut out = Vec::new();
    for row in &table.rows {
        let detail = match &row.verdict {
            Verdict::Yes { field, source, .. } => format!(
                "yes over {field} via {source:?} witness, {}",
                match row.certified {
                    Some(true) => "certified",
                    Some(false) => "certification failed",
                    None => "not certified",
                }
            ),
            Verdict::No {
                obstruction,
                exhaustive_count,
            } => format!(
                "no: kernel {} forced on {} exceeds {}; exhaustive count {}",
                obstruction.forced_kernel,
                obstruction.side,
                obstruction.max_rs_kernel,
                exhaustive_count.map_or("skipped (budget)".into(), |c| c.to_string())
            ),
            Verdict::NoOverField {
                field,
                exhaustive_count,
            } => {
                format!("none over {field} after {exhaustive_count} elements")
            }
            Verdict::Inconclusive { needed, budget } => {
                format!("inconclusive: needs {needed}, budget {budget}")
            }
        };
        let work = match &row.verdict {
            Verdict::No {
                exhaustive_count: Some(c),
                ..
            }
            | Verdict::NoOverField {
                exhaustive_count: c,
                ..
            } => *c,
            _ => 0,
        };
        let mut r = Record::new(
            format!("classify {} {}", row.pair, row.cartan),
            anchor,
            row.matches,
            format!(
                "expected {}, {detail}",
                if row.expected { "yes" } else { "no" }
            ),
        )
        .with_work(work);
        if let Verdict::Yes { witness_text, .. } = &row.verdict {
            r = r.with_witness(witness_text.clone());
        }
        out.push(r);
    }
    out.push(Record::new(
        format!("classification up to rank {max_rank} over {}", table.field),
        anchor,
        table.matches(),
        format!(
            "yes set {:?}; every excluded pair exhausted: {}",
            table.yes_set(),
            table.exhaustive_nos()
        ),
    ));
    let data = serde_json::to_value(&table).unwrap_or(serde_json::Value::Null);
    (out, data)
}

pub fn default_budget(budget: Option<u64>) -> u64 {
    budget.unwrap_or(DEFAULT_BUDGET)
}
