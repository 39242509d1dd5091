//! Rank classification of dual pairs admitting `w` with `M(w)` and `M′(w)`
//! both regular semisimple.
//!
//! Each pair type is settled by, in order: the diagonal witness family over
//! the field and over its quadratic extension, seeded random sampling, and an
//! exhaustive search over the field modulo scaling. A failed search becomes a
//! type-level `no` only when the kernel of one moment image is forced to be
//! larger than any regular semisimple element allows.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::Mat;
use crate::moment::{LieType, MomentSetting};
use crate::numeric::{make_field, Fe, Field, Involution, NumericError};
use crate::sample::{random_mat, rng_from_seed};
use crate::spaces::{witt_basis, DivisionKind, Sign, SpaceError};

/// Default number of elements an exhaustive search may visit.
pub const DEFAULT_CLASSIFY_BUDGET: u64 = 400_000_000;

const RANDOM_SAMPLES: u64 = 2_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("{0} and {1} do not form a dual pair")]
    NotAPair(String, String),
    #[error("rank-0 member in {0}")]
    RankZero(String),
    #[error("witness family needs rank {n} <= {np}")]
    RankOrder { n: usize, np: usize },
    #[error("expected {expected} witness parameters, got {got}")]
    ParamCount { expected: usize, got: usize },
    #[error("rank {0} exceeds the supported bound 3")]
    RankTooLarge(usize),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    GlGl,
    SpO,
    OSp,
}

/// An ordered pair of groups `(G, G′)` acting on `W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PairType {
    pub first: LieType,
    pub second: LieType,
}

impl PairType {
    pub fn new(first: LieType, second: LieType) -> Result<Self, ClassifyError> {
        let ok = matches!(
            (first, second),
            (LieType::Gl(_), LieType::Gl(_))
                | (LieType::Sp(_), LieType::O(_))
                | (LieType::O(_), LieType::Sp(_))
        ) && !matches!(first, LieType::Sp(n) if n % 2 == 1)
            && !matches!(second, LieType::Sp(n) if n % 2 == 1);
        if !ok {
            return Err(ClassifyError::NotAPair(first.name(), second.name()));
        }
        let pair = PairType { first, second };
        if first.rank() == 0 || second.rank() == 0 {
            return Err(ClassifyError::RankZero(pair.name()));
        }
        Ok(pair)
    }

    pub fn kind(&self) -> PairKind {
        match self.first {
            LieType::Gl(_) => PairKind::GlGl,
            LieType::Sp(_) => PairKind::SpO,
            _ => PairKind::OSp,
        }
    }

    pub fn ranks(&self) -> (usize, usize) {
        (self.first.rank(), self.second.rank())
    }

    pub fn dims(&self) -> (usize, usize) {
        (vector_dim(self.first), vector_dim(self.second))
    }

    pub fn name(&self) -> String {
        format!("{}-{}", self.first.name(), self.second.name())
    }

    /// Cartan labels, e.g. `(C1, B1)`.
    pub fn cartan(&self) -> String {
        format!(
            "({}, {})",
            cartan_label(self.first),
            cartan_label(self.second)
        )
    }

    /// The moment setting over `field` (which must carry the identity
    /// involution), with split forms in Witt bases.
    pub fn setting(&self, field: &Arc<Field>) -> Result<MomentSetting, ClassifyError> {
        match (self.first, self.second) {
            (LieType::Gl(n), LieType::Gl(np)) => Ok(MomentSetting::gl(field, n, np)),
            (a, b) => {
                let v = split_space(field, a)?;
                let vp = split_space(field, b)?;
                Ok(MomentSetting::formed(v, vp).expect("opposite signs by construction"))
            }
        }
    }
}

fn vector_dim(t: LieType) -> usize {
    match t {
        LieType::Gl(n) | LieType::Sp(n) | LieType::O(n) | LieType::U(n) => n,
    }
}

fn cartan_label(t: LieType) -> String {
    match t {
        LieType::Gl(n) | LieType::U(n) => format!("A{}", n - 1),
        LieType::Sp(n) => format!("C{}", n / 2),
        LieType::O(n) if n % 2 == 1 => format!("B{}", n / 2),
        LieType::O(n) => format!("D{}", n / 2),
    }
}

fn split_space(
    field: &Arc<Field>,
    t: LieType,
) -> Result<crate::spaces::EpsHermSpace, ClassifyError> {
    let (dim, eps) = match t {
        LieType::Sp(n) => (n, Sign::Minus),
        LieType::O(n) => (n, Sign::Plus),
        _ => unreachable!("formed members are Sp or O"),
    };
    let aniso: Vec<Fe> = if dim % 2 == 1 { vec![Fe::ONE] } else { vec![] };
    Ok(witt_basis(
        field,
        DivisionKind::Split,
        dim,
        eps,
        dim / 2,
        &aniso,
    )?)
}

/// Largest kernel dimension of a regular semisimple element.
pub fn max_rs_kernel(t: LieType) -> usize {
    match t {
        LieType::Gl(_) | LieType::U(_) => 1,
        LieType::Sp(_) => 0,
        LieType::O(n) if n % 2 == 1 => 1,
        LieType::O(_) => 2,
    }
}

/// A kernel forced on one moment image by `rank M ≤ min(dim V, dim V′)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub side: String,
    pub forced_kernel: usize,
    pub max_rs_kernel: usize,
}

pub fn rank_obstruction(pair: &PairType) -> Option<Obstruction> {
    let (d, dp) = pair.dims();
    let check = |side: &str, t: LieType, forced: usize| {
        let max = max_rs_kernel(t);
        (forced > max).then(|| Obstruction {
            side: format!("{side} ({})", t.name()),
            forced_kernel: forced,
            max_rs_kernel: max,
        })
    };
    check("second", pair.second, dp.saturating_sub(d))
        .or_else(|| check("first", pair.first, d.saturating_sub(dp)))
}

/// Element of the diagonal family. Formed pairs send the `i`-th positive
/// Witt vector of `V` to `a_i` times that of `V′` and the `i`-th negative one
/// to `-b_i` times its counterpart; anisotropic vectors are ignored. The
/// general linear pair uses `x = (a 0)`, `y = (b 0)`.
pub fn witness(
    pair: &PairType,
    field: &Arc<Field>,
    a: &[Fe],
    b: &[Fe],
) -> Result<Mat, ClassifyError> {
    let (n, np) = pair.ranks();
    if n > np {
        return Err(ClassifyError::RankOrder { n, np });
    }
    for got in [a.len(), b.len()] {
        if got != n {
            return Err(ClassifyError::ParamCount { expected: n, got });
        }
    }
    let f = &**field;
    let setting = pair.setting(field)?;
    let (rows, cols) = setting.w_shape();
    let mut w = Mat::zeros(rows, cols);
    match setting {
        MomentSetting::Gl { .. } => {
            for i in 0..n {
                w[(i, i)] = a[i];
                w[(n + i, i)] = b[i];
            }
        }
        MomentSetting::Formed { ref v, ref vp } => {
            let (d, dp) = (v.dim(), vp.dim());
            let (r, rp) = (v.witt_index(), vp.witt_index());
            for i in 0..n {
                w[(i, i)] = a[i];
                w[(dp - rp + i, d - r + i)] = f.neg(b[i]);
            }
        }
    }
    Ok(w)
}

/// The parameters `(a, b)` if `w` lies in the diagonal family.
pub fn family_parameters(
    pair: &PairType,
    field: &Arc<Field>,
    w: &Mat,
) -> Option<(Vec<Fe>, Vec<Fe>)> {
    let f = &**field;
    let setting = pair.setting(field).ok()?;
    let (n, _) = pair.ranks();
    let mut support = Vec::new();
    let (a, b): (Vec<Fe>, Vec<Fe>) = match setting {
        MomentSetting::Gl { .. } => (0..n)
            .map(|i| {
                support.push((i, i));
                support.push((n + i, i));
                (w[(i, i)], w[(n + i, i)])
            })
            .unzip(),
        MomentSetting::Formed { ref v, ref vp } => {
            let (d, dp) = (v.dim(), vp.dim());
            let (r, rp) = (v.witt_index(), vp.witt_index());
            (0..n)
                .map(|i| {
                    let minus = (dp - rp + i, d - r + i);
                    support.push((i, i));
                    support.push(minus);
                    (w[(i, i)], f.neg(w[minus]))
                })
                .unzip()
        }
    };
    let outside_zero = (0..w.rows())
        .all(|i| (0..w.cols()).all(|j| support.contains(&(i, j)) || w[(i, j)].is_zero()));
    outside_zero.then_some((a, b))
}

/// A diagonal torus element of the group of type `t` with entries `s`
/// (one per rank), in Witt-basis order.
pub fn torus_element(field: &Field, t: LieType, s: &[Fe]) -> Mat {
    match t {
        LieType::Gl(_) | LieType::U(_) => Mat::diag(s),
        LieType::Sp(n) | LieType::O(n) => {
            let r = n / 2;
            let mut d = vec![Fe::ONE; n];
            for i in 0..r {
                d[i] = s[i];
                d[n - r + i] = field.inv(s[i]);
            }
            Mat::diag(&d)
        }
    }
}

/// Checks that both moment images of a family element are diagonal and
/// share their nonzero eigenvalues, with zero counts differing by
/// `dim V - dim V′`.
pub fn upsilon_check(pair: &PairType, field: &Arc<Field>, w: &Mat) -> bool {
    let Ok(setting) = pair.setting(field) else {
        return false;
    };
    let m = setting.moment(w);
    let mp = setting.moment_p(w);
    let diagonal = |x: &Mat| -> Option<Vec<Fe>> {
        let n = x.rows();
        let off = (0..n).any(|i| (0..n).any(|j| i != j && !x[(i, j)].is_zero()));
        (!off).then(|| (0..n).map(|i| x[(i, i)]).collect())
    };
    let (Some(e), Some(ep)) = (diagonal(&m), diagonal(&mp)) else {
        return false;
    };
    let split = |v: Vec<Fe>| {
        let zeros = v.iter().filter(|x| x.is_zero()).count();
        let mut nz: Vec<u16> = v
            .into_iter()
            .filter(|x| !x.is_zero())
            .map(Fe::code)
            .collect();
        nz.sort_unstable();
        (nz, zeros as i64)
    };
    let (nz, z) = split(e);
    let (nzp, zp) = split(ep);
    let (d, dp) = setting.dims();
    nz == nzp && z - zp == d as i64 - dp as i64
}

/// Whether both moment images of `w` are regular semisimple, judged by the
/// adjoint invariant `P`.
pub fn both_regular_semisimple(setting: &MomentSetting, w: &Mat) -> bool {
    setting
        .lie_algebra()
        .is_regular_semisimple(&setting.moment(w))
        && setting
            .lie_algebra_p()
            .is_regular_semisimple(&setting.moment_p(w))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    Family,
    Random,
    Exhaustive,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Yes {
        field: String,
        source: WitnessSource,
        #[serde(skip)]
        witness: Mat,
        witness_text: String,
        #[serde(skip)]
        witness_field: Arc<Field>,
    },
    /// Ruled out for every field by a forced kernel.
    No {
        obstruction: Obstruction,
        /// Elements visited by the exhaustive search over the base field,
        /// or `None` if it exceeded the budget.
        exhaustive_count: Option<u64>,
    },
    NoOverField {
        field: String,
        exhaustive_count: u64,
    },
    Inconclusive {
        needed: u64,
        budget: u64,
    },
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Yes { .. } => "yes",
            Verdict::No { .. } => "no",
            Verdict::NoOverField { .. } => "no-over-this-field",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

fn field_label(f: &Field) -> String {
    format!("F{}", f.order())
}

fn nonzero_tuples(field: &Field, n: usize) -> impl Iterator<Item = Vec<Fe>> + '_ {
    let q1 = field.order() as u64 - 1;
    (0..q1.pow(n as u32)).map(move |mut idx| {
        (0..n)
            .map(|_| {
                let c = Fe::from_code((idx % q1) as u16 + 1);
                idx /= q1;
                c
            })
            .collect()
    })
}

fn family_search(pair: &PairType, field: &Arc<Field>) -> Option<Mat> {
    let (n, np) = pair.ranks();
    if n > np {
        return None;
    }
    let setting = pair.setting(field).ok()?;
    let ones = vec![Fe::ONE; n];
    nonzero_tuples(field, n)
        .map(|a| witness(pair, field, &a, &ones).expect("validated shape"))
        .find(|w| both_regular_semisimple(&setting, w))
}

/// The same pair with the roles of `V` and `V′` exchanged.
fn mirrored(pair: &PairType) -> Option<PairType> {
    match pair.kind() {
        PairKind::GlGl => None,
        _ => Some(PairType {
            first: pair.second,
            second: pair.first,
        }),
    }
}

/// A family witness, taken in the mirrored pair and transported by `⋆` when
/// the first member has the larger rank.
fn oriented_family_search(pair: &PairType, field: &Arc<Field>) -> Option<Mat> {
    let (n, np) = pair.ranks();
    if n <= np {
        return family_search(pair, field);
    }
    match mirrored(pair) {
        Some(m) => {
            let u = family_search(&m, field)?;
            Some(m.setting(field).ok()?.star(&u))
        }
        None => {
            // gl: swap the roles of the two blocks via transposes.
            let m = PairType {
                first: pair.second,
                second: pair.first,
            };
            let u = family_search(&m, field)?;
            let (np_, n_) = (vector_dim(m.first), vector_dim(m.second));
            let x = Mat::from_fn(n_, np_, |i, j| u[(j, i)]);
            let y = Mat::from_fn(n_, np_, |i, j| u[(np_ + j, i)]);
            Some(MomentSetting::gl_elem(&x, &y))
        }
    }
}

fn random_search(pair: &PairType, field: &Arc<Field>, seed: u64, samples: u64) -> Option<Mat> {
    let setting = pair.setting(field).ok()?;
    let (r, c) = setting.w_shape();
    let mut rng = rng_from_seed(seed);
    (0..samples)
        .map(|_| random_mat(field, r, c, &mut rng))
        .find(|w| both_regular_semisimple(&setting, w))
}

/// Number of elements visited by [`exhaustive_search`]: zero plus one
/// representative of each line.
pub fn exhaustive_size(q: u64, len: usize) -> Option<u64> {
    q.checked_pow(len as u32).map(|t| (t - 1) / (q - 1) + 1)
}

/// Residue arithmetic for a prime field, used for the fast rank prefilter.
struct Residues {
    p: u32,
    fe: Vec<Fe>,
}

impl Residues {
    fn new(field: &Field) -> Self {
        let p = field.characteristic();
        Residues {
            p,
            fe: (0..p).map(|i| field.from_i64(i as i64)).collect(),
        }
    }

    fn mat(&self, m: &Mat) -> Vec<u32> {
        m.data()
            .iter()
            .map(|&x| self.fe.iter().position(|&y| y == x).unwrap() as u32)
            .collect()
    }
}

fn mul_res(p: u32, a: &[u32], b: &[u32], n: usize, k: usize, m: usize, out: &mut [u32]) {
    for i in 0..n {
        for j in 0..m {
            let mut s = 0u32;
            for l in 0..k {
                s += a[i * k + l] * b[l * m + j];
            }
            out[i * m + j] = s % p;
        }
    }
}

fn rank_res(p: u32, a: &mut [u32], rows: usize, cols: usize) -> usize {
    let inv = |x: u32| {
        let mut r = 1u64;
        let (mut b, mut e) = (x as u64, p as u64 - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
            continue;
        };
        for j in 0..cols {
            a.swap(rank * cols + j, piv * cols + j);
        }
        let s = inv(a[rank * cols + c]);
        for j in 0..cols {
            a[rank * cols + j] = a[rank * cols + j] * s % p;
        }
        for r in 0..rows {
            let t = a[r * cols + c];
            if r != rank && t != 0 {
                for j in 0..cols {
                    a[r * cols + j] = (a[r * cols + j] + (p - t) * a[rank * cols + j]) % p;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Kernel bounds on both moment images, evaluated in residues.
struct Prefilter {
    p: u32,
    w_rows: usize,
    w_cols: usize,
    /// For formed pairs, `w⋆ = left · wᵀ · right`.
    star: Option<(Vec<u32>, Vec<u32>)>,
    d: usize,
    dp: usize,
    max_k: usize,
    max_kp: usize,
}

impl Prefilter {
    fn new(pair: &PairType, setting: &MomentSetting, field: &Field) -> Self {
        let res = Residues::new(field);
        let (w_rows, w_cols) = setting.w_shape();
        let (d, dp) = setting.dims();
        let star = match setting {
            MomentSetting::Formed { v, vp } => Some((res.mat(v.gram_inv()), res.mat(vp.gram()))),
            MomentSetting::Gl { .. } => None,
        };
        Prefilter {
            p: res.p,
            w_rows,
            w_cols,
            star,
            d,
            dp,
            max_k: max_rs_kernel(pair.first),
            max_kp: max_rs_kernel(pair.second),
        }
    }

    fn passes(&self, w: &[u32], scratch: &mut Scratch) -> bool {
        let p = self.p;
        let (d, dp) = (self.d, self.dp);
        let (m, mp) = (&mut scratch.m, &mut scratch.mp);
        match &self.star {
            Some((left, right)) => {
                let (r, c) = (self.w_rows, self.w_cols);
                let wt = &mut scratch.wt;
                for i in 0..r {
                    for j in 0..c {
                        wt[j * r + i] = w[i * c + j];
                    }
                }
                let t = &mut scratch.t;
                mul_res(p, left, wt, c, c, r, t);
                let st = &mut scratch.st;
                mul_res(p, t, right, c, r, r, st);
                mul_res(p, st, w, c, r, c, m);
                mul_res(p, w, st, r, c, r, mp);
            }
            None => {
                let n = d;
                let (x, y) = w.split_at(n * dp);
                for i in 0..n {
                    for j in 0..n {
                        m[i * n + j] =
                            (0..dp).map(|l| x[i * dp + l] * y[j * dp + l]).sum::<u32>() % p;
                    }
                }
                for i in 0..dp {
                    for j in 0..dp {
                        mp[i * dp + j] =
                            (0..n).map(|l| y[l * dp + i] * x[l * dp + j]).sum::<u32>() % p;
                    }
                }
            }
        }
        d - rank_res(p, &mut m[..d * d], d, d) <= self.max_k
            && dp - rank_res(p, &mut mp[..dp * dp], dp, dp) <= self.max_kp
    }
}

struct Scratch {
    wt: Vec<u32>,
    t: Vec<u32>,
    st: Vec<u32>,
    m: Vec<u32>,
    mp: Vec<u32>,
}

impl Scratch {
    fn new(len: usize, d: usize, dp: usize) -> Self {
        let big = (d.max(dp) + len).pow(2);
        Scratch {
            wt: vec![0; len],
            t: vec![0; big],
            st: vec![0; big],
            m: vec![0; big],
            mp: vec![0; big],
        }
    }
}

/// Searches all of `W` over a prime field up to scaling, returning the first
/// witness in enumeration order. Elements whose first nonzero entry is not
/// `1` are skipped, since scaling `w` scales both moment images by a square.
pub fn exhaustive_search(
    pair: &PairType,
    field: &Arc<Field>,
) -> Result<Option<Mat>, ClassifyError> {
    let f = &**field;
    let setting = pair.setting(field)?;
    let (rows, cols) = setting.w_shape();
    let len = rows * cols;
    let zero = Mat::zeros(rows, cols);
    if both_regular_semisimple(&setting, &zero) {
        return Ok(Some(zero));
    }
    let res = Residues::new(f);
    let p = res.p;
    let filter = Prefilter::new(pair, &setting, f);
    let (d, dp) = setting.dims();
    // Line representatives: position of the leading 1, then free entries.
    let found = (0..len).into_par_iter().find_first(|&lead| {
        let free = len - lead - 1;
        let mut w = vec![0u32; len];
        w[lead] = 1;
        let mut scratch = Scratch::new(len, d, dp);
        loop {
            if filter.passes(&w, &mut scratch) {
                let m = Mat::from_vec(rows, cols, w.iter().map(|&x| res.fe[x as usize]).collect());
                if both_regular_semisimple(&setting, &m) {
                    return true;
                }
            }
            // Odometer over the trailing `free` entries.
            let mut k = len;
            loop {
                if k == len - free {
                    return false;
                }
                k -= 1;
                w[k] += 1;
                if w[k] < p {
                    break;
                }
                w[k] = 0;
            }
        }
    });
    let Some(lead) = found else {
        return Ok(None);
    };
    // Replay the winning branch sequentially to recover the element.
    let mut w = vec![0u32; len];
    w[lead] = 1;
    let mut scratch = Scratch::new(len, d, dp);
    loop {
        if filter.passes(&w, &mut scratch) {
            let m = Mat::from_vec(rows, cols, w.iter().map(|&x| res.fe[x as usize]).collect());
            if both_regular_semisimple(&setting, &m) {
                return Ok(Some(m));
            }
        }
        let mut k = len;
        loop {
            k -= 1;
            w[k] += 1;
            if w[k] < p {
                break;
            }
            w[k] = 0;
        }
    }
}

/// Decides whether some `w` has `M(w)` and `M′(w)` both regular semisimple.
pub fn rs_pair_exists(
    pair: &PairType,
    field: &Arc<Field>,
    budget: u64,
    seed: u64,
) -> Result<Verdict, ClassifyError> {
    let f = &**field;
    let yes = |w: Mat, wf: &Arc<Field>, source| Verdict::Yes {
        field: field_label(wf),
        source,
        witness_text: w.format(wf),
        witness: w,
        witness_field: Arc::clone(wf),
    };
    if let Some(w) = oriented_family_search(pair, field) {
        return Ok(yes(w, field, WitnessSource::Family));
    }
    if f.degree() == 1 {
        let ext = make_field(f.characteristic(), 2, Involution::Identity)?;
        if let Some(w) = oriented_family_search(pair, &ext) {
            return Ok(yes(w, &ext, WitnessSource::Family));
        }
    }
    if let Some(w) = random_search(pair, field, seed, RANDOM_SAMPLES.min(budget)) {
        return Ok(yes(w, field, WitnessSource::Random));
    }
    let (rows, cols) = pair.setting(field)?.w_shape();
    let needed = exhaustive_size(f.order() as u64, rows * cols).unwrap_or(u64::MAX);
    let obstruction = rank_obstruction(pair);
    if needed > budget || f.degree() != 1 {
        return Ok(match obstruction {
            Some(obstruction) => Verdict::No {
                obstruction,
                exhaustive_count: None,
            },
            None => Verdict::Inconclusive { needed, budget },
        });
    }
    if let Some(w) = exhaustive_search(pair, field)? {
        return Ok(yes(w, field, WitnessSource::Exhaustive));
    }
    Ok(match obstruction {
        Some(obstruction) => Verdict::No {
            obstruction,
            exhaustive_count: Some(needed),
        },
        None => Verdict::NoOverField {
            field: field_label(f),
            exhaustive_count: needed,
        },
    })
}

/// Membership in the list of admissible pairs, up to order:
/// `(D_n, C_n)`, `(C_n, D_{n+1})`, `(C_n, B_n)`, `(A_n, A_n)`, `(A_n, A_{n+1})`.
pub fn in_admissible_list(pair: &PairType) -> bool {
    let (a, b) = (pair.first, pair.second);
    let unordered = |x: LieType, y: LieType| match (x, y) {
        (LieType::Gl(n), LieType::Gl(np)) => np == n || np == n + 1,
        (LieType::O(o), LieType::Sp(s)) if o % 2 == 0 => o == s || o == s + 2,
        (LieType::O(o), LieType::Sp(s)) => o == s + 1,
        _ => false,
    };
    unordered(a, b) || unordered(b, a)
}

/// Every pair type with both ranks in `1..=max_rank`, each unordered pair
/// listed once with the smaller rank first (ties: even orthogonal before
/// symplectic before odd orthogonal).
pub fn pair_types(max_rank: usize) -> Vec<PairType> {
    let mut out = Vec::new();
    for n in 1..=max_rank {
        for np in n..=max_rank {
            out.push(PairType {
                first: LieType::Gl(n),
                second: LieType::Gl(np),
            });
        }
    }
    let orth = (2..=2 * max_rank + 1).map(LieType::O);
    let symp = (1..=max_rank).map(|n| LieType::Sp(2 * n));
    let key = |t: LieType| {
        let tie = match t {
            LieType::O(n) if n % 2 == 0 => 0,
            LieType::Sp(_) => 1,
            _ => 2,
        };
        (t.rank(), tie)
    };
    for o in orth {
        for s in symp.clone() {
            let (first, second) = if key(o) <= key(s) { (o, s) } else { (s, o) };
            out.push(PairType { first, second });
        }
    }
    out.sort_by_key(|p| (p.first.rank().max(p.second.rank()), p.kind(), *p));
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationRow {
    pub pair: String,
    pub cartan: String,
    pub ranks: (usize, usize),
    pub expected: bool,
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Independent recheck of a `yes` witness: `P` nonzero on both sides and
    /// the eigenvalue comparison for family witnesses.
    pub certified: Option<bool>,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationTable {
    pub field: String,
    pub max_rank: usize,
    pub rows: Vec<ClassificationRow>,
}

impl ClassificationTable {
    pub fn matches(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }

    pub fn yes_set(&self) -> Vec<String> {
        self.rows
            .iter()
            .filter(|r| r.verdict.is_yes())
            .map(|r| r.pair.clone())
            .collect()
    }

    /// Whether every excluded pair was ruled out by a completed exhaustive
    /// search.
    pub fn exhaustive_nos(&self) -> bool {
        self.rows.iter().filter(|r| !r.expected).all(|r| {
            matches!(
                r.verdict,
                Verdict::No {
                    exhaustive_count: Some(_),
                    ..
                }
            )
        })
    }
}

fn certify(pair: &PairType, verdict: &Verdict) -> Option<bool> {
    let Verdict::Yes {
        witness,
        witness_field,
        source,
        ..
    } = verdict
    else {
        return None;
    };
    let setting = pair.setting(witness_field).ok()?;
    let p = setting.lie_algebra().invariant_p(&setting.moment(witness));
    let pp = setting
        .lie_algebra_p()
        .invariant_p(&setting.moment_p(witness));
    let mut ok = !p.is_zero() && !pp.is_zero();
    if *source == WitnessSource::Family {
        let (n, np) = pair.ranks();
        if n <= np {
            ok &= family_parameters(pair, witness_field, witness).is_some();
            ok &= upsilon_check(pair, witness_field, witness);
        }
    }
    Some(ok)
}

/// Classifies every pair type up to `max_rank` and compares the `yes` set
/// with the admissible list.
pub fn classification_table(
    max_rank: usize,
    field: &Arc<Field>,
    budget: u64,
    seed: u64,
) -> Result<ClassificationTable, ClassifyError> {
    if max_rank > 3 {
        return Err(ClassifyError::RankTooLarge(max_rank));
    }
    let mut rows = Vec::new();
    for pair in pair_types(max_rank) {
        let verdict = rs_pair_exists(&pair, field, budget, seed)?;
        let certified = certify(&pair, &verdict);
        let expected = in_admissible_list(&pair);
        let matches = verdict.is_yes() == expected
            && certified != Some(false)
            && !matches!(verdict, Verdict::Inconclusive { .. });
        rows.push(ClassificationRow {
            pair: pair.name(),
            cartan: pair.cartan(),
            ranks: pair.ranks(),
            expected,
            verdict,
            certified,
            matches,
        });
    }
    Ok(ClassificationTable {
        field: field_label(field),
        max_rank,
        rows,
    })
}

/// Count of pairs per verdict label.
pub fn verdict_counts(table: &ClassificationTable) -> BTreeMap<&'static str, usize> {
    let mut out = BTreeMap::new();
    for r in &table.rows {
        *out.entry(r.verdict.label()).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Arc<Field> {
        make_field(5, 1, Involution::Identity).unwrap()
    }

    fn pair(a: LieType, b: LieType) -> PairType {
        PairType::new(a, b).unwrap()
    }

    #[test]
    fn gl_witness_moments() {
        let f = f5();
        let p = pair(LieType::Gl(2), LieType::Gl(2));
        let w = witness(&p, &f, &[f.from_i64(1), f.from_i64(2)], &[Fe::ONE, Fe::ONE]).unwrap();
        let s = p.setting(&f).unwrap();
        let d = Mat::diag(&[f.from_i64(1), f.from_i64(2)]);
        assert_eq!(s.moment(&w), d);
        assert_eq!(s.moment_p(&w), d);
    }

    #[test]
    fn sp_o_witness_moments() {
        let f = f5();
        let p = pair(LieType::Sp(2), LieType::O(3));
        let w = witness(&p, &f, &[Fe::ONE], &[Fe::ONE]).unwrap();
        let s = p.setting(&f).unwrap();
        let one = Fe::ONE;
        let m1 = f.neg(one);
        assert_eq!(s.moment_p(&w), Mat::diag(&[one, Fe::ZERO, m1]));
        assert_eq!(s.moment(&w), Mat::diag(&[one, m1]));
        assert!(upsilon_check(&p, &f, &w));
    }

    #[test]
    fn zero_parameters_give_zero_moment() {
        let f = f5();
        let p = pair(LieType::Gl(2), LieType::Gl(3));
        let w = witness(&p, &f, &[Fe::ZERO; 2], &[Fe::ONE; 2]).unwrap();
        assert!(p.setting(&f).unwrap().moment(&w).is_zero());
        assert!(upsilon_check(&p, &f, &w));
    }

    #[test]
    fn witness_rejects_larger_first_rank() {
        let f = f5();
        let p = pair(LieType::Sp(4), LieType::O(3));
        assert_eq!(
            witness(&p, &f, &[Fe::ONE; 2], &[Fe::ONE; 2]),
            Err(ClassifyError::RankOrder { n: 2, np: 1 })
        );
    }

    #[test]
    fn rejects_non_pairs() {
        assert!(PairType::new(LieType::Sp(2), LieType::Sp(2)).is_err());
        assert!(PairType::new(LieType::O(1), LieType::Sp(2)).is_err());
    }

    #[test]
    fn small_verdicts() {
        let f = f5();
        let v = rs_pair_exists(&pair(LieType::O(2), LieType::Sp(2)), &f, 1_000_000, 1).unwrap();
        assert!(v.is_yes());
        let v = rs_pair_exists(&pair(LieType::Gl(1), LieType::Gl(3)), &f, 1_000_000, 1).unwrap();
        assert!(
            matches!(
                v,
                Verdict::No {
                    exhaustive_count: Some(_),
                    ..
                }
            ),
            "{v:?}"
        );
        let v = rs_pair_exists(&pair(LieType::O(2), LieType::Sp(4)), &f, 1_000_000, 1).unwrap();
        assert!(
            matches!(
                v,
                Verdict::No {
                    exhaustive_count: Some(_),
                    ..
                }
            ),
            "{v:?}"
        );
    }

    #[test]
    fn mirrored_witness_is_valid() {
        let f = f5();
        let p = pair(LieType::O(3), LieType::Sp(2));
        let v = rs_pair_exists(&p, &f, 0, 1).unwrap();
        assert_eq!(certify(&p, &v), Some(true));
    }

    #[test]
    fn list_membership() {
        let yes = [
            (LieType::Gl(1), LieType::Gl(2)),
            (LieType::O(4), LieType::Sp(2)),
            (LieType::Sp(4), LieType::O(5)),
            (LieType::O(2), LieType::Sp(2)),
        ];
        for (a, b) in yes {
            assert!(in_admissible_list(&pair(a, b)));
            assert!(in_admissible_list(&pair(b, a)));
        }
        assert!(!in_admissible_list(&pair(LieType::Sp(2), LieType::O(5))));
        assert!(!in_admissible_list(&pair(LieType::Sp(2), LieType::O(6))));
        assert!(!in_admissible_list(&pair(LieType::Gl(1), LieType::Gl(3))));
    }

    #[test]
    fn pair_count() {
        assert_eq!(pair_types(1).len(), 1 + 2);
        assert_eq!(pair_types(2).len(), 3 + 8);
    }
}
