//! Exact scalars: rationals for valuations, small finite fields carrying an
//! optional involution, and dual numbers over those fields.
//!
//! Field elements are stored as discrete-log codes of a fixed primitive
//! element: code `0` is zero and code `i + 1` is `g^i`. Multiplication is
//! modular addition of exponents and addition goes through a precomputed
//! table, so every operation is a lookup. Code order is the canonical
//! enumeration order used everywhere else.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use num_rational::Rational64 as Rational;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericError {
    #[error("characteristic {0} is not an odd prime")]
    BadCharacteristic(u32),
    #[error("extension degree {0} is unsupported (expected 1 or 2)")]
    BadDegree(u32),
    #[error("a nontrivial involution needs an extension of even degree")]
    InvolutionOnPrimeField,
    #[error("field of order {0} exceeds the supported maximum {MAX_ORDER}")]
    TooLarge(u64),
    #[error("no element of order {m}: {m} does not divide q - 1 = {q_minus_1}")]
    NoRootOfUnity { m: u64, q_minus_1: u64 },
    #[error("malformed rational {0:?}")]
    BadRational(String),
}

/// Parses `"num/den"` or a bare integer into a reduced rational.
pub fn parse_rational(text: &str) -> Result<Rational, NumericError> {
    let bad = || NumericError::BadRational(text.to_string());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: i64 = num.parse().map_err(|_| bad())?;
    let den: i64 = den.parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Renders a rational as `"num/den"`, or as an integer when `den = 1`.
pub fn format_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `r mod period`, returned in `[0, period)`.
pub fn rational_mod(r: Rational, period: Rational) -> Rational {
    let t = (r / period).floor();
    r - t * period
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Involution {
    Identity,
    Frobenius,
}

/// A field element as a discrete-log code relative to its field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn code(self) -> u16 {
        self.0
    }

    pub fn from_code(code: u16) -> Fe {
        Fe(code)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// The finite field `F_{p^k}` with a fixed primitive element and involution.
#[derive(Clone)]
pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    involution: Involution,
    /// Monic modulus, lowest coefficient first.
    modulus: Vec<u32>,
    add: Vec<Fe>,
    neg: Vec<Fe>,
    conj: Vec<Fe>,
    ints: Vec<Fe>,
    coords: Vec<[u32; 2]>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("involution", &self.involution)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.involution == other.involution
    }
}

impl Eq for Field {}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Builds `F_{p^k}` with the given involution.
pub fn make_field(p: u32, k: u32, involution: Involution) -> Result<Arc<Field>, NumericError> {
    Field::new(p, k, involution).map(Arc::new)
}

impl Field {
    pub fn new(p: u32, k: u32, involution: Involution) -> Result<Field, NumericError> {
        if p == 2 || !is_prime(p) {
            return Err(NumericError::BadCharacteristic(p));
        }
        if k != 1 && k != 2 {
            return Err(NumericError::BadDegree(k));
        }
        if involution == Involution::Frobenius && k % 2 == 1 {
            return Err(NumericError::InvolutionOnPrimeField);
        }
        let q64 = (p as u64).pow(k);
        if q64 > MAX_ORDER as u64 {
            return Err(NumericError::TooLarge(q64));
        }
        let q = q64 as u32;
        let n = q - 1;
        let factors = prime_factors(n as u64);

        // Powers of the primitive element as polynomial coordinates.
        let (modulus, powers) = if k == 1 {
            let g = (2..p)
                .find(|&g| {
                    factors
                        .iter()
                        .all(|&f| pow_mod(g as u64, n as u64 / f, p as u64) != 1)
                })
                .unwrap_or(1);
            let mut powers = Vec::with_capacity(n as usize);
            let mut x = 1u64;
            for _ in 0..n {
                powers.push([x as u32, 0]);
                x = x * g as u64 % p as u64;
            }
            (vec![(p - g) % p, 1], powers)
        } else {
            conway_quadratic(p, n, &factors)
        };

        let mut code_of = vec![Fe::ZERO; q as usize];
        let mut coords = vec![[0u32; 2]; q as usize];
        for (i, c) in powers.iter().enumerate() {
            let idx = (c[0] + p * c[1]) as usize;
            code_of[idx] = Fe(i as u16 + 1);
            coords[i + 1] = *c;
        }
        let code = |c: [u32; 2]| code_of[(c[0] + p * c[1]) as usize];

        let mut add = vec![Fe::ZERO; (q * q) as usize];
        for a in 0..q as usize {
            for b in 0..q as usize {
                let (ca, cb) = (coords[a], coords[b]);
                add[a * q as usize + b] = code([(ca[0] + cb[0]) % p, (ca[1] + cb[1]) % p]);
            }
        }
        let neg = (0..q as usize)
            .map(|a| {
                let c = coords[a];
                code([(p - c[0]) % p, (p - c[1]) % p])
            })
            .collect();
        let conj = (0..q as usize)
            .map(|a| match involution {
                Involution::Identity => Fe(a as u16),
                Involution::Frobenius if a == 0 => Fe::ZERO,
                Involution::Frobenius => Fe((((a as u64 - 1) * p as u64) % n as u64) as u16 + 1),
            })
            .collect();
        let ints = (0..p).map(|i| code([i, 0])).collect();
        Ok(Field {
            p,
            k,
            q,
            involution,
            modulus,
            add,
            neg,
            conj,
            ints,
            coords,
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn involution(&self) -> Involution {
        self.involution
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The fixed primitive element.
    pub fn generator(&self) -> Fe {
        if self.q == 2 {
            Fe::ONE
        } else {
            Fe(2)
        }
    }

    /// All elements in canonical order: zero, then `g^0, g^1, ...`.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.q as u16).map(Fe)
    }

    /// Elements fixed by the involution, in canonical order.
    pub fn fixed_elements(&self) -> Vec<Fe> {
        self.elements().filter(|&a| self.conj(a) == a).collect()
    }

    /// Order of the involution's fixed field.
    pub fn fixed_order(&self) -> u32 {
        match self.involution {
            Involution::Identity => self.q,
            Involution::Frobenius => self.p,
        }
    }

    /// Number of fixed-field coordinates per element.
    pub fn scalar_degree(&self) -> usize {
        match self.involution {
            Involution::Identity => 1,
            Involution::Frobenius => 2,
        }
    }

    /// Coordinates over the fixed field in the basis `{1, g}`.
    pub fn scalar_coords(&self, a: Fe) -> [Fe; 2] {
        match self.involution {
            Involution::Identity => [a, Fe::ZERO],
            Involution::Frobenius => {
                let c = self.coords[a.0 as usize];
                [self.ints[c[0] as usize], self.ints[c[1] as usize]]
            }
        }
    }

    /// Inverse of [`Field::scalar_coords`].
    pub fn from_scalar_coords(&self, c: &[Fe]) -> Fe {
        match self.involution {
            Involution::Identity => c[0],
            Involution::Frobenius => self.add(c[0], self.mul(c[1], self.generator())),
        }
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        self.add[a.0 as usize * self.q as usize + b.0 as usize]
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.neg[a.0 as usize]
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let n = self.q - 1;
        Fe(((a.0 as u32 - 1 + b.0 as u32 - 1) % n) as u16 + 1)
    }

    pub fn try_inv(&self, a: Fe) -> Option<Fe> {
        if a.0 == 0 {
            return None;
        }
        let n = self.q - 1;
        Some(Fe(((n - (a.0 as u32 - 1)) % n) as u16 + 1))
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: Fe) -> Fe {
        self.try_inv(a).expect("inverse of zero")
    }

    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Fe, e: i64) -> Fe {
        if a.0 == 0 {
            return if e == 0 { Fe::ONE } else { Fe::ZERO };
        }
        let n = (self.q - 1) as i64;
        let l = ((a.0 as i64 - 1) * e).rem_euclid(n);
        Fe(l as u16 + 1)
    }

    #[inline]
    pub fn conj(&self, a: Fe) -> Fe {
        self.conj[a.0 as usize]
    }

    pub fn from_i64(&self, n: i64) -> Fe {
        self.ints[n.rem_euclid(self.p as i64) as usize]
    }

    /// Discrete log of a nonzero element.
    pub fn log(&self, a: Fe) -> Option<u32> {
        (a.0 != 0).then(|| a.0 as u32 - 1)
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: Fe) -> Option<u64> {
        let n = (self.q - 1) as u64;
        self.log(a).map(|l| n / (l as u64).gcd(&n))
    }

    pub fn is_square(&self, a: Fe) -> bool {
        a.0 == 0 || (a.0 - 1) % 2 == 0
    }

    /// A square root when one exists in this field.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        if a.0 == 0 {
            return Some(Fe::ZERO);
        }
        ((a.0 - 1) % 2 == 0).then(|| Fe((a.0 - 1) / 2 + 1))
    }

    /// Least non-square in canonical order.
    pub fn non_square(&self) -> Fe {
        self.generator()
    }

    pub fn half(&self) -> Fe {
        self.inv(self.from_i64(2))
    }

    /// Renders an element: an integer for prime fields, `c0+c1x` otherwise.
    pub fn format(&self, a: Fe) -> String {
        let c = self.coords[a.0 as usize];
        if self.k == 1 {
            c[0].to_string()
        } else {
            match (c[0], c[1]) {
                (c0, 0) => c0.to_string(),
                (0, 1) => "x".to_string(),
                (0, c1) => format!("{c1}x"),
                (c0, 1) => format!("{c0}+x"),
                (c0, c1) => format!("{c0}+{c1}x"),
            }
        }
    }

    /// Polynomial coordinates `(c0, c1)` of an element.
    pub fn poly_coords(&self, a: Fe) -> [u32; 2] {
        self.coords[a.0 as usize]
    }

    pub fn label(&self) -> String {
        let base = format!("F{}", self.q);
        match self.involution {
            Involution::Identity => base,
            Involution::Frobenius => format!("{base}/frobenius"),
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Least primitive quadratic `x^2 - a1 x + a2`, ordered by `(a1, a2)`.
fn conway_quadratic(p: u32, n: u32, factors: &[u64]) -> (Vec<u32>, Vec<[u32; 2]>) {
    for a1 in 0..p {
        for a2 in 1..p {
            // x^2 = a1 x - a2
            let step = |c: [u32; 2]| -> [u32; 2] {
                let c0 = (p - (a2 * c[1]) % p) % p;
                let c1 = (c[0] + a1 * c[1]) % p;
                [c0, c1]
            };
            let mut powers = Vec::with_capacity(n as usize);
            let mut x = [1u32, 0];
            let mut ok = true;
            for i in 0..n {
                if i > 0 && x == [1, 0] {
                    ok = false;
                    break;
                }
                powers.push(x);
                x = step(x);
            }
            if !ok || x != [1, 0] {
                continue;
            }
            let _ = factors;
            return (vec![a2 % p, (p - a1) % p, 1], powers);
        }
    }
    unreachable!("every finite field has a primitive quadratic")
}

/// The element of exact order `m` with least discrete log.
pub fn root_of_unity(field: &Field, m: u64) -> Result<Fe, NumericError> {
    let n = (field.order() - 1) as u64;
    if m == 0 || n % m != 0 {
        return Err(NumericError::NoRootOfUnity { m, q_minus_1: n });
    }
    Ok(field.pow(field.generator(), (n / m) as i64))
}

/// A field element bundled with its field, for arithmetic via operators.
#[derive(Clone)]
pub struct FieldElem {
    field: Arc<Field>,
    value: Fe,
}

impl FieldElem {
    pub fn new(field: &Arc<Field>, value: Fe) -> Self {
        FieldElem {
            field: Arc::clone(field),
            value,
        }
    }

    pub fn from_i64(field: &Arc<Field>, n: i64) -> Self {
        Self::new(field, field.from_i64(n))
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn value(&self) -> Fe {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn inv(&self) -> Option<Self> {
        self.field
            .try_inv(self.value)
            .map(|v| Self::new(&self.field, v))
    }

    pub fn pow(&self, e: i64) -> Self {
        Self::new(&self.field, self.field.pow(self.value, e))
    }

    pub fn involute(&self) -> Self {
        Self::new(&self.field, self.field.conj(self.value))
    }
}

/// Applies the field's involution.
pub fn involute(x: &FieldElem) -> FieldElem {
    x.involute()
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.value == other.value
    }
}

impl Eq for FieldElem {}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(self.value))
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(self.value))
    }
}

macro_rules! elem_binop {
    ($tr:ident, $method:ident, $op:ident) => {
        impl $tr for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: FieldElem) -> FieldElem {
                assert!(*self.field == *rhs.field, "mixed fields");
                let v = self.field.$op(self.value, rhs.value);
                FieldElem::new(&self.field, v)
            }
        }
        impl<'a> $tr<&'a FieldElem> for &'a FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                assert!(*self.field == *rhs.field, "mixed fields");
                let v = self.field.$op(self.value, rhs.value);
                FieldElem::new(&self.field, v)
            }
        }
    };
}

elem_binop!(Add, add, add);
elem_binop!(Sub, sub, sub);
elem_binop!(Mul, mul, mul);

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        let v = self.field.neg(self.value);
        FieldElem::new(&self.field, v)
    }
}

/// `a + b·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DualNumber {
    pub a: Fe,
    pub b: Fe,
}

impl DualNumber {
    pub const ZERO: DualNumber = DualNumber {
        a: Fe::ZERO,
        b: Fe::ZERO,
    };
    pub const ONE: DualNumber = DualNumber {
        a: Fe::ONE,
        b: Fe::ZERO,
    };
    pub const EPS: DualNumber = DualNumber {
        a: Fe::ZERO,
        b: Fe::ONE,
    };

    pub fn new(a: Fe, b: Fe) -> Self {
        DualNumber { a, b }
    }

    pub fn real(a: Fe) -> Self {
        DualNumber { a, b: Fe::ZERO }
    }

    pub fn add(self, f: &Field, o: Self) -> Self {
        DualNumber::new(f.add(self.a, o.a), f.add(self.b, o.b))
    }

    pub fn sub(self, f: &Field, o: Self) -> Self {
        DualNumber::new(f.sub(self.a, o.a), f.sub(self.b, o.b))
    }

    pub fn neg(self, f: &Field) -> Self {
        DualNumber::new(f.neg(self.a), f.neg(self.b))
    }

    pub fn mul(self, f: &Field, o: Self) -> Self {
        DualNumber::new(
            f.mul(self.a, o.a),
            f.add(f.mul(self.a, o.b), f.mul(self.b, o.a)),
        )
    }

    pub fn scale(self, f: &Field, c: Fe) -> Self {
        DualNumber::new(f.mul(self.a, c), f.mul(self.b, c))
    }

    pub fn conj(self, f: &Field) -> Self {
        DualNumber::new(f.conj(self.a), f.conj(self.b))
    }

    /// `(a + bε)^{-1} = a^{-1} - b a^{-2} ε`, defined iff `a ≠ 0`.
    pub fn inv(self, f: &Field) -> Option<Self> {
        let ai = f.try_inv(self.a)?;
        Some(DualNumber::new(ai, f.neg(f.mul(self.b, f.mul(ai, ai)))))
    }

    pub fn is_invertible(self) -> bool {
        !self.a.is_zero()
    }
}
