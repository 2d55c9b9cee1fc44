//! Exact arithmetic over the shipped base rings: prime fields 𝔽_p with
//! p ≤ 2³¹, the rationals ℚ and the integers ℤ.
//!
//! A [`Scalar`] carries its ring with it, so structures loaded at runtime
//! (from the CLI or JSON) can be checked for ring agreement. The operator
//! impls panic on mismatched rings; the `try_*` methods return an error
//! instead.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const MAX_MODULUS: u64 = 1 << 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    PrimeField(u32),
    Rationals,
    Integers,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Ring {
    /// The prime field 𝔽_p; primality is checked by trial division.
    pub fn prime_field(p: u64) -> Result<Self> {
        if p > MAX_MODULUS || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Ring::PrimeField(p as u32))
    }

    pub fn is_field(self) -> bool {
        !matches!(self, Ring::Integers)
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Ring::PrimeField(p) => p as u64,
            _ => 0,
        }
    }

    /// ℚ for ℤ, the ring itself otherwise.
    pub fn fraction_field(self) -> Ring {
        match self {
            Ring::Integers => Ring::Rationals,
            r => r,
        }
    }

    pub fn zero(self) -> Scalar {
        self.int(0)
    }

    pub fn one(self) -> Scalar {
        self.int(1)
    }

    pub fn int(self, n: i64) -> Scalar {
        match self {
            Ring::PrimeField(p) => Scalar::fp(n.rem_euclid(p as i64) as u32, p),
            Ring::Rationals => Scalar(Repr::Q(BigRational::from_integer(BigInt::from(n)))),
            Ring::Integers => Scalar(Repr::Z(BigInt::from(n))),
        }
    }

    pub fn from_bigint(self, n: &BigInt) -> Scalar {
        match self {
            Ring::PrimeField(p) => {
                let r = n.mod_floor(&BigInt::from(p));
                Scalar::fp(r.to_u32().expect("residue fits"), p)
            }
            Ring::Rationals => Scalar(Repr::Q(BigRational::from_integer(n.clone()))),
            Ring::Integers => Scalar(Repr::Z(n.clone())),
        }
    }

    /// The element num/den; `den` must map to a unit.
    pub fn ratio(self, num: &BigInt, den: &BigInt) -> Result<Scalar> {
        self.from_bigint(num).exact_div(&self.from_bigint(den))
    }

    /// Parses a decimal string such as `5`, `-3` or `-3/2`.
    pub fn parse_scalar(self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let int = |t: &str| -> Result<BigInt> {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("invalid scalar {s:?}")))
        };
        match s.split_once('/') {
            None => Ok(self.from_bigint(&int(s)?)),
            Some((n, d)) => {
                let (n, d) = (int(n)?, int(d)?);
                if d.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                self.ratio(&n, &d)
            }
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::PrimeField(p) => write!(f, "Fp:{p}"),
            Ring::Rationals => f.write_str("Q"),
            Ring::Integers => f.write_str("Z"),
        }
    }
}

impl FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Q" => Ok(Ring::Rationals),
            "Z" => Ok(Ring::Integers),
            t => {
                let p = t
                    .strip_prefix("Fp:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown ring literal {s:?}")))?;
                Ring::prime_field(p)
            }
        }
    }
}

impl Serialize for Ring {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ring {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Fp { value: u32, modulus: u32 },
    Q(BigRational),
    Z(BigInt),
}

/// An element of one of the shipped rings, always in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

impl Scalar {
    fn fp(value: u32, modulus: u32) -> Self {
        Scalar(Repr::Fp { value, modulus })
    }

    pub fn ring(&self) -> Ring {
        match &self.0 {
            Repr::Fp { modulus, .. } => Ring::PrimeField(*modulus),
            Repr::Q(_) => Ring::Rationals,
            Repr::Z(_) => Ring::Integers,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Fp { value, .. } => *value == 0,
            Repr::Q(q) => q.is_zero(),
            Repr::Z(z) => z.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Fp { value, .. } => *value == 1,
            Repr::Q(q) => q.is_one(),
            Repr::Z(z) => z.is_one(),
        }
    }

    pub fn is_unit(&self) -> bool {
        match &self.0 {
            Repr::Fp { value, .. } => *value != 0,
            Repr::Q(q) => !q.is_zero(),
            Repr::Z(z) => z.abs().is_one(),
        }
    }

    pub fn invert(&self) -> Result<Scalar> {
        if !self.is_unit() {
            return Err(Error::NotAUnit { value: self.to_string(), ring: self.ring() });
        }
        Ok(match &self.0 {
            Repr::Fp { value, modulus } => Scalar::fp(inverse_mod(*value, *modulus), *modulus),
            Repr::Q(q) => Scalar(Repr::Q(q.recip())),
            Repr::Z(z) => Scalar(Repr::Z(z.clone())),
        })
    }

    fn check_ring(&self, other: &Scalar) -> Result<()> {
        if self.ring() == other.ring() {
            Ok(())
        } else {
            Err(Error::RingMismatch(self.ring(), other.ring()))
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        self.check_ring(other)?;
        Ok(match (&self.0, &other.0) {
            (Repr::Fp { value: a, modulus: p }, Repr::Fp { value: b, .. }) => {
                Scalar::fp(((*a as u64 + *b as u64) % *p as u64) as u32, *p)
            }
            (Repr::Q(a), Repr::Q(b)) => Scalar(Repr::Q(a + b)),
            (Repr::Z(a), Repr::Z(b)) => Scalar(Repr::Z(a + b)),
            _ => unreachable!(),
        })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.check_ring(other)?;
        Ok(match (&self.0, &other.0) {
            (Repr::Fp { value: a, modulus: p }, Repr::Fp { value: b, .. }) => {
                Scalar::fp(((*a as u64 + *p as u64 - *b as u64) % *p as u64) as u32, *p)
            }
            (Repr::Q(a), Repr::Q(b)) => Scalar(Repr::Q(a - b)),
            (Repr::Z(a), Repr::Z(b)) => Scalar(Repr::Z(a - b)),
            _ => unreachable!(),
        })
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.check_ring(other)?;
        Ok(match (&self.0, &other.0) {
            (Repr::Fp { value: a, modulus: p }, Repr::Fp { value: b, .. }) => {
                Scalar::fp((*a as u64 * *b as u64 % *p as u64) as u32, *p)
            }
            (Repr::Q(a), Repr::Q(b)) => Scalar(Repr::Q(a * b)),
            (Repr::Z(a), Repr::Z(b)) => Scalar(Repr::Z(a * b)),
            _ => unreachable!(),
        })
    }

    pub fn try_neg(&self) -> Scalar {
        match &self.0 {
            Repr::Fp { value, modulus } => Scalar::fp((*modulus - *value) % *modulus, *modulus),
            Repr::Q(a) => Scalar(Repr::Q(-a)),
            Repr::Z(a) => Scalar(Repr::Z(-a)),
        }
    }

    /// `self / other` when the quotient exists in the ring. Over ℤ the
    /// division must be exact.
    pub fn exact_div(&self, other: &Scalar) -> Result<Scalar> {
        self.check_ring(other)?;
        match (&self.0, &other.0) {
            (Repr::Z(a), Repr::Z(b)) => {
                if b.is_zero() {
                    return Err(Error::NotAUnit { value: "0".into(), ring: Ring::Integers });
                }
                let (q, r) = a.div_rem(b);
                if r.is_zero() {
                    Ok(Scalar(Repr::Z(q)))
                } else {
                    Err(Error::NotAUnit { value: other.to_string(), ring: Ring::Integers })
                }
            }
            _ => self.try_mul(&other.invert()?),
        }
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.ring().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// A square root in the ring, if one exists.
    pub fn sqrt(&self) -> Option<Scalar> {
        match &self.0 {
            Repr::Fp { value, modulus } => sqrt_mod(*value, *modulus).map(|r| Scalar::fp(r, *modulus)),
            Repr::Q(q) => {
                let n = int_sqrt(q.numer())?;
                let d = int_sqrt(q.denom())?;
                Some(Scalar(Repr::Q(BigRational::new(n, d))))
            }
            Repr::Z(z) => int_sqrt(z).map(|r| Scalar(Repr::Z(r))),
        }
    }

    /// The image under ℤ → ℚ; other rings are returned unchanged.
    pub fn lift_to_rationals(&self) -> Scalar {
        match &self.0 {
            Repr::Z(z) => Scalar(Repr::Q(BigRational::from_integer(z.clone()))),
            _ => self.clone(),
        }
    }

    /// Maps a ℚ-element with integral value back to ℤ.
    pub fn to_ring(&self, ring: Ring) -> Result<Scalar> {
        if self.ring() == ring {
            return Ok(self.clone());
        }
        match (&self.0, ring) {
            (Repr::Q(q), Ring::Integers) if q.is_integer() => Ok(Scalar(Repr::Z(q.to_integer()))),
            (Repr::Z(z), r) => Ok(r.from_bigint(z)),
            (Repr::Q(q), Ring::PrimeField(_)) => ring.ratio(q.numer(), q.denom()),
            _ => Err(Error::RingMismatch(self.ring(), ring)),
        }
    }

    pub(crate) fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Q(q) => Some(q),
            _ => None,
        }
    }

    pub(crate) fn as_integer(&self) -> Option<&BigInt> {
        match &self.0 {
            Repr::Z(z) => Some(z),
            _ => None,
        }
    }

    pub(crate) fn from_rational(q: BigRational) -> Scalar {
        Scalar(Repr::Q(q))
    }

    pub(crate) fn from_integer(z: BigInt) -> Scalar {
        Scalar(Repr::Z(z))
    }

    /// The residue in [0, p) for prime-field elements.
    pub fn residue(&self) -> Option<u32> {
        match &self.0 {
            Repr::Fp { value, .. } => Some(*value),
            _ => None,
        }
    }
}

fn inverse_mod(a: u32, p: u32) -> u32 {
    let (mut r0, mut r1) = (p as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(p as i64) as u32
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

// Tonelli–Shanks.
fn sqrt_mod(a: u32, p: u32) -> Option<u32> {
    let (a, p) = (a as u64, p as u64);
    if a == 0 || p == 2 {
        return Some(a as u32);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)?;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = t2 * t2 % p;
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    Some(r as u32)
}

fn int_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Fp { value, .. } => write!(f, "{value}"),
            Repr::Q(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Repr::Q(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Repr::Z(z) => write!(f, "{z}"),
        }
    }
}

fn expect<T>(r: Result<T>) -> T {
    r.unwrap_or_else(|e| panic!("{e}"))
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                expect(self.$try(rhs))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                expect(self.$try(&rhs))
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                expect(self.$try(rhs))
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                expect(self.$try(&rhs))
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        match (&mut self.0, &rhs.0) {
            (Repr::Q(a), Repr::Q(b)) => *a += b,
            (Repr::Z(a), Repr::Z(b)) => *a += b,
            _ => *self = &*self + rhs,
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        match (&mut self.0, &rhs.0) {
            (Repr::Q(a), Repr::Q(b)) => *a -= b,
            (Repr::Z(a), Repr::Z(b)) => *a -= b,
            _ => *self = &*self - rhs,
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        match (&mut self.0, &rhs.0) {
            (Repr::Q(a), Repr::Q(b)) => *a *= b,
            (Repr::Z(a), Repr::Z(b)) => *a *= b,
            _ => *self = &*self * rhs,
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.try_neg()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.try_neg()
    }
}
