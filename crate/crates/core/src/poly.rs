//! Sparse multivariate polynomials for exact identity checking.
//!
//! Monomials of degree at most 8 are packed into a `u64`, one byte per
//! factor (variable index + 1), smallest variable in the top byte, so the
//! numeric order is the lexicographic order and terms sharing a first
//! factor are contiguous. Coefficients live in a kernel domain: residues
//! for 𝔽_p, integers for ℤ, and integers over a common denominator for ℚ,
//! so no gcd is taken inside the inner loops.

use std::hash::BuildHasherDefault;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHasher;

use crate::scalars::{Ring, Scalar};

type Map<V> = std::collections::HashMap<u64, V, BuildHasherDefault<FxHasher>>;

const MAX_DEGREE: usize = 8;

/// A monomial as a sorted list of variable indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono(u64);

impl Mono {
    pub const ONE: Mono = Mono(0);

    pub fn new(vars: &[usize]) -> Mono {
        assert!(vars.len() <= MAX_DEGREE, "monomial degree exceeds {MAX_DEGREE}");
        let mut v: Vec<usize> = vars.to_vec();
        v.sort_unstable();
        let mut m = 0u64;
        for (i, &x) in v.iter().enumerate() {
            assert!(x < 255, "variable index out of range");
            m |= ((x + 1) as u64) << (56 - 8 * i);
        }
        Mono(m)
    }

    pub fn vars(self) -> Vec<usize> {
        let mut out = Vec::with_capacity(MAX_DEGREE);
        let mut m = self.0;
        while m != 0 {
            out.push(((m >> 56) - 1) as usize);
            m <<= 8;
        }
        out
    }

    pub fn degree(self) -> usize {
        if self.0 == 0 {
            0
        } else {
            MAX_DEGREE - (self.0.trailing_zeros() as usize / 8)
        }
    }

    fn mul(self, other: Mono) -> Mono {
        if other.0 == 0 {
            return self;
        }
        if self.0 == 0 {
            return other;
        }
        let (mut a, mut b) = (self.0, other.0);
        let mut out = 0u64;
        let mut shift = 56i32;
        while a != 0 || b != 0 {
            assert!(shift >= 0, "monomial degree exceeds {MAX_DEGREE}");
            let take = if b == 0 || (a != 0 && a >> 56 <= b >> 56) {
                let t = a >> 56;
                a <<= 8;
                t
            } else {
                let t = b >> 56;
                b <<= 8;
                t
            };
            out |= take << shift;
            shift -= 8;
        }
        Mono(out)
    }

    fn first(self) -> usize {
        (self.0 >> 56) as usize
    }

    fn rest(self) -> Mono {
        Mono(self.0 << 8)
    }
}

trait Kernel {
    type C: Clone + PartialEq + std::fmt::Debug;
    fn zero(&self) -> Self::C;
    fn is_zero(&self, c: &Self::C) -> bool;
    fn add(&self, acc: &mut Self::C, v: &Self::C);
    fn mul(&self, a: &Self::C, b: &Self::C) -> Self::C;
    fn fma(&self, acc: &mut Self::C, a: &Self::C, b: &Self::C) {
        let t = self.mul(a, b);
        self.add(acc, &t);
    }
}

struct ModP(u64);

impl Kernel for ModP {
    type C = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn is_zero(&self, c: &u64) -> bool {
        *c == 0
    }
    fn add(&self, acc: &mut u64, v: &u64) {
        *acc = (*acc + v) % self.0;
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.0
    }
    fn fma(&self, acc: &mut u64, a: &u64, b: &u64) {
        *acc = (*acc + a * b % self.0) % self.0;
    }
}

struct Ints;

impl Kernel for Ints {
    type C = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn is_zero(&self, c: &BigInt) -> bool {
        c.is_zero()
    }
    fn add(&self, acc: &mut BigInt, v: &BigInt) {
        *acc += v;
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn fma(&self, acc: &mut BigInt, a: &BigInt, b: &BigInt) {
        *acc += a * b;
    }
}

type Terms<C> = Vec<(Mono, C)>;

fn collect<K: Kernel>(k: &K, map: Map<K::C>) -> Terms<K::C> {
    let mut v: Terms<K::C> = map.into_iter().filter(|(_, c)| !k.is_zero(c)).map(|(m, c)| (Mono(m), c)).collect();
    v.sort_unstable_by_key(|t| t.0);
    v
}

fn mul_into<K: Kernel>(k: &K, acc: &mut Map<K::C>, a: &[(Mono, K::C)], b: &[(Mono, K::C)]) {
    for (ma, ca) in a {
        for (mb, cb) in b {
            let e = acc.entry(ma.mul(*mb).0).or_insert_with(|| k.zero());
            k.fma(e, ca, cb);
        }
    }
}

fn scaled_into<K: Kernel>(k: &K, acc: &mut Map<K::C>, s: &K::C, a: &[(Mono, K::C)]) {
    for (m, c) in a {
        let e = acc.entry(m.0).or_insert_with(|| k.zero());
        k.fma(e, s, c);
    }
}

// Groups terms by their first factor: Σ_f subs[f] · (Σ c · rest).
fn substitute_terms<K: Kernel>(k: &K, terms: &[(Mono, K::C)], subs: &[Terms<K::C>]) -> Terms<K::C> {
    let mut acc: Map<K::C> = Map::default();
    let mut i = 0;
    while i < terms.len() && terms[i].0 == Mono::ONE {
        let e = acc.entry(0).or_insert_with(|| k.zero());
        k.add(e, &terms[i].1);
        i += 1;
    }
    while i < terms.len() {
        let f = terms[i].0.first();
        let start = i;
        while i < terms.len() && terms[i].0.first() == f {
            i += 1;
        }
        let inner: Terms<K::C> = terms[start..i].iter().map(|(m, c)| (m.rest(), c.clone())).collect();
        let sub = &subs[f - 1];
        if inner.len() == 1 && inner[0].0 == Mono::ONE {
            scaled_into(k, &mut acc, &inner[0].1, sub);
        } else {
            let inner = substitute_terms(k, &inner, subs);
            mul_into(k, &mut acc, sub, &inner);
        }
    }
    collect(k, acc)
}

#[derive(Clone, Debug)]
enum Body {
    Mod(u64, Terms<u64>),
    /// Integer numerators over a positive common denominator (1 over ℤ).
    Int(Terms<BigInt>, BigInt),
}

/// A polynomial with coefficients in a shipped ring.
#[derive(Clone, Debug)]
pub struct Poly {
    ring: Ring,
    body: Body,
}

fn common_denominator<'a>(values: impl Iterator<Item = &'a BigRational>) -> BigInt {
    let mut d = BigInt::one();
    for q in values {
        if !q.denom().is_one() {
            d = d.lcm(q.denom());
        }
    }
    d
}

impl Poly {
    pub fn zero(ring: Ring) -> Poly {
        let body = match ring {
            Ring::PrimeField(p) => Body::Mod(p as u64, Vec::new()),
            _ => Body::Int(Vec::new(), BigInt::one()),
        };
        Poly { ring, body }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    /// Builds a polynomial from monomial/coefficient pairs; repeats add.
    pub fn from_terms(ring: Ring, terms: impl IntoIterator<Item = (Mono, Scalar)>) -> Poly {
        let terms: Vec<(Mono, Scalar)> = terms.into_iter().collect();
        let body = match ring {
            Ring::PrimeField(p) => {
                let k = ModP(p as u64);
                let mut map: Map<u64> = Map::default();
                for (m, c) in &terms {
                    let e = map.entry(m.0).or_insert(0);
                    k.add(e, &(c.residue().expect("prime field coefficient") as u64));
                }
                Body::Mod(k.0, collect(&k, map))
            }
            Ring::Integers => {
                let mut map: Map<BigInt> = Map::default();
                for (m, c) in &terms {
                    *map.entry(m.0).or_default() += c.as_integer().expect("integer coefficient");
                }
                Body::Int(collect(&Ints, map), BigInt::one())
            }
            Ring::Rationals => {
                let d = common_denominator(terms.iter().map(|(_, c)| c.as_rational().expect("rational coefficient")));
                let mut map: Map<BigInt> = Map::default();
                for (m, c) in &terms {
                    let q = c.as_rational().unwrap();
                    if !q.is_zero() {
                        *map.entry(m.0).or_default() += q.numer() * (&d / q.denom());
                    }
                }
                Body::Int(collect(&Ints, map), d)
            }
        };
        Poly { ring, body }.normalized()
    }

    pub fn var(ring: Ring, i: usize) -> Poly {
        Poly::from_terms(ring, [(Mono::new(&[i]), ring.one())])
    }

    /// Σ coeffs[i] · x_{offset+i}
    pub fn linear(ring: Ring, coeffs: &[Scalar], offset: usize) -> Poly {
        Poly::from_terms(
            ring,
            coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (Mono::new(&[offset + i]), c.clone())),
        )
    }

    pub fn len(&self) -> usize {
        match &self.body {
            Body::Mod(_, t) => t.len(),
            Body::Int(t, _) => t.len(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.len() == 0
    }

    /// The canonical term list, sorted by monomial.
    pub fn terms(&self) -> Vec<(Mono, Scalar)> {
        match &self.body {
            Body::Mod(_, t) => t.iter().map(|(m, c)| (*m, self.ring.int(*c as i64))).collect(),
            Body::Int(t, d) => t.iter().map(|(m, c)| (*m, self.from_int(c, d))).collect(),
        }
    }

    fn from_int(&self, c: &BigInt, d: &BigInt) -> Scalar {
        match self.ring {
            Ring::Integers => Scalar::from_integer(c.clone()),
            _ => Scalar::from_rational(BigRational::new(c.clone(), d.clone())),
        }
    }

    pub fn coefficient(&self, m: Mono) -> Scalar {
        match &self.body {
            Body::Mod(_, t) => t.binary_search_by_key(&m, |x| x.0).map_or(self.ring.zero(), |i| self.ring.int(t[i].1 as i64)),
            Body::Int(t, d) => t.binary_search_by_key(&m, |x| x.0).map_or(self.ring.zero(), |i| self.from_int(&t[i].1, d)),
        }
    }

    fn normalized(mut self) -> Poly {
        if let Body::Int(t, d) = &mut self.body {
            if d.is_one() {
                return self;
            }
            let mut g = d.clone();
            for (_, c) in t.iter() {
                if g.is_one() {
                    break;
                }
                g = g.gcd(c);
            }
            if !g.is_one() {
                for (_, c) in t.iter_mut() {
                    *c /= &g;
                }
                *d /= &g;
            }
        }
        self
    }

    /// Σ sᵢ · pᵢ
    pub fn combination(ring: Ring, items: &[(&Scalar, &Poly)]) -> Poly {
        match ring {
            Ring::PrimeField(p) => {
                let k = ModP(p as u64);
                let mut acc: Map<u64> = Map::default();
                for (s, poly) in items {
                    let Body::Mod(_, t) = &poly.body else { panic!("ring mismatch in polynomial combination") };
                    scaled_into(&k, &mut acc, &(s.residue().unwrap() as u64), t);
                }
                Poly { ring, body: Body::Mod(k.0, collect(&k, acc)) }
            }
            Ring::Integers => {
                let mut acc: Map<BigInt> = Map::default();
                for (s, poly) in items {
                    let Body::Int(t, _) = &poly.body else { panic!("ring mismatch in polynomial combination") };
                    scaled_into(&Ints, &mut acc, s.as_integer().unwrap(), t);
                }
                Poly { ring, body: Body::Int(collect(&Ints, acc), BigInt::one()) }
            }
            Ring::Rationals => {
                // sᵢ pᵢ = (nᵢ Aᵢ) / (mᵢ dᵢ)
                let dens: Vec<BigInt> = items
                    .iter()
                    .map(|(s, poly)| {
                        let Body::Int(_, d) = &poly.body else { panic!("ring mismatch") };
                        s.as_rational().unwrap().denom() * d
                    })
                    .collect();
                let mut l = BigInt::one();
                for d in &dens {
                    l = l.lcm(d);
                }
                let mut acc: Map<BigInt> = Map::default();
                for ((s, poly), d) in items.iter().zip(&dens) {
                    let q = s.as_rational().unwrap();
                    if q.is_zero() {
                        continue;
                    }
                    let Body::Int(t, _) = &poly.body else { unreachable!() };
                    let f = q.numer() * (&l / d);
                    scaled_into(&Ints, &mut acc, &f, t);
                }
                Poly { ring, body: Body::Int(collect(&Ints, acc), l) }.normalized()
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let one = self.ring.one();
        Poly::combination(self.ring, &[(&one, self), (&one, other)])
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let (one, minus) = (self.ring.one(), -self.ring.one());
        Poly::combination(self.ring, &[(&one, self), (&minus, other)])
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        Poly::combination(self.ring, &[(s, self)])
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        match (&self.body, &other.body) {
            (Body::Mod(p, a), Body::Mod(_, b)) => {
                let k = ModP(*p);
                let mut acc = Map::default();
                mul_into(&k, &mut acc, a, b);
                Poly { ring: self.ring, body: Body::Mod(*p, collect(&k, acc)) }
            }
            (Body::Int(a, da), Body::Int(b, db)) => {
                let mut acc = Map::default();
                mul_into(&Ints, &mut acc, a, b);
                Poly { ring: self.ring, body: Body::Int(collect(&Ints, acc), da * db) }.normalized()
            }
            _ => panic!("ring mismatch in polynomial product"),
        }
    }

    /// Replaces each variable x_i by `subs[i]`.
    pub fn substitute(&self, subs: &[Poly]) -> Poly {
        match &self.body {
            Body::Mod(p, t) => {
                let s: Vec<Terms<u64>> = subs
                    .iter()
                    .map(|x| match &x.body {
                        Body::Mod(_, t) => t.clone(),
                        _ => panic!("ring mismatch in substitution"),
                    })
                    .collect();
                Poly { ring: self.ring, body: Body::Mod(*p, substitute_terms(&ModP(*p), t, &s)) }
            }
            Body::Int(t, d) => {
                // bring every substituted polynomial to one denominator D,
                // then pad lower-degree terms so the result is N / (d D^k)
                let mut big_d = BigInt::one();
                for x in subs {
                    let Body::Int(_, dx) = &x.body else { panic!("ring mismatch in substitution") };
                    big_d = big_d.lcm(dx);
                }
                let s: Vec<Terms<BigInt>> = subs
                    .iter()
                    .map(|x| {
                        let Body::Int(tx, dx) = &x.body else { unreachable!() };
                        let f = &big_d / dx;
                        if f.is_one() {
                            tx.clone()
                        } else {
                            tx.iter().map(|(m, c)| (*m, c * &f)).collect()
                        }
                    })
                    .collect();
                let kmax = t.iter().map(|(m, _)| m.degree()).max().unwrap_or(0);
                let padded: Terms<BigInt>;
                let src = if big_d.is_one() || t.iter().all(|(m, _)| m.degree() == kmax) {
                    t
                } else {
                    padded = t.iter().map(|(m, c)| (*m, c * big_d.pow((kmax - m.degree()) as u32))).collect();
                    &padded
                };
                let out = substitute_terms(&Ints, src, &s);
                let denom = d * big_d.pow(kmax as u32);
                Poly { ring: self.ring, body: Body::Int(out, denom) }.normalized()
            }
        }
    }

    /// The formal partial derivative ∂/∂x_v.
    pub fn derivative(&self, v: usize) -> Poly {
        let terms = self.terms().into_iter().filter_map(|(m, c)| {
            let vars = m.vars();
            let e = vars.iter().filter(|&&x| x == v).count();
            if e == 0 {
                return None;
            }
            let pos = vars.iter().position(|&x| x == v).unwrap();
            let mut rest = vars;
            rest.remove(pos);
            Some((Mono::new(&rest), c * self.ring.int(e as i64)))
        });
        Poly::from_terms(self.ring, terms.collect::<Vec<_>>())
    }

    pub fn evaluate(&self, point: &[Scalar]) -> Scalar {
        let mut acc = self.ring.zero();
        for (m, c) in self.terms() {
            let mut t = c;
            for v in m.vars() {
                t = &t * &point[v];
            }
            acc += &t;
        }
        acc
    }

    /// The first monomial (in lexicographic order) where the two
    /// polynomials differ, with both coefficients.
    pub fn first_difference(&self, other: &Poly) -> Option<(Mono, Scalar, Scalar)> {
        let diff = self.sub(other);
        let first = match &diff.body {
            Body::Mod(_, t) => t.first().map(|x| x.0),
            Body::Int(t, _) => t.first().map(|x| x.0),
        }?;
        Some((first, self.coefficient(first), other.coefficient(first)))
    }

    pub fn max_abs_coefficient_bits(&self) -> u64 {
        match &self.body {
            Body::Mod(..) => 0,
            Body::Int(t, _) => t.iter().map(|(_, c)| c.abs().bits()).max().unwrap_or(0),
        }
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Poly) -> bool {
        self.ring == other.ring && self.first_difference(other).is_none()
    }
}
