//! Dense vectors and matrices over a [`Ring`].
//!
//! Matrices act on column vectors: the image of the j-th basis vector is
//! column j. Elimination-based routines (inverse, row reduction, kernels)
//! need a field; over ℤ they lift to ℚ first.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{ensure_len, Error, Result};
use crate::scalars::{Ring, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vector {
    ring: Ring,
    coords: Vec<Scalar>,
}

impl Vector {
    pub fn new(ring: Ring, coords: Vec<Scalar>) -> Result<Self> {
        if let Some(bad) = coords.iter().find(|c| c.ring() != ring) {
            return Err(Error::RingMismatch(ring, bad.ring()));
        }
        Ok(Vector { ring, coords })
    }

    pub(crate) fn from_vec(ring: Ring, coords: Vec<Scalar>) -> Self {
        debug_assert!(coords.iter().all(|c| c.ring() == ring));
        Vector { ring, coords }
    }

    pub fn from_ints(ring: Ring, values: &[i64]) -> Self {
        Vector { ring, coords: values.iter().map(|&v| ring.int(v)).collect() }
    }

    pub fn zero(ring: Ring, n: usize) -> Self {
        Vector { ring, coords: vec![ring.zero(); n] }
    }

    pub fn basis(ring: Ring, n: usize, i: usize) -> Self {
        let mut v = Self::zero(ring, n);
        v.coords[i] = ring.one();
        v
    }

    pub fn parse(ring: Ring, values: &[String]) -> Result<Self> {
        let coords = values.iter().map(|s| ring.parse_scalar(s)).collect::<Result<_>>()?;
        Ok(Vector { ring, coords })
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Scalar> {
        self.coords
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.coords[i]
    }

    pub fn set(&mut self, i: usize, value: Scalar) {
        assert_eq!(value.ring(), self.ring);
        self.coords[i] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    pub fn scale(&self, s: &Scalar) -> Vector {
        Vector { ring: self.ring, coords: self.coords.iter().map(|c| c * s).collect() }
    }

    pub fn dot(&self, other: &Vector) -> Scalar {
        assert_eq!(self.len(), other.len(), "dot of vectors of different lengths");
        let mut acc = self.ring.zero();
        for (a, b) in self.coords.iter().zip(&other.coords) {
            if !a.is_zero() && !b.is_zero() {
                acc += &(a * b);
            }
        }
        acc
    }

    /// `self += s · other`
    pub fn add_scaled(&mut self, s: &Scalar, other: &Vector) {
        assert_eq!(self.len(), other.len());
        if s.is_zero() {
            return;
        }
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            if !b.is_zero() {
                *a += &(s * b);
            }
        }
    }

    pub fn try_add(&self, other: &Vector) -> Result<Vector> {
        ensure_len(self.len(), other.len())?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a.try_add(b)).collect::<Result<_>>()?;
        Ok(Vector { ring: self.ring, coords })
    }

    pub fn concat(parts: &[&Vector]) -> Vector {
        let ring = parts[0].ring;
        Vector { ring, coords: parts.iter().flat_map(|p| p.coords.iter().cloned()).collect() }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Vector {
        Vector { ring: self.ring, coords: self.coords[range].to_vec() }
    }

    pub fn lift_to_rationals(&self) -> Vector {
        Vector { ring: self.ring.fraction_field(), coords: self.coords.iter().map(Scalar::lift_to_rationals).collect() }
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.to_string()).collect()
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        assert_eq!(self.len(), rhs.len(), "adding vectors of different lengths");
        Vector { ring: self.ring, coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        assert_eq!(self.len(), rhs.len(), "subtracting vectors of different lengths");
        Vector { ring: self.ring, coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector { ring: self.ring, coords: self.coords.iter().map(|a| -a).collect() }
    }
}

/// A dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// A linear map between free modules, as a matrix acting on columns.
pub type LinearMap = Matrix;

impl Matrix {
    pub fn zeros(ring: Ring, rows: usize, cols: usize) -> Self {
        Matrix { ring, rows, cols, data: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: Ring, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = ring.one();
        }
        m
    }

    pub fn scalar(ring: Ring, n: usize, s: &Scalar) -> Self {
        Self::identity(ring, n).scale(s)
    }

    pub fn from_fn(ring: Ring, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { ring, rows, cols, data }
    }

    pub fn from_rows(ring: Ring, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            ensure_len(c, row.len())?;
            for x in row {
                if x.ring() != ring {
                    return Err(Error::RingMismatch(ring, x.ring()));
                }
                data.push(x);
            }
        }
        Ok(Matrix { ring, rows: r, cols: c, data })
    }

    pub fn from_int_rows(ring: Ring, rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_fn(ring, r, c, |i, j| ring.int(rows[i][j]))
    }

    pub fn from_columns(ring: Ring, rows: usize, columns: &[Vector]) -> Self {
        Self::from_fn(ring, rows, columns.len(), |i, j| columns[j].get(i).clone())
    }

    pub fn parse(ring: Ring, rows: &[Vec<String>]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| ring.parse_scalar(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(ring, parsed)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        assert_eq!(value.ring(), self.ring);
        self.data[i * self.cols + j] = value;
    }

    pub(crate) fn entry_mut(&mut self, i: usize, j: usize) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> Vector {
        Vector::from_vec(self.ring, self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector::from_vec(self.ring, (0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect()).collect()
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = self.ring.zero();
            for (a, b) in self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v.coords()) {
                if !a.is_zero() && !b.is_zero() {
                    acc += &(a * b);
                }
            }
            out.push(acc);
        }
        Vector::from_vec(self.ring, out)
    }

    pub fn try_apply(&self, v: &Vector) -> Result<Vector> {
        ensure_len(self.cols, v.len())?;
        if v.ring() != self.ring {
            return Err(Error::RingMismatch(self.ring, v.ring()));
        }
        Ok(self.apply(v))
    }

    pub fn transpose(&self) -> Matrix {
        Self::from_fn(self.ring, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix { ring: self.ring, rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// The matrix product `self · other`.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        match self.ring {
            Ring::PrimeField(p) => self.mul_mod(other, p as u64),
            Ring::Rationals => {
                let (a, da) = integral_rows(&self.data);
                let (b, db) = integral_rows(&other.data);
                let c = int_product(&a, &b, self.rows, self.cols, other.cols);
                let d = da * db;
                let data = c.into_iter().map(|x| Scalar::from_rational(BigRational::new(x, d.clone()))).collect();
                Matrix { ring: self.ring, rows: self.rows, cols: other.cols, data }
            }
            Ring::Integers => {
                let a: Vec<BigInt> = self.data.iter().map(|x| x.as_integer().unwrap().clone()).collect();
                let b: Vec<BigInt> = other.data.iter().map(|x| x.as_integer().unwrap().clone()).collect();
                let data = int_product(&a, &b, self.rows, self.cols, other.cols)
                    .into_iter()
                    .map(Scalar::from_integer)
                    .collect();
                Matrix { ring: self.ring, rows: self.rows, cols: other.cols, data }
            }
        }
    }

    fn mul_mod(&self, other: &Matrix, p: u64) -> Matrix {
        let a: Vec<u64> = self.data.iter().map(|x| x.residue().unwrap() as u64).collect();
        let b: Vec<u64> = other.data.iter().map(|x| x.residue().unwrap() as u64).collect();
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut data = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                let mut acc: u128 = 0;
                for t in 0..k {
                    acc += (a[i * k + t] * b[t * m + j]) as u128;
                }
                data.push(self.ring.int((acc % p as u128) as i64));
            }
        }
        Matrix { ring: self.ring, rows: n, cols: m, data }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Scalar {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let ring = self.ring;
        let mut a = self.data.clone();
        let mut sign = false;
        let mut prev = ring.one();
        for k in 0..n {
            let Some(piv) = (k..n).find(|&r| !a[r * n + k].is_zero()) else {
                return ring.zero();
            };
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v.exact_div(&prev).expect("Bareiss division is exact");
                }
                a[i * n + k] = ring.zero();
            }
            prev = a[k * n + k].clone();
        }
        let det = if n == 0 { ring.one() } else { a[n * n - 1].clone() };
        if sign {
            -det
        } else {
            det
        }
    }

    /// Row-reduced echelon form together with the pivot columns. Field
    /// rings only.
    pub fn rref(&self) -> Result<(Matrix, Vec<usize>)> {
        if !self.ring.is_field() {
            return Err(Error::UnsupportedRing { ring: self.ring, operation: "row reduction" });
        }
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(piv) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, piv);
            let inv = m.get(row, col).invert()?;
            for j in 0..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let f = m.get(r, col).clone();
                for j in 0..m.cols {
                    if m.get(row, j).is_zero() {
                        continue;
                    }
                    let v = m.get(r, j) - &(&f * m.get(row, j));
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Ok((m, pivots))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        let m = if self.ring.is_field() { self.clone() } else { self.lift_to_rationals() };
        m.rref().expect("field ring").1.len()
    }

    /// A basis of the null space, ordered by free column; the basis vector
    /// for free column f has a 1 at f and zeros at the other free columns.
    pub fn kernel_basis(&self) -> Vec<Vector> {
        let m = if self.ring.is_field() { self.clone() } else { self.lift_to_rationals() };
        let ring = m.ring;
        let (r, pivots) = m.rref().expect("field ring");
        let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = Vector::zero(ring, m.cols);
                v.set(f, ring.one());
                for (row, &pc) in pivots.iter().enumerate() {
                    v.set(pc, -r.get(row, f));
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NotInvertible("non-square matrix".into()));
        }
        if self.ring == Ring::Integers {
            let inv = self.lift_to_rationals().inverse()?;
            return inv.to_ring(Ring::Integers).map_err(|_| Error::NotInvertible("determinant is not a unit".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(self.ring, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, self.ring.one());
        }
        let (r, pivots) = aug.rref()?;
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::NotInvertible("determinant is not a unit".into()));
        }
        Ok(Matrix::from_fn(self.ring, n, n, |i, j| r.get(i, n + j).clone()))
    }

    pub fn lift_to_rationals(&self) -> Matrix {
        Matrix {
            ring: self.ring.fraction_field(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Scalar::lift_to_rationals).collect(),
        }
    }

    pub fn to_ring(&self, ring: Ring) -> Result<Matrix> {
        let data = self.data.iter().map(|x| x.to_ring(ring)).collect::<Result<_>>()?;
        Ok(Matrix { ring, rows: self.rows, cols: self.cols, data })
    }

    pub fn block_diagonal(ring: Ring, blocks: &[&Matrix]) -> Matrix {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(ring, n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }
}

/// Clears denominators: returns integer entries and the common
/// denominator d with `entry = int / d`.
pub(crate) fn integral_rows(data: &[Scalar]) -> (Vec<BigInt>, BigInt) {
    let mut d = BigInt::one();
    for x in data {
        let q = x.as_rational().expect("rational entries");
        if !q.denom().is_one() {
            d = d.lcm(q.denom());
        }
    }
    let ints = data
        .iter()
        .map(|x| {
            let q = x.as_rational().unwrap();
            if q.is_zero() {
                BigInt::zero()
            } else {
                q.numer() * (&d / q.denom())
            }
        })
        .collect();
    (ints, d)
}

fn int_product(a: &[BigInt], b: &[BigInt], n: usize, k: usize, m: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n * m];
    for i in 0..n {
        for t in 0..k {
            let x = &a[i * k + t];
            if x.is_zero() {
                continue;
            }
            for j in 0..m {
                let y = &b[t * m + j];
                if !y.is_zero() {
                    out[i * m + j] += x * y;
                }
            }
        }
    }
    out
}
