//! Quadratic forms on free modules of finite rank.
//!
//! A form is stored by its upper-triangular coefficients,
//! q(x) = Σ_{i≤j} c_ij x_i x_j, so characteristic 2 needs no special
//! treatment. The polar form ⟨x,y⟩ = q(x+y) − q(x) − q(y) is derived.

use crate::error::{ensure_len, Error, Result};
use crate::linalg::{LinearMap, Matrix, Vector};
use crate::scalars::{Ring, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticSpace {
    coeffs: Matrix,
}

impl QuadraticSpace {
    /// Accepts a square matrix whose strictly lower part is zero.
    pub fn new(coeffs: Matrix) -> Result<Self> {
        if !coeffs.is_square() || coeffs.rows() == 0 {
            return Err(Error::Validation("quadratic form coefficients must be a non-empty square array".into()));
        }
        for i in 0..coeffs.rows() {
            for j in 0..i {
                if !coeffs.get(i, j).is_zero() {
                    return Err(Error::Validation(format!("coefficient [{i}][{j}] below the diagonal is nonzero")));
                }
            }
        }
        Ok(QuadraticSpace { coeffs })
    }

    /// Builds the form from (i, j, c) terms with i ≤ j; repeated terms add.
    pub fn from_terms(ring: Ring, rank: usize, terms: &[(usize, usize, i64)]) -> Self {
        let mut m = Matrix::zeros(ring, rank, rank);
        for &(i, j, c) in terms {
            let (i, j) = (i.min(j), i.max(j));
            let v = m.get(i, j) + ring.int(c);
            m.set(i, j, v);
        }
        QuadraticSpace { coeffs: m }
    }

    /// Recovers the form from its values at b_i and b_i + b_j.
    pub fn from_values(ring: Ring, rank: usize, q: impl Fn(&Vector) -> Scalar) -> Self {
        let diag: Vec<Scalar> = (0..rank).map(|i| q(&Vector::basis(ring, rank, i))).collect();
        let mut m = Matrix::zeros(ring, rank, rank);
        for i in 0..rank {
            m.set(i, i, diag[i].clone());
            for j in i + 1..rank {
                let mut v = Vector::basis(ring, rank, i);
                v.set(j, ring.one());
                m.set(i, j, q(&v) - &diag[i] - &diag[j]);
            }
        }
        QuadraticSpace { coeffs: m }
    }

    /// The hyperbolic plane q(x) = x₁x₂.
    pub fn hyperbolic_plane(ring: Ring) -> Self {
        Self::from_terms(ring, 2, &[(0, 1, 1)])
    }

    pub fn ring(&self) -> Ring {
        self.coeffs.ring()
    }

    pub fn rank(&self) -> usize {
        self.coeffs.rows()
    }

    pub fn coeffs(&self) -> &Matrix {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> &Scalar {
        self.coeffs.get(i.min(j), i.max(j))
    }

    pub fn evaluate(&self, x: &Vector) -> Result<Scalar> {
        ensure_len(self.rank(), x.len())?;
        if x.ring() != self.ring() {
            return Err(Error::RingMismatch(self.ring(), x.ring()));
        }
        Ok(self.eval(x))
    }

    pub(crate) fn eval(&self, x: &Vector) -> Scalar {
        let n = self.rank();
        let mut acc = self.ring().zero();
        for i in 0..n {
            let xi = x.get(i);
            if xi.is_zero() {
                continue;
            }
            let mut row = self.ring().zero();
            for j in i..n {
                let c = self.coeffs.get(i, j);
                if !c.is_zero() && !x.get(j).is_zero() {
                    row += &(c * x.get(j));
                }
            }
            acc += &(xi * &row);
        }
        acc
    }

    pub fn polarize(&self, x: &Vector, y: &Vector) -> Result<Scalar> {
        ensure_len(self.rank(), x.len())?;
        ensure_len(self.rank(), y.len())?;
        Ok(self.polar(x, y))
    }

    pub(crate) fn polar(&self, x: &Vector, y: &Vector) -> Scalar {
        let n = self.rank();
        let mut acc = self.ring().zero();
        for i in 0..n {
            for j in i..n {
                let c = self.coeffs.get(i, j);
                if c.is_zero() {
                    continue;
                }
                let t = x.get(i) * y.get(j) + x.get(j) * y.get(i);
                if !t.is_zero() {
                    acc += &(c * &t);
                }
            }
        }
        acc
    }

    /// The polar Gram matrix, B[i][j] = ⟨b_i, b_j⟩.
    pub fn gram(&self) -> Matrix {
        let n = self.rank();
        Matrix::from_fn(self.ring(), n, n, |i, j| {
            if i == j {
                self.coeffs.get(i, i) + self.coeffs.get(i, i)
            } else {
                self.coeff(i, j).clone()
            }
        })
    }

    pub fn is_nonsingular(&self) -> bool {
        self.gram().determinant().is_unit()
    }

    pub fn scale(&self, lambda: &Scalar) -> Result<Self> {
        if !lambda.is_unit() {
            return Err(Error::NotAUnit { value: lambda.to_string(), ring: lambda.ring() });
        }
        Ok(QuadraticSpace { coeffs: self.coeffs.scale(lambda) })
    }

    pub fn lift_to_rationals(&self) -> Self {
        QuadraticSpace { coeffs: self.coeffs.lift_to_rationals() }
    }
}

/// The vectors b_i followed by b_i + b_j (i < j): a quadratic form over any
/// commutative ring is determined by its values there.
pub fn basis_sums(ring: Ring, n: usize) -> Vec<Vector> {
    let mut out: Vec<Vector> = (0..n).map(|i| Vector::basis(ring, n, i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            let mut v = Vector::basis(ring, n, i);
            v.set(j, ring.one());
            out.push(v);
        }
    }
    out
}

/// The first basis sum s where q_dst(t s) ≠ q_src(s), if any.
pub(crate) fn isometry_defect(t: &LinearMap, src: &QuadraticSpace, dst: &QuadraticSpace) -> Option<Vector> {
    basis_sums(src.ring(), src.rank()).into_iter().find(|s| dst.eval(&t.apply(s)) != src.eval(s))
}

/// Decides q_dst ∘ t = q_src exactly and that t is invertible.
pub fn is_isometry(t: &LinearMap, src: &QuadraticSpace, dst: &QuadraticSpace) -> Result<bool> {
    ensure_len(src.rank(), t.cols())?;
    ensure_len(dst.rank(), t.rows())?;
    if !t.is_square() || !t.determinant().is_unit() {
        return Ok(false);
    }
    Ok(isometry_defect(t, src, dst).is_none())
}

pub fn kernel_basis(t: &LinearMap) -> Result<Vec<Vector>> {
    Ok(t.kernel_basis())
}
