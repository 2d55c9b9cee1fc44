//! Cubic norm structures (A, 1, N, ♯) and their Jordan algebras.
//!
//! The adjoint is stored as a sparse quadratic map followed by an optional
//! linear map, so that isotopes x ↦ U_{p⁻¹}(x♯) keep the sparsity of the
//! algebra they come from. Polynomial identities of degree three or more
//! are checked symbolically with [`crate::poly`]; values on b_i, b_i + b_j
//! and b_i + b_j + b_k do not determine a cubic form in general.

use crate::error::{ensure_len, Error, Result};
use crate::harness::rng::SeedStream;
use crate::linalg::{LinearMap, Matrix, Vector};
use crate::poly::{Mono, Poly};
use crate::quadspace::basis_sums;
use crate::report::{Check, Counterexample, Report, Tally};
use crate::scalars::{Ring, Scalar};

/// Seed for the sampled part of construction-time validation.
pub const VALIDATION_SEED: u64 = 0x5eed;
pub const VALIDATION_SAMPLES: usize = 4;

/// A cubic form Σ c_{ijk} x_i x_j x_k with i ≤ j ≤ k.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CubicForm {
    ring: Ring,
    rank: usize,
    terms: Vec<([usize; 3], Scalar)>,
}

impl CubicForm {
    /// Sorts indices, merges repeated monomials and drops zeros.
    pub fn new(ring: Ring, rank: usize, terms: impl IntoIterator<Item = ([usize; 3], Scalar)>) -> Result<Self> {
        let mut all: Vec<([usize; 3], Scalar)> = Vec::new();
        for (mut m, c) in terms {
            if c.ring() != ring {
                return Err(Error::RingMismatch(ring, c.ring()));
            }
            if m.iter().any(|&v| v >= rank) {
                return Err(Error::dims(rank, m.iter().copied().max().unwrap_or(0) + 1));
            }
            m.sort_unstable();
            all.push((m, c));
        }
        all.sort_by_key(|a| a.0);
        let mut merged: Vec<([usize; 3], Scalar)> = Vec::with_capacity(all.len());
        for (m, c) in all {
            match merged.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += &c,
                _ => merged.push((m, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        Ok(CubicForm { ring, rank, terms: merged })
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> &[([usize; 3], Scalar)] {
        &self.terms
    }

    /// Coefficient of x_i x_j x_k (indices in any order).
    pub fn coeff(&self, mut m: [usize; 3]) -> Scalar {
        m.sort_unstable();
        self.terms.binary_search_by(|t| t.0.cmp(&m)).map_or(self.ring.zero(), |i| self.terms[i].1.clone())
    }

    /// Replaces one coefficient; used to build negative controls.
    pub fn set_coeff(&mut self, m: [usize; 3], c: Scalar) {
        let mut all = std::mem::take(&mut self.terms);
        let mut key = m;
        key.sort_unstable();
        all.retain(|t| t.0 != key);
        all.push((key, c));
        *self = CubicForm::new(self.ring, self.rank, all).expect("valid replacement");
    }

    pub fn eval(&self, x: &Vector) -> Scalar {
        let c = x.coords();
        let mut acc = self.ring.zero();
        for ([i, j, k], a) in &self.terms {
            let (xi, xj, xk) = (&c[*i], &c[*j], &c[*k]);
            if xi.is_zero() || xj.is_zero() || xk.is_zero() {
                continue;
            }
            acc += &(&(a * xi) * &(xj * xk));
        }
        acc
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_terms(self.ring, self.terms.iter().map(|(m, c)| (Mono::new(m), c.clone())))
    }

    pub fn lift_to_rationals(&self) -> Self {
        CubicForm {
            ring: self.ring.fraction_field(),
            rank: self.rank,
            terms: self.terms.iter().map(|(m, c)| (*m, c.lift_to_rationals())).collect(),
        }
    }
}

/// x ↦ post(B(x)) with B given by sparse quadratic coordinates
/// B(x)_k = Σ c x_i x_j (i ≤ j).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticMap {
    ring: Ring,
    rank: usize,
    base: Vec<Vec<(usize, usize, Scalar)>>,
    post: Option<Matrix>,
}

impl QuadraticMap {
    pub fn new(ring: Ring, rank: usize, base: Vec<Vec<(usize, usize, Scalar)>>, post: Option<Matrix>) -> Result<Self> {
        let mut clean = Vec::with_capacity(base.len());
        for coord in base {
            let mut terms: Vec<(usize, usize, Scalar)> = Vec::with_capacity(coord.len());
            for (i, j, c) in coord {
                if c.ring() != ring {
                    return Err(Error::RingMismatch(ring, c.ring()));
                }
                if i >= rank || j >= rank {
                    return Err(Error::dims(rank, i.max(j) + 1));
                }
                terms.push((i.min(j), i.max(j), c));
            }
            terms.sort_by_key(|a| (a.0, a.1));
            let mut merged: Vec<(usize, usize, Scalar)> = Vec::with_capacity(terms.len());
            for (i, j, c) in terms {
                match merged.last_mut() {
                    Some((li, lj, lc)) if (*li, *lj) == (i, j) => *lc += &c,
                    _ => merged.push((i, j, c)),
                }
            }
            merged.retain(|t| !t.2.is_zero());
            clean.push(merged);
        }
        if let Some(p) = &post {
            if p.cols() != clean.len() || p.ring() != ring {
                return Err(Error::dims(clean.len(), p.cols()));
            }
        }
        Ok(QuadraticMap { ring, rank, base: clean, post })
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    /// Input rank.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn output_rank(&self) -> usize {
        self.post.as_ref().map_or(self.base.len(), Matrix::rows)
    }

    pub fn base(&self) -> &[Vec<(usize, usize, Scalar)>] {
        &self.base
    }

    pub fn post(&self) -> Option<&Matrix> {
        self.post.as_ref()
    }

    pub fn post_mut(&mut self) -> Option<&mut Matrix> {
        self.post.as_mut()
    }

    /// Replaces one base coefficient; used to build negative controls.
    pub fn set_base_coeff(&mut self, k: usize, i: usize, j: usize, c: Scalar) {
        let (i, j) = (i.min(j), i.max(j));
        let mut coord = std::mem::take(&mut self.base[k]);
        coord.retain(|t| (t.0, t.1) != (i, j));
        coord.push((i, j, c));
        self.base[k] = coord;
        *self = QuadraticMap::new(self.ring, self.rank, std::mem::take(&mut self.base), self.post.take()).expect("valid replacement");
    }

    /// post ∘ self.
    pub fn then(&self, l: &Matrix) -> QuadraticMap {
        if l.is_identity() {
            return self.clone();
        }
        let post = match &self.post {
            Some(p) => l.mul(p),
            None => l.clone(),
        };
        QuadraticMap { post: Some(post), ..self.clone() }
    }

    fn finish(&self, v: Vec<Scalar>) -> Vector {
        let v = Vector::from_vec(self.ring, v);
        match &self.post {
            Some(p) => p.apply(&v),
            None => v,
        }
    }

    pub fn base_apply(&self, x: &Vector) -> Vector {
        let c = x.coords();
        let out = self
            .base
            .iter()
            .map(|coord| {
                let mut acc = self.ring.zero();
                for (i, j, a) in coord {
                    if !c[*i].is_zero() && !c[*j].is_zero() {
                        acc += &(&(a * &c[*i]) * &c[*j]);
                    }
                }
                acc
            })
            .collect();
        Vector::from_vec(self.ring, out)
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        let b = self.base_apply(x);
        match &self.post {
            Some(p) => p.apply(&b),
            None => b,
        }
    }

    /// The polarization f(x + y) − f(x) − f(y).
    pub fn polar(&self, x: &Vector, y: &Vector) -> Vector {
        let (cx, cy) = (x.coords(), y.coords());
        let out = self
            .base
            .iter()
            .map(|coord| {
                let mut acc = self.ring.zero();
                for (i, j, a) in coord {
                    let s = &(&cx[*i] * &cy[*j]) + &(&cx[*j] * &cy[*i]);
                    if !s.is_zero() {
                        acc += &(a * &s);
                    }
                }
                acc
            })
            .collect();
        self.finish(out)
    }

    /// The matrix of y ↦ B(v, y) before the post map.
    fn base_polar_matrix(&self, v: &Vector) -> Matrix {
        let c = v.coords();
        let mut m = Matrix::zeros(self.ring, self.base.len(), self.rank);
        for (k, coord) in self.base.iter().enumerate() {
            for (i, j, a) in coord {
                if !c[*i].is_zero() {
                    *m.entry_mut(k, *j) += &(a * &c[*i]);
                }
                if !c[*j].is_zero() {
                    *m.entry_mut(k, *i) += &(a * &c[*j]);
                }
            }
        }
        m
    }

    /// The matrix of y ↦ f(v + y) − f(v) − f(y).
    pub fn polar_matrix(&self, v: &Vector) -> Matrix {
        let m = self.base_polar_matrix(v);
        match &self.post {
            Some(p) => p.mul(&m),
            None => m,
        }
    }

    pub fn base_polys(&self) -> Vec<Poly> {
        self.base
            .iter()
            .map(|coord| Poly::from_terms(self.ring, coord.iter().map(|(i, j, c)| (Mono::new(&[*i, *j]), c.clone()))))
            .collect()
    }

    /// Expanded coordinate polynomials of the whole map.
    pub fn polys(&self) -> Vec<Poly> {
        let base = self.base_polys();
        match &self.post {
            None => base,
            Some(p) => (0..p.rows()).map(|k| combine_rows(self.ring, p, k, &base)).collect(),
        }
    }

    /// Expanded coefficient tables: per output coordinate, (i, j, c) with i ≤ j.
    pub fn expanded(&self) -> Vec<Vec<(usize, usize, Scalar)>> {
        self.polys()
            .iter()
            .map(|p| {
                p.terms()
                    .into_iter()
                    .map(|(m, c)| {
                        let v = m.vars();
                        (v[0], v[1], c)
                    })
                    .collect()
            })
            .collect()
    }

    pub fn lift_to_rationals(&self) -> Self {
        QuadraticMap {
            ring: self.ring.fraction_field(),
            rank: self.rank,
            base: self.base.iter().map(|c| c.iter().map(|(i, j, a)| (*i, *j, a.lift_to_rationals())).collect()).collect(),
            post: self.post.as_ref().map(Matrix::lift_to_rationals),
        }
    }
}

/// Σ_m p[k][m] · polys[m]
fn combine_rows(ring: Ring, p: &Matrix, k: usize, polys: &[Poly]) -> Poly {
    let row = p.row(k);
    let items: Vec<(&Scalar, &Poly)> = row.coords().iter().zip(polys).filter(|(c, _)| !c.is_zero()).collect();
    Poly::combination(ring, &items)
}

fn linear_forms(m: &Matrix) -> Vec<Poly> {
    (0..m.rows()).map(|i| Poly::linear(m.ring(), m.row(i).coords(), 0)).collect()
}

/// Compares coordinate polynomials and records one case per coordinate.
fn compare_polys(name: &str, lhs: &[Poly], rhs: &[Poly]) -> Check {
    let mut t = Tally::new(name);
    for (k, (l, r)) in lhs.iter().zip(rhs).enumerate() {
        let diff = l.first_difference(r);
        t.record(diff.is_none(), |i| {
            let (m, a, b) = diff.clone().unwrap();
            Counterexample::monomial(i, &m.vars(), format!("coordinate {k}: coefficient {a} vs {b}"))
        });
    }
    t.finish()
}

/// A cubic norm structure with its bilinear trace.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CubicNormStructure {
    basepoint: Vector,
    norm: CubicForm,
    adjoint: QuadraticMap,
    trace: Matrix,
}

impl CubicNormStructure {
    /// Validates shapes, the coefficient-level axioms and a sampled Jordan
    /// check.
    pub fn new(basepoint: Vector, norm: CubicForm, adjoint: QuadraticMap, trace: Matrix) -> Result<Self> {
        let a = Self::from_parts(basepoint, norm, adjoint, trace)?;
        a.validate()?;
        Ok(a)
    }

    /// Checks shapes and rings only.
    pub fn from_parts(basepoint: Vector, norm: CubicForm, adjoint: QuadraticMap, trace: Matrix) -> Result<Self> {
        let n = basepoint.len();
        let ring = basepoint.ring();
        ensure_len(n, norm.rank())?;
        ensure_len(n, adjoint.rank())?;
        ensure_len(n, adjoint.output_rank())?;
        ensure_len(n, trace.rows())?;
        ensure_len(n, trace.cols())?;
        for r in [norm.ring(), adjoint.ring(), trace.ring()] {
            if r != ring {
                return Err(Error::RingMismatch(ring, r));
            }
        }
        Ok(Self::from_parts_unchecked(basepoint, norm, adjoint, trace))
    }

    pub fn from_parts_unchecked(basepoint: Vector, norm: CubicForm, adjoint: QuadraticMap, trace: Matrix) -> Self {
        CubicNormStructure { basepoint, norm, adjoint, trace }
    }

    pub fn validate(&self) -> Result<()> {
        let mut r = self.check_cns_axioms(VALIDATION_SAMPLES, VALIDATION_SEED);
        r.extend(self.check_jordan_axioms(VALIDATION_SAMPLES, VALIDATION_SEED));
        r.into_validation("cubic norm structure")
    }

    pub fn ring(&self) -> Ring {
        self.basepoint.ring()
    }

    pub fn rank(&self) -> usize {
        self.basepoint.len()
    }

    pub fn basepoint(&self) -> &Vector {
        &self.basepoint
    }

    pub fn norm_form(&self) -> &CubicForm {
        &self.norm
    }

    pub fn adjoint_map(&self) -> &QuadraticMap {
        &self.adjoint
    }

    pub fn trace_matrix(&self) -> &Matrix {
        &self.trace
    }

    pub fn norm_form_mut(&mut self) -> &mut CubicForm {
        &mut self.norm
    }

    pub fn adjoint_map_mut(&mut self) -> &mut QuadraticMap {
        &mut self.adjoint
    }

    pub fn trace_matrix_mut(&mut self) -> &mut Matrix {
        &mut self.trace
    }

    fn check(&self, x: &Vector) -> Result<()> {
        ensure_len(self.rank(), x.len())?;
        if x.ring() != self.ring() {
            return Err(Error::RingMismatch(self.ring(), x.ring()));
        }
        Ok(())
    }

    pub fn lift_to_rationals(&self) -> Self {
        CubicNormStructure {
            basepoint: self.basepoint.lift_to_rationals(),
            norm: self.norm.lift_to_rationals(),
            adjoint: self.adjoint.lift_to_rationals(),
            trace: self.trace.lift_to_rationals(),
        }
    }

    // unchecked arithmetic

    pub(crate) fn n(&self, x: &Vector) -> Scalar {
        self.norm.eval(x)
    }

    pub(crate) fn sharp(&self, x: &Vector) -> Vector {
        self.adjoint.apply(x)
    }

    pub(crate) fn cross_(&self, x: &Vector, y: &Vector) -> Vector {
        self.adjoint.polar(x, y)
    }

    pub(crate) fn t(&self, x: &Vector, y: &Vector) -> Scalar {
        x.dot(&self.trace.apply(y))
    }

    pub(crate) fn u(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = x.scale(&self.t(x, y));
        out.add_scaled(&-self.ring().one(), &self.cross_(&self.sharp(x), y));
        out
    }

    pub(crate) fn triple(&self, a: &Vector, b: &Vector, c: &Vector) -> Vector {
        let ac = a + c;
        &(&self.u(&ac, b) - &self.u(a, b)) - &self.u(c, b)
    }

    pub(crate) fn circ(&self, x: &Vector, y: &Vector) -> Vector {
        self.triple(x, &self.basepoint, y)
    }

    pub(crate) fn s(&self, x: &Vector) -> Scalar {
        self.t(&self.sharp(x), &self.basepoint)
    }

    /// The matrix of y ↦ U_x y: x ⊗ (Tx)ᵀ − (x♯ × ·).
    pub(crate) fn u_mat(&self, x: &Vector) -> Matrix {
        let tx = self.trace.apply(x);
        let cross = self.adjoint.polar_matrix(&self.sharp(x));
        let n = self.rank();
        Matrix::from_fn(self.ring(), n, n, |k, j| &(x.get(k) * tx.get(j)) - cross.get(k, j))
    }

    // checked operations

    pub fn norm(&self, x: &Vector) -> Result<Scalar> {
        self.check(x)?;
        Ok(self.n(x))
    }

    pub fn adjoint(&self, x: &Vector) -> Result<Vector> {
        self.check(x)?;
        Ok(self.sharp(x))
    }

    /// x × y = (x + y)♯ − x♯ − y♯.
    pub fn cross(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.cross_(x, y))
    }

    pub fn trace_bilinear(&self, x: &Vector, y: &Vector) -> Result<Scalar> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.t(x, y))
    }

    /// S(x) = T(x♯, 1).
    pub fn quadratic_trace(&self, x: &Vector) -> Result<Scalar> {
        self.check(x)?;
        Ok(self.s(x))
    }

    /// U_x y = T(x, y)x − x♯ × y.
    pub fn u_op(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.u(x, y))
    }

    pub fn u_matrix(&self, x: &Vector) -> Result<LinearMap> {
        self.check(x)?;
        Ok(self.u_mat(x))
    }

    /// {abc} = (U_{a+c} − U_a − U_c)b.
    pub fn triple_product(&self, a: &Vector, b: &Vector, c: &Vector) -> Result<Vector> {
        for v in [a, b, c] {
            self.check(v)?;
        }
        Ok(self.triple(a, b, c))
    }

    /// x ∘ y = {x 1 y}.
    pub fn circle(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.circ(x, y))
    }

    /// x² = U_x 1.
    pub fn square(&self, x: &Vector) -> Result<Vector> {
        self.check(x)?;
        Ok(self.u(x, &self.basepoint))
    }

    pub fn is_invertible(&self, p: &Vector) -> Result<bool> {
        Ok(self.norm(p)?.is_unit())
    }

    /// p⁻¹ = N(p)⁻¹ p♯.
    pub fn inverse(&self, p: &Vector) -> Result<Vector> {
        let np = self.norm(p)?;
        let inv = np.invert().map_err(|_| Error::NotInvertible(format!("N(p) = {np} is not a unit")))?;
        Ok(self.sharp(p).scale(&inv))
    }

    /// (λ U_p p, λ) with λ = N(p)⁻¹, so that N(λ U_p p) = 1.
    pub fn normalize_isotope(&self, p: &Vector) -> Result<(Vector, Scalar)> {
        let np = self.norm(p)?;
        let lambda = np.invert().map_err(|_| Error::NotInvertible(format!("N(p) = {np} is not a unit")))?;
        let q = self.u(p, p).scale(&lambda);
        let nq = self.n(&q);
        if !nq.is_one() {
            return Err(Error::Validation(format!("normalized point has norm {nq}")));
        }
        Ok((q, lambda))
    }

    /// The isotope without validation: basepoint p⁻¹, the same norm,
    /// adjoint U_{p⁻¹}(x♯) and trace T(U_p x, y).
    pub fn isotope_unchecked(&self, p: &Vector) -> Result<Self> {
        let np = self.norm(p)?;
        if !np.is_one() {
            return Err(Error::Precondition(format!("isotope needs N(p) = 1, found {np}")));
        }
        let pinv = self.sharp(p);
        let l = self.u_mat(&pinv);
        let up = self.u_mat(p);
        let trace = if up.is_identity() { self.trace.clone() } else { up.transpose().mul(&self.trace) };
        Ok(CubicNormStructure {
            basepoint: pinv,
            norm: self.norm.clone(),
            adjoint: self.adjoint.then(&l),
            trace,
        })
    }

    /// The p-isotope, validated against the axioms and against the
    /// U-operator x ↦ U_x U_p of `self`.
    pub fn isotope(&self, p: &Vector) -> Result<Self> {
        let a = self.isotope_unchecked(p)?;
        let mut r = a.check_cns_axioms(VALIDATION_SAMPLES, VALIDATION_SEED);
        r.push(isotope_coherence(self, p, &a));
        r.into_validation("isotope")?;
        Ok(a)
    }

    /// Why N∘φ ≠ N or φ is not invertible, if so.
    pub fn norm_isometry_defect(&self, phi: &LinearMap) -> Option<String> {
        let n = self.rank();
        if phi.rows() != n || phi.cols() != n || phi.ring() != self.ring() {
            return Some("map has the wrong shape".into());
        }
        if !phi.determinant().is_unit() {
            return Some("map is not invertible".into());
        }
        let np = self.norm.to_poly();
        let composed = np.substitute(&linear_forms(phi));
        composed
            .first_difference(&np)
            .map(|(m, a, b)| format!("N∘φ and N differ at monomial {:?}: {a} vs {b}", m.vars()))
    }

    pub fn is_norm_isometry(&self, phi: &LinearMap) -> bool {
        self.norm_isometry_defect(phi).is_none()
    }

    pub fn automorphism_defect(&self, phi: &LinearMap) -> Option<String> {
        if phi.rows() != self.rank() || phi.cols() != self.rank() {
            return Some("map has the wrong shape".into());
        }
        let image = phi.apply(&self.basepoint);
        if image != self.basepoint {
            return Some(format!("φ(1) = {image}"));
        }
        self.norm_isometry_defect(phi)
    }

    pub fn is_automorphism(&self, phi: &LinearMap) -> bool {
        self.automorphism_defect(phi).is_none()
    }

    pub fn on_unit_sphere(&self, x: &Vector) -> bool {
        self.norm(x).is_ok_and(|n| n.is_one())
    }

    /// U_1 = Id on the basis, and on sampled (x, y, z):
    /// U_{U_x y} z = U_x U_y U_x z and U_x{y x z} = {x y (U_x z)}.
    pub fn check_jordan_axioms(&self, sample_count: usize, seed: u64) -> Report {
        let mut r = Report::new();
        let ring = self.ring();
        let n = self.rank();
        let u1 = self.u_mat(&self.basepoint);
        let mut t = Tally::new("unit_operator");
        for j in 0..n {
            let col = u1.column(j);
            let b = Vector::basis(ring, n, j);
            t.record(col == b, |i| Counterexample::new(i, &[("y", &b), ("U_1 y", &col)], "U_1 y ≠ y"));
        }
        r.push(t.finish());
        let mut fundamental = Tally::new("fundamental_formula");
        let mut commutation = Tally::new("commutation_formula");
        let mut rng = SeedStream::new(seed, 1);
        for _ in 0..sample_count {
            let (x, y, z) = (rng.vector(ring, n), rng.vector(ring, n), rng.vector(ring, n));
            let uxy = self.u(&x, &y);
            let lhs = self.u(&uxy, &z);
            let rhs = self.u(&x, &self.u(&y, &self.u(&x, &z)));
            fundamental.record(lhs == rhs, |i| {
                Counterexample::new(i, &[("x", &x), ("y", &y), ("z", &z)], "U_{U_x y} z ≠ U_x U_y U_x z")
            });
            let lhs = self.u(&x, &self.triple(&y, &x, &z));
            let rhs = self.triple(&x, &y, &self.u(&x, &z));
            commutation.record(lhs == rhs, |i| {
                Counterexample::new(i, &[("x", &x), ("y", &y), ("z", &z)], "U_x{yxz} ≠ {xy(U_x z)}")
            });
        }
        r.push(fundamental.finish());
        r.push(commutation.finish());
        r
    }

    /// The coefficient-level compatibilities of N, ♯, T and 1, plus a
    /// sampled consistency check of the U-operator.
    pub fn check_cns_axioms(&self, sample_count: usize, seed: u64) -> Report {
        let mut r = Report::new();
        let ring = self.ring();
        let n = self.rank();
        let e = &self.basepoint;

        let mut t = Tally::new("basepoint");
        let ne = self.n(e);
        t.record(ne.is_one(), |i| Counterexample::new(i, &[("1", e)], format!("N(1) = {ne}")));
        let es = self.sharp(e);
        t.record(&es == e, |i| Counterexample::new(i, &[("1", e), ("1♯", &es)], "1♯ ≠ 1"));
        r.push(t.finish());

        let np = self.norm.to_poly();
        let base = self.adjoint.base_polys();
        let post = self.adjoint.post();

        // (a) x♯♯ = N(x) x
        let sharp_sharp: Vec<Poly> = match post {
            None => base.iter().map(|b| b.substitute(&base)).collect(),
            Some(q) => {
                let w: Vec<Poly> = base.iter().map(|b| b.substitute(&linear_forms(q))).collect();
                (0..n).map(|k| combine_rows(ring, q, k, &w).substitute(&base)).collect()
            }
        };
        let n_times_x: Vec<Poly> = (0..n).map(|k| np.mul(&Poly::var(ring, k))).collect();
        r.push(compare_polys("adjoint_identity", &sharp_sharp, &n_times_x));

        // (b) N(x♯) = N(x)²
        let outer = match post {
            None => np.clone(),
            Some(q) => np.substitute(&linear_forms(q)),
        };
        r.push(compare_polys("norm_of_adjoint", &[outer.substitute(&base)], &[np.mul(&np)]));

        // (c) T(x♯, b_c) = ∂_c N(x)
        let m = match post {
            None => self.trace.clone(),
            Some(q) => q.transpose().mul(&self.trace),
        };
        let grads: Vec<Poly> = (0..n).map(|c| np.derivative(c)).collect();
        let lhs: Vec<Poly> = (0..n).map(|c| combine_rows(ring, &m.transpose(), c, &base)).collect();
        r.push(compare_polys("trace_derivative", &lhs, &grads));

        // T(x, y) = ∂_x N(1) ∂_y N(1) − ∂_x ∂_y N(1)
        let g: Vec<Scalar> = grads.iter().map(|p| p.evaluate(e.coords())).collect();
        let mut t = Tally::new("trace_from_norm");
        for a in 0..n {
            for b in a..n {
                let h = grads[a].derivative(b).evaluate(e.coords());
                let expected = &(&g[a] * &g[b]) - &h;
                let (tab, tba) = (self.trace.get(a, b), self.trace.get(b, a));
                t.record(tab == &expected && tba == &expected, |i| {
                    Counterexample::monomial(i, &[a, b], format!("T = ({tab}, {tba}), expected {expected}"))
                });
            }
        }
        r.push(t.finish());

        // sampled: Eq. (U) against the U-matrix and the linearized triple product
        let mut t = Tally::new("u_operator");
        let mut rng = SeedStream::new(seed, 2);
        for _ in 0..sample_count {
            let (x, y, z) = (rng.vector(ring, n), rng.vector(ring, n), rng.vector(ring, n));
            let u = self.u(&x, &y);
            let um = self.u_mat(&x).apply(&y);
            let mut lin = z.scale(&self.t(&x, &y));
            lin.add_scaled(&self.t(&z, &y), &x);
            lin.add_scaled(&-ring.one(), &self.cross_(&self.cross_(&x, &z), &y));
            let tp = self.triple(&x, &y, &z);
            t.record(u == um && tp == lin, |i| {
                Counterexample::new(i, &[("x", &x), ("y", &y), ("z", &z)], "U-operator, U-matrix and triple product disagree")
            });
        }
        r.push(t.finish());
        r
    }
}

/// Checks that the U-operator of `iso` given by its own T and ♯ is
/// x ↦ U_x U_p of `parent`. When the adjoint of `iso` is U_{p⁻¹} ∘ ♯, it
/// suffices that T′ = T U_p and U′-cross(U_{p⁻¹} v, ·) = (v × ·) U_p on a
/// basis of v; otherwise the operators are compared on basis sums x.
pub fn isotope_coherence(parent: &CubicNormStructure, p: &Vector, iso: &CubicNormStructure) -> Check {
    let name = "isotope_coherence";
    let n = parent.rank();
    if iso.rank() != n || p.len() != n {
        return Check::error(name, "rank mismatch");
    }
    let ring = parent.ring();
    let up = parent.u_mat(p);
    let l = parent.u_mat(&parent.sharp(p));
    let factored = iso.adjoint == parent.adjoint.then(&l);
    if factored {
        let mut t = Tally::new(name);
        let tu = parent.trace.mul(&up);
        t.record(iso.trace == tu, |i| Counterexample::new(i, &[("p", p)], "T′ ≠ T U_p"));
        for z in 0..n {
            let b = Vector::basis(ring, n, z);
            let lhs = iso.adjoint.polar_matrix(&l.apply(&b));
            let rhs = parent.adjoint.polar_matrix(&b).mul(&up);
            t.record(lhs == rhs, |i| Counterexample::new(i, &[("p", p), ("v", &b)], "U_{p⁻¹}v ×′ y ≠ v × U_p y"));
        }
        return t.finish().with_note("factored adjoint");
    }
    let mut t = Tally::new(name);
    for x in basis_sums(ring, n) {
        let lhs = iso.u_mat(&x);
        let rhs = parent.u_mat(&x).mul(&up);
        let ok = lhs == rhs;
        t.record(ok, |i| {
            let y = (0..n).find(|&j| lhs.column(j) != rhs.column(j)).unwrap();
            Counterexample::new(i, &[("p", p), ("x", &x), ("y", &Vector::basis(ring, n, y))], "U′_x y ≠ U_x U_p y")
        });
        if !ok {
            return t.finish().with_note("stopped at the first failing basis sum");
        }
    }
    t.finish()
}

/// U′_{b_i} b_j = U_{b_i} U_p b_j for every pair of basis vectors, with
/// U′ built from the isotope's own T and ♯.
pub fn isotope_basis_pairs(parent: &CubicNormStructure, p: &Vector, iso: &CubicNormStructure) -> Check {
    let mut t = Tally::new("isotope_basis_pairs");
    let n = parent.rank();
    if iso.rank() != n || p.len() != n {
        return Check::error("isotope_basis_pairs", "rank mismatch");
    }
    let ring = parent.ring();
    let up = parent.u_mat(p);
    for i in 0..n {
        let x = Vector::basis(ring, n, i);
        let rhs = parent.u_mat(&x).mul(&up);
        for j in 0..n {
            let y = Vector::basis(ring, n, j);
            let lhs = iso.u(&x, &y);
            t.record(lhs == rhs.column(j), |k| Counterexample::new(k, &[("p", p), ("x", &x), ("y", &y)], "U′_x y ≠ U_x U_p y"));
        }
    }
    t.finish()
}
