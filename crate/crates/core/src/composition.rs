//! Composition algebras (split octonions, para-octonions) and compositions
//! of quadratic forms 𝓜 = (C₁, C₂, C₃, q₁, q₂, q₃, m) with m: C₃ × C₂ → C₁.
//!
//! Identities of bidegree (2, 2), such as q(x·y) = q(x)q(y), are decided by
//! evaluation on all pairs drawn from {b_i} ∪ {b_i + b_j}: a polynomial that
//! is quadratic in each argument separately vanishes iff it vanishes there.
//! Bilinear and trilinear identities are checked on basis tuples.

use std::fmt;

use crate::error::{ensure_len, Error, Result};
use crate::linalg::{LinearMap, Matrix, Vector};
use crate::quadspace::{basis_sums, is_isometry, isometry_defect, QuadraticSpace};
use crate::report::{Check, Counterexample, Report, Tally};
use crate::scalars::{Ring, Scalar};

/// Structure constants of a bilinear map: b_i ⊗ b_j ↦ Σ_k t[i][j][k] b_k.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BilinearMap {
    ring: Ring,
    left: usize,
    right: usize,
    out: usize,
    data: Vec<Scalar>,
}

impl BilinearMap {
    pub fn zeros(ring: Ring, left: usize, right: usize, out: usize) -> Self {
        BilinearMap { ring, left, right, out, data: vec![ring.zero(); left * right * out] }
    }

    /// Builds the map from the images of basis pairs.
    pub fn from_fn(ring: Ring, left: usize, right: usize, out: usize, mut f: impl FnMut(usize, usize) -> Vector) -> Self {
        let mut m = Self::zeros(ring, left, right, out);
        for i in 0..left {
            for j in 0..right {
                let v = f(i, j);
                assert_eq!(v.len(), out);
                for k in 0..out {
                    m.data[(i * right + j) * out + k] = v.get(k).clone();
                }
            }
        }
        m
    }

    pub fn from_nested(ring: Ring, nested: Vec<Vec<Vec<Scalar>>>) -> Result<Self> {
        let left = nested.len();
        let right = nested.first().map_or(0, Vec::len);
        let out = nested.first().and_then(|r| r.first()).map_or(0, Vec::len);
        let mut data = Vec::with_capacity(left * right * out);
        for row in nested {
            ensure_len(right, row.len())?;
            for cell in row {
                ensure_len(out, cell.len())?;
                for x in cell {
                    if x.ring() != ring {
                        return Err(Error::RingMismatch(ring, x.ring()));
                    }
                    data.push(x);
                }
            }
        }
        Ok(BilinearMap { ring, left, right, out, data })
    }

    pub fn to_nested_strings(&self) -> Vec<Vec<Vec<String>>> {
        (0..self.left)
            .map(|i| (0..self.right).map(|j| (0..self.out).map(|k| self.get(i, j, k).to_string()).collect()).collect())
            .collect()
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    /// (left rank, right rank, output rank)
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.left, self.right, self.out)
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.data[(i * self.right + j) * self.out + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: Scalar) {
        assert_eq!(value.ring(), self.ring);
        let idx = (i * self.right + j) * self.out + k;
        self.data[idx] = value;
    }

    pub fn basis_product(&self, i: usize, j: usize) -> Vector {
        Vector::from_vec(self.ring, self.data[(i * self.right + j) * self.out..(i * self.right + j + 1) * self.out].to_vec())
    }

    pub fn apply(&self, x: &Vector, y: &Vector) -> Vector {
        assert_eq!((x.len(), y.len()), (self.left, self.right), "bilinear map dimension mismatch");
        let mut acc = vec![self.ring.zero(); self.out];
        for i in 0..self.left {
            let xi = x.get(i);
            if xi.is_zero() {
                continue;
            }
            for j in 0..self.right {
                let yj = y.get(j);
                if yj.is_zero() {
                    continue;
                }
                let s = xi * yj;
                let base = (i * self.right + j) * self.out;
                for (k, a) in acc.iter_mut().enumerate() {
                    let c = &self.data[base + k];
                    if !c.is_zero() {
                        *a += &(&s * c);
                    }
                }
            }
        }
        Vector::from_vec(self.ring, acc)
    }

    pub fn try_apply(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        ensure_len(self.left, x.len())?;
        ensure_len(self.right, y.len())?;
        Ok(self.apply(x, y))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        BilinearMap { data: self.data.iter().map(|x| x * s).collect(), ..self.clone() }
    }

    /// The map (x, y) ↦ post(self(pre_left x, pre_right y)).
    pub fn transformed(&self, post: &Matrix, pre_left: &Matrix, pre_right: &Matrix) -> Self {
        let out = post.rows();
        BilinearMap::from_fn(self.ring, pre_left.cols(), pre_right.cols(), out, |i, j| {
            post.apply(&self.apply(&pre_left.column(i), &pre_right.column(j)))
        })
    }

    pub fn lift_to_rationals(&self) -> Self {
        BilinearMap {
            ring: self.ring.fraction_field(),
            data: self.data.iter().map(Scalar::lift_to_rationals).collect(),
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    Octonion,
    Para,
    General,
}

impl AlgebraKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgebraKind::Octonion => "octonion",
            AlgebraKind::Para => "para",
            AlgebraKind::General => "general",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "octonion" => Ok(AlgebraKind::Octonion),
            "para" => Ok(AlgebraKind::Para),
            "general" => Ok(AlgebraKind::General),
            _ => Err(Error::Parse(format!("unknown algebra kind {s:?}"))),
        }
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Checks q_out(m(x, y)) = q_left(x) q_right(y) on all pairs of basis sums.
fn composition_law(name: &str, m: &BilinearMap, q_left: &QuadraticSpace, q_right: &QuadraticSpace, q_out: &QuadraticSpace) -> Check {
    let ring = m.ring;
    let xs = basis_sums(ring, q_left.rank());
    let ys = basis_sums(ring, q_right.rank());
    let qy: Vec<Scalar> = ys.iter().map(|y| q_right.eval(y)).collect();
    let mut t = Tally::new(name);
    for x in &xs {
        let qx = q_left.eval(x);
        for (y, qy) in ys.iter().zip(&qy) {
            let lhs = q_out.eval(&m.apply(x, y));
            let rhs = &qx * qy;
            t.record(lhs == rhs, |i| Counterexample::new(i, &[("x", x), ("y", y)], format!("q(m(x,y)) = {lhs}, q(x)q(y) = {rhs}")));
        }
    }
    t.finish()
}

/// A rank-8 composition algebra given by structure constants.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompositionAlgebra {
    space: QuadraticSpace,
    mult: BilinearMap,
    unity: Option<Vector>,
    kind: AlgebraKind,
}

pub const ZORN_RANK: usize = 8;

impl CompositionAlgebra {
    /// Validates every invariant of the given kind.
    pub fn new(space: QuadraticSpace, mult: BilinearMap, unity: Option<Vector>, kind: AlgebraKind) -> Result<Self> {
        let c = Self::from_parts_unchecked(space, mult, unity, kind);
        c.verify().into_validation("composition algebra")?;
        Ok(c)
    }

    /// Skips validation; for loading files that are verified separately
    /// and for negative controls.
    pub fn from_parts_unchecked(space: QuadraticSpace, mult: BilinearMap, unity: Option<Vector>, kind: AlgebraKind) -> Self {
        CompositionAlgebra { space, mult, unity, kind }
    }

    /// The split octonions as vector matrices [[a, x], [y, b]] with basis
    /// (e₁₁, e₂₂, x₁, x₂, x₃, y₁, y₂, y₃).
    pub fn zorn(ring: Ring) -> Result<Self> {
        let space = QuadraticSpace::from_terms(ring, ZORN_RANK, &[(0, 1, 1), (2, 5, -1), (3, 6, -1), (4, 7, -1)]);
        let mult = BilinearMap::from_fn(ring, ZORN_RANK, ZORN_RANK, ZORN_RANK, |i, j| {
            zorn_product(&Vector::basis(ring, ZORN_RANK, i), &Vector::basis(ring, ZORN_RANK, j))
        });
        Self::new(space, mult, Some(zorn_unity(ring)), AlgebraKind::Octonion)
    }

    pub fn ring(&self) -> Ring {
        self.space.ring()
    }

    pub fn space(&self) -> &QuadraticSpace {
        &self.space
    }

    pub fn mult(&self) -> &BilinearMap {
        &self.mult
    }

    pub fn unity(&self) -> Option<&Vector> {
        self.unity.as_ref()
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.space.rank()
    }

    pub fn verify(&self) -> Report {
        let mut r = Report::new();
        let n = self.space.rank();
        let shape_ok = n == ZORN_RANK
            && self.mult.dims() == (n, n, n)
            && self.mult.ring == self.ring()
            && self.unity.as_ref().map_or(true, |u| u.len() == n && u.ring() == self.ring());
        if !shape_ok {
            r.push(Check::error("shape", format!("expected rank {ZORN_RANK} with an {n}×{n}×{n} tensor")));
            return r;
        }
        r.push(if self.space.is_nonsingular() {
            Check::pass("nonsingular", 1)
        } else {
            Check::error("nonsingular", "polar Gram determinant is not a unit")
        });
        r.push(composition_law("multiplicativity", &self.mult, &self.space, &self.space, &self.space));
        match self.kind {
            AlgebraKind::Octonion => {
                let Some(e) = &self.unity else {
                    r.push(Check::error("unity", "octonion algebra without unity"));
                    return r;
                };
                let mut t = Tally::new("unity_norm");
                let qe = self.space.eval(e);
                t.record(qe.is_one(), |i| Counterexample::new(i, &[("unity", e)], format!("q(unity) = {qe}")));
                r.push(t.finish());
                let mut t = Tally::new("unital");
                for i in 0..n {
                    let b = Vector::basis(self.ring(), n, i);
                    let (l, rt) = (self.mult.apply(e, &b), self.mult.apply(&b, e));
                    t.record(l == b && rt == b, |k| {
                        Counterexample::new(k, &[("x", &b), ("unity·x", &l), ("x·unity", &rt)], "unity does not act trivially")
                    });
                }
                r.push(t.finish());
            }
            AlgebraKind::Para => r.push(self.symmetry_check()),
            AlgebraKind::General => {}
        }
        r
    }

    fn symmetry_check(&self) -> Check {
        let n = self.rank();
        let ring = self.ring();
        let mut t = Tally::new("para_symmetry");
        for i in 0..n {
            for j in 0..n {
                let xy = self.mult.basis_product(i, j);
                for k in 0..n {
                    let (x, y, z) = (Vector::basis(ring, n, i), Vector::basis(ring, n, j), Vector::basis(ring, n, k));
                    let lhs = self.space.polar(&xy, &z);
                    let rhs = self.space.polar(&x, &self.mult.basis_product(j, k));
                    t.record(lhs == rhs, |idx| {
                        Counterexample::new(idx, &[("x", &x), ("y", &y), ("z", &z)], format!("<xy,z> = {lhs}, <x,yz> = {rhs}"))
                    });
                }
            }
        }
        t.finish()
    }

    fn check_vector(&self, x: &Vector) -> Result<()> {
        ensure_len(self.rank(), x.len())?;
        if x.ring() != self.ring() {
            return Err(Error::RingMismatch(self.ring(), x.ring()));
        }
        Ok(())
    }

    pub fn multiply(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check_vector(x)?;
        self.check_vector(y)?;
        Ok(self.mult.apply(x, y))
    }

    pub fn norm(&self, x: &Vector) -> Result<Scalar> {
        self.space.evaluate(x)
    }

    fn require(&self, kind: AlgebraKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::KindMismatch { expected: kind.name(), found: self.kind.name() })
        }
    }

    /// x̄ = ⟨x, 1⟩·1 − x.
    pub fn conjugate(&self, x: &Vector) -> Result<Vector> {
        self.require(AlgebraKind::Octonion)?;
        self.check_vector(x)?;
        Ok(self.conj(x))
    }

    fn conj(&self, x: &Vector) -> Vector {
        let e = self.unity.as_ref().expect("octonion algebra has a unity");
        &e.scale(&self.space.polar(x, e)) - x
    }

    /// The para-algebra with product x̄ȳ on the same quadratic space.
    pub fn para(&self) -> Result<Self> {
        self.require(AlgebraKind::Octonion)?;
        let ring = self.ring();
        let n = self.rank();
        let conj: Vec<Vector> = (0..n).map(|i| self.conj(&Vector::basis(ring, n, i))).collect();
        let mult = BilinearMap::from_fn(ring, n, n, n, |i, j| self.mult.apply(&conj[i], &conj[j]));
        Self::new(self.space.clone(), mult, None, AlgebraKind::Para)
    }

    /// Δ(u₁, u₂, u₃) = ⟨u₃·u₂, u₁⟩.
    pub fn delta(&self, u1: &Vector, u2: &Vector, u3: &Vector) -> Result<Scalar> {
        self.require(AlgebraKind::Para)?;
        for u in [u1, u2, u3] {
            self.check_vector(u)?;
        }
        Ok(self.space.polar(&self.mult.apply(u3, u2), u1))
    }

    pub fn composition_of(&self) -> CompositionOfForms {
        CompositionOfForms::from_parts_unchecked(
            [self.space.clone(), self.space.clone(), self.space.clone()],
            self.mult.clone(),
        )
    }

    /// Related-triple test: t₁(x·y) = t₃(x)·t₂(y) with isometric tᵢ, plus
    /// det tᵢ = 1 when 2 is a unit.
    pub fn is_related_triple(&self, t: &TripleMap) -> Result<bool> {
        self.require(AlgebraKind::Para)?;
        let m = self.composition_of();
        if !t.is_morphism(&m, &m) {
            return Ok(false);
        }
        if self.ring().int(2).is_unit() {
            return Ok(t.maps.iter().all(|x| x.determinant().is_one()));
        }
        Ok(true)
    }

    pub fn lift_to_rationals(&self) -> Self {
        CompositionAlgebra {
            space: self.space.lift_to_rationals(),
            mult: self.mult.lift_to_rationals(),
            unity: self.unity.as_ref().map(Vector::lift_to_rationals),
            kind: self.kind,
        }
    }
}

pub fn zorn_unity(ring: Ring) -> Vector {
    Vector::from_ints(ring, &[1, 1, 0, 0, 0, 0, 0, 0])
}

fn cross3(u: &[Scalar], v: &[Scalar]) -> [Scalar; 3] {
    [
        &u[1] * &v[2] - &u[2] * &v[1],
        &u[2] * &v[0] - &u[0] * &v[2],
        &u[0] * &v[1] - &u[1] * &v[0],
    ]
}

fn dot3(u: &[Scalar], v: &[Scalar]) -> Scalar {
    &u[0] * &v[0] + &u[1] * &v[1] + &u[2] * &v[2]
}

/// [[a,x],[y,b]]·[[a′,x′],[y′,b′]] =
/// [[aa′ + x·y′, ax′ + b′x − y×y′], [a′y + by′ + x×x′, y·x′ + bb′]].
pub fn zorn_product(p: &Vector, q: &Vector) -> Vector {
    let (ring, c, d) = (p.ring(), p.coords(), q.coords());
    let (a, b, x, y) = (&c[0], &c[1], &c[2..5], &c[5..8]);
    let (a2, b2, x2, y2) = (&d[0], &d[1], &d[2..5], &d[5..8]);
    let yy = cross3(y, y2);
    let xx = cross3(x, x2);
    let mut out = Vec::with_capacity(8);
    out.push(a * a2 + dot3(x, y2));
    out.push(dot3(y, x2) + b * b2);
    for i in 0..3 {
        out.push(a * &x2[i] + b2 * &x[i] - &yy[i]);
    }
    for i in 0..3 {
        out.push(a2 * &y[i] + b * &y2[i] + &xx[i]);
    }
    Vector::from_vec(ring, out)
}

/// A composition of quadratic forms m: C₃ × C₂ → C₁.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompositionOfForms {
    spaces: [QuadraticSpace; 3],
    m: BilinearMap,
}

impl CompositionOfForms {
    pub fn new(q1: QuadraticSpace, q2: QuadraticSpace, q3: QuadraticSpace, m: BilinearMap) -> Result<Self> {
        let c = Self::from_parts_unchecked([q1, q2, q3], m);
        c.verify().into_validation("composition of quadratic forms")?;
        Ok(c)
    }

    pub fn from_parts_unchecked(spaces: [QuadraticSpace; 3], m: BilinearMap) -> Self {
        CompositionOfForms { spaces, m }
    }

    pub fn ring(&self) -> Ring {
        self.m.ring
    }

    /// q₁, q₂, q₃ in order.
    pub fn spaces(&self) -> &[QuadraticSpace; 3] {
        &self.spaces
    }

    pub fn space(&self, i: usize) -> &QuadraticSpace {
        &self.spaces[i - 1]
    }

    pub fn m(&self) -> &BilinearMap {
        &self.m
    }

    pub fn verify(&self) -> Report {
        let mut r = Report::new();
        let [q1, q2, q3] = &self.spaces;
        let ring = self.ring();
        let shape_ok = self.spaces.iter().all(|q| q.rank() == ZORN_RANK && q.ring() == ring)
            && self.m.dims() == (q3.rank(), q2.rank(), q1.rank());
        if !shape_ok {
            r.push(Check::error("shape", "expected three rank-8 spaces and m: C3 × C2 → C1"));
            return r;
        }
        let mut t = Tally::new("nonsingular");
        for (i, q) in self.spaces.iter().enumerate() {
            t.record(q.is_nonsingular(), |k| Counterexample::new(k, &[], format!("q{} is singular", i + 1)));
        }
        r.push(t.finish());
        r.push(composition_law("composition_identity", &self.m, q3, q2, q1));
        r
    }

    /// The companion maps m₂: C₁ × C₃ → C₂ and m₃: C₂ × C₁ → C₃ defined by
    /// ⟨m₂(x₁,x₃), x₂⟩₂ = ⟨x₁, m(x₃,x₂)⟩₁ = ⟨x₃, m₃(x₂,x₁)⟩₃.
    pub fn companions(&self) -> Result<(BilinearMap, BilinearMap)> {
        let ring = self.ring();
        let [q1, q2, q3] = &self.spaces;
        let (n1, n2, n3) = (q1.rank(), q2.rank(), q3.rank());
        let b1 = q1.gram();
        let b2inv = q2.gram().inverse().map_err(|_| Error::NotInvertible("Gram matrix of q2".into()))?;
        let b3inv = q3.gram().inverse().map_err(|_| Error::NotInvertible("Gram matrix of q3".into()))?;
        // pairing[c][b][a] = ⟨m(b_c, b_b), b_a⟩₁
        let pairing: Vec<Vec<Vector>> =
            (0..n3).map(|c| (0..n2).map(|b| b1.apply(&self.m.basis_product(c, b))).collect()).collect();
        let m2 = BilinearMap::from_fn(ring, n1, n3, n2, |a, c| {
            let w = Vector::from_vec(ring, (0..n2).map(|b| pairing[c][b].get(a).clone()).collect());
            b2inv.apply(&w)
        });
        let m3 = BilinearMap::from_fn(ring, n2, n1, n3, |b, a| {
            let w = Vector::from_vec(ring, (0..n3).map(|c| pairing[c][b].get(a).clone()).collect());
            b3inv.apply(&w)
        });
        let mut t = Tally::new("companion_adjunction");
        for a in 0..n1 {
            for b in 0..n2 {
                for c in 0..n3 {
                    let target = pairing[c][b].get(a);
                    let l2 = q2.polar(&m2.basis_product(a, c), &Vector::basis(ring, n2, b));
                    let l3 = q3.polar(&Vector::basis(ring, n3, c), &m3.basis_product(b, a));
                    t.record(&l2 == target && &l3 == target, |k| {
                        Counterexample::monomial(k, &[a, b, c], format!("pairings {l2}, {l3} vs {target}"))
                    });
                }
            }
        }
        let mut r = Report::new();
        r.push(t.finish());
        r.into_validation("companions")?;
        Ok((m2, m3))
    }

    /// Γ𝓜 = (C₁, C₂, C₃, γ₂γ₃q₁, γ₁γ₃q₂, γ₁γ₂q₃, γ₁m).
    pub fn scale(&self, gamma: &[Scalar; 3]) -> Result<Self> {
        for g in gamma {
            if !g.is_unit() {
                return Err(Error::NotAUnit { value: g.to_string(), ring: g.ring() });
            }
        }
        let [g1, g2, g3] = gamma;
        let [q1, q2, q3] = &self.spaces;
        Self::new(q1.scale(&(g2 * g3))?, q2.scale(&(g1 * g3))?, q3.scale(&(g1 * g2))?, self.m.scale(g1))
    }

    fn norm_one_candidates(ring: Ring, cap: usize) -> Vec<Vector> {
        let n = ZORN_RANK;
        match ring {
            Ring::PrimeField(p) => {
                let total = (p as u128).pow(n as u32);
                let limit = (cap as u128).min(total) as u64;
                (0..limit)
                    .map(|mut idx| {
                        let mut digits = vec![0i64; n];
                        for d in digits.iter_mut().rev() {
                            *d = (idx % p as u64) as i64;
                            idx /= p as u64;
                        }
                        Vector::from_ints(ring, &digits)
                    })
                    .collect()
            }
            _ => {
                let mut out = Vec::new();
                for i in 0..n {
                    for s in [1, -1] {
                        let mut v = vec![0i64; n];
                        v[i] = s;
                        out.push(Vector::from_ints(ring, &v));
                    }
                }
                for i in 0..n {
                    for j in i + 1..n {
                        for s in [1, -1] {
                            let mut v = vec![0i64; n];
                            v[i] = 1;
                            v[j] = s;
                            out.push(Vector::from_ints(ring, &v));
                        }
                    }
                }
                out.truncate(cap);
                out
            }
        }
    }

    /// Searches a ∈ C₃ and b ∈ C₂ with q₃(a) = q₂(b) = 1, examining at most
    /// `cap` candidates in each space.
    pub fn find_norm_one_points(&self, cap: usize) -> Option<(Vector, Vector)> {
        let cands = Self::norm_one_candidates(self.ring(), cap);
        let find = |q: &QuadraticSpace| cands.iter().find(|v| q.eval(v).is_one()).cloned();
        Some((find(&self.spaces[2])?, find(&self.spaces[1])?))
    }

    /// Builds the octonion algebra on C₁ with product m(g⁻¹x, f⁻¹y) where
    /// f = m(a, ·) and g = m(·, b), and the identifications of 𝓜 with its
    /// composition and with that of the para-algebra.
    pub fn octonionify(&self, a: &Vector, b: &Vector) -> Result<Octonionification> {
        let ring = self.ring();
        let [q1, q2, q3] = &self.spaces;
        ensure_len(q3.rank(), a.len())?;
        ensure_len(q2.rank(), b.len())?;
        if !q3.eval(a).is_one() || !q2.eval(b).is_one() {
            return Err(Error::Precondition("octonionify needs q3(a) = q2(b) = 1".into()));
        }
        let f = Matrix::from_columns(ring, q1.rank(), &(0..q2.rank()).map(|j| self.m.apply(a, &Vector::basis(ring, q2.rank(), j))).collect::<Vec<_>>());
        let g = Matrix::from_columns(ring, q1.rank(), &(0..q3.rank()).map(|j| self.m.apply(&Vector::basis(ring, q3.rank(), j), b)).collect::<Vec<_>>());
        if !is_isometry(&f, q2, q1)? || !is_isometry(&g, q3, q1)? {
            return Err(Error::Validation("m(a, ·) or m(·, b) is not an isometry".into()));
        }
        let (finv, ginv) = (f.inverse()?, g.inverse()?);
        let mult = self.m.transformed(&Matrix::identity(ring, q1.rank()), &ginv, &finv);
        let e = self.m.apply(a, b);
        let algebra = CompositionAlgebra::new(q1.clone(), mult, Some(e), AlgebraKind::Octonion)?;
        let id = Matrix::identity(ring, q1.rank());
        let iso = TripleMap::new(id.clone(), f.clone(), g.clone())?;
        let kappa = Matrix::from_columns(ring, q1.rank(), &(0..q1.rank()).map(|i| algebra.conj(&Vector::basis(ring, q1.rank(), i))).collect::<Vec<_>>());
        let para_iso = TripleMap::new(id, kappa.mul(&f), kappa.mul(&g))?;
        if let Some(d) = iso.morphism_defect(self, &algebra.composition_of()) {
            return Err(Error::Validation(format!("(Id, f, g) is not a morphism: {d}")));
        }
        let para = algebra.para()?;
        if let Some(d) = para_iso.morphism_defect(self, &para.composition_of()) {
            return Err(Error::Validation(format!("(Id, κf, κg) is not a morphism: {d}")));
        }
        Ok(Octonionification { algebra, iso, para_iso })
    }

    pub fn lift_to_rationals(&self) -> Self {
        CompositionOfForms {
            spaces: self.spaces.clone().map(|q| q.lift_to_rationals()),
            m: self.m.lift_to_rationals(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Octonionification {
    pub algebra: CompositionAlgebra,
    /// (Id, f, g): 𝓜 → 𝓜_C
    pub iso: TripleMap,
    /// (Id, κf, κg): 𝓜 → 𝓜_C̄
    pub para_iso: TripleMap,
}

/// A triple (t₁, t₂, t₃) of linear maps, tᵢ acting on Cᵢ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TripleMap {
    maps: [LinearMap; 3],
}

impl TripleMap {
    pub fn new(t1: LinearMap, t2: LinearMap, t3: LinearMap) -> Result<Self> {
        for t in [&t1, &t2, &t3] {
            if !t.is_square() || !t.determinant().is_unit() {
                return Err(Error::NotInvertible("triple component".into()));
            }
        }
        Ok(TripleMap { maps: [t1, t2, t3] })
    }

    /// Skips the invertibility check; for negative controls.
    pub fn from_maps_unchecked(maps: [LinearMap; 3]) -> Self {
        TripleMap { maps }
    }

    pub fn identity(ring: Ring, n: usize) -> Self {
        let id = Matrix::identity(ring, n);
        TripleMap { maps: [id.clone(), id.clone(), id] }
    }

    pub fn diagonal(t: &LinearMap) -> Result<Self> {
        Self::new(t.clone(), t.clone(), t.clone())
    }

    /// tᵢ for i ∈ {1, 2, 3}.
    pub fn get(&self, i: usize) -> &LinearMap {
        &self.maps[i - 1]
    }

    pub fn maps(&self) -> &[LinearMap; 3] {
        &self.maps
    }

    /// Componentwise self ∘ other.
    pub fn compose(&self, other: &TripleMap) -> TripleMap {
        TripleMap { maps: [0, 1, 2].map(|i| self.maps[i].mul(&other.maps[i])) }
    }

    pub fn inverse(&self) -> Result<TripleMap> {
        Ok(TripleMap { maps: [self.maps[0].inverse()?, self.maps[1].inverse()?, self.maps[2].inverse()?] })
    }

    /// Describes why t is not a morphism src → dst, if it is not.
    pub fn morphism_defect(&self, src: &CompositionOfForms, dst: &CompositionOfForms) -> Option<String> {
        for i in 0..3 {
            let t = &self.maps[i];
            let (qs, qd) = (&src.spaces[i], &dst.spaces[i]);
            if t.cols() != qs.rank() || t.rows() != qd.rank() {
                return Some(format!("t{} has the wrong shape", i + 1));
            }
            if !t.determinant().is_unit() {
                return Some(format!("t{} is not invertible", i + 1));
            }
            if let Some(s) = isometry_defect(t, qs, qd) {
                return Some(format!("t{} is not an isometry at {s}", i + 1));
            }
        }
        let (n3, n2, _) = src.m.dims();
        let ring = src.ring();
        for c in 0..n3 {
            let x = self.maps[2].column(c);
            for b in 0..n2 {
                let y = self.maps[1].column(b);
                let lhs = dst.m.apply(&x, &y);
                let rhs = self.maps[0].apply(&src.m.basis_product(c, b));
                if lhs != rhs {
                    let (bx, by) = (Vector::basis(ring, n3, c), Vector::basis(ring, n2, b));
                    return Some(format!("m'(t3 x, t2 y) ≠ t1 m(x, y) at x = {bx}, y = {by}"));
                }
            }
        }
        None
    }

    pub fn is_morphism(&self, src: &CompositionOfForms, dst: &CompositionOfForms) -> bool {
        self.morphism_defect(src, dst).is_none()
    }
}

/// The automorphism [[a, x], [y, b]] ↦ [[a, Ax], [(Aᵀ)⁻¹y, b]] of the Zorn
/// algebra for det A = 1.
pub fn sl3_zorn_automorphism(a: &Matrix) -> Result<LinearMap> {
    let ring = a.ring();
    if a.rows() != 3 || a.cols() != 3 {
        return Err(Error::dims(3, a.rows()));
    }
    if !a.determinant().is_one() {
        return Err(Error::Precondition("det(A) must be 1".into()));
    }
    let b = a.transpose().inverse()?;
    let one = Matrix::identity(ring, 1);
    let t = Matrix::block_diagonal(ring, &[&one, &one, a, &b]);
    let zorn = CompositionAlgebra::zorn(ring)?;
    validate_automorphism(&zorn, &t)?;
    Ok(t)
}

/// Unital, multiplicative on basis pairs, and isometric.
pub fn validate_automorphism(c: &CompositionAlgebra, t: &LinearMap) -> Result<()> {
    let ring = c.ring();
    let n = c.rank();
    if let Some(e) = &c.unity {
        if &t.apply(e) != e {
            return Err(Error::Validation("map does not fix the unity".into()));
        }
    }
    for i in 0..n {
        for j in 0..n {
            let lhs = t.apply(&c.mult.basis_product(i, j));
            let rhs = c.mult.apply(&t.column(i), &t.column(j));
            if lhs != rhs {
                return Err(Error::Validation(format!(
                    "map is not multiplicative at {} · {}",
                    Vector::basis(ring, n, i),
                    Vector::basis(ring, n, j)
                )));
            }
        }
    }
    if !is_isometry(t, &c.space, &c.space)? {
        return Err(Error::Validation("map is not an isometry".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> Ring {
        Ring::prime_field(7).unwrap()
    }

    fn basis(ring: Ring, i: usize) -> Vector {
        Vector::basis(ring, 8, i)
    }

    #[test]
    fn zorn_basics() {
        for ring in [Ring::Integers, Ring::Rationals, f7(), Ring::prime_field(2).unwrap()] {
            let c = CompositionAlgebra::zorn(ring).unwrap();
            let e = zorn_unity(ring);
            assert!(c.norm(&e).unwrap().is_one());
            for i in 0..8 {
                assert_eq!(c.multiply(&e, &basis(ring, i)).unwrap(), basis(ring, i));
            }
        }
    }

    #[test]
    fn zorn_exhaustive_over_f2() {
        let f2 = Ring::prime_field(2).unwrap();
        let c = CompositionAlgebra::zorn(f2).unwrap();
        let all: Vec<Vector> = (0..256u32).map(|m| Vector::from_ints(f2, &(0..8).map(|b| ((m >> b) & 1) as i64).collect::<Vec<_>>())).collect();
        let norms: Vec<Scalar> = all.iter().map(|v| c.norm(v).unwrap()).collect();
        for (x, qx) in all.iter().zip(&norms) {
            for (y, qy) in all.iter().zip(&norms) {
                assert_eq!(c.norm(&zorn_product(x, y)).unwrap(), qx * qy);
            }
        }
    }

    #[test]
    fn conjugation() {
        let z = Ring::Integers;
        let c = CompositionAlgebra::zorn(z).unwrap();
        let e = zorn_unity(z);
        assert_eq!(c.conjugate(&e).unwrap(), e);
        assert_eq!(c.conjugate(&basis(z, 0)).unwrap(), basis(z, 1));
        let x = Vector::from_ints(z, &[3, -1, 2, 0, 5, 1, -2, 4]);
        assert_eq!(c.conjugate(&c.conjugate(&x).unwrap()).unwrap(), x);
        let xx = c.multiply(&x, &c.conjugate(&x).unwrap()).unwrap();
        assert_eq!(xx, e.scale(&c.norm(&x).unwrap()));
        assert!(c.para().unwrap().conjugate(&x).is_err());
    }

    #[test]
    fn para_zorn() {
        let z = Ring::Integers;
        let p = CompositionAlgebra::zorn(z).unwrap().para().unwrap();
        let e = zorn_unity(z);
        assert_eq!(p.multiply(&e, &e).unwrap(), e);
        assert_eq!(p.delta(&e, &e, &e).unwrap(), z.int(2));
        assert!(p.delta(&Vector::zero(z, 8), &e, &e).unwrap().is_zero());
        assert_eq!(p.verify().get("para_symmetry").unwrap().passed, 512);
    }

    #[test]
    fn companions_of_para_zorn_are_para_products() {
        for ring in [Ring::Integers, f7()] {
            let p = CompositionAlgebra::zorn(ring).unwrap().para().unwrap();
            let m = p.composition_of();
            let (m2, m3) = m.companions().unwrap();
            // for a symmetric composition both companions equal the product
            assert_eq!(&m2, p.mult());
            assert_eq!(&m3, p.mult());
        }
    }

    #[test]
    fn scaling_compositions() {
        let q = Ring::Rationals;
        let m = CompositionAlgebra::zorn(q).unwrap().para().unwrap().composition_of();
        let one = [q.one(), q.one(), q.one()];
        assert_eq!(m.scale(&one).unwrap(), m);
        let g = [q.int(2), q.one(), q.one()];
        let s = m.scale(&g).unwrap();
        assert_eq!(s.space(1), m.space(1));
        assert_eq!(s.space(2), &m.space(2).scale(&q.int(2)).unwrap());
        assert_eq!(s.m(), &m.m().scale(&q.int(2)));
        let back = s.scale(&g.clone().map(|x| x.invert().unwrap())).unwrap();
        assert_eq!(back, m);
        assert!(m.lift_to_rationals().scale(&[q.zero(), q.one(), q.one()]).is_err());
    }

    #[test]
    fn morphisms() {
        let q = Ring::Rationals;
        let p = CompositionAlgebra::zorn(q).unwrap().para().unwrap();
        let m = p.composition_of();
        assert!(TripleMap::identity(q, 8).is_morphism(&m, &m));
        let two = Matrix::scalar(q, 8, &q.int(2));
        let id = Matrix::identity(q, 8);
        let bad = TripleMap::new(two, id.clone(), id).unwrap();
        assert!(!bad.is_morphism(&m, &m));
    }

    #[test]
    fn elementary_sl3_automorphism() {
        let ring = f7();
        let a = Matrix::from_int_rows(ring, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        let t = sl3_zorn_automorphism(&a).unwrap();
        let c = CompositionAlgebra::zorn(ring).unwrap();
        let mz = c.composition_of();
        assert!(TripleMap::diagonal(&t).unwrap().is_morphism(&mz, &mz));
        assert!(sl3_zorn_automorphism(&Matrix::identity(ring, 3)).unwrap().is_identity());
        let p = c.para().unwrap();
        let tt = TripleMap::diagonal(&t).unwrap();
        assert!(p.is_related_triple(&tt).unwrap());
        let swapped = TripleMap::new(t.clone(), Matrix::identity(ring, 8), t.clone()).unwrap();
        assert!(!p.is_related_triple(&swapped).unwrap());
        assert!(sl3_zorn_automorphism(&Matrix::scalar(ring, 3, &ring.int(3))).is_err());
    }

    #[test]
    fn norm_one_search() {
        let z = Ring::Integers;
        let m = CompositionAlgebra::zorn(z).unwrap().composition_of();
        let (a, b) = m.find_norm_one_points(1000).unwrap();
        assert_eq!(a, zorn_unity(z));
        assert_eq!(b, zorn_unity(z));
        let f7m = CompositionAlgebra::zorn(f7()).unwrap().composition_of();
        let (a, _) = f7m.find_norm_one_points(1000).unwrap();
        assert_eq!(a, Vector::from_ints(f7(), &[0, 0, 0, 0, 1, 0, 0, 6]));
        assert!(f7m.find_norm_one_points(10).is_none());
    }

    #[test]
    fn octonionify_para_zorn_at_unity() {
        let ring = f7();
        let p = CompositionAlgebra::zorn(ring).unwrap().para().unwrap();
        let m = p.composition_of();
        let e = zorn_unity(ring);
        let o = m.octonionify(&e, &e).unwrap();
        assert!(o.para_iso.is_morphism(&m, &o.algebra.para().unwrap().composition_of()));
        assert!(o.algebra.norm(o.algebra.unity().unwrap()).unwrap().is_one());
        assert!(matches!(m.octonionify(&basis(ring, 0), &e), Err(Error::Precondition(_))));
    }
}
