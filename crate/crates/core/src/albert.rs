//! The Albert algebras H(𝓜, Γ), their frames, Peirce 1-spaces and the
//! compositions 𝓜^c carried by the coordinate spaces of a frame.
//!
//! Coordinates: e₁, e₂, e₃ at 0..3, then the u₁-, u₂- and u₃-blocks of
//! eight coordinates each, so uᵢ[jl] occupies 3 + 8(i − 1) ..  11 + 8(i − 1).

use crate::composition::{BilinearMap, CompositionAlgebra, CompositionOfForms, TripleMap, AlgebraKind, ZORN_RANK};
use crate::cubic::{CubicForm, CubicNormStructure, QuadraticMap};
use crate::error::{ensure_len, Error, Result};
use crate::harness::rng::SeedStream;
use crate::linalg::{LinearMap, Matrix, Vector};
use crate::quadspace::QuadraticSpace;
use crate::scalars::{Ring, Scalar};

pub const ALBERT_RANK: usize = 27;

/// Cyclic permutations (i, j, l) of (0, 1, 2).
pub const CYCLIC: [(usize, usize, usize); 3] = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];

/// First coordinate of the uᵢ-block, i ∈ {0, 1, 2}.
pub const fn block(i: usize) -> usize {
    3 + ZORN_RANK * i
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gamma([Scalar; 3]);

impl Gamma {
    pub fn new(g: [Scalar; 3]) -> Result<Self> {
        let ring = g[0].ring();
        if g.iter().any(|x| x.ring() != ring) {
            return Err(Error::RingMismatch(ring, g.iter().find(|x| x.ring() != ring).unwrap().ring()));
        }
        let prod = &(&g[0] * &g[1]) * &g[2];
        if !prod.is_unit() {
            return Err(Error::NotAUnit { value: prod.to_string(), ring });
        }
        Ok(Gamma(g))
    }

    pub fn ones(ring: Ring) -> Self {
        Gamma([ring.one(), ring.one(), ring.one()])
    }

    pub fn from_ints(ring: Ring, g: [i64; 3]) -> Result<Self> {
        Self::new(g.map(|x| ring.int(x)))
    }

    /// Parses "1,2,3".
    pub fn parse(ring: Ring, s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("gamma needs three comma-separated scalars, got {s:?}")));
        }
        Self::new([ring.parse_scalar(parts[0])?, ring.parse_scalar(parts[1])?, ring.parse_scalar(parts[2])?])
    }

    pub fn ring(&self) -> Ring {
        self.0[0].ring()
    }

    pub fn values(&self) -> &[Scalar; 3] {
        &self.0
    }

    /// γ_j γ_l for the cyclic (i, j, l), 0-based.
    pub fn complement(&self, i: usize) -> Scalar {
        let (_, j, l) = CYCLIC[i];
        &self.0[j] * &self.0[l]
    }

    pub fn product(&self) -> Scalar {
        &(&self.0[0] * &self.0[1]) * &self.0[2]
    }

    pub fn lift_to_rationals(&self) -> Self {
        Gamma(self.0.clone().map(|x| x.lift_to_rationals()))
    }
}

impl std::fmt::Display for Gamma {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

/// Σ αᵢeᵢ + Σ uᵢ[jl].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlbertElement {
    pub alphas: [Scalar; 3],
    pub u: [Vector; 3],
}

impl AlbertElement {
    pub fn zero(ring: Ring) -> Self {
        AlbertElement { alphas: [ring.zero(), ring.zero(), ring.zero()], u: [0, 1, 2].map(|_| Vector::zero(ring, ZORN_RANK)) }
    }

    pub fn from_vector(x: &Vector) -> Result<Self> {
        ensure_len(ALBERT_RANK, x.len())?;
        Ok(AlbertElement {
            alphas: [x.get(0).clone(), x.get(1).clone(), x.get(2).clone()],
            u: [0, 1, 2].map(|i| x.slice(block(i)..block(i) + ZORN_RANK)),
        })
    }

    pub fn to_vector(&self) -> Vector {
        let ring = self.alphas[0].ring();
        let a = Vector::from_vec(ring, self.alphas.to_vec());
        Vector::concat(&[&a, &self.u[0], &self.u[1], &self.u[2]])
    }
}

/// eᵢ, i ∈ {0, 1, 2}.
pub fn e(ring: Ring, i: usize) -> Vector {
    Vector::basis(ring, ALBERT_RANK, i)
}

/// u[jl] placed in block i ∈ {0, 1, 2}.
pub fn embed(i: usize, u: &Vector) -> Vector {
    let mut x = AlbertElement::zero(u.ring());
    x.u[i] = u.clone();
    x.to_vector()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame([Vector; 3]);

impl Frame {
    pub fn new(c1: Vector, c2: Vector, c3: Vector) -> Result<Self> {
        for c in [&c1, &c2, &c3] {
            ensure_len(ALBERT_RANK, c.len())?;
        }
        Ok(Frame([c1, c2, c3]))
    }

    pub fn distinguished(ring: Ring) -> Self {
        Frame([e(ring, 0), e(ring, 1), e(ring, 2)])
    }

    pub fn ring(&self) -> Ring {
        self.0[0].ring()
    }

    /// cᵢ for i ∈ {0, 1, 2}.
    pub fn get(&self, i: usize) -> &Vector {
        &self.0[i]
    }

    pub fn elements(&self) -> &[Vector; 3] {
        &self.0
    }

    pub fn lift_to_rationals(&self) -> Self {
        Frame(self.0.clone().map(|c| c.lift_to_rationals()))
    }
}

pub fn distinguished_frame(ring: Ring) -> Frame {
    Frame::distinguished(ring)
}

fn companion_maps(m: &CompositionOfForms) -> Result<[BilinearMap; 3]> {
    let (m2, m3) = m.companions()?;
    Ok([m.m().clone(), m2, m3])
}

fn norm_terms(m: &CompositionOfForms, gamma: &Gamma, trilinear: impl Fn(usize, usize, usize) -> Scalar) -> Vec<([usize; 3], Scalar)> {
    let ring = m.ring();
    let n = ZORN_RANK;
    let g = gamma.product();
    let mut terms = vec![([0, 1, 2], ring.one())];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let v = trilinear(a, b, c);
                if !v.is_zero() {
                    terms.push(([block(0) + a, block(1) + b, block(2) + c], &g * &v));
                }
            }
        }
    }
    for i in 0..3 {
        let gq = -gamma.complement(i);
        let q = m.space(i + 1).coeffs();
        for a in 0..n {
            for b in a..n {
                let c = q.get(a, b);
                if !c.is_zero() {
                    terms.push(([i, block(i) + a, block(i) + b], &gq * c));
                }
            }
        }
    }
    terms
}

/// Builds H(𝓜, Γ) without validating the axioms.
pub fn hermitian_unchecked(m: &CompositionOfForms, gamma: &Gamma) -> Result<CubicNormStructure> {
    let ring = m.ring();
    if gamma.ring() != ring {
        return Err(Error::RingMismatch(ring, gamma.ring()));
    }
    let n = ZORN_RANK;
    let maps = companion_maps(m)?;
    let b1 = m.space(1).gram();
    // ⟨m(u₃, u₂), u₁⟩₁ on (u₁a, u₂b, u₃c)
    let norm = CubicForm::new(
        ring,
        ALBERT_RANK,
        norm_terms(m, gamma, |a, b, c| {
            let mut acc = ring.zero();
            for k in 0..n {
                let x = m.m().get(c, b, k);
                if !x.is_zero() {
                    acc += &(x * b1.get(k, a));
                }
            }
            acc
        }),
    )?;

    let mut base: Vec<Vec<(usize, usize, Scalar)>> = vec![Vec::new(); ALBERT_RANK];
    for (i, j, l) in CYCLIC {
        let gq = -gamma.complement(i);
        base[i].push((j, l, ring.one()));
        let q = m.space(i + 1).coeffs();
        for a in 0..n {
            for b in a..n {
                let c = q.get(a, b);
                if !c.is_zero() {
                    base[i].push((block(i) + a, block(i) + b, &gq * c));
                }
            }
        }
        let gi = &gamma.values()[i];
        for k in 0..n {
            let coord = &mut base[block(i) + k];
            for a in 0..n {
                for b in 0..n {
                    let c = maps[i].get(a, b, k);
                    if !c.is_zero() {
                        coord.push((block(l) + a, block(j) + b, gi * c));
                    }
                }
            }
            coord.push((i, block(i) + k, -ring.one()));
        }
    }
    let adjoint = QuadraticMap::new(ring, ALBERT_RANK, base, None)?;

    let mut trace = Matrix::zeros(ring, ALBERT_RANK, ALBERT_RANK);
    for i in 0..3 {
        trace.set(i, i, ring.one());
        let g = m.space(i + 1).gram().scale(&gamma.complement(i));
        for a in 0..n {
            for b in 0..n {
                trace.set(block(i) + a, block(i) + b, g.get(a, b).clone());
            }
        }
    }
    let mut basepoint = Vector::zero(ring, ALBERT_RANK);
    for i in 0..3 {
        basepoint.set(i, ring.one());
    }
    CubicNormStructure::from_parts(basepoint, norm, adjoint, trace)
}

/// H(𝓜, Γ), validated.
pub fn hermitian_algebra(m: &CompositionOfForms, gamma: &Gamma) -> Result<CubicNormStructure> {
    m.verify().into_validation("composition of quadratic forms")?;
    let a = hermitian_unchecked(m, gamma)?;
    a.validate()?;
    Ok(a)
}

/// H(C, Γ) for a symmetric composition algebra C; an octonion algebra is
/// replaced by its para-algebra. The norm built from Δ is compared with
/// the one built from 𝓜_C coefficient by coefficient.
pub fn h3(c: &CompositionAlgebra, gamma: &Gamma) -> Result<CubicNormStructure> {
    let para = match c.kind() {
        AlgebraKind::Para => c.clone(),
        AlgebraKind::Octonion => c.para()?,
        AlgebraKind::General => return Err(Error::KindMismatch { expected: "para", found: "general" }),
    };
    let m = para.composition_of();
    let a = hermitian_algebra(&m, gamma)?;
    let ring = c.ring();
    let n = ZORN_RANK;
    let basis: Vec<Vector> = (0..n).map(|i| Vector::basis(ring, n, i)).collect();
    let delta = CubicForm::new(
        ring,
        ALBERT_RANK,
        norm_terms(&m, gamma, |x, y, z| para.delta(&basis[x], &basis[y], &basis[z]).expect("para algebra")),
    )?;
    if &delta != a.norm_form() {
        return Err(Error::Validation("Δ-norm and 𝓜-norm coefficient tables differ".into()));
    }
    Ok(a)
}

/// block_diag(1, 1, 1, t₁, t₂, t₃)
pub fn iota(t: &TripleMap) -> LinearMap {
    let ring = t.get(1).ring();
    let one = Matrix::identity(ring, 3);
    Matrix::block_diagonal(ring, &[&one, t.get(1), t.get(2), t.get(3)])
}

/// Peirce and rank computations need a field.
fn over_field(a: &CubicNormStructure) -> std::borrow::Cow<'_, CubicNormStructure> {
    if a.ring().is_field() {
        std::borrow::Cow::Borrowed(a)
    } else {
        std::borrow::Cow::Owned(a.lift_to_rationals())
    }
}

fn lift(x: &Vector, ring: Ring) -> Vector {
    if x.ring() == ring {
        x.clone()
    } else {
        x.lift_to_rationals()
    }
}

/// Why (c₁, c₂, c₃) is not a frame, if it is not.
pub fn frame_defect(a: &CubicNormStructure, f: &Frame) -> Result<Option<String>> {
    let a = over_field(a);
    let ring = a.ring();
    let c: Vec<Vector> = f.elements().iter().map(|x| lift(x, ring)).collect();
    for x in &c {
        ensure_len(a.rank(), x.len())?;
    }
    let one = a.basepoint();
    let sum = &(&c[0] + &c[1]) + &c[2];
    if &sum != one {
        return Ok(Some("c₁ + c₂ + c₃ ≠ 1".into()));
    }
    for i in 0..3 {
        let ui = a.u_mat(&c[i]);
        if ui.apply(one) != c[i] {
            return Ok(Some(format!("U_c{} 1 ≠ c{}", i + 1, i + 1)));
        }
        for j in 0..3 {
            let v = ui.apply(&c[j]);
            let expected = if i == j { c[j].clone() } else { Vector::zero(ring, a.rank()) };
            if v != expected {
                return Ok(Some(format!("U_c{} c{} = {v}", i + 1, j + 1)));
            }
        }
        let r = ui.rank();
        if r != 1 {
            return Ok(Some(format!("U_c{} has rank {r}", i + 1)));
        }
    }
    Ok(None)
}

pub fn is_frame(a: &CubicNormStructure, f: &Frame) -> Result<bool> {
    Ok(frame_defect(a, f)?.is_none())
}

/// The matrix of x ↦ c ∘ x − x.
fn peirce_operator(a: &CubicNormStructure, c: &Vector) -> Matrix {
    let n = a.rank();
    let cols: Vec<Vector> = (0..n)
        .map(|j| {
            let b = Vector::basis(a.ring(), n, j);
            &a.circ(c, &b) - &b
        })
        .collect();
    Matrix::from_columns(a.ring(), n, &cols)
}

/// A basis of A₁(c) = {x : c ∘ x = x}, over the fraction field for ℤ.
pub fn peirce_one(a: &CubicNormStructure, c: &Vector) -> Result<Vec<Vector>> {
    let a = over_field(a);
    let c = lift(c, a.ring());
    ensure_len(a.rank(), c.len())?;
    Ok(peirce_operator(&a, &c).kernel_basis())
}

/// A basis in reduced form: each basis vector has a 1 at its own pivot
/// coordinate and the others vanish there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    fn from_kernel(basis: Vec<Vector>) -> Result<Self> {
        let mut pivots = Vec::with_capacity(basis.len());
        for (k, v) in basis.iter().enumerate() {
            let p = (0..v.len())
                .find(|&c| v.get(c).is_one() && basis.iter().enumerate().all(|(o, w)| o == k || w.get(c).is_zero()))
                .ok_or_else(|| Error::Validation("kernel basis is not in reduced form".into()))?;
            pivots.push(p);
        }
        Ok(Subspace { basis, pivots })
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The coordinates of w in this basis, if w lies in the span.
    pub fn coordinates(&self, w: &Vector) -> Option<Vector> {
        let coords = Vector::from_vec(w.ring(), self.pivots.iter().map(|&p| w.get(p).clone()).collect());
        (self.vector(&coords) == *w).then_some(coords)
    }

    pub fn vector(&self, coords: &Vector) -> Vector {
        let ring = coords.ring();
        let mut out = Vector::zero(ring, self.basis[0].len());
        for (c, b) in coords.coords().iter().zip(&self.basis) {
            if !c.is_zero() {
                out.add_scaled(c, b);
            }
        }
        out
    }

    /// The matrix whose columns are the basis vectors.
    pub fn matrix(&self) -> Matrix {
        Matrix::from_columns(self.basis[0].ring(), self.basis[0].len(), &self.basis)
    }
}

/// C_l^c = A₁(cᵢ) ∩ A₁(cⱼ) for cyclic (i, j, l), indexed by l.
pub fn coordinate_spaces(a: &CubicNormStructure, f: &Frame) -> Result<[Subspace; 3]> {
    let a = over_field(a);
    let ring = a.ring();
    let ops: Vec<Matrix> = f.elements().iter().map(|c| peirce_operator(&a, &lift(c, ring))).collect();
    let mut out: [Option<Subspace>; 3] = [None, None, None];
    for (i, j, l) in CYCLIC {
        let n = a.rank();
        let stacked = Matrix::from_fn(ring, 2 * n, n, |r, c| if r < n { ops[i].get(r, c).clone() } else { ops[j].get(r - n, c).clone() });
        let basis = stacked.kernel_basis();
        if basis.len() != ZORN_RANK {
            return Err(Error::Validation(format!("coordinate space C{} has dimension {}", l + 1, basis.len())));
        }
        out[l] = Some(Subspace::from_kernel(basis)?);
    }
    Ok(out.map(Option::unwrap))
}

#[derive(Clone, Debug)]
pub struct Deformation {
    pub composition: CompositionOfForms,
    pub spaces: [Subspace; 3],
}

/// 𝓜^c: qᵢ^c = −S restricted to Cᵢ^c and m^c = ∘ on C₃^c × C₂^c, in the
/// bases of [`coordinate_spaces`].
pub fn deform(a: &CubicNormStructure, f: &Frame) -> Result<Deformation> {
    if let Some(d) = frame_defect(a, f)? {
        return Err(Error::Precondition(format!("not a frame: {d}")));
    }
    let spaces = coordinate_spaces(a, f)?;
    let a = over_field(a);
    let ring = a.ring();
    let n = ZORN_RANK;
    let qs: Vec<QuadraticSpace> = spaces
        .iter()
        .map(|s| QuadraticSpace::from_values(ring, n, |x| -a.s(&s.vector(x))))
        .collect();
    let mut m = BilinearMap::zeros(ring, n, n, n);
    for c in 0..n {
        for b in 0..n {
            let w = a.circ(&spaces[2].basis[c], &spaces[1].basis[b]);
            let coords = spaces[0]
                .coordinates(&w)
                .ok_or_else(|| Error::Validation("circle product leaves C1 of the frame".into()))?;
            for k in 0..n {
                m.set(c, b, k, coords.get(k).clone());
            }
        }
    }
    let [q1, q2, q3]: [QuadraticSpace; 3] = qs.try_into().expect("three spaces");
    let composition = CompositionOfForms::new(q1, q2, q3, m)?;
    Ok(Deformation { composition, spaces })
}

/// The rank-one idempotent αe₁ + (1 − α)e₂ + u₃[12] from (α, u). Its e₃
/// adjoint coordinate is α(1 − α) − γ₁γ₂q₃(u).
fn k3(a: &CubicNormStructure, u: &Vector) -> Scalar {
    -a.sharp(&embed(2, u)).get(2).clone()
}

/// Searches w = 1 − 2(c + e₃) with c a rank-one idempotent supported on
/// e₁, e₂ and u₃[12], and returns (w, U_w) after checking that U_w is an
/// automorphism.
pub fn frame_mover(a: &CubicNormStructure, seed: u64, max_tries: usize) -> Result<(Vector, LinearMap)> {
    let ring = a.ring();
    if !ring.int(2).is_unit() {
        return Err(Error::UnsupportedRing { ring, operation: "frame_mover (needs 2 to be a unit)" });
    }
    ensure_len(ALBERT_RANK, a.rank())?;
    let n = ZORN_RANK;
    let mut isotropic: Vec<Vector> = Vec::new();
    for i in 0..n {
        let b = Vector::basis(ring, n, i);
        if k3(a, &b).is_zero() {
            isotropic.push(b);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for s in [1, -1] {
                let mut v = Vector::basis(ring, n, i);
                v.set(j, ring.int(s));
                if k3(a, &v).is_zero() {
                    isotropic.push(v);
                }
            }
        }
    }
    let mut rng = SeedStream::new(seed, 3);
    let one = a.basepoint().clone();
    let two = ring.int(2);
    for _ in 0..max_tries {
        let candidate = if isotropic.is_empty() {
            sqrt_candidate(a, &mut rng)
        } else {
            let alpha = rng.scalar(ring);
            let target = &alpha * &(&ring.one() - &alpha);
            let r = rng.vector(ring, n);
            let z = &isotropic[rng.below(isotropic.len() as u64) as usize];
            let pol = &(&k3(a, &(&r + z)) - &k3(a, &r)) - &k3(a, z);
            match pol.invert() {
                Ok(inv) => {
                    let s = &(&target - &k3(a, &r)) * &inv;
                    let mut u = r.clone();
                    u.add_scaled(&s, z);
                    Some((alpha, u))
                }
                Err(_) => sqrt_candidate(a, &mut rng),
            }
        };
        let Some((alpha, u)) = candidate else { continue };
        if u.is_zero() {
            continue;
        }
        let mut c = embed(2, &u);
        c.set(0, alpha.clone());
        c.set(1, &ring.one() - &alpha);
        if a.u(&c, &one) != c {
            continue;
        }
        let d = &c + &e(ring, 2);
        let mut w = one.clone();
        w.add_scaled(&-two.clone(), &d);
        if !a.n(&w).is_one() || a.u(&w, &one) != one {
            continue;
        }
        let phi = a.u_mat(&w);
        if let Some(defect) = a.automorphism_defect(&phi) {
            return Err(Error::Validation(format!("U_w is not an automorphism: {defect}")));
        }
        return Ok((w, phi));
    }
    Err(Error::SearchExhausted(max_tries))
}

/// Random u and α = (1 + √(1 − 4k))/2 with k = γ₁γ₂q₃(u), when the root exists.
fn sqrt_candidate(a: &CubicNormStructure, rng: &mut SeedStream) -> Option<(Scalar, Vector)> {
    let ring = a.ring();
    let u = rng.vector(ring, ZORN_RANK);
    let disc = &ring.one() - &(&ring.int(4) * &k3(a, &u));
    let root = disc.sqrt()?;
    let half = ring.int(2).invert().ok()?;
    Some((&(&ring.one() + &root) * &half, u))
}

/// (φ(c₁), φ(c₂), φ(c₃)), validated as a frame.
pub fn frame_image(a: &CubicNormStructure, phi: &LinearMap, f: &Frame) -> Result<Frame> {
    let [c1, c2, c3] = f.elements().clone().map(|c| phi.apply(&c));
    let g = Frame::new(c1, c2, c3)?;
    if let Some(d) = frame_defect(a, &g)? {
        return Err(Error::Validation(format!("image is not a frame: {d}")));
    }
    Ok(g)
}

/// The restrictions of φ to C_k^e → C_k^c in the coordinate bases,
/// validated as a morphism 𝓜^e → 𝓜^c.
pub fn transport(a: &CubicNormStructure, phi: &LinearMap, e: &Frame, c: &Frame) -> Result<TripleMap> {
    if let Some(d) = a.automorphism_defect(phi) {
        return Err(Error::Precondition(format!("φ is not an automorphism: {d}")));
    }
    let image = Frame::new(phi.apply(e.get(0)), phi.apply(e.get(1)), phi.apply(e.get(2)))?;
    if &image != c {
        return Err(Error::Precondition("φ does not map the first frame to the second".into()));
    }
    let de = deform(a, e)?;
    let dc = deform(a, c)?;
    let ring = de.composition.ring();
    let phi = if phi.ring() == ring { phi.clone() } else { phi.lift_to_rationals() };
    let mut maps = Vec::with_capacity(3);
    for k in 0..3 {
        let cols: Vec<Vector> = de.spaces[k]
            .basis()
            .iter()
            .map(|b| {
                dc.spaces[k]
                    .coordinates(&phi.apply(b))
                    .ok_or_else(|| Error::Validation(format!("φ does not map C{}^e into C{}^c", k + 1, k + 1)))
            })
            .collect::<Result<_>>()?;
        maps.push(Matrix::from_columns(ring, ZORN_RANK, &cols));
    }
    let [t1, t2, t3]: [Matrix; 3] = maps.try_into().expect("three maps");
    let t = TripleMap::new(t1, t2, t3)?;
    if let Some(d) = t.morphism_defect(&de.composition, &dc.composition) {
        return Err(Error::Validation(format!("transport is not a morphism: {d}")));
    }
    Ok(t)
}

/// Why φ is not an isomorphism A → A^(p), if it is not: φ(1) = p⁻¹,
/// N∘φ = N and φ U_x = U^(p)_{φx} φ for x in {b_i} ∪ {b_i + b_j}.
pub fn isotopy_iso_defect(a: &CubicNormStructure, phi: &LinearMap, p: &Vector) -> Result<Option<String>> {
    let np = a.norm(p)?;
    if !np.is_one() {
        return Err(Error::Precondition(format!("N(p) = {np}, expected 1")));
    }
    let n = a.rank();
    if phi.rows() != n || phi.cols() != n || phi.ring() != a.ring() {
        return Err(Error::dims(n, phi.rows()));
    }
    let pinv = a.inverse(p)?;
    let image = phi.apply(a.basepoint());
    if image != pinv {
        return Ok(Some(format!("φ(1) = {image} ≠ p⁻¹ = {pinv}")));
    }
    if let Some(d) = a.norm_isometry_defect(phi) {
        return Ok(Some(d));
    }
    let iso = a.isotope(p)?;
    for x in crate::quadspace::basis_sums(a.ring(), n) {
        let lhs = phi.mul(&a.u_mat(&x));
        let rhs = iso.u_mat(&phi.apply(&x)).mul(phi);
        if lhs != rhs {
            return Ok(Some(format!("φ U_x ≠ U′_φx φ at x = {x}")));
        }
    }
    Ok(None)
}

pub fn verify_isotopy_iso(a: &CubicNormStructure, phi: &LinearMap, p: &Vector) -> Result<bool> {
    Ok(isotopy_iso_defect(a, phi, p)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composition::sl3_zorn_automorphism;

    fn f7() -> Ring {
        Ring::prime_field(7).unwrap()
    }

    fn para_zorn(ring: Ring) -> CompositionOfForms {
        CompositionAlgebra::zorn(ring).unwrap().para().unwrap().composition_of()
    }

    fn h(ring: Ring, g: [i64; 3]) -> CubicNormStructure {
        hermitian_algebra(&para_zorn(ring), &Gamma::from_ints(ring, g).unwrap()).unwrap()
    }

    #[test]
    fn gamma_validation() {
        let z = Ring::Integers;
        assert!(Gamma::from_ints(z, [1, 2, 1]).is_err());
        assert!(Gamma::from_ints(z, [1, -1, 1]).is_ok());
        assert!(Gamma::parse(f7(), "1,0,1").is_err());
        assert_eq!(Gamma::parse(f7(), "1,2,3").unwrap().product(), f7().int(6));
    }

    #[test]
    fn hermitian_examples() {
        for ring in [Ring::Integers, f7()] {
            let a = h(ring, [1, 1, 1]);
            let one = a.basepoint().clone();
            assert!(a.norm(&one).unwrap().is_one());
            assert_eq!(a.adjoint(&one).unwrap(), one);
            let e12 = &e(ring, 0) + &e(ring, 1);
            assert!(a.norm(&e12).unwrap().is_zero());
            assert_eq!(a.adjoint(&e12).unwrap(), e(ring, 2));
            assert_eq!(a.trace_bilinear(&one, &one).unwrap(), ring.int(3));
            assert_eq!(a.quadratic_trace(&one).unwrap(), ring.int(3));
            assert_eq!(a.u_op(&e(ring, 0), &one).unwrap(), e(ring, 0));
            assert!(a.inverse(&e(ring, 0)).is_err());
            // u₁[23] × 1 = −u₁[23]
            let u = embed(0, &Vector::from_ints(ring, &[1, 2, 0, 0, 3, 0, 0, 1]));
            assert_eq!(a.cross(&u, &one).unwrap(), -&u);
        }
    }

    #[test]
    fn cubic_operations_on_h() {
        let ring = f7();
        let a = h(ring, [1, 2, 3]);
        let mut rng = crate::harness::rng::SeedStream::new(3, 0);
        let zero = Vector::zero(ring, ALBERT_RANK);
        let two = ring.int(2);
        for _ in 0..5 {
            let x = rng.vector(ring, ALBERT_RANK);
            let y = rng.vector(ring, ALBERT_RANK);
            assert_eq!(a.norm(&x.scale(&two)).unwrap(), &ring.int(8) * &a.norm(&x).unwrap());
            assert_eq!(a.cross(&x, &zero).unwrap(), zero);
            assert_eq!(a.cross(&x, &x).unwrap(), a.adjoint(&x).unwrap().scale(&two));
            assert_eq!(a.u_op(&x, &zero).unwrap(), zero);
            assert_eq!(a.u_op(a.basepoint(), &y).unwrap(), y);
            assert_eq!(a.triple_product(&x, &y, &x).unwrap(), a.u_op(&x, &y).unwrap().scale(&two));
            assert_eq!(a.trace_bilinear(&x, &y).unwrap(), a.trace_bilinear(&y, &x).unwrap());
        }
        assert!(a.quadratic_trace(&zero).unwrap().is_zero());
        assert_eq!(a.inverse(a.basepoint()).unwrap(), *a.basepoint());
        let id = Matrix::identity(ring, ALBERT_RANK);
        assert!(a.is_norm_isometry(&id) && a.is_automorphism(&id));
        // 2·Id scales N by 8 = 1 in 𝔽₇, so use 3
        assert!(!a.is_norm_isometry(&id.scale(&ring.int(3))));
        // N∘φ = N with φ(1) = p⁻¹ ≠ 1: an isotopy, not an automorphism
        let x = a.basepoint() + &embed(1, &Vector::from_ints(ring, &[1, 0, 0, 0, 0, 0, 1, 0]));
        let (b, _) = a.normalize_isotope(&x).unwrap();
        let u = a.u_matrix(&a.inverse(&b).unwrap()).unwrap();
        assert!(a.is_norm_isometry(&u));
        assert!(!a.is_automorphism(&u));
        assert!(!a.on_unit_sphere(&zero));
        let r = a.check_jordan_axioms(0, 1);
        assert_eq!(r.get("unit_operator").unwrap().passed, 27);
        assert!(r.all_passed());
    }

    #[test]
    fn isotope_of_an_isotope_returns_to_a() {
        let ring = f7();
        let a = h(ring, [1, 1, 1]);
        let x = a.basepoint() + &embed(0, &Vector::from_ints(ring, &[0, 1, 3, 0, 0, 0, 2, 0]));
        let (r, _) = a.normalize_isotope(&x).unwrap();
        let p = a.square(&r).unwrap();
        let b = a.isotope(&p).unwrap();
        // (A^(p))^(q) = A^(U_p q), and U_p p⁻² = 1
        let q = a.square(&a.inverse(&p).unwrap()).unwrap();
        let c = b.isotope(&q).unwrap();
        assert_eq!(c.basepoint(), a.basepoint());
        for i in 0..ALBERT_RANK {
            let v = Vector::basis(ring, ALBERT_RANK, i);
            assert_eq!(c.u_matrix(&v).unwrap(), a.u_matrix(&v).unwrap());
        }
        // with p = r², U_r maps A^(p) onto A = (A^(p))^(q)
        assert!(verify_isotopy_iso(&b, &a.u_matrix(&r).unwrap(), &q).unwrap());
        assert!(!verify_isotopy_iso(&b, &Matrix::identity(ring, ALBERT_RANK), &q).unwrap());
    }

    #[test]
    fn traces_and_circles_follow_the_closed_formulas() {
        let q = Ring::Rationals;
        let m = para_zorn(q);
        let g = Gamma::from_ints(q, [1, 2, 3]).unwrap();
        let a = hermitian_algebra(&m, &g).unwrap();
        let u = Vector::from_ints(q, &[1, -2, 0, 3, 1, 0, 2, -1]);
        let v = Vector::from_ints(q, &[0, 1, 1, 0, -1, 2, 0, 3]);
        for i in 0..3 {
            let qi = m.space(i + 1);
            assert_eq!(a.trace_bilinear(&embed(i, &u), &embed(i, &v)).unwrap(), &g.complement(i) * &qi.polarize(&u, &v).unwrap());
            assert_eq!(a.quadratic_trace(&embed(i, &u)).unwrap(), -&(&g.complement(i) * &qi.evaluate(&u).unwrap()));
        }
        let x = embed(2, &u);
        let y = embed(1, &v);
        let expected = embed(0, &m.m().apply(&u, &v).scale(&g.values()[0]));
        assert_eq!(a.circle(&x, &y).unwrap(), expected);
        let one = a.basepoint().clone();
        assert_eq!(a.circle(&one, &x).unwrap(), x.scale(&q.int(2)));
        let sum = Vector::from_ints(f7(), &[1, 1, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        let a7 = h(f7(), [1, 2, 3]);
        assert_eq!(a7.norm(&sum).unwrap(), f7().int(2));
        assert!(!a7.on_unit_sphere(&sum));
    }

    #[test]
    fn h3_of_zorn() {
        let ring = f7();
        let a = h3(&CompositionAlgebra::zorn(ring).unwrap(), &Gamma::ones(ring)).unwrap();
        assert!(a.check_jordan_axioms(10, 1).all_passed());
        let d = a.lift_to_rationals().trace_matrix().determinant();
        assert!(!d.is_zero());
    }

    #[test]
    fn iota_of_sl3_automorphisms() {
        let ring = f7();
        let a = h3(&CompositionAlgebra::zorn(ring).unwrap(), &Gamma::ones(ring)).unwrap();
        let t = sl3_zorn_automorphism(&Matrix::from_int_rows(ring, &[&[1, 2, 0], &[0, 1, 0], &[0, 0, 1]])).unwrap();
        let tt = TripleMap::diagonal(&t).unwrap();
        assert!(a.is_automorphism(&iota(&tt)));
        assert!(iota(&TripleMap::identity(ring, 8)).is_identity());
        let bad = TripleMap::new(t.clone(), Matrix::identity(ring, 8), Matrix::identity(ring, 8)).unwrap();
        assert!(!a.is_automorphism(&iota(&bad)));
    }

    #[test]
    fn distinguished_frame_and_peirce_spaces() {
        let ring = f7();
        let a = h(ring, [1, 1, 1]);
        let f = Frame::distinguished(ring);
        assert!(is_frame(&a, &f).unwrap());
        let bad = Frame::new(a.basepoint().clone(), Vector::zero(ring, 27), Vector::zero(ring, 27)).unwrap();
        assert!(!is_frame(&a, &bad).unwrap());
        let p1 = peirce_one(&a, &e(ring, 0)).unwrap();
        assert_eq!(p1.len(), 16);
        for v in &p1 {
            assert!((0..3).all(|i| v.get(i).is_zero()));
            assert!((block(0)..block(1)).all(|i| v.get(i).is_zero()));
        }
        assert!(peirce_one(&a, a.basepoint()).unwrap().is_empty());
        let spaces = coordinate_spaces(&a, &f).unwrap();
        for (i, s) in spaces.iter().enumerate() {
            assert_eq!(s.dim(), 8);
            for (k, b) in s.basis().iter().enumerate() {
                assert_eq!(b, &e(ring, block(i) + k));
            }
        }
    }

    #[test]
    fn deformation_at_the_distinguished_frame() {
        for ring in [Ring::Rationals, f7()] {
            let m = para_zorn(ring);
            for g in [[1, 1, 1], [1, 2, 3]] {
                let gamma = Gamma::from_ints(ring, g).unwrap();
                let a = hermitian_algebra(&m, &gamma).unwrap();
                let d = deform(&a, &Frame::distinguished(ring)).unwrap();
                let scaled = m.scale(gamma.values()).unwrap();
                assert!(TripleMap::identity(ring, 8).is_morphism(&d.composition, &scaled));
            }
        }
        let z = Ring::Integers;
        let d = deform(&h(z, [1, 1, 1]), &Frame::distinguished(z)).unwrap();
        assert_eq!(d.composition.ring(), Ring::Rationals);
    }

    #[test]
    fn frame_movers_and_transport() {
        let ring = f7();
        let a = h(ring, [1, 2, 3]);
        let e0 = Frame::distinguished(ring);
        let (w, phi) = frame_mover(&a, 11, 100).unwrap();
        assert!(a.is_automorphism(&phi));
        assert_eq!(phi.apply(a.basepoint()), *a.basepoint());
        assert!(a.on_unit_sphere(&w));
        let c = frame_image(&a, &phi, &e0).unwrap();
        assert_ne!(c, e0);
        let t = transport(&a, &phi, &e0, &c).unwrap();
        let de = deform(&a, &e0).unwrap();
        let dc = deform(&a, &c).unwrap();
        assert!(t.is_morphism(&de.composition, &dc.composition));
        let id = transport(&a, &Matrix::identity(ring, 27), &e0, &e0).unwrap();
        assert_eq!(id, TripleMap::identity(ring, 8));
        assert!(frame_mover(&h(Ring::prime_field(2).unwrap(), [1, 1, 1]), 0, 5).is_err());
    }

    #[test]
    fn transport_of_iota_and_functoriality() {
        let ring = f7();
        let a = h(ring, [1, 2, 3]);
        let e0 = Frame::distinguished(ring);
        let t = sl3_zorn_automorphism(&Matrix::from_int_rows(ring, &[&[1, 0, 3], &[0, 1, 0], &[0, 0, 1]])).unwrap();
        let tt = TripleMap::diagonal(&t).unwrap();
        assert_eq!(transport(&a, &iota(&tt), &e0, &e0).unwrap(), tt);
        assert_eq!(frame_image(&a, &Matrix::identity(ring, ALBERT_RANK), &e0).unwrap(), e0);
        let (_, phi) = frame_mover(&a, 2, 100).unwrap();
        let (_, psi) = frame_mover(&a, 9, 100).unwrap();
        let twice = frame_image(&a, &psi, &frame_image(&a, &phi, &e0).unwrap()).unwrap();
        assert_eq!(frame_image(&a, &psi.mul(&phi), &e0).unwrap(), twice);
    }

    #[test]
    fn isotopy_isomorphisms() {
        let ring = f7();
        let a = h(ring, [1, 1, 1]);
        let one = a.basepoint().clone();
        let id = Matrix::identity(ring, 27);
        assert!(verify_isotopy_iso(&a, &id, &one).unwrap());
        let (_, phi) = frame_mover(&a, 5, 100).unwrap();
        assert!(verify_isotopy_iso(&a, &phi, &one).unwrap());
        // U_{a⁻¹}: A → A^(a²) for N(a) = 1
        let x = &one + &embed(2, &Vector::from_ints(ring, &[1, 0, 2, 0, 0, 0, 0, 0]));
        let (b, _) = a.normalize_isotope(&x).unwrap();
        let p = a.square(&b).unwrap();
        let u = a.u_matrix(&a.inverse(&b).unwrap()).unwrap();
        assert!(verify_isotopy_iso(&a, &u, &p).unwrap());
        assert!(!verify_isotopy_iso(&a, &id, &p).unwrap());
        assert!(verify_isotopy_iso(&a, &id, &e(ring, 0)).is_err());
    }
}
