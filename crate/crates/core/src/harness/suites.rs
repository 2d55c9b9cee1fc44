//! The suite registry: every identity has a named, seeded, reproducible
//! check, and every suite has a mutation-based negative control.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::albert::{self, block, Frame, Gamma, ALBERT_RANK};
use crate::composition::{zorn_product, BilinearMap, CompositionAlgebra, CompositionOfForms, TripleMap, ZORN_RANK};
use crate::cubic::{isotope_basis_pairs, isotope_coherence, CubicNormStructure};
use crate::error::{Error, Result};
use crate::harness::rng::SeedStream;
use crate::linalg::{LinearMap, Matrix, Vector};
use crate::quadspace::QuadraticSpace;
use crate::report::{Check, Counterexample, Report, Status, Tally};
use crate::scalars::{Ring, Scalar};

pub const SUITES: [&str; 10] = ["zorn", "para", "companions", "jordan", "cns", "iota", "isotope", "frames", "deform", "octonionify"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Candidates examined per space by `find_norm_one_points`.
    pub norm_one: usize,
    /// Attempts per `frame_mover` call.
    pub frame_tries: usize,
    /// Frame movers used by the frames and deform suites.
    pub frame_movers: usize,
    /// Isotopes built by the isotope suite.
    pub isotopes: usize,
    /// Triples used by the iota suite.
    pub triples: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { norm_one: 100_000, frame_tries: 200, frame_movers: 5, isotopes: 20, triples: 50 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub suite: String,
    pub ring: Ring,
    pub samples: usize,
    pub seed: u64,
    pub gamma: Option<Gamma>,
    pub caps: Caps,
}

impl SuiteConfig {
    pub fn new(suite: &str, ring: Ring, samples: usize, seed: u64) -> Self {
        SuiteConfig { suite: suite.to_string(), ring, samples, seed, gamma: None, caps: Caps::default() }
    }

    pub fn with_gamma(mut self, gamma: Gamma) -> Self {
        self.gamma = Some(gamma);
        self
    }

    fn gamma(&self) -> Gamma {
        self.gamma.clone().unwrap_or_else(|| Gamma::ones(self.ring))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub ring: String,
    pub samples: usize,
    pub seed: u64,
    pub gamma: Option<String>,
    pub caps: Caps,
    pub mutate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    SkipOnly,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::SkipOnly => 3,
        }
    }

    fn of(checks: &[Check]) -> Self {
        if checks.iter().any(|c| c.status == Status::Fail) {
            Verdict::Fail
        } else if !checks.is_empty() && checks.iter().all(|c| c.status == Status::Skip) {
            Verdict::SkipOnly
        } else {
            Verdict::Pass
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: ConfigEcho,
    pub checks: Vec<Check>,
    /// The checks run on the mutated fixture of a negative control.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutated: Option<Vec<Check>>,
    pub verdict: Verdict,
    pub wall_time_ms: u64,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The JSON with the timing field removed.
    pub fn to_json_untimed(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("object").remove("wall_time_ms");
        serde_json::to_string_pretty(&v).expect("report serializes")
    }

    /// A fixed-width summary table.
    pub fn table(&self) -> String {
        let mut out = format!("suite {} ({}, samples {}, seed {})\n", self.suite, self.config.ring, self.config.samples, self.config.seed);
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .chain(self.mutated.iter().flatten().map(|c| c.name.len() + "mutated.".len()))
            .max()
            .unwrap_or(5)
            .max(5);
        out.push_str(&format!("{:<width$}  {:<6} {:>8} {:>8}\n", "check", "status", "passed", "failed"));
        let mut row = |c: &Check| {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skip => "skip",
            };
            out.push_str(&format!("{:<width$}  {:<6} {:>8} {:>8}", c.name, status, c.passed, c.failed));
            if let Some(w) = &c.counterexample {
                out.push_str(&format!("  #{}: {}", w.index, w.detail));
            } else if let Some(n) = &c.note {
                out.push_str(&format!("  ({n})"));
            }
            out.push('\n');
        };
        for c in &self.checks {
            row(c);
        }
        if let Some(m) = &self.mutated {
            for c in m {
                row(&c.clone().prefixed("mutated"));
            }
        }
        let verdict = match self.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::SkipOnly => "skip-only",
        };
        out.push_str(&format!("verdict: {verdict} ({} ms)\n", self.wall_time_ms));
        out
    }
}

/// Everything a suite inspects; mutations act on these values.
enum Fixture {
    Algebra(CompositionAlgebra),
    Composition(CompositionOfForms),
    Cubic(CubicNormStructure),
    Iota { algebra: CubicNormStructure, para: CompositionAlgebra, triples: Vec<TripleMap> },
    Isotopes { algebra: CubicNormStructure, isotopes: Vec<(Vector, Vector, CubicNormStructure)> },
}

fn para_zorn(ring: Ring) -> Result<CompositionAlgebra> {
    CompositionAlgebra::zorn(ring)?.para()
}

/// Over ℤ the Peirce and frame checks work over ℚ.
fn field_ring(ring: Ring) -> Ring {
    if ring.is_field() {
        ring
    } else {
        ring.fraction_field()
    }
}

/// A user-supplied structure to run a suite on instead of the built-in
/// fixture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SuiteInput {
    Algebra(CompositionAlgebra),
    Composition(CompositionOfForms),
    Cubic(CubicNormStructure),
}

impl SuiteInput {
    fn ring(&self) -> Ring {
        match self {
            SuiteInput::Algebra(c) => c.ring(),
            SuiteInput::Composition(m) => m.ring(),
            SuiteInput::Cubic(a) => a.ring(),
        }
    }
}

fn isotope_fixture(algebra: CubicNormStructure, cfg: &SuiteConfig) -> Result<Fixture> {
    let mut rng = SeedStream::new(cfg.seed, 11);
    let mut isotopes = Vec::new();
    let wanted = cfg.samples.min(cfg.caps.isotopes);
    let mut draws = 0;
    while isotopes.len() < wanted {
        draws += 1;
        if draws > 100 * wanted.max(1) {
            return Err(Error::SearchExhausted(draws));
        }
        let p = random_invertible(&algebra, &mut rng);
        if !algebra.norm(&p)?.is_unit() {
            continue;
        }
        let (q, _) = algebra.normalize_isotope(&p)?;
        let iso = algebra.isotope_unchecked(&q)?;
        isotopes.push((p, q, iso));
    }
    Ok(Fixture::Isotopes { algebra, isotopes })
}

fn from_input(cfg: &SuiteConfig, input: &SuiteInput) -> Result<Fixture> {
    if input.ring() != cfg.ring {
        return Err(Error::RingMismatch(cfg.ring, input.ring()));
    }
    let wrong = |expected: &str| Error::Precondition(format!("suite {:?} expects {expected}", cfg.suite));
    Ok(match (cfg.suite.as_str(), input) {
        ("zorn" | "para", SuiteInput::Algebra(c)) => Fixture::Algebra(c.clone()),
        ("zorn" | "para", _) => return Err(wrong("a composition algebra")),
        ("companions" | "octonionify", SuiteInput::Algebra(c)) => Fixture::Composition(c.composition_of()),
        ("companions" | "octonionify", SuiteInput::Composition(m)) => Fixture::Composition(m.clone()),
        ("companions" | "octonionify", _) => return Err(wrong("a composition of quadratic forms")),
        ("jordan" | "cns" | "frames" | "deform" | "isotope", SuiteInput::Composition(m)) => {
            let a = albert::hermitian_unchecked(m, &cfg.gamma())?;
            return from_input(cfg, &SuiteInput::Cubic(a));
        }
        ("isotope", SuiteInput::Cubic(a)) => isotope_fixture(a.clone(), cfg)?,
        ("jordan" | "cns", SuiteInput::Cubic(a)) => Fixture::Cubic(a.clone()),
        ("frames" | "deform", SuiteInput::Cubic(a)) if a.rank() == ALBERT_RANK => Fixture::Cubic(a.clone()),
        ("jordan" | "cns" | "frames" | "deform" | "isotope", _) => return Err(wrong("a rank-27 cubic norm structure or a composition of forms")),
        ("iota", _) => return Err(Error::Precondition("suite \"iota\" builds its own fixture".into())),
        (other, _) => return Err(Error::Parse(format!("unknown suite {other:?}; known suites: {}", SUITES.join(", ")))),
    })
}

fn build(cfg: &SuiteConfig, input: Option<&SuiteInput>) -> Result<Fixture> {
    if let Some(input) = input {
        return from_input(cfg, input);
    }
    let ring = cfg.ring;
    Ok(match cfg.suite.as_str() {
        "zorn" => Fixture::Algebra(CompositionAlgebra::zorn(ring)?),
        "para" => Fixture::Algebra(para_zorn(ring)?),
        "companions" | "octonionify" => {
            let m = para_zorn(ring)?.composition_of();
            Fixture::Composition(match &cfg.gamma {
                Some(g) => m.scale(g.values())?,
                None => m,
            })
        }
        "jordan" | "cns" | "frames" | "deform" => {
            Fixture::Cubic(albert::hermitian_unchecked(&para_zorn(ring)?.composition_of(), &cfg.gamma())?)
        }
        "iota" => {
            let para = para_zorn(ring)?;
            let algebra = albert::hermitian_unchecked(&para.composition_of(), &cfg.gamma())?;
            let mut rng = SeedStream::new(cfg.seed, 10);
            let triples = (0..cfg.samples.min(cfg.caps.triples))
                .map(|_| {
                    let t = crate::composition::sl3_zorn_automorphism(&random_sl3(ring, &mut rng))?;
                    TripleMap::diagonal(&t)
                })
                .collect::<Result<_>>()?;
            Fixture::Iota { algebra, para, triples }
        }
        "isotope" => isotope_fixture(albert::hermitian_unchecked(&para_zorn(ring)?.composition_of(), &cfg.gamma())?, cfg)?,
        other => return Err(Error::Parse(format!("unknown suite {other:?}; known suites: {}", SUITES.join(", ")))),
    })
}

/// A product of elementary matrices, so det = 1.
pub fn random_sl3(ring: Ring, rng: &mut SeedStream) -> Matrix {
    let mut a = Matrix::identity(ring, 3);
    for _ in 0..4 {
        let i = rng.below(3) as usize;
        let j = (i + 1 + rng.below(2) as usize) % 3;
        let mut e = Matrix::identity(ring, 3);
        e.set(i, j, rng.scalar(ring));
        a = a.mul(&e);
    }
    a
}

/// Sparse points keep isotopes over ℚ small: the unity plus a few
/// random coordinates.
fn random_invertible(a: &CubicNormStructure, rng: &mut SeedStream) -> Vector {
    let ring = a.ring();
    let mut p = a.basepoint().clone();
    for _ in 0..4 {
        let i = rng.below(ALBERT_RANK as u64) as usize;
        p.set(i, &p.get(i).clone() + &rng.scalar(ring));
    }
    p
}

fn bump(s: &Scalar) -> Scalar {
    s + &s.ring().one()
}

/// Perturbs one structure constant, chosen by the seed.
fn mutate(fixture: &mut Fixture, cfg: &SuiteConfig) -> String {
    let mut rng = SeedStream::new(cfg.seed, 99);
    let mut pick = |n: usize| rng.below(n as u64) as usize;
    match fixture {
        Fixture::Algebra(c) => {
            let (i, j, k) = (pick(8), pick(8), pick(8));
            let mut mult = c.mult().clone();
            mult.set(i, j, k, bump(mult.get(i, j, k)));
            *c = CompositionAlgebra::from_parts_unchecked(c.space().clone(), mult, c.unity().cloned(), c.kind());
            format!("mult[{i}][{j}][{k}] += 1")
        }
        Fixture::Composition(m) => {
            let (i, j, k) = (pick(8), pick(8), pick(8));
            let mut t = m.m().clone();
            t.set(i, j, k, bump(t.get(i, j, k)));
            *m = CompositionOfForms::from_parts_unchecked(m.spaces().clone(), t);
            format!("m[{i}][{j}][{k}] += 1")
        }
        Fixture::Cubic(a) => match cfg.suite.as_str() {
            "cns" => {
                let terms = a.norm_form().terms();
                let (m, c) = terms[pick(terms.len())].clone();
                a.norm_form_mut().set_coeff(m, bump(&c));
                format!("norm coefficient {m:?} += 1")
            }
            "frames" => {
                let i = pick(3);
                let t = a.trace_matrix_mut();
                let v = bump(t.get(i, i));
                t.set(i, i, v);
                format!("T[{i}][{i}] += 1")
            }
            _ => {
                // a product term of the u-block adjoint coordinates
                let k = block(0) + pick(3 * ZORN_RANK);
                let coord = &a.adjoint_map().base()[k];
                let products: Vec<&(usize, usize, Scalar)> = coord.iter().filter(|t| t.0 >= 3).collect();
                let (i, j, c) = products[pick(products.len())].clone();
                a.adjoint_map_mut().set_base_coeff(k, i, j, bump(&c));
                format!("adjoint coordinate {k}, monomial ({i}, {j}) += 1")
            }
        },
        Fixture::Iota { triples, .. } => {
            let (r, c) = (pick(8), pick(8));
            let mut maps = triples[0].maps().clone();
            let v = bump(maps[0].get(r, c));
            maps[0].set(r, c, v);
            triples[0] = TripleMap::from_maps_unchecked(maps);
            format!("t1[{r}][{c}] of the first triple += 1")
        }
        Fixture::Isotopes { isotopes, .. } => {
            let (r, c) = (pick(ALBERT_RANK), pick(ALBERT_RANK));
            let a = &mut isotopes[0].2;
            match a.adjoint_map_mut().post_mut() {
                Some(post) => {
                    let v = bump(post.get(r, c));
                    post.set(r, c, v);
                    format!("adjoint post[{r}][{c}] of the first isotope += 1")
                }
                None => {
                    let t = a.trace_matrix_mut();
                    let v = bump(t.get(r, c));
                    t.set(r, c, v);
                    format!("trace[{r}][{c}] of the first isotope += 1")
                }
            }
        }
    }
}

/// Adds the counts of `check` into an accumulated check of the same name.
fn accumulate(into: &mut Vec<Check>, check: Check, label: &str) {
    match into.iter_mut().find(|c| c.name == check.name) {
        Some(c) => {
            c.passed += check.passed;
            c.failed += check.failed;
            if c.counterexample.is_none() {
                if let Some(mut w) = check.counterexample {
                    w.detail = format!("{label}: {}", w.detail);
                    c.counterexample = Some(w);
                }
            }
            if check.status == Status::Fail {
                c.status = Status::Fail;
            }
        }
        None => {
            let mut c = check;
            if let Some(w) = &mut c.counterexample {
                w.detail = format!("{label}: {}", w.detail);
            }
            into.push(c);
        }
    }
}

fn errored<T>(name: &str, r: Result<T>) -> std::result::Result<T, Check> {
    r.map_err(|e| Check::error(name, e.to_string()))
}

fn run_checks(fixture: &Fixture, cfg: &SuiteConfig) -> Vec<Check> {
    match fixture {
        Fixture::Algebra(c) if cfg.suite == "zorn" => zorn_checks(c, cfg),
        Fixture::Algebra(c) => para_checks(c, cfg),
        Fixture::Composition(m) if cfg.suite == "companions" => companion_checks(m, cfg),
        Fixture::Composition(m) => octonionify_checks(m, cfg),
        Fixture::Cubic(a) => match cfg.suite.as_str() {
            "jordan" => a.check_jordan_axioms(cfg.samples, cfg.seed).checks,
            "cns" => a.check_cns_axioms(cfg.samples, cfg.seed).checks,
            "frames" => frame_checks(a, cfg),
            _ => deform_checks(a, cfg),
        },
        Fixture::Iota { algebra, para, triples } => iota_checks(algebra, para, triples),
        Fixture::Isotopes { algebra, isotopes } => isotope_checks(algebra, isotopes, cfg),
    }
}

fn sampled_multiplicativity(c: &CompositionAlgebra, cfg: &SuiteConfig) -> Check {
    let ring = c.ring();
    let mut rng = SeedStream::new(cfg.seed, 20);
    let mut t = Tally::new("sampled_multiplicativity");
    for _ in 0..cfg.samples {
        let (x, y) = (rng.vector(ring, 8), rng.vector(ring, 8));
        let lhs = c.space().eval(&c.mult().apply(&x, &y));
        let rhs = &c.space().eval(&x) * &c.space().eval(&y);
        t.record(lhs == rhs, |i| Counterexample::new(i, &[("x", &x), ("y", &y)], format!("q(xy) = {lhs}, q(x)q(y) = {rhs}")));
    }
    t.finish()
}

fn zorn_checks(c: &CompositionAlgebra, cfg: &SuiteConfig) -> Vec<Check> {
    let ring = c.ring();
    let mut out = c.verify().checks;
    if ring == Ring::PrimeField(2) {
        let all: Vec<Vector> = (0..256u32).map(|m| Vector::from_ints(ring, &(0..8).map(|b| ((m >> b) & 1) as i64).collect::<Vec<_>>())).collect();
        let norms: Vec<Scalar> = all.iter().map(|v| c.space().eval(v)).collect();
        let mut t = Tally::new("exhaustive_multiplicativity");
        for (x, qx) in all.iter().zip(&norms) {
            for (y, qy) in all.iter().zip(&norms) {
                let lhs = c.space().eval(&c.mult().apply(x, y));
                let rhs = qx * qy;
                t.record(lhs == rhs, |i| Counterexample::new(i, &[("x", x), ("y", y)], format!("q(xy) = {lhs}, q(x)q(y) = {rhs}")));
            }
        }
        out.push(t.finish());
    } else {
        out.push(Check::skip("exhaustive_multiplicativity", "only enumerated over Fp:2"));
    }
    out.push(sampled_multiplicativity(c, cfg));
    // the Zorn formula itself, against the stored tensor
    let mut rng = SeedStream::new(cfg.seed, 21);
    let mut t = Tally::new("vector_matrix_product");
    for _ in 0..cfg.samples {
        let (x, y) = (rng.vector(ring, 8), rng.vector(ring, 8));
        let (a, b) = (c.mult().apply(&x, &y), zorn_product(&x, &y));
        t.record(a == b, |i| Counterexample::new(i, &[("x", &x), ("y", &y)], "tensor product differs from the vector-matrix product"));
    }
    out.push(t.finish());
    if let Some(e) = c.unity() {
        let mut rng = SeedStream::new(cfg.seed, 22);
        let mut t = Tally::new("conjugation");
        for _ in 0..cfg.samples {
            let x = rng.vector(ring, 8);
            let ok = c.conjugate(&x).and_then(|xb| {
                let back = c.conjugate(&xb)?;
                Ok(back == x && c.mult().apply(&x, &xb) == e.scale(&c.space().eval(&x)))
            });
            t.record(matches!(ok, Ok(true)), |i| Counterexample::new(i, &[("x", &x)], "x̄̄ ≠ x or x·x̄ ≠ q(x)1"));
        }
        out.push(t.finish());
    }
    out
}

fn para_checks(c: &CompositionAlgebra, cfg: &SuiteConfig) -> Vec<Check> {
    let ring = c.ring();
    let mut out = c.verify().checks;
    out.push(sampled_multiplicativity(c, cfg));
    let mut rng = SeedStream::new(cfg.seed, 23);
    let mut t = Tally::new("delta_cyclic");
    let delta = |x: &Vector, y: &Vector, z: &Vector| c.space().polar(&c.mult().apply(z, y), x);
    for _ in 0..cfg.samples {
        let (x, y, z) = (rng.vector(ring, 8), rng.vector(ring, 8), rng.vector(ring, 8));
        let (a, b) = (delta(&x, &y, &z), delta(&y, &z, &x));
        t.record(a == b, |i| Counterexample::new(i, &[("u1", &x), ("u2", &y), ("u3", &z)], format!("Δ(u1,u2,u3) = {a}, Δ(u2,u3,u1) = {b}")));
    }
    out.push(t.finish());
    out
}

fn companion_checks(m: &CompositionOfForms, cfg: &SuiteConfig) -> Vec<Check> {
    let ring = m.ring();
    let mut out = m.verify().checks;
    let (m2, m3) = match errored("companions", m.companions()) {
        Ok(x) => x,
        Err(c) => {
            out.push(c);
            return out;
        }
    };
    out.push(Check::pass("companion_adjunction", 512).with_note("validated on all basis triples during construction"));
    let [q1, q2, q3] = m.spaces();
    let law = |name: &str, t: &BilinearMap, ql: &QuadraticSpace, qr: &QuadraticSpace, qo: &QuadraticSpace, stream: u64| {
        let mut rng = SeedStream::new(cfg.seed, stream);
        let mut tally = Tally::new(name);
        for _ in 0..cfg.samples {
            let (x, y) = (rng.vector(ring, 8), rng.vector(ring, 8));
            let lhs = qo.eval(&t.apply(&x, &y));
            let rhs = &ql.eval(&x) * &qr.eval(&y);
            tally.record(lhs == rhs, |i| Counterexample::new(i, &[("x", &x), ("y", &y)], format!("{lhs} vs {rhs}")));
        }
        tally.finish()
    };
    out.push(law("m2_composition", &m2, q1, q3, q2, 24));
    out.push(law("m3_composition", &m3, q2, q1, q3, 25));
    let mut rng = SeedStream::new(cfg.seed, 26);
    let mut t = Tally::new("companion_bilinearity");
    for _ in 0..cfg.samples {
        let (x, y, z) = (rng.vector(ring, 8), rng.vector(ring, 8), rng.vector(ring, 8));
        let ok = m2.apply(&x, &(&y + &z)) == &m2.apply(&x, &y) + &m2.apply(&x, &z)
            && m3.apply(&x, &(&y + &z)) == &m3.apply(&x, &y) + &m3.apply(&x, &z);
        t.record(ok, |i| Counterexample::new(i, &[("x", &x), ("y", &y), ("z", &z)], "companion is not additive"));
    }
    out.push(t.finish());
    out
}

fn octonionify_checks(m: &CompositionOfForms, cfg: &SuiteConfig) -> Vec<Check> {
    let mut out = m.verify().checks;
    let Some((a, b)) = m.find_norm_one_points(cfg.caps.norm_one) else {
        out.push(Check::skip("norm_one_points", format!("no norm-one points within {} candidates", cfg.caps.norm_one)));
        return out;
    };
    out.push(Check::pass("norm_one_points", 1));
    let o = match errored("octonionify", m.octonionify(&a, &b)) {
        Ok(o) => o,
        Err(c) => {
            out.push(c);
            return out;
        }
    };
    out.extend(o.algebra.verify().checks.into_iter().map(|c| c.prefixed("octonion")));
    let morphism = |name: &str, t: &TripleMap, dst: &CompositionOfForms| match t.morphism_defect(m, dst) {
        None => Check::pass(name, 1),
        Some(d) => Check::error(name, d),
    };
    out.push(morphism("iso_morphism", &o.iso, &o.algebra.composition_of()));
    match o.algebra.para() {
        Ok(p) => out.push(morphism("para_iso_morphism", &o.para_iso, &p.composition_of())),
        Err(e) => out.push(Check::error("para_iso_morphism", e.to_string())),
    }
    let unity = o.algebra.unity().expect("octonion unity");
    out.push(if o.algebra.space().eval(unity).is_one() { Check::pass("unity_norm_one", 1) } else { Check::error("unity_norm_one", "q(e) ≠ 1") });
    out
}

fn iota_checks(a: &CubicNormStructure, para: &CompositionAlgebra, triples: &[TripleMap]) -> Vec<Check> {
    let ring = a.ring();
    let mc = para.composition_of();
    let mut morph = Tally::new("related_triple");
    let mut auto = Tally::new("iota_automorphism");
    let mut hom = Tally::new("iota_homomorphism");
    let dummy = Vector::zero(ring, 0);
    for (k, t) in triples.iter().enumerate() {
        let d = t.morphism_defect(&mc, &mc);
        morph.record(d.is_none(), |i| Counterexample::new(i, &[("triple", &dummy)], format!("triple {k}: {}", d.clone().unwrap())));
        let phi = albert::iota(t);
        let d = a.automorphism_defect(&phi);
        auto.record(d.is_none(), |i| Counterexample::new(i, &[], format!("triple {k}: {}", d.clone().unwrap())));
        let s = &triples[(k + 1) % triples.len()];
        let composed = albert::iota(&s.compose(t)) == albert::iota(s).mul(&phi);
        let inverse = t.inverse().map(|ti| albert::iota(&ti)).ok() == phi.inverse().ok();
        hom.record(composed && inverse, |i| Counterexample::new(i, &[], format!("triple {k}: ι does not respect composition or inverses")));
    }
    let mut out = vec![morph.finish(), auto.finish(), hom.finish()];
    if triples.is_empty() {
        out = out.into_iter().map(|c| Check::skip(c.name, "no triples sampled")).collect();
    }
    // a non-morphism triple must not give an automorphism
    let t = triples.first().cloned().unwrap_or_else(|| TripleMap::identity(ring, 8));
    let mut maps = t.maps().clone();
    maps[1] = maps[1].scale(&ring.int(2));
    let bad = TripleMap::from_maps_unchecked(maps);
    out.push(if a.is_automorphism(&albert::iota(&bad)) {
        Check::error("non_morphism_rejected", "ι of (t1, 2t2, t3) preserves the norm")
    } else {
        Check::pass("non_morphism_rejected", 1)
    });
    out
}

fn isotope_checks(a: &CubicNormStructure, isotopes: &[(Vector, Vector, CubicNormStructure)], cfg: &SuiteConfig) -> Vec<Check> {
    let mut out: Vec<Check> = Vec::new();
    let mut norm = Tally::new("normalized_norm");
    for (p, q, _) in isotopes {
        let nq = a.n(q);
        norm.record(nq.is_one(), |i| Counterexample::new(i, &[("p", p), ("p′", q)], format!("N(p′) = {nq}")));
    }
    out.push(norm.finish());
    for (k, (_, q, iso)) in isotopes.iter().enumerate() {
        let label = format!("isotope {k}");
        let mut basepoint = Tally::new("isotope_basepoint");
        let expected = a.inverse(q).ok();
        basepoint.record(expected.as_ref() == Some(iso.basepoint()), |i| Counterexample::new(i, &[("p", q), ("basepoint", iso.basepoint())], "basepoint ≠ p⁻¹"));
        accumulate(&mut out, basepoint.finish(), &label);
        for c in iso.check_cns_axioms(4, cfg.seed).checks {
            accumulate(&mut out, c.prefixed("isotope_cns"), &label);
        }
        accumulate(&mut out, isotope_coherence(a, q, iso), &label);
        accumulate(&mut out, isotope_basis_pairs(a, q, iso), &label);
    }
    if isotopes.is_empty() {
        out.push(Check::skip("isotope_coherence", "no isotopes requested"));
    }
    // the isomorphism verifier: identity, an automorphism, U_{b⁻¹} onto A^(b²), and a wrong unity
    let ring = a.ring();
    let one = a.basepoint().clone();
    let id = Matrix::identity(ring, ALBERT_RANK);
    let mut t = Tally::new("isotopy_iso");
    let verify = |t: &mut Tally, what: &str, phi: &LinearMap, p: &Vector, expected: bool| {
        let got = albert::verify_isotopy_iso(a, phi, p);
        t.record(matches!(got, Ok(v) if v == expected), |i| Counterexample::new(i, &[("p", p)], format!("{what}: expected {expected}, got {got:?}")));
    };
    verify(&mut t, "identity at p = 1", &id, &one, true);
    let mut rng = SeedStream::new(cfg.seed, 28);
    if let Ok(phi) = crate::composition::sl3_zorn_automorphism(&random_sl3(ring, &mut rng))
        .and_then(|g| TripleMap::diagonal(&g))
        .map(|t| albert::iota(&t))
    {
        verify(&mut t, "automorphism at p = 1", &phi, &one, true);
    }
    if let Some((_, q, _)) = isotopes.first() {
        let b = q;
        if let (Ok(p), Ok(binv)) = (a.square(b), a.inverse(b)) {
            let u = a.u_mat(&binv);
            verify(&mut t, "U_{b⁻¹} onto A^(b²)", &u, &p, true);
            verify(&mut t, "identity onto A^(b²)", &id, &p, p == one);
        }
    }
    out.push(t.finish());
    out
}

fn lifted_note(ring: Ring) -> Option<String> {
    (!ring.is_field()).then(|| format!("computed over the fraction field of {ring}"))
}

fn frame_checks(a: &CubicNormStructure, cfg: &SuiteConfig) -> Vec<Check> {
    let note = lifted_note(a.ring());
    let ring = field_ring(a.ring());
    let mut out = Vec::new();
    let e0 = Frame::distinguished(a.ring());
    let frame_check = |name: &str, f: &Frame, expected: bool| match albert::frame_defect(a, f) {
        Ok(d) if d.is_none() == expected => Check::pass(name, 1),
        Ok(d) => Check::error(name, d.unwrap_or_else(|| "accepted a non-frame".into())),
        Err(e) => Check::error(name, e.to_string()),
    };
    out.push(frame_check("distinguished_frame", &e0, true));
    let zero = Vector::zero(a.ring(), ALBERT_RANK);
    let not_frame = Frame::new(a.basepoint().clone(), zero.clone(), zero).expect("shape");
    out.push(frame_check("non_frame_rejected", &not_frame, false));
    let mut t = Tally::new("peirce_dimensions");
    for i in 0..3 {
        let res = albert::peirce_one(a, e0.get(i)).map(|b| b.len());
        t.record(matches!(res, Ok(16)), |k| Counterexample::new(k, &[("c", e0.get(i))], format!("dim A1(e{}) = {res:?}, expected 16", i + 1)));
    }
    out.push(t.finish());
    out.push(match albert::coordinate_spaces(a, &e0) {
        Ok(_) => Check::pass("coordinate_dimensions", 3),
        Err(e) => Check::error("coordinate_dimensions", e.to_string()),
    });
    let movers = cfg.samples.min(cfg.caps.frame_movers);
    if !ring.int(2).is_unit() {
        out.push(Check::skip("moved_frames", format!("frame movers need 2 to be a unit in {ring}")));
    } else {
        let af = if a.ring() == ring { a.clone() } else { a.lift_to_rationals() };
        let mut t = Tally::new("moved_frames");
        for k in 0..movers {
            let res = albert::frame_mover(&af, cfg.seed.wrapping_add(k as u64), cfg.caps.frame_tries)
                .and_then(|(_, phi)| albert::frame_image(&af, &phi, &Frame::distinguished(ring)))
                .and_then(|c| albert::coordinate_spaces(&af, &c).map(|_| c));
            t.record(res.is_ok(), |i| Counterexample::new(i, &[], format!("frame mover {k}: {}", res.as_ref().unwrap_err())));
        }
        out.push(t.finish());
    }
    if let Some(n) = note {
        out = out.into_iter().map(|c| if c.note.is_none() { c.with_note(n.clone()) } else { c }).collect();
    }
    out
}

fn deform_checks(a: &CubicNormStructure, cfg: &SuiteConfig) -> Vec<Check> {
    let note = lifted_note(a.ring());
    let ring = field_ring(a.ring());
    let mut out = Vec::new();
    let gamma = cfg.gamma();
    let e0 = Frame::distinguished(a.ring());
    let d = match errored("deform_distinguished", albert::deform(a, &e0)) {
        Ok(d) => d,
        Err(c) => {
            out.push(c);
            return out;
        }
    };
    out.push(Check::pass("deform_distinguished", 1));
    let af = if a.ring() == ring { a.clone() } else { a.lift_to_rationals() };
    let expected = crate::harness::suites::para_zorn(ring)
        .map(|p| p.composition_of())
        .and_then(|m| m.scale(gamma.lift_to_field(ring).values()));
    out.push(match expected {
        Ok(gm) => match TripleMap::identity(ring, 8).morphism_defect(&d.composition, &gm) {
            None => Check::pass("identity_morphism", 1),
            Some(s) => Check::error("identity_morphism", s),
        },
        Err(e) => Check::error("identity_morphism", e.to_string()),
    });
    let mut rng = SeedStream::new(cfg.seed, 30);
    let mut s_mult = Tally::new("s_multiplicativity");
    let mut member = Tally::new("circle_membership");
    for _ in 0..cfg.samples {
        let x = d.spaces[2].vector(&rng.vector(ring, 8));
        let y = d.spaces[1].vector(&rng.vector(ring, 8));
        let xy = af.circ(&x, &y);
        member.record(d.spaces[0].coordinates(&xy).is_some(), |i| Counterexample::new(i, &[("x", &x), ("y", &y)], "x∘y ∉ C1"));
        let lhs = af.s(&xy);
        let rhs = -&(&af.s(&x) * &af.s(&y));
        s_mult.record(lhs == rhs, |i| Counterexample::new(i, &[("x", &x), ("y", &y)], format!("S(x∘y) = {lhs}, −S(x)S(y) = {rhs}")));
    }
    out.push(member.finish());
    out.push(s_mult.finish());
    if !ring.int(2).is_unit() {
        out.push(Check::skip("transport", format!("frame movers need 2 to be a unit in {ring}")));
    } else {
        let mut t = Tally::new("transport");
        let movers = cfg.samples.min(cfg.caps.frame_movers);
        let e = Frame::distinguished(ring);
        for k in 0..movers {
            let res = albert::frame_mover(&af, cfg.seed.wrapping_add(k as u64), cfg.caps.frame_tries).and_then(|(_, phi)| {
                let c = albert::frame_image(&af, &phi, &e)?;
                albert::transport(&af, &phi, &e, &c)
            });
            t.record(res.is_ok(), |i| Counterexample::new(i, &[], format!("frame mover {k}: {}", res.as_ref().unwrap_err())));
        }
        out.push(t.finish());
    }
    if let Some(n) = note {
        out = out.into_iter().map(|c| if c.note.is_none() { c.with_note(n.clone()) } else { c }).collect();
    }
    out
}

fn echo(cfg: &SuiteConfig, mutate: bool) -> ConfigEcho {
    ConfigEcho {
        ring: cfg.ring.to_string(),
        samples: cfg.samples,
        seed: cfg.seed,
        gamma: cfg.gamma.as_ref().map(|g| g.to_string()),
        caps: cfg.caps.clone(),
        mutate,
    }
}

fn finish(cfg: &SuiteConfig, checks: Vec<Check>, mutated: Option<Vec<Check>>, start: Instant, mutate: bool) -> SuiteReport {
    SuiteReport {
        suite: cfg.suite.clone(),
        config: echo(cfg, mutate),
        verdict: Verdict::of(&checks),
        checks,
        mutated,
        wall_time_ms: start.elapsed().as_millis() as u64,
    }
}

/// Runs the named suite. Configuration problems are errors; failed
/// identities are report content.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    run_suite_on(cfg, None)
}

pub fn run_suite_on(cfg: &SuiteConfig, input: Option<&SuiteInput>) -> Result<SuiteReport> {
    let start = Instant::now();
    let fixture = build(cfg, input)?;
    let checks = run_checks(&fixture, cfg);
    Ok(finish(cfg, checks, None, start, false))
}

/// Perturbs one structure constant of the suite's fixture and reports
/// whether some check caught it.
pub fn mutate_and_expect_failure(cfg: &SuiteConfig) -> Result<SuiteReport> {
    mutate_on(cfg, None)
}

pub fn mutate_on(cfg: &SuiteConfig, input: Option<&SuiteInput>) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut fixture = build(cfg, input)?;
    let what = mutate(&mut fixture, cfg);
    let checks = run_checks(&fixture, cfg);
    let control = match checks.iter().find(|c| c.status == Status::Fail) {
        Some(c) => {
            let mut w = c.counterexample.clone().unwrap_or_else(|| Counterexample::monomial(0, &[], ""));
            w.detail = format!("{} caught it: {}", c.name, w.detail);
            Check { name: "negative_control".into(), status: Status::Pass, passed: 1, failed: 0, counterexample: Some(w), note: Some(what) }
        }
        None => Check::error("negative_control", format!("no check detected the mutation ({what})")),
    };
    Ok(finish(cfg, vec![control], Some(checks), start, true))
}

impl Gamma {
    fn lift_to_field(&self, ring: Ring) -> Gamma {
        if self.ring() == ring {
            self.clone()
        } else {
            self.lift_to_rationals()
        }
    }
}

/// The report of a construction-time validation, for callers that want
/// the per-check view instead of an error.
pub fn cubic_report(a: &CubicNormStructure, samples: usize, seed: u64) -> Report {
    let mut r = a.check_cns_axioms(samples, seed);
    r.extend(a.check_jordan_axioms(samples, seed));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> Ring {
        Ring::prime_field(7).unwrap()
    }

    #[test]
    fn every_suite_passes_over_f7() {
        for suite in SUITES {
            let cfg = SuiteConfig::new(suite, f7(), 10, 42).with_gamma(Gamma::from_ints(f7(), [1, 2, 3]).unwrap());
            let r = run_suite(&cfg).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{}", r.table());
        }
    }

    #[test]
    fn every_suite_has_a_working_negative_control() {
        for suite in SUITES {
            let cfg = SuiteConfig::new(suite, f7(), 10, 42);
            let r = mutate_and_expect_failure(&cfg).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{}", r.table());
            assert!(r.mutated.unwrap().iter().any(|c| c.status == Status::Fail));
        }
    }

    #[test]
    fn registry_examples() {
        let r = run_suite(&SuiteConfig::new("jordan", f7(), 200, 42)).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let q = Ring::Rationals;
        let cfg = SuiteConfig::new("deform", q, 3, 42).with_gamma(Gamma::from_ints(q, [1, 2, 3]).unwrap());
        let r = run_suite(&cfg).unwrap();
        assert_eq!(r.checks.iter().find(|c| c.name == "identity_morphism").unwrap().status, Status::Pass);
        let r = mutate_and_expect_failure(&SuiteConfig::new("cns", f7(), 3, 42)).unwrap();
        assert!(r.checks[0].note.as_deref().unwrap().starts_with("norm coefficient"));
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = SuiteConfig::new("jordan", f7(), 5, 9);
        assert_eq!(run_suite(&cfg).unwrap().to_json_untimed(), run_suite(&cfg).unwrap().to_json_untimed());
    }

    #[test]
    fn f2_frames_skip_explicitly() {
        let f2 = Ring::prime_field(2).unwrap();
        let r = run_suite(&SuiteConfig::new("frames", f2, 3, 1)).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.table());
        assert_eq!(r.checks.iter().find(|c| c.name == "moved_frames").unwrap().status, Status::Skip);
    }

    #[test]
    fn zorn_over_f2_is_exhaustive() {
        let r = run_suite(&SuiteConfig::new("zorn", Ring::prime_field(2).unwrap(), 10, 1)).unwrap();
        assert_eq!(r.checks.iter().find(|c| c.name == "exhaustive_multiplicativity").unwrap().passed, 65_536);
    }

    #[test]
    fn frames_over_z_are_lifted() {
        let r = run_suite(&SuiteConfig::new("frames", Ring::Integers, 2, 1)).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.table());
        assert!(r.checks[0].note.as_deref().unwrap().contains("fraction field"));
    }

    #[test]
    fn supplied_inputs_are_used() {
        let z = CompositionAlgebra::zorn(f7()).unwrap();
        let r = run_suite_on(&SuiteConfig::new("zorn", f7(), 5, 1), Some(&SuiteInput::Algebra(z.clone()))).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        // the Zorn algebra is not symmetric, so the para suite rejects it
        let r = run_suite_on(&SuiteConfig::new("para", f7(), 5, 1), Some(&SuiteInput::Algebra(z.clone()))).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let r = run_suite_on(&SuiteConfig::new("jordan", f7(), 5, 1), Some(&SuiteInput::Composition(z.para().unwrap().composition_of()))).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(run_suite_on(&SuiteConfig::new("cns", f7(), 5, 1), Some(&SuiteInput::Algebra(z))).is_err());
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite(&SuiteConfig::new("nope", f7(), 1, 1)).is_err());
    }
}
