//! End-to-end acceptance run. One line per criterion; the process exits
//! non-zero if any criterion fails or exceeds its time budget.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use albert_core::albert::{self, Frame, Gamma};
use albert_core::composition::{sl3_zorn_automorphism, CompositionAlgebra, TripleMap};
use albert_core::harness::{mutate_and_expect_failure, random_sl3, rng::SeedStream, run_suite, SuiteConfig, SuiteReport, Verdict, SUITES};
use albert_core::{Matrix, Ring, Status};

const SEED: u64 = 42;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn f(p: u64) -> Ring {
    Ring::prime_field(p).unwrap()
}

/// Over ℤ the second triple must consist of units.
fn gammas(ring: Ring) -> [Gamma; 2] {
    let g = if ring == Ring::Integers { [1, -1, -1] } else { [1, 2, 3] };
    [Gamma::ones(ring), Gamma::from_ints(ring, g).unwrap()]
}

fn suite(name: &str, ring: Ring, samples: usize, gamma: Option<Gamma>) -> Result<SuiteReport, String> {
    let mut cfg = SuiteConfig::new(name, ring, samples, SEED);
    cfg.gamma = gamma;
    let r = run_suite(&cfg).map_err(|e| format!("{name} over {ring}: {e}"))?;
    if r.verdict != Verdict::Pass {
        return Err(format!("{name} over {ring}:\n{}", r.table()));
    }
    Ok(r)
}

/// The passed count of a named check, which must have no failures.
fn passed(r: &SuiteReport, check: &str) -> Result<u64, String> {
    let c = r.checks.iter().find(|c| c.name == check).ok_or_else(|| format!("{}: no check {check}", r.suite))?;
    match c.status {
        Status::Pass => Ok(c.passed),
        Status::Fail => Err(format!("{}: {check} failed: {:?}", r.suite, c.counterexample)),
        Status::Skip => Err(format!("{}: {check} skipped: {:?}", r.suite, c.note)),
    }
}

fn at_least(what: &str, got: u64, want: u64) -> Result<(), String> {
    if got >= want {
        Ok(())
    } else {
        Err(format!("{what}: {got} cases, need {want}"))
    }
}

fn octonion_composition() -> Outcome {
    let r = suite("zorn", f(2), 1000, None)?;
    let exhaustive = passed(&r, "exhaustive_multiplicativity")?;
    if exhaustive != 65_536 {
        return Err(format!("exhaustive pass covered {exhaustive} pairs"));
    }
    let mut sampled = Vec::new();
    for ring in [f(7), Ring::Rationals] {
        let r = suite("zorn", ring, 1000, None)?;
        let n = passed(&r, "sampled_multiplicativity")?;
        at_least(&format!("{ring}"), n, 1000)?;
        sampled.push(format!("{ring} {n}"));
    }
    Ok(format!("Fp:2 {exhaustive} pairs, {}", sampled.join(", ")))
}

fn para_symmetry() -> Outcome {
    let r = suite("para", Ring::Integers, 0, None)?;
    let n = passed(&r, "para_symmetry")?;
    if n != 512 {
        return Err(format!("{n} basis triples"));
    }
    Ok(format!("{n} basis triples over Z"))
}

fn jordan_axioms() -> Outcome {
    let mut total = 0;
    for ring in [f(7), f(11), Ring::Rationals] {
        for g in gammas(ring) {
            let r = suite("jordan", ring, 200, Some(g.clone()))?;
            if passed(&r, "unit_operator")? != 27 {
                return Err(format!("U_1 = Id not checked on the basis ({ring}, Γ = {g})"));
            }
            for c in ["fundamental_formula", "commutation_formula"] {
                let n = passed(&r, c)?;
                at_least(&format!("{c} over {ring}, Γ = {g}"), n, 200)?;
                total += n;
            }
        }
    }
    Ok(format!("6 algebras, {total} sampled identities"))
}

fn cns_compatibilities() -> Outcome {
    let checks = ["basepoint", "adjoint_identity", "norm_of_adjoint", "trace_derivative", "trace_from_norm"];
    let mut algebras = 0;
    for ring in [f(7), f(11), Ring::Rationals, Ring::Integers] {
        for g in gammas(ring) {
            let r = suite("cns", ring, 20, Some(g))?;
            for c in checks {
                passed(&r, c)?;
            }
            algebras += 1;
        }
        let zorn = CompositionAlgebra::zorn(ring).map_err(|e| e.to_string())?;
        let h3 = albert::h3(&zorn, &Gamma::ones(ring)).map_err(|e| format!("h3 over {ring}: {e}"))?;
        let r = h3.check_cns_axioms(20, SEED);
        if let Some(m) = r.failure_message() {
            return Err(format!("h3 over {ring}: {m}"));
        }
        algebras += 1;
    }
    let mut isotopes = 0;
    for ring in [f(7), Ring::Rationals] {
        let r = suite("isotope", ring, 20, None)?;
        for c in checks {
            let n = passed(&r, &format!("isotope_cns.{c}"))?;
            at_least(&format!("isotope_cns.{c} over {ring}"), n, 20)?;
        }
        isotopes += 20;
    }
    Ok(format!("{algebras} constructed algebras and {isotopes} isotopes"))
}

fn iota_embedding() -> Outcome {
    let mut out = Vec::new();
    for ring in [f(7), Ring::Rationals] {
        let r = suite("iota", ring, 50, None)?;
        let n = passed(&r, "iota_automorphism")?;
        at_least(&format!("{ring}"), n, 50)?;
        passed(&r, "related_triple")?;
        out.push(format!("{ring} {n}"));
    }
    Ok(format!("automorphisms: {}", out.join(", ")))
}

fn isotopes() -> Outcome {
    let mut out = Vec::new();
    for ring in [f(7), Ring::Rationals] {
        let r = suite("isotope", ring, 20, None)?;
        at_least(&format!("normalized_norm over {ring}"), passed(&r, "normalized_norm")?, 20)?;
        passed(&r, "isotope_basepoint")?;
        passed(&r, "isotope_coherence")?;
        let pairs = passed(&r, "isotope_basis_pairs")?;
        at_least(&format!("basis pairs over {ring}"), pairs, 20 * 27 * 27)?;
        out.push(format!("{ring} {pairs} basis pairs"));
    }
    Ok(format!("20 isotopes each; {}", out.join(", ")))
}

fn deformation() -> Outcome {
    let mut runs = 0;
    for ring in [f(7), Ring::Rationals] {
        for g in gammas(ring) {
            let r = suite("deform", ring, 500, Some(g.clone()))?;
            passed(&r, "identity_morphism")?;
            at_least(&format!("S-multiplicativity over {ring}, Γ = {g}"), passed(&r, "s_multiplicativity")?, 500)?;
            let a = albert::hermitian_algebra(&CompositionAlgebra::zorn(ring).unwrap().para().unwrap().composition_of(), &g)
                .map_err(|e| e.to_string())?;
            let dims = albert::coordinate_spaces(&a, &Frame::distinguished(ring)).map_err(|e| e.to_string())?.map(|s| s.dim());
            if dims != [8, 8, 8] {
                return Err(format!("coordinate dimensions {dims:?} over {ring}, Γ = {g}"));
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} (ring, Γ) pairs, dimensions (8,8,8)"))
}

fn transport() -> Outcome {
    let ring = f(7);
    let a = albert::hermitian_algebra(&CompositionAlgebra::zorn(ring).unwrap().para().unwrap().composition_of(), &Gamma::ones(ring))
        .map_err(|e| e.to_string())?;
    let e = Frame::distinguished(ring);
    let de = albert::deform(&a, &e).map_err(|e| e.to_string())?;
    let mut found = 0;
    for k in 0..5u64 {
        let (_, phi) = albert::frame_mover(&a, SEED + k, 200).map_err(|err| format!("frame mover {k}: {err}"))?;
        let c = albert::frame_image(&a, &phi, &e).map_err(|err| format!("frame image {k}: {err}"))?;
        if !albert::is_frame(&a, &c).map_err(|err| err.to_string())? || c == e {
            return Err(format!("frame mover {k} did not move to a new frame"));
        }
        let t = albert::transport(&a, &phi, &e, &c).map_err(|err| format!("transport {k}: {err}"))?;
        let dc = albert::deform(&a, &c).map_err(|err| err.to_string())?;
        if !t.is_morphism(&de.composition, &dc.composition) {
            return Err(format!("transport {k} is not a morphism"));
        }
        found += 1;
    }
    Ok(format!("{found} frame movers over Fp:7"))
}

fn octonionification() -> Outcome {
    let r = suite("octonionify", f(7), 10, None)?;
    for c in ["norm_one_points", "octonion.multiplicativity", "octonion.unital", "iso_morphism", "para_iso_morphism"] {
        passed(&r, c)?;
    }
    Ok("validated octonion algebra, both triples are morphisms".into())
}

fn isotopy_verifier() -> Outcome {
    let ring = f(7);
    let a = albert::hermitian_algebra(&CompositionAlgebra::zorn(ring).unwrap().para().unwrap().composition_of(), &Gamma::ones(ring))
        .map_err(|e| e.to_string())?;
    let one = a.basepoint().clone();
    let id = Matrix::identity(ring, 27);
    let check = |what: &str, phi: &Matrix, p: &albert_core::Vector, want: bool| -> Result<(), String> {
        let got = albert::verify_isotopy_iso(&a, phi, p).map_err(|e| format!("{what}: {e}"))?;
        if got == want {
            Ok(())
        } else {
            Err(format!("{what}: expected {want}, got {got}"))
        }
    };
    check("identity", &id, &one, true)?;
    let mut rng = SeedStream::new(SEED, 40);
    let t = TripleMap::diagonal(&sl3_zorn_automorphism(&random_sl3(ring, &mut rng)).unwrap()).unwrap();
    let phi = albert::iota(&t);
    check("automorphism", &phi, &one, true)?;
    // wrong unity: the identity does not send 1 to p⁻¹ for p ≠ 1
    let mut p = one.clone();
    p.set(3 + rng.below(24) as usize, ring.int(1 + rng.below(6) as i64));
    let (p, _) = a.normalize_isotope(&p).map_err(|e| e.to_string())?;
    check("wrong unity", &id, &p, false)?;
    check("automorphism with wrong unity", &phi, &p, false)?;
    Ok("identity and automorphism accepted, wrong unity rejected".into())
}

fn negative_controls() -> Outcome {
    let mut caught = Vec::new();
    for s in SUITES {
        let r = mutate_and_expect_failure(&SuiteConfig::new(s, f(7), 10, SEED)).map_err(|e| format!("{s}: {e}"))?;
        let c = &r.checks[0];
        if c.status != Status::Pass || c.counterexample.is_none() {
            return Err(format!("{s}: mutation not detected\n{}", r.table()));
        }
        caught.push(s);
    }
    Ok(format!("{} suites caught their mutation", caught.len()))
}

fn determinism() -> Outcome {
    let configs = [("jordan", f(7), 50), ("cns", Ring::Rationals, 10), ("isotope", f(7), 3), ("frames", Ring::Integers, 2), ("octonionify", f(7), 5)];
    for (s, ring, n) in configs {
        let cfg = SuiteConfig::new(s, ring, n, SEED);
        let a = run_suite(&cfg).map_err(|e| e.to_string())?.to_json_untimed();
        let b = run_suite(&cfg).map_err(|e| e.to_string())?.to_json_untimed();
        if a != b {
            return Err(format!("{s} over {ring}: reports differ"));
        }
        let m1 = mutate_and_expect_failure(&cfg).map_err(|e| e.to_string())?.to_json_untimed();
        let m2 = mutate_and_expect_failure(&cfg).map_err(|e| e.to_string())?.to_json_untimed();
        if m1 != m2 {
            return Err(format!("{s} over {ring}: mutated reports differ"));
        }
    }
    Ok(format!("{} configurations reproduced byte for byte", configs.len()))
}

fn criteria() -> Vec<Criterion> {
    let s = Duration::from_secs;
    vec![
        Criterion { id: 1, name: "octonion composition law", budget: s(5), run: octonion_composition },
        Criterion { id: 2, name: "para-octonion symmetry", budget: s(1), run: para_symmetry },
        Criterion { id: 3, name: "Jordan axioms", budget: s(60), run: jordan_axioms },
        Criterion { id: 4, name: "cubic norm structure compatibilities", budget: s(60), run: cns_compatibilities },
        Criterion { id: 5, name: "iota embedding", budget: s(30), run: iota_embedding },
        Criterion { id: 6, name: "isotopes", budget: s(60), run: isotopes },
        Criterion { id: 7, name: "deformation", budget: s(60), run: deformation },
        Criterion { id: 8, name: "transport", budget: s(120), run: transport },
        Criterion { id: 9, name: "octonionification", budget: s(30), run: octonionification },
        Criterion { id: 10, name: "isotopy isomorphism verifier", budget: s(10), run: isotopy_verifier },
        Criterion { id: 11, name: "negative controls", budget: s(30), run: negative_controls },
        Criterion { id: 12, name: "determinism", budget: s(60), run: determinism },
    ]
}

fn main() -> ExitCode {
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for c in criteria() {
        if !only.is_empty() && !only.contains(&c.id) {
            continue;
        }
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if took <= c.budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget")),
            Err(e) => (false, e),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} {:<38} {:>7.2}s / {:>3}s  {}",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.name,
            took.as_secs_f64(),
            c.budget.as_secs(),
            detail
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
