use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use albert_core::albert::{self, Frame, Gamma, ALBERT_RANK};
use albert_core::composition::{AlgebraKind, CompositionAlgebra, CompositionOfForms, ZORN_RANK};
use albert_core::harness::{self, SuiteConfig, SuiteInput, SUITES};
use albert_core::json::{self, Document, Validation};
use albert_core::{Ring, Vector};
use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "albert", version, about = "Build and check octonion, composition and Albert algebras over exact rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    /// The split octonions as Zorn vector matrices.
    Zorn,
    /// The para-octonions of the Zorn algebra (or of --algebra).
    Para,
    /// H₃(C, Γ) for the Zorn algebra (or the octonion algebra in --algebra).
    H3,
    /// H(𝓜, Γ) for the composition in --composition (default: para-Zorn).
    Hermitian,
    /// The composition of forms of the para-Zorn algebra (or of --algebra), scaled by --gamma.
    Composition,
}

#[derive(Subcommand)]
enum Command {
    /// Construct an algebra, validate it and write it as JSON.
    Construct {
        kind: Kind,
        #[arg(long, default_value = "Q")]
        ring: Ring,
        /// Comma-separated units γ1,γ2,γ3.
        #[arg(long)]
        gamma: Option<String>,
        /// A composition algebra file, for para, h3 and composition.
        #[arg(long)]
        algebra: Option<PathBuf>,
        /// A composition of forms file, for hermitian.
        #[arg(long)]
        composition: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a seeded identity suite and report per-check verdicts.
    Check {
        #[arg(long, value_parser = suite_name)]
        suite: String,
        /// Defaults to the ring of --algebra, or Q.
        #[arg(long)]
        ring: Option<Ring>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, env = "ALBERT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        gamma: Option<String>,
        /// Run on this structure instead of the suite's built-in fixture.
        #[arg(long)]
        algebra: Option<PathBuf>,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Perturb one structure constant and require a reported counterexample.
        #[arg(long)]
        mutate: bool,
    },
    /// Write the isotope A^(p) of a cubic norm structure.
    Isotope {
        #[arg(long)]
        algebra: PathBuf,
        /// An element file holding p.
        #[arg(long)]
        p: PathBuf,
        /// Rescale p to norm one first.
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the composition of forms carried by a frame.
    Deform {
        #[arg(long)]
        algebra: PathBuf,
        /// A frame file; the distinguished frame if omitted.
        #[arg(long)]
        frame: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the octonion algebra of a composition with norm-one points.
    Octonionify {
        #[arg(long)]
        composition: PathBuf,
        /// Element files for a ∈ C3 and b ∈ C2 with q3(a) = q2(b) = 1;
        /// searched for if omitted.
        #[arg(long, requires = "b")]
        a: Option<PathBuf>,
        #[arg(long, requires = "a")]
        b: Option<PathBuf>,
        /// Candidates examined per space when searching.
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the triple 𝓜 → 𝓜_C.
        #[arg(long)]
        iso_out: Option<PathBuf>,
        /// Also write the triple 𝓜 → 𝓜_C̄.
        #[arg(long)]
        para_iso_out: Option<PathBuf>,
    },
    /// Write the morphism between the deformations at a frame and its image.
    Transport {
        #[arg(long)]
        algebra: PathBuf,
        /// A linear map file holding an automorphism; found by the frame mover if omitted.
        #[arg(long)]
        phi: Option<PathBuf>,
        /// The source frame; the distinguished frame if omitted.
        #[arg(long)]
        frame: Option<PathBuf>,
        #[arg(long, env = "ALBERT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        tries: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the image frame.
        #[arg(long)]
        frame_out: Option<PathBuf>,
        /// Also write the automorphism used.
        #[arg(long)]
        phi_out: Option<PathBuf>,
    },
    /// Describe a file, or list suites and ring syntax.
    Info { file: Option<PathBuf> },
}

fn suite_name(s: &str) -> Result<String, String> {
    if SUITES.contains(&s) {
        Ok(s.to_string())
    } else {
        Err(format!("unknown suite; known suites: {}", SUITES.join(", ")))
    }
}

fn read(path: &Path, validation: Validation) -> anyhow::Result<Document> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    json::from_json(&text, validation).with_context(|| format!("loading {}", path.display()))
}

/// Writes next to the target and renames, so a failed run leaves nothing behind.
fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    // temporary files are created owner-only
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(fs::Permissions::from_mode(0o644))?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Re-parses with full validation before writing.
fn write_doc(path: &Path, doc: &Document) -> anyhow::Result<()> {
    let text = json::to_json(doc);
    let back = json::from_json(&text, Validation::Full).context("output failed re-validation")?;
    if &back != doc {
        bail!("output does not round-trip");
    }
    write_atomic(path, &text)
}

fn expect_cubic(doc: Document, path: &Path) -> anyhow::Result<albert_core::cubic::CubicNormStructure> {
    match doc {
        Document::Cubic(a) => Ok(a),
        d => bail!("{} holds a {}, expected a cubic_norm_structure", path.display(), d.type_name()),
    }
}

fn expect_albert(doc: Document, path: &Path) -> anyhow::Result<albert_core::cubic::CubicNormStructure> {
    let a = expect_cubic(doc, path)?;
    if a.rank() != ALBERT_RANK {
        bail!("{} has rank {}, expected {ALBERT_RANK}", path.display(), a.rank());
    }
    Ok(a)
}

fn expect_element(path: &Path, ring: Ring, rank: usize) -> anyhow::Result<Vector> {
    match read(path, Validation::Full)? {
        Document::Element(v) if v.ring() == ring && v.len() == rank => Ok(v),
        Document::Element(v) => bail!("{}: expected a rank-{rank} element over {ring}, found rank {} over {}", path.display(), v.len(), v.ring()),
        d => bail!("{} holds a {}, expected an element", path.display(), d.type_name()),
    }
}

fn expect_frame(path: Option<&PathBuf>, ring: Ring) -> anyhow::Result<Frame> {
    let Some(path) = path else {
        return Ok(Frame::distinguished(ring));
    };
    match read(path, Validation::Full)? {
        Document::Frame(f) if f.ring() == ring => Ok(f),
        Document::Frame(f) => bail!("{}: frame is over {}, algebra over {ring}", path.display(), f.ring()),
        d => bail!("{} holds a {}, expected a frame", path.display(), d.type_name()),
    }
}

fn load_algebra(path: Option<&PathBuf>, ring: Ring) -> anyhow::Result<CompositionAlgebra> {
    match path {
        None => Ok(CompositionAlgebra::zorn(ring)?),
        Some(p) => match read(p, Validation::Full)? {
            Document::CompositionAlgebra(c) => Ok(c),
            d => bail!("{} holds a {}, expected a composition_algebra", p.display(), d.type_name()),
        },
    }
}

fn gamma(ring: Ring, s: Option<&String>) -> anyhow::Result<Gamma> {
    Ok(match s {
        Some(s) => Gamma::parse(ring, s)?,
        None => Gamma::ones(ring),
    })
}

fn construct(kind: Kind, ring: Ring, g: Option<&String>, algebra: Option<&PathBuf>, composition: Option<&PathBuf>, out: &Path) -> anyhow::Result<()> {
    let doc = match kind {
        Kind::Zorn => Document::CompositionAlgebra(CompositionAlgebra::zorn(ring)?),
        Kind::Para => {
            let c = load_algebra(algebra, ring)?;
            if c.kind() != AlgebraKind::Octonion {
                bail!("para needs an octonion algebra, found {}", c.kind());
            }
            Document::CompositionAlgebra(c.para()?)
        }
        Kind::H3 => {
            let c = load_algebra(algebra, ring)?;
            Document::Cubic(albert::h3(&c, &gamma(c.ring(), g)?)?)
        }
        Kind::Hermitian => {
            let m = match composition {
                Some(p) => match read(p, Validation::Full)? {
                    Document::CompositionOfForms(m) => m,
                    d => bail!("{} holds a {}, expected a composition_of_forms", p.display(), d.type_name()),
                },
                None => CompositionAlgebra::zorn(ring)?.para()?.composition_of(),
            };
            Document::Cubic(albert::hermitian_algebra(&m, &gamma(m.ring(), g)?)?)
        }
        Kind::Composition => {
            let c = match algebra {
                Some(_) => load_algebra(algebra, ring)?,
                None => CompositionAlgebra::zorn(ring)?.para()?,
            };
            let m = c.composition_of();
            let m = match g {
                Some(s) => m.scale(Gamma::parse(m.ring(), s)?.values())?,
                None => m,
            };
            Document::CompositionOfForms(m)
        }
    };
    write_doc(out, &doc)?;
    println!("wrote {} ({} over {})", out.display(), doc.type_name(), doc.ring());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn check(
    suite: &str,
    ring: Option<Ring>,
    samples: usize,
    seed: u64,
    g: Option<&String>,
    algebra: Option<&PathBuf>,
    json_out: Option<&PathBuf>,
    mutate: bool,
) -> anyhow::Result<ExitCode> {
    let input = match algebra {
        None => None,
        Some(p) => Some(match read(p, Validation::Shape)? {
            Document::CompositionAlgebra(c) => SuiteInput::Algebra(c),
            Document::CompositionOfForms(m) => SuiteInput::Composition(m),
            Document::Cubic(a) => SuiteInput::Cubic(a),
            d => bail!("{} holds a {}, which no suite checks", p.display(), d.type_name()),
        }),
    };
    let file_ring = input.as_ref().map(|i| match i {
        SuiteInput::Algebra(c) => c.ring(),
        SuiteInput::Composition(m) => m.ring(),
        SuiteInput::Cubic(a) => a.ring(),
    });
    let ring = ring.or(file_ring).unwrap_or(Ring::Rationals);
    let mut cfg = SuiteConfig::new(suite, ring, samples, seed);
    if let Some(s) = g {
        cfg = cfg.with_gamma(Gamma::parse(ring, s)?);
    }
    let report = if mutate { harness::mutate_on(&cfg, input.as_ref())? } else { harness::run_suite_on(&cfg, input.as_ref())? };
    print!("{}", report.table());
    if let Some(p) = json_out {
        let mut text = report.to_json();
        text.push('\n');
        write_atomic(p, &text)?;
    }
    Ok(ExitCode::from(report.verdict.exit_code() as u8))
}

fn isotope(algebra: &Path, p: &Path, normalize: bool, out: &Path) -> anyhow::Result<()> {
    let a = expect_cubic(read(algebra, Validation::Full)?, algebra)?;
    let mut p = expect_element(p, a.ring(), a.rank())?;
    if normalize {
        let (q, lambda) = a.normalize_isotope(&p)?;
        println!("normalized p by {lambda}");
        p = q;
    }
    let iso = a.isotope(&p)?;
    write_doc(out, &Document::Cubic(iso))?;
    println!("wrote {}", out.display());
    Ok(())
}

fn deform(algebra: &Path, frame: Option<&PathBuf>, out: &Path) -> anyhow::Result<()> {
    let a = expect_albert(read(algebra, Validation::Full)?, algebra)?;
    let f = expect_frame(frame, a.ring())?;
    let d = albert::deform(&a, &f)?;
    write_doc(out, &Document::CompositionOfForms(d.composition))?;
    println!("wrote {}", out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn octonionify(
    composition: &Path,
    a: Option<&PathBuf>,
    b: Option<&PathBuf>,
    cap: usize,
    out: &Path,
    iso_out: Option<&PathBuf>,
    para_iso_out: Option<&PathBuf>,
) -> anyhow::Result<()> {
    let m: CompositionOfForms = match read(composition, Validation::Full)? {
        Document::CompositionOfForms(m) => m,
        Document::CompositionAlgebra(c) => c.composition_of(),
        d => bail!("{} holds a {}, expected a composition_of_forms", composition.display(), d.type_name()),
    };
    let (a, b) = match (a, b) {
        (Some(a), Some(b)) => (expect_element(a, m.ring(), ZORN_RANK)?, expect_element(b, m.ring(), ZORN_RANK)?),
        _ => m
            .find_norm_one_points(cap)
            .ok_or_else(|| anyhow!("no norm-one points found within {cap} candidates; pass --a and --b"))?,
    };
    let o = m.octonionify(&a, &b)?;
    write_doc(out, &Document::CompositionAlgebra(o.algebra))?;
    if let Some(p) = iso_out {
        write_doc(p, &Document::Triple(o.iso))?;
    }
    if let Some(p) = para_iso_out {
        write_doc(p, &Document::Triple(o.para_iso))?;
    }
    println!("wrote {}", out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn transport(
    algebra: &Path,
    phi: Option<&PathBuf>,
    frame: Option<&PathBuf>,
    seed: u64,
    tries: usize,
    out: &Path,
    frame_out: Option<&PathBuf>,
    phi_out: Option<&PathBuf>,
) -> anyhow::Result<()> {
    let a = expect_albert(read(algebra, Validation::Full)?, algebra)?;
    let e = expect_frame(frame, a.ring())?;
    let phi = match phi {
        Some(p) => match read(p, Validation::Full)? {
            Document::LinearMap(m) => m,
            d => bail!("{} holds a {}, expected a linear_map", p.display(), d.type_name()),
        },
        None => {
            if e != Frame::distinguished(a.ring()) {
                bail!("the frame mover starts from the distinguished frame; pass --phi for other frames");
            }
            albert::frame_mover(&a, seed, tries)?.1
        }
    };
    let c = albert::frame_image(&a, &phi, &e)?;
    let t = albert::transport(&a, &phi, &e, &c)?;
    write_doc(out, &Document::Triple(t))?;
    if let Some(p) = frame_out {
        write_doc(p, &Document::Frame(c))?;
    }
    if let Some(p) = phi_out {
        write_doc(p, &Document::LinearMap(phi))?;
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn info(file: Option<&PathBuf>) -> anyhow::Result<()> {
    let Some(path) = file else {
        println!("albert {}", env!("CARGO_PKG_VERSION"));
        println!("rings: Fp:<prime ≤ 2^31>, Q, Z");
        println!("suites: {}", SUITES.join(", "));
        println!("exit codes: 0 pass, 1 fail, 2 error, 3 skip-only");
        return Ok(());
    };
    let doc = read(path, Validation::Shape)?;
    println!("type: {}", doc.type_name());
    println!("ring: {}", doc.ring());
    match &doc {
        Document::CompositionAlgebra(c) => {
            println!("kind: {}", c.kind());
            println!("rank: {}", c.rank());
            println!("nonsingular: {}", c.space().is_nonsingular());
        }
        Document::CompositionOfForms(m) => {
            let ranks: Vec<String> = m.spaces().iter().map(|q| q.rank().to_string()).collect();
            println!("ranks: {}", ranks.join(", "));
        }
        Document::Triple(t) => println!("ranks: {}", t.maps().iter().map(|m| m.rows().to_string()).collect::<Vec<_>>().join(", ")),
        Document::Cubic(a) => {
            println!("rank: {}", a.rank());
            println!("norm terms: {}", a.norm_form().terms().len());
            println!("adjoint: {}", if a.adjoint_map().post().is_some() { "factored" } else { "expanded" });
            println!("basepoint: {}", a.basepoint());
        }
        Document::Element(v) => println!("coords: {v}"),
        Document::Frame(_) => println!("elements: 3"),
        Document::LinearMap(m) => println!("shape: {}×{}", m.rows(), m.cols()),
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Construct { kind, ring, gamma, algebra, composition, out } => {
            construct(kind, ring, gamma.as_ref(), algebra.as_ref(), composition.as_ref(), &out)?
        }
        Command::Check { suite, ring, samples, seed, gamma, algebra, json, mutate } => {
            return check(&suite, ring, samples, seed, gamma.as_ref(), algebra.as_ref(), json.as_ref(), mutate)
        }
        Command::Isotope { algebra, p, normalize, out } => isotope(&algebra, &p, normalize, &out)?,
        Command::Deform { algebra, frame, out } => deform(&algebra, frame.as_ref(), &out)?,
        Command::Octonionify { composition, a, b, cap, out, iso_out, para_iso_out } => {
            octonionify(&composition, a.as_ref(), b.as_ref(), cap, &out, iso_out.as_ref(), para_iso_out.as_ref())?
        }
        Command::Transport { algebra, phi, frame, seed, tries, out, frame_out, phi_out } => {
            transport(&algebra, phi.as_ref(), frame.as_ref(), seed, tries, &out, frame_out.as_ref(), phi_out.as_ref())?
        }
        Command::Info { file } => info(file.as_ref())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
