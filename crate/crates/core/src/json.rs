//! File formats. Every document is a JSON object with a `type` tag and a
//! `ring` field; scalars are decimal strings ("3", "-1/2") so ℚ and ℤ
//! entries keep full precision.

use serde::{Deserialize, Serialize};

use crate::albert::{AlbertElement, Frame, ALBERT_RANK};
use crate::composition::{AlgebraKind, BilinearMap, CompositionAlgebra, CompositionOfForms, TripleMap};
use crate::cubic::{CubicForm, CubicNormStructure, QuadraticMap};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::quadspace::QuadraticSpace;
use crate::scalars::{Ring, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceWire {
    pub rank: usize,
    /// Upper triangular: q(x) = Σ_{i ≤ j} coeffs[i][j] x_i x_j.
    pub coeffs: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormTerm {
    pub monomial: [usize; 3],
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadTerm {
    pub monomial: [usize; 2],
    pub coeff: String,
}

/// x^♯ = post · B(x), the form isotopes are built in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjointFactor {
    pub base: Vec<Vec<QuadTerm>>,
    pub post: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structured {
    pub alphas: Vec<String>,
    pub u1: Vec<String>,
    pub u2: Vec<String>,
    pub u3: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Wire {
    CompositionAlgebra {
        ring: Ring,
        space: SpaceWire,
        mult: Vec<Vec<Vec<String>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unity: Option<Vec<String>>,
        kind: String,
    },
    CompositionOfForms {
        ring: Ring,
        #[serde(rename = "C1")]
        c1: SpaceWire,
        #[serde(rename = "C2")]
        c2: SpaceWire,
        #[serde(rename = "C3")]
        c3: SpaceWire,
        m: Vec<Vec<Vec<String>>>,
    },
    Triple {
        ring: Ring,
        t1: Vec<Vec<String>>,
        t2: Vec<Vec<String>>,
        t3: Vec<Vec<String>>,
    },
    CubicNormStructure {
        ring: Ring,
        rank: usize,
        basepoint: Vec<String>,
        norm: Vec<NormTerm>,
        adjoint: Vec<Vec<QuadTerm>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        adjoint_factor: Option<AdjointFactor>,
        trace: Vec<Vec<String>>,
    },
    Element {
        ring: Ring,
        coords: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        structured: Option<Structured>,
    },
    Frame {
        ring: Ring,
        elements: [Vec<String>; 3],
    },
    LinearMap {
        ring: Ring,
        matrix: Vec<Vec<String>>,
    },
}

/// A parsed file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    CompositionAlgebra(CompositionAlgebra),
    CompositionOfForms(CompositionOfForms),
    Triple(TripleMap),
    Cubic(CubicNormStructure),
    Element(Vector),
    Frame(Frame),
    LinearMap(Matrix),
}

impl Document {
    pub fn type_name(&self) -> &'static str {
        match self {
            Document::CompositionAlgebra(_) => "composition_algebra",
            Document::CompositionOfForms(_) => "composition_of_forms",
            Document::Triple(_) => "triple",
            Document::Cubic(_) => "cubic_norm_structure",
            Document::Element(_) => "element",
            Document::Frame(_) => "frame",
            Document::LinearMap(_) => "linear_map",
        }
    }

    pub fn ring(&self) -> Ring {
        match self {
            Document::CompositionAlgebra(c) => c.ring(),
            Document::CompositionOfForms(m) => m.ring(),
            Document::Triple(t) => t.get(1).ring(),
            Document::Cubic(a) => a.ring(),
            Document::Element(v) => v.ring(),
            Document::Frame(f) => f.ring(),
            Document::LinearMap(m) => m.ring(),
        }
    }
}

/// How much of a document's mathematical content is checked on load.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validation {
    /// Shapes and rings only, for inputs that a suite is about to check.
    Shape,
    /// The full type invariants (composition laws, cubic axioms).
    Full,
}

fn strings(v: &Vector) -> Vec<String> {
    v.to_strings()
}

fn space_wire(q: &QuadraticSpace) -> SpaceWire {
    SpaceWire { rank: q.rank(), coeffs: q.coeffs().to_string_rows() }
}

fn quad_terms(coord: &[(usize, usize, Scalar)]) -> Vec<QuadTerm> {
    coord.iter().map(|(i, j, c)| QuadTerm { monomial: [*i, *j], coeff: c.to_string() }).collect()
}

pub fn to_wire(doc: &Document) -> Wire {
    match doc {
        Document::CompositionAlgebra(c) => Wire::CompositionAlgebra {
            ring: c.ring(),
            space: space_wire(c.space()),
            mult: c.mult().to_nested_strings(),
            unity: c.unity().map(strings),
            kind: c.kind().name().to_string(),
        },
        Document::CompositionOfForms(m) => {
            let [c1, c2, c3] = m.spaces();
            Wire::CompositionOfForms {
                ring: m.ring(),
                c1: space_wire(c1),
                c2: space_wire(c2),
                c3: space_wire(c3),
                m: m.m().to_nested_strings(),
            }
        }
        Document::Triple(t) => Wire::Triple {
            ring: t.get(1).ring(),
            t1: t.get(1).to_string_rows(),
            t2: t.get(2).to_string_rows(),
            t3: t.get(3).to_string_rows(),
        },
        Document::Cubic(a) => {
            let adj = a.adjoint_map();
            Wire::CubicNormStructure {
                ring: a.ring(),
                rank: a.rank(),
                basepoint: strings(a.basepoint()),
                norm: a.norm_form().terms().iter().map(|(m, c)| NormTerm { monomial: *m, coeff: c.to_string() }).collect(),
                adjoint: adj.expanded().iter().map(|c| quad_terms(c)).collect(),
                adjoint_factor: adj.post().map(|p| AdjointFactor {
                    base: adj.base().iter().map(|c| quad_terms(c)).collect(),
                    post: p.to_string_rows(),
                }),
                trace: a.trace_matrix().to_string_rows(),
            }
        }
        Document::Element(v) => Wire::Element {
            ring: v.ring(),
            coords: strings(v),
            structured: (v.len() == ALBERT_RANK).then(|| {
                let e = AlbertElement::from_vector(v).expect("rank 27");
                Structured {
                    alphas: e.alphas.iter().map(|s| s.to_string()).collect(),
                    u1: strings(&e.u[0]),
                    u2: strings(&e.u[1]),
                    u3: strings(&e.u[2]),
                }
            }),
        },
        Document::Frame(f) => Wire::Frame { ring: f.ring(), elements: f.elements().clone().map(|c| strings(&c)) },
        Document::LinearMap(m) => Wire::LinearMap { ring: m.ring(), matrix: m.to_string_rows() },
    }
}

pub fn to_json(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(&to_wire(doc)).expect("documents serialize");
    s.push('\n');
    s
}

fn space(ring: Ring, w: &SpaceWire) -> Result<QuadraticSpace> {
    let m = Matrix::parse(ring, &w.coeffs)?;
    if m.rows() != w.rank {
        return Err(Error::dims(w.rank, m.rows()));
    }
    QuadraticSpace::new(m)
}

fn nested(ring: Ring, t: &[Vec<Vec<String>>]) -> Result<BilinearMap> {
    let parsed = t
        .iter()
        .map(|row| row.iter().map(|v| v.iter().map(|s| ring.parse_scalar(s)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    BilinearMap::from_nested(ring, parsed)
}

fn quad_base(ring: Ring, coords: &[Vec<QuadTerm>]) -> Result<Vec<Vec<(usize, usize, Scalar)>>> {
    coords
        .iter()
        .map(|c| c.iter().map(|t| Ok((t.monomial[0], t.monomial[1], ring.parse_scalar(&t.coeff)?))).collect())
        .collect()
}

fn from_wire(w: Wire, validation: Validation) -> Result<Document> {
    let full = validation == Validation::Full;
    Ok(match w {
        Wire::CompositionAlgebra { ring, space: s, mult, unity, kind } => {
            let space = space(ring, &s)?;
            let mult = nested(ring, &mult)?;
            let unity = unity.map(|u| Vector::parse(ring, &u)).transpose()?;
            let kind = AlgebraKind::parse(&kind)?;
            Document::CompositionAlgebra(if full {
                CompositionAlgebra::new(space, mult, unity, kind)?
            } else {
                let (l, r, o) = mult.dims();
                let n = space.rank();
                if (l, r, o) != (n, n, n) || unity.as_ref().is_some_and(|u| u.len() != n) {
                    return Err(Error::Validation("multiplication tensor does not match the form's rank".into()));
                }
                CompositionAlgebra::from_parts_unchecked(space, mult, unity, kind)
            })
        }
        Wire::CompositionOfForms { ring, c1, c2, c3, m } => {
            let spaces = [space(ring, &c1)?, space(ring, &c2)?, space(ring, &c3)?];
            let m = nested(ring, &m)?;
            if m.dims() != (spaces[2].rank(), spaces[1].rank(), spaces[0].rank()) {
                return Err(Error::Validation("m must map C3 × C2 into C1".into()));
            }
            Document::CompositionOfForms(if full {
                let [a, b, c] = spaces;
                CompositionOfForms::new(a, b, c, m)?
            } else {
                CompositionOfForms::from_parts_unchecked(spaces, m)
            })
        }
        Wire::Triple { ring, t1, t2, t3 } => {
            let maps = [Matrix::parse(ring, &t1)?, Matrix::parse(ring, &t2)?, Matrix::parse(ring, &t3)?];
            Document::Triple(if full {
                let [a, b, c] = maps;
                TripleMap::new(a, b, c)?
            } else {
                if maps.iter().any(|m| !m.is_square()) {
                    return Err(Error::Validation("triple maps must be square".into()));
                }
                TripleMap::from_maps_unchecked(maps)
            })
        }
        Wire::CubicNormStructure { ring, rank, basepoint, norm, adjoint, adjoint_factor, trace } => {
            let basepoint = Vector::parse(ring, &basepoint)?;
            let norm = CubicForm::new(ring, rank, norm.iter().map(|t| Ok((t.monomial, ring.parse_scalar(&t.coeff)?))).collect::<Result<Vec<_>>>()?)?;
            let expanded = QuadraticMap::new(ring, rank, quad_base(ring, &adjoint)?, None)?;
            let adjoint = match adjoint_factor {
                None => expanded,
                Some(f) => {
                    let factored = QuadraticMap::new(ring, rank, quad_base(ring, &f.base)?, Some(Matrix::parse(ring, &f.post)?))?;
                    if factored.expanded() != expanded.base() {
                        return Err(Error::Validation("adjoint_factor does not expand to adjoint".into()));
                    }
                    factored
                }
            };
            let trace = Matrix::parse(ring, &trace)?;
            Document::Cubic(if full {
                CubicNormStructure::new(basepoint, norm, adjoint, trace)?
            } else {
                CubicNormStructure::from_parts(basepoint, norm, adjoint, trace)?
            })
        }
        Wire::Element { ring, coords, structured } => {
            let v = Vector::parse(ring, &coords)?;
            if let Some(s) = structured {
                let parts: Vec<Scalar> = s.alphas.iter().chain(&s.u1).chain(&s.u2).chain(&s.u3).map(|c| ring.parse_scalar(c)).collect::<Result<_>>()?;
                if parts != v.coords() {
                    return Err(Error::Validation("structured form disagrees with coords".into()));
                }
            }
            Document::Element(v)
        }
        Wire::Frame { ring, elements } => {
            let [a, b, c] = elements;
            Document::Frame(Frame::new(Vector::parse(ring, &a)?, Vector::parse(ring, &b)?, Vector::parse(ring, &c)?)?)
        }
        Wire::LinearMap { ring, matrix } => Document::LinearMap(Matrix::parse(ring, &matrix)?),
    })
}

pub fn from_json(s: &str, validation: Validation) -> Result<Document> {
    let w: Wire = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    from_wire(w, validation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::albert::{self, Gamma};

    fn f7() -> Ring {
        Ring::prime_field(7).unwrap()
    }

    fn round_trip(doc: Document) {
        let s = to_json(&doc);
        let back = from_json(&s, Validation::Full).unwrap();
        assert_eq!(back, doc);
        assert_eq!(to_json(&back), s);
    }

    #[test]
    fn composition_documents_round_trip() {
        let z = CompositionAlgebra::zorn(Ring::Integers).unwrap();
        round_trip(Document::CompositionAlgebra(z.clone()));
        round_trip(Document::CompositionAlgebra(z.para().unwrap()));
        round_trip(Document::CompositionOfForms(z.para().unwrap().composition_of()));
        round_trip(Document::Triple(TripleMap::identity(Ring::Rationals, 8)));
    }

    #[test]
    fn cubic_round_trips_with_and_without_factor() {
        let a = albert::h3(&CompositionAlgebra::zorn(f7()).unwrap(), &Gamma::from_ints(f7(), [1, 2, 3]).unwrap()).unwrap();
        round_trip(Document::Cubic(a.clone()));
        let mut p = a.basepoint().clone();
        p.set(5, f7().int(2));
        let (p, _) = a.normalize_isotope(&p).unwrap();
        let iso = a.isotope(&p).unwrap();
        assert!(iso.adjoint_map().post().is_some());
        round_trip(Document::Cubic(iso));
    }

    #[test]
    fn elements_and_frames() {
        let mut v = albert::e(Ring::Rationals, 1);
        v.set(20, Ring::Rationals.parse_scalar("-3/2").unwrap());
        round_trip(Document::Element(v));
        round_trip(Document::Frame(Frame::distinguished(f7())));
        round_trip(Document::LinearMap(Matrix::identity(f7(), 3)));
    }

    #[test]
    fn rejects_bad_documents() {
        let z = CompositionAlgebra::zorn(f7()).unwrap();
        let mut w = to_wire(&Document::CompositionAlgebra(z));
        if let Wire::CompositionAlgebra { mult, .. } = &mut w {
            mult[2][5][0] = "3".into();
        }
        let s = serde_json::to_string(&w).unwrap();
        assert!(matches!(from_json(&s, Validation::Full), Err(Error::Validation(_))));
        assert!(from_json(&s, Validation::Shape).is_ok());
        assert!(matches!(from_json(r#"{"type":"element","ring":"Fp:6","coords":[]}"#, Validation::Full), Err(Error::Parse(_))));
        assert!(matches!(from_json(r#"{"type":"frame","ring":"Q"}"#, Validation::Full), Err(Error::Parse(_))));
    }

    #[test]
    fn scalars_are_strings() {
        let s = to_json(&Document::Element(Vector::from_ints(Ring::Integers, &[1, -2])));
        assert!(s.contains("\"-2\""));
        assert!(s.contains("\"ring\": \"Z\""));
    }
}
