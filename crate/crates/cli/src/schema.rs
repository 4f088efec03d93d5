//! The textual document formats: JSON schemas for complexes, abelian
//! realizations, blowup profiles, and label quotients, together with the
//! conversions between documents and library types.
//!
//! Field names are part of the tool's contract and are listed in
//! `docs/format.md`. Serialization is canonical: fields appear in fixed
//! order, optional fields are omitted when default, and lattice data is
//! always written in explicit per-cone form (the `vertex_rays` shorthand
//! is accepted on input only). Parsing a document, serializing it, and
//! parsing again yields the same document.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use stratal::freecat::ClassLabel;
use stratal::homology::{int_matrix, AbelianRealization};
use stratal::lattice::{shared_ambient_cones, LatticeCone, LatticeConeComplex};
use stratal::strata::{
    BaseTag, ComplexSpec, StratifiedComplex, Stratum, StratumFlags, StratumId, Vertex, VertexId,
    VertexOrder,
};
use stratal::subdivide::{CenterRelation, IntersectionProfile};
use stratal::volume::LabelQuotient;

/// Base of the degeneration: the string `"k"` for a field, or
/// `{"R_d": d}` for a power series base of dimension `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseDoc {
    Tag(String),
    Power {
        #[serde(rename = "R_d")]
        r_d: u32,
    },
}

/// Vertex order: a single integer rank, or the list of vertex ids
/// strictly below this vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderDoc {
    Rank(i64),
    Above(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: String,
    pub order: OrderDoc,
    pub class: String,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagsDoc {
    #[serde(default, skip_serializing_if = "is_false")]
    pub exceptional: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub in_last_divisor: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumDoc {
    pub id: String,
    /// Vertex ids in ascending vertex order.
    pub vertices: Vec<String>,
    /// Face ids in deletion order: entry `j` names the stratum obtained
    /// by deleting vertex `j`. Omitted for single-vertex strata.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub faces: Vec<String>,
    pub class: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flags: Option<FlagsDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeDoc {
    pub id: String,
    pub ambient_dim: usize,
    /// One primitive ray per word letter, each of length `ambient_dim`.
    pub rays: Vec<Vec<i64>>,
    /// Face id -> embedding matrix (`ambient_dim` rows).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub face_embeddings: BTreeMap<String, Vec<Vec<i64>>>,
}

/// Lattice data: explicit per-cone data, or the shared-ambient shorthand
/// giving one ray per vertex in a single lattice (all embeddings are then
/// the identity).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeDoc {
    SharedAmbient { ambient_dim: usize, vertex_rays: BTreeMap<String, Vec<i64>> },
    Cones { cones: Vec<ConeDoc> },
}

/// The complex document: everything needed to rebuild a stratified
/// complex, plus optional lattice data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDocument {
    pub name: String,
    pub base: BaseDoc,
    pub vertices: Vec<VertexDoc>,
    pub strata: Vec<StratumDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeDoc>,
}

/// Abelian realization document. Matrix keys are arrows written
/// `"source->face"` on stratum ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationDocument {
    pub ranks: BTreeMap<String, usize>,
    pub matrices: BTreeMap<String, Vec<Vec<i64>>>,
}

/// Blowup profile document: the center comes from the command line, the
/// document carries the relation and the component-count overrides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileDocument {
    /// One of `properly_inside`, `equals_center`, `not_in_any_stratum`.
    pub relation: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub counts: BTreeMap<String, u32>,
}

/// Label quotient document: groups of class labels to merge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientDocument {
    pub merge: Vec<Vec<String>>,
}

/// Turns a document into raw complex data. Only the base tag can fail
/// here; structural problems are left to validation.
pub fn spec_of_document(doc: &ComplexDocument) -> Result<ComplexSpec, String> {
    let base = match &doc.base {
        BaseDoc::Tag(s) if s == "k" => BaseTag::K,
        BaseDoc::Tag(s) => {
            return Err(format!("base must be \"k\" or {{\"R_d\": d}}, got \"{s}\""));
        }
        BaseDoc::Power { r_d } => BaseTag::Rd(*r_d),
    };
    let vertices = doc
        .vertices
        .iter()
        .map(|v| Vertex {
            id: VertexId(v.id.clone()),
            order: match &v.order {
                OrderDoc::Rank(r) => VertexOrder::Rank(*r),
                OrderDoc::Above(list) => {
                    VertexOrder::Above(list.iter().map(|s| VertexId(s.clone())).collect())
                }
            },
        })
        .collect();
    let strata = doc
        .strata
        .iter()
        .map(|s| Stratum {
            id: StratumId(s.id.clone()),
            vertices: s.vertices.iter().map(|v| VertexId(v.clone())).collect(),
            faces: s.faces.iter().map(|f| StratumId(f.clone())).collect(),
            class: ClassLabel(s.class.clone()),
            flags: s
                .flags
                .as_ref()
                .map(|f| StratumFlags {
                    exceptional: f.exceptional,
                    in_last_divisor: f.in_last_divisor,
                })
                .unwrap_or_default(),
        })
        .collect();
    Ok(ComplexSpec { name: doc.name.clone(), base, vertices, strata })
}

/// Builds the lattice data of a document against its validated complex.
/// The shared-ambient shorthand needs the complex to resolve vertex ids;
/// missing or stray vertex ids are input errors. Structural defects of
/// explicit cone data are left to cone validation.
pub fn lattice_of_document(
    doc: &ComplexDocument,
    c: &StratifiedComplex,
) -> Result<Option<LatticeConeComplex>, String> {
    let Some(lattice) = &doc.lattice else { return Ok(None) };
    match lattice {
        LatticeDoc::SharedAmbient { ambient_dim, vertex_rays } => {
            let known: BTreeSet<&str> =
                c.vertices().iter().map(|v| v.id.0.as_str()).collect();
            for id in vertex_rays.keys() {
                if !known.contains(id.as_str()) {
                    return Err(format!("lattice names an unknown vertex {id}"));
                }
            }
            let mut rays = Vec::with_capacity(c.vertices().len());
            for v in c.vertices() {
                match vertex_rays.get(&v.id.0) {
                    Some(r) => rays.push(r.clone()),
                    None => return Err(format!("lattice is missing a ray for vertex {}", v.id)),
                }
            }
            Ok(Some(shared_ambient_cones(c, *ambient_dim, &rays)))
        }
        LatticeDoc::Cones { cones } => {
            let mut out: Vec<LatticeCone> = cones
                .iter()
                .map(|k| LatticeCone {
                    id: StratumId(k.id.clone()),
                    ambient_dim: k.ambient_dim,
                    rays: k.rays.clone(),
                    face_embeddings: k
                        .face_embeddings
                        .iter()
                        .map(|(f, m)| (StratumId(f.clone()), m.clone()))
                        .collect(),
                })
                .collect();
            // When the cone ids are exactly the stratum ids, accept them in
            // any order; genuinely wrong id sets are left for validation to
            // report.
            let want: Vec<&StratumId> = c.strata().iter().map(|s| &s.id).collect();
            let have: BTreeSet<&StratumId> = out.iter().map(|k| &k.id).collect();
            if out.len() == want.len() && want.iter().all(|id| have.contains(id)) {
                out.sort_by_key(|k| c.stratum_index(&k.id).expect("id was checked"));
            }
            Ok(Some(LatticeConeComplex { cones: out }))
        }
    }
}

/// Class label of the divisor stratum of one vertex. Validation
/// guarantees the stratum exists and is unique.
fn divisor_class(c: &StratifiedComplex, vidx: usize) -> String {
    (0..c.strata().len())
        .find(|&s| c.codim(s) == 1 && c.word(s) == [vidx])
        .map(|s| c.stratum(s).class.0.clone())
        .expect("every vertex has its divisor stratum")
}

/// Checks that each vertex's `class` field matches the class of its
/// divisor stratum; the document format repeats the label for
/// readability, so a mismatch is a real inconsistency.
pub fn vertex_class_report(
    doc: &ComplexDocument,
    c: &StratifiedComplex,
) -> stratal::report::ValidationReport {
    let mut rep = stratal::report::ValidationReport::new();
    for (i, v) in doc.vertices.iter().enumerate() {
        let want = divisor_class(c, i);
        if v.class != want {
            rep.push(
                "vertex-class",
                format!(
                    "vertex {} declares class {} but its divisor stratum has class {}",
                    v.id, v.class, want
                ),
            );
        }
    }
    rep
}

/// Canonical document of a validated complex, with optional lattice data
/// written in explicit per-cone form.
pub fn document_of_complex(
    c: &StratifiedComplex,
    lattice: Option<&LatticeConeComplex>,
) -> ComplexDocument {
    let spec = c.spec();
    ComplexDocument {
        name: spec.name.clone(),
        base: match spec.base {
            BaseTag::K => BaseDoc::Tag("k".to_string()),
            BaseTag::Rd(d) => BaseDoc::Power { r_d: d },
        },
        vertices: spec
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| VertexDoc {
                id: v.id.0.clone(),
                order: match &v.order {
                    VertexOrder::Rank(r) => OrderDoc::Rank(*r),
                    VertexOrder::Above(list) => {
                        OrderDoc::Above(list.iter().map(|u| u.0.clone()).collect())
                    }
                },
                class: divisor_class(c, i),
            })
            .collect(),
        strata: spec
            .strata
            .iter()
            .map(|s| StratumDoc {
                id: s.id.0.clone(),
                vertices: s.vertices.iter().map(|v| v.0.clone()).collect(),
                faces: s.faces.iter().map(|f| f.0.clone()).collect(),
                class: s.class.0.clone(),
                flags: if s.flags == StratumFlags::default() {
                    None
                } else {
                    Some(FlagsDoc {
                        exceptional: s.flags.exceptional,
                        in_last_divisor: s.flags.in_last_divisor,
                    })
                },
            })
            .collect(),
        lattice: lattice.map(|cc| LatticeDoc::Cones {
            cones: cc
                .cones
                .iter()
                .map(|k| ConeDoc {
                    id: k.id.0.clone(),
                    ambient_dim: k.ambient_dim,
                    rays: k.rays.clone(),
                    face_embeddings: k
                        .face_embeddings
                        .iter()
                        .map(|(f, m)| (f.0.clone(), m.clone()))
                        .collect(),
                })
                .collect(),
        }),
    }
}

/// Parses a realization document. Arrow keys must read `"source->face"`.
pub fn realization_of_document(doc: &RealizationDocument) -> Result<AbelianRealization, String> {
    let ranks = doc.ranks.iter().map(|(l, &r)| (ClassLabel(l.clone()), r)).collect();
    let mut matrices = BTreeMap::new();
    for (key, rows) in &doc.matrices {
        let Some((src, dst)) = key.split_once("->") else {
            return Err(format!("matrix key \"{key}\" is not of the form \"source->face\""));
        };
        matrices.insert(
            (StratumId(src.trim().to_string()), StratumId(dst.trim().to_string())),
            int_matrix(rows),
        );
    }
    Ok(AbelianRealization { ranks, matrices })
}

/// Parses a blowup profile document against the center named on the
/// command line.
pub fn profile_of_document(
    doc: &ProfileDocument,
    center: StratumId,
) -> Result<IntersectionProfile, String> {
    let relation = match doc.relation.as_str() {
        "properly_inside" => CenterRelation::ProperlyInside,
        "equals_center" => CenterRelation::EqualsCenter,
        "not_in_any_stratum" => CenterRelation::NotInAnyStratum,
        other => {
            return Err(format!(
                "relation must be properly_inside, equals_center, or not_in_any_stratum, \
                 got \"{other}\""
            ));
        }
    };
    let counts =
        doc.counts.iter().map(|(s, &n)| (StratumId(s.clone()), n)).collect();
    Ok(IntersectionProfile { center, relation, counts })
}

/// Parses a quotient document into a label quotient.
pub fn quotient_of_document(doc: &QuotientDocument) -> LabelQuotient {
    let mut q = LabelQuotient::new();
    for group in &doc.merge {
        let labels: Vec<ClassLabel> = group.iter().map(|l| ClassLabel(l.clone())).collect();
        q.merge_all(labels.iter());
    }
    q
}
