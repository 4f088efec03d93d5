//! Barycentric, star, and blowup subdivisions of stratified complexes,
//! together with the comparison maps relating the covering complexes of the
//! derived and base complexes and the explicit homotopies inverting them.
//!
//! Each constructor registers the derived complex (and, for star and
//! blowup, a reordered copy of the base) in the caller's [`ArrowTable`] and
//! records per-stratum provenance: which base stratum a derived stratum is
//! the strict transform of, which chain it stands for, or which exceptional
//! family it belongs to. The comparison maps are then built from that
//! provenance rather than re-derived by search.
//!
//! Star and blowup subdivisions reorder the base vertices so that the
//! center's vertices come last among the old vertices and the exceptional
//! vertex comes last overall. The closed-form description of the covering
//! pushforward and the sign pattern of the inverse both assume this block
//! layout; with an arbitrary interleaved order the closed form acquires
//! stray signs and stops matching the composite. The reordered copy is a
//! genuine registered complex, isomorphic stratum by stratum to the
//! original, and all derived data points at it.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::builders::{
    build_cech, build_last_vertex, build_sd, build_subdivision_map, sd_pushforward, BuildMode,
    BuiltComplex, SummandKey,
};
use crate::chain::{ChainMap, Homotopy};
use crate::freecat::{ArrowTable, ArrowTag, ClassLabel, ComplexHandle, FreeMorphism, Node};
use crate::report::ValidationReport;
use crate::strata::{
    enumerate_chains, BaseTag, ChainMode, ComplexSpec, GradedPoset, PosetMap, StratifiedComplex,
    Stratum, StratumFlags, StratumId, Vertex, VertexId, VertexOrder,
};

/// Which construction produced a [`SubdivisionResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubdivisionKind {
    Barycentric,
    Star,
    Blowup,
}

/// Where one derived stratum comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Strict transform of a base stratum.
    Strict { base: usize },
    /// Barycentric cell: a strictly increasing chain of base strata.
    ChainOf { entries: Vec<usize> },
    /// Exceptional stratum over the base stratum `mu`, in the family of its
    /// `component`-th center piece, containing the center vertices `kept`.
    Exceptional { mu: usize, component: u32, kept: Vec<usize> },
}

/// A subdivision: the derived complex, the monotone pushforward onto the
/// base it maps to, provenance per derived stratum, and the pairs whose
/// comparison arrow is an isomorphism.
#[derive(Clone, Debug)]
pub struct SubdivisionResult {
    pub kind: SubdivisionKind,
    /// The base complex the derived one maps onto. For star and blowup this
    /// is the reordered copy; barycentric maps onto the original directly.
    pub base: ComplexHandle,
    /// The complex the caller passed in.
    pub original_base: ComplexHandle,
    pub derived: ComplexHandle,
    /// Monotone map of stratum posets, derived to base.
    pub pushforward: PosetMap,
    /// Provenance, indexed by derived stratum.
    pub correspondence: Vec<Provenance>,
    /// Pairs (derived stratum, base stratum) whose arrow is invertible.
    pub iso_tags: Vec<(usize, usize)>,
    /// The center stratum, in `base` indexing (star and proper blowup).
    pub center: Option<usize>,
    /// The exceptional vertex, in derived indexing.
    pub exceptional_vertex: Option<usize>,
}

/// Connectivity data for a blowup center: how the center meets the strata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionProfile {
    pub center: StratumId,
    pub relation: CenterRelation,
    /// Component-count overrides for strata in the center's star; absent
    /// strata count one component.
    pub counts: BTreeMap<StratumId, u32>,
}

/// How the blowup center sits relative to the stratification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CenterRelation {
    /// The center is the closed stratum itself: the blowup is the star
    /// subdivision.
    EqualsCenter,
    /// The center is properly contained in the closed stratum.
    ProperlyInside,
    /// The center misses every stratum: the blowup changes nothing
    /// combinatorially.
    NotInAnyStratum,
}

impl IntersectionProfile {
    /// One component everywhere, center properly inside its stratum.
    pub fn default_profile(center: StratumId) -> Self {
        IntersectionProfile { center, relation: CenterRelation::ProperlyInside, counts: BTreeMap::new() }
    }
}

/// Errors from the subdivision constructors.
#[derive(Debug)]
pub enum SubdivideError {
    UnknownCenter { id: StratumId },
    Profile { report: ValidationReport },
}

impl fmt::Display for SubdivideError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubdivideError::UnknownCenter { id } => write!(f, "unknown center stratum {id}"),
            SubdivideError::Profile { report } => write!(f, "inconsistent profile:\n{report}"),
        }
    }
}

impl std::error::Error for SubdivideError {}

fn fresh(used: &mut HashSet<String>, want: String) -> String {
    let mut id = want;
    while !used.insert(id.clone()) {
        id.push('\'');
    }
    id
}

/// A deterministic linear extension of the vertex order: repeatedly takes
/// the smallest-id vertex all of whose strict predecessors are placed.
fn linear_extension(c: &StratifiedComplex) -> Vec<usize> {
    let nv = c.vertices().len();
    let mut placed = vec![false; nv];
    let mut out = Vec::with_capacity(nv);
    while out.len() < nv {
        let next = (0..nv)
            .filter(|&v| !placed[v])
            .filter(|&v| {
                (0..nv).all(|u| u == v || placed[u] || !c.vertex_le(u, v) || c.vertex_le(v, u))
            })
            .min_by(|&a, &b| c.vertex(a).id.cmp(&c.vertex(b).id))
            .expect("vertex order has no cycle");
        placed[next] = true;
        out.push(next);
    }
    out
}

/// Builds the reordered copy of the base used by star and blowup: vertices
/// outside the center block keep their relative order, the center's
/// vertices follow them, and every stratum's vertex and face lists are
/// re-sorted accordingly. Vertex and stratum indices are unchanged.
fn adapted_spec(c: &StratifiedComplex, center_vertices: &BTreeSet<usize>, name: String) -> ComplexSpec {
    let ext = linear_extension(c);
    let mut rank = vec![0i64; c.vertices().len()];
    let mut next = 0i64;
    for &v in ext.iter().filter(|v| !center_vertices.contains(v)) {
        rank[v] = next;
        next += 1;
    }
    for &v in ext.iter().filter(|v| center_vertices.contains(v)) {
        rank[v] = next;
        next += 1;
    }
    let vertices = c
        .vertices()
        .iter()
        .enumerate()
        .map(|(v, vx)| Vertex { id: vx.id.clone(), order: VertexOrder::Rank(rank[v]) })
        .collect();
    let strata = c
        .strata()
        .iter()
        .enumerate()
        .map(|(s, st)| {
            let mut pairs: Vec<(usize, Option<StratumId>)> = c
                .word(s)
                .iter()
                .enumerate()
                .map(|(pos, &v)| (v, st.faces.get(pos).cloned()))
                .collect();
            pairs.sort_by_key(|&(v, _)| rank[v]);
            Stratum {
                id: st.id.clone(),
                vertices: pairs.iter().map(|&(v, _)| c.vertex(v).id.clone()).collect(),
                faces: pairs.into_iter().filter_map(|(_, f)| f).collect(),
                class: st.class.clone(),
                flags: st.flags,
            }
        })
        .collect();
    ComplexSpec { name, base: c.base().clone(), vertices, strata }
}

/// Exceptional stratum bookkeeping shared by star and blowup.
struct ExceptionalPlan {
    mu: usize,
    component: u32,
    kept: Vec<usize>,
    id: StratumId,
    /// Class label: the image's label for a star (the stratum is a
    /// projective bundle over its image), one fresh label per family for a
    /// blowup (the family lives over a new center piece).
    class: ClassLabel,
}

/// Shared core of star and blowup: given the populated star families and
/// the per-family component counts, assembles the derived complex over the
/// reordered base.
struct CommonCenterData {
    center: usize,
    center_vertices: BTreeSet<usize>,
    star: Vec<usize>,
}

fn collect_center_data(c: &StratifiedComplex, center: usize) -> CommonCenterData {
    let center_vertices: BTreeSet<usize> = c.word(center).iter().copied().collect();
    let star = (0..c.strata().len()).filter(|&t| c.leq(center, t)).collect();
    CommonCenterData { center, center_vertices, star }
}

/// Star subdivision at a stratum: every stratum whose closure contains the
/// center is replaced by the joins of its boundary pieces with the new
/// exceptional vertex; every other stratum survives as a strict transform.
/// All derived strata carry invertible arrows to their images.
pub fn star_subdivide(
    table: &mut ArrowTable,
    handle: ComplexHandle,
    center: &StratumId,
) -> Result<SubdivisionResult, SubdivideError> {
    let center_idx = table
        .complex(handle)
        .stratum_index(center)
        .ok_or_else(|| SubdivideError::UnknownCenter { id: center.clone() })?;
    let base = register_adapted(table, handle, center_idx);
    let c = table.complex(base);
    let data = collect_center_data(c, center_idx);
    let star_set: HashSet<usize> = data.star.iter().copied().collect();
    let strict: Vec<usize> = (0..c.strata().len()).filter(|s| !star_set.contains(s)).collect();
    let m_sorted: Vec<usize> = c.word(center_idx).to_vec();
    let mut exceptional = Vec::new();
    let mut used_ids: HashSet<String> =
        strict.iter().map(|&s| c.stratum(s).id.0.clone()).collect();
    for &mu in &data.star {
        for mask in 0..(1u32 << m_sorted.len()) - 1 {
            let kept: Vec<usize> = m_sorted
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask & (1 << i) != 0)
                .map(|(_, &v)| v)
                .collect();
            let want = format!(
                "E({};{})",
                c.stratum(mu).id.0,
                kept.iter().map(|&v| c.vertex(v).id.0.clone()).collect::<Vec<_>>().join(",")
            );
            let id = StratumId(fresh(&mut used_ids, want));
            let class = c.stratum(mu).class.clone();
            exceptional.push(ExceptionalPlan { mu, component: 1, kept, id, class });
        }
    }
    let name = format!("{}/star:{}", c.name(), center.0);
    let counts = |_mu: usize| 1u32;
    let out = assemble_center_subdivision(
        table,
        handle,
        base,
        SubdivisionKind::Star,
        &data,
        strict,
        exceptional,
        &counts,
        name,
    );
    Ok(out)
}

fn register_adapted(table: &mut ArrowTable, handle: ComplexHandle, center: usize) -> ComplexHandle {
    let spec = {
        let c = table.complex(handle);
        let center_vertices: BTreeSet<usize> = c.word(center).iter().copied().collect();
        adapted_spec(c, &center_vertices, format!("{}/adapted", c.name()))
    };
    let adapted = StratifiedComplex::new(spec).expect("reordered base must validate");
    let base = table.register_complex(adapted);
    let n = table.complex(base).strata().len();
    let arrows = (0..n)
        .map(|s| {
            (
                Node { complex: base, stratum: s },
                Node { complex: handle, stratum: s },
                ArrowTag::Iso,
            )
        })
        .collect();
    table.add_arrows(arrows);
    base
}

/// Builds the derived complex over the reordered base from the strict and
/// exceptional stratum plans, registers it, installs the arrows, and
/// assembles the result record.
#[allow(clippy::too_many_arguments)]
fn assemble_center_subdivision(
    table: &mut ArrowTable,
    original_base: ComplexHandle,
    base: ComplexHandle,
    kind: SubdivisionKind,
    data: &CommonCenterData,
    strict: Vec<usize>,
    exceptional: Vec<ExceptionalPlan>,
    counts: &dyn Fn(usize) -> u32,
    name: String,
) -> SubdivisionResult {
    let c = table.complex(base);
    let m_set = &data.center_vertices;
    // A star at a one-vertex center retires that vertex: every stratum on
    // it lies in the center's star (the vertex has a unique codimension-one
    // stratum), so nothing in the derived complex references it.
    let drop_center_vertex = m_set.len() == 1 && kind == SubdivisionKind::Star;
    let mut used_vertex_ids: HashSet<String> = c
        .vertices()
        .iter()
        .enumerate()
        .filter(|(v, _)| !(drop_center_vertex && m_set.contains(v)))
        .map(|(_, vx)| vx.id.0.clone())
        .collect();
    let e_id = VertexId(fresh(&mut used_vertex_ids, "E".to_string()));
    let max_rank = c
        .vertices()
        .iter()
        .map(|v| match v.order {
            VertexOrder::Rank(r) => r,
            VertexOrder::Above(_) => unreachable!("reordered base uses ranks"),
        })
        .max()
        .unwrap_or(-1);
    let mut vertices: Vec<Vertex> = c
        .vertices()
        .iter()
        .enumerate()
        .filter(|(v, _)| !(drop_center_vertex && m_set.contains(v)))
        .map(|(_, vx)| vx.clone())
        .collect();
    vertices.push(Vertex { id: e_id.clone(), order: VertexOrder::Rank(max_rank + 1) });

    // Index exceptional plans by (mu, component, kept) for face resolution.
    let mut exc_id: HashMap<(usize, u32, Vec<usize>), StratumId> = HashMap::new();
    for plan in &exceptional {
        exc_id.insert((plan.mu, plan.component, plan.kept.clone()), plan.id.clone());
    }

    let mut strata = Vec::new();
    let mut correspondence = Vec::new();
    let mut pushforward = Vec::new();
    for &s in &strict {
        strata.push(c.stratum(s).clone());
        correspondence.push(Provenance::Strict { base: s });
        pushforward.push(s);
    }
    for plan in &exceptional {
        let mu_word = c.word(plan.mu);
        let j_block: Vec<usize> =
            mu_word.iter().copied().filter(|v| !m_set.contains(v)).collect();
        let mut word_ids: Vec<VertexId> = Vec::new();
        let mut faces: Vec<StratumId> = Vec::new();
        let word_len = j_block.len() + plan.kept.len() + 1;
        for &v in &j_block {
            word_ids.push(c.vertex(v).id.clone());
            if word_len > 1 {
                let keep: BTreeSet<usize> = mu_word
                    .iter()
                    .copied()
                    .filter(|&u| u != v)
                    .collect();
                let nu = c.subface(plan.mu, &keep).expect("face of a star stratum");
                let nu_component = if counts(nu) == 1 { 1 } else { plan.component };
                faces.push(
                    exc_id
                        .get(&(nu, nu_component, plan.kept.clone()))
                        .expect("face family exists")
                        .clone(),
                );
            }
        }
        for &v in &plan.kept {
            word_ids.push(c.vertex(v).id.clone());
            let smaller: Vec<usize> =
                plan.kept.iter().copied().filter(|&u| u != v).collect();
            faces.push(
                exc_id
                    .get(&(plan.mu, plan.component, smaller))
                    .expect("smaller family member exists")
                    .clone(),
            );
        }
        word_ids.push(e_id.clone());
        if word_len > 1 {
            let keep: BTreeSet<usize> =
                j_block.iter().chain(plan.kept.iter()).copied().collect();
            let under = c.subface(plan.mu, &keep).expect("underlying face exists");
            faces.push(c.stratum(under).id.clone());
        } else {
            faces.clear();
        }
        strata.push(Stratum {
            id: plan.id.clone(),
            vertices: word_ids,
            faces,
            class: plan.class.clone(),
            flags: StratumFlags { exceptional: true, in_last_divisor: true },
        });
        correspondence.push(Provenance::Exceptional {
            mu: plan.mu,
            component: plan.component,
            kept: plan.kept.clone(),
        });
        pushforward.push(plan.mu);
    }
    let spec = ComplexSpec { name, base: c.base().clone(), vertices, strata };
    let exceptional_vertex_pos = spec.vertices.len() - 1;
    let derived_complex = match StratifiedComplex::new(spec) {
        Ok(d) => d,
        Err(report) => panic!("derived complex must validate:\n{report}"),
    };
    let derived = table.register_complex(derived_complex);

    let mut arrows = Vec::new();
    let mut iso_tags = Vec::new();
    for (d, prov) in correspondence.iter().enumerate() {
        let target = match prov {
            Provenance::Strict { base: s } => *s,
            Provenance::Exceptional { mu, .. } => *mu,
            Provenance::ChainOf { .. } => unreachable!(),
        };
        let invertible = matches!(prov, Provenance::Strict { .. }) || kind == SubdivisionKind::Star;
        let tag = if invertible { ArrowTag::Iso } else { ArrowTag::Vertical };
        arrows.push((
            Node { complex: derived, stratum: d },
            Node { complex: base, stratum: target },
            tag,
        ));
        if invertible {
            iso_tags.push((d, target));
        }
    }
    if kind == SubdivisionKind::Blowup {
        // Within an exceptional family the face arrows that drop a center
        // vertex are projective-bundle projections, hence invertible.
        let mut by_key: HashMap<(usize, u32, Vec<usize>), usize> = HashMap::new();
        for (d, prov) in correspondence.iter().enumerate() {
            if let Provenance::Exceptional { mu, component, kept } = prov {
                by_key.insert((*mu, *component, kept.clone()), d);
            }
        }
        for (d, prov) in correspondence.iter().enumerate() {
            if let Provenance::Exceptional { mu, component, kept } = prov {
                for &v in kept {
                    let smaller: Vec<usize> =
                        kept.iter().copied().filter(|&u| u != v).collect();
                    let down = by_key[&(*mu, *component, smaller)];
                    arrows.push((
                        Node { complex: derived, stratum: d },
                        Node { complex: derived, stratum: down },
                        ArrowTag::Iso,
                    ));
                }
            }
        }
    }
    table.add_arrows(arrows);
    SubdivisionResult {
        kind,
        base,
        original_base,
        derived,
        pushforward: PosetMap { source: derived, target: base, assignment: pushforward },
        correspondence,
        iso_tags,
        center: Some(data.center),
        exceptional_vertex: Some(exceptional_vertex_pos),
    }
}

fn validate_profile(c: &StratifiedComplex, center: usize, profile: &IntersectionProfile) -> ValidationReport {
    let mut rep = ValidationReport::new();
    let star: Vec<usize> = (0..c.strata().len()).filter(|&t| c.leq(center, t)).collect();
    let star_set: HashSet<usize> = star.iter().copied().collect();
    if profile.relation == CenterRelation::NotInAnyStratum {
        if !profile.counts.is_empty() {
            rep.push(
                "counts-forbidden",
                "a center meeting no stratum cannot carry component counts",
            );
        }
        return rep;
    }
    let mut counts: HashMap<usize, u32> = HashMap::new();
    for (id, &n) in &profile.counts {
        match c.stratum_index(id) {
            None => rep.push("support", format!("count on unknown stratum {id}")),
            Some(s) if !star_set.contains(&s) => {
                rep.push("support", format!("count on stratum {id} outside the center's star"))
            }
            Some(s) => {
                counts.insert(s, n);
            }
        }
    }
    let count = |s: usize| counts.get(&s).copied().unwrap_or(1);
    match count(center) {
        0 => rep.push("center-count", "zero components on the center stratum"),
        1 => {}
        _ => rep.push(
            "center-count",
            "more than one component on the center stratum: blow up one connected component at a time",
        ),
    }
    for &mu in &star {
        for &nu in &star {
            if nu != mu && c.leq(nu, mu) {
                if count(mu) >= 1 && count(nu) == 0 {
                    rep.push(
                        "monotone",
                        format!(
                            "stratum {} has components but its face {} has none",
                            c.stratum(mu).id,
                            c.stratum(nu).id
                        ),
                    );
                }
                if count(mu) >= 1 && count(nu) >= 2 {
                    rep.push(
                        "ambiguous",
                        format!(
                            "stratum {} has several components below populated stratum {}; the face maps cannot pick one",
                            c.stratum(nu).id,
                            c.stratum(mu).id
                        ),
                    );
                }
            }
        }
    }
    rep
}

/// Blowup along a center described by an [`IntersectionProfile`]. A center
/// equal to its stratum delegates to [`star_subdivide`]; a center missing
/// every stratum yields an isomorphic copy; a center properly inside its
/// stratum keeps every strict transform and adds exceptional families per
/// the profile's component counts, with fresh class labels.
pub fn blowup_subdivide(
    table: &mut ArrowTable,
    handle: ComplexHandle,
    profile: &IntersectionProfile,
) -> Result<SubdivisionResult, SubdivideError> {
    let center_idx = table
        .complex(handle)
        .stratum_index(&profile.center)
        .ok_or_else(|| SubdivideError::UnknownCenter { id: profile.center.clone() })?;
    let report = validate_profile(table.complex(handle), center_idx, profile);
    if !report.is_valid() {
        return Err(SubdivideError::Profile { report });
    }
    match profile.relation {
        CenterRelation::EqualsCenter => star_subdivide(table, handle, &profile.center),
        CenterRelation::NotInAnyStratum => Ok(blowup_trivial(table, handle)),
        CenterRelation::ProperlyInside => {
            Ok(blowup_proper(table, handle, center_idx, profile))
        }
    }
}

fn blowup_trivial(table: &mut ArrowTable, handle: ComplexHandle) -> SubdivisionResult {
    let spec = {
        let c = table.complex(handle);
        let mut s = c.spec().clone();
        s.name = format!("{}/blowup:none", c.name());
        s
    };
    let derived =
        table.register_complex(StratifiedComplex::new(spec).expect("copy of a valid complex"));
    let n = table.complex(derived).strata().len();
    let arrows = (0..n)
        .map(|s| {
            (
                Node { complex: derived, stratum: s },
                Node { complex: handle, stratum: s },
                ArrowTag::Iso,
            )
        })
        .collect();
    table.add_arrows(arrows);
    SubdivisionResult {
        kind: SubdivisionKind::Blowup,
        base: handle,
        original_base: handle,
        derived,
        pushforward: PosetMap { source: derived, target: handle, assignment: (0..n).collect() },
        correspondence: (0..n).map(|s| Provenance::Strict { base: s }).collect(),
        iso_tags: (0..n).map(|s| (s, s)).collect(),
        center: None,
        exceptional_vertex: None,
    }
}

fn blowup_proper(
    table: &mut ArrowTable,
    handle: ComplexHandle,
    center_idx: usize,
    profile: &IntersectionProfile,
) -> SubdivisionResult {
    let base = register_adapted(table, handle, center_idx);
    let c = table.complex(base);
    let data = collect_center_data(c, center_idx);
    let strict: Vec<usize> = (0..c.strata().len()).collect();
    let m_sorted: Vec<usize> = c.word(center_idx).to_vec();
    let counts_by_idx: HashMap<usize, u32> = profile
        .counts
        .iter()
        .filter_map(|(id, &n)| c.stratum_index(id).map(|s| (s, n)))
        .collect();
    let count = move |s: usize| counts_by_idx.get(&s).copied().unwrap_or(1);
    let mut used_ids: HashSet<String> =
        c.strata().iter().map(|st| st.id.0.clone()).collect();
    let mut used_labels: HashSet<String> =
        c.strata().iter().map(|st| st.class.0.clone()).collect();
    let mut exceptional = Vec::new();
    for &mu in &data.star {
        for component in 1..=count(mu) {
            let class = ClassLabel(fresh(
                &mut used_labels,
                format!("exc({}#{})", c.stratum(mu).id.0, component),
            ));
            for mask in 0..(1u32 << m_sorted.len()) {
                let kept: Vec<usize> = m_sorted
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &v)| v)
                    .collect();
                let want = format!(
                    "E({}#{};{})",
                    c.stratum(mu).id.0,
                    component,
                    kept.iter().map(|&v| c.vertex(v).id.0.clone()).collect::<Vec<_>>().join(",")
                );
                let id = StratumId(fresh(&mut used_ids, want));
                exceptional.push(ExceptionalPlan {
                    mu,
                    component,
                    kept,
                    id,
                    class: class.clone(),
                });
            }
        }
    }
    let name = format!("{}/blowup:{}", c.name(), profile.center.0);
    assemble_center_subdivision(
        table,
        handle,
        base,
        SubdivisionKind::Blowup,
        &data,
        strict,
        exceptional,
        &count,
        name,
    )
}

/// Barycentric subdivision: derived vertices are the base strata, derived
/// strata are the strictly increasing chains, and the pushforward sends a
/// chain to its last entry. Every derived stratum is a projective-bundle
/// degeneration over its last entry, so every arrow is invertible.
pub fn barycentric(table: &mut ArrowTable, handle: ComplexHandle) -> SubdivisionResult {
    let (spec, correspondence, assignment) = {
        let c = table.complex(handle);
        barycentric_spec_of(
            c.strata().len(),
            |s| c.stratum(s).id.clone(),
            |s| c.stratum(s).class.clone(),
            |a, b| c.leq(a, b),
            &all_chains(c),
            c.base().clone(),
            format!("{}/bary", c.name()),
        )
    };
    let derived =
        table.register_complex(StratifiedComplex::new(spec).expect("chain complex must validate"));
    let arrows = assignment
        .iter()
        .enumerate()
        .map(|(d, &s)| {
            (
                Node { complex: derived, stratum: d },
                Node { complex: handle, stratum: s },
                ArrowTag::Iso,
            )
        })
        .collect();
    table.add_arrows(arrows);
    let iso_tags = assignment.iter().enumerate().map(|(d, &s)| (d, s)).collect();
    SubdivisionResult {
        kind: SubdivisionKind::Barycentric,
        base: handle,
        original_base: handle,
        derived,
        pushforward: PosetMap { source: derived, target: handle, assignment },
        correspondence,
        iso_tags,
        center: None,
        exceptional_vertex: None,
    }
}

fn all_chains(c: &StratifiedComplex) -> Vec<Vec<usize>> {
    let mut chains = Vec::new();
    let mut n = 0;
    loop {
        let batch = enumerate_chains(c, n, ChainMode::Nondegenerate);
        if batch.is_empty() {
            break;
        }
        chains.extend(batch.into_iter().map(|h| h.entries));
        n += 1;
    }
    chains
}

/// Shared chain-to-complex assembly for barycentric subdivision over any
/// graded poset presentation.
fn barycentric_spec_of(
    element_count: usize,
    id_of: impl Fn(usize) -> StratumId,
    class_of: impl Fn(usize) -> crate::freecat::ClassLabel,
    le: impl Fn(usize, usize) -> bool,
    chains: &[Vec<usize>],
    base: BaseTag,
    name: String,
) -> (ComplexSpec, Vec<Provenance>, Vec<usize>) {
    let vertices: Vec<Vertex> = (0..element_count)
        .map(|s| {
            let below: Vec<VertexId> = (0..element_count)
                .filter(|&t| t != s && le(t, s))
                .map(|t| VertexId(id_of(t).0))
                .collect();
            Vertex { id: VertexId(id_of(s).0), order: VertexOrder::Above(below) }
        })
        .collect();
    let chain_id = |entries: &[usize]| {
        StratumId(
            entries.iter().map(|&s| id_of(s).0).collect::<Vec<_>>().join("<"),
        )
    };
    let strata: Vec<Stratum> = chains
        .iter()
        .map(|entries| {
            let faces = if entries.len() > 1 {
                (0..entries.len())
                    .map(|j| {
                        let mut e = entries.clone();
                        e.remove(j);
                        chain_id(&e)
                    })
                    .collect()
            } else {
                vec![]
            };
            Stratum {
                id: chain_id(entries),
                vertices: entries.iter().map(|&s| VertexId(id_of(s).0)).collect(),
                faces,
                class: class_of(*entries.last().unwrap()),
                flags: StratumFlags::default(),
            }
        })
        .collect();
    let correspondence =
        chains.iter().map(|e| Provenance::ChainOf { entries: e.clone() }).collect();
    let assignment = chains.iter().map(|e| *e.last().unwrap()).collect();
    (ComplexSpec { name, base, vertices, strata }, correspondence, assignment)
}

/// The simplicial resolution of a general graded poset: its barycentric
/// subdivision, which is a valid stratified complex even when the poset is
/// not the face poset of one (grades may jump, cells may have too few
/// faces).
pub struct PosetSimplicialization {
    pub derived: ComplexHandle,
    pub correspondence: Vec<Provenance>,
}

pub fn simplicialize(
    table: &mut ArrowTable,
    poset: &GradedPoset,
) -> Result<PosetSimplicialization, ValidationReport> {
    let report = poset.validate();
    if !report.is_valid() {
        return Err(report);
    }
    let le = poset.le_matrix();
    let n = poset.elements.len();
    let mut chains: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..n).rev().map(|s| vec![s]).collect();
    while let Some(chain) = stack.pop() {
        let last = *chain.last().unwrap();
        chains.push(chain.clone());
        for next in (0..n).rev() {
            if next != last && le[last][next] && !le[next][last] {
                let mut e = chain.clone();
                e.push(next);
                stack.push(e);
            }
        }
    }
    chains.sort_by_key(|c| (c.len(), c.clone()));
    let (spec, correspondence, _) = barycentric_spec_of(
        n,
        |s| poset.elements[s].id.clone(),
        |s| poset.elements[s].class.clone(),
        |a, b| le[a][b],
        &chains,
        BaseTag::K,
        "poset/bary".to_string(),
    );
    let derived = table.register_complex(StratifiedComplex::new(spec)?);
    Ok(PosetSimplicialization { derived, correspondence })
}

/// The four bounded complexes every comparison statement runs over.
pub struct ComparisonComplexes {
    pub cech_base: BuiltComplex,
    pub cech_derived: BuiltComplex,
    pub sd_base: BuiltComplex,
    pub sd_derived: BuiltComplex,
}

pub fn build_comparison_complexes(table: &ArrowTable, r: &SubdivisionResult) -> ComparisonComplexes {
    ComparisonComplexes {
        cech_base: build_cech(table, r.base, BuildMode::Bounded),
        cech_derived: build_cech(table, r.derived, BuildMode::Bounded),
        sd_base: build_sd(table, r.base, BuildMode::Bounded),
        sd_derived: build_sd(table, r.derived, BuildMode::Bounded),
    }
}

/// The covering pushforward as the composite: covering-to-subdivision on
/// the derived side, pushforward of subdivision complexes, then
/// subdivision-to-covering on the base.
pub fn cech_pushforward_composite(
    table: &ArrowTable,
    r: &SubdivisionResult,
    cx: &ComparisonComplexes,
) -> ChainMap {
    let sd_map = build_subdivision_map(table, &cx.cech_derived, &cx.sd_derived);
    let push = sd_pushforward(table, &r.pushforward, &cx.sd_derived, &cx.sd_base);
    let lam = build_last_vertex(table, &cx.sd_base, &cx.cech_base);
    let first = crate::chain::compose_chain_maps(&push, &sd_map).expect("composable");
    crate::chain::compose_chain_maps(&lam, &first).expect("composable")
}

fn strict_lookup(r: &SubdivisionResult) -> HashMap<usize, usize> {
    r.correspondence
        .iter()
        .enumerate()
        .filter_map(|(d, p)| match p {
            Provenance::Strict { base } => Some((*base, d)),
            _ => None,
        })
        .collect()
}

fn exceptional_lookup(r: &SubdivisionResult) -> HashMap<(usize, u32, Vec<usize>), usize> {
    r.correspondence
        .iter()
        .enumerate()
        .filter_map(|(d, p)| match p {
            Provenance::Exceptional { mu, component, kept } => {
                Some(((*mu, *component, kept.clone()), d))
            }
            _ => None,
        })
        .collect()
}

/// The covering pushforward from its three-case description: a strict
/// transform restricts vertically to its image; an exceptional stratum not
/// containing the center's largest vertex restricts to the subface of its
/// image spanned by its own letters and that vertex; an exceptional
/// stratum containing it goes to zero.
pub fn cech_pushforward_closed_form(
    table: &ArrowTable,
    r: &SubdivisionResult,
    cx: &ComparisonComplexes,
) -> ChainMap {
    assert!(matches!(r.kind, SubdivisionKind::Star | SubdivisionKind::Blowup));
    let c = table.complex(r.base);
    let b = r.center.map(|s0| *c.word(s0).last().expect("center has vertices"));
    let m_set: BTreeSet<usize> =
        r.center.map_or_else(BTreeSet::new, |s0| c.word(s0).iter().copied().collect());
    let mut components = BTreeMap::new();
    let top = crate::chain::degree_cap(&cx.cech_derived.complex, &cx.cech_base.complex);
    for n in 0..=top {
        let mut f = FreeMorphism::zero(cx.cech_derived.complex.term(n), cx.cech_base.complex.term(n));
        for (j, key) in cx.cech_derived.keys.get(&n).map_or(&[][..], Vec::as_slice).iter().enumerate()
        {
            let SummandKey::Stratum(d) = key else { unreachable!() };
            match &r.correspondence[*d] {
                Provenance::Strict { base } => {
                    let i = cx
                        .cech_base
                        .index_of(n, &SummandKey::Stratum(*base))
                        .expect("image stratum summand");
                    f.accumulate(i, j as u32, 1);
                }
                Provenance::Exceptional { mu, kept, .. } => {
                    let b = b.expect("exceptional strata imply a center");
                    if kept.contains(&b) {
                        continue;
                    }
                    let keep: BTreeSet<usize> = c
                        .word(*mu)
                        .iter()
                        .copied()
                        .filter(|v| !m_set.contains(v))
                        .chain(kept.iter().copied())
                        .chain(std::iter::once(b))
                        .collect();
                    let target = c.subface(*mu, &keep).expect("closed-form target exists");
                    let i = cx
                        .cech_base
                        .index_of(n, &SummandKey::Stratum(target))
                        .expect("target has the summand's degree");
                    f.accumulate(i, j as u32, 1);
                }
                Provenance::ChainOf { .. } => unreachable!(),
            }
        }
        components.insert(n, f);
    }
    ChainMap {
        source: cx.cech_derived.complex.clone(),
        target: cx.cech_base.complex.clone(),
        components,
    }
}

/// The homotopy inverse of the covering pushforward and the homotopy
/// showing the other composite is the identity up to boundary.
///
/// For a star subdivision the inverse sends a base stratum in the center's
/// star to the alternating sum of the exceptional sections missing one
/// center vertex, and every other stratum to its strict transform along
/// the inverse isomorphism. For a blowup every stratum has a strict
/// transform and the inverse is that isomorphism everywhere. The homotopy
/// wedges the center's largest vertex onto an exceptional stratum that
/// does not contain it, when the result still exists.
pub fn inverse_and_homotopy(
    table: &ArrowTable,
    r: &SubdivisionResult,
    cx: &ComparisonComplexes,
) -> (ChainMap, Homotopy) {
    assert!(matches!(r.kind, SubdivisionKind::Star | SubdivisionKind::Blowup));
    let c = table.complex(r.base);
    let strict = strict_lookup(r);
    let exceptional = exceptional_lookup(r);
    let b = r.center.map(|s0| *c.word(s0).last().expect("center has vertices"));
    let m_sorted: Vec<usize> = r.center.map_or_else(Vec::new, |s0| c.word(s0).to_vec());
    let m_set: BTreeSet<usize> = m_sorted.iter().copied().collect();

    let mut gamma = BTreeMap::new();
    let top = crate::chain::degree_cap(&cx.cech_base.complex, &cx.cech_derived.complex);
    for n in 0..=top {
        let mut g = FreeMorphism::zero(cx.cech_base.complex.term(n), cx.cech_derived.complex.term(n));
        for (j, key) in cx.cech_base.keys.get(&n).map_or(&[][..], Vec::as_slice).iter().enumerate() {
            let SummandKey::Stratum(t) = key else { unreachable!() };
            let starred =
                r.kind == SubdivisionKind::Star && r.center.map_or(false, |s0| c.leq(s0, *t));
            if starred {
                for (pos, &letter) in c.word(*t).iter().enumerate() {
                    if !m_set.contains(&letter) {
                        continue;
                    }
                    let kept: Vec<usize> =
                        m_sorted.iter().copied().filter(|&v| v != letter).collect();
                    let d = exceptional[&(*t, 1, kept)];
                    let i = cx
                        .cech_derived
                        .index_of(n, &SummandKey::Stratum(d))
                        .expect("section has the same degree");
                    let s = if (n as usize + pos) % 2 == 0 { 1 } else { -1 };
                    g.accumulate(i, j as u32, s);
                }
            } else {
                let d = strict[t];
                let i = cx
                    .cech_derived
                    .index_of(n, &SummandKey::Stratum(d))
                    .expect("strict transform has the same degree");
                g.accumulate(i, j as u32, 1);
            }
        }
        gamma.insert(n, g);
    }

    let mut h = BTreeMap::new();
    let d_top = cx.cech_derived.complex.top_degree();
    for n in 0..=d_top {
        let mut h_n =
            FreeMorphism::zero(cx.cech_derived.complex.term(n), cx.cech_derived.complex.term(n + 1));
        for (j, key) in cx.cech_derived.keys.get(&n).map_or(&[][..], Vec::as_slice).iter().enumerate()
        {
            let SummandKey::Stratum(d) = key else { unreachable!() };
            let Provenance::Exceptional { mu, component, kept } = &r.correspondence[*d] else {
                continue;
            };
            let b = b.expect("exceptional strata imply a center");
            if kept.contains(&b) {
                continue;
            }
            if r.kind == SubdivisionKind::Star && m_set.len() - kept.len() < 2 {
                continue;
            }
            let wedged: Vec<usize> = m_sorted
                .iter()
                .copied()
                .filter(|v| kept.contains(v) || *v == b)
                .collect();
            let up = exceptional[&(*mu, *component, wedged)];
            let i = cx
                .cech_derived
                .index_of(n + 1, &SummandKey::Stratum(up))
                .expect("wedge is one degree up");
            let s = if n % 2 == 0 { 1 } else { -1 };
            h_n.accumulate(i, j as u32, s);
        }
        if !h_n.is_zero() || n < d_top {
            h.insert(n, h_n);
        }
    }
    (
        ChainMap {
            source: cx.cech_base.complex.clone(),
            target: cx.cech_derived.complex.clone(),
            components: gamma,
        },
        Homotopy {
            source: cx.cech_derived.complex.clone(),
            target: cx.cech_derived.complex.clone(),
            components: h,
        },
    )
}

/// The summand-wise comparison isomorphism of a barycentric subdivision:
/// the covering complex of the derived complex is the subdivision complex
/// of the base, one chain at a time, along the invertible arrows.
pub fn barycentric_phi(
    _table: &ArrowTable,
    r: &SubdivisionResult,
    cx: &ComparisonComplexes,
) -> ChainMap {
    assert_eq!(r.kind, SubdivisionKind::Barycentric);
    let mut components = BTreeMap::new();
    let top = crate::chain::degree_cap(&cx.cech_derived.complex, &cx.sd_base.complex);
    for n in 0..=top {
        let mut f = FreeMorphism::zero(cx.cech_derived.complex.term(n), cx.sd_base.complex.term(n));
        for (j, key) in cx.cech_derived.keys.get(&n).map_or(&[][..], Vec::as_slice).iter().enumerate()
        {
            let SummandKey::Stratum(d) = key else { unreachable!() };
            let Provenance::ChainOf { entries } = &r.correspondence[*d] else { unreachable!() };
            let i = cx
                .sd_base
                .index_of(n, &SummandKey::Chain(entries.clone()))
                .expect("chain summand of the same degree");
            f.accumulate(i, j as u32, 1);
        }
        components.insert(n, f);
    }
    ChainMap {
        source: cx.cech_derived.complex.clone(),
        target: cx.sd_base.complex.clone(),
        components,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{chain_maps_equal, compose_chain_maps, verify_homotopy, ChainMap};
    use crate::freecat::{invert_iso, ClassLabel};
    use crate::strata::validate_poset_map;

    fn edge_table() -> (ArrowTable, ComplexHandle) {
        let v = |s: &str| VertexId(s.to_string());
        let t = |s: &str| StratumId(s.to_string());
        let l = |s: &str| ClassLabel(s.to_string());
        let c = StratifiedComplex::new(ComplexSpec {
            name: "edge".into(),
            base: BaseTag::K,
            vertices: vec![
                Vertex { id: v("D0"), order: VertexOrder::Rank(0) },
                Vertex { id: v("D1"), order: VertexOrder::Rank(1) },
            ],
            strata: vec![
                Stratum {
                    id: t("D0"),
                    vertices: vec![v("D0")],
                    faces: vec![],
                    class: l("a"),
                    flags: StratumFlags::default(),
                },
                Stratum {
                    id: t("D1"),
                    vertices: vec![v("D1")],
                    faces: vec![],
                    class: l("b"),
                    flags: StratumFlags::default(),
                },
                Stratum {
                    id: t("D0D1"),
                    vertices: vec![v("D0"), v("D1")],
                    faces: vec![t("D1"), t("D0")],
                    class: l("e"),
                    flags: StratumFlags::default(),
                },
            ],
        })
        .unwrap();
        let mut table = ArrowTable::new();
        let h = table.register_complex(c);
        (table, h)
    }

    fn check_inverse_and_homotopy(table: &ArrowTable, r: &SubdivisionResult) {
        let cx = build_comparison_complexes(table, r);
        let composite = cech_pushforward_composite(table, r, &cx);
        composite.validate().expect_valid("covering pushforward");
        let closed = cech_pushforward_closed_form(table, r, &cx);
        assert!(chain_maps_equal(&composite, &closed).unwrap(), "closed form differs");
        let (gamma, hom) = inverse_and_homotopy(table, r, &cx);
        gamma.validate().expect_valid("inverse map");
        let round = compose_chain_maps(&closed, &gamma).unwrap();
        let id_base = ChainMap::identity(cx.cech_base.complex.clone());
        assert!(chain_maps_equal(&round, &id_base).unwrap(), "pushforward of inverse is not id");
        let back = compose_chain_maps(&gamma, &closed).unwrap();
        let id_derived = ChainMap::identity(cx.cech_derived.complex.clone());
        verify_homotopy(&hom, &id_derived, &back).unwrap().expect_valid("center homotopy");
    }

    #[test]
    fn star_on_edge_center_edge() {
        let (mut table, h) = edge_table();
        let r = star_subdivide(&mut table, h, &StratumId("D0D1".into())).unwrap();
        let d = table.complex(r.derived);
        assert_eq!(d.vertices().len(), 3);
        assert_eq!(d.strata().len(), 5);
        assert_eq!(d.max_codim(), 2);
        validate_poset_map(&table, &r.pushforward, None).expect_valid("pushforward");
        check_inverse_and_homotopy(&table, &r);
    }

    #[test]
    fn star_on_edge_center_vertex() {
        let (mut table, h) = edge_table();
        let r = star_subdivide(&mut table, h, &StratumId("D0".into())).unwrap();
        let d = table.complex(r.derived);
        // D0 is replaced by the exceptional vertex; the edge survives.
        assert_eq!(d.vertices().len(), 2);
        assert_eq!(d.strata().len(), 3);
        check_inverse_and_homotopy(&table, &r);
    }

    #[test]
    fn star_on_point() {
        let mut table = ArrowTable::new();
        let h = table.register_complex(
            StratifiedComplex::new(ComplexSpec {
                name: "point".into(),
                base: BaseTag::K,
                vertices: vec![Vertex { id: VertexId("D".into()), order: VertexOrder::Rank(0) }],
                strata: vec![Stratum {
                    id: StratumId("D".into()),
                    vertices: vec![VertexId("D".into())],
                    faces: vec![],
                    class: ClassLabel("pt".into()),
                    flags: StratumFlags::default(),
                }],
            })
            .unwrap(),
        );
        let r = star_subdivide(&mut table, h, &StratumId("D".into())).unwrap();
        let d = table.complex(r.derived);
        assert_eq!(d.vertices().len(), 1);
        assert_eq!(d.strata().len(), 1);
        assert!(d.stratum(0).flags.exceptional);
        check_inverse_and_homotopy(&table, &r);
    }

    #[test]
    fn blowup_edge_default_profile() {
        let (mut table, h) = edge_table();
        let profile = IntersectionProfile::default_profile(StratumId("D0D1".into()));
        let r = blowup_subdivide(&mut table, h, &profile).unwrap();
        let d = table.complex(r.derived);
        assert_eq!(d.vertices().len(), 3);
        assert_eq!(d.strata().len(), 7);
        assert_eq!(d.max_codim(), 3);
        validate_poset_map(&table, &r.pushforward, None).expect_valid("pushforward");
        check_inverse_and_homotopy(&table, &r);
    }

    #[test]
    fn blowup_special_profiles() {
        let (mut table, h) = edge_table();
        let star = star_subdivide(&mut table, h, &StratumId("D0D1".into())).unwrap();
        let (mut table2, h2) = edge_table();
        let eq = blowup_subdivide(
            &mut table2,
            h2,
            &IntersectionProfile {
                center: StratumId("D0D1".into()),
                relation: CenterRelation::EqualsCenter,
                counts: BTreeMap::new(),
            },
        )
        .unwrap();
        assert_eq!(
            table.complex(star.derived).spec(),
            table2.complex(eq.derived).spec(),
            "center-equal blowup must reproduce the star subdivision"
        );
        assert_eq!(star.pushforward.assignment, eq.pushforward.assignment);
        assert_eq!(star.correspondence, eq.correspondence);

        let (mut table3, h3) = edge_table();
        let none = blowup_subdivide(
            &mut table3,
            h3,
            &IntersectionProfile {
                center: StratumId("D0D1".into()),
                relation: CenterRelation::NotInAnyStratum,
                counts: BTreeMap::new(),
            },
        )
        .unwrap();
        let d = table3.complex(none.derived);
        assert_eq!(d.strata().len(), 3);
        assert_eq!(none.iso_tags.len(), 3);
        check_inverse_and_homotopy(&table3, &none);
    }

    #[test]
    fn blowup_rejects_bad_profiles() {
        let (mut table, h) = edge_table();
        let mut profile = IntersectionProfile::default_profile(StratumId("D0D1".into()));
        profile.counts.insert(StratumId("D0D1".into()), 0);
        assert!(matches!(
            blowup_subdivide(&mut table, h, &profile),
            Err(SubdivideError::Profile { .. })
        ));
        let mut profile = IntersectionProfile::default_profile(StratumId("D0".into()));
        profile.counts.insert(StratumId("D0".into()), 2);
        assert!(matches!(
            blowup_subdivide(&mut table, h, &profile),
            Err(SubdivideError::Profile { .. })
        ));
        let profile = IntersectionProfile::default_profile(StratumId("zzz".into()));
        assert!(matches!(
            blowup_subdivide(&mut table, h, &profile),
            Err(SubdivideError::UnknownCenter { .. })
        ));
    }

    #[test]
    fn barycentric_edge_and_phi() {
        let (mut table, h) = edge_table();
        let r = barycentric(&mut table, h);
        let d = table.complex(r.derived);
        assert_eq!(d.vertices().len(), 3);
        assert_eq!(d.strata().len(), 5);
        assert_eq!(d.max_codim(), 2);
        let cx = build_comparison_complexes(&table, &r);
        let phi = barycentric_phi(&table, &r, &cx);
        phi.validate().expect_valid("comparison isomorphism");
        for n in 0..=phi.reliable_degree() {
            let inv = invert_iso(&table, &phi.component(n)).expect("invertible in each degree");
            let round = crate::freecat::compose(&inv, &phi.component(n)).unwrap();
            let id = crate::freecat::FreeMorphism::identity(cx.cech_derived.complex.term(n));
            assert!(crate::freecat::is_equal(&round, &id).unwrap());
        }
        let lam = build_last_vertex(&table, &cx.sd_derived, &cx.cech_derived);
        let left = compose_chain_maps(&phi, &lam).unwrap();
        let push = sd_pushforward(&table, &r.pushforward, &cx.sd_derived, &cx.sd_base);
        assert!(
            chain_maps_equal(&left, &push).unwrap(),
            "comparison triangle must commute"
        );
    }

    #[test]
    fn simplicialize_square_poset() {
        use crate::strata::PosetElement;
        let l = |s: &str| ClassLabel(s.to_string());
        let mut elements = Vec::new();
        for v in ["p", "q", "r", "s"] {
            elements.push(PosetElement { id: StratumId(v.into()), grade: 1, class: l(v) });
        }
        for e in ["pq", "qr", "rs", "sp"] {
            elements.push(PosetElement { id: StratumId(e.into()), grade: 2, class: l(e) });
        }
        elements.push(PosetElement { id: StratumId("Q".into()), grade: 3, class: l("Q") });
        let covers = vec![
            (0, 4),
            (1, 4),
            (1, 5),
            (2, 5),
            (2, 6),
            (3, 6),
            (3, 7),
            (0, 7),
            (4, 8),
            (5, 8),
            (6, 8),
            (7, 8),
        ];
        let poset = GradedPoset { elements, covers };
        let mut table = ArrowTable::new();
        let out = simplicialize(&mut table, &poset).unwrap();
        let d = table.complex(out.derived);
        let by_codim = |k: usize| (0..d.strata().len()).filter(|&s| d.codim(s) == k).count();
        assert_eq!(by_codim(1), 9);
        assert_eq!(by_codim(2), 16);
        assert_eq!(by_codim(3), 8);
        assert_eq!(d.max_codim(), 3);
    }
}
