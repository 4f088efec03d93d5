//! Stratum posets: vertices (boundary divisor components), strata (connected
//! components of iterated intersections), their face structure, chains, stars,
//! and monotone maps between posets.
//!
//! A stratum of codimension `n + 1` is recorded with its ordered vertex list
//! (length `n + 1`) and, when the list has at least two entries, one face per
//! deleted vertex. Distinct connected components of the same intersection are
//! distinct strata with the same vertex list, so strata are identified by
//! opaque ids and never by their vertex sets. The partial order is generated
//! by the face tables: `a <= b` holds exactly when `a` is reachable from `b`
//! by iterated faces, so divisor components are minimal and deep strata are
//! maximal.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::freecat::{ClassLabel, ComplexHandle};
use crate::report::ValidationReport;

/// Identifier of a boundary divisor component (a vertex of the dual complex).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub String);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identifier of a stratum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StratumId(pub String);

impl fmt::Display for StratumId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Base of the degeneration the complex describes. Pure metadata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseTag {
    /// A field.
    K,
    /// A power series base of the given dimension.
    Rd(u32),
}

/// Ordering data attached to one vertex.
///
/// Either every vertex carries a global integer rank (ties broken by id), or
/// every vertex lists the vertices strictly below it. The order must restrict
/// to a linear order on the vertex set of every stratum; globally it may be
/// partial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VertexOrder {
    Rank(i64),
    Above(Vec<VertexId>),
}

/// A vertex: one boundary divisor component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: VertexId,
    pub order: VertexOrder,
}

/// Marker flags set by subdivision constructors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StratumFlags {
    /// The stratum lies in the exceptional divisor of the subdivision that
    /// produced its complex.
    pub exceptional: bool,
    /// The stratum lies in the distinguished last divisor of the center's
    /// vertex set (the letter written `b` in face computations).
    pub in_last_divisor: bool,
}

/// One stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub id: StratumId,
    /// Vertex ids, strictly increasing in the vertex order. Length = codim.
    pub vertices: Vec<VertexId>,
    /// Face ids: entry `j` is the stratum whose vertex list is `vertices`
    /// minus entry `j`. Empty exactly when `vertices` has a single entry.
    pub faces: Vec<StratumId>,
    /// Stable birational class label of the stratum.
    pub class: ClassLabel,
    pub flags: StratumFlags,
}

/// Raw, unvalidated complex data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexSpec {
    pub name: String,
    pub base: BaseTag,
    pub vertices: Vec<Vertex>,
    pub strata: Vec<Stratum>,
}

/// A validated stratified complex with sealed lookup caches.
#[derive(Clone, Debug)]
pub struct StratifiedComplex {
    spec: ComplexSpec,
    vidx: HashMap<VertexId, usize>,
    sidx: HashMap<StratumId, usize>,
    /// Vertex indices of each stratum, in list (= ascending) order.
    svert: Vec<Vec<usize>>,
    /// Face indices of each stratum.
    sface: Vec<Vec<usize>>,
    /// `vle[a][b]` holds when vertex `a` is below or equal to vertex `b`.
    vle: Vec<Vec<bool>>,
    /// `below[t][a]` holds when stratum `a <= t`.
    below: Vec<Vec<bool>>,
    /// Rank of each stratum in id-lexicographic order.
    srank: Vec<usize>,
}

impl PartialEq for StratifiedComplex {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}
impl Eq for StratifiedComplex {}

/// Checks raw complex data against every structural invariant.
///
/// Never panics; every defect is reported with a witness.
pub fn validate_complex(spec: &ComplexSpec) -> ValidationReport {
    let mut rep = ValidationReport::new();

    // Unique ids.
    let mut vseen = HashSet::new();
    for v in &spec.vertices {
        if !vseen.insert(&v.id) {
            rep.push("dup-vertex", format!("duplicate vertex id {}", v.id));
        }
    }
    let mut sseen = HashSet::new();
    for s in &spec.strata {
        if !sseen.insert(&s.id) {
            rep.push("dup-stratum", format!("duplicate stratum id {}", s.id));
        }
    }
    if !rep.is_valid() {
        return rep;
    }

    let vidx: HashMap<&VertexId, usize> =
        spec.vertices.iter().enumerate().map(|(i, v)| (&v.id, i)).collect();
    let sidx: HashMap<&StratumId, usize> =
        spec.strata.iter().enumerate().map(|(i, s)| (&s.id, i)).collect();

    // Order data: uniform kind, valid references, no cycles.
    let mut kinds = spec.vertices.iter().map(|v| matches!(v.order, VertexOrder::Rank(_)));
    let first_kind = kinds.next();
    if let Some(k0) = first_kind {
        if kinds.any(|k| k != k0) {
            rep.push("order-kind", "vertex order mixes ranks and explicit lists".to_string());
        }
    }
    for v in &spec.vertices {
        if let VertexOrder::Above(list) = &v.order {
            for w in list {
                if !vidx.contains_key(w) {
                    rep.push("order-ref", format!("vertex {} lists unknown vertex {}", v.id, w));
                }
                if w == &v.id {
                    rep.push("order-cycle", format!("vertex {} listed below itself", v.id));
                }
            }
        }
    }
    if !rep.is_valid() {
        return rep;
    }
    let vle = vertex_le_matrix(spec, &vidx);
    for a in 0..spec.vertices.len() {
        for b in 0..a {
            if vle[a][b] && vle[b][a] {
                rep.push(
                    "order-cycle",
                    format!(
                        "vertices {} and {} are each below the other",
                        spec.vertices[a].id, spec.vertices[b].id
                    ),
                );
            }
        }
    }

    // Strata: vertex lists and face tables.
    for s in &spec.strata {
        if s.vertices.is_empty() {
            rep.push("empty-stratum", format!("stratum {} has no vertices", s.id));
            continue;
        }
        let mut ok = true;
        for v in &s.vertices {
            if !vidx.contains_key(v) {
                rep.push("vertex-ref", format!("stratum {} names unknown vertex {}", s.id, v));
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        let vs: Vec<usize> = s.vertices.iter().map(|v| vidx[v]).collect();
        for w in vs.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a == b {
                rep.push("vertex-dup", format!("stratum {} repeats vertex {}", s.id, spec.vertices[a].id));
            } else if !(vle[a][b] && !vle[b][a]) {
                rep.push(
                    "vertex-order",
                    format!(
                        "stratum {}: vertices {} and {} are not strictly increasing",
                        s.id, spec.vertices[a].id, spec.vertices[b].id
                    ),
                );
            }
        }
        if s.vertices.len() == 1 {
            if !s.faces.is_empty() {
                rep.push(
                    "face-count",
                    format!("stratum {} has one vertex but {} faces", s.id, s.faces.len()),
                );
            }
            continue;
        }
        if s.faces.len() != s.vertices.len() {
            rep.push(
                "face-count",
                format!(
                    "stratum {} has {} vertices but {} faces",
                    s.id,
                    s.vertices.len(),
                    s.faces.len()
                ),
            );
            continue;
        }
        for (j, fid) in s.faces.iter().enumerate() {
            let Some(&f) = sidx.get(fid) else {
                rep.push("face-ref", format!("stratum {} face {} names unknown stratum {}", s.id, j, fid));
                continue;
            };
            let expected: Vec<&VertexId> =
                s.vertices.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, v)| v).collect();
            let actual: Vec<&VertexId> = spec.strata[f].vertices.iter().collect();
            if expected != actual {
                rep.push(
                    "face-word",
                    format!(
                        "stratum {} face {} should have vertices {:?}, found stratum {} with {:?}",
                        s.id,
                        j,
                        expected.iter().map(|v| &v.0).collect::<Vec<_>>(),
                        fid,
                        actual.iter().map(|v| &v.0).collect::<Vec<_>>()
                    ),
                );
            }
        }
    }
    if !rep.is_valid() {
        return rep;
    }

    // Simplicial identities: d_i d_j = d_{j-1} d_i for i < j.
    for s in &spec.strata {
        if s.vertices.len() < 3 {
            continue;
        }
        let si = sidx[&s.id];
        for j in 1..s.vertices.len() {
            for i in 0..j {
                let left = spec.strata[sidx[&spec.strata[si].faces[j]]].faces[i].clone();
                let right = spec.strata[sidx[&spec.strata[si].faces[i]]].faces[j - 1].clone();
                if left != right {
                    rep.push(
                        "face-identity",
                        format!(
                            "stratum {}: faces {} then {} give {}, but {} then {} give {}",
                            s.id, j, i, left, i, j - 1, right
                        ),
                    );
                }
            }
        }
    }

    // Each vertex is a divisor component: exactly one codimension-one stratum.
    for v in &spec.vertices {
        let hits: Vec<&StratumId> = spec
            .strata
            .iter()
            .filter(|s| s.vertices.len() == 1 && s.vertices[0] == v.id)
            .map(|s| &s.id)
            .collect();
        if hits.len() != 1 {
            rep.push(
                "vertex-stratum",
                format!(
                    "vertex {} must have exactly one codimension-one stratum, found {}",
                    v.id,
                    hits.len()
                ),
            );
        }
    }

    rep
}

fn vertex_le_matrix(spec: &ComplexSpec, vidx: &HashMap<&VertexId, usize>) -> Vec<Vec<bool>> {
    let n = spec.vertices.len();
    let mut le = vec![vec![false; n]; n];
    let ranked = spec.vertices.iter().all(|v| matches!(v.order, VertexOrder::Rank(_)));
    if ranked {
        let key = |i: usize| -> (i64, &VertexId) {
            match &spec.vertices[i].order {
                VertexOrder::Rank(r) => (*r, &spec.vertices[i].id),
                VertexOrder::Above(_) => unreachable!(),
            }
        };
        for a in 0..n {
            for b in 0..n {
                le[a][b] = key(a) <= key(b);
            }
        }
        return le;
    }
    // Explicit lists: transitive closure of "listed below".
    let mut adj = vec![vec![]; n];
    for (i, v) in spec.vertices.iter().enumerate() {
        if let VertexOrder::Above(list) = &v.order {
            for w in list {
                if let Some(&j) = vidx.get(w) {
                    adj[i].push(j); // j is below i
                }
            }
        }
    }
    for a in 0..n {
        // DFS downward from a.
        let mut stack = vec![a];
        while let Some(x) = stack.pop() {
            if le[x][a] {
                continue;
            }
            le[x][a] = true;
            stack.extend(adj[x].iter().copied());
        }
    }
    le
}

impl StratifiedComplex {
    /// Validates and seals raw complex data.
    pub fn new(spec: ComplexSpec) -> Result<Self, ValidationReport> {
        let rep = validate_complex(&spec);
        if !rep.is_valid() {
            return Err(rep);
        }
        let vidx: HashMap<VertexId, usize> =
            spec.vertices.iter().enumerate().map(|(i, v)| (v.id.clone(), i)).collect();
        let sidx: HashMap<StratumId, usize> =
            spec.strata.iter().enumerate().map(|(i, s)| (s.id.clone(), i)).collect();
        let svert: Vec<Vec<usize>> = spec
            .strata
            .iter()
            .map(|s| s.vertices.iter().map(|v| vidx[v]).collect())
            .collect();
        let sface: Vec<Vec<usize>> =
            spec.strata.iter().map(|s| s.faces.iter().map(|f| sidx[f]).collect()).collect();
        let vref: HashMap<&VertexId, usize> =
            spec.vertices.iter().enumerate().map(|(i, v)| (&v.id, i)).collect();
        let vle = vertex_le_matrix(&spec, &vref);
        let n = spec.strata.len();
        let mut below = vec![vec![false; n]; n];
        for t in 0..n {
            let mut stack = vec![t];
            while let Some(x) = stack.pop() {
                if below[t][x] {
                    continue;
                }
                below[t][x] = true;
                stack.extend(sface[x].iter().copied());
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| spec.strata[a].id.cmp(&spec.strata[b].id));
        let mut srank = vec![0usize; n];
        for (r, &s) in order.iter().enumerate() {
            srank[s] = r;
        }
        Ok(StratifiedComplex { spec, vidx, sidx, svert, sface, vle, below, srank })
    }

    pub fn spec(&self) -> &ComplexSpec {
        &self.spec
    }
    pub fn name(&self) -> &str {
        &self.spec.name
    }
    pub fn base(&self) -> &BaseTag {
        &self.spec.base
    }
    pub fn vertices(&self) -> &[Vertex] {
        &self.spec.vertices
    }
    pub fn strata(&self) -> &[Stratum] {
        &self.spec.strata
    }
    pub fn stratum(&self, s: usize) -> &Stratum {
        &self.spec.strata[s]
    }
    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.spec.vertices[v]
    }
    pub fn vertex_index(&self, id: &VertexId) -> Option<usize> {
        self.vidx.get(id).copied()
    }
    pub fn stratum_index(&self, id: &StratumId) -> Option<usize> {
        self.sidx.get(id).copied()
    }
    /// Vertex indices of the stratum, in ascending vertex order.
    pub fn word(&self, s: usize) -> &[usize] {
        &self.svert[s]
    }
    /// Face indices of the stratum (empty for codimension one).
    pub fn face_indices(&self, s: usize) -> &[usize] {
        &self.sface[s]
    }
    pub fn codim(&self, s: usize) -> usize {
        self.svert[s].len()
    }
    pub fn max_codim(&self) -> usize {
        self.svert.iter().map(Vec::len).max().unwrap_or(0)
    }
    /// `a <= b` in the stratum poset.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.below[b][a]
    }
    /// Vertex comparison: `a <= b`.
    pub fn vertex_le(&self, a: usize, b: usize) -> bool {
        self.vle[a][b]
    }
    /// Rank of the stratum in id-lexicographic order.
    pub fn id_rank(&self, s: usize) -> usize {
        self.srank[s]
    }
    /// All stratum indices sorted by id.
    pub fn strata_by_id(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.spec.strata.len()).collect();
        v.sort_by_key(|&s| self.srank[s]);
        v
    }

    /// The unique stratum below `s` whose vertex set is `keep`.
    ///
    /// `keep` must be a nonempty subset of the word of `s`. Computed by
    /// deleting vertices one at a time; the simplicial identities make the
    /// result independent of the deletion order.
    pub fn subface(&self, s: usize, keep: &BTreeSet<usize>) -> Result<usize, StrataError> {
        if keep.is_empty() {
            return Err(StrataError::EmptySubface { stratum: self.spec.strata[s].id.clone() });
        }
        for &v in keep {
            if !self.svert[s].contains(&v) {
                return Err(StrataError::NotASubword {
                    stratum: self.spec.strata[s].id.clone(),
                    vertex: self.spec.vertices[v].id.clone(),
                });
            }
        }
        let mut cur = s;
        while self.svert[cur].len() > keep.len() {
            let j = self.svert[cur]
                .iter()
                .position(|v| !keep.contains(v))
                .expect("a vertex outside keep exists while the word is longer");
            cur = self.sface[cur][j];
        }
        Ok(cur)
    }

    /// Sorts a set of vertex indices into ascending vertex order.
    pub fn sort_vertices(&self, set: &BTreeSet<usize>) -> Vec<usize> {
        let mut v: Vec<usize> = set.iter().copied().collect();
        v.sort_by(|&a, &b| {
            if a == b {
                std::cmp::Ordering::Equal
            } else if self.vle[a][b] {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        v
    }

    /// View of the stratum poset as a graded poset (for barycentric input).
    pub fn as_graded_poset(&self) -> GradedPoset {
        let elements = self
            .spec
            .strata
            .iter()
            .map(|s| PosetElement {
                id: s.id.clone(),
                grade: s.vertices.len() as u32,
                class: s.class.clone(),
            })
            .collect();
        let mut covers = vec![];
        for (s, faces) in self.sface.iter().enumerate() {
            for &f in faces {
                covers.push((f, s));
            }
        }
        covers.sort();
        covers.dedup();
        GradedPoset { elements, covers }
    }
}

/// Errors from stratum-level operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrataError {
    UnknownStratum { id: StratumId },
    EmptySubface { stratum: StratumId },
    NotASubword { stratum: StratumId, vertex: VertexId },
    NotComparable { low: StratumId, high: StratumId },
    BadChain { reason: String },
    IndexOutOfRange { index: usize, len: usize },
}

impl fmt::Display for StrataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrataError::UnknownStratum { id } => write!(f, "unknown stratum {id}"),
            StrataError::EmptySubface { stratum } => {
                write!(f, "empty vertex set requested below stratum {stratum}")
            }
            StrataError::NotASubword { stratum, vertex } => {
                write!(f, "vertex {vertex} does not belong to stratum {stratum}")
            }
            StrataError::NotComparable { low, high } => {
                write!(f, "stratum {low} is not below stratum {high}")
            }
            StrataError::BadChain { reason } => write!(f, "bad chain: {reason}"),
            StrataError::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
        }
    }
}

impl std::error::Error for StrataError {}

/// A chain `s_0 <= s_1 <= ... <= s_n` of strata, stored by index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain {
    pub entries: Vec<usize>,
}

impl Chain {
    pub fn degree(&self) -> usize {
        self.entries.len() - 1
    }
    /// A chain is degenerate when some consecutive entries coincide.
    pub fn is_degenerate(&self) -> bool {
        self.entries.windows(2).any(|w| w[0] == w[1])
    }
}

/// Which chains to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainMode {
    /// Strictly increasing chains.
    Nondegenerate,
    /// Weakly increasing chains.
    Weak,
}

/// All chains of degree `n` (length `n + 1`), sorted lexicographically by the
/// id ranks of their entries.
pub fn enumerate_chains(c: &StratifiedComplex, n: usize, mode: ChainMode) -> Vec<Chain> {
    let order = c.strata_by_id();
    let mut out = vec![];
    let mut cur: Vec<usize> = Vec::with_capacity(n + 1);
    fn extend(
        c: &StratifiedComplex,
        order: &[usize],
        mode: ChainMode,
        n: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Chain>,
    ) {
        if cur.len() == n + 1 {
            out.push(Chain { entries: cur.clone() });
            return;
        }
        for &s in order {
            if let Some(&last) = cur.last() {
                let ok = match mode {
                    ChainMode::Nondegenerate => c.leq(last, s) && last != s,
                    ChainMode::Weak => c.leq(last, s),
                };
                if !ok {
                    continue;
                }
            }
            cur.push(s);
            extend(c, order, mode, n, cur, out);
            cur.pop();
        }
    }
    extend(c, &order, mode, n, &mut cur, &mut out);
    out
}

/// Checks that the entries form a weakly increasing chain.
pub fn is_chain(c: &StratifiedComplex, entries: &[usize]) -> bool {
    !entries.is_empty()
        && entries.iter().all(|&s| s < c.strata().len())
        && entries.windows(2).all(|w| c.leq(w[0], w[1]))
}

/// Drops entry `j` from the chain.
pub fn face_of_chain(c: &StratifiedComplex, chain: &Chain, j: usize) -> Result<Chain, StrataError> {
    let _ = c;
    if chain.entries.len() < 2 {
        return Err(StrataError::BadChain { reason: "cannot take a face of a length-one chain".into() });
    }
    if j >= chain.entries.len() {
        return Err(StrataError::IndexOutOfRange { index: j, len: chain.entries.len() });
    }
    let mut entries = chain.entries.clone();
    entries.remove(j);
    Ok(Chain { entries })
}

/// Repeats entry `i` of the chain.
pub fn degeneracy_of_chain(
    c: &StratifiedComplex,
    chain: &Chain,
    i: usize,
) -> Result<Chain, StrataError> {
    let _ = c;
    if i >= chain.entries.len() {
        return Err(StrataError::IndexOutOfRange { index: i, len: chain.entries.len() });
    }
    let mut entries = chain.entries.clone();
    entries.insert(i, entries[i]);
    Ok(Chain { entries })
}

/// Star, closed star, and link of a stratum, each sorted by id.
pub fn star_link(
    c: &StratifiedComplex,
    s: usize,
) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let n = c.strata().len();
    let star: BTreeSet<usize> = (0..n).filter(|&t| c.leq(s, t)).collect();
    let mut closed: BTreeSet<usize> = BTreeSet::new();
    for &t in &star {
        for a in 0..n {
            if c.leq(a, t) {
                closed.insert(a);
            }
        }
    }
    let link: BTreeSet<usize> = closed.difference(&star).copied().collect();
    let by_id = |set: &BTreeSet<usize>| {
        let mut v: Vec<usize> = set.iter().copied().collect();
        v.sort_by_key(|&x| c.id_rank(x));
        v
    };
    (by_id(&star), by_id(&closed), by_id(&link))
}

/// The deterministic complete flag from `s0` up to `s1`: at each step the
/// cover with the lexicographically smallest id is chosen.
pub fn complete_flag(
    c: &StratifiedComplex,
    s0: usize,
    s1: usize,
) -> Result<Vec<usize>, StrataError> {
    if !c.leq(s0, s1) {
        return Err(StrataError::NotComparable {
            low: c.stratum(s0).id.clone(),
            high: c.stratum(s1).id.clone(),
        });
    }
    let mut flag = vec![s0];
    let mut cur = s0;
    while cur != s1 {
        let mut candidates: Vec<usize> = (0..c.strata().len())
            .filter(|&t| {
                c.codim(t) == c.codim(cur) + 1
                    && c.face_indices(t).contains(&cur)
                    && c.leq(t, s1)
            })
            .collect();
        candidates.sort_by_key(|&t| c.id_rank(t));
        let next = candidates.first().copied().ok_or_else(|| StrataError::BadChain {
            reason: format!(
                "no covering step from {} toward {}",
                c.stratum(cur).id,
                c.stratum(s1).id
            ),
        })?;
        flag.push(next);
        cur = next;
    }
    Ok(flag)
}

/// All complete flags from `s0` up to `s1`, in deterministic order.
pub fn all_complete_flags(
    c: &StratifiedComplex,
    s0: usize,
    s1: usize,
) -> Result<Vec<Vec<usize>>, StrataError> {
    if !c.leq(s0, s1) {
        return Err(StrataError::NotComparable {
            low: c.stratum(s0).id.clone(),
            high: c.stratum(s1).id.clone(),
        });
    }
    let mut out = vec![];
    let mut cur = vec![s0];
    fn walk(
        c: &StratifiedComplex,
        s1: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let last = *cur.last().unwrap();
        if last == s1 {
            out.push(cur.clone());
            return;
        }
        let mut candidates: Vec<usize> = (0..c.strata().len())
            .filter(|&t| {
                c.codim(t) == c.codim(last) + 1
                    && c.face_indices(t).contains(&last)
                    && c.leq(t, s1)
            })
            .collect();
        candidates.sort_by_key(|&t| c.id_rank(t));
        for t in candidates {
            cur.push(t);
            walk(c, s1, cur, out);
            cur.pop();
        }
    }
    walk(c, s1, &mut cur, &mut out);
    Ok(out)
}

/// An element of a graded poset (barycentric subdivision input).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetElement {
    pub id: StratumId,
    /// Grade, matching codimension for stratum posets. At least 1.
    pub grade: u32,
    pub class: ClassLabel,
}

/// A finite graded poset given by covering relations. Covers step the grade
/// by exactly one. Used as the general input to barycentric subdivision; a
/// stratified complex converts via [`StratifiedComplex::as_graded_poset`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPoset {
    pub elements: Vec<PosetElement>,
    /// `(a, b)` means `a` is covered by `b` (`a < b`, grade step one).
    pub covers: Vec<(usize, usize)>,
}

impl GradedPoset {
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::new();
        let mut seen = HashSet::new();
        for e in &self.elements {
            if !seen.insert(&e.id) {
                rep.push("dup-element", format!("duplicate element id {}", e.id));
            }
            if e.grade == 0 {
                rep.push("grade-zero", format!("element {} has grade 0", e.id));
            }
        }
        for &(a, b) in &self.covers {
            if a >= self.elements.len() || b >= self.elements.len() {
                rep.push("cover-ref", format!("cover ({a}, {b}) out of range"));
                continue;
            }
            if self.elements[a].grade + 1 != self.elements[b].grade {
                rep.push(
                    "cover-grade",
                    format!(
                        "cover {} < {} steps grade {} to {}",
                        self.elements[a].id,
                        self.elements[b].id,
                        self.elements[a].grade,
                        self.elements[b].grade
                    ),
                );
            }
        }
        rep
    }

    /// `le[a][b]` holds when `a <= b`.
    pub fn le_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.elements.len();
        let mut up = vec![vec![]; n];
        for &(a, b) in &self.covers {
            up[a].push(b);
        }
        let mut le = vec![vec![false; n]; n];
        for a in 0..n {
            let mut stack = vec![a];
            while let Some(x) = stack.pop() {
                if le[a][x] {
                    continue;
                }
                le[a][x] = true;
                stack.extend(up[x].iter().copied());
            }
        }
        le
    }
}

/// A monotone map between the stratum posets of two registered complexes,
/// recorded as one target index per source stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetMap {
    pub source: ComplexHandle,
    pub target: ComplexHandle,
    pub assignment: Vec<usize>,
}

/// Checks a poset map for monotonicity (on covering pairs, which generate the
/// order); when `second` is supplied with compatible endpoints, also checks
/// that the composite assignment is a valid monotone map.
pub fn validate_poset_map(
    table: &crate::freecat::ArrowTable,
    f: &PosetMap,
    second: Option<&PosetMap>,
) -> ValidationReport {
    let mut rep = ValidationReport::new();
    let src = table.complex(f.source);
    let tgt = table.complex(f.target);
    if f.assignment.len() != src.strata().len() {
        rep.push(
            "assignment-len",
            format!(
                "assignment covers {} strata, source has {}",
                f.assignment.len(),
                src.strata().len()
            ),
        );
        return rep;
    }
    for &t in &f.assignment {
        if t >= tgt.strata().len() {
            rep.push("assignment-ref", format!("assignment target {t} out of range"));
            return rep;
        }
    }
    for s in 0..src.strata().len() {
        for &face in src.face_indices(s) {
            if !tgt.leq(f.assignment[face], f.assignment[s]) {
                rep.push(
                    "monotone",
                    format!(
                        "cover {} < {} maps to incomparable {} , {}",
                        src.stratum(face).id,
                        src.stratum(s).id,
                        tgt.stratum(f.assignment[face]).id,
                        tgt.stratum(f.assignment[s]).id
                    ),
                );
            }
        }
    }
    if let Some(g) = second {
        if g.target != f.source {
            rep.push(
                "compose-endpoints",
                "second map's target is not the first map's source".to_string(),
            );
            return rep;
        }
        match compose_poset_maps(table, f, g) {
            Ok(fg) => rep.merge(validate_poset_map(table, &fg, None)),
            Err(e) => rep.push("compose", e.to_string()),
        }
    }
    rep
}

/// The composite `f . g` (apply `g`, then `f`).
pub fn compose_poset_maps(
    table: &crate::freecat::ArrowTable,
    f: &PosetMap,
    g: &PosetMap,
) -> Result<PosetMap, StrataError> {
    let _ = table;
    if g.target != f.source {
        return Err(StrataError::BadChain {
            reason: "poset maps are not composable: endpoints differ".into(),
        });
    }
    let assignment = g.assignment.iter().map(|&s| f.assignment[s]).collect();
    Ok(PosetMap { source: g.source, target: f.target, assignment })
}
