//! The free additive category on the stratum posets.
//!
//! Each stratum `s` names a generating object `F(s)` labeled by its stable
//! birational class. For `b <= a` inside one complex there is exactly one
//! generating arrow `F(a) -> F(b)` (restriction to the deeper stratum's
//! boundary piece); subdivision constructors add further primitive arrows
//! between complexes (vertical comparisons, some of them invertible). The
//! category is thin: between two generating objects every composite of
//! generators is equal, so a morphism of formal direct sums is just an
//! integer matrix whose entry at `(i, j)` multiplies the unique generator
//! from source summand `j` to target summand `i`.
//!
//! The [`ArrowTable`] owns every registered complex plus all cross arrows,
//! and answers reachability (does a generator exist) and invertibility
//! (declared isomorphisms, closed under the two-out-of-three property that a
//! thin category forces) for pairs of nodes.

use std::collections::BTreeMap;
use std::fmt;

use crate::report::ValidationReport;
use crate::strata::StratifiedComplex;

/// A stable birational class label. Opaque: two labels are related only by
/// equality (or by an explicit quotient, see the volume module).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassLabel(pub String);

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Handle of a complex registered in an [`ArrowTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComplexHandle(pub usize);

/// A generating object: one stratum of one registered complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub complex: ComplexHandle,
    pub stratum: usize,
}

/// Kinds of primitive cross arrows added by subdivision constructors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArrowTag {
    /// A comparison arrow `source -> target` that is not known invertible.
    Vertical,
    /// A declared isomorphism (kept as `source -> target`, usable both ways).
    Iso,
}

/// Errors from category-level operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FreecatError {
    ShapeMismatch { context: String },
    NotComposable,
    NotInvertible { reason: String },
    NoGenerator { from: String, to: String },
    LabelMismatch { from: String, to: String },
}

impl fmt::Display for FreecatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreecatError::ShapeMismatch { context } => write!(f, "shape mismatch: {context}"),
            FreecatError::NotComposable => write!(f, "morphisms are not composable"),
            FreecatError::NotInvertible { reason } => write!(f, "not invertible: {reason}"),
            FreecatError::NoGenerator { from, to } => {
                write!(f, "no generating arrow from {from} to {to}")
            }
            FreecatError::LabelMismatch { from, to } => {
                write!(f, "labels of {from} and {to} differ, arrow cannot be an isomorphism")
            }
        }
    }
}

impl std::error::Error for FreecatError {}

/// Registry of complexes and primitive arrows between their strata.
#[derive(Debug, Default)]
pub struct ArrowTable {
    complexes: Vec<StratifiedComplex>,
    cross: Vec<(Node, Node, ArrowTag)>,
    offsets: Vec<usize>,
    total: usize,
    /// Reachability closure over face arrows, cross arrows, and both
    /// directions of iso arrows. `reach[a]` is a bitset over global indices.
    reach: Vec<Vec<u64>>,
    /// Union-find over declared isomorphisms (treated undirected).
    iso_parent: Vec<usize>,
}

impl ArrowTable {
    pub fn new() -> Self {
        ArrowTable::default()
    }

    pub fn register_complex(&mut self, c: StratifiedComplex) -> ComplexHandle {
        let h = ComplexHandle(self.complexes.len());
        self.complexes.push(c);
        self.rebuild();
        h
    }

    pub fn complex(&self, h: ComplexHandle) -> &StratifiedComplex {
        &self.complexes[h.0]
    }

    pub fn complex_count(&self) -> usize {
        self.complexes.len()
    }

    pub fn node(&self, h: ComplexHandle, stratum: usize) -> Node {
        debug_assert!(stratum < self.complexes[h.0].strata().len());
        Node { complex: h, stratum }
    }

    pub fn label(&self, n: Node) -> &ClassLabel {
        &self.complexes[n.complex.0].stratum(n.stratum).class
    }

    /// Adds primitive cross arrows in one batch (one closure rebuild).
    pub fn add_arrows(&mut self, arrows: Vec<(Node, Node, ArrowTag)>) {
        for (a, b, tag) in &arrows {
            assert!(a.complex.0 < self.complexes.len(), "unknown source complex");
            assert!(b.complex.0 < self.complexes.len(), "unknown target complex");
            assert!(a.stratum < self.complexes[a.complex.0].strata().len());
            assert!(b.stratum < self.complexes[b.complex.0].strata().len());
            if *tag == ArrowTag::Iso {
                assert_eq!(
                    self.label(*a),
                    self.label(*b),
                    "iso arrows require equal class labels"
                );
            }
        }
        self.cross.extend(arrows);
        self.rebuild();
    }

    pub fn arrows(&self) -> &[(Node, Node, ArrowTag)] {
        &self.cross
    }

    fn global(&self, n: Node) -> usize {
        self.offsets[n.complex.0] + n.stratum
    }

    fn rebuild(&mut self) {
        self.offsets = Vec::with_capacity(self.complexes.len());
        let mut total = 0;
        for c in &self.complexes {
            self.offsets.push(total);
            total += c.strata().len();
        }
        self.total = total;
        // Adjacency: face arrows go from a stratum down to each face.
        let mut adj: Vec<Vec<u32>> = vec![vec![]; total];
        for (ci, c) in self.complexes.iter().enumerate() {
            let off = self.offsets[ci];
            for s in 0..c.strata().len() {
                for &f in c.face_indices(s) {
                    adj[off + s].push((off + f) as u32);
                }
            }
        }
        for &(a, b, tag) in &self.cross {
            let (ga, gb) = (self.global(a), self.global(b));
            adj[ga].push(gb as u32);
            if tag == ArrowTag::Iso {
                adj[gb].push(ga as u32);
            }
        }
        let words = total.div_ceil(64);
        let mut reach = vec![vec![0u64; words]; total];
        let mut stack = Vec::new();
        let mut visited = vec![false; total];
        for start in 0..total {
            for v in visited.iter_mut() {
                *v = false;
            }
            stack.clear();
            stack.push(start);
            while let Some(x) = stack.pop() {
                if visited[x] {
                    continue;
                }
                visited[x] = true;
                reach[start][x / 64] |= 1 << (x % 64);
                for &y in &adj[x] {
                    if !visited[y as usize] {
                        stack.push(y as usize);
                    }
                }
            }
        }
        self.reach = reach;
        // Iso classes.
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(a, b, tag) in &self.cross {
            if tag == ArrowTag::Iso {
                let (ga, gb) = (self.global(a), self.global(b));
                let (ra, rb) = (find(&mut parent, ga), find(&mut parent, gb));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        for x in 0..total {
            find(&mut parent, x);
        }
        self.iso_parent = parent;
    }

    /// Does the unique generating arrow `F(a) -> F(b)` exist?
    pub fn reachable(&self, a: Node, b: Node) -> bool {
        let (ga, gb) = (self.global(a), self.global(b));
        self.reach[ga][gb / 64] & (1 << (gb % 64)) != 0
    }

    /// Are the two nodes connected by declared isomorphisms? In a thin
    /// category any arrow between nodes in one iso class is invertible.
    pub fn same_iso_class(&self, a: Node, b: Node) -> bool {
        let (ga, gb) = (self.global(a), self.global(b));
        let mut pa = ga;
        while self.iso_parent[pa] != pa {
            pa = self.iso_parent[pa];
        }
        let mut pb = gb;
        while self.iso_parent[pb] != pb {
            pb = self.iso_parent[pb];
        }
        pa == pb
    }
}

/// A formal finite direct sum of generating objects. The empty sum is the
/// zero object.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeObject {
    pub summands: Vec<Node>,
}

impl FreeObject {
    pub fn zero() -> Self {
        FreeObject { summands: vec![] }
    }
    pub fn rank(&self) -> usize {
        self.summands.len()
    }
}

/// A morphism of formal direct sums: a sparse integer matrix. Entry
/// `(i, j) -> c` stands for `c` times the unique generator from source
/// summand `j` to target summand `i`. Zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeMorphism {
    pub source: FreeObject,
    pub target: FreeObject,
    entries: BTreeMap<(u32, u32), i64>,
}

impl FreeMorphism {
    pub fn zero(source: FreeObject, target: FreeObject) -> Self {
        FreeMorphism { source, target, entries: BTreeMap::new() }
    }

    pub fn identity(object: FreeObject) -> Self {
        let mut entries = BTreeMap::new();
        for i in 0..object.rank() {
            entries.insert((i as u32, i as u32), 1);
        }
        FreeMorphism { source: object.clone(), target: object, entries }
    }

    pub fn from_entries(
        source: FreeObject,
        target: FreeObject,
        entries: impl IntoIterator<Item = ((u32, u32), i64)>,
    ) -> Self {
        let mut m = FreeMorphism::zero(source, target);
        for ((i, j), c) in entries {
            m.accumulate(i, j, c);
        }
        m
    }

    /// Adds `c` to entry `(i, j)`, dropping it when it cancels to zero.
    pub fn accumulate(&mut self, i: u32, j: u32, c: i64) {
        debug_assert!((i as usize) < self.target.rank());
        debug_assert!((j as usize) < self.source.rank());
        if c == 0 {
            return;
        }
        let slot = self.entries.entry((i, j)).or_insert(0);
        *slot = slot.checked_add(c).expect("morphism coefficient overflow");
        if *slot == 0 {
            self.entries.remove(&(i, j));
        }
    }

    pub fn entry(&self, i: u32, j: u32) -> i64 {
        self.entries.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(u32, u32), &i64)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn negate(&self) -> FreeMorphism {
        let entries = self.entries.iter().map(|(&k, &c)| (k, -c)).collect();
        FreeMorphism { source: self.source.clone(), target: self.target.clone(), entries }
    }
}

/// The composite `f . g` (apply `g`, then `f`).
pub fn compose(f: &FreeMorphism, g: &FreeMorphism) -> Result<FreeMorphism, FreecatError> {
    if f.source != g.target {
        return Err(FreecatError::NotComposable);
    }
    let mut out = FreeMorphism::zero(g.source.clone(), f.target.clone());
    // Index f by source column.
    let mut by_col: BTreeMap<u32, Vec<(u32, i64)>> = BTreeMap::new();
    for (&(i, j), &c) in &f.entries {
        by_col.entry(j).or_default().push((i, c));
    }
    for (&(k, j), &cg) in &g.entries {
        if let Some(rows) = by_col.get(&k) {
            for &(i, cf) in rows {
                out.accumulate(i, j, cf.checked_mul(cg).expect("coefficient overflow"));
            }
        }
    }
    Ok(out)
}

/// Sum of two morphisms with identical endpoints.
pub fn add(f: &FreeMorphism, g: &FreeMorphism) -> Result<FreeMorphism, FreecatError> {
    if f.source != g.source || f.target != g.target {
        return Err(FreecatError::ShapeMismatch { context: "add".into() });
    }
    let mut out = f.clone();
    for (&(i, j), &c) in &g.entries {
        out.accumulate(i, j, c);
    }
    Ok(out)
}

/// Difference of two morphisms with identical endpoints.
pub fn sub(f: &FreeMorphism, g: &FreeMorphism) -> Result<FreeMorphism, FreecatError> {
    add(f, &g.negate())
}

/// Equality of morphisms with a shape check: comparing maps with different
/// endpoints is an error, not `false`.
pub fn is_equal(f: &FreeMorphism, g: &FreeMorphism) -> Result<bool, FreecatError> {
    if f.source != g.source || f.target != g.target {
        return Err(FreecatError::ShapeMismatch { context: "is_equal".into() });
    }
    Ok(f.entries == g.entries)
}

/// Checks that every stored entry corresponds to an existing generator.
pub fn validate_morphism(table: &ArrowTable, f: &FreeMorphism) -> ValidationReport {
    let mut rep = ValidationReport::new();
    for (&(i, j), _) in &f.entries {
        let a = f.source.summands[j as usize];
        let b = f.target.summands[i as usize];
        if !table.reachable(a, b) {
            rep.push(
                "no-generator",
                format!(
                    "entry ({i}, {j}): no arrow from {} to {}",
                    table.complex(a.complex).stratum(a.stratum).id,
                    table.complex(b.complex).stratum(b.stratum).id
                ),
            );
        }
    }
    rep
}

/// Inverts a morphism whose matrix is a signed permutation of invertible
/// generators.
pub fn invert_iso(table: &ArrowTable, f: &FreeMorphism) -> Result<FreeMorphism, FreecatError> {
    let n = f.source.rank();
    if f.target.rank() != n {
        return Err(FreecatError::NotInvertible { reason: "matrix is not square".into() });
    }
    let mut row_seen = vec![false; n];
    let mut col_seen = vec![false; n];
    let mut out = FreeMorphism::zero(f.target.clone(), f.source.clone());
    for (&(i, j), &c) in &f.entries {
        if c != 1 && c != -1 {
            return Err(FreecatError::NotInvertible {
                reason: format!("entry ({i}, {j}) has non-unit coefficient {c}"),
            });
        }
        if row_seen[i as usize] || col_seen[j as usize] {
            return Err(FreecatError::NotInvertible {
                reason: "matrix is not a signed permutation".into(),
            });
        }
        row_seen[i as usize] = true;
        col_seen[j as usize] = true;
        let a = f.source.summands[j as usize];
        let b = f.target.summands[i as usize];
        if !table.same_iso_class(a, b) {
            return Err(FreecatError::NotInvertible {
                reason: format!(
                    "generator from {} to {} is not declared invertible",
                    table.complex(a.complex).stratum(a.stratum).id,
                    table.complex(b.complex).stratum(b.stratum).id
                ),
            });
        }
        out.accumulate(j, i, c);
    }
    if !row_seen.iter().all(|&x| x) {
        return Err(FreecatError::NotInvertible { reason: "a row is identically zero".into() });
    }
    Ok(out)
}

/// A class in the Grothendieck group of the free additive category: a formal
/// integer combination of class labels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct K0Class {
    pub coefficients: BTreeMap<ClassLabel, i64>,
}

impl K0Class {
    pub fn zero() -> Self {
        K0Class::default()
    }

    pub fn of_label(label: ClassLabel) -> Self {
        let mut c = K0Class::zero();
        c.add_label(&label, 1);
        c
    }

    pub fn add_label(&mut self, label: &ClassLabel, amount: i64) {
        if amount == 0 {
            return;
        }
        let slot = self.coefficients.entry(label.clone()).or_insert(0);
        *slot = slot.checked_add(amount).expect("class coefficient overflow");
        if *slot == 0 {
            self.coefficients.remove(label);
        }
    }

    pub fn add(&self, other: &K0Class) -> K0Class {
        let mut out = self.clone();
        for (l, &c) in &other.coefficients {
            out.add_label(l, c);
        }
        out
    }

    pub fn sub(&self, other: &K0Class) -> K0Class {
        let mut out = self.clone();
        for (l, &c) in &other.coefficients {
            out.add_label(l, -c);
        }
        out
    }

    pub fn scale(&self, by: i64) -> K0Class {
        let mut out = K0Class::zero();
        for (l, &c) in &self.coefficients {
            out.add_label(l, c.checked_mul(by).expect("class coefficient overflow"));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }
}

impl fmt::Display for K0Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (l, &c) in &self.coefficients {
            let sign = if c < 0 { "-" } else { "+" };
            let mag = c.unsigned_abs();
            if first {
                first = false;
            } else {
                write!(f, " ")?;
            }
            if mag == 1 {
                write!(f, "{sign}[{l}]")?;
            } else {
                write!(f, "{sign}{mag}[{l}]")?;
            }
        }
        Ok(())
    }
}

/// The class of a formal direct sum: the sum of its summand labels.
pub fn k0_class_of_object(table: &ArrowTable, o: &FreeObject) -> K0Class {
    let mut out = K0Class::zero();
    for &n in &o.summands {
        out.add_label(table.label(n), 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strata::{
        BaseTag, ComplexSpec, Stratum, StratumFlags, StratumId, StratifiedComplex, Vertex,
        VertexId, VertexOrder,
    };

    fn edge() -> StratifiedComplex {
        let v = |s: &str| VertexId(s.to_string());
        let t = |s: &str| StratumId(s.to_string());
        let l = |s: &str| ClassLabel(s.to_string());
        StratifiedComplex::new(ComplexSpec {
            name: "edge".into(),
            base: BaseTag::K,
            vertices: vec![
                Vertex { id: v("D0"), order: VertexOrder::Rank(0) },
                Vertex { id: v("D1"), order: VertexOrder::Rank(1) },
            ],
            strata: vec![
                Stratum { id: t("D0"), vertices: vec![v("D0")], faces: vec![], class: l("a"), flags: StratumFlags::default() },
                Stratum { id: t("D1"), vertices: vec![v("D1")], faces: vec![], class: l("b"), flags: StratumFlags::default() },
                Stratum { id: t("D0D1"), vertices: vec![v("D0"), v("D1")], faces: vec![t("D1"), t("D0")], class: l("e"), flags: StratumFlags::default() },
            ],
        })
        .unwrap()
    }

    #[test]
    fn reachability_follows_faces() {
        let mut table = ArrowTable::new();
        let h = table.register_complex(edge());
        let e = table.node(h, 2);
        let d0 = table.node(h, 0);
        let d1 = table.node(h, 1);
        assert!(table.reachable(e, d0));
        assert!(table.reachable(e, d1));
        assert!(!table.reachable(d0, d1));
        assert!(!table.reachable(d0, e));
        assert!(table.reachable(e, e));
    }

    #[test]
    fn compose_is_bilinear_and_thin() {
        let mut table = ArrowTable::new();
        let h = table.register_complex(edge());
        let e = table.node(h, 2);
        let d0 = table.node(h, 0);
        let oe = FreeObject { summands: vec![e] };
        let od = FreeObject { summands: vec![d0] };
        let two = FreeMorphism::from_entries(oe.clone(), od.clone(), [((0, 0), 2)]);
        let three = FreeMorphism::from_entries(od.clone(), od.clone(), [((0, 0), 3)]);
        let c = compose(&three, &two).unwrap();
        assert_eq!(c.entry(0, 0), 6);
        validate_morphism(&table, &c).expect_valid("composite");
        let s = add(&two, &two).unwrap();
        assert_eq!(s.entry(0, 0), 4);
        assert!(sub(&two, &two).unwrap().is_zero());
        assert!(is_equal(&two, &two).unwrap());
        assert!(is_equal(&two, &three).is_err());
    }

    #[test]
    fn iso_inversion_requires_declaration() {
        let mut table = ArrowTable::new();
        let h = table.register_complex(edge());
        let e = table.node(h, 2);
        let d0 = table.node(h, 0);
        let oe = FreeObject { summands: vec![e] };
        let od = FreeObject { summands: vec![d0] };
        let m = FreeMorphism::from_entries(oe.clone(), od.clone(), [((0, 0), 1)]);
        assert!(invert_iso(&table, &m).is_err());
        // A second complex with a declared iso makes the matching arrow
        // invertible. Labels must agree for the declaration to be accepted.
        let h2 = table.register_complex(edge());
        let a = table.node(h2, 0);
        table.add_arrows(vec![(a, table.node(h, 0), ArrowTag::Iso)]);
        let oa = FreeObject { summands: vec![a] };
        let v = FreeMorphism::from_entries(oa.clone(), od.clone(), [((0, 0), -1)]);
        let inv = invert_iso(&table, &v).unwrap();
        assert_eq!(inv.entry(0, 0), -1);
        let round = compose(&inv, &v).unwrap();
        assert!(is_equal(&round, &FreeMorphism::identity(oa)).unwrap());
    }

    #[test]
    fn k0_formatting_and_arithmetic() {
        let mut table = ArrowTable::new();
        let h = table.register_complex(edge());
        let o = FreeObject { summands: vec![table.node(h, 0), table.node(h, 1), table.node(h, 0)] };
        let k = k0_class_of_object(&table, &o);
        assert_eq!(k.to_string(), "+2[a] +[b]");
        let k2 = k.sub(&k);
        assert!(k2.is_zero());
        assert_eq!(k2.to_string(), "0");
    }
}
