//! Builders for the canonical chain complexes of a stratified complex and
//! the comparison maps between them.
//!
//! Four complexes are built from one base:
//!
//! * the subdivision complex, with one summand per strictly increasing chain
//!   of strata (degree = chain length minus one);
//! * its weak variant, allowing repeated entries, truncated at a chosen
//!   degree bound;
//! * the covering complex, with one summand per stratum in degree
//!   `codim - 1`;
//! * its weak variant, with one summand per pair (stratum, weakly
//!   increasing vertex word with full support).
//!
//! Between them run the last-vertex map (subdivision to covering), the
//! subdivision map (covering to subdivision), the splitting of the weak
//! complexes along degenerate summands, and the comparison homotopy showing
//! the composite of the two maps is homotopic to the identity. Everything
//! here is constructed degree by degree as sparse integer matrices; every
//! claimed identity has a verifier that does exact matrix arithmetic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use crate::chain::{ChainComplex, ChainMap, Homotopy};
use crate::freecat::{compose, ArrowTable, ComplexHandle, FreeMorphism, FreeObject, Node};
use crate::report::ValidationReport;
use crate::strata::{enumerate_chains, ChainMode, PosetMap, StratifiedComplex};

/// How far to materialize a complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuildMode {
    /// Only the finitely many nondegenerate summands.
    Bounded,
    /// Weak summands through the given degree (inclusive).
    Extended(u32),
}

/// Default truncation bound for weak complexes: every identity verified here
/// consumes at most one degree beyond the top nondegenerate degree, so two
/// extra degrees leave a safety margin.
pub fn default_extended_bound(c: &StratifiedComplex) -> u32 {
    (c.max_codim() + 2) as u32
}

/// Labels one direct summand of a built complex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SummandKey {
    /// A stratum (covering complex, bounded).
    Stratum(usize),
    /// A weakly or strictly increasing chain of strata (subdivision side).
    Chain(Vec<usize>),
    /// A stratum together with a weakly increasing vertex word whose
    /// support is exactly the stratum's vertex set (covering side, weak).
    Word { base: usize, word: Vec<usize> },
}

impl SummandKey {
    /// A weak summand is degenerate when a chain entry or word letter
    /// repeats; repeats are always adjacent because entries are sorted.
    pub fn is_degenerate(&self) -> bool {
        self.first_repetition().is_some()
    }

    /// Index of the first adjacent repeat, if any.
    pub fn first_repetition(&self) -> Option<usize> {
        let list: &[usize] = match self {
            SummandKey::Stratum(_) => return None,
            SummandKey::Chain(entries) => entries,
            SummandKey::Word { word, .. } => word,
        };
        (0..list.len().saturating_sub(1)).find(|&j| list[j] == list[j + 1])
    }
}

/// Which of the four complexes a [`BuiltComplex`] is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplexKind {
    Subdivision,
    SubdivisionWeak,
    Covering,
    CoveringWeak,
}

/// A chain complex together with the bookkeeping tying each summand back to
/// the chain, stratum, or word it stands for.
#[derive(Clone, Debug)]
pub struct BuiltComplex {
    pub kind: ComplexKind,
    pub handle: ComplexHandle,
    pub complex: Rc<ChainComplex>,
    /// Summand labels per degree, in the order of the term's summands.
    pub keys: BTreeMap<u32, Vec<SummandKey>>,
    index: BTreeMap<u32, HashMap<SummandKey, u32>>,
}

impl BuiltComplex {
    pub fn rank(&self, n: u32) -> usize {
        self.keys.get(&n).map_or(0, Vec::len)
    }

    pub fn key(&self, n: u32, i: u32) -> &SummandKey {
        &self.keys[&n][i as usize]
    }

    pub fn index_of(&self, n: u32, key: &SummandKey) -> Option<u32> {
        self.index.get(&n).and_then(|m| m.get(key)).copied()
    }

    /// The node whose object the summand is: the last chain entry, the
    /// stratum itself, or the word's base stratum.
    pub fn support_node(&self, key: &SummandKey) -> Node {
        let stratum = match key {
            SummandKey::Stratum(s) => *s,
            SummandKey::Chain(entries) => *entries.last().expect("nonempty chain"),
            SummandKey::Word { base, .. } => *base,
        };
        Node { complex: self.handle, stratum }
    }
}

/// Assembles terms, index maps, and differentials from per-degree key lists
/// and a face rule mapping a summand to its signed faces one degree down.
fn assemble(
    kind: ComplexKind,
    handle: ComplexHandle,
    keys: BTreeMap<u32, Vec<SummandKey>>,
    truncation_bound: Option<u32>,
    mut faces: impl FnMut(u32, &SummandKey) -> Vec<(SummandKey, i64)>,
) -> BuiltComplex {
    let mut index: BTreeMap<u32, HashMap<SummandKey, u32>> = BTreeMap::new();
    let mut terms: BTreeMap<u32, FreeObject> = BTreeMap::new();
    for (&n, list) in &keys {
        if list.is_empty() {
            continue;
        }
        let mut m = HashMap::with_capacity(list.len());
        let mut summands = Vec::with_capacity(list.len());
        for (i, k) in list.iter().enumerate() {
            m.insert(k.clone(), i as u32);
            let stratum = match k {
                SummandKey::Stratum(s) => *s,
                SummandKey::Chain(entries) => *entries.last().expect("nonempty chain"),
                SummandKey::Word { base, .. } => *base,
            };
            summands.push(Node { complex: handle, stratum });
        }
        index.insert(n, m);
        terms.insert(n, FreeObject { summands });
    }
    let mut differentials = BTreeMap::new();
    for (&n, list) in &keys {
        if n == 0 || list.is_empty() {
            continue;
        }
        let source = terms[&n].clone();
        let target = terms.get(&(n - 1)).cloned().unwrap_or_else(FreeObject::zero);
        let mut d = FreeMorphism::zero(source, target);
        let lower = index.get(&(n - 1));
        for (j, k) in list.iter().enumerate() {
            for (fk, coeff) in faces(n, k) {
                let i = lower
                    .and_then(|m| m.get(&fk))
                    .copied()
                    .expect("face summand must exist one degree down");
                d.accumulate(i, j as u32, coeff);
            }
        }
        differentials.insert(n, d);
    }
    let keys: BTreeMap<u32, Vec<SummandKey>> =
        keys.into_iter().filter(|(_, l)| !l.is_empty()).collect();
    let complex = Rc::new(ChainComplex { terms, differentials, truncation_bound });
    BuiltComplex { kind, handle, complex, keys, index }
}

fn sign(j: usize) -> i64 {
    if j % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Builds the subdivision complex of the base: degree `n` has one summand
/// per (strictly, or in extended mode weakly) increasing chain of `n + 1`
/// strata, supported on the object of the last entry. The face that drops
/// the last entry restricts along the unique generator to the new last
/// stratum; all other faces are identities on the support.
pub fn build_sd(table: &ArrowTable, handle: ComplexHandle, mode: BuildMode) -> BuiltComplex {
    let c = table.complex(handle);
    let mut keys = BTreeMap::new();
    match mode {
        BuildMode::Bounded => {
            let mut n = 0u32;
            loop {
                let chains = enumerate_chains(c, n as usize, ChainMode::Nondegenerate);
                if chains.is_empty() {
                    break;
                }
                keys.insert(n, chains.into_iter().map(|h| SummandKey::Chain(h.entries)).collect());
                n += 1;
            }
        }
        BuildMode::Extended(bound) => {
            for n in 0..=bound {
                let chains = enumerate_chains(c, n as usize, ChainMode::Weak);
                keys.insert(n, chains.into_iter().map(|h| SummandKey::Chain(h.entries)).collect());
            }
        }
    }
    let kind = match mode {
        BuildMode::Bounded => ComplexKind::Subdivision,
        BuildMode::Extended(_) => ComplexKind::SubdivisionWeak,
    };
    let truncation = match mode {
        BuildMode::Bounded => None,
        BuildMode::Extended(bound) => Some(bound),
    };
    assemble(kind, handle, keys, truncation, |_, key| {
        let SummandKey::Chain(entries) = key else { unreachable!() };
        (0..entries.len())
            .map(|j| {
                let mut faced = entries.clone();
                faced.remove(j);
                (SummandKey::Chain(faced), sign(j))
            })
            .collect()
    })
}

/// Enumerates the weakly increasing words of length `len` whose support is
/// exactly the given sorted vertex list, in lexicographic order.
fn words_with_support(support: &[usize], len: usize) -> Vec<Vec<usize>> {
    let k = support.len();
    if len < k || k == 0 {
        return vec![];
    }
    // Choose multiplicities m_i >= 1 summing to len; lexicographic order on
    // the expanded word = lexicographic on the multiplicity vector.
    let mut out = Vec::new();
    let mut mults = vec![1usize; k];
    fn rec(
        support: &[usize],
        mults: &mut Vec<usize>,
        pos: usize,
        remaining: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        let k = support.len();
        if pos + 1 == k {
            mults[pos] = remaining;
            let mut word = Vec::new();
            for (v, &m) in support.iter().zip(mults.iter()) {
                word.extend(std::iter::repeat(*v).take(m));
            }
            out.push(word);
            return;
        }
        let tail_min = k - pos - 1;
        for m in 1..=(remaining - tail_min) {
            mults[pos] = m;
            rec(support, mults, pos + 1, remaining - m, out);
        }
        mults[pos] = 1;
    }
    rec(support, &mut mults, 0, len, &mut out);
    out
}

/// Builds the covering complex of the base: in bounded mode degree `n` has
/// one summand per stratum of codimension `n + 1`; in extended mode one per
/// (stratum, word) pair. Faces delete one word letter; when the deleted
/// letter was the last of its kind the summand restricts to the subface on
/// the remaining support.
pub fn build_cech(table: &ArrowTable, handle: ComplexHandle, mode: BuildMode) -> BuiltComplex {
    let c = table.complex(handle);
    let mut keys: BTreeMap<u32, Vec<SummandKey>> = BTreeMap::new();
    match mode {
        BuildMode::Bounded => {
            for s in c.strata_by_id() {
                let n = (c.codim(s) - 1) as u32;
                keys.entry(n).or_default().push(SummandKey::Stratum(s));
            }
        }
        BuildMode::Extended(bound) => {
            for n in 0..=bound {
                let mut list = Vec::new();
                for s in c.strata_by_id() {
                    for word in words_with_support(c.word(s), n as usize + 1) {
                        list.push(SummandKey::Word { base: s, word });
                    }
                }
                keys.insert(n, list);
            }
        }
    }
    let kind = match mode {
        BuildMode::Bounded => ComplexKind::Covering,
        BuildMode::Extended(_) => ComplexKind::CoveringWeak,
    };
    let truncation = match mode {
        BuildMode::Bounded => None,
        BuildMode::Extended(bound) => Some(bound),
    };
    assemble(kind, handle, keys, truncation, |_, key| {
        let (base, word): (usize, Vec<usize>) = match key {
            SummandKey::Stratum(s) => (*s, c.word(*s).to_vec()),
            SummandKey::Word { base, word } => (*base, word.clone()),
            SummandKey::Chain(_) => unreachable!(),
        };
        (0..word.len())
            .map(|j| {
                let mut rest = word.clone();
                let letter = rest.remove(j);
                let target = if rest.contains(&letter) {
                    SummandKey::Word { base, word: rest }
                } else {
                    let keep: BTreeSet<usize> = rest.iter().copied().collect();
                    let sub = c.subface(base, &keep).expect("face support is a subword");
                    match key {
                        SummandKey::Stratum(_) => SummandKey::Stratum(sub),
                        _ => SummandKey::Word { base: sub, word: rest },
                    }
                };
                (target, sign(j))
            })
            .collect()
    })
}

/// Memoized subface lookup keyed by (stratum, kept vertex set).
struct SubfaceMemo<'a> {
    c: &'a StratifiedComplex,
    memo: HashMap<(usize, Vec<usize>), usize>,
}

impl<'a> SubfaceMemo<'a> {
    fn new(c: &'a StratifiedComplex) -> Self {
        SubfaceMemo { c, memo: HashMap::new() }
    }

    fn get(&mut self, s: usize, keep: &BTreeSet<usize>) -> usize {
        let key = (s, keep.iter().copied().collect::<Vec<_>>());
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        let sub = self.c.subface(s, keep).expect("kept set is a subword");
        self.memo.insert(key, sub);
        sub
    }
}

/// Runs `f` over all permutations of `0..k` with their signs (Heap's
/// algorithm; each step is a single transposition).
fn for_each_permutation(k: usize, f: &mut impl FnMut(&[usize], i64)) {
    let mut a: Vec<usize> = (0..k).collect();
    if k == 0 {
        f(&a, 1);
        return;
    }
    let mut counters = vec![0usize; k];
    let mut s = 1i64;
    f(&a, s);
    let mut i = 1;
    while i < k {
        if counters[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(counters[i], i);
            }
            s = -s;
            f(&a, s);
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
}

/// The word of maxima of a chain: the order-largest vertex of each entry.
fn maxima(c: &StratifiedComplex, entries: &[usize]) -> Vec<usize> {
    entries.iter().map(|&s| *c.word(s).last().expect("nonempty stratum")).collect()
}

/// Builds the last-vertex map from the weak subdivision complex to the weak
/// covering complex: a chain goes to the word of maxima of its entries,
/// based at the subface of the last entry on that word's support, along the
/// restriction generator.
pub fn build_last_vertex_weak(
    table: &ArrowTable,
    sd: &BuiltComplex,
    cech: &BuiltComplex,
) -> ChainMap {
    assert_eq!(sd.kind, ComplexKind::SubdivisionWeak);
    assert_eq!(cech.kind, ComplexKind::CoveringWeak);
    assert_eq!(sd.handle, cech.handle);
    let c = table.complex(sd.handle);
    let limit = sd.complex.reliable_degree().min(cech.complex.reliable_degree());
    let mut components = BTreeMap::new();
    for n in 0..=limit {
        let mut f = FreeMorphism::zero(sd.complex.term(n), cech.complex.term(n));
        for (j, key) in sd.keys.get(&n).map_or(&[][..], Vec::as_slice).iter().enumerate() {
            let SummandKey::Chain(entries) = key else { unreachable!() };
            let word = maxima(c, entries);
            let keep: BTreeSet<usize> = word.iter().copied().collect();
            let base = c.subface(*entries.last().unwrap(), &keep).expect("maxima are vertices");
            let target = SummandKey::Word { base, word };
            let i = cech.index_of(n, &target).expect("maxima word is a covering summand");
            f.accumulate(i, j as u32, 1);
        }
        components.insert(n, f);
    }
    ChainMap { source: sd.complex.clone(), target: cech.complex.clone(), components }
}

/// Builds the bounded last-vertex map. By definition it is the weak map
/// conjugated by the splitting (include, apply, project); since the
/// inclusion of a strict chain is itself and projection only kills words
/// with repeated letters, the composite is computed directly: chains whose
/// maxima repeat go to zero, the rest restrict onto the stratum carried by
/// their maxima.
pub fn build_last_vertex(table: &ArrowTable, sd: &BuiltComplex, cech: &BuiltComplex) -> ChainMap {
    assert_eq!(sd.kind, ComplexKind::Subdivision);
    assert_eq!(cech.kind, ComplexKind::Covering);
    assert_eq!(sd.handle, cech.handle);
    let c = table.complex(sd.handle);
    let mut components = BTreeMap::new();
    let top = sd.complex.top_degree();
    for n in 0..=top {
        let mut f = FreeMorphism::zero(sd.complex.term(n), cech.complex.term(n));
        for (j, key) in sd.keys.get(&n).map_or(&[][..], Vec::as_slice).iter().enumerate() {
            let SummandKey::Chain(entries) = key else { unreachable!() };
            let word = maxima(c, entries);
            if (0..word.len() - 1).any(|k| word[k] == word[k + 1]) {
                continue;
            }
            let keep: BTreeSet<usize> = word.iter().copied().collect();
            let base = c.subface(*entries.last().unwrap(), &keep).expect("maxima are vertices");
            let i = cech.index_of(n, &SummandKey::Stratum(base)).expect("stratum summand");
            f.accumulate(i, j as u32, 1);
        }
        components.insert(n, f);
    }
    ChainMap { source: sd.complex.clone(), target: cech.complex.clone(), components }
}

/// Builds the weak subdivision map from the weak covering complex: a word
/// summand goes to the signed sum, over all permutations of its letter
/// positions, of the chain of subfaces spanned by successive initial
/// segments of the permuted letters.
pub fn build_subdivision_map_weak(
    table: &ArrowTable,
    cech: &BuiltComplex,
    sd: &BuiltComplex,
) -> ChainMap {
    assert_eq!(cech.kind, ComplexKind::CoveringWeak);
    assert_eq!(sd.kind, ComplexKind::SubdivisionWeak);
    assert_eq!(cech.handle, sd.handle);
    let c = table.complex(sd.handle);
    let mut memo = SubfaceMemo::new(c);
    let limit = sd.complex.reliable_degree().min(cech.complex.reliable_degree());
    let mut components = BTreeMap::new();
    for n in 0..=limit {
        let mut f = FreeMorphism::zero(cech.complex.term(n), sd.complex.term(n));
        for (j, key) in cech.keys.get(&n).map_or(&[][..], Vec::as_slice).iter().enumerate() {
            let SummandKey::Word { base, word } = key else { unreachable!() };
            for_each_permutation(word.len(), &mut |perm, s| {
                let mut keep = BTreeSet::new();
                let mut entries = Vec::with_capacity(word.len());
                for &p in perm {
                    keep.insert(word[p]);
                    entries.push(memo.get(*base, &keep));
                }
                let i = sd.index_of(n, &SummandKey::Chain(entries)).expect("chain summand");
                f.accumulate(i, j as u32, s);
            });
        }
        components.insert(n, f);
    }
    ChainMap { source: cech.complex.clone(), target: sd.complex.clone(), components }
}

/// Builds the bounded subdivision map. The weak map applied to a strict
/// stratum summand only produces strictly increasing chains (each permuted
/// initial segment adds a fresh vertex), so the splitting conjugation is
/// computed directly with no degenerate terms to discard.
pub fn build_subdivision_map(
    table: &ArrowTable,
    cech: &BuiltComplex,
    sd: &BuiltComplex,
) -> ChainMap {
    assert_eq!(cech.kind, ComplexKind::Covering);
    assert_eq!(sd.kind, ComplexKind::Subdivision);
    assert_eq!(cech.handle, sd.handle);
    let c = table.complex(sd.handle);
    let mut memo = SubfaceMemo::new(c);
    let top = cech.complex.top_degree();
    let mut components = BTreeMap::new();
    for n in 0..=top {
        let mut f = FreeMorphism::zero(cech.complex.term(n), sd.complex.term(n));
        for (j, key) in cech.keys.get(&n).map_or(&[][..], Vec::as_slice).iter().enumerate() {
            let SummandKey::Stratum(base) = key else { unreachable!() };
            let word = c.word(*base).to_vec();
            for_each_permutation(word.len(), &mut |perm, s| {
                let mut keep = BTreeSet::new();
                let mut entries = Vec::with_capacity(word.len());
                for &p in perm {
                    keep.insert(word[p]);
                    entries.push(memo.get(*base, &keep));
                }
                let i = sd.index_of(n, &SummandKey::Chain(entries)).expect("chain summand");
                f.accumulate(i, j as u32, s);
            });
        }
        components.insert(n, f);
    }
    ChainMap { source: cech.complex.clone(), target: sd.complex.clone(), components }
}

/// Splits a weak complex along its degenerate summands: the inclusion of
/// the bounded complex, the projection killing degenerate summands, and a
/// homotopy witnessing that inclusion-after-projection is homotopic to the
/// identity. The projection after the inclusion is the identity on the
/// nose.
///
/// The homotopy sends a degenerate summand with first repeat at position
/// `j` to its `j`-th degeneracy with sign `(-1)^j`, and nondegenerate
/// summands to zero. (Summing over all degeneracies instead does not
/// satisfy the homotopy identity: already for a doubled one-entry chain the
/// alternating sum telescopes to zero while the right side does not.)
pub fn degeneracy_splitting(
    _table: &ArrowTable,
    strict: &BuiltComplex,
    weak: &BuiltComplex,
) -> (ChainMap, ChainMap, Homotopy) {
    assert_eq!(strict.handle, weak.handle);
    match (strict.kind, weak.kind) {
        (ComplexKind::Subdivision, ComplexKind::SubdivisionWeak) => {}
        (ComplexKind::Covering, ComplexKind::CoveringWeak) => {}
        _ => panic!("degeneracy_splitting wants a bounded complex and its weak variant"),
    }
    let bound = weak.complex.reliable_degree();
    let limit = bound.min(strict.complex.top_degree());
    let mut incl = BTreeMap::new();
    let mut proj = BTreeMap::new();
    for n in 0..=limit {
        let mut i_n = FreeMorphism::zero(strict.complex.term(n), weak.complex.term(n));
        let mut p_n = FreeMorphism::zero(weak.complex.term(n), strict.complex.term(n));
        for (j, key) in strict.keys.get(&n).map_or(&[][..], Vec::as_slice).iter().enumerate() {
            let weak_key = match key {
                SummandKey::Chain(entries) => SummandKey::Chain(entries.clone()),
                SummandKey::Stratum(s) => SummandKey::Word {
                    base: *s,
                    word: _table.complex(strict.handle).word(*s).to_vec(),
                },
                SummandKey::Word { .. } => unreachable!(),
            };
            let i = weak.index_of(n, &weak_key).expect("strict summand exists weakly");
            i_n.accumulate(i, j as u32, 1);
            p_n.accumulate(j as u32, i, 1);
        }
        incl.insert(n, i_n);
        proj.insert(n, p_n);
    }
    let mut h = BTreeMap::new();
    for n in 0..bound {
        let mut h_n = FreeMorphism::zero(weak.complex.term(n), weak.complex.term(n + 1));
        for (j, key) in weak.keys.get(&n).map_or(&[][..], Vec::as_slice).iter().enumerate() {
            let Some(rep) = key.first_repetition() else { continue };
            let doubled = match key {
                SummandKey::Chain(entries) => {
                    let mut e = entries.clone();
                    e.insert(rep, entries[rep]);
                    SummandKey::Chain(e)
                }
                SummandKey::Word { base, word } => {
                    let mut w = word.clone();
                    w.insert(rep, word[rep]);
                    SummandKey::Word { base: *base, word: w }
                }
                SummandKey::Stratum(_) => unreachable!(),
            };
            let i = weak.index_of(n + 1, &doubled).expect("degeneracy stays in bounds");
            h_n.accumulate(i, j as u32, sign(rep));
        }
        h.insert(n, h_n);
    }
    (
        ChainMap { source: strict.complex.clone(), target: weak.complex.clone(), components: incl },
        ChainMap { source: weak.complex.clone(), target: strict.complex.clone(), components: proj },
        Homotopy { source: weak.complex.clone(), target: weak.complex.clone(), components: h },
    )
}

/// Enumerates the comparison homotopy terms on one weak chain summand: all
/// pairs of a level `i` and a permutation of `0..=i`, each contributing the
/// chain whose first `i + 1` entries are subfaces of entry `i` spanned by
/// permuted initial segments of the maxima, followed by the original tail
/// from entry `i` on.
fn homotopy_terms(
    c: &StratifiedComplex,
    memo: &mut SubfaceMemo<'_>,
    entries: &[usize],
    mut visit: impl FnMut(usize, Vec<usize>, i64),
) {
    let word = maxima(c, entries);
    for i in 0..entries.len() {
        for_each_permutation(i + 1, &mut |perm, s| {
            let mut keep = BTreeSet::new();
            let mut out = Vec::with_capacity(entries.len() + 1);
            for &p in perm {
                keep.insert(word[p]);
                out.push(memo.get(entries[i], &keep));
            }
            out.extend_from_slice(&entries[i..]);
            visit(i, out, sign(i) * s);
        });
    }
}

/// Builds the comparison homotopy on the weak subdivision complex, the
/// degree-raising map whose boundary identity exhibits
/// subdivision-after-last-vertex as homotopic to the identity.
pub fn build_comparison_homotopy(table: &ArrowTable, sd: &BuiltComplex) -> Homotopy {
    assert_eq!(sd.kind, ComplexKind::SubdivisionWeak);
    let c = table.complex(sd.handle);
    let mut memo = SubfaceMemo::new(c);
    let bound = sd.complex.reliable_degree();
    let mut components = BTreeMap::new();
    for n in 0..bound {
        let mut h_n = FreeMorphism::zero(sd.complex.term(n), sd.complex.term(n + 1));
        for (j, key) in sd.keys.get(&n).map_or(&[][..], Vec::as_slice).iter().enumerate() {
            let SummandKey::Chain(entries) = key else { unreachable!() };
            homotopy_terms(c, &mut memo, entries, |_, chain, coeff| {
                let i = sd.index_of(n + 1, &SummandKey::Chain(chain)).expect("chain summand");
                h_n.accumulate(i, j as u32, coeff);
            });
        }
        components.insert(n, h_n);
    }
    Homotopy { source: sd.complex.clone(), target: sd.complex.clone(), components }
}

/// The diagnostic decomposition of the comparison boundary identity at one
/// degree: the terms of boundary-after-homotopy split by (level, face
/// index) and the terms of homotopy-after-boundary split by (face index,
/// level).
#[derive(Clone, Debug, Default)]
pub struct ComparisonParts {
    /// Level 0, face 0: should be the identity.
    pub a: BTreeMap<(u32, u32), i64>,
    /// Top level, last face: should be minus subdivision-after-last-vertex.
    pub b: BTreeMap<(u32, u32), i64>,
    /// Face index below the level: should cancel to zero.
    pub c: BTreeMap<(u32, u32), i64>,
    /// Face index at least two above the level.
    pub d: BTreeMap<(u32, u32), i64>,
    /// Face index exactly one above the level (minus the top corner).
    pub ud: BTreeMap<(u32, u32), i64>,
    /// Face index equal to a positive level.
    pub ld: BTreeMap<(u32, u32), i64>,
    /// Boundary first, then level at least the face index.
    pub lt: BTreeMap<(u32, u32), i64>,
    /// Boundary first, then level strictly below the face index.
    pub ut: BTreeMap<(u32, u32), i64>,
}

fn accumulate_part(part: &mut BTreeMap<(u32, u32), i64>, i: u32, j: u32, c: i64) {
    let slot = part.entry((i, j)).or_insert(0);
    *slot += c;
    if *slot == 0 {
        part.remove(&(i, j));
    }
}

/// Computes the part decomposition of the comparison identity at degree
/// `n`. The boundary-after-homotopy terms of a degree-`n` summand are
/// indexed by a level `i`, a permutation, and a face index `jf` of the
/// produced degree-`n + 1` chain; the homotopy-after-boundary terms by a
/// face index `jd` of the summand and then a level and permutation on the
/// faced chain.
pub fn comparison_parts(table: &ArrowTable, sd: &BuiltComplex, n: u32) -> ComparisonParts {
    assert_eq!(sd.kind, ComplexKind::SubdivisionWeak);
    let c = table.complex(sd.handle);
    let mut memo = SubfaceMemo::new(c);
    let mut parts = ComparisonParts::default();
    let keys = sd.keys.get(&n).map_or(&[][..], Vec::as_slice);
    for (js, key) in keys.iter().enumerate() {
        let SummandKey::Chain(entries) = key else { unreachable!() };
        let top = entries.len() - 1;
        // Boundary after homotopy.
        homotopy_terms(c, &mut memo, entries, |i, chain, coeff| {
            for jf in 0..chain.len() {
                let mut faced = chain.clone();
                faced.remove(jf);
                let row = sd.index_of(n, &SummandKey::Chain(faced)).expect("chain summand");
                let total = coeff * sign(jf);
                let part = if i == 0 && jf == 0 {
                    &mut parts.a
                } else if i == top && jf == top + 1 {
                    &mut parts.b
                } else if jf < i {
                    &mut parts.c
                } else if jf == i {
                    &mut parts.ld
                } else if jf == i + 1 {
                    &mut parts.ud
                } else {
                    &mut parts.d
                };
                accumulate_part(part, row, js as u32, total);
            }
        });
        // Homotopy after boundary.
        if n > 0 {
            for jd in 0..entries.len() {
                let mut faced = entries.clone();
                faced.remove(jd);
                let outer = sign(jd);
                homotopy_terms(c, &mut memo, &faced, |i, chain, coeff| {
                    let row = sd.index_of(n, &SummandKey::Chain(chain)).expect("chain summand");
                    let part = if i >= jd { &mut parts.lt } else { &mut parts.ut };
                    accumulate_part(part, row, js as u32, outer * coeff);
                });
            }
        }
    }
    parts
}

/// Verifies the five sign identities of the comparison decomposition in
/// every reliable degree: the corner parts give the identity and minus
/// subdivision-after-last-vertex, the below-level part vanishes, and the
/// two mixed families cancel pairwise.
pub fn verify_comparison_identities(
    table: &ArrowTable,
    sd: &BuiltComplex,
    last_vertex: &ChainMap,
    subdivision: &ChainMap,
) -> ValidationReport {
    let mut rep = ValidationReport::new();
    let bound = sd.complex.reliable_degree().saturating_sub(1);
    for n in 0..=bound {
        if sd.rank(n) == 0 {
            continue;
        }
        let parts = comparison_parts(table, sd, n);
        let rank = sd.rank(n) as u32;
        let identity: BTreeMap<(u32, u32), i64> = (0..rank).map(|k| ((k, k), 1)).collect();
        if parts.a != identity {
            rep.push("identity-part", format!("degree {n}: corner part is not the identity"));
        }
        let composite = compose(&subdivision.component(n), &last_vertex.component(n))
            .expect("composable by construction");
        let expected: BTreeMap<(u32, u32), i64> =
            composite.entries().map(|(&k, &v)| (k, -v)).collect();
        if parts.b != expected {
            rep.push(
                "projection-part",
                format!("degree {n}: top corner is not minus the composite"),
            );
        }
        if !parts.c.is_empty() {
            rep.push("vanishing-part", format!("degree {n}: below-level part does not vanish"));
        }
        let mut d_ut = parts.d.clone();
        for (&k, &v) in &parts.ut {
            accumulate_part(&mut d_ut, k.0, k.1, v);
        }
        if !d_ut.is_empty() {
            rep.push("cancel-upper", format!("degree {n}: upper parts do not cancel"));
        }
        let mut diag = parts.ud.clone();
        for (&k, &v) in parts.ld.iter().chain(parts.lt.iter()) {
            accumulate_part(&mut diag, k.0, k.1, v);
        }
        if !diag.is_empty() {
            rep.push("cancel-diagonal", format!("degree {n}: diagonal parts do not cancel"));
        }
    }
    rep
}

/// Pushes the bounded subdivision complex forward along a monotone map of
/// stratum posets: a chain goes to its entrywise image when that image is
/// still strictly increasing, and to zero otherwise, along the vertical
/// generator on the last entry. This is the splitting conjugate of the weak
/// pushforward, computed directly.
pub fn sd_pushforward(
    _table: &ArrowTable,
    f: &PosetMap,
    sd_source: &BuiltComplex,
    sd_target: &BuiltComplex,
) -> ChainMap {
    assert_eq!(sd_source.kind, ComplexKind::Subdivision);
    assert_eq!(sd_target.kind, ComplexKind::Subdivision);
    assert_eq!(f.source, sd_source.handle);
    assert_eq!(f.target, sd_target.handle);
    let mut components = BTreeMap::new();
    for n in 0..=sd_source.complex.top_degree() {
        let mut f_n = FreeMorphism::zero(sd_source.complex.term(n), sd_target.complex.term(n));
        for (j, key) in sd_source.keys.get(&n).map_or(&[][..], Vec::as_slice).iter().enumerate() {
            let SummandKey::Chain(entries) = key else { unreachable!() };
            let image: Vec<usize> = entries.iter().map(|&s| f.assignment[s]).collect();
            if (0..image.len() - 1).any(|k| image[k] == image[k + 1]) {
                continue;
            }
            let i = sd_target
                .index_of(n, &SummandKey::Chain(image))
                .expect("monotone image is a chain");
            f_n.accumulate(i, j as u32, 1);
        }
        components.insert(n, f_n);
    }
    ChainMap { source: sd_source.complex.clone(), target: sd_target.complex.clone(), components }
}

/// The weak pushforward along a monotone poset map: entrywise image with no
/// degeneracy discarded.
pub fn sd_pushforward_weak(
    _table: &ArrowTable,
    f: &PosetMap,
    sd_source: &BuiltComplex,
    sd_target: &BuiltComplex,
) -> ChainMap {
    assert_eq!(sd_source.kind, ComplexKind::SubdivisionWeak);
    assert_eq!(sd_target.kind, ComplexKind::SubdivisionWeak);
    assert_eq!(f.source, sd_source.handle);
    assert_eq!(f.target, sd_target.handle);
    let limit = sd_source.complex.reliable_degree().min(sd_target.complex.reliable_degree());
    let mut components = BTreeMap::new();
    for n in 0..=limit {
        let mut f_n = FreeMorphism::zero(sd_source.complex.term(n), sd_target.complex.term(n));
        for (j, key) in sd_source.keys.get(&n).map_or(&[][..], Vec::as_slice).iter().enumerate() {
            let SummandKey::Chain(entries) = key else { unreachable!() };
            let image: Vec<usize> = entries.iter().map(|&s| f.assignment[s]).collect();
            let i = sd_target
                .index_of(n, &SummandKey::Chain(image))
                .expect("monotone image is a weak chain");
            f_n.accumulate(i, j as u32, 1);
        }
        components.insert(n, f_n);
    }
    ChainMap { source: sd_source.complex.clone(), target: sd_target.complex.clone(), components }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{chain_maps_equal, compose_chain_maps, verify_homotopy, ChainMap};
    use crate::freecat::ClassLabel;
    use crate::strata::{
        BaseTag, ComplexSpec, Stratum, StratumFlags, StratumId, Vertex, VertexId, VertexOrder,
    };

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

    #[test]
    fn edge_bounded_complexes() {
        let (table, h) = edge_table();
        let sd = build_sd(&table, h, BuildMode::Bounded);
        assert_eq!(sd.rank(0), 3);
        assert_eq!(sd.rank(1), 2);
        assert_eq!(sd.rank(2), 0);
        sd.complex.validate().expect_valid("edge subdivision complex");
        let cech = build_cech(&table, h, BuildMode::Bounded);
        assert_eq!(cech.rank(0), 2);
        assert_eq!(cech.rank(1), 1);
        cech.complex.validate().expect_valid("edge covering complex");
    }

    #[test]
    fn edge_weak_ranks() {
        let (table, h) = edge_table();
        let sd = build_sd(&table, h, BuildMode::Extended(3));
        assert_eq!(sd.rank(0), 3);
        assert_eq!(sd.rank(1), 5);
        assert_eq!(sd.rank(2), 7);
        assert_eq!(sd.rank(3), 9);
        sd.complex.validate().expect_valid("edge weak subdivision complex");
        let cech = build_cech(&table, h, BuildMode::Extended(3));
        // Words per degree: two one-letter supports and one two-letter
        // support give 2, 3, 4, 5 words of lengths 1..=4 respectively:
        // lengths k have 2 constant words plus (k - 1) mixed ones.
        assert_eq!(cech.rank(0), 2);
        assert_eq!(cech.rank(1), 3);
        assert_eq!(cech.rank(2), 4);
        assert_eq!(cech.rank(3), 5);
        cech.complex.validate().expect_valid("edge weak covering complex");
    }

    #[test]
    fn edge_last_vertex_and_subdivision() {
        let (table, h) = edge_table();
        let sd = build_sd(&table, h, BuildMode::Bounded);
        let cech = build_cech(&table, h, BuildMode::Bounded);
        let lam = build_last_vertex(&table, &sd, &cech);
        lam.validate().expect_valid("bounded last-vertex map");
        let c = table.complex(h);
        let d0 = c.stratum_index(&StratumId("D0".into())).unwrap();
        let d1 = c.stratum_index(&StratumId("D1".into())).unwrap();
        let e = c.stratum_index(&StratumId("D0D1".into())).unwrap();
        // The chain whose maxima stay distinct survives; the other dies.
        let j_live = sd.index_of(1, &SummandKey::Chain(vec![d0, e])).unwrap();
        let j_dead = sd.index_of(1, &SummandKey::Chain(vec![d1, e])).unwrap();
        let i_e = cech.index_of(1, &SummandKey::Stratum(e)).unwrap();
        assert_eq!(lam.component(1).entry(i_e, j_live), 1);
        assert_eq!(lam.component(1).entry(i_e, j_dead), 0);
        let sdm = build_subdivision_map(&table, &cech, &sd);
        sdm.validate().expect_valid("bounded subdivision map");
        assert_eq!(sdm.component(1).entry(j_live, i_e), 1);
        assert_eq!(sdm.component(1).entry(j_dead, i_e), -1);
        let round = compose_chain_maps(&lam, &sdm).unwrap();
        let id = ChainMap::identity(cech.complex.clone());
        assert!(chain_maps_equal(&round, &id).unwrap());
    }

    #[test]
    fn edge_splitting_both_sides() {
        let (table, h) = edge_table();
        for (strict_mode, weak_mode) in [(BuildMode::Bounded, BuildMode::Extended(2))] {
            let sd = build_sd(&table, h, strict_mode);
            let sdw = build_sd(&table, h, weak_mode);
            let (inc, prj, hom) = degeneracy_splitting(&table, &sd, &sdw);
            inc.validate().expect_valid("inclusion");
            prj.validate().expect_valid("projection");
            let round = compose_chain_maps(&prj, &inc).unwrap();
            assert!(chain_maps_equal(&round, &ChainMap::identity(sd.complex.clone())).unwrap());
            let back = compose_chain_maps(&inc, &prj).unwrap();
            let idw = ChainMap::identity(sdw.complex.clone());
            verify_homotopy(&hom, &idw, &back).unwrap().expect_valid("splitting homotopy");

            let cech = build_cech(&table, h, strict_mode);
            let cechw = build_cech(&table, h, weak_mode);
            let (inc, prj, hom) = degeneracy_splitting(&table, &cech, &cechw);
            let round = compose_chain_maps(&prj, &inc).unwrap();
            assert!(chain_maps_equal(&round, &ChainMap::identity(cech.complex.clone())).unwrap());
            let back = compose_chain_maps(&inc, &prj).unwrap();
            let idw = ChainMap::identity(cechw.complex.clone());
            verify_homotopy(&hom, &idw, &back).unwrap().expect_valid("covering splitting homotopy");
        }
    }

    #[test]
    fn edge_comparison_homotopy_and_identities() {
        let (table, h) = edge_table();
        let bound = default_extended_bound(table.complex(h));
        assert_eq!(bound, 4);
        let sdw = build_sd(&table, h, BuildMode::Extended(bound));
        let cechw = build_cech(&table, h, BuildMode::Extended(bound));
        let lam = build_last_vertex_weak(&table, &sdw, &cechw);
        lam.validate().expect_valid("weak last-vertex map");
        let sdm = build_subdivision_map_weak(&table, &cechw, &sdw);
        sdm.validate().expect_valid("weak subdivision map");
        let hom = build_comparison_homotopy(&table, &sdw);
        let composite = compose_chain_maps(&sdm, &lam).unwrap();
        let id = ChainMap::identity(sdw.complex.clone());
        verify_homotopy(&hom, &id, &composite).unwrap().expect_valid("comparison homotopy");
        verify_comparison_identities(&table, &sdw, &lam, &sdm)
            .expect_valid("comparison sign identities");
    }

    #[test]
    fn single_stratum_is_trivial() {
        let v = |s: &str| VertexId(s.to_string());
        let c = StratifiedComplex::new(ComplexSpec {
            name: "point".into(),
            base: BaseTag::K,
            vertices: vec![Vertex { id: v("D"), order: VertexOrder::Rank(0) }],
            strata: vec![Stratum {
                id: StratumId("D".into()),
                vertices: vec![v("D")],
                faces: vec![],
                class: ClassLabel("pt".into()),
                flags: StratumFlags::default(),
            }],
        })
        .unwrap();
        let mut table = ArrowTable::new();
        let h = table.register_complex(c);
        let sd = build_sd(&table, h, BuildMode::Bounded);
        assert_eq!(sd.rank(0), 1);
        assert_eq!(sd.complex.top_degree(), 0);
        let bound = default_extended_bound(table.complex(h));
        let sdw = build_sd(&table, h, BuildMode::Extended(bound));
        let cechw = build_cech(&table, h, BuildMode::Extended(bound));
        let lam = build_last_vertex_weak(&table, &sdw, &cechw);
        let sdm = build_subdivision_map_weak(&table, &cechw, &sdw);
        let hom = build_comparison_homotopy(&table, &sdw);
        let composite = compose_chain_maps(&sdm, &lam).unwrap();
        let id = ChainMap::identity(sdw.complex.clone());
        verify_homotopy(&hom, &id, &composite).unwrap().expect_valid("trivial comparison");
    }

    #[test]
    fn identity_pushforward_is_identity() {
        let (table, h) = edge_table();
        let sd = build_sd(&table, h, BuildMode::Bounded);
        let n = table.complex(h).strata().len();
        let f = PosetMap { source: h, target: h, assignment: (0..n).collect() };
        let push = sd_pushforward(&table, &f, &sd, &sd);
        assert!(chain_maps_equal(&push, &ChainMap::identity(sd.complex.clone())).unwrap());
    }
}
