//! Chain complexes of formal direct sums, chain maps, and homotopies.
//!
//! A complex stores one [`FreeObject`] per degree together with the
//! differentials going down by one. Complexes built from a stratified base
//! are concentrated in degrees `0..=max codimension`, but a complex may also
//! be truncated: verification helpers then check identities only in degrees
//! where both sides are fully determined.

use std::collections::BTreeMap;
use std::rc::Rc;

use crate::freecat::{
    add, compose, is_equal, sub, ArrowTable, FreeMorphism, FreeObject, FreecatError,
};
use crate::report::ValidationReport;

/// A nonnegatively graded chain complex of formal direct sums.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainComplex {
    /// Terms by degree; degrees absent from the map are zero.
    pub terms: BTreeMap<u32, FreeObject>,
    /// `differentials[&n]` is `d_n: terms[n] -> terms[n - 1]`, for `n >= 1`.
    pub differentials: BTreeMap<u32, FreeMorphism>,
    /// Degrees `> truncation_bound` were cut off; `None` means the complex
    /// is complete (all higher terms genuinely zero).
    pub truncation_bound: Option<u32>,
}

impl ChainComplex {
    pub fn term(&self, n: u32) -> FreeObject {
        self.terms.get(&n).cloned().unwrap_or_else(FreeObject::zero)
    }

    pub fn differential(&self, n: u32) -> FreeMorphism {
        self.differentials
            .get(&n)
            .cloned()
            .unwrap_or_else(|| FreeMorphism::zero(self.term(n), self.term(n.wrapping_sub(1))))
    }

    pub fn top_degree(&self) -> u32 {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    /// Largest degree `n` for which the complex determines its term exactly.
    pub fn reliable_degree(&self) -> u32 {
        match self.truncation_bound {
            Some(b) => b,
            None => self.top_degree(),
        }
    }

    /// Checks `d . d = 0` in every reliably known degree, and that the
    /// endpoints of each differential match the stored terms.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::new();
        for (&n, d) in &self.differentials {
            if n == 0 {
                rep.push("degree-zero", "a differential is indexed by degree 0");
                continue;
            }
            if d.source != self.term(n) {
                rep.push("endpoint", format!("d_{n} source does not match term {n}"));
            }
            if d.target != self.term(n - 1) {
                rep.push("endpoint", format!("d_{n} target does not match term {}", n - 1));
            }
        }
        let limit = self.reliable_degree();
        for n in 2..=limit {
            let dd = match compose(&self.differential(n - 1), &self.differential(n)) {
                Ok(m) => m,
                Err(e) => {
                    rep.push("compose", format!("d_{} . d_{}: {e}", n - 1, n));
                    continue;
                }
            };
            if !dd.is_zero() {
                rep.push("square", format!("d_{} . d_{} is nonzero", n - 1, n));
            }
        }
        rep
    }
}

/// A degree-preserving map of complexes, one component per degree.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainMap {
    pub source: Rc<ChainComplex>,
    pub target: Rc<ChainComplex>,
    pub components: BTreeMap<u32, FreeMorphism>,
}

impl ChainMap {
    pub fn component(&self, n: u32) -> FreeMorphism {
        self.components
            .get(&n)
            .cloned()
            .unwrap_or_else(|| FreeMorphism::zero(self.source.term(n), self.target.term(n)))
    }

    pub fn identity(c: Rc<ChainComplex>) -> ChainMap {
        let components = c
            .terms
            .iter()
            .map(|(&n, t)| (n, FreeMorphism::identity(t.clone())))
            .collect();
        ChainMap { source: c.clone(), target: c, components }
    }

    /// Largest degree in which the map is fully determined: the smallest
    /// truncation bound when one is present, otherwise the larger of the
    /// two top degrees (components above the smaller top must be zero and
    /// are still worth checking).
    pub fn reliable_degree(&self) -> u32 {
        degree_cap(&self.source, &self.target)
    }

    /// Checks commutation with the differentials in all reliable degrees.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::new();
        for (&n, f) in &self.components {
            if f.source != self.source.term(n) || f.target != self.target.term(n) {
                rep.push("endpoint", format!("component {n} endpoints do not match the terms"));
            }
        }
        let limit = self.reliable_degree();
        for n in 1..=limit {
            let lhs = match compose(&self.target.differential(n), &self.component(n)) {
                Ok(m) => m,
                Err(e) => {
                    rep.push("compose", format!("degree {n}: {e}"));
                    continue;
                }
            };
            let rhs = match compose(&self.component(n - 1), &self.source.differential(n)) {
                Ok(m) => m,
                Err(e) => {
                    rep.push("compose", format!("degree {n}: {e}"));
                    continue;
                }
            };
            match is_equal(&lhs, &rhs) {
                Ok(true) => {}
                Ok(false) => rep.push("commute", format!("degree {n}: d . f differs from f . d")),
                Err(e) => rep.push("shape", format!("degree {n}: {e}")),
            }
        }
        rep
    }
}

/// The degree through which identities between two complexes are fully
/// determined: the smallest truncation bound among the truncated ones, or
/// the larger top degree when both are complete.
pub fn degree_cap(a: &ChainComplex, b: &ChainComplex) -> u32 {
    match (a.truncation_bound, b.truncation_bound) {
        (None, None) => a.top_degree().max(b.top_degree()),
        (Some(x), None) => x,
        (None, Some(y)) => y,
        (Some(x), Some(y)) => x.min(y),
    }
}

/// Composes two chain maps (`f` after `g`).
pub fn compose_chain_maps(f: &ChainMap, g: &ChainMap) -> Result<ChainMap, FreecatError> {
    if g.target != f.source {
        return Err(FreecatError::NotComposable);
    }
    let limit = f.reliable_degree().min(g.reliable_degree());
    let mut components = BTreeMap::new();
    for n in 0..=limit {
        let c = compose(&f.component(n), &g.component(n))?;
        if !c.is_zero() || g.source.terms.contains_key(&n) {
            components.insert(n, c);
        }
    }
    Ok(ChainMap { source: g.source.clone(), target: f.target.clone(), components })
}

/// Are two chain maps equal in every reliable degree?
pub fn chain_maps_equal(f: &ChainMap, g: &ChainMap) -> Result<bool, FreecatError> {
    if f.source.terms != g.source.terms || f.target.terms != g.target.terms {
        return Err(FreecatError::ShapeMismatch { context: "chain map comparison".into() });
    }
    let limit = f.reliable_degree().min(g.reliable_degree());
    for n in 0..=limit {
        if !is_equal(&f.component(n), &g.component(n))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A degree `+1` collection of maps `h_n: source_n -> target_{n + 1}`
/// between two complexes with the same endpoints as some pair of chain maps.
#[derive(Clone, Debug, PartialEq)]
pub struct Homotopy {
    pub source: Rc<ChainComplex>,
    pub target: Rc<ChainComplex>,
    pub components: BTreeMap<u32, FreeMorphism>,
}

impl Homotopy {
    pub fn component(&self, n: u32) -> FreeMorphism {
        self.components
            .get(&n)
            .cloned()
            .unwrap_or_else(|| FreeMorphism::zero(self.source.term(n), self.target.term(n + 1)))
    }
}

/// Checks `d . h + h . d = f - g` degreewise, in every degree where all
/// participating terms are reliable. `f` and `g` must go from
/// `h.source` to `h.target`.
pub fn verify_homotopy(
    h: &Homotopy,
    f: &ChainMap,
    g: &ChainMap,
) -> Result<ValidationReport, FreecatError> {
    let mut rep = ValidationReport::new();
    if f.source.terms != h.source.terms
        || g.source.terms != h.source.terms
        || f.target.terms != h.target.terms
        || g.target.terms != h.target.terms
    {
        return Err(FreecatError::ShapeMismatch { context: "verify_homotopy".into() });
    }
    // In degree n the relation uses h_n (into degree n + 1) and the
    // differential from degree n + 1, so under truncation reliability must
    // extend one degree further; complete complexes determine everything.
    let limit = match (h.source.truncation_bound, h.target.truncation_bound) {
        (None, None) => h.source.top_degree().max(h.target.top_degree()),
        _ => degree_cap(&h.source, &h.target).saturating_sub(1),
    };
    for n in 0..=limit {
        let dh = compose(&h.target.differential(n + 1), &h.component(n))?;
        let hd = if n == 0 {
            FreeMorphism::zero(h.source.term(0), h.target.term(0))
        } else {
            compose(&h.component(n - 1), &h.source.differential(n))?
        };
        let lhs = add(&dh, &hd)?;
        let rhs = sub(&f.component(n), &g.component(n))?;
        if !is_equal(&lhs, &rhs)? {
            rep.push("homotopy", format!("degree {n}: d.h + h.d differs from f - g"));
        }
    }
    Ok(rep)
}

/// Validates that all morphism entries of a complex, map, or homotopy refer
/// to generators that exist in the table.
pub fn validate_entries_against_table(
    table: &ArrowTable,
    morphisms: impl IntoIterator<Item = FreeMorphism>,
) -> ValidationReport {
    let mut rep = ValidationReport::new();
    for m in morphisms {
        rep.merge(crate::freecat::validate_morphism(table, &m));
    }
    rep
}
