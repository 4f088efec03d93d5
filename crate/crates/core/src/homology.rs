//! Realizations of chain complexes in finitely generated free abelian
//! groups, Smith normal form over arbitrary-precision integers, and
//! homology groups.
//!
//! A realization assigns a free abelian group to every class label and an
//! integer matrix to every covering arrow of the stratum poset; longer
//! descents compose along any face path, which is well defined exactly when
//! the assignment is path independent. Checking independence on the
//! two-step diamonds suffices: any two descending face paths with the same
//! endpoints differ by a sequence of adjacent swaps, because iterated faces
//! are deletions of vertex subsets and reorderings of a deletion sequence
//! are generated by transpositions.
//!
//! The constant realization (every rank one, every matrix the identity)
//! turns a covering complex into the simplicial chain complex of the dual
//! complex, so its homology is ordinary dual-complex homology.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::builders::BuiltComplex;
use crate::freecat::{ArrowTable, ClassLabel};
use crate::report::ValidationReport;
use crate::strata::{StratifiedComplex, StratumId};

/// Dense integer matrix, stored by rows.
pub type IntegerMatrix = Vec<Vec<BigInt>>;

/// Builds an [`IntegerMatrix`] from machine-integer rows.
pub fn int_matrix(rows: &[Vec<i64>]) -> IntegerMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn identity_matrix(n: usize) -> IntegerMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn zero_matrix(rows: usize, cols: usize) -> IntegerMatrix {
    vec![vec![BigInt::zero(); cols]; rows]
}

pub fn matrix_shape(m: &IntegerMatrix) -> (usize, usize) {
    (m.len(), m.first().map_or(0, Vec::len))
}

pub fn matrix_mul(a: &IntegerMatrix, b: &IntegerMatrix) -> IntegerMatrix {
    let (ar, ac) = matrix_shape(a);
    let (br, bc) = matrix_shape(b);
    assert_eq!(ac, br, "matrix product shape mismatch");
    let mut out = zero_matrix(ar, bc);
    for i in 0..ar {
        for k in 0..ac {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..bc {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn matrix_is_zero(m: &IntegerMatrix) -> bool {
    m.iter().all(|r| r.iter().all(Zero::is_zero))
}

/// Signed determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntegerMatrix) -> BigInt {
    let (r, c) = matrix_shape(m);
    assert_eq!(r, c, "determinant of a non-square matrix");
    if r == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..r - 1 {
        if a[k][k].is_zero() {
            match (k + 1..r).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..r {
            for j in k + 1..r {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * a[r - 1][r - 1].clone()
}

/// A Smith decomposition `u * m * v = s` with `u`, `v` unimodular and `s`
/// diagonal, nonnegative, each entry dividing the next.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntegerMatrix,
    pub s: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithDecomposition {
    /// The nonzero diagonal entries, in divisibility order.
    pub fn invariant_factors(&self) -> Vec<BigUint> {
        let (r, c) = matrix_shape(&self.s);
        (0..r.min(c))
            .map(|i| &self.s[i][i])
            .filter(|d| !d.is_zero())
            .map(|d| d.magnitude().clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Smith normal form by alternating row and column reduction with the
/// divisibility repair step. Row operations accumulate in `u`, column
/// operations in `v`, keeping `u * m * v = s` at every step.
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithDecomposition {
    let (rows, cols) = matrix_shape(m);
    let mut s = m.clone();
    let mut u = identity_matrix(rows);
    let mut v = identity_matrix(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !s[i][j].is_zero())
            .min_by_key(|&(i, j)| s[i][j].magnitude().clone());
        let Some((pi, pj)) = pivot else { break };
        if pi != t {
            s.swap(pi, t);
            u.swap(pi, t);
        }
        if pj != t {
            for row in s.iter_mut() {
                row.swap(pj, t);
            }
            for row in v.iter_mut() {
                row.swap(pj, t);
            }
        }
        loop {
            // Clear column t below the pivot.
            let mut dirty = false;
            for i in t + 1..rows {
                if s[i][t].is_zero() {
                    continue;
                }
                let q = &s[i][t] / &s[t][t];
                if !q.is_zero() {
                    for j in 0..cols {
                        let x = &s[t][j] * &q;
                        s[i][j] -= x;
                    }
                    for j in 0..rows {
                        let x = &u[t][j] * &q;
                        u[i][j] -= x;
                    }
                }
                if !s[i][t].is_zero() {
                    s.swap(i, t);
                    u.swap(i, t);
                    dirty = true;
                }
            }
            // Clear row t past the pivot.
            for j in t + 1..cols {
                if s[t][j].is_zero() {
                    continue;
                }
                let q = &s[t][j] / &s[t][t];
                if !q.is_zero() {
                    for i in 0..rows {
                        let x = &s[i][t] * &q;
                        s[i][j] -= x;
                    }
                    for i in 0..cols {
                        let x = &v[i][t] * &q;
                        v[i][j] -= x;
                    }
                }
                if !s[t][j].is_zero() {
                    for row in s.iter_mut() {
                        row.swap(j, t);
                    }
                    for row in v.iter_mut() {
                        row.swap(j, t);
                    }
                    dirty = true;
                }
            }
            if !dirty && (t + 1..rows).all(|i| s[i][t].is_zero()) {
                break;
            }
        }
        // Divisibility repair: fold a bad entry into column t and redo.
        let bad = (t + 1..rows)
            .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
            .find(|&(i, j)| !(&s[i][j] % &s[t][t]).is_zero());
        if let Some((_, j)) = bad {
            for i in 0..rows {
                let x = s[i][j].clone();
                s[i][t] += x;
            }
            for i in 0..cols {
                let x = v[i][j].clone();
                v[i][t] += x;
            }
            continue;
        }
        if s[t][t].is_negative() {
            for j in 0..cols {
                s[t][j] = -s[t][j].clone();
            }
            for j in 0..rows {
                u[t][j] = -u[t][j].clone();
            }
        }
        t += 1;
    }
    SmithDecomposition { u, s, v }
}

/// Free abelian realization data: a rank per class label and a matrix per
/// covering arrow of the stratum poset, written on (source id, face id)
/// pairs with source one codimension above the face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianRealization {
    pub ranks: BTreeMap<ClassLabel, usize>,
    pub matrices: BTreeMap<(StratumId, StratumId), IntegerMatrix>,
}

impl AbelianRealization {
    /// Rank one everywhere, identity on every covering arrow: realizes the
    /// simplicial chains of the dual complex.
    pub fn constant(c: &StratifiedComplex) -> Self {
        let mut ranks = BTreeMap::new();
        for st in c.strata() {
            ranks.insert(st.class.clone(), 1);
        }
        let mut matrices = BTreeMap::new();
        for s in 0..c.strata().len() {
            for &f in c.face_indices(s) {
                matrices.insert(
                    (c.stratum(s).id.clone(), c.stratum(f).id.clone()),
                    identity_matrix(1),
                );
            }
        }
        AbelianRealization { ranks, matrices }
    }

    fn rank_of(&self, label: &ClassLabel) -> Option<usize> {
        self.ranks.get(label).copied()
    }
}

/// Checks completeness, shapes, and path independence of a realization on
/// one complex. Path independence is checked on every two-step diamond;
/// see the module doc for why that is exhaustive.
pub fn validate_realization(c: &StratifiedComplex, r: &AbelianRealization) -> ValidationReport {
    let mut rep = ValidationReport::new();
    for st in c.strata() {
        if r.rank_of(&st.class).is_none() {
            rep.push("missing-rank", format!("no rank for class {} of stratum {}", st.class, st.id));
        }
    }
    if !rep.is_valid() {
        return rep;
    }
    for s in 0..c.strata().len() {
        for &f in c.face_indices(s) {
            let key = (c.stratum(s).id.clone(), c.stratum(f).id.clone());
            match r.matrices.get(&key) {
                None => rep.push(
                    "missing-matrix",
                    format!("no matrix for the arrow {} -> {}", key.0, key.1),
                ),
                Some(m) => {
                    let want = (
                        r.rank_of(&c.stratum(f).class).unwrap(),
                        r.rank_of(&c.stratum(s).class).unwrap(),
                    );
                    if matrix_shape(m) != want {
                        rep.push(
                            "shape",
                            format!(
                                "matrix for {} -> {} has shape {:?}, expected {:?}",
                                key.0,
                                key.1,
                                matrix_shape(m),
                                want
                            ),
                        );
                    }
                }
            }
        }
    }
    if !rep.is_valid() {
        return rep;
    }
    let arrow = |a: usize, b: usize| {
        r.matrices[&(c.stratum(a).id.clone(), c.stratum(b).id.clone())].clone()
    };
    for s in 0..c.strata().len() {
        let faces = c.face_indices(s);
        if faces.is_empty() || c.face_indices(faces[0]).is_empty() {
            continue;
        }
        for i in 0..faces.len() {
            for j in i + 1..faces.len() {
                // Deleting position j then i lands where deleting i then
                // j - 1 does; compare the two composites.
                let via_j = matrix_mul(&arrow(faces[j], c.face_indices(faces[j])[i]), &arrow(s, faces[j]));
                let via_i = matrix_mul(&arrow(faces[i], c.face_indices(faces[i])[j - 1]), &arrow(s, faces[i]));
                if via_j != via_i {
                    rep.push(
                        "path-independence",
                        format!(
                            "the two descents from {} through faces {} and {} to their common subface disagree",
                            c.stratum(s).id,
                            c.stratum(faces[i]).id,
                            c.stratum(faces[j]).id
                        ),
                    );
                }
            }
        }
    }
    rep
}

/// A chain complex of free abelian groups with integer differentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerChainComplex {
    pub ranks: BTreeMap<u32, usize>,
    /// `differentials[n]` maps degree `n` to degree `n - 1`; shape
    /// `ranks[n - 1]` rows by `ranks[n]` columns.
    pub differentials: BTreeMap<u32, IntegerMatrix>,
}

impl IntegerChainComplex {
    pub fn rank(&self, n: u32) -> usize {
        self.ranks.get(&n).copied().unwrap_or(0)
    }

    pub fn differential(&self, n: u32) -> IntegerMatrix {
        self.differentials
            .get(&n)
            .cloned()
            .unwrap_or_else(|| zero_matrix(self.rank(n.wrapping_sub(1)), self.rank(n)))
    }

    pub fn top_degree(&self) -> u32 {
        self.ranks.keys().next_back().copied().unwrap_or(0)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::new();
        for (&n, d) in &self.differentials {
            if n == 0 {
                rep.push("degree-zero", "differential out of degree 0".to_string());
                continue;
            }
            let want = (self.rank(n - 1), self.rank(n));
            if matrix_shape(d) != want {
                rep.push(
                    "shape",
                    format!("d_{n} has shape {:?}, expected {:?}", matrix_shape(d), want),
                );
            }
        }
        if !rep.is_valid() {
            return rep;
        }
        for n in 2..=self.top_degree() {
            if !matrix_is_zero(&matrix_mul(&self.differential(n - 1), &self.differential(n))) {
                rep.push("square", format!("d_{} . d_{} is nonzero", n - 1, n));
            }
        }
        rep
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks
            .iter()
            .map(|(&n, &r)| if n % 2 == 0 { r as i64 } else { -(r as i64) })
            .sum()
    }
}

/// Errors from [`realize`].
#[derive(Debug)]
pub enum RealizeError {
    Invalid { report: ValidationReport },
    SquareNonzero { degree: u32 },
}

impl fmt::Display for RealizeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealizeError::Invalid { report } => write!(f, "invalid realization:\n{report}"),
            RealizeError::SquareNonzero { degree } => {
                write!(f, "realized differentials fail d . d = 0 at degree {degree}")
            }
        }
    }
}

impl std::error::Error for RealizeError {}

/// Replaces each generator entry of the built complex's differentials by
/// `coefficient x composed matrix`, the composition running along any face
/// path between the support strata (path independence is validated first).
pub fn realize(
    table: &ArrowTable,
    b: &BuiltComplex,
    r: &AbelianRealization,
) -> Result<IntegerChainComplex, RealizeError> {
    let c = table.complex(b.handle);
    let report = validate_realization(c, r);
    if !report.is_valid() {
        return Err(RealizeError::Invalid { report });
    }
    let rank_of = |s: usize| r.ranks[&c.stratum(s).class];
    let mut composites: HashMap<(usize, usize), IntegerMatrix> = HashMap::new();
    fn composite(
        c: &StratifiedComplex,
        r: &AbelianRealization,
        memo: &mut HashMap<(usize, usize), IntegerMatrix>,
        from: usize,
        to: usize,
    ) -> IntegerMatrix {
        if from == to {
            return identity_matrix(r.ranks[&c.stratum(from).class]);
        }
        if let Some(m) = memo.get(&(from, to)) {
            return m.clone();
        }
        let step = *c
            .face_indices(from)
            .iter()
            .find(|&&f| c.leq(to, f))
            .expect("a face toward every smaller stratum exists");
        let first = r.matrices[&(c.stratum(from).id.clone(), c.stratum(step).id.clone())].clone();
        let rest = composite(c, r, memo, step, to);
        let m = matrix_mul(&rest, &first);
        memo.insert((from, to), m.clone());
        m
    }

    let mut ranks = BTreeMap::new();
    let mut block_starts: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (&n, list) in &b.keys {
        let mut starts = Vec::with_capacity(list.len());
        let mut total = 0;
        for key in list {
            starts.push(total);
            total += rank_of(b.support_node(key).stratum);
        }
        ranks.insert(n, total);
        block_starts.insert(n, starts);
    }
    let mut differentials = BTreeMap::new();
    for n in 1..=b.complex.top_degree() {
        let rows = ranks.get(&(n - 1)).copied().unwrap_or(0);
        let cols = ranks.get(&n).copied().unwrap_or(0);
        let mut d = zero_matrix(rows, cols);
        let empty = vec![];
        let col_keys = b.keys.get(&n).unwrap_or(&empty);
        let row_starts = block_starts.get(&(n - 1)).cloned().unwrap_or_default();
        let col_starts = block_starts.get(&n).cloned().unwrap_or_default();
        for (&(i, j), &coeff) in b.complex.differential(n).entries() {
            let src = b.support_node(&col_keys[j as usize]).stratum;
            let tgt = b.support_node(&b.keys[&(n - 1)][i as usize]).stratum;
            let block = composite(c, r, &mut composites, src, tgt);
            let (br, bc) = matrix_shape(&block);
            for bi in 0..br {
                for bj in 0..bc {
                    if !block[bi][bj].is_zero() {
                        d[row_starts[i as usize] + bi][col_starts[j as usize] + bj] +=
                            &block[bi][bj] * coeff;
                    }
                }
            }
        }
        differentials.insert(n, d);
    }
    let out = IntegerChainComplex { ranks, differentials };
    for n in 2..=out.top_degree() {
        if !matrix_is_zero(&matrix_mul(&out.differential(n - 1), &out.differential(n))) {
            return Err(RealizeError::SquareNonzero { degree: n });
        }
    }
    Ok(out)
}

/// One homology group, presented as free rank plus torsion coefficients in
/// divisibility order (entries greater than one).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyGroup {
    pub betti: usize,
    pub torsion: Vec<BigUint>,
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = match self.betti {
            0 => vec![],
            1 => vec!["Z".to_string()],
            b => vec![format!("Z^{b}")],
        };
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Homology in every degree `0..=top`: `H_n = ker d_n / im d_{n + 1}`,
/// with the free rank from a rank count and the torsion from the invariant
/// factors of the incoming differential.
pub fn homology_groups(c: &IntegerChainComplex) -> BTreeMap<u32, HomologyGroup> {
    let mut rank_of_d: BTreeMap<u32, usize> = BTreeMap::new();
    let mut torsion_of_d: BTreeMap<u32, Vec<BigUint>> = BTreeMap::new();
    for n in 1..=c.top_degree() {
        let snf = smith_normal_form(&c.differential(n));
        torsion_of_d
            .insert(n, snf.invariant_factors().into_iter().filter(|f| !f.is_one()).collect());
        rank_of_d.insert(n, snf.rank());
    }
    let mut out = BTreeMap::new();
    for n in 0..=c.top_degree() {
        let incoming = rank_of_d.get(&(n + 1)).copied().unwrap_or(0);
        let outgoing = rank_of_d.get(&n).copied().unwrap_or(0);
        let betti = c.rank(n) - outgoing - incoming;
        let torsion = torsion_of_d.get(&(n + 1)).cloned().unwrap_or_default();
        out.insert(n, HomologyGroup { betti, torsion });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_cech, BuildMode};
    use crate::freecat::ClassLabel;
    use crate::strata::{
        BaseTag, ComplexSpec, Stratum, StratumFlags, Vertex, VertexId, VertexOrder,
    };

    fn check_snf(m: &IntegerMatrix) -> SmithDecomposition {
        let d = smith_normal_form(m);
        assert_eq!(matrix_mul(&matrix_mul(&d.u, m), &d.v), d.s, "u m v differs from s");
        assert_eq!(determinant(&d.u).magnitude(), &BigUint::one());
        assert_eq!(determinant(&d.v).magnitude(), &BigUint::one());
        let f = d.invariant_factors();
        for w in f.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "invariant factors must divide in order");
        }
        d
    }

    #[test]
    fn smith_normal_form_oracles() {
        let d = check_snf(&int_matrix(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(d.invariant_factors(), vec![BigUint::from(1u32), BigUint::from(6u32)]);
        let d = check_snf(&identity_matrix(3));
        assert_eq!(d.invariant_factors(), vec![BigUint::one(); 3]);
        let d = check_snf(&zero_matrix(2, 3));
        assert!(d.invariant_factors().is_empty());
        let d = check_snf(&int_matrix(&[vec![4, 6, 2], vec![6, 12, 6], vec![2, 6, 7]]));
        assert_eq!(matrix_shape(&d.s), (3, 3));
        let d = check_snf(&int_matrix(&[vec![1, 2, 3], vec![4, 5, 6]]));
        assert_eq!(d.rank(), 2);
    }

    #[test]
    fn determinant_oracles() {
        assert_eq!(determinant(&identity_matrix(4)), BigInt::one());
        assert_eq!(determinant(&int_matrix(&[vec![1, 1], vec![0, 5]])), BigInt::from(5));
        assert_eq!(determinant(&int_matrix(&[vec![0, 1], vec![1, 0]])), BigInt::from(-1));
        assert_eq!(
            determinant(&int_matrix(&[vec![2, 0, 1], vec![1, 3, 2], vec![0, 1, 4]])),
            BigInt::from(21)
        );
    }

    fn edge() -> (crate::freecat::ArrowTable, crate::freecat::ComplexHandle) {
        let v = |s: &str| VertexId(s.to_string());
        let t = |s: &str| StratumId(s.to_string());
        let l = |s: &str| ClassLabel(s.to_string());
        let c = crate::strata::StratifiedComplex::new(ComplexSpec {
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
        let mut table = crate::freecat::ArrowTable::new();
        let h = table.register_complex(c);
        (table, h)
    }

    #[test]
    fn constant_realization_of_edge() {
        let (table, h) = edge();
        let cech = build_cech(&table, h, BuildMode::Bounded);
        let r = AbelianRealization::constant(table.complex(h));
        let z = realize(&table, &cech, &r).unwrap();
        z.validate().expect_valid("realized complex");
        assert_eq!(z.rank(0), 2);
        assert_eq!(z.rank(1), 1);
        assert_eq!(z.euler_characteristic(), 1);
        let h_groups = homology_groups(&z);
        assert_eq!(h_groups[&0], HomologyGroup { betti: 1, torsion: vec![] });
        assert_eq!(h_groups[&1], HomologyGroup { betti: 0, torsion: vec![] });
    }

    #[test]
    fn zero_rank_realization() {
        let (table, h) = edge();
        let cech = build_cech(&table, h, BuildMode::Bounded);
        let mut r = AbelianRealization::constant(table.complex(h));
        for (_, rank) in r.ranks.iter_mut() {
            *rank = 0;
        }
        for (_, m) in r.matrices.iter_mut() {
            *m = zero_matrix(0, 0);
        }
        let z = realize(&table, &cech, &r).unwrap();
        assert_eq!(z.rank(0), 0);
        assert_eq!(z.rank(1), 0);
    }

    #[test]
    fn torsion_from_a_doubling_differential() {
        let z = IntegerChainComplex {
            ranks: [(0, 1), (1, 1)].into_iter().collect(),
            differentials: [(1, int_matrix(&[vec![2]]))].into_iter().collect(),
        };
        z.validate().expect_valid("doubling complex");
        let h = homology_groups(&z);
        assert_eq!(h[&0], HomologyGroup { betti: 0, torsion: vec![BigUint::from(2u32)] });
        assert_eq!(h[&1], HomologyGroup { betti: 0, torsion: vec![] });
    }

    /// A filled triangle: three divisors with all pairwise and the triple
    /// intersection.
    fn filled_triangle() -> (crate::freecat::ArrowTable, crate::freecat::ComplexHandle) {
        let v = |s: &str| VertexId(s.to_string());
        let t = |s: &str| StratumId(s.to_string());
        let l = |s: &str| ClassLabel(s.to_string());
        let mk = |id: &str, vs: &[&str], fs: &[&str]| Stratum {
            id: t(id),
            vertices: vs.iter().map(|x| v(x)).collect(),
            faces: fs.iter().map(|x| t(x)).collect(),
            class: l(id),
            flags: StratumFlags::default(),
        };
        let c = crate::strata::StratifiedComplex::new(ComplexSpec {
            name: "filled-triangle".into(),
            base: BaseTag::K,
            vertices: vec![
                Vertex { id: v("X"), order: VertexOrder::Rank(0) },
                Vertex { id: v("Y"), order: VertexOrder::Rank(1) },
                Vertex { id: v("Z"), order: VertexOrder::Rank(2) },
            ],
            strata: vec![
                mk("X", &["X"], &[]),
                mk("Y", &["Y"], &[]),
                mk("Z", &["Z"], &[]),
                mk("XY", &["X", "Y"], &["Y", "X"]),
                mk("XZ", &["X", "Z"], &["Z", "X"]),
                mk("YZ", &["Y", "Z"], &["Z", "Y"]),
                mk("XYZ", &["X", "Y", "Z"], &["YZ", "XZ", "XY"]),
            ],
        })
        .unwrap();
        let mut table = crate::freecat::ArrowTable::new();
        let h = table.register_complex(c);
        (table, h)
    }

    #[test]
    fn path_dependence_is_rejected_with_witness() {
        let (table, h) = filled_triangle();
        let c = table.complex(h);
        let mut r = AbelianRealization::constant(c);
        // Sabotage one arrow of a diamond: XYZ -> XY -> X now disagrees
        // with XYZ -> XZ -> X.
        r.matrices.insert(
            (StratumId("XY".into()), StratumId("X".into())),
            int_matrix(&[vec![-1]]),
        );
        let report = validate_realization(c, &r);
        assert!(!report.is_valid());
        let text = report.to_string();
        assert!(text.contains("path-independence"), "unexpected report: {text}");
        assert!(text.contains("XYZ"), "witness names the top stratum: {text}");
        let cech = build_cech(&table, h, BuildMode::Bounded);
        assert!(matches!(realize(&table, &cech, &r), Err(RealizeError::Invalid { .. })));
    }

    #[test]
    fn filled_triangle_is_contractible() {
        let (table, h) = filled_triangle();
        let cech = build_cech(&table, h, BuildMode::Bounded);
        let r = AbelianRealization::constant(table.complex(h));
        let z = realize(&table, &cech, &r).unwrap();
        let groups = homology_groups(&z);
        assert_eq!(groups[&0], HomologyGroup { betti: 1, torsion: vec![] });
        assert_eq!(groups[&1], HomologyGroup { betti: 0, torsion: vec![] });
        assert_eq!(groups[&2], HomologyGroup { betti: 0, torsion: vec![] });
    }
}
