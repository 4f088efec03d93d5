//! Cone complexes with lattice data: multiplicities, smoothness,
//! barycenters, star subdivision at a chosen interior lattice point, and
//! resolution to a smooth complex.
//!
//! Each stratum carries its own reference lattice; there is no shared
//! ambient space. A cone is a full-column-rank integer matrix of primitive
//! ray generators, one per letter of the stratum's word, and every face
//! relation carries an explicit lattice map embedding the face's lattice so
//! that its rays land on the matching ray columns. Embeddings are required
//! to have saturated image (all invariant factors one): that keeps
//! primitive vectors primitive and lets resolution points found inside a
//! big cone be rewritten exactly in the coordinates of the face that
//! supports them.
//!
//! The resolution loop repeatedly picks a cone of maximal multiplicity,
//! enumerates the nonzero lattice points of its half-open fundamental
//! parallelepiped through the Smith decomposition of the ray matrix, picks
//! the point with the smallest barycentric coordinate sum (ties broken by
//! lexicographic comparison of the ambient vector), and stars at the face
//! supporting that point. Every new cone's multiplicity divides the
//! multiplicity of a cone it subdivides, strictly dropping at the top, so
//! the pair (maximal multiplicity, number of cones attaining it) strictly
//! decreases lexicographically; the loop asserts that measure.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::freecat::{ArrowTable, ComplexHandle};
use crate::homology::{
    determinant, identity_matrix, matrix_mul, matrix_shape, smith_normal_form, IntegerMatrix,
};
use crate::report::ValidationReport;
use crate::strata::{StratifiedComplex, StratumId};
use crate::subdivide::{star_subdivide, Provenance, SubdivideError, SubdivisionResult};

/// Row-major integer matrix with machine entries.
pub type ConeMatrix = Vec<Vec<i64>>;

/// Lattice data for one stratum: a reference lattice of rank
/// `ambient_dim`, one primitive ray per word letter, and the lattice map
/// of each face into this cone's lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeCone {
    pub id: StratumId,
    pub ambient_dim: usize,
    /// `rays[i]` generates the ray of the i-th word letter; length
    /// `ambient_dim` each.
    pub rays: Vec<Vec<i64>>,
    /// Face id -> matrix with `ambient_dim` rows mapping the face's
    /// lattice in, carrying the face's rays onto the matching columns.
    pub face_embeddings: BTreeMap<StratumId, ConeMatrix>,
}

/// One cone per stratum, in stratum order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeConeComplex {
    pub cones: Vec<LatticeCone>,
}

impl LatticeConeComplex {
    pub fn cone(&self, s: usize) -> &LatticeCone {
        &self.cones[s]
    }
}

#[derive(Debug)]
pub enum LatticeError {
    NotSimplicial { id: StratumId },
    Invalid { report: ValidationReport },
    UnknownCone { id: StratumId },
    DimensionMismatch { id: StratumId, expected: usize, got: usize },
    NotPrimitive { id: StratumId },
    NotInterior { id: StratumId },
    Subdivide(SubdivideError),
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::NotSimplicial { id } => {
                write!(f, "cone {id} is not simplicial (rays are not independent)")
            }
            LatticeError::Invalid { report } => write!(f, "invalid cone complex:\n{report}"),
            LatticeError::UnknownCone { id } => write!(f, "no cone named {id}"),
            LatticeError::DimensionMismatch { id, expected, got } => {
                write!(f, "vector for {id} has {got} coordinates, its lattice has rank {expected}")
            }
            LatticeError::NotPrimitive { id } => {
                write!(f, "subdivision vector for {id} is not primitive")
            }
            LatticeError::NotInterior { id } => {
                write!(f, "subdivision vector is not in the interior of {id}")
            }
            LatticeError::Subdivide(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LatticeError {}

impl From<SubdivideError> for LatticeError {
    fn from(e: SubdivideError) -> Self {
        LatticeError::Subdivide(e)
    }
}

fn big_rows(m: &[Vec<i64>]) -> IntegerMatrix {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Ray matrix of a cone: `ambient_dim` rows, one column per ray.
fn ray_matrix(cone: &LatticeCone) -> IntegerMatrix {
    for ray in &cone.rays {
        assert_eq!(ray.len(), cone.ambient_dim, "ray length differs from the lattice rank");
    }
    (0..cone.ambient_dim)
        .map(|r| cone.rays.iter().map(|ray| BigInt::from(ray[r])).collect())
        .collect()
}

fn transpose(m: &IntegerMatrix) -> IntegerMatrix {
    let (rows, cols) = matrix_shape(m);
    (0..cols).map(|j| (0..rows).map(|i| m[i][j].clone()).collect()).collect()
}

fn mat_vec(m: &IntegerMatrix, v: &[BigInt]) -> Vec<BigInt> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn to_i64(x: &BigInt) -> i64 {
    i64::try_from(x).expect("lattice coordinate fits a machine integer")
}

fn i64_gcd(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |a, &b| a.gcd(&b))
}

/// Index of the subgroup the rays generate inside the saturation of their
/// span: the product of the invariant factors of the ray matrix.
pub fn multiplicity(cone: &LatticeCone) -> Result<u64, LatticeError> {
    let k = cone.rays.len();
    if k > cone.ambient_dim {
        return Err(LatticeError::NotSimplicial { id: cone.id.clone() });
    }
    let factors = smith_normal_form(&ray_matrix(cone)).invariant_factors();
    if factors.len() < k {
        return Err(LatticeError::NotSimplicial { id: cone.id.clone() });
    }
    let product = factors.iter().fold(num_bigint::BigUint::one(), |a, f| a * f);
    Ok(u64::try_from(product).expect("multiplicity fits a machine integer"))
}

/// Returns the first cone of multiplicity above one, or `None` when every
/// cone is smooth.
pub fn is_smooth(cc: &LatticeConeComplex) -> Result<Option<StratumId>, LatticeError> {
    for cone in &cc.cones {
        if multiplicity(cone)? != 1 {
            return Ok(Some(cone.id.clone()));
        }
    }
    Ok(None)
}

/// The primitive generator of the ray through the sum of the cone's rays.
pub fn barycenter(cone: &LatticeCone) -> Vec<i64> {
    let mut sum = vec![0i64; cone.ambient_dim];
    for ray in &cone.rays {
        for (s, &x) in sum.iter_mut().zip(ray) {
            *s += x;
        }
    }
    let g = i64_gcd(&sum);
    debug_assert!(g > 0, "independent rays cannot sum to zero");
    if g > 1 {
        for s in sum.iter_mut() {
            *s /= g;
        }
    }
    sum
}

/// The smooth decoration: each stratum gets the standard cone in its own
/// rank-codim lattice, faces embed by inserting a zero coordinate at the
/// deleted letter.
pub fn standard_cones(c: &StratifiedComplex) -> LatticeConeComplex {
    let mut cones = Vec::new();
    for s in 0..c.strata().len() {
        let k = c.codim(s);
        let rays = (0..k)
            .map(|i| (0..k).map(|r| if r == i { 1 } else { 0 }).collect())
            .collect();
        let mut face_embeddings = BTreeMap::new();
        for (j, &f) in c.face_indices(s).iter().enumerate() {
            let mut m = vec![vec![0i64; k - 1]; k];
            for (i, row) in (0..k).filter(|&r| r != j).enumerate() {
                m[row][i] = 1;
            }
            face_embeddings.insert(c.stratum(f).id.clone(), m);
        }
        cones.push(LatticeCone {
            id: c.stratum(s).id.clone(),
            ambient_dim: k,
            rays,
            face_embeddings,
        });
    }
    LatticeConeComplex { cones }
}

/// Cone complex over one shared lattice: every stratum's cone selects the
/// rays of its word letters from `vertex_rays`, and every embedding is the
/// identity. Suits a fan fragment whose strata all see the same ambient
/// torus.
pub fn shared_ambient_cones(
    c: &StratifiedComplex,
    ambient_dim: usize,
    vertex_rays: &[Vec<i64>],
) -> LatticeConeComplex {
    assert_eq!(vertex_rays.len(), c.vertices().len(), "one ray per vertex");
    let ident: ConeMatrix = (0..ambient_dim)
        .map(|i| (0..ambient_dim).map(|j| if i == j { 1 } else { 0 }).collect())
        .collect();
    let mut cones = Vec::new();
    for s in 0..c.strata().len() {
        let rays = c.word(s).iter().map(|&v| vertex_rays[v].clone()).collect();
        let mut face_embeddings = BTreeMap::new();
        for &f in c.face_indices(s) {
            face_embeddings.insert(c.stratum(f).id.clone(), ident.clone());
        }
        cones.push(LatticeCone {
            id: c.stratum(s).id.clone(),
            ambient_dim,
            rays,
            face_embeddings,
        });
    }
    LatticeConeComplex { cones }
}

/// Checks that the cone complex decorates the stratified complex
/// coherently: one cone per stratum in order, primitive independent rays
/// of the right count, and face embeddings that are present, positional on
/// rays, saturated, and path independent on two-step descents.
pub fn validate_cone_complex(c: &StratifiedComplex, cc: &LatticeConeComplex) -> ValidationReport {
    let mut rep = ValidationReport::new();
    if cc.cones.len() != c.strata().len() {
        rep.push(
            "mirror",
            format!("{} cones for {} strata", cc.cones.len(), c.strata().len()),
        );
        return rep;
    }
    for (s, cone) in cc.cones.iter().enumerate() {
        if cone.id != c.stratum(s).id {
            rep.push(
                "mirror",
                format!("cone {} sits at the position of stratum {}", cone.id, c.stratum(s).id),
            );
        }
    }
    if !rep.is_valid() {
        return rep;
    }
    for (s, cone) in cc.cones.iter().enumerate() {
        if cone.rays.len() != c.codim(s) {
            rep.push(
                "ray-count",
                format!(
                    "cone {} has {} rays for a word of length {}",
                    cone.id,
                    cone.rays.len(),
                    c.codim(s)
                ),
            );
            continue;
        }
        if cone.rays.len() > cone.ambient_dim {
            rep.push(
                "ambient",
                format!("cone {} has more rays than its lattice rank", cone.id),
            );
            continue;
        }
        for (i, ray) in cone.rays.iter().enumerate() {
            if ray.len() != cone.ambient_dim {
                rep.push(
                    "ray-dim",
                    format!("ray {i} of cone {} has the wrong length", cone.id),
                );
                return rep;
            }
            if i64_gcd(ray) != 1 {
                rep.push("primitive", format!("ray {i} of cone {} is not primitive", cone.id));
            }
        }
        let rank = smith_normal_form(&ray_matrix(cone)).rank();
        if rank < cone.rays.len() {
            rep.push("rank", format!("rays of cone {} are linearly dependent", cone.id));
        }
    }
    if !rep.is_valid() {
        return rep;
    }
    for (s, cone) in cc.cones.iter().enumerate() {
        for (j, &f) in c.face_indices(s).iter().enumerate() {
            let fid = &c.stratum(f).id;
            let face = &cc.cones[f];
            let Some(emb) = cone.face_embeddings.get(fid) else {
                rep.push(
                    "embedding-missing",
                    format!("cone {} has no embedding for its face {}", cone.id, fid),
                );
                continue;
            };
            let shape = (emb.len(), emb.first().map_or(0, Vec::len));
            if shape != (cone.ambient_dim, face.ambient_dim)
                || emb.iter().any(|row| row.len() != face.ambient_dim)
            {
                rep.push(
                    "embedding-shape",
                    format!(
                        "embedding of {} into {} has shape {:?}, expected ({}, {})",
                        fid, cone.id, shape, cone.ambient_dim, face.ambient_dim
                    ),
                );
                continue;
            }
            let emb_big = big_rows(emb);
            for (i, ray) in face.rays.iter().enumerate() {
                let target = if i < j { i } else { i + 1 };
                let image = mat_vec(&emb_big, &big_rows(&[ray.clone()])[0]);
                let want: Vec<BigInt> =
                    cone.rays[target].iter().map(|&x| BigInt::from(x)).collect();
                if image != want {
                    rep.push(
                        "embedding-rays",
                        format!(
                            "embedding of {} into {} moves ray {i} off ray {target}",
                            fid, cone.id
                        ),
                    );
                }
            }
            let factors = smith_normal_form(&emb_big).invariant_factors();
            if factors.len() < face.ambient_dim {
                rep.push(
                    "embedding-rank",
                    format!("embedding of {} into {} is not injective", fid, cone.id),
                );
            } else if factors.iter().any(|d| !d.is_one()) {
                rep.push(
                    "embedding-saturated",
                    format!("embedding of {} into {} has unsaturated image", fid, cone.id),
                );
            }
        }
    }
    if !rep.is_valid() {
        return rep;
    }
    for (s, cone) in cc.cones.iter().enumerate() {
        let faces = c.face_indices(s);
        if faces.is_empty() || c.face_indices(faces[0]).is_empty() {
            continue;
        }
        let emb = |from: usize, to: usize| {
            big_rows(&cc.cones[from].face_embeddings[&c.stratum(to).id])
        };
        for i in 0..faces.len() {
            for j in i + 1..faces.len() {
                let via_j = matrix_mul(&emb(s, faces[j]), &emb(faces[j], c.face_indices(faces[j])[i]));
                let via_i =
                    matrix_mul(&emb(s, faces[i]), &emb(faces[i], c.face_indices(faces[i])[j - 1]));
                if via_j != via_i {
                    rep.push(
                        "embedding-coherence",
                        format!(
                            "embeddings into {} through {} and {} disagree on the common subface",
                            cone.id,
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

/// Composite face embedding `N_lower -> N_upper` along any descent path;
/// well defined once the complex validates.
fn composite_embedding(
    c: &StratifiedComplex,
    cc: &LatticeConeComplex,
    upper: usize,
    lower: usize,
) -> IntegerMatrix {
    if upper == lower {
        return identity_matrix(cc.cones[upper].ambient_dim);
    }
    let step = *c
        .face_indices(upper)
        .iter()
        .find(|&&f| c.leq(lower, f))
        .expect("a face toward every smaller stratum exists");
    let first = big_rows(&cc.cones[upper].face_embeddings[&c.stratum(step).id]);
    matrix_mul(&first, &composite_embedding(c, cc, step, lower))
}

/// Solves `rays * t = x` over the rationals through the Gram matrix:
/// returns numerators `n` and a positive denominator `d` with
/// `t_i = n_i / d`, or `None` when `x` lies outside the rays' span.
fn barycentric_solution(rays: &IntegerMatrix, x: &[BigInt]) -> Option<(Vec<BigInt>, BigInt)> {
    let rt = transpose(rays);
    let gram = matrix_mul(&rt, rays);
    let rhs = mat_vec(&rt, x);
    let d = determinant(&gram);
    debug_assert!(d.is_positive(), "independent rays have positive Gram determinant");
    let k = gram.len();
    let mut n = Vec::with_capacity(k);
    for i in 0..k {
        let mut gi = gram.clone();
        for (row, b) in gi.iter_mut().zip(&rhs) {
            row[i] = b.clone();
        }
        n.push(determinant(&gi));
    }
    let image = mat_vec(rays, &n);
    for (lhs, xi) in image.iter().zip(x) {
        if lhs != &(&d * xi) {
            return None;
        }
    }
    Some((n, d))
}

/// Inverse of a unimodular matrix, exactly: column `j` solves
/// `u * x = e_j` by Cramer, and the +-1 determinant folds into the
/// numerators.
fn unimodular_inverse(u: &IntegerMatrix) -> IntegerMatrix {
    let n = u.len();
    let det = determinant(u);
    debug_assert!(det.magnitude().is_one(), "inverse of a non-unimodular matrix");
    let mut inv = vec![vec![BigInt::zero(); n]; n];
    for j in 0..n {
        for i in 0..n {
            let mut ui = u.clone();
            for (r, row) in ui.iter_mut().enumerate() {
                row[i] = if r == j { BigInt::one() } else { BigInt::zero() };
            }
            inv[i][j] = determinant(&ui) * &det;
        }
    }
    inv
}

/// A nonzero lattice point of the half-open fundamental parallelepiped.
/// The numerators are barycentric coordinates over a denominator shared by
/// the whole cone (the Gram determinant), so comparing their sums compares
/// the coordinate sums.
struct ParallelepipedPoint {
    numerators: Vec<BigInt>,
    point: Vec<BigInt>,
}

/// All nonzero lattice points of `{sum t_i r_i : 0 <= t_i < 1}`: one per
/// nonzero residue of the saturation modulo the ray lattice, enumerated
/// through the Smith decomposition of the ray matrix.
fn parallelepiped_points(rays: &IntegerMatrix) -> Vec<ParallelepipedPoint> {
    let (dim, k) = matrix_shape(rays);
    let snf = smith_normal_form(rays);
    let diag: Vec<u64> = (0..k)
        .map(|i| u64::try_from(snf.s[i][i].magnitude()).expect("invariant factor fits"))
        .collect();
    let total: u64 = diag.iter().product();
    let u_inv = unimodular_inverse(&snf.u);
    let mut out = Vec::with_capacity((total - 1) as usize);
    for index in 1..total {
        let mut residue = vec![0u64; k];
        let mut rest = index;
        for (pos, &s) in diag.iter().enumerate() {
            residue[pos] = rest % s;
            rest /= s;
        }
        // A saturation point in this residue class: u_inv applied to the
        // residue padded with zeros.
        let x: Vec<BigInt> = (0..dim)
            .map(|r| (0..k).map(|c| &u_inv[r][c] * BigInt::from(residue[c])).sum())
            .collect();
        let (n, d) = barycentric_solution(rays, &x)
            .expect("saturation points lie in the span of the rays");
        let reduced: Vec<BigInt> = n.iter().map(|ni| ni.mod_floor(&d)).collect();
        let floors: Vec<BigInt> =
            n.iter().zip(&reduced).map(|(ni, ri)| (ni - ri) / &d).collect();
        let point: Vec<BigInt> = (0..dim)
            .map(|r| &x[r] - (0..k).map(|c| &floors[c] * &rays[r][c]).sum::<BigInt>())
            .collect();
        debug_assert!(point.iter().any(|p| !p.is_zero()));
        out.push(ParallelepipedPoint { numerators: reduced, point });
    }
    out
}

/// A star subdivision with lattice data: the combinatorial subdivision,
/// the cone data transported onto the reordered base it maps to, and the
/// cone data of the derived complex.
pub struct LatticeStar {
    pub subdivision: SubdivisionResult,
    pub base_lattice: LatticeConeComplex,
    pub derived_lattice: LatticeConeComplex,
}

/// Star subdivision at the stratum `center` along the primitive interior
/// lattice vector `v` (coordinates in the center cone's lattice). The
/// poset of the result is exactly the combinatorial star subdivision;
/// every derived stratum additionally gets a cone: strict transforms keep
/// theirs, and an exceptional stratum over mu joins the surviving rays of
/// mu with the image of `v` in mu's lattice.
pub fn star_at_vector(
    table: &mut ArrowTable,
    handle: ComplexHandle,
    cc: &LatticeConeComplex,
    center: &StratumId,
    v: &[i64],
) -> Result<LatticeStar, LatticeError> {
    let c = table.complex(handle);
    let report = validate_cone_complex(c, cc);
    if !report.is_valid() {
        return Err(LatticeError::Invalid { report });
    }
    let s0 = c
        .stratum_index(center)
        .ok_or_else(|| LatticeError::UnknownCone { id: center.clone() })?;
    let cone0 = &cc.cones[s0];
    if v.len() != cone0.ambient_dim {
        return Err(LatticeError::DimensionMismatch {
            id: center.clone(),
            expected: cone0.ambient_dim,
            got: v.len(),
        });
    }
    if i64_gcd(v) != 1 {
        return Err(LatticeError::NotPrimitive { id: center.clone() });
    }
    let vb: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
    let (coords, _) = barycentric_solution(&ray_matrix(cone0), &vb)
        .ok_or_else(|| LatticeError::NotInterior { id: center.clone() })?;
    if coords.iter().any(|n| !n.is_positive()) {
        return Err(LatticeError::NotInterior { id: center.clone() });
    }
    let r = star_subdivide(table, handle, center)?;
    let base_lattice = permuted_lattice(table.complex(handle), table.complex(r.base), cc);
    let derived_lattice = center_derived_lattice(table, &r, &base_lattice, v);
    validate_cone_complex(table.complex(r.derived), &derived_lattice)
        .expect_valid("derived cone complex");
    Ok(LatticeStar { subdivision: r, base_lattice, derived_lattice })
}

/// Transports cone data onto the reordered copy of the base: ray columns
/// follow the re-sorted words; the embedding matrices are order-free and
/// copy over unchanged.
fn permuted_lattice(
    orig: &StratifiedComplex,
    adapted: &StratifiedComplex,
    cc: &LatticeConeComplex,
) -> LatticeConeComplex {
    let mut cones = Vec::new();
    for s in 0..adapted.strata().len() {
        let old = &cc.cones[s];
        let rays = adapted
            .word(s)
            .iter()
            .map(|&va| {
                let id = &adapted.vertex(va).id;
                let vo = orig.vertex_index(id).expect("reordering keeps vertex ids");
                let pos = orig
                    .word(s)
                    .iter()
                    .position(|&u| u == vo)
                    .expect("reordering keeps stratum words");
                old.rays[pos].clone()
            })
            .collect();
        cones.push(LatticeCone {
            id: old.id.clone(),
            ambient_dim: old.ambient_dim,
            rays,
            face_embeddings: old.face_embeddings.clone(),
        });
    }
    LatticeConeComplex { cones }
}

/// Cone data for the derived complex of a star subdivision, from the
/// adapted base's data and the center vector.
fn center_derived_lattice(
    table: &ArrowTable,
    r: &SubdivisionResult,
    bl: &LatticeConeComplex,
    v: &[i64],
) -> LatticeConeComplex {
    let base = table.complex(r.base);
    let derived = table.complex(r.derived);
    let s0 = r.center.expect("a center subdivision has a center");
    let e_vertex = r.exceptional_vertex.expect("a center subdivision has an exceptional vertex");
    let vb: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
    let mut v_in: HashMap<usize, Vec<i64>> = HashMap::new();
    let mut v_mu = |mu: usize| -> Vec<i64> {
        v_in.entry(mu)
            .or_insert_with(|| {
                let emb = composite_embedding(base, bl, mu, s0);
                let image = mat_vec(&emb, &vb);
                let out: Vec<i64> = image.iter().map(to_i64).collect();
                debug_assert_eq!(i64_gcd(&out), 1, "saturated embeddings keep vectors primitive");
                out
            })
            .clone()
    };
    let mut cones = Vec::new();
    for (d, prov) in r.correspondence.iter().enumerate() {
        match prov {
            Provenance::Strict { base: s } => {
                cones.push(bl.cones[*s].clone());
            }
            Provenance::Exceptional { mu, .. } => {
                let muc = &bl.cones[*mu];
                let mu_word = base.word(*mu);
                let word = derived.word(d);
                let faces = derived.face_indices(d);
                let mut rays = Vec::with_capacity(word.len());
                let mut face_embeddings = BTreeMap::new();
                for (pos, &dv) in word.iter().enumerate() {
                    if dv == e_vertex {
                        rays.push(v_mu(*mu));
                    } else {
                        let vid = &derived.vertex(dv).id;
                        let bv = base.vertex_index(vid).expect("derived letters come from the base");
                        let mp = mu_word
                            .iter()
                            .position(|&u| u == bv)
                            .expect("exceptional letters are letters of mu");
                        rays.push(muc.rays[mp].clone());
                    }
                    if !faces.is_empty() {
                        let f = faces[pos];
                        let fid = derived.stratum(f).id.clone();
                        let emb = match &r.correspondence[f] {
                            Provenance::Strict { base: fs } => composite_embedding(base, bl, *mu, *fs)
                                .iter()
                                .map(|row| row.iter().map(to_i64).collect())
                                .collect(),
                            Provenance::Exceptional { mu: fmu, .. } if fmu == mu => (0..muc
                                .ambient_dim)
                                .map(|i| {
                                    (0..muc.ambient_dim)
                                        .map(|j| if i == j { 1 } else { 0 })
                                        .collect()
                                })
                                .collect(),
                            Provenance::Exceptional { mu: fmu, .. } => {
                                muc.face_embeddings[&base.stratum(*fmu).id].clone()
                            }
                            Provenance::ChainOf { .. } => {
                                unreachable!("center subdivisions have no chain strata")
                            }
                        };
                        face_embeddings.insert(fid, emb);
                    }
                }
                cones.push(LatticeCone {
                    id: derived.stratum(d).id.clone(),
                    ambient_dim: muc.ambient_dim,
                    rays,
                    face_embeddings,
                });
            }
            Provenance::ChainOf { .. } => unreachable!("center subdivisions have no chain strata"),
        }
    }
    LatticeConeComplex { cones }
}

/// One resolution step: where it starred, with what vector (in the center
/// cone's lattice), and the measure before the step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolveStep {
    pub center: StratumId,
    pub vector: Vec<i64>,
    pub max_multiplicity: u64,
    pub cones_at_max: usize,
}

pub struct ToricResolution {
    pub final_handle: ComplexHandle,
    pub final_lattice: LatticeConeComplex,
    pub steps: Vec<ResolveStep>,
}

/// Repeated star subdivision until every cone is smooth. Each round
/// subdivides at the cheapest nonzero parallelepiped point of a cone of
/// maximal multiplicity, starred at the face supporting the point.
pub fn toric_resolve(
    table: &mut ArrowTable,
    handle: ComplexHandle,
    cc: &LatticeConeComplex,
) -> Result<ToricResolution, LatticeError> {
    let report = validate_cone_complex(table.complex(handle), cc);
    if !report.is_valid() {
        return Err(LatticeError::Invalid { report });
    }
    let mut cur = handle;
    let mut lattice = cc.clone();
    let mut steps = Vec::new();
    let mut prev_measure: Option<(u64, usize)> = None;
    loop {
        let mut mults = Vec::with_capacity(lattice.cones.len());
        for cone in &lattice.cones {
            mults.push(multiplicity(cone)?);
        }
        let max = mults.iter().copied().max().unwrap_or(1);
        if max <= 1 {
            break;
        }
        let count = mults.iter().filter(|&&m| m == max).count();
        if let Some(prev) = prev_measure {
            assert!(
                (max, count) < prev,
                "the resolution measure must strictly decrease, got {prev:?} then {:?}",
                (max, count)
            );
        }
        prev_measure = Some((max, count));
        let c = table.complex(cur);
        let mu = (0..mults.len())
            .filter(|&i| mults[i] == max)
            .min_by(|&a, &b| lattice.cones[a].id.cmp(&lattice.cones[b].id))
            .expect("a maximal cone exists");
        let rays = ray_matrix(&lattice.cones[mu]);
        let points = parallelepiped_points(&rays);
        let best = points
            .iter()
            .min_by(|p, q| {
                let ps: BigInt = p.numerators.iter().sum();
                let qs: BigInt = q.numerators.iter().sum();
                ps.cmp(&qs).then_with(|| p.point.cmp(&q.point))
            })
            .expect("a non-smooth cone has a nonzero parallelepiped point");
        let keep: BTreeSet<usize> = c
            .word(mu)
            .iter()
            .enumerate()
            .filter(|(i, _)| best.numerators[*i].is_positive())
            .map(|(_, &v)| v)
            .collect();
        let tau = c.subface(mu, &keep).expect("the support face exists");
        let emb = composite_embedding(c, &lattice, mu, tau);
        let vector = solve_exact(&emb, &best.point);
        let center = c.stratum(tau).id.clone();
        let star = star_at_vector(table, cur, &lattice, &center, &vector)?;
        steps.push(ResolveStep { center, vector, max_multiplicity: max, cones_at_max: count });
        cur = star.subdivision.derived;
        lattice = star.derived_lattice;
    }
    Ok(ToricResolution { final_handle: cur, final_lattice: lattice, steps })
}

/// Solves `emb * x = p` exactly; panics if the solution is not integral,
/// which saturated embeddings rule out.
fn solve_exact(emb: &IntegerMatrix, p: &[BigInt]) -> Vec<i64> {
    let (n, d) = barycentric_solution(emb, p).expect("the point lies in the face's span");
    n.iter()
        .map(|ni| {
            let (q, rem) = ni.div_rem(&d);
            assert!(rem.is_zero(), "saturated embeddings solve lattice points integrally");
            to_i64(&q)
        })
        .collect()
}
