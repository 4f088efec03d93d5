//! Deterministic fixture generators: the named complex families the test
//! suites measure, seeded random ordered complexes with component
//! duplication, random blowup profiles, and random simplicial cones of
//! bounded multiplicity.

use std::collections::BTreeSet;

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::freecat::ClassLabel;
use crate::lattice::{multiplicity, shared_ambient_cones, LatticeCone, LatticeConeComplex};
use crate::strata::{
    BaseTag, ComplexSpec, StratifiedComplex, Stratum, StratumFlags, StratumId, Vertex, VertexId,
    VertexOrder,
};
use crate::subdivide::IntersectionProfile;

fn vertex_name(i: usize) -> String {
    format!("D{i}")
}

fn subset_id(set: &[usize]) -> String {
    set.iter().map(|&i| vertex_name(i)).collect()
}

/// A stratum per nonempty subset in `subsets`, with faces by single
/// deletion; subsets are vertex-index lists ascending in the given rank
/// order, and each subset's class comes from `class_of`.
fn assemble(
    name: &str,
    nv: usize,
    ranks: &[i64],
    subsets: &[Vec<usize>],
    mut class_of: impl FnMut(&[usize]) -> ClassLabel,
) -> StratifiedComplex {
    let strata = subsets
        .iter()
        .map(|set| Stratum {
            id: StratumId(subset_id(set)),
            vertices: set.iter().map(|&i| VertexId(vertex_name(i))).collect(),
            faces: if set.len() < 2 {
                vec![]
            } else {
                (0..set.len())
                    .map(|j| {
                        let rest: Vec<usize> = set
                            .iter()
                            .enumerate()
                            .filter(|(p, _)| *p != j)
                            .map(|(_, &v)| v)
                            .collect();
                        StratumId(subset_id(&rest))
                    })
                    .collect()
            },
            class: class_of(set),
            flags: StratumFlags::default(),
        })
        .collect();
    StratifiedComplex::new(ComplexSpec {
        name: name.into(),
        base: BaseTag::K,
        vertices: (0..nv)
            .map(|i| Vertex { id: VertexId(vertex_name(i)), order: VertexOrder::Rank(ranks[i]) })
            .collect(),
        strata,
    })
    .expect("generated complex is valid")
}

/// Sorts each subset by rank and the collection by (size, word).
fn normalize(nv: usize, ranks: &[i64], raw: BTreeSet<Vec<usize>>) -> (Vec<Vec<usize>>, Vec<i64>) {
    let mut subsets: Vec<Vec<usize>> = raw
        .into_iter()
        .map(|mut s| {
            s.sort_by_key(|&v| ranks[v]);
            s
        })
        .collect();
    let key = |s: &Vec<usize>| (s.len(), s.iter().map(|&v| ranks[v]).collect::<Vec<_>>());
    subsets.sort_by_key(key);
    (subsets, (0..nv as i64).map(|i| ranks[i as usize]).collect())
}

/// The full simplex on `k + 1` vertices: every nonempty vertex subset is
/// a stratum. Its dual complex is a filled simplex, so it is
/// contractible.
pub fn filled_simplex(k: usize) -> StratifiedComplex {
    let nv = k + 1;
    let ranks: Vec<i64> = (0..nv as i64).collect();
    let raw: BTreeSet<Vec<usize>> = (1u32..(1 << nv))
        .map(|mask| (0..nv).filter(|&i| mask & (1 << i) != 0).collect())
        .collect();
    let (subsets, ranks) = normalize(nv, &ranks, raw);
    assemble(&format!("simplex{k}"), nv, &ranks, &subsets, |set| ClassLabel(subset_id(set)))
}

/// The boundary of the simplex on `dim + 2` vertices: every nonempty
/// proper subset. Its dual complex is a `dim`-sphere.
pub fn simplex_boundary(dim: usize) -> StratifiedComplex {
    let nv = dim + 2;
    let ranks: Vec<i64> = (0..nv as i64).collect();
    let raw: BTreeSet<Vec<usize>> = (1u32..(1 << nv) - 1)
        .map(|mask| (0..nv).filter(|&i| mask & (1 << i) != 0).collect::<Vec<usize>>())
        .filter(|s| s.len() <= nv - 1)
        .collect();
    let (subsets, ranks) = normalize(nv, &ranks, raw);
    assemble(&format!("sphere{dim}"), nv, &ranks, &subsets, |set| ClassLabel(subset_id(set)))
}

/// A cycle of `n >= 3` components: vertices in a ring, one edge stratum
/// between each neighboring pair. Its dual complex is a circle.
pub fn cycle_complex(n: usize) -> StratifiedComplex {
    assert!(n >= 3, "a cycle needs at least three components");
    let ranks: Vec<i64> = (0..n as i64).collect();
    let mut raw: BTreeSet<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for i in 0..n {
        raw.insert(vec![i, (i + 1) % n]);
    }
    let (subsets, ranks) = normalize(n, &ranks, raw);
    assemble(&format!("cycle{n}"), n, &ranks, &subsets, |set| ClassLabel(subset_id(set)))
}

/// The full simplex on the given rays sharing one ambient lattice: the
/// complex of all nonempty ray subsets, each cone selecting its rays,
/// every face embedding the identity.
pub fn cone_complex_from_rays(
    name: &str,
    rays: &[Vec<i64>],
) -> (StratifiedComplex, LatticeConeComplex) {
    let c = filled_simplex(rays.len() - 1);
    let c = StratifiedComplex::new(ComplexSpec { name: name.into(), ..c.spec().clone() })
        .expect("renamed copy stays valid");
    let cc = shared_ambient_cones(&c, rays[0].len(), rays);
    (c, cc)
}

/// A random ordered stratified complex: 3 to 6 vertices in a shuffled
/// total order, 2 to 5 random facets of at most 4 vertices closed
/// downward, every vertex kept as a divisor, labels drawn from a small
/// pool so repeats occur, and up to two rounds of component duplication
/// on deeper strata.
pub fn random_complex(rng: &mut impl Rng) -> StratifiedComplex {
    let pool = ["A", "B", "C", "D", "E"];
    let nv = rng.gen_range(3..=6);
    let mut ranks: Vec<i64> = (0..nv as i64).collect();
    ranks.shuffle(rng);

    let mut raw: BTreeSet<Vec<usize>> = (0..nv).map(|i| vec![i]).collect();
    for _ in 0..rng.gen_range(2..=5) {
        let size = rng.gen_range(1..=4.min(nv));
        let mut verts: Vec<usize> = (0..nv).collect();
        verts.shuffle(rng);
        verts.truncate(size);
        for mask in 1u32..(1 << size) {
            let mut subset: Vec<usize> =
                (0..size).filter(|&i| mask & (1 << i) != 0).map(|i| verts[i]).collect();
            subset.sort_unstable();
            raw.insert(subset);
        }
    }
    let (subsets, ranks) = normalize(nv, &ranks, raw);
    let mut complex = assemble("random", nv, &ranks, &subsets, |_| {
        ClassLabel(pool.choose(rng).unwrap().to_string())
    });

    for _ in 0..rng.gen_range(0..=2) {
        let n = complex.strata().len();
        let deep: Vec<usize> = (0..n).filter(|&s| complex.word(s).len() >= 2).collect();
        let Some(&pick) = deep.choose(rng) else { break };
        // Everything strictly above the picked stratum lies in one of its
        // two components, and comparable strata must agree on which; so
        // choose per connected component of the strict star, then re-point
        // the direct parents accordingly. The copy shares the original's
        // faces, so the two-step face identities are untouched.
        let star: Vec<usize> = (0..n).filter(|&t| t != pick && complex.leq(pick, t)).collect();
        let mut component = vec![usize::MAX; n];
        let mut moved = vec![false; n];
        for &seed in &star {
            if component[seed] != usize::MAX {
                continue;
            }
            let flip = rng.gen_bool(0.5);
            let mut stack = vec![seed];
            while let Some(t) = stack.pop() {
                if component[t] != usize::MAX {
                    continue;
                }
                component[t] = seed;
                moved[t] = flip;
                stack.extend(
                    star.iter().copied().filter(|&u| complex.leq(t, u) || complex.leq(u, t)),
                );
            }
        }
        let mut spec = complex.spec().clone();
        let original = spec.strata[pick].clone();
        let mut copy_id = format!("{}'", original.id);
        while spec.strata.iter().any(|s| s.id.0 == copy_id) {
            copy_id.push('\'');
        }
        let copy_id = StratumId(copy_id);
        spec.strata.push(Stratum {
            id: copy_id.clone(),
            class: ClassLabel(pool.choose(rng).unwrap().to_string()),
            ..original.clone()
        });
        for (s, stratum) in spec.strata.iter_mut().enumerate().take(n) {
            if !moved[s] {
                continue;
            }
            for f in stratum.faces.iter_mut() {
                if *f == original.id {
                    *f = copy_id.clone();
                }
            }
        }
        complex = StratifiedComplex::new(spec).expect("duplication keeps the complex valid");
    }

    if rng.gen_bool(0.25) {
        // Same total order, expressed through explicit predecessor lists.
        let mut spec = complex.spec().clone();
        let mut by_rank: Vec<usize> = (0..nv).collect();
        by_rank.sort_by_key(|&v| ranks[v]);
        for (pos, &v) in by_rank.iter().enumerate() {
            spec.vertices[v].order = VertexOrder::Above(if pos == 0 {
                vec![]
            } else {
                vec![VertexId(vertex_name(by_rank[pos - 1]))]
            });
        }
        complex = StratifiedComplex::new(spec).expect("relisted order keeps the complex valid");
    }
    complex
}

/// A random proper-center blowup profile: a random center stratum, with
/// component counts above one only on star-maximal strata so that every
/// component's position is unambiguous.
pub fn random_profile(rng: &mut impl Rng, c: &StratifiedComplex) -> IntersectionProfile {
    let center = rng.gen_range(0..c.strata().len());
    let star: Vec<usize> = (0..c.strata().len()).filter(|&t| c.leq(center, t)).collect();
    let mut profile = IntersectionProfile::default_profile(c.stratum(center).id.clone());
    for &mu in &star {
        if mu == center {
            continue;
        }
        let maximal = star.iter().all(|&nu| nu == mu || !c.leq(mu, nu));
        if maximal && rng.gen_bool(0.5) {
            profile.counts.insert(c.stratum(mu).id.clone(), rng.gen_range(2..=3));
        }
    }
    profile
}

/// A random full-dimensional simplicial cone in dimension 2 or 3 with
/// primitive rays and multiplicity between 2 and 20.
pub fn random_cone_rays(rng: &mut impl Rng) -> Vec<Vec<i64>> {
    loop {
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let mut rays: Vec<Vec<i64>> = Vec::with_capacity(dim);
        for _ in 0..dim {
            let mut ray: Vec<i64> = (0..dim).map(|_| rng.gen_range(-9i64..=9)).collect();
            let g = ray.iter().fold(0i64, |a, &b| a.gcd(&b));
            if g == 0 {
                ray = vec![0; dim];
                ray[rng.gen_range(0..dim)] = 1;
            } else if g > 1 {
                for x in ray.iter_mut() {
                    *x /= g;
                }
            }
            rays.push(ray);
        }
        let probe = LatticeCone {
            id: StratumId("probe".into()),
            ambient_dim: dim,
            rays: rays.clone(),
            face_embeddings: Default::default(),
        };
        match multiplicity(&probe) {
            Ok(m) if (2..=20).contains(&m) => return rays,
            _ => continue,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::validate_cone_complex;
    use crate::subdivide::CenterRelation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn named_families_have_expected_sizes() {
        assert_eq!(filled_simplex(1).strata().len(), 3);
        assert_eq!(filled_simplex(2).strata().len(), 7);
        assert_eq!(simplex_boundary(1).strata().len(), 6);
        assert_eq!(simplex_boundary(2).strata().len(), 14);
        assert_eq!(simplex_boundary(3).strata().len(), 30);
        for n in 3..=8 {
            let c = cycle_complex(n);
            assert_eq!(c.strata().len(), 2 * n);
            assert_eq!(c.max_codim(), 2);
        }
    }

    #[test]
    fn cone_fixture_is_coherent() {
        let (c, cc) = cone_complex_from_rays("h", &[vec![1, 0], vec![1, 4]]);
        validate_cone_complex(&c, &cc).expect_valid("cone fixture");
        assert_eq!(c.name(), "h");
    }

    #[test]
    fn random_complexes_are_valid_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut saw_duplicate = false;
        let mut saw_listed_order = false;
        for _ in 0..120 {
            let c = random_complex(&mut rng);
            let nv = c.vertices().len();
            assert!((3..=6).contains(&nv));
            assert!(c.max_codim() <= 4);
            saw_duplicate |= c.spec().strata.iter().any(|s| s.id.0.contains('\''));
            saw_listed_order |=
                matches!(c.vertices()[0].order, VertexOrder::Above(_));
            for v in 0..nv {
                let singles = (0..c.strata().len())
                    .filter(|&s| c.word(s) == [v])
                    .count();
                assert_eq!(singles, 1);
            }
        }
        assert!(saw_duplicate, "duplication rounds never fired");
        assert!(saw_listed_order, "explicit-list orders never fired");
    }

    #[test]
    fn random_profiles_validate() {
        use crate::freecat::ArrowTable;
        use crate::subdivide::blowup_subdivide;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut saw_count = false;
        for _ in 0..25 {
            let c = random_complex(&mut rng);
            let mut table = ArrowTable::new();
            let h = table.register_complex(c);
            let profile = random_profile(&mut rng, table.complex(h));
            assert_eq!(profile.relation, CenterRelation::ProperlyInside);
            saw_count |= !profile.counts.is_empty();
            blowup_subdivide(&mut table, h, &profile).expect("random profile is consistent");
        }
        assert!(saw_count, "component counts never fired");
    }

    #[test]
    fn random_cones_stay_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..60 {
            let rays = random_cone_rays(&mut rng);
            let dim = rays.len();
            assert!(dim == 2 || dim == 3);
            let probe = LatticeCone {
                id: StratumId("probe".into()),
                ambient_dim: dim,
                rays,
                face_embeddings: Default::default(),
            };
            let m = multiplicity(&probe).unwrap();
            assert!((2..=20).contains(&m), "multiplicity {m} out of range");
        }
    }
}
