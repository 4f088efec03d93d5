//! Functoriality of the subdivision pushforward and compatibility of the
//! bounded comparison maps with their weak extensions through the
//! splitting inclusions and projections.

use stratal::builders::{
    build_cech, build_last_vertex, build_last_vertex_weak, build_sd, build_subdivision_map,
    build_subdivision_map_weak, default_extended_bound, degeneracy_splitting, sd_pushforward,
    sd_pushforward_weak, BuildMode,
};
use stratal::chain::{chain_maps_equal, compose_chain_maps};
use stratal::freecat::ArrowTable;
use stratal::sampler::{cycle_complex, filled_simplex, simplex_boundary};
use stratal::strata::{PosetMap, StratifiedComplex};
use stratal::subdivide::barycentric;

fn registered(c: StratifiedComplex) -> (ArrowTable, stratal::freecat::ComplexHandle) {
    let mut table = ArrowTable::new();
    let h = table.register_complex(c);
    (table, h)
}

fn compose_poset_maps(second: &PosetMap, first: &PosetMap) -> PosetMap {
    assert_eq!(first.target, second.source);
    PosetMap {
        source: first.source,
        target: second.target,
        assignment: first.assignment.iter().map(|&i| second.assignment[i]).collect(),
    }
}

#[test]
fn pushforward_of_a_composite_is_the_composite_of_pushforwards() {
    for c in [filled_simplex(1), cycle_complex(3), simplex_boundary(2)] {
        let (mut table, h) = registered(c);
        let r1 = barycentric(&mut table, h);
        let r2 = barycentric(&mut table, r1.derived);
        assert_eq!(r1.base, h);
        assert_eq!(r2.base, r1.derived);
        let q = compose_poset_maps(&r1.pushforward, &r2.pushforward);

        let sd_base = build_sd(&table, h, BuildMode::Bounded);
        let sd_mid = build_sd(&table, r1.derived, BuildMode::Bounded);
        let sd_top = build_sd(&table, r2.derived, BuildMode::Bounded);
        let p1 = sd_pushforward(&table, &r1.pushforward, &sd_mid, &sd_base);
        let p2 = sd_pushforward(&table, &r2.pushforward, &sd_top, &sd_mid);
        let direct = sd_pushforward(&table, &q, &sd_top, &sd_base);
        let composed = compose_chain_maps(&p1, &p2).unwrap();
        assert!(chain_maps_equal(&direct, &composed).unwrap());

        let bound = default_extended_bound(table.complex(h));
        let sdw_base = build_sd(&table, h, BuildMode::Extended(bound));
        let sdw_mid = build_sd(&table, r1.derived, BuildMode::Extended(bound));
        let sdw_top = build_sd(&table, r2.derived, BuildMode::Extended(bound));
        let w1 = sd_pushforward_weak(&table, &r1.pushforward, &sdw_mid, &sdw_base);
        let w2 = sd_pushforward_weak(&table, &r2.pushforward, &sdw_top, &sdw_mid);
        let direct_w = sd_pushforward_weak(&table, &q, &sdw_top, &sdw_base);
        let composed_w = compose_chain_maps(&w1, &w2).unwrap();
        assert!(chain_maps_equal(&direct_w, &composed_w).unwrap());
    }
}

#[test]
fn bounded_comparison_maps_factor_through_the_weak_ones() {
    for c in [filled_simplex(1), filled_simplex(2), cycle_complex(4), simplex_boundary(2)] {
        let (table, h) = registered(c);
        let bound = default_extended_bound(table.complex(h));
        let sd = build_sd(&table, h, BuildMode::Bounded);
        let cech = build_cech(&table, h, BuildMode::Bounded);
        let sdw = build_sd(&table, h, BuildMode::Extended(bound));
        let cechw = build_cech(&table, h, BuildMode::Extended(bound));

        let (inc_sd, _, _) = degeneracy_splitting(&table, &sd, &sdw);
        let (_, prj_cech, _) = degeneracy_splitting(&table, &cech, &cechw);
        let lam = build_last_vertex(&table, &sd, &cech);
        let lamw = build_last_vertex_weak(&table, &sdw, &cechw);
        let through_weak =
            compose_chain_maps(&prj_cech, &compose_chain_maps(&lamw, &inc_sd).unwrap()).unwrap();
        assert!(chain_maps_equal(&lam, &through_weak).unwrap(), "last-vertex factorization");

        let (inc_cech, _, _) = degeneracy_splitting(&table, &cech, &cechw);
        let (_, prj_sd, _) = degeneracy_splitting(&table, &sd, &sdw);
        let sdm = build_subdivision_map(&table, &cech, &sd);
        let sdmw = build_subdivision_map_weak(&table, &cechw, &sdw);
        let through_weak =
            compose_chain_maps(&prj_sd, &compose_chain_maps(&sdmw, &inc_cech).unwrap()).unwrap();
        assert!(chain_maps_equal(&sdm, &through_weak).unwrap(), "subdivision factorization");
    }
}

#[test]
fn weak_chain_counts_on_the_edge() {
    let (table, h) = registered(filled_simplex(1));
    let bound = default_extended_bound(table.complex(h));
    assert_eq!(bound, 4);
    let sdw = build_sd(&table, h, BuildMode::Extended(bound));
    // Weakly increasing chains in the three-element poset of the edge:
    // three constant chains in each length, plus the mixed ones.
    assert_eq!(sdw.rank(0), 3);
    assert_eq!(sdw.rank(1), 5);
    assert_eq!(sdw.rank(2), 7);
    assert_eq!(sdw.rank(3), 9);
    let sd = build_sd(&table, h, BuildMode::Bounded);
    assert_eq!(sd.rank(0), 3);
    assert_eq!(sd.rank(1), 2);
    assert_eq!(sd.complex.top_degree(), 1);
}
