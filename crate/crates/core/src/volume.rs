//! Grothendieck-group arithmetic on class labels: the alternating volume
//! formula of a stratified complex, the class of a built chain complex,
//! label quotients, and triviality tests.
//!
//! The class of a complex is computed degreewise; chain-homotopic
//! complexes built by this crate share it because every homotopy
//! equivalence here either matches summands with equal labels or cancels
//! whole label families in the alternating sum.

use std::collections::BTreeMap;

use crate::builders::BuiltComplex;
use crate::freecat::{k0_class_of_object, ArrowTable, ClassLabel, K0Class};
use crate::strata::StratifiedComplex;

/// The alternating sum of stratum classes: a stratum of codimension `c`
/// contributes its label with sign `(-1)^(c + 1)`, so the top divisors
/// enter positively.
pub fn motivic_volume_formula(c: &StratifiedComplex) -> K0Class {
    let mut out = K0Class::zero();
    for s in 0..c.strata().len() {
        let sign = if c.codim(s) % 2 == 1 { 1 } else { -1 };
        out.add_label(&c.stratum(s).class, sign);
    }
    out
}

/// The class of a built complex: the alternating sum of its terms'
/// classes. For a truncated complex this sums the materialized degrees
/// only.
pub fn k0_class_of_complex(table: &ArrowTable, b: &BuiltComplex) -> K0Class {
    let mut out = K0Class::zero();
    for (&n, term) in &b.complex.terms {
        let part = k0_class_of_object(table, term);
        out = if n % 2 == 0 { out.add(&part) } else { out.sub(&part) };
    }
    out
}

/// A mergeable partition of class labels; every class is represented by
/// its lexicographically smallest member.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelQuotient {
    /// Each entry points to a strictly smaller label, so chains terminate
    /// at the class representative; unlisted labels are their own class.
    parent: BTreeMap<ClassLabel, ClassLabel>,
}

impl LabelQuotient {
    pub fn new() -> Self {
        LabelQuotient::default()
    }

    pub fn representative(&self, label: &ClassLabel) -> ClassLabel {
        let mut cur = label;
        while let Some(p) = self.parent.get(cur) {
            cur = p;
        }
        cur.clone()
    }

    pub fn merge(&mut self, a: &ClassLabel, b: &ClassLabel) {
        let ra = self.representative(a);
        let rb = self.representative(b);
        if ra == rb {
            return;
        }
        let (low, high) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent.insert(high, low);
    }

    /// Merges a whole group at once.
    pub fn merge_all<'a>(&mut self, labels: impl IntoIterator<Item = &'a ClassLabel>) {
        let mut iter = labels.into_iter();
        let Some(first) = iter.next() else { return };
        for l in iter {
            self.merge(first, l);
        }
    }
}

/// Re-accumulates the coefficients of a class on the quotient's
/// representatives.
pub fn apply_quotient(k: &K0Class, q: &LabelQuotient) -> K0Class {
    let mut out = K0Class::zero();
    for (l, &c) in &k.coefficients {
        out.add_label(&q.representative(l), c);
    }
    out
}

/// A class is trivial when it is exactly one copy of the point label.
pub fn is_trivial_class(k: &K0Class, point: &ClassLabel) -> bool {
    k.coefficients.len() == 1 && k.coefficients.get(point) == Some(&1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_cech, build_sd, BuildMode};
    use crate::freecat::ArrowTable;
    use crate::strata::{
        BaseTag, ComplexSpec, Stratum, StratumFlags, StratumId, Vertex, VertexId, VertexOrder,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn label(s: &str) -> ClassLabel {
        ClassLabel(s.to_string())
    }

    fn edge() -> StratifiedComplex {
        let v = |s: &str| VertexId(s.to_string());
        let t = |s: &str| StratumId(s.to_string());
        StratifiedComplex::new(ComplexSpec {
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
                    class: label("a"),
                    flags: StratumFlags::default(),
                },
                Stratum {
                    id: t("D1"),
                    vertices: vec![v("D1")],
                    faces: vec![],
                    class: label("b"),
                    flags: StratumFlags::default(),
                },
                Stratum {
                    id: t("D0D1"),
                    vertices: vec![v("D0"), v("D1")],
                    faces: vec![t("D1"), t("D0")],
                    class: label("e"),
                    flags: StratumFlags::default(),
                },
            ],
        })
        .unwrap()
    }

    fn triangle_cycle() -> StratifiedComplex {
        let v = |s: &str| VertexId(s.to_string());
        let t = |s: &str| StratumId(s.to_string());
        let vertex = |s: &str, r: i64| Vertex { id: v(s), order: VertexOrder::Rank(r) };
        let stratum = |id: &str, vs: &[&str], fs: &[&str], cl: &str| Stratum {
            id: t(id),
            vertices: vs.iter().map(|s| v(s)).collect(),
            faces: fs.iter().map(|s| t(s)).collect(),
            class: label(cl),
            flags: StratumFlags::default(),
        };
        StratifiedComplex::new(ComplexSpec {
            name: "triangle".into(),
            base: BaseTag::K,
            vertices: vec![vertex("X", 0), vertex("Y", 1), vertex("Z", 2)],
            strata: vec![
                stratum("X", &["X"], &[], "a"),
                stratum("Y", &["Y"], &[], "b"),
                stratum("Z", &["Z"], &[], "c"),
                stratum("XY", &["X", "Y"], &["Y", "X"], "ab"),
                stratum("YZ", &["Y", "Z"], &["Z", "Y"], "bc"),
                stratum("XZ", &["X", "Z"], &["Z", "X"], "ca"),
            ],
        })
        .unwrap()
    }

    #[test]
    fn volume_formula_oracles() {
        let single = StratifiedComplex::new(ComplexSpec {
            name: "smooth".into(),
            base: BaseTag::K,
            vertices: vec![Vertex {
                id: VertexId("D0".into()),
                order: VertexOrder::Rank(0),
            }],
            strata: vec![Stratum {
                id: StratumId("D0".into()),
                vertices: vec![VertexId("D0".into())],
                faces: vec![],
                class: label("X0"),
                flags: StratumFlags::default(),
            }],
        })
        .unwrap();
        assert_eq!(motivic_volume_formula(&single).to_string(), "+[X0]");
        assert_eq!(motivic_volume_formula(&edge()).to_string(), "+[a] +[b] -[e]");
        assert_eq!(
            motivic_volume_formula(&triangle_cycle()).to_string(),
            "+[a] -[ab] +[b] -[bc] +[c] -[ca]"
        );
    }

    #[test]
    fn complex_classes_match_the_formula() {
        let mut table = ArrowTable::new();
        let h = table.register_complex(edge());
        let cech = build_cech(&table, h, BuildMode::Bounded);
        let sd = build_sd(&table, h, BuildMode::Bounded);
        let formula = motivic_volume_formula(table.complex(h));
        assert_eq!(k0_class_of_complex(&table, &cech), formula);
        assert_eq!(k0_class_of_complex(&table, &sd), formula);
        assert_eq!(formula.to_string(), "+[a] +[b] -[e]");

        let h = table.register_complex(triangle_cycle());
        let cech = build_cech(&table, h, BuildMode::Bounded);
        let sd = build_sd(&table, h, BuildMode::Bounded);
        let formula = motivic_volume_formula(table.complex(h));
        assert_eq!(k0_class_of_complex(&table, &cech), formula);
        assert_eq!(k0_class_of_complex(&table, &sd), formula);
    }

    #[test]
    fn quotient_merges_and_representatives() {
        let mut q = LabelQuotient::new();
        q.merge(&label("c"), &label("b"));
        q.merge(&label("b"), &label("a"));
        q.merge(&label("x"), &label("y"));
        assert_eq!(q.representative(&label("c")), label("a"));
        assert_eq!(q.representative(&label("b")), label("a"));
        assert_eq!(q.representative(&label("y")), label("x"));
        assert_eq!(q.representative(&label("z")), label("z"));
        let mut k = K0Class::zero();
        k.add_label(&label("a"), 1);
        k.add_label(&label("b"), 1);
        k.add_label(&label("e"), -1);
        q.merge_all([&label("a"), &label("b"), &label("e")]);
        let merged = apply_quotient(&k, &q);
        assert_eq!(merged.to_string(), "+[a]");
        assert!(is_trivial_class(&merged, &label("a")));
    }

    #[test]
    fn obstruction_class_is_not_trivial() {
        let mut k = K0Class::zero();
        k.add_label(&label("Z"), 2);
        k.add_label(&label("Q"), -1);
        assert_eq!(k.to_string(), "-[Q] +2[Z]");
        let pt = label("pt");
        assert!(!is_trivial_class(&k, &pt));
        assert!(!is_trivial_class(&apply_quotient(&k, &LabelQuotient::new()), &pt));
        let mut merge_all = LabelQuotient::new();
        merge_all.merge_all([&label("Z"), &label("Q"), &pt]);
        let collapsed = apply_quotient(&k, &merge_all);
        assert!(is_trivial_class(&collapsed, &merge_all.representative(&pt)));
        let point = K0Class::of_label(pt.clone());
        assert!(is_trivial_class(&point, &pt));
        assert!(!is_trivial_class(&point.scale(2), &pt));
        assert!(!is_trivial_class(&K0Class::zero(), &pt));
    }

    #[test]
    fn apply_quotient_is_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let pool: Vec<ClassLabel> =
            ["a", "b", "c", "d", "e", "f"].iter().map(|s| label(s)).collect();
        for _ in 0..50 {
            let mut q = LabelQuotient::new();
            for _ in 0..rng.gen_range(0..4) {
                let i = rng.gen_range(0..pool.len());
                let j = rng.gen_range(0..pool.len());
                q.merge(&pool[i], &pool[j]);
            }
            let random_class = |rng: &mut ChaCha8Rng| {
                let mut k = K0Class::zero();
                for l in &pool {
                    k.add_label(l, rng.gen_range(-3i64..=3));
                }
                k
            };
            let x = random_class(&mut rng);
            let y = random_class(&mut rng);
            let lhs = apply_quotient(&x.add(&y), &q);
            let rhs = apply_quotient(&x, &q).add(&apply_quotient(&y, &q));
            assert_eq!(lhs, rhs);
            let s = rng.gen_range(-3i64..=3);
            assert_eq!(apply_quotient(&x.scale(s), &q), apply_quotient(&x, &q).scale(s));
        }
    }
}
