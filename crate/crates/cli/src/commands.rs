//! Command implementations. Each command returns either a finished
//! report, carrying both the human text and the machine-readable value
//! plus a success bit, or a usage error destined for standard error.
//!
//! The split mirrors the exit-code contract: a returned report with
//! `ok = false` is a mathematical violation (exit 1, witness included),
//! a returned error is an input or usage problem (exit 2).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use stratal::builders::{
    build_cech, build_comparison_homotopy, build_last_vertex, build_last_vertex_weak, build_sd,
    build_subdivision_map, build_subdivision_map_weak, default_extended_bound,
    degeneracy_splitting, sd_pushforward, verify_comparison_identities, BuildMode, BuiltComplex,
    ComplexKind, SummandKey,
};
use stratal::chain::{chain_maps_equal, compose_chain_maps, verify_homotopy, ChainMap};
use stratal::freecat::{
    invert_iso, ArrowTable, ClassLabel, ComplexHandle, FreeMorphism, K0Class,
};
use stratal::homology::{homology_groups, realize, AbelianRealization, RealizeError};
use stratal::lattice::{is_smooth, toric_resolve, validate_cone_complex, LatticeConeComplex, LatticeError};
use stratal::report::ValidationReport;
use stratal::sampler::random_complex;
use stratal::strata::{validate_complex, StratifiedComplex, StratumId};
use stratal::subdivide::{
    barycentric, barycentric_phi, blowup_subdivide, build_comparison_complexes,
    cech_pushforward_closed_form, cech_pushforward_composite, inverse_and_homotopy,
    star_subdivide, IntersectionProfile, SubdivideError, SubdivisionKind, SubdivisionResult,
};
use stratal::volume::{
    apply_quotient, is_trivial_class, k0_class_of_complex, motivic_volume_formula, LabelQuotient,
};

use crate::schema::{
    document_of_complex, lattice_of_document, profile_of_document, quotient_of_document,
    realization_of_document, spec_of_document, vertex_class_report, ComplexDocument,
    ProfileDocument, QuotientDocument, RealizationDocument,
};

/// Finished command output: human text for the terminal, a JSON value for
/// `--json` mode, and whether every check passed.
pub struct Report {
    pub human: String,
    pub json: Value,
    pub ok: bool,
}

/// Which chain complex the `sd`/`cech` commands build.
#[derive(Clone, Copy)]
pub enum BuildWhich {
    Sd,
    Cech,
}

/// Which subdivision the `subdivide` command performs.
pub enum SubdivideOp {
    Barycentric,
    Star(String),
    Blowup { center: String, profile: Option<PathBuf> },
}

/// Check suites of the `verify` command.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Complex,
    Maps,
    Homotopies,
    #[value(name = "k0")]
    K0,
    Homology,
    Full,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::Full || self == other
    }
}

fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

struct Opened {
    doc: ComplexDocument,
    parsed: Result<(StratifiedComplex, Option<LatticeConeComplex>), ValidationReport>,
}

/// Reads and parses a complex document. Schema-level problems are usage
/// errors; structural violations are kept for the caller to report with
/// exit code 1.
fn open_complex(path: &Path) -> Result<Opened, String> {
    let doc: ComplexDocument = load_json(path)?;
    let spec = spec_of_document(&doc)?;
    match StratifiedComplex::new(spec) {
        Err(report) => Ok(Opened { doc, parsed: Err(report) }),
        Ok(c) => {
            let report = vertex_class_report(&doc, &c);
            if !report.is_valid() {
                return Ok(Opened { doc, parsed: Err(report) });
            }
            let lattice = lattice_of_document(&doc, &c)?;
            Ok(Opened { doc, parsed: Ok((c, lattice)) })
        }
    }
}

fn violations_json(report: &ValidationReport) -> Value {
    Value::Array(
        report
            .violations
            .iter()
            .map(|v| json!({"code": v.code, "message": v.message}))
            .collect(),
    )
}

fn invalid_complex(cmd: &str, name: &str, report: &ValidationReport) -> Report {
    Report {
        human: format!("complex {name}: INVALID\n{report}"),
        json: json!({
            "command": cmd,
            "name": name,
            "violations": violations_json(report),
        }),
        ok: false,
    }
}

/// Turns an equality check into a report with a stable code.
fn equality_report(code: &str, outcome: Result<bool, impl std::fmt::Display>) -> ValidationReport {
    let mut rep = ValidationReport::new();
    match outcome {
        Ok(true) => {}
        Ok(false) => rep.push(code, "the two sides differ"),
        Err(e) => rep.push(code, format!("the two sides are not comparable: {e}")),
    }
    rep
}

pub fn validate(file: &Path) -> Result<Report, String> {
    let opened = open_complex(file)?;
    let name = opened.doc.name.clone();
    let (c, lattice) = match opened.parsed {
        Err(rep) => return Ok(invalid_complex("validate", &name, &rep)),
        Ok(p) => p,
    };
    let mut human = format!(
        "complex {}: OK ({} vertices, {} strata, max codimension {})\n",
        name,
        c.vertices().len(),
        c.strata().len(),
        c.max_codim()
    );
    let mut ok = true;
    let lattice_json = match &lattice {
        None => Value::Null,
        Some(cc) => {
            let rep = validate_cone_complex(&c, cc);
            if rep.is_valid() {
                let _ = writeln!(human, "lattice: OK ({} cones)", cc.cones.len());
                json!({"ok": true, "cones": cc.cones.len()})
            } else {
                ok = false;
                let _ = write!(human, "lattice: INVALID\n{rep}");
                json!({"ok": false, "violations": violations_json(&rep)})
            }
        }
    };
    Ok(Report {
        human,
        json: json!({
            "command": "validate",
            "name": name,
            "vertices": c.vertices().len(),
            "strata": c.strata().len(),
            "max_codim": c.max_codim(),
            "lattice": lattice_json,
        }),
        ok,
    })
}

/// Readable description of one summand of a built complex.
fn describe_key(c: &StratifiedComplex, kind: ComplexKind, key: &SummandKey) -> String {
    match key {
        SummandKey::Stratum(s) => c.stratum(*s).id.to_string(),
        SummandKey::Chain(entries) => {
            let sep = if kind == ComplexKind::SubdivisionWeak { " <= " } else { " < " };
            entries
                .iter()
                .map(|&s| c.stratum(s).id.to_string())
                .collect::<Vec<_>>()
                .join(sep)
        }
        SummandKey::Word { base, word } => {
            let letters: Vec<String> =
                word.iter().map(|&v| c.vertex(v).id.to_string()).collect();
            format!("{} [{}]", c.stratum(*base).id, letters.join(" "))
        }
    }
}

pub fn build(file: &Path, which: BuildWhich, extended: Option<u32>) -> Result<Report, String> {
    let cmd = match which {
        BuildWhich::Sd => "sd",
        BuildWhich::Cech => "cech",
    };
    let opened = open_complex(file)?;
    let name = opened.doc.name.clone();
    let (c, _) = match opened.parsed {
        Err(rep) => return Ok(invalid_complex(cmd, &name, &rep)),
        Ok(p) => p,
    };
    let mut table = ArrowTable::new();
    let h = table.register_complex(c);
    let mode = match extended {
        None => BuildMode::Bounded,
        Some(n) => BuildMode::Extended(n),
    };
    let b = match which {
        BuildWhich::Sd => build_sd(&table, h, mode),
        BuildWhich::Cech => build_cech(&table, h, mode),
    };
    let c = table.complex(h);
    let what = match which {
        BuildWhich::Sd => "subdivision complex",
        BuildWhich::Cech => "covering complex",
    };
    let mode_text = match mode {
        BuildMode::Bounded => "bounded".to_string(),
        BuildMode::Extended(n) => format!("weak, truncated above degree {n}"),
    };
    let mut human = format!("{what} of {name} ({mode_text}):\n");
    let mut degrees = Vec::new();
    for (&n, keys) in &b.keys {
        let summands: Vec<String> =
            keys.iter().map(|k| describe_key(c, b.kind, k)).collect();
        if keys.len() <= 16 {
            let _ = writeln!(human, "  degree {n}: rank {}   {}", keys.len(), summands.join(" | "));
        } else {
            let _ = writeln!(human, "  degree {n}: rank {}", keys.len());
        }
        degrees.push(json!({"degree": n, "rank": keys.len(), "summands": summands}));
    }
    let mut rep = b.complex.validate();
    rep.merge(stratal::chain::validate_entries_against_table(
        &table,
        (1..=b.complex.top_degree()).map(|n| b.complex.differential(n)),
    ));
    let ok = rep.is_valid();
    if ok {
        human.push_str("differentials: d.d = 0, entries are legal arrows\n");
    } else {
        let _ = write!(human, "differentials: INVALID\n{rep}");
    }
    Ok(Report {
        human,
        json: json!({
            "command": cmd,
            "name": name,
            "mode": match mode {
                BuildMode::Bounded => json!("bounded"),
                BuildMode::Extended(n) => json!({"extended": n}),
            },
            "degrees": degrees,
            "violations": violations_json(&rep),
        }),
        ok,
    })
}

/// Accumulates named checks across one or many runs, keeping the first
/// failure witness per check.
struct CheckAgg {
    rows: Vec<CheckRow>,
}

struct CheckRow {
    label: String,
    passes: usize,
    failures: usize,
    first_failure: Option<String>,
}

impl CheckAgg {
    fn new() -> Self {
        CheckAgg { rows: Vec::new() }
    }

    fn record(&mut self, label: &str, report: ValidationReport) {
        let row = match self.rows.iter_mut().find(|r| r.label == label) {
            Some(r) => r,
            None => {
                self.rows.push(CheckRow {
                    label: label.to_string(),
                    passes: 0,
                    failures: 0,
                    first_failure: None,
                });
                self.rows.last_mut().expect("just pushed")
            }
        };
        if report.is_valid() {
            row.passes += 1;
        } else {
            row.failures += 1;
            if row.first_failure.is_none() {
                row.first_failure = Some(report.to_string());
            }
        }
    }

    fn ok(&self) -> bool {
        self.rows.iter().all(|r| r.failures == 0)
    }

    fn render(&self, human: &mut String) {
        for r in &self.rows {
            if r.failures == 0 {
                let _ = writeln!(human, "  {}: OK ({} case(s))", r.label, r.passes);
            } else {
                let _ = writeln!(
                    human,
                    "  {}: FAILED ({} of {} case(s))",
                    r.label,
                    r.failures,
                    r.passes + r.failures
                );
                if let Some(w) = &r.first_failure {
                    for line in w.lines() {
                        let _ = writeln!(human, "    {line}");
                    }
                }
            }
        }
    }

    fn json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    json!({
                        "check": r.label,
                        "passes": r.passes,
                        "failures": r.failures,
                        "first_failure": r.first_failure,
                    })
                })
                .collect(),
        )
    }
}

/// The four chain complexes every comparison runs over, built once.
struct Four {
    sd: BuiltComplex,
    cech: BuiltComplex,
    sdw: BuiltComplex,
    cechw: BuiltComplex,
}

fn build_four(table: &ArrowTable, h: ComplexHandle) -> Four {
    let bound = default_extended_bound(table.complex(h));
    Four {
        sd: build_sd(table, h, BuildMode::Bounded),
        cech: build_cech(table, h, BuildMode::Bounded),
        sdw: build_sd(table, h, BuildMode::Extended(bound)),
        cechw: build_cech(table, h, BuildMode::Extended(bound)),
    }
}

fn check_complexes(table: &ArrowTable, four: &Four, agg: &mut CheckAgg) {
    let mut square = ValidationReport::new();
    let mut entries = ValidationReport::new();
    for b in [&four.sd, &four.cech, &four.sdw, &four.cechw] {
        square.merge(b.complex.validate());
        entries.merge(stratal::chain::validate_entries_against_table(
            table,
            (1..=b.complex.top_degree()).map(|n| b.complex.differential(n)),
        ));
    }
    agg.record("chain complexes satisfy d.d = 0", square);
    agg.record("differential entries are legal arrows", entries);
}

fn check_maps(table: &ArrowTable, four: &Four, agg: &mut CheckAgg) {
    let lam = build_last_vertex(table, &four.sd, &four.cech);
    let sdm = build_subdivision_map(table, &four.cech, &four.sd);
    let lamw = build_last_vertex_weak(table, &four.sdw, &four.cechw);
    let sdmw = build_subdivision_map_weak(table, &four.cechw, &four.sdw);
    let mut commute = lam.validate();
    commute.merge(sdm.validate());
    commute.merge(lamw.validate());
    commute.merge(sdmw.validate());
    agg.record("chain maps commute with the differentials", commute);
    let round = compose_chain_maps(&lam, &sdm).expect("composable");
    agg.record(
        "last-vertex . subdivision = id",
        equality_report(
            "round-trip",
            chain_maps_equal(&round, &ChainMap::identity(four.cech.complex.clone())),
        ),
    );
}

fn check_splitting(
    table: &ArrowTable,
    strict: &BuiltComplex,
    weak: &BuiltComplex,
    label_eq: &str,
    label_hom: &str,
    agg: &mut CheckAgg,
) {
    let (inc, prj, hom) = degeneracy_splitting(table, strict, weak);
    let round = compose_chain_maps(&prj, &inc).expect("composable");
    agg.record(
        label_eq,
        equality_report(
            "round-trip",
            chain_maps_equal(&round, &ChainMap::identity(strict.complex.clone())),
        ),
    );
    let back = compose_chain_maps(&inc, &prj).expect("composable");
    let idw = ChainMap::identity(weak.complex.clone());
    agg.record(label_hom, verify_homotopy(&hom, &idw, &back).expect("well-typed homotopy"));
}

fn check_homotopies(table: &ArrowTable, four: &Four, agg: &mut CheckAgg) {
    check_splitting(
        table,
        &four.sd,
        &four.sdw,
        "splitting round-trip (subdivision side)",
        "splitting homotopy (subdivision side)",
        agg,
    );
    check_splitting(
        table,
        &four.cech,
        &four.cechw,
        "splitting round-trip (covering side)",
        "splitting homotopy (covering side)",
        agg,
    );
    let lamw = build_last_vertex_weak(table, &four.sdw, &four.cechw);
    let sdmw = build_subdivision_map_weak(table, &four.cechw, &four.sdw);
    let hom = build_comparison_homotopy(table, &four.sdw);
    let composite = compose_chain_maps(&sdmw, &lamw).expect("composable");
    let id = ChainMap::identity(four.sdw.complex.clone());
    agg.record(
        "comparison homotopy",
        verify_homotopy(&hom, &id, &composite).expect("well-typed homotopy"),
    );
    agg.record(
        "comparison sign identities",
        verify_comparison_identities(table, &four.sdw, &lamw, &sdmw),
    );
}

/// Lex-least stratum id of maximal codimension: a deterministic center
/// with the largest star.
fn deep_center(c: &StratifiedComplex) -> StratumId {
    let top = c.max_codim();
    (0..c.strata().len())
        .filter(|&s| c.codim(s) == top)
        .map(|s| c.stratum(s).id.clone())
        .min()
        .expect("a complex has strata")
}

fn class_of(table: &ArrowTable, h: ComplexHandle) -> K0Class {
    k0_class_of_complex(table, &build_cech(table, h, BuildMode::Bounded))
}

fn check_k0(table: &mut ArrowTable, h: ComplexHandle, agg: &mut CheckAgg) {
    let formula = motivic_volume_formula(table.complex(h));
    let cech_class = class_of(table, h);
    let sd_class =
        k0_class_of_complex(table, &build_sd(table, h, BuildMode::Bounded));
    let mut rep = ValidationReport::new();
    if cech_class != formula {
        rep.push("covering-class", format!("covering gives {cech_class}, formula {formula}"));
    }
    if sd_class != formula {
        rep.push("subdivision-class", format!("subdivision gives {sd_class}, formula {formula}"));
    }
    agg.record("volume classes match the formula", rep);

    let center = deep_center(table.complex(h));
    let subdivisions: Vec<(&str, SubdivisionResult)> = vec![
        ("barycentric", barycentric(table, h)),
        ("star", star_subdivide(table, h, &center).expect("center exists")),
        (
            "blowup",
            blowup_subdivide(table, h, &IntersectionProfile::default_profile(center.clone()))
                .expect("default profile is consistent"),
        ),
    ];
    let mut rep = ValidationReport::new();
    for (kind, r) in &subdivisions {
        let base_class = class_of(table, r.base);
        let derived_class = class_of(table, r.derived);
        if base_class != derived_class {
            rep.push(
                "subdivision-invariance",
                format!("{kind} changes the class: {base_class} vs {derived_class}"),
            );
        }
    }
    agg.record("volume class invariant under subdivisions", rep);
}

fn homology_summary(table: &ArrowTable, h: ComplexHandle) -> Result<BTreeMap<u32, String>, String> {
    let cech = build_cech(table, h, BuildMode::Bounded);
    let r = AbelianRealization::constant(table.complex(h));
    let icc = realize(table, &cech, &r).map_err(|e| e.to_string())?;
    let mut chi = 0i64;
    let groups = homology_groups(&icc);
    for (&n, g) in &groups {
        let term = g.betti as i64;
        chi += if n % 2 == 0 { term } else { -term };
    }
    if chi != icc.euler_characteristic() {
        return Err(format!(
            "alternating Betti sum {chi} differs from the Euler characteristic {}",
            icc.euler_characteristic()
        ));
    }
    Ok(groups.into_iter().map(|(n, g)| (n, g.to_string())).collect())
}

fn check_homology(table: &mut ArrowTable, h: ComplexHandle, agg: &mut CheckAgg) {
    let mut rep = ValidationReport::new();
    let base = match homology_summary(table, h) {
        Ok(g) => Some(g),
        Err(e) => {
            rep.push("realization", e);
            None
        }
    };
    agg.record("constant realization has consistent homology", rep);

    let mut rep = ValidationReport::new();
    if let Some(base) = base {
        let center = deep_center(table.complex(h));
        let r = star_subdivide(table, h, &center).expect("center exists");
        match homology_summary(table, r.derived) {
            Err(e) => rep.push("realization", e),
            Ok(derived) => {
                if derived != base {
                    rep.push(
                        "homology-invariance",
                        format!("star subdivision changes homology: {base:?} vs {derived:?}"),
                    );
                }
            }
        }
    }
    agg.record("homology invariant under star subdivision", rep);
}

/// The subdivision comparison theorems on one complex: the star
/// pushforward in closed form, its inverse up to homotopy, and the
/// barycentric comparison isomorphism with its commuting triangle.
fn check_subdivision_comparisons(table: &mut ArrowTable, h: ComplexHandle, agg: &mut CheckAgg) {
    let center = deep_center(table.complex(h));
    let r = star_subdivide(table, h, &center).expect("center exists");
    let cx = build_comparison_complexes(table, &r);
    let composite = cech_pushforward_composite(table, &r, &cx);
    let closed = cech_pushforward_closed_form(table, &r, &cx);
    agg.record(
        "star pushforward closed form",
        equality_report("closed-form", chain_maps_equal(&composite, &closed)),
    );
    let (gamma, hom) = inverse_and_homotopy(table, &r, &cx);
    let round = compose_chain_maps(&closed, &gamma).expect("composable");
    agg.record(
        "star pushforward . inverse = id",
        equality_report(
            "round-trip",
            chain_maps_equal(&round, &ChainMap::identity(cx.cech_base.complex.clone())),
        ),
    );
    let back = compose_chain_maps(&gamma, &closed).expect("composable");
    agg.record(
        "star inverse homotopy",
        verify_homotopy(&hom, &ChainMap::identity(cx.cech_derived.complex.clone()), &back)
            .expect("well-typed homotopy"),
    );

    let r = barycentric(table, h);
    let cx = build_comparison_complexes(table, &r);
    let phi = barycentric_phi(table, &r, &cx);
    agg.record("barycentric comparison is a chain map", phi.validate());
    let mut rep = ValidationReport::new();
    for n in 0..=phi.reliable_degree() {
        let f = phi.component(n);
        match invert_iso(table, &f) {
            Err(e) => rep.push("iso", format!("degree {n} is not invertible: {e}")),
            Ok(inv) => {
                let round = stratal::freecat::compose(&inv, &f).expect("composable");
                let id = FreeMorphism::identity(cx.cech_derived.complex.term(n));
                if !stratal::freecat::is_equal(&round, &id).expect("comparable") {
                    rep.push("iso", format!("degree {n}: inverse round-trip is not the identity"));
                }
            }
        }
    }
    agg.record("barycentric comparison is an isomorphism", rep);
    let lam = build_last_vertex(table, &cx.sd_derived, &cx.cech_derived);
    let left = compose_chain_maps(&phi, &lam).expect("composable");
    let push = sd_pushforward(table, &r.pushforward, &cx.sd_derived, &cx.sd_base);
    agg.record(
        "barycentric triangle commutes",
        equality_report("triangle", chain_maps_equal(&left, &push)),
    );
}

fn run_suite(table: &mut ArrowTable, h: ComplexHandle, suite: Suite, agg: &mut CheckAgg) {
    if suite.includes(Suite::Complex) {
        agg.record("complex validation", validate_complex(table.complex(h).spec()));
    }
    let needs_four = suite.includes(Suite::Complex)
        || suite.includes(Suite::Maps)
        || suite.includes(Suite::Homotopies);
    if needs_four {
        let four = build_four(table, h);
        if suite.includes(Suite::Complex) {
            check_complexes(table, &four, agg);
        }
        if suite.includes(Suite::Maps) {
            check_maps(table, &four, agg);
        }
        if suite.includes(Suite::Homotopies) {
            check_homotopies(table, &four, agg);
        }
    }
    if suite.includes(Suite::Homotopies) {
        check_subdivision_comparisons(table, h, agg);
    }
    if suite.includes(Suite::K0) {
        check_k0(table, h, agg);
    }
    if suite.includes(Suite::Homology) {
        check_homology(table, h, agg);
    }
}

pub fn verify(
    file: Option<&Path>,
    suite: Suite,
    seed: u64,
    cases: u32,
) -> Result<Report, String> {
    let suite_name = format!("{suite:?}").to_lowercase();
    let mut agg = CheckAgg::new();
    let mut table = ArrowTable::new();
    let header;
    let scope_json;
    match file {
        Some(path) => {
            let opened = open_complex(path)?;
            let name = opened.doc.name.clone();
            let (c, _) = match opened.parsed {
                Err(rep) => return Ok(invalid_complex("verify", &name, &rep)),
                Ok(p) => p,
            };
            let h = table.register_complex(c);
            run_suite(&mut table, h, suite, &mut agg);
            header = format!("verify {name}: suite {suite_name}\n");
            scope_json = json!({"name": name});
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..cases {
                let c = random_complex(&mut rng);
                let h = table.register_complex(c);
                run_suite(&mut table, h, suite, &mut agg);
            }
            header = format!("verify: suite {suite_name}, {cases} random case(s), seed {seed}\n");
            scope_json = json!({"seed": seed, "cases": cases});
        }
    }
    let mut human = header;
    agg.render(&mut human);
    let ok = agg.ok();
    human.push_str(if ok { "all checks passed\n" } else { "CHECKS FAILED\n" });
    Ok(Report {
        human,
        json: json!({
            "command": "verify",
            "suite": suite_name,
            "scope": scope_json,
            "checks": agg.json(),
        }),
        ok,
    })
}

pub fn compare(file: &Path) -> Result<Report, String> {
    let opened = open_complex(file)?;
    let name = opened.doc.name.clone();
    let (c, _) = match opened.parsed {
        Err(rep) => return Ok(invalid_complex("compare", &name, &rep)),
        Ok(p) => p,
    };
    let mut table = ArrowTable::new();
    let h = table.register_complex(c);
    let mut agg = CheckAgg::new();
    let four = build_four(&table, h);
    check_maps(&table, &four, &mut agg);
    check_homotopies(&table, &four, &mut agg);
    let mut human = format!("comparison of subdivision and covering complexes for {name}:\n");
    agg.render(&mut human);
    let ok = agg.ok();
    human.push_str(if ok { "all checks passed\n" } else { "CHECKS FAILED\n" });
    Ok(Report {
        human,
        json: json!({
            "command": "compare",
            "name": name,
            "checks": agg.json(),
        }),
        ok,
    })
}

fn kind_name(kind: SubdivisionKind) -> &'static str {
    match kind {
        SubdivisionKind::Barycentric => "barycentric",
        SubdivisionKind::Star => "star",
        SubdivisionKind::Blowup => "blowup",
    }
}

pub fn subdivide(file: &Path, op: &SubdivideOp) -> Result<Report, String> {
    let opened = open_complex(file)?;
    let name = opened.doc.name.clone();
    let (c, _) = match opened.parsed {
        Err(rep) => return Ok(invalid_complex("subdivide", &name, &rep)),
        Ok(p) => p,
    };
    let mut table = ArrowTable::new();
    let h = table.register_complex(c);
    let outcome = match op {
        SubdivideOp::Barycentric => Ok(barycentric(&mut table, h)),
        SubdivideOp::Star(center) => star_subdivide(&mut table, h, &StratumId(center.clone())),
        SubdivideOp::Blowup { center, profile } => {
            let center = StratumId(center.clone());
            let profile = match profile {
                None => IntersectionProfile::default_profile(center),
                Some(path) => {
                    profile_of_document(&load_json::<ProfileDocument>(path)?, center)?
                }
            };
            blowup_subdivide(&mut table, h, &profile)
        }
    };
    let r = match outcome {
        Ok(r) => r,
        Err(SubdivideError::UnknownCenter { id }) => {
            return Err(format!("unknown center stratum {id}"));
        }
        Err(SubdivideError::Profile { report }) => {
            return Ok(Report {
                human: format!("profile: INCONSISTENT\n{report}"),
                json: json!({
                    "command": "subdivide",
                    "name": name,
                    "violations": violations_json(&report),
                }),
                ok: false,
            });
        }
    };
    let doc = document_of_complex(table.complex(r.derived), None);
    let text = serde_json::to_string_pretty(&doc).expect("document serializes");
    let center = r.center.map(|s0| table.complex(r.base).stratum(s0).id.to_string());
    Ok(Report {
        human: format!("{text}\n"),
        json: json!({
            "command": "subdivide",
            "name": name,
            "kind": kind_name(r.kind),
            "center": center,
            "derived": serde_json::to_value(&doc).expect("document serializes"),
        }),
        ok: true,
    })
}

pub fn resolve(file: &Path) -> Result<Report, String> {
    let opened = open_complex(file)?;
    let name = opened.doc.name.clone();
    let (c, lattice) = match opened.parsed {
        Err(rep) => return Ok(invalid_complex("resolve", &name, &rep)),
        Ok(p) => p,
    };
    let Some(cc) = lattice else {
        return Err(format!("{name} has no lattice data; resolve needs cone data"));
    };
    let mut table = ArrowTable::new();
    let h = table.register_complex(c);
    let res = match toric_resolve(&mut table, h, &cc) {
        Ok(res) => res,
        Err(LatticeError::Invalid { report }) => {
            return Ok(Report {
                human: format!("cone complex: INVALID\n{report}"),
                json: json!({
                    "command": "resolve",
                    "name": name,
                    "violations": violations_json(&report),
                }),
                ok: false,
            });
        }
        Err(e @ LatticeError::NotSimplicial { .. }) => {
            return Ok(Report {
                human: format!("{e}\n"),
                json: json!({
                    "command": "resolve",
                    "name": name,
                    "violations": [{"code": "not-simplicial", "message": e.to_string()}],
                }),
                ok: false,
            });
        }
        Err(e) => return Err(e.to_string()),
    };
    let mut human = format!("resolving {name}: {} cone(s)\n", cc.cones.len());
    let mut steps = Vec::new();
    for (i, st) in res.steps.iter().enumerate() {
        let vector: Vec<String> = st.vector.iter().map(i64::to_string).collect();
        let _ = writeln!(
            human,
            "step {}: star at {} along ({}); multiplicity was {} on {} cone(s)",
            i + 1,
            st.center,
            vector.join(", "),
            st.max_multiplicity,
            st.cones_at_max
        );
        steps.push(json!({
            "center": st.center.to_string(),
            "vector": st.vector,
            "max_multiplicity": st.max_multiplicity,
            "cones_at_max": st.cones_at_max,
        }));
    }
    let smooth = is_smooth(&res.final_lattice).map_err(|e| e.to_string())?;
    let ok = smooth.is_none();
    match &smooth {
        None => {
            let _ = writeln!(human, "smooth after {} step(s)", res.steps.len());
        }
        Some(id) => {
            let _ = writeln!(human, "NOT SMOOTH: cone {id} has multiplicity above one");
        }
    }
    let final_doc =
        document_of_complex(table.complex(res.final_handle), Some(&res.final_lattice));
    Ok(Report {
        human,
        json: json!({
            "command": "resolve",
            "name": name,
            "steps": steps,
            "smooth": ok,
            "final": serde_json::to_value(&final_doc).expect("document serializes"),
        }),
        ok,
    })
}

pub fn homology(file: &Path, realization: Option<&Path>) -> Result<Report, String> {
    let opened = open_complex(file)?;
    let name = opened.doc.name.clone();
    let (c, _) = match opened.parsed {
        Err(rep) => return Ok(invalid_complex("homology", &name, &rep)),
        Ok(p) => p,
    };
    let mut table = ArrowTable::new();
    let h = table.register_complex(c);
    let (r, coefficients) = match realization {
        None => (AbelianRealization::constant(table.complex(h)), "constant coefficients".to_string()),
        Some(path) => (
            realization_of_document(&load_json::<RealizationDocument>(path)?)?,
            format!("realization {}", path.display()),
        ),
    };
    let cech = build_cech(&table, h, BuildMode::Bounded);
    let icc = match realize(&table, &cech, &r) {
        Ok(icc) => icc,
        Err(RealizeError::Invalid { report }) => {
            return Ok(Report {
                human: format!("realization: INVALID\n{report}"),
                json: json!({
                    "command": "homology",
                    "name": name,
                    "violations": violations_json(&report),
                }),
                ok: false,
            });
        }
        Err(e @ RealizeError::SquareNonzero { .. }) => {
            return Ok(Report {
                human: format!("{e}\n"),
                json: json!({
                    "command": "homology",
                    "name": name,
                    "violations": [{"code": "square", "message": e.to_string()}],
                }),
                ok: false,
            });
        }
    };
    let groups = homology_groups(&icc);
    let mut human = format!("homology of the dual complex of {name} ({coefficients}):\n");
    let mut groups_json = serde_json::Map::new();
    for (&n, g) in &groups {
        let _ = writeln!(human, "  H_{n} = {g}");
        groups_json.insert(
            n.to_string(),
            json!({
                "betti": g.betti,
                "torsion": g.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            }),
        );
    }
    let _ = writeln!(human, "Euler characteristic: {}", icc.euler_characteristic());
    Ok(Report {
        human,
        json: json!({
            "command": "homology",
            "name": name,
            "homology": groups_json,
            "euler_characteristic": icc.euler_characteristic(),
        }),
        ok: true,
    })
}

/// Formats a volume class ordered by the codimension where each label
/// first appears, then by label, matching the order strata are listed in
/// the formula.
fn format_class_by_codim(
    c: &StratifiedComplex,
    class: &K0Class,
    quotient: Option<&LabelQuotient>,
) -> String {
    let mut position: BTreeMap<ClassLabel, (usize, ClassLabel)> = BTreeMap::new();
    for s in 0..c.strata().len() {
        let label = &c.stratum(s).class;
        let rep = quotient.map_or_else(|| label.clone(), |q| q.representative(label));
        let key = (c.codim(s), rep.clone());
        position
            .entry(rep)
            .and_modify(|k| {
                if key < *k {
                    *k = key.clone();
                }
            })
            .or_insert(key);
    }
    let mut items: Vec<(&ClassLabel, i64)> =
        class.coefficients.iter().map(|(l, &coeff)| (l, coeff)).collect();
    items.sort_by_key(|(l, _)| {
        position.get(*l).cloned().unwrap_or_else(|| (usize::MAX, (*l).clone()))
    });
    if items.is_empty() {
        return "0".to_string();
    }
    let mut parts = Vec::with_capacity(items.len());
    for (l, coeff) in items {
        let sign = if coeff < 0 { "-" } else { "+" };
        let mag = coeff.unsigned_abs();
        if mag == 1 {
            parts.push(format!("{sign}[{l}]"));
        } else {
            parts.push(format!("{sign}{mag}[{l}]"));
        }
    }
    parts.join(" ")
}

pub fn volume(
    file: &Path,
    quotient: Option<&Path>,
    point: Option<&str>,
) -> Result<Report, String> {
    let opened = open_complex(file)?;
    let name = opened.doc.name.clone();
    let (c, _) = match opened.parsed {
        Err(rep) => return Ok(invalid_complex("volume", &name, &rep)),
        Ok(p) => p,
    };
    let mut table = ArrowTable::new();
    let h = table.register_complex(c);
    let formula = motivic_volume_formula(table.complex(h));
    let from_cech = class_of(&table, h);
    if formula != from_cech {
        let mut rep = ValidationReport::new();
        rep.push(
            "volume-mismatch",
            format!("formula gives {formula}, covering complex gives {from_cech}"),
        );
        return Ok(Report {
            human: format!("volume: INCONSISTENT\n{rep}"),
            json: json!({
                "command": "volume",
                "name": name,
                "violations": violations_json(&rep),
            }),
            ok: false,
        });
    }
    let q = match quotient {
        None => None,
        Some(path) => Some(quotient_of_document(&load_json::<QuotientDocument>(path)?)),
    };
    let class = match &q {
        None => formula,
        Some(q) => apply_quotient(&formula, q),
    };
    let line = format_class_by_codim(table.complex(h), &class, q.as_ref());
    let mut human = format!("{line}\n");
    let mut trivial = None;
    if let Some(pt) = point {
        let pt_label = ClassLabel(pt.to_string());
        let target = q.as_ref().map_or_else(|| pt_label.clone(), |q| q.representative(&pt_label));
        let t = is_trivial_class(&class, &target);
        trivial = Some(t);
        let _ = writeln!(
            human,
            "{} against the point label [{pt}]",
            if t { "trivial" } else { "non-trivial" }
        );
    }
    let class_json: serde_json::Map<String, Value> = class
        .coefficients
        .iter()
        .map(|(l, &coeff)| (l.0.clone(), json!(coeff)))
        .collect();
    Ok(Report {
        human,
        json: json!({
            "command": "volume",
            "name": name,
            "class": class_json,
            "display": line,
            "point": point,
            "trivial": trivial,
        }),
        ok: true,
    })
}
