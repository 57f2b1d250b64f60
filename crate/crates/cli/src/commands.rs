//! Command implementations: each returns one [`Report`].

use crate::report::{rv, rv_approx, Report};
use crate::schema::{
    FiberDoc, FiberGolden, FibrationDoc, FibrationGolden, InputDocument,
    MiyaokaDoc, MiyaokaGolden, PointDoc, PointGolden, SectionDataDoc,
};
use fibercalc_core::basechange::{choose_e, local_model, pullback_fiber};
use fibercalc_core::fiber::FiberGraph;
use fibercalc_core::heights::{
    check_canonical_class, check_height_bound, miyaoka_check, miyaoka_m,
    point_invariants, refined_height_bound, validate_fibration, AdeKind,
    BoundReport, Verdict,
};
use fibercalc_core::invariants::{
    check_fiber_bound, check_scaling, fiber_pipeline, global_invariants,
    FiberPipeline, FibrationSummary,
};
use fibercalc_core::resolution::{check_resolution_bounds, resolve, ResolutionLog};
use fibercalc_core::{rat, Error, Result};
use num_traits::Zero;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::SatisfiedStrict => "satisfied-strict",
        Verdict::SatisfiedEquality => "satisfied-equality",
        Verdict::Violated => "violated",
    }
}

fn bound_value(report: &BoundReport) -> Value {
    json!({
        "verdict": verdict_str(report.verdict),
        "value": rv(&report.value),
        "bound": rv(&report.bound),
        "margin": rv_approx(&report.margin),
        "strict_required": report.strict_required,
        "inconsistency": report.inconsistency,
    })
}

/// Fold a bound verdict into the report: violations and broken side
/// conditions fail the run.
fn apply_bound(report: &mut Report, label: &str, bound: &BoundReport) {
    match bound.verdict {
        Verdict::Violated => {
            report.violation(format!(
                "{label} violated: value {} exceeds bound {}{}",
                bound.value,
                bound.bound,
                if bound.strict_required && bound.margin.is_zero() {
                    " (equality, but strict inequality is required)"
                } else {
                    ""
                }
            ));
        }
        Verdict::SatisfiedEquality => {
            if let Some(note) = &bound.inconsistency {
                report.violation(format!("{label} equality inconsistency: {note}"));
            }
        }
        Verdict::SatisfiedStrict => {}
    }
}

fn load(path: &Path) -> Result<InputDocument> {
    InputDocument::load(path)
}

fn expect_fiber(doc: InputDocument) -> Result<(String, FiberDoc, Option<FiberGolden>)> {
    match doc {
        InputDocument::Fiber { name, fiber, golden } => Ok((name, fiber, golden)),
        other => Err(Error::input(format!(
            "expected a fiber document, found kind {:?}",
            other.kind()
        ))),
    }
}

fn invariants_value(pipeline: &FiberPipeline) -> Value {
    let inv = &pipeline.invariants;
    json!({
        "c1_sq": rv(&inv.c1_sq),
        "c2": rv(&inv.c2),
        "chi": rv(&inv.chi),
        "c_minus_1": rv(&inv.c_minus_1),
        "alpha_total": inv.alpha_total,
        "e_used": inv.e_used,
    })
}

fn resolution_value(log: &ResolutionLog, trace: bool) -> Value {
    let points: Vec<Value> = log
        .points
        .iter()
        .map(|p| {
            json!({
                "singularity": p.singularity,
                "blow_ups": p.steps.len(),
                "alpha": p.alpha,
                "delta": p.delta,
            })
        })
        .collect();
    let mut out = json!({
        "blow_ups": log.steps.len(),
        "points": points,
        "final_graph": graph_value(&log.final_graph),
        "final_squares": log.final_squares,
    });
    if trace {
        let steps: Vec<Value> = log
            .steps
            .iter()
            .map(|s| {
                json!({
                    "singularity": s.singularity,
                    "point": s.point,
                    "label": s.label,
                    "multiplicity": s.m,
                    "branch_multiplicity": s.mbar,
                    "exceptional_multiplicity": s.exc_multiplicity,
                })
            })
            .collect();
        out["steps"] = Value::Array(steps);
    }
    out
}

fn graph_value(g: &FiberGraph) -> Value {
    serde_json::to_value(FiberDoc::from_graph(g))
        .expect("graph serialization cannot fail")
}

fn fiber_bound_value(f: &FiberGraph) -> Result<Value> {
    let bound = check_fiber_bound(f)?;
    Ok(json!({
        "genus": bound.g,
        "pa_red": bound.pa_red,
        "margin_basic": rv_approx(&bound.margin_basic),
        "margin_sharp": bound.margin_sharp.as_ref().map(rv_approx),
        "applicable": bound.applicable,
        "holds": bound.holds,
    }))
}

pub fn cmd_invariants(path: &Path, trace: bool) -> Result<Report> {
    let (name, doc, golden) = expect_fiber(load(path)?)?;
    let graph = doc.to_graph()?;
    let pipeline = fiber_pipeline(&graph, None)?;
    let mut report = Report::new("invariants", Some(&name));
    report.set("invariants", invariants_value(&pipeline));
    report.set(
        "pipeline",
        json!({
            "blow_ups": pipeline.log.steps.len(),
            "contracted": pipeline.pullback.contracted_per_point,
            "routes_agree": true,
        }),
    );
    report.set("bound", fiber_bound_value(&graph)?);
    if trace {
        report.set("resolution", resolution_value(&pipeline.log, true));
    }
    for w in &pipeline.pullback.warnings {
        report.warn(w.clone());
    }
    if let Some(golden) = &golden {
        check_fiber_golden(&mut report, &pipeline, golden);
    }
    Ok(report)
}

fn check_fiber_golden(report: &mut Report, pipeline: &FiberPipeline, golden: &FiberGolden) {
    let inv = &pipeline.invariants;
    report.expect_eq("c1_sq", &inv.c1_sq, &golden.c1_sq.0);
    report.expect_eq("c2", &inv.c2, &golden.c2.0);
    report.expect_eq("chi", &inv.chi, &golden.chi.0);
    report.expect_eq("c_minus_1", &inv.c_minus_1, &golden.c_minus_1.0);
    if let Some(alpha) = golden.alpha_total {
        report.expect_eq("alpha_total", &inv.alpha_total, &alpha);
    }
    if let Some(e) = golden.e_used {
        report.expect_eq("e_used", &inv.e_used, &e);
    }
}

pub fn cmd_resolve(path: &Path, trace: bool) -> Result<Report> {
    let (name, doc, _) = expect_fiber(load(path)?)?;
    let graph = doc.to_graph()?;
    let log = resolve(&graph)?;
    let bounds = check_resolution_bounds(&log, &graph);
    let mut report = Report::new("resolve", Some(&name));
    report.set("resolution", resolution_value(&log, true));
    report.set(
        "bounds",
        json!({
            "per_step_margins_hold": bounds.steps_hold,
            "alpha_total": bounds.alpha_total,
            "pa_red": bounds.pa_red,
            "alpha_margin": bounds.alpha_margin,
            "alpha_bound_holds": bounds.alpha_holds,
            "alpha_equality": bounds.alpha_equality,
            "equality_iff_tree": bounds.equality_iff_pa_zero,
        }),
    );
    if !bounds.steps_hold {
        report.violation("a blow-up step violates the per-step margin rule");
    }
    if !bounds.alpha_holds {
        report.violation("total resolution defect exceeds its arithmetic-genus bound");
    }
    let _ = trace;
    Ok(report)
}

pub fn cmd_basechange(path: &Path, order: Option<i64>, trace: bool) -> Result<Report> {
    let (name, doc, _) = expect_fiber(load(path)?)?;
    let graph = doc.to_graph()?;
    let log = resolve(&graph)?;
    let e = order.unwrap_or_else(|| choose_e(&log));
    let pullback = pullback_fiber(&log.final_graph, e)?;

    let mut report = Report::new("basechange", Some(&name));
    report.set("order", json!(e));
    report.set("order_chosen", json!(order.is_none()));

    // Normalization table: one row per node of the resolved fiber.
    let resolved = &log.final_graph;
    let comps = resolved.components();
    let mut nodes = Vec::new();
    for &(i, j) in resolved.edges() {
        let (a, b) = (comps[i].multiplicity, comps[j].multiplicity);
        let model = local_model(a, b, e)?;
        nodes.push(json!({
            "between": [comps[i].id, comps[j].id],
            "multiplicities": [a, b],
            "points_above": model.points_above,
            "chain_length": model.chain_length_per_point,
        }));
    }
    report.set("nodes", Value::Array(nodes));
    report.set(
        "result",
        json!({
            "pieces": pullback
                .fibers_above
                .iter()
                .map(graph_value)
                .collect::<Vec<_>>(),
            "contracted": pullback.contracted_per_point,
            "c_minus_1": rv(&pullback.c_minus_1),
        }),
    );
    if trace {
        report.set(
            "contracted_labels",
            json!(pullback.contracted_labels),
        );
    }
    for w in &pullback.warnings {
        report.warn(w.clone());
    }
    Ok(report)
}

fn summary_of(doc: &FibrationDoc) -> Result<FibrationSummary> {
    doc.to_summary()
}

fn check_fibration(
    report: &mut Report,
    doc: &FibrationDoc,
    golden: Option<&FibrationGolden>,
) -> Result<FibrationSummary> {
    let fs = summary_of(doc)?;
    if fs.g < 2 {
        return Err(Error::unsupported(
            "inequality checks require fiber genus at least 2",
        ));
    }
    let global = global_invariants(&fs)?;
    report.set(
        "global_invariants",
        json!({
            "i_k": rv(&global.i_k),
            "i_chi": rv(&global.i_chi),
            "i_e": rv(&global.i_e),
            "isotrivial_indicated": global.isotrivial_indicated,
        }),
    );
    for v in &global.violations {
        report.violation(v.clone());
    }
    let canonical = check_canonical_class(&fs)?;
    report.set("canonical_class", bound_value(&canonical));
    apply_bound(report, "canonical class bound", &canonical);
    for w in validate_fibration(&fs, doc.non_trivial) {
        report.warn(w);
    }
    if let Some(golden) = golden {
        report.expect_eq("i_k", &global.i_k, &golden.i_k.0);
        report.expect_eq("i_chi", &global.i_chi, &golden.i_chi.0);
        report.expect_eq("i_e", &global.i_e, &golden.i_e.0);
        if let Some(margin) = &golden.canonical_margin {
            report.expect_eq("canonical_margin", &canonical.margin, &margin.0);
        }
    }
    Ok(fs)
}

fn check_point(
    report: &mut Report,
    fs: &FibrationSummary,
    point_doc: &PointDoc,
    section_data: Option<&SectionDataDoc>,
    golden: Option<&PointGolden>,
) -> Result<()> {
    let point = point_doc.to_point()?;
    let inv = point_invariants(&point);
    report.set(
        "point",
        json!({
            "h_k": rv(&inv.h_k),
            "d_disc": rv(&inv.d_disc),
        }),
    );
    let height = check_height_bound(fs, &point)?;
    report.set("height_bound", bound_value(&height));
    apply_bound(report, "height bound", &height);
    let refined = match section_data {
        Some(sd) => {
            let refined = refined_height_bound(fs, &sd.to_data())?;
            report.set(
                "refined_bound",
                json!({
                    "bound": rv(&refined.bound),
                    "chain_term": rv(&refined.chain_term),
                    "epsilon": rv(&refined.epsilon),
                }),
            );
            if inv.h_k > refined.bound {
                report.violation(format!(
                    "refined height bound violated: {} > {}",
                    inv.h_k, refined.bound
                ));
            }
            Some(refined)
        }
        None => None,
    };
    if let Some(golden) = golden {
        report.expect_eq("h_k", &inv.h_k, &golden.h_k.0);
        report.expect_eq("d_disc", &inv.d_disc, &golden.d_disc.0);
        if let Some(margin) = &golden.height_margin {
            report.expect_eq("height_margin", &height.margin, &margin.0);
        }
        if let Some(bound) = &golden.refined_bound {
            match &refined {
                Some(r) => report.expect_eq("refined_bound", &r.bound, &bound.0),
                None => report.violation(
                    "golden refined bound present but no section data supplied",
                ),
            }
        }
    }
    Ok(())
}

fn check_miyaoka(
    report: &mut Report,
    doc: &MiyaokaDoc,
    golden: Option<&MiyaokaGolden>,
) -> Result<()> {
    let mut ade = Vec::new();
    for entry in &doc.ade_list {
        ade.push(entry.to_kind()?);
    }
    let bound = miyaoka_check(
        doc.c2_s.0.clone(),
        doc.ksq_plus_d.0.clone(),
        &ade,
        doc.chi_top_d,
    )?;
    report.set("miyaoka", bound_value(&bound));
    apply_bound(report, "double-point bound", &bound);
    if let Some(golden) = golden {
        report.expect_eq("margin", &bound.margin, &golden.margin.0);
    }
    Ok(())
}

pub fn cmd_check(path: &Path) -> Result<Report> {
    let doc = load(path)?;
    let mut report = Report::new("check", Some(doc.name()));
    match &doc {
        InputDocument::Fibration { fibration, golden, .. } => {
            check_fibration(&mut report, fibration, golden.as_ref())?;
        }
        InputDocument::PointCheck {
            fibration,
            point,
            section_data,
            golden,
            ..
        } => {
            let mut fs_report = Report::new("check", None);
            let fs = check_fibration(&mut fs_report, fibration, None)?;
            // Keep the fibration verdicts alongside the point verdicts.
            report.set("fibration", fs_report.body.clone());
            for v in fs_report.violations {
                report.violation(v);
            }
            for w in fs_report.warnings {
                report.warn(w);
            }
            check_point(
                &mut report,
                &fs,
                point,
                section_data.as_ref(),
                golden.as_ref(),
            )?;
        }
        InputDocument::MiyaokaCheck { miyaoka, golden, .. } => {
            check_miyaoka(&mut report, miyaoka, golden.as_ref())?;
        }
        InputDocument::Fiber { .. } => {
            return Err(Error::input(
                "check expects a fibration, point-check, or miyaoka-check document; use `invariants` for fibers",
            ));
        }
    }
    Ok(report)
}

pub fn cmd_miyaoka(kind: &str, r: i64) -> Result<Report> {
    let kind_enum = match kind {
        "A" => AdeKind::A,
        "D" => AdeKind::D,
        "E" => AdeKind::E,
        other => {
            return Err(Error::input(format!(
                "unknown double-point type {other:?}; expected A, D, or E"
            )))
        }
    };
    let m = miyaoka_m(kind_enum, r)?;
    let mut report = Report::new("miyaoka", None);
    report.set("kind", json!(kind));
    report.set("r", json!(r));
    report.set("m", rv_approx(&m));
    Ok(report)
}

/// Resolve the corpus directory: explicit env override, else `./corpus`,
/// else the directory baked in at build time.
pub fn corpus_dir() -> PathBuf {
    if let Ok(dir) = std::env::var("FIBERCALC_CORPUS") {
        return PathBuf::from(dir);
    }
    let local = PathBuf::from("corpus");
    if local.is_dir() {
        return local;
    }
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus"))
}

fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::input(format!("cannot read corpus directory {}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    files.sort();
    Ok(files)
}

pub fn cmd_corpus_list(dir: &Path) -> Result<Report> {
    let mut report = Report::new("corpus list", None);
    let mut entries = Vec::new();
    for file in corpus_files(dir)? {
        let doc = InputDocument::load(&file)?;
        let genus = match &doc {
            InputDocument::Fiber { fiber, .. } => fiber.to_graph()?.fiber_genus().ok(),
            InputDocument::Fibration { fibration, .. }
            | InputDocument::PointCheck { fibration, .. } => Some(fibration.g),
            InputDocument::MiyaokaCheck { .. } => None,
        };
        entries.push(json!({
            "file": file.file_name().and_then(|n| n.to_str()),
            "name": doc.name(),
            "kind": doc.kind(),
            "genus": genus,
        }));
    }
    report.set("entries", Value::Array(entries));
    Ok(report)
}

pub fn cmd_corpus_run(dir: &Path) -> Result<Report> {
    let mut report = Report::new("corpus run", None);
    let mut entries = Vec::new();
    for file in corpus_files(dir)? {
        let text = std::fs::read_to_string(&file)
            .map_err(|e| Error::input(format!("cannot read {}: {e}", file.display())))?;
        let doc = InputDocument::parse(&text)?;
        let name = doc.name().to_string();
        let mut entry = Report::new("entry", Some(&name));

        // Serialization round-trip identity.
        let reserialized = serde_json::to_string(&doc)
            .map_err(|e| Error::internal(format!("cannot serialize document: {e}")))?;
        let reparsed = InputDocument::parse(&reserialized)?;
        if reparsed != doc {
            entry.violation("document does not round-trip through the schema");
        }

        run_corpus_entry(&mut entry, &doc)?;
        entries.push(json!({
            "name": name,
            "status": if entry.ok() { "ok" } else { "violation" },
            "violations": entry.violations.clone(),
            "warnings": entry.warnings.clone(),
        }));
        for v in entry.violations {
            report.violation(format!("{name}: {v}"));
        }
    }
    report.set("entries", Value::Array(entries));
    report.set("total", json!(report.body["entries"].as_array().map_or(0, Vec::len)));
    Ok(report)
}

fn run_corpus_entry(entry: &mut Report, doc: &InputDocument) -> Result<()> {
    match doc {
        InputDocument::Fiber { fiber, golden, .. } => {
            let graph = fiber.to_graph()?;
            let pipeline = fiber_pipeline(&graph, None)?;
            let inv = &pipeline.invariants;

            // Noether localization.
            if rat(12) * inv.chi.clone() != inv.c1_sq.clone() + inv.c2.clone() {
                entry.violation("12*chi differs from c1_sq + c2");
            }
            // Order independence of all four defects.
            let e = inv.e_used;
            for factor in [2, 3] {
                let other = fiber_pipeline(&graph, Some(factor * e))?.invariants;
                if other.c1_sq != inv.c1_sq
                    || other.c2 != inv.c2
                    || other.chi != inv.chi
                    || other.c_minus_1 != inv.c_minus_1
                {
                    entry.violation(format!(
                        "defects change under order {}e",
                        factor
                    ));
                }
            }
            // Semistable fibers have exactly zero defects, and vice versa.
            let class = graph.classify()?;
            let all_zero = inv.c1_sq.is_zero()
                && inv.c2.is_zero()
                && inv.chi.is_zero()
                && inv.c_minus_1.is_zero();
            if class.semistable != all_zero {
                entry.violation(
                    "semistability and vanishing of the defects disagree",
                );
            }
            // Resolution step and total bounds.
            let log = resolve(&graph)?;
            let bounds = check_resolution_bounds(&log, &graph);
            if !bounds.steps_hold {
                entry.violation("per-step resolution margin violated");
            }
            if !bounds.alpha_holds {
                entry.violation("total resolution defect exceeds its bound");
            }
            if !bounds.equality_iff_pa_zero {
                entry.violation("resolution defect equality rule violated");
            }
            // Defect bound margins, wherever the bound applies.
            let fb = check_fiber_bound(&graph)?;
            if fb.holds == Some(false) {
                entry.violation("fiber defect bound violated");
            }
            if let Some(golden) = golden {
                check_fiber_golden(entry, &pipeline, golden);
            }
        }
        InputDocument::Fibration { fibration, golden, .. } => {
            let fs = fibration.to_summary()?;
            let global = global_invariants(&fs)?;
            for v in &global.violations {
                entry.violation(v.clone());
            }
            for w in validate_fibration(&fs, fibration.non_trivial) {
                entry.warn(w);
            }
            if fs.g >= 2 {
                let canonical = check_canonical_class(&fs)?;
                apply_bound(entry, "canonical class bound", &canonical);
                if let Some(margin) = golden.as_ref().and_then(|g| g.canonical_margin.as_ref())
                {
                    entry.expect_eq("canonical_margin", &canonical.margin, &margin.0);
                }
            }
            if let Some(golden) = golden {
                entry.expect_eq("i_k", &global.i_k, &golden.i_k.0);
                entry.expect_eq("i_chi", &global.i_chi, &golden.i_chi.0);
                entry.expect_eq("i_e", &global.i_e, &golden.i_e.0);
            }
            // Degree-2 scaling audit on every corpus fibration.
            let d = fs
                .fibers
                .iter()
                .map(|f| {
                    resolve(f).map(|log| choose_e(&log))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(2i64, num_integer::lcm);
            let scaling = check_scaling(&fs, d, &[])?;
            if !scaling.scaling_holds {
                entry.violation(format!(
                    "global invariants do not scale by d = {d}"
                ));
            }
        }
        InputDocument::PointCheck {
            fibration,
            point,
            section_data,
            golden,
            ..
        } => {
            let fs = fibration.to_summary()?;
            if fs.g < 2 {
                return Err(Error::unsupported(
                    "point checks require fiber genus at least 2",
                ));
            }
            check_point(
                entry,
                &fs,
                point,
                section_data.as_ref(),
                golden.as_ref(),
            )?;
        }
        InputDocument::MiyaokaCheck { miyaoka, golden, .. } => {
            check_miyaoka(entry, miyaoka, golden.as_ref())?;
        }
    }
    Ok(())
}
