//! Command dispatch: turn a validated configuration into artifacts on disk.

use std::collections::BTreeMap;
use std::path::Path;

use crate::artifacts::{
    self, curve_csv, curve_svg, digest, dimension_json, json_num, json_str, prune_json,
    report_json, spectrum_csv, spectrum_dim_json, write_text,
};
use crate::cantor::dimension_counting;
use crate::config::{RunConfig, Validated, ValidatedHeight};
use crate::error::{Error, Result};
use crate::perturb::{
    find_regular_params, perturb_fiber, regularity_scan, transversality_scan,
    unique_maximizer_fraction, RegularityReport,
};
use crate::spectra::{
    du_curve, lagrange_value, markov_value, prune_below, slice_dimension, spectrum_slice,
    spectrum_slice_additive, DimensionCurve, SpectrumKind, TwoSidedPoint,
};
use crate::suspension::{flow_lagrange, suspension_dimension_check};
use crate::symbolic::periodic_orbits;

/// Result of one command: emitted files, report summary, selftest verdict.
#[derive(Debug)]
pub struct RunOutcome {
    pub files: Vec<String>,
    pub summary: BTreeMap<String, String>,
    pub warnings: Vec<String>,
    pub ok: bool,
}

impl RunOutcome {
    fn new() -> RunOutcome {
        RunOutcome {
            files: Vec::new(),
            summary: BTreeMap::new(),
            warnings: Vec::new(),
            ok: true,
        }
    }
}

fn spectrum_kind(kind: &str) -> SpectrumKind {
    if kind == "lagrange" {
        SpectrumKind::Lagrange
    } else {
        SpectrumKind::Markov
    }
}

/// Dispatch a command against raw config text, writing artifacts plus a
/// report.json into `out_dir`.
pub fn run(command: &str, config_text: &str, out_dir: &Path) -> Result<RunOutcome> {
    let cfg = RunConfig::parse(config_text)?;
    let v = cfg.validate()?;
    let mut out = match command {
        "dims" => cmd_dims(&v),
        "curve" => cmd_curve(&v, out_dir),
        "spectrum" => cmd_spectrum(&v, out_dir),
        "prune" => cmd_prune(&v, out_dir),
        "suspend-check" => cmd_suspend(&v, out_dir),
        "perturb" => cmd_perturb(&v, out_dir),
        "selftest" => cmd_selftest(&v, out_dir),
        other => Err(Error::Config(format!("unknown command {:?}", other))),
    }?;
    let report = report_json(
        command,
        &digest(config_text.as_bytes()),
        &out.files,
        &out.summary,
        &out.warnings,
    );
    write_text(&out_dir.join("report.json"), &report)?;
    out.files.push("report.json".into());
    Ok(out)
}

/// Threshold used when the configured one is infinite: the full system.
fn effective_threshold(v: &Validated) -> Result<f64> {
    if v.run.threshold.is_finite() {
        Ok(v.run.threshold)
    } else {
        Ok(v.height.table(&v.sft)?.max_value())
    }
}

fn cmd_dims(v: &Validated) -> Result<RunOutcome> {
    let table = v.height.table(&v.sft)?;
    let t = effective_threshold(v)?;
    let curve = du_curve(&v.sft, &v.model_u, &v.model_s, &table, &[t])?;
    let s = &curve.samples[0];
    let pruned = prune_below(&v.sft, &v.model_u, &table, t)?;
    let counting = dimension_counting(
        &v.model_u,
        &pruned.graph,
        &pruned.selected_mask(),
        v.run.r_min,
        v.run.r_max,
    )?;
    let mut out = RunOutcome::new();
    out.summary.insert("threshold".into(), json_num(t));
    out.summary.insert("d_u_pressure".into(), json_num(s.d_u));
    out.summary.insert("d_s_pressure".into(), json_num(s.d_s));
    out.summary
        .insert("d_u_counting".into(), dimension_json(&counting));
    if (s.d_u - counting.value).abs() > 0.1 {
        out.warnings
            .push("pressure and counting estimates disagree by more than 0.1".into());
    }
    Ok(out)
}

fn curve_for(v: &Validated) -> Result<DimensionCurve> {
    let table = v.height.table(&v.sft)?;
    let grid = if v.run.t_grid.is_empty() {
        // fall back to the distinct window values of the height
        table.range_values()
    } else {
        v.run.t_grid.clone()
    };
    du_curve(&v.sft, &v.model_u, &v.model_s, &table, &grid)
}

fn cmd_curve(v: &Validated, out_dir: &Path) -> Result<RunOutcome> {
    let curve = curve_for(v)?;
    write_text(&out_dir.join("curve.csv"), &curve_csv(&curve))?;
    write_text(&out_dir.join("curve.svg"), &curve_svg(&curve))?;
    let mut out = RunOutcome::new();
    out.files.push("curve.csv".into());
    out.files.push("curve.svg".into());
    out.summary
        .insert("samples".into(), curve.samples.len().to_string());
    let d_max = curve.samples.iter().fold(0.0f64, |a, s| a.max(s.d_u));
    out.summary.insert("d_u_max".into(), json_num(d_max));
    Ok(out)
}

fn cmd_spectrum(v: &Validated, out_dir: &Path) -> Result<RunOutcome> {
    let kind = spectrum_kind(&v.run.kind);
    let slice = match &v.height {
        ValidatedHeight::Additive(h) => spectrum_slice_additive(
            &v.sft,
            h,
            kind,
            v.run.threshold,
            v.run.max_period,
            v.run.middle_bound,
        )?,
        other => spectrum_slice(
            &v.sft,
            &other.table(&v.sft)?,
            kind,
            v.run.threshold,
            v.run.max_period,
            v.run.middle_bound,
        )?,
    };
    write_text(&out_dir.join("spectrum.csv"), &spectrum_csv(&slice))?;
    let mut out = RunOutcome::new();
    out.files.push("spectrum.csv".into());
    out.summary
        .insert("count".into(), slice.values.len().to_string());
    match slice_dimension(&slice, &v.run.resolutions) {
        Ok(est) => {
            write_text(
                &out_dir.join("spectrum_dim.json"),
                &spectrum_dim_json(&slice, &est),
            )?;
            out.files.push("spectrum_dim.json".into());
            out.summary.insert("dimension".into(), json_num(est.value));
        }
        Err(Error::DegenerateSet(msg)) => {
            out.warnings.push(format!("no dimension estimate: {}", msg));
        }
        Err(e) => return Err(e),
    }
    Ok(out)
}

fn cmd_prune(v: &Validated, out_dir: &Path) -> Result<RunOutcome> {
    let table = v.height.table(&v.sft)?;
    let t = effective_threshold(v)?;
    let pruned = prune_below(&v.sft, &v.model_u, &table, t)?;
    write_text(&out_dir.join("prune.json"), &prune_json(&pruned))?;
    let mut out = RunOutcome::new();
    out.files.push("prune.json".into());
    out.summary.insert("threshold".into(), json_num(t));
    out.summary
        .insert("components".into(), pruned.components.len().to_string());
    out.summary.insert(
        "selected_dimension".into(),
        json_num(pruned.selected_dimension()),
    );
    Ok(out)
}

fn suspension_parts<'a>(
    v: &'a Validated,
) -> Result<(
    &'a crate::suspension::FiberProfile,
    &'a crate::suspension::RoofFunction,
)> {
    match &v.height {
        ValidatedHeight::Suspension { profile, roof, .. } => Ok((profile, roof)),
        _ => Err(Error::Config(
            "height.kind: this command requires a suspension height".into(),
        )),
    }
}

fn cmd_suspend(v: &Validated, out_dir: &Path) -> Result<RunOutcome> {
    let (profile, roof) = suspension_parts(v)?;
    let table = v.height.table(&v.sft)?;
    // reduction: the flow Lagrange value of every short periodic orbit must
    // match the discrete Lagrange value of the induced height table
    let mut residual = 0.0f64;
    let orbits = periodic_orbits(&v.sft, v.run.max_period);
    let m = profile.radius().max(roof.radius());
    for o in &orbits {
        let x = TwoSidedPoint::periodic(&v.sft, o.clone())?;
        let horizon = v.run.horizon.max(m + o.period());
        let flow = flow_lagrange(profile, roof, &x, horizon)?;
        let disc = lagrange_value(&table, &x)?;
        residual = residual.max((flow - disc).abs());
    }
    let (dim_base, dim_susp, dim_residual) = suspension_dimension_check(
        &v.model_u,
        roof,
        v.run.depth.max(6),
        &v.run.resolutions,
    )?;
    let body = format!(
        "{{\n  \"orbits\": {},\n  \"reduction_residual\": {},\n  \"dim_base\": {},\n  \"dim_suspension\": {},\n  \"dim_residual\": {}\n}}\n",
        orbits.len(),
        json_num(residual),
        json_num(dim_base),
        json_num(dim_susp),
        json_num(dim_residual)
    );
    write_text(&out_dir.join("suspend.json"), &body)?;
    let mut out = RunOutcome::new();
    out.files.push("suspend.json".into());
    out.summary
        .insert("reduction_residual".into(), json_num(residual));
    out.summary
        .insert("dim_residual".into(), json_num(dim_residual));
    Ok(out)
}

fn regularity_json(r: &RegularityReport) -> String {
    let mut parts = Vec::new();
    for c in &r.conditions {
        parts.push(format!(
            "{{\"name\": {}, \"margin\": {}, \"pass\": {}, \"vacuous\": {}}}",
            json_str(&c.name),
            json_num(c.margin),
            c.pass,
            c.vacuous
        ));
    }
    format!("[{}]", parts.join(", "))
}

fn cmd_perturb(v: &Validated, out_dir: &Path) -> Result<RunOutcome> {
    let (profile, roof) = suspension_parts(v)?;
    let base = regularity_scan(&v.sft, profile, roof, 256)?;
    let (params, best) = find_regular_params(
        &v.sft,
        profile,
        roof,
        v.run.trials,
        v.run.seed,
        v.run.bound,
    )?;
    let best_profile = perturb_fiber(profile, params, v.run.bound)?;
    let table = v.height.table(&v.sft)?;
    let m = table.radius();
    let depth = v.run.depth.max(2 * m + 1);
    let trans = transversality_scan(
        &v.sft,
        &v.model_u,
        &v.model_s,
        &table,
        depth,
        v.run.epsilon,
    )?;
    let unique_base = unique_maximizer_fraction(&v.sft, profile, roof, 64)?;
    let unique_best = unique_maximizer_fraction(&v.sft, &best_profile, roof, 64)?;
    let body = format!(
        "{{\n  \"base_regularity\": {},\n  \"params\": {{\"a\": {}, \"b\": {}, \"c\": {}}},\n  \"best_regularity\": {},\n  \"transversality\": {{\"epsilon\": {}, \"points\": {}, \"pass_fraction\": {}, \"failures\": {}}},\n  \"unique_maximizer_fraction\": {{\"base\": {}, \"best\": {}}}\n}}\n",
        regularity_json(&base),
        json_num(params.a),
        json_num(params.b),
        json_num(params.c),
        regularity_json(&best),
        json_num(trans.epsilon),
        trans.points.len(),
        json_num(trans.pass_fraction()),
        trans.failures(),
        json_num(unique_base),
        json_num(unique_best)
    );
    write_text(&out_dir.join("perturb.json"), &body)?;
    let mut out = RunOutcome::new();
    out.files.push("perturb.json".into());
    out.summary
        .insert("base_all_pass".into(), base.all_pass().to_string());
    out.summary
        .insert("best_all_pass".into(), best.all_pass().to_string());
    out.summary.insert(
        "transversality_pass_fraction".into(),
        json_num(trans.pass_fraction()),
    );
    if !best.all_pass() {
        out.warnings
            .push("no regular parameter triple found within the trial budget".into());
    }
    Ok(out)
}

/// Invariant suite run against the configured system. Each check lands in
/// the report summary as pass/fail; any failure makes the run exit 1.
fn cmd_selftest(v: &Validated, out_dir: &Path) -> Result<RunOutcome> {
    let table = v.height.table(&v.sft)?;
    let mut out = RunOutcome::new();
    let check = |out: &mut RunOutcome, name: &str, pass: bool| {
        out.summary.insert(
            format!("check_{}", name),
            if pass { "\"pass\"" } else { "\"fail\"" }.into(),
        );
        if !pass {
            out.ok = false;
            out.warnings.push(format!("selftest check failed: {}", name));
        }
    };

    // periodic points: the Lagrange value equals the Markov value
    let mut periodic_ok = true;
    for o in periodic_orbits(&v.sft, v.run.max_period.min(4)) {
        let x = TwoSidedPoint::periodic(&v.sft, o)?;
        let l = lagrange_value(&table, &x)?;
        let m = markov_value(&table, &x)?;
        if (l - m).abs() > 1e-9 {
            periodic_ok = false;
        }
    }
    check(&mut out, "periodic_lagrange_equals_markov", periodic_ok);

    // pruning at the top threshold keeps every window
    let t_max = table.max_value();
    let full = prune_below(&v.sft, &v.model_u, &table, t_max)?;
    check(
        &mut out,
        "full_threshold_keeps_all",
        full.mask.iter().all(|&b| b),
    );

    // dimensions live in [0, 1]
    let d = full.selected_dimension();
    check(&mut out, "dimension_in_unit_range", (-1e-9..=1.0 + 1e-9).contains(&d));

    // the dimension curve is monotone along the grid
    let curve = curve_for(v)?;
    let monotone = curve
        .samples
        .windows(2)
        .all(|w| w[1].d_u >= w[0].d_u - 1e-9 && w[1].d_s >= w[0].d_s - 1e-9);
    check(&mut out, "curve_monotone", monotone);

    // artifact emission is byte deterministic
    let csv_a = curve_csv(&curve);
    let svg_a = curve_svg(&curve);
    let curve_b = curve_for(v)?;
    check(
        &mut out,
        "deterministic_artifacts",
        csv_a == curve_csv(&curve_b) && svg_a == curve_svg(&curve_b),
    );

    write_text(&out_dir.join("curve.csv"), &csv_a)?;
    write_text(&out_dir.join("curve.svg"), &svg_a)?;
    out.files.push("curve.csv".into());
    out.files.push("curve.svg".into());

    // a spectrum slice stays below its threshold and is sorted
    let slice = spectrum_slice(
        &v.sft,
        &table,
        spectrum_kind(&v.run.kind),
        f64::INFINITY,
        v.run.max_period.min(4),
        v.run.middle_bound.min(2),
    )?;
    let sorted = slice.values.windows(2).all(|w| w[0] < w[1]);
    check(&mut out, "spectrum_sorted_dedup", sorted);
    let below = slice.values.iter().all(|&x| x <= table.max_value() + 1e-9);
    check(&mut out, "spectrum_bounded_by_height", below);
    write_text(&out_dir.join("spectrum.csv"), &spectrum_csv(&slice))?;
    out.files.push("spectrum.csv".into());

    artifacts::write_text(
        &out_dir.join("spectrum_dim.json"),
        &match slice_dimension(&slice, &v.run.resolutions) {
            Ok(est) => spectrum_dim_json(&slice, &est),
            Err(_) => "{\"dimension\": null}\n".into(),
        },
    )?;
    out.files.push("spectrum_dim.json".into());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ternary_config() -> String {
        r#"{
            "schema_version": 1,
            "system": {"transitions": [[1, 1], [1, 1]]},
            "model_u": {"kind": "affine", "ratios": [0.3333333333333333, 0.3333333333333333], "offsets": [0.0, 0.6666666666666666]},
            "height": {"kind": "table", "radius": 0, "entries": [
                {"window": "0", "value": 0.0},
                {"window": "1", "value": 1.0}
            ]},
            "run": {"t_grid": [0.0, 0.5, 1.0]}
        }"#
        .to_string()
    }

    #[test]
    fn selftest_passes_and_emits() {
        let dir = tempfile::tempdir().unwrap();
        let out = run("selftest", &ternary_config(), dir.path()).unwrap();
        assert!(out.ok);
        assert!(dir.path().join("curve.csv").exists());
        assert!(dir.path().join("report.json").exists());
        let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
        assert!(report.contains("\"check_curve_monotone\": \"pass\""));
    }

    #[test]
    fn curve_command_reports_samples() {
        let dir = tempfile::tempdir().unwrap();
        let out = run("curve", &ternary_config(), dir.path()).unwrap();
        assert!(out.files.contains(&"curve.csv".into()));
        assert_eq!(out.summary["samples"], "3");
        let csv = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
        let last = csv.lines().last().unwrap();
        let fields: Vec<&str> = last.split(',').collect();
        assert_eq!(fields[0], "1.000000000000");
        let d_u: f64 = fields[1].parse().unwrap();
        assert!((d_u - 2f64.ln() / 3f64.ln()).abs() < 1e-8, "{}", d_u);
    }

    #[test]
    fn unknown_command_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = run("frobnicate", &ternary_config(), dir.path()).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn dims_agree_between_methods() {
        let dir = tempfile::tempdir().unwrap();
        let out = run("dims", &ternary_config(), dir.path()).unwrap();
        assert!(out.warnings.is_empty(), "{:?}", out.warnings);
    }

    #[test]
    fn report_bytes_deterministic() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        run("selftest", &ternary_config(), dir_a.path()).unwrap();
        run("selftest", &ternary_config(), dir_b.path()).unwrap();
        for name in ["curve.csv", "curve.svg", "spectrum.csv", "report.json"] {
            let a = std::fs::read(dir_a.path().join(name)).unwrap();
            let b = std::fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{} differs between runs", name);
        }
    }
}
