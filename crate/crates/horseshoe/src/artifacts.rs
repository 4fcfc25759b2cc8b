//! Deterministic artifact emission: fixed-format floats, CSV, JSON and a
//! dependency-free SVG step plot.

use std::fmt::Write as _;
use std::path::Path;

use crate::cantor::DimensionEstimate;
use crate::error::Result;
use crate::spectra::{DimensionCurve, PrunedSystem, SpectrumSlice};

/// Fixed 12-decimal rendering; the single float format used in artifacts.
pub fn fmt12(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.12}", x)
}

/// JSON value rendering: non-finite floats become null.
pub fn json_num(x: f64) -> String {
    if x.is_finite() {
        fmt12(x)
    } else {
        "null".into()
    }
}

pub fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// FNV-1a 64-bit digest, hex encoded; stable input fingerprint.
pub fn digest(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{:016x}", h)
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, content)?;
    Ok(())
}

pub fn curve_csv(curve: &DimensionCurve) -> String {
    let mut out = String::from("t,D_u,D_s,method,error\n");
    for s in &curve.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt12(s.t),
            fmt12(s.d_u),
            fmt12(s.d_s),
            s.method,
            fmt12(s.error)
        );
    }
    out
}

pub fn spectrum_csv(slice: &SpectrumSlice) -> String {
    let mut out = String::from("value,kind,period_bound\n");
    for &v in &slice.values {
        let _ = writeln!(out, "{},{},{}", fmt12(v), slice.kind, slice.max_period);
    }
    out
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 420.0;
const ML: f64 = 60.0;
const MR: f64 = 20.0;
const MT: f64 = 20.0;
const MB: f64 = 50.0;

fn c2(x: f64) -> String {
    format!("{:.2}", x)
}

/// Step-plus-marker plot of a dimension curve: D_u as a solid stepped
/// polyline with circle markers, D_s dashed with square markers.
pub fn curve_svg(curve: &DimensionCurve) -> String {
    assert!(!curve.samples.is_empty());
    let (mut t0, mut t1) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut d_max = 0.0f64;
    for s in &curve.samples {
        t0 = t0.min(s.t);
        t1 = t1.max(s.t);
        d_max = d_max.max(s.d_u).max(s.d_s);
    }
    if t1 - t0 < 1e-12 {
        t0 -= 0.5;
        t1 += 0.5;
    }
    let d_top = (d_max.max(1.0)) * 1.05;
    let px = |t: f64| ML + (t - t0) / (t1 - t0) * (SVG_W - ML - MR);
    let py = |d: f64| SVG_H - MB - d / d_top * (SVG_H - MT - MB);

    let step_path = |pick: &dyn Fn(&crate::spectra::CurveSample) -> f64| -> String {
        let mut p = String::new();
        for (i, s) in curve.samples.iter().enumerate() {
            let x = px(s.t);
            let y = py(pick(s));
            if i == 0 {
                let _ = write!(p, "M {} {}", c2(x), c2(y));
            } else {
                let _ = write!(p, " H {} V {}", c2(x), c2(y));
            }
        }
        p
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        SVG_W, SVG_H, SVG_W, SVG_H
    );
    let _ = writeln!(svg, "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>", SVG_W, SVG_H);
    // axes
    let _ = writeln!(
        svg,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        c2(ML),
        c2(SVG_H - MB),
        c2(SVG_W - MR),
        c2(SVG_H - MB)
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        c2(ML),
        c2(MT),
        c2(ML),
        c2(SVG_H - MB)
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">t</text>",
        c2((ML + SVG_W - MR) / 2.0),
        c2(SVG_H - 12.0)
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">dimension</text>",
        c2((MT + SVG_H - MB) / 2.0),
        c2((MT + SVG_H - MB) / 2.0)
    );
    // range labels
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
        c2(px(t0)),
        c2(SVG_H - MB + 16.0),
        fmt12(t0)
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
        c2(px(t1)),
        c2(SVG_H - MB + 16.0),
        fmt12(t1)
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
        c2(ML - 6.0),
        c2(py(0.0) + 4.0),
        fmt12(0.0)
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
        c2(ML - 6.0),
        c2(py(d_top) + 4.0),
        fmt12(d_top)
    );
    // curves
    let _ = writeln!(
        svg,
        "<path d=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>",
        step_path(&|s| s.d_u)
    );
    let _ = writeln!(
        svg,
        "<path d=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"5 3\"/>",
        step_path(&|s| s.d_s)
    );
    for s in &curve.samples {
        let _ = writeln!(
            svg,
            "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#1f77b4\"/>",
            c2(px(s.t)),
            c2(py(s.d_u))
        );
        let _ = writeln!(
            svg,
            "<rect x=\"{}\" y=\"{}\" width=\"5\" height=\"5\" fill=\"#d62728\"/>",
            c2(px(s.t) - 2.5),
            c2(py(s.d_s) - 2.5)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn dimension_json(est: &DimensionEstimate) -> String {
    format!(
        "{{\"value\": {}, \"method\": {}, \"error_bound\": {}, \"depth\": {}, \"scale_min\": {}, \"scale_max\": {}}}",
        json_num(est.value),
        json_str(&est.method.to_string()),
        json_num(est.error_bound),
        est.depth,
        est.scales.0,
        est.scales.1
    )
}

pub fn spectrum_dim_json(slice: &SpectrumSlice, est: &DimensionEstimate) -> String {
    format!(
        "{{\n  \"kind\": {},\n  \"threshold\": {},\n  \"count\": {},\n  \"max_period\": {},\n  \"middle_bound\": {},\n  \"dimension\": {}\n}}\n",
        json_str(&slice.kind.to_string()),
        json_num(slice.threshold),
        slice.values.len(),
        slice.max_period,
        slice.middle_bound,
        dimension_json(est)
    )
}

pub fn prune_json(p: &PrunedSystem) -> String {
    let mut comps = String::new();
    for (i, (c, &d)) in p.components.iter().zip(&p.dimensions).enumerate() {
        if i > 0 {
            comps.push_str(",\n");
        }
        let _ = write!(
            comps,
            "    {{\"size\": {}, \"nontrivial\": {}, \"dimension\": {}, \"least_vertex\": {}}}",
            c.vertex_ids.len(),
            c.nontrivial,
            json_num(d),
            json_str(&p.graph.vertices[c.vertex_ids[0]].to_string())
        );
    }
    format!(
        "{{\n  \"threshold\": {},\n  \"window_width\": {},\n  \"masked_vertices\": {},\n  \"components\": [\n{}\n  ],\n  \"selected\": {},\n  \"selected_dimension\": {}\n}}\n",
        json_num(p.threshold),
        p.graph.width,
        p.mask.iter().filter(|&&m| m).count(),
        comps,
        p.selected,
        json_num(p.selected_dimension())
    )
}

/// report.json: command, input digest, emitted files, summary values and
/// warnings. Deliberately excludes wall-clock time so identical inputs
/// produce identical bytes.
pub fn report_json(
    command: &str,
    input_digest: &str,
    files: &[String],
    summary: &std::collections::BTreeMap<String, String>,
    warnings: &[String],
) -> String {
    let files_json = files
        .iter()
        .map(|f| json_str(f))
        .collect::<Vec<_>>()
        .join(", ");
    let warn_json = warnings
        .iter()
        .map(|w| json_str(w))
        .collect::<Vec<_>>()
        .join(", ");
    let mut summary_json = String::new();
    for (i, (k, v)) in summary.iter().enumerate() {
        if i > 0 {
            summary_json.push_str(",\n");
        }
        let _ = write!(summary_json, "    {}: {}", json_str(k), v);
    }
    format!(
        "{{\n  \"command\": {},\n  \"input_digest\": {},\n  \"files\": [{}],\n  \"summary\": {{\n{}\n  }},\n  \"warnings\": [{}]\n}}\n",
        json_str(command),
        json_str(input_digest),
        files_json,
        summary_json,
        warn_json
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::Method;
    use crate::spectra::CurveSample;

    fn sample(t: f64, d: f64) -> CurveSample {
        CurveSample {
            t,
            d_u: d,
            d_s: d,
            method: Method::PressureRoot,
            error: 1e-10,
        }
    }

    #[test]
    fn fmt12_is_fixed_width_fraction() {
        assert_eq!(fmt12(0.5), "0.500000000000");
        assert_eq!(fmt12(-0.0), "0.000000000000");
        assert_eq!(fmt12(2.0 / 3.0), "0.666666666667");
    }

    #[test]
    fn digest_stable() {
        assert_eq!(digest(b"abc"), digest(b"abc"));
        assert_ne!(digest(b"abc"), digest(b"abd"));
    }

    #[test]
    fn csv_schemas() {
        let curve = DimensionCurve {
            samples: vec![sample(0.5, 0.0), sample(1.0, 0.6309)],
        };
        let csv = curve_csv(&curve);
        assert!(csv.starts_with("t,D_u,D_s,method,error\n"));
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.contains("pressure-root"));
    }

    #[test]
    fn svg_single_sample() {
        let curve = DimensionCurve {
            samples: vec![sample(1.0, 0.5)],
        };
        let svg = curve_svg(&curve);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<circle").count(), 1);
    }

    #[test]
    fn svg_two_samples_have_step() {
        let curve = DimensionCurve {
            samples: vec![sample(0.0, 0.2), sample(1.0, 0.7)],
        };
        let svg = curve_svg(&curve);
        assert!(svg.contains(" H "));
        assert!(svg.contains(" V "));
    }

    #[test]
    fn svg_monotone_input_monotone_pixels() {
        let curve = DimensionCurve {
            samples: vec![sample(0.0, 0.1), sample(0.5, 0.4), sample(1.0, 0.9)],
        };
        let svg = curve_svg(&curve);
        // marker y coordinates decrease (SVG y axis points down)
        let ys: Vec<f64> = svg
            .lines()
            .filter(|l| l.starts_with("<circle"))
            .map(|l| {
                let cy = l.split("cy=\"").nth(1).unwrap();
                cy.split('"').next().unwrap().parse().unwrap()
            })
            .collect();
        assert!(ys.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn svg_deterministic() {
        let curve = DimensionCurve {
            samples: vec![sample(0.0, 0.2), sample(1.0, 0.7)],
        };
        assert_eq!(curve_svg(&curve), curve_svg(&curve));
    }
}
