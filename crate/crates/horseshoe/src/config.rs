//! Run configuration: JSON schema, parsing and cross-field validation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cantor::CantorModel;
use crate::error::{Error, Result};
use crate::spectra::{AdditiveHeight, HeightTable};
use crate::suspension::{
    height_table_from_suspension, FiberCoeffs, FiberProfile, RoofFunction,
};
use crate::symbolic::{enumerate_words, Sft, Symbol, Word};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub system: SystemSpec,
    pub model_u: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_s: Option<ModelSpec>,
    pub height: HeightSpec,
    #[serde(default)]
    pub run: RunSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub transitions: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Affine { ratios: Vec<f64>, offsets: Vec<f64> },
    Gauss { digits: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub window: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileEntry {
    pub window: String,
    #[serde(default)]
    pub c0: f64,
    #[serde(default)]
    pub c1: f64,
    #[serde(default)]
    pub c2: f64,
    #[serde(default)]
    pub c3: f64,
    #[serde(default)]
    pub amp: f64,
    #[serde(default)]
    pub omega: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HeightSpec {
    /// Explicit locally constant table.
    Table {
        radius: usize,
        entries: Vec<TableEntry>,
    },
    /// Exact F = weight_s * x^s + weight_u * x^u; the table view uses the
    /// given window radius.
    Additive {
        weight_u: f64,
        weight_s: f64,
        #[serde(default = "default_radius")]
        radius: usize,
    },
    /// F = fiber maximum of a suspension profile under a roof.
    Suspension {
        roof_radius: usize,
        roof: Vec<TableEntry>,
        profile_radius: usize,
        profile: Vec<ProfileEntry>,
        #[serde(default = "default_radius")]
        m_out: usize,
    },
}

fn default_radius() -> usize {
    1
}

fn default_threshold() -> f64 {
    f64::INFINITY
}

fn is_infinite(x: &f64) -> bool {
    x.is_infinite()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSpec {
    pub t_grid: Vec<f64>,
    // JSON has no literal for infinity, so the "no threshold" default is
    // omitted on output and restored on input
    #[serde(
        default = "default_threshold",
        skip_serializing_if = "is_infinite"
    )]
    pub threshold: f64,
    pub kind: String,
    pub max_period: usize,
    pub middle_bound: usize,
    pub depth: usize,
    pub r_min: i64,
    pub r_max: i64,
    pub resolutions: Vec<f64>,
    pub seed: u64,
    pub trials: usize,
    pub bound: f64,
    pub epsilon: f64,
    pub horizon: usize,
}

impl Default for RunSpec {
    fn default() -> RunSpec {
        RunSpec {
            t_grid: Vec::new(),
            threshold: f64::INFINITY,
            kind: "markov".into(),
            max_period: 6,
            middle_bound: 2,
            depth: 8,
            r_min: 4,
            r_max: 12,
            resolutions: (4..=8).map(|k| 2f64.powi(-k)).collect(),
            seed: 1,
            trials: 100,
            bound: 0.1,
            epsilon: 0.1,
            horizon: 40,
        }
    }
}

/// Fully validated in-memory view of a configuration.
#[derive(Debug)]
pub struct Validated {
    pub sft: Sft,
    pub model_u: CantorModel,
    pub model_s: CantorModel,
    pub height: ValidatedHeight,
    pub run: RunSpec,
}

#[derive(Debug)]
pub enum ValidatedHeight {
    Table(HeightTable),
    Additive(AdditiveHeight),
    Suspension {
        profile: FiberProfile,
        roof: RoofFunction,
        m_out: usize,
    },
}

impl ValidatedHeight {
    /// Locally constant table view of the height, whatever its source.
    pub fn table(&self, sft: &Sft) -> Result<HeightTable> {
        match self {
            ValidatedHeight::Table(t) => Ok(t.clone()),
            ValidatedHeight::Additive(h) => Ok(h.window_table(sft, 1)),
            ValidatedHeight::Suspension {
                profile,
                roof,
                m_out,
            } => height_table_from_suspension(profile, roof, sft, *m_out),
        }
    }
}

fn parse_window(s: &str, field: &str) -> Result<Word> {
    let mut out = Vec::with_capacity(s.len());
    for ch in s.chars() {
        let d = ch
            .to_digit(10)
            .ok_or_else(|| Error::Config(format!("{}: window {:?} has non-digit symbol", field, s)))?;
        if d > 15 {
            return Err(Error::Config(format!("{}: symbol {} too large", field, d)));
        }
        out.push(d as Symbol);
    }
    if out.is_empty() {
        return Err(Error::Config(format!("{}: empty window", field)));
    }
    Ok(Word(out))
}

fn model_from_spec(spec: &ModelSpec, n: usize, field: &str) -> Result<CantorModel> {
    let model = match spec {
        ModelSpec::Affine { ratios, offsets } => CantorModel::Affine {
            ratios: ratios.clone(),
            offsets: offsets.clone(),
        },
        ModelSpec::Gauss { digits } => CantorModel::Gauss {
            digits: digits.clone(),
        },
    };
    model.validate()?;
    if model.symbol_count() != n {
        return Err(Error::Config(format!(
            "{}: {} symbols but the system has {}",
            field,
            model.symbol_count(),
            n
        )));
    }
    Ok(model)
}

fn table_from_entries(
    sft: &Sft,
    radius: usize,
    entries: &[TableEntry],
    field: &str,
) -> Result<HeightTable> {
    let mut values = BTreeMap::new();
    for (i, e) in entries.iter().enumerate() {
        let w = parse_window(&e.window, &format!("{}[{}].window", field, i))?;
        if !sft.admissible_word(w.symbols()) {
            return Err(Error::Config(format!(
                "{}[{}].window: {:?} not admissible",
                field, i, e.window
            )));
        }
        if values.insert(w, e.value).is_some() {
            return Err(Error::Config(format!(
                "{}[{}].window: duplicate window {:?}",
                field, i, e.window
            )));
        }
    }
    for w in enumerate_words(sft, 2 * radius + 1) {
        if !values.contains_key(&w) {
            return Err(Error::Config(format!(
                "{}: missing admissible window {}",
                field, w
            )));
        }
    }
    HeightTable::new(radius, values).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {}", field, msg)),
        other => other,
    })
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {}", e)))?;
        Ok(cfg)
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<Validated> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version: {} unsupported (expected {})",
                self.schema_version, SCHEMA_VERSION
            )));
        }
        let n = self.system.transitions.len();
        if n == 0 {
            return Err(Error::Config("system.transitions: empty matrix".into()));
        }
        let mut matrix = Vec::with_capacity(n);
        for (i, row) in self.system.transitions.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Config(format!(
                    "system.transitions[{}]: row length {} != {}",
                    i,
                    row.len(),
                    n
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(Error::Config(format!(
                        "system.transitions[{}][{}]: entry {} not 0/1",
                        i, j, v
                    )));
                }
            }
            matrix.push(row.iter().map(|&v| v == 1).collect::<Vec<bool>>());
        }
        let trimmed = Sft::validate(&matrix)?;
        if !trimmed.deleted.is_empty() {
            return Err(Error::Config(format!(
                "system.transitions: symbols {:?} have no bi-infinite extension",
                trimmed.deleted
            )));
        }
        let sft = trimmed.sft;
        let model_u = model_from_spec(&self.model_u, n, "model_u")?;
        let model_s = match &self.model_s {
            Some(spec) => model_from_spec(spec, n, "model_s")?,
            None => model_u.clone(),
        };
        let height = match &self.height {
            HeightSpec::Table { radius, entries } => {
                ValidatedHeight::Table(table_from_entries(&sft, *radius, entries, "height.entries")?)
            }
            HeightSpec::Additive {
                weight_u,
                weight_s,
                radius,
            } => {
                if !(weight_u.is_finite() && weight_s.is_finite()) {
                    return Err(Error::Config("height.weight_u/weight_s: not finite".into()));
                }
                if *radius != 1 {
                    return Err(Error::Config(
                        "height.radius: only radius 1 is supported for additive heights".into(),
                    ));
                }
                ValidatedHeight::Additive(AdditiveHeight {
                    model_u: model_u.clone(),
                    model_s: model_s.clone(),
                    weight_u: *weight_u,
                    weight_s: *weight_s,
                })
            }
            HeightSpec::Suspension {
                roof_radius,
                roof,
                profile_radius,
                profile,
                m_out,
            } => {
                let mut roof_values = BTreeMap::new();
                for (i, e) in roof.iter().enumerate() {
                    let w = parse_window(&e.window, &format!("height.roof[{}].window", i))?;
                    roof_values.insert(w, e.value);
                }
                for w in enumerate_words(&sft, 2 * roof_radius + 1) {
                    if !roof_values.contains_key(&w) {
                        return Err(Error::Config(format!(
                            "height.roof: missing admissible window {}",
                            w
                        )));
                    }
                }
                let roof = RoofFunction::new(*roof_radius, roof_values).map_err(prefix("height"))?;
                let mut coeffs = BTreeMap::new();
                for (i, e) in profile.iter().enumerate() {
                    let w = parse_window(&e.window, &format!("height.profile[{}].window", i))?;
                    coeffs.insert(
                        w,
                        FiberCoeffs {
                            c0: e.c0,
                            c1: e.c1,
                            c2: e.c2,
                            c3: e.c3,
                            amp: e.amp,
                            omega: e.omega,
                            phase: e.phase,
                        },
                    );
                }
                for w in enumerate_words(&sft, 2 * profile_radius + 1) {
                    if !coeffs.contains_key(&w) {
                        return Err(Error::Config(format!(
                            "height.profile: missing admissible window {}",
                            w
                        )));
                    }
                }
                let profile =
                    FiberProfile::new(*profile_radius, coeffs).map_err(prefix("height"))?;
                if *m_out < profile.radius().max(roof.radius()) {
                    return Err(Error::Config(format!(
                        "height.m_out: {} below profile/roof radius",
                        m_out
                    )));
                }
                ValidatedHeight::Suspension {
                    profile,
                    roof,
                    m_out: *m_out,
                }
            }
        };
        let run = self.run.clone();
        if run.t_grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Config("run.t_grid: not sorted".into()));
        }
        if run.t_grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::Config("run.t_grid: non-finite entry".into()));
        }
        if run.kind != "markov" && run.kind != "lagrange" {
            return Err(Error::Config(format!(
                "run.kind: {:?} is neither \"markov\" nor \"lagrange\"",
                run.kind
            )));
        }
        if run.max_period < 1 {
            return Err(Error::Config("run.max_period: must be >= 1".into()));
        }
        if run.resolutions.len() < 2 || run.resolutions.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::Config(
                "run.resolutions: need >= 2 positive resolutions".into(),
            ));
        }
        if !(run.r_max > run.r_min && run.r_min >= 1) {
            return Err(Error::Config(format!(
                "run.r_min/r_max: invalid scale range [{}, {}]",
                run.r_min, run.r_max
            )));
        }
        Ok(Validated {
            sft,
            model_u,
            model_s,
            height,
            run,
        })
    }
}

fn prefix(field: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Config(msg) => Error::Config(format!("{}.{}", field, msg)),
        other => other,
    }
}
