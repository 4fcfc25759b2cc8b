//! Height functions on the horseshoe, orbit values m and l, threshold
//! pruning to complete subhorseshoes, spectrum slices and dimension curves.

use std::collections::BTreeMap;

use crate::cantor::{
    box_count_dimension, cylinder_interval, dimension_or_zero,
    dimension_pressure, scale_front, CantorModel, DimensionEstimate, Method,
};
use crate::error::{Error, Result};
use crate::symbolic::{
    higher_block, scc_decompose, trim_mask, BlockGraph, Component, PeriodicOrbit, Sft, Symbol,
    Word,
};

/// Locally constant height function: a total table over admissible windows
/// of length 2 * radius + 1.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightTable {
    radius: usize,
    values: BTreeMap<Word, f64>,
}

impl HeightTable {
    pub fn new(radius: usize, values: BTreeMap<Word, f64>) -> Result<HeightTable> {
        let wlen = 2 * radius + 1;
        for (k, v) in &values {
            if k.len() != wlen {
                return Err(Error::Config(format!(
                    "height.table: window {} has length {}, expected {}",
                    k,
                    k.len(),
                    wlen
                )));
            }
            if !v.is_finite() {
                return Err(Error::Config(format!("height.table[{}] not finite", k)));
            }
        }
        Ok(HeightTable { radius, values })
    }

    /// Total table built by evaluating `f` on every admissible window.
    pub fn from_fn(sft: &Sft, radius: usize, f: impl Fn(&[Symbol]) -> f64) -> HeightTable {
        let mut values = BTreeMap::new();
        for w in crate::symbolic::enumerate_words(sft, 2 * radius + 1) {
            let v = f(w.symbols());
            values.insert(w, v);
        }
        HeightTable { radius, values }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn window_len(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn value(&self, window: &[Symbol]) -> Result<f64> {
        self.values
            .get(&Word(window.to_vec()))
            .copied()
            .ok_or_else(|| Error::InadmissibleWord(format!("window {:?} not in table", window)))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Word, f64)> {
        self.values.iter().map(|(k, &v)| (k, v))
    }

    /// Sorted distinct table values (the range of F).
    pub fn range_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.values.values().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    pub fn max_value(&self) -> f64 {
        self.values.values().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Table for the time-reversed system: window keys reversed.
    pub fn reversed(&self) -> HeightTable {
        let values = self
            .values
            .iter()
            .map(|(k, &v)| (k.reversed(), v))
            .collect();
        HeightTable {
            radius: self.radius,
            values,
        }
    }
}

/// An eventually periodic two-sided point: left^inf . middle . right^inf.
///
/// Layout positions: middle occupies 0..middle.len(), the right tail tiles
/// positions >= middle.len(), the left tail tiles positions < 0 with the
/// cycle aligned so position -1 carries the cycle's last symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoSidedPoint {
    pub left: PeriodicOrbit,
    pub middle: Word,
    pub right: PeriodicOrbit,
    pub origin: i64,
}

impl TwoSidedPoint {
    pub fn new(
        sft: &Sft,
        left: PeriodicOrbit,
        middle: Word,
        right: PeriodicOrbit,
    ) -> Result<TwoSidedPoint> {
        let x = TwoSidedPoint {
            left,
            middle,
            right,
            origin: 0,
        };
        let span_l = x.left.period() as i64 + 1;
        let span_r = x.middle.len() as i64 + x.right.period() as i64;
        for n in -span_l..=span_r {
            if !sft.admissible_pair(x.symbol_at(n), x.symbol_at(n + 1)) {
                return Err(Error::InadmissibleWord(format!(
                    "junction at position {}: {}{}",
                    n,
                    x.symbol_at(n),
                    x.symbol_at(n + 1)
                )));
            }
        }
        Ok(x)
    }

    pub fn periodic(sft: &Sft, orbit: PeriodicOrbit) -> Result<TwoSidedPoint> {
        TwoSidedPoint::new(sft, orbit.clone(), Word(vec![]), orbit)
    }

    pub fn with_origin(mut self, origin: i64) -> TwoSidedPoint {
        self.origin = origin;
        self
    }

    /// Symbol at layout position `n` (origin-independent).
    pub fn symbol_at(&self, n: i64) -> Symbol {
        let mid = self.middle.len() as i64;
        if n < 0 {
            let p = self.left.period() as i64;
            self.left.cycle.symbols()[n.rem_euclid(p) as usize]
        } else if n < mid {
            self.middle.symbols()[n as usize]
        } else {
            let p = self.right.period() as i64;
            self.right.cycle.symbols()[(n - mid).rem_euclid(p) as usize]
        }
    }

    pub fn window(&self, n: i64, radius: usize) -> Vec<Symbol> {
        let r = radius as i64;
        (n - r..=n + r).map(|k| self.symbol_at(k)).collect()
    }
}

/// m(x) = sup_n F(R^n x): exact maximum over the finitely many distinct
/// windows of an eventually periodic point.
pub fn markov_value(table: &HeightTable, x: &TwoSidedPoint) -> Result<f64> {
    let m = table.radius() as i64;
    let mid = x.middle.len() as i64;
    let lo = -(m + x.left.period() as i64);
    let hi = mid + m + x.right.period() as i64;
    let mut best = f64::NEG_INFINITY;
    for n in lo..=hi {
        best = best.max(table.value(&x.window(n, table.radius()))?);
    }
    Ok(best)
}

/// l(x) = limsup_n F(R^n x): maximum over the windows of the right
/// periodic tail.
pub fn lagrange_value(table: &HeightTable, x: &TwoSidedPoint) -> Result<f64> {
    let m = table.radius() as i64;
    let mid = x.middle.len() as i64;
    let start = mid + m;
    let mut best = f64::NEG_INFINITY;
    for n in start..start + x.right.period() as i64 {
        best = best.max(table.value(&x.window(n, table.radius()))?);
    }
    Ok(best)
}

/// The threshold-pruned system K_t with its component analysis.
#[derive(Debug, Clone)]
pub struct PrunedSystem {
    pub threshold: f64,
    pub graph: BlockGraph,
    /// Trimmed vertex mask: windows with F <= t that extend bi-infinitely.
    pub mask: Vec<bool>,
    pub components: Vec<Component>,
    /// Dimension per component (0 for trivial components).
    pub dimensions: Vec<f64>,
    /// Index into `components` of the selected subhorseshoe.
    pub selected: usize,
    pub model: CantorModel,
}

impl PrunedSystem {
    pub fn selected_dimension(&self) -> f64 {
        self.dimensions[self.selected]
    }

    pub fn selected_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.graph.vertex_count()];
        for &v in &self.components[self.selected].vertex_ids {
            m[v] = true;
        }
        m
    }
}

fn analyze_masked(
    model: &CantorModel,
    graph: BlockGraph,
    mask: Vec<bool>,
    threshold: f64,
) -> Result<PrunedSystem> {
    let mask = trim_mask(&graph, &mask);
    let components = scc_decompose(&graph, &mask);
    if !components.iter().any(|c| c.nontrivial) {
        return Err(Error::EmptyPrune);
    }
    let mut dimensions = Vec::with_capacity(components.len());
    for c in &components {
        if !c.nontrivial {
            dimensions.push(0.0);
            continue;
        }
        let mut cm = vec![false; graph.vertex_count()];
        for &v in &c.vertex_ids {
            cm[v] = true;
        }
        dimensions.push(dimension_pressure(model, &graph, &cm)?.value);
    }
    let mut selected = None;
    for (i, c) in components.iter().enumerate() {
        if !c.nontrivial {
            continue;
        }
        match selected {
            None => selected = Some(i),
            Some(j) if dimensions[i] > dimensions[j] + 1e-12 => selected = Some(i),
            _ => {}
        }
    }
    Ok(PrunedSystem {
        threshold,
        graph,
        mask,
        components,
        dimensions,
        selected: selected.unwrap(),
        model: model.clone(),
    })
}

/// K_t: the higher-block graph masked to windows with F <= t, trimmed and
/// decomposed; the selected component is the max-dimension subhorseshoe.
pub fn prune_below(
    sft: &Sft,
    model: &CantorModel,
    table: &HeightTable,
    t: f64,
) -> Result<PrunedSystem> {
    let graph = higher_block(sft, table.window_len());
    let mut mask = Vec::with_capacity(graph.vertex_count());
    for v in &graph.vertices {
        mask.push(table.value(v.symbols())? <= t);
    }
    analyze_masked(model, graph, mask, t)
}

/// Re-mask a pruned system excluding the forbidden windows, reselect, and
/// report the counting loss (ln N_before - ln N_after) / r0 at scale r0.
pub fn select_subhorseshoe(
    pruned: &PrunedSystem,
    forbidden: &[Word],
    r0: i64,
) -> Result<(PrunedSystem, f64)> {
    let mut mask = pruned.mask.clone();
    for w in forbidden {
        if let Some(i) = pruned.graph.vertex_index(w) {
            mask[i] = false;
        } else {
            return Err(Error::Config(format!(
                "forbidden window {} is not a vertex of the pruned graph",
                w
            )));
        }
    }
    let after = analyze_masked(&pruned.model, pruned.graph.clone(), mask, pruned.threshold)?;
    let n_before = scale_front(&pruned.model, &pruned.graph, &pruned.mask, r0)?.len() as f64;
    let n_after = scale_front(&after.model, &after.graph, &after.mask, r0)?.len() as f64;
    let delta = (n_before.ln() - n_after.ln()) / r0 as f64;
    Ok((after, delta))
}

#[derive(Debug, Clone)]
pub struct CurveSample {
    pub t: f64,
    pub d_u: f64,
    pub d_s: f64,
    pub method: Method,
    pub error: f64,
}

#[derive(Debug, Clone)]
pub struct DimensionCurve {
    pub samples: Vec<CurveSample>,
}

/// Dimension curve t -> (D_u(t), D_s(t)). D_s uses the reversed system:
/// transposed transitions, reversed windows, stable-side geometry.
pub fn du_curve(
    sft: &Sft,
    model_u: &CantorModel,
    model_s: &CantorModel,
    table: &HeightTable,
    t_grid: &[f64],
) -> Result<DimensionCurve> {
    if t_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Config("run.t_grid: not sorted".into()));
    }
    let rev_sft = sft.reversed();
    let rev_table = table.reversed();
    let mut samples = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let (d_u, e_u): (f64, f64) = match prune_below(sft, model_u, table, t) {
            Ok(p) => (p.selected_dimension(), 1e-10),
            Err(Error::EmptyPrune) => (0.0, 0.0),
            Err(e) => return Err(e),
        };
        let (d_s, e_s) = match prune_below(&rev_sft, model_s, &rev_table, t) {
            Ok(p) => (p.selected_dimension(), 1e-10),
            Err(Error::EmptyPrune) => (0.0, 0.0),
            Err(e) => return Err(e),
        };
        samples.push(CurveSample {
            t,
            d_u,
            d_s,
            method: Method::PressureRoot,
            error: e_u.max(e_s),
        });
    }
    Ok(DimensionCurve { samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Markov,
    Lagrange,
}

impl std::fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SpectrumKind::Markov => "markov",
            SpectrumKind::Lagrange => "lagrange",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumSlice {
    pub kind: SpectrumKind,
    pub threshold: f64,
    /// Sorted, deduplicated at resolution 1e-12.
    pub values: Vec<f64>,
    pub max_period: usize,
    pub middle_bound: usize,
}

fn dedup_values(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    for v in values {
        if out.last().map_or(true, |&l| v - l > 1e-12) {
            out.push(v);
        }
    }
    out
}

/// All middles of length <= bound (including the empty middle) that join
/// `left` to `right` admissibly.
fn middles_between(
    sft: &Sft,
    left: &PeriodicOrbit,
    right: &PeriodicOrbit,
    bound: usize,
) -> Vec<Word> {
    let l_last = *left.cycle.symbols().last().unwrap();
    let r_first = left_first(right);
    let mut out = Vec::new();
    if sft.admissible_pair(l_last, r_first) {
        out.push(Word(vec![]));
    }
    let mut stack: Vec<Vec<Symbol>> = (0..sft.symbol_count() as Symbol)
        .rev()
        .filter(|&a| sft.admissible_pair(l_last, a))
        .map(|a| vec![a])
        .collect();
    while let Some(w) = stack.pop() {
        let last = *w.last().unwrap();
        if sft.admissible_pair(last, r_first) {
            out.push(Word(w.clone()));
        }
        if w.len() < bound {
            for b in (0..sft.symbol_count() as Symbol).rev() {
                if sft.admissible_pair(last, b) {
                    let mut w2 = w.clone();
                    w2.push(b);
                    stack.push(w2);
                }
            }
        }
    }
    out
}

fn left_first(orbit: &PeriodicOrbit) -> Symbol {
    orbit.cycle.symbols()[0]
}

/// Slice of the Markov or Lagrange spectrum below `t`, generated from
/// eventually periodic points with tail periods <= max_period.
pub fn spectrum_slice(
    sft: &Sft,
    table: &HeightTable,
    kind: SpectrumKind,
    t: f64,
    max_period: usize,
    middle_bound: usize,
) -> Result<SpectrumSlice> {
    let orbits = crate::symbolic::periodic_orbits(sft, max_period);
    let mut values = Vec::new();
    match kind {
        SpectrumKind::Lagrange => {
            for o in &orbits {
                let x = TwoSidedPoint::periodic(sft, o.clone())?;
                let v = lagrange_value(table, &x)?;
                if v <= t {
                    values.push(v);
                }
            }
        }
        SpectrumKind::Markov => {
            for l in &orbits {
                for r in &orbits {
                    for mid in middles_between(sft, l, r, middle_bound) {
                        let x = TwoSidedPoint::new(sft, l.clone(), mid, r.clone())?;
                        let v = markov_value(table, &x)?;
                        if v <= t {
                            values.push(v);
                        }
                    }
                }
            }
        }
    }
    Ok(SpectrumSlice {
        kind,
        threshold: t,
        values: dedup_values(values),
        max_period,
        middle_bound,
    })
}

/// Box-count dimension of a slice's value set; a degenerate set counts as
/// dimension zero.
pub fn slice_dimension(slice: &SpectrumSlice, resolutions: &[f64]) -> Result<DimensionEstimate> {
    if slice.values.is_empty() {
        return Err(Error::DegenerateSet("empty spectrum slice".into()));
    }
    dimension_or_zero(box_count_dimension(&slice.values, resolutions))
}

/// Exact additive height F(x) = weight_s * x^s + weight_u * x^u, where x^u
/// realizes the forward symbols in `model_u` and x^s the backward symbols
/// in `model_s`.
#[derive(Debug, Clone)]
pub struct AdditiveHeight {
    pub model_u: CantorModel,
    pub model_s: CantorModel,
    pub weight_u: f64,
    pub weight_s: f64,
}

fn worst_symbol_ratio(model: &CantorModel) -> f64 {
    match model {
        CantorModel::Affine { ratios, .. } => ratios.iter().cloned().fold(0.0, f64::max),
        // one digit-1 step shrinks a continued-fraction cylinder by at
        // least the square of the golden ratio
        CantorModel::Gauss { .. } => 0.62,
    }
}

fn truncation_depth(model: &CantorModel) -> usize {
    let r = worst_symbol_ratio(model);
    let mut len = 1.0f64;
    for k in 1..200 {
        len *= r;
        if len < 1e-16 {
            return k;
        }
    }
    200
}

/// Geometric coordinate of a one-sided symbol stream: midpoint of the
/// cylinder deep enough that its length is below 1e-16.
fn stream_coordinate(model: &CantorModel, depth: usize, stream: impl Fn(usize) -> Symbol) -> f64 {
    let symbols: Vec<Symbol> = (0..depth).map(&stream).collect();
    cylinder_interval(model, &Word(symbols))
        .expect("stream symbols admissible for model")
        .midpoint()
}

impl AdditiveHeight {
    fn depths(&self) -> (usize, usize) {
        (truncation_depth(&self.model_u), truncation_depth(&self.model_s))
    }

    /// F(R^n x) for a two-sided point, exact to truncation error < 1e-15.
    pub fn value_at(&self, x: &TwoSidedPoint, n: i64) -> f64 {
        let (du, ds) = self.depths();
        let xu = stream_coordinate(&self.model_u, du, |k| x.symbol_at(n + k as i64));
        let xs = stream_coordinate(&self.model_s, ds, |k| x.symbol_at(n - 1 - k as i64));
        self.weight_u * xu + self.weight_s * xs
    }

    fn periodic_max(&self, orbit: &PeriodicOrbit) -> f64 {
        let p = orbit.period() as i64;
        let s = orbit.cycle.symbols();
        let (du, ds) = self.depths();
        let mut best = f64::NEG_INFINITY;
        for k in 0..p {
            let xu = stream_coordinate(&self.model_u, du, |j| {
                s[(k + j as i64).rem_euclid(p) as usize]
            });
            let xs = stream_coordinate(&self.model_s, ds, |j| {
                s[(k - 1 - j as i64).rem_euclid(p) as usize]
            });
            best = best.max(self.weight_u * xu + self.weight_s * xs);
        }
        best
    }

    /// sup_n F(R^n x): scan positions near the middle, then the exact
    /// periodic maxima of both tails.
    pub fn markov_value(&self, x: &TwoSidedPoint) -> f64 {
        let (du, ds) = self.depths();
        let reach = du.max(ds) as i64;
        let mid = x.middle.len() as i64;
        let lo = -(reach + x.left.period() as i64);
        let hi = mid + reach + x.right.period() as i64;
        let mut best = f64::NEG_INFINITY;
        for n in lo..=hi {
            best = best.max(self.value_at(x, n));
        }
        best.max(self.periodic_max(&x.left))
            .max(self.periodic_max(&x.right))
    }

    /// limsup_n F(R^n x): the exact maximum over the right tail's orbit.
    pub fn lagrange_value(&self, x: &TwoSidedPoint) -> f64 {
        self.periodic_max(&x.right)
    }

    /// Locally constant approximation: window value = height at cylinder
    /// midpoints of the window's one-sided halves.
    pub fn window_table(&self, sft: &Sft, radius: usize) -> HeightTable {
        HeightTable::from_fn(sft, radius, |w| {
            let xu = cylinder_interval(&self.model_u, &Word(w[radius..].to_vec()))
                .expect("admissible window")
                .midpoint();
            let xs = if radius == 0 {
                0.5
            } else {
                let mut back: Vec<Symbol> = w[..radius].to_vec();
                back.reverse();
                cylinder_interval(&self.model_s, &Word(back))
                    .expect("admissible window")
                    .midpoint()
            };
            self.weight_u * xu + self.weight_s * xs
        })
    }
}

/// Spectrum slice generated with the exact additive height instead of a
/// window table.
pub fn spectrum_slice_additive(
    sft: &Sft,
    height: &AdditiveHeight,
    kind: SpectrumKind,
    t: f64,
    max_period: usize,
    middle_bound: usize,
) -> Result<SpectrumSlice> {
    let orbits = crate::symbolic::periodic_orbits(sft, max_period);
    let mut values = Vec::new();
    match kind {
        SpectrumKind::Lagrange => {
            for o in &orbits {
                let v = height.periodic_max(o);
                if v <= t {
                    values.push(v);
                }
            }
        }
        SpectrumKind::Markov => {
            for l in &orbits {
                for r in &orbits {
                    for mid in middles_between(sft, l, r, middle_bound) {
                        let x = TwoSidedPoint::new(sft, l.clone(), mid, r.clone())?;
                        let v = height.markov_value(&x);
                        if v <= t {
                            values.push(v);
                        }
                    }
                }
            }
        }
    }
    Ok(SpectrumSlice {
        kind,
        threshold: t,
        values: dedup_values(values),
        max_period,
        middle_bound,
    })
}

/// Scale-front count N_u(t, r) of the pruned system's full mask.
pub fn pruned_front_count(pruned: &PrunedSystem, r: i64) -> Result<usize> {
    Ok(scale_front(&pruned.model, &pruned.graph, &pruned.mask, r)?.len())
}

/// Helper for tests and the CLI: the ternary-style model with equal ratios.
pub fn equal_ratio_model(n: usize, ratio: f64) -> CantorModel {
    let gap = if n > 1 {
        (1.0 - n as f64 * ratio) / (n as f64 - 1.0)
    } else {
        0.0
    };
    let offsets = (0..n).map(|i| i as f64 * (ratio + gap)).collect();
    CantorModel::Affine {
        ratios: vec![ratio; n],
        offsets,
    }
}
