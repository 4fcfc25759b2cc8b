//! Geometric realizations of the unstable and stable Cantor sets: cylinder
//! intervals, scale fronts, and dimension estimates by pressure root,
//! counting slope and box counting.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::symbolic::{scc_decompose, trim_mask, BlockGraph, Symbol, Word};

/// A geometric model assigning an interval to every admissible word.
#[derive(Debug, Clone, PartialEq)]
pub enum CantorModel {
    /// Affine iterated function system on [0,1]: symbol `a` acts by
    /// `x -> offset_a + ratio_a * x`.
    Affine { ratios: Vec<f64>, offsets: Vec<f64> },
    /// Continued fractions with digits restricted to a finite set; symbol
    /// `a` stands for digit `digits[a]`.
    Gauss { digits: Vec<u32> },
}

impl CantorModel {
    pub fn symbol_count(&self) -> usize {
        match self {
            CantorModel::Affine { ratios, .. } => ratios.len(),
            CantorModel::Gauss { digits } => digits.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CantorModel::Affine { ratios, offsets } => {
                if ratios.is_empty() || ratios.len() != offsets.len() {
                    return Err(Error::Config(
                        "model.affine: ratios and offsets must be nonempty and equal length".into(),
                    ));
                }
                for (i, (&r, &o)) in ratios.iter().zip(offsets).enumerate() {
                    if !(r > 0.0 && r < 1.0) {
                        return Err(Error::Config(format!("model.affine.ratios[{}] not in (0,1)", i)));
                    }
                    if !(0.0..1.0).contains(&o) || o + r > 1.0 + 1e-12 {
                        return Err(Error::Config(format!(
                            "model.affine.offsets[{}]: image not inside [0,1]",
                            i
                        )));
                    }
                }
                // pairwise disjoint images
                let mut spans: Vec<(f64, f64)> = offsets
                    .iter()
                    .zip(ratios)
                    .map(|(&o, &r)| (o, o + r))
                    .collect();
                spans.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                for w in spans.windows(2) {
                    if w[0].1 > w[1].0 + 1e-12 {
                        return Err(Error::Config("model.affine: symbol images overlap".into()));
                    }
                }
                Ok(())
            }
            CantorModel::Gauss { digits } => {
                if digits.is_empty() {
                    return Err(Error::Config("model.gauss.digits: empty digit set".into()));
                }
                if digits.iter().any(|&d| d < 1) {
                    return Err(Error::Config("model.gauss.digits: digits must be >= 1".into()));
                }
                let set: HashSet<u32> = digits.iter().copied().collect();
                if set.len() != digits.len() {
                    return Err(Error::Config("model.gauss.digits: duplicate digit".into()));
                }
                Ok(())
            }
        }
    }
}

/// The interval of a cylinder together with its word.
#[derive(Debug, Clone)]
pub struct CylinderInterval {
    pub word: Word,
    pub left: f64,
    pub right: f64,
}

impl CylinderInterval {
    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    pub fn scale(&self) -> i64 {
        unstable_scale(self.length()).expect("positive cylinder length")
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.left + self.right)
    }
}

fn check_symbols(model: &CantorModel, symbols: &[Symbol]) -> Result<()> {
    if symbols.is_empty() {
        return Err(Error::InadmissibleWord("empty word".into()));
    }
    if symbols.iter().any(|&a| (a as usize) >= model.symbol_count()) {
        return Err(Error::InadmissibleWord(format!(
            "symbol out of range for model: {:?}",
            symbols
        )));
    }
    Ok(())
}

/// Exact interval of the cylinder of `word`.
///
/// Affine: composed maps applied to [0,1], length = product of ratios.
/// Gauss: continuant recurrence; length = 1/(q_k (q_k + q_{k-1})), endpoint
/// order decided by the parity of the word length.
pub fn cylinder_interval(model: &CantorModel, word: &Word) -> Result<CylinderInterval> {
    let s = word.symbols();
    check_symbols(model, s)?;
    match model {
        CantorModel::Affine { ratios, offsets } => {
            let mut trans = 0.0f64;
            let mut scale = 1.0f64;
            for &a in s {
                trans += scale * offsets[a as usize];
                scale *= ratios[a as usize];
            }
            Ok(CylinderInterval {
                word: word.clone(),
                left: trans,
                right: trans + scale,
            })
        }
        CantorModel::Gauss { digits } => {
            let (mut p_prev, mut p) = (1.0f64, 0.0f64);
            let (mut q_prev, mut q) = (0.0f64, 1.0f64);
            for &a in s {
                let d = digits[a as usize] as f64;
                let p_next = d * p + p_prev;
                let q_next = d * q + q_prev;
                p_prev = p;
                p = p_next;
                q_prev = q;
                q = q_next;
            }
            let e1 = p / q;
            let e2 = (p + p_prev) / (q + q_prev);
            let (left, right) = if s.len() % 2 == 0 { (e1, e2) } else { (e2, e1) };
            Ok(CylinderInterval {
                word: word.clone(),
                left,
                right,
            })
        }
    }
}

/// Length of the cylinder of `symbols` without endpoint bookkeeping.
pub fn cylinder_length(model: &CantorModel, symbols: &[Symbol]) -> f64 {
    match model {
        CantorModel::Affine { ratios, .. } => symbols.iter().map(|&a| ratios[a as usize]).product(),
        CantorModel::Gauss { digits } => {
            let (mut q_prev, mut q) = (0.0f64, 1.0f64);
            for &a in symbols {
                let d = digits[a as usize] as f64;
                let q_next = d * q + q_prev;
                q_prev = q;
                q = q_next;
            }
            1.0 / (q * (q + q_prev))
        }
    }
}

/// Scale index floor(ln(1/length)), natural logarithm.
pub fn unstable_scale(length: f64) -> Result<i64> {
    if !(length > 0.0 && length <= 1.0) {
        return Err(Error::DomainError(format!(
            "cylinder length {} outside (0, 1]",
            length
        )));
    }
    Ok((1.0 / length).ln().floor() as i64)
}

/// Extension rule for words inside a masked block graph: words shorter than
/// the width must be prefixes of masked vertices; longer words must have
/// every window masked with consecutive windows linked.
struct MaskedWords<'a> {
    graph: &'a BlockGraph,
    mask: &'a [bool],
    prefixes: HashSet<Vec<Symbol>>,
}

impl<'a> MaskedWords<'a> {
    fn new(graph: &'a BlockGraph, mask: &'a [bool]) -> MaskedWords<'a> {
        let mut prefixes = HashSet::new();
        for (i, v) in graph.vertices.iter().enumerate() {
            if mask[i] {
                for k in 1..graph.width {
                    prefixes.insert(v.symbols()[..k].to_vec());
                }
            }
        }
        MaskedWords {
            graph,
            mask,
            prefixes,
        }
    }

    fn roots(&self) -> Vec<Symbol> {
        let n = self
            .graph
            .vertices
            .iter()
            .map(|v| v.symbols().iter().copied().max().unwrap())
            .max()
            .unwrap_or(0) as usize
            + 1;
        (0..n as Symbol).filter(|&a| self.admits(&[], a)).collect()
    }

    fn admits(&self, word: &[Symbol], b: Symbol) -> bool {
        let w = self.graph.width;
        let newlen = word.len() + 1;
        if newlen < w {
            let mut p = word.to_vec();
            p.push(b);
            return self.prefixes.contains(&p);
        }
        let mut window = word[word.len() + 1 - w..].to_vec();
        window.push(b);
        let vi = match self.graph.vertex_index(&Word(window)) {
            Some(i) if self.mask[i] => i,
            _ => return false,
        };
        if newlen == w {
            return true;
        }
        let prev = Word(word[word.len() - w..].to_vec());
        let pi = self.graph.vertex_index(&prev).expect("parent window exists");
        self.mask[pi] && self.graph.edges[pi].binary_search(&vi).is_ok()
    }
}

/// The scale front P_r: minimal masked-admissible words whose cylinder
/// scale first reaches `r`. The empty word has scale -1 by convention, so
/// the front at r = 0 is the set of single-symbol words.
pub fn scale_front(
    model: &CantorModel,
    graph: &BlockGraph,
    mask: &[bool],
    r: i64,
) -> Result<Vec<Word>> {
    if r < 0 {
        return Err(Error::DomainError(format!("scale front level {} < 0", r)));
    }
    if !mask.iter().any(|&m| m) {
        return Err(Error::DegenerateSet("masked graph is empty".into()));
    }
    let mw = MaskedWords::new(graph, mask);
    let mut out = Vec::new();
    let mut stack: Vec<Vec<Symbol>> = mw.roots().into_iter().rev().map(|a| vec![a]).collect();
    while let Some(word) = stack.pop() {
        let len = cylinder_length(model, &word);
        if unstable_scale(len)? >= r {
            out.push(Word(word));
            continue;
        }
        let top = (model.symbol_count() as Symbol).max(1);
        for b in (0..top).rev() {
            if mw.admits(&word, b) {
                let mut w2 = word.clone();
                w2.push(b);
                stack.push(w2);
            }
        }
    }
    Ok(out)
}

/// Masked-admissible words of exactly length `d >= graph.width`, in
/// lexicographic order.
pub fn masked_words(graph: &BlockGraph, mask: &[bool], d: usize) -> Vec<Word> {
    assert!(d >= graph.width);
    let mw = MaskedWords::new(graph, mask);
    let mut out = Vec::new();
    let mut stack: Vec<Vec<Symbol>> = mw.roots().into_iter().rev().map(|a| vec![a]).collect();
    let top = graph
        .vertices
        .iter()
        .flat_map(|v| v.symbols())
        .copied()
        .max()
        .map(|m| m + 1)
        .unwrap_or(0);
    while let Some(word) = stack.pop() {
        if word.len() == d {
            out.push(Word(word));
            continue;
        }
        for b in (0..top).rev() {
            if mw.admits(&word, b) {
                let mut w2 = word.clone();
                w2.push(b);
                stack.push(w2);
            }
        }
    }
    out
}

/// How a dimension value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    PressureRoot,
    CountingSlope,
    BoxCount,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::PressureRoot => "pressure-root",
            Method::CountingSlope => "counting-slope",
            Method::BoxCount => "box-count",
        })
    }
}

#[derive(Debug, Clone)]
pub struct DimensionEstimate {
    pub value: f64,
    pub method: Method,
    pub error_bound: f64,
    /// Cylinder or refinement depth used, 0 when not applicable.
    pub depth: usize,
    /// Scale or resolution index range used, (0,0) when not applicable.
    pub scales: (i64, i64),
}

/// Perron radius of an irreducible nonnegative matrix given as edge list,
/// via Collatz-Wielandt bounds on the shifted matrix M + I (aperiodic, so
/// the bounds close geometrically).
fn irreducible_radius(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    let mut v = vec![1.0f64; n];
    let mut w = vec![0.0f64; n];
    for _ in 0..500_000 {
        for i in 0..n {
            w[i] = v[i];
        }
        for &(i, j, wt) in edges {
            w[i] += wt * v[j];
        }
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..n {
            let ratio = w[i] / v[i];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        if hi - lo < 1e-12 {
            return 0.5 * (hi + lo) - 1.0;
        }
        let norm = hi.max(1e-300);
        for i in 0..n {
            v[i] = w[i] / norm;
        }
    }
    let mut hi = 0.0f64;
    let mut lo = f64::INFINITY;
    for i in 0..n {
        let r = w[i] / v[i];
        hi = hi.max(r);
        lo = lo.min(r);
    }
    0.5 * (hi + lo) - 1.0
}

/// Weighted graph used by the pressure equation: per-edge contraction
/// ratios, grouped into nontrivial strongly connected components.
struct PressureGraph {
    /// Per component: vertex count and edges (i, j, ln ratio).
    components: Vec<(usize, Vec<(usize, usize, f64)>)>,
}

impl PressureGraph {
    fn radius_at(&self, s: f64) -> f64 {
        let mut best = 0.0f64;
        for (n, edges) in &self.components {
            let weighted: Vec<(usize, usize, f64)> =
                edges.iter().map(|&(i, j, lr)| (i, j, (s * lr).exp())).collect();
            best = best.max(irreducible_radius(*n, &weighted));
        }
        best
    }
}

/// Build the pressure graph from masked-admissible words of length `d`,
/// with edge u -> v weighted by len(u + last(v)) / len(u).
fn pressure_graph(
    model: &CantorModel,
    graph: &BlockGraph,
    mask: &[bool],
    d: usize,
) -> Result<PressureGraph> {
    let words = masked_words(graph, mask, d);
    if words.is_empty() {
        return Err(Error::NoCycle);
    }
    let mut edges: Vec<Vec<usize>> = Vec::with_capacity(words.len());
    let mut ln_ratio: Vec<Vec<f64>> = Vec::with_capacity(words.len());
    let mw = MaskedWords::new(graph, mask);
    for u in &words {
        let su = u.symbols();
        let lu = cylinder_length(model, su);
        let mut out = Vec::new();
        let mut lr = Vec::new();
        for b in 0..model.symbol_count() as Symbol {
            if !mw.admits(su, b) {
                continue;
            }
            let mut vsym = su[1..].to_vec();
            vsym.push(b);
            if let Ok(j) = words.binary_search(&Word(vsym)) {
                let mut ext = su.to_vec();
                ext.push(b);
                out.push(j);
                lr.push((cylinder_length(model, &ext) / lu).ln());
            }
        }
        edges.push(out);
        ln_ratio.push(lr);
    }
    // strongly connected components of the refined graph
    let refined = BlockGraph {
        width: d,
        vertices: words,
        edges: edges.clone(),
    };
    let full = vec![true; refined.vertex_count()];
    let comps = scc_decompose(&refined, &full);
    let mut components = Vec::new();
    for c in comps.iter().filter(|c| c.nontrivial) {
        let mut local = vec![usize::MAX; refined.vertex_count()];
        for (li, &g) in c.vertex_ids.iter().enumerate() {
            local[g] = li;
        }
        let mut es = Vec::new();
        for &g in &c.vertex_ids {
            for (k, &j) in edges[g].iter().enumerate() {
                if local[j] != usize::MAX {
                    es.push((local[g], local[j], ln_ratio[g][k]));
                }
            }
        }
        components.push((c.vertex_ids.len(), es));
    }
    if components.is_empty() {
        return Err(Error::NoCycle);
    }
    Ok(PressureGraph { components })
}

fn pressure_root(pg: &PressureGraph) -> Result<f64> {
    let (mut lo, mut hi) = (0.0f64, 2.0f64);
    if pg.radius_at(lo) < 1.0 {
        return Err(Error::DomainError("spectral radius below 1 at s = 0".into()));
    }
    if pg.radius_at(hi) >= 1.0 {
        return Err(Error::DomainError("dimension root not bracketed by [0, 2]".into()));
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if pg.radius_at(mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Dimension of the masked Cantor set as the root of the pressure
/// equation, with the refinement depth chosen automatically.
pub fn dimension_pressure(
    model: &CantorModel,
    graph: &BlockGraph,
    mask: &[bool],
) -> Result<DimensionEstimate> {
    let alive = trim_mask(graph, mask);
    if !alive.iter().any(|&m| m) {
        return Err(Error::NoCycle);
    }
    match model {
        CantorModel::Affine { .. } => {
            // exact per-symbol ratios: the base width suffices
            let d = graph.width;
            let pg = pressure_graph(model, graph, &alive, d)?;
            let s = pressure_root(&pg)?;
            Ok(DimensionEstimate {
                value: s,
                method: Method::PressureRoot,
                error_bound: 1e-10,
                depth: d,
                scales: (0, 0),
            })
        }
        CantorModel::Gauss { .. } => {
            let d = graph.width.max(8);
            let s_d = pressure_root(&pressure_graph(model, graph, &alive, d)?)?;
            let s_d2 = pressure_root(&pressure_graph(model, graph, &alive, d + 2)?)?;
            Ok(DimensionEstimate {
                value: s_d,
                method: Method::PressureRoot,
                error_bound: (s_d - s_d2).abs() + 1e-10,
                depth: d,
                scales: (0, 0),
            })
        }
    }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let max_resid = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (y - slope * x - intercept).abs())
        .fold(0.0f64, f64::max);
    (slope, max_resid)
}

/// Dimension as the least-squares slope of ln N(r) against the scale r,
/// where N(r) counts the scale front at level r.
pub fn dimension_counting(
    model: &CantorModel,
    graph: &BlockGraph,
    mask: &[bool],
    r_min: i64,
    r_max: i64,
) -> Result<DimensionEstimate> {
    if !(r_max > r_min && r_min >= 1) {
        return Err(Error::DomainError(format!(
            "scale range [{}, {}] invalid",
            r_min, r_max
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in r_min..=r_max {
        let n = scale_front(model, graph, mask, r)?.len();
        xs.push(r as f64);
        ys.push((n as f64).ln());
    }
    let (slope, max_resid) = least_squares_slope(&xs, &ys);
    Ok(DimensionEstimate {
        value: slope,
        method: Method::CountingSlope,
        error_bound: max_resid / r_min as f64,
        depth: 0,
        scales: (r_min, r_max),
    })
}

fn box_count_slope(
    occupied: impl Fn(f64) -> usize,
    resolutions: &[f64],
) -> Result<(f64, f64, (i64, i64))> {
    if resolutions.len() < 2 {
        return Err(Error::DomainError("need at least 2 resolutions".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &eps in resolutions {
        if !(eps > 0.0) {
            return Err(Error::DomainError(format!("resolution {} not positive", eps)));
        }
        xs.push((1.0 / eps).ln());
        ys.push((occupied(eps) as f64).ln());
    }
    let (slope, max_resid) = least_squares_slope(&xs, &ys);
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(0.0f64, f64::max);
    Ok((slope, max_resid, (lo.round() as i64, hi.round() as i64)))
}

/// Box-counting slope of a finite point set on deterministic grids
/// anchored at 0.
pub fn box_count_dimension(points: &[f64], resolutions: &[f64]) -> Result<DimensionEstimate> {
    if points.is_empty() {
        return Err(Error::DegenerateSet("empty point set".into()));
    }
    let lo = points.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = points.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 1e-15 {
        return Err(Error::DegenerateSet("all points coincide".into()));
    }
    let (slope, max_resid, scales) = box_count_slope(
        |eps| {
            let mut boxes: Vec<i64> = points.iter().map(|&p| (p / eps).floor() as i64).collect();
            boxes.sort_unstable();
            boxes.dedup();
            boxes.len()
        },
        resolutions,
    )?;
    Ok(DimensionEstimate {
        value: slope,
        method: Method::BoxCount,
        error_bound: max_resid,
        depth: 0,
        scales,
    })
}

/// Box counting for point clouds in any ambient dimension.
pub fn box_count_dimension_nd<const N: usize>(
    points: &[[f64; N]],
    resolutions: &[f64],
) -> Result<DimensionEstimate> {
    if points.is_empty() {
        return Err(Error::DegenerateSet("empty point set".into()));
    }
    let spread = (0..N)
        .map(|k| {
            let lo = points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        })
        .fold(0.0f64, f64::max);
    if spread < 1e-15 {
        return Err(Error::DegenerateSet("all points coincide".into()));
    }
    let (slope, max_resid, scales) = box_count_slope(
        |eps| {
            let mut boxes: Vec<[i64; N]> = points
                .iter()
                .map(|p| {
                    let mut k = [0i64; N];
                    for (ki, &x) in k.iter_mut().zip(p) {
                        *ki = (x / eps).floor() as i64;
                    }
                    k
                })
                .collect();
            boxes.sort_unstable();
            boxes.dedup();
            boxes.len()
        },
        resolutions,
    )?;
    Ok(DimensionEstimate {
        value: slope,
        method: Method::BoxCount,
        error_bound: max_resid,
        depth: 0,
        scales,
    })
}

/// Map DegenerateSet to dimension zero, pass everything else through.
pub fn dimension_or_zero(r: Result<DimensionEstimate>) -> Result<DimensionEstimate> {
    match r {
        Err(Error::DegenerateSet(_)) => Ok(DimensionEstimate {
            value: 0.0,
            method: Method::BoxCount,
            error_bound: 0.0,
            depth: 0,
            scales: (0, 0),
        }),
        other => other,
    }
}

/// A linear two-variable height map H(x, y) = wx * x + wy * y.
#[derive(Debug, Clone, Copy)]
pub struct LinearMap {
    pub wx: f64,
    pub wy: f64,
}

impl Default for LinearMap {
    fn default() -> Self {
        LinearMap { wx: 1.0, wy: 1.0 }
    }
}

/// Box dimension of the image H(K_s x K_u) sampled at cylinder midpoints
/// of the given depth on full-shift models.
pub fn projection_dimension_experiment(
    model_s: &CantorModel,
    model_u: &CantorModel,
    h: LinearMap,
    depth: usize,
    resolutions: &[f64],
) -> Result<DimensionEstimate> {
    if depth < 8 {
        return Err(Error::DomainError(format!("projection depth {} < 8", depth)));
    }
    let reps = |model: &CantorModel| -> Result<Vec<f64>> {
        let n = model.symbol_count() as Symbol;
        let mut pts = Vec::new();
        let mut stack: Vec<Vec<Symbol>> = (0..n).rev().map(|a| vec![a]).collect();
        while let Some(w) = stack.pop() {
            if w.len() == depth {
                pts.push(cylinder_interval(model, &Word(w))?.midpoint());
                continue;
            }
            for b in (0..n).rev() {
                let mut w2 = w.clone();
                w2.push(b);
                stack.push(w2);
            }
        }
        Ok(pts)
    };
    let xs = reps(model_s)?;
    let ys = reps(model_u)?;
    let mut values = Vec::with_capacity(xs.len() * ys.len());
    for &x in &xs {
        for &y in &ys {
            values.push(h.wx * x + h.wy * y);
        }
    }
    let mut est = dimension_or_zero(box_count_dimension(&values, resolutions))?;
    est.depth = depth;
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{enumerate_words, higher_block, Sft};
    use proptest::prelude::*;

    fn third_model() -> CantorModel {
        CantorModel::Affine {
            ratios: vec![1.0 / 3.0, 1.0 / 3.0],
            offsets: vec![0.0, 2.0 / 3.0],
        }
    }

    fn full2() -> (Sft, BlockGraph) {
        let s = Sft::full_shift(2);
        let g = higher_block(&s, 1);
        (s, g)
    }

    #[test]
    fn affine_cylinder_length() {
        let c = cylinder_interval(&third_model(), &Word(vec![0, 1])).unwrap();
        assert!((c.length() - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_cylinder_one_one() {
        let m = CantorModel::Gauss { digits: vec![1, 2] };
        let c = cylinder_interval(&m, &Word(vec![0, 0])).unwrap();
        assert!((c.left - 0.5).abs() < 1e-15);
        assert!((c.right - 2.0 / 3.0).abs() < 1e-15);
        assert!((c.length() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn cylinder_nesting() {
        let m = third_model();
        let outer = cylinder_interval(&m, &Word(vec![0])).unwrap();
        let inner = cylinder_interval(&m, &Word(vec![0, 1])).unwrap();
        assert!(outer.left <= inner.left && inner.right <= outer.right);
    }

    #[test]
    fn scale_values() {
        assert_eq!(unstable_scale((-5.2f64).exp()).unwrap(), 5);
        assert_eq!(unstable_scale(1.0 / 9.0).unwrap(), 2);
        assert_eq!(unstable_scale(1.0).unwrap(), 0);
        assert!(unstable_scale(1.5).is_err());
        assert!(unstable_scale(0.0).is_err());
    }

    #[test]
    fn scale_front_levels() {
        let (_, g) = full2();
        let m = third_model();
        let mask = vec![true; 2];
        let f0 = scale_front(&m, &g, &mask, 0).unwrap();
        assert_eq!(f0.len(), 2);
        assert!(f0.iter().all(|w| w.len() == 1));
        let f2 = scale_front(&m, &g, &mask, 2).unwrap();
        assert_eq!(f2.len(), 4);
        assert!(f2.iter().all(|w| w.len() == 2));
        let f7 = scale_front(&m, &g, &mask, 7).unwrap();
        assert_eq!(f7.len(), 128);
        assert!(f7.iter().all(|w| w.len() == 7));
    }

    #[test]
    fn scale_front_prefix_free_and_covering() {
        let (sft, g) = full2();
        let m = third_model();
        let mask = vec![true; 2];
        for r in [1i64, 3, 5] {
            let front = scale_front(&m, &g, &mask, r).unwrap();
            for (i, a) in front.iter().enumerate() {
                for b in front.iter().skip(i + 1) {
                    let (s, l) = if a.len() <= b.len() { (a, b) } else { (b, a) };
                    assert_ne!(&l.symbols()[..s.len()], s.symbols());
                }
            }
            // every deep word passes through exactly one front element
            for w in enumerate_words(&sft, 8) {
                let hits = front
                    .iter()
                    .filter(|f| w.symbols()[..f.len()] == *f.symbols())
                    .count();
                assert_eq!(hits, 1, "word {} front r={}", w, r);
            }
        }
    }

    #[test]
    fn pressure_middle_third() {
        let (_, g) = full2();
        let est = dimension_pressure(&third_model(), &g, &[true, true]).unwrap();
        assert!((est.value - 2f64.ln() / 3f64.ln()).abs() < 1e-6, "{}", est.value);
    }

    #[test]
    fn pressure_two_ratio() {
        let m = CantorModel::Affine {
            ratios: vec![0.5, 0.25],
            offsets: vec![0.0, 0.75],
        };
        let (_, g) = full2();
        let est = dimension_pressure(&m, &g, &[true, true]).unwrap();
        assert!((est.value - 0.6942419).abs() < 1e-6, "{}", est.value);
    }

    #[test]
    fn pressure_gauss_two_digits() {
        let m = CantorModel::Gauss { digits: vec![1, 2] };
        let (_, g) = full2();
        let est = dimension_pressure(&m, &g, &[true, true]).unwrap();
        assert!((est.value - 0.5312805).abs() < 2e-3, "{}", est.value);
        assert!(est.error_bound < 5e-3);
    }

    #[test]
    fn pressure_requires_cycle() {
        let m = third_model();
        let (_, g) = full2();
        // masking everything leaves nothing
        assert!(matches!(
            dimension_pressure(&m, &g, &[false, false]),
            Err(Error::NoCycle)
        ));
    }

    #[test]
    fn pressure_monotone_under_mask_shrink() {
        let m = CantorModel::Affine {
            ratios: vec![0.3, 0.25, 0.2],
            offsets: vec![0.0, 0.4, 0.8],
        };
        let s = Sft::full_shift(3);
        let g = higher_block(&s, 1);
        let full = dimension_pressure(&m, &g, &[true, true, true]).unwrap().value;
        let two = dimension_pressure(&m, &g, &[true, true, false]).unwrap().value;
        let one = dimension_pressure(&m, &g, &[true, false, false]).unwrap().value;
        assert!(full >= two - 1e-9 && two >= one - 1e-9);
        assert!(one.abs() < 1e-6);
    }

    #[test]
    fn counting_matches_closed_form() {
        let (_, g) = full2();
        let est = dimension_counting(&third_model(), &g, &[true, true], 4, 12).unwrap();
        assert!((est.value - 0.6309297).abs() < 0.02, "{}", est.value);
    }

    #[test]
    fn counting_single_fixed_point() {
        let (_, g) = full2();
        let est = dimension_counting(&third_model(), &g, &[true, false], 2, 8).unwrap();
        assert!(est.value.abs() < 1e-12);
    }

    #[test]
    fn box_count_interval() {
        let pts: Vec<f64> = (0..1000).map(|i| i as f64 / 999.0).collect();
        let eps: Vec<f64> = (4..=8).map(|k| 2f64.powi(-k)).collect();
        let est = box_count_dimension(&pts, &eps).unwrap();
        assert!((est.value - 1.0).abs() < 0.05, "{}", est.value);
    }

    #[test]
    fn box_count_cantor_endpoints() {
        let m = third_model();
        let s = Sft::full_shift(2);
        let mut pts = Vec::new();
        for w in enumerate_words(&s, 10) {
            let c = cylinder_interval(&m, &w).unwrap();
            pts.push(c.left);
            pts.push(c.right);
        }
        let eps: Vec<f64> = (4..=10).map(|k| 2f64.powi(-k)).collect();
        let est = box_count_dimension(&pts, &eps).unwrap();
        assert!((est.value - 0.6309297).abs() < 0.05, "{}", est.value);
    }

    #[test]
    fn box_count_single_point_degenerate() {
        let r = box_count_dimension(&[0.25], &[0.5, 0.25]);
        assert!(matches!(r, Err(Error::DegenerateSet(_))));
        let est = dimension_or_zero(r).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn projection_supercritical() {
        let m = third_model();
        let eps: Vec<f64> = (3..=9).map(|k| 2f64.powi(-k)).collect();
        let est = projection_dimension_experiment(&m, &m, LinearMap::default(), 8, &eps).unwrap();
        assert!((est.value - 1.0).abs() < 0.03, "{}", est.value);
    }

    #[test]
    fn projection_degenerate_factor() {
        // one factor a single point: dimension of the other factor alone
        let k1 = CantorModel::Affine {
            ratios: vec![0.2, 0.2],
            offsets: vec![0.0, 0.8],
        };
        let point = CantorModel::Affine {
            ratios: vec![1e-9],
            offsets: vec![0.3],
        };
        let eps: Vec<f64> = (3..=12).map(|k| 2f64.powi(-k)).collect();
        let est =
            projection_dimension_experiment(&point, &k1, LinearMap::default(), 10, &eps).unwrap();
        let expect = 2f64.ln() / 5f64.ln();
        assert!((est.value - expect).abs() < 0.05, "{}", est.value);
    }

    proptest! {
        #[test]
        fn affine_length_product(ratios in proptest::collection::vec(0.05f64..0.45, 2),
                                 word in proptest::collection::vec(0u8..2, 1..10)) {
            let m = CantorModel::Affine {
                offsets: vec![0.0, 1.0 - ratios[1]],
                ratios: ratios.clone(),
            };
            let c = cylinder_interval(&m, &Word(word.clone())).unwrap();
            let prod: f64 = word.iter().map(|&a| ratios[a as usize]).product();
            // endpoints accumulate at unit magnitude, so the error in the
            // difference is absolute, not relative to the tiny product
            prop_assert!((c.length() - prod).abs() <= 1e-12);
        }

        #[test]
        fn gauss_endpoints_are_continuant_ratios(word in proptest::collection::vec(0u8..3, 1..=10)) {
            let digits = vec![1u32, 2, 3];
            let m = CantorModel::Gauss { digits: digits.clone() };
            let c = cylinder_interval(&m, &Word(word.clone())).unwrap();
            // exact integer continuants
            let (mut pp, mut p, mut qp, mut q) = (1u64, 0u64, 0u64, 1u64);
            for &a in &word {
                let d = digits[a as usize] as u64;
                let pn = d * p + pp;
                let qn = d * q + qp;
                pp = p; p = pn; qp = q; q = qn;
            }
            let e1 = p as f64 / q as f64;
            let e2 = (p + pp) as f64 / (q + qp) as f64;
            let (lo, hi) = if word.len() % 2 == 0 { (e1, e2) } else { (e2, e1) };
            prop_assert!((c.left - lo).abs() < 1e-14);
            prop_assert!((c.right - hi).abs() < 1e-14);
            prop_assert!(c.left < c.right);
        }
    }
}
