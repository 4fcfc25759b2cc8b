//! Suspension flows over the symbolic horseshoe: roof functions, fiber
//! profiles, fiber maximization, the flow-to-map reduction, and the
//! dimension additivity check dim(suspension) = dim(base) + 1.

use std::collections::BTreeMap;

use crate::cantor::{box_count_dimension_nd, cylinder_interval, CantorModel};
use crate::error::{Error, Result};
use crate::spectra::{HeightTable, TwoSidedPoint};
use crate::symbolic::{enumerate_words, Sft, Symbol, Word};

pub const MAX_OMEGA: f64 = 16.0 * std::f64::consts::PI;

/// Positive return time as a locally constant table over windows.
#[derive(Debug, Clone, PartialEq)]
pub struct RoofFunction {
    radius: usize,
    values: BTreeMap<Word, f64>,
}

impl RoofFunction {
    pub fn new(radius: usize, values: BTreeMap<Word, f64>) -> Result<RoofFunction> {
        let wlen = 2 * radius + 1;
        for (k, &v) in &values {
            if k.len() != wlen {
                return Err(Error::Config(format!(
                    "roof.table: window {} has length {}, expected {}",
                    k,
                    k.len(),
                    wlen
                )));
            }
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("roof.table[{}] must be positive", k)));
            }
        }
        Ok(RoofFunction { radius, values })
    }

    pub fn constant(sft: &Sft, tau: f64) -> Result<RoofFunction> {
        let values = enumerate_words(sft, 1).into_iter().map(|w| (w, tau)).collect();
        RoofFunction::new(0, values)
    }

    pub fn from_fn(sft: &Sft, radius: usize, f: impl Fn(&[Symbol]) -> f64) -> Result<RoofFunction> {
        let values = enumerate_words(sft, 2 * radius + 1)
            .into_iter()
            .map(|w| {
                let v = f(w.symbols());
                (w, v)
            })
            .collect();
        RoofFunction::new(radius, values)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Roof value on the window centered in `window` (which may be wider).
    pub fn value(&self, window: &[Symbol]) -> Result<f64> {
        let key = center_slice(window, self.radius)?;
        let v = self
            .values
            .get(&Word(key.to_vec()))
            .copied()
            .ok_or_else(|| Error::InadmissibleWord(format!("roof window {:?} missing", key)))?;
        debug_assert!(v > 0.0);
        Ok(v)
    }
}

/// Per-window fiber function f(s) = c0 + c1 s + c2 s^2/2 + c3 s^3/6
/// + amp * sin(omega s + phase) on s in [0, roof].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberCoeffs {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub amp: f64,
    pub omega: f64,
    pub phase: f64,
}

impl FiberCoeffs {
    pub fn polynomial(c0: f64, c1: f64, c2: f64, c3: f64) -> FiberCoeffs {
        FiberCoeffs {
            c0,
            c1,
            c2,
            c3,
            amp: 0.0,
            omega: 0.0,
            phase: 0.0,
        }
    }

    pub fn sinusoid(amp: f64, omega: f64, phase: f64) -> FiberCoeffs {
        FiberCoeffs {
            c0: 0.0,
            c1: 0.0,
            c2: 0.0,
            c3: 0.0,
            amp,
            omega,
            phase,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.c0, self.c1, self.c2, self.c3, self.amp, self.omega, self.phase];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("profile: non-finite coefficient".into()));
        }
        if self.omega.abs() > MAX_OMEGA {
            return Err(Error::Config(format!(
                "profile: |omega| = {} exceeds the bound 16*pi",
                self.omega.abs()
            )));
        }
        Ok(())
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.c0
            + self.c1 * s
            + self.c2 * s * s / 2.0
            + self.c3 * s * s * s / 6.0
            + self.amp * (self.omega * s + self.phase).sin()
    }

    /// k-th derivative in s, k in 0..=4.
    pub fn derivative(&self, k: usize, s: f64) -> f64 {
        let trig = |k: usize| {
            let arg = self.omega * s + self.phase;
            let w = self.omega.powi(k as i32);
            match k % 4 {
                0 => self.amp * w * arg.sin(),
                1 => self.amp * w * arg.cos(),
                2 => -self.amp * w * arg.sin(),
                _ => -self.amp * w * arg.cos(),
            }
        };
        match k {
            0 => self.eval(s),
            1 => self.c1 + self.c2 * s + self.c3 * s * s / 2.0 + trig(1),
            2 => self.c2 + self.c3 * s + trig(2),
            3 => self.c3 + trig(3),
            4 => trig(4),
            _ => panic!("derivative order {} unsupported", k),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberProfile {
    radius: usize,
    coeffs: BTreeMap<Word, FiberCoeffs>,
}

impl FiberProfile {
    pub fn new(radius: usize, coeffs: BTreeMap<Word, FiberCoeffs>) -> Result<FiberProfile> {
        let wlen = 2 * radius + 1;
        for (k, c) in &coeffs {
            if k.len() != wlen {
                return Err(Error::Config(format!(
                    "profile: window {} has length {}, expected {}",
                    k,
                    k.len(),
                    wlen
                )));
            }
            c.validate()?;
        }
        Ok(FiberProfile { radius, coeffs })
    }

    pub fn uniform(sft: &Sft, c: FiberCoeffs) -> Result<FiberProfile> {
        let coeffs = enumerate_words(sft, 1).into_iter().map(|w| (w, c)).collect();
        FiberProfile::new(0, coeffs)
    }

    pub fn from_fn(
        sft: &Sft,
        radius: usize,
        f: impl Fn(&[Symbol]) -> FiberCoeffs,
    ) -> Result<FiberProfile> {
        let coeffs = enumerate_words(sft, 2 * radius + 1)
            .into_iter()
            .map(|w| {
                let c = f(w.symbols());
                (w, c)
            })
            .collect();
        FiberProfile::new(radius, coeffs)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn coeffs(&self, window: &[Symbol]) -> Result<FiberCoeffs> {
        let key = center_slice(window, self.radius)?;
        self.coeffs
            .get(&Word(key.to_vec()))
            .copied()
            .ok_or_else(|| Error::InadmissibleWord(format!("profile window {:?} missing", key)))
    }

    pub fn windows(&self) -> impl Iterator<Item = (&Word, &FiberCoeffs)> {
        self.coeffs.iter()
    }

    /// Apply `f` to every window's coefficients.
    pub fn map_coeffs(&self, f: impl Fn(FiberCoeffs) -> FiberCoeffs) -> Result<FiberProfile> {
        let coeffs = self.coeffs.iter().map(|(k, &c)| (k.clone(), f(c))).collect();
        FiberProfile::new(self.radius, coeffs)
    }
}

/// Center slice of half-width `radius` from an odd-length window.
fn center_slice(window: &[Symbol], radius: usize) -> Result<&[Symbol]> {
    let need = 2 * radius + 1;
    if window.len() < need || window.len() % 2 == 0 {
        return Err(Error::DomainError(format!(
            "window of length {} cannot supply a radius-{} center",
            window.len(),
            radius
        )));
    }
    let c = window.len() / 2;
    Ok(&window[c - radius..=c + radius])
}

#[derive(Debug, Clone, Copy)]
pub struct FiberMax {
    pub value: f64,
    pub s_star: f64,
    pub unique: bool,
}

const GRID: usize = 256;

fn golden_refine(c: &FiberCoeffs, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = c.eval(x1);
    let mut f2 = c.eval(x2);
    while b - a > 1e-10 {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = c.eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = c.eval(x2);
        }
    }
    let s = 0.5 * (a + b);
    (s, c.eval(s))
}

/// Global maximum of a fiber function on [0, tau]: 256-point grid plus
/// golden-section refinement of every near-maximal grid-local maximum.
pub fn fiber_max_on(coeffs: &FiberCoeffs, tau: f64) -> FiberMax {
    assert!(tau > 0.0, "roof value must be positive");
    let h = tau / GRID as f64;
    let grid: Vec<f64> = (0..=GRID).map(|i| coeffs.eval(i as f64 * h)).collect();
    let lo = grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 1e-15 {
        // constant fiber: no meaningful maximizer
        return FiberMax {
            value: grid[0],
            s_star: 0.0,
            unique: false,
        };
    }
    // refine each grid-local maximum near the grid maximum
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    for i in 0..=GRID {
        let is_local = (i == 0 || grid[i] >= grid[i - 1]) && (i == GRID || grid[i] >= grid[i + 1]);
        if !is_local || grid[i] < hi - 1e-9 {
            continue;
        }
        let a = if i == 0 { 0.0 } else { (i - 1) as f64 * h };
        let b = if i == GRID { tau } else { (i + 1) as f64 * h };
        candidates.push(golden_refine(coeffs, a, b));
    }
    let (mut s_star, mut value) = candidates[0];
    for &(s, v) in &candidates[1..] {
        if v > value {
            value = v;
            s_star = s;
        }
    }
    // endpoints can beat interior refinements
    for (s, v) in [(0.0, grid[0]), (tau, grid[GRID])] {
        if v > value {
            value = v;
            s_star = s;
        }
    }
    let unique = candidates
        .iter()
        .filter(|&&(_, v)| v >= value - 1e-9)
        .all(|&(s, _)| (s - s_star).abs() <= 1e-6);
    FiberMax {
        value,
        s_star,
        unique,
    }
}

/// F(y) = max over the fiber above the window `y`.
pub fn fiber_max(profile: &FiberProfile, roof: &RoofFunction, window: &[Symbol]) -> Result<FiberMax> {
    let coeffs = profile.coeffs(window)?;
    let tau = roof.value(window)?;
    Ok(fiber_max_on(&coeffs, tau))
}

/// The locally constant height table F(window) = fiber maximum, at output
/// radius m_out >= both input radii.
pub fn height_table_from_suspension(
    profile: &FiberProfile,
    roof: &RoofFunction,
    sft: &Sft,
    m_out: usize,
) -> Result<HeightTable> {
    if m_out < profile.radius().max(roof.radius()) {
        return Err(Error::DomainError(format!(
            "output radius {} below profile/roof radius",
            m_out
        )));
    }
    let mut values = BTreeMap::new();
    for w in enumerate_words(sft, 2 * m_out + 1) {
        let fm = fiber_max(profile, roof, w.symbols())?;
        values.insert(w, fm.value);
    }
    HeightTable::new(m_out, values)
}

/// limsup of f along the suspension flow over `x`, simulated return by
/// return for `horizon` returns.
pub fn flow_lagrange(
    profile: &FiberProfile,
    roof: &RoofFunction,
    x: &TwoSidedPoint,
    horizon: usize,
) -> Result<f64> {
    let m = profile.radius().max(roof.radius());
    let p_r = x.right.period();
    let needed = x.middle.len() + m + p_r;
    if horizon < needed {
        return Err(Error::DomainError(format!(
            "horizon {} below transient + one tail period {}",
            horizon, needed
        )));
    }
    let mut fiber_peaks = Vec::with_capacity(horizon + 1);
    for n in 0..=horizon {
        let window = x.window(n as i64, m);
        fiber_peaks.push(fiber_max(profile, roof, &window)?.value);
    }
    // limsup of an eventually periodic sequence: the recurring peaks are
    // exactly the last full tail period
    Ok(fiber_peaks[horizon + 1 - p_r..]
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Compare the box dimension of the suspended set against the base:
/// returns (dim_base, dim_suspension, |dim_suspension - dim_base - 1|).
///
/// The base is sampled as (x^s, x^u) over all depth-`depth` cylinder pairs
/// of the full shift on the model's alphabet; the suspension adds the
/// fiber coordinate sampled densely against the finest resolution.
pub fn suspension_dimension_check(
    model: &CantorModel,
    roof: &RoofFunction,
    depth: usize,
    resolutions: &[f64],
) -> Result<(f64, f64, f64)> {
    if depth < 6 {
        return Err(Error::DomainError(format!("suspension depth {} < 6", depth)));
    }
    let sft = Sft::full_shift(model.symbol_count());
    let words = enumerate_words(&sft, depth);
    let mids: Vec<f64> = words
        .iter()
        .map(|w| Ok(cylinder_interval(model, w)?.midpoint()))
        .collect::<Result<_>>()?;
    let mut base: Vec<[f64; 2]> = Vec::with_capacity(mids.len() * mids.len());
    for &xs in &mids {
        for &xu in &mids {
            base.push([xs, xu]);
        }
    }
    let dim_base = crate::cantor::dimension_or_zero(box_count_dimension_nd(&base, resolutions))?.value;

    let eps_min = resolutions.iter().cloned().fold(f64::INFINITY, f64::min);
    let m_r = roof.radius();
    let mut cloud: Vec<[f64; 3]> = Vec::new();
    for (iw, w) in words.iter().enumerate() {
        // roof window centered at the origin symbol of the unstable word
        let mut window: Vec<Symbol> = Vec::with_capacity(2 * m_r + 1);
        for k in (0..m_r).rev() {
            // stable side symbols come from the word read backwards
            window.push(w.symbols()[k.min(w.len() - 1)]);
        }
        window.extend_from_slice(&w.symbols()[..m_r + 1]);
        let tau = roof.value(&window)?;
        let ns = ((tau / eps_min).ceil() as usize * 2).clamp(8, 4096);
        for &xs in &mids {
            let xu = mids[iw];
            for j in 0..ns {
                let s = tau * (j as f64 + 0.5) / ns as f64;
                cloud.push([xs, xu, s]);
            }
        }
    }
    let dim_susp = crate::cantor::dimension_or_zero(box_count_dimension_nd(&cloud, resolutions))?.value;
    Ok((dim_base, dim_susp, (dim_susp - dim_base - 1.0).abs()))
}
