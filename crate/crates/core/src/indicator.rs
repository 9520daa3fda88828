//! Recession indicator construction: smoothing, turning-point extraction,
//! Box-Cox scaling, combination of the unemployment and vacancy legs, and
//! enumeration of the full parameter grid.
//!
//! Grid values for the Box-Cox exponent, the combination weight, and the
//! exponential smoothing weight are stored as exact tenths (integer numerator
//! over 10) so spec identity and canonical ordering never drift through
//! floating point.

use crate::error::{Error, Result};
use crate::series::MonthlySeries;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const MAX_SIMPLE_ALPHA: u8 = 11;
pub const MAX_BETA: u8 = 18;

/// How the two single-variable indicators are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combo {
    /// `delta * u_hat + (1 - delta) * v_hat`
    Linear,
    /// `delta * min(u_hat, v_hat) + (1 - delta) * max(u_hat, v_hat)`
    MinMax,
}

impl fmt::Display for Combo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Combo::Linear => write!(f, "linear"),
            Combo::MinMax => write!(f, "minmax"),
        }
    }
}

impl FromStr for Combo {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" | "uv" | "u-v" => Ok(Combo::Linear),
            "minmax" | "min-max" => Ok(Combo::MinMax),
            other => Err(Error::Grid(format!("unknown combination method {other:?}"))),
        }
    }
}

/// Moving-average smoothing applied identically to both input series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Smoothing {
    /// Trailing mean over the window `[t - alpha, t]`, `alpha` in `0..=11`.
    Simple { alpha: u8 },
    /// Recursive exponentially weighted average with weight `alpha_tenths/10`,
    /// `alpha_tenths` in `1..=10`.
    Exponential { alpha_tenths: u8 },
}

impl Smoothing {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Smoothing::Simple { alpha } if alpha <= MAX_SIMPLE_ALPHA => Ok(()),
            Smoothing::Exponential { alpha_tenths } if (1..=10).contains(&alpha_tenths) => Ok(()),
            other => Err(Error::Grid(format!("smoothing off grid: {other:?}"))),
        }
    }

    pub fn apply(&self, series: &MonthlySeries) -> Result<MonthlySeries> {
        self.validate()?;
        match *self {
            Smoothing::Simple { alpha } => smooth_simple(series, alpha),
            Smoothing::Exponential { alpha_tenths } => smooth_exponential(series, alpha_tenths),
        }
    }

    pub fn method_name(&self) -> &'static str {
        match self {
            Smoothing::Simple { .. } => "sma",
            Smoothing::Exponential { .. } => "ema",
        }
    }

    /// Smoothing parameter formatted as in spec strings: an integer window
    /// for simple averages, a one-decimal weight for exponential ones.
    pub fn alpha_string(&self) -> String {
        match *self {
            Smoothing::Simple { alpha } => alpha.to_string(),
            Smoothing::Exponential { alpha_tenths } => format!("{:.1}", alpha_tenths as f64 / 10.0),
        }
    }
}

/// The per-leg transform: smoothing, trailing-extremum horizon, and Box-Cox
/// exponent. The same leg spec is applied to both the unemployment and
/// vacancy series of a combined indicator.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct LegSpec {
    pub smoothing: Smoothing,
    /// Trailing extremum horizon in months, `1..=18`.
    pub beta: u8,
    /// Box-Cox exponent times ten, `0..=10`.
    pub gamma_tenths: u8,
}

impl LegSpec {
    pub fn validate(&self) -> Result<()> {
        self.smoothing.validate()?;
        if !(1..=MAX_BETA).contains(&self.beta) {
            return Err(Error::Grid(format!("beta {} off grid", self.beta)));
        }
        if self.gamma_tenths > 10 {
            return Err(Error::Grid(format!(
                "gamma {} off grid",
                self.gamma_tenths as f64 / 10.0
            )));
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma_tenths as f64 / 10.0
    }
}

/// Which way the series moves when the event of interest happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Indicator is the scaled increase from a trailing minimum
    /// (unemployment-style).
    RiseInRecession,
    /// Indicator is the scaled decrease from a trailing maximum
    /// (vacancy-style).
    FallInRecession,
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rise" | "rise-in-recession" => Ok(Direction::RiseInRecession),
            "fall" | "fall-in-recession" => Ok(Direction::FallInRecession),
            other => Err(Error::Grid(format!("unknown direction {other:?}"))),
        }
    }
}

/// Full identity of one of the 95,832 combined indicators.
///
/// Field order matches the canonical spec order: combination method,
/// smoothing method, alpha, beta, gamma, delta ascending, so the derived
/// `Ord` is the canonical ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndicatorSpec {
    pub combo: Combo,
    pub leg: LegSpec,
    /// Combination weight times ten, `0..=10`.
    pub delta_tenths: u8,
}

impl IndicatorSpec {
    pub fn validate(&self) -> Result<()> {
        self.leg.validate()?;
        if self.delta_tenths > 10 {
            return Err(Error::Grid(format!(
                "delta {} off grid",
                self.delta_tenths as f64 / 10.0
            )));
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        self.delta_tenths as f64 / 10.0
    }
}

impl fmt::Display for IndicatorSpec {
    /// Canonical spec string, e.g.
    /// `combo=minmax,smooth=ema:0.5,beta=5,gamma=1.0,delta=1.0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let smooth = match self.leg.smoothing {
            Smoothing::Simple { alpha } => format!("sma:{alpha}"),
            Smoothing::Exponential { alpha_tenths } => {
                format!("ema:{:.1}", alpha_tenths as f64 / 10.0)
            }
        };
        write!(
            f,
            "combo={},smooth={},beta={},gamma={:.1},delta={:.1}",
            self.combo,
            smooth,
            self.leg.beta,
            self.leg.gamma(),
            self.delta()
        )
    }
}

impl FromStr for IndicatorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut combo = None;
        let mut smoothing = None;
        let mut beta = None;
        let mut gamma = None;
        let mut delta = None;
        for part in s.split(',') {
            let (key, value) = part.split_once('=').ok_or_else(|| {
                Error::Grid(format!("spec component {part:?} is not key=value"))
            })?;
            match key {
                "combo" => combo = Some(value.parse::<Combo>()?),
                "smooth" => {
                    let (method, param) = value.split_once(':').ok_or_else(|| {
                        Error::Grid(format!("smooth must be sma:<n> or ema:<a>, got {value:?}"))
                    })?;
                    smoothing = Some(match method {
                        "sma" | "simple" => Smoothing::Simple {
                            alpha: param.parse().map_err(|_| {
                                Error::Grid(format!("bad simple smoothing window {param:?}"))
                            })?,
                        },
                        "ema" | "exponential" => Smoothing::Exponential {
                            alpha_tenths: parse_tenths(param)?,
                        },
                        other => {
                            return Err(Error::Grid(format!("unknown smoothing {other:?}")))
                        }
                    });
                }
                "beta" => {
                    beta = Some(value.parse::<u8>().map_err(|_| {
                        Error::Grid(format!("bad beta {value:?}"))
                    })?)
                }
                "gamma" => gamma = Some(parse_tenths(value)?),
                "delta" => delta = Some(parse_tenths(value)?),
                other => return Err(Error::Grid(format!("unknown spec key {other:?}"))),
            }
        }
        let spec = IndicatorSpec {
            combo: combo.ok_or_else(|| Error::Grid("spec missing combo".into()))?,
            leg: LegSpec {
                smoothing: smoothing.ok_or_else(|| Error::Grid("spec missing smooth".into()))?,
                beta: beta.ok_or_else(|| Error::Grid("spec missing beta".into()))?,
                gamma_tenths: gamma.ok_or_else(|| Error::Grid("spec missing gamma".into()))?,
            },
            delta_tenths: delta.ok_or_else(|| Error::Grid("spec missing delta".into()))?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Serialized as the canonical spec string.
impl Serialize for IndicatorSpec {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IndicatorSpec {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a decimal in `{0.0, 0.1, ..., 1.0}` into integer tenths.
fn parse_tenths(s: &str) -> Result<u8> {
    let v: f64 = s
        .parse()
        .map_err(|_| Error::Grid(format!("cannot parse {s:?} as a number")))?;
    let tenths = (v * 10.0).round();
    if !(0.0..=10.0).contains(&tenths) || (tenths / 10.0 - v).abs() > 1e-9 {
        return Err(Error::Grid(format!("{s} is not an exact tenth in [0, 1]")));
    }
    Ok(tenths as u8)
}

/// Trailing mean over `[t - alpha, t]`, truncated at the series start.
pub fn smooth_simple(series: &MonthlySeries, alpha: u8) -> Result<MonthlySeries> {
    if alpha > MAX_SIMPLE_ALPHA {
        return Err(Error::Grid(format!("simple smoothing alpha {alpha} off grid")));
    }
    let values = series.values();
    let mut out = Vec::with_capacity(values.len());
    for t in 0..values.len() {
        let lo = t.saturating_sub(alpha as usize);
        let window = &values[lo..=t];
        out.push(window.iter().sum::<f64>() / window.len() as f64);
    }
    MonthlySeries::new(series.start(), out)
}

/// Recursive exponentially weighted average seeded with the first value.
pub fn smooth_exponential(series: &MonthlySeries, alpha_tenths: u8) -> Result<MonthlySeries> {
    if !(1..=10).contains(&alpha_tenths) {
        return Err(Error::Grid(format!(
            "exponential smoothing alpha {} off grid",
            alpha_tenths as f64 / 10.0
        )));
    }
    if alpha_tenths == 10 {
        return Ok(series.clone());
    }
    let alpha = alpha_tenths as f64 / 10.0;
    let values = series.values();
    let mut out = Vec::with_capacity(values.len());
    let mut prev = values[0];
    out.push(prev);
    for &v in &values[1..] {
        prev = alpha * v + (1.0 - alpha) * prev;
        out.push(prev);
    }
    MonthlySeries::new(series.start(), out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumMode {
    Min,
    Max,
}

/// Extremum of the values over `[t - beta, t]` (current month included),
/// truncated at the series start.
pub fn trailing_extremum(
    series: &MonthlySeries,
    beta: u8,
    mode: ExtremumMode,
) -> Result<MonthlySeries> {
    if !(1..=MAX_BETA).contains(&beta) {
        return Err(Error::Grid(format!("beta {beta} off grid")));
    }
    let values = series.values();
    let mut out = Vec::with_capacity(values.len());
    for t in 0..values.len() {
        let lo = t.saturating_sub(beta as usize);
        let window = values[lo..=t].iter().copied();
        let ext = match mode {
            ExtremumMode::Min => window.fold(f64::INFINITY, f64::min),
            ExtremumMode::Max => window.fold(f64::NEG_INFINITY, f64::max),
        };
        out.push(ext);
    }
    MonthlySeries::new(series.start(), out)
}

/// Box-Cox-scaled gap `(high^g - low^g) / g`, with the logarithm at `g = 0`.
///
/// Requires `high >= low` pointwise; `low` must be strictly positive wherever
/// the exponent is below one.
pub fn boxcox_gap(
    high: &MonthlySeries,
    low: &MonthlySeries,
    gamma_tenths: u8,
) -> Result<MonthlySeries> {
    if gamma_tenths > 10 {
        return Err(Error::Grid(format!(
            "gamma {} off grid",
            gamma_tenths as f64 / 10.0
        )));
    }
    if high.start() != low.start() || high.len() != low.len() {
        return Err(Error::Alignment("box-cox inputs are misaligned".into()));
    }
    let gamma = gamma_tenths as f64 / 10.0;
    let mut out = Vec::with_capacity(high.len());
    for ((month, h), (_, l)) in high.iter().zip(low.iter()) {
        if gamma_tenths < 10 && l <= 0.0 {
            return Err(Error::Domain(format!(
                "box-cox base {l} at {month} must be positive when gamma < 1"
            )));
        }
        // exact zero when the gap is closed, so the state machine's
        // return-to-zero rule works without an epsilon
        let v = if h == l {
            0.0
        } else if gamma_tenths == 10 {
            h - l
        } else if gamma_tenths == 0 {
            (h / l).ln()
        } else {
            (h.powf(gamma) - l.powf(gamma)) / gamma
        };
        out.push(v);
    }
    MonthlySeries::new(high.start(), out)
}

/// Pointwise combination of the two single-variable indicators.
pub fn combine(
    u_ind: &MonthlySeries,
    v_ind: &MonthlySeries,
    combo: Combo,
    delta_tenths: u8,
) -> Result<MonthlySeries> {
    if delta_tenths > 10 {
        return Err(Error::Grid(format!(
            "delta {} off grid",
            delta_tenths as f64 / 10.0
        )));
    }
    if u_ind.start() != v_ind.start() || u_ind.len() != v_ind.len() {
        return Err(Error::Alignment("combined indicators are misaligned".into()));
    }
    let delta = delta_tenths as f64 / 10.0;
    let mut out = Vec::with_capacity(u_ind.len());
    for ((_, u), (_, v)) in u_ind.iter().zip(v_ind.iter()) {
        let value = match combo {
            Combo::Linear => {
                if delta_tenths == 10 {
                    u
                } else if delta_tenths == 0 {
                    v
                } else {
                    delta * u + (1.0 - delta) * v
                }
            }
            Combo::MinMax => {
                let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
                if delta_tenths == 10 {
                    lo
                } else if delta_tenths == 0 {
                    hi
                } else {
                    delta * lo + (1.0 - delta) * hi
                }
            }
        };
        out.push(value);
    }
    MonthlySeries::new(u_ind.start(), out)
}

/// One materialized indicator with its identity.
#[derive(Debug, Clone)]
pub struct IndicatorSeries {
    pub spec: IndicatorSpec,
    pub series: MonthlySeries,
}

/// Single-variable leg: smoothing, trailing extremum, Box-Cox gap.
pub fn materialize_leg(
    spec: &LegSpec,
    series: &MonthlySeries,
    direction: Direction,
) -> Result<MonthlySeries> {
    spec.validate()?;
    let smoothed = spec.smoothing.apply(series)?;
    match direction {
        Direction::RiseInRecession => {
            let low = trailing_extremum(&smoothed, spec.beta, ExtremumMode::Min)?;
            boxcox_gap(&smoothed, &low, spec.gamma_tenths)
        }
        Direction::FallInRecession => {
            let high = trailing_extremum(&smoothed, spec.beta, ExtremumMode::Max)?;
            boxcox_gap(&high, &smoothed, spec.gamma_tenths)
        }
    }
}

/// Builds the combined indicator for `spec` from aligned unemployment and
/// vacancy series. Both legs share the smoothing, horizon, and Box-Cox
/// parameters; only the combination method and weight differ.
pub fn materialize(
    spec: &IndicatorSpec,
    unemployment: &MonthlySeries,
    vacancy: &MonthlySeries,
) -> Result<IndicatorSeries> {
    spec.validate()?;
    if unemployment.start() != vacancy.start() || unemployment.len() != vacancy.len() {
        return Err(Error::Alignment(
            "unemployment and vacancy series must cover the same months".into(),
        ));
    }
    let u_hat = materialize_leg(&spec.leg, unemployment, Direction::RiseInRecession)?;
    let v_hat = materialize_leg(&spec.leg, vacancy, Direction::FallInRecession)?;
    let series = combine(&u_hat, &v_hat, spec.combo, spec.delta_tenths)?;
    Ok(IndicatorSeries { spec: *spec, series })
}

/// Value lists for each grid dimension. Omitted dimensions default to the
/// full grid: 12 simple + 10 exponential smoothings, horizons 1..=18,
/// 11 Box-Cox exponents, 11 combination weights, both combination methods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridConfig {
    pub simple_alphas: Vec<u8>,
    pub ema_alpha_tenths: Vec<u8>,
    pub betas: Vec<u8>,
    pub gamma_tenths: Vec<u8>,
    pub delta_tenths: Vec<u8>,
    pub combos: Vec<Combo>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            simple_alphas: (0..=MAX_SIMPLE_ALPHA).collect(),
            ema_alpha_tenths: (1..=10).collect(),
            betas: (1..=MAX_BETA).collect(),
            gamma_tenths: (0..=10).collect(),
            delta_tenths: (0..=10).collect(),
            combos: vec![Combo::Linear, Combo::MinMax],
        }
    }
}

/// JSON shape of a grid config file: real-valued dimensions are written as
/// decimals and converted to exact tenths on load.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    simple_alphas: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ema_alphas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    betas: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gammas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deltas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    combos: Option<Vec<Combo>>,
}

impl GridConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: GridConfigFile = serde_json::from_str(text)?;
        let default = GridConfig::default();
        let to_tenths = |values: Vec<f64>| -> Result<Vec<u8>> {
            values
                .into_iter()
                .map(|v| parse_tenths(&v.to_string()))
                .collect()
        };
        let config = GridConfig {
            simple_alphas: file.simple_alphas.unwrap_or(default.simple_alphas),
            ema_alpha_tenths: match file.ema_alphas {
                Some(v) => to_tenths(v)?,
                None => default.ema_alpha_tenths,
            },
            betas: file.betas.unwrap_or(default.betas),
            gamma_tenths: match file.gammas {
                Some(v) => to_tenths(v)?,
                None => default.gamma_tenths,
            },
            delta_tenths: match file.deltas {
                Some(v) => to_tenths(v)?,
                None => default.delta_tenths,
            },
            combos: file.combos.unwrap_or(default.combos),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.smoothings().next().is_none()
            || self.betas.is_empty()
            || self.gamma_tenths.is_empty()
            || self.delta_tenths.is_empty()
            || self.combos.is_empty()
        {
            return Err(Error::Config("grid has an empty dimension".into()));
        }
        for spec in self.leg_specs() {
            spec.validate()?;
        }
        Ok(())
    }

    /// All smoothings, simple before exponential, parameters ascending.
    pub fn smoothings(&self) -> impl Iterator<Item = Smoothing> + '_ {
        self.simple_alphas
            .iter()
            .map(|&alpha| Smoothing::Simple { alpha })
            .chain(
                self.ema_alpha_tenths
                    .iter()
                    .map(|&alpha_tenths| Smoothing::Exponential { alpha_tenths }),
            )
    }

    /// Per-leg transforms in canonical order; the default grid has 4,356.
    pub fn leg_specs(&self) -> Vec<LegSpec> {
        let mut specs = Vec::with_capacity(self.per_leg_count() as usize);
        for smoothing in self.smoothings() {
            for &beta in &self.betas {
                for &gamma_tenths in &self.gamma_tenths {
                    specs.push(LegSpec {
                        smoothing,
                        beta,
                        gamma_tenths,
                    });
                }
            }
        }
        specs
    }

    pub fn per_leg_count(&self) -> u64 {
        (self.simple_alphas.len() + self.ema_alpha_tenths.len()) as u64
            * self.betas.len() as u64
            * self.gamma_tenths.len() as u64
    }

    pub fn indicator_count(&self) -> u64 {
        self.per_leg_count() * self.delta_tenths.len() as u64 * self.combos.len() as u64
    }

    /// Grid cells once a threshold grid is attached; the full grid with
    /// 2,500 thresholds has 239,580,000.
    pub fn classifier_cell_count(&self, zeta_count: u64) -> u64 {
        self.indicator_count() * zeta_count
    }

    /// Full indicator grid in canonical spec order.
    pub fn enumerate(&self) -> Result<Vec<IndicatorSpec>> {
        self.validate()?;
        let legs = self.leg_specs();
        let mut specs = Vec::with_capacity(self.indicator_count() as usize);
        for &combo in &self.combos {
            for leg in &legs {
                for &delta_tenths in &self.delta_tenths {
                    specs.push(IndicatorSpec {
                        combo,
                        leg: *leg,
                        delta_tenths,
                    });
                }
            }
        }
        specs.sort_unstable();
        Ok(specs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::month::MonthIndex;

    fn series(values: &[f64]) -> MonthlySeries {
        MonthlySeries::new(MonthIndex::new(2000, 1), values.to_vec()).unwrap()
    }

    #[test]
    fn simple_smoothing_truncates_at_start() {
        let out = smooth_simple(&series(&[2.0, 4.0, 6.0]), 1).unwrap();
        assert_eq!(out.values(), &[2.0, 3.0, 5.0]);
    }

    #[test]
    fn simple_alpha_zero_is_identity() {
        let s = series(&[1.0, 5.0, 2.0]);
        assert_eq!(smooth_simple(&s, 0).unwrap(), s);
        assert!(smooth_simple(&s, 12).is_err());
    }

    #[test]
    fn exponential_recursion_seeded_with_first_value() {
        let out = smooth_exponential(&series(&[1.0, 3.0]), 5).unwrap();
        assert_eq!(out.values(), &[1.0, 2.0]);
        let s = series(&[1.0, 5.0, 2.0]);
        assert_eq!(smooth_exponential(&s, 10).unwrap(), s);
        assert!(smooth_exponential(&s, 0).is_err());
    }

    #[test]
    fn smoothing_preserves_constants() {
        let s = series(&[4.0; 10]);
        assert_eq!(smooth_simple(&s, 5).unwrap(), s);
        assert_eq!(smooth_exponential(&s, 3).unwrap(), s);
    }

    #[test]
    fn trailing_min_hand_trace() {
        let out = trailing_extremum(&series(&[3.0, 2.0, 4.0]), 1, ExtremumMode::Min).unwrap();
        assert_eq!(out.values(), &[3.0, 2.0, 2.0]);
    }

    #[test]
    fn trailing_min_of_nonincreasing_is_identity() {
        let s = series(&[5.0, 4.0, 4.0, 3.0]);
        let out = trailing_extremum(&s, 2, ExtremumMode::Min).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn long_horizon_is_running_extremum() {
        let s = series(&[3.0, 1.0, 4.0, 1.0, 5.0]);
        let out = trailing_extremum(&s, 18, ExtremumMode::Max).unwrap();
        let mut running = f64::NEG_INFINITY;
        let expected: Vec<f64> = s
            .values()
            .iter()
            .map(|&v| {
                running = running.max(v);
                running
            })
            .collect();
        assert_eq!(out.values(), expected.as_slice());
    }

    #[test]
    fn boxcox_gamma_one_is_level_change() {
        let high = series(&[4.0, 3.0]);
        let low = series(&[2.0, 3.0]);
        let out = boxcox_gap(&high, &low, 10).unwrap();
        assert_eq!(out.values(), &[2.0, 0.0]);
    }

    #[test]
    fn boxcox_gamma_zero_is_log_ratio() {
        let out = boxcox_gap(&series(&[4.0]), &series(&[2.0]), 0).unwrap();
        assert!((out.values()[0] - 2.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn boxcox_zero_gap_for_every_gamma() {
        for g in 0..=10 {
            let out = boxcox_gap(&series(&[3.0, 3.0]), &series(&[3.0, 3.0]), g).unwrap();
            assert_eq!(out.values(), &[0.0, 0.0]);
        }
    }

    #[test]
    fn boxcox_rejects_nonpositive_base_below_one() {
        assert!(boxcox_gap(&series(&[1.0]), &series(&[0.0]), 5).is_err());
        // gamma = 1 tolerates zero bases
        assert!(boxcox_gap(&series(&[1.0]), &series(&[0.0]), 10).is_ok());
    }

    #[test]
    fn combine_degenerate_weights() {
        let u = series(&[1.0, 4.0]);
        let v = series(&[3.0, 2.0]);
        assert_eq!(combine(&u, &v, Combo::Linear, 10).unwrap(), u);
        assert_eq!(combine(&u, &v, Combo::Linear, 0).unwrap(), v);
        assert_eq!(
            combine(&u, &v, Combo::MinMax, 10).unwrap().values(),
            &[1.0, 2.0]
        );
        assert_eq!(
            combine(&u, &v, Combo::MinMax, 0).unwrap().values(),
            &[3.0, 4.0]
        );
        assert_eq!(
            combine(&series(&[1.0]), &series(&[3.0]), Combo::MinMax, 5)
                .unwrap()
                .values(),
            &[2.0]
        );
    }

    #[test]
    fn default_grid_counts() {
        let grid = GridConfig::default();
        assert_eq!(grid.per_leg_count(), 4_356);
        assert_eq!(grid.indicator_count(), 95_832);
        assert_eq!(grid.enumerate().unwrap().len(), 95_832);
    }

    #[test]
    fn singleton_grid_yields_one_spec_per_combo() {
        let grid = GridConfig {
            simple_alphas: vec![2],
            ema_alpha_tenths: vec![],
            betas: vec![12],
            gamma_tenths: vec![10],
            delta_tenths: vec![10],
            combos: vec![Combo::Linear, Combo::MinMax],
        };
        assert_eq!(grid.enumerate().unwrap().len(), 2);
    }

    #[test]
    fn empty_grid_dimension_is_config_error() {
        let grid = GridConfig {
            betas: vec![],
            ..GridConfig::default()
        };
        assert!(matches!(grid.enumerate(), Err(Error::Config(_))));
    }

    #[test]
    fn enumerate_is_sorted_canonically() {
        let specs = GridConfig::default().enumerate().unwrap();
        assert!(specs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn michez_spec_round_trips_through_string() {
        let text = "combo=minmax,smooth=sma:2,beta=12,gamma=1.0,delta=1.0";
        let spec: IndicatorSpec = text.parse().unwrap();
        assert_eq!(spec.combo, Combo::MinMax);
        assert_eq!(spec.leg.smoothing, Smoothing::Simple { alpha: 2 });
        assert_eq!(spec.to_string(), text);
        let ema = "combo=minmax,smooth=ema:0.5,beta=5,gamma=1.0,delta=1.0";
        assert_eq!(ema.parse::<IndicatorSpec>().unwrap().to_string(), ema);
    }

    #[test]
    fn constant_inputs_yield_zero_indicator() {
        let u = series(&[5.0; 24]);
        let v = series(&[6.0; 24]);
        let spec: IndicatorSpec = "combo=minmax,smooth=sma:2,beta=12,gamma=1.0,delta=1.0"
            .parse()
            .unwrap();
        let ind = materialize(&spec, &u, &v).unwrap();
        assert!(ind.series.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn materialize_matches_stage_by_stage_composition() {
        let u = series(&[5.0, 5.2, 5.1, 5.6, 6.2, 6.0, 5.8, 5.5, 5.9, 6.4]);
        let v = series(&[4.0, 3.9, 4.1, 3.6, 3.1, 3.3, 3.5, 3.8, 3.4, 3.0]);
        let spec: IndicatorSpec = "combo=linear,smooth=ema:0.5,beta=3,gamma=0.5,delta=0.3"
            .parse()
            .unwrap();
        let ind = materialize(&spec, &u, &v).unwrap();

        let u_bar = smooth_exponential(&u, 5).unwrap();
        let v_bar = smooth_exponential(&v, 5).unwrap();
        let u_min = trailing_extremum(&u_bar, 3, ExtremumMode::Min).unwrap();
        let v_max = trailing_extremum(&v_bar, 3, ExtremumMode::Max).unwrap();
        let u_hat = boxcox_gap(&u_bar, &u_min, 5).unwrap();
        let v_hat = boxcox_gap(&v_max, &v_bar, 5).unwrap();
        let expected = combine(&u_hat, &v_hat, Combo::Linear, 3).unwrap();
        assert_eq!(ind.series, expected);
    }

    #[test]
    fn grid_config_json_defaults_and_overrides() {
        let grid = GridConfig::from_json(r#"{"betas": [12], "gammas": [1.0]}"#).unwrap();
        assert_eq!(grid.betas, vec![12]);
        assert_eq!(grid.gamma_tenths, vec![10]);
        assert_eq!(grid.simple_alphas.len(), 12);
        assert!(GridConfig::from_json(r#"{"gammas": [0.15]}"#).is_err());
    }
}
