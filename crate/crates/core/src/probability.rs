//! Per-classifier recession-start probabilities from the fitted normal error
//! model, and their equal-weight ensemble average.

use crate::classifier::{run_state_machine, DetectionOutcome, Zeta};
use crate::error::{Error, Result};
use crate::indicator::{materialize, IndicatorSpec};
use crate::month::MonthIndex;
use crate::series::MonthlySeries;
use serde::{Deserialize, Serialize};

/// Standard normal cumulative distribution function.
///
/// Hart-style rational approximation of the upper tail scaled by the normal
/// density, accurate to well under 1e-7 absolute over the whole line.
pub fn normal_cdf(x: f64) -> f64 {
    let xabs = x.abs();
    let upper_tail = if xabs > 37.0 {
        0.0
    } else {
        let e = (-xabs * xabs / 2.0).exp();
        if xabs < 7.071_067_811_865_475 {
            let mut n = 3.526_249_659_989_11e-2 * xabs + 0.700_383_064_443_688;
            n = n * xabs + 6.373_962_203_531_65;
            n = n * xabs + 33.912_866_078_383;
            n = n * xabs + 112.079_291_497_871;
            n = n * xabs + 221.213_596_169_931;
            n = n * xabs + 220.206_867_912_376;
            let mut d = 8.838_834_764_831_84e-2 * xabs + 1.755_667_163_182_64;
            d = d * xabs + 16.064_177_579_207;
            d = d * xabs + 86.780_732_202_946_1;
            d = d * xabs + 296.564_248_779_674;
            d = d * xabs + 637.333_633_378_831;
            d = d * xabs + 793.826_512_519_948;
            d = d * xabs + 440.413_735_824_752;
            e * n / d
        } else {
            let mut b = xabs + 0.65;
            b = xabs + 4.0 / b;
            b = xabs + 3.0 / b;
            b = xabs + 2.0 / b;
            b = xabs + 1.0 / b;
            e / (b * 2.506_628_274_631_000_5)
        }
    };
    if x > 0.0 {
        1.0 - upper_tail
    } else {
        upper_tail
    }
}

/// Probability that the event has started by month `t`, given the most
/// recent detection `d` and the classifier's training error moments. Zero
/// whenever the classifier signals expansion.
pub fn classifier_probability(
    in_recession: bool,
    last_detection: MonthIndex,
    mu: f64,
    sigma: f64,
    t: MonthIndex,
) -> Result<f64> {
    if !in_recession {
        return Ok(0.0);
    }
    if sigma <= 0.0 {
        return Err(Error::Degenerate(format!(
            "sigma {sigma} must be positive to evaluate the error model"
        )));
    }
    Ok(normal_cdf(((t - last_detection) as f64 + mu) / sigma))
}

/// Equal-weight mean of the individual probabilities.
pub fn ensemble_probability(per_classifier: &[f64]) -> Result<f64> {
    if per_classifier.is_empty() {
        return Err(Error::Empty("no classifier probabilities to average".into()));
    }
    Ok(per_classifier.iter().sum::<f64>() / per_classifier.len() as f64)
}

/// One trained ensemble member: frozen spec, threshold, and training-sample
/// error moments.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleMember {
    /// Canonical spec string, e.g. `combo=minmax,smooth=ema:0.5,...`.
    pub spec: IndicatorSpec,
    pub zeta: Zeta,
    pub mu: f64,
    pub sigma: f64,
    pub detections: Vec<MonthIndex>,
}

/// The trained artifact: ensemble members plus the training window their
/// moments were estimated on. Moments are frozen; they are never
/// re-estimated on later data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ensemble {
    pub train_start: MonthIndex,
    pub train_end: MonthIndex,
    pub members: Vec<EnsembleMember>,
}

impl Ensemble {
    pub fn validate(&self) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::EmptyResult("ensemble has no members".into()));
        }
        for m in &self.members {
            m.spec.validate()?;
            if m.sigma <= 0.0 {
                return Err(Error::Degenerate(format!(
                    "member {} has sigma {}, the error model needs sigma > 0",
                    m.spec, m.sigma
                )));
            }
        }
        Ok(())
    }
}

/// Per-month per-classifier probabilities plus the ensemble mean.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbabilityTimeline {
    pub start: MonthIndex,
    /// One probability track per ensemble member, canonical spec order.
    pub per_classifier: Vec<Vec<f64>>,
    pub ensemble: Vec<f64>,
}

impl ProbabilityTimeline {
    pub fn end(&self) -> MonthIndex {
        self.start + (self.ensemble.len() as i32 - 1)
    }

    pub fn ensemble_at(&self, month: MonthIndex) -> Option<f64> {
        let i = month - self.start;
        (0..self.ensemble.len() as i32)
            .contains(&i)
            .then(|| self.ensemble[i as usize])
    }
}

/// Computes the timeline over `[from, to]`. Each member's state machine runs
/// from the ensemble's training start through `to`, so out-of-sample months
/// are a seamless continuation of the training-period state.
pub fn probability_timeline(
    ensemble: &Ensemble,
    unemployment: &MonthlySeries,
    vacancy: &MonthlySeries,
    from: MonthIndex,
    to: MonthIndex,
    zero_eps: f64,
) -> Result<ProbabilityTimeline> {
    ensemble.validate()?;
    if from < ensemble.train_start {
        return Err(Error::Alignment(format!(
            "timeline start {from} precedes training start {}",
            ensemble.train_start
        )));
    }
    if to < from {
        return Err(Error::Alignment(format!("window {from}..{to} is empty")));
    }
    let months = (to - from + 1) as usize;
    let mut per_classifier = Vec::with_capacity(ensemble.members.len());
    for member in &ensemble.members {
        let indicator = materialize(&member.spec, unemployment, vacancy)?;
        let outcome = run_state_machine(
            &indicator.series,
            member.zeta,
            (ensemble.train_start, to),
            zero_eps,
        )?;
        per_classifier.push(member_track(member, &outcome, from, months)?);
    }
    let mut ensemble_track = Vec::with_capacity(months);
    for i in 0..months {
        let at_month: Vec<f64> = per_classifier.iter().map(|track| track[i]).collect();
        ensemble_track.push(ensemble_probability(&at_month)?);
    }
    Ok(ProbabilityTimeline {
        start: from,
        per_classifier,
        ensemble: ensemble_track,
    })
}

fn member_track(
    member: &EnsembleMember,
    outcome: &DetectionOutcome,
    from: MonthIndex,
    months: usize,
) -> Result<Vec<f64>> {
    let mut track = Vec::with_capacity(months);
    for i in 0..months {
        let t = from + i as i32;
        let in_recession = outcome.in_recession_at(t).ok_or_else(|| {
            Error::Alignment(format!("month {t} outside the classifier run"))
        })?;
        let p = match outcome.last_detection_at(t) {
            Some(d) if in_recession => {
                classifier_probability(true, d, member.mu, member.sigma, t)?
            }
            _ => 0.0,
        };
        track.push(p);
    }
    Ok(track)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    #[test]
    fn cdf_center_and_symmetry() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-12);
        for x in [0.1, 0.5, 1.0, 2.5, 6.0, 8.0] {
            assert!((normal_cdf(-x) - (1.0 - normal_cdf(x))).abs() < 1e-12);
        }
    }

    #[test]
    fn cdf_reference_values() {
        // classic table values
        assert!((normal_cdf(1.0) - 0.841_344_746_068_543).abs() < 1e-9);
        assert!((normal_cdf(-1.96) - 0.024_997_895_148_220_435).abs() < 1e-9);
        assert!((normal_cdf(3.0) - 0.998_650_101_968_37).abs() < 1e-9);
    }

    #[test]
    fn probability_at_detection_month() {
        let d = MonthIndex::new(2020, 3);
        // on-time classifier: 50% at activation
        let p = classifier_probability(true, d, 0.0, 2.0, d).unwrap();
        assert!((p - 0.5).abs() < 1e-9);
        // late classifier: above 50% at activation
        let p = classifier_probability(true, d, 2.0, 2.0, d).unwrap();
        assert!((p - normal_cdf(1.0)).abs() < 1e-12);
        // expansion state pins the probability at zero
        assert_eq!(classifier_probability(false, d, 2.0, 2.0, d).unwrap(), 0.0);
    }

    #[test]
    fn probability_rejects_degenerate_sigma() {
        let d = MonthIndex::new(2020, 3);
        assert!(classifier_probability(true, d, 0.0, 0.0, d).is_err());
    }

    #[test]
    fn probability_increases_during_recession() {
        let d = MonthIndex::new(2020, 3);
        let mut last = 0.0;
        for k in 0..24 {
            let p = classifier_probability(true, d, 1.5, 2.0, d + k).unwrap();
            // strictly increasing until the cdf saturates in f64
            if last < 0.999_999 {
                assert!(p > last, "month {k}");
            } else {
                assert!(p >= last, "month {k}");
            }
            last = p;
        }
        assert!(last > 0.99);
    }

    #[test]
    fn ensemble_mean() {
        assert_eq!(ensemble_probability(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(ensemble_probability(&[0.0, 1.0]).unwrap(), 0.5);
        assert!(ensemble_probability(&[]).is_err());
    }

    #[test]
    fn timeline_single_member_matches_direct_formula() {
        let start = MonthIndex::new(2000, 1);
        // flat then rising unemployment, flat vacancy: one clean excursion
        let mut u = vec![5.0; 12];
        u.extend([5.5, 6.0, 6.5, 7.0, 7.0, 6.5, 6.0, 5.5, 5.0, 4.8, 4.6, 4.5]);
        let u = MonthlySeries::new(start, u).unwrap();
        let v = MonthlySeries::new(start, vec![4.0; 24]).unwrap();
        let spec = IndicatorSpec::from_str(
            "combo=linear,smooth=sma:0,beta=6,gamma=1.0,delta=1.0",
        )
        .unwrap();
        let member = EnsembleMember {
            spec,
            zeta: Zeta::from_value(0.4).unwrap(),
            mu: 1.0,
            sigma: 2.0,
            detections: vec![],
        };
        let ensemble = Ensemble {
            train_start: start,
            train_end: u.end(),
            members: vec![member.clone()],
        };
        let timeline =
            probability_timeline(&ensemble, &u, &v, start, u.end(), 0.0).unwrap();
        assert_eq!(timeline.per_classifier.len(), 1);
        assert_eq!(timeline.per_classifier[0], timeline.ensemble);

        let ind = materialize(&spec, &u, &v).unwrap();
        let outcome =
            run_state_machine(&ind.series, member.zeta, (start, u.end()), 0.0).unwrap();
        assert_eq!(outcome.detections().len(), 1);
        let d = outcome.detections()[0];
        for (i, &p) in timeline.ensemble.iter().enumerate() {
            let t = start + i as i32;
            if outcome.in_recession_at(t).unwrap() {
                let expected = normal_cdf(((t - d) as f64 + 1.0) / 2.0);
                assert!((p - expected).abs() < 1e-15);
            } else {
                assert_eq!(p, 0.0, "expansion month {t} must contribute zero");
            }
        }
        // deactivation resets the contribution to zero the same month
        let last = timeline.ensemble.last().copied().unwrap();
        assert_eq!(last, 0.0);
    }
}
