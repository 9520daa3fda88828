//! Detection-error statistics, the anticipation-precision frontier, and
//! ensemble selection.

use crate::classifier::ClassifierSpec;
use crate::error::{Error, Result};
use crate::month::MonthIndex;
use serde::{Deserialize, Serialize};

/// Signed month gaps between rank-paired detections and event starts: the
/// j-th detection is compared to the j-th start.
pub fn detection_errors(
    detections: &[MonthIndex],
    starts: &[MonthIndex],
) -> Result<Vec<i32>> {
    if detections.len() != starts.len() {
        return Err(Error::NotPerfect {
            got: detections.len(),
            expected: starts.len(),
        });
    }
    Ok(detections
        .iter()
        .zip(starts)
        .map(|(&d, &s)| d - s)
        .collect())
}

/// Mean and population standard deviation (divisor = sample size).
pub fn stats(errors: &[i32]) -> Result<(f64, f64)> {
    if errors.is_empty() {
        return Err(Error::Empty("no detection errors".into()));
    }
    let n = errors.len() as f64;
    let mu = errors.iter().map(|&e| e as f64).sum::<f64>() / n;
    let var = errors
        .iter()
        .map(|&e| {
            let d = e as f64 - mu;
            d * d
        })
        .sum::<f64>()
        / n;
    Ok((mu, var.sqrt()))
}

/// Per-classifier detection-error summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierStats {
    pub spec: ClassifierSpec,
    pub detections: Vec<MonthIndex>,
    pub errors: Vec<i32>,
    pub mu: f64,
    pub sigma: f64,
}

impl ClassifierStats {
    pub fn from_detections(
        spec: ClassifierSpec,
        detections: Vec<MonthIndex>,
        starts: &[MonthIndex],
    ) -> Result<Self> {
        let errors = detection_errors(&detections, starts)?;
        let (mu, sigma) = stats(&errors)?;
        Ok(ClassifierStats {
            spec,
            detections,
            errors,
            mu,
            sigma,
        })
    }
}

/// The Pareto-minimal subset in the (mean error, error standard deviation)
/// plane, sorted by ascending mean. Classifiers attaining identical frontier
/// points are all retained, in canonical spec order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frontier {
    points: Vec<ClassifierStats>,
}

impl Frontier {
    pub fn points(&self) -> &[ClassifierStats] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn min_sigma(&self) -> Option<f64> {
        self.points
            .iter()
            .map(|p| p.sigma)
            .fold(None, |acc, s| Some(acc.map_or(s, |a: f64| a.min(s))))
    }
}

/// Extracts all and only the non-dominated points. A point is dominated when
/// another has mu <= and sigma <= with at least one strict inequality.
pub fn pareto_frontier(mut input: Vec<ClassifierStats>) -> Frontier {
    input.sort_unstable_by(|a, b| {
        a.mu.total_cmp(&b.mu)
            .then(a.sigma.total_cmp(&b.sigma))
            .then(a.spec.cmp(&b.spec))
    });
    let mut points: Vec<ClassifierStats> = Vec::new();
    let mut best_sigma = f64::INFINITY;
    let mut i = 0;
    while i < input.len() {
        // group of equal mu; only its minimal sigma can survive
        let mut j = i;
        while j < input.len() && input[j].mu == input[i].mu {
            j += 1;
        }
        let min_sigma = input[i].sigma; // sorted within the group
        if min_sigma < best_sigma {
            points.extend(
                input[i..j]
                    .iter()
                    .filter(|p| p.sigma == min_sigma)
                    .cloned(),
            );
            best_sigma = min_sigma;
        }
        i = j;
    }
    Frontier { points }
}

/// Frontier members with sigma strictly below `sigma_max`, the
/// high-precision segment.
pub fn select_high_precision(frontier: &Frontier, sigma_max: f64) -> Vec<ClassifierStats> {
    frontier
        .points
        .iter()
        .filter(|p| p.sigma < sigma_max)
        .cloned()
        .collect()
}

/// The frontier member minimizing `mu + lambda * sigma`; ties go to the
/// earliest point in frontier order.
pub fn select_by_preference(frontier: &Frontier, lambda: f64) -> Result<ClassifierStats> {
    if lambda <= 0.0 {
        return Err(Error::Config(format!("lambda must be positive, got {lambda}")));
    }
    frontier
        .points
        .iter()
        .min_by(|a, b| {
            (a.mu + lambda * a.sigma).total_cmp(&(b.mu + lambda * b.sigma))
        })
        .cloned()
        .ok_or_else(|| Error::EmptyResult("frontier is empty".into()))
}

/// Minimum Euclidean distance in the (mu, sigma) months-plane from a point
/// to the frontier members.
pub fn distance_to_frontier(mu: f64, sigma: f64, frontier: &Frontier) -> f64 {
    frontier
        .points
        .iter()
        .map(|p| ((p.mu - mu).powi(2) + (p.sigma - sigma).powi(2)).sqrt())
        .fold(f64::INFINITY, f64::min)
}
