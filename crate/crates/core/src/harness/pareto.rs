use serde::{Deserialize, Serialize};

use crate::env::PolicyMetrics;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSource {
    Rl,
    Baseline,
}

/// One (⟨D⟩, ⟨P⟩) point of a front, with its trade-off weight and origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub c: f64,
    pub avg_power: f64,
    pub avg_dissipation: f64,
    /// ⟨P⟩/⟨D⟩ when ⟨D⟩ > 0.
    pub efficiency: Option<f64>,
    pub source: PointSource,
    pub seed: Option<u64>,
    /// Policy description, e.g. baseline parameters.
    pub policy: String,
    /// Empty on success, otherwise the error that stopped this run.
    pub error: String,
}

impl ParetoPoint {
    pub fn from_metrics(c: f64, m: &PolicyMetrics, source: PointSource, seed: Option<u64>, policy: String) -> Self {
        ParetoPoint {
            c,
            avg_power: m.avg_power,
            avg_dissipation: m.avg_dissipation,
            efficiency: m.efficiency,
            source,
            seed,
            policy,
            error: String::new(),
        }
    }

    pub fn failed(c: f64, source: PointSource, seed: Option<u64>, error: String) -> Self {
        ParetoPoint {
            c,
            avg_power: f64::NAN,
            avg_dissipation: f64::NAN,
            efficiency: None,
            source,
            seed,
            policy: String::new(),
            error,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_empty()
    }

    pub fn figure_of_merit(&self) -> f64 {
        self.c * self.avg_power - (1.0 - self.c) * self.avg_dissipation
    }
}

/// Best successful point per c (by ⟨F_c⟩), sorted by c descending. A c with only
/// failures keeps its first failure so the error stays visible.
pub fn best_per_c(points: &[ParetoPoint]) -> Vec<ParetoPoint> {
    let mut cs: Vec<f64> = points.iter().map(|p| p.c).collect();
    cs.sort_by(|a, b| b.total_cmp(a));
    cs.dedup();
    cs.into_iter()
        .map(|c| {
            let group = points.iter().filter(|p| p.c == c);
            group
                .clone()
                .filter(|p| p.is_ok())
                .max_by(|a, b| a.figure_of_merit().total_cmp(&b.figure_of_merit()))
                .or_else(|| group.clone().next())
                .cloned()
                .expect("group is non-empty")
        })
        .collect()
}

/// Number of places where ⟨P⟩ increases as c decreases along a front sorted by
/// c descending.
pub fn front_inversions(front: &[ParetoPoint]) -> usize {
    front.windows(2).filter(|w| w[1].avg_power > w[0].avg_power).count()
}
