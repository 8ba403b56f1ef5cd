//! Relative-improvement priors per strategy and the recommendation ranking
//! built on them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, Strategy, StrategyProfile};
use crate::fixed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Significance {
    #[serde(rename = "p < 0.01")]
    P01,
    #[serde(rename = "p < 0.05")]
    P05,
    #[serde(rename = "p < 0.10")]
    P10,
    #[serde(rename = "Not significant")]
    NotSignificant,
}

impl Significance {
    pub fn label(self) -> &'static str {
        match self {
            Significance::P01 => "p < 0.01",
            Significance::P05 => "p < 0.05",
            Significance::P10 => "p < 0.10",
            Significance::NotSignificant => "Not significant",
        }
    }

    pub fn is_significant(self) -> bool {
        self != Significance::NotSignificant
    }
}

impl fmt::Display for Significance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Significance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let squashed: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        match squashed.as_str() {
            "p<0.01" => Ok(Significance::P01),
            "p<0.05" => Ok(Significance::P05),
            "p<0.10" | "p<0.1" => Ok(Significance::P10),
            "notsignificant" | "ns" => Ok(Significance::NotSignificant),
            _ => Err(format!("unknown significance tier {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyPrior {
    pub strategy: Strategy,
    pub relative_improvement_percent: f64,
    pub significance: Significance,
}

/// The bundled prior table, in its published (descending) order.
pub const DEFAULT_PRIORS: [StrategyPrior; 9] = [
    prior(Strategy::CiteSources, 40.0, Significance::P01),
    prior(Strategy::StatisticsAddition, 37.0, Significance::P01),
    prior(Strategy::QuotationAddition, 22.0, Significance::P05),
    prior(Strategy::AuthoritativeTone, 15.0, Significance::P05),
    prior(Strategy::TechnicalTerms, 12.0, Significance::P10),
    prior(Strategy::FluencyOptimization, 10.0, Significance::P10),
    prior(Strategy::UniqueWords, 8.0, Significance::NotSignificant),
    prior(Strategy::EasyToUnderstand, 5.0, Significance::NotSignificant),
    prior(Strategy::KeywordStuffing, 3.0, Significance::NotSignificant),
];

const fn prior(strategy: Strategy, pct: f64, significance: Significance) -> StrategyPrior {
    StrategyPrior {
        strategy,
        relative_improvement_percent: pct,
        significance,
    }
}

/// Position of `strategy` in the bundled table; used to break ties.
pub fn published_rank(strategy: Strategy) -> usize {
    DEFAULT_PRIORS
        .iter()
        .position(|p| p.strategy == strategy)
        .expect("every strategy has a bundled prior")
}

pub fn default_priors() -> Vec<StrategyPrior> {
    DEFAULT_PRIORS.to_vec()
}

/// Renders priors as `Strategy,Relative Improvement (%),Statistical Significance`
/// rows with values such as `+40.0%` and `p < 0.01`.
pub fn priors_to_csv(priors: &[StrategyPrior]) -> String {
    let mut out = String::from("Strategy,Relative Improvement (%),Statistical Significance\n");
    for p in priors {
        out.push_str(&format!(
            "{},{:+.1}%,{}\n",
            p.strategy.name(),
            p.relative_improvement_percent,
            p.significance
        ));
    }
    out
}

/// Parses the CSV written by [`priors_to_csv`] and checks completeness.
pub fn priors_from_csv(csv: &str) -> Result<Vec<StrategyPrior>, AnalysisError> {
    let mut lines = csv.lines().filter(|l| !l.trim().is_empty());
    lines.next();
    let priors = lines
        .enumerate()
        .map(|(i, line)| {
            let bad = |what: String| AnalysisError::Priors(format!("row {}: {what}", i + 1));
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let [name, pct, tier] = fields[..] else {
                return Err(bad(format!("expected 3 fields, got {}", fields.len())));
            };
            let strategy = name.parse::<Strategy>().map_err(bad)?;
            let relative_improvement_percent = pct
                .trim_end_matches('%')
                .parse::<f64>()
                .map_err(|e| bad(format!("{pct:?}: {e}")))?;
            let significance = tier.parse::<Significance>().map_err(bad)?;
            Ok(StrategyPrior {
                strategy,
                relative_improvement_percent,
                significance,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    check_complete(&priors)?;
    Ok(priors)
}

fn check_complete(priors: &[StrategyPrior]) -> Result<(), AnalysisError> {
    for s in Strategy::ALL {
        let n = priors.iter().filter(|p| p.strategy == s).count();
        if n != 1 {
            return Err(AnalysisError::Priors(format!(
                "{} appears {n} times; every strategy needs exactly one prior",
                s.name()
            )));
        }
    }
    if priors.len() != Strategy::ALL.len() {
        return Err(AnalysisError::Priors(format!("expected 9 priors, got {}", priors.len())));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recommendation {
    pub strategy: Strategy,
    #[serde(serialize_with = "fixed::serialize")]
    pub relative_improvement_percent: f64,
    pub significance: Significance,
    #[serde(serialize_with = "fixed::serialize")]
    pub current: f64,
    /// `prior × (1 − current)`.
    #[serde(serialize_with = "fixed::serialize")]
    pub priority: f64,
    /// Listed for completeness; the prior is not statistically significant.
    pub deprioritized: bool,
}

/// Ranks all nine strategies by expected gain. Significant strategies come
/// first, each group ordered by `prior × headroom`, ties in published order.
pub fn recommend_strategies(
    profile: &StrategyProfile,
    priors: &[StrategyPrior],
) -> Result<Vec<Recommendation>, AnalysisError> {
    check_complete(priors)?;
    let mut recs: Vec<Recommendation> = priors
        .iter()
        .map(|p| {
            let current = profile.score(p.strategy).normalized;
            Recommendation {
                strategy: p.strategy,
                relative_improvement_percent: p.relative_improvement_percent,
                significance: p.significance,
                current,
                priority: p.relative_improvement_percent * (1.0 - current),
                deprioritized: !p.significance.is_significant(),
            }
        })
        .collect();
    recs.sort_by(|a, b| {
        a.deprioritized
            .cmp(&b.deprioritized)
            .then(b.priority.total_cmp(&a.priority))
            .then(published_rank(a.strategy).cmp(&published_rank(b.strategy)))
    });
    Ok(recs)
}

pub fn recommendations_markdown(recs: &[Recommendation]) -> String {
    let mut out = String::from(
        "| # | Strategy | Prior | Significance | Current | Priority | Note |\n|---:|---|---:|---|---:|---:|---|\n",
    );
    for (i, r) in recs.iter().enumerate() {
        out.push_str(&format!(
            "| {} | {} | {:+.1}% | {} | {:.2} | {:.2} | {} |\n",
            i + 1,
            r.strategy.name(),
            r.relative_improvement_percent,
            r.significance,
            r.current,
            r.priority,
            if r.deprioritized { "deprioritized" } else { "" }
        ));
    }
    out
}
