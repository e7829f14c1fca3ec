use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{fleiss_kappa, EvalError};

pub const BOOTSTRAP_RESAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetVariant {
    GenerateStratify,
    ExtractStratify,
    GenerateNaive,
}

impl SetVariant {
    pub const ALL: [SetVariant; 3] = [SetVariant::GenerateStratify, SetVariant::ExtractStratify, SetVariant::GenerateNaive];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vote {
    Want,
    Neutral,
    NotWant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceBallot {
    pub participant_id: String,
    pub concept: String,
    pub expertise: u8,
    pub set_choice: SetVariant,
    #[serde(default)]
    pub votes: BTreeMap<String, Vote>,
}

impl PreferenceBallot {
    pub fn validate(&self) -> Result<(), EvalError> {
        if !(1..=5).contains(&self.expertise) {
            return Err(EvalError::InvalidBallot(format!(
                "{}/{}: expertise {} outside 1-5",
                self.participant_id, self.concept, self.expertise
            )));
        }
        Ok(())
    }

    pub fn want_count(&self) -> usize {
        self.votes.values().filter(|v| **v == Vote::Want).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub estimate: f64,
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferredCount {
    pub participant_id: String,
    pub concept: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceSummary {
    /// concept -> variant -> number of ballots choosing it.
    pub counts: BTreeMap<String, BTreeMap<SetVariant, usize>>,
    /// Median over concepts of each variant's count, with a 95% bootstrap interval.
    pub medians: BTreeMap<SetVariant, Interval>,
    pub preferred: Vec<PreferredCount>,
    /// Mean "want" count per (participant, concept), with a 95% bootstrap interval.
    pub mean_preferred: Interval,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Percentile bootstrap 95% interval of `stat` over `values`.
pub fn bootstrap_ci(values: &[f64], stat: fn(&[f64]) -> f64, resamples: usize, seed: u64) -> Interval {
    let estimate = stat(values);
    if values.is_empty() || resamples == 0 {
        return Interval { estimate, low: estimate, high: estimate };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = vec![0.0; values.len()];
    let mut stats: Vec<f64> = (0..resamples)
        .map(|_| {
            for slot in buf.iter_mut() {
                *slot = values[rng.random_range(0..values.len())];
            }
            stat(&buf)
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    let at = |q: f64| stats[((q * (resamples - 1) as f64).round() as usize).min(resamples - 1)];
    Interval { estimate, low: at(0.025), high: at(0.975) }
}

pub fn preference_summary(ballots: &[PreferenceBallot], seed: u64) -> Result<PreferenceSummary, EvalError> {
    if ballots.is_empty() {
        return Err(EvalError::Empty);
    }
    for b in ballots {
        b.validate()?;
    }
    let mut counts: BTreeMap<String, BTreeMap<SetVariant, usize>> = BTreeMap::new();
    for b in ballots {
        let row = counts.entry(b.concept.clone()).or_insert_with(|| SetVariant::ALL.iter().map(|&v| (v, 0)).collect());
        *row.entry(b.set_choice).or_default() += 1;
    }
    let medians = SetVariant::ALL
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let per_concept: Vec<f64> = counts.values().map(|row| row[&v] as f64).collect();
            (v, bootstrap_ci(&per_concept, median, BOOTSTRAP_RESAMPLES, seed.wrapping_add(i as u64)))
        })
        .collect();
    let mut preferred: Vec<PreferredCount> = ballots
        .iter()
        .map(|b| PreferredCount { participant_id: b.participant_id.clone(), concept: b.concept.clone(), count: b.want_count() })
        .collect();
    preferred.sort_by(|a, b| (&a.participant_id, &a.concept).cmp(&(&b.participant_id, &b.concept)));
    let values: Vec<f64> = preferred.iter().map(|p| p.count as f64).collect();
    let mean_preferred = bootstrap_ci(&values, mean, BOOTSTRAP_RESAMPLES, seed.wrapping_add(SetVariant::ALL.len() as u64));
    Ok(PreferenceSummary { counts, medians, preferred, mean_preferred })
}

/// Vote categories used for per-concept agreement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoteEncoding {
    /// want / neutral / not_want
    #[default]
    Three,
    /// want / everything else
    Collapsed,
}

impl VoteEncoding {
    fn category(self, v: Vote) -> usize {
        match (self, v) {
            (_, Vote::Want) => 0,
            (VoteEncoding::Three, Vote::Neutral) => 1,
            (VoteEncoding::Three, Vote::NotWant) => 2,
            (VoteEncoding::Collapsed, _) => 1,
        }
    }

    fn categories(self) -> usize {
        match self {
            VoteEncoding::Three => 3,
            VoteEncoding::Collapsed => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptAgreement {
    pub concept: String,
    pub kappa: f64,
    pub n_items: usize,
    pub n_raters: usize,
}

/// Fleiss' kappa per concept: items are descriptions, raters are participants.
/// Only descriptions voted on by every participant of that concept are used;
/// concepts with fewer than two participants are skipped.
pub fn preference_agreement(ballots: &[PreferenceBallot], encoding: VoteEncoding) -> Vec<ConceptAgreement> {
    let mut by_concept: BTreeMap<&str, Vec<&PreferenceBallot>> = BTreeMap::new();
    for b in ballots {
        by_concept.entry(&b.concept).or_default().push(b);
    }
    let mut out = Vec::new();
    for (concept, group) in by_concept {
        let raters = group.len();
        if raters < 2 {
            continue;
        }
        let items: BTreeSet<&String> =
            group[0].votes.keys().filter(|id| group.iter().all(|b| b.votes.contains_key(*id))).collect();
        let matrix: Vec<Vec<usize>> = items
            .iter()
            .map(|id| {
                let mut row = vec![0; encoding.categories()];
                for b in &group {
                    row[encoding.category(b.votes[*id])] += 1;
                }
                row
            })
            .collect();
        if let Ok(report) = fleiss_kappa(&matrix) {
            out.push(ConceptAgreement { concept: concept.to_string(), kappa: report.kappa, n_items: matrix.len(), n_raters: raters });
        }
    }
    out
}
