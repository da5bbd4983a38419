//! Prediction scoring: per-pair PNLS, per-family aggregates and optional
//! judge accuracy.
//!
//! Predictions are JSON lines: `{"qa_id":"…","answer":"…","model":"…"}`
//! (`model` is optional).

pub mod judge;
pub mod pnls;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::BufRead;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qa::{Family, Manifest, QaPair, Split};
use judge::{JudgeError, JudgePool, Verdict};
use pnls::MetricError;

pub use pnls::pnls;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("duplicate prediction for {0}")]
    Duplicate(String),
    #[error("prediction for unknown question {0}")]
    Unknown(String),
    #[error("predictions line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("question {qa_id}: {source}")]
    Metric { qa_id: String, source: MetricError },
    #[error(transparent)]
    Judge(#[from] JudgeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub qa_id: String,
    pub answer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
}

pub fn read_predictions<R: BufRead>(input: R) -> Result<Vec<Prediction>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| EvalError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

/// Which manifest records are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    #[default]
    Test,
    All,
}

impl Scope {
    fn includes(self, split: Split) -> bool {
        self == Scope::All || split == Split::Test
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub qa_id: String,
    pub family: Family,
    /// `None` when no prediction was supplied.
    pub pnls: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: Family,
    pub pairs: usize,
    pub scored: usize,
    pub missing: usize,
    pub mean_pnls: Option<f64>,
    pub judged: usize,
    pub abstained: usize,
    pub judge_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: Option<String>,
    pub scope: Scope,
    pub pairs: usize,
    pub scored: usize,
    pub missing: usize,
    /// Predictions for questions outside the evaluated split.
    pub out_of_scope: usize,
    pub families: Vec<FamilyReport>,
    pub per_pair: Vec<PairScore>,
}

impl EvalReport {
    pub fn family(&self, f: Family) -> &FamilyReport {
        self.families
            .iter()
            .find(|r| r.family == f)
            .expect("every family is reported")
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn index_predictions<'a>(
    manifest: &Manifest,
    predictions: &'a [Prediction],
) -> Result<HashMap<&'a str, &'a Prediction>, EvalError> {
    let known: HashSet<&str> = manifest.records.iter().map(|r| r.qa.id.as_str()).collect();
    let mut index = HashMap::with_capacity(predictions.len());
    for p in predictions {
        if !known.contains(p.qa_id.as_str()) {
            return Err(EvalError::Unknown(p.qa_id.clone()));
        }
        if index.insert(p.qa_id.as_str(), p).is_some() {
            return Err(EvalError::Duplicate(p.qa_id.clone()));
        }
    }
    Ok(index)
}

/// Scores predictions with PNLS only.
pub fn evaluate_predictions(
    manifest: &Manifest,
    predictions: &[Prediction],
    scope: Scope,
) -> Result<EvalReport, EvalError> {
    evaluate(manifest, predictions, scope, None)
}

/// Scores predictions with PNLS and asks `pool` for a binary verdict on each
/// answered question.
pub fn evaluate_with_judge(
    manifest: &Manifest,
    predictions: &[Prediction],
    scope: Scope,
    pool: &JudgePool,
) -> Result<EvalReport, EvalError> {
    evaluate(manifest, predictions, scope, Some(pool))
}

fn evaluate(
    manifest: &Manifest,
    predictions: &[Prediction],
    scope: Scope,
    pool: Option<&JudgePool>,
) -> Result<EvalReport, EvalError> {
    let index = index_predictions(manifest, predictions)?;
    let in_scope: Vec<(&QaPair, Option<&Prediction>)> = manifest
        .records
        .iter()
        .filter(|r| scope.includes(r.split))
        .map(|r| (&r.qa, index.get(r.qa.id.as_str()).copied()))
        .collect();
    let out_of_scope = index.len() - in_scope.iter().filter(|(_, p)| p.is_some()).count();

    let scores: Vec<Option<f64>> = in_scope
        .par_iter()
        .map(|(qa, pred)| {
            pred.map(|p| {
                pnls(&qa.answer, &p.answer).map_err(|source| EvalError::Metric {
                    qa_id: qa.id.clone(),
                    source,
                })
            })
            .transpose()
        })
        .collect::<Result<_, _>>()?;

    let mut verdicts: Vec<Option<Verdict>> = vec![None; in_scope.len()];
    if let Some(pool) = pool {
        let answered: Vec<(usize, (&QaPair, &str))> = in_scope
            .iter()
            .enumerate()
            .filter_map(|(i, (qa, p))| p.map(|p| (i, (*qa, p.answer.as_str()))))
            .collect();
        let items: Vec<(&QaPair, &str)> = answered.iter().map(|(_, it)| *it).collect();
        for ((i, _), v) in answered.iter().zip(pool.judge_all(&items)?) {
            verdicts[*i] = Some(v);
        }
    }

    let per_pair: Vec<PairScore> = in_scope
        .iter()
        .zip(scores)
        .zip(verdicts)
        .map(|(((qa, _), pnls), verdict)| PairScore {
            qa_id: qa.id.clone(),
            family: qa.family,
            pnls,
            verdict,
        })
        .collect();

    let mut by_family: BTreeMap<Family, Vec<&PairScore>> =
        Family::ALL.iter().map(|&f| (f, Vec::new())).collect();
    for p in &per_pair {
        by_family.get_mut(&p.family).expect("all families").push(p);
    }
    let families: Vec<FamilyReport> = Family::ALL
        .iter()
        .map(|f| {
            let ps = &by_family[f];
            let scored = ps.iter().filter(|p| p.pnls.is_some()).count();
            let judged: Vec<u8> = ps.iter().filter_map(|p| p.verdict?.score()).collect();
            let abstained = ps
                .iter()
                .filter(|p| p.verdict == Some(Verdict::Abstain))
                .count();
            FamilyReport {
                family: *f,
                pairs: ps.len(),
                scored,
                missing: ps.len() - scored,
                mean_pnls: mean(ps.iter().filter_map(|p| p.pnls)),
                judged: judged.len(),
                abstained,
                judge_accuracy: mean(judged.iter().map(|&s| f64::from(s))),
            }
        })
        .collect();

    let scored = per_pair.iter().filter(|p| p.pnls.is_some()).count();
    let model = predictions.iter().find_map(|p| p.model.clone());
    Ok(EvalReport {
        model,
        scope,
        pairs: per_pair.len(),
        scored,
        missing: per_pair.len() - scored,
        out_of_scope,
        families,
        per_pair,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{:.2}", v * 100.0))
}

/// Table with one G-Acc/PNLS column pair per family, scores in percent.
impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<16}", "Model")?;
        for fam in Family::ALL {
            write!(f, " | {:^15}", fam.name())?;
        }
        writeln!(f)?;
        write!(f, "{:<16}", "")?;
        for _ in Family::ALL {
            write!(f, " | {:>7}{:>8}", "G-Acc", "PNLS")?;
        }
        writeln!(f)?;
        write!(f, "{:<16}", self.model.as_deref().unwrap_or("unnamed"))?;
        for fam in Family::ALL {
            let r = self.family(fam);
            write!(f, " | {:>7}{:>8}", cell(r.judge_accuracy), cell(r.mean_pnls))?;
        }
        writeln!(f)?;
        write!(
            f,
            "pairs {} scored {} missing {}",
            self.pairs, self.scored, self.missing
        )?;
        let abstained: usize = self.families.iter().map(|r| r.abstained).sum();
        if abstained > 0 {
            write!(f, " abstained {abstained}")?;
        }
        if self.out_of_scope > 0 {
            write!(f, " out-of-scope {}", self.out_of_scope)?;
        }
        writeln!(f)
    }
}
