//! Extension steps, special puncturing and chain search on top of the
//! analysis, extension and solver modules.

pub mod io;

use serde::Serialize;
use thiserror::Error;

use crate::code::{weight, CodeError, CodeParams, LinearCode};
use crate::extension::{
    apply_extension, build_d, projective_filter, slack_predicted_min_count, verify_extension,
    CoverMatrix, CoverSystem, ExtensionError,
};
use crate::field::KVector;
use crate::solver::{solve, SolveStatus, SolverConfig, Strategy};

pub use io::{parse_code, serialize_code, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("s = {s} exceeds the weight gap {gap}: the distance claim d + s needs the second-smallest weight to be at least d + s")]
    GapExceeded { s: usize, gap: usize },
    #[error("invalid parameters: {0}")]
    BadParameters(String),
    #[error("every qualifying column set drops the rank below k = {k}")]
    RankCollapse { k: usize },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
}

/// Knobs for [`extend_once`] and [`chain_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChainPolicy {
    /// Largest l tried per step.
    pub max_l: usize,
    /// Budget for the total number of appended columns.
    pub max_total: usize,
    pub target_d: Option<usize>,
    pub projective: bool,
    pub solver: SolverConfig,
}

impl Default for ChainPolicy {
    fn default() -> Self {
        ChainPolicy {
            max_l: 2,
            max_total: 8,
            target_d: None,
            projective: false,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    Extend,
    Puncture,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolverStats {
    pub strategy: Strategy,
    pub status: SolveStatus,
    pub nodes_explored: u64,
    pub solutions_found: usize,
}

/// One extension or puncture attempt with parameters recomputed from scratch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub operation: Operation,
    pub l: usize,
    pub s: usize,
    /// Rows and columns of the covering system.
    pub t: usize,
    pub h: usize,
    pub masked: usize,
    /// Chosen column indices: canonical candidate indices for an extension,
    /// code positions for a puncture.
    pub columns: Vec<usize>,
    /// Appended column vectors, extension only.
    pub appended: Vec<KVector>,
    pub before: CodeParams,
    pub after: Option<CodeParams>,
    pub min_weight_count_after: Option<u64>,
    pub slacks: Vec<usize>,
    pub slack_predicted_min_count: Option<u64>,
    pub slack_prediction_matches: Option<bool>,
    /// Distance predicted by the puncturing rule `d - l + s`.
    pub predicted_d: Option<usize>,
    pub solver: SolverStats,
}

#[derive(Debug, Clone)]
pub enum StepOutcome {
    Done(Box<LinearCode>, StepRecord),
    Infeasible(StepRecord),
    Inconclusive(StepRecord),
}

impl StepOutcome {
    pub fn record(&self) -> &StepRecord {
        match self {
            StepOutcome::Done(_, r) | StepOutcome::Infeasible(r) | StepOutcome::Inconclusive(r) => {
                r
            }
        }
    }
}

/// The s an extension step will use: the requested value, or the weight gap
/// (unbounded when the code has a single nonzero weight) capped at l.
pub fn resolve_s(
    code: &LinearCode,
    l: usize,
    requested: Option<usize>,
) -> Result<usize, PipelineError> {
    if l == 0 {
        return Err(PipelineError::BadParameters("l must be positive".into()));
    }
    let gap = code.weight_gap().ok();
    match requested {
        Some(0) => Err(PipelineError::BadParameters("s must be positive".into())),
        Some(s) => match gap {
            Some(g) if s > g => Err(PipelineError::GapExceeded { s, gap: g }),
            _ => Ok(s),
        },
        None => Ok(gap.unwrap_or(l).min(l)),
    }
}

fn stats(cfg: &SolverConfig, out: &crate::solver::SolveOutcome) -> SolverStats {
    SolverStats {
        strategy: cfg.strategy,
        status: out.status,
        nodes_explored: out.nodes_explored,
        solutions_found: out.solutions.len(),
    }
}

/// Build D, solve the covering system for (l, s), append the best solution
/// and verify the result by full re-enumeration.
///
/// Among the solutions returned by the solver the one with the largest
/// minimum slack wins; ties go to the lexicographically smallest.
pub fn extend_once(
    code: &LinearCode,
    l: usize,
    s: Option<usize>,
    policy: &ChainPolicy,
) -> Result<StepOutcome, PipelineError> {
    let s = resolve_s(code, l, s)?;
    let d = build_d(code)?;
    let mut sys = CoverSystem::for_code(&d, l, s)?;
    if policy.projective {
        sys = projective_filter(sys, code)?;
    }
    let out = solve(&sys, &policy.solver);
    let before = code.params();
    let mut record = StepRecord {
        operation: Operation::Extend,
        l,
        s,
        t: d.t(),
        h: d.h(),
        masked: sys.masked_count(),
        columns: Vec::new(),
        appended: Vec::new(),
        before,
        after: None,
        min_weight_count_after: None,
        slacks: Vec::new(),
        slack_predicted_min_count: None,
        slack_prediction_matches: None,
        predicted_d: None,
        solver: stats(&policy.solver, &out),
    };
    let Some(best) = out
        .solutions
        .iter()
        .enumerate()
        .max_by_key(|(i, sol)| (sol.min_slack(), std::cmp::Reverse(*i)))
        .map(|(_, sol)| sol.clone())
    else {
        return Ok(match out.status {
            SolveStatus::BudgetExhausted => StepOutcome::Inconclusive(record),
            _ => StepOutcome::Infeasible(record),
        });
    };
    let new = apply_extension(code, &best.columns, &d)?;
    let report = verify_extension(code, &new, s)?;
    for (g, &y) in d.row_reps().iter().zip(&best.slacks) {
        let w = weight(&new.encode(g)?);
        if w != before.d + s + y {
            return Err(PipelineError::Verification(format!(
                "minimum-weight word {g} has weight {w} after extension, slack predicts {}",
                before.d + s + y
            )));
        }
    }
    let predicted = slack_predicted_min_count(code.field().q(), &best.slacks);
    record.columns = best.columns.clone();
    record.appended = best
        .columns
        .iter()
        .map(|&c| d.column_vectors()[c].clone())
        .collect();
    record.after = Some(report.after);
    record.min_weight_count_after = Some(report.min_weight_count);
    record.slacks = best.slacks;
    record.slack_predicted_min_count = Some(predicted);
    record.slack_prediction_matches = Some(report.distribution.count(before.d + s) == predicted);
    Ok(StepOutcome::Done(Box::new(new), record))
}

/// Removes code positions `cols` from the generator matrix.
pub fn puncture_columns(code: &LinearCode, cols: &[usize]) -> Result<LinearCode, PipelineError> {
    if let Some(&bad) = cols.iter().find(|&&c| c >= code.n()) {
        return Err(PipelineError::BadParameters(format!(
            "column {bad} is out of range for length {}",
            code.n()
        )));
    }
    let gen = code.generator().remove_columns(cols)?;
    Ok(LinearCode::new(gen, *code.limits())?)
}

/// Removes l code positions such that every minimum-weight codeword is zero
/// in at least s of them, chosen by the solver on the zero-pattern matrix.
/// The first solution that keeps full rank is used.
pub fn special_puncture(
    code: &LinearCode,
    l: usize,
    s: usize,
    solver: &SolverConfig,
) -> Result<StepOutcome, PipelineError> {
    if l == 0 || l >= code.n() {
        return Err(PipelineError::BadParameters(format!(
            "need 0 < l < n (l = {l}, n = {})",
            code.n()
        )));
    }
    if s == 0 || s > l {
        return Err(PipelineError::BadParameters(format!(
            "need 0 < s <= l (s = {s}, l = {l})"
        )));
    }
    let mwg = code.min_weight_generator();
    let rows: Vec<Vec<u8>> = mwg
        .reps()
        .iter()
        .map(|g| {
            code.encode(g)
                .map(|cw| cw.codes().iter().map(|&x| u8::from(x == 0)).collect())
        })
        .collect::<Result<_, _>>()?;
    let matrix = if rows.is_empty() {
        CoverMatrix::new(code.n(), Vec::new())
    } else {
        CoverMatrix::from_rows(&rows)
    };
    let sys = CoverSystem::new(matrix, l, s)?.distinct();
    let out = solve(&sys, solver);
    let before = code.params();
    let mut record = StepRecord {
        operation: Operation::Puncture,
        l,
        s,
        t: mwg.t(),
        h: code.n(),
        masked: 0,
        columns: Vec::new(),
        appended: Vec::new(),
        before,
        after: None,
        min_weight_count_after: None,
        slacks: Vec::new(),
        slack_predicted_min_count: None,
        slack_prediction_matches: None,
        predicted_d: Some((before.d + s).saturating_sub(l)),
        solver: stats(solver, &out),
    };
    if out.solutions.is_empty() {
        return Ok(match out.status {
            SolveStatus::BudgetExhausted => StepOutcome::Inconclusive(record),
            _ => StepOutcome::Infeasible(record),
        });
    }
    for sol in &out.solutions {
        match puncture_columns(code, &sol.columns) {
            Ok(new) => {
                record.columns = sol.columns.clone();
                record.slacks = sol.slacks.clone();
                record.after = Some(new.params());
                record.min_weight_count_after =
                    Some(new.weight_distribution().count(new.min_distance()));
                return Ok(StepOutcome::Done(Box::new(new), record));
            }
            Err(PipelineError::Code(CodeError::RankDeficient { .. })) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(PipelineError::RankCollapse { k: code.k() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TargetReached,
    LengthBudget,
    NoExtension,
    Inconclusive,
}

/// A failed attempt made while looking for the next chain step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Attempt {
    pub n: usize,
    pub l: usize,
    pub s: usize,
    pub status: SolveStatus,
    pub nodes_explored: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub policy: ChainPolicy,
    pub start: CodeParams,
    pub steps: Vec<StepRecord>,
    pub failed_attempts: Vec<Attempt>,
    pub end: CodeParams,
    pub stop_reason: StopReason,
    /// The final code in file format.
    pub final_code: String,
}

impl ChainReport {
    /// `(l, s)` of every step, in order.
    pub fn pattern(&self) -> Vec<(usize, usize)> {
        self.steps.iter().map(|s| (s.l, s.s)).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Repeatedly extends `code`: each round tries l = 1, 2, ..., max_l and, for
/// each l, s from min(gap, l) down to 1, taking the first step that works.
/// Stops at the target distance, when the length budget is used up, or when
/// a whole round fails.
pub fn chain_search(code: &LinearCode, policy: &ChainPolicy) -> Result<ChainReport, PipelineError> {
    if policy.max_l == 0 {
        return Err(PipelineError::BadParameters(
            "max_l must be positive".into(),
        ));
    }
    let start = code.params();
    let mut current = code.clone();
    let mut steps = Vec::new();
    let mut failed = Vec::new();
    let mut added = 0usize;
    let stop_reason = 'chain: loop {
        let d = current.min_distance();
        if policy.target_d.is_some_and(|t| d >= t) {
            break StopReason::TargetReached;
        }
        if added >= policy.max_total {
            break StopReason::LengthBudget;
        }
        let gap = current.weight_gap().ok();
        let mut inconclusive = false;
        let mut tried_any = false;
        for l in 1..=policy.max_l {
            if added + l > policy.max_total {
                break;
            }
            for s in (1..=gap.unwrap_or(l).min(l)).rev() {
                tried_any = true;
                match extend_once(&current, l, Some(s), policy)? {
                    StepOutcome::Done(new, record) => {
                        added += l;
                        steps.push(record);
                        current = *new;
                        continue 'chain;
                    }
                    StepOutcome::Inconclusive(r) | StepOutcome::Infeasible(r) => {
                        inconclusive |= r.solver.status == SolveStatus::BudgetExhausted;
                        failed.push(Attempt {
                            n: current.n(),
                            l,
                            s,
                            status: r.solver.status,
                            nodes_explored: r.solver.nodes_explored,
                        });
                    }
                }
            }
        }
        break if !tried_any {
            StopReason::LengthBudget
        } else if inconclusive {
            StopReason::Inconclusive
        } else {
            StopReason::NoExtension
        };
    };
    Ok(ChainReport {
        policy: *policy,
        start,
        steps,
        failed_attempts: failed,
        end: current.params(),
        stop_reason,
        final_code: serialize_code(&current),
    })
}
