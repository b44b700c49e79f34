//! Search for column multisets that cover every row of a [`CoverSystem`].
//!
//! All strategies visit candidate multisets as sorted index sequences in
//! lexicographic order, so the first solution reported by the complete
//! strategies is always the lexicographically smallest one and ties are
//! broken towards the lowest column index.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::extension::{CoverSystem, ExtensionSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Exhaustive,
    BranchAndBound,
    Greedy,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::BranchAndBound => "bnb",
            Strategy::Greedy => "greedy",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "bnb" | "branch_and_bound" => Ok(Strategy::BranchAndBound),
            "greedy" => Ok(Strategy::Greedy),
            _ => Err(format!(
                "unknown strategy {s:?} (expected exhaustive, bnb or greedy)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SolverConfig {
    pub strategy: Strategy,
    pub max_solutions: usize,
    pub node_limit: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            strategy: Strategy::BranchAndBound,
            max_solutions: 16,
            node_limit: 50_000_000,
        }
    }
}

impl SolverConfig {
    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Feasible,
    Infeasible,
    /// The search stopped early. This is not evidence of infeasibility.
    BudgetExhausted,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::BudgetExhausted => "budget_exhausted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub solutions: Vec<ExtensionSolution>,
    pub nodes_explored: u64,
}

pub fn solve(sys: &CoverSystem, cfg: &SolverConfig) -> SolveOutcome {
    match cfg.strategy {
        Strategy::Exhaustive => solve_exhaustive(sys, cfg),
        Strategy::BranchAndBound => solve_branch_and_bound(sys, cfg),
        Strategy::Greedy => solve_greedy(sys, cfg),
    }
}

/// Mutable search state shared by the depth-first strategies.
struct Search<'a> {
    sys: &'a CoverSystem,
    cfg: &'a SolverConfig,
    supports: Vec<Vec<u32>>,
    cols: Vec<usize>,
    cover: Vec<usize>,
    deficient: usize,
    picked: Vec<usize>,
    nodes: u64,
    found: Vec<ExtensionSolution>,
    stopped: bool,
    out_of_budget: bool,
}

impl<'a> Search<'a> {
    fn new(sys: &'a CoverSystem, cfg: &'a SolverConfig, cols: Vec<usize>) -> Self {
        let t = sys.matrix().num_rows();
        Search {
            sys,
            cfg,
            supports: sys.matrix().column_supports(),
            cols,
            cover: vec![0; t],
            deficient: t,
            picked: Vec::with_capacity(sys.l()),
            nodes: 0,
            found: Vec::new(),
            stopped: false,
            out_of_budget: false,
        }
    }

    fn push(&mut self, c: usize) {
        let s = self.sys.s();
        for &r in &self.supports[c] {
            let v = &mut self.cover[r as usize];
            *v += 1;
            if *v == s {
                self.deficient -= 1;
            }
        }
        self.picked.push(c);
    }

    fn pop(&mut self) {
        let c = self.picked.pop().unwrap();
        let s = self.sys.s();
        for &r in &self.supports[c] {
            let v = &mut self.cover[r as usize];
            if *v == s {
                self.deficient += 1;
            }
            *v -= 1;
        }
    }

    fn record(&mut self) {
        let slacks = self
            .sys
            .slacks(&self.picked)
            .expect("solver produced a non-covering multiset");
        self.found.push(ExtensionSolution {
            columns: self.picked.clone(),
            slacks,
        });
        if self.found.len() >= self.cfg.max_solutions {
            self.stopped = true;
        }
    }

    /// Counts a node; returns false once the budget is spent.
    fn tick(&mut self) -> bool {
        if self.nodes >= self.cfg.node_limit {
            self.stopped = true;
            self.out_of_budget = true;
            return false;
        }
        self.nodes += 1;
        true
    }

    fn first_child(&self, pos: usize) -> usize {
        if self.sys.repeats_allowed() {
            pos
        } else {
            pos + 1
        }
    }

    fn finish(self) -> SolveOutcome {
        let status = if !self.found.is_empty() {
            SolveStatus::Feasible
        } else if self.out_of_budget {
            SolveStatus::BudgetExhausted
        } else {
            SolveStatus::Infeasible
        };
        SolveOutcome {
            status,
            solutions: self.found,
            nodes_explored: self.nodes,
        }
    }
}

/// Complete enumeration of all l-multisets of selectable columns.
pub fn solve_exhaustive(sys: &CoverSystem, cfg: &SolverConfig) -> SolveOutcome {
    fn walk(st: &mut Search, from: usize) {
        if st.picked.len() == st.sys.l() {
            if st.tick() && st.deficient == 0 {
                st.record();
            }
            return;
        }
        for pos in from..st.cols.len() {
            if st.stopped {
                return;
            }
            st.push(st.cols[pos]);
            let next = st.first_child(pos);
            walk(st, next);
            st.pop();
        }
    }

    let cols: Vec<usize> = sys.selectable().collect();
    let mut st = Search::new(sys, cfg, cols);
    walk(&mut st, 0);
    st.finish()
}

/// Depth-first search over sorted multisets with coverage bounds.
///
/// At each node the remaining picks `r` must satisfy: every deficient row
/// still needs at most `r` more hits; the total deficit fits in `r` columns
/// of the largest remaining support; and the next column cannot lie beyond
/// the last column that can still serve any deficient row. The final bound
/// is what keeps lexicographic branching narrow on the most constrained row.
pub fn solve_branch_and_bound(sys: &CoverSystem, cfg: &SolverConfig) -> SolveOutcome {
    let t = sys.matrix().num_rows();
    let s = sys.s();
    let mut cols: Vec<usize> = sys.selectable().collect();
    let supports = sys.matrix().column_supports();
    if s == 1 && sys.repeats_allowed() {
        cols = drop_dominated(sys, &cols);
    }
    // Covering columns of each row, as positions into `cols`, ascending.
    let mut row_cover: Vec<Vec<u32>> = vec![Vec::new(); t];
    for (pos, &c) in cols.iter().enumerate() {
        for &r in &supports[c] {
            row_cover[r as usize].push(pos as u32);
        }
    }
    // suffix_max[pos]: largest support among cols[pos..].
    let mut suffix_max = vec![0usize; cols.len() + 1];
    for pos in (0..cols.len()).rev() {
        suffix_max[pos] = suffix_max[pos + 1].max(supports[cols[pos]].len());
    }

    struct Bnb {
        row_cover: Vec<Vec<u32>>,
        suffix_max: Vec<usize>,
    }

    fn walk(st: &mut Search, bnb: &Bnb, from: usize) {
        if st.stopped || !st.tick() {
            return;
        }
        let l = st.sys.l();
        let s = st.sys.s();
        let r = l - st.picked.len();
        if r == 0 {
            if st.deficient == 0 {
                st.record();
            }
            return;
        }
        let mut upper = st.cols.len();
        if st.deficient > 0 {
            let mut total = 0usize;
            for (i, &c) in st.cover.iter().enumerate() {
                if c >= s {
                    continue;
                }
                let need = s - c;
                if need > r {
                    return;
                }
                total += need;
                let list = &bnb.row_cover[i];
                // Distinct picks need `need` covering columns at or after `from`;
                // repeated picks need only one.
                let want = if st.sys.repeats_allowed() { 1 } else { need };
                if list.len() < want {
                    return;
                }
                let limit = list[list.len() - want] as usize;
                if limit < from {
                    return;
                }
                upper = upper.min(limit + 1);
            }
            if total > r * bnb.suffix_max[from.min(st.cols.len())] {
                return;
            }
        }
        for pos in from..upper {
            if st.stopped {
                return;
            }
            st.push(st.cols[pos]);
            let next = st.first_child(pos);
            walk(st, bnb, next);
            st.pop();
        }
    }

    let bnb = Bnb {
        row_cover,
        suffix_max,
    };
    let mut st = Search::new(sys, cfg, cols);
    walk(&mut st, &bnb, 0);
    st.finish()
}

/// Removes column j when some earlier column i covers a superset of j's
/// rows. Swapping j for i keeps a plain cover valid and makes the sorted
/// multiset smaller, so the lexicographically first solution never uses j.
fn drop_dominated(sys: &CoverSystem, cols: &[usize]) -> Vec<usize> {
    const MAX_COLS: usize = 20_000;
    if cols.len() > MAX_COLS {
        return cols.to_vec();
    }
    let m = sys.matrix();
    let col_bits: Vec<fixedbitset::FixedBitSet> = {
        let mut bits = vec![fixedbitset::FixedBitSet::with_capacity(m.num_rows()); m.num_cols()];
        for (i, row) in m.rows().iter().enumerate() {
            for j in row.ones() {
                bits[j].insert(i);
            }
        }
        bits
    };
    let mut kept: Vec<usize> = Vec::with_capacity(cols.len());
    for (pos, &j) in cols.iter().enumerate() {
        let dominated = cols[..pos]
            .iter()
            .any(|&i| col_bits[j].is_subset(&col_bits[i]));
        if !dominated {
            kept.push(j);
        }
    }
    kept
}

/// Picks, l times, the column that helps the most still-deficient rows
/// (lowest index on ties). Failure proves nothing.
pub fn solve_greedy(sys: &CoverSystem, cfg: &SolverConfig) -> SolveOutcome {
    let cols: Vec<usize> = sys.selectable().collect();
    let mut st = Search::new(sys, cfg, cols);
    // Greedy never proves infeasibility.
    st.out_of_budget = true;
    if st.cols.is_empty() {
        return st.finish();
    }
    let s = sys.s();
    let mut chosen: Vec<usize> = Vec::with_capacity(sys.l());
    for _ in 0..sys.l() {
        st.nodes += 1;
        let mut best = (0usize, usize::MAX);
        for (pos, &c) in st.cols.iter().enumerate() {
            if !sys.repeats_allowed() && chosen.contains(&c) {
                continue;
            }
            let gain = st.supports[c]
                .iter()
                .filter(|&&r| st.cover[r as usize] < s)
                .count();
            if best.1 == usize::MAX || gain > best.0 {
                best = (gain, pos);
            }
        }
        if best.1 == usize::MAX {
            break;
        }
        let c = st.cols[best.1];
        for &r in &st.supports[c] {
            st.cover[r as usize] += 1;
        }
        chosen.push(c);
    }
    let covered = chosen.len() == sys.l() && st.cover.iter().all(|&c| c >= s);
    if covered {
        chosen.sort_unstable();
        let slacks = sys
            .slacks(&chosen)
            .expect("greedy produced a non-covering multiset");
        st.found.push(ExtensionSolution {
            columns: chosen,
            slacks,
        });
    }
    st.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::CoverMatrix;

    fn sys(rows: &[Vec<u8>], l: usize, s: usize) -> CoverSystem {
        CoverSystem::new(CoverMatrix::from_rows(rows), l, s).unwrap()
    }

    fn all() -> [SolverConfig; 2] {
        let c = SolverConfig::default();
        [c.with_strategy(Strategy::Exhaustive), c]
    }

    #[test]
    fn trivial_instances() {
        for cfg in all() {
            let out = solve(&sys(&[vec![1]], 1, 1), &cfg);
            assert_eq!(out.status, SolveStatus::Feasible);
            assert_eq!(out.solutions[0].columns, vec![0]);
            let out = solve(&sys(&[vec![1, 0], vec![0, 1]], 1, 1), &cfg);
            assert_eq!(out.status, SolveStatus::Infeasible);
            assert!(out.solutions.is_empty());
        }
        let g = solve_greedy(&sys(&[vec![1]], 1, 1), &SolverConfig::default());
        assert_eq!(g.status, SolveStatus::Feasible);
    }

    #[test]
    fn identity_needs_every_column() {
        let id: Vec<Vec<u8>> = (0..4)
            .map(|i| (0..4).map(|j| u8::from(i == j)).collect())
            .collect();
        for cfg in all() {
            assert_eq!(solve(&sys(&id, 3, 1), &cfg).status, SolveStatus::Infeasible);
            let out = solve(&sys(&id, 4, 1), &cfg);
            assert_eq!(out.solutions[0].columns, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn multicover_uses_repeats() {
        // One column covering the single row twice over.
        for cfg in all() {
            let out = solve(&sys(&[vec![1, 0]], 2, 2), &cfg);
            assert_eq!(out.solutions.len(), 1);
            assert_eq!(out.solutions[0].columns, vec![0, 0]);
            let distinct = sys(&[vec![1, 0]], 2, 2).distinct();
            assert_eq!(solve(&distinct, &cfg).status, SolveStatus::Infeasible);
        }
    }

    #[test]
    fn masked_columns_are_never_chosen() {
        let m = sys(&[vec![1, 1, 1]], 1, 1).with_masked([0, 1]);
        for cfg in all() {
            let out = solve(&m, &cfg);
            assert_eq!(out.solutions.len(), 1);
            assert_eq!(out.solutions[0].columns, vec![2]);
        }
        let g = solve_greedy(&m, &SolverConfig::default());
        assert_eq!(g.solutions[0].columns, vec![2]);
    }

    #[test]
    fn greedy_can_miss_a_cover() {
        // Rows 0..6; column 2 covers four rows and lures greedy away from
        // the exact pair {0, 1}.
        let rows = vec![
            vec![1, 0, 1],
            vec![1, 0, 1],
            vec![1, 0, 0],
            vec![0, 1, 1],
            vec![0, 1, 1],
            vec![0, 1, 0],
        ];
        let g = solve_greedy(&sys(&rows, 2, 1), &SolverConfig::default());
        assert_eq!(g.status, SolveStatus::BudgetExhausted);
        let e = solve_exhaustive(&sys(&rows, 2, 1), &SolverConfig::default());
        assert_eq!(e.status, SolveStatus::Feasible);
        assert_eq!(e.solutions[0].columns, vec![0, 1]);
    }

    #[test]
    fn budget_is_reported_not_infeasible() {
        let rows: Vec<Vec<u8>> = (0..6)
            .map(|i| (0..30).map(|j| u8::from(j % 6 == i)).collect())
            .collect();
        let cfg = SolverConfig {
            node_limit: 3,
            ..SolverConfig::default()
        };
        for strategy in [Strategy::Exhaustive, Strategy::BranchAndBound] {
            let out = solve(&sys(&rows, 6, 1), &cfg.with_strategy(strategy));
            assert_eq!(out.status, SolveStatus::BudgetExhausted, "{strategy}");
            assert!(out.nodes_explored <= 3);
            let full = solve(
                &sys(&rows, 6, 1),
                &SolverConfig::default().with_strategy(strategy),
            );
            assert_eq!(full.status, SolveStatus::Feasible);
        }
    }

    #[test]
    fn max_solutions_truncates_in_order() {
        let rows = vec![vec![1, 1, 1, 1]];
        let cfg = SolverConfig {
            max_solutions: 3,
            ..SolverConfig::default()
        };
        for strategy in [Strategy::Exhaustive, Strategy::BranchAndBound] {
            let out = solve(&sys(&rows, 1, 1), &cfg.with_strategy(strategy));
            let got: Vec<_> = out.solutions.iter().map(|s| s.columns.clone()).collect();
            match strategy {
                Strategy::Exhaustive => assert_eq!(got, vec![vec![0], vec![1], vec![2]]),
                // Columns 1..3 duplicate column 0 and are pruned for s = 1.
                _ => assert_eq!(got, vec![vec![0]]),
            }
        }
    }

    #[test]
    fn dominated_columns_are_dropped_after_their_dominator() {
        let s = sys(&[vec![0, 1, 1], vec![1, 1, 0]], 1, 1);
        assert_eq!(drop_dominated(&s, &[0, 1, 2]), vec![0, 1]);
        let s = sys(&[vec![1, 1], vec![0, 1]], 1, 1);
        // Column 0 is dominated by the later column 1 and must stay.
        assert_eq!(drop_dominated(&s, &[0, 1]), vec![0, 1]);
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in [
            Strategy::Exhaustive,
            Strategy::BranchAndBound,
            Strategy::Greedy,
        ] {
            assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
        }
        assert!("lll".parse::<Strategy>().is_err());
    }
}
