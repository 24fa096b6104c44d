//! Demand scenario trees over a staged planning horizon.
//!
//! Each stage of the horizon carries a finite set of demand
//! realizations; the tree is their stage-by-stage product. Node 0 is the
//! here-and-now root: it precedes every realization and carries no
//! demand. Nodes at level `l >= 1` (in breadth-first order) realize the
//! demand of horizon stage `l - 1`, so a tree for an `H`-stage horizon
//! has `H + 1` levels and one leaf per full demand path.

use crate::domain::{Horizon, SlotGrid};
use std::ops::Range;
use thiserror::Error;

/// One possible demand outcome for one stage: a nurse count per
/// time-of-day slot, in force on every day of the stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRealization {
    /// Short name used in reports (for instance `"high"`).
    pub label: String,
    /// Probability of this outcome, conditional on reaching the stage.
    pub probability: f64,
    /// Demanded nurses per slot, `[morning, evening, night]`.
    pub demand: [u32; 3],
}

impl StageRealization {
    pub fn new(label: impl Into<String>, probability: f64, demand: [u32; 3]) -> Self {
        StageRealization {
            label: label.into(),
            probability,
            demand,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("a scenario tree needs at least one stage")]
    EmptyStageList,
    #[error("stage {stage} has no realizations")]
    EmptyStage { stage: usize },
    #[error("stage {stage} realization `{label}` has probability {value}, outside [0, 1]")]
    BadProbability {
        stage: usize,
        label: String,
        value: f64,
    },
    #[error("stage {stage} realization probabilities sum to {sum}, not 1")]
    ProbabilitySum { stage: usize, sum: f64 },
}

#[derive(Debug, Clone, PartialEq)]
struct Node {
    /// Horizon stage this node realizes; `None` only for the root.
    stage: Option<usize>,
    /// Index into the stage's realization list.
    realization: usize,
    parent: Option<usize>,
    children: Range<usize>,
    /// Product of conditional probabilities along the root path.
    path_probability: f64,
}

/// The full product tree of stage realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTree {
    stages: Vec<Vec<StageRealization>>,
    nodes: Vec<Node>,
    /// `level_starts[l]..level_starts[l + 1]` indexes level `l`.
    level_starts: Vec<usize>,
}

impl ScenarioTree {
    /// Build the product tree from per-stage realization lists.
    pub fn build(stages: Vec<Vec<StageRealization>>) -> Result<ScenarioTree, ScenarioError> {
        if stages.is_empty() {
            return Err(ScenarioError::EmptyStageList);
        }
        for (h, reals) in stages.iter().enumerate() {
            if reals.is_empty() {
                return Err(ScenarioError::EmptyStage { stage: h });
            }
            for r in reals {
                if !r.probability.is_finite() || !(0.0..=1.0).contains(&r.probability) {
                    return Err(ScenarioError::BadProbability {
                        stage: h,
                        label: r.label.clone(),
                        value: r.probability,
                    });
                }
            }
            let sum: f64 = reals.iter().map(|r| r.probability).sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(ScenarioError::ProbabilitySum { stage: h, sum });
            }
        }

        let mut nodes = vec![Node {
            stage: None,
            realization: 0,
            parent: None,
            children: 0..0,
            path_probability: 1.0,
        }];
        let mut level_starts = vec![0usize, 1];
        let mut level: Vec<usize> = vec![0];
        for (h, reals) in stages.iter().enumerate() {
            let mut next = Vec::with_capacity(level.len() * reals.len());
            for &parent in &level {
                let first = nodes.len();
                for (k, r) in reals.iter().enumerate() {
                    next.push(nodes.len());
                    let p = nodes[parent].path_probability * r.probability;
                    nodes.push(Node {
                        stage: Some(h),
                        realization: k,
                        parent: Some(parent),
                        children: 0..0,
                        path_probability: p,
                    });
                }
                nodes[parent].children = first..nodes.len();
            }
            level_starts.push(nodes.len());
            level = next;
        }
        Ok(ScenarioTree {
            stages,
            nodes,
            level_starts,
        })
    }

    /// Single-path tree: one certain realization per stage. Used to plan
    /// against a fixed demand forecast with the staged machinery.
    pub fn degenerate(stage_demands: &[[u32; 3]]) -> Result<ScenarioTree, ScenarioError> {
        ScenarioTree::build(
            stage_demands
                .iter()
                .map(|&d| vec![StageRealization::new("expected", 1.0, d)])
                .collect(),
        )
    }

    /// Number of horizon stages the tree covers.
    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    /// Realization list of one stage.
    pub fn stage_realizations(&self, stage: usize) -> &[StageRealization] {
        &self.stages[stage]
    }

    /// Total number of nodes, root included.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub const ROOT: usize = 0;

    /// Horizon stage realized by `node` (`None` for the root).
    pub fn stage_of(&self, node: usize) -> Option<usize> {
        self.nodes[node].stage
    }

    /// The realization `node` picks within its stage.
    ///
    /// # Panics
    /// On the root, which realizes nothing.
    pub fn realization_of(&self, node: usize) -> &StageRealization {
        let n = &self.nodes[node];
        let stage = n
            .stage
            .expect("the root node does not carry a realization");
        &self.stages[stage][n.realization]
    }

    /// Per-slot demand realized at `node`.
    ///
    /// # Panics
    /// On the root, which carries no demand.
    pub fn node_demand(&self, node: usize) -> [u32; 3] {
        self.realization_of(node).demand
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.nodes[node].parent
    }

    pub fn children(&self, node: usize) -> Range<usize> {
        self.nodes[node].children.clone()
    }

    /// Probability of the whole root path to `node`.
    pub fn path_probability(&self, node: usize) -> f64 {
        self.nodes[node].path_probability
    }

    /// All node ids except the root, ascending (level by level).
    pub fn non_root_nodes(&self) -> Range<usize> {
        1..self.nodes.len()
    }

    /// Node ids that realize horizon stage `h`.
    pub fn nodes_for_stage(&self, h: usize) -> Range<usize> {
        self.level_starts[h + 1]..self.level_starts[h + 2]
    }

    /// Leaf node ids (deepest level).
    pub fn leaves(&self) -> Range<usize> {
        self.nodes_for_stage(self.stages.len() - 1)
    }

    /// Non-root nodes along the path from the root to `node`, in stage
    /// order, ending at `node` itself.
    pub fn path_to(&self, node: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = node;
        while let Some(p) = self.parent(cur) {
            path.push(cur);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Per-stage expectation of the realized demand, rounded half up to
    /// whole nurses. This is the certain demand the expected-value plan
    /// is optimized against.
    pub fn expected_stage_demands(&self) -> Vec<[u32; 3]> {
        self.stages
            .iter()
            .map(|reals| {
                let mut out = [0u32; 3];
                for (j, slot) in out.iter_mut().enumerate() {
                    let mean: f64 = reals
                        .iter()
                        .map(|r| r.probability * f64::from(r.demand[j]))
                        .sum();
                    *slot = crate::num::round_half_up(mean).max(0.0) as u32;
                }
                out
            })
            .collect()
    }

    /// Materialize the full-horizon demand along the path to a leaf,
    /// replicating each stage's realized per-slot demand over the
    /// stage's days.
    pub fn path_demand(&self, horizon: &Horizon, leaf: usize) -> SlotGrid<u32> {
        assert_eq!(
            horizon.stages(),
            self.stages.len(),
            "tree stages must match the horizon"
        );
        let mut grid = SlotGrid::zeros(horizon.days());
        for node in self.path_to(leaf) {
            let stage = self.stage_of(node).expect("path nodes are not the root");
            let demand = self.node_demand(node);
            for d in horizon.stage_days(stage) {
                for slot in crate::domain::Slot::ALL {
                    grid.set(slot, d, demand[slot.index()]);
                }
            }
        }
        grid
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Slot;
    use proptest::prelude::*;

    fn two_by_two() -> ScenarioTree {
        ScenarioTree::build(vec![
            vec![
                StageRealization::new("high", 0.6, [7, 8, 6]),
                StageRealization::new("low", 0.4, [3, 3, 3]),
            ],
            vec![
                StageRealization::new("high", 0.6, [7, 8, 6]),
                StageRealization::new("low", 0.4, [3, 3, 3]),
            ],
        ])
        .unwrap()
    }

    #[test]
    fn two_stage_product_layout() {
        let t = two_by_two();
        assert_eq!(t.node_count(), 7);
        assert_eq!(t.nodes_for_stage(0), 1..3);
        assert_eq!(t.nodes_for_stage(1), 3..7);
        assert_eq!(t.leaves(), 3..7);
        assert_eq!(t.children(0), 1..3);
        assert_eq!(t.children(1), 3..5);
        assert_eq!(t.parent(4), Some(1));
        assert_eq!(t.parent(0), None);
        assert_eq!(t.path_to(6), vec![2, 6]);
        let probs: Vec<f64> = t.leaves().map(|n| t.path_probability(n)).collect();
        let want = [0.36, 0.24, 0.24, 0.16];
        for (got, want) in probs.iter().zip(want) {
            approx::assert_abs_diff_eq!(got, &want, epsilon = 1e-12);
        }
    }

    #[test]
    fn path_demand_replicates_stage_values() {
        let t = two_by_two();
        let hz = Horizon::weekly_stages(&[1, 1]).unwrap();
        // Leaf 4 realizes high (stage 0) then low (stage 1).
        let grid = t.path_demand(&hz, 4);
        assert_eq!(grid.get(Slot::Am, 0), 7);
        assert_eq!(grid.get(Slot::Night, 6), 6);
        assert_eq!(grid.get(Slot::Am, 7), 3);
        assert_eq!(grid.get(Slot::Pm, 13), 3);
    }

    #[test]
    fn expected_demand_rounds_half_up_per_slot() {
        // 0.6 * [7,8,6] + 0.4 * [3,3,3] = [5.4, 6.0, 4.8] -> [5, 6, 5].
        let t = two_by_two();
        assert_eq!(t.expected_stage_demands(), vec![[5, 6, 5], [5, 6, 5]]);
    }

    #[test]
    fn degenerate_tree_is_one_certain_path() {
        let t = ScenarioTree::degenerate(&[[5, 6, 4], [5, 6, 4]]).unwrap();
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.leaves().len(), 1);
        let leaf = t.leaves().start;
        assert_eq!(t.path_probability(leaf), 1.0);
        assert_eq!(t.node_demand(leaf), [5, 6, 4]);
    }

    #[test]
    fn rejects_bad_probabilities() {
        let bad = ScenarioTree::build(vec![vec![
            StageRealization::new("a", 0.7, [1, 1, 1]),
            StageRealization::new("b", 0.4, [1, 1, 1]),
        ]]);
        assert!(matches!(bad, Err(ScenarioError::ProbabilitySum { .. })));
        let bad = ScenarioTree::build(vec![vec![StageRealization::new("a", -0.2, [1, 1, 1])]]);
        assert!(matches!(bad, Err(ScenarioError::BadProbability { .. })));
        assert!(matches!(
            ScenarioTree::build(vec![]),
            Err(ScenarioError::EmptyStageList)
        ));
        assert!(matches!(
            ScenarioTree::build(vec![vec![]]),
            Err(ScenarioError::EmptyStage { stage: 0 })
        ));
    }

    proptest! {
        /// Path probabilities at every level form a distribution.
        #[test]
        fn level_probabilities_sum_to_one(
            shape in proptest::collection::vec(1usize..4, 1..4),
            raw in proptest::collection::vec(0.05f64..1.0, 12),
        ) {
            let mut it = raw.into_iter().cycle();
            let stages: Vec<Vec<StageRealization>> = shape
                .iter()
                .map(|&n| {
                    let weights: Vec<f64> = (0..n).map(|_| it.next().unwrap()).collect();
                    let total: f64 = weights.iter().sum();
                    weights
                        .into_iter()
                        .enumerate()
                        .map(|(k, w)| StageRealization::new(format!("r{k}"), w / total, [1, 1, 1]))
                        .collect()
                })
                .collect();
            // Renormalization can leave a sum slightly off one; nudge the
            // last entry so the builder accepts it exactly.
            let stages: Vec<Vec<StageRealization>> = stages
                .into_iter()
                .map(|mut reals| {
                    let sum: f64 = reals.iter().map(|r| r.probability).sum();
                    let last = reals.len() - 1;
                    reals[last].probability += 1.0 - sum;
                    reals
                })
                .collect();
            let t = ScenarioTree::build(stages).unwrap();
            for h in 0..t.stage_count() {
                let sum: f64 = t.nodes_for_stage(h).map(|n| t.path_probability(n)).sum();
                prop_assert!((sum - 1.0).abs() < 1e-9);
            }
        }
    }
}
