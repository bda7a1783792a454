//! Random-forest classifier over the 40-feature vectors: bootstrap
//! samples, Gini splits over sqrt(40) = 7 features sampled per node,
//! majority vote with lexicographic tie-break.

use serde::{Deserialize, Serialize};

use crate::features::FEATURE_COUNT;
use crate::models::ModelId;
use crate::rng::StreamRng;

pub const FEATURES_PER_SPLIT: usize = 7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        counts: Vec<u32>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    /// Index of the leaf's class vote: argmax count, lowest class on ties.
    pub fn vote(&self, x: &[f64]) -> usize {
        let counts = self.leaf_counts(x);
        argmax_low(counts)
    }

    pub fn leaf_counts(&self, x: &[f64]) -> &[u32] {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { counts } => return counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }
}

fn argmax_low(counts: &[u32]) -> usize {
    let mut best = 0usize;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<Tree>,
    pub n_trees: usize,
    pub max_depth: usize,
    pub seed: u64,
    pub n_classes: usize,
    /// Set when training saw a single class; the forest is a constant
    /// classifier.
    pub degenerate: bool,
}

fn gini(counts: &[u32], total: u32) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / t;
            p * p
        })
        .sum::<f64>()
}

struct Builder<'a> {
    rows: &'a [Vec<f64>],
    labels: &'a [usize],
    n_classes: usize,
    max_depth: usize,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn class_counts(&self, idx: &[usize]) -> Vec<u32> {
        let mut counts = vec![0u32; self.n_classes];
        for &i in idx {
            counts[self.labels[i]] += 1;
        }
        counts
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize, rng: &mut StreamRng) -> usize {
        let counts = self.class_counts(&idx);
        let total = idx.len() as u32;
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if depth >= self.max_depth || idx.len() <= 1 || pure {
            self.nodes.push(Node::Leaf { counts });
            return self.nodes.len() - 1;
        }
        let candidates = rng.sample_without_replacement(FEATURE_COUNT, FEATURES_PER_SPLIT);
        let parent_gini = gini(&counts, total);
        let mut best: Option<(f64, usize, f64)> = None;
        for &feature in &candidates {
            let mut order: Vec<usize> = idx.clone();
            order.sort_by(|&a, &b| self.rows[a][feature].total_cmp(&self.rows[b][feature]));
            let mut left_counts = vec![0u32; self.n_classes];
            let mut left_n = 0u32;
            for w in 0..order.len() - 1 {
                left_counts[self.labels[order[w]]] += 1;
                left_n += 1;
                let v = self.rows[order[w]][feature];
                let v_next = self.rows[order[w + 1]][feature];
                if v == v_next {
                    continue;
                }
                let right_counts: Vec<u32> = counts
                    .iter()
                    .zip(&left_counts)
                    .map(|(c, l)| c - l)
                    .collect();
                let right_n = total - left_n;
                let weighted = (left_n as f64 * gini(&left_counts, left_n)
                    + right_n as f64 * gini(&right_counts, right_n))
                    / total as f64;
                let threshold = 0.5 * (v + v_next);
                let better = match best {
                    None => weighted < parent_gini - 1e-12,
                    Some((bw, _, _)) => weighted < bw - 1e-12,
                };
                if better {
                    best = Some((weighted, feature, threshold));
                }
            }
        }
        match best {
            None => {
                self.nodes.push(Node::Leaf { counts });
                self.nodes.len() - 1
            }
            Some((_, feature, threshold)) => {
                let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = idx
                    .into_iter()
                    .partition(|&i| self.rows[i][feature] <= threshold);
                let left = self.grow(left_idx, depth + 1, rng);
                let right = self.grow(right_idx, depth + 1, rng);
                self.nodes.push(Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                });
                self.nodes.len() - 1
            }
        }
    }
}

/// Train on standardized rows and class labels. A single-class input
/// yields a constant classifier with the degenerate flag set.
pub fn train_forest(
    rows: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    n_trees: usize,
    max_depth: usize,
    seed: u64,
) -> RandomForest {
    debug_assert_eq!(rows.len(), labels.len());
    debug_assert!(!rows.is_empty());
    let distinct = {
        let mut seen = vec![false; n_classes];
        for &l in labels {
            seen[l] = true;
        }
        seen.iter().filter(|&&s| s).count()
    };
    let mut trees = Vec::with_capacity(n_trees);
    for t in 0..n_trees {
        let mut rng = StreamRng::new(seed).with_str("tree").with_u64(t as u64);
        let bootstrap: Vec<usize> = (0..rows.len()).map(|_| rng.index(rows.len())).collect();
        let mut builder = Builder {
            rows,
            labels,
            n_classes,
            max_depth,
            nodes: Vec::new(),
        };
        let root = builder.grow(bootstrap, 0, &mut rng);
        let mut nodes = builder.nodes;
        // Root last from the recursion; rotate so traversal starts at 0.
        nodes.swap(0, root);
        fix_indices(&mut nodes, 0, root);
        trees.push(Tree { nodes });
    }
    RandomForest {
        trees,
        n_trees,
        max_depth,
        seed,
        n_classes,
        degenerate: distinct <= 1,
    }
}

/// After swapping two node slots, remap child indices that pointed at
/// either slot.
fn fix_indices(nodes: &mut [Node], a: usize, b: usize) {
    if a == b {
        return;
    }
    for node in nodes.iter_mut() {
        if let Node::Split { left, right, .. } = node {
            for child in [left, right] {
                if *child == a {
                    *child = b;
                } else if *child == b {
                    *child = a;
                }
            }
        }
    }
}

/// Majority vote across trees; ties resolve to the lexicographically
/// smaller model.
pub fn predict_model(forest: &RandomForest, x: &[f64]) -> ModelId {
    let mut votes = vec![0u32; forest.n_classes];
    for tree in &forest.trees {
        votes[tree.vote(x)] += 1;
    }
    ModelId::ALL[argmax_low(&votes)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamRng;

    fn synthetic(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
        // Label A (class 0) iff feature 6 > 0.5; everything else noise.
        let mut rng = StreamRng::new(seed).with_str("forest-syn");
        let mut rows = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let mut row: Vec<f64> = (0..FEATURE_COUNT).map(|_| rng.normal()).collect();
            let flag = rng.next_f64() < 0.5;
            row[6] = if flag {
                0.5 + rng.next_f64()
            } else {
                0.5 - rng.next_f64()
            };
            rows.push(row);
            labels.push(if flag { 0 } else { 1 });
        }
        (rows, labels)
    }

    #[test]
    fn learns_single_feature_rule() {
        let (rows, labels) = synthetic(400, 1);
        let (test_rows, test_labels) = synthetic(200, 2);
        let forest = train_forest(&rows, &labels, 2, 100, 12, 3);
        let correct = test_rows
            .iter()
            .zip(&test_labels)
            .filter(|(x, &y)| predict_model(&forest, x).class_index() == y)
            .count();
        let acc = correct as f64 / test_labels.len() as f64;
        assert!(acc >= 0.95, "held-out accuracy {acc}");
    }

    #[test]
    fn single_record_constant_classifier() {
        let rows = vec![vec![0.0; FEATURE_COUNT]];
        let labels = vec![3usize];
        let forest = train_forest(&rows, &labels, 6, 20, 12, 0);
        assert!(forest.degenerate);
        let mut rng = StreamRng::new(9).with_str("probe");
        for _ in 0..20 {
            let x: Vec<f64> = (0..FEATURE_COUNT).map(|_| rng.normal()).collect();
            assert_eq!(predict_model(&forest, &x), ModelId::ALL[3]);
        }
    }

    #[test]
    fn same_seed_identical_serialization() {
        let (rows, labels) = synthetic(100, 5);
        let a = train_forest(&rows, &labels, 2, 10, 8, 42);
        let b = train_forest(&rows, &labels, 2, 10, 8, 42);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let c = train_forest(&rows, &labels, 2, 10, 8, 43);
        assert_ne!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&c).unwrap()
        );
    }

    #[test]
    fn vote_matches_per_tree_tally_oracle() {
        let (rows, labels) = synthetic(150, 7);
        let forest = train_forest(&rows, &labels, 2, 31, 10, 11);
        let mut rng = StreamRng::new(13).with_str("oracle");
        for _ in 0..50 {
            let x: Vec<f64> = (0..FEATURE_COUNT).map(|_| rng.normal()).collect();
            // Independent tally: walk each tree by hand.
            let mut votes = [0u32; 2];
            for tree in &forest.trees {
                let mut at = 0usize;
                let leaf = loop {
                    match &tree.nodes[at] {
                        Node::Leaf { counts } => break counts,
                        Node::Split {
                            feature,
                            threshold,
                            left,
                            right,
                        } => {
                            at = if x[*feature] <= *threshold {
                                *left
                            } else {
                                *right
                            }
                        }
                    }
                };
                let mut best = 0;
                for (i, &c) in leaf.iter().enumerate() {
                    if c > leaf[best] {
                        best = i;
                    }
                }
                votes[best] += 1;
            }
            let expected = if votes[1] > votes[0] { 1 } else { 0 };
            assert_eq!(predict_model(&forest, &x).class_index(), expected);
        }
    }

    #[test]
    fn tie_votes_resolve_to_lower_class() {
        // Two trees voting for different classes: class 0 wins the tie.
        let forest = RandomForest {
            trees: vec![
                Tree {
                    nodes: vec![Node::Leaf {
                        counts: vec![5, 0, 0, 0, 0, 0],
                    }],
                },
                Tree {
                    nodes: vec![Node::Leaf {
                        counts: vec![0, 5, 0, 0, 0, 0],
                    }],
                },
            ],
            n_trees: 2,
            max_depth: 1,
            seed: 0,
            n_classes: 6,
            degenerate: false,
        };
        assert_eq!(predict_model(&forest, &vec![0.0; 40]), ModelId::ALL[0]);
    }

    #[test]
    fn split_features_stay_in_range() {
        let (rows, labels) = synthetic(200, 20);
        let forest = train_forest(&rows, &labels, 2, 25, 12, 2);
        for tree in &forest.trees {
            for node in &tree.nodes {
                if let Node::Split { feature, .. } = node {
                    assert!(*feature < FEATURE_COUNT);
                }
            }
        }
    }
}
