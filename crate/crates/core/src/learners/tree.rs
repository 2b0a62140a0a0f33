//! CART trees on pre-binned features. Shared by the single-tree learner, both
//! forests and the boosted ensemble.
//!
//! Each feature is binned once from the training rows: every distinct value
//! gets its own bin until there are more than `MAX_BINS` of them, after which
//! neighbouring values are grouped into bins of roughly equal row count.
//! Split thresholds are midpoints between the largest value left of the cut
//! and the smallest value right of it among the node's rows, so with at most
//! `MAX_BINS` distinct values a split is exactly the midpoint between two
//! adjacent distinct values present in the node.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::matrix::{Dataset, Matrix};
use crate::rng::Stream;

pub const MAX_BINS: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "FlatTree", try_from = "FlatTree")]
pub struct Tree {
    pub nodes: Vec<Node>,
}

/// Serialized form of a tree: parallel arrays indexed by node. Leaves have
/// `feature = -1` and store their score in `value`; splits store their
/// threshold there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatTree {
    pub feature: Vec<i64>,
    pub value: Vec<f64>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
}

impl From<Tree> for FlatTree {
    fn from(t: Tree) -> Self {
        let n = t.nodes.len();
        let mut flat = FlatTree {
            feature: Vec::with_capacity(n),
            value: Vec::with_capacity(n),
            left: Vec::with_capacity(n),
            right: Vec::with_capacity(n),
        };
        for node in t.nodes {
            let (f, v, l, r) = match node {
                Node::Leaf { value } => (-1, value, 0, 0),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => (feature as i64, threshold, left as u32, right as u32),
            };
            flat.feature.push(f);
            flat.value.push(v);
            flat.left.push(l);
            flat.right.push(r);
        }
        flat
    }
}

impl TryFrom<FlatTree> for Tree {
    type Error = &'static str;

    fn try_from(f: FlatTree) -> Result<Self, Self::Error> {
        let n = f.feature.len();
        if n == 0 || f.value.len() != n || f.left.len() != n || f.right.len() != n {
            return Err("tree arrays must be non-empty and of equal length");
        }
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            if f.feature[i] < 0 {
                nodes.push(Node::Leaf { value: f.value[i] });
            } else {
                let (l, r) = (f.left[i] as usize, f.right[i] as usize);
                if l <= i || r <= i || l >= n || r >= n {
                    return Err("split children must point forward inside the tree");
                }
                nodes.push(Node::Split {
                    feature: f.feature[i] as usize,
                    threshold: f.value[i],
                    left: l,
                    right: r,
                });
            }
        }
        Ok(Tree { nodes })
    }
}

impl Tree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn predict(&self, x: &Matrix) -> Vec<f64> {
        (0..x.rows()).map(|i| self.predict_row(x.row(i))).collect()
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &Tree, i: usize) -> usize {
            match t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(t, left).max(walk(t, right)),
            }
        }
        walk(self, 0)
    }
}

/// Per-feature bin codes for every training row, with the smallest and
/// largest raw value falling in each bin.
#[derive(Debug, Clone)]
pub(crate) struct Bins {
    codes: Vec<Vec<u16>>,
    lo: Vec<Vec<f64>>,
    hi: Vec<Vec<f64>>,
}

impl Bins {
    pub(crate) fn new(x: &Matrix) -> Bins {
        let n = x.rows();
        let mut codes = Vec::with_capacity(x.cols());
        let mut lo = Vec::with_capacity(x.cols());
        let mut hi = Vec::with_capacity(x.cols());
        for j in 0..x.cols() {
            let col = x.column(j);
            let mut sorted = col.clone();
            sorted.sort_by(f64::total_cmp);
            // distinct values with multiplicities
            let mut distinct: Vec<(f64, usize)> = Vec::new();
            for v in sorted {
                match distinct.last_mut() {
                    Some((d, c)) if *d == v => *c += 1,
                    _ => distinct.push((v, 1)),
                }
            }
            // upper edge value of each bin
            let mut uppers: Vec<f64> = Vec::new();
            let mut lowers: Vec<f64> = Vec::new();
            if distinct.len() <= MAX_BINS {
                for (v, _) in &distinct {
                    lowers.push(*v);
                    uppers.push(*v);
                }
            } else {
                let target = n.div_ceil(MAX_BINS).max(1);
                let mut acc = 0;
                let mut start = None;
                for (k, (v, c)) in distinct.iter().enumerate() {
                    if start.is_none() {
                        start = Some(*v);
                    }
                    acc += c;
                    if acc >= target || k + 1 == distinct.len() {
                        lowers.push(start.take().unwrap_or(*v));
                        uppers.push(*v);
                        acc = 0;
                    }
                }
            }
            let col_codes = col
                .iter()
                .map(|v| uppers.partition_point(|u| u < v).min(uppers.len() - 1) as u16)
                .collect();
            codes.push(col_codes);
            lo.push(lowers);
            hi.push(uppers);
        }
        Bins { codes, lo, hi }
    }

    fn n_features(&self) -> usize {
        self.codes.len()
    }

    fn n_bins(&self, f: usize) -> usize {
        self.hi[f].len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Criterion {
    /// Class-probability trees scored by Gini impurity.
    Gini,
    /// Regression on gradients scored by squared error, with Newton leaves
    /// `sum(g) / max(sum(h), 1e-12)`.
    Newton,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct GrowParams {
    pub max_depth: usize,
    pub min_leaf: f64,
    pub min_gain: f64,
    pub mtry: usize,
    pub criterion: Criterion,
}

/// Per-row fitting targets: a weight, a target (label or gradient) and a
/// hessian (unused by Gini).
pub(crate) struct Targets<'a> {
    pub weight: &'a [f64],
    pub target: &'a [f64],
    pub hessian: &'a [f64],
}

#[derive(Debug, Clone, Copy, Default)]
struct Stats {
    w: f64,
    t: f64,
    h: f64,
}

impl Stats {
    fn add(&mut self, o: &Stats) {
        self.w += o.w;
        self.t += o.t;
        self.h += o.h;
    }

    fn minus(&self, o: &Stats) -> Stats {
        Stats {
            w: self.w - o.w,
            t: self.t - o.t,
            h: self.h - o.h,
        }
    }

    /// Node cost whose decrease is the split gain: weighted Gini impurity, or
    /// the target-dependent part of the squared error.
    fn cost(&self, c: Criterion) -> f64 {
        if self.w <= 0.0 {
            return 0.0;
        }
        match c {
            Criterion::Gini => 2.0 * self.t * (self.w - self.t) / self.w,
            Criterion::Newton => -(self.t * self.t) / self.w,
        }
    }

    fn leaf_value(&self, c: Criterion) -> f64 {
        match c {
            Criterion::Gini => {
                if self.w > 0.0 {
                    self.t / self.w
                } else {
                    0.0
                }
            }
            Criterion::Newton => self.t / self.h.max(1e-12),
        }
    }

    fn is_pure(&self, c: Criterion) -> bool {
        c == Criterion::Gini && (self.t <= 0.0 || self.t >= self.w)
    }
}

struct Best {
    feature: usize,
    cut_bin: usize,
    threshold: f64,
    gain: f64,
}

struct Frame {
    node: usize,
    start: usize,
    end: usize,
    depth: usize,
}

/// Grows one tree over `rows` (indices into the binned training rows).
/// Impurity decreases are accumulated into `importance` by feature.
pub(crate) fn grow(
    bins: &Bins,
    mut rows: Vec<usize>,
    targets: &Targets<'_>,
    params: &GrowParams,
    mut rng: Option<&mut Stream>,
    importance: &mut [f64],
) -> Tree {
    let p = bins.n_features();
    let max_bins = (0..p).map(|f| bins.n_bins(f)).max().unwrap_or(1);
    let mut hist = vec![Stats::default(); max_bins];
    let mut scratch = Vec::with_capacity(rows.len());
    let mut nodes = vec![Node::Leaf { value: 0.0 }];
    let n = rows.len();
    let mut stack = vec![Frame {
        node: 0,
        start: 0,
        end: n,
        depth: 0,
    }];
    let all_features: Vec<usize> = (0..p).collect();

    while let Some(frame) = stack.pop() {
        let node_rows = &rows[frame.start..frame.end];
        let mut total = Stats::default();
        for &r in node_rows {
            total.add(&Stats {
                w: targets.weight[r],
                t: targets.weight[r] * targets.target[r],
                h: targets.weight[r] * targets.hessian[r],
            });
        }
        nodes[frame.node] = Node::Leaf {
            value: total.leaf_value(params.criterion),
        };
        if frame.depth >= params.max_depth || total.w < 2.0 * params.min_leaf || total.is_pure(params.criterion) {
            continue;
        }

        let features = match rng.as_deref_mut() {
            Some(r) if params.mtry < p => {
                let mut f = index::sample(r, p, params.mtry).into_vec();
                f.sort_unstable();
                f
            }
            _ => all_features.clone(),
        };

        let parent_cost = total.cost(params.criterion);
        let mut best: Option<Best> = None;
        for &f in &features {
            let nb = bins.n_bins(f);
            let codes = &bins.codes[f];
            hist[..nb].iter_mut().for_each(|s| *s = Stats::default());
            for &r in node_rows {
                let s = &mut hist[codes[r] as usize];
                let w = targets.weight[r];
                s.w += w;
                s.t += w * targets.target[r];
                s.h += w * targets.hessian[r];
            }
            let mut left = Stats::default();
            let mut last: Option<usize> = None;
            for b in 0..nb {
                if hist[b].w <= 0.0 {
                    continue;
                }
                if let Some(l) = last {
                    let right = total.minus(&left);
                    if left.w >= params.min_leaf && right.w >= params.min_leaf {
                        let gain = parent_cost - left.cost(params.criterion) - right.cost(params.criterion);
                        if gain / total.w >= params.min_gain && best.as_ref().is_none_or(|bst| gain > bst.gain) {
                            best = Some(Best {
                                feature: f,
                                cut_bin: l,
                                threshold: (bins.hi[f][l] + bins.lo[f][b]) / 2.0,
                                gain,
                            });
                        }
                    }
                }
                left.add(&hist[b]);
                last = Some(b);
            }
        }

        let Some(best) = best else { continue };
        importance[best.feature] += best.gain.max(0.0);

        // stable partition of the node's rows
        scratch.clear();
        let codes = &bins.codes[best.feature];
        let slice = &mut rows[frame.start..frame.end];
        let mut w = 0;
        for k in 0..slice.len() {
            let r = slice[k];
            if codes[r] as usize <= best.cut_bin {
                slice[w] = r;
                w += 1;
            } else {
                scratch.push(r);
            }
        }
        slice[w..].copy_from_slice(&scratch);
        let mid = frame.start + w;

        let left = nodes.len();
        let right = left + 1;
        nodes.push(Node::Leaf { value: 0.0 });
        nodes.push(Node::Leaf { value: 0.0 });
        nodes[frame.node] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        stack.push(Frame {
            node: right,
            start: mid,
            end: frame.end,
            depth: frame.depth + 1,
        });
        stack.push(Frame {
            node: left,
            start: frame.start,
            end: mid,
            depth: frame.depth + 1,
        });
    }
    Tree { nodes }
}

/// Single classification tree hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_leaf: usize,
    pub min_gain: f64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: 5,
            min_leaf: 5,
            min_gain: 0.0,
        }
    }
}

/// Fits a Gini tree; returns the tree and its raw impurity decreases.
pub(crate) fn fit_gini_tree(data: &Dataset, cfg: &TreeConfig) -> (Tree, Vec<f64>) {
    let bins = Bins::new(&data.x);
    let n = data.n_rows();
    let weight = vec![1.0; n];
    let target: Vec<f64> = data.y.iter().map(|&l| f64::from(l)).collect();
    let targets = Targets {
        weight: &weight,
        target: &target,
        hessian: &weight,
    };
    let params = GrowParams {
        max_depth: cfg.max_depth,
        min_leaf: cfg.min_leaf.max(1) as f64,
        min_gain: cfg.min_gain,
        mtry: data.x.cols(),
        criterion: Criterion::Gini,
    };
    let mut importance = vec![0.0; data.x.cols()];
    let tree = grow(&bins, (0..n).collect(), &targets, &params, None, &mut importance);
    (tree, importance)
}
