//! Minimum-redundancy maximum-relevance feature selection.
//!
//! Dependencies are plug-in mutual information estimates (nats) on discretized
//! variables. For a subset `S` of features and target `c`:
//!
//! - relevance `D = (1/|S|)·Σ_{x∈S} I(x, c)`,
//! - redundancy `R = (1/|S|²)·Σ_{x,y∈S} I(x, y)` over ordered pairs, `x = y` included,
//! - score `D − R`.
//!
//! [`select_features`] grows `S` greedily: the first pick maximizes `I(x, c)`, later picks
//! maximize `I(x, c) − (1/|S|)·Σ_{s∈S} I(x, s)`.

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MrmrError {
    #[error("no samples")]
    Empty,
    #[error("bin count must be at least {min}, got {got}")]
    BinCount { min: usize, got: usize },
    #[error("value at sample {0} is not finite")]
    NonFinite(usize),
    #[error("label {label} at sample {sample} is outside 0..{bins}")]
    LabelOutOfRange { sample: usize, label: usize, bins: usize },
    #[error("sample counts differ: {0} vs {1}")]
    SampleCountMismatch(usize, usize),
    #[error("{names} names for {features} features")]
    NameCountMismatch { names: usize, features: usize },
    #[error("feature subset is empty")]
    EmptySubset,
    #[error("feature index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("k = {k} is outside 1..={available}")]
    KOutOfRange { k: usize, available: usize },
}

/// Integer bin labels for one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedVariable {
    labels: Vec<usize>,
    bin_count: usize,
    /// `bin_count + 1` edges for binned continuous data; `None` for label passthrough.
    bin_edges: Option<Vec<f64>>,
}

impl DiscretizedVariable {
    /// Wraps labels that are already discrete, e.g. a binary flag with `bin_count = 2`.
    pub fn from_labels(labels: Vec<usize>, bin_count: usize) -> Result<Self, MrmrError> {
        if labels.is_empty() {
            return Err(MrmrError::Empty);
        }
        if bin_count == 0 {
            return Err(MrmrError::BinCount { min: 1, got: 0 });
        }
        if let Some((sample, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= bin_count) {
            return Err(MrmrError::LabelOutOfRange {
                sample,
                label,
                bins: bin_count,
            });
        }
        Ok(Self {
            labels,
            bin_count,
            bin_edges: None,
        })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    pub fn bin_edges(&self) -> Option<&[f64]> {
        self.bin_edges.as_deref()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Applies the same permutation to the samples.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            labels: order.iter().map(|&k| self.labels[k]).collect(),
            bin_count: self.bin_count,
            bin_edges: self.bin_edges.clone(),
        }
    }
}

/// Equal-width bins over `[min, max]`; the maximum lands in the top bin. A constant input
/// collapses to one bin with edges `[v, v]`.
pub fn discretize(values: &[f64], bin_count: usize) -> Result<DiscretizedVariable, MrmrError> {
    if values.is_empty() {
        return Err(MrmrError::Empty);
    }
    if bin_count < 2 {
        return Err(MrmrError::BinCount { min: 2, got: bin_count });
    }
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(MrmrError::NonFinite(k));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Ok(DiscretizedVariable {
            labels: alloc::vec![0; values.len()],
            bin_count: 1,
            bin_edges: Some(alloc::vec![lo, hi]),
        });
    }
    let width = (hi - lo) / bin_count as f64;
    let labels = values
        .iter()
        .map(|&v| (((v - lo) / width) as usize).min(bin_count - 1))
        .collect();
    let mut edges: Vec<f64> = (0..bin_count).map(|k| lo + width * k as f64).collect();
    edges.push(hi);
    Ok(DiscretizedVariable {
        labels,
        bin_count,
        bin_edges: Some(edges),
    })
}

fn counts(v: &DiscretizedVariable) -> Vec<u64> {
    let mut c = alloc::vec![0u64; v.bin_count];
    for &l in &v.labels {
        c[l] += 1;
    }
    c
}

/// Sum after sorting, so the result does not depend on term order.
fn ordered_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

/// Plug-in entropy in nats.
pub fn entropy(v: &DiscretizedVariable) -> f64 {
    let n = v.len() as f64;
    ordered_sum(
        counts(v)
            .into_iter()
            .filter(|&c| c > 0)
            .map(|c| {
                let p = c as f64 / n;
                -p * libm::log(p)
            })
            .collect(),
    )
}

/// Plug-in mutual information in nats; symmetric bit-for-bit and clamped at 0.
pub fn mutual_information(a: &DiscretizedVariable, b: &DiscretizedVariable) -> Result<f64, MrmrError> {
    if a.len() != b.len() {
        return Err(MrmrError::SampleCountMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(MrmrError::Empty);
    }
    let n = a.len() as u64;
    let (ca, cb) = (counts(a), counts(b));
    let mut joint = alloc::vec![0u64; a.bin_count * b.bin_count];
    for (&u, &v) in a.labels.iter().zip(&b.labels) {
        joint[u * b.bin_count + v] += 1;
    }
    let mut terms = Vec::new();
    for u in 0..a.bin_count {
        for v in 0..b.bin_count {
            let c = joint[u * b.bin_count + v];
            if c == 0 {
                continue;
            }
            // integer products keep each term independent of argument order
            let ratio = (c * n) as f64 / (ca[u] * cb[v]) as f64;
            terms.push(c as f64 / n as f64 * libm::log(ratio));
        }
    }
    Ok(ordered_sum(terms).max(0.0))
}

/// Candidate features and the target they should explain.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    features: Vec<DiscretizedVariable>,
    names: Vec<String>,
    target: DiscretizedVariable,
}

impl FeatureSet {
    pub fn new(
        features: Vec<DiscretizedVariable>,
        names: Vec<String>,
        target: DiscretizedVariable,
    ) -> Result<Self, MrmrError> {
        if names.len() != features.len() {
            return Err(MrmrError::NameCountMismatch {
                names: names.len(),
                features: features.len(),
            });
        }
        for f in &features {
            if f.len() != target.len() {
                return Err(MrmrError::SampleCountMismatch(f.len(), target.len()));
            }
        }
        Ok(Self {
            features,
            names,
            target,
        })
    }

    pub fn features(&self) -> &[DiscretizedVariable] {
        &self.features
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn target(&self) -> &DiscretizedVariable {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    fn check_subset(&self, subset: &[usize]) -> Result<(), MrmrError> {
        if subset.is_empty() {
            return Err(MrmrError::EmptySubset);
        }
        match subset.iter().find(|&&k| k >= self.features.len()) {
            Some(&k) => Err(MrmrError::IndexOutOfRange(k)),
            None => Ok(()),
        }
    }

    fn mi(&self, a: usize, b: usize) -> f64 {
        mutual_information(&self.features[a], &self.features[b]).expect("sample counts checked in new")
    }

    fn mi_target(&self, a: usize) -> f64 {
        mutual_information(&self.features[a], &self.target).expect("sample counts checked in new")
    }
}

/// Mean MI between the subset and the target, summed in subset order.
pub fn relevance(set: &FeatureSet, subset: &[usize]) -> Result<f64, MrmrError> {
    set.check_subset(subset)?;
    let sum: f64 = subset.iter().map(|&k| set.mi_target(k)).sum();
    Ok(sum / subset.len() as f64)
}

/// Mean MI over all ordered pairs of the subset, self-pairs included, summed row by row
/// in subset order.
pub fn redundancy(set: &FeatureSet, subset: &[usize]) -> Result<f64, MrmrError> {
    set.check_subset(subset)?;
    let mut sum = 0.0;
    for &a in subset {
        for &b in subset {
            sum += set.mi(a, b);
        }
    }
    let n = subset.len() as f64;
    Ok(sum / (n * n))
}

/// Greedy selection order with `D`, `R` and `D − R` of the selected set after each pick.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectionResult {
    pub selected_indices: Vec<usize>,
    pub relevance_trace: Vec<f64>,
    pub redundancy_trace: Vec<f64>,
    pub score_trace: Vec<f64>,
}

/// Picks `k` features greedily; ties go to the lowest index.
pub fn select_features(set: &FeatureSet, k: usize) -> Result<SelectionResult, MrmrError> {
    if k == 0 || k > set.len() {
        return Err(MrmrError::KOutOfRange {
            k,
            available: set.len(),
        });
    }
    let rel: Vec<f64> = (0..set.len()).map(|i| set.mi_target(i)).collect();
    // Σ_{s∈S} I(x, s), accumulated in selection order
    let mut red_sum = alloc::vec![0.0; set.len()];
    let mut chosen = alloc::vec![false; set.len()];
    let mut result = SelectionResult {
        selected_indices: Vec::with_capacity(k),
        relevance_trace: Vec::with_capacity(k),
        redundancy_trace: Vec::with_capacity(k),
        score_trace: Vec::with_capacity(k),
    };

    for step in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for i in (0..set.len()).filter(|&i| !chosen[i]) {
            let score = if step == 0 {
                rel[i]
            } else {
                rel[i] - red_sum[i] / step as f64
            };
            if best.map_or(true, |(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        let (pick, _) = best.expect("k <= feature count");
        chosen[pick] = true;
        result.selected_indices.push(pick);
        for i in (0..set.len()).filter(|&i| !chosen[i]) {
            red_sum[i] += set.mi(i, pick);
        }

        let d = relevance(set, &result.selected_indices)?;
        let r = redundancy(set, &result.selected_indices)?;
        result.relevance_trace.push(d);
        result.redundancy_trace.push(r);
        result.score_trace.push(d - r);
    }
    Ok(result)
}
