//! Clustering accuracy under the best one-to-one matching of clusters to
//! classes.

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;

/// Largest number of clusters or classes accepted by [`accuracy`].
pub const MAX_CLASSES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("predicted labels cover {predicted} vertices, ground truth {truth}")]
    LengthMismatch { predicted: usize, truth: usize },
    #[error("{count} distinct {what}, at most {MAX_CLASSES} supported")]
    TooManyClasses { what: &'static str, count: usize },
    #[error("no vertex carries both a predicted and a true label")]
    NothingToCompare,
}

/// Fraction of vertices whose cluster maps to their class, maximized over
/// one-to-one assignments of clusters to classes. Vertices unlabeled on
/// either side are ignored. Cluster and class ids are arbitrary.
pub fn accuracy(predicted: &[Option<u32>], truth: &[Option<u32>]) -> Result<f64, EvalError> {
    if predicted.len() != truth.len() {
        return Err(EvalError::LengthMismatch { predicted: predicted.len(), truth: truth.len() });
    }
    let pairs: Vec<(u32, u32)> = predicted
        .iter()
        .zip(truth)
        .filter_map(|(p, t)| Some(((*p)?, (*t)?)))
        .collect();
    if pairs.is_empty() {
        return Err(EvalError::NothingToCompare);
    }
    let clusters = dense_ids(pairs.iter().map(|p| p.0), "clusters")?;
    let classes = dense_ids(pairs.iter().map(|p| p.1), "classes")?;
    let size = clusters.len().max(classes.len());
    let mut counts = Matrix::new(size, size, 0i64);
    for &(p, t) in &pairs {
        let r = clusters.binary_search(&p).expect("collected above");
        let c = classes.binary_search(&t).expect("collected above");
        counts[(r, c)] += 1;
    }
    let (matched, _) = kuhn_munkres(&counts);
    Ok(matched as f64 / pairs.len() as f64)
}

fn dense_ids(ids: impl Iterator<Item = u32>, what: &'static str) -> Result<Vec<u32>, EvalError> {
    let mut v: Vec<u32> = ids.collect();
    v.sort_unstable();
    v.dedup();
    if v.len() > MAX_CLASSES {
        return Err(EvalError::TooManyClasses { what, count: v.len() });
    }
    Ok(v)
}
