use std::cmp::Ordering;

use crate::domains::Vector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::batches::corruption_count;
use super::sample::{Columns, SampleSet};

fn cmp<T: Scalar>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).expect("finite samples")
}

/// Coordinate-wise arithmetic mean.
pub fn naive_mean<T: Scalar>(set: &SampleSet<T>) -> Result<Vector<T>> {
    if set.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    Ok(naive_mean_columns(&set.columns()))
}

/// [`naive_mean`] over a prebuilt column view.
pub fn naive_mean_columns<T: Scalar>(cols: &Columns<T>) -> Vector<T> {
    let m = T::of_usize(cols.rows());
    Vector::from_fn(cols.dim(), |k| {
        cols.column(k).iter().fold(T::zero(), |acc, &(_, v)| acc + v) / m
    })
}

/// Number of entries kept per coordinate: `m − ⌊ε·m⌋ = ⌈(1−ε)·m⌉`.
pub fn robust_keep_count(epsilon: f64, m: usize) -> usize {
    m - corruption_count(epsilon, m)
}

/// Coordinate-wise trimmed mean around the median.
///
/// Per coordinate: the median (mean of the two central order statistics for even counts),
/// then the mean of the `⌈(1−ε)·m⌉` entries closest to it, ties going to lower sample
/// indices. Kept entries are summed in sample order.
pub fn coordinate_robust_mean<T: Scalar>(set: &SampleSet<T>, epsilon: f64) -> Result<Vector<T>> {
    if set.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    if !(0.0..0.5).contains(&epsilon) {
        return Err(Error::Config(format!("corruption level must lie in [0, 0.5), got {epsilon}")));
    }
    Ok(robust_mean_columns(&set.columns(), epsilon))
}

/// [`coordinate_robust_mean`] over a prebuilt column view; `ε` must already be validated.
pub fn robust_mean_columns<T: Scalar>(cols: &Columns<T>, epsilon: f64) -> Vector<T> {
    let m = cols.rows();
    let keep = robust_keep_count(epsilon, m);
    Vector::from_fn(cols.dim(), |k| robust_column(cols.column(k), m, keep))
}

/// Trimmed mean of a column of length `m` whose entries are zero except for `nonzero`
/// (sorted by sample index).
fn robust_column<T: Scalar>(nonzero: &[(usize, T)], m: usize, keep: usize) -> T {
    if nonzero.is_empty() {
        return T::zero();
    }
    let zeros = m - nonzero.len();
    let mut values: Vec<T> = nonzero.iter().map(|&(_, v)| v).collect();
    values.sort_by(cmp);
    let negatives = values.iter().take_while(|&&v| v < T::zero()).count();
    let order_stat = |j: usize| -> T {
        if j < negatives {
            values[j]
        } else if j < negatives + zeros {
            T::zero()
        } else {
            values[j - zeros]
        }
    };
    let median = if m % 2 == 1 {
        order_stat(m / 2)
    } else {
        (order_stat(m / 2 - 1) + order_stat(m / 2)) / T::of(2.0)
    };

    let zero_dist = (T::zero() - median).abs();
    // Nonzero entries by (distance, index).
    let mut ranked: Vec<(T, usize, T)> = nonzero.iter().map(|&(i, v)| ((v - median).abs(), i, v)).collect();
    ranked.sort_by(|a, b| cmp(&a.0, &b.0).then(a.1.cmp(&b.1)));
    let closer = ranked.iter().take_while(|r| r.0 < zero_dist).count();
    let tied = ranked[closer..].iter().take_while(|r| r.0 == zero_dist).count();

    let mut kept: Vec<(usize, T)> = Vec::with_capacity(keep.min(nonzero.len()));
    if keep <= closer {
        kept.extend(ranked[..keep].iter().map(|r| (r.1, r.2)));
    } else {
        kept.extend(ranked[..closer].iter().map(|r| (r.1, r.2)));
        let from_tie = keep - closer;
        if from_tie >= tied + zeros {
            let beyond = from_tie - tied - zeros;
            kept.extend(ranked[closer..closer + tied + beyond].iter().map(|r| (r.1, r.2)));
        } else {
            // Tie group at distance |median|: tied nonzeros and all zeros, taken by index.
            let mut tie: Vec<(usize, T)> = ranked[closer..closer + tied].iter().map(|r| (r.1, r.2)).collect();
            tie.sort_by_key(|t| t.0);
            for (j, &(idx, v)) in tie.iter().enumerate() {
                let nonzero_before = nonzero.partition_point(|&(i, _)| i < idx);
                let zeros_before = idx - nonzero_before;
                if j + 1 + zeros_before <= from_tie {
                    kept.push((idx, v));
                }
            }
        }
    }
    kept.sort_by_key(|k| k.0);
    kept.iter().fold(T::zero(), |acc, &(_, v)| acc + v) / T::of_usize(keep)
}
