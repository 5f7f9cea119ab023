use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::sample::{SampleSet, SparseVector};

/// `⌊ε·m⌋`, robust to `ε·m` landing a rounding error below an integer.
pub fn corruption_count(epsilon: f64, m: usize) -> usize {
    let raw = epsilon * m as f64;
    (raw + 1e-9 * raw.max(1.0)).floor() as usize
}

/// Splits `items` in order into `count` disjoint batches of `⌊m/count⌋`; the remainder is
/// dropped.
pub fn split_batches<S>(items: &[S], count: usize) -> Result<Vec<&[S]>> {
    if count == 0 || items.len() < count {
        return Err(Error::InsufficientData {
            needed: count.max(1),
            available: items.len(),
        });
    }
    let size = items.len() / count;
    Ok(items.chunks_exact(size).take(count).collect())
}

/// Huber ε-contamination with a fixed number of corrupted samples per batch.
pub struct CorruptionSpec<F> {
    pub epsilon: f64,
    pub adversary: F,
}

impl<F> CorruptionSpec<F> {
    pub fn new(epsilon: f64, adversary: F) -> Result<Self> {
        if !(0.0..0.5).contains(&epsilon) {
            return Err(Error::Config(format!("corruption level must lie in [0, 0.5), got {epsilon}")));
        }
        Ok(Self { epsilon, adversary })
    }
}

/// Rewrites `⌊ε·m⌋` items chosen uniformly without replacement through the adversary and
/// returns the ground-truth mask.
pub fn contaminate<S, R, F>(batch: &mut [S], spec: &mut CorruptionSpec<F>, rng: &mut R) -> Vec<bool>
where
    R: Rng + ?Sized,
    F: FnMut(&S, &mut R) -> S,
{
    let mut mask = vec![false; batch.len()];
    let k = corruption_count(spec.epsilon, batch.len());
    if k == 0 {
        return mask;
    }
    let mut picked = sample(rng, batch.len(), k).into_vec();
    picked.sort_unstable();
    for i in picked {
        batch[i] = (spec.adversary)(&batch[i], rng);
        mask[i] = true;
    }
    mask
}

impl<T: Scalar> SampleSet<T> {
    /// Contaminates the set in place, recording corrupted positions in the hidden mask.
    pub fn contaminate<R, F>(&mut self, spec: &mut CorruptionSpec<F>, rng: &mut R)
    where
        R: Rng + ?Sized,
        F: FnMut(&SparseVector<T>, &mut R) -> SparseVector<T>,
    {
        let (samples, mask) = self.parts_mut();
        let fresh = contaminate(samples, spec, rng);
        for (m, f) in mask.iter_mut().zip(fresh) {
            *m |= f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn batch_examples() {
        let items: Vec<usize> = (0..10).collect();
        let b = split_batches(&items, 2).unwrap();
        assert_eq!(b, vec![&[0, 1, 2, 3, 4][..], &[5, 6, 7, 8, 9][..]]);
        let items: Vec<usize> = (0..11).collect();
        let b = split_batches(&items, 2).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[1], &[5, 6, 7, 8, 9]);
        assert!(matches!(
            split_batches(&[0u8; 4], 8),
            Err(Error::InsufficientData { needed: 8, available: 4 })
        ));
    }

    #[test]
    fn corruption_counts() {
        assert_eq!(corruption_count(0.0, 100), 0);
        assert_eq!(corruption_count(0.5 - 1e-9, 10), 4);
        assert_eq!(corruption_count(0.1, 100), 10);
        assert_eq!(corruption_count(1.0 / 3.0, 3), 1);
        assert_eq!(corruption_count(0.07, 100), 7);
    }

    #[test]
    fn contamination_rewrites_exact_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut rewards = vec![1.0f64; 100];
        let mut spec = CorruptionSpec::new(0.1, |r: &f64, _: &mut ChaCha8Rng| r + 1e3).unwrap();
        let mask = contaminate(&mut rewards, &mut spec, &mut rng);
        assert_eq!(mask.iter().filter(|&&m| m).count(), 10);
        assert_eq!(rewards.iter().filter(|&&r| r == 1001.0).count(), 10);
        for (r, m) in rewards.iter().zip(&mask) {
            assert_eq!(*m, *r == 1001.0);
        }

        let mut clean = vec![1.0f64; 50];
        let mut none = CorruptionSpec::new(0.0, |r: &f64, _: &mut ChaCha8Rng| r + 1.0).unwrap();
        assert!(contaminate(&mut clean, &mut none, &mut rng).iter().all(|&m| !m));
        assert!(clean.iter().all(|&r| r == 1.0));
        assert!(CorruptionSpec::new(0.5, ()).is_err());
    }
}
