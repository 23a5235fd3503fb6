//! Adapters that let continuous optimizers work on discrete, binary and
//! permutation domains. They transform evaluation inputs only; optimizer
//! state keeps its continuous values.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{check_len, Error, Result};

/// Nearest integer in `[0, 255]`, ties rounding up.
pub fn discretize_round(x: &[f64]) -> Vec<u8> {
    x.iter().map(|&v| (v + 0.5).floor().clamp(0.0, 255.0) as u8).collect()
}

/// `0` below 0.5, `1` at or above it.
pub fn binarize_threshold(x: &[f64]) -> Vec<u8> {
    x.iter().map(|&v| u8::from(v >= 0.5)).collect()
}

/// Relative position indexing: divides every element by the largest one.
pub fn rpi_encode(perm: &[u32]) -> Result<Vec<f64>> {
    let max = perm.iter().copied().max().ok_or(Error::Empty("permutation"))?;
    if max == 0 {
        return Err(Error::InvalidParameter {
            name: "perm",
            reason: "largest element is zero".into(),
        });
    }
    let max = f64::from(max);
    Ok(perm.iter().map(|&v| f64::from(v) / max).collect())
}

/// Rank matching: the k-th smallest real receives the k-th smallest element
/// of `base`. Equal reals are ranked by position.
pub fn rpi_decode<T: Copy + Ord>(x: &[f64], base: &[T]) -> Result<Vec<T>> {
    check_len(base.len(), x.len())?;
    let mut sorted = base.to_vec();
    sorted.sort_unstable();
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let mut out = vec![sorted[0]; x.len()];
    for (rank, &pos) in order.iter().enumerate() {
        out[pos] = sorted[rank];
    }
    Ok(out)
}

/// Transpositions that turn `from` into `to` when applied left to right.
/// Both must hold the same multiset.
pub fn transpositions<T: PartialEq + Copy>(from: &[T], to: &[T]) -> Result<Vec<(usize, usize)>> {
    check_len(from.len(), to.len())?;
    let mut work = from.to_vec();
    let mut swaps = Vec::new();
    for i in 0..work.len() {
        if work[i] == to[i] {
            continue;
        }
        let j = (i + 1..work.len())
            .find(|&j| work[j] == to[i] && work[j] != to[j])
            .or_else(|| (i + 1..work.len()).find(|&j| work[j] == to[i]))
            .ok_or_else(|| Error::InvalidParameter {
                name: "permutation",
                reason: "members are not permutations of the same multiset".into(),
            })?;
        work.swap(i, j);
        swaps.push((i, j));
    }
    Ok(swaps)
}

/// Permutation-matrix DE trial. The permutation carrying `b` onto `c` is
/// decomposed into transpositions, and each is applied to `a` with
/// probability `f`. The result is always a rearrangement of `a`.
pub fn permutation_trial<T: PartialEq + Copy>(a: &[T], b: &[T], c: &[T], f: f64, rng: &mut impl Rng) -> Result<Vec<T>> {
    check_len(a.len(), b.len())?;
    let swaps = transpositions(b, c)?;
    let mut trial = a.to_vec();
    for (i, j) in swaps {
        if rng.gen::<f64>() < f {
            trial.swap(i, j);
        }
    }
    Ok(trial)
}

/// Picks three distinct donors other than `parent` and builds a permutation
/// trial from them.
pub fn permutation_de_trial<T: PartialEq + Copy>(
    parent: usize,
    population: &[&[T]],
    f: f64,
    rng: &mut impl Rng,
) -> Result<Vec<T>> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidParameter {
            name: "f",
            reason: format!("{f} is not a probability"),
        });
    }
    let [a, b, c] = super::de::pick_donors(population.len(), parent, rng)?;
    permutation_trial(population[a], population[b], population[c], f, rng)
}

/// Uniformly shuffled copy of `base`.
pub fn random_permutation<T: Copy>(base: &[T], rng: &mut impl Rng) -> Vec<T> {
    let mut v = base.to_vec();
    v.shuffle(rng);
    v
}
