//! Seeded shuffle-then-slice corpus splitting.

use super::{CorpusError, CorpusRecord, SplitSpec};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct CorpusSplit {
    pub train: Vec<CorpusRecord>,
    pub val: Vec<CorpusRecord>,
    pub test: Vec<CorpusRecord>,
}

/// Shuffle deterministically by seed (ChaCha8, so the permutation is stable
/// across platforms and releases), then slice contiguously into train, val,
/// and test partitions.
pub fn split_corpus(records: Vec<CorpusRecord>, spec: &SplitSpec) -> Result<CorpusSplit, CorpusError> {
    let requested = spec.total();
    if requested > records.len() {
        return Err(CorpusError::OversizeSplit { requested, available: records.len() });
    }
    let mut shuffled = records;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    shuffled.shuffle(&mut rng);

    let mut rest = shuffled;
    let mut remainder = rest.split_off(spec.train_n);
    let train = rest;
    let mut test_and_rest = remainder.split_off(spec.val_n);
    let val = remainder;
    let _unused = test_and_rest.split_off(spec.test_n);
    let test = test_and_rest;

    Ok(CorpusSplit { train, val, test })
}
