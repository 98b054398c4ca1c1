//! Rayon drivers for the chunked sampler and the assignment scan. Work is
//! split into fixed blocks and merged in block order, so results do not
//! depend on the number of threads.

use rayon::prelude::*;
use weakval_core::contextuality::{Assignment, AssignmentSearch, ContextTable};
use weakval_core::weakmeas::{PointerSampler, CHUNK_SIZE};
use weakval_core::Result;

const SEARCH_BLOCK: u64 = 1 << 16;

/// Same output as [`PointerSampler::sample`].
pub fn sample(sampler: &PointerSampler, n: usize, seed: u64) -> Vec<f64> {
    let chunks = n.div_ceil(CHUNK_SIZE);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let count = CHUNK_SIZE.min(n - k * CHUNK_SIZE);
            sampler.sample_chunk(seed, k as u64, count)
        })
        .collect();
    parts.concat()
}

/// Same output as `search_assignments`, scanning prefix blocks in parallel.
pub fn search(table: &ContextTable) -> Result<Vec<Assignment>> {
    let search = AssignmentSearch::new(table)?;
    let blocks = search.space().div_ceil(SEARCH_BLOCK);
    let hits: Vec<Vec<u32>> = (0..blocks)
        .into_par_iter()
        .map(|b| search.scan(b * SEARCH_BLOCK..(b + 1) * SEARCH_BLOCK))
        .collect();
    Ok(hits
        .into_iter()
        .flatten()
        .map(|c| search.assignment(c))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use weakval_core::contextuality::{search_assignments, Context, Sign};
    use weakval_core::hilbert::{pauli_string, Axis};
    use weakval_core::scenarios::three_box;
    use weakval_core::weakmeas::{exact_pointer_distribution, PointerConfig};

    #[test]
    fn parallel_sampling_matches_serial() {
        let s = three_box();
        let dist = exact_pointer_distribution(
            &s.pps,
            s.observable("P_C").unwrap(),
            &PointerConfig::new(0.1),
        )
        .unwrap();
        let sampler = PointerSampler::new(&dist);
        let n = 2 * CHUNK_SIZE + 17;
        assert_eq!(sample(&sampler, n, 3), sampler.sample(n, 3));
    }

    #[test]
    fn parallel_search_matches_serial() {
        // 18 free observables with one parity constraint: 2^17 solutions
        // spread over four blocks.
        let z = pauli_string(&[(0, Axis::Z)], 1).unwrap();
        let obs = (0..18).map(|i| z.clone().renamed(format!("o{i}"))).collect();
        let ctx = Context {
            members: vec![0, 7, 17],
            required: Sign::Minus,
        };
        let table = ContextTable::new(obs, vec![ctx]).unwrap();
        let par = search(&table).unwrap();
        assert_eq!(par.len(), 1 << 17);
        assert_eq!(par, search_assignments(&table).unwrap());
    }
}
