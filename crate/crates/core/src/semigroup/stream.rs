use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{ExponentMode, SemigroupSpec};

/// Increasing enumeration of a finitely generated semigroup.
///
/// The frontier holds `(value, i)` where `i` is the smallest generator index
/// still allowed as a factor, so each exponent vector is produced once.
/// Distinct exponent vectors with equal products (dependent generators) are
/// collapsed by comparing against the last emitted value. Elements that would
/// overflow `u128` or exceed the optional bound are never pushed.
#[derive(Debug, Clone)]
pub struct SemigroupStream {
    generators: Vec<u64>,
    frontier: BinaryHeap<Reverse<(u128, usize)>>,
    last: Option<u128>,
    bound: u128,
}

impl SemigroupStream {
    pub fn new(spec: &SemigroupSpec) -> Self {
        SemigroupStream::bounded(spec, u128::MAX)
    }

    /// Stream that stops after the last element `<= bound`.
    pub fn bounded(spec: &SemigroupSpec, bound: u128) -> Self {
        let generators = spec.generators().to_vec();
        let mut frontier = BinaryHeap::new();
        match spec.mode() {
            ExponentMode::AllProducts => frontier.push(Reverse((1u128, 0usize))),
            ExponentMode::PositiveExponents => {
                let base = generators
                    .iter()
                    .try_fold(1u128, |acc, &g| acc.checked_mul(g as u128));
                if let Some(base) = base.filter(|&b| b <= bound) {
                    frontier.push(Reverse((base, 0)));
                }
            }
        }
        let mut stream = SemigroupStream {
            generators,
            frontier,
            last: None,
            bound,
        };
        if spec.mode() == ExponentMode::AllProducts {
            // 1 is the empty product; expand it without emitting.
            stream.pop_raw();
        }
        stream
    }

    pub fn last(&self) -> Option<u128> {
        self.last
    }

    fn pop_raw(&mut self) -> Option<u128> {
        let Reverse((value, min_index)) = self.frontier.pop()?;
        for (j, &g) in self.generators.iter().enumerate().skip(min_index) {
            if let Some(next) = value.checked_mul(g as u128) {
                if next <= self.bound {
                    self.frontier.push(Reverse((next, j)));
                }
            }
        }
        Some(value)
    }
}

impl Iterator for SemigroupStream {
    type Item = u128;

    fn next(&mut self) -> Option<u128> {
        loop {
            let value = self.pop_raw()?;
            if self.last.map_or(true, |last| value > last) {
                self.last = Some(value);
                return Some(value);
            }
        }
    }
}
