//! Enumeration of lattice points of the probability simplex.
//!
//! The points `{c / m : c in N^d, sum c = m}` are the types of sequences of
//! length `m` over a `d`-letter alphabet, so the same iterator serves the
//! brute-force grid oracles and exact type-class sums.

/// All compositions of `total` into `parts` nonnegative parts, in
/// lexicographic order of the count vector.
#[derive(Clone, Debug)]
pub struct Compositions {
    current: Vec<u64>,
    total: u64,
    done: bool,
}

impl Compositions {
    pub fn new(parts: usize, total: u64) -> Self {
        assert!(parts > 0, "compositions need at least one part");
        let mut current = vec![0; parts];
        current[parts - 1] = total;
        Compositions {
            current,
            total,
            done: false,
        }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let d = self.current.len();
        // Next in lexicographic order: bump the rightmost position (other
        // than the last) that still has room, then reset everything after
        // it so the remainder sits in the last slot.
        let mut advanced = false;
        if d > 1 {
            let mut i = d - 1;
            while i > 0 {
                i -= 1;
                let used: u64 = self.current[..=i].iter().sum();
                if used < self.total {
                    self.current[i] += 1;
                    for c in &mut self.current[i + 1..] {
                        *c = 0;
                    }
                    let used: u64 = self.current[..d - 1].iter().sum();
                    self.current[d - 1] = self.total - used;
                    advanced = true;
                    break;
                }
            }
        }
        if !advanced {
            self.done = true;
        }
        Some(out)
    }
}

/// Number of compositions of `total` into `parts` parts: `C(total + parts - 1, parts - 1)`.
pub fn composition_count(parts: usize, total: u64) -> u128 {
    let k = parts as u128 - 1;
    let n = total as u128 + k;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_compositions() {
        let all: Vec<_> = Compositions::new(2, 2).collect();
        assert_eq!(all, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn single_part() {
        let all: Vec<_> = Compositions::new(1, 5).collect();
        assert_eq!(all, vec![vec![5]]);
    }

    #[test]
    fn counts_match_formula() {
        for parts in 1..=5 {
            for total in 0..=9 {
                let n = Compositions::new(parts, total).count() as u128;
                assert_eq!(n, composition_count(parts, total), "{parts} {total}");
            }
        }
    }

    #[test]
    fn lexicographic_and_valid() {
        let all: Vec<_> = Compositions::new(3, 4).collect();
        for w in all.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(all.iter().all(|c| c.iter().sum::<u64>() == 4));
    }
}
