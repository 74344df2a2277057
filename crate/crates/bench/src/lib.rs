//! Shared inputs for the criterion benches.

use metabel_core::{GroupWord, Letter, PackingInstance, SphericalEquation};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// A reproducible random word, not necessarily reduced.
pub fn random_word(seed: u64, rank: usize, len: usize) -> GroupWord {
    let mut rng = StdRng::seed_from_u64(seed);
    let letters = (0..len)
        .map(|_| Letter { gen: rng.gen_range(1..=rank), inverse: rng.gen_bool(0.5) })
        .collect();
    GroupWord::new(rank, letters).expect("generators in range")
}

/// Packing instances of increasing size, solvable and not.
pub fn packing_cases() -> Vec<(&'static str, PackingInstance)> {
    let cases: [(&str, &[u64]); 5] = [
        ("2x2x2x2", &[2, 2, 2, 2]),
        ("3,4", &[3, 4]),
        ("4,2,2,2,2,2", &[4, 2, 2, 2, 2, 2]),
        ("3,2,2,2,1x4", &[3, 2, 2, 2, 1, 1, 1, 1]),
        ("4,3,3,2,1x11", &[4, 3, 3, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]),
    ];
    cases.iter().map(|(name, sides)| (*name, PackingInstance::new(sides).expect("perfect square"))).collect()
}

/// `m` random constants of length `len` in rank 2.
pub fn random_equation(seed: u64, m: usize, len: usize) -> SphericalEquation {
    let constants = (0..m).map(|i| random_word(seed.wrapping_add(i as u64), 2, len)).collect();
    SphericalEquation::new(2, constants).expect("nonempty")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs_are_reproducible() {
        assert_eq!(random_word(3, 4, 50), random_word(3, 4, 50));
        assert_eq!(random_word(3, 4, 50).len(), 50);
        assert_eq!(packing_cases().len(), 5);
        assert_eq!(random_equation(1, 3, 4).len(), 3);
    }
}
