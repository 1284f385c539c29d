//! Computational-basis bit convention.
//!
//! Basis states are little-endian: qubit `i` is bit `i` of the basis index.
//! A cleared bit is spin up (`σ_i = +1`, the `+1` eigenvalue of `Z_i`) and a
//! set bit is spin down (`σ_i = −1`). Index `0` is therefore the all-up state
//! and index `2^N − 1` the all-down state. Every module in the crate uses this
//! convention.

/// Spin value `σ_i ∈ {+1, −1}` of `qubit` in basis state `index`.
#[inline]
pub fn spin(index: usize, qubit: usize) -> f64 {
    if (index >> qubit) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Basis index with every spin up.
#[inline]
pub const fn all_up() -> usize {
    0
}

/// Basis index with every spin down.
#[inline]
pub const fn all_down(n: usize) -> usize {
    (1usize << n) - 1
}

/// Build a basis index from spins listed qubit 0 first.
///
/// ```
/// use annealsim::basis;
/// assert_eq!(basis::from_spins(&[1, -1, 1]), 0b010);
/// ```
pub fn from_spins(spins: &[i8]) -> usize {
    spins
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < 0)
        .fold(0, |acc, (q, _)| acc | (1 << q))
}

/// Render a basis index as a `+`/`-` string, qubit 0 first.
pub fn label(index: usize, n: usize) -> String {
    (0..n)
        .map(|q| if spin(index, q) > 0.0 { '+' } else { '-' })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_zero_is_all_up() {
        for q in 0..8 {
            assert_eq!(spin(all_up(), q), 1.0);
            assert_eq!(spin(all_down(8), q), -1.0);
        }
    }

    #[test]
    fn labels_round_trip_through_spins() {
        let idx = from_spins(&[-1, 1, -1, -1]);
        assert_eq!(idx, 0b1101);
        assert_eq!(label(idx, 4), "-+--");
    }
}
