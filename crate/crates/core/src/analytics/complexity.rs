use num_bigint::BigUint;

use super::AnalyticsError;

/// Board-level complexity figures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexityReport {
    pub board_size: usize,
    /// `2^⌊N²/8⌋`.
    pub max_ais: BigUint,
    /// `3^(N²)`.
    pub info_set_count: BigUint,
    /// Placements available on the empty board, `C(N², 2)`.
    pub branching: u64,
}

pub fn max_ais_exponent(n: usize) -> u64 {
    (n * n / 8) as u64
}

/// `(2^⌊N²/8⌋, 3^(N²))`.
pub fn ais_bounds(n: usize) -> Result<(BigUint, BigUint), AnalyticsError> {
    if n < 2 {
        return Err(AnalyticsError::BoardSize(n));
    }
    let max_ais = BigUint::from(1u8) << max_ais_exponent(n);
    let info_sets = BigUint::from(3u8).pow((n * n) as u32);
    Ok((max_ais, info_sets))
}

/// `C(free_cells, 2)`.
pub fn quantum_branching(free_cells: u64) -> u64 {
    if free_cells < 2 {
        0
    } else if free_cells % 2 == 0 {
        (free_cells / 2) * (free_cells - 1)
    } else {
        free_cells * ((free_cells - 1) / 2)
    }
}

pub fn complexity_report(n: usize) -> Result<ComplexityReport, AnalyticsError> {
    let (max_ais, info_set_count) = ais_bounds(n)?;
    Ok(ComplexityReport {
        board_size: n,
        max_ais,
        info_set_count,
        branching: quantum_branching((n * n) as u64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pow(base: u32, exp: u32) -> BigUint {
        (0..exp).fold(BigUint::from(1u8), |acc, _| acc * base)
    }

    #[test]
    fn bounds_examples() {
        let (m, i) = ais_bounds(19).unwrap();
        assert_eq!(m, pow(2, 45));
        assert_eq!(i, pow(3, 361));
        assert_eq!(ais_bounds(2).unwrap().0, BigUint::from(1u8));
        let m36 = ais_bounds(36).unwrap().0;
        assert_eq!(m36, pow(2, 162));
        assert_eq!(m36.to_string().len(), 49);
        assert!(ais_bounds(1).is_err());
    }

    #[test]
    fn branching_examples() {
        assert_eq!(quantum_branching(9), 36);
        assert_eq!(quantum_branching(2), 1);
        assert_eq!(quantum_branching(361), 64_980);
        assert_eq!(quantum_branching(1), 0);
        assert_eq!(quantum_branching(0), 0);
    }

    proptest! {
        #[test]
        fn branching_counts_pairs(n in 0u64..3000) {
            let mut pairs = 0u64;
            for a in 0..n {
                pairs += n - 1 - a;
            }
            prop_assert_eq!(quantum_branching(n), pairs);
        }

        #[test]
        fn bound_exponent_is_floor(n in 2usize..60) {
            let (m, _) = ais_bounds(n).unwrap();
            prop_assert_eq!(m.bits() - 1, (n * n / 8) as u64);
            prop_assert_eq!(m.count_ones(), 1);
        }
    }
}
