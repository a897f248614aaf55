//! Zadoff-Chu pilot (LTE uplink reference-signal base sequence).

use std::f64::consts::PI;

use crate::{Error, Result, C64};

/// Smallest supported pilot length: three resource blocks of 12 subcarriers.
pub const MIN_ZC_SUBCARRIERS: usize = 36;

fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Largest prime strictly below `n`.
pub fn largest_prime_below(n: usize) -> Option<usize> {
    (2..n).rev().find(|&p| is_prime(p))
}

/// Base sequence of group `u`, sequence `v`, cyclically extended to `len`.
///
/// Root index q = floor(q̄ + 1/2) + v·(-1)^floor(2q̄) with q̄ = N_ZC·(u+1)/31,
/// and x_q(m) = exp(-jπ q m (m+1) / N_ZC).
pub fn zadoff_chu_base(len: usize, group: u32, base: u32) -> Result<Vec<C64>> {
    if len < MIN_ZC_SUBCARRIERS {
        return Err(Error::PilotTooShort { min: MIN_ZC_SUBCARRIERS, actual: len });
    }
    let n_zc = largest_prime_below(len).expect("len >= 36 has a prime below it");
    let q_bar = n_zc as f64 * (group as f64 + 1.0) / 31.0;
    let sign = if (2.0 * q_bar).floor() as i64 % 2 == 0 { 1 } else { -1 };
    let q = (q_bar + 0.5).floor() as i64 + base as i64 * sign;
    let n_zc_i = n_zc as i64;
    Ok((0..len)
        .map(|n| {
            let m = (n % n_zc) as i64;
            // reduce q·m·(m+1) mod 2·N_ZC before converting to a phase
            let k = (q * m * (m + 1)).rem_euclid(2 * n_zc_i);
            C64::from_polar(1.0, -PI * k as f64 / n_zc as f64)
        })
        .collect())
}

/// The first base sequence (group 0, base 0) over `n_occupied` subcarriers.
pub fn zadoff_chu_pilot(n_occupied: usize) -> Result<Vec<C64>> {
    zadoff_chu_base(n_occupied, 0, 0)
}
