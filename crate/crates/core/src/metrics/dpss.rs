//! Discrete prolate spheroidal (Slepian) sequences.
//!
//! The tapers are the eigenvectors of the symmetric tridiagonal matrix that
//! commutes with the time-frequency concentration operator. The K largest
//! eigenvalues are isolated by Sturm-sequence bisection and the vectors are
//! recovered by inverse iteration, O(N·K) overall.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// `k` unit-energy Slepian tapers of length `n` with time-bandwidth `nw`,
/// ordered by decreasing concentration.
pub fn dpss(n: usize, nw: f64, k: usize) -> Vec<Vec<f64>> {
    assert!(n >= 2 && k >= 1 && k <= n, "invalid taper request n={n} k={k}");
    let w = nw / n as f64;
    let cos_w = (2.0 * PI * w).cos();
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            let c = (n as f64 - 1.0 - 2.0 * i as f64) / 2.0;
            c * c * cos_w
        })
        .collect();
    // off[i] couples rows i and i + 1
    let off: Vec<f64> = (1..n).map(|i| i as f64 * (n - i) as f64 / 2.0).collect();

    let bound = diag.iter().map(|d| d.abs()).fold(0.0, f64::max) + 2.0 * off.iter().fold(0.0f64, |a, &b| a.max(b));
    (0..k)
        .map(|j| {
            let lambda = kth_eigenvalue(&diag, &off, n - 1 - j, -bound, bound);
            let mut v = inverse_iteration(&diag, &off, lambda, j);
            fix_sign(&mut v, j);
            v
        })
        .collect()
}

/// Process-wide cache of the NW = 4, K = 7 tapers used by the PSD estimator.
pub(crate) fn cached(n: usize, nw: f64, k: usize) -> Arc<Vec<Vec<f64>>> {
    type Key = (usize, u64, usize);
    type Tapers = Arc<Vec<Vec<f64>>>;
    static CACHE: OnceLock<Mutex<HashMap<Key, Tapers>>> = OnceLock::new();
    let key = (n, nw.to_bits(), k);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return Arc::clone(t);
    }
    let tapers = Arc::new(dpss(n, nw, k));
    cache.lock().unwrap().entry(key).or_insert(tapers).clone()
}

/// Number of eigenvalues strictly below `x` (Sturm count).
fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let prev = if q == 0.0 { f64::EPSILON * off[i - 1].abs().max(1.0) } else { q };
        q = diag[i] - x - off[i - 1] * off[i - 1] / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalue with ascending index `idx`.
fn kth_eigenvalue(diag: &[f64], off: &[f64], idx: usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(diag, off, mid) > idx {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn inverse_iteration(diag: &[f64], off: &[f64], lambda: f64, seed: usize) -> Vec<f64> {
    let n = diag.len();
    let shift = lambda + lambda.abs().max(1.0) * 1e-13;
    let shifted: Vec<f64> = diag.iter().map(|d| d - shift).collect();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i * (seed + 3)) % 7) as f64).collect();
    for _ in 0..4 {
        v = solve_tridiagonal(&shifted, off, &v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

/// Solve a symmetric tridiagonal system by Gaussian elimination with partial
/// pivoting.
fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    // row i holds a[i] (diagonal), b[i] (first super), c[i] (second super)
    let mut a = diag.to_vec();
    let mut b: Vec<f64> = off.to_vec();
    b.push(0.0);
    let mut c = vec![0.0; n];
    let mut sub: Vec<f64> = off.to_vec();
    let mut x = rhs.to_vec();
    let tiny = f64::MIN_POSITIVE.sqrt();
    for i in 0..n - 1 {
        if sub[i].abs() > a[i].abs() {
            // swap rows i and i+1
            std::mem::swap(&mut a[i], &mut sub[i]);
            let (bi, ai1) = (b[i], a[i + 1]);
            b[i] = ai1;
            a[i + 1] = bi;
            let (ci, bi1) = (c[i], b[i + 1]);
            c[i] = bi1;
            b[i + 1] = ci;
            x.swap(i, i + 1);
        }
        if a[i].abs() < tiny {
            a[i] = tiny;
        }
        let m = sub[i] / a[i];
        a[i + 1] -= m * b[i];
        b[i + 1] -= m * c[i];
        x[i + 1] -= m * x[i];
    }
    if a[n - 1].abs() < tiny {
        a[n - 1] = tiny;
    }
    x[n - 1] /= a[n - 1];
    if n >= 2 {
        x[n - 2] = (x[n - 2] - b[n - 2] * x[n - 1]) / a[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - b[i] * x[i + 1] - c[i] * x[i + 2]) / a[i];
    }
    x
}

/// Symmetric tapers get a positive sum; antisymmetric ones a positive first
/// significant lobe.
fn fix_sign(v: &mut [f64], order: usize) {
    let flip = if order.is_multiple_of(2) {
        v.iter().sum::<f64>() < 0.0
    } else {
        let thresh = (1.0 / v.len() as f64).max(1e-7);
        v.iter().find(|x| *x * *x > thresh).is_some_and(|x| *x < 0.0)
    };
    if flip {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}
