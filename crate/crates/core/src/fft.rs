//! Thread-local FFT plan cache.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};


thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn forward(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

pub(crate) fn inverse(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// Swap the two halves so the zero-frequency bin sits at index `len / 2`.
pub(crate) fn fftshift<T: Copy>(buf: &mut [T]) {
    let half = buf.len() / 2;
    buf.rotate_right(half);
}

pub(crate) fn ifftshift<T: Copy>(buf: &mut [T]) {
    let half = buf.len() / 2;
    buf.rotate_left(half);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_centers_dc() {
        let mut v: Vec<i32> = (0..8).collect();
        fftshift(&mut v);
        assert_eq!(v, [4, 5, 6, 7, 0, 1, 2, 3]);
        ifftshift(&mut v);
        assert_eq!(v, (0..8).collect::<Vec<_>>());
        let mut odd: Vec<i32> = (0..5).collect();
        fftshift(&mut odd);
        assert_eq!(odd[2], 0);
        ifftshift(&mut odd);
        assert_eq!(odd, (0..5).collect::<Vec<_>>());
    }
}
