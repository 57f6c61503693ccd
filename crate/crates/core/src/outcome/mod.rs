//! Generative models for node outcomes.

pub mod ising;
pub mod panel;
pub mod sar;

use crate::scalar::Real;

/// `Y_i = 1` iff `z_i > threshold`.
pub fn dichotomize<T: Real>(z: &[T], threshold: T) -> Vec<u8> {
    z.iter().map(|&v| u8::from(v > threshold)).collect()
}

pub fn binary_to_real<T: Real>(y: &[u8]) -> Vec<T> {
    y.iter().map(|&v| if v == 0 { T::zero() } else { T::one() }).collect()
}
