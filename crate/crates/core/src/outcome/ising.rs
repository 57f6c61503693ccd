//! Network Ising model over binary node states.
//!
//! Node energy `E(i) = α·Y_i + β·Σ_j W_ij (Y_i − Y_j)² + γ·Σ_j W_ij Y_i Y_j`
//! and `P(Y) ∝ exp(Σ_i E(i))`, with the positive sign kept as written (the
//! physics convention `exp(−E)` is recovered by negating the parameters).
//! A mutual tie contributes its pair terms twice, a one-way tie once.

use rand::Rng;

use crate::error::{Error, Result};
use crate::net::DirectedNetwork;
use crate::scalar::{logistic, Real};

/// Largest network the exact enumeration accepts.
pub const MAX_EXACT_NODES: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsingParams<T> {
    /// Individual-trait energy.
    pub alpha: T,
    /// Disagreement energy.
    pub beta: T,
    /// Joint-positive energy.
    pub gamma: T,
}

impl<T: Real> IsingParams<T> {
    pub fn new(alpha: T, beta: T, gamma: T) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::InvalidParameter("Ising parameters must be finite".into()));
        }
        Ok(Self { alpha, beta, gamma })
    }
}

fn check_state<T: Real>(net: &DirectedNetwork<T>, y: &[u8]) -> Result<()> {
    if y.len() != net.node_count() {
        return Err(Error::Dimension { expected: net.node_count(), got: y.len() });
    }
    if y.iter().any(|&v| v > 1) {
        return Err(Error::InvalidParameter("binary state must contain only 0 and 1".into()));
    }
    Ok(())
}

pub fn node_energy<T: Real>(
    net: &DirectedNetwork<T>,
    y: &[u8],
    params: &IsingParams<T>,
    i: usize,
) -> Result<T> {
    check_state(net, y)?;
    Ok(node_energy_unchecked(net, y, params, i))
}

fn node_energy_unchecked<T: Real>(
    net: &DirectedNetwork<T>,
    y: &[u8],
    params: &IsingParams<T>,
    i: usize,
) -> T {
    let yi = T::from_count(y[i] as usize);
    let mut e = params.alpha * yi;
    for edge in net.out_edges(i) {
        let yj = T::from_count(y[edge.dst] as usize);
        let diff = yi - yj;
        e += params.beta * edge.weight * diff * diff + params.gamma * edge.weight * yi * yj;
    }
    e
}

pub fn total_energy<T: Real>(
    net: &DirectedNetwork<T>,
    y: &[u8],
    params: &IsingParams<T>,
) -> Result<T> {
    check_state(net, y)?;
    Ok((0..net.node_count()).map(|i| node_energy_unchecked(net, y, params, i)).sum())
}

/// Exact Gibbs distribution by enumeration. Entry `k` is the probability of
/// the state whose node `i` equals bit `i` of `k`.
pub fn exact_distribution<T: Real>(
    net: &DirectedNetwork<T>,
    params: &IsingParams<T>,
) -> Result<Vec<T>> {
    let n = net.node_count();
    if n > MAX_EXACT_NODES {
        return Err(Error::TooLarge { n, limit: MAX_EXACT_NODES });
    }
    let mut y = vec![0u8; n];
    let log_w: Vec<T> = (0..1usize << n)
        .map(|k| {
            for (i, v) in y.iter_mut().enumerate() {
                *v = ((k >> i) & 1) as u8;
            }
            (0..n).map(|i| node_energy_unchecked(net, &y, params, i)).sum()
        })
        .collect();
    let top = log_w.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
    let w: Vec<T> = log_w.iter().map(|&v| (v - top).exp()).collect();
    let z: T = w.iter().copied().sum();
    Ok(w.into_iter().map(|v| v / z).collect())
}

pub fn state_index(y: &[u8]) -> usize {
    y.iter().enumerate().fold(0, |k, (i, &v)| k | ((v as usize) << i))
}

/// Single-site Gibbs sampler with sequential sweeps in node order.
#[derive(Debug, Clone)]
pub struct GibbsSampler<T> {
    params: IsingParams<T>,
    neighbors: Vec<Vec<(usize, T)>>,
}

impl<T: Real> GibbsSampler<T> {
    pub fn new(net: &DirectedNetwork<T>, params: IsingParams<T>) -> Self {
        Self { params, neighbors: net.undirected_neighbors() }
    }

    /// `E_total(Y_i = 1) − E_total(Y_i = 0)` with the rest of `y` fixed.
    ///
    /// Only node `i`'s own energy and the energies of nodes tied to `i`
    /// change, giving `α + Σ_j (W_ij + W_ji) (β (1 − 2Y_j) + γ Y_j)`.
    pub fn energy_gap(&self, y: &[u8], i: usize) -> T {
        let p = &self.params;
        let two = T::lit(2.0);
        self.neighbors[i].iter().fold(p.alpha, |acc, &(j, w)| {
            let yj = T::from_count(y[j] as usize);
            acc + w * (p.beta * (T::one() - two * yj) + p.gamma * yj)
        })
    }

    pub fn sweep<R: Rng + ?Sized>(&self, y: &mut [u8], rng: &mut R) {
        for i in 0..y.len() {
            let p1 = logistic(self.energy_gap(y, i)).as_f64();
            y[i] = u8::from(rng.random::<f64>() < p1);
        }
    }

    pub fn random_state<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u8> {
        (0..self.neighbors.len()).map(|_| u8::from(rng.random::<bool>())).collect()
    }
}

/// Draw one configuration: uniform random start, then `sweeps` full sweeps.
pub fn gibbs_sample<T: Real, R: Rng + ?Sized>(
    net: &DirectedNetwork<T>,
    params: IsingParams<T>,
    sweeps: usize,
    rng: &mut R,
) -> Result<Vec<u8>> {
    if sweeps == 0 {
        return Err(Error::InvalidParameter("at least one Gibbs sweep is required".into()));
    }
    let sampler = GibbsSampler::new(net, params);
    let mut y = sampler.random_state(rng);
    for _ in 0..sweeps {
        sampler.sweep(&mut y, rng);
    }
    Ok(y)
}

/// Empirical state histogram (normalized) from one chain: `burn_in` sweeps,
/// then `samples` states kept every `thin` sweeps. Small networks only.
pub fn gibbs_histogram<T: Real, R: Rng + ?Sized>(
    net: &DirectedNetwork<T>,
    params: IsingParams<T>,
    burn_in: usize,
    samples: usize,
    thin: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let n = net.node_count();
    if n > MAX_EXACT_NODES {
        return Err(Error::TooLarge { n, limit: MAX_EXACT_NODES });
    }
    let sampler = GibbsSampler::new(net, params);
    let mut y = sampler.random_state(rng);
    for _ in 0..burn_in {
        sampler.sweep(&mut y, rng);
    }
    let mut counts = vec![0usize; 1 << n];
    for _ in 0..samples {
        for _ in 0..thin.max(1) {
            sampler.sweep(&mut y, rng);
        }
        counts[state_index(&y)] += 1;
    }
    Ok(counts.into_iter().map(|c| c as f64 / samples as f64).collect())
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
