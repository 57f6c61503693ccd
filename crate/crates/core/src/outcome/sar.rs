//! Simultaneous autoregressive (SAR) outcomes with forward and reverse
//! autocorrelation: `Z = ρ₁·W·Z + ρ₂·Wᵀ·Z + U`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::net::{DirectedNetwork, Direction};
use crate::scalar::Real;

/// Spectral radius bound that generation and estimation stay below.
pub const STABILITY_MARGIN: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SarParams<T> {
    /// Autocorrelation with the alters an ego names.
    pub rho1: T,
    /// Autocorrelation with the alters who name the ego.
    pub rho2: T,
    /// Standard deviation of the iid Gaussian disturbances.
    pub noise_sd: T,
}

impl<T: Real> SarParams<T> {
    pub fn new(rho1: T, rho2: T, noise_sd: T) -> Self {
        Self { rho1, rho2, noise_sd }
    }
}

/// One SAR draw together with the disturbance that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SarDraw<T> {
    pub z: Vec<T>,
    pub noise: Vec<T>,
}

/// Upper bound on the spectral radius of `ρ₁W + ρ₂Wᵀ`.
///
/// Power iteration on the nonnegative matrix `A = |ρ₁|W + |ρ₂|Wᵀ`, shifted by
/// the identity so the iterate stays strictly positive. For any positive `x`,
/// `max_i (Ax)_i / x_i` bounds the Perron root of `A` from above
/// (Collatz–Wielandt), and that root dominates the spectral radius of the
/// signed combination.
pub fn spectral_radius_bound<T: Real>(net: &DirectedNetwork<T>, rho1: T, rho2: T) -> T {
    let n = net.node_count();
    let (a, b) = (rho1.abs(), rho2.abs());
    let apply = |x: &[T]| -> Vec<T> {
        let mut out = vec![T::zero(); n];
        for e in net.edges() {
            out[e.src] += a * e.weight * x[e.dst];
            out[e.dst] += b * e.weight * x[e.src];
        }
        out
    };
    let mut x = vec![T::one(); n];
    let mut best = T::infinity();
    let tol = T::lit(1e-9);
    for _ in 0..2000 {
        let ax = apply(&x);
        let (mut lo, mut hi) = (T::infinity(), T::zero());
        for (v, xi) in ax.iter().zip(&x) {
            let r = *v / *xi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        best = best.min(hi);
        if best - lo <= tol * (T::one() + best) {
            break;
        }
        let mut next: Vec<T> = ax.iter().zip(&x).map(|(&v, &xi)| v + xi).collect();
        let scale = next.iter().fold(T::zero(), |m, &v| m.max(v));
        next.iter_mut().for_each(|v| *v /= scale);
        x = next;
    }
    best
}

pub fn check_stability<T: Real>(net: &DirectedNetwork<T>, rho1: T, rho2: T) -> Result<T> {
    let radius = spectral_radius_bound(net, rho1, rho2);
    if radius >= T::lit(STABILITY_MARGIN) {
        return Err(Error::Unstable { radius: radius.as_f64(), limit: STABILITY_MARGIN });
    }
    Ok(radius)
}

/// `I − ρ₁W − ρ₂Wᵀ`.
pub fn sar_operator<T: Real>(net: &DirectedNetwork<T>, rho1: T, rho2: T) -> Matrix<T> {
    let mut m = net.dense_combination(-rho1, -rho2);
    for i in 0..net.node_count() {
        m[(i, i)] += T::one();
    }
    m
}

/// A factored SAR system for drawing many outcomes on one network.
#[derive(Debug, Clone)]
pub struct SarSystem<T> {
    params: SarParams<T>,
    n: usize,
    lu: Lu<T>,
}

impl<T: Real> SarSystem<T> {
    pub fn new(net: &DirectedNetwork<T>, params: SarParams<T>) -> Result<Self> {
        if !(params.noise_sd > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "noise_sd must be positive, got {}",
                params.noise_sd
            )));
        }
        check_stability(net, params.rho1, params.rho2)?;
        let lu = Lu::factor(sar_operator(net, params.rho1, params.rho2))?;
        Ok(Self { params, n: net.node_count(), lu })
    }

    pub fn params(&self) -> SarParams<T> {
        self.params
    }

    /// Solve `(I − ρ₁W − ρ₂Wᵀ) Z = U` for a given disturbance.
    pub fn solve(&self, noise: &[T]) -> Result<Vec<T>> {
        if noise.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: noise.len() });
        }
        let z = self.lu.solve(noise);
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite SAR solution".into()));
        }
        Ok(z)
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SarDraw<T>> {
        let noise = gaussian_vector(self.n, self.params.noise_sd, rng);
        let z = self.solve(&noise)?;
        Ok(SarDraw { z, noise })
    }
}

pub fn gaussian_vector<T: Real, R: Rng + ?Sized>(n: usize, sd: T, rng: &mut R) -> Vec<T> {
    (0..n)
        .map(|_| sd * T::lit(rng.sample::<f64, _>(StandardNormal)))
        .collect()
}

/// Draw a continuous SAR outcome on `net`.
pub fn sar_generate<T: Real, R: Rng + ?Sized>(
    net: &DirectedNetwork<T>,
    params: SarParams<T>,
    rng: &mut R,
) -> Result<Vec<T>> {
    Ok(SarSystem::new(net, params)?.draw(rng)?.z)
}

/// `‖Z − ρ₁WZ − ρ₂WᵀZ − U‖∞`.
pub fn sar_residual<T: Real>(
    net: &DirectedNetwork<T>,
    rho1: T,
    rho2: T,
    z: &[T],
    noise: &[T],
) -> Result<T> {
    let fwd = net.exposure(z, Direction::Forward)?;
    let rev = net.exposure(z, Direction::Reverse)?;
    Ok((0..z.len()).fold(T::zero(), |m, i| {
        m.max((z[i] - rho1 * fwd[i] - rho2 * rev[i] - noise[i]).abs())
    }))
}

/// Truncated Neumann series `Σ_{k=0}^{order} (ρ₁W + ρ₂Wᵀ)^k u`.
pub fn sar_power_series<T: Real>(
    net: &DirectedNetwork<T>,
    params: SarParams<T>,
    u: &[T],
    order: usize,
) -> Result<Vec<T>> {
    if u.len() != net.node_count() {
        return Err(Error::Dimension { expected: net.node_count(), got: u.len() });
    }
    let mut term = u.to_vec();
    let mut acc = u.to_vec();
    for _ in 0..order {
        let f = net.exposure(&term, Direction::Forward)?;
        let r = net.exposure(&term, Direction::Reverse)?;
        for i in 0..term.len() {
            term[i] = params.rho1 * f[i] + params.rho2 * r[i];
            acc[i] += term[i];
        }
    }
    Ok(acc)
}

/// Bound on `‖Z − series(order)‖∞` from the geometric tail
/// `Σ_{k>order} q^k ‖u‖∞ = q^{order+1}/(1−q) ‖u‖∞`, where `q` is the
/// induced ∞-norm of `ρ₁W + ρ₂Wᵀ` (a bound that requires `q < 1`).
pub fn power_series_tail_bound<T: Real>(
    net: &DirectedNetwork<T>,
    params: SarParams<T>,
    u: &[T],
    order: usize,
) -> Option<T> {
    let n = net.node_count();
    let mut rows = vec![T::zero(); n];
    for e in net.edges() {
        rows[e.src] += params.rho1.abs() * e.weight;
        rows[e.dst] += params.rho2.abs() * e.weight;
    }
    let q = rows.into_iter().fold(T::zero(), T::max);
    if q >= T::one() {
        return None;
    }
    let unorm = u.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    Some(q.powi(order as i32 + 1) / (T::one() - q) * unorm)
}
