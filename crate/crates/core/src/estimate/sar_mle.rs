//! Gaussian maximum likelihood for SAR autocorrelation parameters.
//!
//! With `A(ρ) = I − ρ₁W − ρ₂Wᵀ` and an intercept `m`, the model is
//! `A(ρ)Z = m·1 + U`, `U ~ N(0, σ²I)`. Profiling out `m` and `σ²` leaves
//!
//! `ℓ(ρ) = log|A(ρ)| − (n/2)·log(σ̂²(ρ)) − (n/2)(log 2π + 1)`,
//!
//! where `σ̂²(ρ)` is the mean squared deviation of `A(ρ)Z` from its mean.

use crate::error::{Error, Result};
use crate::estimate::fit::{FitResult, Term};
use crate::linalg::{Hessenberg, Lu};
use crate::net::{DirectedNetwork, Direction};
use crate::outcome::sar::{sar_operator, spectral_radius_bound, STABILITY_MARGIN};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SarMode {
    /// Forward autocorrelation only (`ρ₂ = 0`).
    OneRho,
    /// Forward and reverse autocorrelation.
    TwoRho,
}

impl std::str::FromStr for SarMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-rho" => Ok(SarMode::OneRho),
            "two-rho" => Ok(SarMode::TwoRho),
            other => Err(Error::Parse(format!("unknown SAR mode `{other}` (one-rho|two-rho)"))),
        }
    }
}

const GRID_POINTS: usize = 20;
const GOLDEN_TOL: f64 = 1e-7;

/// `log|det(I − ρW)|` for many `ρ`. Ordering nodes by strongly connected
/// component makes `I − ρW` block triangular, so only components with a
/// cycle contribute, each through its own Hessenberg form. Acyclic parts
/// are nilpotent and would otherwise poison a global reduction: their zero
/// eigenvalues move far under rounding.
struct ShiftedLogDet<T> {
    blocks: Vec<Hessenberg<T>>,
}

impl<T: Real> ShiftedLogDet<T> {
    fn new(net: &DirectedNetwork<T>) -> Result<Self> {
        let blocks = net
            .strong_components()
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| Hessenberg::reduce(net.dense_block(&c)))
            .collect::<Result<_>>()?;
        Ok(Self { blocks })
    }

    fn at(&self, rho: T) -> (T, T) {
        self.blocks.iter().fold((T::one(), T::zero()), |(s, l), b| {
            let (bs, bl) = b.log_det_shifted(rho);
            (s * bs, l + bl)
        })
    }
}

/// Profile log-likelihood evaluator for one network and one outcome.
pub struct SarLikelihood<'a, T> {
    net: &'a DirectedNetwork<T>,
    z: &'a [T],
    wz: Vec<T>,
    wtz: Vec<T>,
    logdet: ShiftedLogDet<T>,
    /// Spectral radius bound of `W`; `|ρ| < margin / radius` is stable.
    radius: T,
}

impl<'a, T: Real> SarLikelihood<'a, T> {
    pub fn new(net: &'a DirectedNetwork<T>, z: &'a [T]) -> Result<Self> {
        let n = net.node_count();
        if z.len() != n {
            return Err(Error::Dimension { expected: n, got: z.len() });
        }
        if net.edge_count() == 0 {
            return Err(Error::InvalidParameter(
                "autocorrelation is unidentified on a network without edges".into(),
            ));
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("outcome contains non-finite values".into()));
        }
        let wz = net.exposure(z, Direction::Forward)?;
        let wtz = net.exposure(z, Direction::Reverse)?;
        let logdet = ShiftedLogDet::new(net)?;
        let radius = spectral_radius_bound(net, T::one(), T::zero());
        Ok(Self { net, z, wz, wtz, logdet, radius })
    }

    /// Largest stable `|ρ|` in one-rho mode.
    pub fn one_rho_limit(&self) -> T {
        T::lit(STABILITY_MARGIN) / self.radius
    }

    fn profile_rest(&self, rho1: T, rho2: T) -> T {
        let n = T::from_count(self.z.len());
        let r: Vec<T> = (0..self.z.len())
            .map(|i| self.z[i] - rho1 * self.wz[i] - rho2 * self.wtz[i])
            .collect();
        let mean = r.iter().copied().sum::<T>() / n;
        let ss: T = r.iter().map(|&v| (v - mean) * (v - mean)).sum();
        let two_pi = T::lit(2.0 * std::f64::consts::PI);
        -n / T::lit(2.0) * ((ss / n).ln() + two_pi.ln() + T::one())
    }

    pub fn log_likelihood_one(&self, rho: T) -> Result<T> {
        let (sign, logdet) = self.logdet.at(rho);
        if !(sign > T::zero()) || !logdet.is_finite() {
            return Err(Error::Numerical(format!("log-determinant undefined at rho = {rho}")));
        }
        Ok(logdet + self.profile_rest(rho, T::zero()))
    }

    pub fn log_likelihood_two(&self, rho1: T, rho2: T) -> Result<T> {
        let logdet = if rho2 == T::zero() {
            let (sign, l) = self.logdet.at(rho1);
            if !(sign > T::zero()) {
                return Err(Error::Numerical(format!("non-positive determinant at ({rho1}, {rho2})")));
            }
            l
        } else if rho1 == T::zero() {
            // det(I − ρWᵀ) = det(I − ρW)
            let (sign, l) = self.logdet.at(rho2);
            if !(sign > T::zero()) {
                return Err(Error::Numerical(format!("non-positive determinant at ({rho1}, {rho2})")));
            }
            l
        } else {
            let (sign, l) = Lu::factor(sar_operator(self.net, rho1, rho2))?.log_det();
            if !(sign > T::zero()) {
                return Err(Error::Numerical(format!("non-positive determinant at ({rho1}, {rho2})")));
            }
            l
        };
        if !logdet.is_finite() {
            return Err(Error::Numerical(format!("non-finite log-determinant at ({rho1}, {rho2})")));
        }
        Ok(logdet + self.profile_rest(rho1, rho2))
    }

    fn stable(&self, rho1: T, rho2: T) -> bool {
        spectral_radius_bound(self.net, rho1, rho2) < T::lit(STABILITY_MARGIN)
    }

    /// Stable interval for one coordinate with the other held fixed. The
    /// bound grows monotonically in `|ρ|`, so bisection on it is exact up to
    /// tolerance.
    fn coordinate_limit(&self, other: T, first: bool) -> T {
        let ok = |v: T| if first { self.stable(v, other) } else { self.stable(other, v) };
        let (mut lo, mut hi) = (T::zero(), self.one_rho_limit());
        if !ok(lo) {
            return T::zero();
        }
        while ok(hi) {
            hi = hi * T::lit(2.0);
        }
        for _ in 0..50 {
            let mid = (lo + hi) / T::lit(2.0);
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

fn golden_max<T: Real, F: FnMut(T) -> Result<T>>(mut f: F, mut a: T, mut b: T) -> Result<(T, T)> {
    let g = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let tol = T::lit(GOLDEN_TOL);
    for _ in 0..200 {
        if (b - a).abs() < tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let x = (a + b) / T::lit(2.0);
    Ok((x, f(x)?))
}

/// Grid then golden-section search of a 1-D profile on `(-limit, limit)`.
fn maximize_1d<T: Real, F: FnMut(T) -> Result<T>>(mut f: F, limit: T) -> Result<(T, T)> {
    let step = T::lit(2.0) * limit / T::from_count(GRID_POINTS + 1);
    let grid: Vec<T> = (1..=GRID_POINTS).map(|k| -limit + step * T::from_count(k)).collect();
    let mut best = (T::zero(), T::neg_infinity());
    for &g in &grid {
        if let Ok(v) = f(g) {
            if v > best.1 {
                best = (g, v);
            }
        }
    }
    if !best.1.is_finite() {
        return Err(Error::Numerical("log-likelihood undefined on the whole search grid".into()));
    }
    let a = (best.0 - step).max(-limit);
    let b = (best.0 + step).min(limit);
    golden_max(f, a, b)
}

fn near_edge<T: Real>(x: T, limit: T) -> bool {
    (limit - x.abs()) < T::lit(1e-4) * limit
}

/// Curvature-based standard errors from a central-difference Hessian of the
/// profile log-likelihood.
fn hessian_se<T: Real, F: Fn(&[T]) -> Result<T>>(f: F, at: &[T], h: T) -> Result<Vec<T>> {
    let k = at.len();
    let f0 = f(at)?;
    let mut hess = crate::linalg::Matrix::zeros(k, k);
    for a in 0..k {
        let mut p = at.to_vec();
        p[a] = at[a] + h;
        let fp = f(&p)?;
        p[a] = at[a] - h;
        let fm = f(&p)?;
        hess[(a, a)] = (fp - T::lit(2.0) * f0 + fm) / (h * h);
        for b in a + 1..k {
            let mut q = at.to_vec();
            let mut eval = |da: T, db: T| {
                q[a] = at[a] + da;
                q[b] = at[b] + db;
                f(&q)
            };
            let v = (eval(h, h)? - eval(h, -h)? - eval(-h, h)? + eval(-h, -h)?) / (T::lit(4.0) * h * h);
            hess[(a, b)] = v;
            hess[(b, a)] = v;
        }
    }
    for a in 0..k {
        for b in 0..k {
            hess[(a, b)] = -hess[(a, b)];
        }
    }
    let cov = Lu::factor(hess)?.inverse();
    Ok((0..k).map(|j| cov[(j, j)].max(T::zero()).sqrt()).collect())
}

fn gradient_hessian<T: Real, F: Fn(&[T]) -> Result<T>>(f: &F, at: &[T], h: T) -> Result<([T; 2], [T; 4])> {
    let e = |a: T, b: T| f(&[at[0] + a, at[1] + b]);
    let f0 = f(at)?;
    let two = T::lit(2.0);
    let (f10, fm10, f01, f0m1) = (e(h, T::zero())?, e(-h, T::zero())?, e(T::zero(), h)?, e(T::zero(), -h)?);
    let g = [(f10 - fm10) / (two * h), (f01 - f0m1) / (two * h)];
    let h11 = (f10 - two * f0 + fm10) / (h * h);
    let h22 = (f01 - two * f0 + f0m1) / (h * h);
    let h12 = (e(h, h)? - e(h, -h)? - e(-h, h)? + e(-h, -h)?) / (T::lit(4.0) * h * h);
    Ok((g, [h11, h12, h12, h22]))
}

pub fn sar_mle<T: Real>(net: &DirectedNetwork<T>, z: &[T], mode: SarMode) -> Result<FitResult<T>> {
    let lik = SarLikelihood::new(net, z)?;
    let limit = lik.one_rho_limit();
    let h = T::lit(1e-4).max(T::epsilon().cbrt() * T::lit(10.0));
    let mut warnings = Vec::new();
    match mode {
        SarMode::OneRho => {
            let (rho, ll) = maximize_1d(|r| lik.log_likelihood_one(r), limit)?;
            if near_edge(rho, limit) {
                warnings.push(format!("rho estimate {rho} is on the stability boundary ±{limit}"));
            }
            let hh = h.min((limit - rho.abs()) / T::lit(2.0));
            let se = hessian_se(|p| lik.log_likelihood_one(p[0]), &[rho], hh)?;
            Ok(FitResult {
                terms: vec![Term { name: "rho".into(), estimate: rho, std_error: se[0] }],
                converged: true,
                iterations: 1,
                log_likelihood: Some(ll),
                ridge_penalty: None,
                warnings,
            })
        }
        SarMode::TwoRho => {
            // 20-point grids along each axis, then coordinate-wise golden search
            let (mut r1, _) = maximize_1d(|r| lik.log_likelihood_two(r, T::zero()), limit)?;
            let (mut r2, _) = maximize_1d(
                |r| lik.log_likelihood_two(r1, r),
                lik.coordinate_limit(r1, false),
            )?;
            let mut ll = lik.log_likelihood_two(r1, r2)?;
            for _ in 0..5 {
                let (n1, _) = maximize_1d(|r| lik.log_likelihood_two(r, r2), lik.coordinate_limit(r2, true))?;
                let (n2, l2) =
                    maximize_1d(|r| lik.log_likelihood_two(n1, r), lik.coordinate_limit(n1, false))?;
                if l2 >= ll {
                    r1 = n1;
                    r2 = n2;
                    ll = l2;
                }
            }
            // damped Newton on the joint profile, which handles the ridge
            // that coordinate search crawls along when W and Wᵀ overlap
            let f = |p: &[T]| lik.log_likelihood_two(p[0], p[1]);
            let mut iterations = 0;
            let mut converged = false;
            for it in 0..100 {
                iterations = it + 1;
                let hh = h.min(lik.coordinate_limit(r2, true) - r1.abs()).min(lik.coordinate_limit(r1, false) - r2.abs())
                    / T::lit(2.0);
                if hh <= T::zero() {
                    break;
                }
                let (g, hess) = gradient_hessian(&f, &[r1, r2], hh)?;
                let det = hess[0] * hess[3] - hess[1] * hess[2];
                // ascent direction: Newton when the Hessian is negative definite
                let (d1, d2) = if hess[0] < T::zero() && det > T::zero() {
                    ((-hess[3] * g[0] + hess[1] * g[1]) / det, (hess[2] * g[0] - hess[0] * g[1]) / det)
                } else {
                    (g[0] * T::lit(1e-3), g[1] * T::lit(1e-3))
                };
                let mut t = T::one();
                let mut stepped = false;
                for _ in 0..40 {
                    let (c1, c2) = (r1 + t * d1, r2 + t * d2);
                    if lik.stable(c1, c2) {
                        if let Ok(v) = lik.log_likelihood_two(c1, c2) {
                            if v >= ll {
                                let moved = (c1 - r1).abs().max((c2 - r2).abs());
                                r1 = c1;
                                r2 = c2;
                                ll = v;
                                stepped = moved >= T::lit(1e-8);
                                break;
                            }
                        }
                    }
                    t = t / T::lit(2.0);
                }
                let gnorm = g[0].abs().max(g[1].abs());
                if !stepped || gnorm < T::lit(1e-6) * T::from_count(z.len()).sqrt() {
                    converged = gnorm < T::lit(1e-3) * T::from_count(z.len()).sqrt();
                    break;
                }
            }
            let l1 = lik.coordinate_limit(r2, true);
            let l2 = lik.coordinate_limit(r1, false);
            if near_edge(r1, l1) || near_edge(r2, l2) {
                warnings.push(format!("estimate ({r1}, {r2}) is on the stability boundary"));
            }
            let hh = h.min((l1 - r1.abs()).min(l2 - r2.abs()) / T::lit(2.0));
            let se = hessian_se(|p| lik.log_likelihood_two(p[0], p[1]), &[r1, r2], hh)?;
            Ok(FitResult {
                terms: vec![
                    Term { name: "rho1".into(), estimate: r1, std_error: se[0] },
                    Term { name: "rho2".into(), estimate: r2, std_error: se[1] },
                ],
                converged,
                iterations,
                log_likelihood: Some(ll),
                ridge_penalty: None,
                warnings,
            })
        }
    }
}
