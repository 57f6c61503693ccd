use contagion::estimate::logistic::fitted_probabilities;
use contagion::estimate::qad::{qad_design, qad_fit, Family};
use contagion::estimate::fit_logistic;
use contagion::linalg::{max_abs_diff, norm2};
use contagion::outcome::ising::{total_energy, IsingParams};
use contagion::outcome::sar::{sar_generate, SarParams};
use contagion::outcome::{binary_to_real, dichotomize};
use contagion::rng::{seeded, substream};
use contagion::{make_regular_network, Direction, Network};
use proptest::prelude::*;
use rand::Rng;

fn arb_network() -> impl Strategy<Value = Network> {
    (3usize..30, 1usize..4, any::<u64>()).prop_map(|(n, d, seed)| {
        let d = d.min(n - 1);
        make_regular_network(n, d, &mut seeded(seed)).unwrap()
    })
}

fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeded(seed);
    (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()
}

fn assert_simple(net: &Network) {
    let mut seen = std::collections::BTreeSet::new();
    for e in net.edges() {
        assert_ne!(e.src, e.dst);
        assert!(seen.insert((e.src, e.dst)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn receiver_rewiring_keeps_outdegrees(net in arb_network(), frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let k = (frac * net.edge_count() as f64) as usize;
        let r = net.rewire_receivers(k, &mut seeded(seed)).unwrap();
        prop_assert_eq!(r.network.outdegrees(), net.outdegrees());
        prop_assert_eq!(r.network.edge_count(), net.edge_count());
        prop_assert!(r.failed <= k);
        assert_simple(&r.network);
    }

    #[test]
    fn sender_rewiring_keeps_indegrees(net in arb_network(), frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let k = (frac * net.edge_count() as f64) as usize;
        let r = net.rewire_senders(k, &mut seeded(seed)).unwrap();
        prop_assert_eq!(r.network.indegrees(), net.indegrees());
        prop_assert_eq!(r.network.edge_count(), net.edge_count());
        assert_simple(&r.network);
    }

    #[test]
    fn exposure_is_linear(net in arb_network(), a in -3.0f64..3.0, b in -3.0f64..3.0, seed in any::<u64>()) {
        let n = net.node_count();
        let (y1, y2) = (random_vector(n, seed), random_vector(n, seed ^ 1));
        let mix: Vec<f64> = y1.iter().zip(&y2).map(|(p, q)| a * p + b * q).collect();
        for dir in [Direction::Forward, Direction::Reverse] {
            let lhs = net.exposure(&mix, dir).unwrap();
            let e1 = net.exposure(&y1, dir).unwrap();
            let e2 = net.exposure(&y2, dir).unwrap();
            let rhs: Vec<f64> = e1.iter().zip(&e2).map(|(p, q)| a * p + b * q).collect();
            prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
        }
    }

    #[test]
    fn reverse_exposure_is_forward_on_transpose(net in arb_network(), seed in any::<u64>()) {
        let y = random_vector(net.node_count(), seed);
        prop_assert_eq!(net.exposure(&y, Direction::Reverse).unwrap(), net.transpose().exposure(&y, Direction::Forward).unwrap());
        prop_assert_eq!(net.transpose().transpose(), net.clone());
        prop_assert_eq!(net.transpose().indegrees(), net.outdegrees());
    }

    #[test]
    fn generation_is_deterministic(n in 3usize..60, d in 1usize..3, seed in any::<u64>()) {
        let d = d.min(n - 1);
        let a: Network = make_regular_network(n, d, &mut seeded(seed)).unwrap();
        let b: Network = make_regular_network(n, d, &mut seeded(seed)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.indegrees().iter().all(|&k| k == d));
        prop_assert!(a.outdegrees().iter().all(|&k| k == d));
        let ra = a.rewire_receivers(n / 2, &mut seeded(seed ^ 7)).unwrap();
        let rb = b.rewire_receivers(n / 2, &mut seeded(seed ^ 7)).unwrap();
        prop_assert_eq!(ra, rb);
    }

    #[test]
    fn ising_energy_ignores_direction(net in arb_network(), seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let y: Vec<u8> = (0..net.node_count()).map(|_| rng.random_range(0..2)).collect();
        let p = IsingParams::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)).unwrap();
        let (e, et) = (total_energy(&net, &y, &p).unwrap(), total_energy(&net.transpose(), &y, &p).unwrap());
        prop_assert!((e - et).abs() < 1e-12);
    }
}

fn rewired(n: usize, seed: u64) -> Network {
    let base: Network = make_regular_network(n, 1, &mut seeded(seed)).unwrap();
    let r = base.rewire_receivers(n / 2, &mut seeded(seed + 1)).unwrap().network;
    r.rewire_senders(n / 10, &mut seeded(seed + 2)).unwrap().network
}

#[test]
fn transposed_network_swaps_qad_coefficients() {
    let net = rewired(200, 1);
    for (k, family) in [Family::Linear, Family::Logistic].into_iter().enumerate() {
        let z = sar_generate(&net, SarParams::new(0.4, 0.0, 1.0), &mut seeded(10 + k as u64)).unwrap();
        let y = match family {
            Family::Linear => z,
            Family::Logistic => binary_to_real(&dichotomize(&z, 0.0)),
        };
        let a = qad_fit(&net, &y, family).unwrap();
        let b = qad_fit(&net.transpose(), &y, family).unwrap();
        assert!((a.forward - b.reverse).abs() < 1e-9, "{family:?}");
        assert!((a.reverse - b.forward).abs() < 1e-9, "{family:?}");
        assert!((a.difference + b.difference).abs() < 1e-9, "{family:?}");
        assert_eq!(a.difference, a.forward - a.reverse);
    }
}

#[test]
fn linear_qad_slopes_are_scale_free() {
    // Exposures scale with y, so the slopes do not; the sign of the
    // difference is unchanged for every positive factor.
    let net = rewired(200, 4);
    let z = sar_generate(&net, SarParams::new(0.4, 0.0, 1.0), &mut seeded(5)).unwrap();
    let base = qad_fit(&net, &z, Family::Linear).unwrap();
    for c in [0.01, 0.5, 3.0, 250.0] {
        let zc: Vec<f64> = z.iter().map(|v| c * v).collect();
        let q = qad_fit(&net, &zc, Family::Linear).unwrap();
        assert!((q.forward - base.forward).abs() < 1e-9);
        assert!((q.reverse - base.reverse).abs() < 1e-9);
        assert_eq!(q.difference.signum(), base.difference.signum());
        assert!((q.fit.estimate("intercept").unwrap() - c * base.fit.estimate("intercept").unwrap()).abs() < 1e-9 * c.max(1.0));
    }
}

#[test]
fn converged_logistic_fits_solve_the_score_equations() {
    let net = rewired(300, 7);
    for seed in 0..10 {
        let z = sar_generate(&net, SarParams::new(0.2, 0.2, 1.0), &mut seeded(100 + seed)).unwrap();
        let y = dichotomize(&z, 0.0);
        let design = qad_design(&net, &binary_to_real(&y)).unwrap();
        let fit = fit_logistic(&design, &y).unwrap();
        assert!(fit.converged);
        let p = fitted_probabilities(&design, &fit);
        let score: Vec<f64> = (0..design.cols())
            .map(|j| (0..design.rows()).map(|i| design.x[(i, j)] * (y[i] as f64 - p[i])).sum())
            .collect();
        assert!(norm2(&score) < 1e-6, "{score:?}");
    }
}

#[test]
fn symmetric_process_difference_is_centred() {
    let net = rewired(200, 11);
    let reps = 500;
    let positive = (0..reps)
        .filter(|&r| {
            let z = sar_generate(&net, SarParams::new(0.2, 0.2, 1.0), &mut substream(12, &[r])).unwrap();
            qad_fit(&net, &z, Family::Linear).unwrap().difference > 0.0
        })
        .count();
    let frac = positive as f64 / reps as f64;
    let band = 3.0 * (0.25 / reps as f64).sqrt();
    assert!((frac - 0.5).abs() < band, "{frac}");
}

#[test]
fn iid_outcomes_have_no_directional_difference() {
    let net = rewired(200, 13);
    let reps = 500;
    let diffs: Vec<f64> = (0..reps)
        .map(|r| {
            let z = sar_generate(&net, SarParams::new(0.0, 0.0, 1.0), &mut substream(14, &[r])).unwrap();
            qad_fit(&net, &z, Family::Linear).unwrap().difference
        })
        .collect();
    let mean = diffs.iter().sum::<f64>() / reps as f64;
    let sd = (diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (reps - 1) as f64).sqrt();
    assert!(mean.abs() < 3.0 * sd / (reps as f64).sqrt(), "{mean} {sd}");
}

#[test]
fn symmetric_sar_is_orientation_free() {
    // With ρ1 = ρ2 the model on W and on Wᵀ is the same; the exposure
    // moments should agree across orientations up to Monte-Carlo error.
    let net = rewired(200, 15);
    let stat = |w: &Network, stream: u64| {
        let reps = 300;
        let mut acc = 0.0;
        for r in 0..reps {
            let z = sar_generate(w, SarParams::new(0.25, 0.25, 1.0), &mut substream(stream, &[r])).unwrap();
            let f = w.exposure(&z, Direction::Forward).unwrap();
            acc += z.iter().zip(&f).map(|(a, b)| a * b).sum::<f64>() / z.len() as f64;
        }
        acc / reps as f64
    };
    let (a, b) = (stat(&net, 16), stat(&net.transpose(), 17));
    assert!((a - b).abs() < 0.05 * a.abs().max(0.1), "{a} {b}");
}
