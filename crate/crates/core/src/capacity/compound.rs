use super::solver::{maximin_binary, maximin_saddle, MinimaxObjective, SaddleOptions, StateEval};
use super::{dmc_capacity, CapacityResult, CompoundSet, Prior, MAX_ITERATIONS};
use crate::error::{invalid, Result};

struct ClassicalObjective<'a>(&'a CompoundSet);

impl MinimaxObjective for ClassicalObjective<'_> {
    fn evaluate(&self, p: &[f64]) -> Vec<StateEval> {
        self.0
            .channels()
            .iter()
            .map(|w| {
                let divergences = w.divergences(p);
                let value = p
                    .iter()
                    .zip(&divergences)
                    .map(|(px, d)| if *px > 0.0 { px * d } else { 0.0 })
                    .sum::<f64>()
                    .max(0.0);
                StateEval { value, divergences }
            })
            .collect()
    }
}

/// `max_p min_s I(p; W_s)` for a finite compound DMC.
///
/// The result's `upper_bound` is certified by a dual bound, and
/// `stop` tells whether the gap closed to within `tol`.
pub fn compound_capacity(set: &CompoundSet, tol: f64) -> Result<CapacityResult> {
    if !(tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    if set.len() == 1 {
        return dmc_capacity(&set.channels()[0], tol);
    }
    let obj = ClassicalObjective(set);
    let n = set.inputs();
    let sol = if n == 1 {
        let e = obj.evaluate(&[1.0]);
        return Ok(CapacityResult {
            value: 0.0,
            optimizer: Prior::normalized(vec![1.0]),
            worst_index: 0,
            iterations: 0,
            upper_bound: e[0].value,
            gap: 0.0,
            stop: super::StopReason::Converged,
        });
    } else if n == 2 {
        maximin_binary(&obj, tol)
    } else {
        let start = vec![1.0 / n as f64; n];
        maximin_saddle(&obj, &start, None, SaddleOptions { tol, max_iterations: MAX_ITERATIONS })
    };
    Ok(CapacityResult {
        value: sol.value,
        optimizer: Prior::normalized(sol.p),
        worst_index: sol.worst,
        iterations: sol.iterations,
        upper_bound: sol.upper,
        gap: sol.upper - sol.value,
        stop: sol.stop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{mutual_information, Dmc, StopReason};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bsc(f: f64) -> Dmc {
        Dmc::new(vec![vec![1.0 - f, f], vec![f, 1.0 - f]]).unwrap()
    }

    fn z(p: f64) -> Dmc {
        Dmc::new(vec![vec![p, 1.0 - p], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn identical_channels_match_single() {
        let set = CompoundSet::new(vec![bsc(0.1), bsc(0.1)]).unwrap();
        let c = compound_capacity(&set, 1e-10).unwrap();
        let single = dmc_capacity(&bsc(0.1), 1e-12).unwrap();
        assert_abs_diff_eq!(c.value, single.value, epsilon = 1e-9);
    }

    #[test]
    fn worst_bsc_dominates() {
        let set = CompoundSet::new(vec![bsc(0.05), bsc(0.2), bsc(0.1)]).unwrap();
        let c = compound_capacity(&set, 1e-9).unwrap();
        let h = -(0.2_f64 * 0.2_f64.log2() + 0.8 * 0.8_f64.log2());
        assert_abs_diff_eq!(c.value, 1.0 - h, epsilon = 1e-8);
        assert_eq!(c.worst_index, 1);
        assert_eq!(c.stop, StopReason::Converged);
    }

    #[test]
    fn complementary_z_channels() {
        // mirrored Z-channels force the uniform prior
        let a = z(0.5);
        let b = Dmc::new(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let set = CompoundSet::new(vec![a.clone(), b]).unwrap();
        let c = compound_capacity(&set, 1e-10).unwrap();
        let u = Prior::uniform(2).unwrap();
        assert_abs_diff_eq!(c.value, mutual_information(&u, &a).unwrap(), epsilon = 1e-9);
        assert_abs_diff_eq!(c.optimizer.as_slice()[0], 0.5, epsilon = 1e-5);
    }

    #[test]
    fn constant_channel_gives_zero() {
        let w = Dmc::new(vec![vec![0.4, 0.6]; 3]).unwrap();
        let set = CompoundSet::new(vec![w.clone(), w]).unwrap();
        let c = compound_capacity(&set, 1e-9).unwrap();
        assert_abs_diff_eq!(c.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn random_sets_are_certified() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let channels: Vec<Dmc> = (0..3)
                .map(|_| {
                    Dmc::new(
                        (0..4)
                            .map(|_| {
                                let r: Vec<f64> = (0..3).map(|_| rng.gen_range(0.01..1.0)).collect();
                                let s: f64 = r.iter().sum();
                                let mut r: Vec<f64> = r.iter().map(|x| x / s).collect();
                                r[2] = 1.0 - r[0] - r[1];
                                r
                            })
                            .collect(),
                    )
                    .unwrap()
                })
                .collect();
            let set = CompoundSet::new(channels.clone()).unwrap();
            let c = compound_capacity(&set, 1e-6).unwrap();
            assert_eq!(c.stop, StopReason::Converged);
            assert!(c.gap <= 1e-6 && c.gap >= -1e-12);
            // no single channel is below the compound value
            for w in &channels {
                assert!(dmc_capacity(w, 1e-9).unwrap().upper_bound >= c.value - 1e-9);
            }
        }
    }

    fn grid_max(set: &CompoundSet, steps: usize) -> f64 {
        let n = set.inputs();
        let mut best: f64 = 0.0;
        let mut visit = |p: &[f64]| {
            let prior = Prior::normalized(p.to_vec());
            let v = set
                .channels()
                .iter()
                .map(|w| mutual_information(&prior, w).unwrap())
                .fold(f64::INFINITY, f64::min);
            best = best.max(v);
        };
        match n {
            2 => (0..=steps).for_each(|i| visit(&[i as f64 / steps as f64, 1.0 - i as f64 / steps as f64])),
            3 => {
                for i in 0..=steps {
                    for j in 0..=steps - i {
                        let (a, b) = (i as f64 / steps as f64, j as f64 / steps as f64);
                        visit(&[a, b, (1.0 - a - b).max(0.0)]);
                    }
                }
            }
            _ => unreachable!(),
        }
        best
    }

    #[test]
    fn z_pair_matches_grid() {
        let set = CompoundSet::new(vec![z(1.0), z(0.5)]).unwrap();
        let c = compound_capacity(&set, 1e-9).unwrap();
        assert_abs_diff_eq!(c.value, 1.25_f64.log2(), epsilon = 1e-9);
        assert_eq!(c.worst_index, 1);
        let g = grid_max(&set, 10_000);
        assert!(c.value >= g - 1e-12 && c.value - g < 1e-7);
    }

    #[test]
    fn opposite_deterministic_channels() {
        let swap = Dmc::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let set = CompoundSet::new(vec![Dmc::identity(2).unwrap(), swap]).unwrap();
        let c = compound_capacity(&set, 1e-9).unwrap();
        assert_abs_diff_eq!(c.value, grid_max(&set, 10_000), epsilon = 1e-9);
        assert_abs_diff_eq!(c.value, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn ternary_sets_match_dense_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let channels: Vec<Dmc> = (0..2)
                .map(|_| {
                    Dmc::new(
                        (0..3)
                            .map(|_| {
                                let r: Vec<f64> = (0..2).map(|_| rng.gen_range(0.02..1.0)).collect();
                                let s: f64 = r.iter().sum();
                                vec![r[0] / s, 1.0 - r[0] / s]
                            })
                            .collect(),
                    )
                    .unwrap()
                })
                .collect();
            let set = CompoundSet::new(channels).unwrap();
            let c = compound_capacity(&set, 1e-8).unwrap();
            let g = grid_max(&set, 400);
            assert!(c.value >= g - 1e-8, "{} < grid {g}", c.value);
            assert!(c.upper_bound >= g);
            assert!(c.value - g < 1e-4);
        }
    }

    #[test]
    fn adding_a_channel_never_helps() {
        let base = vec![bsc(0.1), z(0.7)];
        let c2 = compound_capacity(&CompoundSet::new(base.clone()).unwrap(), 1e-8).unwrap();
        let mut more = base;
        more.push(Dmc::new(vec![vec![0.6, 0.4], vec![0.2, 0.8]]).unwrap());
        let c3 = compound_capacity(&CompoundSet::new(more).unwrap(), 1e-8).unwrap();
        assert!(c3.value <= c2.value + 2e-8);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let set = CompoundSet::new(vec![bsc(0.1)]).unwrap();
        assert!(compound_capacity(&set, -1.0).is_err());
    }
}
