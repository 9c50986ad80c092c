//! Brute-force validators: random restarts plus coordinate pattern search
//! over the eight real parameters of `B`, independent of the SDP path.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{
    cscg, rate_pair_reduced, relay_power_reduced, snr_pair_reduced, Beamformer, EffectiveChannel, PowerConfig, RatePair,
};
use crate::error::{invalid, Result};
use crate::linalg::{dot_t, norm_sqr};
use crate::region::RateProfile;

pub const DEFAULT_RESTARTS: usize = 64;
pub const DEFAULT_ITERS: usize = 2000;
pub const DEFAULT_SEED: u64 = 0x5eed;

const MIN_STEP: f64 = 1e-12;
const RANDOM_POLLS: usize = 16;

/// Best achievable point found by the rate search.
#[derive(Clone, Debug)]
pub struct RateWitness {
    /// `min(r21 / alpha21, r12 / alpha12)` of the witness.
    pub r_sum: f64,
    pub rates: RatePair,
    pub beamformer: Beamformer,
    pub relay_power: f64,
}

/// Best feasible point found by the power search.
#[derive(Clone, Debug)]
pub struct PowerWitness {
    pub power: f64,
    pub beamformer: Beamformer,
}

fn restart_rng(seed: u64, idx: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (idx as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn random_start(rng: &mut ChaCha8Rng) -> [f64; 8] {
    let mut x = [0.0; 8];
    for k in 0..4 {
        let z = cscg(rng);
        x[k] = z.re;
        x[k + 4] = z.im;
    }
    x
}

/// Maximises `f` by compass search with step halving; `n_iters` bounds the
/// number of polls. Before a step is halved, random unit directions are
/// polled too, so the search can follow the kink of a min-objective.
fn pattern_search<F, K>(mut x: [f64; 8], n_iters: usize, rng: &mut ChaCha8Rng, f: F) -> ([f64; 8], K)
where
    F: Fn(&[f64; 8]) -> K,
    K: PartialOrd + Copy,
{
    let mut best = f(&x);
    let mut step = 0.5 * x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
    let try_dir = |x: &[f64; 8], d: &[f64; 8], step: f64, best: K| {
        for sign in [1.0, -1.0] {
            let mut y = *x;
            for k in 0..8 {
                y[k] += sign * step * d[k];
            }
            let v = f(&y);
            if v > best {
                return Some((y, v));
            }
        }
        None
    };
    for _ in 0..n_iters {
        let mut moved = false;
        for k in 0..8 {
            let mut e = [0.0; 8];
            e[k] = 1.0;
            if let Some((y, v)) = try_dir(&x, &e, step, best) {
                x = y;
                best = v;
                moved = true;
            }
        }
        if !moved {
            for _ in 0..RANDOM_POLLS {
                let mut d = random_start(rng);
                let n = d.iter().map(|v| v * v).sum::<f64>().sqrt();
                d.iter_mut().for_each(|v| *v /= n);
                if let Some((y, v)) = try_dir(&x, &d, step, best) {
                    x = y;
                    best = v;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            step *= 0.5;
            if step < MIN_STEP {
                break;
            }
        }
    }
    (x, best)
}

/// Scales `bf` to relay power `P_R`; rates grow with the scale.
fn full_power(bf: &Beamformer, eff: &EffectiveChannel, pc: &PowerConfig) -> Option<Beamformer> {
    let p = relay_power_reduced(bf, eff, pc);
    (p > 0.0 && p.is_finite()).then(|| bf.scaled((pc.p_r / p).sqrt()))
}

/// Lower-bound witness for the largest sum-rate along `profile`.
pub fn oracle_max_sum_rate(
    eff: &EffectiveChannel,
    pc: &PowerConfig,
    profile: &RateProfile,
    n_restarts: usize,
    n_iters: usize,
    seed: u64,
) -> Result<RateWitness> {
    if n_restarts == 0 || n_iters == 0 {
        return Err(invalid("oracle budgets must be at least one"));
    }
    if pc.p_r <= 0.0 {
        return Ok(RateWitness {
            r_sum: 0.0,
            rates: RatePair::default(),
            beamformer: Beamformer::zero(),
            relay_power: 0.0,
        });
    }
    let score = |x: &[f64; 8]| match full_power(&Beamformer::from_real8(x), eff, pc) {
        Some(bf) => profile.radial(&rate_pair_reduced(&bf, eff, pc)),
        None => f64::NEG_INFINITY,
    };
    let runs: Vec<([f64; 8], f64)> = (0..n_restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = restart_rng(seed, i);
            let x0 = random_start(&mut rng);
            pattern_search(x0, n_iters, &mut rng, score)
        })
        .collect();
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.1 > runs[best].1 {
            best = i;
        }
    }
    let bf = full_power(&Beamformer::from_real8(&runs[best].0), eff, pc).unwrap_or_else(Beamformer::zero);
    // re-verify through the channel model
    let rates = rate_pair_reduced(&bf, eff, pc);
    Ok(RateWitness {
        r_sum: profile.radial(&rates),
        rates,
        relay_power: relay_power_reduced(&bf, eff, pc),
        beamformer: bf,
    })
}

/// Least scale meeting both targets along direction `bf`, as
/// `(violation, power)`; zero violation means the direction is usable.
fn min_power_along(bf: &Beamformer, eff: &EffectiveChannel, pc: &PowerConfig, g1: f64, g2: f64) -> (f64, f64) {
    let b = &bf.b;
    let bh = b.adjoint();
    let g1c = [eff.g1[0].conj(), eff.g1[1].conj()];
    let g2c = [eff.g2[0].conj(), eff.g2[1].conj()];
    // snr(s) = s² S / (s² N + 1), so s² >= gamma / (S - gamma N)
    let dirs = [
        (
            g1,
            dot_t(&eff.g1, &b.mul_vec(&eff.g2)).norm_sqr() * pc.p2,
            norm_sqr(&bh.mul_vec(&g1c)),
        ),
        (
            g2,
            dot_t(&eff.g2, &b.mul_vec(&eff.g1)).norm_sqr() * pc.p1,
            norm_sqr(&bh.mul_vec(&g2c)),
        ),
    ];
    let size = b.frobenius_sqr().max(f64::MIN_POSITIVE);
    let mut violation = 0.0;
    let mut s2: f64 = 0.0;
    for (gamma, s, n) in dirs {
        if gamma <= 0.0 {
            continue;
        }
        let margin = s - gamma * n;
        if margin <= 0.0 {
            violation += (gamma * n - s) / size + f64::MIN_POSITIVE;
        } else {
            s2 = s2.max(gamma / margin);
        }
    }
    if violation > 0.0 {
        (violation, f64::INFINITY)
    } else {
        (0.0, s2 * relay_power_reduced(bf, eff, pc))
    }
}

/// Upper-bound witness for the least relay power meeting the SNR targets;
/// `None` when no feasible direction was found.
pub fn oracle_min_power(
    eff: &EffectiveChannel,
    pc: &PowerConfig,
    gamma1_bar: f64,
    gamma2_bar: f64,
    n_restarts: usize,
    n_iters: usize,
    seed: u64,
) -> Result<Option<PowerWitness>> {
    if n_restarts == 0 || n_iters == 0 {
        return Err(invalid("oracle budgets must be at least one"));
    }
    if !(gamma1_bar >= 0.0 && gamma2_bar >= 0.0) {
        return Err(invalid("SNR targets must be non-negative"));
    }
    if gamma1_bar == 0.0 && gamma2_bar == 0.0 {
        return Ok(Some(PowerWitness {
            power: 0.0,
            beamformer: Beamformer::zero(),
        }));
    }
    // maximise (-violation, -power) lexicographically
    let score = |x: &[f64; 8]| {
        let (v, p) = min_power_along(&Beamformer::from_real8(x), eff, pc, gamma1_bar, gamma2_bar);
        (-v, -p)
    };
    let runs: Vec<([f64; 8], (f64, f64))> = (0..n_restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = restart_rng(seed, i);
            let x0 = random_start(&mut rng);
            pattern_search(x0, n_iters, &mut rng, score)
        })
        .collect();
    let mut best: Option<(f64, Beamformer)> = None;
    for (x, _) in runs {
        let dir = Beamformer::from_real8(&x);
        let (v, p) = min_power_along(&dir, eff, pc, gamma1_bar, gamma2_bar);
        if v > 0.0 || !p.is_finite() {
            continue;
        }
        let bf = dir.scaled((p / relay_power_reduced(&dir, eff, pc)).sqrt());
        // re-verify through the channel model, nudging up against rounding
        let bf = bf.scaled(1.0 + 1e-12);
        let (s21, s12) = snr_pair_reduced(&bf, eff, pc);
        if s21 < gamma1_bar || s12 < gamma2_bar {
            continue;
        }
        let power = relay_power_reduced(&bf, eff, pc);
        if best.as_ref().is_none_or(|(b, _)| power < *b) {
            best = Some((power, bf));
        }
    }
    Ok(best.map(|(power, beamformer)| PowerWitness { power, beamformer }))
}
