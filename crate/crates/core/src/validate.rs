//! Invariant suites behind `twrc validate`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{c_ub, c_ub0, r_lb_mr, DEFAULT_GRID};
use crate::channel::{effective, gen_channels, rate_pair, relay_power, snr_for_rate, snr_pair_reduced, PowerConfig};
use crate::df::{bc_wsrmax, mac_region, DEFAULT_BC_TOL};
use crate::error::{invalid, Error, Result};
use crate::optimal::{max_sum_rate, min_relay_power, profile_feasible};
use crate::oracle::{oracle_max_sum_rate, oracle_min_power};
use crate::region::RateProfile;
use crate::suboptimal::{mrr_mrt, scheme_profile_sum_rate, zfr_zft, Scheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Sdp,
    Bisection,
    Oracle,
    Schemes,
    Bounds,
    Df,
}

impl Suite {
    pub const EACH: [Suite; 6] = [
        Suite::Sdp,
        Suite::Bisection,
        Suite::Oracle,
        Suite::Schemes,
        Suite::Bounds,
        Suite::Df,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::All => "all",
            Suite::Sdp => "sdp",
            Suite::Bisection => "bisection",
            Suite::Oracle => "oracle",
            Suite::Schemes => "schemes",
            Suite::Bounds => "bounds",
            Suite::Df => "df",
        };
        f.write_str(s)
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        std::iter::once(Suite::All)
            .chain(Suite::EACH)
            .find(|x| x.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| invalid(format!("unknown suite {s:?}")))
    }
}

/// Outcome of one check on one instance.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

struct Instance {
    pair: crate::channel::ChannelPair,
    pc: PowerConfig,
    profile: RateProfile,
}

fn instances(seed: u64, n: usize) -> Result<Vec<Instance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let m = rng.gen_range(2..=4);
            let rho = [0.1, 0.5, 0.8][rng.gen_range(0..3)];
            let pair = gen_channels(m, rho, rng.gen())?;
            let pc = PowerConfig::new(
                rng.gen_range(1.0..20.0),
                rng.gen_range(1.0..20.0),
                rng.gen_range(1.0..20.0),
            )?;
            Ok(Instance {
                pair,
                pc,
                profile: RateProfile::new(rng.gen_range(0.0..=1.0))?,
            })
        })
        .collect()
}

fn check(suite: Suite, name: &str, passed: bool, detail: String) -> Check {
    Check {
        suite,
        name: name.to_string(),
        passed,
        detail,
    }
}

fn sdp_suite(inst: &[Instance]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (k, it) in inst.iter().enumerate() {
        let eff = effective(&it.pair);
        let r = 0.5 * max_sum_rate(&eff, &it.pc, &RateProfile::equal(), 1e-3)?.r_sum;
        let (g1, g2) = (snr_for_rate(r), snr_for_rate(r));
        let mp = min_relay_power(&eff, &it.pc, g1, g2)?;
        let Some(bf) = mp.beamformer else {
            out.push(check(
                Suite::Sdp,
                "rank-one exactness",
                false,
                format!("instance {k}: infeasible"),
            ));
            continue;
        };
        let gap = (mp.p_star - mp.relaxed_objective).abs() / mp.relaxed_objective.max(1e-300);
        let (s21, s12) = snr_pair_reduced(&bf, &eff, &it.pc);
        out.push(check(
            Suite::Sdp,
            "rank-one exactness",
            gap <= 1e-6 && s21 >= g1 * (1.0 - 1e-6) && s12 >= g2 * (1.0 - 1e-6),
            format!("instance {k}: relative gap {gap:e}"),
        ));
    }
    Ok(out)
}

fn bisection_suite(inst: &[Instance]) -> Result<Vec<Check>> {
    let delta = 1e-4;
    let mut out = Vec::new();
    for (k, it) in inst.iter().enumerate() {
        let eff = effective(&it.pair);
        let sr = max_sum_rate(&eff, &it.pc, &it.profile, delta)?;
        let lo = profile_feasible(&eff, &it.pc, &it.profile, sr.r_sum)?;
        let hi = profile_feasible(&eff, &it.pc, &it.profile, sr.r_sum + 2.0 * delta)?;
        out.push(check(
            Suite::Bisection,
            "bracket contract",
            lo && !hi,
            format!("instance {k}: R = {}", sr.r_sum),
        ));
        let ub = c_ub0(&it.pc, eff.theta1(), eff.theta2());
        out.push(check(
            Suite::Bisection,
            "below C_UB^(0)",
            sr.r_sum <= ub + 1e-9,
            format!("instance {k}: {} <= {ub}", sr.r_sum),
        ));
    }
    Ok(out)
}

fn oracle_suite(inst: &[Instance], seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (k, it) in inst.iter().enumerate() {
        let eff = effective(&it.pair);
        let sr = max_sum_rate(&eff, &it.pc, &it.profile, 1e-4)?;
        let w = oracle_max_sum_rate(&eff, &it.pc, &it.profile, 16, 1000, seed)?;
        out.push(check(
            Suite::Oracle,
            "rate sandwich",
            w.r_sum <= sr.r_upper + 1e-9 && w.r_sum >= sr.r_sum - 1e-3,
            format!("instance {k}: oracle {} vs sdp {}", w.r_sum, sr.r_sum),
        ));
        let (g1, g2) = (0.5, 0.5);
        let mp = min_relay_power(&eff, &it.pc, g1, g2)?;
        if mp.p_star.is_finite() {
            let wp = oracle_min_power(&eff, &it.pc, g1, g2, 16, 1000, seed)?;
            let ok = wp.is_some_and(|w| w.power >= mp.p_star * (1.0 - 1e-6));
            out.push(check(
                Suite::Oracle,
                "power sandwich",
                ok,
                format!("instance {k}: sdp {}", mp.p_star),
            ));
        }
    }
    Ok(out)
}

fn schemes_suite(inst: &[Instance]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (k, it) in inst.iter().enumerate() {
        let a_mr = mrr_mrt(&it.pair, 0.7, &it.pc)?;
        let a_zf = zfr_zft(&it.pair, 0.7, &it.pc)?;
        for (name, a) in [("mr power", &a_mr), ("zf power", &a_zf)] {
            let p = relay_power(a, &it.pair, &it.pc);
            out.push(check(
                Suite::Schemes,
                name,
                (p - it.pc.p_r).abs() <= 1e-10 * it.pc.p_r,
                format!("instance {k}: {p}"),
            ));
        }
        let d = it.pair.h_dl().mul(&a_zf).mul(&it.pair.h_ul());
        out.push(check(
            Suite::Schemes,
            "zf self-interference",
            d[(0, 1)].norm() <= 1e-9 && d[(1, 0)].norm() <= 1e-9,
            format!("instance {k}: {:e}, {:e}", d[(0, 1)].norm(), d[(1, 0)].norm()),
        ));
        let eff = effective(&it.pair);
        let opt = max_sum_rate(&eff, &it.pc, &it.profile, 1e-4)?;
        let mr = scheme_profile_sum_rate(Scheme::Mr, &it.pair, &it.pc, &it.profile)?;
        out.push(check(
            Suite::Schemes,
            "mr inside optimal",
            mr.r_sum <= opt.r_upper + 1e-6,
            format!("instance {k}: {} <= {}", mr.r_sum, opt.r_upper),
        ));
        let r = rate_pair(&mr.a, &it.pair, &it.pc);
        out.push(check(
            Suite::Schemes,
            "mr rates consistent",
            (it.profile.radial(&r) - mr.r_sum).abs() <= 1e-12,
            format!("instance {k}"),
        ));
    }
    Ok(out)
}

fn bounds_suite(inst: &[Instance]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (k, it) in inst.iter().enumerate() {
        let (t1, t2) = (it.pair.theta1(), it.pair.theta2());
        let lb = r_lb_mr(&it.pc, t1, t2, it.pair.rho())?;
        let ub = c_ub(&it.pc, t1, t2, DEFAULT_GRID).value;
        let ub0 = c_ub0(&it.pc, t1, t2);
        out.push(check(
            Suite::Bounds,
            "ordering",
            lb <= ub + 1e-9 && ub <= ub0 + 1e-9,
            format!("instance {k}: {lb} <= {ub} <= {ub0}"),
        ));
    }
    Ok(out)
}

fn df_suite(inst: &[Instance]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (k, it) in inst.iter().enumerate() {
        let pt = bc_wsrmax(&it.pair, it.pc.p_r, 1.0, 0.0, DEFAULT_BC_TOL)?;
        let want = (1.0 + it.pc.p_r * it.pair.theta1()).log2();
        out.push(check(
            Suite::Df,
            "bc single-user end",
            (pt.rates.r21 - want).abs() <= 1e-8,
            format!("instance {k}: {} vs {want}", pt.rates.r21),
        ));
        let mac = mac_region(&it.pair, it.pc.p1, it.pc.p2)?;
        out.push(check(
            Suite::Df,
            "mac pentagon",
            mac.c1.max(mac.c2) <= mac.c_sum + 1e-12 && mac.c_sum <= mac.c1 + mac.c2 + 1e-12,
            format!("instance {k}: {mac:?}"),
        ));
    }
    Ok(out)
}

/// Runs one suite (or all) on `n` seeded random instances.
pub fn run_suite(suite: Suite, seed: u64, n: usize) -> Result<Vec<Check>> {
    let inst = instances(seed, n)?;
    let mut out = Vec::new();
    let list: Vec<Suite> = if suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![suite]
    };
    for s in list {
        out.extend(match s {
            Suite::Sdp => sdp_suite(&inst)?,
            Suite::Bisection => bisection_suite(&inst)?,
            Suite::Oracle => oracle_suite(&inst, seed)?,
            Suite::Schemes => schemes_suite(&inst)?,
            Suite::Bounds => bounds_suite(&inst)?,
            Suite::Df => df_suite(&inst)?,
            Suite::All => unreachable!("expanded above"),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in std::iter::once(Suite::All).chain(Suite::EACH) {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn every_suite_passes_on_a_small_batch() {
        let checks = run_suite(Suite::All, 13, 2).unwrap();
        assert!(!checks.is_empty());
        for c in &checks {
            assert!(c.passed, "{:?}", c);
        }
    }
}
