//! Suboptimal relay beamformers: maximal-ratio and zero-forcing
//! receive/transmit, the scaled identity relay, and one-way alternation.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{effective, rate_from_snr, rate_pair, relay_power, Beamformer, ChannelPair, PowerConfig};
use crate::error::{invalid, Error, Result};
use crate::linalg::{c64, pinv_tall, CMatrix, DEFAULT_RANK_TOL};
use crate::region::{BoundaryPoint, RateProfile, RegionBoundary};

/// Number of angles scanned before refining a scheme's profile optimum.
pub const PROFILE_SCAN: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Mr,
    Zf,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Mr => "mr",
            Scheme::Zf => "zf",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mr" | "mrr-mrt" => Ok(Scheme::Mr),
            "zf" | "zfr-zft" => Ok(Scheme::Zf),
            other => Err(invalid(format!("unknown scheme {other:?} (expected mr or zf)"))),
        }
    }
}

fn check_relay(pc: &PowerConfig) -> Result<()> {
    if !(pc.p_r > 0.0) {
        return Err(invalid("relay power must be positive"));
    }
    Ok(())
}

/// `(a, b)` on the unit circle with `a / b = tan(phi)`.
fn weights(phi: f64) -> (f64, f64) {
    if phi >= FRAC_PI_2 {
        (1.0, 0.0)
    } else {
        (phi.sin(), phi.cos())
    }
}

fn ratio_angle(ratio: f64) -> Result<f64> {
    if !(ratio >= 0.0) {
        return Err(invalid(format!("ratio must be non-negative, got {ratio}")));
    }
    Ok(if ratio.is_infinite() { FRAC_PI_2 } else { ratio.atan() })
}

/// Scales `a` so that its relay power equals `P_R`.
fn normalize(a: CMatrix, pair: &ChannelPair, pc: &PowerConfig) -> CMatrix {
    let p = relay_power(&a, pair, pc);
    a.scale_re((pc.p_r / p).sqrt())
}

fn diag2(a: f64, b: f64) -> CMatrix {
    let z = c64(0.0, 0.0);
    CMatrix::from_rows(&[&[c64(a, 0.0), z], &[z, c64(b, 0.0)]])
}

/// `H_DL^†`, the right inverse of the downlink matrix.
fn h_dl_pinv(pair: &ChannelPair) -> Result<CMatrix> {
    Ok(pinv_tall(&pair.h_dl().transpose(), DEFAULT_RANK_TOL)?.transpose())
}

/// `H_UL^†`, the left inverse of the uplink matrix.
fn h_ul_pinv(pair: &ChannelPair) -> Result<CMatrix> {
    pinv_tall(&pair.h_ul(), DEFAULT_RANK_TOL)
}

fn mr_at_angle(pair: &ChannelPair, phi: f64, pc: &PowerConfig) -> CMatrix {
    let (a, b) = weights(phi);
    let raw = pair.h_dl().adjoint().mul(&diag2(a, b)).mul(&pair.h_ul().adjoint());
    normalize(raw, pair, pc)
}

fn zf_at_angle(dl_pinv: &CMatrix, ul_pinv: &CMatrix, pair: &ChannelPair, phi: f64, pc: &PowerConfig) -> CMatrix {
    let (a, b) = weights(phi);
    normalize(dl_pinv.mul(&diag2(a, b)).mul(ul_pinv), pair, pc)
}

/// `A = H_DL^H diag(a, b) H_UL^H` with `a / b = ratio`, scaled to relay
/// power `P_R`. `a` weights the S1→S2 link and `b` the S2→S1 link.
pub fn mrr_mrt(pair: &ChannelPair, ratio: f64, pc: &PowerConfig) -> Result<CMatrix> {
    check_relay(pc)?;
    Ok(mr_at_angle(pair, ratio_angle(ratio)?, pc))
}

/// `A = H_DL^† diag(a, b) H_UL^†` with `a / b = ratio`, scaled to relay
/// power `P_R`. Fails when the channels are parallel.
pub fn zfr_zft(pair: &ChannelPair, ratio: f64, pc: &PowerConfig) -> Result<CMatrix> {
    check_relay(pc)?;
    let phi = ratio_angle(ratio)?;
    Ok(zf_at_angle(&h_dl_pinv(pair)?, &h_ul_pinv(pair)?, pair, phi, pc))
}

/// Evaluates a scheme along a list of angles in `[0, pi/2]`.
struct SchemeEval<'a> {
    pair: &'a ChannelPair,
    pc: PowerConfig,
    scheme: Scheme,
    zf: Option<(CMatrix, CMatrix)>,
}

impl<'a> SchemeEval<'a> {
    fn new(scheme: Scheme, pair: &'a ChannelPair, pc: &PowerConfig) -> Result<Self> {
        check_relay(pc)?;
        let zf = match scheme {
            Scheme::Mr => None,
            Scheme::Zf => Some((h_dl_pinv(pair)?, h_ul_pinv(pair)?)),
        };
        Ok(Self {
            pair,
            pc: *pc,
            scheme,
            zf,
        })
    }

    fn matrix(&self, phi: f64) -> CMatrix {
        match (&self.scheme, &self.zf) {
            (Scheme::Zf, Some((dl, ul))) => zf_at_angle(dl, ul, self.pair, phi, &self.pc),
            _ => mr_at_angle(self.pair, phi, &self.pc),
        }
    }
}

/// Pareto envelope of a scheme's rate pairs over `n_ratios` ratios
/// `tan(phi)`, `phi` uniform on `[0, pi/2]`.
pub fn sweep_region(scheme: Scheme, pair: &ChannelPair, pc: &PowerConfig, n_ratios: usize) -> Result<RegionBoundary> {
    if n_ratios < 2 {
        return Err(invalid("need at least two ratios"));
    }
    let ev = SchemeEval::new(scheme, pair, pc)?;
    let eff = effective(pair);
    let points: Vec<BoundaryPoint> = (0..n_ratios)
        .into_par_iter()
        .map(|k| {
            let phi = FRAC_PI_2 * k as f64 / (n_ratios - 1) as f64;
            let a = ev.matrix(phi);
            // weight on the S2→S1 link as the boundary coordinate
            let (wa, wb) = weights(phi);
            BoundaryPoint {
                alpha21: wb * wb / (wa * wa + wb * wb),
                rates: rate_pair(&a, pair, pc),
                p1: pc.p1,
                p2: pc.p2,
                beamformer: Some(Beamformer::from_full(&a, &eff)),
                relay_power: relay_power(&a, pair, pc),
            }
        })
        .collect();
    Ok(RegionBoundary::pareto_envelope(points))
}

/// Result of optimising a scheme's ratio along a rate profile.
#[derive(Clone, Debug)]
pub struct SchemeProfileRate {
    /// `min(r21 / alpha21, r12 / alpha12)` at the best ratio.
    pub r_sum: f64,
    /// Angle `phi` with ratio `tan(phi)`.
    pub angle: f64,
    pub a: CMatrix,
}

/// Largest sum-rate a scheme sustains along `profile`, maximising over the
/// ratio by a dense scan followed by golden-section refinement.
pub fn scheme_profile_sum_rate(
    scheme: Scheme,
    pair: &ChannelPair,
    pc: &PowerConfig,
    profile: &RateProfile,
) -> Result<SchemeProfileRate> {
    let ev = SchemeEval::new(scheme, pair, pc)?;
    let f = |phi: f64| profile.radial(&rate_pair(&ev.matrix(phi), pair, pc));
    let step = FRAC_PI_2 / PROFILE_SCAN as f64;
    let (mut best_phi, mut best) = (0.0, f(0.0));
    for k in 1..=PROFILE_SCAN {
        let phi = step * k as f64;
        let v = f(phi);
        if v > best {
            best = v;
            best_phi = phi;
        }
    }
    let (mut lo, mut hi) = ((best_phi - step).max(0.0), (best_phi + step).min(FRAC_PI_2));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-12 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best {
            best = v;
            best_phi = x;
        }
    }
    Ok(SchemeProfileRate {
        r_sum: best,
        angle: best_phi,
        a: ev.matrix(best_phi),
    })
}

/// Sum-rate of a scheme with equal weights `a = b`.
pub fn scheme_equal_weight_sum_rate(scheme: Scheme, pair: &ChannelPair, pc: &PowerConfig) -> Result<f64> {
    let a = match scheme {
        Scheme::Mr => mrr_mrt(pair, 1.0, pc)?,
        Scheme::Zf => zfr_zft(pair, 1.0, pc)?,
    };
    Ok(rate_pair(&a, pair, pc).sum())
}

/// `A = zeta I` with relay power `P_R`.
pub fn direct_relay(pair: &ChannelPair, pc: &PowerConfig) -> Result<CMatrix> {
    check_relay(pc)?;
    Ok(normalize(CMatrix::identity(pair.m()), pair, pc))
}

/// Relay power available in each active slot of one-way alternation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OneWayPower {
    /// The relay spends `P_R` whenever it transmits.
    #[default]
    PerSlot,
    /// The relay's average power over all four slots is `P_R`, so it
    /// spends `2 P_R` in each of its two active slots.
    EnergyAveraged,
}

/// Directional SNRs `(snr21, snr12)` of one-way alternation with rank-one
/// relays `psi h1* h2^H` and `psi h2* h1^H`.
pub fn oneway_snrs(pair: &ChannelPair, pc: &PowerConfig, power: OneWayPower) -> (f64, f64) {
    let per_slot = match power {
        OneWayPower::PerSlot => pc.p_r,
        OneWayPower::EnergyAveraged => 2.0 * pc.p_r,
    };
    let (t1, t2) = (pair.theta1(), pair.theta2());
    // receive from the talking source, forward to the listening one
    let snr = |t_rx: f64, t_tx: f64, p: f64| {
        if p <= 0.0 || per_slot <= 0.0 {
            return 0.0;
        }
        let psi2 = per_slot / (t_tx * t_rx * (t_rx * p + 1.0));
        psi2 * t_tx * t_tx * t_rx * t_rx * p / (psi2 * t_tx * t_tx * t_rx + 1.0)
    };
    (snr(t2, t1, pc.p2), snr(t1, t2, pc.p1))
}

/// Sum-rate of four-slot one-way alternation, a quarter pre-log per
/// direction.
pub fn oneway_alternating(pair: &ChannelPair, pc: &PowerConfig, power: OneWayPower) -> f64 {
    let (s21, s12) = oneway_snrs(pair, pc, power);
    0.5 * (rate_from_snr(s21) + rate_from_snr(s12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{gen_channels, snr_pair};
    use crate::linalg::{dot_t, norm_sqr, svd_tall};
    use crate::optimal::{max_sum_rate, DEFAULT_DELTA_R};
    use proptest::prelude::*;

    fn pc(p1: f64, p2: f64, pr: f64) -> PowerConfig {
        PowerConfig::new(p1, p2, pr).unwrap()
    }

    fn unit_pair() -> ChannelPair {
        ChannelPair::from_real(&[1.0, 0.0], &[0.0, 1.0]).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn mr_orthogonal_weights() {
        let p = pc(10.0, 10.0, 10.0);
        let a = mrr_mrt(&unit_pair(), 1.0, &p).unwrap();
        // A = a h2* h1^H + b h1* h2^H = antidiag(b, a) for unit vectors
        assert!((a[(0, 1)].norm_sqr() - 10.0 / 22.0).abs() < 1e-12);
        assert!((a[(1, 0)].norm_sqr() - 10.0 / 22.0).abs() < 1e-12);
        assert!(a[(0, 0)].norm() < 1e-15 && a[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn mr_zero_ratio_kills_r12_when_orthogonal() {
        let p = pc(10.0, 10.0, 10.0);
        let r = rate_pair(&mrr_mrt(&unit_pair(), 0.0, &p).unwrap(), &unit_pair(), &p);
        assert_eq!(r.r12, 0.0);
        assert!(r.r21 > 0.0);
        let r = rate_pair(&mrr_mrt(&unit_pair(), f64::INFINITY, &p).unwrap(), &unit_pair(), &p);
        assert_eq!(r.r21, 0.0);
    }

    #[test]
    fn zf_rejects_parallel_channels() {
        let pair = gen_channels(3, 1.0, 4).unwrap();
        assert!(matches!(
            zfr_zft(&pair, 1.0, &pc(1.0, 1.0, 1.0)),
            Err(Error::RankDeficient { .. })
        ));
        assert!(sweep_region(Scheme::Zf, &pair, &pc(1.0, 1.0, 1.0), 5).is_err());
    }

    #[test]
    fn direct_relay_examples() {
        let a = direct_relay(&unit_pair(), &pc(10.0, 10.0, 10.0)).unwrap();
        assert!((a[(0, 0)].norm_sqr() - 10.0 / 22.0).abs() < 1e-12);
        let pair = gen_channels(5, 0.3, 1).unwrap();
        let a = direct_relay(&pair, &pc(0.0, 0.0, 7.0)).unwrap();
        assert!((a[(0, 0)].norm() - (7.0f64 / 5.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn oneway_examples() {
        let pair = gen_channels(4, 0.5, 2).unwrap();
        assert_eq!(
            oneway_alternating(&pair, &pc(10.0, 10.0, 0.0), OneWayPower::PerSlot),
            0.0
        );
        let (a, b) = oneway_snrs(&pair, &pc(10.0, 10.0, 10.0), OneWayPower::PerSlot);
        assert!(rel(a, b) < 1e-12);
        let more = oneway_alternating(&pair, &pc(10.0, 10.0, 10.0), OneWayPower::EnergyAveraged);
        assert!(more > oneway_alternating(&pair, &pc(10.0, 10.0, 10.0), OneWayPower::PerSlot));
    }

    #[test]
    fn oneway_matches_explicit_matrix() {
        let pair = gen_channels(3, 0.4, 9).unwrap();
        let p = pc(0.0, 5.0, 8.0);
        let h1c: Vec<_> = pair.h1().iter().map(|z| z.conj()).collect();
        let h2h: Vec<_> = pair.h2().iter().map(|z| z.conj()).collect();
        let raw = CMatrix::from_columns(&[&h1c]).mul(&CMatrix::from_rows(&[&h2h]));
        let a = normalize(raw, &pair, &p);
        let (s21, s12) = snr_pair(&a, &pair, &p);
        let (o21, _) = oneway_snrs(&pair, &pc(5.0, 5.0, 8.0), OneWayPower::PerSlot);
        assert!(rel(s21, o21) < 1e-10);
        assert_eq!(s12, 0.0);
    }

    #[test]
    fn sweep_endpoints() {
        let pair = gen_channels(4, 0.5, 3).unwrap();
        let reg = sweep_region(Scheme::Mr, &pair, &pc(10.0, 10.0, 10.0), 2).unwrap();
        assert!(!reg.is_empty() && reg.len() <= 2);
        assert!(reg.is_pareto(0.0));
    }

    #[test]
    fn scheme_strings() {
        assert_eq!("MR".parse::<Scheme>().unwrap(), Scheme::Mr);
        assert_eq!(Scheme::Zf.to_string(), "zf");
        assert!("xx".parse::<Scheme>().is_err());
    }

    #[test]
    fn schemes_equal_optimum_on_orthogonal_channels() {
        let pair = gen_channels(4, 0.0, 11).unwrap();
        let eff = effective(&pair);
        let p = pc(10.0, 10.0, 10.0);
        for prof in RateProfile::grid(5) {
            let opt = max_sum_rate(&eff, &p, &prof, DEFAULT_DELTA_R).unwrap().r_sum;
            for s in [Scheme::Mr, Scheme::Zf] {
                let got = scheme_profile_sum_rate(s, &pair, &p, &prof).unwrap().r_sum;
                assert!((got - opt).abs() < 1e-3, "{s} {:?}: {got} vs {opt}", prof);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn power_is_exact(seed in 0u64..100_000, m in 2usize..6, rho in 0.0f64..0.95,
                          ratio in 0.0f64..20.0, p1 in 0.0f64..50.0, p2 in 0.0f64..50.0, pr in 0.1f64..50.0) {
            let pair = gen_channels(m, rho, seed).unwrap();
            let p = pc(p1, p2, pr);
            for a in [mrr_mrt(&pair, ratio, &p).unwrap(), zfr_zft(&pair, ratio, &p).unwrap(),
                      direct_relay(&pair, &p).unwrap()] {
                prop_assert!(rel(relay_power(&a, &pair, &p), pr) < 1e-10);
            }
        }

        #[test]
        fn zf_nulls_self_interference(seed in 0u64..100_000, m in 2usize..6, rho in 0.0f64..0.95,
                                      ratio in 0.0f64..20.0) {
            let pair = gen_channels(m, rho, seed).unwrap();
            let a = zfr_zft(&pair, ratio, &pc(3.0, 3.0, 3.0)).unwrap();
            let (h1, h2) = (pair.h1(), pair.h2());
            prop_assert!(dot_t(h1, &a.mul_vec(h1)).norm() < 1e-9);
            prop_assert!(dot_t(h2, &a.mul_vec(h2)).norm() < 1e-9);
            // the surviving entries carry the ratio
            let d = pair.h_dl().mul(&a).mul(&pair.h_ul());
            prop_assert!((d[(0, 0)].norm() - ratio * d[(1, 1)].norm()).abs() < 1e-9 * (1.0 + d[(0, 0)].norm()));
        }

        #[test]
        fn reduced_forms_reproduce_a(seed in 0u64..100_000, m in 2usize..6, rho in 0.0f64..0.95,
                                     ratio in 0.01f64..20.0) {
            let pair = gen_channels(m, rho, seed).unwrap();
            let p = pc(2.0, 3.0, 4.0);
            let eff = effective(&pair);
            let svd = svd_tall(&pair.h_ul()).unwrap();
            let sig = diag2(svd.sigma[0], svd.sigma[1]);
            let sig_inv = diag2(1.0 / svd.sigma[0], 1.0 / svd.sigma[1]);
            for (scheme, a) in [(Scheme::Mr, mrr_mrt(&pair, ratio, &p).unwrap()),
                                (Scheme::Zf, zfr_zft(&pair, ratio, &p).unwrap())] {
                // recover the scale from the (2,1) entry of H_DL A H_UL
                let d = pair.h_dl().mul(&a).mul(&pair.h_ul());
                let (wa, wb) = match scheme {
                    Scheme::Mr => {
                        let raw = pair.h_dl().adjoint().mul(&diag2(ratio, 1.0)).mul(&pair.h_ul().adjoint());
                        let s = (relay_power(&a, &pair, &p) / relay_power(&raw, &pair, &p)).sqrt();
                        (ratio * s, s)
                    }
                    Scheme::Zf => (d[(0, 0)].re, d[(1, 1)].re),
                };
                let z = c64(0.0, 0.0);
                let swap_d = CMatrix::from_rows(&[&[z, c64(wb, 0.0)], &[c64(wa, 0.0), z]]);
                let outer = if scheme == Scheme::Mr { &sig } else { &sig_inv };
                let b = outer.mul(&svd.v.transpose()).mul(&swap_d).mul(&svd.v).mul(outer);
                let lifted = Beamformer::new(b.clone()).lift(&eff);
                prop_assert!(lifted.sub(&a).max_abs() < 1e-10 * (1.0 + a.max_abs()));
                prop_assert!(Beamformer::from_full(&a, &eff).b.sub(&b).max_abs() < 1e-10 * (1.0 + b.max_abs()));
            }
        }

        #[test]
        fn mr_inside_optimal(seed in 0u64..100_000, rho in 0.0f64..0.95, a21 in 0.0f64..=1.0) {
            let pair = gen_channels(3, rho, seed).unwrap();
            let p = pc(10.0, 10.0, 10.0);
            let prof = RateProfile::new(a21).unwrap();
            let opt = max_sum_rate(&effective(&pair), &p, &prof, 1e-5).unwrap();
            let mr = scheme_profile_sum_rate(Scheme::Mr, &pair, &p, &prof).unwrap();
            prop_assert!(mr.r_sum <= opt.r_upper + 1e-6);
            prop_assert!(norm_sqr(mr.a.as_slice()) > 0.0);
        }
    }
}
