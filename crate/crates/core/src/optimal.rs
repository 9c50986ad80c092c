//! Optimal relay beamforming: the SNR-constrained power minimisation as an
//! SDP, rate-profile bisection for boundary points, and region tracing.

use rayon::prelude::*;

use crate::bounds::c_ub0;
use crate::channel::{
    effective, relay_power_reduced, snr_for_rate, Beamformer, ChannelPair, EffectiveChannel, PowerConfig, RatePair,
};
use crate::error::{invalid, Error, Result};
use crate::linalg::{c64, herm2_apply, CMatrix, RMatrix, C64};
use crate::region::{BoundaryPoint, RateProfile, RegionBoundary};
use crate::sdp::{extract_rank_one, solve_sdp, SdpProblem, SdpStatus, DEFAULT_TOL};

pub const DEFAULT_DELTA_R: f64 = 1e-4;
pub const DEFAULT_PROFILES: usize = 33;
pub const DEFAULT_POWER_GRID: usize = 8;

/// Every intermediate quantity of the SNR-constrained power minimisation.
#[derive(Clone, Debug)]
pub struct QcqpBuild {
    /// `p1 g1 g1^H + p2 g2 g2^H + I`.
    pub theta: CMatrix,
    /// `diag(Θ^T, Θ^T)^{1/2}` (4×4).
    pub phi: CMatrix,
    /// `Vec(g1 g2^T)`.
    pub f1: [C64; 4],
    /// `Vec(g2 g1^T)`.
    pub f2: [C64; 4],
    /// `‖B^H g1*‖² = ‖G1 b‖²` (2×4).
    pub g1: CMatrix,
    pub g2: CMatrix,
    pub e0: CMatrix,
    pub e1: CMatrix,
    pub e2: CMatrix,
    /// The 8×8 real problem with both SNR constraints.
    pub prob: SdpProblem,
}

/// `[[Re E, -Im E], [Im E, Re E]]`, so that `b^H E b = x^T F x` for
/// `x = [Re b; Im b]` and Hermitian `E`.
pub fn real_expand(e: &CMatrix) -> RMatrix {
    let n = e.rows();
    let mut f = RMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = e[(i, j)];
            f[(i, j)] = z.re;
            f[(i + n, j + n)] = z.re;
            f[(i, j + n)] = -z.im;
            f[(i + n, j)] = z.im;
        }
    }
    f
}

/// `Vec(a b^T)` with row stacking.
fn outer_vec(a: &[C64; 2], b: &[C64; 2]) -> [C64; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

/// The 2×4 matrix with `G b = B^T g = conj(B^H g*)`.
fn noise_map(g: &[C64; 2]) -> CMatrix {
    let z = c64(0.0, 0.0);
    CMatrix::from_rows(&[&[g[0], z, g[1], z], &[z, g[0], z, g[1]]])
}

/// `(p / gamma) f* f^T - G^H G`.
fn snr_form(f: &[C64; 4], g: &CMatrix, p: f64, gamma: f64) -> CMatrix {
    let mut e = CMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            e[(i, j)] = f[i].conj() * f[j] * (p / gamma);
        }
    }
    e.sub(&g.adjoint().mul(g))
}

fn theta_matrix(eff: &EffectiveChannel, pc: &PowerConfig) -> CMatrix {
    let mut t = CMatrix::identity(2);
    for i in 0..2 {
        for j in 0..2 {
            t[(i, j)] += eff.g1[i] * eff.g1[j].conj() * pc.p1 + eff.g2[i] * eff.g2[j].conj() * pc.p2;
        }
    }
    t
}

fn block_diag2(a: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = a[(i, j)];
            out[(i + 2, j + 2)] = a[(i, j)];
        }
    }
    out
}

pub fn build_qcqp(eff: &EffectiveChannel, pc: &PowerConfig, gamma1_bar: f64, gamma2_bar: f64) -> Result<QcqpBuild> {
    if !(gamma1_bar > 0.0 && gamma2_bar > 0.0) || !gamma1_bar.is_finite() || !gamma2_bar.is_finite() {
        return Err(invalid("SNR targets must be positive and finite"));
    }
    let theta = theta_matrix(eff, pc);
    let phi = block_diag2(&herm2_apply(&theta.transpose(), f64::sqrt));
    let e0 = block_diag2(&theta.transpose());
    let f1 = outer_vec(&eff.g1, &eff.g2);
    let f2 = outer_vec(&eff.g2, &eff.g1);
    let g1 = noise_map(&eff.g1);
    let g2 = noise_map(&eff.g2);
    let e1 = snr_form(&f1, &g1, pc.p2, gamma1_bar);
    let e2 = snr_form(&f2, &g2, pc.p1, gamma2_bar);
    let prob = SdpProblem::new(real_expand(&e0), vec![real_expand(&e1), real_expand(&e2)])?;
    Ok(QcqpBuild {
        theta,
        phi,
        f1,
        f2,
        g1,
        g2,
        e0,
        e1,
        e2,
        prob,
    })
}

/// Outcome of the SNR-constrained relay power minimisation.
#[derive(Clone, Debug)]
pub struct MinPower {
    /// Minimum relay power; `+inf` when the targets are unreachable.
    pub p_star: f64,
    /// Optimal SDP value before rank-one extraction (`NaN` if not solved).
    pub relaxed_objective: f64,
    pub beamformer: Option<Beamformer>,
}

impl MinPower {
    fn infeasible() -> Self {
        Self {
            p_star: f64::INFINITY,
            relaxed_objective: f64::NAN,
            beamformer: None,
        }
    }
}

/// Least relay power meeting `snr21 >= gamma1_bar` and `snr12 >= gamma2_bar`.
/// A zero target drops its constraint.
pub fn min_relay_power(eff: &EffectiveChannel, pc: &PowerConfig, gamma1_bar: f64, gamma2_bar: f64) -> Result<MinPower> {
    for g in [gamma1_bar, gamma2_bar] {
        if !(g >= 0.0) || !g.is_finite() {
            return Err(invalid(format!("SNR target must be finite and non-negative, got {g}")));
        }
    }
    if gamma1_bar == 0.0 && gamma2_bar == 0.0 {
        return Ok(MinPower {
            p_star: 0.0,
            relaxed_objective: 0.0,
            beamformer: Some(Beamformer::zero()),
        });
    }
    // snr21 < theta2 p2 and snr12 < theta1 p1 for every finite B
    if (gamma1_bar > 0.0 && gamma1_bar >= eff.theta2() * pc.p2)
        || (gamma2_bar > 0.0 && gamma2_bar >= eff.theta1() * pc.p1)
    {
        return Ok(MinPower::infeasible());
    }

    let theta = theta_matrix(eff, pc);
    let f0 = real_expand(&block_diag2(&theta.transpose()));
    let mut constraints = Vec::with_capacity(2);
    if gamma1_bar > 0.0 {
        let f1 = outer_vec(&eff.g1, &eff.g2);
        constraints.push(real_expand(&snr_form(&f1, &noise_map(&eff.g1), pc.p2, gamma1_bar)));
    }
    if gamma2_bar > 0.0 {
        let f2 = outer_vec(&eff.g2, &eff.g1);
        constraints.push(real_expand(&snr_form(&f2, &noise_map(&eff.g2), pc.p1, gamma2_bar)));
    }
    let prob = SdpProblem::new(f0, constraints)?;
    let sol = solve_sdp(&prob, DEFAULT_TOL);
    match sol.status {
        SdpStatus::Infeasible => Ok(MinPower::infeasible()),
        SdpStatus::NumericalFailure => Err(Error::NumericalFailure(format!(
            "SDP did not converge for targets ({gamma1_bar:e}, {gamma2_bar:e})"
        ))),
        SdpStatus::Optimal => {
            let x = extract_rank_one(&sol, &prob)?;
            let bf = Beamformer::from_real8(&x);
            Ok(MinPower {
                p_star: relay_power_reduced(&bf, eff, pc),
                relaxed_objective: sol.objective,
                beamformer: Some(bf),
            })
        }
    }
}

/// SNR targets `(2^{2 alpha21 r} - 1, 2^{2 alpha12 r} - 1)` for sum-rate `r`.
pub fn profile_targets(profile: &RateProfile, r: f64) -> (f64, f64) {
    (snr_for_rate(profile.alpha21 * r), snr_for_rate(profile.alpha12 * r))
}

/// Whether sum-rate `r` along `profile` is reachable with relay power `P_R`.
pub fn profile_feasible(eff: &EffectiveChannel, pc: &PowerConfig, profile: &RateProfile, r: f64) -> Result<bool> {
    let (g1, g2) = profile_targets(profile, r);
    Ok(min_relay_power(eff, pc, g1, g2)?.p_star <= pc.p_r)
}

/// Result of the rate-profile bisection.
#[derive(Clone, Debug)]
pub struct SumRate {
    /// Largest sum-rate certified feasible.
    pub r_sum: f64,
    /// Smallest sum-rate known infeasible (or the initial upper bound).
    pub r_upper: f64,
    /// `(alpha21 r_sum, alpha12 r_sum)`.
    pub rates: RatePair,
    pub beamformer: Beamformer,
    pub relay_power: f64,
    pub steps: usize,
}

/// Maximum sum-rate along a rate profile by bisection on `[0, C_UB^(0)]`,
/// stopping when the bracket is narrower than `delta_r`.
pub fn max_sum_rate(eff: &EffectiveChannel, pc: &PowerConfig, profile: &RateProfile, delta_r: f64) -> Result<SumRate> {
    if !(delta_r > 0.0) {
        return Err(invalid("delta_r must be positive"));
    }
    let mut lo = 0.0;
    let mut hi = c_ub0(pc, eff.theta1(), eff.theta2());
    let mut best = Beamformer::zero();
    let mut best_power = 0.0;
    let mut steps = 0;
    if pc.p_r > 0.0 {
        while hi - lo > delta_r {
            let r = 0.5 * (lo + hi);
            let (g1, g2) = profile_targets(profile, r);
            let mp = min_relay_power(eff, pc, g1, g2)?;
            if mp.p_star <= pc.p_r {
                lo = r;
                best = mp.beamformer.expect("feasible outcome carries a beamformer");
                best_power = mp.p_star;
            } else {
                hi = r;
            }
            steps += 1;
        }
    } else {
        hi = 0.0;
    }
    Ok(SumRate {
        r_sum: lo,
        r_upper: hi,
        rates: RatePair::new(profile.alpha21 * lo, profile.alpha12 * lo),
        beamformer: best,
        relay_power: best_power,
        steps,
    })
}

/// One boundary point per profile `alpha21 = k / (n - 1)`.
pub fn rate_region_boundary(
    eff: &EffectiveChannel,
    pc: &PowerConfig,
    n_profiles: usize,
    delta_r: f64,
) -> Result<RegionBoundary> {
    if n_profiles < 2 {
        return Err(invalid("need at least two rate profiles"));
    }
    let points: Vec<BoundaryPoint> = RateProfile::grid(n_profiles)
        .par_iter()
        .map(|prof| {
            let sr = max_sum_rate(eff, pc, prof, delta_r)?;
            Ok(BoundaryPoint {
                alpha21: prof.alpha21,
                rates: sr.rates,
                p1: pc.p1,
                p2: pc.p2,
                beamformer: Some(sr.beamformer),
                relay_power: sr.relay_power,
            })
        })
        .collect::<Result<_>>()?;
    Ok(RegionBoundary::sorted(points))
}

/// `n` powers log-spaced over `[P/100, P]`; `[P]` when `n = 1` or `P = 0`.
pub fn power_axis(p: f64, n: usize) -> Vec<f64> {
    assert!(n >= 1, "power grid needs at least one point");
    if n == 1 || p == 0.0 {
        return vec![p];
    }
    (0..n)
        .map(|k| {
            if k == n - 1 {
                p
            } else {
                p * 100f64.powf(k as f64 / (n - 1) as f64 - 1.0)
            }
        })
        .collect()
}

/// Pareto envelope of the union of achievable regions over all source
/// powers on the grid `power_axis(P1) × power_axis(P2)`.
pub fn capacity_region(
    pair: &ChannelPair,
    p1_max: f64,
    p2_max: f64,
    p_r: f64,
    power_grid: usize,
    n_profiles: usize,
    delta_r: f64,
) -> Result<RegionBoundary> {
    if power_grid < 1 {
        return Err(invalid("power grid needs at least one point"));
    }
    capacity_region_on_grid(
        pair,
        &power_axis(p1_max, power_grid),
        &power_axis(p2_max, power_grid),
        p_r,
        n_profiles,
        delta_r,
    )
}

/// As [`capacity_region`] on explicit per-source power lists.
pub fn capacity_region_on_grid(
    pair: &ChannelPair,
    p1_grid: &[f64],
    p2_grid: &[f64],
    p_r: f64,
    n_profiles: usize,
    delta_r: f64,
) -> Result<RegionBoundary> {
    let eff = effective(pair);
    let combos: Vec<(f64, f64)> = p1_grid
        .iter()
        .flat_map(|&a| p2_grid.iter().map(move |&b| (a, b)))
        .collect();
    let parts: Vec<RegionBoundary> = combos
        .par_iter()
        .map(|&(p1, p2)| {
            let pc = PowerConfig::new(p1, p2, p_r)?;
            rate_region_boundary(&eff, &pc, n_profiles, delta_r)
        })
        .collect::<Result<_>>()?;
    Ok(RegionBoundary::union(parts.iter()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{cscg, gen_channels, rate_pair_reduced, snr_pair_reduced};
    use crate::linalg::{dot_h, norm_sqr};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ortho() -> EffectiveChannel {
        let z = c64(0.0, 0.0);
        let o = c64(1.0, 0.0);
        EffectiveChannel::from_reduced([o, z], [z, o])
    }

    fn pc(p1: f64, p2: f64, pr: f64) -> PowerConfig {
        PowerConfig::new(p1, p2, pr).unwrap()
    }

    fn real8(b: &[C64; 4]) -> Vec<f64> {
        let mut x: Vec<f64> = b.iter().map(|z| z.re).collect();
        x.extend(b.iter().map(|z| z.im));
        x
    }

    fn herm_form(e: &CMatrix, b: &[C64; 4]) -> C64 {
        dot_h(b, &e.mul_vec(b))
    }

    #[test]
    fn hand_expansion_of_e1() {
        let q = build_qcqp(&ortho(), &pc(1.0, 1.0, 1.0), 1.0, 1.0).unwrap();
        let mut want = CMatrix::zeros(4, 4);
        want[(0, 0)] = c64(-1.0, 0.0);
        assert!(q.e1.sub(&want).max_abs() < 1e-15);

        let q = build_qcqp(&ortho(), &pc(1.0, 4.0, 1.0), 1.0, 1.0).unwrap();
        want[(1, 1)] = c64(3.0, 0.0);
        assert!(q.e1.sub(&want).max_abs() < 1e-15);
    }

    #[test]
    fn f0_matches_block_formula() {
        let pair = gen_channels(4, 0.4, 3).unwrap();
        let q = build_qcqp(&effective(&pair), &pc(2.0, 5.0, 1.0), 1.0, 1.0).unwrap();
        let pr = RMatrix::from_vec(4, 4, q.phi.as_slice().iter().map(|z| z.re).collect());
        let pi = RMatrix::from_vec(4, 4, q.phi.as_slice().iter().map(|z| z.im).collect());
        let diag = pr.transpose().mul(&pr).add(&pi.transpose().mul(&pi));
        let off = pi.transpose().mul(&pr).sub(&pr.transpose().mul(&pi));
        let f0 = q.prob.f0();
        for i in 0..4 {
            for j in 0..4 {
                assert!((f0[(i, j)] - diag[(i, j)]).abs() < 1e-12);
                assert!((f0[(i + 4, j + 4)] - diag[(i, j)]).abs() < 1e-12);
                assert!((f0[(i, j + 4)] - off[(i, j)]).abs() < 1e-12);
                assert!((f0[(i + 4, j)] + off[(i, j)]).abs() < 1e-12);
            }
        }
        assert!(q.phi.adjoint().mul(&q.phi).sub(&q.e0).max_abs() < 1e-12);
    }

    #[test]
    fn orthogonal_closed_form() {
        // c² = d² = 2/(4-2) = 1, p_R = d²(p1+1) + c²(p2+1) = 10
        let mp = min_relay_power(&ortho(), &pc(4.0, 4.0, 10.0), 2.0, 2.0).unwrap();
        assert!((mp.p_star - 10.0).abs() < 1e-6, "{}", mp.p_star);
        let b = mp.beamformer.unwrap().b;
        assert!(b[(0, 0)].norm() < 1e-4 && b[(1, 1)].norm() < 1e-4);
        assert!((b[(0, 1)].norm() - 1.0).abs() < 1e-4);
        assert!((b[(1, 0)].norm() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn zero_targets_and_infeasible_targets() {
        let mp = min_relay_power(&ortho(), &pc(4.0, 4.0, 10.0), 0.0, 0.0).unwrap();
        assert_eq!(mp.p_star, 0.0);
        assert_eq!(mp.beamformer.unwrap(), Beamformer::zero());

        let mp = min_relay_power(&ortho(), &pc(1.0, 1.0, 10.0), 1.0, 1.0).unwrap();
        assert!(mp.p_star.is_infinite());
        assert!(mp.beamformer.is_none());
    }

    #[test]
    fn orthogonal_sum_rate() {
        let sr = max_sum_rate(&ortho(), &pc(4.0, 4.0, 10.0), &RateProfile::equal(), DEFAULT_DELTA_R).unwrap();
        assert!((sr.r_sum - 3f64.log2()).abs() <= 2.0 * DEFAULT_DELTA_R);
        assert!(sr.r_upper - sr.r_sum <= DEFAULT_DELTA_R);
        assert!((sr.rates.r21 - 0.79248).abs() < 2e-4);

        let sr = max_sum_rate(&ortho(), &pc(4.0, 4.0, 0.0), &RateProfile::equal(), DEFAULT_DELTA_R).unwrap();
        assert_eq!(sr.r_sum, 0.0);
    }

    #[test]
    fn one_way_profile_matches_c21() {
        let pair = gen_channels(3, 0.5, 8).unwrap();
        let eff = effective(&pair);
        // silent S1 spends no relay power, so the profile reaches the one-way bound
        let p = pc(0.0, 3.0, 8.0);
        let sr = max_sum_rate(&eff, &p, &RateProfile::new(1.0).unwrap(), DEFAULT_DELTA_R).unwrap();
        let want = crate::bounds::c21(1.0, p.p_r, eff.theta1(), eff.theta2(), p.p2);
        assert!(
            (sr.r_sum - want).abs() <= 2.0 * DEFAULT_DELTA_R,
            "{} vs {want}",
            sr.r_sum
        );
        assert_eq!(sr.rates.r12, 0.0);
    }

    #[test]
    fn zero_source_power_collapses_region() {
        let pair = gen_channels(4, 0.5, 2).unwrap();
        let reg = rate_region_boundary(&effective(&pair), &pc(0.0, 10.0, 10.0), 5, 1e-3).unwrap();
        assert!(reg.points.iter().all(|p| p.rates.r12 == 0.0));
        assert!(reg.points.iter().any(|p| p.rates.r21 > 0.5));
    }

    #[test]
    fn power_axis_shape() {
        assert_eq!(power_axis(10.0, 1), vec![10.0]);
        let ax = power_axis(10.0, 3);
        assert!((ax[0] - 0.1).abs() < 1e-15 && (ax[1] - 1.0).abs() < 1e-14 && ax[2] == 10.0);
        assert_eq!(power_axis(0.0, 4), vec![0.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn real_expansion_preserves_forms(seed in 0u64..100_000, m in 2usize..5, rho in 0.0f64..1.0,
                                          g1 in 0.1f64..5.0, g2 in 0.1f64..5.0) {
            let pair = gen_channels(m, rho, seed).unwrap();
            let eff = effective(&pair);
            let p = pc(3.0, 7.0, 1.0);
            let q = build_qcqp(&eff, &p, g1, g2).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = [cscg(&mut rng), cscg(&mut rng), cscg(&mut rng), cscg(&mut rng)];
            let x = real8(&b);
            let cs = q.prob.constraints();
            for (e, f) in [(&q.e0, q.prob.f0()), (&q.e1, &cs[0]), (&q.e2, &cs[1])] {
                let c = herm_form(e, &b);
                prop_assert!(c.im.abs() < 1e-10 * (1.0 + c.re.abs()));
                prop_assert!((c.re - f.quad_form(&x)).abs() < 1e-10 * (1.0 + c.re.abs()));
            }
            let phib = q.phi.mul_vec(&b);
            prop_assert!((norm_sqr(&phib) - herm_form(&q.e0, &b).re).abs() < 1e-10 * (1.0 + norm_sqr(&phib)));
            let bf = Beamformer::from_vec(b);
            prop_assert!((relay_power_reduced(&bf, &eff, &p) - norm_sqr(&phib)).abs() < 1e-10 * (1.0 + norm_sqr(&phib)));
            for (g, gm) in [(&eff.g1, &q.g1), (&eff.g2, &q.g2)] {
                let gc = [g[0].conj(), g[1].conj()];
                let lhs = norm_sqr(&bf.b.adjoint().mul_vec(&gc));
                prop_assert!((lhs - norm_sqr(&gm.mul_vec(&b))).abs() < 1e-12 * (1.0 + lhs));
            }
        }

        #[test]
        fn min_power_meets_targets(seed in 0u64..100_000, rho in 0.0f64..0.95,
                                   r21 in 0.05f64..1.2, r12 in 0.05f64..1.2) {
            let pair = gen_channels(4, rho, seed).unwrap();
            let eff = effective(&pair);
            let p = pc(10.0, 10.0, 10.0);
            let (g1, g2) = (snr_for_rate(r21), snr_for_rate(r12));
            let mp = min_relay_power(&eff, &p, g1, g2).unwrap();
            if let Some(bf) = mp.beamformer {
                let (s21, s12) = snr_pair_reduced(&bf, &eff, &p);
                prop_assert!(s21 >= g1 * (1.0 - 1e-6));
                prop_assert!(s12 >= g2 * (1.0 - 1e-6));
                prop_assert!((mp.p_star - mp.relaxed_objective).abs() <= 1e-6 * mp.p_star);
                let r = rate_pair_reduced(&bf, &eff, &p);
                prop_assert!(r.r21 >= r21 - 1e-6 && r.r12 >= r12 - 1e-6);
            }
        }

        #[test]
        fn bisection_brackets_the_boundary(seed in 0u64..100_000, m in 2usize..6, rho in 0.0f64..0.99,
                                           a in 0.0f64..=1.0, p1 in 0.5f64..100.0, p2 in 0.5f64..100.0,
                                           pr in 0.5f64..100.0) {
            let pair = gen_channels(m, rho, seed).unwrap();
            let eff = effective(&pair);
            let p = pc(p1, p2, pr);
            let prof = RateProfile::new(a).unwrap();
            let sr = max_sum_rate(&eff, &p, &prof, 1e-3).unwrap();
            prop_assert!(sr.r_upper - sr.r_sum <= 1e-3);
            prop_assert!(sr.relay_power <= pr * (1.0 + 1e-9));
            prop_assert!(profile_feasible(&eff, &p, &prof, sr.r_sum).unwrap());
            let cub = crate::bounds::c_ub(&p, eff.theta1(), eff.theta2(), 33).value;
            prop_assert!(sr.r_sum <= cub + 1e-6);
            let r = rate_pair_reduced(&sr.beamformer, &eff, &p);
            prop_assert!(r.r21 >= sr.rates.r21 - 1e-6 && r.r12 >= sr.rates.r12 - 1e-6);
        }

        #[test]
        fn min_power_monotone_in_targets(seed in 0u64..100_000, rho in 0.0f64..0.95,
                                         g1 in 0.1f64..3.0, g2 in 0.1f64..3.0, bump in 1.01f64..1.5) {
            let pair = gen_channels(3, rho, seed).unwrap();
            let eff = effective(&pair);
            let p = pc(6.0, 9.0, 10.0);
            let base = min_relay_power(&eff, &p, g1, g2).unwrap().p_star;
            let up1 = min_relay_power(&eff, &p, g1 * bump, g2).unwrap().p_star;
            let up2 = min_relay_power(&eff, &p, g1, g2 * bump).unwrap().p_star;
            prop_assert!(up1 >= base * (1.0 - 1e-6));
            prop_assert!(up2 >= base * (1.0 - 1e-6));
        }
    }
}
