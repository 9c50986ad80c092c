//! Closed-form capacity bounds, scheme lower bounds and their high-SNR
//! asymptotics.
//!
//! `theta_i = ‖h_i‖²` and `rho = |h1^H h2|² / (theta1 theta2)` throughout.

use serde::Serialize;

use crate::channel::PowerConfig;
use crate::error::{invalid, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;
/// Interval width at which the golden-section searches stop.
pub const SEARCH_WIDTH: f64 = 1e-8;
pub const DEFAULT_GRID: usize = 33;

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// One-way capacity from S2 to S1 through the relay with power `p21` and
/// trace weight `kappa21`.
pub fn c21(kappa21: f64, p21: f64, theta1: f64, theta2: f64, p2: f64) -> f64 {
    if p21 <= 0.0 || p2 <= 0.0 {
        return 0.0;
    }
    let den = 1.0 + (theta2 / theta1) * p2 / p21 + kappa21 / (theta1 * p21);
    0.5 * log2_1p(theta2 * p2 / den)
}

/// One-way capacity from S1 to S2 through the relay with power `p12` and
/// trace weight `kappa12`.
pub fn c12(kappa12: f64, p12: f64, theta1: f64, theta2: f64, p1: f64) -> f64 {
    c21(kappa12, p12, theta2, theta1, p1)
}

/// `max over P21 in [0, P_R]` of `C21(kappa21, P21) + C12(1 - kappa21, P_R - P21)`.
/// Returns `(value, P21*)`.
pub fn c_ub_inner(pc: &PowerConfig, theta1: f64, theta2: f64, kappa21: f64, grid: usize) -> (f64, f64) {
    let f =
        |p21: f64| c21(kappa21, p21, theta1, theta2, pc.p2) + c12(1.0 - kappa21, pc.p_r - p21, theta1, theta2, pc.p1);
    let (x, v) = search_1d(|x| -f(x), 0.0, pc.p_r, grid);
    (-v, x)
}

/// Result of the min-max upper bound search.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CubResult {
    pub value: f64,
    pub kappa21_star: f64,
    pub p21_star: f64,
}

/// Tightest sum-capacity upper bound: `min over kappa21` of [`c_ub_inner`].
pub fn c_ub(pc: &PowerConfig, theta1: f64, theta2: f64, grid: usize) -> CubResult {
    assert!(grid >= 3, "grid must have at least three points");
    if pc.p_r <= 0.0 {
        return CubResult {
            value: 0.0,
            kappa21_star: 0.5,
            p21_star: 0.0,
        };
    }
    let (k, v) = search_1d(|k| c_ub_inner(pc, theta1, theta2, k, grid).0, 0.0, 1.0, grid);
    let (_, p21) = c_ub_inner(pc, theta1, theta2, k, grid);
    CubResult {
        value: v,
        kappa21_star: k,
        p21_star: p21,
    }
}

/// Minimises `f` on `[lo, hi]`: grid pre-scan, then golden section on the
/// bracket around the best grid point. If the grid values are not unimodal
/// the pre-scan is refined 64-fold before bracketing.
fn search_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64, grid: usize) -> (f64, f64) {
    if hi <= lo {
        return (lo, f(lo));
    }
    let scan = |n: usize| -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
                (x, f(x))
            })
            .collect()
    };
    let mut pts = scan(grid);
    if !is_unimodal(&pts) {
        pts = scan(64 * (grid - 1) + 1);
    }
    let k = (0..pts.len()).min_by(|&a, &b| pts[a].1.total_cmp(&pts[b].1)).unwrap();
    let mut a = pts[k.saturating_sub(1)].0;
    let mut b = pts[(k + 1).min(pts.len() - 1)].0;
    let width = SEARCH_WIDTH * (hi - lo).max(1.0);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > width {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    // the bracket search never does worse than the best grid point
    if fm <= pts[k].1 {
        (mid, fm)
    } else {
        pts[k]
    }
}

/// Non-increasing then non-decreasing, up to rounding.
fn is_unimodal(pts: &[(f64, f64)]) -> bool {
    let scale = pts.iter().map(|p| p.1.abs()).fold(0.0, f64::max).max(1.0);
    let eps = 1e-12 * scale;
    let mut rising = false;
    for w in pts.windows(2) {
        let d = w[1].1 - w[0].1;
        if d > eps {
            rising = true;
        } else if d < -eps && rising {
            return false;
        }
    }
    true
}

/// Simple upper bound: both directions at `kappa = 1/2` and full relay power.
pub fn c_ub0(pc: &PowerConfig, theta1: f64, theta2: f64) -> f64 {
    c21(0.5, pc.p_r, theta1, theta2, pc.p2) + c12(0.5, pc.p_r, theta1, theta2, pc.p1)
}

/// Upper bound for the symmetric channel (`theta1 = theta2 = theta`,
/// `p1 = p2 = P_R`).
pub fn c_ub_sym(theta: f64, p_r: f64) -> f64 {
    if p_r <= 0.0 {
        return 0.0;
    }
    let x = theta * p_r;
    log2_1p(x / (3.0 + 1.0 / x))
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(invalid(format!("rho must lie in [0, 1], got {rho}")));
    }
    Ok(())
}

/// Lower bound on the MRR-MRT sum-rate with equal gains.
pub fn r_lb_mr(pc: &PowerConfig, theta1: f64, theta2: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    if pc.p_r <= 0.0 {
        return Ok(0.0);
    }
    let (p1, p2, pr) = (pc.p1, pc.p2, pc.p_r);
    let shape = (1.0 + 3.0 * rho) / (1.0 + rho).powi(2);
    let d21 = (1.0 + (p1 + (theta2 / theta1) * p2) / pr) * shape + 2.0 / (theta1 * (1.0 + rho) * pr);
    let d12 = (1.0 + ((theta1 / theta2) * p1 + p2) / pr) * shape + 2.0 / (theta2 * (1.0 + rho) * pr);
    Ok(0.5 * log2_1p(theta2 * p2 / d21) + 0.5 * log2_1p(theta1 * p1 / d12))
}

/// Lower bound on the ZFR-ZFT sum-rate with equal gains. Undefined at `rho = 1`.
pub fn r_lb_zf(pc: &PowerConfig, theta1: f64, theta2: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    if rho >= 1.0 {
        return Err(invalid("the zero-forcing bound needs rho < 1"));
    }
    if pc.p_r <= 0.0 {
        return Ok(0.0);
    }
    let (p1, p2, pr) = (pc.p1, pc.p2, pc.p_r);
    let k = (theta1 + theta2) / (theta1 * theta2 * (1.0 - rho));
    let den = k * (1.0 + p1 / pr + p2 / pr) * (p1.max(p2) + k * (p1 + p2) / (pr + p1 + p2));
    Ok(log2_1p(2.0 * p1 * p2 / den))
}

/// High-SNR gaps `(C_UB^(S) - R_LB^MR, C_UB^(S) - R_LB^ZF)` for the symmetric
/// channel with `K1 = K2 = 1`.
pub fn asymptotic_gaps(rho: f64) -> Result<(f64, f64)> {
    Ok((asymptotic_gap_mr(rho)?, asymptotic_gap_zf(rho)?))
}

pub fn asymptotic_gap_mr(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(((1.0 + 3.0 * rho) / (1.0 + rho).powi(2)).log2())
}

pub fn asymptotic_gap_zf(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    if rho >= 1.0 {
        return Err(invalid("the zero-forcing gap needs rho < 1"));
    }
    Ok(-(1.0 - rho).log2())
}

/// Power ratios `K1 = P_R / p1`, `K2 = P_R / p2` held fixed as powers grow.
#[derive(Clone, Copy, Debug)]
pub struct PowerRatios {
    pub k1: f64,
    pub k2: f64,
}

/// Leading terms of `C_UB^(0)` as `P_R` grows (the `o(1)` remainder dropped).
pub fn asymptotic_c_ub0(p_r: f64, theta1: f64, theta2: f64, k: PowerRatios) -> f64 {
    p_r.log2() + 0.5 * (theta1 * theta2 / ((k.k2 + theta2 / theta1) * (k.k1 + theta1 / theta2))).log2()
}

pub fn asymptotic_r_lb_mr(p_r: f64, theta1: f64, theta2: f64, rho: f64, k: PowerRatios) -> f64 {
    let shape2 = ((1.0 + 3.0 * rho) / (1.0 + rho).powi(2)).powi(2);
    let den = (k.k2 + k.k1 / k.k2 + theta2 / theta1) * (k.k1 + k.k2 / k.k1 + theta1 / theta2) * shape2;
    p_r.log2() + 0.5 * (theta1 * theta2 / den).log2()
}

pub fn asymptotic_r_lb_zf(p_r: f64, theta1: f64, theta2: f64, rho: f64, k: PowerRatios) -> f64 {
    let den = (1.0 + k.k1.max(k.k2) + (k.k1 / k.k2).max(k.k2 / k.k1)) * (theta1 + theta2) / (2.0 * (1.0 - rho));
    p_r.log2() + (theta1 * theta2 / den).log2()
}

/// Every bound for one instance.
#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub theta1: f64,
    pub theta2: f64,
    pub rho: f64,
    pub p1: f64,
    pub p2: f64,
    pub p_r: f64,
    /// `C21` at the minimising `kappa21` and maximising `P21`.
    pub c21: f64,
    /// `C12` at `1 - kappa21*` and `P_R - P21*`.
    pub c12: f64,
    pub c_ub: f64,
    pub c_ub0: f64,
    /// Present when `theta1 = theta2` and `p1 = p2 = P_R`.
    pub c_ub_sym: Option<f64>,
    pub r_lb_mr: f64,
    /// Absent at `rho = 1`.
    pub r_lb_zf: Option<f64>,
    pub kappa21_star: f64,
    pub p21_star: f64,
}

pub fn bounds_report(pc: &PowerConfig, theta1: f64, theta2: f64, rho: f64) -> Result<BoundsReport> {
    if !(theta1 > 0.0 && theta2 > 0.0) {
        return Err(invalid("channel gains must be positive"));
    }
    let cub = c_ub(pc, theta1, theta2, DEFAULT_GRID);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    let symmetric = close(theta1, theta2) && close(pc.p1, pc.p2) && close(pc.p1, pc.p_r);
    Ok(BoundsReport {
        theta1,
        theta2,
        rho,
        p1: pc.p1,
        p2: pc.p2,
        p_r: pc.p_r,
        c21: c21(cub.kappa21_star, cub.p21_star, theta1, theta2, pc.p2),
        c12: c12(1.0 - cub.kappa21_star, pc.p_r - cub.p21_star, theta1, theta2, pc.p1),
        c_ub: cub.value,
        c_ub0: c_ub0(pc, theta1, theta2),
        c_ub_sym: symmetric.then(|| c_ub_sym(theta1, pc.p_r)),
        r_lb_mr: r_lb_mr(pc, theta1, theta2, rho)?,
        r_lb_zf: if rho < 1.0 {
            Some(r_lb_zf(pc, theta1, theta2, rho)?)
        } else {
            None
        },
        kappa21_star: cub.kappa21_star,
        p21_star: cub.p21_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pc(p1: f64, p2: f64, pr: f64) -> PowerConfig {
        PowerConfig::new(p1, p2, pr).unwrap()
    }

    #[test]
    fn c21_examples() {
        let want = 0.5 * (1.0f64 + 10.0 / 2.05).log2();
        assert!((c21(0.5, 10.0, 1.0, 1.0, 10.0) - want).abs() < 1e-14);
        assert!((want - 1.2777).abs() < 1e-4);
        assert_eq!(c21(0.5, 0.0, 1.0, 1.0, 10.0), 0.0);
        assert!(c21(0.5, 1e-12, 1.0, 1.0, 10.0) < 1e-10);
        let lim = 0.5 * (1.0f64 + 2.0 * 3.0).log2();
        assert!((c21(0.0, 1e12, 0.7, 2.0, 3.0) - lim).abs() < 1e-10);
        // c12 mirrors c21 with the roles exchanged
        assert_eq!(c12(0.3, 4.0, 2.0, 0.5, 7.0), c21(0.3, 4.0, 0.5, 2.0, 7.0));
    }

    #[test]
    fn c_ub0_examples() {
        let v = c_ub0(&pc(10.0, 10.0, 10.0), 1.0, 1.0);
        assert!((v - (1.0f64 + 10.0 / 2.05).log2()).abs() < 1e-14);
        assert!((v - 2.5553).abs() < 1e-4);
        let lim = 0.5 * (1.0f64 + 2.0 * 3.0).log2() + 0.5 * (1.0f64 + 0.5 * 4.0).log2();
        assert!((c_ub0(&pc(4.0, 3.0, 1e13), 0.5, 2.0) - lim).abs() < 1e-9);
    }

    #[test]
    fn c_ub_sym_examples() {
        assert!((c_ub_sym(1.0, 10.0) - (1.0f64 + 10.0 / 3.1).log2()).abs() < 1e-14);
        assert!((c_ub_sym(1.0, 10.0) - 2.0793).abs() < 1e-4);
        assert_eq!(c_ub_sym(1.0, 0.0), 0.0);
        assert!((c_ub_sym(1.0, 1e4) - (1.0f64 + 1e4 / 3.0001).log2()).abs() < 1e-12);
    }

    #[test]
    fn symmetric_inner_max_at_half_power() {
        let p = pc(10.0, 10.0, 10.0);
        let (v, p21) = c_ub_inner(&p, 1.0, 1.0, 0.5, DEFAULT_GRID);
        assert!((p21 - 5.0).abs() < 1e-6);
        assert!((v - c_ub_sym(1.0, 10.0)).abs() < 1e-12);
        let cub = c_ub(&p, 1.0, 1.0, DEFAULT_GRID);
        assert!(cub.value <= c_ub_sym(1.0, 10.0) + 1e-6);
        assert!((cub.kappa21_star - 0.5).abs() < 1e-4);
    }

    #[test]
    fn lower_bound_examples() {
        let p = pc(10.0, 10.0, 10.0);
        let mr = r_lb_mr(&p, 1.0, 1.0, 0.0).unwrap();
        assert!((mr - (1.0f64 + 10.0 / 3.2).log2()).abs() < 1e-14);
        assert!((mr - 2.0443).abs() < 1e-4);
        let zf = r_lb_zf(&p, 1.0, 1.0, 0.0).unwrap();
        assert!((zf - (1.0f64 + 200.0 / 68.0).log2()).abs() < 1e-14);
        assert!((zf - 1.9786).abs() < 1e-4);
        assert!(r_lb_zf(&p, 1.0, 1.0, 1.0).is_err());
        assert!(r_lb_mr(&p, 1.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn gap_examples() {
        let (mr, zf) = asymptotic_gaps(1.0 / 3.0).unwrap();
        assert!((mr - (9.0f64 / 8.0).log2()).abs() < 1e-14);
        assert!((mr - 0.1699).abs() < 1e-4);
        assert!((zf - 0.5850).abs() < 1e-4);
        assert_eq!(asymptotic_gaps(0.0).unwrap(), (0.0, 0.0));
        assert!(asymptotic_gap_zf(1.0).is_err());
        assert!(asymptotic_gap_mr(1.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn gap_mr_peaks_at_one_third() {
        let scan: Vec<(f64, f64)> = (0..=3000)
            .map(|i| {
                let r = i as f64 / 3000.0;
                (r, asymptotic_gap_mr(r).unwrap())
            })
            .collect();
        let best = scan
            .iter()
            .cloned()
            .fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
        assert!((best.0 - 1.0 / 3.0).abs() < 1e-3);
        assert!((best.1 - (9.0f64 / 8.0).log2()).abs() < 1e-9);
        assert!(scan.iter().all(|p| p.1 >= -1e-15));
    }

    #[test]
    fn high_snr_gaps_converge() {
        let rho = 1.0 / 3.0;
        let p = pc(1e4, 1e4, 1e4);
        let sym = c_ub_sym(1.0, 1e4);
        let (gmr, gzf) = asymptotic_gaps(rho).unwrap();
        assert!((sym - r_lb_mr(&p, 1.0, 1.0, rho).unwrap() - gmr).abs() < 0.01);
        assert!((sym - r_lb_zf(&p, 1.0, 1.0, rho).unwrap() - gzf).abs() < 0.01);
    }

    #[test]
    fn prelog_is_one_bit_per_doubling() {
        let (t1, t2, rho) = (0.8, 1.3, 0.4);
        let at = |pr: f64| pc(pr, pr / 2.0, pr);
        let big = 1e8;
        let d0 = c_ub0(&at(2.0 * big), t1, t2) - c_ub0(&at(big), t1, t2);
        let dm = r_lb_mr(&at(2.0 * big), t1, t2, rho).unwrap() - r_lb_mr(&at(big), t1, t2, rho).unwrap();
        let dz = r_lb_zf(&at(2.0 * big), t1, t2, rho).unwrap() - r_lb_zf(&at(big), t1, t2, rho).unwrap();
        for d in [d0, dm, dz] {
            assert!((d - 1.0).abs() < 1e-6, "{d}");
        }
    }

    #[test]
    fn asymptotic_forms_match_finite_bounds() {
        let (t1, t2, rho) = (0.8, 1.3, 0.4);
        let pr = 1e9;
        for k in [PowerRatios { k1: 1.0, k2: 1.0 }, PowerRatios { k1: 2.0, k2: 2.0 }] {
            let p = pc(pr / k.k1, pr / k.k2, pr);
            assert!((c_ub0(&p, t1, t2) - asymptotic_c_ub0(pr, t1, t2, k)).abs() < 1e-6);
            assert!((r_lb_mr(&p, t1, t2, rho).unwrap() - asymptotic_r_lb_mr(pr, t1, t2, rho, k)).abs() < 1e-6);
            assert!((r_lb_zf(&p, t1, t2, rho).unwrap() - asymptotic_r_lb_zf(pr, t1, t2, rho, k)).abs() < 1e-6);
        }
        // unequal ratios: C_UB^(0) and ZF still match their finite forms
        let k = PowerRatios { k1: 1.0, k2: 2.0 };
        let p = pc(pr / k.k1, pr / k.k2, pr);
        assert!((c_ub0(&p, t1, t2) - asymptotic_c_ub0(pr, t1, t2, k)).abs() < 1e-6);
        assert!((r_lb_zf(&p, t1, t2, rho).unwrap() - asymptotic_r_lb_zf(pr, t1, t2, rho, k)).abs() < 1e-6);
        // the MR expression places K1/K2 where the finite bound's limit has K2/K1
        let limit = {
            let s = (1.0 + 3.0 * rho) / (1.0 + rho).powi(2);
            let den = (k.k2 + k.k2 / k.k1 + t2 / t1) * (k.k1 + k.k1 / k.k2 + t1 / t2) * s * s;
            pr.log2() + 0.5 * (t1 * t2 / den).log2()
        };
        assert!((r_lb_mr(&p, t1, t2, rho).unwrap() - limit).abs() < 1e-6);
        assert!((asymptotic_r_lb_mr(pr, t1, t2, rho, k) - limit).abs() > 0.1);
    }

    #[test]
    fn report_serializes() {
        let r = bounds_report(&pc(10.0, 10.0, 10.0), 1.0, 1.0, 0.5).unwrap();
        assert!(r.c_ub_sym.is_some());
        assert!(r.c_ub <= r.c_ub0 + 1e-9);
        let v: serde_json::Value = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert!(v["c_ub"].as_f64().unwrap() > 0.0);
        let r = bounds_report(&pc(10.0, 5.0, 10.0), 1.0, 1.0, 1.0).unwrap();
        assert!(r.c_ub_sym.is_none() && r.r_lb_zf.is_none());
    }

    proptest! {
        #[test]
        fn c_ub_below_c_ub0(p1 in 0.1f64..100.0, p2 in 0.1f64..100.0, pr in 0.1f64..100.0,
                            t1 in 0.1f64..3.0, t2 in 0.1f64..3.0) {
            let p = pc(p1, p2, pr);
            let cub = c_ub(&p, t1, t2, DEFAULT_GRID);
            prop_assert!(cub.value <= c_ub0(&p, t1, t2) + 1e-9);
            prop_assert!(cub.value >= 0.0);
            // the min over kappa is no larger than the kappa = 1/2 slice
            prop_assert!(cub.value <= c_ub_inner(&p, t1, t2, 0.5, DEFAULT_GRID).0 + 1e-12);
        }

        #[test]
        fn inner_search_beats_fine_grid(p1 in 0.1f64..100.0, p2 in 0.1f64..100.0, pr in 0.1f64..100.0,
                                        t1 in 0.1f64..3.0, t2 in 0.1f64..3.0, k in 0.0f64..=1.0) {
            let p = pc(p1, p2, pr);
            let (v, _) = c_ub_inner(&p, t1, t2, k, DEFAULT_GRID);
            for i in 0..=400 {
                let x = pr * i as f64 / 400.0;
                let g = c21(k, x, t1, t2, p2) + c12(1.0 - k, pr - x, t1, t2, p1);
                prop_assert!(v >= g - 1e-12);
            }
        }
    }
}
