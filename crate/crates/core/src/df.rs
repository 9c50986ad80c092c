//! Decode-and-forward baseline: the MAC pentagon, the BC region by weighted
//! sum-rate maximisation, and their time-shared intersection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{effective, ChannelPair, EffectiveChannel, RatePair};
use crate::error::{invalid, Error, Result};
use crate::linalg::{dot_h, eig_herm2_matrix, CMatrix, C64};
use crate::region::{BoundaryPoint, RegionBoundary};

pub const DEFAULT_TAUS: usize = 65;
pub const DEFAULT_WEIGHTS: usize = 65;
pub const DEFAULT_BC_TOL: f64 = 1e-10;
pub const BC_MAX_ITER: usize = 20_000;

/// Rate caps of the multiple-access phase, before time scaling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacPentagon {
    /// `r21 <= log2(1 + P2 θ2)`.
    pub c1: f64,
    /// `r12 <= log2(1 + P1 θ1)`.
    pub c2: f64,
    /// `r21 + r12 <= log2 det(I + P1 h1 h1^H + P2 h2 h2^H)`.
    pub c_sum: f64,
}

impl MacPentagon {
    /// Vertices of `scale` times the pentagon, counter-clockwise in the
    /// `(r21, r12)` plane.
    pub fn polygon(&self, scale: f64) -> Polygon {
        let (c1, c2, cs) = (self.c1 * scale, self.c2 * scale, self.c_sum * scale);
        Polygon::new(vec![
            [0.0, 0.0],
            [c1, 0.0],
            [c1, (cs - c1).max(0.0)],
            [(cs - c2).max(0.0), c2],
            [0.0, c2],
        ])
    }

    pub fn contains(&self, r: &RatePair, slack: f64) -> bool {
        r.r21 <= self.c1 + slack && r.r12 <= self.c2 + slack && r.r21 + r.r12 <= self.c_sum + slack
    }
}

pub fn mac_region(pair: &ChannelPair, p1: f64, p2: f64) -> Result<MacPentagon> {
    if !(p1 >= 0.0 && p2 >= 0.0) {
        return Err(invalid("MAC powers must be non-negative"));
    }
    let (t1, t2) = (pair.theta1(), pair.theta2());
    let cross = dot_h(pair.h1(), pair.h2()).norm_sqr();
    // det(I + D^{1/2} G D^{1/2}) for the 2×2 Gram matrix G of [h1, h2]
    let det = ((1.0 + p1 * t1) * (1.0 + p2 * t2) - p1 * p2 * cross).max(1.0);
    Ok(MacPentagon {
        c1: (p2 * t2).ln_1p() / std::f64::consts::LN_2,
        c2: (p1 * t1).ln_1p() / std::f64::consts::LN_2,
        c_sum: det.log2(),
    })
}

/// A convex polygon with counter-clockwise vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<[f64; 2]>,
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl Polygon {
    /// Drops consecutive duplicate vertices.
    pub fn new(mut vertices: Vec<[f64; 2]>) -> Self {
        vertices.dedup();
        while vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        Self { vertices }
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        (0..n)
            .map(|i| v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1])
            .sum::<f64>()
            * 0.5
    }

    /// Whether `p` lies inside, allowing `slack` outside each edge.
    pub fn contains(&self, p: [f64; 2], slack: f64) -> bool {
        let v = &self.vertices;
        let n = v.len();
        (0..n).all(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            len == 0.0 || cross(a, b, p) / len >= -slack
        })
    }

    /// Intersection with another convex polygon (Sutherland–Hodgman).
    pub fn clip(&self, clipper: &Polygon) -> Polygon {
        let c = &clipper.vertices;
        if c.len() < 3 || clipper.area() <= 0.0 {
            // a point or segment has no inside half-planes to clip against
            return Polygon::new(c.iter().copied().filter(|&v| self.contains(v, 0.0)).collect());
        }
        let mut out = self.vertices.clone();
        for i in 0..c.len() {
            if out.is_empty() {
                break;
            }
            let (a, b) = (c[i], c[(i + 1) % c.len()]);
            if a == b {
                continue;
            }
            let input = std::mem::take(&mut out);
            for j in 0..input.len() {
                let cur = input[j];
                let prev = input[(j + input.len() - 1) % input.len()];
                let dc = cross(a, b, cur);
                let dp = cross(a, b, prev);
                if dc >= 0.0 {
                    if dp < 0.0 {
                        out.push(intersect(prev, cur, dp, dc));
                    }
                    out.push(cur);
                } else if dp >= 0.0 {
                    out.push(intersect(prev, cur, dp, dc));
                }
            }
        }
        Polygon::new(out)
    }

    pub fn scaled(&self, s: f64) -> Polygon {
        Polygon::new(self.vertices.iter().map(|v| [v[0] * s, v[1] * s]).collect())
    }

    /// Pareto-optimal vertices as a region boundary.
    pub fn boundary(&self) -> RegionBoundary {
        RegionBoundary::pareto_envelope(
            self.vertices
                .iter()
                .map(|v| BoundaryPoint::bare(RatePair::new(v[0], v[1])))
                .collect(),
        )
    }
}

fn intersect(p: [f64; 2], q: [f64; 2], dp: f64, dq: f64) -> [f64; 2] {
    let t = dp / (dp - dq);
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

/// One weighted sum-rate maximiser of the broadcast phase.
#[derive(Clone, Debug)]
pub struct BcPoint {
    pub w21: f64,
    pub w12: f64,
    /// Rates before time scaling.
    pub rates: RatePair,
    /// Reduced covariance `Q` with `S_R = U* Q U^T`.
    pub q: CMatrix,
    pub iterations: usize,
    pub kkt_residual: f64,
}

/// `h_i^T S_R h_i* = u_i^H Q u_i` with `u_i = conj(g_i)`.
fn reduced_gains(eff: &EffectiveChannel) -> [[C64; 2]; 2] {
    [
        [eff.g1[0].conj(), eff.g1[1].conj()],
        [eff.g2[0].conj(), eff.g2[1].conj()],
    ]
}

fn quad(q: &CMatrix, u: &[C64; 2]) -> f64 {
    dot_h(u, &q.mul_vec(u)).re.max(0.0)
}

/// Euclidean projection onto `{Q ⪰ 0, tr Q <= P}`.
pub fn project_capped_psd(q: &CMatrix, p: f64) -> CMatrix {
    let h = q.add(&q.adjoint()).scale_re(0.5);
    let (lam, v) = eig_herm2_matrix(&h);
    let clipped = [lam[0].max(0.0), lam[1].max(0.0)];
    let mu = if clipped[0] + clipped[1] <= p {
        0.0
    } else {
        // water level with max(lam - mu, 0) summing to P
        let hi = lam[0].max(lam[1]);
        let lo = lam[0].min(lam[1]);
        let both = 0.5 * (lam[0] + lam[1] - p);
        if lo - both > 0.0 {
            both
        } else {
            hi - p
        }
    };
    let mut d = [(lam[0] - mu).max(0.0), (lam[1] - mu).max(0.0)];
    if mu > 0.0 {
        // pin the trace against rounding in large inputs
        let s = p / (d[0] + d[1]);
        d = [d[0] * s, d[1] * s];
    }
    let mut out = CMatrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = v[(i, 0)] * v[(j, 0)].conj() * d[0] + v[(i, 1)] * v[(j, 1)].conj() * d[1];
        }
    }
    out
}

/// Weighted sum-rate maximisation over the relay covariance, restricted
/// without loss to `span{h1*, h2*}` and solved by projected gradient ascent
/// with Armijo backtracking.
pub fn bc_wsrmax(pair: &ChannelPair, p_r: f64, w21: f64, w12: f64, tol: f64) -> Result<BcPoint> {
    bc_wsrmax_reduced(&effective(pair), p_r, w21, w12, tol)
}

pub fn bc_wsrmax_reduced(eff: &EffectiveChannel, p_r: f64, w21: f64, w12: f64, tol: f64) -> Result<BcPoint> {
    if !(w21 >= 0.0 && w12 >= 0.0) || w21 + w12 <= 0.0 {
        return Err(invalid("weights must be non-negative and not both zero"));
    }
    if !(p_r >= 0.0) {
        return Err(invalid("relay power must be non-negative"));
    }
    let u = reduced_gains(eff);
    let ln2 = std::f64::consts::LN_2;
    let obj = |q: &CMatrix| (w21 * quad(q, &u[0]).ln_1p() + w12 * quad(q, &u[1]).ln_1p()) / ln2;
    let grad = |q: &CMatrix| {
        let mut g = CMatrix::zeros(2, 2);
        for (w, ui) in [(w21, &u[0]), (w12, &u[1])] {
            let c = w / (ln2 * (1.0 + quad(q, ui)));
            for a in 0..2 {
                for b in 0..2 {
                    g[(a, b)] += ui[a] * ui[b].conj() * c;
                }
            }
        }
        g
    };
    // Lipschitz bound of the gradient: sum of w_i ‖u_i‖⁴ / ln 2
    let lip = (w21 * (u[0][0].norm_sqr() + u[0][1].norm_sqr()).powi(2)
        + w12 * (u[1][0].norm_sqr() + u[1][1].norm_sqr()).powi(2))
        / ln2;
    let t_safe = 1.0 / lip.max(f64::MIN_POSITIVE);
    let mut q = CMatrix::identity(2).scale_re(p_r / 2.0);
    let mut f = obj(&q);
    let mut step = t_safe;
    let mut residual = f64::INFINITY;
    let mut it = 0;
    let scale = p_r.max(1.0);
    while it < BC_MAX_ITER {
        let g = grad(&q);
        residual = project_capped_psd(&q.add(&g), p_r).sub(&q).frobenius_norm();
        if residual <= tol * scale {
            break;
        }
        it += 1;
        let mut t = step.max(t_safe);
        loop {
            let cand = project_capped_psd(&q.add(&g.scale_re(t)), p_r);
            let d = cand.sub(&q);
            let fc = obj(&cand);
            // Armijo along the projection arc; steps up to 1/L always ascend
            let slope: f64 = g
                .as_slice()
                .iter()
                .zip(d.as_slice())
                .map(|(a, b)| (a.conj() * b).re)
                .sum();
            if fc >= f + 1e-4 * slope || t <= t_safe {
                q = cand;
                f = fc;
                break;
            }
            t = (t * 0.5).max(t_safe);
        }
        step = (t * 2.0).min(1e4 * t_safe);
    }
    if residual > tol * scale {
        return Err(Error::NumericalFailure(format!(
            "broadcast WSRMax did not converge (KKT residual {residual:e})"
        )));
    }
    let rates = RatePair::new(quad(&q, &u[0]).ln_1p() / ln2, quad(&q, &u[1]).ln_1p() / ln2);
    Ok(BcPoint {
        w21,
        w12,
        rates,
        q,
        iterations: it,
        kkt_residual: residual,
    })
}

/// Full `M×M` relay covariance `U* Q U^T` of a reduced solution.
pub fn bc_full_covariance(eff: &EffectiveChannel, q: &CMatrix) -> CMatrix {
    let uc = eff.u.conj();
    uc.mul(q).mul(&eff.u.transpose())
}

/// Broadcast-phase frontier sampled at weights `(1 - k/(n-1), k/(n-1))`.
#[derive(Clone, Debug)]
pub struct BcBoundary {
    pub points: Vec<BcPoint>,
}

impl BcBoundary {
    pub fn rates(&self) -> Vec<RatePair> {
        self.points.iter().map(|p| p.rates).collect()
    }

    /// Down-closed convex polygon under `scale` times the sampled frontier.
    pub fn polygon(&self, scale: f64) -> Polygon {
        let mut pts: Vec<[f64; 2]> = self
            .points
            .iter()
            .map(|p| [p.rates.r21 * scale, p.rates.r12 * scale])
            .collect();
        pts.sort_by(|a, b| b[0].total_cmp(&a[0]).then(a[1].total_cmp(&b[1])));
        let mut v = vec![[0.0, 0.0], [pts[0][0], 0.0]];
        // keep only the upper hull so the polygon stays convex
        let mut hull: Vec<[f64; 2]> = Vec::new();
        for p in pts {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        let top = hull.last().map(|p| p[1]).unwrap_or(0.0);
        v.extend(hull);
        v.push([0.0, top]);
        Polygon::new(v)
    }

    pub fn boundary(&self) -> RegionBoundary {
        RegionBoundary::pareto_envelope(self.rates().into_iter().map(BoundaryPoint::bare).collect())
    }
}

pub fn bc_boundary(pair: &ChannelPair, p_r: f64, n_weights: usize, tol: f64) -> Result<BcBoundary> {
    if n_weights < 2 {
        return Err(invalid("need at least two weight pairs"));
    }
    let eff = effective(pair);
    let points = (0..n_weights)
        .into_par_iter()
        .map(|k| {
            let w12 = k as f64 / (n_weights - 1) as f64;
            bc_wsrmax_reduced(&eff, p_r, 1.0 - w12, w12, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BcBoundary { points })
}

/// `tau · MAC ∩ (1 - tau) · BC` as a polygon.
pub fn df_region_at_tau(mac: &MacPentagon, bc: &BcBoundary, tau: f64) -> Polygon {
    mac.polygon(tau).clip(&bc.polygon(1.0 - tau))
}

/// DF region for one time split, tagged with `tau` for CSV output.
#[derive(Clone, Debug)]
pub struct TauRegion {
    pub tau: f64,
    pub polygon: Polygon,
}

/// All pieces of the DF comparison.
#[derive(Clone, Debug)]
pub struct DfRegion {
    pub mac: MacPentagon,
    pub bc: BcBoundary,
    pub per_tau: Vec<TauRegion>,
    /// Pareto envelope of the union over `tau`.
    pub envelope: RegionBoundary,
}

pub fn df_capacity_region(
    pair: &ChannelPair,
    p1: f64,
    p2: f64,
    p_r: f64,
    n_tau: usize,
    n_weights: usize,
) -> Result<DfRegion> {
    if n_tau < 2 {
        return Err(invalid("need at least two time splits"));
    }
    let taus: Vec<f64> = (0..n_tau).map(|k| k as f64 / (n_tau - 1) as f64).collect();
    df_capacity_region_on_taus(pair, p1, p2, p_r, &taus, n_weights)
}

pub fn df_capacity_region_on_taus(
    pair: &ChannelPair,
    p1: f64,
    p2: f64,
    p_r: f64,
    taus: &[f64],
    n_weights: usize,
) -> Result<DfRegion> {
    if taus.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(invalid("tau must lie in [0, 1]"));
    }
    let mac = mac_region(pair, p1, p2)?;
    let bc = bc_boundary(pair, p_r, n_weights, DEFAULT_BC_TOL)?;
    let per_tau: Vec<TauRegion> = taus
        .iter()
        .map(|&tau| TauRegion {
            tau,
            polygon: df_region_at_tau(&mac, &bc, tau),
        })
        .collect();
    let envelope = RegionBoundary::union(per_tau.iter().map(|t| t.polygon.boundary()).collect::<Vec<_>>().iter());
    Ok(DfRegion {
        mac,
        bc,
        per_tau,
        envelope,
    })
}

/// Whether `½ MAC ⊆ ½ BC`, checked on the pentagon vertices.
pub fn half_mac_within_half_bc(mac: &MacPentagon, bc: &BcBoundary, slack: f64) -> bool {
    let poly = bc.polygon(0.5);
    mac.polygon(0.5).vertices.iter().all(|&v| poly.contains(v, slack))
}
