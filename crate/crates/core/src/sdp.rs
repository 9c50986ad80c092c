//! A small dense SDP solver for
//!
//! ```text
//! minimise tr(F0 X)  subject to  tr(Fi X) >= 1 (i = 1..m),  X ⪰ 0
//! ```
//!
//! and the exact recovery of a rank-one optimum from any optimal `X`.
//!
//! The solver is a homogeneous self-dual interior-point method with
//! Nesterov–Todd scaling and Mehrotra predictor–corrector steps. The linear
//! constraints carry explicit slacks, so the cone is `S^n_+ × R^m_+`.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::linalg::{eig_sym, RMatrix};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 100;
/// Largest supported dimension.
pub const MAX_DIM: usize = 32;
/// Eigenvalues below this fraction of the largest one count as zero when
/// decomposing a solution.
pub const RANK_CUTOFF: f64 = 1e-9;

const EIG_TOL: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct SdpProblem {
    f0: RMatrix,
    constraints: Vec<RMatrix>,
}

impl SdpProblem {
    pub fn new(f0: RMatrix, constraints: Vec<RMatrix>) -> Result<Self> {
        let n = f0.rows();
        if n == 0 || f0.cols() != n {
            return Err(invalid("F0 must be square and non-empty"));
        }
        if n > MAX_DIM {
            return Err(invalid(format!("dimension {n} exceeds {MAX_DIM}")));
        }
        if constraints.is_empty() {
            return Err(invalid("at least one trace constraint is required"));
        }
        for (k, f) in std::iter::once(&f0).chain(&constraints).enumerate() {
            if (f.rows(), f.cols()) != (n, n) {
                return Err(invalid(format!("F{k} has the wrong shape")));
            }
            if f.as_slice().iter().any(|x| !x.is_finite()) {
                return Err(invalid(format!("F{k} has non-finite entries")));
            }
            if f.asymmetry() > 1e-12 * f.max_abs().max(1.0) {
                return Err(invalid(format!("F{k} is not symmetric")));
            }
        }
        Ok(Self {
            f0: f0.symmetrize(),
            constraints: constraints.iter().map(|f| f.symmetrize()).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.f0.rows()
    }

    pub fn f0(&self) -> &RMatrix {
        &self.f0
    }

    pub fn constraints(&self) -> &[RMatrix] {
        &self.constraints
    }

    pub fn objective(&self, x: &RMatrix) -> f64 {
        self.f0.inner(x)
    }

    pub fn constraint_values(&self, x: &RMatrix) -> Vec<f64> {
        self.constraints.iter().map(|f| f.inner(x)).collect()
    }

    /// Copy with `F0` scaled by `c`.
    pub fn with_scaled_objective(&self, c: f64) -> Self {
        Self {
            f0: self.f0.scale(c),
            constraints: self.constraints.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub x: RMatrix,
    /// `tr(F0 X)`.
    pub objective: f64,
    /// `Σ y_i`.
    pub dual_objective: f64,
    pub y: Vec<f64>,
    pub iterations: usize,
    /// Rank-one factor, filled in by [`SdpSolution::with_rank_one`].
    pub x_hat: Option<Vec<f64>>,
    /// Human-readable description of an infeasibility certificate.
    pub certificate: Option<String>,
}

impl SdpSolution {
    /// Runs [`extract_rank_one`] and stores the factor.
    pub fn with_rank_one(mut self, prob: &SdpProblem) -> Result<Self> {
        let x = extract_rank_one(&self, prob)?;
        self.x_hat = Some(x);
        Ok(self)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SdpSettings {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

pub fn solve_sdp(prob: &SdpProblem, tol: f64) -> SdpSolution {
    solve_sdp_with(
        prob,
        &SdpSettings {
            tol,
            ..SdpSettings::default()
        },
    )
}

pub fn solve_sdp_with(prob: &SdpProblem, settings: &SdpSettings) -> SdpSolution {
    // normalise: unit-norm constraint matrices, right-hand side with unit max,
    // unit-norm objective
    let norms: Vec<f64> = prob.constraints.iter().map(|f| f.frobenius_norm()).collect();
    let n = prob.n();
    if let Some(k) = norms.iter().position(|&v| v == 0.0) {
        // tr(0 X) >= 1 is impossible
        return failed_solution(
            n,
            prob.constraints.len(),
            SdpStatus::Infeasible,
            Some(format!("constraint {} has a zero matrix", k + 1)),
            0,
        );
    }
    let a: Vec<RMatrix> = prob
        .constraints
        .iter()
        .zip(&norms)
        .map(|(f, nf)| f.scale(1.0 / nf))
        .collect();
    let beta = norms.iter().map(|v| 1.0 / v).fold(0.0, f64::max);
    let b: Vec<f64> = norms.iter().map(|v| 1.0 / (v * beta)).collect();
    let cnorm = prob.f0.frobenius_norm();
    let cscale = if cnorm > 0.0 { cnorm } else { 1.0 };
    let c = prob.f0.scale(1.0 / cscale);

    let out = hsd(&c, &a, &b, settings);
    let m = a.len();
    match out.status {
        SdpStatus::Optimal => {
            let x = out.x.scale(beta);
            let y: Vec<f64> = out.y.iter().zip(&norms).map(|(yi, nf)| cscale * yi / nf).collect();
            SdpSolution {
                status: SdpStatus::Optimal,
                objective: prob.objective(&x),
                dual_objective: y.iter().sum(),
                x,
                y,
                iterations: out.iterations,
                x_hat: None,
                certificate: None,
            }
        }
        status => failed_solution(n, m, status, out.certificate, out.iterations),
    }
}

fn failed_solution(
    n: usize,
    m: usize,
    status: SdpStatus,
    certificate: Option<String>,
    iterations: usize,
) -> SdpSolution {
    SdpSolution {
        status,
        x: RMatrix::zeros(n, n),
        objective: f64::NAN,
        dual_objective: f64::NAN,
        y: vec![f64::NAN; m],
        iterations,
        x_hat: None,
        certificate,
    }
}

struct HsdOutcome {
    status: SdpStatus,
    x: RMatrix,
    y: Vec<f64>,
    iterations: usize,
    certificate: Option<String>,
}

struct Direction {
    dxt: RMatrix,
    dzt: RMatrix,
    dz: RMatrix,
    ds: Vec<f64>,
    dw: Vec<f64>,
    dy: Vec<f64>,
    dtau: f64,
    dkappa: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn vnorm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `M x = r` for small symmetric positive definite `M` by Cholesky.
fn solve_spd(m: &RMatrix, r: &[f64]) -> Option<Vec<f64>> {
    let n = r.len();
    let mut l = RMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    let mut z = vec![0.0; n];
    for i in 0..n {
        let mut s = r[i];
        for k in 0..i {
            s -= l[(i, k)] * z[k];
        }
        z[i] = s / l[(i, i)];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    Some(x)
}

/// Largest `alpha` with `diag(lam) + alpha * d ⪰ 0`, or infinity.
fn psd_step(lam: &[f64], d: &RMatrix) -> f64 {
    let n = lam.len();
    let mut s = RMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = d[(i, j)] / (lam[i] * lam[j]).sqrt();
        }
    }
    match eig_sym(&s.symmetrize(), EIG_TOL) {
        Ok(e) if e.min_value() < 0.0 => -1.0 / e.min_value(),
        Ok(_) => f64::INFINITY,
        Err(_) => 0.0,
    }
}

fn vec_step(v: &[f64], dv: &[f64]) -> f64 {
    v.iter()
        .zip(dv)
        .filter(|(_, d)| **d < 0.0)
        .map(|(x, d)| -x / d)
        .fold(f64::INFINITY, f64::min)
}

fn min_eig(x: &RMatrix) -> f64 {
    eig_sym(&x.symmetrize(), EIG_TOL)
        .map(|e| e.min_value())
        .unwrap_or(f64::NEG_INFINITY)
}

fn hsd(c: &RMatrix, a: &[RMatrix], b: &[f64], settings: &SdpSettings) -> HsdOutcome {
    let n = c.rows();
    let m = a.len();
    let nu = (n + m + 1) as f64;
    let tol = settings.tol;

    let mut x = RMatrix::identity(n);
    let mut z = RMatrix::identity(n);
    let mut s = vec![1.0; m];
    let mut w = vec![1.0; m];
    let mut y = vec![1.0; m];
    let mut tau = 1.0;
    let mut kappa = 1.0;

    let bnorm = vnorm(b);
    let cnorm = c.frobenius_norm();

    for iter in 0..settings.max_iter {
        let ax: Vec<f64> = a.iter().map(|ai| ai.inner(&x)).collect();
        let rp: Vec<f64> = (0..m).map(|i| b[i] * tau - ax[i] + s[i]).collect();
        let mut rd = c.scale(tau).sub(&z);
        for i in 0..m {
            rd = rd.axpy(-y[i], &a[i]);
        }
        let rdl: Vec<f64> = (0..m).map(|i| y[i] - w[i]).collect();
        let cx = c.inner(&x);
        let by = dot(b, &y);
        let rg = by - cx - kappa;
        let mu = (x.inner(&z) + dot(&s, &w) + tau * kappa) / nu;

        let pres = vnorm(&rp) / tau / (1.0 + bnorm);
        let dres = (rd.frobenius_norm() + vnorm(&rdl)) / tau / (1.0 + cnorm);
        let pobj = cx / tau;
        let dobj = by / tau;
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs().max(dobj.abs()));
        if pres <= tol && dres <= tol && gap <= tol {
            return HsdOutcome {
                status: SdpStatus::Optimal,
                x: x.scale(1.0 / tau),
                y: y.iter().map(|v| v / tau).collect(),
                iterations: iter,
                certificate: None,
            };
        }

        // Farkas certificate: y >= 0, Σ y_i A_i ⪯ 0, b^T y = 1
        if by > 0.0 {
            let yh: Vec<f64> = y.iter().map(|v| v / by).collect();
            let mut sy = RMatrix::zeros(n, n);
            for i in 0..m {
                sy = sy.axpy(yh[i], &a[i]);
            }
            let lmax = -min_eig(&sy.scale(-1.0));
            let yneg = yh.iter().fold(0.0f64, |acc, v| acc.max(-v));
            let farkas = lmax.max(0.0) + yneg;
            if farkas <= tol || (tau / kappa < 1e-8 && farkas <= tol.sqrt()) {
                return HsdOutcome {
                    status: SdpStatus::Infeasible,
                    x: RMatrix::zeros(n, n),
                    y: yh.clone(),
                    iterations: iter,
                    certificate: Some(format!(
                        "y = {yh:?} satisfies y >= 0, b^T y = 1 and lambda_max(sum y_i F_i) = {lmax:.3e}"
                    )),
                };
            }
        }

        // Nesterov–Todd scaling X = G Λ G^T, Z = G^{-T} Λ G^{-1}
        let ex = match eig_sym(&x.symmetrize(), EIG_TOL) {
            Ok(e) => e,
            Err(_) => break,
        };
        let floor = f64::MIN_POSITIVE.sqrt();
        let l = ex.apply(|v| v.max(floor).sqrt());
        let lzl = l.mul(&z).mul(&l).symmetrize();
        let ew = match eig_sym(&lzl, EIG_TOL) {
            Ok(e) => e,
            Err(_) => break,
        };
        let lam: Vec<f64> = ew.values.iter().map(|v| v.max(floor * floor).sqrt()).collect();
        let mut g = l.mul(&ew.vectors);
        for j in 0..n {
            let f = 1.0 / lam[j].sqrt();
            for i in 0..n {
                g[(i, j)] *= f;
            }
        }
        let at: Vec<RMatrix> = a.iter().map(|ai| ai.congruence(&g).symmetrize()).collect();
        let ct = c.congruence(&g).symmetrize();
        let rdt = rd.congruence(&g).symmetrize();

        let mut mm = RMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                mm[(i, j)] = at[i].inner(&at[j]);
            }
            mm[(i, i)] += s[i] / w[i];
        }
        let u: Vec<f64> = at.iter().map(|ai| ai.inner(&ct)).collect();
        let wc = ct.inner(&ct);
        let bpu: Vec<f64> = (0..m).map(|i| b[i] + u[i]).collect();
        let bmu: Vec<f64> = (0..m).map(|i| b[i] - u[i]).collect();
        let q = match solve_spd(&mm, &bpu) {
            Some(q) => q,
            None => break,
        };

        let direction = |eta: f64, rc: &RMatrix, rl: &[f64], rtau: f64| -> Option<Direction> {
            let mut t = RMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    t[(i, j)] = 2.0 * rc[(i, j)] / (lam[i] + lam[j]);
                }
            }
            let dmat = t.clone();
            let t = t.axpy(-eta, &rdt);
            let h: Vec<f64> = (0..m)
                .map(|i| eta * rp[i] - at[i].inner(&t) + rl[i] / w[i] - s[i] / w[i] * eta * rdl[i])
                .collect();
            let p = solve_spd(&mm, &h)?;
            let hc = ct.inner(&t);
            let den = dot(&bmu, &q) + wc + kappa / tau;
            let dtau = (-eta * rg + hc + rtau / tau - dot(&bmu, &p)) / den;
            let dy: Vec<f64> = (0..m).map(|i| p[i] + q[i] * dtau).collect();
            let mut dxt = t.axpy(-dtau, &ct);
            for i in 0..m {
                dxt = dxt.axpy(dy[i], &at[i]);
            }
            let dzt = dmat.sub(&dxt);
            let mut dz = rd.scale(eta).axpy(dtau, c);
            for i in 0..m {
                dz = dz.axpy(-dy[i], &a[i]);
            }
            let dw: Vec<f64> = (0..m).map(|i| eta * rdl[i] + dy[i]).collect();
            let ds: Vec<f64> = (0..m).map(|i| (rl[i] - s[i] * dw[i]) / w[i]).collect();
            let dkappa = (rtau - kappa * dtau) / tau;
            if !dtau.is_finite() {
                return None;
            }
            Some(Direction {
                dxt,
                dzt,
                dz,
                ds,
                dw,
                dy,
                dtau,
                dkappa,
            })
        };
        let max_step = |d: &Direction| -> f64 {
            psd_step(&lam, &d.dxt)
                .min(psd_step(&lam, &d.dzt))
                .min(vec_step(&s, &d.ds))
                .min(vec_step(&w, &d.dw))
                .min(vec_step(&[tau], &[d.dtau]))
                .min(vec_step(&[kappa], &[d.dkappa]))
        };

        // predictor
        let mut rc = RMatrix::zeros(n, n);
        for i in 0..n {
            rc[(i, i)] = -lam[i] * lam[i];
        }
        let rl: Vec<f64> = (0..m).map(|i| -s[i] * w[i]).collect();
        let aff = match direction(1.0, &rc, &rl, -tau * kappa) {
            Some(d) => d,
            None => break,
        };
        let alpha_a = max_step(&aff).min(1.0);
        let mut lam_mat = RMatrix::from_diag(&lam);
        let mu_aff = (lam_mat.axpy(alpha_a, &aff.dxt).inner(&lam_mat.axpy(alpha_a, &aff.dzt))
            + (0..m)
                .map(|i| (s[i] + alpha_a * aff.ds[i]) * (w[i] + alpha_a * aff.dw[i]))
                .sum::<f64>()
            + (tau + alpha_a * aff.dtau) * (kappa + alpha_a * aff.dkappa))
            / nu;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let cross = aff.dxt.mul(&aff.dzt).symmetrize();
        for i in 0..n {
            lam_mat[(i, i)] = lam[i] * lam[i];
        }
        let rc = RMatrix::identity(n).scale(sigma * mu).sub(&lam_mat).sub(&cross);
        let rl: Vec<f64> = (0..m)
            .map(|i| sigma * mu - s[i] * w[i] - aff.ds[i] * aff.dw[i])
            .collect();
        let rtau = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
        let dir = match direction(1.0 - sigma, &rc, &rl, rtau) {
            Some(d) => d,
            None => break,
        };
        let dx = g.mul(&dir.dxt).mul(&g.transpose()).symmetrize();
        let mut alpha = (0.99 * max_step(&dir)).min(1.0);

        // guard against eigenvalue error in the scaled step length
        let mut accepted = false;
        for _ in 0..30 {
            let xn = x.axpy(alpha, &dx).symmetrize();
            let zn = z.axpy(alpha, &dir.dz).symmetrize();
            if min_eig(&xn) > 0.0 && min_eig(&zn) > 0.0 {
                x = xn;
                z = zn;
                accepted = true;
                break;
            }
            alpha *= 0.7;
        }
        if !accepted {
            break;
        }
        for i in 0..m {
            s[i] += alpha * dir.ds[i];
            w[i] += alpha * dir.dw[i];
            y[i] += alpha * dir.dy[i];
        }
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;
        if !(tau > 0.0 && kappa > 0.0) {
            break;
        }
    }

    HsdOutcome {
        status: SdpStatus::NumericalFailure,
        x: RMatrix::zeros(n, n),
        y: vec![f64::NAN; m],
        iterations: settings.max_iter,
        certificate: None,
    }
}

/// Writes `X = Σ x_i x_i^T` with `x_i^T M x_i >= 0` for every term, given
/// `tr(M X) >= 0`. The number of terms equals the numerical rank of `X`.
pub fn decompose_wrt(x: &RMatrix, mm: &RMatrix) -> Result<Vec<Vec<f64>>> {
    let n = x.rows();
    if (mm.rows(), mm.cols()) != (n, n) || x.cols() != n {
        return Err(invalid("decompose_wrt: shape mismatch"));
    }
    let scale = (mm.frobenius_norm() * x.frobenius_norm()).max(1.0);
    let total = mm.inner(x);
    if total < -1e-9 * scale {
        return Err(invalid(format!("decompose_wrt needs tr(M X) >= 0, got {total:e}")));
    }
    let ex = eig_sym(&x.symmetrize(), EIG_TOL)?;
    let lmax = ex.values[0];
    if lmax <= 0.0 {
        return Ok(Vec::new());
    }
    let mut p: Vec<Vec<f64>> = ex
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > RANK_CUTOFF * lmax)
        .map(|(k, &v)| ex.vectors.column(k).iter().map(|u| u * v.sqrt()).collect())
        .collect();
    let form_tol = 1e-12 * scale;

    for _ in 0..p.len() {
        let forms: Vec<f64> = p.iter().map(|v| mm.quad_form(v)).collect();
        let Some(i) = (0..p.len())
            .filter(|&k| forms[k] < -form_tol)
            .min_by(|&a, &b| forms[a].total_cmp(&forms[b]))
        else {
            break;
        };
        let Some(j) = (0..p.len())
            .filter(|&k| forms[k] > 0.0)
            .max_by(|&a, &b| forms[a].total_cmp(&forms[b]))
        else {
            break;
        };
        let fa = forms[i];
        let fb = forms[j];
        let fc = dot(&mm.mul_vec(&p[i]), &p[j]);
        // fa + 2 fc t + fb t² = 0 with fa < 0 < fb has a real root
        let t = (-fc + (fc * fc - fa * fb).sqrt()) / fb;
        let theta = t.atan();
        let (sn, cs) = theta.sin_cos();
        let v: Vec<f64> = p[i].iter().zip(&p[j]).map(|(a, b)| a * cs + b * sn).collect();
        let wv: Vec<f64> = p[i].iter().zip(&p[j]).map(|(a, b)| -a * sn + b * cs).collect();
        p[i] = v;
        p[j] = wv;
    }
    Ok(p)
}

/// The single-support basic optimal solution of
/// `min Σ y0_j t_j  s.t.  Σ y1_j t_j >= 1, t >= 0`:
/// returns `(j, t_j, cost)`, smallest index on ties.
pub fn lp_single_support(y0: &[f64], y1: &[f64]) -> Option<(usize, f64, f64)> {
    let mut best: Option<(usize, f64, f64)> = None;
    for (j, (&a, &b)) in y0.iter().zip(y1).enumerate() {
        if b > 0.0 {
            let cost = a / b;
            if best.is_none_or(|(_, _, c)| cost < c) {
                best = Some((j, 1.0 / b, cost));
            }
        }
    }
    best
}

/// A rank-one optimum `x x^T` built from an optimal `X`.
///
/// The active constraint `k` (smallest trace) is identified, `X` is
/// decomposed with respect to `F_other - F_k`, the single-support LP picks a
/// term and the result is rescaled so that the smallest trace is exactly 1.
pub fn extract_rank_one(sol: &SdpSolution, prob: &SdpProblem) -> Result<Vec<f64>> {
    if sol.status != SdpStatus::Optimal {
        return Err(invalid("rank-one extraction needs an optimal solution"));
    }
    let traces = prob.constraint_values(&sol.x);
    let k = (0..traces.len())
        .min_by(|&a, &b| traces[a].total_cmp(&traces[b]))
        .expect("at least one constraint");
    if (traces[k] - 1.0).abs() > 1e-6 {
        return Err(Error::NumericalFailure(format!(
            "no active constraint at the optimum (traces {traces:?})"
        )));
    }
    let active = &prob.constraints[k];
    let n = prob.n();
    let mm = match prob.constraints.len() {
        1 => RMatrix::zeros(n, n),
        2 => prob.constraints[1 - k].sub(active),
        _ => return Err(invalid("rank-one extraction supports at most two constraints")),
    };
    let parts = decompose_wrt(&sol.x, &mm)?;
    let y0: Vec<f64> = parts.iter().map(|v| prob.f0.quad_form(v)).collect();
    let y1: Vec<f64> = parts.iter().map(|v| active.quad_form(v)).collect();
    let mut cands = Vec::new();
    if let Some((j, t, _)) = lp_single_support(&y0, &y1) {
        cands.push(parts[j].iter().map(|v| v * t.sqrt()).collect());
    }
    // noise-level parts can defeat the LP, so every part and leading
    // eigenvector competes after rescaling
    let eig = eig_sym(&sol.x.symmetrize(), EIG_TOL)?;
    let top = eig.values[0].max(0.0);
    cands.extend(parts);
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam > RANK_CUTOFF * top {
            cands.push((0..n).map(|i| eig.vectors[(i, k)]).collect());
        }
    }
    cands
        .into_iter()
        .filter_map(|v| rescale_feasible(prob, v))
        .min_by(|a, b| prob.f0.quad_form(a).total_cmp(&prob.f0.quad_form(b)))
        .ok_or_else(|| Error::NumericalFailure("no extracted vector satisfies the constraints".to_string()))
}

/// Scales `x` so that its smallest constraint value is one.
fn rescale_feasible(prob: &SdpProblem, mut x: Vec<f64>) -> Option<Vec<f64>> {
    let least = prob
        .constraints
        .iter()
        .map(|f| f.quad_form(&x))
        .fold(f64::INFINITY, f64::min);
    if !(least > 0.0) || !least.is_finite() {
        return None;
    }
    let f = 1.0 / least.sqrt();
    for v in &mut x {
        *v *= f;
    }
    Some(x)
}

#[derive(Serialize)]
struct SdpDump<'a> {
    n: usize,
    f0: Vec<Vec<f64>>,
    constraints: Vec<Vec<Vec<f64>>>,
    status: SdpStatus,
    objective: f64,
    x: Vec<Vec<f64>>,
    x_hat: Option<&'a [f64]>,
}

fn rows_of(m: &RMatrix) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// JSON snapshot of a problem and its solution for regression fixtures.
pub fn debug_dump(prob: &SdpProblem, sol: &SdpSolution) -> Result<String> {
    let d = SdpDump {
        n: prob.n(),
        f0: rows_of(&prob.f0),
        constraints: prob.constraints.iter().map(rows_of).collect(),
        status: sol.status,
        objective: sol.objective,
        x: rows_of(&sol.x),
        x_hat: sol.x_hat.as_deref(),
    };
    Ok(serde_json::to_string_pretty(&d)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag8(d: &[f64]) -> RMatrix {
        let mut v = d.to_vec();
        v.resize(8, 0.0);
        RMatrix::from_diag(&v)
    }

    fn random_sym(rng: &mut ChaCha8Rng, n: usize) -> RMatrix {
        let mut s = RMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-1.0..1.0);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        s
    }

    fn random_psd(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> RMatrix {
        let mut x = RMatrix::zeros(n, n);
        for _ in 0..rank {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            x = x.add(&RMatrix::outer(&v));
        }
        x
    }

    fn check_solution(prob: &SdpProblem, sol: &SdpSolution) {
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!(min_eig(&sol.x) >= -1e-8);
        for t in prob.constraint_values(&sol.x) {
            assert!(t >= 1.0 - 1e-8, "constraint value {t}");
        }
        assert!((sol.objective - sol.dual_objective).abs() <= 1e-7 * (1.0 + sol.objective.abs()));
    }

    #[test]
    fn identity_problem() {
        let i8 = RMatrix::identity(8);
        let prob = SdpProblem::new(i8.clone(), vec![i8.clone(), i8]).unwrap();
        let sol = solve_sdp(&prob, DEFAULT_TOL);
        check_solution(&prob, &sol);
        assert!((sol.objective - 1.0).abs() < 1e-7);
    }

    #[test]
    fn axis_aligned_problem() {
        let prob = SdpProblem::new(
            diag8(&[2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]),
            vec![diag8(&[1.0, 1.0]), diag8(&[0.0, 1.0])],
        )
        .unwrap();
        let sol = solve_sdp(&prob, DEFAULT_TOL).with_rank_one(&prob).unwrap();
        check_solution(&prob, &sol);
        assert!((sol.objective - 1.0).abs() < 1e-7);
        assert!((sol.x[(1, 1)] - 1.0).abs() < 1e-6);
        let x = sol.x_hat.unwrap();
        assert!((x[1].abs() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn negative_identity_is_infeasible() {
        let i8 = RMatrix::identity(8);
        let prob = SdpProblem::new(i8.clone(), vec![i8.scale(-1.0)]).unwrap();
        let sol = solve_sdp(&prob, DEFAULT_TOL);
        assert_eq!(sol.status, SdpStatus::Infeasible);
        assert!(sol.certificate.is_some());
    }

    #[test]
    fn rejects_asymmetric() {
        let mut f = RMatrix::identity(3);
        f[(0, 1)] = 1.0;
        assert!(SdpProblem::new(RMatrix::identity(3), vec![f]).is_err());
    }

    #[test]
    fn decompose_symmetric_case() {
        let m = RMatrix::from_diag(&[1.0, -1.0]);
        let parts = decompose_wrt(&RMatrix::identity(2), &m).unwrap();
        assert_eq!(parts.len(), 2);
        let mut back = RMatrix::zeros(2, 2);
        for p in &parts {
            assert!(m.quad_form(p).abs() < 1e-12);
            assert!((p[0].abs() - p[1].abs()).abs() < 1e-12);
            back = back.add(&RMatrix::outer(p));
        }
        assert!(back.sub(&RMatrix::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn decompose_rank_one_passthrough() {
        let v = [0.3, -1.2, 0.5];
        let m = RMatrix::from_diag(&[1.0, 0.5, -1.0]);
        let parts = decompose_wrt(&RMatrix::outer(&v), &m).unwrap();
        assert_eq!(parts.len(), 1);
        let sign = parts[0][1].signum() * v[1].signum();
        for (a, b) in parts[0].iter().zip(&v) {
            assert!((a * sign - b).abs() < 1e-12);
        }
    }

    #[test]
    fn decompose_rejects_negative_trace() {
        let m = RMatrix::from_diag(&[-1.0, -1.0]);
        assert!(decompose_wrt(&RMatrix::identity(2), &m).is_err());
    }

    #[test]
    fn lp_rule_examples() {
        assert_eq!(lp_single_support(&[2.0, 3.0], &[1.0, 3.0]), Some((1, 1.0 / 3.0, 1.0)));
        assert_eq!(lp_single_support(&[1.0, 2.0], &[0.0, -1.0]), None);
        assert_eq!(lp_single_support(&[5.0], &[2.0]), Some((0, 0.5, 2.5)));
        // ties go to the smaller index
        assert_eq!(lp_single_support(&[2.0, 4.0], &[1.0, 2.0]).unwrap().0, 0);
    }

    #[test]
    fn extract_from_rank_one_and_identity() {
        let i2 = RMatrix::identity(2);
        let prob = SdpProblem::new(i2.clone(), vec![i2.clone(), i2.clone()]).unwrap();
        let sol = SdpSolution {
            status: SdpStatus::Optimal,
            x: i2.scale(0.5),
            objective: 1.0,
            dual_objective: 1.0,
            y: vec![0.5, 0.5],
            iterations: 0,
            x_hat: None,
            certificate: None,
        };
        let x = extract_rank_one(&sol, &prob).unwrap();
        assert!((dot(&x, &x) - 1.0).abs() < 1e-12);

        let v = vec![0.6, 0.8];
        let sol = SdpSolution {
            x: RMatrix::outer(&v),
            ..sol
        };
        let x = extract_rank_one(&sol, &prob).unwrap();
        assert!((x[0] * v[0] + x[1] * v[1]).abs() > 1.0 - 1e-12);
    }

    #[test]
    fn extraction_needs_an_active_constraint() {
        let i2 = RMatrix::identity(2);
        let prob = SdpProblem::new(i2.clone(), vec![i2.clone()]).unwrap();
        let sol = SdpSolution {
            status: SdpStatus::Optimal,
            x: i2.scale(2.0),
            objective: 4.0,
            dual_objective: 4.0,
            y: vec![1.0],
            iterations: 0,
            x_hat: None,
            certificate: None,
        };
        assert!(matches!(extract_rank_one(&sol, &prob), Err(Error::NumericalFailure(_))));
    }

    #[test]
    fn random_problems_are_exact() {
        // F0 positive definite, each constraint with a positive direction
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let f0 = random_psd(&mut rng, 8, 8).add(&RMatrix::identity(8).scale(0.1));
            let f1 = random_sym(&mut rng, 8).add(&RMatrix::identity(8).scale(0.3));
            let f2 = random_sym(&mut rng, 8);
            let prob = SdpProblem::new(f0, vec![f1, f2]).unwrap();
            let sol = solve_sdp(&prob, DEFAULT_TOL);
            check_solution(&prob, &sol);
            let x = extract_rank_one(&sol, &prob).unwrap();
            let xx = RMatrix::outer(&x);
            for t in prob.constraint_values(&xx) {
                assert!(t >= 1.0 - 1e-8);
            }
            let obj = prob.objective(&xx);
            assert!((obj - sol.objective).abs() <= 1e-6 * sol.objective.abs());
        }
    }

    #[test]
    fn dump_is_json() {
        let i2 = RMatrix::identity(2);
        let prob = SdpProblem::new(i2.clone(), vec![i2]).unwrap();
        let sol = solve_sdp(&prob, DEFAULT_TOL).with_rank_one(&prob).unwrap();
        let text = debug_dump(&prob, &sol).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["status"], "optimal");
        assert_eq!(v["x_hat"].as_array().unwrap().len(), 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn decomposition_postconditions(seed in 0u64..100_000, rank in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_psd(&mut rng, 6, rank);
            let mut m = random_sym(&mut rng, 6);
            let t = m.inner(&x);
            if t < 0.0 {
                m = m.scale(-1.0);
            }
            let parts = decompose_wrt(&x, &m).unwrap();
            prop_assert_eq!(parts.len(), rank);
            let mut back = RMatrix::zeros(6, 6);
            for p in &parts {
                prop_assert!(m.quad_form(p) >= -1e-9);
                back = back.add(&RMatrix::outer(p));
            }
            prop_assert!(back.sub(&x).max_abs() <= 1e-8);
        }

        #[test]
        fn objective_scales_linearly(seed in 0u64..100_000, c in 0.1f64..50.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f0 = random_psd(&mut rng, 8, 8).add(&RMatrix::identity(8).scale(0.1));
            let f1 = random_sym(&mut rng, 8).add(&RMatrix::identity(8).scale(0.3));
            let f2 = random_sym(&mut rng, 8).add(&RMatrix::identity(8).scale(0.3));
            let prob = SdpProblem::new(f0, vec![f1, f2]).unwrap();
            let a = solve_sdp(&prob, DEFAULT_TOL);
            let b = solve_sdp(&prob.with_scaled_objective(c), DEFAULT_TOL);
            prop_assert_eq!(a.status, SdpStatus::Optimal);
            prop_assert_eq!(b.status, SdpStatus::Optimal);
            prop_assert!((b.objective - c * a.objective).abs() <= 1e-6 * b.objective);
            let traces = prob.constraint_values(&a.x);
            prop_assert!((traces.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0).abs() <= 1e-6);
        }
    }
}
