//! Channel instances, the effective 2-dimensional channel frame, and the basic
//! rate and relay-power expressions of the two-way relay channel.
//!
//! All noise variances are 1, so powers are linear SNR-like quantities and
//! rates are in bits per complex dimension.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{c64, dot_h, dot_t, norm, norm_sqr, svd_tall, CMatrix, C64};

/// The uplink channels `h1` (S1 to R) and `h2` (S2 to R). Downlink channels
/// are the transposes (reciprocity).
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelPair {
    h1: Vec<C64>,
    h2: Vec<C64>,
    rho: f64,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    #[serde(rename = "M")]
    m: usize,
    rho: f64,
    seed: u64,
    h1_re: Vec<f64>,
    h1_im: Vec<f64>,
    h2_re: Vec<f64>,
    h2_im: Vec<f64>,
}

impl ChannelPair {
    /// Wraps explicit channel vectors. `rho` is set to the measured correlation
    /// and `seed` to 0.
    pub fn new(h1: Vec<C64>, h2: Vec<C64>) -> Result<Self> {
        let mut pair = Self::with_meta(h1, h2, 0.0, 0)?;
        pair.rho = pair.correlation();
        Ok(pair)
    }

    pub fn with_meta(h1: Vec<C64>, h2: Vec<C64>, rho: f64, seed: u64) -> Result<Self> {
        if h1.len() != h2.len() {
            return Err(invalid(format!("channel lengths differ: {} vs {}", h1.len(), h2.len())));
        }
        if h1.len() < 2 {
            return Err(invalid("the relay needs at least two antennas"));
        }
        let finite = |h: &[C64]| h.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite(&h1) || !finite(&h2) {
            return Err(invalid("channel entries must be finite"));
        }
        if norm(&h1) == 0.0 || norm(&h2) == 0.0 {
            return Err(invalid("channel vectors must be non-zero"));
        }
        if !(0.0..=1.0).contains(&rho) {
            return Err(invalid(format!("rho must lie in [0, 1], got {rho}")));
        }
        Ok(Self { h1, h2, rho, seed })
    }

    /// Real-valued convenience constructor.
    pub fn from_real(h1: &[f64], h2: &[f64]) -> Result<Self> {
        let lift = |h: &[f64]| h.iter().map(|&x| c64(x, 0.0)).collect();
        Self::new(lift(h1), lift(h2))
    }

    pub fn m(&self) -> usize {
        self.h1.len()
    }

    pub fn h1(&self) -> &[C64] {
        &self.h1
    }

    pub fn h2(&self) -> &[C64] {
        &self.h2
    }

    /// Target correlation recorded at construction.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `‖h1‖²`.
    pub fn theta1(&self) -> f64 {
        norm_sqr(&self.h1)
    }

    /// `‖h2‖²`.
    pub fn theta2(&self) -> f64 {
        norm_sqr(&self.h2)
    }

    /// `|h1^H h2|² / (‖h1‖² ‖h2‖²)`.
    pub fn correlation(&self) -> f64 {
        dot_h(&self.h1, &self.h2).norm_sqr() / (self.theta1() * self.theta2())
    }

    /// `H_UL = [h1, h2]` (M×2).
    pub fn h_ul(&self) -> CMatrix {
        CMatrix::from_columns(&[&self.h1, &self.h2])
    }

    /// `H_DL = [h2, h1]^T` (2×M).
    pub fn h_dl(&self) -> CMatrix {
        CMatrix::from_columns(&[&self.h2, &self.h1]).transpose()
    }

    /// The same instance with the roles of S1 and S2 exchanged.
    pub fn swapped(&self) -> ChannelPair {
        ChannelPair {
            h1: self.h2.clone(),
            h2: self.h1.clone(),
            rho: self.rho,
            seed: self.seed,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ChannelJson {
            m: self.m(),
            rho: self.rho,
            seed: self.seed,
            h1_re: self.h1.iter().map(|z| z.re).collect(),
            h1_im: self.h1.iter().map(|z| z.im).collect(),
            h2_re: self.h2.iter().map(|z| z.re).collect(),
            h2_im: self.h2.iter().map(|z| z.im).collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ChannelJson = serde_json::from_str(text)?;
        let join = |re: &[f64], im: &[f64]| -> Result<Vec<C64>> {
            if re.len() != doc.m || im.len() != doc.m {
                return Err(invalid("channel JSON: vector length does not match M"));
            }
            Ok(re.iter().zip(im).map(|(&a, &b)| c64(a, b)).collect())
        };
        let h1 = join(&doc.h1_re, &doc.h1_im)?;
        let h2 = join(&doc.h2_re, &doc.h2_im)?;
        Self::with_meta(h1, h2, doc.rho, doc.seed)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// One circularly-symmetric complex Gaussian sample with unit variance
/// (variance ½ per real component), by Box–Muller.
pub fn cscg<R: Rng>(rng: &mut R) -> C64 {
    // 1 - u keeps the argument of ln in (0, 1]
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    let r = (-u1.ln()).sqrt();
    let phi = 2.0 * std::f64::consts::PI * u2;
    c64(r * phi.cos(), r * phi.sin())
}

pub fn cscg_vec<R: Rng>(rng: &mut R, m: usize) -> Vec<C64> {
    (0..m).map(|_| cscg(rng)).collect()
}

/// Unit-norm channels with `|h1^H h2|² = rho`.
///
/// Draws `h1` then `hw` (M CSCG entries each) from `ChaCha8Rng::seed_from_u64(seed)`,
/// normalises `h1`, orthonormalises `hw` against it and mixes
/// `h2 = √rho h1 + √(1-rho) hw`.
pub fn gen_channels(m: usize, rho: f64, seed: u64) -> Result<ChannelPair> {
    gen_channels_with(m, rho, seed, true)
}

/// As [`gen_channels`]; with `normalize = false` the drawn norm of `h1` is
/// kept and `h2` gets the same norm, so the correlation is still `rho`.
pub fn gen_channels_with(m: usize, rho: f64, seed: u64, normalize: bool) -> Result<ChannelPair> {
    if m < 2 {
        return Err(invalid(format!("M must be at least 2, got {m}")));
    }
    if !(0.0..=1.0).contains(&rho) || rho.is_nan() {
        return Err(invalid(format!("rho must lie in [0, 1], got {rho}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = cscg_vec(&mut rng, m);
    let scale = if normalize { 1.0 } else { norm(&raw) };
    let n1 = norm(&raw);
    let h1: Vec<C64> = raw.iter().map(|z| z / n1).collect();

    let hw = loop {
        let mut w = cscg_vec(&mut rng, m);
        let proj = dot_h(&h1, &w);
        for (z, u) in w.iter_mut().zip(&h1) {
            *z -= u * proj;
        }
        let nw = norm(&w);
        if nw > 1e-8 {
            break w.into_iter().map(|z| z / nw).collect::<Vec<_>>();
        }
    };

    let h2: Vec<C64> = if rho == 1.0 {
        h1.clone()
    } else {
        let a = rho.sqrt();
        let b = (1.0 - rho).sqrt();
        h1.iter().zip(&hw).map(|(x, w)| x * a + w * b).collect()
    };
    let h1: Vec<C64> = h1.iter().map(|z| z * scale).collect();
    let h2: Vec<C64> = h2.iter().map(|z| z * scale).collect();
    ChannelPair::with_meta(h1, h2, rho, seed)
}

/// The channels expressed in the orthonormal frame `U` spanning both of
/// them: `H_UL = U Σ V^H`, `g_i = U^H h_i`.
#[derive(Clone, Debug)]
pub struct EffectiveChannel {
    pub u: CMatrix,
    pub sigma: [f64; 2],
    pub v: CMatrix,
    pub g1: [C64; 2],
    pub g2: [C64; 2],
}

impl EffectiveChannel {
    /// Effective channels given directly in reduced coordinates (`U = I₂`).
    pub fn from_reduced(g1: [C64; 2], g2: [C64; 2]) -> Self {
        let pair = ChannelPair::new(g1.to_vec(), g2.to_vec()).expect("non-zero reduced channels");
        let svd = svd_tall(&pair.h_ul()).expect("2x2 input");
        EffectiveChannel {
            u: CMatrix::identity(2),
            sigma: svd.sigma,
            v: svd.v,
            g1,
            g2,
        }
    }

    pub fn theta1(&self) -> f64 {
        norm_sqr(&self.g1)
    }

    pub fn theta2(&self) -> f64 {
        norm_sqr(&self.g2)
    }

    /// The same frame with the roles of S1 and S2 exchanged.
    pub fn swapped(&self) -> Self {
        EffectiveChannel {
            g1: self.g2,
            g2: self.g1,
            ..self.clone()
        }
    }
}

pub fn effective(pair: &ChannelPair) -> EffectiveChannel {
    let svd = svd_tall(&pair.h_ul()).expect("ChannelPair always has M >= 2 finite rows");
    let uh = svd.u.adjoint();
    let g1 = uh.mul_vec(pair.h1());
    let g2 = uh.mul_vec(pair.h2());
    EffectiveChannel {
        u: svd.u,
        sigma: svd.sigma,
        v: svd.v,
        g1: [g1[0], g1[1]],
        g2: [g2[0], g2[1]],
    }
}

/// A reduced 2×2 relay matrix `B`; the full relay matrix is `A = U* B U^H`.
#[derive(Clone, Debug, PartialEq)]
pub struct Beamformer {
    pub b: CMatrix,
}

impl Beamformer {
    pub fn new(b: CMatrix) -> Self {
        assert_eq!((b.rows(), b.cols()), (2, 2), "reduced beamformer must be 2x2");
        Self { b }
    }

    pub fn zero() -> Self {
        Self::new(CMatrix::zeros(2, 2))
    }

    /// Row-stacking vectorisation: `Vec([[1,2],[3,4]]) = (1,2,3,4)`.
    pub fn vec(&self) -> [C64; 4] {
        [self.b[(0, 0)], self.b[(0, 1)], self.b[(1, 0)], self.b[(1, 1)]]
    }

    pub fn from_vec(v: [C64; 4]) -> Self {
        Self::new(CMatrix::from_rows(&[&[v[0], v[1]], &[v[2], v[3]]]))
    }

    /// `[Re Vec(B); Im Vec(B)]`.
    pub fn to_real8(&self) -> [f64; 8] {
        let v = self.vec();
        let mut x = [0.0; 8];
        for k in 0..4 {
            x[k] = v[k].re;
            x[k + 4] = v[k].im;
        }
        x
    }

    /// Inverse of [`Beamformer::to_real8`].
    pub fn from_real8(x: &[f64]) -> Self {
        assert_eq!(x.len(), 8);
        Self::from_vec([c64(x[0], x[4]), c64(x[1], x[5]), c64(x[2], x[6]), c64(x[3], x[7])])
    }

    /// `A = U* B U^H`.
    pub fn lift(&self, eff: &EffectiveChannel) -> CMatrix {
        eff.u.conj().mul(&self.b).mul(&eff.u.adjoint())
    }

    /// `B = U^T A U`, the reduced part of a full relay matrix.
    pub fn from_full(a: &CMatrix, eff: &EffectiveChannel) -> Self {
        Self::new(eff.u.transpose().mul(a).mul(&eff.u))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.b.scale_re(s))
    }
}

/// Source powers and relay budget (noise-normalised, linear).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub p1: f64,
    pub p2: f64,
    pub p_r: f64,
}

impl PowerConfig {
    pub fn new(p1: f64, p2: f64, p_r: f64) -> Result<Self> {
        for (name, v) in [("p1", p1), ("p2", p2), ("P_R", p_r)] {
            if !v.is_finite() || v < 0.0 {
                return Err(invalid(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        Ok(Self { p1, p2, p_r })
    }

    pub fn swapped(&self) -> Self {
        Self {
            p1: self.p2,
            p2: self.p1,
            p_r: self.p_r,
        }
    }

    pub fn with_relay(&self, p_r: f64) -> Self {
        Self { p_r, ..*self }
    }
}

/// Rates in bits per complex dimension: `r21` is S2 to S1, `r12` is S1 to S2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub r21: f64,
    pub r12: f64,
}

impl RatePair {
    pub fn new(r21: f64, r12: f64) -> Self {
        Self { r21, r12 }
    }

    pub fn sum(&self) -> f64 {
        self.r21 + self.r12
    }

    pub fn swapped(&self) -> Self {
        Self {
            r21: self.r12,
            r12: self.r21,
        }
    }
}

/// `½ log2(1 + snr)`, the two-slot rate of one direction.
pub fn rate_from_snr(snr: f64) -> f64 {
    0.5 * snr.max(0.0).ln_1p() / std::f64::consts::LN_2
}

/// SNR target for a rate: `2^{2r} - 1`.
pub fn snr_for_rate(r: f64) -> f64 {
    (2.0 * r * std::f64::consts::LN_2).exp_m1()
}

/// `(‖A h1‖², ‖A h2‖², tr(AA^H))`.
fn power_terms(a: &CMatrix, pair: &ChannelPair) -> (f64, f64, f64) {
    assert_eq!((a.rows(), a.cols()), (pair.m(), pair.m()), "relay matrix must be MxM");
    (
        norm_sqr(&a.mul_vec(pair.h1())),
        norm_sqr(&a.mul_vec(pair.h2())),
        a.frobenius_sqr(),
    )
}

/// Relay transmit power `‖A h1‖² p1 + ‖A h2‖² p2 + tr(AA^H)`.
pub fn relay_power(a: &CMatrix, pair: &ChannelPair, pc: &PowerConfig) -> f64 {
    let (t1, t2, t0) = power_terms(a, pair);
    t1 * pc.p1 + t2 * pc.p2 + t0
}

/// Received SNRs `(snr21, snr12)` after self-interference cancellation.
pub fn snr_pair(a: &CMatrix, pair: &ChannelPair, pc: &PowerConfig) -> (f64, f64) {
    let h1c: Vec<C64> = pair.h1().iter().map(|z| z.conj()).collect();
    let h2c: Vec<C64> = pair.h2().iter().map(|z| z.conj()).collect();
    let ah = a.adjoint();
    let s21 = dot_t(pair.h1(), &a.mul_vec(pair.h2())).norm_sqr() * pc.p2;
    let s12 = dot_t(pair.h2(), &a.mul_vec(pair.h1())).norm_sqr() * pc.p1;
    let n1 = norm_sqr(&ah.mul_vec(&h1c)) + 1.0;
    let n2 = norm_sqr(&ah.mul_vec(&h2c)) + 1.0;
    (s21 / n1, s12 / n2)
}

pub fn rate_pair(a: &CMatrix, pair: &ChannelPair, pc: &PowerConfig) -> RatePair {
    let (s21, s12) = snr_pair(a, pair, pc);
    RatePair::new(rate_from_snr(s21), rate_from_snr(s12))
}

/// Reduced relay power `‖B g1‖² p1 + ‖B g2‖² p2 + tr(BB^H)`.
pub fn relay_power_reduced(bf: &Beamformer, eff: &EffectiveChannel, pc: &PowerConfig) -> f64 {
    norm_sqr(&bf.b.mul_vec(&eff.g1)) * pc.p1 + norm_sqr(&bf.b.mul_vec(&eff.g2)) * pc.p2 + bf.b.frobenius_sqr()
}

pub fn snr_pair_reduced(bf: &Beamformer, eff: &EffectiveChannel, pc: &PowerConfig) -> (f64, f64) {
    let bh = bf.b.adjoint();
    let g1c = [eff.g1[0].conj(), eff.g1[1].conj()];
    let g2c = [eff.g2[0].conj(), eff.g2[1].conj()];
    let s21 = dot_t(&eff.g1, &bf.b.mul_vec(&eff.g2)).norm_sqr() * pc.p2;
    let s12 = dot_t(&eff.g2, &bf.b.mul_vec(&eff.g1)).norm_sqr() * pc.p1;
    let n1 = norm_sqr(&bh.mul_vec(&g1c)) + 1.0;
    let n2 = norm_sqr(&bh.mul_vec(&g2c)) + 1.0;
    (s21 / n1, s12 / n2)
}

pub fn rate_pair_reduced(bf: &Beamformer, eff: &EffectiveChannel, pc: &PowerConfig) -> RatePair {
    let (s21, s12) = snr_pair_reduced(bf, eff, pc);
    RatePair::new(rate_from_snr(s21), rate_from_snr(s12))
}
