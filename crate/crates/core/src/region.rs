//! Rate profiles, boundary points and rate-region boundaries.

use std::io::Write;
use std::path::Path;

use crate::channel::{Beamformer, RatePair};
use crate::error::{invalid, Result};

/// Split of the sum-rate between the two directions: `r21 = alpha21 R`,
/// `r12 = alpha12 R`, with `alpha21 + alpha12 = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateProfile {
    pub alpha21: f64,
    pub alpha12: f64,
}

impl RateProfile {
    pub fn new(alpha21: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha21) {
            return Err(invalid(format!("alpha21 must lie in [0, 1], got {alpha21}")));
        }
        Ok(Self {
            alpha21,
            alpha12: 1.0 - alpha21,
        })
    }

    pub fn equal() -> Self {
        Self {
            alpha21: 0.5,
            alpha12: 0.5,
        }
    }

    /// `n` profiles with `alpha21 = k / (n - 1)`, `k = 0..n`.
    pub fn grid(n: usize) -> Vec<Self> {
        assert!(n >= 2, "need at least two profiles");
        (0..n)
            .map(|k| {
                let a = k as f64 / (n - 1) as f64;
                // exact endpoints and exact complement
                Self {
                    alpha21: a,
                    alpha12: if k == n - 1 { 0.0 } else { 1.0 - a },
                }
            })
            .collect()
    }

    pub fn swapped(&self) -> Self {
        Self {
            alpha21: self.alpha12,
            alpha12: self.alpha21,
        }
    }

    /// Largest `R` with `(alpha21 R, alpha12 R)` dominated by `rates`.
    pub fn radial(&self, rates: &RatePair) -> f64 {
        let mut r = f64::INFINITY;
        if self.alpha21 > 0.0 {
            r = r.min(rates.r21 / self.alpha21);
        }
        if self.alpha12 > 0.0 {
            r = r.min(rates.r12 / self.alpha12);
        }
        r
    }
}

/// One achievable point on a region boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPoint {
    /// Profile that produced the point; `NaN` when not profile-driven.
    pub alpha21: f64,
    pub rates: RatePair,
    pub p1: f64,
    pub p2: f64,
    pub beamformer: Option<Beamformer>,
    pub relay_power: f64,
}

impl BoundaryPoint {
    pub fn bare(rates: RatePair) -> Self {
        Self {
            alpha21: f64::NAN,
            rates,
            p1: f64::NAN,
            p2: f64::NAN,
            beamformer: None,
            relay_power: f64::NAN,
        }
    }
}

/// Achievable rate pairs ordered by increasing `r21`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RegionBoundary {
    pub points: Vec<BoundaryPoint>,
}

pub const CSV_HEADER: [&str; 14] = [
    "alpha21", "r21", "r12", "p1", "p2", "B_re0", "B_re1", "B_re2", "B_re3", "B_im0", "B_im1", "B_im2", "B_im3",
    "p_relay",
];

impl RegionBoundary {
    /// Keeps the points as given, sorted by increasing `r21` (stable, so
    /// equal `r21` keep their input order).
    pub fn sorted(mut points: Vec<BoundaryPoint>) -> Self {
        points.sort_by(|a, b| a.rates.r21.total_cmp(&b.rates.r21));
        Self { points }
    }

    /// Pareto frontier of the points: sweep by decreasing `r21` (ties toward
    /// larger `r12`) keeping each point that raises the running max of `r12`.
    pub fn pareto_envelope(points: Vec<BoundaryPoint>) -> Self {
        let mut pts = points;
        pts.retain(|p| p.rates.r21.is_finite() && p.rates.r12.is_finite());
        pts.sort_by(|a, b| {
            b.rates
                .r21
                .total_cmp(&a.rates.r21)
                .then(b.rates.r12.total_cmp(&a.rates.r12))
        });
        let mut best = f64::NEG_INFINITY;
        let mut kept = Vec::new();
        for p in pts {
            if p.rates.r12 > best {
                best = p.rates.r12;
                kept.push(p);
            }
        }
        kept.reverse();
        Self { points: kept }
    }

    /// Pareto frontier of the union of several boundaries.
    pub fn union<'a>(parts: impl IntoIterator<Item = &'a RegionBoundary>) -> Self {
        let all = parts.into_iter().flat_map(|r| r.points.iter().cloned()).collect();
        Self::pareto_envelope(all)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn rates(&self) -> Vec<RatePair> {
        self.points.iter().map(|p| p.rates).collect()
    }

    /// Whether `r21` is non-decreasing and `r12` non-increasing along the
    /// list, up to `slack`.
    pub fn is_pareto(&self, slack: f64) -> bool {
        self.points
            .windows(2)
            .all(|w| w[1].rates.r21 >= w[0].rates.r21 - slack && w[1].rates.r12 <= w[0].rates.r12 + slack)
    }

    /// Largest sum-rate along the profile direction that some point of the
    /// region dominates.
    pub fn radial_sum_rate(&self, profile: &RateProfile) -> f64 {
        self.points.iter().map(|p| profile.radial(&p.rates)).fold(0.0, f64::max)
    }

    pub fn max_sum_rate(&self) -> f64 {
        self.points.iter().map(|p| p.rates.sum()).fold(0.0, f64::max)
    }

    /// Whether some point dominates `q` up to `slack` in each coordinate.
    pub fn dominates(&self, q: &RatePair, slack: f64) -> bool {
        self.points
            .iter()
            .any(|p| p.rates.r21 >= q.r21 - slack && p.rates.r12 >= q.r12 - slack)
    }

    /// CSV with the standard header; an extra trailing `scheme` column is
    /// added when `scheme` is given.
    pub fn write_csv<W: Write>(&self, out: W, scheme: Option<&str>) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let mut header: Vec<&str> = CSV_HEADER.to_vec();
        if scheme.is_some() {
            header.push("scheme");
        }
        w.write_record(&header)?;
        for p in &self.points {
            let mut rec: Vec<String> = vec![
                fmt_f64(p.alpha21),
                fmt_f64(p.rates.r21),
                fmt_f64(p.rates.r12),
                fmt_f64(p.p1),
                fmt_f64(p.p2),
            ];
            match &p.beamformer {
                Some(bf) => rec.extend(bf.to_real8().iter().map(|&x| fmt_f64(x))),
                None => rec.extend(std::iter::repeat_n(String::new(), 8)),
            }
            rec.push(fmt_f64(p.relay_power));
            if let Some(s) = scheme {
                rec.push(s.to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, scheme: Option<&str>) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, scheme)?;
        Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
    }

    /// Reads back the rate columns and metadata written by [`write_csv`].
    ///
    /// [`write_csv`]: RegionBoundary::write_csv
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let mut points = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let num = |i: usize| -> f64 {
                rec.get(i)
                    .filter(|s| !s.is_empty())
                    .and_then(|s| s.parse().ok())
                    .unwrap_or(f64::NAN)
            };
            let re: Vec<f64> = (5..13).map(num).collect();
            let beamformer = if re.iter().all(|x| x.is_finite()) {
                Some(Beamformer::from_real8(&re))
            } else {
                None
            };
            points.push(BoundaryPoint {
                alpha21: num(0),
                rates: RatePair::new(num(1), num(2)),
                p1: num(3),
                p2: num(4),
                beamformer,
                relay_power: num(13),
            });
        }
        Ok(Self { points })
    }
}

/// Shortest representation that round-trips exactly.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:?}")
    }
}
