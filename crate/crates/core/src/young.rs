//! Young functions and the global Δ₂ / ∇₂ growth conditions.
//!
//! A Young function is an increasing convex φ: [0,∞) → [0,∞) with
//! φ(t)/t → 0 at 0 and t/φ(t) → 0 at ∞. The two growth conditions are
//!
//! * Δ₂:  φ(2t) ≤ K φ(t) for all t > 0, exponent α₁ = log₂ K,
//! * ∇₂:  2a φ(t) ≤ φ(at) for some a > 1 and all t > 0, exponent
//!   α₂ = log_a 2 + 1.
//!
//! No finite procedure can certify a supremum over all t > 0, so the
//! checks run on a wide log-spaced scan and downgrade `satisfied` when
//! the ratio is still climbing at the edge of the scan.

use crate::error::{Error, Result};

/// Relative slack used by the condition checks; the built-in families are
/// closed-form, so this only absorbs floating-point rounding.
pub const CONDITION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// φ(t) = t^p, a Young function for p > 1.
    Power { p: f64 },
    /// φ(t) = t^α (1 + |log t|), a moderate-growth example between powers.
    PowerLog { alpha: f64 },
    /// φ(t) = t. Not a Young function; fails ∇₂ by design.
    Linear,
    /// φ(t) = e^t − t − 1. A genuine Young function that fails Δ₂.
    ExpType,
    /// Piecewise-linear interpolation of a (t, φ) table.
    Tabulated { ts: Vec<f64>, phis: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct YoungFunction {
    family: Family,
}

impl YoungFunction {
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::Param(format!("power family requires p > 1, got {p}")));
        }
        Ok(Self { family: Family::Power { p } })
    }

    pub fn power_log(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0) {
            return Err(Error::Param(format!("powerlog family requires alpha > 1, got {alpha}")));
        }
        Ok(Self { family: Family::PowerLog { alpha } })
    }

    pub fn linear() -> Self {
        Self { family: Family::Linear }
    }

    pub fn exp_type() -> Self {
        Self { family: Family::ExpType }
    }

    /// Tabulated function from (t, φ) pairs with strictly increasing t.
    pub fn tabulated(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::Param("tabulated family needs at least 2 points".into()));
        }
        for w in pairs.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Param("tabulated t values must be strictly increasing".into()));
            }
        }
        if pairs.iter().any(|&(t, v)| t < 0.0 || !v.is_finite() || v < 0.0) {
            return Err(Error::Param("tabulated entries must be nonnegative and finite".into()));
        }
        Ok(Self {
            family: Family::Tabulated {
                ts: pairs.iter().map(|p| p.0).collect(),
                phis: pairs.iter().map(|p| p.1).collect(),
            },
        })
    }

    /// Parse the CLI/config spelling: `power:p=2`, `powerlog:alpha=2`,
    /// `linear`, `exp`, `tabulated:<csv path>`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let (head, rest) = match spec.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (spec, None),
        };
        match head {
            "power" => {
                let p = parse_kv(rest, "p")?;
                Self::power(p)
            }
            "powerlog" => {
                let alpha = parse_kv(rest, "alpha")?;
                Self::power_log(alpha)
            }
            "linear" => Ok(Self::linear()),
            "exp" | "exp_type" => Ok(Self::exp_type()),
            "tabulated" => {
                let path = rest.ok_or_else(|| Error::Param("tabulated needs a csv path".into()))?;
                Self::tabulated_from_csv(path)
            }
            other => Err(Error::Param(format!("unknown young function family '{other}'"))),
        }
    }

    /// Load a two-column CSV (t, phi) with strictly increasing t.
    pub fn tabulated_from_csv(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split(',');
            let bad = || Error::Param(format!("{path}:{}: expected 't,phi'", lineno + 1));
            let t: f64 = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            let v: f64 = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            pairs.push((t, v));
        }
        Self::tabulated(&pairs)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Canonical name used in CSV output.
    pub fn name(&self) -> String {
        match &self.family {
            Family::Power { p } => format!("power:p={p}"),
            Family::PowerLog { alpha } => format!("powerlog:alpha={alpha}"),
            Family::Linear => "linear".into(),
            Family::ExpType => "exp".into(),
            Family::Tabulated { ts, .. } => format!("tabulated[{}]", ts.len()),
        }
    }

    /// Evaluate φ(t). Closed form for built-in families, piecewise-linear
    /// interpolation for tabulated ones.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("young function argument must be >= 0, got {t}")));
        }
        Ok(match &self.family {
            Family::Power { p } => t.powf(*p),
            Family::PowerLog { alpha } => {
                if t == 0.0 {
                    0.0
                } else {
                    t.powf(*alpha) * (1.0 + t.ln().abs())
                }
            }
            Family::Linear => t,
            Family::ExpType => {
                // exp_m1 keeps precision near 0 where e^t - t - 1 cancels.
                t.exp_m1() - t
            }
            Family::Tabulated { ts, phis } => {
                let lo = ts[0];
                let hi = *ts.last().unwrap();
                if t < lo || t > hi {
                    return Err(Error::Extrapolation { t, lo, hi });
                }
                let k = ts.partition_point(|&s| s <= t);
                if k == ts.len() {
                    *phis.last().unwrap()
                } else {
                    let (t0, t1) = (ts[k - 1], ts[k]);
                    let (v0, v1) = (phis[k - 1], phis[k]);
                    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
                }
            }
        })
    }

    /// Sampled Definition-1.1 membership: φ(t)/t → 0 as t → 0⁺ and
    /// t/φ(t) → 0 as t → ∞, checked on a log-spaced grid.
    pub fn is_young_sampled(&self) -> bool {
        let small = self.eval(1e-9).and_then(|v| Ok(v / 1e-9)).unwrap_or(f64::INFINITY);
        let big_t = 1e9;
        let big = match self.eval(big_t) {
            Ok(v) if v > 0.0 => big_t / v,
            _ => f64::INFINITY,
        };
        small < 1e-3 && big < 1e-3
    }
}

fn parse_kv(rest: Option<&str>, key: &str) -> Result<f64> {
    let rest = rest.ok_or_else(|| Error::Param(format!("missing parameter '{key}'")))?;
    let (k, v) = rest
        .split_once('=')
        .ok_or_else(|| Error::Param(format!("expected '{key}=<value>', got '{rest}'")))?;
    if k != key {
        return Err(Error::Param(format!("expected parameter '{key}', got '{k}'")));
    }
    v.parse::<f64>()
        .map_err(|_| Error::Param(format!("cannot parse '{v}' as a number")))
}

/// Log-spaced grid with `points` entries covering [lo, hi].
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && points >= 2);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (llo + (lhi - llo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Default scan for the global condition checks: [1e-6, 1e6], 2000 points.
pub fn default_scan() -> Vec<f64> {
    log_grid(1e-6, 1e6, 2000)
}

/// Default ∇₂ dilation candidates: the geometric grid 2^{k/8}, k = 1..48.
pub fn default_a_candidates() -> Vec<f64> {
    (1..=48).map(|k| (k as f64 / 8.0).exp2()).collect()
}

#[derive(Debug, Clone)]
pub struct Delta2Report {
    pub satisfied: bool,
    /// Best global constant found on the scan (sup of φ(2t)/φ(t)).
    pub k: f64,
    pub alpha1: f64,
    /// Scan point realizing the supremum.
    pub witness_t: f64,
}

#[derive(Debug, Clone)]
pub struct Nabla2Report {
    pub satisfied: bool,
    /// Smallest candidate dilation with 2a φ(t) ≤ φ(at) on the whole scan.
    pub a: f64,
    pub alpha2: f64,
    /// Worst-case scan point for the returned a.
    pub witness_t: f64,
}

/// Check the global Δ₂ condition on a log-spaced scan.
///
/// K is the scan supremum of φ(2t)/φ(t). `satisfied` is downgraded when K
/// is not finite or when the ratio is still strictly climbing over the last
/// decade of the scan, which indicates an unbounded global supremum.
pub fn check_delta2(phi: &YoungFunction, scan: &[f64]) -> Result<Delta2Report> {
    let ratios = condition_ratios(phi, scan, |phi, t| {
        Ok(phi.eval(2.0 * t)? / phi.eval(t)?)
    })?;
    let (mut k, mut witness_t) = (f64::NEG_INFINITY, scan[0]);
    let mut any_nonfinite = false;
    for (&t, &r) in scan.iter().zip(&ratios) {
        if !r.is_finite() {
            any_nonfinite = true;
            continue;
        }
        if r > k {
            k = r;
            witness_t = t;
        }
    }
    let unbounded_trend = ratio_climbing_last_decade(scan, &ratios);
    let satisfied = !any_nonfinite && k.is_finite() && !unbounded_trend;
    let k = if any_nonfinite { f64::INFINITY } else { k };
    Ok(Delta2Report { satisfied, k, alpha1: k.log2(), witness_t })
}

/// Check the global ∇₂ condition: find the smallest dilation candidate a
/// with 2a φ(t) ≤ φ(at) for every scan point.
pub fn check_nabla2(
    phi: &YoungFunction,
    scan: &[f64],
    a_candidates: &[f64],
) -> Result<Nabla2Report> {
    // Degeneracy check shared with check_delta2.
    condition_ratios(phi, scan, |phi, t| Ok(phi.eval(t)?))?;
    for &a in a_candidates {
        if !(a > 1.0) {
            return Err(Error::Param(format!("dilation candidate must exceed 1, got {a}")));
        }
        let mut ok = true;
        let mut worst_margin = f64::INFINITY;
        let mut witness_t = scan[0];
        for &t in scan {
            let lhs = 2.0 * a * phi.eval(t)?;
            let rhs = phi.eval(a * t)?;
            if !(lhs <= rhs * (1.0 + CONDITION_TOL)) {
                ok = false;
                break;
            }
            let margin = rhs - lhs;
            if margin < worst_margin {
                worst_margin = margin;
                witness_t = t;
            }
        }
        if ok {
            let alpha2 = std::f64::consts::LN_2 / a.ln() + 1.0;
            return Ok(Nabla2Report { satisfied: true, a, alpha2, witness_t });
        }
    }
    Ok(Nabla2Report { satisfied: false, a: f64::NAN, alpha2: f64::NAN, witness_t: f64::NAN })
}

fn condition_ratios(
    phi: &YoungFunction,
    scan: &[f64],
    ratio: impl Fn(&YoungFunction, f64) -> Result<f64>,
) -> Result<Vec<f64>> {
    if scan.len() < 2 {
        return Err(Error::Param("scan grid needs at least 2 points".into()));
    }
    let mut out = Vec::with_capacity(scan.len());
    for &t in scan {
        if !(t > 0.0) {
            return Err(Error::Param("scan points must be positive".into()));
        }
        if phi.eval(t)? == 0.0 {
            return Err(Error::Degenerate(format!("phi({t}) = 0 on the scan grid")));
        }
        out.push(ratio(phi, t)?);
    }
    Ok(out)
}

/// True when the ratio sequence is strictly increasing over the last decade
/// of the scan — the heuristic signal of an unbounded global supremum.
fn ratio_climbing_last_decade(scan: &[f64], ratios: &[f64]) -> bool {
    let hi = *scan.last().unwrap();
    let cut = hi / 10.0;
    let tail: Vec<f64> = scan
        .iter()
        .zip(ratios)
        .filter(|(t, _)| **t >= cut)
        .map(|(_, r)| *r)
        .collect();
    tail.len() >= 2 && tail.windows(2).all(|w| w[1] > w[0])
}

/// Increments Δᵢ = φ(λᵢ₊₁) − φ(λᵢ) of the Stieltjes measure d[φ(λ)] over
/// the cells of `lambda_grid`. Telescopes exactly to φ at the endpoints.
pub fn stieltjes_increments(phi: &YoungFunction, lambda_grid: &[f64]) -> Result<Vec<f64>> {
    if lambda_grid.is_empty() || lambda_grid[0] != 0.0 {
        return Err(Error::Param("lambda grid must start at 0".into()));
    }
    for w in lambda_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Param("lambda grid must be strictly increasing".into()));
        }
    }
    let mut out = Vec::with_capacity(lambda_grid.len().saturating_sub(1));
    let mut prev = phi.eval(lambda_grid[0])?;
    for &l in &lambda_grid[1..] {
        let v = phi.eval(l)?;
        out.push(v - prev);
        prev = v;
    }
    Ok(out)
}
