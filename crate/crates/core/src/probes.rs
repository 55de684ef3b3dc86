//! Extremal constructions that make the growth conditions necessary:
//! the radial cutoff η with its Hessian constants, the cone lower bound
//! for D_{x₁x₁} of the potential of η, the integral growth condition, the
//! Δ₂-forcing pair (u_t, f_t) = (tη/C₁, −tΔη/C₁), and the concentrating
//! source that breaks the estimate for linear φ.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{hessian_fd, radial_cutoff, BallGrid, HessianField, ScalarField};
use crate::modular::modular_direct;
use crate::quad::adaptive_simpson;
use crate::solver::{hessian_kernel_far_with_support, solve_fd_disk};
use crate::young::YoungFunction;

/// Smooth radial cutoff: η ≡ 1 on |x| ≤ r_in, η ≡ 0 on |x| ≥ r_out,
/// exp-smooth monotone in between, with the constants of the forcing pair
/// measured by finite differences on the grid.
#[derive(Debug, Clone)]
pub struct Cutoff {
    pub r_in: f64,
    pub r_out: f64,
    pub field: ScalarField,
    pub hessian: HessianField,
    /// signed Σᵢ D_{xᵢxᵢ}η on the Hessian mask
    pub laplacian: ScalarField,
    /// C₁ = max |Δη|
    pub c1: f64,
    /// C₂ = max Σᵢⱼ |D_{xᵢxⱼ}η|
    pub c2: f64,
    /// C₃ = (C₁ + C₂)/2
    pub c3: f64,
    /// γ = C₃/C₁ > 1
    pub gamma: f64,
}

/// Paper-default plateau radius 1/(12√n).
pub fn default_r_in(n: usize) -> f64 {
    1.0 / (12.0 * (n as f64).sqrt())
}

/// Paper-default support radius 1/(6√n).
pub fn default_r_out(n: usize) -> f64 {
    1.0 / (6.0 * (n as f64).sqrt())
}

pub fn make_cutoff(grid: &Arc<BallGrid>, r_in: f64, r_out: f64) -> Result<Cutoff> {
    if !(0.0 < r_in && r_in < r_out && r_out < 1.0) {
        return Err(Error::Param(format!(
            "cutoff radii must satisfy 0 < r_in < r_out < 1, got ({r_in}, {r_out})"
        )));
    }
    let field = ScalarField::from_fn(grid, |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        radial_cutoff(r, r_in, r_out)
    });
    let hessian = hessian_fd(&field, 1)?;
    let laplacian = hessian.laplacian();
    let c1 = laplacian.max_abs();
    let c2 = hessian.abs_sum.max_abs();
    if c1 == 0.0 {
        return Err(Error::Degenerate("cutoff transition unresolved by the grid".into()));
    }
    let c3 = 0.5 * (c1 + c2);
    Ok(Cutoff { r_in, r_out, field, hessian, laplacian, c1, c2, c3, gamma: c3 / c1 })
}

/// The cone D = { |x| ≥ r_floor, |x₁| ≥ c0 |x| } where the lower bound for
/// D_{x₁x₁}u_t is tested.
#[derive(Debug, Clone, Copy)]
pub struct ConeRegion {
    pub r_floor: f64,
    /// axis-alignment fraction in (0,1)
    pub c0: f64,
}

impl ConeRegion {
    /// Radial floor 1/2 + 7/(12√n) with alignment 3/4.
    pub fn default_for(n: usize) -> Self {
        Self { r_floor: 0.5 + 7.0 / (12.0 * (n as f64).sqrt()), c0: 0.75 }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        r >= self.r_floor && x[0].abs() >= self.c0 * r
    }
}

#[derive(Debug, Clone)]
pub struct ConeRow {
    pub node: usize,
    pub radius: f64,
    /// D_{x₁x₁}u_t at the node
    pub d11: f64,
    /// D_{x₁x₁}u_t · |x|^n / t
    pub scaled: f64,
}

#[derive(Debug, Clone)]
pub struct ConeBound {
    /// min over the cone of D_{x₁x₁}u_t · |x|^n / t; positivity is the claim.
    pub c_min: f64,
    /// log-log slope of D_{x₁x₁}u_t against |x| along the cone axis (≈ −n).
    pub axis_slope: f64,
    pub rows: Vec<ConeRow>,
}

/// Evaluate D_{x₁x₁} of the Newtonian potential of f_t = t·η at every cone
/// node through the smooth far kernel.
pub fn cone_lower_bound(
    t: f64,
    cone: &ConeRegion,
    cutoff: &Cutoff,
    grid: &Arc<BallGrid>,
) -> Result<ConeBound> {
    if !(t > 0.0) {
        return Err(Error::Param("t must be positive".into()));
    }
    let n = grid.n();
    let h = grid.h();
    if cone.r_floor - cutoff.r_out < 4.0 * h {
        return Err(Error::Param(format!(
            "cone (floor {}) must clear supp eta (radius {}) by at least 4h",
            cone.r_floor, cutoff.r_out
        )));
    }
    let support: Vec<usize> = (0..grid.node_count())
        .filter(|&i| cutoff.field.is_valid(i) && cutoff.field.value(i) != 0.0)
        .collect();
    let mut rows = Vec::new();
    let mut c_min = f64::INFINITY;
    let mut axis_pts: Vec<(f64, f64)> = Vec::new();
    for idx in grid.inside_nodes() {
        let x = grid.coords(idx);
        if !cone.contains(&x[..n]) {
            continue;
        }
        let hess = hessian_kernel_far_with_support(&cutoff.field, &support, &x[..n])?;
        let base = hess[0][0];
        let d11 = t * base;
        let r = grid.radius(idx);
        let scaled = base * r.powi(n as i32);
        c_min = c_min.min(scaled);
        let on_axis = (1..n).all(|k| x[k] == 0.0);
        if on_axis && base > 0.0 {
            axis_pts.push((r.ln(), base.ln()));
        }
        rows.push(ConeRow { node: idx, radius: r, d11, scaled });
    }
    if rows.is_empty() {
        return Err(Error::Degenerate("cone contains no grid nodes".into()));
    }
    Ok(ConeBound { c_min, axis_slope: least_squares_slope(&axis_pts), rows })
}

pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(x, y) in pts {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

/// The integral growth condition implied by the modular estimate:
/// R(t) = [∫_{c1 t}^{c2 t} φ(s)/s² ds] / [φ(t)/t] must stay bounded in t.
pub fn integral_condition_probe(
    phi: &YoungFunction,
    t_list: &[f64],
    c1: f64,
    c2: f64,
) -> Result<Vec<(f64, f64)>> {
    if !(0.0 < c1 && c1 < c2) {
        return Err(Error::Param(format!("need 0 < c1 < c2, got ({c1}, {c2})")));
    }
    let mut out = Vec::with_capacity(t_list.len());
    for &t in t_list {
        if !(t > 0.0) {
            return Err(Error::Param("probe points must be positive".into()));
        }
        let denom = phi.eval(t)? / t;
        if denom == 0.0 {
            return Err(Error::Degenerate(format!("phi({t}) = 0 at a probe point")));
        }
        let integrand = |s: f64| phi.eval(s).unwrap_or(f64::INFINITY) / (s * s);
        let scale = integrand(c1 * t).max(integrand(c2 * t)) * (c2 - c1) * t;
        let integral = adaptive_simpson(&integrand, c1 * t, c2 * t, 1e-12 * scale.max(1e-300));
        out.push((t, integral / denom));
    }
    Ok(out)
}

/// Sanity gate: φ(t)/t nondecreasing along the scan (a consequence of
/// convexity with φ(0) = 0).
pub fn monotone_slope_check(phi: &YoungFunction, scan: &[f64]) -> Result<bool> {
    let mut prev = f64::NEG_INFINITY;
    for &t in scan {
        if !(t > 0.0) {
            return Err(Error::Param("scan must be positive".into()));
        }
        let slope = phi.eval(t)? / t;
        if slope < prev * (1.0 - 1e-12) {
            return Ok(false);
        }
        prev = prev.max(slope);
    }
    Ok(true)
}

#[derive(Debug, Clone)]
pub struct ForcingRow {
    pub t: f64,
    pub numerator: f64,
    pub denominator: f64,
    /// modular(φ, |D²u_t|) / modular(φ, |f_t|); diverges iff φ ∉ Δ₂.
    pub ratio: f64,
}

/// The Δ₂-forcing pair u_t = tη/C₁, f_t = −tΔη/C₁, which satisfies the
/// Dirichlet problem identically — no solve involved.
pub fn delta2_forcing_pair(
    phi: &YoungFunction,
    cutoff: &Cutoff,
    t_list: &[f64],
) -> Result<Vec<ForcingRow>> {
    let mut out = Vec::with_capacity(t_list.len());
    for &t in t_list {
        if !(t > 0.0) {
            return Err(Error::Param("t values must be positive".into()));
        }
        let scale = t / cutoff.c1;
        let num = modular_direct(phi, &cutoff.hessian.abs_sum.scaled(scale))?;
        let den = modular_direct(phi, &cutoff.laplacian.scaled(scale))?;
        let ratio = if den.value > 0.0 { num.value / den.value } else { f64::INFINITY };
        out.push(ForcingRow { t, numerator: num.value, denominator: den.value, ratio });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ConcentrationRow {
    pub epsilon: f64,
    /// discrete mass of the source (normalized to 1 by construction)
    pub mass: f64,
    pub ratio: f64,
}

/// Unit-mass exp-mollifier of width ε at the origin.
pub fn mollified_source(grid: &Arc<BallGrid>, epsilon: f64) -> Result<ScalarField> {
    let h = grid.h();
    if !(epsilon > 2.0 * h && epsilon < 0.2) {
        return Err(Error::Param(format!(
            "epsilon must lie in (2h, 0.2) = ({}, 0.2), got {epsilon}",
            2.0 * h
        )));
    }
    let raw = ScalarField::from_fn(grid, |x| {
        let r2 = x.iter().map(|v| v * v).sum::<f64>() / (epsilon * epsilon);
        if r2 < 1.0 {
            (-1.0 / (1.0 - r2)).exp()
        } else {
            0.0
        }
    });
    let mass: f64 = raw.values().iter().sum::<f64>() * grid.cell_volume();
    Ok(raw.scaled(1.0 / mass))
}

/// Concentrating-source demo: ratio(ε) = modular(φ, |D²u_ε|) / modular(φ, |f_ε|)
/// with −Δu_ε = f_ε. For φ = linear (the L¹ endpoint) the ratio grows like
/// ln(1/ε); for φ deep in Δ₂ ∩ ∇₂ it stays bounded.
pub fn nabla2_failure_demo(
    phi: &YoungFunction,
    epsilon_list: &[f64],
    grid: &Arc<BallGrid>,
) -> Result<Vec<ConcentrationRow>> {
    let mut out = Vec::with_capacity(epsilon_list.len());
    for &eps in epsilon_list {
        let f = mollified_source(grid, eps)?;
        let (u, _) = solve_fd_disk(&f)?;
        let hess = hessian_fd(&u, 1)?;
        let mask = hess.abs_sum.common_mask(&f);
        let f_masked = f.clone().with_mask(mask.clone());
        let num = modular_direct(phi, &hess.abs_sum.clone().with_mask(mask))?;
        let den = modular_direct(phi, &f_masked)?;
        let mass = f_masked.values().iter().map(|v| v.abs()).sum::<f64>() * grid.cell_volume();
        let ratio = if den.value > 0.0 { num.value / den.value } else { f64::INFINITY };
        out.push(ConcentrationRow { epsilon: eps, mass, ratio });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::log_grid;

    fn test_grid(m: usize) -> Arc<BallGrid> {
        BallGrid::new(2, m).unwrap()
    }

    #[test]
    fn cutoff_structure_and_constants() {
        let grid = test_grid(257);
        let cut = make_cutoff(&grid, default_r_in(2), default_r_out(2)).unwrap();
        assert_eq!(cut.field.value(grid.origin()), 1.0);
        for idx in grid.inside_nodes() {
            if grid.radius(idx) >= cut.r_out {
                assert_eq!(cut.field.value(idx), 0.0);
            }
            let v = cut.field.value(idx);
            assert!((0.0..=1.0).contains(&v));
        }
        assert!(cut.c2 >= cut.c1);
        assert!(cut.gamma > 1.0, "gamma = {}", cut.gamma);
        assert!(make_cutoff(&grid, 0.2, 0.1).is_err());
    }

    #[test]
    fn cone_bound_positivity_linearity_reflection() {
        let grid = test_grid(129);
        let cut = make_cutoff(&grid, default_r_in(2), default_r_out(2)).unwrap();
        let cone = ConeRegion::default_for(2);
        let b1 = cone_lower_bound(1.0, &cone, &cut, &grid).unwrap();
        assert!(b1.c_min > 0.0, "c_min = {}", b1.c_min);
        assert!((b1.axis_slope + 2.0).abs() < 0.2, "slope = {}", b1.axis_slope);

        // doubling t exactly doubles every table value
        let b2 = cone_lower_bound(2.0, &cone, &cut, &grid).unwrap();
        for (r1, r2) in b1.rows.iter().zip(&b2.rows) {
            assert_eq!(2.0 * r1.d11, r2.d11);
        }

        // reflection x1 → −x1 maps the table onto itself
        for row in &b1.rows {
            let [i, j, _] = grid.multi_index(row.node);
            let refl = grid.flat_index([grid.m() - 1 - i, j, 0]);
            let mirror = b1.rows.iter().find(|r| r.node == refl).unwrap();
            assert!(
                (row.d11 - mirror.d11).abs() <= 1e-10 * row.d11.abs().max(1e-30),
                "{} vs {}",
                row.d11,
                mirror.d11
            );
        }
    }

    #[test]
    fn cone_must_clear_the_support() {
        let grid = test_grid(129);
        let cut = make_cutoff(&grid, 0.3, 0.8).unwrap();
        let cone = ConeRegion { r_floor: 0.81, c0: 0.75 };
        assert!(cone_lower_bound(1.0, &cone, &cut, &grid).is_err());
    }

    #[test]
    fn integral_condition_closed_forms() {
        let ts = log_grid(1e-3, 1e3, 13);
        // power(p): R ≡ (c2^{p−1} − c1^{p−1})/(p−1)
        for p in [1.5, 2.0, 3.0] {
            let phi = YoungFunction::power(p).unwrap();
            let expect = (2.0f64.powf(p - 1.0) - 0.5f64.powf(p - 1.0)) / (p - 1.0);
            for (t, r) in integral_condition_probe(&phi, &ts, 0.5, 2.0).unwrap() {
                assert!((r - expect).abs() < 1e-6 * expect, "p={p} t={t}: {r} vs {expect}");
            }
        }
        // linear: R ≡ ln(c2/c1)
        let expect = 4.0f64.ln();
        for (_, r) in integral_condition_probe(&YoungFunction::linear(), &ts, 0.5, 2.0).unwrap() {
            assert!((r - expect).abs() < 1e-6 * expect);
        }
        // powerlog(2) over 6 decades: bounded, cross-checked against a
        // dense fixed rule
        let phi = YoungFunction::power_log(2.0).unwrap();
        let curve = integral_condition_probe(&phi, &ts, 0.5, 2.0).unwrap();
        let max = curve.iter().map(|p| p.1).fold(f64::MIN, f64::max);
        let min = curve.iter().map(|p| p.1).fold(f64::MAX, f64::min);
        assert!(max / min <= 10.0);
        let t = 10.0;
        let oracle = crate::quad::fixed_simpson(
            &|s: f64| phi.eval(s).unwrap() / (s * s),
            0.5 * t,
            2.0 * t,
            1_000_000,
        ) / (phi.eval(t).unwrap() / t);
        let (_, r) = integral_condition_probe(&phi, &[t], 0.5, 2.0).unwrap()[0];
        assert!((r - oracle).abs() < 1e-8 * oracle);
    }

    #[test]
    fn slope_monotonicity_gate() {
        let scan = log_grid(1e-3, 1e3, 200);
        assert!(monotone_slope_check(&YoungFunction::power(2.0).unwrap(), &scan).unwrap());
        assert!(monotone_slope_check(&YoungFunction::power_log(2.0).unwrap(), &scan).unwrap());
        // concave t^0.5 is not in Φ
        let pairs: Vec<(f64, f64)> = (0..200).map(|i| {
            let t = i as f64 / 10.0;
            (t, t.sqrt())
        }).collect();
        let root = YoungFunction::tabulated(&pairs).unwrap();
        let scan_small: Vec<f64> = (1..=190).map(|i| i as f64 / 10.0).collect();
        assert!(!monotone_slope_check(&root, &scan_small).unwrap());
    }

    #[test]
    fn forcing_pair_behavior() {
        let grid = test_grid(257);
        let cut = make_cutoff(&grid, default_r_in(2), default_r_out(2)).unwrap();
        let ts: Vec<f64> = (1..=10).map(|k| k as f64).collect();

        // homogeneous φ: ratio independent of t
        let rows = delta2_forcing_pair(&YoungFunction::power(2.0).unwrap(), &cut, &ts).unwrap();
        let r0 = rows[0].ratio;
        for row in &rows {
            assert!((row.ratio - r0).abs() < 1e-9 * r0);
        }

        // exp_type: strictly increasing, large growth across the decade
        let rows = delta2_forcing_pair(&YoungFunction::exp_type(), &cut, &ts).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].ratio > w[0].ratio);
        }
        assert!(rows[9].ratio / rows[0].ratio > 100.0, "growth {}", rows[9].ratio / rows[0].ratio);

        // |f_t| doubles with t at every node
        let f1 = cut.laplacian.scaled(1.0 / cut.c1);
        let f2 = cut.laplacian.scaled(2.0 / cut.c1);
        for idx in 0..grid.node_count() {
            assert_eq!(2.0 * f1.value(idx), f2.value(idx));
        }
    }

    #[test]
    fn discrete_residual_of_forcing_pair() {
        // −Δ(tη/C₁) = −tΔη/C₁ holds to truncation order under the same
        // discrete Laplacian.
        let grid = test_grid(257);
        let cut = make_cutoff(&grid, default_r_in(2), default_r_out(2)).unwrap();
        let lap_u = cut.hessian.laplacian();
        let mut worst = 0.0f64;
        for idx in 0..grid.node_count() {
            if lap_u.is_valid(idx) {
                worst = worst.max((-lap_u.value(idx) - (-cut.laplacian.value(idx))).abs());
            }
        }
        assert!(worst < 1e-12 * cut.c1);
    }

    #[test]
    fn concentration_demo_small_scale() {
        let grid = test_grid(257);
        let rows =
            nabla2_failure_demo(&YoungFunction::linear(), &[0.1, 0.05], &grid).unwrap();
        for row in &rows {
            assert!((row.mass - 1.0).abs() < 0.02, "mass {}", row.mass);
        }
        assert!(rows[1].ratio > rows[0].ratio);
        assert!(mollified_source(&grid, 1e-4).is_err());
        assert!(mollified_source(&grid, 0.5).is_err());
    }
}
