//! The Orlicz modular ∫_{B₁} φ(|g|) dx of a sampled field, computed both by
//! direct midpoint quadrature and by the layer-cake representation
//! ∫ φ(|g|) = ∫₀^∞ |{|g| > λ}| d[φ(λ)], plus the Stieltjes tail integral
//! used by the covering argument.

use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::young::{
    check_nabla2, default_a_candidates, default_scan, stieltjes_increments, YoungFunction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    LayerCake,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::LayerCake => "layercake",
        }
    }
}

/// Value of a modular together with the mask it was integrated over.
///
/// Overflow of φ maps to an infinite value rather than an error: it signals
/// g ∉ K^φ at this resolution and experiments report it as divergence.
#[derive(Debug, Clone)]
pub struct ModularResult {
    pub value: f64,
    pub method: Method,
    pub mask_volume: f64,
}

impl ModularResult {
    pub fn is_infinite(&self) -> bool {
        !self.value.is_finite()
    }
}

/// Midpoint-rule modular: h^n Σ φ(|g(node)|) over the field's valid mask.
pub fn modular_direct(phi: &YoungFunction, g: &ScalarField) -> Result<ModularResult> {
    let mut sum = 0.0f64;
    for idx in 0..g.grid.node_count() {
        if !g.is_valid(idx) {
            continue;
        }
        let v = phi.eval(g.value(idx).abs())?;
        if !v.is_finite() {
            sum = f64::INFINITY;
            break;
        }
        sum += v;
    }
    let value = if sum.is_finite() { sum * g.grid.cell_volume() } else { f64::INFINITY };
    Ok(ModularResult { value, method: Method::Direct, mask_volume: g.mask_volume() })
}

/// Distribution function |{x : |g| > λ}| as a node count times h^n.
pub fn distribution_function(g: &ScalarField, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("lambda must be >= 0, got {lambda}")));
    }
    let count = (0..g.grid.node_count())
        .filter(|&i| g.is_valid(i) && g.value(i).abs() > lambda)
        .count();
    Ok(count as f64 * g.grid.cell_volume())
}

/// Layer-cake modular: Σᵢ |{|g| > λᵢ}| (φ(λᵢ₊₁) − φ(λᵢ)).
///
/// The grid must cover [0, max|g|]; the distribution counts are taken from
/// a single sorted copy of |g|, which matches the brute-force node count.
pub fn modular_layercake(
    phi: &YoungFunction,
    g: &ScalarField,
    lambda_grid: &[f64],
) -> Result<ModularResult> {
    let sup = g.max_abs();
    match lambda_grid.last() {
        Some(&last) if last >= sup => {}
        _ => {
            return Err(Error::Param(format!(
                "lambda grid must cover max|g| = {sup}"
            )))
        }
    }
    let increments = stieltjes_increments(phi, lambda_grid)?;
    let sorted = sorted_abs_values(g);
    let cell = g.grid.cell_volume();
    let mut sum = 0.0f64;
    for (i, &dphi) in increments.iter().enumerate() {
        let lam = lambda_grid[i];
        let count = sorted.len() - sorted.partition_point(|&v| v <= lam);
        let term = count as f64 * cell * dphi;
        if !term.is_finite() {
            sum = f64::INFINITY;
            break;
        }
        sum += term;
    }
    Ok(ModularResult { value: sum, method: Method::LayerCake, mask_volume: g.mask_volume() })
}

/// Default λ-grid: the exact 0 endpoint plus `points` geometric nodes from
/// max|g|·1e-6 up to just above max|g|.
pub fn default_lambda_grid(g: &ScalarField, points: usize) -> Vec<f64> {
    let sup = g.max_abs();
    if sup == 0.0 {
        return vec![0.0, 1.0];
    }
    let lo = sup * 1e-6;
    let hi = sup * (1.0 + 1e-9);
    let mut grid = Vec::with_capacity(points + 1);
    grid.push(0.0);
    let (llo, lhi) = (lo.ln(), hi.ln());
    for i in 0..points {
        grid.push((llo + (lhi - llo) * i as f64 / (points - 1) as f64).exp());
    }
    grid
}

/// Result of the Stieltjes tail integral
/// ∫₀^∞ μ^{-p} { ∫_{|g| > b₁μ} |g|^p dx } d[φ(b₂μ)].
#[derive(Debug, Clone)]
pub struct TailIntegral {
    pub value: f64,
    /// value / modular_direct(φ, g); the quantity the covering lemma bounds.
    pub bound_ratio: f64,
}

/// Evaluate the tail integral on a geometric μ-grid of `mu_points` cells.
///
/// Requires φ ∈ Δ₂ ∩ ∇₂ with 1 < p < α₂; the integral diverges near μ = 0
/// otherwise.
pub fn stieltjes_tail_integral(
    phi: &YoungFunction,
    g: &ScalarField,
    p: f64,
    b1: f64,
    b2: f64,
    mu_points: usize,
) -> Result<TailIntegral> {
    if !(b1 > 0.0 && b2 > 0.0) {
        return Err(Error::Param("b1 and b2 must be positive".into()));
    }
    let rep = check_nabla2(phi, &default_scan(), &default_a_candidates())?;
    if !rep.satisfied {
        return Err(Error::Param(format!(
            "phi = {} does not satisfy the nabla2 condition",
            phi.name()
        )));
    }
    if !(1.0 < p && p < rep.alpha2) {
        return Err(Error::Param(format!(
            "p must lie in (1, alpha2) = (1, {}), got {p}",
            rep.alpha2
        )));
    }
    let sup = g.max_abs();
    let modular = modular_direct(phi, g)?;
    if sup == 0.0 {
        return Ok(TailIntegral { value: 0.0, bound_ratio: 0.0 });
    }

    // suffix sums of |g|^p over the sorted values give S_p(τ) = ∫_{|g|>τ}|g|^p
    let sorted = sorted_abs_values(g);
    let cell = g.grid.cell_volume();
    let mut suffix = vec![0.0f64; sorted.len() + 1];
    for i in (0..sorted.len()).rev() {
        suffix[i] = suffix[i + 1] + sorted[i].powf(p);
    }
    let s_p = |tau: f64| -> f64 { suffix[sorted.len().min(sorted.partition_point(|&v| v <= tau))] * cell };

    let mu_max = sup / b1;
    let mu_min = mu_max * 1e-6;
    let (llo, lhi) = (mu_min.ln(), (mu_max * (1.0 + 1e-12)).ln());
    let points = mu_points.max(2);
    let mu_at = |i: usize| (llo + (lhi - llo) * i as f64 / (points - 1) as f64).exp();
    let mut value = 0.0f64;
    let mut prev_phi = phi.eval(b2 * mu_at(0))?;
    for i in 0..points - 1 {
        let mu = mu_at(i);
        let next_phi = phi.eval(b2 * mu_at(i + 1))?;
        value += s_p(b1 * mu) / mu.powf(p) * (next_phi - prev_phi);
        prev_phi = next_phi;
    }
    let bound_ratio = if modular.value > 0.0 { value / modular.value } else { 0.0 };
    Ok(TailIntegral { value, bound_ratio })
}

fn sorted_abs_values(g: &ScalarField) -> Vec<f64> {
    let mut vals: Vec<f64> = (0..g.grid.node_count())
        .filter(|&i| g.is_valid(i))
        .map(|i| g.value(i).abs())
        .collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}
