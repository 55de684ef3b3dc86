//! Uniform Cartesian sampling of the unit ball: grids, scalar fields,
//! finite-difference Hessians and the absolute-sum Hessian magnitude
//! |D²u| = Σᵢⱼ |D_{xᵢxⱼ} u|, plus the seeded band-limited source generator.

use std::io::{Read, Write};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Uniform grid on [−1,1]^n with an inside mask |x| < 1.
///
/// `m` is odd so the origin is a node; spacing h = 2/(m−1).
#[derive(Debug)]
pub struct BallGrid {
    n: usize,
    m: usize,
    h: f64,
    xs: Vec<f64>,
    inside: Vec<bool>,
}

impl BallGrid {
    pub fn new(n: usize, m: usize) -> Result<Arc<Self>> {
        if n != 2 && n != 3 {
            return Err(Error::Param(format!("dimension must be 2 or 3, got {n}")));
        }
        if m < 5 || m % 2 == 0 {
            return Err(Error::Param(format!("nodes per axis must be odd and >= 5, got {m}")));
        }
        let h = 2.0 / (m - 1) as f64;
        let xs: Vec<f64> = (0..m).map(|i| -1.0 + h * i as f64).collect();
        let count = m.pow(n as u32);
        let mut grid = BallGrid { n, m, h, xs, inside: Vec::new() };
        let mut inside = vec![false; count];
        for idx in 0..count {
            inside[idx] = grid.radius2_at(idx) < 1.0;
        }
        grid.inside = inside;
        Ok(Arc::new(grid))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn node_count(&self) -> usize {
        self.inside.len()
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.n as i32)
    }

    pub fn is_inside(&self, idx: usize) -> bool {
        self.inside[idx]
    }

    /// Multi-index of a flat node index (unused axes are 0).
    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let m = self.m;
        match self.n {
            2 => [idx / m, idx % m, 0],
            _ => [idx / (m * m), (idx / m) % m, idx % m],
        }
    }

    pub fn flat_index(&self, mi: [usize; 3]) -> usize {
        let m = self.m;
        match self.n {
            2 => mi[0] * m + mi[1],
            _ => (mi[0] * m + mi[1]) * m + mi[2],
        }
    }

    /// Coordinates of a node (unused axes are 0).
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let mi = self.multi_index(idx);
        let mut x = [0.0; 3];
        for k in 0..self.n {
            x[k] = self.xs[mi[k]];
        }
        x
    }

    fn radius2_at(&self, idx: usize) -> f64 {
        let x = self.coords(idx);
        x.iter().map(|v| v * v).sum()
    }

    pub fn radius(&self, idx: usize) -> f64 {
        self.radius2_at(idx).sqrt()
    }

    /// Flat index of the origin node.
    pub fn origin(&self) -> usize {
        let c = (self.m - 1) / 2;
        self.flat_index([c, c, c])
    }

    /// Neighbor along `axis` with offset ±1; None at the lattice edge.
    pub fn neighbor(&self, idx: usize, axis: usize, step: isize) -> Option<usize> {
        let mut mi = self.multi_index(idx);
        let i = mi[axis] as isize + step;
        if i < 0 || i >= self.m as isize {
            return None;
        }
        mi[axis] = i as usize;
        Some(self.flat_index(mi))
    }

    pub fn inside_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(move |&i| self.inside[i])
    }
}

/// Real-valued field sampled on a [`BallGrid`].
///
/// Values are defined where `mask` is set and are exactly 0 elsewhere.
/// The default mask is the grid's inside mask; derived fields (Hessians,
/// restricted solves) carry smaller masks.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub grid: Arc<BallGrid>,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<BallGrid>) -> Self {
        Self {
            values: vec![0.0; grid.node_count()],
            mask: grid.inside.clone(),
            grid: grid.clone(),
        }
    }

    pub fn from_fn(grid: &Arc<BallGrid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut field = Self::zeros(grid);
        for idx in 0..grid.node_count() {
            if field.mask[idx] {
                let x = grid.coords(idx);
                field.values[idx] = f(&x[..grid.n()]);
            }
        }
        field
    }

    pub fn constant(grid: &Arc<BallGrid>, c: f64) -> Self {
        Self::from_fn(grid, |_| c)
    }

    pub fn value(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_valid(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn set(&mut self, idx: usize, v: f64) {
        debug_assert!(self.mask[idx] || v == 0.0);
        self.values[idx] = v;
    }

    /// Replace the mask, zeroing values outside it.
    pub fn with_mask(mut self, mask: Vec<bool>) -> Self {
        assert_eq!(mask.len(), self.values.len());
        for (v, &keep) in self.values.iter_mut().zip(&mask) {
            if !keep {
                *v = 0.0;
            }
        }
        self.mask = mask;
        self
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= c;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .map(|(v, _)| v.abs())
            .fold(0.0, f64::max)
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Measure of the validity mask, h^n · #valid nodes.
    pub fn mask_volume(&self) -> f64 {
        self.valid_count() as f64 * self.grid.cell_volume()
    }

    /// Intersection of the two masks; panics on grid shape mismatch.
    pub fn common_mask(&self, other: &Self) -> Vec<bool> {
        assert_eq!(self.values.len(), other.values.len());
        self.mask.iter().zip(&other.mask).map(|(&a, &b)| a && b).collect()
    }

    /// Flat CSV dump: node index, coordinates, value.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        let n = self.grid.n();
        match n {
            2 => writeln!(w, "index,x1,x2,value")?,
            _ => writeln!(w, "index,x1,x2,x3,value")?,
        }
        for idx in 0..self.values.len() {
            if !self.mask[idx] {
                continue;
            }
            let x = self.grid.coords(idx);
            match n {
                2 => writeln!(w, "{idx},{},{},{}", x[0], x[1], self.values[idx])?,
                _ => writeln!(w, "{idx},{},{},{},{}", x[0], x[1], x[2], self.values[idx])?,
            }
        }
        Ok(())
    }

    /// Compact binary dump: u64 n, u64 m, then row-major little-endian f64.
    pub fn write_binary(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(&(self.grid.n() as u64).to_le_bytes())?;
        w.write_all(&(self.grid.m() as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(r: &mut impl Read) -> Result<Self> {
        let mut buf8 = [0u8; 8];
        r.read_exact(&mut buf8)?;
        let n = u64::from_le_bytes(buf8) as usize;
        r.read_exact(&mut buf8)?;
        let m = u64::from_le_bytes(buf8) as usize;
        let grid = BallGrid::new(n, m)?;
        let mut field = ScalarField::zeros(&grid);
        for idx in 0..grid.node_count() {
            r.read_exact(&mut buf8)?;
            field.values[idx] = f64::from_le_bytes(buf8);
        }
        Ok(field)
    }
}

/// All n² second-derivative components of a field plus the absolute sum
/// Σᵢⱼ |D_{xᵢxⱼ}| used throughout as the Hessian magnitude.
#[derive(Debug, Clone)]
pub struct HessianField {
    pub grid: Arc<BallGrid>,
    /// Row-major components, `components[i*n + j]` = D_{xᵢxⱼ}.
    pub components: Vec<ScalarField>,
    pub abs_sum: ScalarField,
}

impl HessianField {
    pub fn component(&self, i: usize, j: usize) -> &ScalarField {
        &self.components[i * self.grid.n() + j]
    }

    /// Discrete Laplacian Σᵢ D_{xᵢxᵢ} on the Hessian's validity mask.
    pub fn laplacian(&self) -> ScalarField {
        let n = self.grid.n();
        let mut out = ScalarField::zeros(&self.grid).with_mask(self.abs_sum.mask.clone());
        for idx in 0..out.values.len() {
            if out.mask[idx] {
                out.values[idx] = (0..n).map(|i| self.component(i, i).value(idx)).sum();
            }
        }
        out
    }
}

/// Second-order central-difference Hessian.
///
/// A node is valid when every node within Chebyshev distance `margin` of it
/// lies in the input mask, so the full 3^n stencil never leaves the domain;
/// invalid nodes are excluded from the output mask.
pub fn hessian_fd(u: &ScalarField, margin: usize) -> Result<HessianField> {
    let grid = &u.grid;
    if grid.m() < 5 {
        return Err(Error::Param("grid too coarse for a central-difference Hessian".into()));
    }
    if margin < 1 {
        return Err(Error::Param("hessian margin must be >= 1".into()));
    }
    let n = grid.n();
    let h = grid.h();
    let valid = erode_mask(grid, u.mask(), margin);

    let mut components =
        vec![ScalarField::zeros(grid).with_mask(valid.clone()); n * n];
    let mut abs_sum = ScalarField::zeros(grid).with_mask(valid.clone());

    let h2 = h * h;
    for idx in 0..grid.node_count() {
        if !valid[idx] {
            continue;
        }
        let uc = u.value(idx);
        let mut total = 0.0;
        for i in 0..n {
            let up = u.value(grid.neighbor(idx, i, 1).unwrap());
            let um = u.value(grid.neighbor(idx, i, -1).unwrap());
            let dii = (up - 2.0 * uc + um) / h2;
            components[i * n + i].values[idx] = dii;
            total += dii.abs();
            for j in (i + 1)..n {
                let pp = u.value(shift2(grid, idx, i, 1, j, 1));
                let pm = u.value(shift2(grid, idx, i, 1, j, -1));
                let mp = u.value(shift2(grid, idx, i, -1, j, 1));
                let mm = u.value(shift2(grid, idx, i, -1, j, -1));
                let dij = (pp - pm - mp + mm) / (4.0 * h2);
                components[i * n + j].values[idx] = dij;
                components[j * n + i].values[idx] = dij;
                total += 2.0 * dij.abs();
            }
        }
        abs_sum.values[idx] = total;
    }
    Ok(HessianField { grid: grid.clone(), components, abs_sum })
}

fn shift2(grid: &BallGrid, idx: usize, ax1: usize, s1: isize, ax2: usize, s2: isize) -> usize {
    let first = grid.neighbor(idx, ax1, s1).unwrap();
    grid.neighbor(first, ax2, s2).unwrap()
}

/// Mask of nodes whose full Chebyshev-`margin` neighborhood is masked in.
fn erode_mask(grid: &BallGrid, mask: &[bool], margin: usize) -> Vec<bool> {
    let n = grid.n();
    let m = grid.m() as isize;
    let r = margin as isize;
    let mut out = vec![false; mask.len()];
    'node: for idx in 0..mask.len() {
        if !mask[idx] {
            continue;
        }
        let mi = grid.multi_index(idx);
        let mut off = [-r; 3];
        if n == 2 {
            off[2] = 0;
        }
        loop {
            let mut q = [0usize; 3];
            let mut inside_lattice = true;
            for k in 0..3 {
                let v = mi[k] as isize + if k < n { off[k] } else { 0 };
                if v < 0 || v >= m {
                    inside_lattice = false;
                    break;
                }
                q[k] = v as usize;
            }
            if !inside_lattice || !mask[grid.flat_index(q)] {
                continue 'node;
            }
            // advance the offset counter
            let mut k = 0;
            loop {
                if k == n {
                    out[idx] = true;
                    continue 'node;
                }
                off[k] += 1;
                if off[k] <= r {
                    break;
                }
                off[k] = -r;
                k += 1;
            }
        }
    }
    out
}

/// Deterministic smooth source: a seeded superposition of `modes` Gaussian
/// bumps, multiplied by a cutoff vanishing for |x| ≥ 0.95, sup-normalized
/// to 1. Identical (bitwise) for identical seeds.
pub fn random_bandlimited_field(
    grid: &Arc<BallGrid>,
    modes: usize,
    seed: u64,
) -> Result<ScalarField> {
    if modes == 0 {
        return Err(Error::Param("modes must be >= 1".into()));
    }
    let n = grid.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bumps = Vec::with_capacity(modes);
    for _ in 0..modes {
        // rejection-sample a center in the ball of radius 0.6
        let center = loop {
            let mut c = [0.0; 3];
            for ck in c.iter_mut().take(n) {
                *ck = rng.gen_range(-0.6..0.6);
            }
            if c.iter().map(|v| v * v).sum::<f64>() < 0.36 {
                break c;
            }
        };
        let width: f64 = rng.gen_range(0.15..0.35);
        let mag: f64 = rng.gen_range(0.3..1.0);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        bumps.push((center, width, sign * mag));
    }
    let mut field = ScalarField::from_fn(grid, |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let cut = radial_cutoff(r, 0.7, 0.95);
        if cut == 0.0 {
            return 0.0;
        }
        let mut s = 0.0;
        for (c, w, a) in &bumps {
            let d2: f64 = x.iter().zip(c.iter()).map(|(xi, ci)| (xi - ci) * (xi - ci)).sum();
            s += a * (-d2 / (2.0 * w * w)).exp();
        }
        s * cut
    });
    let sup = field.max_abs();
    if sup > 0.0 {
        field = field.scaled(1.0 / sup);
    }
    Ok(field)
}

/// Exp-smooth transition: 1 for r ≤ r_in, exactly 0 for r ≥ r_out,
/// strictly monotone C^∞ in between.
pub fn radial_cutoff(r: f64, r_in: f64, r_out: f64) -> f64 {
    if r <= r_in {
        1.0
    } else if r >= r_out {
        0.0
    } else {
        let s = (r - r_in) / (r_out - r_in);
        let g = |x: f64| if x <= 0.0 { 0.0 } else { (-1.0 / x).exp() };
        g(1.0 - s) / (g(s) + g(1.0 - s))
    }
}
