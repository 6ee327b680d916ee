use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chain::{build_chain_with_diffusion, MarkovChain1D, RightBoundary};
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::walk::{run_walkers, Ledger, WalkBackend, WalkConfig};

const TAG_DIMENSION: u64 = 0x0064_696d;

/// Point-source diffusion on a square grid, solved as two independent 1D
/// walks whose densities multiply.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Diffusion2D {
    /// Initial point mass.
    pub c0: f64,
    /// Diffusion coefficient.
    pub d: f64,
    /// Walkers per dimension.
    pub w: u64,
    /// Solution time in steps; `t = steps·dt`.
    pub steps: u64,
    /// Source grid indices `(i, j)`.
    pub source: (usize, usize),
    /// Side length of the grid.
    pub l: f64,
    /// Positions per dimension.
    pub n: usize,
    pub dt: f64,
}

impl Default for Diffusion2D {
    fn default() -> Self {
        Self {
            c0: 1.0,
            d: 1.0,
            w: 100_000,
            steps: 80,
            source: (25, 25),
            l: 2.0,
            n: 50,
            dt: 0.00038,
        }
    }
}

impl Diffusion2D {
    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0 && self.d > 0.0 && self.l > 0.0 && self.dt > 0.0) || self.n < 2 || self.w == 0 || self.steps == 0
        {
            return Err(Error::Config(format!(
                "2D problem needs c0, d, l, dt > 0, n >= 2, w, steps >= 1 (got {self:?})"
            )));
        }
        if self.source.0 >= self.n || self.source.1 >= self.n {
            return Err(Error::Config(format!("source {:?} outside a {}-point grid", self.source, self.n)));
        }
        Ok(())
    }

    pub fn t(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    /// The per-dimension chain, reflecting at both edges.
    pub fn chain(&self) -> Result<MarkovChain1D> {
        self.validate()?;
        build_chain_with_diffusion(self.l, self.n, self.dt, self.d, RightBoundary::Reflecting)
    }

    pub fn source_position(&self) -> Result<(f64, f64)> {
        let c = self.chain()?;
        Ok((c.position(self.source.0), c.position(self.source.1)))
    }

    /// Heat kernel sampled on the grid, row-major in `(i, j)`.
    pub fn analytical_grid(&self) -> Result<Vec<f64>> {
        let xs = self.chain()?.positions();
        let t = self.t();
        let mut out = Vec::with_capacity(self.n * self.n);
        for &x in &xs {
            for &y in &xs {
                out.push(analytical_diffusion_2d(x, y, t, self)?);
            }
        }
        Ok(out)
    }
}

/// Free-space heat kernel `c0/(4πDt)·exp(−r²/(4Dt))` around the source.
pub fn analytical_diffusion_2d(x: f64, y: f64, t: f64, p: &Diffusion2D) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("heat kernel needs t > 0, got {t}")));
    }
    let (x0, y0) = p.source_position()?;
    let r2 = (x - x0).powi(2) + (y - y0).powi(2);
    let s = 4.0 * p.d * t;
    Ok(p.c0 / (PI * s) * (-r2 / s).exp())
}

/// Grid solution of a 2D diffusion run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSolution {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Per-dimension densities, each integrating to `√c0`.
    pub ux: Vec<f64>,
    pub uy: Vec<f64>,
    /// `ux[i]·uy[j]`, row-major.
    pub values: Vec<f64>,
}

impl DiffusionSolution {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ys.len() + j]
    }
}

/// Per-dimension density `√c0·count/(W·dx)`.
pub fn density(counts: &[u64], c0: f64, w: u64, dx: f64) -> Vec<f64> {
    let scale = c0.sqrt() / (w as f64 * dx);
    counts.iter().map(|&c| c as f64 * scale).collect()
}

/// Runs `p.w` walkers for `p.steps` steps from the source in each
/// dimension, one backend per dimension.
pub fn solve_diffusion_2d(
    p: &Diffusion2D,
    backends: [&WalkBackend; 2],
    master_seed: u64,
    workers: usize,
) -> Result<(DiffusionSolution, Ledger)> {
    let chain = p.chain()?;
    let sources = [p.source.0, p.source.1];
    let mut u = Vec::with_capacity(2);
    let mut ledger: Option<Ledger> = None;
    for (dim, backend) in backends.into_iter().enumerate() {
        if backend.len() != chain.n {
            return Err(Error::Shape {
                expected: chain.n,
                got: backend.len(),
            });
        }
        let seed = derive_seed(master_seed, &[TAG_DIMENSION, dim as u64]);
        let cfg = WalkConfig::time_dependent(p.w, sources[dim], p.steps);
        let (out, l) = run_walkers(&cfg, backend, seed, workers)?;
        let counts = out
            .terminal()
            .ok_or_else(|| Error::State("time-dependent walk produced no histogram".into()))?;
        u.push(density(counts, p.c0, p.w, chain.dx));
        match ledger.as_mut() {
            Some(acc) => acc.merge(&l)?,
            None => ledger = Some(l),
        }
    }
    let (ux, uy) = (u.swap_remove(0), u.swap_remove(0));
    let values = ux.iter().flat_map(|a| uy.iter().map(move |b| a * b)).collect();
    let xs = chain.positions();
    Ok((
        DiffusionSolution {
            ys: xs.clone(),
            xs,
            ux,
            uy,
            values,
        },
        ledger.expect("two dimensions"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_peak_and_symmetry() {
        let p = Diffusion2D::default();
        let t = p.t();
        assert!((t - 0.0304).abs() < 1e-15);
        let peak = analytical_diffusion_2d(1.0, 1.0, t, &p).unwrap();
        assert!((peak - 2.6177).abs() < 1e-4, "{peak}");
        let a = 0.13;
        let l = analytical_diffusion_2d(1.0 - a, 1.0, t, &p).unwrap();
        let r = analytical_diffusion_2d(1.0 + a, 1.0, t, &p).unwrap();
        assert!((l - r).abs() < 1e-15);
        assert!(analytical_diffusion_2d(1.0, 1.0, 0.0, &p).is_err());
    }

    #[test]
    fn kernel_integrates_to_c0() {
        // separable: the plane integral is the square of a 1D Simpson sum
        let p = Diffusion2D::default();
        let t = p.t();
        let s = (2.0 * p.d * t).sqrt();
        let g = |x: f64| analytical_diffusion_2d(x, 1.0, t, &p).unwrap();
        let (a, b, n) = (1.0 - 12.0 * s, 1.0 + 12.0 * s, 4000);
        let h = (b - a) / n as f64;
        let mut line = g(a) + g(b);
        for k in 1..n {
            line += if k % 2 == 1 { 4.0 } else { 2.0 } * g(a + k as f64 * h);
        }
        line *= h / 3.0;
        // line = c0/√(4πDt)·∫ along x at y = y0; the y-marginal supplies the rest
        let mass = line * (4.0 * PI * p.d * t).sqrt();
        assert!((mass - p.c0).abs() < 1e-6, "{mass}");
    }

    #[test]
    fn single_step_splits_mass_like_the_chain_row() {
        let p = Diffusion2D {
            w: 1_000_000,
            steps: 1,
            ..Diffusion2D::default()
        };
        let c = p.chain().unwrap();
        let b = WalkBackend::software(&c);
        let (sol, ledger) = solve_diffusion_2d(&p, [&b, &b], 3, 1).unwrap();
        assert_eq!(ledger.steps, 2_000_000);
        let w = p.w as f64;
        for (k, expect) in [(24, c.pg), (25, c.ps), (26, c.pg)] {
            let frac = sol.ux[k] * c.dx;
            assert!((frac - expect).abs() < 3.0 * (expect * (1.0 - expect) / w).sqrt(), "{k}");
        }
        let reached: f64 = sol.ux.iter().map(|u| u * c.dx).sum();
        assert!((reached - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_mass_is_c0() {
        let p = Diffusion2D {
            w: 2000,
            c0: 2.5,
            ..Diffusion2D::default()
        };
        let c = p.chain().unwrap();
        let b = WalkBackend::software(&c);
        let (sol, _) = solve_diffusion_2d(&p, [&b, &b], 8, 1).unwrap();
        let mass: f64 = sol.values.iter().sum::<f64>() * c.dx * c.dx;
        assert!((mass - 2.5).abs() < 1e-9);
        assert_eq!(sol.at(3, 4), sol.ux[3] * sol.uy[4]);
    }

    #[test]
    fn invalid_problems() {
        let bad = Diffusion2D { source: (50, 1), ..Diffusion2D::default() };
        assert!(bad.validate().is_err());
        let bad = Diffusion2D { c0: 0.0, ..Diffusion2D::default() };
        assert!(bad.chain().is_err());
    }
}
