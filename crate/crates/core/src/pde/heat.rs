use serde::{Deserialize, Serialize};

use crate::chain::{build_chain, MarkovChain1D, RightBoundary};
use crate::error::{Error, Result};
use crate::walk::{run_walkers, Ledger, PassageMatrix, WalkBackend, WalkConfig};

/// Steady heat conduction in a wire `[0, l]` with a linearly decaying
/// source: `u(0) = 0`, `u'(l) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteadyHeat1D {
    pub l: f64,
    pub n: usize,
    /// Source gradient magnitude.
    pub f: f64,
    pub dt: f64,
    /// Walkers per start position.
    pub w: u64,
}

impl Default for SteadyHeat1D {
    fn default() -> Self {
        Self {
            l: 2.0,
            n: 50,
            f: 3.0,
            dt: 0.00038,
            w: 10_000,
        }
    }
}

impl SteadyHeat1D {
    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0 && self.dt > 0.0 && self.f >= 0.0 && self.f.is_finite()) || self.n < 2 || self.w == 0 {
            return Err(Error::Config(format!(
                "1D problem needs l, dt > 0, f >= 0, n >= 2, w >= 1 (got {self:?})"
            )));
        }
        Ok(())
    }

    pub fn chain(&self) -> Result<MarkovChain1D> {
        self.validate()?;
        build_chain(self.l, self.n, self.dt, RightBoundary::Absorbing)
    }

    /// Closed-form solution at every grid position.
    pub fn analytical(&self) -> Result<Vec<f64>> {
        self.chain()?
            .positions()
            .into_iter()
            .map(|x| analytical_steady_heat(x, self.f, self.l))
            .collect()
    }
}

/// `F·L·x²/2 − F·x³/6`.
pub fn analytical_steady_heat(x: f64, f: f64, l: f64) -> Result<f64> {
    if !(0.0..=l).contains(&x) {
        return Err(Error::domain(format!("x = {x} outside [0, {l}]")));
    }
    Ok(f * l * x * x / 2.0 - f * x * x * x / 6.0)
}

/// `u(X_i) = u_i − u_0` with `u_i = −(F·dt/W)·Σ_j n_ij·(L − X_j)`.
pub fn steady_heat_estimate(p: &SteadyHeat1D, chain: &MarkovChain1D, pm: &PassageMatrix) -> Result<Vec<f64>> {
    if pm.n != chain.n {
        return Err(Error::Shape {
            expected: chain.n,
            got: pm.n,
        });
    }
    let weight: Vec<f64> = chain.positions().iter().map(|x| p.l - x).collect();
    let scale = -p.f * p.dt / pm.w as f64;
    let u: Vec<f64> = (0..pm.n)
        .map(|i| {
            let s: f64 = pm.row(i).iter().zip(&weight).map(|(&c, w)| c as f64 * w).sum();
            scale * s
        })
        .collect();
    Ok(u.iter().map(|ui| ui - u[0]).collect())
}

/// Runs `p.w` walkers from every position to absorption and returns the
/// solution at each grid position.
pub fn solve_steady_heat(
    p: &SteadyHeat1D,
    backend: &WalkBackend,
    master_seed: u64,
    workers: usize,
) -> Result<(Vec<f64>, Ledger)> {
    let chain = p.chain()?;
    if backend.len() != chain.n {
        return Err(Error::Shape {
            expected: chain.n,
            got: backend.len(),
        });
    }
    let (out, ledger) = run_walkers(&WalkConfig::steady(p.w), backend, master_seed, workers)?;
    let pm = out
        .passage()
        .ok_or_else(|| Error::State("steady walk produced no passage matrix".into()))?;
    Ok((steady_heat_estimate(p, &chain, pm)?, ledger))
}
