//! Discrete Markov chain for the walk.
//!
//! Per step a walker stays with `Ps` or moves one cell left/right with `Pg`
//! each. Both come from integrating the Gaussian propagator of variance
//! `2·D·dt` over the home cell and over the tail beyond it. The left edge
//! reflects (stay `Ps`, move right `2·Pg`); the right edge absorbs or
//! reflects symmetrically.

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeftBoundary {
    /// Stay with `Ps`, move right with `2·Pg`.
    ReflectDouble,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RightBoundary {
    /// The last position is absorbing.
    Absorbing,
    /// Mirror image of the left edge.
    Reflecting,
}

/// `(Ps, Pg)` for unit diffusion coefficient.
pub fn transition_probabilities(dx: f64, dt: f64) -> Result<(f64, f64)> {
    transition_probabilities_with_diffusion(dx, dt, 1.0)
}

/// `(Ps, Pg)` for a propagator of variance `2·d·dt`:
/// `Ps = erf(dx / (4·√(d·dt)))`, `Pg = erfc(dx / (4·√(d·dt))) / 2`.
pub fn transition_probabilities_with_diffusion(dx: f64, dt: f64, d: f64) -> Result<(f64, f64)> {
    if !(dx > 0.0 && dt > 0.0 && d > 0.0) {
        return Err(Error::domain(format!(
            "transition probabilities need dx, dt, D > 0 (got {dx}, {dt}, {d})"
        )));
    }
    // half cell over σ·√2, σ = √(2·d·dt)
    let a = 0.5 * dx / (2.0 * (d * dt).sqrt());
    Ok((erf(a), 0.5 * erfc(a)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovChain1D {
    pub n: usize,
    pub dx: f64,
    pub dt: f64,
    /// Diffusion coefficient.
    pub d: f64,
    pub ps: f64,
    pub pg: f64,
    pub left_boundary: LeftBoundary,
    pub right_boundary: RightBoundary,
}

/// `(left, stay, right)` probabilities of one row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Row {
    pub left: f64,
    pub stay: f64,
    pub right: f64,
}

pub fn build_chain(l: f64, n: usize, dt: f64, right_boundary: RightBoundary) -> Result<MarkovChain1D> {
    build_chain_with_diffusion(l, n, dt, 1.0, right_boundary)
}

/// Positions `X_i = i·dx`, `dx = l/n`, `i = 0..n`.
pub fn build_chain_with_diffusion(
    l: f64,
    n: usize,
    dt: f64,
    d: f64,
    right_boundary: RightBoundary,
) -> Result<MarkovChain1D> {
    if n < 2 || !(l > 0.0) || !(dt > 0.0) || !(d > 0.0) {
        return Err(Error::domain(format!(
            "chain needs n >= 2 and positive l, dt, D (got n={n}, l={l}, dt={dt}, D={d})"
        )));
    }
    let dx = l / n as f64;
    let (ps, pg) = transition_probabilities_with_diffusion(dx, dt, d)?;
    if !(ps > 0.0 && ps < 1.0 && pg > 0.0) {
        return Err(Error::domain(format!(
            "degenerate transition probabilities Ps={ps}, Pg={pg} for dx={dx}, dt={dt}"
        )));
    }
    Ok(MarkovChain1D {
        n,
        dx,
        dt,
        d,
        ps,
        pg,
        left_boundary: LeftBoundary::ReflectDouble,
        right_boundary,
    })
}

impl MarkovChain1D {
    pub fn position(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.position(i)).collect()
    }

    /// Index of the absorbing state, if any.
    pub fn absorbing(&self) -> Option<usize> {
        match self.right_boundary {
            RightBoundary::Absorbing => Some(self.n - 1),
            RightBoundary::Reflecting => None,
        }
    }

    pub fn row(&self, i: usize) -> Row {
        assert!(i < self.n, "position {i} outside chain of {}", self.n);
        let last = self.n - 1;
        match (i, self.right_boundary) {
            (i, RightBoundary::Absorbing) if i == last => Row {
                left: 0.0,
                stay: 1.0,
                right: 0.0,
            },
            (0, _) => Row {
                left: 0.0,
                stay: self.ps,
                right: 2.0 * self.pg,
            },
            (i, RightBoundary::Reflecting) if i == last => Row {
                left: 2.0 * self.pg,
                stay: self.ps,
                right: 0.0,
            },
            _ => Row {
                left: self.pg,
                stay: self.ps,
                right: self.pg,
            },
        }
    }

    /// Dense row-stochastic transition matrix.
    pub fn transition_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| {
                let mut r = vec![0.0; self.n];
                let row = self.row(i);
                r[i] = row.stay;
                if i > 0 {
                    r[i - 1] = row.left;
                }
                if i + 1 < self.n {
                    r[i + 1] = row.right;
                }
                r
            })
            .collect()
    }

    /// Mean and variance of one interior step, in length units.
    pub fn step_moments(&self) -> (f64, f64) {
        let r = self.row(self.n / 2);
        let mean = (r.right - r.left) * self.dx;
        let var = (r.right + r.left) * self.dx * self.dx - mean * mean;
        (mean, var)
    }

    pub fn summary(&self) -> ChainSummary {
        ChainSummary {
            n: self.n,
            dx: self.dx,
            dt: self.dt,
            ps: self.ps,
            pg: self.pg,
            left_boundary: self.left_boundary,
            right_boundary: self.right_boundary,
        }
    }
}

/// JSON dump of a chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub n: usize,
    pub dx: f64,
    pub dt: f64,
    pub ps: f64,
    pub pg: f64,
    pub left_boundary: LeftBoundary,
    pub right_boundary: RightBoundary,
}
