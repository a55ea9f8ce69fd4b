//! State-space check: sample weight realizations of the pattern, build the
//! controllability matrix `[B, AB, ..., A^{n-1}B]`, and measure rank and
//! standard-basis membership numerically. No graph combinatorics involved,
//! except the optional expected dimension used to spot degenerate draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{RawGraph, StructuredDag};
use crate::stems::generic_dimension;

pub const MIN_MAGNITUDE: f64 = 0.5;
pub const MAX_MAGNITUDE: f64 = 2.0;
pub const DRAW: &str = "magnitude uniform in [0.5, 2.0], sign +/-1 equiprobable";

/// Automatic resampling stops after this many times the requested trials.
pub const RESAMPLE_FACTOR: usize = 3;

/// One weight assignment. `a[v][u]` is the weight of edge `u -> v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub a: Vec<Vec<f64>>,
    /// Input column `j` is the unit vector of `leaders[j]`.
    pub leaders: Vec<usize>,
    pub seed: u64,
}

impl Realization {
    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Dense `n x m` input matrix.
    pub fn b_matrix(&self) -> Vec<Vec<f64>> {
        let mut b = vec![vec![0.0; self.leaders.len()]; self.n()];
        for (j, &l) in self.leaders.iter().enumerate() {
            b[l][j] = 1.0;
        }
        b
    }

    pub fn nonzero_count(&self) -> usize {
        self.a.iter().flatten().filter(|&&x| x != 0.0).count()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Draws nonzero weights on exactly the edge positions. Deterministic in
/// `seed`; edges are visited in sorted order.
pub fn sample_realization(pattern: &RawGraph, seed: u64) -> Realization {
    let n = pattern.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = pattern.edges.clone();
    edges.sort_unstable();
    edges.dedup();
    let mut a = vec![vec![0.0; n]; n];
    for (u, v) in edges {
        let magnitude = rng.gen_range(MIN_MAGNITUDE..=MAX_MAGNITUDE);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        a[v][u] = sign * magnitude;
    }
    let mut leaders = pattern.leaders.clone();
    leaders.sort_unstable();
    leaders.dedup();
    Realization { a, leaders, seed }
}

#[derive(Debug, Clone)]
pub struct ControllabilityMatrix {
    /// Columns `A^k B e_j`, block by block: index `k * m + j`.
    pub columns: Vec<Vec<f64>>,
    pub rank: usize,
    pub tol: f64,
    /// Orthonormal basis of the column space, `rank` vectors.
    basis: Vec<Vec<f64>>,
}

impl ControllabilityMatrix {
    pub fn n(&self) -> usize {
        self.basis
            .first()
            .or(self.columns.first())
            .map_or(0, Vec::len)
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Distance from each standard basis vector `e_i` to the column space.
    pub fn basis_residuals(&self) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let proj: f64 = self.basis.iter().map(|q| q[j] * q[i]).sum();
                        let r = if i == j { 1.0 - proj } else { -proj };
                        r * r
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }
}

pub fn controllability_matrix(r: &Realization, tol: f64) -> Result<ControllabilityMatrix> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::BadTolerance(tol));
    }
    let n = r.n();
    let m = r.leaders.len();
    let mut columns = Vec::with_capacity(n * m);
    let b = r.b_matrix();
    let mut block: Vec<Vec<f64>> = (0..m).map(|j| (0..n).map(|i| b[i][j]).collect()).collect();
    for _ in 0..n {
        let next = block.iter().map(|col| r.apply(col)).collect();
        columns.extend(std::mem::replace(&mut block, next));
    }
    let basis = orthonormal_basis(&columns, tol);
    Ok(ControllabilityMatrix {
        rank: basis.len(),
        columns,
        tol,
        basis,
    })
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Gram-Schmidt with column pivoting: columns are normalized, then the
/// remaining column of largest residual norm is taken at each step until it
/// falls below `tol` times the first pivot. Each accepted vector is
/// re-orthogonalized once.
fn orthonormal_basis(columns: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut work: Vec<Vec<f64>> = columns
        .iter()
        .filter_map(|c| {
            let len = norm(c);
            (len > 0.0).then(|| c.iter().map(|x| x / len).collect())
        })
        .collect();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut first_pivot = None;
    while !work.is_empty() {
        let (best, best_norm) = work
            .iter()
            .enumerate()
            .map(|(i, c)| (i, norm(c)))
            .fold((0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
        let first = *first_pivot.get_or_insert(best_norm);
        if best_norm <= tol * first {
            break;
        }
        let mut q = work.swap_remove(best);
        for b in &basis {
            let c = dot(b, &q);
            q.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let len = norm(&q);
        if len <= tol * first {
            continue;
        }
        q.iter_mut().for_each(|x| *x /= len);
        for col in work.iter_mut() {
            let c = dot(&q, col);
            col.iter_mut().zip(&q).for_each(|(x, y)| *x -= c * y);
        }
        basis.push(q);
    }
    basis
}

/// Largest rank over `trials` realizations seeded `seed, seed + 1, ...`.
pub fn numeric_generic_dimension(
    pattern: &RawGraph,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<usize> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let mut best = 0;
    for t in 0..trials as u64 {
        let r = sample_realization(pattern, seed.wrapping_add(t));
        best = best.max(controllability_matrix(&r, tol)?.rank);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericOptions {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Combinatorial dimension; when the best rank falls short of it the
    /// draws are considered degenerate and more trials are sampled.
    pub expected_dim: Option<usize>,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            trials: 50,
            seed: 0,
            tol: 1e-8,
            expected_dim: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericFixed {
    pub fixed: Vec<usize>,
    pub max_rank: usize,
    /// Realizations sampled, including resampling rounds.
    pub trials_run: usize,
    /// Realizations whose rank reached `max_rank`.
    pub max_rank_trials: usize,
    /// Largest residual per node over the max-rank realizations.
    pub worst_residual: Vec<f64>,
}

/// Node `i` is fixed iff `e_i` lies in the column space (residual below
/// `tol`) of every realization reaching the maximum observed rank. Lower
/// rank draws are discarded.
pub fn numeric_fixed_nodes(pattern: &RawGraph, options: &NumericOptions) -> Result<NumericFixed> {
    if options.trials == 0 {
        return Err(Error::NoTrials);
    }
    if options.tol.is_nan() || options.tol <= 0.0 {
        return Err(Error::BadTolerance(options.tol));
    }
    let n = pattern.n;
    let limit = options.trials * RESAMPLE_FACTOR;
    let mut max_rank = 0;
    let mut max_rank_trials = 0;
    let mut worst = vec![0.0f64; n];
    let mut trials_run = 0;
    loop {
        for t in trials_run..trials_run + options.trials {
            let r = sample_realization(pattern, options.seed.wrapping_add(t as u64));
            let c = controllability_matrix(&r, options.tol)?;
            if c.rank < max_rank {
                continue;
            }
            if c.rank > max_rank {
                max_rank = c.rank;
                max_rank_trials = 0;
                worst.fill(0.0);
            }
            max_rank_trials += 1;
            for (w, res) in worst.iter_mut().zip(c.basis_residuals()) {
                *w = w.max(res);
            }
        }
        trials_run += options.trials;
        match options.expected_dim {
            Some(d) if max_rank < d && trials_run < limit => continue,
            Some(d) if max_rank < d => {
                return Err(Error::Inconclusive {
                    best_rank: max_rank,
                    dimension: d,
                    trials: trials_run,
                })
            }
            _ => break,
        }
    }
    let fixed = (0..n).filter(|&i| worst[i] < options.tol).collect();
    Ok(NumericFixed {
        fixed,
        max_rank,
        trials_run,
        max_rank_trials,
        worst_residual: worst,
    })
}

/// [`numeric_fixed_nodes`] on a DAG, with the degeneracy check keyed to its
/// combinatorial generic dimension.
pub fn numeric_fixed_nodes_dag(
    dag: &StructuredDag,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<NumericFixed> {
    let options = NumericOptions {
        trials,
        seed,
        tol,
        expected_dim: Some(generic_dimension(dag).0),
    };
    numeric_fixed_nodes(&dag.to_raw(), &options)
}
