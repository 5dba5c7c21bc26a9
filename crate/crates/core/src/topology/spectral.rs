use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::network::{ClusteredNetwork, LeaderSchedule};
use super::weights::WeightMatrix;
use crate::analysis::max_stable_beta;
use crate::error::{Error, Result};

/// Largest dimension handled by a dense decomposition.
pub const DENSE_LIMIT: usize = 512;
pub const POWER_TOL: f64 = 1e-10;
pub const POWER_MAX_ITERS: usize = 100_000;

/// Spectral norm of `W - (1/n) 1 1^T`, the contraction factor of `W` on
/// the disagreement subspace. For symmetric doubly stochastic `W` this is
/// the largest modulus among the non-principal eigenvalues.
pub fn second_largest_singular_value(w: &WeightMatrix) -> Result<f64> {
    deviation_norm(w.entries())
}

pub(crate) fn deviation_norm(w: &DMatrix<f64>) -> Result<f64> {
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(
            "weight matrix has non-finite entries".into(),
        ));
    }
    let n = w.nrows();
    let dev = deviation(w);
    if n <= DENSE_LIMIT {
        if is_symmetric(&dev) {
            let eig = SymmetricEigen::new(dev);
            Ok(eig.eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs())))
        } else {
            let sv = dev.singular_values();
            Ok(sv.iter().fold(0.0_f64, |m, &s| m.max(s)))
        }
    } else {
        power_iteration_norm(&dev)
    }
}

fn deviation(w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = w.nrows();
    let avg = 1.0 / n as f64;
    w.map(|v| v - avg)
}

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (i + 1..n).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= 1e-14))
}

/// Spectral norm of `m` by power iteration on `m^T m`, stopping when the
/// Rayleigh quotient changes by at most [`POWER_TOL`] (relative to 1).
pub fn power_iteration_norm(m: &DMatrix<f64>) -> Result<f64> {
    let n = m.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let norm = v.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    v /= norm;
    let mut lambda = 0.0_f64;
    for _ in 0..POWER_MAX_ITERS {
        let mv = m * &v;
        let next = m.tr_mul(&mv);
        let rq = v.dot(&next);
        let len = next.norm();
        if len == 0.0 {
            return Ok(0.0);
        }
        v = next / len;
        if (rq - lambda).abs() <= POWER_TOL * lambda.max(1.0) {
            return Ok(rq.max(0.0).sqrt());
        }
        lambda = rq;
    }
    Err(Error::Numeric(format!(
        "power iteration did not converge in {POWER_MAX_ITERS} iterations"
    )))
}

/// Maximum deviation norm over a set of leader matrices.
pub fn delta_c_of(matrices: &[WeightMatrix]) -> Result<f64> {
    if matrices.is_empty() {
        return Err(Error::config("leader_graph", "leader schedule is empty"));
    }
    matrices
        .iter()
        .try_fold(0.0_f64, |m, w| Ok(m.max(second_largest_singular_value(w)?)))
}

/// `max_k sigma(V(k))`. For a cyclic schedule the maximum over one period
/// is the maximum over all `k`.
pub fn delta_c(schedule: &LeaderSchedule) -> Result<f64> {
    delta_c_of(schedule.matrices())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub sigma_per_cluster: Vec<f64>,
    pub delta_c: f64,
    pub tau: usize,
    /// Open upper end of the admissible leader step size for `tau`.
    pub beta_max: f64,
}

pub fn spectral_summary(network: &ClusteredNetwork, tau: usize) -> Result<SpectralSummary> {
    let sigma_per_cluster = network
        .clusters()
        .iter()
        .map(|c| second_largest_singular_value(c.follower_weights()))
        .collect::<Result<Vec<_>>>()?;
    let delta_c = if network.cluster_count() == 1 {
        0.0
    } else {
        delta_c(network.leader_schedule())?
    };
    Ok(SpectralSummary {
        sigma_per_cluster,
        delta_c,
        tau,
        beta_max: max_stable_beta(delta_c, tau)?,
    })
}
