use nalgebra::{DMatrix, RowDVector};
use serde::{Deserialize, Serialize};

use crate::engine::NetworkState;

/// Consensus errors of one state.
///
/// Matrix deviations use the Frobenius norm, vector gaps the Euclidean norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub k: usize,
    /// `||X^a - 1 xbar^a^T||_F` per cluster.
    pub follower_disagreement: Vec<f64>,
    /// `||X_l - 1 xbar_l^T||_F`.
    pub leader_disagreement: f64,
    /// `||xbar^a - x_l^a||` per cluster.
    pub leader_follower_gap: Vec<f64>,
    /// `max_i ||x_i - xbar_l||` over every node.
    pub global_error: f64,
    /// `max ||x - xbar_l||` over the followers and the leader of each cluster.
    pub cluster_error: Vec<f64>,
    /// `max_a max_i ||x_i^a - x_l^a||`, the stopping statistic.
    pub leader_deviation: f64,
}

pub(crate) fn row_mean(m: &DMatrix<f64>) -> RowDVector<f64> {
    let n = m.nrows() as f64;
    RowDVector::from_fn(m.ncols(), |_, c| m.column(c).sum() / n)
}

/// Frobenius norm of `m` minus its row average broadcast to every row.
pub fn disagreement(m: &DMatrix<f64>) -> f64 {
    let mean = row_mean(m);
    m.row_iter()
        .map(|r| (r - &mean).norm_squared())
        .sum::<f64>()
        .sqrt()
}

pub fn diagnostics(state: &NetworkState) -> DiagnosticsRecord {
    let leaders = state.leaders();
    let leader_mean = row_mean(leaders);
    let r = state.cluster_count();
    let mut follower_disagreement = Vec::with_capacity(r);
    let mut leader_follower_gap = Vec::with_capacity(r);
    let mut cluster_error = Vec::with_capacity(r);
    let mut leader_deviation = 0.0_f64;
    for a in 0..r {
        let block = state.followers(a);
        let leader = leaders.row(a);
        let mean = row_mean(block);
        follower_disagreement.push(disagreement(block));
        leader_follower_gap.push((&mean - leader).norm());
        let mut worst = (leader - &leader_mean).norm();
        for row in block.row_iter() {
            worst = worst.max((row - &leader_mean).norm());
            leader_deviation = leader_deviation.max((row - leader).norm());
        }
        cluster_error.push(worst);
    }
    DiagnosticsRecord {
        k: state.k(),
        follower_disagreement,
        leader_disagreement: disagreement(leaders),
        leader_follower_gap,
        global_error: cluster_error.iter().copied().fold(0.0, f64::max),
        cluster_error,
        leader_deviation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn col(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_column_slice(v.len(), 1, v)
    }

    #[test]
    fn consensus_is_all_zero() {
        let s =
            NetworkState::from_blocks(vec![col(&[1.5, 1.5]), col(&[1.5])], col(&[1.5, 1.5]), 2, 0)
                .unwrap();
        let d = diagnostics(&s);
        assert!(d.follower_disagreement.iter().all(|&v| v == 0.0));
        assert!(d.leader_follower_gap.iter().all(|&v| v == 0.0));
        assert_eq!(d.leader_disagreement, 0.0);
        assert_eq!(d.global_error, 0.0);
        assert_eq!(d.leader_deviation, 0.0);
    }

    #[test]
    fn two_leaders_at_zero_and_two() {
        let s = NetworkState::from_blocks(vec![col(&[0.0]), col(&[2.0])], col(&[0.0, 2.0]), 0, 0)
            .unwrap();
        assert_abs_diff_eq!(
            diagnostics(&s).leader_disagreement,
            2f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn followers_one_and_three_leader_two() {
        let s = NetworkState::from_blocks(vec![col(&[1.0, 3.0])], col(&[2.0]), 0, 0).unwrap();
        let d = diagnostics(&s);
        assert_abs_diff_eq!(d.follower_disagreement[0], 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(d.leader_follower_gap[0], 0.0);
        assert_eq!(d.leader_deviation, 1.0);
        assert_eq!(d.global_error, 1.0);
    }

    #[test]
    fn vector_states_use_euclidean_rows() {
        let followers = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 3.0, 4.0]);
        let leaders = DMatrix::from_row_slice(1, 2, &[0.0, 0.0]);
        let d = diagnostics(&NetworkState::from_blocks(vec![followers], leaders, 0, 0).unwrap());
        // deviations from (1.5, 2) are (-1.5,-2) and (1.5,2)
        assert_abs_diff_eq!(
            d.follower_disagreement[0],
            (2.0f64 * 6.25).sqrt(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(d.leader_follower_gap[0], 2.5, epsilon = 1e-15);
        assert_eq!(d.leader_deviation, 5.0);
    }
}
