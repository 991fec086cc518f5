use crate::error::{Error, Result};

use super::UserSe;

/// Mean and cell-edge spectral efficiency of one link direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SeReport {
    /// Per-terminal SE in terminal-id order, bit/s/Hz.
    pub per_terminal: Vec<f64>,
    pub mean_se: f64,
    /// Mean of the lowest 5 % of users (rounded up to whole users).
    pub cell_edge_se: f64,
    pub outage_count: usize,
}

/// `ceil(0.05 * n)` in exact integer arithmetic.
pub fn cell_edge_count(n: usize) -> usize {
    (n * 5).div_ceil(100)
}

/// Summarizes per-user results; outage users count as zero.
pub fn aggregate(users: &[UserSe]) -> Result<SeReport> {
    if users.is_empty() {
        return Err(Error::domain("cannot aggregate an empty user list"));
    }
    let per_terminal: Vec<f64> = users
        .iter()
        .map(|u| if u.outage { 0.0 } else { u.se })
        .collect();
    let mean_se = per_terminal.iter().sum::<f64>() / per_terminal.len() as f64;
    let mut sorted = per_terminal.clone();
    sorted.sort_by(f64::total_cmp);
    let k = cell_edge_count(sorted.len());
    let cell_edge_se = sorted[..k].iter().sum::<f64>() / k as f64;
    Ok(SeReport {
        per_terminal,
        mean_se,
        cell_edge_se,
        outage_count: users.iter().filter(|u| u.outage).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn users(se: &[f64]) -> Vec<UserSe> {
        se.iter()
            .map(|&s| UserSe {
                se: s,
                outage: s == 0.0,
            })
            .collect()
    }

    #[test]
    fn edge_counts() {
        assert_eq!(cell_edge_count(20), 1);
        assert_eq!(cell_edge_count(21), 2);
        assert_eq!(cell_edge_count(210), 11);
        assert_eq!(cell_edge_count(1), 1);
    }

    #[test]
    fn twenty_users_edge_is_lowest() {
        let se: Vec<f64> = (0..20).map(|i| 0.1 * i as f64 + 0.05).collect();
        let r = aggregate(&users(&se)).unwrap();
        assert_eq!(r.cell_edge_se, 0.05);
    }

    #[test]
    fn equal_users() {
        let r = aggregate(&users(&[0.7; 13])).unwrap();
        assert!((r.mean_se - 0.7).abs() < 1e-15);
        assert_eq!(r.cell_edge_se, 0.7);
    }

    #[test]
    fn empty_rejected() {
        assert!(aggregate(&[]).is_err());
    }

    proptest! {
        #[test]
        fn edge_never_above_mean(se in proptest::collection::vec(0.0f64..5.0, 1..300)) {
            let r = aggregate(&users(&se)).unwrap();
            prop_assert!(r.cell_edge_se <= r.mean_se + 1e-12);
            prop_assert!(r.cell_edge_se >= 0.0);
        }
    }
}
