use ctmc_core::{finite_dimensional_law, Ctmc, TimeGrid};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::OrderError;
use crate::policy::OrderPolicy;
use crate::supermodular::{sm_check, OrderStatus, OrderVerdict};
use crate::Result;

/// Verdict for one (modulation-rate pair, grid) cell of a scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanCell {
    pub c_pair: (f64, f64),
    pub grid: Vec<f64>,
    #[serde(flatten)]
    pub verdict: OrderVerdict,
}

/// Outcome of [`sm_decrease_scan`]: one cell per adjacent rate pair and
/// grid.
///
/// A `Violated` cell certifies that dependence does *not* decrease in the
/// modulation rate for this chain on the tested grids; an all-`Ordered`
/// report is evidence only, never proof (only finitely many grids are
/// tested).
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub cells: Vec<ScanCell>,
    pub all_ordered: bool,
}

impl ScanReport {
    pub fn has_violation(&self) -> bool {
        self.cells
            .iter()
            .any(|c| c.verdict.status == OrderStatus::Violated)
    }
}

/// For each adjacent `c1 < c2` in `c_list` and each grid, verifies that the
/// faster law sits below the slower one in the supermodular order:
/// `law(c2) <=_sm law(c1)`.
///
/// Cells are evaluated in parallel; the report is identical to sequential
/// evaluation.
pub fn sm_decrease_scan(
    chain: &Ctmc,
    c_list: &[f64],
    grids: &[TimeGrid],
    policy: &OrderPolicy,
) -> Result<ScanReport> {
    if c_list.len() < 2 {
        return Err(OrderError::InvalidConfig(
            "c_list needs at least two rates".into(),
        ));
    }
    if c_list.iter().any(|&c| c.is_nan() || c <= 0.0) {
        return Err(OrderError::InvalidConfig(
            "modulation rates must be positive".into(),
        ));
    }
    if c_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(OrderError::InvalidConfig(
            "c_list must be strictly ascending".into(),
        ));
    }
    if grids.is_empty() {
        return Err(OrderError::InvalidConfig("no grids given".into()));
    }

    let tasks: Vec<(f64, f64, &TimeGrid)> = c_list
        .windows(2)
        .flat_map(|w| grids.iter().map(move |g| (w[0], w[1], g)))
        .collect();

    let cells: Vec<ScanCell> = tasks
        .par_iter()
        .map(|&(c1, c2, grid)| -> Result<ScanCell> {
            let slow = finite_dimensional_law(chain, c1, grid)?;
            let fast = finite_dimensional_law(chain, c2, grid)?;
            let verdict = sm_check(&fast, &slow, policy)?;
            Ok(ScanCell {
                c_pair: (c1, c2),
                grid: grid.points().to_vec(),
                verdict,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let all_ordered = cells
        .iter()
        .all(|c| c.verdict.status == OrderStatus::Ordered);
    Ok(ScanReport { cells, all_ordered })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grids() -> Vec<TimeGrid> {
        vec![
            TimeGrid::new(vec![0.0, 1.0]).unwrap(),
            TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap(),
        ]
    }

    #[test]
    fn two_state_chain_scans_clean() {
        let chain = Ctmc::from_rows(&[vec![-1.0, 1.0], vec![2.0, -2.0]], &[0.5, 1.5]).unwrap();
        let report =
            sm_decrease_scan(&chain, &[0.5, 1.0, 2.0], &grids(), &OrderPolicy::default()).unwrap();
        assert!(report.all_ordered);
        assert_eq!(report.cells.len(), 4);
    }

    #[test]
    fn constant_intensity_is_trivially_ordered() {
        let chain = Ctmc::from_rows(&[vec![-1.0, 1.0], vec![2.0, -2.0]], &[1.0, 1.0]).unwrap();
        let report =
            sm_decrease_scan(&chain, &[0.5, 1.0, 2.0], &grids(), &OrderPolicy::default()).unwrap();
        assert!(report.all_ordered);
        // All states lump onto a single level: every law is a point mass.
        for cell in &report.cells {
            assert!(cell.verdict.lp_optimum.unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn three_state_birth_death_scans_clean() {
        let chain = Ctmc::from_rows(
            &[
                vec![-1.0, 1.0, 0.0],
                vec![2.0, -3.5, 1.5],
                vec![0.0, 0.7, -0.7],
            ],
            &[0.5, 1.0, 2.0],
        )
        .unwrap();
        let report = sm_decrease_scan(
            &chain,
            &[1.0, 4.0],
            &[TimeGrid::new(vec![0.0, 1.0]).unwrap()],
            &OrderPolicy::default(),
        )
        .unwrap();
        assert!(report.all_ordered);
    }

    #[test]
    fn config_validation() {
        let chain = Ctmc::from_rows(&[vec![-1.0, 1.0], vec![2.0, -2.0]], &[0.5, 1.5]).unwrap();
        let p = OrderPolicy::default();
        assert!(sm_decrease_scan(&chain, &[1.0], &grids(), &p).is_err());
        assert!(sm_decrease_scan(&chain, &[2.0, 1.0], &grids(), &p).is_err());
        assert!(sm_decrease_scan(&chain, &[-1.0, 1.0], &grids(), &p).is_err());
        assert!(sm_decrease_scan(&chain, &[1.0, 2.0], &[], &p).is_err());
    }

    #[test]
    fn report_serializes_with_stable_field_names() {
        let chain = Ctmc::from_rows(&[vec![-1.0, 1.0], vec![2.0, -2.0]], &[0.5, 1.5]).unwrap();
        let report = sm_decrease_scan(
            &chain,
            &[1.0, 2.0],
            &[TimeGrid::new(vec![0.0, 1.0]).unwrap()],
            &OrderPolicy::default(),
        )
        .unwrap();
        let json = serde_json::to_value(&report).unwrap();
        let cell = &json["cells"][0];
        assert!(cell.get("c_pair").is_some());
        assert!(cell.get("grid").is_some());
        assert!(cell.get("verdict").is_some());
        assert!(cell.get("lp_optimum").is_some());
        assert!(cell.get("witness").is_some());
    }
}
