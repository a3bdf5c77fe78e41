use crate::chain::Ctmc;
use crate::error::CtmcError;
use crate::Result;

/// Strictly increasing observation times `t_1 < ... < t_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    /// Builds a grid under the default dimension cap.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        Self::with_cap(points, crate::NumericPolicy::default().grid_dim_cap)
    }

    /// Builds a grid, enforcing `n <= cap` so the level lattice `S^n`
    /// stays tractable.
    pub fn with_cap(points: Vec<f64>, cap: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(CtmcError::InvalidGrid(
                "grid must hold at least one time".into(),
            ));
        }
        if points.len() > cap {
            return Err(CtmcError::DimensionCapExceeded {
                n: points.len(),
                cap,
            });
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(CtmcError::InvalidGrid("non-finite time point".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CtmcError::InvalidGrid(
                "time points must be strictly increasing".into(),
            ));
        }
        Ok(Self { points })
    }

    /// `n` equally spaced points `0, dt, ..., (n-1) dt`.
    pub fn equispaced(n: usize, dt: f64) -> Result<Self> {
        Self::new((0..n).map(|k| k as f64 * dt).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }
}

/// A probability mass function on the product lattice `S^n`, where `S` is a
/// shared, strictly increasing list of intensity levels.
///
/// Storage is row-major with coordinate 0 as the most significant digit:
/// the flat index of `(s_1, ..., s_n)` is `sum_k s_k * L^(n-1-k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDistribution {
    levels: Vec<f64>,
    dim: usize,
    pmf: Vec<f64>,
}

impl GridDistribution {
    /// Validates levels (strictly increasing) and mass (nonnegative, sums to
    /// one within `mass_tol`).
    pub fn new(levels: Vec<f64>, dim: usize, pmf: Vec<f64>, mass_tol: f64) -> Result<Self> {
        if levels.is_empty() || levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CtmcError::InvalidPmf(
                "levels must be non-empty and strictly increasing".into(),
            ));
        }
        if dim == 0 {
            return Err(CtmcError::InvalidPmf("dimension must be at least 1".into()));
        }
        let expected = levels
            .len()
            .checked_pow(dim as u32)
            .ok_or_else(|| CtmcError::InvalidPmf("lattice size overflows".into()))?;
        if pmf.len() != expected {
            return Err(CtmcError::InvalidPmf(format!(
                "pmf has {} entries, lattice needs {expected}",
                pmf.len()
            )));
        }
        let mut total = 0.0;
        for &v in &pmf {
            if !v.is_finite() || v < -mass_tol {
                return Err(CtmcError::InvalidPmf(format!("negative mass {v}")));
            }
            total += v;
        }
        if (total - 1.0).abs() > mass_tol {
            return Err(CtmcError::InvalidPmf(format!(
                "total mass {total} differs from 1"
            )));
        }
        Ok(Self { levels, dim, pmf })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Number of levels per coordinate.
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Number of coordinates `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total number of lattice points `L^n`.
    pub fn lattice_size(&self) -> usize {
        self.pmf.len()
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Flat index of a lattice point.
    pub fn index_of(&self, point: &[usize]) -> usize {
        debug_assert_eq!(point.len(), self.dim);
        point
            .iter()
            .fold(0, |acc, &digit| acc * self.level_count() + digit)
    }

    /// Lattice point of a flat index (inverse of [`Self::index_of`]).
    pub fn point_of(&self, mut index: usize) -> Vec<usize> {
        let l = self.level_count();
        let mut point = vec![0usize; self.dim];
        for k in (0..self.dim).rev() {
            point[k] = index % l;
            index /= l;
        }
        point
    }

    /// Marginal law of coordinate `k`.
    pub fn marginal(&self, k: usize) -> Vec<f64> {
        let l = self.level_count();
        let stride = l.pow((self.dim - 1 - k) as u32);
        let mut out = vec![0.0; l];
        for (idx, &mass) in self.pmf.iter().enumerate() {
            out[idx / stride % l] += mass;
        }
        out
    }
}

/// Stationary finite-dimensional law of the modulated intensity process
/// `lambda(c t)` observed at the grid times:
/// `p(s_1, ..., s_n) = pi_{s_1} prod_k exp(cQ (t_{k+1} - t_k))_{s_k, s_{k+1}}`
/// summed over hidden states and pushed forward through the state-to-level
/// map. States sharing an intensity value are lumped onto one level.
pub fn finite_dimensional_law(chain: &Ctmc, c: f64, grid: &TimeGrid) -> Result<GridDistribution> {
    let cap = chain.policy().grid_dim_cap;
    if grid.dim() > cap {
        return Err(CtmcError::DimensionCapExceeded { n: grid.dim(), cap });
    }
    let n = grid.dim();
    let m = chain.state_count();

    // Lambda is sorted, so equal values are adjacent; group exactly equal
    // intensities onto one level.
    let mut levels: Vec<f64> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for s in 0..m {
        let v = chain.lambda()[s];
        if levels.last() == Some(&v) {
            groups.last_mut().expect("group exists").push(s);
        } else {
            levels.push(v);
            groups.push(vec![s]);
        }
    }
    let level_count = levels.len();
    let mass_tol = chain.policy().pmf_tol;

    if n == 1 {
        // Stationarity: the one-point law is the pushforward of pi for any c.
        let pmf: Vec<f64> = groups
            .iter()
            .map(|g| g.iter().map(|&s| chain.pi()[s]).sum())
            .collect();
        return GridDistribution::new(levels, 1, pmf, mass_tol);
    }

    let modulated = chain.modulate(c)?;
    let steps: Vec<_> = grid
        .points()
        .windows(2)
        .map(|w| modulated.transition_matrix(w[1] - w[0]))
        .collect::<Result<Vec<_>>>()?;

    let lattice_size = level_count.pow(n as u32);
    let mut pmf = vec![0.0; lattice_size];
    let mut path = vec![0usize; n];
    for (idx, mass) in pmf.iter_mut().enumerate() {
        let mut rem = idx;
        for k in (0..n).rev() {
            path[k] = rem % level_count;
            rem /= level_count;
        }
        // Forward pass over hidden states restricted to each level's group.
        let mut weights: Vec<f64> = groups[path[0]].iter().map(|&s| chain.pi()[s]).collect();
        for (k, step) in steps.iter().enumerate() {
            let from = &groups[path[k]];
            let to = &groups[path[k + 1]];
            let mut next = vec![0.0; to.len()];
            for (wi, &s) in from.iter().enumerate() {
                let w = weights[wi];
                if w == 0.0 {
                    continue;
                }
                for (ni, &s2) in to.iter().enumerate() {
                    next[ni] += w * step.get(s, s2);
                }
            }
            weights = next;
        }
        *mass = weights.iter().sum();
    }

    GridDistribution::new(levels, n, pmf, mass_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_state(a: f64, b: f64, lo: f64, hi: f64) -> Ctmc {
        Ctmc::from_rows(&[vec![-a, a], vec![b, -b]], &[lo, hi]).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(vec![]).is_err());
        assert!(TimeGrid::new(vec![0.0, 0.0]).is_err());
        assert!(TimeGrid::new(vec![1.0, 0.5]).is_err());
        assert!(matches!(
            TimeGrid::new(vec![0.0, 1.0, 2.0, 3.0, 4.0]),
            Err(CtmcError::DimensionCapExceeded { .. })
        ));
        let g = TimeGrid::equispaced(3, 0.5).unwrap();
        assert_eq!(g.points(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn single_point_law_is_pi_pushforward_for_any_c() {
        let chain = two_state(1.0, 2.0, 0.5, 1.5);
        let grid = TimeGrid::new(vec![0.7]).unwrap();
        let base = finite_dimensional_law(&chain, 1.0, &grid).unwrap();
        assert_abs_diff_eq!(base.pmf()[0], chain.pi()[0], epsilon = 1e-15);
        assert_abs_diff_eq!(base.pmf()[1], chain.pi()[1], epsilon = 1e-15);
        for c in [0.001, 0.37, 10.0, 1.0e6] {
            let law = finite_dimensional_law(&chain, c, &grid).unwrap();
            for (a, b) in law.pmf().iter().zip(base.pmf()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pair_law_matches_two_state_closed_form() {
        // p(1,1) = pi_1 * P_11(c dt) with
        // P_11(t) = a/(a+b) + b/(a+b) e^{-(a+b)t}.
        let (a, b) = (1.0, 2.0);
        let chain = two_state(a, b, 0.5, 1.5);
        let dt = 0.8;
        let c = 1.7;
        let grid = TimeGrid::new(vec![0.0, dt]).unwrap();
        let law = finite_dimensional_law(&chain, c, &grid).unwrap();
        let p11 = a / (a + b) + b / (a + b) * (-(a + b) * c * dt).exp();
        let expected = chain.pi()[1] * p11;
        assert_abs_diff_eq!(law.pmf()[law.index_of(&[1, 1])], expected, epsilon = 1e-12);
        let total: f64 = law.pmf().iter().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fast_modulation_factorizes() {
        let chain = two_state(1.0, 2.0, 0.5, 1.5);
        let grid = TimeGrid::new(vec![0.0, 1.0]).unwrap();
        let law = finite_dimensional_law(&chain, 1.0e6, &grid).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let product = chain.pi()[i] * chain.pi()[j];
                assert_abs_diff_eq!(law.pmf()[law.index_of(&[i, j])], product, epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn one_dim_marginals_equal_pi_pushforward() {
        let q = vec![
            vec![-3.0, 2.0, 1.0],
            vec![0.5, -0.7, 0.2],
            vec![4.0, 1.0, -5.0],
        ];
        let chain = Ctmc::from_rows(&q, &[0.5, 1.0, 2.0]).unwrap();
        let grid = TimeGrid::new(vec![0.0, 0.4, 1.3]).unwrap();
        let law = finite_dimensional_law(&chain, 0.9, &grid).unwrap();
        for k in 0..3 {
            let marg = law.marginal(k);
            for (i, &mass) in marg.iter().enumerate() {
                assert_abs_diff_eq!(mass, chain.pi()[i], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn equal_intensities_are_lumped() {
        let q = vec![
            vec![-3.0, 2.0, 1.0],
            vec![0.5, -0.7, 0.2],
            vec![4.0, 1.0, -5.0],
        ];
        let chain = Ctmc::from_rows(&q, &[1.0, 1.0, 2.0]).unwrap();
        let grid = TimeGrid::new(vec![0.0, 1.0]).unwrap();
        let law = finite_dimensional_law(&chain, 1.0, &grid).unwrap();
        assert_eq!(law.levels(), &[1.0, 2.0]);
        assert_eq!(law.lattice_size(), 4);
        let marg = law.marginal(0);
        assert_abs_diff_eq!(marg[0], chain.pi()[0] + chain.pi()[1], epsilon = 1e-12);
    }

    #[test]
    fn index_round_trip() {
        let law = GridDistribution::new(vec![0.0, 1.0, 2.0], 2, vec![1.0 / 9.0; 9], 1e-10).unwrap();
        for idx in 0..9 {
            assert_eq!(law.index_of(&law.point_of(idx)), idx);
        }
    }
}
