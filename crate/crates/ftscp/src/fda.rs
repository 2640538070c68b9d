//! Discretized functional-data primitives.
//!
//! A functional time series is a sequence of curves observed on a shared,
//! strictly increasing grid; curve `t` lives in row `t` of an `n x J` matrix.
//! All inner products and norms are trapezoidal-rule approximations of the
//! L2 geometry on the grid span, so grids keep their natural units (ages,
//! or points of `[0, 1]`).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// How zeros are handled before a log transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeroPolicy {
    /// Replace exact zeros by half the smallest positive entry of the series.
    HalfMinPositive,
    /// Add a fixed offset to every entry.
    Offset(f64),
}

impl Default for ZeroPolicy {
    fn default() -> Self {
        ZeroPolicy::HalfMinPositive
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid needs at least 2 points, got {}",
            grid.len()
        )));
    }
    for (i, v) in grid.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { row: 0, col: i });
        }
        if i > 0 && grid[i - 1] >= *v {
            return Err(Error::UnsortedGrid { position: i });
        }
    }
    Ok(())
}

/// Trapezoidal quadrature weights for a strictly increasing grid.
///
/// `sum_j w_j f(u_j)` approximates the integral of `f` over the grid span
/// and is exact for piecewise-linear integrands.
pub fn quadrature_weights(grid: &[f64]) -> Vec<f64> {
    let j = grid.len();
    let mut w = vec![0.0; j];
    for i in 0..j - 1 {
        let h = 0.5 * (grid[i + 1] - grid[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

/// A single curve sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    grid: Vec<f64>,
    values: DVector<f64>,
}

impl Curve {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        validate_grid(&grid)?;
        if grid.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "grid has {} points but curve has {} values",
                grid.len(),
                values.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: 0, col: i });
            }
        }
        Ok(Curve {
            grid,
            values: DVector::from_vec(values),
        })
    }

    /// Build a curve by evaluating `f` at every grid point.
    pub fn from_fn(grid: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.iter().map(|&u| f(u)).collect();
        Curve::new(grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    fn check_same_grid(&self, other: &Curve) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch(
                "curves live on different grids".into(),
            ));
        }
        Ok(())
    }

    /// Trapezoidal approximation of `\int f(u) g(u) du`.
    pub fn inner_product(&self, other: &Curve) -> Result<f64> {
        self.check_same_grid(other)?;
        let w = quadrature_weights(&self.grid);
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .zip(w.iter())
            .map(|((a, b), wi)| wi * a * b)
            .sum())
    }

    /// Squared L2 norm, `<f, f>` under the same quadrature.
    pub fn l2_norm_sq(&self) -> f64 {
        let w = quadrature_weights(&self.grid);
        self.values
            .iter()
            .zip(w.iter())
            .map(|(a, wi)| wi * a * a)
            .sum()
    }

    /// Pointwise sum with another curve on the same grid.
    pub fn add(&self, other: &Curve) -> Result<Curve> {
        self.check_same_grid(other)?;
        Ok(Curve {
            grid: self.grid.clone(),
            values: &self.values + &other.values,
        })
    }

    /// Pointwise difference with another curve on the same grid.
    pub fn sub(&self, other: &Curve) -> Result<Curve> {
        self.check_same_grid(other)?;
        Ok(Curve {
            grid: self.grid.clone(),
            values: &self.values - &other.values,
        })
    }

    /// Curve scaled by a constant.
    pub fn scale(&self, a: f64) -> Curve {
        Curve {
            grid: self.grid.clone(),
            values: &self.values * a,
        }
    }
}

/// `n` curves on a shared grid, with optional strictly increasing time labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalTimeSeries {
    grid: Vec<f64>,
    values: DMatrix<f64>,
    labels: Option<Vec<f64>>,
}

impl FunctionalTimeSeries {
    /// Validated constructor; rows of `values` are curves on `grid`.
    pub fn new(grid: Vec<f64>, values: DMatrix<f64>, labels: Option<Vec<f64>>) -> Result<Self> {
        validate_grid(&grid)?;
        if values.nrows() == 0 {
            return Err(Error::InsufficientData("series has no observations".into()));
        }
        if values.ncols() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "values have {} columns but grid has {} points",
                values.ncols(),
                grid.len()
            )));
        }
        for j in 0..values.ncols() {
            for i in 0..values.nrows() {
                if !values[(i, j)].is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        if let Some(ref l) = labels {
            if l.len() != values.nrows() {
                return Err(Error::DimensionMismatch(format!(
                    "{} labels for {} observations",
                    l.len(),
                    values.nrows()
                )));
            }
            for (i, v) in l.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: 0 });
                }
                if i > 0 && l[i - 1] >= *v {
                    return Err(Error::UnsortedGrid { position: i });
                }
            }
        }
        Ok(FunctionalTimeSeries {
            grid,
            values,
            labels,
        })
    }

    /// Convenience constructor from row slices.
    pub fn from_rows(grid: Vec<f64>, rows: &[Vec<f64>], labels: Option<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InsufficientData("series has no observations".into()));
        }
        let j = grid.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != j {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} values but grid has {} points",
                    i,
                    r.len(),
                    j
                )));
            }
        }
        let values = DMatrix::from_fn(rows.len(), j, |i, c| rows[i][c]);
        FunctionalTimeSeries::new(grid, values, labels)
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn grid_len(&self) -> usize {
        self.grid.len()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    /// Label of observation `t` (0-based); falls back to `t + 1` as a time index.
    pub fn label_of(&self, t: usize) -> f64 {
        match &self.labels {
            Some(l) => l[t],
            None => (t + 1) as f64,
        }
    }

    /// Curve at row `t` (0-based).
    pub fn curve(&self, t: usize) -> Curve {
        Curve {
            grid: self.grid.clone(),
            values: self.values.row(t).transpose(),
        }
    }

    /// First `len` observations as a new series, labels carried over.
    pub fn head(&self, len: usize) -> Result<FunctionalTimeSeries> {
        if len == 0 || len > self.n() {
            return Err(Error::InvalidArgument(format!(
                "head of {} observations out of {}",
                len,
                self.n()
            )));
        }
        Ok(FunctionalTimeSeries {
            grid: self.grid.clone(),
            values: self.values.rows(0, len).into_owned(),
            labels: self.labels.as_ref().map(|l| l[..len].to_vec()),
        })
    }

    /// Pointwise mean curve over all observations.
    pub fn mean_function(&self) -> Curve {
        let n = self.n() as f64;
        let mut acc = DVector::zeros(self.grid_len());
        for t in 0..self.n() {
            acc += self.values.row(t).transpose();
        }
        Curve {
            grid: self.grid.clone(),
            values: acc / n,
        }
    }

    /// Series with the mean curve subtracted from every observation.
    pub fn center(&self) -> FunctionalTimeSeries {
        let mean = self.mean_function();
        let mut values = self.values.clone();
        for t in 0..values.nrows() {
            for j in 0..values.ncols() {
                values[(t, j)] -= mean.values[j];
            }
        }
        FunctionalTimeSeries {
            grid: self.grid.clone(),
            values,
            labels: self.labels.clone(),
        }
    }

    /// First-order differenced series; labels shift to the later period.
    pub fn difference(&self) -> Result<FunctionalTimeSeries> {
        let n = self.n();
        if n < 2 {
            return Err(Error::InsufficientData(
                "differencing needs at least 2 observations".into(),
            ));
        }
        let values = self.values.rows(1, n - 1) - self.values.rows(0, n - 1);
        Ok(FunctionalTimeSeries {
            grid: self.grid.clone(),
            values: values.into_owned(),
            labels: self.labels.as_ref().map(|l| l[1..].to_vec()),
        })
    }

    /// Entrywise `log` in the given base. Negative entries are rejected;
    /// zeros are resolved by `policy` before taking logs.
    pub fn log_transform(&self, base: f64, policy: ZeroPolicy) -> Result<FunctionalTimeSeries> {
        if !(base.is_finite() && base > 0.0 && base != 1.0) {
            return Err(Error::InvalidArgument(format!("invalid log base {base}")));
        }
        for j in 0..self.values.ncols() {
            for i in 0..self.values.nrows() {
                if self.values[(i, j)] < 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "negative entry at row {i}, column {j} cannot be log-transformed"
                    )));
                }
            }
        }
        let ln_base = base.ln();
        let transform: Box<dyn Fn(f64) -> f64> = match policy {
            ZeroPolicy::HalfMinPositive => {
                let min_pos = self
                    .values
                    .iter()
                    .copied()
                    .filter(|v| *v > 0.0)
                    .fold(f64::INFINITY, f64::min);
                if !min_pos.is_finite() {
                    return Err(Error::Degenerate(
                        "all entries are zero; log transform undefined".into(),
                    ));
                }
                let fill = 0.5 * min_pos;
                Box::new(move |v| if v == 0.0 { fill.ln() / ln_base } else { v.ln() / ln_base })
            }
            ZeroPolicy::Offset(eps) => {
                if !(eps.is_finite() && eps > 0.0) {
                    return Err(Error::InvalidArgument(format!("invalid log offset {eps}")));
                }
                Box::new(move |v| (v + eps).ln() / ln_base)
            }
        };
        let values = self.values.map(|v| transform(v));
        FunctionalTimeSeries::new(self.grid.clone(), values, self.labels.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit_grid(j: usize) -> Vec<f64> {
        (0..j).map(|i| i as f64 / (j - 1) as f64).collect()
    }

    #[test]
    fn make_fts_validates() {
        let fts = FunctionalTimeSeries::from_rows(
            vec![0.0, 0.5, 1.0],
            &[vec![0.0; 3], vec![0.0; 3]],
            None,
        )
        .unwrap();
        assert_eq!(fts.n(), 2);
        assert_eq!(fts.grid_len(), 3);

        let err = FunctionalTimeSeries::from_rows(vec![1.0, 0.0], &[vec![0.0; 2]], None);
        assert!(matches!(err, Err(Error::UnsortedGrid { position: 1 })));

        let err = FunctionalTimeSeries::from_rows(
            vec![0.0, 1.0],
            &[vec![0.0, f64::NAN], vec![0.0, 0.0]],
            None,
        );
        assert!(matches!(err, Err(Error::NonFinite { row: 0, col: 1 })));

        let err = FunctionalTimeSeries::from_rows(
            vec![0.0, 1.0],
            &[vec![0.0, 0.0]],
            Some(vec![3.0, 4.0]),
        );
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn make_fts_round_trips_values() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]];
        let fts =
            FunctionalTimeSeries::from_rows(vec![0.0, 0.5, 1.0], &rows, Some(vec![10.0, 11.0]))
                .unwrap();
        for (t, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(fts.values()[(t, j)], *v);
            }
        }
        assert_eq!(fts.labels(), Some(&[10.0, 11.0][..]));
    }

    #[test]
    fn inner_product_basics() {
        let g = unit_grid(101);
        let one = Curve::from_fn(g.clone(), |_| 1.0).unwrap();
        let id = Curve::from_fn(g.clone(), |u| u).unwrap();
        assert_relative_eq!(one.inner_product(&one).unwrap(), 1.0, epsilon = 1e-12);
        // trapezoid is exact for linear integrands
        assert_relative_eq!(one.inner_product(&id).unwrap(), 0.5, epsilon = 1e-12);

        let g_fine = unit_grid(1001);
        let s = Curve::from_fn(g_fine, |u| std::f64::consts::SQRT_2 * (2.0 * std::f64::consts::PI * u).sin())
            .unwrap();
        assert_relative_eq!(s.inner_product(&s).unwrap(), 1.0, epsilon = 1e-4);
    }

    #[test]
    fn inner_product_grid_mismatch() {
        let f = Curve::from_fn(unit_grid(11), |u| u).unwrap();
        let g = Curve::from_fn(unit_grid(21), |u| u).unwrap();
        assert!(f.inner_product(&g).is_err());
    }

    #[test]
    fn l2_norm_sq_examples() {
        let g = unit_grid(101);
        let zero = Curve::from_fn(g.clone(), |_| 0.0).unwrap();
        assert_eq!(zero.l2_norm_sq(), 0.0);
        let two = Curve::from_fn(g.clone(), |_| 2.0).unwrap();
        assert_relative_eq!(two.l2_norm_sq(), 4.0, epsilon = 1e-12);
        let f = Curve::from_fn(g, |u| u * u - 0.3).unwrap();
        assert_eq!(f.l2_norm_sq(), f.inner_product(&f).unwrap());
    }

    #[test]
    fn mean_and_center() {
        let g = unit_grid(5);
        let fts = FunctionalTimeSeries::from_rows(
            g.clone(),
            &[vec![0.0; 5], vec![2.0; 5]],
            None,
        )
        .unwrap();
        let m = fts.mean_function();
        assert!(m.values().iter().all(|v| (v - 1.0).abs() < 1e-15));

        let single = FunctionalTimeSeries::from_rows(g.clone(), &[vec![7.0; 5]], None).unwrap();
        assert_eq!(single.mean_function().values(), single.curve(0).values());

        // column-mean oracle on a pseudo-random matrix
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|t| {
                (0..5)
                    .map(|j| ((t * 31 + j * 17 + 7) % 101) as f64 / 13.0 - 3.0)
                    .collect()
            })
            .collect();
        let fts = FunctionalTimeSeries::from_rows(g, &rows, None).unwrap();
        let m = fts.mean_function();
        for j in 0..5 {
            let oracle: f64 = rows.iter().map(|r| r[j]).sum::<f64>() / 50.0;
            assert_relative_eq!(m.values()[j], oracle, epsilon = 1e-12);
        }
        let centered = fts.center();
        let cm = centered.mean_function();
        assert!(cm.values().iter().all(|v| v.abs() < 1e-12));
        for t in 0..50 {
            for j in 0..5 {
                assert_relative_eq!(
                    centered.values()[(t, j)],
                    fts.values()[(t, j)] - m.values()[j],
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn difference_examples() {
        let g = unit_grid(4);
        // X_t = t * 1
        let rows: Vec<Vec<f64>> = (1..=5).map(|t| vec![t as f64; 4]).collect();
        let fts = FunctionalTimeSeries::from_rows(g.clone(), &rows, Some((1..=5).map(f64::from).collect()))
            .unwrap();
        let d = fts.difference().unwrap();
        assert_eq!(d.n(), 4);
        assert!(d.values().iter().all(|v| (v - 1.0).abs() < 1e-15));
        assert_eq!(d.labels(), Some(&[2.0, 3.0, 4.0, 5.0][..]));

        let single = FunctionalTimeSeries::from_rows(g, &[vec![0.0; 4]], None).unwrap();
        assert!(single.difference().is_err());
    }

    #[test]
    fn difference_of_centered_equals_difference() {
        let g = unit_grid(7);
        let rows: Vec<Vec<f64>> = (0..9)
            .map(|t| (0..7).map(|j| ((t * 13 + j * 5 + 3) % 23) as f64 * 0.37).collect())
            .collect();
        let fts = FunctionalTimeSeries::from_rows(g, &rows, None).unwrap();
        let a = fts.difference().unwrap();
        let b = fts.center().difference().unwrap();
        for t in 0..a.n() {
            for j in 0..7 {
                assert_relative_eq!(a.values()[(t, j)], b.values()[(t, j)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn log_transform_examples() {
        let g = unit_grid(2);
        let ones = FunctionalTimeSeries::from_rows(g.clone(), &[vec![1.0, 1.0]], None).unwrap();
        let lt = ones.log_transform(10.0, ZeroPolicy::HalfMinPositive).unwrap();
        assert!(lt.values().iter().all(|v| v.abs() < 1e-15));

        let fts = FunctionalTimeSeries::from_rows(g.clone(), &[vec![10.0, 100.0]], None).unwrap();
        let lt = fts.log_transform(10.0, ZeroPolicy::HalfMinPositive).unwrap();
        assert_relative_eq!(lt.values()[(0, 0)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(lt.values()[(0, 1)], 2.0, epsilon = 1e-12);

        // single zero among positives is replaced by half the min positive
        let fts =
            FunctionalTimeSeries::from_rows(g.clone(), &[vec![0.0, 4.0], vec![8.0, 2.0]], None)
                .unwrap();
        let lt = fts.log_transform(10.0, ZeroPolicy::HalfMinPositive).unwrap();
        assert_relative_eq!(lt.values()[(0, 0)], (1.0f64).log10(), epsilon = 1e-12);

        let neg = FunctionalTimeSeries::from_rows(g, &[vec![-1.0, 1.0]], None).unwrap();
        assert!(neg.log_transform(10.0, ZeroPolicy::HalfMinPositive).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn inner_product_symmetric_bilinear(
            a in proptest::collection::vec(-10.0f64..10.0, 9),
            b in proptest::collection::vec(-10.0f64..10.0, 9),
            c in proptest::collection::vec(-10.0f64..10.0, 9),
            alpha in -5.0f64..5.0,
        ) {
            let g = unit_grid(9);
            let fa = Curve::new(g.clone(), a).unwrap();
            let fb = Curve::new(g.clone(), b).unwrap();
            let fc = Curve::new(g, c).unwrap();
            let ab = fa.inner_product(&fb).unwrap();
            let ba = fb.inner_product(&fa).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-12);
            // linearity in the first slot
            let lhs = fa.scale(alpha).add(&fc).unwrap().inner_product(&fb).unwrap();
            let rhs = alpha * ab + fc.inner_product(&fb).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9);
        }

        #[test]
        fn norm_scales_quadratically(
            a in proptest::collection::vec(-10.0f64..10.0, 9),
            alpha in -4.0f64..4.0,
        ) {
            let g = unit_grid(9);
            let f = Curve::new(g, a).unwrap();
            let lhs = f.scale(alpha).l2_norm_sq();
            let rhs = alpha * alpha * f.l2_norm_sq();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }
    }
}
