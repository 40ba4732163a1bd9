use crate::error::{domain, Error, Result};
use crate::zeta::{zeta, RowEvaluator, DEFAULT_TOL, FUNCTIONAL_EQUATION_EDGE};
use num_complex::Complex64;
use rayon::prelude::*;

const T_LIMIT: f64 = 520.0;
const SIGMA_LIMIT: f64 = 10.0;

/// A rectangle in the (σ, t) plane with `nx × ny` sample nodes, edges included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(sigma_lo: f64, sigma_hi: f64, t_lo: f64, t_hi: f64, nx: usize, ny: usize) -> Result<Self> {
        let spec = GridSpec { sigma_lo, sigma_hi, t_lo, t_hi, nx, ny };
        spec.validate()?;
        Ok(spec)
    }

    /// Node counts chosen so that the spacing does not exceed `dsigma` × `dt`.
    pub fn with_spacing(sigma_lo: f64, sigma_hi: f64, t_lo: f64, t_hi: f64, dsigma: f64, dt: f64) -> Result<Self> {
        if !(dsigma > 0.0 && dt > 0.0 && dsigma.is_finite() && dt.is_finite()) {
            return Err(domain("grid spacing must be positive"));
        }
        let nx = ((sigma_hi - sigma_lo) / dsigma - 1e-9).ceil().max(0.0) as usize + 1;
        let ny = ((t_hi - t_lo) / dt - 1e-9).ceil().max(0.0) as usize + 1;
        GridSpec::new(sigma_lo, sigma_hi, t_lo, t_hi, nx.max(8), ny.max(8))
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.sigma_lo, self.sigma_hi, self.t_lo, self.t_hi].iter().all(|v| v.is_finite());
        if !finite || self.sigma_lo >= self.sigma_hi || self.t_lo >= self.t_hi {
            return Err(domain(format!(
                "empty grid rectangle σ {}..{}, t {}..{}",
                self.sigma_lo, self.sigma_hi, self.t_lo, self.t_hi
            )));
        }
        if self.nx < 8 || self.ny < 8 {
            return Err(domain(format!("grid needs at least 8×8 nodes, got {}×{}", self.nx, self.ny)));
        }
        if self.sigma_lo < -SIGMA_LIMIT || self.sigma_hi > SIGMA_LIMIT || self.t_lo.abs().max(self.t_hi.abs()) > T_LIMIT
        {
            return Err(domain(format!("grid leaves the evaluation region |σ| <= {SIGMA_LIMIT}, |t| <= {T_LIMIT}")));
        }
        Ok(())
    }

    pub fn dsigma(&self) -> f64 {
        (self.sigma_hi - self.sigma_lo) / (self.nx - 1) as f64
    }

    pub fn dt(&self) -> f64 {
        (self.t_hi - self.t_lo) / (self.ny - 1) as f64
    }

    pub fn sigma(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.sigma_hi
        } else {
            self.sigma_lo + i as f64 * self.dsigma()
        }
    }

    pub fn t(&self, j: usize) -> f64 {
        if j + 1 == self.ny {
            self.t_hi
        } else {
            self.t_lo + j as f64 * self.dt()
        }
    }

    pub fn sigmas(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.sigma(i)).collect()
    }
}

/// A cell containing sign changes of both components, resampled at half spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinedCell {
    pub i: usize,
    pub j: usize,
    /// Row-major 3×3 samples over the cell, corners included.
    pub samples: [Complex64; 9],
}

impl RefinedCell {
    pub fn center(&self) -> Complex64 {
        self.samples[4]
    }
}

/// ζ sampled on a [`GridSpec`], row-major (`values[j * nx + i]` at `(σ_i, t_j)`).
///
/// A field may hold only a block of the spec's rows; `row_offset` locates it.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub spec: GridSpec,
    /// Index of row 0 within the spec's rows.
    pub row_offset: usize,
    pub sigmas: Vec<f64>,
    pub ts: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Cells `(i, j)` touching the pole, left unsampled.
    pub masked: Vec<(usize, usize)>,
    pub refined: Vec<RefinedCell>,
}

impl Field {
    pub fn nx(&self) -> usize {
        self.sigmas.len()
    }

    pub fn ny(&self) -> usize {
        self.ts.len()
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.spec.nx + i]
    }

    pub fn is_masked(&self, i: usize, j: usize) -> bool {
        self.masked.binary_search(&(i, j)).is_ok()
    }

    pub fn refined_cell(&self, i: usize, j: usize) -> Option<&RefinedCell> {
        self.refined.binary_search_by(|c| (c.j, c.i).cmp(&(j, i))).ok().map(|k| &self.refined[k])
    }
}

fn eval(s: Complex64) -> Result<Complex64> {
    match zeta(s, DEFAULT_TOL) {
        Err(Error::Pole) => Ok(Complex64::new(f64::NAN, f64::NAN)),
        other => other,
    }
}

fn sample_rows(spec: &GridSpec, sigmas: &[f64], ts: &[f64]) -> Result<Vec<Complex64>> {
    let fast = spec.sigma_lo >= FUNCTIONAL_EQUATION_EDGE;
    let evaluator = if fast { Some(RowEvaluator::new(sigmas, spec.t_lo.abs().max(spec.t_hi.abs()))?) } else { None };
    let per_row: Vec<Result<Vec<Complex64>>> = ts
        .par_iter()
        .map(|&t| match &evaluator {
            Some(ev) => Ok(ev.row(t)),
            None => sigmas.iter().map(|&s| eval(Complex64::new(s, t))).collect(),
        })
        .collect();
    let mut values = Vec::with_capacity(spec.nx * per_row.len());
    for row in per_row {
        values.extend(row?);
    }
    Ok(values)
}

/// Samples rows `row_offset ..= row_offset + rows - 1` of `spec`.
pub(crate) fn sample_block(spec: &GridSpec, row_offset: usize, rows: usize) -> Result<Field> {
    spec.validate()?;
    let sigmas = spec.sigmas();
    let ts: Vec<f64> = (row_offset..row_offset + rows).map(|j| spec.t(j)).collect();
    let values = sample_rows(spec, &sigmas, &ts)?;
    let (nx, ny) = (sigmas.len(), ts.len());
    let mut masked = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let v = values[j * nx + i];
            if v.re.is_nan() {
                for (ci, cj) in
                    [(i.wrapping_sub(1), j.wrapping_sub(1)), (i, j.wrapping_sub(1)), (i.wrapping_sub(1), j), (i, j)]
                {
                    if ci < nx - 1 && cj < ny - 1 {
                        masked.push((ci, cj));
                    }
                }
            } else if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Overflow("ζ left the double range on the grid"));
            }
        }
    }
    masked.sort_unstable();
    masked.dedup();

    let mut zero_cells = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            if masked.binary_search(&(i, j)).is_ok() {
                continue;
            }
            let c =
                [values[j * nx + i], values[j * nx + i + 1], values[(j + 1) * nx + i], values[(j + 1) * nx + i + 1]];
            let re_change = c.iter().any(|z| z.re >= 0.0) && c.iter().any(|z| z.re < 0.0);
            let im_change = c.iter().any(|z| z.im >= 0.0) && c.iter().any(|z| z.im < 0.0);
            if re_change && im_change {
                zero_cells.push((i, j));
            }
        }
    }
    let refined: Vec<Result<RefinedCell>> = zero_cells
        .into_par_iter()
        .map(|(i, j)| {
            let mut samples = [Complex64::new(0.0, 0.0); 9];
            for b in 0..3 {
                for a in 0..3 {
                    samples[b * 3 + a] = match (a, b) {
                        (0 | 2, 0 | 2) => values[(j + b / 2) * nx + i + a / 2],
                        _ => {
                            let s = sigmas[i] + 0.5 * a as f64 * (sigmas[i + 1] - sigmas[i]);
                            let t = ts[j] + 0.5 * b as f64 * (ts[j + 1] - ts[j]);
                            eval(Complex64::new(s, t))?
                        }
                    };
                }
            }
            Ok(RefinedCell { i, j, samples })
        })
        .collect();
    let refined = refined.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Field { spec: *spec, row_offset, sigmas, ts, values, masked, refined })
}

/// ζ at every node of `spec`, the pole cell masked, zero neighbourhoods refined 2×.
pub fn sample_grid(spec: &GridSpec) -> Result<Field> {
    sample_block(spec, 0, spec.ny)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(0.0, 1.0, 0.0, 1.0, 7, 8).is_err());
        assert!(GridSpec::new(1.0, 1.0, 0.0, 1.0, 8, 8).is_err());
        assert!(GridSpec::new(0.0, 1.0, 2.0, 1.0, 8, 8).is_err());
        assert!(GridSpec::new(0.0, 1.0, 0.0, 600.0, 8, 8).is_err());
        let g = GridSpec::with_spacing(-1.0, 3.0, 0.0, 10.0, 0.01, 0.005).unwrap();
        assert_eq!((g.nx, g.ny), (401, 2001));
        assert_eq!(g.sigma(100), 0.0);
        assert_eq!(g.sigma(400), 3.0);
    }

    #[test]
    fn pole_is_masked_once() {
        let spec = GridSpec::new(-1.0, 2.0, 0.0, 40.0, 300, 4000).unwrap();
        let f = sample_grid(&spec).unwrap();
        // σ = 1 is not a node of this grid: nothing to mask, everything finite
        assert!(f.values.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        let spec = GridSpec::new(-1.0, 2.0, 0.0, 4.0, 31, 41).unwrap();
        let f = sample_grid(&spec).unwrap();
        assert_eq!(spec.sigma(20), 1.0);
        assert_eq!(f.masked, vec![(19, 0), (20, 0)]);
        assert_eq!(f.values.iter().filter(|z| z.re.is_nan()).count(), 1);
    }

    #[test]
    fn imaginary_part_changes_sign_near_first_horizontal() {
        let spec = GridSpec::new(5.0, 6.0, 0.0, 10.0, 8, 101).unwrap();
        let f = sample_grid(&spec).unwrap();
        let col: Vec<f64> = (0..spec.ny).map(|j| f.at(4, j).im).collect();
        let changes: Vec<usize> = (1..col.len()).filter(|&j| (col[j] >= 0.0) != (col[j - 1] >= 0.0)).collect();
        // row 0 is the real axis (Im = 0 exactly), so the first change is at row 1
        let interior: Vec<usize> = changes.into_iter().filter(|&j| j > 1).collect();
        // the m = 1 and m = 2 horizontals, at π/ln 2 and 2π/ln 2 up to the 3^{-s} correction
        assert_eq!(interior.len(), 2);
        for (m, &j) in interior.iter().enumerate() {
            let want = (m + 1) as f64 * std::f64::consts::PI / 2f64.ln();
            assert!((spec.t(j) - want).abs() < 0.2, "{}", spec.t(j));
        }
    }

    #[test]
    fn real_part_positive_right_of_three() {
        let spec = GridSpec::new(3.0, 4.0, 0.1, 2.0, 20, 40).unwrap();
        let f = sample_grid(&spec).unwrap();
        assert!(f.values.iter().all(|z| z.re > 0.0));
        assert!(f.refined.is_empty());
    }
}
