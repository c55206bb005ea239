//! Dense density operators over the supersystem basis, with partial traces
//! and von Neumann entropy.

use super::model::SpaceDims;
use crate::error::{Error, Result};
use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

#[derive(Debug, Clone)]
pub struct DensityOperator {
    pub mat: Array2<C64>,
    pub dims: SpaceDims,
}

impl DensityOperator {
    pub fn new(mat: Array2<C64>, dims: SpaceDims) -> Result<Self> {
        if mat.nrows() != dims.dim() || mat.ncols() != dims.dim() {
            return Err(Error::invalid(
                "density operator",
                format!("matrix {}x{} vs dimension {}", mat.nrows(), mat.ncols(), dims.dim()),
            ));
        }
        Ok(DensityOperator { mat, dims })
    }

    pub fn dim(&self) -> usize {
        self.dims.dim()
    }

    pub fn trace(&self) -> C64 {
        self.mat.diag().iter().sum()
    }

    /// Hermiticity / unit-trace / positivity audit. The eigenvalue floor is
    /// only checked when `check_positivity` (it costs an eigendecomposition).
    pub fn validate(&self, tol: f64, check_positivity: bool) -> Result<()> {
        let n = self.dim();
        let mut herm_dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                herm_dev = herm_dev.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        if herm_dev > tol {
            return Err(Error::Numerical(format!(
                "density operator not Hermitian: deviation {herm_dev:e}"
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::Numerical(format!("trace = {tr} != 1")));
        }
        if check_positivity {
            let min = self.eigenvalues()?.into_iter().fold(f64::INFINITY, f64::min);
            if min < -1e-10 {
                return Err(Error::Numerical(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(())
    }

    pub fn expectation(&self, op: &Array2<C64>) -> f64 {
        // Tr[ρ A] for Hermitian A
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.mat.nrows() {
            for j in 0..self.mat.ncols() {
                acc += self.mat[(i, j)] * op[(j, i)];
            }
        }
        acc.re
    }

    pub fn expectation_diag(&self, diag: &[f64]) -> f64 {
        self.mat
            .diag()
            .iter()
            .zip(diag)
            .map(|(r, d)| r.re * d)
            .sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let (vals, _) = self
            .mat
            .eigh(UPLO::Lower)
            .map_err(|e| Error::Numerical(format!("eigh failed: {e}")))?;
        Ok(vals.to_vec())
    }

    /// Von Neumann entropy −Σ λ ln λ with an eigenvalue floor of 1e−15.
    pub fn entropy(&self) -> Result<f64> {
        Ok(entropy_from_eigenvalues(&self.eigenvalues()?))
    }

    /// Trace out the probe (identity when no probe is present).
    pub fn reduce_sb(&self) -> DensityOperator {
        let d = &self.dims;
        if d.p_dim() == 1 {
            return self.clone();
        }
        let b = d.b_dim();
        let mut out = Array2::zeros((2 * b, 2 * b));
        for s1 in 0..2 {
            for s2 in 0..2 {
                for b1 in 0..b {
                    for b2 in 0..b {
                        let mut acc = C64::new(0.0, 0.0);
                        for p in 0..2 {
                            acc += self.mat[(d.index(s1, p, b1), d.index(s2, p, b2))];
                        }
                        out[(s1 * b + b1, s2 * b + b2)] = acc;
                    }
                }
            }
        }
        DensityOperator {
            mat: out,
            dims: d.without_probe(),
        }
    }

    /// Reduced qubit state (2×2).
    pub fn reduce_s(&self) -> Array2<C64> {
        let d = &self.dims;
        let mut out = Array2::zeros((2, 2));
        for s1 in 0..2 {
            for s2 in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for p in 0..d.p_dim() {
                    for b in 0..d.b_dim() {
                        acc += self.mat[(d.index(s1, p, b), d.index(s2, p, b))];
                    }
                }
                out[(s1, s2)] = acc;
            }
        }
        out
    }

    /// Reduced bath state (b_dim × b_dim).
    pub fn reduce_b(&self) -> Array2<C64> {
        let d = &self.dims;
        let b = d.b_dim();
        let mut out = Array2::zeros((b, b));
        for b1 in 0..b {
            for b2 in 0..b {
                let mut acc = C64::new(0.0, 0.0);
                for s in 0..2 {
                    for p in 0..d.p_dim() {
                        acc += self.mat[(d.index(s, p, b1), d.index(s, p, b2))];
                    }
                }
                out[(b1, b2)] = acc;
            }
        }
        out
    }

    /// Reduced probe state (2×2); errors when the model carries no probe.
    pub fn reduce_p(&self) -> Result<Array2<C64>> {
        let d = &self.dims;
        if d.p_dim() != 2 {
            return Err(Error::invalid("probe", "model has no probe"));
        }
        let mut out = Array2::zeros((2, 2));
        for p1 in 0..2 {
            for p2 in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for s in 0..2 {
                    for b in 0..d.b_dim() {
                        acc += self.mat[(d.index(s, p1, b), d.index(s, p2, b))];
                    }
                }
                out[(p1, p2)] = acc;
            }
        }
        Ok(out)
    }

    /// Enforce exact Hermiticity (drift control during long propagations).
    pub fn rehermitize(&mut self) {
        let n = self.mat.nrows();
        for i in 0..n {
            for j in i + 1..n {
                let avg = 0.5 * (self.mat[(i, j)] + self.mat[(j, i)].conj());
                self.mat[(i, j)] = avg;
                self.mat[(j, i)] = avg.conj();
            }
        }
        for i in 0..n {
            self.mat[(i, i)] = C64::new(self.mat[(i, i)].re, 0.0);
        }
    }
}

/// −Σ λ ln λ with the 1e−15 floor.
pub fn entropy_from_eigenvalues(vals: &[f64]) -> f64 {
    vals.iter()
        .map(|&l| {
            let l = l.max(1e-15);
            -l * l.ln()
        })
        .sum::<f64>()
        .max(0.0)
}

/// Entropy of an arbitrary Hermitian matrix (for reduced states).
pub fn entropy_of(mat: &Array2<C64>) -> Result<f64> {
    let (vals, _) = mat
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Numerical(format!("eigh failed: {e}")))?;
    Ok(entropy_from_eigenvalues(&vals.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactsim::model::SpaceDims;

    #[test]
    fn entropy_floor_and_pure_state() {
        assert_eq!(entropy_from_eigenvalues(&[1.0, 0.0, 0.0]), 0.0);
        let h = entropy_from_eigenvalues(&[0.5, 0.5]);
        assert!((h - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn partial_traces_of_product_state() {
        // S ⊗ P ⊗ one mode (cutoff 1): ρ = |e⟩⟨e| ⊗ I/2 ⊗ |0⟩⟨0|
        let dims = SpaceDims::new(true, 1, 1);
        let n = dims.dim();
        assert_eq!(n, 8);
        let mut m = Array2::<C64>::zeros((n, n));
        for p in 0..2 {
            m[(dims.index(1, p, 0), dims.index(1, p, 0))] = C64::new(0.5, 0.0);
        }
        let rho = DensityOperator::new(m, dims).unwrap();
        rho.validate(1e-12, true).unwrap();
        let s = rho.reduce_s();
        assert!((s[(1, 1)].re - 1.0).abs() < 1e-14);
        assert!(s[(0, 0)].norm() < 1e-14);
        let p = rho.reduce_p().unwrap();
        assert!((p[(0, 0)].re - 0.5).abs() < 1e-14);
        assert!((p[(1, 1)].re - 0.5).abs() < 1e-14);
        let b = rho.reduce_b();
        assert!((b[(0, 0)].re - 1.0).abs() < 1e-14);
        let sb = rho.reduce_sb();
        assert!((sb.trace().re - 1.0).abs() < 1e-14);
        assert_eq!(sb.dim(), 4);
    }
}
