//! Dense symmetric helpers shared by the solvers and the Monte Carlo code.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Gram matrices whose smallest/largest eigenvalue ratio is at or below this
/// value are treated as singular.
pub const SINGULARITY_RATIO: f64 = 1e-10;

/// Above this size eigenvalue-only requests go through faer's blocked
/// tridiagonalization, which is several times faster than nalgebra's.
const LARGE_EIG: usize = 48;

/// Row Gram matrix `X X'`.
pub fn gram(x: &DMatrix<f64>) -> DMatrix<f64> {
    let g = x * x.transpose();
    symmetrize(g)
}

fn symmetrize(mut g: DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (g[(i, j)] + g[(j, i)]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues(g: &DMatrix<f64>) -> Vec<f64> {
    let n = g.nrows();
    if n == 0 {
        return Vec::new();
    }
    let mut vals: Vec<f64> = if n >= LARGE_EIG {
        let f = faer::Mat::<f64>::from_fn(n, n, |i, j| g[(i, j)]);
        f.self_adjoint_eigenvalues(faer::Side::Lower)
            .expect("symmetric eigenvalue iteration failed to converge")
    } else {
        g.clone().symmetric_eigenvalues().iter().copied().collect()
    };
    vals.sort_by(f64::total_cmp);
    vals
}

/// `λ_m(X X')` for an `m × d` matrix, clamped at zero. Exactly zero when
/// `m > d` since the Gram matrix is then rank deficient.
pub fn smallest_gram_eigenvalue(x: &DMatrix<f64>) -> f64 {
    let (m, d) = x.shape();
    if m == 0 {
        return 0.0;
    }
    if m > d {
        return 0.0;
    }
    if m < LARGE_EIG {
        return symmetric_eigenvalues(&gram(x))[0].max(0.0);
    }
    use faer::linalg::matmul::triangular::{matmul, BlockStructure};
    // only the lower triangle is formed and read
    let xr = faer::MatRef::from_column_major_slice(x.as_slice(), m, d);
    let mut g = faer::Mat::<f64>::zeros(m, m);
    matmul(
        g.as_mut(),
        BlockStructure::TriangularLower,
        faer::Accum::Replace,
        xr,
        BlockStructure::Rectangular,
        xr.transpose(),
        BlockStructure::Rectangular,
        1.0,
        faer::Par::Seq,
    );
    let vals = g
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("symmetric eigenvalue iteration failed to converge");
    vals.into_iter().fold(f64::INFINITY, f64::min).max(0.0)
}

/// Symmetric eigendecomposition of a Gram matrix, used both to invert it and
/// to report its conditioning.
#[derive(Debug, Clone)]
pub struct GramFactor {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    ratio: f64,
}

impl GramFactor {
    /// Factor `g` without rejecting singular input.
    pub fn decompose(g: DMatrix<f64>) -> Self {
        let eig = symmetrize(g).symmetric_eigen();
        let max = eig.eigenvalues.max();
        let min = eig.eigenvalues.min();
        let ratio = if max > 0.0 { (min / max).max(0.0) } else { 0.0 };
        GramFactor {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            ratio,
        }
    }

    /// Factor `g`, failing when it is numerically singular.
    pub fn new(g: DMatrix<f64>) -> Result<Self> {
        let f = Self::decompose(g);
        f.check()?;
        Ok(f)
    }

    pub fn check(&self) -> Result<()> {
        if self.is_singular() {
            Err(Error::Singular {
                ratio: self.ratio,
                threshold: SINGULARITY_RATIO,
            })
        } else {
            Ok(())
        }
    }

    pub fn is_singular(&self) -> bool {
        self.eigenvalues.is_empty() || self.ratio <= SINGULARITY_RATIO
    }

    /// Smallest to largest eigenvalue ratio (0 for a zero matrix).
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.min()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// `G^{-1} y`.
    pub fn solve(&self, y: &DVector<f64>) -> DVector<f64> {
        let mut coef = self.eigenvectors.tr_mul(y);
        for (c, l) in coef.iter_mut().zip(self.eigenvalues.iter()) {
            *c /= *l;
        }
        &self.eigenvectors * coef
    }

    /// `y' G^{-1} y`, accumulated in the eigenbasis.
    pub fn quad_form(&self, y: &DVector<f64>) -> f64 {
        let coef = self.eigenvectors.tr_mul(y);
        coef.iter()
            .zip(self.eigenvalues.iter())
            .map(|(c, l)| c * c / l)
            .sum()
    }

    /// Explicit `G^{-1}`, symmetrized.
    pub fn inverse(&self) -> DMatrix<f64> {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let inv = 1.0 / self.eigenvalues[j];
            scaled.column_mut(j).scale_mut(inv);
        }
        symmetrize(&scaled * self.eigenvectors.transpose())
    }
}
