//! Minimum-norm solvers: exact interpolation through the Gram inverse and
//! the minimum-norm point of a system of linear inequalities.
//!
//! The inequality solver is a dual active-set method (Goldfarb–Idnani)
//! specialised to the identity Hessian. It starts from the unconstrained
//! minimizer `w = 0`, repeatedly adds the most violated constraint and drops
//! constraints whose multipliers would turn negative. Active normals stay
//! linearly independent, and infeasibility is detected when a violated
//! constraint cannot be reached by any admissible dual step.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::GramFactor;
use crate::sample::SampleMatrix;

/// Constraints `a_i · w ≥ b_i`, one row of `matrix` per constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    matrix: DMatrix<f64>,
    bounds: DVector<f64>,
}

impl ConstraintSystem {
    pub fn new(matrix: DMatrix<f64>, bounds: DVector<f64>) -> Result<Self> {
        if matrix.nrows() != bounds.len() {
            return invalid(format!(
                "{} constraint rows but {} bounds",
                matrix.nrows(),
                bounds.len()
            ));
        }
        if matrix.ncols() == 0 {
            return invalid("constraint system needs d >= 1");
        }
        if matrix.iter().chain(bounds.iter()).any(|v| !v.is_finite()) {
            return invalid("constraint system has non-finite entries");
        }
        Ok(ConstraintSystem { matrix, bounds })
    }

    pub fn from_rows(rows: &[Vec<f64>], bounds: &[f64], dim: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != dim) {
            return invalid("constraint rows must have length d");
        }
        let m = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
        Self::new(m, DVector::from_column_slice(bounds))
    }

    /// Unconstrained system in dimension `dim`.
    pub fn empty(dim: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(0, dim), DVector::zeros(0))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn bounds(&self) -> &DVector<f64> {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    fn row(&self, i: usize) -> DVector<f64> {
        self.matrix.row(i).transpose()
    }

    fn slack(&self, i: usize, w: &DVector<f64>) -> f64 {
        self.matrix.row(i).dot(&w.transpose()) - self.bounds[i]
    }

    fn tolerance(&self, i: usize, w_norm: f64) -> f64 {
        1e-11 * (1.0 + self.bounds[i].abs() + self.matrix.row(i).norm() * w_norm)
    }

    /// Largest constraint violation `max(0, b_i - a_i·w)`.
    pub fn max_violation(&self, w: &DVector<f64>) -> f64 {
        (0..self.len())
            .map(|i| -self.slack(i, w))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpSolution {
    pub w: Vec<f64>,
    /// `‖w‖²`.
    pub objective: f64,
    /// Indices of the constraints in the final working set.
    pub active_set: Vec<usize>,
    /// Zero when the status is infeasible.
    pub kkt_residual: f64,
    pub status: QpStatus,
}

impl QpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == QpStatus::Optimal
    }

    pub fn w_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.w)
    }

    pub fn norm(&self) -> f64 {
        self.objective.sqrt()
    }
}

/// Minimum-norm solution of `X w = y`, i.e. `w = X'(XX')⁻¹ y`.
pub fn min_norm_interpolator(x: &SampleMatrix, y: &DVector<f64>) -> Result<DVector<f64>> {
    if y.len() != x.m() {
        return invalid(format!("{} targets for {} points", y.len(), x.m()));
    }
    let factor = GramFactor::new(x.gram())?;
    Ok(interpolate_with(&factor, x, y))
}

/// Interpolator reusing an existing factorization of `XX'`.
pub(crate) fn interpolate_with(
    factor: &GramFactor,
    x: &SampleMatrix,
    y: &DVector<f64>,
) -> DVector<f64> {
    let alpha = factor.solve(y);
    x.matrix().tr_mul(&alpha)
}

/// Default iteration cap `100 (n + d)`.
pub fn default_iteration_cap(cs: &ConstraintSystem) -> usize {
    100 * (cs.len() + cs.dim())
}

pub fn solve_min_norm_ineq(cs: &ConstraintSystem) -> Result<QpSolution> {
    solve_min_norm_ineq_with_cap(cs, default_iteration_cap(cs))
}

/// Working set of the dual method: active indices, their multipliers and
/// the Gram matrix `N'N` of their normals, kept in sync.
struct WorkingSet {
    idx: Vec<usize>,
    mult: Vec<f64>,
    normals: Vec<DVector<f64>>,
    gram: DMatrix<f64>,
}

impl WorkingSet {
    fn new() -> Self {
        WorkingSet {
            idx: Vec::new(),
            mult: Vec::new(),
            normals: Vec::new(),
            gram: DMatrix::zeros(0, 0),
        }
    }

    fn len(&self) -> usize {
        self.idx.len()
    }

    fn push(&mut self, i: usize, a: DVector<f64>, mult: f64) {
        let q = self.len();
        let mut g = self.gram.clone().resize(q + 1, q + 1, 0.0);
        for (j, n) in self.normals.iter().enumerate() {
            let v = n.dot(&a);
            g[(j, q)] = v;
            g[(q, j)] = v;
        }
        g[(q, q)] = a.dot(&a);
        self.gram = g;
        self.idx.push(i);
        self.mult.push(mult);
        self.normals.push(a);
    }

    fn remove(&mut self, pos: usize) {
        self.idx.remove(pos);
        self.mult.remove(pos);
        self.normals.remove(pos);
        self.gram = self.gram.clone().remove_row(pos).remove_column(pos);
    }

    /// `r = (N'N)⁻¹ N' a` and the projection `z = a − N r`.
    fn split(&self, a: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        let q = self.len();
        if q == 0 {
            return Ok((DVector::zeros(0), a.clone()));
        }
        let rhs = DVector::from_iterator(q, self.normals.iter().map(|n| n.dot(a)));
        let r = match self.gram.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => self.gram.clone().lu().solve(&rhs).ok_or_else(|| {
                Error::Invariant("active normals became linearly dependent".into())
            })?,
        };
        let mut z = a.clone();
        for (n, rj) in self.normals.iter().zip(r.iter()) {
            z.axpy(-rj, n, 1.0);
        }
        Ok((r, z))
    }
}

/// Minimum-norm point of `{w : a_i·w ≥ b_i}` with an explicit iteration cap.
pub fn solve_min_norm_ineq_with_cap(
    cs: &ConstraintSystem,
    max_iterations: usize,
) -> Result<QpSolution> {
    let d = cs.dim();
    let mut w = DVector::<f64>::zeros(d);
    let mut ws = WorkingSet::new();
    let mut iterations = 0usize;

    loop {
        // Most violated constraint outside the working set; lowest index wins ties.
        let w_norm = w.norm();
        let mut pick: Option<(usize, f64)> = None;
        for i in 0..cs.len() {
            if ws.idx.contains(&i) {
                continue;
            }
            let s = cs.slack(i, &w);
            if s < -cs.tolerance(i, w_norm) && pick.is_none_or(|(_, best)| s < best) {
                pick = Some((i, s));
            }
        }
        let Some((p, _)) = pick else {
            return Ok(finish(cs, w, ws, QpStatus::Optimal));
        };

        let a_p = cs.row(p);
        let a_norm2 = a_p.dot(&a_p);
        let mut u_p = 0.0;
        loop {
            iterations += 1;
            if iterations > max_iterations {
                return Err(Error::IterationLimit {
                    iterations: max_iterations,
                });
            }
            let (r, z) = ws.split(&a_p)?;

            // Partial step: the first working constraint whose multiplier hits zero.
            let mut t1 = f64::INFINITY;
            let mut drop = None;
            for (j, (&rj, &uj)) in r.iter().zip(&ws.mult).enumerate() {
                if rj > 1e-14 {
                    let t = uj.max(0.0) / rj;
                    if t < t1 {
                        t1 = t;
                        drop = Some(j);
                    }
                }
            }
            // Full step: make constraint p tight.
            let zz = z.dot(&a_p);
            let t2 = if zz > 1e-12 * a_norm2 {
                -cs.slack(p, &w) / zz
            } else {
                f64::INFINITY
            };

            let t = t1.min(t2);
            if t.is_infinite() {
                return Ok(finish(cs, w, ws, QpStatus::Infeasible));
            }
            for (m, rj) in ws.mult.iter_mut().zip(r.iter()) {
                *m -= t * rj;
            }
            u_p += t;
            if t2.is_finite() {
                w.axpy(t, &z, 1.0);
            }
            if t2 <= t1 {
                ws.push(p, a_p, u_p);
                break;
            }
            ws.remove(drop.expect("finite partial step has a blocking index"));
        }
    }
}

fn finish(cs: &ConstraintSystem, w: DVector<f64>, ws: WorkingSet, status: QpStatus) -> QpSolution {
    let mut active = ws.idx;
    active.sort_unstable();
    let mut sol = QpSolution {
        objective: w.norm_squared(),
        w: w.iter().copied().collect(),
        active_set: active,
        kkt_residual: 0.0,
        status,
    };
    if status == QpStatus::Optimal {
        let k = kkt_report(&sol, cs);
        sol.kkt_residual = k.stationarity_residual.max(k.complementarity_residual);
    }
    sol
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    /// `‖w − Σ_{active} u_i a_i‖` with least-squares multipliers.
    pub stationarity_residual: f64,
    /// `max_i max(0, b_i − a_i·w)` over all constraints.
    pub feasibility_violation: f64,
    /// `max_{active} |a_i·w − b_i|`.
    pub complementarity_residual: f64,
    pub multiplier_sign_ok: bool,
    pub multipliers: Vec<f64>,
}

/// Recomputes multipliers on the reported active set and measures how far
/// the solution is from satisfying the optimality conditions.
pub fn kkt_check(sol: &QpSolution, cs: &ConstraintSystem) -> Result<KktReport> {
    if sol.status != QpStatus::Optimal {
        return invalid("KKT check requires an optimal solution");
    }
    if sol.w.len() != cs.dim() || sol.active_set.iter().any(|&i| i >= cs.len()) {
        return invalid("solution does not match the constraint system");
    }
    Ok(kkt_report(sol, cs))
}

fn kkt_report(sol: &QpSolution, cs: &ConstraintSystem) -> KktReport {
    let w = sol.w_vector();
    let q = sol.active_set.len();
    let n = DMatrix::from_fn(cs.dim(), q, |i, j| cs.matrix[(sol.active_set[j], i)]);
    let mult = if q == 0 {
        DVector::zeros(0)
    } else {
        // Least squares via SVD handles rank-deficient active sets.
        n.clone()
            .svd(true, true)
            .solve(&w, 1e-12)
            .unwrap_or_else(|_| DVector::zeros(q))
    };
    let stationarity_residual = (&w - &n * &mult).norm();
    let complementarity_residual = sol
        .active_set
        .iter()
        .map(|&i| cs.slack(i, &w).abs())
        .fold(0.0, f64::max);
    KktReport {
        stationarity_residual,
        feasibility_violation: cs.max_violation(&w),
        complementarity_residual,
        multiplier_sign_ok: mult.iter().all(|&u| u >= -1e-8),
        multipliers: mult.iter().copied().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dv(v: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(v)
    }

    #[test]
    fn interpolator_examples() {
        let i2 = SampleMatrix::scaled_identity(2, 1.0);
        let w = min_norm_interpolator(&i2, &dv(&[1.0, -1.0])).unwrap();
        assert!((w - dv(&[1.0, -1.0])).norm() < 1e-14);

        let two = SampleMatrix::scaled_identity(2, 2.0);
        let w = min_norm_interpolator(&two, &dv(&[1.0, 1.0])).unwrap();
        assert!((w - dv(&[0.5, 0.5])).norm() < 1e-14);

        // Row-space parametrisation w = X'α with (XX')α = y: 2α = 2.
        let row = SampleMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let w = min_norm_interpolator(&row, &dv(&[2.0])).unwrap();
        assert!((w - dv(&[1.0, 1.0])).norm() < 1e-14);
    }

    #[test]
    fn interpolator_reports_singularity() {
        let x = SampleMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        match min_norm_interpolator(&x, &dv(&[1.0, 1.0])) {
            Err(Error::Singular { ratio, .. }) => assert!(ratio <= 1e-10),
            other => panic!("expected singular, got {other:?}"),
        }
        let wide = SampleMatrix::scaled_identity(2, 1.0)
            .stack(&SampleMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap())
            .unwrap();
        assert!(min_norm_interpolator(&wide, &dv(&[1.0, 1.0, 1.0])).is_err());
        assert!(
            min_norm_interpolator(&SampleMatrix::scaled_identity(2, 1.0), &dv(&[1.0])).is_err()
        );
    }

    #[test]
    fn qp_examples() {
        let s = solve_min_norm_ineq(&ConstraintSystem::empty(3).unwrap()).unwrap();
        assert_eq!(s.status, QpStatus::Optimal);
        assert_eq!(s.objective, 0.0);
        assert!(s.active_set.is_empty());

        let cs = ConstraintSystem::from_rows(&[vec![1.0, 0.0]], &[1.0], 2).unwrap();
        let s = solve_min_norm_ineq(&cs).unwrap();
        assert!((s.w_vector() - dv(&[1.0, 0.0])).norm() < 1e-14);
        assert_eq!(s.active_set, vec![0]);

        let cs =
            ConstraintSystem::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[1.0, 1.0], 2).unwrap();
        let s = solve_min_norm_ineq(&cs).unwrap();
        assert!((s.w_vector() - dv(&[1.0, 1.0])).norm() < 1e-14);
        assert_eq!(s.active_set, vec![0, 1]);
        assert!((s.objective - 2.0).abs() < 1e-14);
    }

    #[test]
    fn qp_detects_infeasibility() {
        let cs = ConstraintSystem::from_rows(&[vec![1.0, 0.0], vec![-1.0, 0.0]], &[1.0, 1.0], 2)
            .unwrap();
        assert_eq!(
            solve_min_norm_ineq(&cs).unwrap().status,
            QpStatus::Infeasible
        );
        let cs = ConstraintSystem::from_rows(&[vec![0.0, 0.0]], &[0.5], 2).unwrap();
        assert_eq!(
            solve_min_norm_ineq(&cs).unwrap().status,
            QpStatus::Infeasible
        );
        let cs = ConstraintSystem::from_rows(&[vec![0.0, 0.0]], &[-0.5], 2).unwrap();
        assert_eq!(solve_min_norm_ineq(&cs).unwrap().status, QpStatus::Optimal);
    }

    #[test]
    fn qp_drops_constraints_when_needed() {
        // The first constraint picked (most violated) is not active at the optimum.
        let cs = ConstraintSystem::from_rows(
            &[vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, -1.0]],
            &[1.0, 3.0, 3.0],
            2,
        )
        .unwrap();
        let s = solve_min_norm_ineq(&cs).unwrap();
        assert!((s.w_vector() - dv(&[3.0, 0.0])).norm() < 1e-12);
        let k = kkt_check(&s, &cs).unwrap();
        assert!(k.multiplier_sign_ok && k.stationarity_residual < 1e-10);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let cs =
            ConstraintSystem::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[1.0, 1.0], 2).unwrap();
        assert!(matches!(
            solve_min_norm_ineq_with_cap(&cs, 1),
            Err(Error::IterationLimit { iterations: 1 })
        ));
    }

    #[test]
    fn kkt_examples() {
        let cs = ConstraintSystem::from_rows(&[vec![1.0, 0.0]], &[1.0], 2).unwrap();
        let s = solve_min_norm_ineq(&cs).unwrap();
        let k = kkt_check(&s, &cs).unwrap();
        assert!(k.stationarity_residual <= 1e-10);
        assert!(k.feasibility_violation <= 1e-10);
        assert!(k.multiplier_sign_ok);

        let mut off = s.clone();
        off.w = vec![1.0 + 1e-3, 1e-3];
        let k = kkt_check(&off, &cs).unwrap();
        assert!(k.stationarity_residual > 1e-4);

        let mut inf = s;
        inf.status = QpStatus::Infeasible;
        assert!(kkt_check(&inf, &cs).is_err());
    }

    /// Minimum norm over all active subsets: solve each equality system with
    /// independent rows, keep feasible candidates.
    fn enumerate_oracle(cs: &ConstraintSystem) -> Option<f64> {
        let n = cs.len();
        let mut best: Option<f64> = None;
        for mask in 0u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let w = if idx.is_empty() {
                DVector::zeros(cs.dim())
            } else {
                let a = cs.matrix().select_rows(&idx);
                let b = DVector::from_iterator(idx.len(), idx.iter().map(|&i| cs.bounds()[i]));
                let g = &a * a.transpose();
                let Some(lu) = g.clone().full_piv_lu().try_inverse() else {
                    continue;
                };
                if g.clone().symmetric_eigenvalues().min() < 1e-9 * g.norm() {
                    continue;
                }
                a.tr_mul(&(lu * b))
            };
            if cs.max_violation(&w) <= 1e-9 {
                let obj = w.norm_squared();
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
        best
    }

    #[test]
    fn qp_matches_active_set_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut infeasible = 0;
        for _ in 0..200 {
            let n = rng.random_range(0..=5);
            let d = rng.random_range(1..=4);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.random_range(-2.0..2.0)).collect())
                .collect();
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..2.0)).collect();
            let cs = ConstraintSystem::from_rows(&rows, &b, d).unwrap();
            let sol = solve_min_norm_ineq(&cs).unwrap();
            match enumerate_oracle(&cs) {
                Some(obj) => {
                    assert!(sol.is_optimal(), "{rows:?} {b:?}");
                    assert!(
                        (sol.objective - obj).abs() <= 1e-6 * obj.max(1.0),
                        "{} vs {obj}",
                        sol.objective
                    );
                    assert!(cs.max_violation(&sol.w_vector()) <= 1e-8);
                    assert!(sol.kkt_residual <= 1e-6);
                    assert!(kkt_check(&sol, &cs).unwrap().multiplier_sign_ok);
                }
                None => {
                    infeasible += 1;
                    assert_eq!(sol.status, QpStatus::Infeasible, "{rows:?} {b:?}");
                }
            }
        }
        assert!(
            infeasible > 0,
            "random instances should include infeasible systems"
        );
    }

    proptest! {
        #[test]
        fn interpolator_is_minimum_norm(
            m in 1usize..=4, extra in 0usize..=4, seed in any::<u64>(),
        ) {
            let d = m + extra;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = SampleMatrix::new(DMatrix::from_fn(m, d, |_, _| rng.random_range(-1.0..1.0))).unwrap();
            let y = DVector::from_fn(m, |_, _| rng.random_range(-2.0..2.0));
            let Ok(factor) = GramFactor::new(x.gram()) else { return Ok(()) };
            prop_assume!(factor.ratio() > 1e-6);
            let w = min_norm_interpolator(&x, &y).unwrap();
            prop_assert!((x.matrix() * &w - &y).amax() <= 1e-8 * y.norm().max(1.0));
            let q = factor.quad_form(&y);
            prop_assert!((w.norm_squared() - q).abs() <= 1e-8 * q.max(1e-12));
            // null-space perturbations never shrink the norm; the null space
            // comes from the d - m smallest eigenvectors of X'X
            let eig = (x.matrix().transpose() * x.matrix()).symmetric_eigen();
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let null: Vec<DVector<f64>> = order[..d - m].iter().map(|&j| eig.eigenvectors.column(j).into_owned()).collect();
            for _ in 0..100 {
                let mut z = DVector::zeros(d);
                for v in &null {
                    z.axpy(rng.random_range(-1.0..1.0), v, 1.0);
                }
                prop_assert!((&w + z).norm() >= w.norm() * (1.0 - 1e-9));
            }
        }

        #[test]
        fn paired_inequalities_reproduce_interpolator(m in 1usize..=3, extra in 0usize..=3, seed in any::<u64>()) {
            let d = m + extra;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = SampleMatrix::new(DMatrix::from_fn(m, d, |_, _| rng.random_range(-1.0..1.0))).unwrap();
            let y = DVector::from_fn(m, |_, _| rng.random_range(-2.0..2.0));
            prop_assume!(GramFactor::new(x.gram()).map(|f| f.ratio() > 1e-4).unwrap_or(false));
            let w = min_norm_interpolator(&x, &y).unwrap();
            let mut rows = Vec::new();
            let mut b = Vec::new();
            for i in 0..m {
                let r: Vec<f64> = x.row(i).iter().copied().collect();
                rows.push(r.clone());
                b.push(y[i]);
                rows.push(r.iter().map(|v| -v).collect());
                b.push(-y[i]);
            }
            let cs = ConstraintSystem::from_rows(&rows, &b, d).unwrap();
            let sol = solve_min_norm_ineq(&cs).unwrap();
            prop_assert!(sol.is_optimal());
            prop_assert!((sol.w_vector() - w).norm() <= 1e-6);
        }
    }
}
