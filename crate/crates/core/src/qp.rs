//! Dense primal active-set solver for convex quadratic programs
//!
//! `min ½ xᵀHx + gᵀx  s.t.  aᵢᵀx ≥ bᵢ,  cⱼᵀx = dⱼ`
//!
//! Single-variable rows are treated as bounds and eliminated by fixing the
//! variable; the remaining working rows enter through a Schur complement of
//! the free Hessian block. Ties in both the blocking-constraint and the
//! dropping-constraint selection go to the lowest row index.

use nalgebra::{Cholesky, DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QpError {
    #[error("constraint set is infeasible (violation {violation:e})")]
    Infeasible { violation: f64 },
    #[error("working-set rows are linearly dependent")]
    DegenerateConstraints,
    #[error("Hessian is not positive definite on the feasible subspace")]
    Indefinite,
    #[error("active-set iteration cap {cap} exceeded")]
    IterationCap { cap: usize },
    #[error("KKT residual {residual:e} above tolerance")]
    Inaccurate { residual: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("negative L1 weight {weight} on variable {index}")]
    NegativeWeight { index: usize, weight: f64 },
}

pub type QpResult<T> = std::result::Result<T, QpError>;

pub const DEFAULT_TOL_KKT: f64 = 1e-8;

/// Sparse linear row `coeffsᵀx` against a right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl Constraint {
    /// Builds a row scaled to unit Euclidean norm; zero coefficients are dropped
    /// and repeated indices merged.
    pub fn new(mut coeffs: Vec<(usize, f64)>, rhs: f64) -> Self {
        coeffs.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
        for (i, v) in coeffs {
            match merged.last_mut() {
                Some((j, w)) if *j == i => *w += v,
                _ => merged.push((i, v)),
            }
        }
        merged.retain(|&(_, v)| v != 0.0);
        let norm = merged.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, v) in &mut merged {
                *v /= norm;
            }
            Constraint { coeffs: merged, rhs: rhs / norm }
        } else {
            Constraint { coeffs: merged, rhs }
        }
    }

    /// `x_index ≥ value`.
    pub fn lower(index: usize, value: f64) -> Self {
        Constraint { coeffs: vec![(index, 1.0)], rhs: value }
    }

    pub fn dot(&self, x: &DVector<f64>) -> f64 {
        self.coeffs.iter().map(|&(i, v)| v * x[i]).sum()
    }

    fn bound(&self) -> Option<(usize, f64)> {
        match self.coeffs.as_slice() {
            [(i, v)] => Some((*i, *v)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem {
    pub hessian: DMatrix<f64>,
    pub linear: DVector<f64>,
    /// Rows meaning `aᵀx ≥ b`.
    pub ineq: Vec<Constraint>,
    /// Rows meaning `cᵀx = d`.
    pub eq: Vec<Constraint>,
    /// Inequality rows expected to be active at the solution.
    pub warm_start: Option<Vec<usize>>,
    /// Starting point; projected onto the feasible set when infeasible.
    pub initial_point: Option<DVector<f64>>,
}

impl QpProblem {
    pub fn new(hessian: DMatrix<f64>, linear: DVector<f64>) -> Self {
        QpProblem { hessian, linear, ineq: Vec::new(), eq: Vec::new(), warm_start: None, initial_point: None }
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.hessian * x)) + self.linear.dot(x)
    }

    /// Largest constraint violation at `x`.
    pub fn violation(&self, x: &DVector<f64>) -> f64 {
        let ineq = self.ineq.iter().map(|c| (c.rhs - c.dot(x)).max(0.0));
        let eq = self.eq.iter().map(|c| (c.rhs - c.dot(x)).abs());
        ineq.chain(eq).fold(0.0, f64::max)
    }

    fn check(&self) -> QpResult<()> {
        let n = self.dim();
        if self.hessian.nrows() != n || self.hessian.ncols() != n {
            return Err(QpError::Dimension(format!(
                "Hessian is {}x{}, linear term has {n} entries",
                self.hessian.nrows(),
                self.hessian.ncols()
            )));
        }
        for c in self.ineq.iter().chain(&self.eq) {
            if c.coeffs.iter().any(|&(i, _)| i >= n) {
                return Err(QpError::Dimension(format!("constraint references variable beyond {n}")));
            }
        }
        if let Some(x0) = &self.initial_point {
            if x0.len() != n {
                return Err(QpError::Dimension(format!("initial point has {} entries, expected {n}", x0.len())));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub x: DVector<f64>,
    /// One per inequality row, non-negative, zero when inactive.
    pub ineq_multipliers: Vec<f64>,
    pub eq_multipliers: Vec<f64>,
    /// Inequality rows in the final working set, ascending.
    pub active_set: Vec<usize>,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub objective: f64,
}

/// Iteration count and accuracy of a solve, without the vectors.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct QpSummary {
    pub iterations: usize,
    pub kkt_residual: f64,
    pub active: usize,
}

impl From<&QpSolution> for QpSummary {
    fn from(s: &QpSolution) -> Self {
        QpSummary { iterations: s.iterations, kkt_residual: s.kkt_residual, active: s.active_set.len() }
    }
}

pub fn solve_qp(p: &QpProblem, tol_kkt: f64) -> QpResult<QpSolution> {
    p.check()?;
    let n = p.dim();
    let start = p.initial_point.clone().unwrap_or_else(|| DVector::zeros(n));
    let xscale = scale_of(&start, p);
    let feas_tol = 1e-12 * xscale;
    let x = if p.violation(&start) > feas_tol { phase_one(p, &start)? } else { start };
    let mut solver = ActiveSet::new(p);
    let working = solver.initial_working_set(&x, p.warm_start.as_deref());
    solver.run(x, working, tol_kkt)
}

fn scale_of(x: &DVector<f64>, p: &QpProblem) -> f64 {
    let rhs = p.ineq.iter().chain(&p.eq).map(|c| c.rhs.abs()).fold(0.0, f64::max);
    x.amax().max(rhs).max(f64::MIN_POSITIVE)
}

/// Nearest feasible point to `x0` through the dual of the projection problem,
/// a bound-constrained QP in the constraint multipliers.
fn phase_one(p: &QpProblem, x0: &DVector<f64>) -> QpResult<DVector<f64>> {
    let rows: Vec<&Constraint> = p.ineq.iter().chain(&p.eq).collect();
    let m = rows.len();
    let mi = p.ineq.len();
    let n = p.dim();
    let mut a = DMatrix::<f64>::zeros(m, n);
    for (r, c) in rows.iter().enumerate() {
        for &(i, v) in &c.coeffs {
            a[(r, i)] += v;
        }
    }
    let mut gram = &a * a.transpose();
    let reg = 1e-12 * (0..m).map(|i| gram[(i, i)]).fold(1.0, f64::max);
    for i in 0..m {
        gram[(i, i)] += reg;
    }
    let resid = DVector::from_iterator(m, rows.iter().map(|c| c.rhs - c.dot(x0)));
    let mut dual = QpProblem::new(gram, -resid);
    dual.ineq = (0..mi).map(|i| Constraint::lower(i, 0.0)).collect();
    let nu = solve_qp(&dual, DEFAULT_TOL_KKT)?.x;
    let x = x0 + a.transpose() * nu;
    let violation = p.violation(&x);
    if violation > 1e-9 * scale_of(&x, p) {
        return Err(QpError::Infeasible { violation });
    }
    Ok(x)
}

enum RowKind {
    Bound { var: usize, coef: f64 },
    General,
}

struct EqpSolution {
    x: DVector<f64>,
    /// Multipliers of equality rows then working rows, in the order supplied.
    lambda: Vec<f64>,
}

struct ActiveSet<'a> {
    p: &'a QpProblem,
    n: usize,
    diag_scale: f64,
}

impl<'a> ActiveSet<'a> {
    fn new(p: &'a QpProblem) -> Self {
        let n = p.dim();
        let diag_scale = (0..n).map(|i| p.hessian[(i, i)].abs()).fold(0.0, f64::max);
        ActiveSet { p, n, diag_scale }
    }

    /// Rows active at `x`, filtered for linear independence in index order.
    fn initial_working_set(&self, x: &DVector<f64>, warm: Option<&[usize]>) -> Vec<usize> {
        let tol = 1e-10 * scale_of(x, self.p);
        let mut candidates: Vec<usize> = match warm {
            Some(w) => w.iter().copied().filter(|&i| i < self.p.ineq.len()).collect(),
            None => (0..self.p.ineq.len()).collect(),
        };
        candidates.sort_unstable();
        candidates.dedup();
        let mut basis: Vec<DVector<f64>> = Vec::new();
        let push_independent = |c: &Constraint, basis: &mut Vec<DVector<f64>>| -> bool {
            let mut v = DVector::zeros(self.n);
            for &(i, a) in &c.coeffs {
                v[i] = a;
            }
            for _ in 0..2 {
                for b in basis.iter() {
                    let d = b.dot(&v);
                    v.axpy(-d, b, 1.0);
                }
            }
            let norm = v.norm();
            if norm > 1e-8 {
                basis.push(v / norm);
                true
            } else {
                false
            }
        };
        for c in &self.p.eq {
            push_independent(c, &mut basis);
        }
        let mut working = Vec::new();
        for i in candidates {
            let c = &self.p.ineq[i];
            if (c.dot(x) - c.rhs).abs() <= tol && push_independent(c, &mut basis) {
                working.push(i);
            }
        }
        working
    }

    fn run(&mut self, mut x: DVector<f64>, mut working: Vec<usize>, tol_kkt: f64) -> QpResult<QpSolution> {
        let cap = 50 * self.n.max(1);
        let mut last_dropped: Option<usize> = None;
        for iter in 1..=cap {
            let eqp = self.solve_eqp(&working)?;
            let step = &eqp.x - &x;
            let step_norm = step.amax();
            let stalled = step_norm <= 1e-14 * x.amax().max(eqp.x.amax()).max(f64::MIN_POSITIVE);
            if stalled {
                x = eqp.x;
                let ne = self.p.eq.len();
                let grad_scale = self.gradient_scale(&x);
                let threshold = -1e-12 * grad_scale;
                let mut drop: Option<(usize, f64)> = None;
                for pos in 0..working.len() {
                    let lam = eqp.lambda[ne + pos];
                    if lam < threshold && drop.is_none_or(|(_, best)| lam < best) {
                        drop = Some((pos, lam));
                    }
                }
                match drop {
                    None => {
                        let sol = self.finish(x, &working, &eqp.lambda, iter);
                        if !(sol.kkt_residual <= tol_kkt) {
                            return Err(QpError::Inaccurate { residual: sol.kkt_residual });
                        }
                        return Ok(sol);
                    }
                    Some((pos, _)) => {
                        last_dropped = Some(working.remove(pos));
                    }
                }
                continue;
            }
            let mut alpha = 1.0;
            let mut blocking: Option<usize> = None;
            for (i, c) in self.p.ineq.iter().enumerate() {
                if working.binary_search(&i).is_ok() {
                    continue;
                }
                let ap = c.dot(&step);
                if ap >= -1e-13 * step_norm {
                    continue;
                }
                let ai = ((c.rhs - c.dot(&x)) / ap).max(0.0);
                if ai < alpha {
                    if Some(i) == last_dropped && ai <= 1e-14 {
                        // Re-blocking the row just released at zero step length
                        // would cycle; it is non-binding along this direction.
                        continue;
                    }
                    alpha = ai;
                    blocking = Some(i);
                }
            }
            if alpha >= 1.0 {
                x = eqp.x;
            } else {
                x.axpy(alpha, &step, 1.0);
            }
            if let Some(i) = blocking {
                let pos = working.binary_search(&i).unwrap_err();
                working.insert(pos, i);
            }
            last_dropped = None;
        }
        Err(QpError::IterationCap { cap })
    }

    fn gradient_scale(&self, x: &DVector<f64>) -> f64 {
        let hx = &self.p.hessian * x;
        (hx.amax() + self.p.linear.amax()).max(f64::MIN_POSITIVE)
    }

    fn finish(&self, x: DVector<f64>, working: &[usize], lambda: &[f64], iterations: usize) -> QpSolution {
        let ne = self.p.eq.len();
        let mut ineq_multipliers = vec![0.0; self.p.ineq.len()];
        for (pos, &row) in working.iter().enumerate() {
            ineq_multipliers[row] = lambda[ne + pos];
        }
        let eq_multipliers = lambda[..ne].to_vec();
        let kkt_residual = kkt_residual(self.p, &x, &ineq_multipliers, &eq_multipliers);
        let objective = self.p.objective(&x);
        QpSolution { x, ineq_multipliers, eq_multipliers, active_set: working.to_vec(), kkt_residual, iterations, objective }
    }

    /// Minimizer of the objective with the equality rows and the given
    /// inequality rows imposed as equalities.
    fn solve_eqp(&self, working: &[usize]) -> QpResult<EqpSolution> {
        let p = self.p;
        let n = self.n;
        let rows: Vec<&Constraint> = p.eq.iter().chain(working.iter().map(|&i| &p.ineq[i])).collect();
        let kinds: Vec<RowKind> = rows
            .iter()
            .map(|c| match c.bound() {
                Some((var, coef)) => RowKind::Bound { var, coef },
                None => RowKind::General,
            })
            .collect();

        let mut fixed: Vec<Option<f64>> = vec![None; n];
        for (c, kind) in rows.iter().zip(&kinds) {
            if let RowKind::Bound { var, coef } = *kind {
                if fixed[var].is_some() {
                    return Err(QpError::DegenerateConstraints);
                }
                fixed[var] = Some(c.rhs / coef);
            }
        }
        let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
        let mut pos_in_free = vec![usize::MAX; n];
        for (k, &i) in free.iter().enumerate() {
            pos_in_free[i] = k;
        }
        let mut x = DVector::from_iterator(n, fixed.iter().map(|v| v.unwrap_or(0.0)));
        let general: Vec<usize> = (0..rows.len()).filter(|&r| matches!(kinds[r], RowKind::General)).collect();
        let nf = free.len();
        let mut lambda = vec![0.0; rows.len()];

        if nf > 0 {
            let h_ff = DMatrix::from_fn(nf, nf, |a, b| p.hessian[(free[a], free[b])]);
            let chol = self.factor(h_ff)?;
            // r = -(g_F + H_F,fixed x_fixed)
            let mut r = DVector::from_fn(nf, |a, _| -p.linear[free[a]]);
            for j in (0..n).filter(|&j| fixed[j].is_some()) {
                let xj = x[j];
                if xj != 0.0 {
                    for (a, &i) in free.iter().enumerate() {
                        r[a] -= p.hessian[(i, j)] * xj;
                    }
                }
            }
            let y0 = chol.solve(&r);
            let mut xf = y0.clone();
            if !general.is_empty() {
                let m = general.len();
                let mut a_gf = DMatrix::zeros(m, nf);
                let mut rhs = DVector::zeros(m);
                for (k, &ri) in general.iter().enumerate() {
                    let c = rows[ri];
                    let mut b = c.rhs;
                    for &(i, v) in &c.coeffs {
                        if fixed[i].is_some() {
                            b -= v * x[i];
                        } else {
                            a_gf[(k, pos_in_free[i])] = v;
                        }
                    }
                    rhs[k] = b;
                }
                let z = chol.solve(&a_gf.transpose());
                let schur = &a_gf * &z;
                let rhs = rhs - &a_gf * &y0;
                let lam_g = match Cholesky::new(schur.clone()) {
                    Some(c) => c.solve(&rhs),
                    None => schur.lu().solve(&rhs).ok_or(QpError::DegenerateConstraints)?,
                };
                if lam_g.iter().any(|v| !v.is_finite()) {
                    return Err(QpError::DegenerateConstraints);
                }
                xf += &z * &lam_g;
                for (k, &ri) in general.iter().enumerate() {
                    lambda[ri] = lam_g[k];
                }
            }
            for (a, &i) in free.iter().enumerate() {
                x[i] = xf[a];
            }
        } else if !general.is_empty() {
            return Err(QpError::DegenerateConstraints);
        }

        // Bound multipliers from the stationarity rows of the fixed variables.
        let grad = &p.hessian * &x + &p.linear;
        for (ri, kind) in kinds.iter().enumerate() {
            if let RowKind::Bound { var, coef } = *kind {
                let mut s = grad[var];
                for &rg in &general {
                    if let Some(&(_, v)) = rows[rg].coeffs.iter().find(|&&(i, _)| i == var) {
                        s -= v * lambda[rg];
                    }
                }
                lambda[ri] = s / coef;
            }
        }
        Ok(EqpSolution { x, lambda })
    }

    fn factor(&self, h: DMatrix<f64>) -> QpResult<Cholesky<f64, nalgebra::Dyn>> {
        if let Some(c) = Cholesky::new(h.clone()) {
            return Ok(c);
        }
        let delta = 1e-14 * self.diag_scale.max(f64::MIN_POSITIVE);
        let mut h = h;
        for i in 0..h.nrows() {
            h[(i, i)] += delta;
        }
        Cholesky::new(h).ok_or(QpError::Indefinite)
    }
}

/// Relative KKT residual: the largest of the stationarity, primal, dual and
/// complementarity violations, each scaled by the natural magnitude of its term.
pub fn kkt_residual(p: &QpProblem, x: &DVector<f64>, lam_ineq: &[f64], lam_eq: &[f64]) -> f64 {
    let hx = &p.hessian * x;
    let mut stat = &hx + &p.linear;
    for (c, &l) in p.ineq.iter().zip(lam_ineq).chain(p.eq.iter().zip(lam_eq)) {
        for &(i, v) in &c.coeffs {
            stat[i] -= v * l;
        }
    }
    let gscale = (hx.amax() + p.linear.amax()).max(f64::MIN_POSITIVE);
    let xscale = scale_of(x, p);
    let stationarity = stat.amax() / gscale;
    let primal = p.violation(x) / xscale;
    let dual = lam_ineq.iter().map(|&l| (-l).max(0.0)).fold(0.0, f64::max) / gscale;
    let comp = p
        .ineq
        .iter()
        .zip(lam_ineq)
        .map(|(c, &l)| (l * (c.dot(x) - c.rhs)).abs())
        .fold(0.0, f64::max)
        / (gscale * xscale);
    stationarity.max(primal).max(dual).max(comp)
}

/// QP with selected variables split as `x_i = x0_i + p⁺ - p⁻`, adding
/// `w_i (p⁺ + p⁻)` to the objective.
#[derive(Debug, Clone)]
pub struct SplitL1 {
    pub problem: QpProblem,
    n: usize,
    base: DVector<f64>,
    /// `(original variable, slot of p⁻)` per split variable.
    pairs: Vec<(usize, usize)>,
    n_ineq: usize,
}

impl SplitL1 {
    /// Original variables from a solution of the split problem.
    pub fn recover(&self, y: &DVector<f64>) -> DVector<f64> {
        let mut x = y.rows(0, self.n).into_owned();
        for &(i, m) in &self.pairs {
            x[i] = self.base[i] + y[i] - y[m];
        }
        x
    }

    /// Multipliers of the original inequality rows.
    pub fn original_multipliers<'s>(&self, sol: &'s QpSolution) -> &'s [f64] {
        &sol.ineq_multipliers[..self.n_ineq]
    }

    /// Total L1 penalty `Σ w_i |x_i - x0_i|` for a point in original variables.
    pub fn penalty(weights: &[(usize, f64)], base: &DVector<f64>, x: &DVector<f64>) -> f64 {
        weights.iter().map(|&(i, w)| w * (x[i] - base[i]).abs()).sum()
    }

    pub fn solve(&self, tol_kkt: f64) -> QpResult<(DVector<f64>, QpSolution)> {
        let sol = solve_qp(&self.problem, tol_kkt)?;
        Ok((self.recover(&sol.x), sol))
    }
}

/// Reformulates `min ½xᵀHx + gᵀx + Σ w_i |x_i - x0_i|` over the constraints of
/// `p` as a smooth QP. The positive part takes the original slot of each split
/// variable, the negative parts are appended in the order of `weights`.
pub fn split_l1(p: &QpProblem, weights: &[(usize, f64)], base: &DVector<f64>) -> QpResult<SplitL1> {
    p.check()?;
    let n = p.dim();
    if base.len() != n {
        return Err(QpError::Dimension(format!("base point has {} entries, expected {n}", base.len())));
    }
    for &(index, weight) in weights {
        if index >= n {
            return Err(QpError::Dimension(format!("L1 weight on variable {index} beyond {n}")));
        }
        if !(weight >= 0.0) || !weight.is_finite() {
            return Err(QpError::NegativeWeight { index, weight });
        }
    }
    let m = weights.len();
    let na = n + m;
    let pairs: Vec<(usize, usize)> = weights.iter().enumerate().map(|(k, &(i, _))| (i, n + k)).collect();
    let mut is_split = vec![false; n];
    for &(i, _) in weights {
        if is_split[i] {
            return Err(QpError::Dimension(format!("variable {i} split twice")));
        }
        is_split[i] = true;
    }
    // x = E y + s, with s = x0 on split slots.
    let shift = DVector::from_fn(n, |i, _| if is_split[i] { base[i] } else { 0.0 });
    let mut e = DMatrix::zeros(n, na);
    for i in 0..n {
        e[(i, i)] = 1.0;
    }
    for &(i, mslot) in &pairs {
        e[(i, mslot)] = -1.0;
    }
    let hessian = e.transpose() * &p.hessian * &e;
    let mut linear = e.transpose() * (&p.hessian * &shift + &p.linear);
    for (&(i, w), &(_, mslot)) in weights.iter().zip(&pairs) {
        linear[i] += w;
        linear[mslot] += w;
    }
    let map_row = |c: &Constraint| {
        let mut coeffs = Vec::with_capacity(c.coeffs.len() + 1);
        let mut rhs = c.rhs;
        for &(i, v) in &c.coeffs {
            coeffs.push((i, v));
            if is_split[i] {
                rhs -= v * base[i];
                let mslot = pairs.iter().find(|&&(j, _)| j == i).map(|&(_, s)| s).unwrap_or(i);
                coeffs.push((mslot, -v));
            }
        }
        Constraint::new(coeffs, rhs)
    };
    let mut ineq: Vec<Constraint> = p.ineq.iter().map(map_row).collect();
    let n_ineq = ineq.len();
    for &(i, mslot) in &pairs {
        ineq.push(Constraint::lower(i, 0.0));
        ineq.push(Constraint::lower(mslot, 0.0));
    }
    let eq: Vec<Constraint> = p.eq.iter().map(map_row).collect();
    let initial_point = p.initial_point.as_ref().map(|x0| {
        let mut y = DVector::zeros(na);
        for i in 0..n {
            y[i] = x0[i];
        }
        for &(i, mslot) in &pairs {
            let d = x0[i] - base[i];
            y[i] = d.max(0.0);
            y[mslot] = (-d).max(0.0);
        }
        y
    });
    let warm_start = p.warm_start.as_ref().map(|w| {
        let mut w = w.clone();
        w.extend(n_ineq..n_ineq + 2 * m);
        w
    });
    Ok(SplitL1 {
        problem: QpProblem { hessian, linear, ineq, eq, warm_start, initial_point },
        n,
        base: base.clone(),
        pairs,
        n_ineq,
    })
}

/// Brute-force reference for small problems: minimizer over all subsets of inequality rows imposed as equalities,
/// keeping only feasible candidates with non-negative multipliers.
pub fn exhaustive_minimizer(p: &QpProblem) -> Option<DVector<f64>> {
    let n = p.dim();
    let m = p.ineq.len();
    let mut best: Option<(f64, DVector<f64>)> = None;
    for mask in 0u32..(1 << m) {
        let active: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
        let k = active.len() + p.eq.len();
        let dim = n + k;
        let mut kkt = DMatrix::zeros(dim, dim);
        let mut rhs = DVector::zeros(dim);
        kkt.view_mut((0, 0), (n, n)).copy_from(&p.hessian);
        for i in 0..n {
            rhs[i] = -p.linear[i];
        }
        let rows: Vec<&Constraint> = p.eq.iter().chain(active.iter().map(|&i| &p.ineq[i])).collect();
        for (r, c) in rows.iter().enumerate() {
            for &(i, v) in &c.coeffs {
                kkt[(n + r, i)] = v;
                kkt[(i, n + r)] = v;
            }
            rhs[n + r] = c.rhs;
        }
        let Some(sol) = kkt.clone().lu().solve(&rhs) else { continue };
        if (&kkt * &sol - &rhs).amax() > 1e-9 * (1.0 + rhs.amax()) {
            continue;
        }
        let x = sol.rows(0, n).into_owned();
        if p.violation(&x) > 1e-10 {
            continue;
        }
        // KKT sign convention: H x + g + A^T mu = rhs with mu = -lambda.
        if (0..active.len()).any(|a| -sol[n + p.eq.len() + a] < -1e-10) {
            continue;
        }
        let f = p.objective(&x);
        if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((f, x));
        }
    }
    best.map(|(_, x)| x)
}
