//! Dense bounded-variable revised simplex.
//!
//! Solves `min c.x  s.t.  rows, 0 <= x_j <= upper_j` with two phases. The
//! basis inverse is kept explicitly, updated by elementary row operations
//! after every pivot and refactorized periodically. Pricing is Dantzig's
//! rule; after `10 * rows` consecutive degenerate pivots it switches to
//! Bland's smallest-index rule until a pivot makes progress again.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const FEAS_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Eq,
    Ge,
    Le,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub kind: RowKind,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub cost: Vec<f64>,
    /// Upper bound per variable; `f64::INFINITY` for none. Lower bounds are 0.
    pub upper: Vec<f64>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(cost: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(cost.len(), upper.len());
        Self {
            cost,
            upper,
            rows: Vec::new(),
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, kind: RowKind, rhs: f64) {
        self.rows.push(Row { coeffs, kind, rhs });
    }

    pub fn solve(&self) -> Result<LpSolution> {
        Simplex::build(self).run(self.cost.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic,
    AtLower,
    AtUpper,
}

struct Simplex {
    m: usize,
    /// Column-major constraint matrix over structural, slack and artificial
    /// columns.
    a: Vec<f64>,
    b: Vec<f64>,
    cost: Vec<f64>,
    upper: Vec<f64>,
    n_total: usize,
    first_artificial: usize,
    status: Vec<Status>,
    basis: Vec<usize>,
    /// Row-major `m x m` basis inverse.
    binv: Vec<f64>,
    x: Vec<f64>,
    pivots: usize,
}

impl Simplex {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n_struct = lp.cost.len();
        let n_slack = lp.rows.iter().filter(|r| r.kind != RowKind::Eq).count();
        let first_artificial = n_struct + n_slack;
        let n_total = first_artificial + m;

        let mut a = vec![0.0; n_total * m];
        let mut cost = vec![0.0; n_total];
        let mut upper = vec![f64::INFINITY; n_total];
        cost[..n_struct].copy_from_slice(&lp.cost);
        upper[..n_struct].copy_from_slice(&lp.upper);
        let mut b = Vec::with_capacity(m);
        let mut slack = n_struct;
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, v) in &row.coeffs {
                a[j * m + i] += v;
            }
            match row.kind {
                RowKind::Eq => {}
                RowKind::Ge => {
                    a[slack * m + i] = -1.0;
                    slack += 1;
                }
                RowKind::Le => {
                    a[slack * m + i] = 1.0;
                    slack += 1;
                }
            }
            b.push(row.rhs);
        }
        // Artificial i carries sign(b_i) so it starts basic and nonnegative.
        let mut binv = vec![0.0; m * m];
        let mut x = vec![0.0; n_total];
        let mut basis = Vec::with_capacity(m);
        let mut status = vec![Status::AtLower; n_total];
        for i in 0..m {
            let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
            let col = first_artificial + i;
            a[col * m + i] = sign;
            binv[i * m + i] = sign;
            x[col] = b[i].abs();
            basis.push(col);
            status[col] = Status::Basic;
        }
        Self {
            m,
            a,
            b,
            cost,
            upper,
            n_total,
            first_artificial,
            status,
            basis,
            binv,
            x,
            pivots: 0,
        }
    }

    fn column(&self, j: usize) -> &[f64] {
        &self.a[j * self.m..(j + 1) * self.m]
    }

    fn run(mut self, n_struct: usize) -> Result<LpSolution> {
        let limit = 50_000 + 50 * (self.m + self.n_total);

        // Phase one: minimize the sum of artificials.
        let phase_one: Vec<f64> = (0..self.n_total)
            .map(|j| if j >= self.first_artificial { 1.0 } else { 0.0 })
            .collect();
        self.optimize(&phase_one, limit)?;
        let residual: f64 = (self.first_artificial..self.n_total)
            .map(|j| self.x[j])
            .sum();
        let scale = 1.0 + self.b.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if residual > 1e-7 * scale {
            return Err(Error::LpInfeasible { residual });
        }
        // Artificials are pinned to zero for phase two; basic ones with
        // value zero (redundant rows) simply stay in the basis.
        for j in self.first_artificial..self.n_total {
            self.upper[j] = 0.0;
            if self.status[j] != Status::Basic {
                self.status[j] = Status::AtLower;
                self.x[j] = 0.0;
            }
        }
        let phase_two = self.cost.clone();
        self.optimize(&phase_two, limit)?;

        let x: Vec<f64> = (0..n_struct)
            .map(|j| self.x[j].clamp(0.0, self.upper[j]))
            .collect();
        let objective = x.iter().zip(&self.cost).map(|(v, c)| v * c).sum();
        Ok(LpSolution {
            x,
            objective,
            pivots: self.pivots,
        })
    }

    fn optimize(&mut self, cost: &[f64], limit: usize) -> Result<()> {
        let m = self.m;
        let mut degenerate_run = 0usize;
        let mut since_refactor = 0usize;
        let mut y = vec![0.0; m];
        let mut alpha = vec![0.0; m];
        loop {
            if self.pivots >= limit {
                return Err(Error::LpIterationLimit { limit });
            }
            let bland = degenerate_run > 10 * m.max(1);

            // Duals y = c_B^T B^{-1}.
            for (k, yk) in y.iter_mut().enumerate() {
                *yk = (0..m).map(|i| cost[self.basis[i]] * self.binv[i * m + k]).sum();
            }

            // Pricing.
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..self.n_total {
                let st = self.status[j];
                if st == Status::Basic || self.upper[j] <= 0.0 {
                    continue;
                }
                let col = self.column(j);
                let d = cost[j] - col.iter().zip(&y).map(|(a, y)| a * y).sum::<f64>();
                let eligible = match st {
                    Status::AtLower => d < -OPT_TOL,
                    Status::AtUpper => d > OPT_TOL,
                    Status::Basic => false,
                };
                if !eligible {
                    continue;
                }
                if bland {
                    entering = Some((j, d));
                    break;
                }
                if entering.map_or(true, |(_, best)| d.abs() > best.abs()) {
                    entering = Some((j, d));
                }
            }
            let Some((q, _)) = entering else {
                return Ok(());
            };

            // alpha = B^{-1} A_q
            for (i, ai) in alpha.iter_mut().enumerate() {
                let row = &self.binv[i * m..(i + 1) * m];
                *ai = row.iter().zip(self.column(q)).map(|(b, a)| b * a).sum();
            }
            let dir = if self.status[q] == Status::AtLower {
                1.0
            } else {
                -1.0
            };

            // Ratio test (two-pass: bound with tolerance, then largest pivot).
            let limit_for = |i: usize, tol: f64, x: &[f64], upper: &[f64]| -> Option<f64> {
                let delta = dir * alpha[i];
                let bv = self.basis[i];
                if delta > PIVOT_TOL {
                    Some(((x[bv] + tol) / delta).max(0.0))
                } else if delta < -PIVOT_TOL && upper[bv].is_finite() {
                    Some(((upper[bv] - x[bv] + tol) / -delta).max(0.0))
                } else {
                    None
                }
            };
            let mut theta_max = f64::INFINITY;
            for i in 0..m {
                if let Some(t) = limit_for(i, FEAS_TOL, &self.x, &self.upper) {
                    theta_max = theta_max.min(t);
                }
            }
            let flip = self.upper[q];
            let mut leave: Option<usize> = None;
            if flip > theta_max || !flip.is_finite() {
                if !theta_max.is_finite() {
                    return Err(Error::LpUnbounded { var: q });
                }
                let mut best_piv = 0.0;
                for i in 0..m {
                    if let Some(t) = limit_for(i, 0.0, &self.x, &self.upper) {
                        if t <= theta_max {
                            let piv = alpha[i].abs();
                            let better = if bland {
                                leave.map_or(true, |l: usize| self.basis[i] < self.basis[l])
                            } else {
                                piv > best_piv
                            };
                            if better {
                                best_piv = piv;
                                leave = Some(i);
                            }
                        }
                    }
                }
            }

            self.pivots += 1;
            match leave {
                None => {
                    // Bound flip of the entering variable.
                    let theta = flip;
                    for i in 0..m {
                        let bv = self.basis[i];
                        self.x[bv] -= dir * theta * alpha[i];
                    }
                    self.x[q] = if dir > 0.0 { self.upper[q] } else { 0.0 };
                    self.status[q] = if dir > 0.0 {
                        Status::AtUpper
                    } else {
                        Status::AtLower
                    };
                    degenerate_run = 0;
                }
                Some(r) => {
                    let delta_r = dir * alpha[r];
                    let bv = self.basis[r];
                    let theta = if delta_r > 0.0 {
                        self.x[bv] / delta_r
                    } else {
                        (self.upper[bv] - self.x[bv]) / -delta_r
                    }
                    .max(0.0);
                    for i in 0..m {
                        let b = self.basis[i];
                        self.x[b] -= dir * theta * alpha[i];
                    }
                    self.x[q] += dir * theta;
                    if delta_r > 0.0 {
                        self.x[bv] = 0.0;
                        self.status[bv] = Status::AtLower;
                    } else {
                        self.x[bv] = self.upper[bv];
                        self.status[bv] = Status::AtUpper;
                    }
                    self.status[q] = Status::Basic;
                    self.basis[r] = q;

                    let piv = alpha[r];
                    for k in 0..m {
                        self.binv[r * m + k] /= piv;
                    }
                    for i in 0..m {
                        if i != r && alpha[i] != 0.0 {
                            let f = alpha[i];
                            for k in 0..m {
                                self.binv[i * m + k] -= f * self.binv[r * m + k];
                            }
                        }
                    }
                    if theta < 1e-12 {
                        degenerate_run += 1;
                    } else {
                        degenerate_run = 0;
                    }
                    since_refactor += 1;
                    if since_refactor >= REFACTOR_EVERY {
                        self.refactor()?;
                        since_refactor = 0;
                    }
                }
            }
        }
    }

    /// Rebuilds `B^{-1}` from the basis columns and recomputes basic values.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let bmat = DMatrix::from_fn(m, m, |i, k| self.a[self.basis[k] * m + i]);
        let lu = bmat.clone().lu();
        let inv = lu.try_inverse().ok_or_else(|| Error::LpSingular {
            condition: f64::INFINITY,
        })?;
        let norm1 = |mat: &DMatrix<f64>| {
            (0..mat.ncols())
                .map(|c| mat.column(c).iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max)
        };
        let condition = norm1(&bmat) * norm1(&inv);
        if !condition.is_finite() || condition > 1e13 {
            return Err(Error::LpSingular { condition });
        }
        for i in 0..m {
            for k in 0..m {
                self.binv[i * m + k] = inv[(i, k)];
            }
        }
        let mut rhs = self.b.clone();
        for j in 0..self.n_total {
            if self.status[j] != Status::Basic && self.x[j] != 0.0 {
                let xj = self.x[j];
                for (r, a) in rhs.iter_mut().zip(self.column(j)) {
                    *r -= a * xj;
                }
            }
        }
        for i in 0..m {
            let v: f64 = (0..m).map(|k| self.binv[i * m + k] * rhs[k]).sum();
            self.x[self.basis[i]] = v;
        }
        Ok(())
    }
}
