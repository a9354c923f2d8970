//! Linear programs over exact rationals or floats.
//!
//! [`solve`] maximizes a linear objective subject to `≤`, `=` and `≥` rows
//! and optional per-variable bounds. Optimal outcomes carry a primal point,
//! row duals and reduced costs whose dual objective equals the primal one;
//! infeasible outcomes carry a Farkas combination of the rows.
//!
//! Two reductions to the standard-form engine are available. The primal
//! route substitutes bounded variables and adds slacks. The dual route
//! solves the dual problem, which is much smaller when there are many more
//! rows than variables.

mod tableau;

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use tableau::{solve_standard, EngineOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<T> {
    pub row: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bounds<T> {
    pub lower: Option<T>,
    pub upper: Option<T>,
}

impl<T> Bounds<T> {
    pub fn free() -> Self {
        Bounds { lower: None, upper: None }
    }
}

impl<T: Scalar> Bounds<T> {
    pub fn nonnegative() -> Self {
        Bounds { lower: Some(T::zero()), upper: None }
    }

    pub fn between(lower: T, upper: T) -> Self {
        Bounds { lower: Some(lower), upper: Some(upper) }
    }

    fn contains(&self, v: &T) -> bool {
        self.lower.as_ref().is_none_or(|l| v >= l) && self.upper.as_ref().is_none_or(|u| v <= u)
    }
}

/// `maximize objective·x` subject to the constraints and bounds. Variables
/// are free unless bounded.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<T> {
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
    pub bounds: Vec<Bounds<T>>,
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(objective: Vec<T>) -> Self {
        let bounds = (0..objective.len()).map(|_| Bounds::free()).collect();
        LinearProgram { objective, constraints: Vec::new(), bounds }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, row: Vec<T>, relation: Relation, rhs: T) -> &mut Self {
        self.constraints.push(Constraint { row, relation, rhs });
        self
    }

    pub fn bound(&mut self, var: usize, bounds: Bounds<T>) -> &mut Self {
        self.bounds[var] = bounds;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::MalformedLp(format!("{} bounds for {n} variables", self.bounds.len())));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.row.len() != n {
                return Err(Error::MalformedLp(format!("row {i} has {} entries, expected {n}", c.row.len())));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if let (Some(l), Some(u)) = (&b.lower, &b.upper) {
                if l > u {
                    return Err(Error::MalformedLp(format!("variable {j} has lower bound {l} above upper bound {u}")));
                }
            }
        }
        Ok(())
    }

    /// Row activity `row·x`.
    fn activity(row: &[T], x: &[T]) -> T {
        row.iter().zip(x).fold(T::zero(), |s, (a, v)| s + a.clone() * v.clone())
    }

    /// Whether `x` satisfies every row and bound. Float programs allow
    /// `rel` slack scaled by the magnitudes involved.
    pub fn is_feasible(&self, x: &[T], rel: f64) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let rows_ok = self.constraints.iter().all(|c| {
            let lhs = Self::activity(&c.row, x);
            let tol = T::tie_tolerance(&lhs, &c.rhs, rel);
            match c.relation {
                Relation::Le => lhs <= c.rhs.clone() + tol,
                Relation::Ge => lhs >= c.rhs.clone() - tol,
                Relation::Eq => (lhs - c.rhs.clone()).abs() <= tol,
            }
        });
        rows_ok && self.bounds.iter().zip(x).all(|(b, v)| {
            let tol = T::tie_tolerance(v, &T::zero(), rel);
            b.contains(&(v.clone() + tol.clone())) || b.contains(&(v.clone() - tol))
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    /// One multiplier per constraint: `≥ 0` on `≤` rows, `≤ 0` on `≥` rows.
    pub duals: Vec<T>,
    /// `objective − Σ duals·rows`, per variable. Positive entries sit at an
    /// upper bound and negative ones at a lower bound.
    pub reduced_costs: Vec<T>,
    /// `Σ duals·rhs` plus the bound terms of the reduced costs.
    pub dual_objective: T,
}

/// Row multipliers proving infeasibility: with `g = Σ m_i·row_i` and
/// `β = Σ m_i·rhs_i`, every point of the box has `g·x > β`, while every
/// point satisfying the rows has `g·x ≤ β`. Multipliers are `≥ 0` on `≤`
/// rows, `≤ 0` on `≥` rows and free on `=` rows.
#[derive(Clone, Debug, PartialEq)]
pub struct FarkasCertificate<T> {
    pub multipliers: Vec<T>,
}

impl<T: Scalar> FarkasCertificate<T> {
    pub fn verify(&self, lp: &LinearProgram<T>) -> bool {
        if self.multipliers.len() != lp.constraints.len() {
            return false;
        }
        let n = lp.num_vars();
        let mut g = vec![T::zero(); n];
        let mut beta = T::zero();
        for (m, c) in self.multipliers.iter().zip(&lp.constraints) {
            let sign_ok = match c.relation {
                Relation::Le => !m.is_neg(),
                Relation::Ge => !m.is_pos(),
                Relation::Eq => true,
            };
            if !sign_ok {
                return false;
            }
            if m.is_zero() {
                continue;
            }
            for (gj, a) in g.iter_mut().zip(&c.row) {
                *gj = gj.clone() + m.clone() * a.clone();
            }
            beta = beta + m.clone() * c.rhs.clone();
        }
        let mut min = T::zero();
        for (gj, b) in g.iter().zip(&lp.bounds) {
            let bound = if gj.is_pos() {
                &b.lower
            } else if gj.is_neg() {
                &b.upper
            } else {
                continue;
            };
            match bound {
                Some(v) => min = min + gj.clone() * v.clone(),
                None => return false,
            }
        }
        (min - beta).is_pos()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal(LpSolution<T>),
    Infeasible(FarkasCertificate<T>),
    Unbounded,
}

impl<T> LpOutcome<T> {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal(_) => LpStatus::Optimal,
            LpOutcome::Infeasible(_) => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn optimal(&self) -> Option<&LpSolution<T>> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Route {
    /// Whichever reduction gives the smaller tableau.
    #[default]
    Auto,
    Primal,
    Dual,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub route: Route,
    /// Prints every tableau to standard error as tab-separated values.
    pub dump_tableaus: bool,
}

pub fn solve<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpOutcome<T>> {
    solve_with(lp, &SolveOptions::default())
}

pub fn solve_with<T: Scalar>(lp: &LinearProgram<T>, opts: &SolveOptions) -> Result<LpOutcome<T>> {
    lp.validate()?;
    let route = match opts.route {
        Route::Auto => {
            let (pr, pc) = primal_shape(lp);
            let (dr, dc) = dual_shape(lp);
            if dr * dc < pr * pc {
                Route::Dual
            } else {
                Route::Primal
            }
        }
        r => r,
    };
    let out = match route {
        Route::Dual => solve_dual_route(lp, opts.dump_tableaus),
        _ => solve_primal_route(lp, opts.dump_tableaus),
    };
    Ok(match out {
        Routed::Optimal { x, duals } => LpOutcome::Optimal(finish(lp, x, duals)),
        Routed::Infeasible(multipliers) => LpOutcome::Infeasible(FarkasCertificate { multipliers }),
        Routed::Unbounded => LpOutcome::Unbounded,
    })
}

enum Routed<T> {
    Optimal { x: Vec<T>, duals: Vec<T> },
    Infeasible(Vec<T>),
    Unbounded,
}

fn finish<T: Scalar>(lp: &LinearProgram<T>, x: Vec<T>, duals: Vec<T>) -> LpSolution<T> {
    let objective = LinearProgram::activity(&lp.objective, &x);
    let mut reduced_costs = lp.objective.clone();
    let mut dual_objective = T::zero();
    for (y, c) in duals.iter().zip(&lp.constraints) {
        if y.is_zero() {
            continue;
        }
        for (r, a) in reduced_costs.iter_mut().zip(&c.row) {
            *r = r.clone() - y.clone() * a.clone();
        }
        dual_objective = dual_objective + y.clone() * c.rhs.clone();
    }
    for (r, b) in reduced_costs.iter().zip(&lp.bounds) {
        let bound = if r.is_positive() {
            &b.upper
        } else if r.is_negative() {
            &b.lower
        } else {
            continue;
        };
        if let Some(v) = bound {
            dual_objective = dual_objective + r.clone() * v.clone();
        }
    }
    LpSolution { x, objective, duals, reduced_costs, dual_objective }
}

/// How a user variable maps onto nonnegative engine columns.
enum Substitution<T> {
    /// `x = shift + x'`.
    Shifted(T),
    /// `x = upper − x'`.
    Mirrored(T),
    /// `x = x⁺ − x⁻`.
    Split,
}

fn substitutions<T: Scalar>(lp: &LinearProgram<T>) -> Vec<Substitution<T>> {
    lp.bounds
        .iter()
        .map(|b| match (&b.lower, &b.upper) {
            (Some(l), _) => Substitution::Shifted(l.clone()),
            (None, Some(u)) => Substitution::Mirrored(u.clone()),
            (None, None) => Substitution::Split,
        })
        .collect()
}

fn primal_shape<T: Scalar>(lp: &LinearProgram<T>) -> (usize, usize) {
    let boxed = lp.bounds.iter().filter(|b| b.lower.is_some() && b.upper.is_some()).count();
    let free = lp.bounds.iter().filter(|b| b.lower.is_none() && b.upper.is_none()).count();
    let ineq = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    let rows = lp.constraints.len() + boxed;
    (rows, lp.num_vars() + free + ineq + 2 * boxed + rows)
}

fn dual_shape<T: Scalar>(lp: &LinearProgram<T>) -> (usize, usize) {
    let eq = lp.constraints.iter().filter(|c| c.relation == Relation::Eq).count();
    let bound_rows: usize =
        lp.bounds.iter().map(|b| b.lower.is_some() as usize + b.upper.is_some() as usize).sum();
    let n = lp.num_vars();
    (n, lp.constraints.len() + eq + bound_rows + n)
}

fn solve_primal_route<T: Scalar>(lp: &LinearProgram<T>, dump: bool) -> Routed<T> {
    let subs = substitutions(lp);
    // Engine columns for each user variable, with their signs.
    let mut cols: Vec<Vec<(usize, T)>> = Vec::new();
    let mut next = 0;
    for s in &subs {
        match s {
            Substitution::Shifted(_) => {
                cols.push(vec![(next, T::one())]);
                next += 1;
            }
            Substitution::Mirrored(_) => {
                cols.push(vec![(next, -T::one())]);
                next += 1;
            }
            Substitution::Split => {
                cols.push(vec![(next, T::one()), (next + 1, -T::one())]);
                next += 2;
            }
        }
    }
    let n_struct = next;
    let shift: Vec<T> = subs
        .iter()
        .map(|s| match s {
            Substitution::Shifted(v) | Substitution::Mirrored(v) => v.clone(),
            Substitution::Split => T::zero(),
        })
        .collect();

    let mut rows: Vec<(Vec<T>, Relation, T)> = Vec::new();
    for c in &lp.constraints {
        let mut row = vec![T::zero(); n_struct];
        for (j, a) in c.row.iter().enumerate() {
            for (k, sign) in &cols[j] {
                row[*k] = a.clone() * sign.clone();
            }
        }
        let rhs = c.rhs.clone() - LinearProgram::activity(&c.row, &shift);
        rows.push((row, c.relation, rhs));
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        if let (Some(l), Some(u)) = (&b.lower, &b.upper) {
            let mut row = vec![T::zero(); n_struct];
            row[cols[j][0].0] = T::one();
            rows.push((row, Relation::Le, u.clone() - l.clone()));
        }
    }

    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let width = n_struct + n_slack;
    let mut a = Vec::with_capacity(rows.len());
    let mut b = Vec::with_capacity(rows.len());
    let mut slack = n_struct;
    for (mut row, rel, rhs) in rows {
        row.resize(width, T::zero());
        match rel {
            Relation::Le => {
                row[slack] = T::one();
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -T::one();
                slack += 1;
            }
            Relation::Eq => {}
        }
        a.push(row);
        b.push(rhs);
    }
    let mut c = vec![T::zero(); width];
    for (j, cj) in lp.objective.iter().enumerate() {
        for (k, sign) in &cols[j] {
            c[*k] = cj.clone() * sign.clone();
        }
    }

    let m_user = lp.constraints.len();
    match solve_standard(&a, &b, &c, dump) {
        EngineOutcome::Optimal { x: xs, duals, .. } => {
            let x = (0..lp.num_vars())
                .map(|j| cols[j].iter().fold(shift[j].clone(), |acc, (k, sign)| acc + sign.clone() * xs[*k].clone()))
                .collect();
            Routed::Optimal { x, duals: duals[..m_user].to_vec() }
        }
        EngineOutcome::Infeasible { farkas } => Routed::Infeasible(farkas[..m_user].to_vec()),
        EngineOutcome::Unbounded { .. } => Routed::Unbounded,
    }
}

/// Which user row (and with what sign) each row of `Gx ≤ h` came from.
enum Origin {
    Row(usize, bool),
    Bound,
}

fn solve_dual_route<T: Scalar>(lp: &LinearProgram<T>, dump: bool) -> Routed<T> {
    let n = lp.num_vars();
    // Columns of the dual tableau are the rows of G; its rows are variables.
    let mut g_rows: Vec<(Vec<T>, T, Origin)> = Vec::new();
    let negated = |row: &[T]| row.iter().map(|v| -v.clone()).collect::<Vec<T>>();
    for (i, c) in lp.constraints.iter().enumerate() {
        if matches!(c.relation, Relation::Le | Relation::Eq) {
            g_rows.push((c.row.clone(), c.rhs.clone(), Origin::Row(i, false)));
        }
        if matches!(c.relation, Relation::Ge | Relation::Eq) {
            g_rows.push((negated(&c.row), -c.rhs.clone(), Origin::Row(i, true)));
        }
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        if let Some(u) = &b.upper {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            g_rows.push((e, u.clone(), Origin::Bound));
        }
        if let Some(l) = &b.lower {
            let mut e = vec![T::zero(); n];
            e[j] = -T::one();
            g_rows.push((e, -l.clone(), Origin::Bound));
        }
    }
    let a: Vec<Vec<T>> = (0..n).map(|j| g_rows.iter().map(|r| r.0[j].clone()).collect()).collect();
    let cost: Vec<T> = g_rows.iter().map(|r| -r.1.clone()).collect();

    let multipliers = |y: &[T]| {
        let mut m = vec![T::zero(); lp.constraints.len()];
        for (v, r) in y.iter().zip(&g_rows) {
            if let Origin::Row(i, neg) = r.2 {
                m[i] = if neg { m[i].clone() - v.clone() } else { m[i].clone() + v.clone() };
            }
        }
        m
    };

    match solve_standard(&a, &lp.objective, &cost, dump) {
        EngineOutcome::Optimal { x: y, duals: z, .. } => {
            Routed::Optimal { x: z.into_iter().map(|v| -v).collect(), duals: multipliers(&y) }
        }
        EngineOutcome::Unbounded { ray } => Routed::Infeasible(multipliers(&ray)),
        EngineOutcome::Infeasible { .. } => {
            // The dual is infeasible, so the primal is infeasible or
            // unbounded. A ray of the homogeneous dual separates the cases.
            let zero = vec![T::zero(); n];
            match solve_standard(&a, &zero, &cost, dump) {
                EngineOutcome::Unbounded { ray } => Routed::Infeasible(multipliers(&ray)),
                _ => Routed::Unbounded,
            }
        }
    }
}
