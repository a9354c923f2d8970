//! Dense two-phase primal simplex on `max cᵀx, Ax = b, x ≥ 0`.
//!
//! Pivoting follows Bland's rule. Rows with a negative right-hand side are
//! negated up front; columns that already form a unit vector in some row
//! seed the initial basis and artificials cover the remaining rows.

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum EngineOutcome<T> {
    Optimal {
        x: Vec<T>,
        /// `y` with `c − Aᵀy ≤ 0` and `bᵀy` equal to the optimum.
        duals: Vec<T>,
        objective: T,
    },
    /// `y` with `Aᵀy ≥ 0` and `bᵀy < 0`.
    Infeasible { farkas: Vec<T> },
    /// `r ≥ 0` with `Ar = 0` and `cᵀr > 0`.
    Unbounded { ray: Vec<T> },
}

struct Tableau<T> {
    /// `m` rows of `ncols` coefficients followed by the right-hand side.
    rows: Vec<Vec<T>>,
    /// Reduced costs followed by minus the objective value.
    obj: Vec<T>,
    basis: Vec<usize>,
    /// Column that was basic in each row at the start.
    init: Vec<usize>,
    ncols: usize,
    dump: bool,
    phase: u8,
    pivots: usize,
}

impl<T: Scalar> Tableau<T> {
    fn rhs(&self, i: usize) -> &T {
        &self.rows[i][self.ncols]
    }

    fn load_costs(&mut self, costs: &[T]) {
        let mut obj: Vec<T> = costs.to_vec();
        obj.push(T::zero());
        for (i, &bi) in self.basis.iter().enumerate() {
            let cb = &costs[bi];
            if cb.is_zero() {
                continue;
            }
            for (o, t) in obj.iter_mut().zip(&self.rows[i]) {
                if !t.is_zero() {
                    *o = o.clone() - cb.clone() * t.clone();
                }
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let p = self.rows[r][s].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() / p.clone();
                }
            }
        }
        self.rows[r][s] = T::one();
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row, &pivot_row, s);
            }
        }
        eliminate(&mut self.obj, &pivot_row, s);
        self.rows[r] = pivot_row;
        self.basis[r] = s;
        self.pivots += 1;
        if self.dump {
            self.dump_tsv();
        }
    }

    /// Bland's rule: lowest-index improving column, then the lowest basis
    /// index among tied ratios.
    fn entering(&self, allowed: usize) -> Option<usize> {
        (0..allowed).find(|&j| self.obj[j].is_pos())
    }

    fn leaving(&self, s: usize) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if !row[s].is_pos() {
                continue;
            }
            let ratio = self.rhs(i).clone() / row[s].clone();
            let better = match &best {
                None => true,
                Some((b, r)) => ratio < *r || (ratio == *r && self.basis[i] < self.basis[*b]),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Runs pivots to optimality over the first `allowed` columns. Returns
    /// the unbounded column if there is one.
    fn optimize(&mut self, allowed: usize) -> Option<usize> {
        while let Some(s) = self.entering(allowed) {
            match self.leaving(s) {
                Some(r) => self.pivot(r, s),
                None => return Some(s),
            }
        }
        None
    }

    /// `y_k = c_{init(k)} − d_{init(k)}`, since the initial basic column of
    /// row `k` is the unit vector `e_k`.
    fn duals(&self, costs: &[T]) -> Vec<T> {
        self.init.iter().map(|&j| costs[j].clone() - self.obj[j].clone()).collect()
    }

    fn primal(&self, n: usize) -> Vec<T> {
        let mut x = vec![T::zero(); n];
        for (i, &bi) in self.basis.iter().enumerate() {
            if bi < n {
                x[bi] = self.rhs(i).clone();
            }
        }
        x
    }

    fn dump_tsv(&self) {
        eprintln!("# phase {} pivot {}", self.phase, self.pivots);
        let head: Vec<String> = (0..self.ncols).map(|j| format!("x{j}")).collect();
        eprintln!("basis\t{}\trhs", head.join("\t"));
        for (i, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            eprintln!("x{}\t{}", self.basis[i], cells.join("\t"));
        }
        let cells: Vec<String> = self.obj.iter().map(ToString::to_string).collect();
        eprintln!("obj\t{}", cells.join("\t"));
    }
}

fn eliminate<T: Scalar>(row: &mut [T], pivot_row: &[T], s: usize) {
    let f = row[s].clone();
    if f.is_zero() {
        return;
    }
    for (v, p) in row.iter_mut().zip(pivot_row) {
        if !p.is_zero() {
            *v = v.clone() - f.clone() * p.clone();
        }
    }
    row[s] = T::zero();
}

/// Solves `max cᵀx` subject to `Ax = b`, `x ≥ 0`. Rows of `a` must all have
/// `c.len()` entries.
pub(crate) fn solve_standard<T: Scalar>(a: &[Vec<T>], b: &[T], c: &[T], dump: bool) -> EngineOutcome<T> {
    let m = a.len();
    let n = c.len();
    let flip: Vec<bool> = b.iter().map(|v| v.is_negative()).collect();
    let mut rows: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .zip(&flip)
        .map(|((row, bi), &f)| {
            let mut r: Vec<T> = row.iter().chain(std::iter::once(bi)).cloned().collect();
            if f {
                r.iter_mut().for_each(|v| *v = -v.clone());
            }
            r
        })
        .collect();

    // Reuse existing unit columns as the starting basis.
    let mut init: Vec<Option<usize>> = vec![None; m];
    for j in 0..n {
        let mut hit = None;
        let mut unit = true;
        for (i, row) in rows.iter().enumerate() {
            if row[j].is_zero() {
                continue;
            }
            if row[j].is_one() && hit.is_none() {
                hit = Some(i);
            } else {
                unit = false;
                break;
            }
        }
        if let (true, Some(i)) = (unit, hit) {
            if init[i].is_none() {
                init[i] = Some(j);
            }
        }
    }
    let missing: Vec<usize> = (0..m).filter(|&i| init[i].is_none()).collect();
    let ncols = n + missing.len();
    for row in rows.iter_mut() {
        let rhs = row.pop().expect("row has a right-hand side");
        row.resize(ncols, T::zero());
        row.push(rhs);
    }
    for (k, &i) in missing.iter().enumerate() {
        rows[i][n + k] = T::one();
        init[i] = Some(n + k);
    }
    let init: Vec<usize> = init.into_iter().map(|j| j.expect("every row has a basic column")).collect();

    let mut t = Tableau { rows, obj: Vec::new(), basis: init.clone(), init, ncols, dump, phase: 1, pivots: 0 };

    if !missing.is_empty() {
        let mut phase1 = vec![T::zero(); ncols];
        phase1[n..].iter_mut().for_each(|v| *v = -T::one());
        t.load_costs(&phase1);
        if t.dump {
            t.dump_tsv();
        }
        t.optimize(ncols);
        if (-t.obj[ncols].clone()).is_neg() {
            let farkas = unflip(t.duals(&phase1), &flip);
            return EngineOutcome::Infeasible { farkas };
        }
        // Drive zero-valued artificials out of the basis. Rows where no
        // structural column is available are redundant and keep theirs.
        for i in 0..m {
            if t.basis[i] < n {
                continue;
            }
            let col = (0..n)
                .filter(|&j| !t.rows[i][j].is_negligible())
                .max_by(|&p, &q| {
                    let (a, b) = (t.rows[i][p].abs(), t.rows[i][q].abs());
                    a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal).then(q.cmp(&p))
                });
            if let Some(j) = col {
                t.pivot(i, j);
            }
        }
    }

    t.phase = 2;
    let mut costs = c.to_vec();
    costs.resize(ncols, T::zero());
    t.load_costs(&costs);
    if t.dump {
        t.dump_tsv();
    }
    if let Some(s) = t.optimize(n) {
        let mut ray = vec![T::zero(); n];
        ray[s] = T::one();
        for (i, &bi) in t.basis.iter().enumerate() {
            if bi < n {
                ray[bi] = -t.rows[i][s].clone();
            }
        }
        return EngineOutcome::Unbounded { ray };
    }
    EngineOutcome::Optimal {
        x: t.primal(n),
        duals: unflip(t.duals(&costs), &flip),
        objective: -t.obj[ncols].clone(),
    }
}

fn unflip<T: Scalar>(y: Vec<T>, flip: &[bool]) -> Vec<T> {
    y.into_iter().zip(flip).map(|(v, &f)| if f { -v } else { v }).collect()
}
