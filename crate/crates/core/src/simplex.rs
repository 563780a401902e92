//! Dense tableau simplex over a generic ordered field.
//!
//! Two instantiations matter: [`Rational`] for certificates and `f64` (with
//! an absolute tolerance) for guidance. The tableau keeps the columns of the
//! initial identity basis for its whole lifetime, so `B^-1` is always at
//! hand; that gives row duals and lets callers append columns and
//! re-optimise from the current basis (cutting planes on the dual side,
//! column generation on the primal side).
//!
//! Entering variables follow Dantzig's rule until a run of degenerate pivots
//! is observed, after which Bland's rule is used until the objective moves.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_traits::{One, Signed, Zero};

use crate::rational::{from_f64, to_f64, Rational};

pub trait Scalar: Clone + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool;
    /// Total order used for ratio tests (no tolerance).
    fn compare(&self, other: &Self) -> Ordering;
    fn from_rational(r: &Rational) -> Self;
    fn to_rational(&self) -> Rational;
    fn to_f64(&self) -> f64;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn compare(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn to_f64(&self) -> f64 {
        to_f64(self)
    }
}

/// Absolute tolerance for the floating-point instantiation.
pub const F64_TOL: f64 = 1e-9;

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        self.abs() <= F64_TOL
    }
    fn is_positive(&self) -> bool {
        *self > F64_TOL
    }
    fn is_negative(&self) -> bool {
        *self < -F64_TOL
    }
    fn compare(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
    fn from_rational(r: &Rational) -> Self {
        to_f64(r)
    }
    fn to_rational(&self) -> Rational {
        from_f64(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Column {
    Structural(usize),
    Slack,
    Artificial,
}

/// One constraint row: sparse coefficients over structural columns.
#[derive(Clone, Debug)]
pub struct Row<S> {
    pub coeffs: Vec<(usize, S)>,
    pub relation: Relation,
    pub rhs: S,
}

/// `min c.x` subject to rows, `x >= 0`.
#[derive(Clone, Debug)]
pub struct Simplex<S: Scalar> {
    // tableau[r] has one entry per column followed by the right-hand side
    tableau: Vec<Vec<S>>,
    kinds: Vec<Column>,
    costs: Vec<S>,
    basis: Vec<usize>,
    identity: Vec<usize>,
    flipped: Vec<bool>,
    structural: Vec<usize>,
    reduced: Vec<S>,
    status: Option<LpStatus>,
    pub pivots: usize,
    degenerate_limit: usize,
}

impl<S: Scalar> Simplex<S> {
    pub fn new(costs: Vec<S>, rows: Vec<Row<S>>) -> Self {
        let n = costs.len();
        let m = rows.len();
        let mut kinds: Vec<Column> = (0..n).map(Column::Structural).collect();
        let mut col_costs = costs;
        let mut flipped = vec![false; m];
        let mut relations = Vec::with_capacity(m);
        for (r, row) in rows.iter().enumerate() {
            let mut rel = row.relation;
            if row.rhs.is_negative() {
                flipped[r] = true;
                rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
            relations.push(rel);
        }
        let mut slack_of = vec![None; m];
        for (r, rel) in relations.iter().enumerate() {
            if *rel != Relation::Eq {
                slack_of[r] = Some(kinds.len());
                kinds.push(Column::Slack);
                col_costs.push(S::zero());
            }
        }
        let mut identity = vec![0; m];
        for (r, rel) in relations.iter().enumerate() {
            if *rel == Relation::Le {
                identity[r] = slack_of[r].expect("inequality row has a slack");
            } else {
                identity[r] = kinds.len();
                kinds.push(Column::Artificial);
                col_costs.push(S::zero());
            }
        }
        let width = kinds.len();
        let mut tableau = Vec::with_capacity(m);
        for (r, row) in rows.into_iter().enumerate() {
            let sign = if flipped[r] { S::one().neg() } else { S::one() };
            let mut line = vec![S::zero(); width + 1];
            for (j, a) in row.coeffs {
                assert!(j < n, "coefficient for unknown column {j}");
                line[j] = line[j].add(&a.mul(&sign));
            }
            if let Some(sc) = slack_of[r] {
                line[sc] = match relations[r] {
                    Relation::Le => S::one(),
                    _ => S::one().neg(),
                };
            }
            line[identity[r]] = S::one();
            line[width] = row.rhs.mul(&sign);
            tableau.push(line);
        }
        Simplex {
            tableau,
            kinds,
            costs: col_costs,
            basis: identity.clone(),
            identity,
            flipped,
            structural: (0..n).collect(),
            reduced: Vec::new(),
            status: None,
            pivots: 0,
            degenerate_limit: 50,
        }
    }

    pub fn row_count(&self) -> usize {
        self.tableau.len()
    }

    pub fn structural_count(&self) -> usize {
        self.structural.len()
    }

    fn width(&self) -> usize {
        self.kinds.len()
    }

    /// Appends a structural column (coefficients in original row orientation)
    /// and returns its structural index. The current basis stays primal feasible.
    pub fn add_column(&mut self, cost: S, coeffs: &[(usize, S)]) -> usize {
        let m = self.row_count();
        let mut original = vec![S::zero(); m];
        for (r, a) in coeffs {
            let signed = if self.flipped[*r] { a.neg() } else { a.clone() };
            original[*r] = original[*r].add(&signed);
        }
        let nonzero: Vec<(usize, &S)> =
            original.iter().enumerate().filter(|(_, a)| !a.is_zero()).collect();
        let width = self.width();
        for r in 0..m {
            let mut v = S::zero();
            for &(i, a) in &nonzero {
                let b = &self.tableau[r][self.identity[i]];
                if !b.is_zero() {
                    v = v.add(&b.mul(a));
                }
            }
            self.tableau[r].insert(width, v);
        }
        let idx = self.structural.len();
        self.structural.push(width);
        self.kinds.push(Column::Structural(idx));
        self.costs.push(cost);
        self.status = None;
        idx
    }

    fn basic_artificial_positive(&self) -> bool {
        let w = self.width();
        self.basis
            .iter()
            .enumerate()
            .any(|(r, &b)| self.kinds[b] == Column::Artificial && self.tableau[r][w].is_positive())
    }

    fn price(&mut self, phase_one: bool) {
        let w = self.width();
        let cost = |kinds: &[Column], costs: &[S], j: usize| -> S {
            if phase_one {
                if kinds[j] == Column::Artificial {
                    S::one()
                } else {
                    S::zero()
                }
            } else {
                costs[j].clone()
            }
        };
        let mut reduced: Vec<S> = (0..w).map(|j| cost(&self.kinds, &self.costs, j)).collect();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost(&self.kinds, &self.costs, b);
            if cb.is_zero() {
                continue;
            }
            for (j, red) in reduced.iter_mut().enumerate() {
                let a = &self.tableau[r][j];
                if !a.is_zero() {
                    *red = red.sub(&cb.mul(a));
                }
            }
        }
        self.reduced = reduced;
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width();
        let p = self.tableau[row][col].clone();
        if p.compare(&S::one()) != Ordering::Equal {
            for v in self.tableau[row].iter_mut() {
                if !v.is_zero() {
                    *v = v.div(&p);
                }
            }
        }
        self.tableau[row][col] = S::one();
        let pivot_row = self.tableau[row].clone();
        let nz: Vec<usize> = (0..=w).filter(|&j| !pivot_row[j].is_zero()).collect();
        for r in 0..self.tableau.len() {
            if r == row {
                continue;
            }
            let f = self.tableau[r][col].clone();
            if f.is_zero() {
                continue;
            }
            let line = &mut self.tableau[r];
            for &j in &nz {
                line[j] = line[j].sub(&f.mul(&pivot_row[j]));
            }
            line[col] = S::zero();
        }
        let f = self.reduced[col].clone();
        if !f.is_zero() {
            for &j in &nz {
                if j < w {
                    self.reduced[j] = self.reduced[j].sub(&f.mul(&pivot_row[j]));
                }
            }
            self.reduced[col] = S::zero();
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Runs simplex iterations on the current reduced-cost row.
    fn iterate(&mut self, allow_artificial: bool) -> LpStatus {
        let w = self.width();
        let mut degenerate_run = 0usize;
        loop {
            let bland = degenerate_run >= self.degenerate_limit;
            let mut entering: Option<usize> = None;
            for j in 0..w {
                if !allow_artificial && self.kinds[j] == Column::Artificial {
                    continue;
                }
                if !self.reduced[j].is_negative() {
                    continue;
                }
                match entering {
                    None => {
                        entering = Some(j);
                        if bland {
                            break;
                        }
                    }
                    Some(e) => {
                        if self.reduced[j].compare(&self.reduced[e]) == Ordering::Less {
                            entering = Some(j);
                        }
                    }
                }
            }
            let Some(col) = entering else {
                return LpStatus::Optimal;
            };
            // ratio test; zero-level artificial rows leave first in phase two
            let mut leave: Option<(usize, S)> = None;
            for r in 0..self.tableau.len() {
                let a = &self.tableau[r][col];
                if !allow_artificial && self.kinds[self.basis[r]] == Column::Artificial && !a.is_zero() {
                    leave = Some((r, S::zero()));
                    break;
                }
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.tableau[r][w].div(a);
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        let diff = ratio.sub(lratio);
                        if diff.is_zero() {
                            self.basis[r] < self.basis[*lr]
                        } else {
                            diff.is_negative()
                        }
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((row, ratio)) = leave else {
                return LpStatus::Unbounded;
            };
            if ratio.is_zero() {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(row, col);
        }
    }

    pub fn solve(&mut self) -> LpStatus {
        if self.basic_artificial_positive() {
            self.price(true);
            self.iterate(true);
            if self.basic_artificial_positive() {
                self.status = Some(LpStatus::Infeasible);
                return LpStatus::Infeasible;
            }
        }
        self.drive_out_artificials();
        self.price(false);
        let status = self.iterate(false);
        self.status = Some(status);
        status
    }

    fn drive_out_artificials(&mut self) {
        let w = self.width();
        for r in 0..self.tableau.len() {
            if self.kinds[self.basis[r]] != Column::Artificial {
                continue;
            }
            if let Some(j) =
                (0..w).find(|&j| self.kinds[j] != Column::Artificial && !self.tableau[r][j].is_zero())
            {
                if self.reduced.len() != w {
                    self.reduced = vec![S::zero(); w];
                }
                self.pivot(r, j);
            }
        }
    }

    pub fn status(&self) -> Option<LpStatus> {
        self.status
    }

    /// Values of the structural variables at the current basis.
    pub fn primal(&self) -> Vec<S> {
        let w = self.width();
        let mut x = vec![S::zero(); self.structural.len()];
        for (r, &b) in self.basis.iter().enumerate() {
            if let Column::Structural(j) = self.kinds[b] {
                x[j] = self.tableau[r][w].clone();
            }
        }
        x
    }

    pub fn objective(&self) -> S {
        let w = self.width();
        self.basis.iter().enumerate().fold(S::zero(), |acc, (r, &b)| {
            let c = &self.costs[b];
            if c.is_zero() {
                acc
            } else {
                acc.add(&c.mul(&self.tableau[r][w]))
            }
        })
    }

    /// Row duals `y` with `c - A^T y >= 0` at an optimal basis (original row orientation).
    pub fn duals(&self) -> Vec<S> {
        (0..self.row_count())
            .map(|r| {
                let j = self.identity[r];
                let y = self.costs[j].sub(&self.reduced_cost_of(j));
                if self.flipped[r] {
                    y.neg()
                } else {
                    y
                }
            })
            .collect()
    }

    fn reduced_cost_of(&self, j: usize) -> S {
        if self.reduced.len() == self.width() {
            return self.reduced[j].clone();
        }
        let mut red = self.costs[j].clone();
        for (r, &b) in self.basis.iter().enumerate() {
            red = red.sub(&self.costs[b].mul(&self.tableau[r][j]));
        }
        red
    }
}

/// Convenience: solve once and return `(status, x, objective, duals)`.
pub fn solve_lp<S: Scalar>(costs: Vec<S>, rows: Vec<Row<S>>) -> (LpStatus, Vec<S>, S, Vec<S>) {
    let mut lp = Simplex::new(costs, rows);
    let status = lp.solve();
    (status, lp.primal(), lp.objective(), lp.duals())
}
