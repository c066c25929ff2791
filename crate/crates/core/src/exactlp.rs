//! Exact rational linear feasibility and linear-system solving.
//!
//! Feasibility uses a phase-I revised simplex over `BigRational` with an
//! explicit basis inverse, sparse columns and Bland's rule for both the
//! entering and the leaving variable. Linear systems without sign
//! constraints are solved by Gauss-Jordan elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Hard ceiling on simplex pivots. Bland's rule terminates, so reaching it
/// means a bug, never a wrong answer.
pub const PIVOT_LIMIT: usize = 5_000_000;

/// Equalities `Σ a_ij x_j = b_i` over variables `0..n`, each variable
/// either non-negative or free.
#[derive(Debug, Clone, Default)]
pub struct LinearSystem {
    variables: usize,
    rows: Vec<(Vec<(usize, Rational)>, Rational)>,
    free: Vec<bool>,
}

impl LinearSystem {
    /// `variables` non-negative variables and no constraints.
    pub fn new(variables: usize) -> Self {
        LinearSystem {
            variables,
            rows: Vec::new(),
            free: vec![false; variables],
        }
    }

    /// Same, but every variable is unconstrained in sign.
    pub fn new_free(variables: usize) -> Self {
        LinearSystem {
            variables,
            rows: Vec::new(),
            free: vec![true; variables],
        }
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn rows(&self) -> &[(Vec<(usize, Rational)>, Rational)] {
        &self.rows
    }

    pub fn set_free(&mut self, var: usize, free: bool) {
        self.free[var] = free;
    }

    pub fn is_free(&self, var: usize) -> bool {
        self.free[var]
    }

    pub fn add_equality(&mut self, coefficients: Vec<(usize, Rational)>, rhs: Rational) {
        self.rows.push((coefficients, rhs));
    }

    fn validate(&self) -> Result<()> {
        if self.free.len() != self.variables {
            return Err(Error::MalformedSystem("sign flags do not match variable count".into()));
        }
        for (k, (coeffs, _)) in self.rows.iter().enumerate() {
            if let Some((v, _)) = coeffs.iter().find(|(v, _)| *v >= self.variables) {
                return Err(Error::MalformedSystem(format!(
                    "row {k} references undeclared variable {v}"
                )));
            }
        }
        Ok(())
    }

    /// Exact check that `point` satisfies every equality and sign constraint.
    pub fn is_satisfied_by(&self, point: &[Rational]) -> bool {
        if point.len() != self.variables {
            return false;
        }
        let signs_ok = point.iter().zip(&self.free).all(|(x, &free)| free || !x.is_negative());
        signs_ok
            && self.rows.iter().all(|(coeffs, rhs)| {
                let lhs = coeffs.iter().fold(Rational::zero(), |acc, (v, a)| acc + a * &point[*v]);
                lhs == *rhs
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible,
}

impl Feasibility {
    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            Feasibility::Feasible(p) => Some(p),
            Feasibility::Infeasible => None,
        }
    }
}

/// Decides whether the system has a solution respecting the sign
/// constraints, returning one if so.
pub fn solve_feasibility(system: &LinearSystem) -> Result<Feasibility> {
    system.validate()?;
    let m = system.rows.len();

    // Column layout: one column per non-negative variable, two (x⁺, x⁻) per
    // free variable.
    let mut column_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(system.variables);
    let mut columns: Vec<Vec<(usize, Rational)>> = Vec::new();
    for v in 0..system.variables {
        let pos = columns.len();
        columns.push(Vec::new());
        if system.free[v] {
            columns.push(Vec::new());
            column_of.push((pos, Some(pos + 1)));
        } else {
            column_of.push((pos, None));
        }
    }
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    for (i, (coeffs, b)) in system.rows.iter().enumerate() {
        let flip = b.is_negative();
        rhs.push(if flip { -b.clone() } else { b.clone() });
        for (v, a) in coeffs {
            if a.is_zero() {
                continue;
            }
            let a = if flip { -a.clone() } else { a.clone() };
            let (plus, minus) = column_of[*v];
            if let Some(minus) = minus {
                columns[minus].push((i, -a.clone()));
            }
            columns[plus].push((i, a));
        }
    }
    for col in &mut columns {
        col.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(col.len());
        for (i, a) in col.drain(..) {
            match merged.last_mut() {
                Some((j, acc)) if *j == i => *acc += a,
                _ => merged.push((i, a)),
            }
        }
        merged.retain(|(_, a)| !a.is_zero());
        *col = merged;
    }

    let values = phase_one(&columns, rhs)?;
    let Some(values) = values else {
        return Ok(Feasibility::Infeasible);
    };
    let point: Vec<Rational> = column_of
        .iter()
        .map(|&(plus, minus)| match minus {
            Some(minus) => &values[plus] - &values[minus],
            None => values[plus].clone(),
        })
        .collect();
    if !system.is_satisfied_by(&point) {
        return Err(Error::Internal("simplex returned a point violating the system".into()));
    }
    Ok(Feasibility::Feasible(point))
}

/// Phase-I simplex on `A x = b`, `x ≥ 0`, `b ≥ 0`. Returns values for the
/// structural columns, or `None` when infeasible.
fn phase_one(columns: &[Vec<(usize, Rational)>], rhs: Vec<Rational>) -> Result<Option<Vec<Rational>>> {
    let m = rhs.len();
    let n = columns.len();
    // Variables n..n+m are artificials; artificial i starts basic in row i.
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut is_basic = vec![false; n];
    let mut binv: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = vec![Rational::zero(); m];
            row[i] = Rational::from_integer(1.into());
            row
        })
        .collect();
    let mut x_basic = rhs;
    let mut y = vec![Rational::zero(); m];
    let pricing = PricingColumns::new(columns);

    for _ in 0..PIVOT_LIMIT {
        let artificial_rows: Vec<usize> = (0..m).filter(|&i| basis[i] >= n).collect();
        let infeasibility = artificial_rows
            .iter()
            .fold(Rational::zero(), |acc, &i| acc + &x_basic[i]);
        if infeasibility.is_zero() {
            let mut values = vec![Rational::zero(); n];
            for (i, &b) in basis.iter().enumerate() {
                if b < n {
                    values[b] = x_basic[i].clone();
                }
            }
            return Ok(Some(values));
        }

        // Simplex multipliers for the phase-I cost (1 on artificials).
        for (k, yk) in y.iter_mut().enumerate() {
            *yk = artificial_rows
                .iter()
                .fold(Rational::zero(), |acc, &i| acc + &binv[i][k]);
        }

        // Bland: lowest-index column with negative reduced cost −y·A_j.
        // Only the sign matters, so price with integer multiples of y and
        // of each column.
        let scaled = scale_to_integers(&y);
        let small: Option<Vec<i64>> = scaled.iter().map(|v| v.to_i64()).collect();
        let entering = (0..n).find(|&j| {
            if is_basic[j] {
                return false;
            }
            if let (Some(ys), Some(col)) = (&small, &pricing.small[j]) {
                let mut acc: i128 = 0;
                let mut exact = true;
                for &(i, a) in col {
                    match (ys[i] as i128).checked_mul(a as i128).and_then(|t| acc.checked_add(t)) {
                        Some(v) => acc = v,
                        None => {
                            exact = false;
                            break;
                        }
                    }
                }
                if exact {
                    return acc > 0;
                }
            }
            pricing.big[j]
                .iter()
                .fold(BigInt::zero(), |acc, (i, a)| acc + &scaled[*i] * a)
                .is_positive()
        });
        let Some(j) = entering else {
            return Ok(None);
        };

        let mut direction = vec![Rational::zero(); m];
        for (i, d) in direction.iter_mut().enumerate() {
            for (k, a) in &columns[j] {
                if !binv[i][*k].is_zero() {
                    *d += &binv[i][*k] * a;
                }
            }
        }

        // Ratio test; ties broken by the lowest basic variable index.
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if !direction[i].is_positive() {
                continue;
            }
            let ratio = &x_basic[i] / &direction[i];
            let better = match &leave {
                None => true,
                Some((r, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*r]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((r, _)) = leave else {
            return Err(Error::Internal("phase-I objective unbounded".into()));
        };

        let pivot = direction[r].clone();
        for v in binv[r].iter_mut() {
            if !v.is_zero() {
                *v /= &pivot;
            }
        }
        x_basic[r] /= &pivot;
        let pivot_row = binv[r].clone();
        let pivot_x = x_basic[r].clone();
        for i in 0..m {
            if i == r || direction[i].is_zero() {
                continue;
            }
            let factor = direction[i].clone();
            for (v, p) in binv[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
            x_basic[i] -= &factor * &pivot_x;
        }
        if basis[r] < n {
            is_basic[basis[r]] = false;
        }
        basis[r] = j;
        is_basic[j] = true;
    }
    Err(Error::Internal(format!("pivot limit {PIVOT_LIMIT} reached")))
}

/// Columns rescaled to integers (by the lcm of their denominators) for
/// sign-only pricing; `small` holds the `i64` form where it fits.
struct PricingColumns {
    big: Vec<Vec<(usize, BigInt)>>,
    small: Vec<Option<Vec<(usize, i64)>>>,
}

impl PricingColumns {
    fn new(columns: &[Vec<(usize, Rational)>]) -> Self {
        let big: Vec<Vec<(usize, BigInt)>> = columns
            .iter()
            .map(|col| {
                let values: Vec<Rational> = col.iter().map(|(_, a)| a.clone()).collect();
                col.iter().map(|(i, _)| *i).zip(scale_to_integers(&values)).collect()
            })
            .collect();
        let small = big
            .iter()
            .map(|col| col.iter().map(|(i, a)| a.to_i64().map(|a| (*i, a))).collect())
            .collect();
        PricingColumns { big, small }
    }
}

/// Positive integer multiple of a rational vector.
fn scale_to_integers(values: &[Rational]) -> Vec<BigInt> {
    let lcm = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    values.iter().map(|v| v.numer() * (&lcm / v.denom())).collect()
}

/// Solves the equalities ignoring sign constraints. Free variables of the
/// reduced system are set to zero. Returns `None` if inconsistent.
pub fn solve_linear_system(system: &LinearSystem) -> Result<Option<Vec<Rational>>> {
    system.validate()?;
    let n = system.variables;
    let mut matrix: Vec<Vec<Rational>> = system
        .rows
        .iter()
        .map(|(coeffs, rhs)| {
            let mut row = vec![Rational::zero(); n + 1];
            for (v, a) in coeffs {
                row[*v] += a;
            }
            row[n] = rhs.clone();
            row
        })
        .collect();

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..matrix.len()).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(row, p);
        let lead = matrix[row][col].clone();
        for v in matrix[row].iter_mut() {
            *v /= &lead;
        }
        let pivot_row = matrix[row].clone();
        for (r, other) in matrix.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let factor = other[col].clone();
            for (v, p) in other.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == matrix.len() {
            break;
        }
    }
    if matrix[row..].iter().any(|r| !r[n].is_zero()) {
        return Ok(None);
    }
    let mut solution = vec![Rational::zero(); n];
    for (r, c) in pivots {
        solution[c] = matrix[r][n].clone();
    }
    let mut unsigned = system.clone();
    unsigned.free = vec![true; n];
    if !unsigned.is_satisfied_by(&solution) {
        return Err(Error::Internal("elimination returned a non-solution".into()));
    }
    Ok(Some(solution))
}
