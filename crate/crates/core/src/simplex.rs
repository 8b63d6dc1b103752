//! Exact two-phase simplex over an ordered field.
//!
//! Problems arrive in standard form: find x >= 0 with A x = b, optionally
//! maximising c^T x. Pivoting uses Bland's rule throughout, so the solver
//! terminates on every input. An infeasible system is returned together with
//! a Farkas certificate y (y^T A <= 0 componentwise and y^T b > 0), which
//! callers re-check with [`verify_farkas`] before trusting a verdict.

use crate::scalar::OrderedScalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome<T> {
    Feasible { x: Vec<T>, objective: Option<T> },
    Infeasible { farkas: Vec<T> },
    Unbounded,
}

struct Tableau<T> {
    // w holds [A | I | b] with rows scaled so b >= 0; the identity block
    // tracks B^{-1} for certificate extraction.
    w: Vec<Vec<T>>,
    n: usize,
    m: usize,
    basis: Vec<usize>,
}

impl<T: OrderedScalar> Tableau<T> {
    fn new(a: &[Vec<T>], b: &[T]) -> (Self, Vec<bool>) {
        let m = a.len();
        let n = a.first().map_or(0, |r| r.len());
        let mut w = Vec::with_capacity(m);
        let mut negated = vec![false; m];
        for (i, row) in a.iter().enumerate() {
            assert_eq!(row.len(), n, "ragged constraint matrix");
            let flip = b[i] < T::zero();
            negated[i] = flip;
            let mut full = Vec::with_capacity(n + m + 1);
            for v in row {
                full.push(if flip { -v.clone() } else { v.clone() });
            }
            for j in 0..m {
                full.push(if j == i { T::one() } else { T::zero() });
            }
            full.push(if flip { -b[i].clone() } else { b[i].clone() });
            w.push(full);
        }
        let basis = (n..n + m).collect();
        (Tableau { w, n, m, basis }, negated)
    }

    fn rhs(&self, r: usize) -> &T {
        &self.w[r][self.n + self.m + 1 - 1]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.n + self.m + 1;
        let inv = T::one() / self.w[row][col].clone();
        for j in 0..width {
            self.w[row][j] *= inv.clone();
        }
        for r in 0..self.m {
            if r == row || self.w[r][col] == T::zero() {
                continue;
            }
            let factor = self.w[r][col].clone();
            for j in 0..width {
                let sub = factor.clone() * self.w[row][j].clone();
                self.w[r][j] -= sub;
            }
        }
        self.basis[row] = col;
    }

    /// Reduced cost of column j under cost vector c (length n + m).
    fn reduced_cost(&self, c: &[T], j: usize) -> T {
        let mut z = T::zero();
        for r in 0..self.m {
            if c[self.basis[r]] != T::zero() {
                z += c[self.basis[r]].clone() * self.w[r][j].clone();
            }
        }
        c[j].clone() - z
    }

    /// Bland step: entering = lowest admissible column with negative reduced
    /// cost, leaving = lowest-index basic variable among minimum ratios.
    /// Returns false when optimal, Err-like None sentinel is not needed here;
    /// unboundedness is reported through the bool-out parameter.
    fn bland_iterate(&mut self, c: &[T], allow: impl Fn(usize) -> bool) -> SimplexStep {
        let cols = self.n + self.m;
        let entering = (0..cols).find(|&j| allow(j) && self.reduced_cost(c, j) < T::zero());
        let Some(col) = entering else {
            return SimplexStep::Optimal;
        };
        let mut best: Option<(T, usize, usize)> = None;
        for r in 0..self.m {
            if self.w[r][col] > T::zero() {
                let ratio = self.rhs(r).clone() / self.w[r][col].clone();
                let better = match &best {
                    None => true,
                    Some((q, bvar, _)) => {
                        ratio < *q || (ratio == *q && self.basis[r] < *bvar)
                    }
                };
                if better {
                    best = Some((ratio, self.basis[r], r));
                }
            }
        }
        match best {
            Some((_, _, row)) => {
                self.pivot(row, col);
                SimplexStep::Pivoted
            }
            None => SimplexStep::Unbounded,
        }
    }

    fn run(&mut self, c: &[T], allow: impl Fn(usize) -> bool) -> SimplexStep {
        loop {
            match self.bland_iterate(c, &allow) {
                SimplexStep::Pivoted => continue,
                other => return other,
            }
        }
    }

    fn objective(&self, c: &[T]) -> T {
        let mut v = T::zero();
        for r in 0..self.m {
            if c[self.basis[r]] != T::zero() {
                v += c[self.basis[r]].clone() * self.rhs(r).clone();
            }
        }
        v
    }

    fn solution(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.n];
        for r in 0..self.m {
            if self.basis[r] < self.n {
                x[self.basis[r]] = self.rhs(r).clone();
            }
        }
        x
    }
}

enum SimplexStep {
    Pivoted,
    Optimal,
    Unbounded,
}

/// Solve {x >= 0 : A x = b}; when `maximize` is given, also optimise c^T x
/// over the feasible region. `a` is row-major, one row per equation.
pub fn solve<T: OrderedScalar>(a: &[Vec<T>], b: &[T], maximize: Option<&[T]>) -> LpOutcome<T> {
    let (mut t, negated) = Tableau::new(a, b);
    let n = t.n;
    let m = t.m;

    let mut phase1 = vec![T::zero(); n + m];
    for slot in phase1.iter_mut().skip(n) {
        *slot = T::one();
    }
    if let SimplexStep::Unbounded = t.run(&phase1, |_| true) { unreachable!("phase-1 objective is bounded below by zero") }
    if t.objective(&phase1) > T::zero() {
        // y = c_B^T B^{-1}, read from the identity block, then undo the row
        // scaling applied to make b nonnegative.
        let mut y = Vec::with_capacity(m);
        for (i, flip) in negated.iter().enumerate() {
            let mut yi = T::zero();
            for r in 0..m {
                if phase1[t.basis[r]] != T::zero() {
                    yi += t.w[r][n + i].clone();
                }
            }
            if *flip {
                yi = -yi;
            }
            y.push(yi);
        }
        debug_assert!(verify_farkas(a, b, &y));
        return LpOutcome::Infeasible { farkas: y };
    }

    // Drive leftover artificials out of the basis where possible; a row with
    // no structural entry is redundant and its artificial stays at zero.
    for r in 0..m {
        if t.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| t.w[r][j] != T::zero()) {
                t.pivot(r, col);
            }
        }
    }

    let objective = match maximize {
        None => None,
        Some(c) => {
            assert_eq!(c.len(), n, "objective length mismatch");
            let mut cost = vec![T::zero(); n + m];
            for j in 0..n {
                cost[j] = -c[j].clone();
            }
            if let SimplexStep::Unbounded = t.run(&cost, |j| j < n) { return LpOutcome::Unbounded }
            Some(-t.objective(&cost))
        }
    };
    LpOutcome::Feasible {
        x: t.solution(),
        objective,
    }
}

/// Exact check that y certifies infeasibility of {x >= 0 : A x = b}.
pub fn verify_farkas<T: OrderedScalar>(a: &[Vec<T>], b: &[T], y: &[T]) -> bool {
    if y.len() != a.len() {
        return false;
    }
    let n = a.first().map_or(0, |r| r.len());
    for j in 0..n {
        let mut dot = T::zero();
        for (i, row) in a.iter().enumerate() {
            dot += y[i].clone() * row[j].clone();
        }
        if dot > T::zero() {
            return false;
        }
    }
    let mut rhs = T::zero();
    for (i, bi) in b.iter().enumerate() {
        rhs += y[i].clone() * bi.clone();
    }
    rhs > T::zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use crate::Rational;

    fn r(p: i64, q: i64) -> Rational {
        ratio(p, q)
    }

    #[test]
    fn feasible_system_solved_exactly() {
        // x + y = 1, x - y = 0 has the unique solution (1/2, 1/2)
        let a = vec![vec![r(1, 1), r(1, 1)], vec![r(1, 1), r(-1, 1)]];
        let b = vec![r(1, 1), r(0, 1)];
        match solve(&a, &b, None) {
            LpOutcome::Feasible { x, .. } => {
                assert_eq!(x, vec![r(1, 2), r(1, 2)]);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_system_yields_checked_certificate() {
        let a = vec![vec![r(1, 1), r(1, 1)], vec![r(1, 1), r(1, 1)]];
        let b = vec![r(1, 1), r(2, 1)];
        match solve(&a, &b, None) {
            LpOutcome::Infeasible { farkas } => {
                assert!(verify_farkas(&a, &b, &farkas));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn sign_condition_fails_for_feasible_system() {
        let a = vec![vec![r(1, 1), r(1, 1)]];
        let b = vec![r(1, 1)];
        assert!(!verify_farkas(&a, &b, &[r(1, 1)]));
        assert!(!verify_farkas(&a, &b, &[r(-1, 1)]));
    }

    #[test]
    fn maximization_reaches_vertex() {
        // max x subject to x + y = 1
        let a = vec![vec![r(1, 1), r(1, 1)]];
        let b = vec![r(1, 1)];
        let c = vec![r(1, 1), r(0, 1)];
        match solve(&a, &b, Some(&c)) {
            LpOutcome::Feasible { x, objective } => {
                assert_eq!(objective, Some(r(1, 1)));
                assert_eq!(x, vec![r(1, 1), r(0, 1)]);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_direction_detected() {
        // max x subject to x - y = 0 runs off along the diagonal
        let a = vec![vec![r(1, 1), r(-1, 1)]];
        let b = vec![r(0, 1)];
        let c = vec![r(1, 1), r(0, 1)];
        assert_eq!(solve(&a, &b, Some(&c)), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_rows_are_normalised() {
        // -x - y = -1 is the same line as x + y = 1
        let a = vec![vec![r(-1, 1), r(-1, 1)]];
        let b = vec![r(-1, 1)];
        let c = vec![r(0, 1), r(1, 1)];
        match solve(&a, &b, Some(&c)) {
            LpOutcome::Feasible { objective, .. } => assert_eq!(objective, Some(r(1, 1))),
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let a = vec![
            vec![r(1, 1), r(1, 1)],
            vec![r(1, 1), r(1, 1)],
            vec![r(2, 1), r(2, 1)],
        ];
        let b = vec![r(1, 1), r(1, 1), r(2, 1)];
        match solve(&a, &b, None) {
            LpOutcome::Feasible { x, .. } => {
                assert_eq!(x[0].clone() + x[1].clone(), r(1, 1));
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn zero_row_with_nonzero_rhs_is_infeasible() {
        let a = vec![vec![r(0, 1), r(0, 1)]];
        let b = vec![r(1, 1)];
        match solve(&a, &b, None) {
            LpOutcome::Infeasible { farkas } => assert!(verify_farkas(&a, &b, &farkas)),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }
}
