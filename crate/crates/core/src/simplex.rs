//! Exact feasibility of `A λ = b, λ ≥ 0` by a phase-one simplex over the rationals.
//!
//! Bland's rule keeps the method finite without any tolerance. When the system is
//! infeasible the final basis yields a Farkas vector `y` with `yᵀA ≤ 0` and
//! `yᵀb > 0`, which callers keep as a checkable certificate.

use num_traits::{Signed, Zero};

use crate::linalg::dot;
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    /// Nonnegative `λ` with `A λ = b`.
    Feasible(Vec<Q>),
    /// `y` with `yᵀ A_j ≤ 0` for every column and `yᵀ b > 0`.
    Infeasible(Vec<Q>),
}

/// `columns[j]` is the j-th column of `A`; `target` is `b`.
pub fn feasibility(columns: &[Vec<Q>], target: &[Q]) -> Feasibility {
    let m = target.len();
    let n = columns.len();
    if m == 0 {
        return Feasibility::Feasible(vec![Q::zero(); n]);
    }
    let signs: Vec<bool> = target.iter().map(|b| b.is_negative()).collect();
    let flip = |i: usize, x: &Q| if signs[i] { -x.clone() } else { x.clone() };

    let width = n + m;
    let mut tab: Vec<Vec<Q>> = (0..m)
        .map(|i| {
            let mut row: Vec<Q> = columns.iter().map(|col| flip(i, &col[i])).collect();
            row.extend((0..m).map(|k| if k == i { Q::from_integer(1.into()) } else { Q::zero() }));
            row
        })
        .collect();
    let mut rhs: Vec<Q> = (0..m).map(|i| flip(i, &target[i])).collect();
    let mut basis: Vec<usize> = (n..width).collect();
    let cost = |j: usize| if j >= n { 1 } else { 0 };

    loop {
        let entering = (0..width).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let mut r = Q::from_integer(cost(j).into());
            for (i, &b) in basis.iter().enumerate() {
                if cost(b) == 1 {
                    r -= &tab[i][j];
                }
            }
            r.is_negative()
        });
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..m {
            if !tab[i][e].is_positive() {
                continue;
            }
            let ratio = &rhs[i] / &tab[i][e];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // phase one is bounded below by zero, so a positive entry always exists
        let (r, _) = leave.expect("phase-one objective is bounded");
        let pivot = tab[r][e].clone();
        for x in tab[r].iter_mut() {
            *x /= &pivot;
        }
        rhs[r] /= &pivot;
        for i in 0..m {
            if i == r || tab[i][e].is_zero() {
                continue;
            }
            let f = tab[i][e].clone();
            for j in 0..width {
                let d = &f * &tab[r][j];
                tab[i][j] -= d;
            }
            let d = &f * &rhs[r];
            rhs[i] -= d;
        }
        basis[r] = e;
    }

    let objective: Q = basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= n)
        .map(|(i, _)| rhs[i].clone())
        .sum();
    if objective.is_zero() {
        let mut lambda = vec![Q::zero(); n];
        for (i, &b) in basis.iter().enumerate() {
            if b < n {
                lambda[b] = rhs[i].clone();
            }
        }
        Feasibility::Feasible(lambda)
    } else {
        let y: Vec<Q> = (0..m)
            .map(|k| {
                let yk: Q = basis
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b >= n)
                    .map(|(i, _)| tab[i][n + k].clone())
                    .sum();
                flip(k, &yk)
            })
            .collect();
        Feasibility::Infeasible(y)
    }
}

/// Checks a Farkas certificate against the data it claims to separate.
pub fn is_farkas_certificate(columns: &[Vec<Q>], target: &[Q], y: &[Q]) -> bool {
    columns.iter().all(|c| !dot(y, c).is_positive()) && dot(y, target).is_positive()
}
