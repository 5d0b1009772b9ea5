//! Hand-rolled intersection theory used to cross-check the library.
//!
//! Everything here works with the raw intersection matrix of `W` and a list of
//! contracted curves; nothing goes through `Model`.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use surface_mmp::linalg::{rank, solve_rational};
use surface_mmp::rational::int;
use surface_mmp::{Configuration, Divisor, Q};

pub fn entry(config: &Configuration, i: usize, j: usize) -> Q {
    int(config.matrix()[i][j])
}

/// `D·C_i` for every curve of `W`.
pub fn degrees(config: &Configuration, d: &Divisor) -> Vec<Q> {
    (0..config.len())
        .map(|i| d.iter().map(|(j, q)| q * entry(config, i, j)).sum())
        .collect()
}

pub fn canonical_degrees(config: &Configuration) -> Vec<Q> {
    config.curves().iter().map(|c| int(c.canon_int)).collect()
}

pub fn add(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Coefficients `x_k` on the contracted curves making `deg + Σ x_k E_k` orthogonal to every `E_k`.
pub fn correction(config: &Configuration, contracted: &BTreeSet<usize>, deg: &[Q]) -> Vec<(usize, Q)> {
    let ks: Vec<usize> = contracted.iter().copied().collect();
    if ks.is_empty() {
        return Vec::new();
    }
    let m: Vec<Vec<Q>> = ks
        .iter()
        .map(|&a| ks.iter().map(|&b| entry(config, a, b)).collect())
        .collect();
    let rhs: Vec<Q> = ks.iter().map(|&k| -deg[k].clone()).collect();
    let x = solve_rational(&m, &rhs).expect("contracted curves are negative definite");
    ks.into_iter().zip(x).collect()
}

/// Degrees of the Mumford pullback of a class given by its degrees on `W`.
pub fn pulled(config: &Configuration, contracted: &BTreeSet<usize>, deg: &[Q]) -> Vec<Q> {
    let x = correction(config, contracted, deg);
    (0..config.len())
        .map(|c| {
            let mut v = deg[c].clone();
            for (k, xk) in &x {
                v += xk * entry(config, *k, c);
            }
            v
        })
        .collect()
}

/// Crepant coefficients: `K_W + Δ + Σ e_k E_k` orthogonal to the contracted curves.
pub fn crepant(config: &Configuration, contracted: &BTreeSet<usize>, boundary: &Divisor) -> Divisor {
    let deg = add(&canonical_degrees(config), &degrees(config, boundary));
    correction(config, contracted, &deg).into_iter().collect()
}

/// `Δ_W`: strict boundary plus crepant coefficients.
pub fn total(config: &Configuration, contracted: &BTreeSet<usize>, boundary: &Divisor) -> Divisor {
    let mut t = boundary.clone();
    for (k, e) in crepant(config, contracted, boundary).iter() {
        t.set(k, e.clone());
    }
    t
}

/// `(K_X + Δ)·C` for every curve of `W` (meaningful on the non-contracted ones).
pub fn log_canonical_degrees(config: &Configuration, contracted: &BTreeSet<usize>, boundary: &Divisor) -> Vec<Q> {
    pulled(
        config,
        contracted,
        &add(&canonical_degrees(config), &degrees(config, boundary)),
    )
}

/// `C·C` on the model, i.e. `f^*C · C`.
pub fn square_on_model(config: &Configuration, contracted: &BTreeSet<usize>, c: usize) -> Q {
    pulled(config, contracted, &degrees(config, &Divisor::curve(c)))[c].clone()
}

/// `(K_X + Δ)²`, needs `K_W²`.
///
/// With `L = f^*(K_X+Δ) = K_W + Δ + Σ x_k E_k` and `L·E_k = 0`,
/// `L² = L·K_W + L·Δ = K_W² + Δ·K_W + Σ x_k K_W·E_k + L·Δ`.
pub fn log_canonical_square(config: &Configuration, contracted: &BTreeSet<usize>, boundary: &Divisor) -> Option<Q> {
    let mut s = int(config.canonical_self_int()?);
    let deg = add(&canonical_degrees(config), &degrees(config, boundary));
    let l = pulled(config, contracted, &deg);
    for (i, q) in boundary.iter() {
        s += q * int(config.curve(i).canon_int);
        s += q * &l[i];
    }
    for (k, x) in correction(config, contracted, &deg) {
        s += x * int(config.curve(k).canon_int);
    }
    Some(s)
}

/// Relative Picard number from class vectors: each vertical non-contracted curve
/// paired against every non-contracted curve.
pub fn rho(config: &Configuration, contracted: &BTreeSet<usize>, vertical: &[usize]) -> usize {
    let others: Vec<usize> = (0..config.len()).filter(|c| !contracted.contains(c)).collect();
    let rows: Vec<Vec<Q>> = vertical
        .iter()
        .filter(|c| !contracted.contains(c))
        .map(|&v| {
            let p = pulled(config, contracted, &degrees(config, &Divisor::curve(v)));
            others.iter().map(|&o| p[o].clone()).collect()
        })
        .collect();
    rank(&rows)
}

/// Numerically lc from the snc model: effective, every `b ≤ 1`, and every node blowup `b_i + b_j − 1 ≤ 1`.
pub fn numerically_lc(config: &Configuration, contracted: &BTreeSet<usize>, boundary: &Divisor) -> bool {
    let t = total(config, contracted, boundary);
    let one = Q::one();
    boundary.is_effective()
        && (0..config.len()).all(|i| t.coeff(i) <= one)
        && config
            .points()
            .iter()
            .all(|p| t.coeff(p.curves[0]) + t.coeff(p.curves[1]) - &one <= one)
}

pub fn is_nonneg(q: &Q) -> bool {
    !q.is_negative()
}

pub fn is_zero(q: &Q) -> bool {
    q.is_zero()
}
