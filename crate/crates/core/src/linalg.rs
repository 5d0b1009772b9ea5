//! Exact linear algebra over the integers and rationals.
//!
//! Integer systems go through fraction-free (Bareiss) elimination, so every
//! intermediate entry is an integer and every division is exact. Rational
//! systems use plain Gaussian elimination over `BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::rational::{from_big, Q};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type QMatrix = Vec<Vec<Q>>;

pub fn int_matrix(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

/// Principal submatrix on the given (ordered) index set.
pub fn principal_submatrix<T: Clone>(m: &[Vec<T>], idx: &[usize]) -> Vec<Vec<T>> {
    idx.iter()
        .map(|&i| idx.iter().map(|&j| m[i][j].clone()).collect())
        .collect()
}

/// Leading principal minors `Δ_1, Δ_2, ...` by Bareiss elimination without pivoting.
///
/// Stops after the first vanishing minor, since later minors cannot be read off
/// without row exchanges; the returned vector then ends with that zero.
pub fn leading_minors(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = m.len();
    let mut a: IntMatrix = m.to_vec();
    let mut prev = BigInt::one();
    let mut minors = Vec::with_capacity(n);
    for k in 0..n {
        let pivot = a[k][k].clone();
        minors.push(pivot.clone());
        if pivot.is_zero() {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&pivot * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = pivot;
    }
    minors
}

/// Determinant by fraction-free elimination with row exchanges.
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: IntMatrix = m.to_vec();
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    if negate {
        -prev
    } else {
        prev
    }
}

/// Outcome of a negative-definiteness test on a symmetric integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DefinitenessCertificate {
    /// Leading principal minors, alternating in sign starting negative.
    NegativeDefinite {
        #[serde(serialize_with = "ser_bigints")]
        leading_minors: Vec<BigInt>,
    },
    /// A nonzero integer vector `v` with `vᵀ M v = value ≥ 0`.
    Witness {
        #[serde(serialize_with = "ser_bigints")]
        vector: Vec<BigInt>,
        #[serde(serialize_with = "ser_bigint")]
        value: BigInt,
    },
}

impl DefinitenessCertificate {
    pub fn is_negative_definite(&self) -> bool {
        matches!(self, DefinitenessCertificate::NegativeDefinite { .. })
    }
}

fn ser_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Whether the `k`-th (1-based) leading minor has the sign a negative-definite matrix requires.
pub fn minor_sign_ok(k: usize, minor: &BigInt) -> bool {
    if k % 2 == 1 {
        minor.is_negative()
    } else {
        minor.is_positive()
    }
}

pub fn quadratic_form(m: &[Vec<BigInt>], v: &[BigInt]) -> BigInt {
    let mut total = BigInt::zero();
    for (i, row) in m.iter().enumerate() {
        if v[i].is_zero() {
            continue;
        }
        for (j, x) in row.iter().enumerate() {
            total += &v[i] * x * &v[j];
        }
    }
    total
}

/// Sylvester test with a certificate either way.
///
/// On failure at leading block `k`, the witness completes the `(k-1)`-block
/// solution `v = (-M_{k-1}^{-1} m, 1)`, whose value is `Δ_k / Δ_{k-1} ≥ 0`.
pub fn negative_definite_certificate(m: &[Vec<BigInt>]) -> DefinitenessCertificate {
    let n = m.len();
    let minors = leading_minors(m);
    let failure = minors
        .iter()
        .enumerate()
        .find(|(i, d)| !minor_sign_ok(i + 1, d))
        .map(|(i, _)| i);
    let Some(k) = failure else {
        debug_assert_eq!(minors.len(), n);
        return DefinitenessCertificate::NegativeDefinite {
            leading_minors: minors,
        };
    };
    let mut vector = vec![BigInt::zero(); n];
    if k == 0 {
        vector[0] = BigInt::one();
    } else {
        let block: IntMatrix = (0..k).map(|i| m[i][..k].to_vec()).collect();
        let rhs: Vec<Q> = (0..k).map(|i| -from_big(&m[i][k])).collect();
        let sol = solve_int_system(&block, &[rhs]).expect("leading block is nonsingular");
        let mut rational: Vec<Q> = sol.into_iter().next().unwrap();
        rational.push(Q::one());
        let denom = rational
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        for (i, x) in rational.iter().enumerate() {
            vector[i] = (x * from_big(&denom)).to_integer();
        }
    }
    let value = quadratic_form(m, &vector);
    debug_assert!(!value.is_negative());
    DefinitenessCertificate::Witness { vector, value }
}

/// Negative semi-definiteness from the signs of all principal minors:
/// `(-1)^k det ≥ 0` for every `k × k` principal submatrix. Exponential; meant for `n ≤ 12`.
pub fn negative_semidefinite_by_minors(m: &[Vec<BigInt>]) -> bool {
    let n = m.len();
    (1u32..(1u32 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let d = determinant(&principal_submatrix(m, &idx));
        if idx.len() % 2 == 1 {
            !d.is_positive()
        } else {
            !d.is_negative()
        }
    })
}

/// Solves `A x = b` for each right-hand side, `A` a square integer matrix.
///
/// Each rational right-hand side is scaled to integers, the augmented system is
/// reduced fraction-free, and only the back substitution divides. Returns `None`
/// when `A` is singular.
pub fn solve_int_system(a: &[Vec<BigInt>], rhs: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = a.len();
    if n == 0 {
        return Some(rhs.iter().map(|_| Vec::new()).collect());
    }
    let scales: Vec<BigInt> = rhs
        .iter()
        .map(|col| col.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom())))
        .collect();
    let width = n + rhs.len();
    let mut aug: IntMatrix = (0..n)
        .map(|i| {
            let mut row = a[i].clone();
            for (c, col) in rhs.iter().enumerate() {
                row.push((&col[i] * from_big(&scales[c])).to_integer());
            }
            row
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&r| !aug[r][k].is_zero())?;
        aug.swap(p, k);
        for i in k + 1..n {
            for j in k + 1..width {
                aug[i][j] = (&aug[k][k] * &aug[i][j] - &aug[i][k] * &aug[k][j]) / &prev;
            }
            aug[i][k] = BigInt::zero();
        }
        prev = aug[k][k].clone();
    }
    let mut out = Vec::with_capacity(rhs.len());
    for (c, scale) in scales.iter().enumerate() {
        let mut x = vec![Q::zero(); n];
        for i in (0..n).rev() {
            let mut acc = from_big(&aug[i][n + c]);
            for j in i + 1..n {
                acc -= from_big(&aug[i][j]) * &x[j];
            }
            x[i] = acc / from_big(&aug[i][i]);
        }
        let s = from_big(scale);
        out.push(x.into_iter().map(|v| v / &s).collect());
    }
    Some(out)
}

/// Rank of a rational matrix given as rows.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut a: QMatrix = rows.to_vec();
    let Some(cols) = a.first().map(Vec::len) else {
        return 0;
    };
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pivot = a[r][c].clone();
        for i in r + 1..a.len() {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &pivot;
            for j in c..cols {
                let d = &f * &a[r][j];
                a[i][j] -= d;
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

/// Solves `A x = b` over the rationals by Gauss-Jordan elimination; `None` if singular.
pub fn solve_rational(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    let mut m: QMatrix = a
        .iter()
        .zip(b)
        .map(|(row, x)| {
            let mut r = row.clone();
            r.push(x.clone());
            r
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&r| !m[r][k].is_zero())?;
        m.swap(p, k);
        let pivot = m[k][k].clone();
        for v in m[k].iter_mut() {
            *v /= &pivot;
        }
        for i in 0..n {
            if i == k || m[i][k].is_zero() {
                continue;
            }
            let f = m[i][k].clone();
            for j in k..=n {
                let d = &f * &m[k][j];
                m[i][j] -= d;
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().expect("augmented")).collect())
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
