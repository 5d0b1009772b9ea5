//! Intersection theory on a regular ambient surface model.
//!
//! A [`Configuration`] is the numerical shadow of a regular surface `W` with a
//! finite set of curves on it: the integer intersection matrix, the canonical
//! degrees `K_W·C`, and the closed points where two curves cross, each carrying
//! the degree of its residue field over the base field. All later modules work
//! on `W` and describe contracted models through pullbacks.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, DefinitenessCertificate, IntMatrix};
use crate::rational::{int, Q};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Curve {
    pub id: String,
    /// `C·C` over the base field.
    pub self_int: i64,
    /// `K_W·C`.
    pub canon_int: i64,
}

impl Curve {
    pub fn new(id: impl Into<String>, self_int: i64, canon_int: i64) -> Self {
        Curve {
            id: id.into(),
            self_int,
            canon_int,
        }
    }
}

/// A closed point where exactly two curves meet transversally.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncidencePoint {
    pub id: String,
    pub curves: [usize; 2],
    /// `dim_k k(p)`.
    pub residue_degree: i64,
}

impl IncidencePoint {
    pub fn new(id: impl Into<String>, a: usize, b: usize, residue_degree: i64) -> Self {
        IncidencePoint {
            id: id.into(),
            curves: [a, b],
            residue_degree,
        }
    }

    pub fn lies_on(&self, curve: usize) -> bool {
        self.curves.contains(&curve)
    }

    pub fn other(&self, curve: usize) -> Option<usize> {
        match self.curves {
            [a, b] if a == curve => Some(b),
            [a, b] if b == curve => Some(a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    curves: Vec<Curve>,
    matrix: Vec<Vec<i64>>,
    points: Vec<IncidencePoint>,
    chi_structure: Option<i64>,
    canonical_self_int: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    DuplicateCurveId { id: String },
    DuplicatePointId { id: String },
    Asymmetric { row: String, col: String },
    DiagonalMismatch { curve: String, matrix: i64, self_int: i64 },
    NegativeOffDiagonal { row: String, col: String, value: i64 },
    ParityFailure { curve: String, self_int: i64, canon_int: i64 },
    DegeneratePoint { point: String },
    NonPositiveResidueDegree { point: String, degree: i64 },
    IncidenceMismatch { a: String, b: String, matrix: i64, incidence_sum: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateCurveId { id } => write!(f, "duplicate curve id {id}"),
            Violation::DuplicatePointId { id } => write!(f, "duplicate point id {id}"),
            Violation::Asymmetric { row, col } => {
                write!(f, "matrix asymmetric at ({row}, {col})")
            }
            Violation::DiagonalMismatch {
                curve,
                matrix,
                self_int,
            } => write!(
                f,
                "diagonal entry {matrix} for {curve} differs from self_int {self_int}"
            ),
            Violation::NegativeOffDiagonal { row, col, value } => {
                write!(f, "negative off-diagonal entry {value} at ({row}, {col})")
            }
            Violation::ParityFailure {
                curve,
                self_int,
                canon_int,
            } => write!(
                f,
                "adjunction parity fails for {curve}: {self_int} + {canon_int} is odd"
            ),
            Violation::DegeneratePoint { point } => {
                write!(f, "point {point} must lie on two distinct curves")
            }
            Violation::NonPositiveResidueDegree { point, degree } => {
                write!(f, "point {point} has non-positive residue degree {degree}")
            }
            Violation::IncidenceMismatch {
                a,
                b,
                matrix,
                incidence_sum,
            } => write!(
                f,
                "incidence sum {incidence_sum} for ({a}, {b}) differs from matrix entry {matrix}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Configuration {
    /// Assembles a configuration, checking only shapes and index ranges.
    /// Numerical invariants are checked by [`validate_configuration`].
    pub fn from_parts(
        curves: Vec<Curve>,
        matrix: Vec<Vec<i64>>,
        points: Vec<IncidencePoint>,
    ) -> Result<Self> {
        let n = curves.len();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Structural(format!(
                "intersection matrix must be {n}x{n} to match the curve list"
            )));
        }
        for p in &points {
            if p.curves.iter().any(|&c| c >= n) {
                return Err(Error::Structural(format!(
                    "point {} references a curve index out of range",
                    p.id
                )));
            }
        }
        Ok(Configuration {
            curves,
            matrix,
            points,
            chi_structure: None,
            canonical_self_int: None,
        })
    }

    /// Like [`Configuration::from_parts`] but rejects anything `validate_configuration` flags.
    pub fn validated(
        curves: Vec<Curve>,
        matrix: Vec<Vec<i64>>,
        points: Vec<IncidencePoint>,
    ) -> Result<Self> {
        let config = Self::from_parts(curves, matrix, points)?;
        config.ensure_valid()?;
        Ok(config)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_configuration(self);
        match report.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidInput(v.to_string())),
        }
    }

    pub fn with_chi_structure(mut self, chi: Option<i64>) -> Self {
        self.chi_structure = chi;
        self
    }

    pub fn with_canonical_self_int(mut self, k2: Option<i64>) -> Self {
        self.canonical_self_int = k2;
        self
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn curve(&self, i: usize) -> &Curve {
        &self.curves[i]
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.matrix[i][j]
    }

    pub fn points(&self) -> &[IncidencePoint] {
        &self.points
    }

    pub fn point(&self, p: usize) -> &IncidencePoint {
        &self.points[p]
    }

    pub fn chi_structure(&self) -> Option<i64> {
        self.chi_structure
    }

    /// `K_W²`, when declared.
    pub fn canonical_self_int(&self) -> Option<i64> {
        self.canonical_self_int
    }

    pub fn canon(&self, i: usize) -> i64 {
        self.curves[i].canon_int
    }

    pub fn curve_index(&self, id: &str) -> Option<usize> {
        self.curves.iter().position(|c| c.id == id)
    }

    pub fn point_index(&self, id: &str) -> Option<usize> {
        self.points.iter().position(|p| p.id == id)
    }

    pub fn big_matrix(&self) -> IntMatrix {
        self.matrix
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    /// Incidence points lying on curve `i`, in input order.
    pub fn points_on(&self, i: usize) -> impl Iterator<Item = (usize, &IncidencePoint)> {
        self.points
            .iter()
            .enumerate()
            .filter(move |(_, p)| p.lies_on(i))
    }

    /// Curves meeting `i` (positive off-diagonal entry), ascending.
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&j| j != i && self.matrix[i][j] > 0)
    }

    /// Connected components of `subset` in the dual graph, each sorted, ordered by
    /// smallest member.
    pub fn components(&self, subset: &BTreeSet<usize>) -> Vec<Vec<usize>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in subset {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(c) = queue.pop_front() {
                for nb in self.neighbours(c) {
                    if subset.contains(&nb) && seen.insert(nb) {
                        comp.push(nb);
                        queue.push_back(nb);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    fn check_curve(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::Structural(format!("curve index {i} out of range")));
        }
        Ok(())
    }

    fn fresh_curve_id(&self, base: String) -> String {
        let mut id = base;
        while self.curve_index(&id).is_some() {
            id.push('\'');
        }
        id
    }

    fn fresh_point_id(&self, base: String, taken: &[String]) -> String {
        let mut id = base;
        while self.point_index(&id).is_some() || taken.contains(&id) {
            id.push('\'');
        }
        id
    }
}

pub fn validate_configuration(config: &Configuration) -> ValidationReport {
    let mut violations = Vec::new();
    let n = config.len();
    let name = |i: usize| config.curves[i].id.clone();

    let mut ids = BTreeSet::new();
    for c in &config.curves {
        if !ids.insert(c.id.as_str()) {
            violations.push(Violation::DuplicateCurveId { id: c.id.clone() });
        }
    }
    let mut pids = BTreeSet::new();
    for p in &config.points {
        if !pids.insert(p.id.as_str()) {
            violations.push(Violation::DuplicatePointId { id: p.id.clone() });
        }
    }
    for i in 0..n {
        let c = &config.curves[i];
        if config.matrix[i][i] != c.self_int {
            violations.push(Violation::DiagonalMismatch {
                curve: name(i),
                matrix: config.matrix[i][i],
                self_int: c.self_int,
            });
        }
        if (c.self_int + c.canon_int) % 2 != 0 {
            violations.push(Violation::ParityFailure {
                curve: name(i),
                self_int: c.self_int,
                canon_int: c.canon_int,
            });
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            if j > i && config.matrix[i][j] != config.matrix[j][i] {
                violations.push(Violation::Asymmetric {
                    row: name(i),
                    col: name(j),
                });
            }
            if config.matrix[i][j] < 0 {
                violations.push(Violation::NegativeOffDiagonal {
                    row: name(i),
                    col: name(j),
                    value: config.matrix[i][j],
                });
            }
        }
    }
    let mut sums: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for p in &config.points {
        let [a, b] = p.curves;
        if a == b {
            violations.push(Violation::DegeneratePoint { point: p.id.clone() });
            continue;
        }
        if p.residue_degree <= 0 {
            violations.push(Violation::NonPositiveResidueDegree {
                point: p.id.clone(),
                degree: p.residue_degree,
            });
        }
        *sums.entry((a.min(b), a.max(b))).or_default() += p.residue_degree;
    }
    for i in 0..n {
        for j in i + 1..n {
            let s = sums.get(&(i, j)).copied().unwrap_or(0);
            if s != config.matrix[i][j] {
                violations.push(Violation::IncidenceMismatch {
                    a: name(i),
                    b: name(j),
                    matrix: config.matrix[i][j],
                    incidence_sum: s,
                });
            }
        }
    }
    ValidationReport { violations }
}

/// An R-divisor `Σ a_i C_i` on the ambient surface; zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Divisor {
    coeffs: BTreeMap<usize, Q>,
}

/// Comparison used by [`Divisor::filter`], as in `Δ^{≤a}` or `Δ^{≥a}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    Below,
    AtMost,
    AtLeast,
    Above,
}

impl Divisor {
    pub fn zero() -> Self {
        Divisor::default()
    }

    pub fn curve(i: usize) -> Self {
        Divisor::from_terms([(i, int(1))])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Q)>) -> Self {
        let mut d = Divisor::zero();
        for (i, q) in terms {
            d.add_term(i, q);
        }
        d
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(&i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn set(&mut self, i: usize, value: Q) {
        if value.is_zero() {
            self.coeffs.remove(&i);
        } else {
            self.coeffs.insert(i, value);
        }
    }

    pub fn add_term(&mut self, i: usize, value: Q) {
        let v = self.coeff(i) + value;
        self.set(i, v);
    }

    pub fn remove(&mut self, i: usize) -> Q {
        self.coeffs.remove(&i).unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Q)> {
        self.coeffs.iter().map(|(&i, q)| (i, q))
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.coeffs.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|q| q.is_positive())
    }

    pub fn max_index(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn plus(&self, other: &Divisor) -> Divisor {
        let mut d = self.clone();
        for (i, q) in other.iter() {
            d.add_term(i, q.clone());
        }
        d
    }

    pub fn minus(&self, other: &Divisor) -> Divisor {
        self.plus(&other.scaled(&int(-1)))
    }

    pub fn scaled(&self, s: &Q) -> Divisor {
        Divisor::from_terms(self.iter().map(|(i, q)| (i, q * s)))
    }

    /// Keeps the terms whose coefficient compares to `a` as requested.
    pub fn filter(&self, mode: Threshold, a: &Q) -> Divisor {
        Divisor::from_terms(
            self.iter()
                .filter(|(_, q)| match mode {
                    Threshold::Below => *q < a,
                    Threshold::AtMost => *q <= a,
                    Threshold::AtLeast => *q >= a,
                    Threshold::Above => *q > a,
                })
                .map(|(i, q)| (i, q.clone())),
        )
    }

    pub fn round_down(&self) -> Divisor {
        Divisor::from_terms(self.iter().map(|(i, q)| (i, q.floor())))
    }

    pub fn round_up(&self) -> Divisor {
        Divisor::from_terms(self.iter().map(|(i, q)| (i, q.ceil())))
    }

    pub fn fractional_part(&self) -> Divisor {
        Divisor::from_terms(self.iter().map(|(i, q)| (i, q - q.floor())))
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|q| q.is_integer())
    }

    /// Drops the listed curves (push-forward along their contraction).
    pub fn without(&self, curves: &BTreeSet<usize>) -> Divisor {
        Divisor::from_terms(
            self.iter()
                .filter(|(i, _)| !curves.contains(i))
                .map(|(i, q)| (i, q.clone())),
        )
    }

    pub fn restricted_to(&self, curves: &BTreeSet<usize>) -> Divisor {
        Divisor::from_terms(
            self.iter()
                .filter(|(i, _)| curves.contains(i))
                .map(|(i, q)| (i, q.clone())),
        )
    }
}

impl FromIterator<(usize, Q)> for Divisor {
    fn from_iter<T: IntoIterator<Item = (usize, Q)>>(iter: T) -> Self {
        Divisor::from_terms(iter)
    }
}

pub fn check_divisor(config: &Configuration, d: &Divisor) -> Result<()> {
    match d.max_index() {
        Some(i) => config.check_curve(i),
        None => Ok(()),
    }
}

/// `D · C_i` on the ambient surface.
pub fn intersect_curve(config: &Configuration, d: &Divisor, i: usize) -> Q {
    d.iter()
        .map(|(j, q)| q * int(config.matrix[j][i]))
        .sum()
}

/// `K_W · D`.
pub fn canonical_degree(config: &Configuration, d: &Divisor) -> Q {
    d.iter().map(|(j, q)| q * int(config.canon(j))).sum()
}

pub fn intersect(config: &Configuration, d1: &Divisor, d2: &Divisor) -> Result<Q> {
    check_divisor(config, d1)?;
    check_divisor(config, d2)?;
    Ok(d1
        .iter()
        .map(|(i, a)| a * intersect_curve(config, d2, i))
        .sum())
}

/// Negative definiteness of the principal submatrix on `subset`, with certificate.
pub fn is_negative_definite(
    config: &Configuration,
    subset: &[usize],
) -> Result<DefinitenessCertificate> {
    if subset.is_empty() {
        return Err(Error::Argument(
            "negative definiteness needs a nonempty curve set".into(),
        ));
    }
    for &i in subset {
        config.check_curve(i)?;
    }
    let sub = linalg::principal_submatrix(&config.big_matrix(), subset);
    Ok(linalg::negative_definite_certificate(&sub))
}

/// Result of blowing up an incidence point.
#[derive(Debug, Clone)]
pub struct Blowup {
    pub config: Configuration,
    pub exceptional: usize,
    pub branches: [usize; 2],
    pub residue_degree: i64,
}

impl Blowup {
    /// Total transform: the exceptional curve picks up the sum of the two branch coefficients.
    pub fn pullback(&self, d: &Divisor) -> Divisor {
        let mut out = d.clone();
        let [a, b] = self.branches;
        out.set(self.exceptional, d.coeff(a) + d.coeff(b));
        out
    }
}

/// Blows up the node `point`, of residue degree `d`, on `C_i ∩ C_j`.
///
/// The exceptional curve is appended last, so existing curve indices are stable.
pub fn blowup_at_node(config: &Configuration, point: usize) -> Result<Blowup> {
    let p = config
        .points
        .get(point)
        .ok_or_else(|| Error::Argument(format!("unknown point index {point}")))?
        .clone();
    let [ci, cj] = p.curves;
    let d = p.residue_degree;
    let n = config.len();

    let e_id = config.fresh_curve_id(format!("E_{}", p.id));
    let mut curves = config.curves.clone();
    for &c in &[ci, cj] {
        curves[c].self_int -= d;
        curves[c].canon_int += d;
    }
    curves.push(Curve::new(e_id, -d, -d));

    let mut matrix: Vec<Vec<i64>> = config
        .matrix
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.push(0);
            r
        })
        .collect();
    matrix.push(vec![0; n + 1]);
    matrix[ci][ci] -= d;
    matrix[cj][cj] -= d;
    matrix[ci][cj] -= d;
    matrix[cj][ci] -= d;
    matrix[n][n] = -d;
    for &c in &[ci, cj] {
        matrix[c][n] = d;
        matrix[n][c] = d;
    }

    let mut points: Vec<IncidencePoint> = config
        .points
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != point)
        .map(|(_, q)| q.clone())
        .collect();
    let first = config.fresh_point_id(format!("{}_{}", p.id, config.curves[ci].id), &[]);
    let second = config.fresh_point_id(format!("{}_{}", p.id, config.curves[cj].id), &[first.clone()]);
    points.push(IncidencePoint::new(first, ci, n, d));
    points.push(IncidencePoint::new(second, cj, n, d));

    let new = Configuration {
        curves,
        matrix,
        points,
        chi_structure: config.chi_structure,
        canonical_self_int: config.canonical_self_int.map(|k2| k2 - d),
    };
    Ok(Blowup {
        config: new,
        exceptional: n,
        branches: [ci, cj],
        residue_degree: d,
    })
}

/// A point-supported divisor `Σ a_i P_i` on a regular curve.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CurveDivisor {
    pub host: String,
    pub terms: BTreeMap<String, PointTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointTerm {
    pub residue_degree: i64,
    #[serde(serialize_with = "crate::rational::ser_q")]
    pub coefficient: Q,
}

impl CurveDivisor {
    pub fn new(host: impl Into<String>) -> Self {
        CurveDivisor {
            host: host.into(),
            terms: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, point: impl Into<String>, residue_degree: i64, coefficient: Q) {
        let entry = self.terms.entry(point.into()).or_insert(PointTerm {
            residue_degree,
            coefficient: Q::zero(),
        });
        entry.coefficient += coefficient;
    }

    pub fn normalized(mut self) -> Self {
        self.terms.retain(|_, t| !t.coefficient.is_zero());
        self
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &Q> {
        self.terms.values().map(|t| &t.coefficient)
    }
}

/// `deg_k D = Σ a_i · dim_k k(P_i)`.
pub fn degree_on_curve(d: &CurveDivisor) -> Q {
    d.terms
        .values()
        .map(|t| &t.coefficient * int(t.residue_degree))
        .sum()
}
