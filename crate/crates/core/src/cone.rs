//! Relative curve classes, extremal rays, positivity and the fibre lemma.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::discrepancy::{class_dot_curve, Model, NumClass, Pair};
use crate::error::{Error, Result};
use crate::lattice::{self, Configuration, Divisor};
use crate::linalg::{self, dot};
use crate::rational::{int, Q};
use crate::simplex::{feasibility, Feasibility};

/// A morphism `π: X → S`, recorded by which curves are vertical over which base point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fibration {
    target_dim: u8,
    base_points: Vec<String>,
    /// Base point of each vertical curve (all curves when `S` is a point).
    vertical: BTreeMap<usize, usize>,
    /// `π*(s) = Σ c_i C_i` for declared base points.
    fiber_classes: BTreeMap<usize, Divisor>,
}

impl Fibration {
    pub fn new(
        config: &Configuration,
        target_dim: u8,
        base_points: Vec<String>,
        vertical: BTreeMap<usize, usize>,
        fiber_classes: BTreeMap<usize, Divisor>,
    ) -> Result<Fibration> {
        if target_dim > 2 {
            return Err(Error::InvalidInput(format!("target_dim must be 0, 1 or 2, got {target_dim}")));
        }
        let n = config.len();
        let mut base_points = base_points;
        let mut vertical = vertical;
        if target_dim == 0 {
            if base_points.is_empty() {
                base_points.push("pt".into());
            }
            if base_points.len() != 1 {
                return Err(Error::InvalidInput("a fibration over a point has one base point".into()));
            }
            if vertical.values().any(|&s| s != 0) {
                return Err(Error::InvalidInput("all curves lie over the single base point".into()));
            }
            vertical = (0..n).map(|i| (i, 0)).collect();
        }
        for (&c, &s) in &vertical {
            if c >= n {
                return Err(Error::Structural(format!("vertical curve index {c} out of range")));
            }
            if s >= base_points.len() {
                return Err(Error::Structural(format!("base point index {s} out of range")));
            }
        }
        for (&s, f) in &fiber_classes {
            if s >= base_points.len() {
                return Err(Error::Structural(format!("fiber class for unknown base point index {s}")));
            }
            lattice::check_divisor(config, f)?;
            for (c, q) in f.iter() {
                if !q.is_integer() || !q.is_positive() {
                    return Err(Error::InvalidInput(format!(
                        "fiber class over {} needs positive integer coefficients, got {q} on {}",
                        base_points[s],
                        config.curve(c).id
                    )));
                }
                if vertical.get(&c) != Some(&s) {
                    return Err(Error::InvalidInput(format!(
                        "fiber class over {} involves {}, which is not vertical over it",
                        base_points[s],
                        config.curve(c).id
                    )));
                }
            }
        }
        Ok(Fibration {
            target_dim,
            base_points,
            vertical,
            fiber_classes,
        })
    }

    /// The structure map to a point.
    pub fn over_point(config: &Configuration) -> Fibration {
        Fibration::new(config, 0, Vec::new(), BTreeMap::new(), BTreeMap::new()).expect("valid")
    }

    /// Birational structure map contracting `curves`.
    pub fn birational(config: &Configuration, curves: &BTreeSet<usize>) -> Result<Fibration> {
        let groups = config.components(curves);
        let base_points = (0..groups.len()).map(|k| format!("x{k}")).collect();
        let vertical = groups
            .iter()
            .enumerate()
            .flat_map(|(k, g)| g.iter().map(move |&c| (c, k)))
            .collect();
        Fibration::new(config, 2, base_points, vertical, BTreeMap::new())
    }

    pub fn target_dim(&self) -> u8 {
        self.target_dim
    }

    pub fn base_points(&self) -> &[String] {
        &self.base_points
    }

    pub fn base_point_index(&self, id: &str) -> Option<usize> {
        self.base_points.iter().position(|b| b == id)
    }

    pub fn vertical_map(&self) -> &BTreeMap<usize, usize> {
        &self.vertical
    }

    pub fn fiber_classes(&self) -> &BTreeMap<usize, Divisor> {
        &self.fiber_classes
    }

    pub fn is_vertical(&self, curve: usize) -> bool {
        self.vertical.contains_key(&curve)
    }

    pub fn base_of(&self, curve: usize) -> Option<usize> {
        self.vertical.get(&curve).copied()
    }

    /// All ambient curves lying over `s`, contracted or not.
    pub fn curves_over(&self, s: usize) -> Vec<usize> {
        self.vertical
            .iter()
            .filter(|(_, &b)| b == s)
            .map(|(&c, _)| c)
            .collect()
    }

    /// Vertical curves still present on the model, ascending.
    pub fn vertical_curves(&self, model: &Model) -> Vec<usize> {
        self.vertical
            .keys()
            .copied()
            .filter(|&c| !model.is_contracted(c))
            .collect()
    }

    /// Checks the fibration against the model it is used with.
    ///
    /// Over a curve, every declared fibre class is orthogonal to its components
    /// and the fibre is connected, negative semi-definite with the class spanning
    /// the kernel. Over a surface, vertical and contracted curves together form
    /// negative-definite components.
    pub fn validate(&self, model: &Model) -> Result<()> {
        let config = model.config();
        match self.target_dim {
            1 => {
                for (&s, f) in &self.fiber_classes {
                    let over = self.curves_over(s);
                    let name = &self.base_points[s];
                    if f.support() != over.iter().copied().collect() {
                        return Err(Error::InvalidInput(format!(
                            "fiber class over {name} must involve every curve over it"
                        )));
                    }
                    for &c in &over {
                        if !lattice::intersect_curve(config, f, c).is_zero() {
                            return Err(Error::InvalidInput(format!(
                                "fiber class over {name} meets {} nontrivially",
                                config.curve(c).id
                            )));
                        }
                    }
                    let set: BTreeSet<usize> = over.iter().copied().collect();
                    if config.components(&set).len() != 1 {
                        return Err(Error::InvalidInput(format!("fibre over {name} is disconnected")));
                    }
                    if !fibre_is_semi_negative(config, &over) {
                        return Err(Error::InvariantViolation(format!(
                            "fibre over {name} is not negative semi-definite"
                        )));
                    }
                }
                Ok(())
            }
            2 => {
                let mut set: BTreeSet<usize> = self.vertical.keys().copied().collect();
                set.extend(model.contracted().iter().copied());
                let big = config.big_matrix();
                for comp in config.components(&set) {
                    let sub = linalg::principal_submatrix(&big, &comp);
                    if !linalg::negative_definite_certificate(&sub).is_negative_definite() {
                        return Err(Error::InvalidInput(
                            "curves over a surface must form negative-definite components".into(),
                        ));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Zariski's lemma check on a connected fibre with `F·C_i = 0`: all principal
/// minors for small fibres, otherwise definiteness after removing one component.
fn fibre_is_semi_negative(config: &Configuration, over: &[usize]) -> bool {
    let big = config.big_matrix();
    let sub = linalg::principal_submatrix(&big, over);
    if over.len() <= 10 {
        return linalg::negative_semidefinite_by_minors(&sub);
    }
    let rest: BTreeSet<usize> = over[1..].iter().copied().collect();
    config.components(&rest).into_iter().all(|comp| {
        linalg::negative_definite_certificate(&linalg::principal_submatrix(&big, &comp))
            .is_negative_definite()
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveClasses {
    /// Pairing basis: the curves present on the model.
    pub basis: Vec<usize>,
    pub curves: Vec<usize>,
    /// `classes[k][b] = C_k · D_b` on the model.
    pub classes: Vec<Vec<Q>>,
    pub rho: usize,
}

impl CurveClasses {
    pub fn class_of(&self, curve: usize) -> Option<&[Q]> {
        self.curves
            .iter()
            .position(|&c| c == curve)
            .map(|k| self.classes[k].as_slice())
    }
}

/// Class vectors of the vertical curves on the model and `ρ(X/S)`.
pub fn curve_classes(model: &Model, fib: &Fibration) -> Result<CurveClasses> {
    let config = model.config();
    let basis = model.basis();
    let curves = fib.vertical_curves(model);
    let mut classes = Vec::with_capacity(curves.len());
    for &c in &curves {
        let pulled = model.pullback_class(&NumClass::divisor(Divisor::curve(c)))?;
        let v: Vec<Q> = basis
            .iter()
            .map(|&b| class_dot_curve(config, &pulled, b))
            .collect();
        if v.iter().all(Zero::is_zero) {
            return Err(Error::BasisInsufficient(format!(
                "{} pairs to zero with every curve; add a separating horizontal divisor",
                config.curve(c).id
            )));
        }
        classes.push(v);
    }
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            if let Some(t) = proportionality(&classes[j], &classes[i]) {
                if t.is_negative() {
                    return Err(Error::BasisInsufficient(format!(
                        "{} and {} have opposite classes; add a separating horizontal divisor",
                        config.curve(curves[i]).id,
                        config.curve(curves[j]).id
                    )));
                }
            }
        }
    }
    let rho = linalg::rank(&classes);
    Ok(CurveClasses {
        basis,
        curves,
        classes,
        rho,
    })
}

/// `t` with `a = t·b`, when it exists (`b` nonzero).
fn proportionality(a: &[Q], b: &[Q]) -> Option<Q> {
    let k = b.iter().position(|x| !x.is_zero())?;
    let t = &a[k] / &b[k];
    a.iter().zip(b).all(|(x, y)| *x == &t * y).then_some(t)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtremalRay {
    pub curve: usize,
    #[serde(serialize_with = "crate::rational::ser_q_vec")]
    pub class: Vec<Q>,
    /// `(K + Δ)·C` on the model.
    #[serde(serialize_with = "crate::rational::ser_q")]
    pub log_canonical_degree: Q,
    /// `C²` on the model.
    #[serde(serialize_with = "crate::rational::ser_q")]
    pub self_intersection: Q,
    /// Separating functional `y`: `y·v > 0` on this class, `≤ 0` on every other
    /// generator off the ray.
    #[serde(serialize_with = "crate::rational::ser_q_vec")]
    pub separator: Vec<Q>,
}

/// Extremal rays of the cone generated by the vertical curve classes, with a
/// separating functional each. The lowest curve index represents a ray.
pub fn extremal_rays(model: &Model, classes: &CurveClasses) -> Result<Vec<(usize, Vec<Q>)>> {
    let config = model.config();
    let gens = &classes.classes;
    if gens.is_empty() {
        return Ok(Vec::new());
    }
    // pointed: no λ ≥ 0 with Σλ = 1 and Σ λ v = 0
    let dim = classes.basis.len();
    let lifted: Vec<Vec<Q>> = gens
        .iter()
        .map(|v| {
            let mut w = v.clone();
            w.push(int(1));
            w
        })
        .collect();
    let mut target = vec![Q::zero(); dim];
    target.push(int(1));
    if let Feasibility::Feasible(lambda) = feasibility(&lifted, &target) {
        let names: Vec<String> = lambda
            .iter()
            .zip(&classes.curves)
            .filter(|(l, _)| l.is_positive())
            .map(|(l, &c)| format!("{}·{}", crate::rational::format_q(l), config.curve(c).id))
            .collect();
        return Err(Error::ConeContainsLine(format!(
            "{} sums to zero",
            names.join(" + ")
        )));
    }
    let mut rays = Vec::new();
    for (k, v) in gens.iter().enumerate() {
        let same_ray = |w: &Vec<Q>| proportionality(w, v).is_some_and(|t| t.is_positive());
        if gens[..k].iter().any(same_ray) {
            continue;
        }
        let others: Vec<Vec<Q>> = gens.iter().filter(|w| !same_ray(w)).cloned().collect();
        if let Feasibility::Infeasible(y) = feasibility(&others, v) {
            rays.push((classes.curves[k], y));
        }
    }
    Ok(rays)
}

/// `(K+Δ)`-negative extremal rays among the vertical curves, ascending by curve.
pub fn negative_extremal_rays(pair: &Pair, fib: &Fibration) -> Result<Vec<ExtremalRay>> {
    let model = pair.model();
    let classes = curve_classes(model, fib)?;
    let lc_class = pair.log_canonical_class();
    let mut out = Vec::new();
    for (curve, separator) in extremal_rays(model, &classes)? {
        let kd = model.dot_curve(&lc_class, curve)?;
        if !kd.is_negative() {
            continue;
        }
        out.push(ExtremalRay {
            curve,
            class: classes.class_of(curve).expect("vertical").to_vec(),
            log_canonical_degree: kd,
            self_intersection: model.curve_square(curve)?,
            separator,
        });
    }
    Ok(out)
}

/// Checks a ray certificate against the class vectors alone.
pub fn verify_separator(classes: &CurveClasses, ray: &ExtremalRay) -> bool {
    if !dot(&ray.separator, &ray.class).is_positive() {
        return false;
    }
    classes.classes.iter().all(|w| {
        proportionality(w, &ray.class).is_some_and(|t| t.is_positive())
            || !dot(&ray.separator, w).is_positive()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Positivity {
    pub nef: bool,
    pub ample: bool,
    pub big: bool,
}

/// Relative nefness, ampleness and bigness of a class on the model over `S`.
pub fn positivity(model: &Model, class: &NumClass, fib: &Fibration) -> Result<Positivity> {
    let vertical = fib.vertical_curves(model);
    let degrees: Vec<Q> = vertical
        .iter()
        .map(|&c| model.dot_curve(class, c))
        .collect::<Result<_>>()?;
    let nef = degrees.iter().all(|d| !d.is_negative());
    let strict = degrees.iter().all(|d| d.is_positive());
    let (ample, big) = match fib.target_dim() {
        0 => {
            let square = model.intersect(class, class)?;
            (strict && square.is_positive(), nef && square.is_positive())
        }
        1 => {
            let pulled = model.pullback_class(class)?;
            let on_fibres: Vec<Q> = fib
                .fiber_classes()
                .values()
                .map(|f| {
                    f.iter()
                        .map(|(c, q)| q * class_dot_curve(model.config(), &pulled, c))
                        .sum()
                })
                .collect();
            let big = nef && !on_fibres.is_empty() && on_fibres.iter().all(|d: &Q| d.is_positive());
            (strict, big)
        }
        _ => (strict, true),
    };
    Ok(Positivity { nef, ample, big })
}

/// For `D = Σ d_i C_i` on the fibre over `s` with some `d_i > 0`, the first
/// component (ascending) with `d_j > 0` and `C_j·D ≤ 0`.
pub fn fiber_seminegative_witness(
    config: &Configuration,
    fib: &Fibration,
    s: usize,
    d: &Divisor,
) -> Result<usize> {
    if s >= fib.base_points().len() {
        return Err(Error::Argument(format!("unknown base point index {s}")));
    }
    lattice::check_divisor(config, d)?;
    let over = fib.curves_over(s);
    if let Some(c) = d.support().into_iter().find(|c| !over.contains(c)) {
        return Err(Error::Argument(format!(
            "{} is not a component of the fibre over {}",
            config.curve(c).id,
            fib.base_points()[s]
        )));
    }
    if !d.iter().any(|(_, q)| q.is_positive()) {
        return Err(Error::Precondition("D ≤ 0; the lemma needs a positive coefficient".into()));
    }
    over.iter()
        .copied()
        .find(|&j| d.coeff(j).is_positive() && !lattice::intersect_curve(config, d, j).is_positive())
        .ok_or_else(|| {
            Error::InvariantViolation(format!(
                "no component of the fibre over {} satisfies d_j > 0 and C_j·D ≤ 0",
                fib.base_points()[s]
            ))
        })
}

/// Integer fibre class check helper used by reports: `F_s · C` for each curve over `s`.
pub fn fibre_degrees(config: &Configuration, f: &Divisor, over: &[usize]) -> Vec<BigInt> {
    over.iter()
        .map(|&c| lattice::intersect_curve(config, f, c).to_integer())
        .collect()
}
