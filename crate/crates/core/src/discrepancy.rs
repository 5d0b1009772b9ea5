//! Contracted models, Mumford pullback, crepant coefficients and singularity classes.
//!
//! A [`Model`] is the normal surface `X` obtained from the ambient regular
//! surface `W` by contracting a negative-definite set of curves. Everything on
//! `X` is computed on `W`: a class on `X` is represented by its pullback, the
//! unique correction supported on the contracted curves that is orthogonal to
//! each of them.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{self, check_divisor, Configuration, Divisor};
use crate::linalg::{self, DefinitenessCertificate};
use crate::rational::{int, Q};

/// A numerical class `k·K + D`, `D` an R-divisor on the curves of the configuration.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NumClass {
    pub canonical: Q,
    pub divisor: Divisor,
}

impl NumClass {
    pub fn divisor(d: Divisor) -> Self {
        NumClass {
            canonical: Q::zero(),
            divisor: d,
        }
    }

    /// `K + D`.
    pub fn log_canonical(d: Divisor) -> Self {
        NumClass {
            canonical: Q::one(),
            divisor: d,
        }
    }

    pub fn negated(&self) -> Self {
        NumClass {
            canonical: -self.canonical.clone(),
            divisor: self.divisor.scaled(&int(-1)),
        }
    }
}

/// `(k K + D) · C_i` on the ambient surface.
pub fn class_dot_curve(config: &Configuration, class: &NumClass, i: usize) -> Q {
    &class.canonical * int(config.canon(i)) + lattice::intersect_curve(config, &class.divisor, i)
}

/// Intersection of two classes on the ambient surface. Needs `K_W²` only when both
/// classes carry a canonical part.
pub fn class_intersect(config: &Configuration, a: &NumClass, b: &NumClass) -> Result<Q> {
    check_divisor(config, &a.divisor)?;
    check_divisor(config, &b.divisor)?;
    let mut total = lattice::intersect(config, &a.divisor, &b.divisor)?;
    total += &a.canonical * lattice::canonical_degree(config, &b.divisor);
    total += &b.canonical * lattice::canonical_degree(config, &a.divisor);
    let kk = &a.canonical * &b.canonical;
    if !kk.is_zero() {
        let k2 = config.canonical_self_int().ok_or_else(|| {
            Error::Argument("K² is needed here but canonical_self_int was not declared".into())
        })?;
        total += kk * int(k2);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub curves: Vec<usize>,
    pub certificate: DefinitenessCertificate,
}

/// `W` together with a contracted curve set: the normal surface `X` below `W`.
#[derive(Debug, Clone)]
pub struct Model {
    config: Configuration,
    contracted: BTreeSet<usize>,
    components: Vec<Component>,
    q_factorial: bool,
    /// `pull[e][b]`: coefficient of contracted `E_e` in the pullback of curve `b`.
    pull: Vec<Vec<Q>>,
    /// Coefficient of `E_e` in the pullback of `K_X`.
    pull_k: Vec<Q>,
}

impl Model {
    /// Rejects contracted sets with a component that is not negative definite.
    pub fn new(config: Configuration, contracted: BTreeSet<usize>, q_factorial: bool) -> Result<Model> {
        let n = config.len();
        if let Some(&bad) = contracted.iter().find(|&&i| i >= n) {
            return Err(Error::Structural(format!("contracted curve index {bad} out of range")));
        }
        let big = config.big_matrix();
        let mut components = Vec::new();
        let mut pull = vec![vec![Q::zero(); n]; n];
        let mut pull_k = vec![Q::zero(); n];
        let basis: Vec<usize> = (0..n).filter(|i| !contracted.contains(i)).collect();
        for curves in config.components(&contracted) {
            let sub = linalg::principal_submatrix(&big, &curves);
            let certificate = linalg::negative_definite_certificate(&sub);
            if !certificate.is_negative_definite() {
                let ids: Vec<&str> = curves.iter().map(|&c| config.curve(c).id.as_str()).collect();
                return Err(Error::InvalidInput(format!(
                    "contracted component {{{}}} is not negative definite",
                    ids.join(", ")
                )));
            }
            // right-hand sides: -(C_b · E) for every basis curve, then -(K · E)
            let mut rhs: Vec<Vec<Q>> = basis
                .iter()
                .map(|&b| curves.iter().map(|&e| -int(config.entry(b, e))).collect())
                .collect();
            rhs.push(curves.iter().map(|&e| -int(config.canon(e))).collect());
            let sol = linalg::solve_int_system(&sub, &rhs)
                .expect("negative-definite block is nonsingular");
            for (col, &b) in basis.iter().enumerate() {
                for (row, &e) in curves.iter().enumerate() {
                    pull[e][b] = sol[col][row].clone();
                }
            }
            for (row, &e) in curves.iter().enumerate() {
                pull_k[e] = sol[basis.len()][row].clone();
            }
            components.push(Component { curves, certificate });
        }
        Ok(Model {
            config,
            contracted,
            components,
            q_factorial,
            pull,
            pull_k,
        })
    }

    /// Nothing contracted: `X = W`.
    pub fn ambient(config: Configuration) -> Model {
        Model::new(config, BTreeSet::new(), true).expect("empty contracted set")
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn contracted(&self) -> &BTreeSet<usize> {
        &self.contracted
    }

    pub fn is_contracted(&self, i: usize) -> bool {
        self.contracted.contains(&i)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn q_factorial(&self) -> bool {
        self.q_factorial
    }

    /// Curves still present on the model, ascending.
    pub fn basis(&self) -> Vec<usize> {
        (0..self.config.len()).filter(|i| !self.is_contracted(*i)).collect()
    }

    /// The model with `curve` contracted as well.
    pub fn contract(&self, curve: usize) -> Result<Model> {
        let mut contracted = self.contracted.clone();
        contracted.insert(curve);
        Model::new(self.config.clone(), contracted, self.q_factorial)
    }

    fn check_on_model(&self, d: &Divisor) -> Result<()> {
        check_divisor(&self.config, d)?;
        if let Some(i) = d.support().into_iter().find(|i| self.is_contracted(*i)) {
            return Err(Error::Argument(format!(
                "divisor involves contracted curve {}",
                self.config.curve(i).id
            )));
        }
        Ok(())
    }

    /// Exceptional correction `Σ e_j E_j` of the pullback of a class on the model.
    pub fn correction(&self, class: &NumClass) -> Result<Divisor> {
        self.check_on_model(&class.divisor)?;
        Ok(self
            .contracted
            .iter()
            .map(|&e| {
                let mut c = &class.canonical * &self.pull_k[e];
                for (b, q) in class.divisor.iter() {
                    c += q * &self.pull[e][b];
                }
                (e, c)
            })
            .collect())
    }

    /// Pullback to `W`; the canonical part stays symbolic as `k K_W`.
    pub fn pullback_class(&self, class: &NumClass) -> Result<NumClass> {
        let corr = self.correction(class)?;
        Ok(NumClass {
            canonical: class.canonical.clone(),
            divisor: class.divisor.plus(&corr),
        })
    }

    /// `class · C` on the model for a curve `C` still present on it.
    pub fn dot_curve(&self, class: &NumClass, curve: usize) -> Result<Q> {
        if self.is_contracted(curve) {
            return Err(Error::Argument(format!(
                "curve {} is contracted on this model",
                self.config.curve(curve).id
            )));
        }
        let pulled = self.pullback_class(class)?;
        Ok(class_dot_curve(&self.config, &pulled, curve))
    }

    /// Intersection of two classes on the model (projection formula through `W`).
    pub fn intersect(&self, a: &NumClass, b: &NumClass) -> Result<Q> {
        let pa = self.pullback_class(a)?;
        self.check_on_model(&b.divisor)?;
        class_intersect(&self.config, &pa, b)
    }

    /// Self-intersection of a curve on the model.
    pub fn curve_square(&self, curve: usize) -> Result<Q> {
        self.dot_curve(&NumClass::divisor(Divisor::curve(curve)), curve)
    }
}

/// Mumford pullback of an R-divisor on the model.
pub fn numerical_pullback(model: &Model, d: &Divisor) -> Result<Divisor> {
    Ok(model.pullback_class(&NumClass::divisor(d.clone()))?.divisor)
}

#[derive(Debug, Clone)]
pub struct Pair {
    model: Model,
    boundary: Divisor,
}

impl Pair {
    pub fn new(model: Model, boundary: Divisor) -> Result<Pair> {
        model.check_on_model(&boundary)?;
        if let Some((i, q)) = boundary.iter().find(|(_, q)| q.is_negative()) {
            return Err(Error::InvalidInput(format!(
                "boundary coefficient {q} on {} is negative",
                model.config.curve(i).id
            )));
        }
        Ok(Pair { model, boundary })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn config(&self) -> &Configuration {
        &self.model.config
    }

    pub fn boundary(&self) -> &Divisor {
        &self.boundary
    }

    /// `K + Δ` on the model.
    pub fn log_canonical_class(&self) -> NumClass {
        NumClass::log_canonical(self.boundary.clone())
    }

    /// `Δ_W = f⁻¹_*Δ + Σ e_j E_j` with `K_W + Δ_W ≡_f 0 + f*(K + Δ)`.
    pub fn total_boundary(&self) -> Divisor {
        self.model
            .pullback_class(&self.log_canonical_class())
            .expect("boundary lives on the model")
            .divisor
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrepantEntry {
    pub curve: String,
    #[serde(serialize_with = "crate::rational::ser_q")]
    pub crepant: Q,
    #[serde(serialize_with = "crate::rational::ser_q")]
    pub discrepancy: Q,
    #[serde(serialize_with = "crate::rational::ser_q")]
    pub log_discrepancy: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrepantData {
    /// Crepant coefficient `e_j` per contracted curve.
    pub e: BTreeMap<usize, Q>,
}

impl CrepantData {
    pub fn discrepancy(&self, curve: usize) -> Option<Q> {
        self.e.get(&curve).map(|e| -e.clone())
    }

    pub fn log_discrepancy(&self, curve: usize) -> Option<Q> {
        self.e.get(&curve).map(|e| Q::one() - e)
    }

    pub fn entries(&self, config: &Configuration) -> Vec<CrepantEntry> {
        self.e
            .iter()
            .map(|(&i, e)| CrepantEntry {
                curve: config.curve(i).id.clone(),
                crepant: e.clone(),
                discrepancy: -e.clone(),
                log_discrepancy: Q::one() - e,
            })
            .collect()
    }
}

/// Solves `(K_W + f⁻¹_*Δ + Σ e_j E_j) · E_k = 0` on every contracted component.
pub fn crepant_coefficients(pair: &Pair) -> CrepantData {
    let total = pair.total_boundary();
    CrepantData {
        e: pair
            .model
            .contracted
            .iter()
            .map(|&i| (i, total.coeff(i)))
            .collect(),
    }
}

/// The defining linear system: residual `(K_W + Δ_W)·E_k` per contracted curve.
pub fn crepant_residuals(pair: &Pair, data: &CrepantData) -> Vec<Q> {
    let mut total = pair.boundary.clone();
    for (&i, e) in &data.e {
        total.set(i, e.clone());
    }
    let class = NumClass::log_canonical(total);
    pair.model
        .contracted
        .iter()
        .map(|&k| class_dot_curve(pair.config(), &class, k))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularityClass {
    Terminal,
    Canonical,
    Klt,
    Plt,
    Dlt,
    Lc,
    None,
}

impl SingularityClass {
    pub fn name(self) -> &'static str {
        match self {
            SingularityClass::Terminal => "terminal",
            SingularityClass::Canonical => "canonical",
            SingularityClass::Klt => "klt",
            SingularityClass::Plt => "plt",
            SingularityClass::Dlt => "dlt",
            SingularityClass::Lc => "lc",
            SingularityClass::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub class: SingularityClass,
    pub terminal: bool,
    pub canonical: bool,
    pub klt: bool,
    pub plt: bool,
    pub dlt: bool,
    pub lc: bool,
    pub numerically_lc: bool,
    /// dlt is decided by a sufficient criterion only; see [`classify_pair`].
    pub dlt_status: &'static str,
}

/// Classifies the pair from its crepant data on the given snc model.
///
/// With `b` the coefficients of `Δ_W` on `W`, a blowup of a node of two curves
/// produces `b_i + b_j − 1`, and of a point on one curve `b_i − 1`; these close
/// up under further blowups, so the bounds below, checked on `W` once, decide
/// every class except dlt. dlt is reported when the pair is lc and every
/// exceptional `e_j < 1`, which misses contracted curves lying over snc points
/// of the pair.
pub fn classify_pair(pair: &Pair) -> Result<Classification> {
    let config = pair.config();
    let total = pair.total_boundary();
    let b = |i: usize| total.coeff(i);
    let one = Q::one();
    let curves = 0..config.len();
    let exceptional = || pair.model.contracted.iter().copied();
    let nodes = || config.points().iter().map(|p| (b(p.curves[0]), b(p.curves[1])));

    let lc = curves.clone().all(|i| b(i) <= one);
    let klt = curves.clone().all(|i| b(i) < one);
    let exc_below_one = exceptional().all(|i| b(i) < one);
    let reduced_node = nodes().any(|(x, y)| x == one && y == one);
    let plt = lc && exc_below_one && !reduced_node;
    let dlt = lc && exc_below_one;
    let canonical = lc
        && exceptional().all(|i| !b(i).is_positive())
        && nodes().all(|(x, y)| x + y <= one);
    let terminal = klt
        && exceptional().all(|i| b(i).is_negative())
        && nodes().all(|(x, y)| x + y < one);

    // numerically lc via log discrepancies of W-curves and of the node blowups
    let boundary_effective = pair.boundary.is_effective();
    let numerically_lc = boundary_effective
        && curves.clone().all(|i| !(&one - b(i)).is_negative())
        && nodes().all(|(x, y)| !(&one - (x + y - &one)).is_negative());
    if numerically_lc != lc {
        return Err(Error::InvariantViolation(
            "numerical log canonicity disagrees with the lc bound on the snc model".into(),
        ));
    }

    let class = [
        (terminal, SingularityClass::Terminal),
        (canonical, SingularityClass::Canonical),
        (klt, SingularityClass::Klt),
        (plt, SingularityClass::Plt),
        (dlt, SingularityClass::Dlt),
        (lc, SingularityClass::Lc),
    ]
    .into_iter()
    .find(|(flag, _)| *flag)
    .map(|(_, c)| c)
    .unwrap_or(SingularityClass::None);

    Ok(Classification {
        class,
        terminal,
        canonical,
        klt,
        plt,
        dlt,
        lc,
        numerically_lc,
        dlt_status: "conservative",
    })
}

/// `⌈−Δ_W⌉`: the divisor on `W` whose push-forward cuts out the multiplier ideal.
pub fn multiplier_divisor(pair: &Pair) -> Divisor {
    pair.total_boundary().scaled(&int(-1)).round_up()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum NegativityVerdict {
    /// `−B` is nef over the target and `f_*B ≥ 0`; `B ≥ 0` and each fibre is
    /// inside or disjoint from `Supp B`, as checked.
    EffectiveForced,
    NotApplicable { reason: String },
    Contradiction { reason: String },
}

/// Negativity lemma for `W → X`, `B` an R-divisor on `W`.
pub fn negativity_check(model: &Model, b: &Divisor) -> Result<NegativityVerdict> {
    let source = Model::ambient(model.config.clone());
    negativity_check_relative(&source, &model.contracted, b)
}

/// Negativity lemma for `Y → X`, where `Y` is `source` and `X` contracts `target`
/// (a superset of the curves `source` already contracts). `B` lives on `Y`.
pub fn negativity_check_relative(
    source: &Model,
    target: &BTreeSet<usize>,
    b: &Divisor,
) -> Result<NegativityVerdict> {
    let config = source.config();
    if !source.contracted.is_subset(target) {
        return Err(Error::Argument("target must contract everything the source does".into()));
    }
    source.check_on_model(b)?;
    let exceptional: BTreeSet<usize> = target.difference(&source.contracted).copied().collect();
    let minus_b = NumClass::divisor(b.scaled(&int(-1)));
    for &e in &exceptional {
        if source.dot_curve(&minus_b, e)?.is_negative() {
            return Ok(NegativityVerdict::NotApplicable {
                reason: format!("-B is not nef on {}", config.curve(e).id),
            });
        }
    }
    if !b.without(&exceptional).is_effective() {
        return Ok(NegativityVerdict::NotApplicable {
            reason: "push-forward of B is not effective".into(),
        });
    }
    if !b.is_effective() {
        return Ok(NegativityVerdict::Contradiction {
            reason: "B has a negative coefficient despite -B nef and f_*B effective".into(),
        });
    }
    let support = b.support();
    for fibre in config.components(target) {
        let on_y: Vec<usize> = fibre.iter().copied().filter(|c| exceptional.contains(c)).collect();
        if on_y.is_empty() {
            continue;
        }
        let inside = on_y.iter().filter(|c| support.contains(c)).count();
        if inside == on_y.len() {
            continue;
        }
        if inside > 0 {
            return Ok(NegativityVerdict::Contradiction {
                reason: format!(
                    "fibre through {} meets Supp B only partially",
                    config.curve(on_y[0]).id
                ),
            });
        }
        for &s in &support {
            for &g in &on_y {
                let meet = source.dot_curve(&NumClass::divisor(Divisor::curve(s)), g)?;
                if meet.is_positive() {
                    return Ok(NegativityVerdict::Contradiction {
                        reason: format!(
                            "{} meets the fibre through {} outside Supp B",
                            config.curve(s).id,
                            config.curve(g).id
                        ),
                    });
                }
            }
        }
    }
    Ok(NegativityVerdict::EffectiveForced)
}

/// Leading minors of a certificate, as integers, for reporting.
pub fn certificate_minors(c: &DefinitenessCertificate) -> Vec<BigInt> {
    match c {
        DefinitenessCertificate::NegativeDefinite { leading_minors } => leading_minors.clone(),
        DefinitenessCertificate::Witness { .. } => Vec::new(),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::lattice::{Curve, IncidencePoint};
    use crate::rational::frac;

    pub fn single(self_int: i64, canon: i64) -> Configuration {
        Configuration::validated(vec![Curve::new("C", self_int, canon)], vec![vec![self_int]], vec![]).unwrap()
    }

    fn contracted_all(config: Configuration) -> Model {
        let all = (0..config.len()).collect();
        Model::new(config, all, true).unwrap()
    }

    fn a2_pair() -> Pair {
        Pair::new(contracted_all(crate::lattice::tests::a2()), Divisor::zero()).unwrap()
    }

    /// A (−1)-curve `A` met once by a curve `B`.
    fn minus_one_with_b() -> Configuration {
        Configuration::validated(
            vec![Curve::new("A", -1, -1), Curve::new("B", -2, 0)],
            vec![vec![-1, 1], vec![1, -2]],
            vec![IncidencePoint::new("p", 0, 1, 1)],
        )
        .unwrap()
    }

    #[test]
    fn pullback_across_minus_one_curve() {
        let m = Model::new(minus_one_with_b(), BTreeSet::from([0]), true).unwrap();
        let p = numerical_pullback(&m, &Divisor::curve(1)).unwrap();
        assert_eq!(p, Divisor::from_terms([(0, int(1)), (1, int(1))]));
        assert_eq!(numerical_pullback(&m, &Divisor::zero()).unwrap(), Divisor::zero());
        assert!(matches!(numerical_pullback(&m, &Divisor::curve(0)), Err(Error::Argument(_))));
    }

    #[test]
    fn pullback_of_disjoint_divisor_is_unchanged() {
        let config = Configuration::validated(
            vec![Curve::new("E1", -2, 0), Curve::new("E2", -2, 0), Curve::new("D", 1, -3)],
            vec![vec![-2, 1, 0], vec![1, -2, 0], vec![0, 0, 1]],
            vec![IncidencePoint::new("p", 0, 1, 1)],
        )
        .unwrap();
        let m = Model::new(config, BTreeSet::from([0, 1]), true).unwrap();
        assert_eq!(numerical_pullback(&m, &Divisor::curve(2)).unwrap(), Divisor::curve(2));
    }

    #[test]
    fn non_negative_definite_contraction_rejected() {
        let fibre = Configuration::validated(
            vec![Curve::new("A", -1, -1), Curve::new("B", -1, -1)],
            vec![vec![-1, 1], vec![1, -1]],
            vec![IncidencePoint::new("p", 0, 1, 1)],
        )
        .unwrap();
        assert!(matches!(
            Model::new(fibre, BTreeSet::from([0, 1]), true),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn crepant_examples() {
        let a2 = crepant_coefficients(&a2_pair());
        assert_eq!(a2.e.values().cloned().collect::<Vec<_>>(), vec![int(0), int(0)]);

        let cusp = Pair::new(contracted_all(single(-2, 2)), Divisor::zero()).unwrap();
        let d = crepant_coefficients(&cusp);
        assert_eq!(d.e[&0], int(1));
        assert_eq!(d.discrepancy(0), Some(int(-1)));
        assert_eq!(d.log_discrepancy(0), Some(int(0)));

        let cone = Pair::new(contracted_all(single(-1, 3)), Divisor::zero()).unwrap();
        assert_eq!(crepant_coefficients(&cone).e[&0], int(3));
    }

    #[test]
    fn classification_examples() {
        let a2 = classify_pair(&a2_pair()).unwrap();
        assert_eq!(a2.class, SingularityClass::Canonical);
        assert!(a2.klt && a2.numerically_lc && !a2.terminal);

        let cusp = Pair::new(contracted_all(single(-2, 2)), Divisor::zero()).unwrap();
        let c = classify_pair(&cusp).unwrap();
        assert_eq!(c.class, SingularityClass::Lc);
        assert!(c.numerically_lc && !c.klt && !c.dlt);

        let cone = Pair::new(contracted_all(single(-1, 3)), Divisor::zero()).unwrap();
        let c = classify_pair(&cone).unwrap();
        assert_eq!(c.class, SingularityClass::None);
        assert!(!c.lc && !c.numerically_lc);

        // a smooth point blown up: terminal
        let smooth = Pair::new(contracted_all(single(-1, -1)), Divisor::zero()).unwrap();
        assert_eq!(classify_pair(&smooth).unwrap().class, SingularityClass::Terminal);

        // 1/3(1,1): e = 1/3
        let third = Pair::new(contracted_all(single(-3, 1)), Divisor::zero()).unwrap();
        let c = classify_pair(&third).unwrap();
        assert_eq!(crepant_coefficients(&third).e[&0], frac(1, 3));
        assert_eq!(c.class, SingularityClass::Klt);
    }

    #[test]
    fn boundary_classes_on_regular_surface() {
        let two = Configuration::validated(
            vec![Curve::new("C", -1, -1), Curve::new("D", -1, -1)],
            vec![vec![-1, 1], vec![1, -1]],
            vec![IncidencePoint::new("p", 0, 1, 1)],
        )
        .unwrap();
        let model = Model::ambient(two);
        let snc = Pair::new(model.clone(), Divisor::from_terms([(0, int(1)), (1, int(1))])).unwrap();
        let c = classify_pair(&snc).unwrap();
        assert!(c.dlt && c.lc && !c.plt && !c.klt);
        // blowing up the node gives a divisor with discrepancy -1
        assert!(!c.canonical);
        assert_eq!(c.class, SingularityClass::Dlt);

        let half = Pair::new(model.clone(), Divisor::from_terms([(0, int(1)), (1, frac(1, 2))])).unwrap();
        let c = classify_pair(&half).unwrap();
        assert!(c.plt && !c.klt && !c.canonical);
        assert_eq!(c.class, SingularityClass::Plt);

        let quarter = Pair::new(model, Divisor::from_terms([(0, frac(1, 2)), (1, frac(1, 4))])).unwrap();
        assert_eq!(classify_pair(&quarter).unwrap().class, SingularityClass::Terminal);
    }

    #[test]
    fn multiplier_examples() {
        let c = single(1, -3);
        let pair = Pair::new(Model::ambient(c), Divisor::from_terms([(0, frac(3, 2))])).unwrap();
        assert_eq!(multiplier_divisor(&pair), Divisor::from_terms([(0, int(-1))]));

        let cusp = Pair::new(contracted_all(single(-2, 2)), Divisor::zero()).unwrap();
        assert_eq!(multiplier_divisor(&cusp), Divisor::from_terms([(0, int(-1))]));

        let third = Pair::new(contracted_all(single(-3, 1)), Divisor::zero()).unwrap();
        assert!(multiplier_divisor(&third).iter().all(|(_, q)| !q.is_negative()));
    }

    #[test]
    fn negativity_examples() {
        let m = contracted_all(single(-1, -1));
        assert_eq!(
            negativity_check(&m, &Divisor::from_terms([(0, frac(5, 2))])).unwrap(),
            NegativityVerdict::EffectiveForced
        );
        assert!(matches!(
            negativity_check(&m, &Divisor::from_terms([(0, int(-1))])).unwrap(),
            NegativityVerdict::NotApplicable { .. }
        ));
    }

    #[test]
    fn residuals_vanish() {
        let pair = Pair::new(
            Model::new(minus_one_with_b(), BTreeSet::from([0]), true).unwrap(),
            Divisor::from_terms([(1, frac(1, 2))]),
        )
        .unwrap();
        let data = crepant_coefficients(&pair);
        assert!(crepant_residuals(&pair, &data).iter().all(Zero::is_zero));
        // (K + ½B + eA)·A = -1 + ½ - e = 0
        assert_eq!(data.e[&0], frac(-1, 2));
    }

    #[test]
    fn model_self_intersections() {
        let m = Model::new(crate::lattice::tests::a2(), BTreeSet::from([0]), true).unwrap();
        assert_eq!(m.curve_square(1).unwrap(), frac(-3, 2));
    }
}
