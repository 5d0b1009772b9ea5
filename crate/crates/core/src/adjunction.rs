//! Different, inversion of adjunction, non-klt loci and fibrewise connectedness.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use serde::Serialize;

use crate::cone::{positivity, Fibration};
use crate::discrepancy::Pair;
use crate::error::{Error, Result};
use crate::lattice::{CurveDivisor, Divisor, Threshold};
use crate::rational::Q;

/// `Diff_{C^N}(Δ − C)` read off the ambient model: each node of the strict
/// transform of `C` contributes the total-boundary coefficient of the other branch.
pub fn diff_divisor(pair: &Pair, curve: usize) -> Result<CurveDivisor> {
    let config = pair.config();
    if curve >= config.len() {
        return Err(Error::Structural(format!("curve index {curve} out of range")));
    }
    let name = &config.curve(curve).id;
    if pair.boundary().coeff(curve) != Q::one() {
        return Err(Error::Argument(format!(
            "{name} must have coefficient 1 in the boundary, has {}",
            pair.boundary().coeff(curve)
        )));
    }
    let total = pair.total_boundary();
    let mut diff = CurveDivisor::new(name.clone());
    for (_, p) in config.points_on(curve) {
        let other = p.other(curve).expect("point lies on the curve");
        diff.add(p.id.clone(), p.residue_degree, total.coeff(other));
    }
    Ok(diff.normalized())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IoaReport {
    pub curve: String,
    pub diff: CurveDivisor,
    pub lc_near_curve: bool,
    pub plt_near_curve: bool,
    pub diff_lc: bool,
    pub diff_klt: bool,
}

/// Decides lc/plt of the pair near `C` on the ambient model and lc/klt of
/// `(C^N, Diff)` separately, and insists they agree.
pub fn inversion_of_adjunction(pair: &Pair, curve: usize) -> Result<IoaReport> {
    let diff = diff_divisor(pair, curve)?;
    let one = Q::one();
    let diff_lc = diff.coefficients().all(|q| *q <= one);
    let diff_klt = diff.coefficients().all(|q| *q < one);

    let config = pair.config();
    let model = pair.model();
    let total = pair.total_boundary();
    let b = |i: usize| total.coeff(i);
    // C together with the contracted components it meets
    let mut core = BTreeSet::from([curve]);
    let mut exceptional = BTreeSet::new();
    for comp in config.components(model.contracted()) {
        if comp.iter().any(|&e| config.entry(e, curve) > 0) {
            exceptional.extend(comp.iter().copied());
        }
    }
    core.extend(exceptional.iter().copied());
    let mut near = core.clone();
    for &c in &core {
        near.extend(config.neighbours(c));
    }
    let lc_near_curve = near.iter().all(|&i| b(i) <= one);
    let reduced_node = config.points().iter().any(|p| {
        (core.contains(&p.curves[0]) || core.contains(&p.curves[1]))
            && b(p.curves[0]) == one
            && b(p.curves[1]) == one
    });
    let plt_near_curve =
        lc_near_curve && exceptional.iter().all(|&e| b(e) < one) && !reduced_node;

    let report = IoaReport {
        curve: config.curve(curve).id.clone(),
        diff,
        lc_near_curve,
        plt_near_curve,
        diff_lc,
        diff_klt,
    };
    if lc_near_curve != diff_lc || plt_near_curve != diff_klt {
        return Err(Error::InvariantViolation(format!(
            "inversion of adjunction fails along {}: lc {lc_near_curve}/{diff_lc}, plt/klt {plt_near_curve}/{diff_klt}",
            report.curve
        )));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NkltLocus {
    /// Curves of `W` with total-boundary coefficient at least 1.
    #[serde(skip)]
    pub curves: BTreeSet<usize>,
    pub curve_ids: Vec<String>,
    /// Incidence points joining two locus curves.
    pub points: Vec<String>,
}

pub fn nklt_locus(pair: &Pair) -> NkltLocus {
    let config = pair.config();
    let locus = pair.total_boundary().filter(Threshold::AtLeast, &Q::one());
    let curves = locus.support();
    let points = config
        .points()
        .iter()
        .filter(|p| p.curves.iter().all(|c| curves.contains(c)))
        .map(|p| p.id.clone())
        .collect();
    NkltLocus {
        curve_ids: curves.iter().map(|&c| config.curve(c).id.clone()).collect(),
        curves,
        points,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Connected as a dual graph; geometric connectedness over non-closed
    /// residue fields is not modelled.
    Connected,
    Empty,
    HypothesesNotMet,
    Violation,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Connected => "connected (dual graph)",
            Verdict::Empty => "empty",
            Verdict::HypothesesNotMet => "hypotheses-not-met",
            Verdict::Violation => "VIOLATION",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FibreVerdict {
    pub base_point: String,
    pub verdict: Verdict,
    /// Number of connected pieces of the locus in this fibre.
    pub pieces: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectednessReport {
    pub hypotheses_met: bool,
    pub reason: Option<String>,
    pub locus: NkltLocus,
    pub fibres: Vec<FibreVerdict>,
}

impl ConnectednessReport {
    pub fn has_violation(&self) -> bool {
        self.fibres.iter().any(|f| f.verdict == Verdict::Violation)
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

/// Checks that the non-klt locus meets every fibre in a connected set when
/// `−(K+Δ)` is nef and big over the base.
pub fn connectedness_check(pair: &Pair, fib: &Fibration) -> Result<ConnectednessReport> {
    let locus = nklt_locus(pair);
    let model = pair.model();
    let minus = pair.log_canonical_class().negated();
    let (hypotheses_met, reason) = match positivity(model, &minus, fib) {
        Ok(p) if p.nef && p.big => (true, None),
        Ok(p) if !p.nef => (false, Some("-(K+Δ) is not nef over the base".to_string())),
        Ok(_) => (false, Some("-(K+Δ) is not big over the base".to_string())),
        Err(Error::Argument(msg)) => (false, Some(msg)),
        Err(e) => return Err(e),
    };
    let fibres = fib
        .base_points()
        .iter()
        .enumerate()
        .map(|(s, name)| {
            let (verdict, pieces) = if hypotheses_met {
                let pieces = fibre_pieces(pair, fib, &locus.curves, s);
                let verdict = match pieces {
                    0 => Verdict::Empty,
                    1 => Verdict::Connected,
                    _ => Verdict::Violation,
                };
                (verdict, pieces)
            } else {
                (Verdict::HypothesesNotMet, 0)
            };
            FibreVerdict {
                base_point: name.clone(),
                verdict,
                pieces,
            }
        })
        .collect();
    Ok(ConnectednessReport {
        hypotheses_met,
        reason,
        locus,
        fibres,
    })
}

/// Connected pieces of `Nklt ∩ π⁻¹(s)` on the model, computed on `W`.
///
/// Elements are vertical locus curves, contracted components (each a point of
/// the model) touching the locus, and nodes where a horizontal locus curve
/// crosses a vertical curve that is not itself in the locus.
fn fibre_pieces(pair: &Pair, fib: &Fibration, locus: &BTreeSet<usize>, s: usize) -> usize {
    let config = pair.config();
    let model = pair.model();
    let over: BTreeSet<usize> = fib.curves_over(s).into_iter().collect();
    let comps: Vec<Vec<usize>> = config
        .components(model.contracted())
        .into_iter()
        .filter(|comp| {
            comp.iter()
                .any(|&e| over.contains(&e) || config.neighbours(e).any(|n| over.contains(&n)))
        })
        .collect();
    let comp_of: BTreeMap<usize, usize> = comps
        .iter()
        .enumerate()
        .flat_map(|(k, comp)| comp.iter().map(move |&e| (e, k)))
        .collect();
    let in_fibre = |c: usize| over.contains(&c) || comp_of.contains_key(&c);

    // element ids: curves of W, then components, then nodes
    let n = config.len();
    let node_base = n + comps.len();
    let mut uf = UnionFind::new(node_base + config.points().len());
    let mut present = BTreeSet::new();
    let key = |c: usize| comp_of.get(&c).map_or(c, |&k| n + k);

    for &c in locus {
        if in_fibre(c) {
            present.insert(key(c));
        }
    }
    for (pi, p) in config.points().iter().enumerate() {
        let [a, b] = p.curves;
        let (la, lb) = (locus.contains(&a), locus.contains(&b));
        if !(la || lb) {
            continue;
        }
        match (in_fibre(a), in_fibre(b)) {
            (true, true) => {
                if la && lb {
                    uf.union(key(a), key(b));
                } else {
                    // a locus curve touching a contracted component puts that point in the locus
                    for (l, o) in [(a, b), (b, a)] {
                        if locus.contains(&l) && comp_of.contains_key(&o) {
                            present.insert(key(o));
                            uf.union(key(l), key(o));
                        }
                    }
                }
            }
            (true, false) | (false, true) => {
                let (v, h) = if in_fibre(a) { (a, b) } else { (b, a) };
                if !locus.contains(&h) {
                    continue;
                }
                if comp_of.contains_key(&v) || locus.contains(&v) {
                    present.insert(key(v));
                } else {
                    present.insert(node_base + pi);
                }
            }
            (false, false) => {}
        }
    }
    let roots: BTreeSet<usize> = present.iter().map(|&x| uf.find(x)).collect();
    roots.len()
}

/// `Δ^{≥1}` and `Δ^{<1}` of the total boundary.
pub fn split_at_one(pair: &Pair) -> (Divisor, Divisor) {
    let total = pair.total_boundary();
    let one = Q::one();
    (
        total.filter(Threshold::AtLeast, &one),
        total.filter(Threshold::Below, &one),
    )
}
