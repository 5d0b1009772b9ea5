//! Random but geometrically sensible test inputs.
//!
//! Every family is built from something that exists: negative-definite
//! resolution graphs (which Grauert's criterion contracts), ruled surfaces with
//! blown-up fibres, and toric surfaces with their boundary cycle.

#![allow(dead_code)]

pub mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use surface_mmp::cone::Fibration;
use surface_mmp::lattice::blowup_at_node;
use surface_mmp::linalg;
use surface_mmp::rational::{frac, int};
use surface_mmp::{Configuration, Curve, Divisor, IncidencePoint, Model, Pair, Q};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

/// `{0, ¼, ½, ¾, 1}`.
pub fn unit_coeffs() -> Vec<Q> {
    vec![int(0), frac(1, 4), frac(1, 2), frac(3, 4), int(1)]
}

/// `{0, ¼, ½, ¾, 1, 3/2}`.
pub fn wide_coeffs() -> Vec<Q> {
    let mut v = unit_coeffs();
    v.push(frac(3, 2));
    v
}

pub fn pick(rng: &mut Rng8, set: &[Q]) -> Q {
    set.choose(rng).expect("nonempty").clone()
}

/// A configuration under construction: curves plus transversal crossings.
#[derive(Debug, Clone, Default)]
pub struct Sketch {
    pub curves: Vec<(String, i64, i64)>,
    pub edges: Vec<(usize, usize, i64)>,
    pub chi: Option<i64>,
    pub k2: Option<i64>,
}

impl Sketch {
    pub fn add_curve(&mut self, id: impl Into<String>, self_int: i64, canon: i64) -> usize {
        self.curves.push((id.into(), self_int, canon));
        self.curves.len() - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize, degree: i64) {
        self.edges.push((a, b, degree));
    }

    pub fn matrix(&self) -> Vec<Vec<i64>> {
        let n = self.curves.len();
        let mut m = vec![vec![0; n]; n];
        for (i, c) in self.curves.iter().enumerate() {
            m[i][i] = c.1;
        }
        for &(a, b, d) in &self.edges {
            m[a][b] += d;
            m[b][a] += d;
        }
        m
    }

    pub fn build(&self) -> Configuration {
        let curves = self
            .curves
            .iter()
            .map(|(id, s, k)| Curve::new(id.clone(), *s, *k))
            .collect();
        let points = self
            .edges
            .iter()
            .enumerate()
            .map(|(k, &(a, b, d))| IncidencePoint::new(format!("p{k}"), a, b, d))
            .collect();
        Configuration::validated(curves, self.matrix(), points)
            .expect("sketches are valid by construction")
            .with_chi_structure(self.chi)
            .with_canonical_self_int(self.k2)
    }

    pub fn negative_definite(&self, subset: &[usize]) -> bool {
        let big = linalg::int_matrix(&self.matrix());
        linalg::negative_definite_certificate(&linalg::principal_submatrix(&big, subset))
            .is_negative_definite()
    }
}

/// Self-intersection and canonical degree of a random exceptional curve.
fn exceptional_numbers(rng: &mut Rng8) -> (i64, i64) {
    let s = *[-1, -2, -2, -2, -3, -3, -4, -5].choose(rng).expect("nonempty");
    let genus = if rng.gen_bool(0.15) { 1 } else { 0 };
    (s, 2 * genus - 2 - s)
}

/// Adds a negative-definite tree or cycle of `n` curves and returns their indices.
pub fn add_negdef_graph(
    rng: &mut Rng8,
    sketch: &mut Sketch,
    n: usize,
    prefix: &str,
    degrees: bool,
) -> Vec<usize> {
    loop {
        let mut trial = sketch.clone();
        let idx: Vec<usize> = (0..n)
            .map(|k| {
                let (s, c) = exceptional_numbers(rng);
                trial.add_curve(format!("{prefix}{k}"), s, c)
            })
            .collect();
        let degree = |rng: &mut Rng8| if degrees && rng.gen_bool(0.2) { 2 } else { 1 };
        for k in 1..n {
            let parent = rng.gen_range(0..k);
            let d = degree(rng);
            trial.add_edge(idx[parent], idx[k], d);
        }
        if n >= 3 && rng.gen_bool(0.25) {
            // close a cycle through the last curve and a non-neighbour
            let d = degree(rng);
            let a = idx[n - 1];
            let b = idx[0];
            if !trial.edges.iter().any(|&(x, y, _)| (x, y) == (b, a) || (x, y) == (a, b)) {
                trial.add_edge(a, b, d);
            }
        }
        if trial.negative_definite(&idx) {
            *sketch = trial;
            return idx;
        }
    }
}

/// Adds a rational curve with the given square, meeting `targets` once each.
pub fn add_attached_curve(sketch: &mut Sketch, id: &str, self_int: i64, targets: &[usize]) -> usize {
    let c = sketch.add_curve(id, self_int, -2 - self_int);
    for &t in targets {
        sketch.add_edge(c, t, 1);
    }
    c
}

/// Resolution graph (`n ≤ 8`) contracted to a point, with a few boundary curves
/// through it carrying coefficients from `coeffs`.
pub struct Resolution {
    pub config: Configuration,
    pub exceptional: Vec<usize>,
    pub boundary: Divisor,
}

pub fn resolution(rng: &mut Rng8, max_n: usize, coeffs: &[Q], degrees: bool) -> Resolution {
    let mut sketch = Sketch::default();
    let n = rng.gen_range(1..=max_n);
    let exceptional = add_negdef_graph(rng, &mut sketch, n, "E", degrees);
    let mut boundary = Divisor::zero();
    for k in 0..rng.gen_range(0..=2) {
        let t = *exceptional.choose(rng).expect("nonempty");
        let s = rng.gen_range(-1..=1);
        let d = add_attached_curve(&mut sketch, &format!("D{k}"), s, &[t]);
        boundary.set(d, pick(rng, coeffs));
    }
    Resolution {
        config: sketch.build(),
        exceptional,
        boundary,
    }
}

/// A blown-up Hirzebruch surface over a curve, with its fibres tracked.
pub struct Ruled {
    pub config: Configuration,
    pub fibration: Fibration,
    pub horizontal: Vec<usize>,
    /// Components of each fibre.
    pub fibres: Vec<Vec<usize>>,
}

pub fn ruled(rng: &mut Rng8, max_blowups: usize) -> Ruled {
    let n = rng.gen_range(0..=3);
    let mut sketch = Sketch {
        chi: Some(1),
        k2: Some(8),
        ..Sketch::default()
    };
    let s = sketch.add_curve("S", -n, n - 2);
    let t = sketch.add_curve("T", n, -n - 2);
    let fibres = rng.gen_range(1..=3);
    let mut base = Vec::new();
    for k in 0..fibres {
        let d = if rng.gen_bool(0.2) { 2 } else { 1 };
        let f = sketch.add_curve(format!("F{k}"), 0, -2 * d);
        sketch.add_edge(s, f, d);
        sketch.add_edge(t, f, d);
        base.push(f);
    }
    let mut config = sketch.build();
    let mut vertical: BTreeMap<usize, usize> = base.iter().enumerate().map(|(k, &f)| (f, k)).collect();
    let mut mult: BTreeMap<usize, i64> = base.iter().map(|&f| (f, 1)).collect();
    for _ in 0..rng.gen_range(0..=max_blowups) {
        let candidates: Vec<usize> = (0..config.points().len())
            .filter(|&p| config.point(p).curves.iter().any(|c| vertical.contains_key(c)))
            .collect();
        let Some(&p) = candidates.choose(rng) else { break };
        let [a, b] = config.point(p).curves;
        let over = vertical.get(&a).or(vertical.get(&b)).copied().expect("vertical branch");
        let m = mult.get(&a).copied().unwrap_or(0) + mult.get(&b).copied().unwrap_or(0);
        let blown = blowup_at_node(&config, p).expect("valid point");
        vertical.insert(blown.exceptional, over);
        mult.insert(blown.exceptional, m);
        config = blown.config;
    }
    let base_points: Vec<String> = (0..fibres).map(|k| format!("s{k}")).collect();
    let fibre_lists: Vec<Vec<usize>> = (0..fibres)
        .map(|k| vertical.iter().filter(|(_, &s)| s == k).map(|(&c, _)| c).collect())
        .collect();
    let classes = fibre_lists
        .iter()
        .enumerate()
        .map(|(k, cs)| (k, cs.iter().map(|&c| (c, int(mult[&c]))).collect()))
        .collect();
    let fibration = Fibration::new(&config, 1, base_points, vertical, classes).expect("valid fibration");
    Ruled {
        config,
        fibration,
        horizontal: vec![s, t],
        fibres: fibre_lists,
    }
}

/// A projective toric surface given by its boundary cycle, with `K²` and `χ(O) = 1`.
pub fn toric(rng: &mut Rng8, max_blowups: usize) -> Configuration {
    let mut sketch = Sketch {
        chi: Some(1),
        ..Sketch::default()
    };
    if rng.gen_bool(0.4) {
        sketch.k2 = Some(9);
        let l: Vec<usize> = (0..3).map(|k| sketch.add_curve(format!("L{k}"), 1, -3)).collect();
        for k in 0..3 {
            sketch.add_edge(l[k], l[(k + 1) % 3], 1);
        }
    } else {
        let n = rng.gen_range(0..=3);
        sketch.k2 = Some(8);
        let s = sketch.add_curve("S", -n, n - 2);
        let f0 = sketch.add_curve("F0", 0, -2);
        let t = sketch.add_curve("T", n, -n - 2);
        let f1 = sketch.add_curve("F1", 0, -2);
        for (a, b) in [(s, f0), (f0, t), (t, f1), (f1, s)] {
            sketch.add_edge(a, b, 1);
        }
    }
    let mut config = sketch.build();
    for _ in 0..rng.gen_range(0..=max_blowups) {
        let p = rng.gen_range(0..config.points().len());
        config = blowup_at_node(&config, p).expect("valid point").config;
    }
    config
}

/// Random boundary on the given curves.
pub fn random_boundary(rng: &mut Rng8, curves: &[usize], coeffs: &[Q], density: f64) -> Divisor {
    let mut d = Divisor::zero();
    for &c in curves {
        if rng.gen_bool(density) {
            d.set(c, pick(rng, coeffs));
        }
    }
    d
}

/// Random subset of `pool` that forms negative-definite components.
pub fn random_contractible(rng: &mut Rng8, config: &Configuration, pool: &[usize], p: f64) -> BTreeSet<usize> {
    let mut set = BTreeSet::new();
    let mut order = pool.to_vec();
    order.shuffle(rng);
    for c in order {
        if !rng.gen_bool(p) {
            continue;
        }
        let mut trial = set.clone();
        trial.insert(c);
        if Model::new(config.clone(), trial.clone(), true).is_ok() {
            set = trial;
        }
    }
    set
}

/// A pair together with the structure map it is studied over.
pub struct Instance {
    pub family: &'static str,
    pub pair: Pair,
    pub fibration: Fibration,
}

fn finish(family: &'static str, config: &Configuration, contracted: BTreeSet<usize>, boundary: Divisor, fib: Fibration) -> Instance {
    let boundary = boundary.without(&contracted);
    let model = Model::new(config.clone(), contracted, true).expect("contractible by construction");
    Instance {
        family,
        pair: Pair::new(model, boundary).expect("boundary off the contracted curves"),
        fibration: fib,
    }
}

/// Resolution graph with horizontal curves, studied over its contraction.
pub fn birational_instance(rng: &mut Rng8, coeffs: &[Q]) -> Instance {
    let r = resolution(rng, 6, coeffs, true);
    let v: BTreeSet<usize> = r.exceptional.iter().copied().collect();
    let contracted = random_contractible(rng, &r.config, &r.exceptional, 0.5);
    let fib = Fibration::birational(&r.config, &v).expect("negative definite");
    let mut boundary = r.boundary.clone();
    boundary = boundary.plus(&random_boundary(rng, &r.exceptional, coeffs, 0.3));
    finish("birational", &r.config, contracted, boundary, fib)
}

/// Blown-up ruled surface over its base curve.
pub fn ruled_instance(rng: &mut Rng8, coeffs: &[Q]) -> Instance {
    let r = ruled(rng, 5);
    // contract proper subsets of fibres only
    let mut pool = Vec::new();
    for f in &r.fibres {
        if f.len() > 1 {
            let mut f = f.clone();
            f.shuffle(rng);
            pool.extend(f.into_iter().skip(1));
        }
    }
    let contracted = random_contractible(rng, &r.config, &pool, 0.4);
    let all: Vec<usize> = (0..r.config.len()).collect();
    let boundary = random_boundary(rng, &all, coeffs, 0.35);
    finish("ruled", &r.config, contracted, boundary, r.fibration)
}

/// Toric surface over a point.
pub fn toric_instance(rng: &mut Rng8, coeffs: &[Q]) -> Instance {
    let config = toric(rng, 5);
    let negative: Vec<usize> = (0..config.len()).filter(|&c| config.curve(c).self_int < 0).collect();
    let contracted = random_contractible(rng, &config, &negative, 0.3);
    let all: Vec<usize> = (0..config.len()).collect();
    let boundary = random_boundary(rng, &all, coeffs, 0.4);
    let fib = Fibration::over_point(&config);
    finish("toric", &config, contracted, boundary, fib)
}

pub fn any_instance(rng: &mut Rng8, coeffs: &[Q]) -> Instance {
    match rng.gen_range(0..3) {
        0 => birational_instance(rng, coeffs),
        1 => ruled_instance(rng, coeffs),
        _ => toric_instance(rng, coeffs),
    }
}

/// A coefficient-one curve `C` with contracted components hanging off it and
/// further boundary curves through `C`, the components, or each other.
pub struct IoaInstance {
    pub pair: Pair,
    pub curve: usize,
}

pub fn ioa_instance(rng: &mut Rng8) -> IoaInstance {
    let mut sketch = Sketch::default();
    let s = rng.gen_range(-3..=1);
    let c = sketch.add_curve("C", s, -2 - s);
    let mut contracted = BTreeSet::new();
    for k in 0..rng.gen_range(0..=2) {
        let n = rng.gen_range(1..=4);
        let comp = add_negdef_graph(rng, &mut sketch, n, &format!("G{k}_"), true);
        let t = *comp.choose(rng).expect("nonempty");
        let d = if rng.gen_bool(0.2) { 2 } else { 1 };
        sketch.add_edge(c, t, d);
        contracted.extend(comp);
    }
    let mut others = Vec::new();
    for k in 0..rng.gen_range(0..=3) {
        let mut anchors: Vec<usize> = vec![c];
        anchors.extend(contracted.iter().copied());
        anchors.extend(others.iter().copied());
        let t = *anchors.choose(rng).expect("nonempty");
        let s = rng.gen_range(-2..=1);
        others.push(add_attached_curve(&mut sketch, &format!("D{k}"), s, &[t]));
    }
    let config = sketch.build();
    let mut boundary = random_boundary(rng, &others, &wide_coeffs(), 0.8);
    boundary.set(c, int(1));
    let model = Model::new(config, contracted, true).expect("components are negative definite");
    IoaInstance {
        pair: Pair::new(model, boundary).expect("valid pair"),
        curve: c,
    }
}

/// `B` on a resolution with `−B·E_k = t_k ≥ 0` on the contracted curves and
/// `B ≥ 0` off them.
pub struct NegativityInstance {
    pub config: Configuration,
    pub contracted: BTreeSet<usize>,
    pub b: Divisor,
}

pub fn negativity_instance(rng: &mut Rng8) -> NegativityInstance {
    let r = resolution(rng, 8, &unit_coeffs(), true);
    let contracted = loop {
        let set = random_contractible(rng, &r.config, &r.exceptional, 0.7);
        if !set.is_empty() {
            break set;
        }
    };
    let free: Vec<usize> = (0..r.config.len()).filter(|c| !contracted.contains(c)).collect();
    let pushed = random_boundary(rng, &free, &[frac(1, 2), int(1), int(2), frac(1, 3)], 0.4);
    let mut deg = oracle::degrees(&r.config, &pushed);
    let quiet = rng.gen_bool(0.3);
    for &k in &contracted {
        let t = if quiet && rng.gen_bool(0.7) {
            int(0)
        } else {
            pick(rng, &[int(0), frac(1, 2), int(1), int(2)])
        };
        deg[k] += t;
    }
    let mut b = pushed;
    for (k, x) in oracle::correction(&r.config, &contracted, &deg) {
        b.set(k, x);
    }
    NegativityInstance {
        config: r.config,
        contracted,
        b,
    }
}
