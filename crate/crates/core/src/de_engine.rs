//! Differential Evolution over bounded real-valued solution vectors.
//!
//! Each generation builds, for every member, a mutant (random-weighted donor
//! plus a scaled difference vector) and a binomial-crossover trial. By default
//! the trial replaces the parent when it is no worse; [`SelectionMode::ThreeWay`]
//! also lets the mutant compete. All draws come from counter-based
//! streams keyed by `(seed, generation, member)`, so the result does not depend
//! on how members are scheduled across threads.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::cost_model::ViolationTerms;
use crate::error::{Error, Result};
use crate::rng::{Purpose, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DonorMode {
    /// Base vector is a random convex combination of the three picked members.
    #[default]
    WeightedTriplet,
    /// Classical rand/1: the third picked member is the base.
    PlainRand1,
}

/// Which offspring compete with the parent for its slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    /// Minimum of parent, mutant and trial (two evaluations per member).
    ThreeWay,
    /// Trial against parent only (one evaluation per member).
    #[default]
    TrialOnly,
}

impl SelectionMode {
    pub fn evaluations_per_member(self) -> usize {
        match self {
            SelectionMode::ThreeWay => 2,
            SelectionMode::TrialOnly => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeConfig {
    pub pop_size: usize,
    pub iter_max: usize,
    /// Range the scale factor F is drawn from, per target and generation.
    pub f_bounds: [f64; 2],
    pub crossover: f64,
    pub seed: u64,
    pub donor_mode: DonorMode,
    pub selection: SelectionMode,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            pop_size: 100,
            iter_max: 200,
            f_bounds: [0.2, 0.8],
            crossover: 0.2,
            seed: 0,
            donor_mode: DonorMode::WeightedTriplet,
            selection: SelectionMode::TrialOnly,
        }
    }
}

impl DeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 4 {
            return Err(Error::InsufficientPopulation(self.pop_size));
        }
        if !(0.0..=1.0).contains(&self.crossover) {
            return Err(Error::Config(format!("crossover probability {} outside [0, 1]", self.crossover)));
        }
        let [lo, hi] = self.f_bounds;
        if !(0.0 <= lo && lo <= hi && hi.is_finite()) {
            return Err(Error::Config(format!("scale factor bounds [{lo}, {hi}] must satisfy 0 <= low <= high")));
        }
        Ok(())
    }
}

/// Per-gene `[lower, upper]` box.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds(Vec<[f64; 2]>);

impl Bounds {
    pub fn new(bounds: Vec<[f64; 2]>) -> Result<Self> {
        for (index, &[lo, hi]) in bounds.iter().enumerate() {
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Bounds { index, lo, hi });
            }
        }
        Ok(Self(bounds))
    }

    pub fn uniform(genes: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![[lo, hi]; genes])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, j: usize) -> [f64; 2] {
        self.0[j]
    }

    pub fn contains(&self, genes: &[f64]) -> bool {
        genes.len() == self.0.len() && genes.iter().zip(&self.0).all(|(&x, &[lo, hi])| x >= lo && x <= hi)
    }
}

/// Folds `x` back into `[lo, hi]` by mirroring at the walls.
pub fn reflect(x: f64, lo: f64, hi: f64) -> f64 {
    if x >= lo && x <= hi {
        return x;
    }
    let width = hi - lo;
    if width <= 0.0 {
        return lo;
    }
    if !x.is_finite() {
        return lo + 0.5 * width;
    }
    let period = 2.0 * width;
    let mut y = (x - lo) % period;
    if y < 0.0 {
        y += period;
    }
    if y > width {
        y = period - y;
    }
    (lo + y).clamp(lo, hi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Vec<f64>>,
    pub costs: Vec<f64>,
    pub generation: usize,
}

impl Population {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Index of the cheapest member; the lowest index wins ties.
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, &c) in self.costs.iter().enumerate() {
            if c < self.costs[best] {
                best = i;
            }
        }
        best
    }

    pub fn mean_cost(&self) -> f64 {
        self.costs.iter().sum::<f64>() / self.costs.len() as f64
    }
}

/// Something DE can minimize.
pub trait Objective: Sync {
    /// Switches to environment epoch `epoch`. Returns `true` when costs from
    /// the previous epoch are no longer comparable.
    fn begin_epoch(&mut self, _epoch: u64) -> bool {
        false
    }

    fn cost(&self, genes: &[f64]) -> f64;

    /// Per-term violations for the convergence trace, when the objective has them.
    fn violations(&self, _genes: &[f64]) -> Option<ViolationTerms> {
        None
    }
}

/// Adapts a plain function into an epoch-free objective.
pub struct FnObjective<F>(pub F);

impl<F: Fn(&[f64]) -> f64 + Sync> Objective for FnObjective<F> {
    fn cost(&self, genes: &[f64]) -> f64 {
        (self.0)(genes)
    }
}

fn sanitize(c: f64) -> f64 {
    if c.is_finite() {
        c
    } else {
        f64::INFINITY
    }
}

/// Uniform initial population, deterministic in `cfg.seed`.
pub fn init_population(cfg: &DeConfig, bounds: &Bounds) -> Result<Population> {
    cfg.validate()?;
    let members = (0..cfg.pop_size)
        .map(|i| {
            let mut rng = Stream::for_purpose(cfg.seed, Purpose::Init, &[i as u64]);
            (0..bounds.len())
                .map(|j| {
                    let [lo, hi] = bounds.get(j);
                    rng.uniform_in(lo, hi)
                })
                .collect()
        })
        .collect();
    Ok(Population { members, costs: vec![f64::INFINITY; cfg.pop_size], generation: 0 })
}

/// Three distinct indices, all different from `target`.
pub fn pick_triplet(n: usize, target: usize, rng: &mut Stream) -> Result<[usize; 3]> {
    if n < 4 {
        return Err(Error::InsufficientPopulation(n));
    }
    let mut picked = [usize::MAX; 3];
    for k in 0..3 {
        loop {
            let r = rng.index(n);
            if r != target && !picked[..k].contains(&r) {
                picked[k] = r;
                break;
            }
        }
    }
    Ok(picked)
}

/// `Σ (λⱼ / Σλ) xⱼ`; equal weights when every λ is zero.
pub fn weighted_donor(parts: [&[f64]; 3], lambdas: [f64; 3]) -> Vec<f64> {
    let sum: f64 = lambdas.iter().sum();
    let w = if sum > 0.0 { lambdas.map(|l| l / sum) } else { [1.0 / 3.0; 3] };
    (0..parts[0].len()).map(|j| w[0] * parts[0][j] + w[1] * parts[1][j] + w[2] * parts[2][j]).collect()
}

/// `base + f (a − b)` with out-of-bounds genes reflected.
pub fn differential(base: &[f64], a: &[f64], b: &[f64], f: f64, bounds: &Bounds) -> Vec<f64> {
    (0..base.len())
        .map(|j| {
            let [lo, hi] = bounds.get(j);
            reflect(base[j] + f * (a[j] - b[j]), lo, hi)
        })
        .collect()
}

/// Mutant vector for member `target`.
pub fn mutate(pop: &Population, bounds: &Bounds, target: usize, f: f64, mode: DonorMode, rng: &mut Stream) -> Result<Vec<f64>> {
    let [r1, r2, r3] = pick_triplet(pop.len(), target, rng)?;
    let (x1, x2, x3) = (&pop.members[r1], &pop.members[r2], &pop.members[r3]);
    let mutant = match mode {
        DonorMode::PlainRand1 => differential(x3, x1, x2, f, bounds),
        DonorMode::WeightedTriplet => {
            let lambdas = [rng.uniform(), rng.uniform(), rng.uniform()];
            let donor = weighted_donor([x1, x2, x3], lambdas);
            differential(&donor, x1, x2, f, bounds)
        }
    };
    Ok(mutant)
}

/// Binomial crossover with the forced index `k` and per-gene uniforms `rands`.
pub fn binomial_crossover(parent: &[f64], mutant: &[f64], cr: f64, k: usize, rands: &[f64]) -> Vec<f64> {
    parent.iter().zip(mutant).zip(rands).enumerate().map(|(j, ((&p, &m), &r))| if r <= cr || j == k { m } else { p }).collect()
}

pub fn crossover(parent: &[f64], mutant: &[f64], cr: f64, rng: &mut Stream) -> Vec<f64> {
    debug_assert_eq!(parent.len(), mutant.len());
    let k = rng.index(parent.len().max(1));
    let rands: Vec<f64> = (0..parent.len()).map(|_| rng.uniform()).collect();
    binomial_crossover(parent, mutant, cr, k, &rands)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Survivor {
    Trial,
    Mutant,
    Parent,
}

/// Cheapest of the three; ties prefer trial, then mutant, then parent.
/// Non-finite costs count as +∞.
pub fn select_by_cost(parent: f64, mutant: f64, trial: f64) -> Survivor {
    let (p, m, t) = (sanitize(parent), sanitize(mutant), sanitize(trial));
    if t <= m && t <= p {
        Survivor::Trial
    } else if m <= p {
        Survivor::Mutant
    } else {
        Survivor::Parent
    }
}

/// Evaluates the three candidates and returns the survivor with its cost.
pub fn select<'a>(parent: &'a [f64], mutant: &'a [f64], trial: &'a [f64], cost_fn: impl Fn(&[f64]) -> f64) -> (&'a [f64], f64) {
    let costs = [cost_fn(parent), cost_fn(mutant), cost_fn(trial)].map(sanitize);
    match select_by_cost(costs[0], costs[1], costs[2]) {
        Survivor::Trial => (trial, costs[2]),
        Survivor::Mutant => (mutant, costs[1]),
        Survivor::Parent => (parent, costs[0]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_cost: f64,
    pub mean_cost: f64,
    pub collision_violation: f64,
    pub violations: ViolationTerms,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ConvergenceTrace {
    pub records: Vec<GenerationRecord>,
}

impl ConvergenceTrace {
    pub fn best_costs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.best_cost).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "generation,best_cost,mean_cost,collision_violation,z_under,z_over,surge,sway,pitch,yaw_rate")?;
        for r in &self.records {
            let v = &r.violations;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                r.generation,
                r.best_cost,
                r.mean_cost,
                r.collision_violation,
                v.z_under,
                v.z_over,
                v.surge,
                v.sway,
                v.pitch,
                v.yaw_rate
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub best: Vec<f64>,
    pub best_cost: f64,
    pub trace: ConvergenceTrace,
    pub population: Population,
    pub evaluations: usize,
}

fn record<O: Objective>(pop: &Population, objective: &O) -> GenerationRecord {
    let best = pop.best_index();
    let violations = objective.violations(&pop.members[best]).unwrap_or_default();
    GenerationRecord {
        generation: pop.generation,
        best_cost: pop.costs[best],
        mean_cost: pop.mean_cost(),
        collision_violation: violations.collision,
        violations,
    }
}

fn evaluate_all<O: Objective>(members: &[Vec<f64>], objective: &O) -> Vec<f64> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        members.par_iter().map(|m| sanitize(objective.cost(m))).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        members.iter().map(|m| sanitize(objective.cost(m))).collect()
    }
}

/// One member's mutate/crossover/select pipeline for generation `g`.
fn evolve_member<O: Objective>(
    cfg: &DeConfig,
    bounds: &Bounds,
    pop: &Population,
    objective: &O,
    g: u64,
    i: usize,
) -> Result<(Vec<f64>, f64)> {
    let mut rng = Stream::for_purpose(cfg.seed, Purpose::Mutation, &[g, i as u64]);
    let f = rng.uniform_in(cfg.f_bounds[0], cfg.f_bounds[1]);
    let mutant = mutate(pop, bounds, i, f, cfg.donor_mode, &mut rng)?;
    let mut xrng = Stream::for_purpose(cfg.seed, Purpose::Crossover, &[g, i as u64]);
    let trial = crossover(&pop.members[i], &mutant, cfg.crossover, &mut xrng);
    let mutant_cost = match cfg.selection {
        SelectionMode::ThreeWay => sanitize(objective.cost(&mutant)),
        SelectionMode::TrialOnly => f64::INFINITY,
    };
    let trial_cost = sanitize(objective.cost(&trial));
    Ok(match select_by_cost(pop.costs[i], mutant_cost, trial_cost) {
        Survivor::Trial => (trial, trial_cost),
        Survivor::Mutant => (mutant, mutant_cost),
        Survivor::Parent => (pop.members[i].clone(), pop.costs[i]),
    })
}

/// Runs DE and calls `observe` after the initial evaluation and after every
/// generation.
pub fn run_observed<O, F>(cfg: &DeConfig, bounds: &Bounds, objective: &mut O, mut observe: F) -> Result<RunResult>
where
    O: Objective,
    F: FnMut(&Population, &O),
{
    let mut pop = init_population(cfg, bounds)?;
    objective.begin_epoch(0);
    pop.costs = evaluate_all(&pop.members, objective);
    let mut evaluations = pop.len();
    let mut trace = ConvergenceTrace { records: vec![record(&pop, objective)] };
    observe(&pop, objective);

    for g in 1..=cfg.iter_max {
        if objective.begin_epoch(g as u64) {
            pop.costs = evaluate_all(&pop.members, objective);
            evaluations += pop.len();
        }
        let next: Result<Vec<(Vec<f64>, f64)>> = {
            let cur = &pop;
            let obj: &O = objective;
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                (0..cur.len()).into_par_iter().map(|i| evolve_member(cfg, bounds, cur, obj, g as u64, i)).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..cur.len()).map(|i| evolve_member(cfg, bounds, cur, obj, g as u64, i)).collect()
            }
        };
        let (members, costs) = next?.into_iter().unzip();
        pop = Population { members, costs, generation: g };
        evaluations += cfg.selection.evaluations_per_member() * pop.len();
        trace.records.push(record(&pop, objective));
        observe(&pop, objective);
    }

    let best = pop.best_index();
    Ok(RunResult { best: pop.members[best].clone(), best_cost: pop.costs[best], trace, population: pop, evaluations })
}

pub fn run<O: Objective>(cfg: &DeConfig, bounds: &Bounds, objective: &mut O) -> Result<RunResult> {
    run_observed(cfg, bounds, objective, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn pop_of(members: Vec<Vec<f64>>) -> Population {
        let n = members.len();
        Population { members, costs: vec![0.0; n], generation: 0 }
    }

    #[test]
    fn degenerate_bounds_give_identical_members() {
        let cfg = DeConfig { pop_size: 10, ..Default::default() };
        let pop = init_population(&cfg, &Bounds::new(vec![[2.0, 2.0], [-1.0, -1.0]]).unwrap()).unwrap();
        assert!(pop.members.iter().all(|m| m == &vec![2.0, -1.0]));
    }

    #[test]
    fn init_is_seeded() {
        let cfg = DeConfig { pop_size: 20, seed: 42, ..Default::default() };
        let b = Bounds::uniform(5, -3.0, 3.0).unwrap();
        assert_eq!(init_population(&cfg, &b).unwrap(), init_population(&cfg, &b).unwrap());
        let other = DeConfig { seed: 43, ..cfg.clone() };
        assert_ne!(init_population(&cfg, &b).unwrap(), init_population(&other, &b).unwrap());
    }

    #[test]
    fn inverted_bounds_rejected() {
        assert!(matches!(Bounds::new(vec![[0.0, 1.0], [2.0, 1.0]]), Err(Error::Bounds { index: 1, .. })));
    }

    #[test]
    fn init_is_uniform() {
        let cfg = DeConfig { pop_size: 10_000, seed: 7, ..Default::default() };
        let pop = init_population(&cfg, &Bounds::uniform(1, 0.0, 1.0).unwrap()).unwrap();
        let mut xs: Vec<f64> = pop.members.iter().map(|m| m[0]).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.5).abs() < 0.02);
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let ks =
            xs.iter().enumerate().map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs())).fold(0.0, f64::max);
        assert!(ks < 0.02, "KS {ks}");
    }

    #[test]
    fn plain_rand1_arithmetic() {
        let b = Bounds::uniform(2, -10.0, 10.0).unwrap();
        assert_eq!(differential(&[0.0, 0.0], &[2.0, 2.0], &[1.0, 1.0], 0.5, &b), vec![0.5, 0.5]);
    }

    #[test]
    fn zero_difference_returns_base() {
        let b = Bounds::uniform(3, -10.0, 10.0).unwrap();
        let base = [1.0, -2.0, 3.0];
        assert_eq!(differential(&base, &[4.0, 4.0, 4.0], &[4.0, 4.0, 4.0], 0.7, &b), base.to_vec());
        // full pipeline: members 1..3 identical, so the donor is that member in either mode
        let pop = pop_of(vec![vec![9.0, 9.0, 9.0], vec![1.0, -2.0, 3.0], vec![1.0, -2.0, 3.0], vec![1.0, -2.0, 3.0]]);
        for mode in [DonorMode::PlainRand1, DonorMode::WeightedTriplet] {
            let mut rng = Stream::new(1, &[]);
            let m = mutate(&pop, &b, 0, 0.6, mode, &mut rng).unwrap();
            for (a, e) in m.iter().zip(&base) {
                assert!((a - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_weights_pick_first() {
        let d = weighted_donor([&[1.0, 2.0], &[5.0, 5.0], &[-3.0, 0.0]], [1.0, 0.0, 0.0]);
        assert_eq!(d, vec![1.0, 2.0]);
        let even = weighted_donor([&[3.0], &[6.0], &[0.0]], [0.0, 0.0, 0.0]);
        assert!((even[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn too_small_population() {
        let pop = pop_of(vec![vec![0.0]; 3]);
        let b = Bounds::uniform(1, -1.0, 1.0).unwrap();
        let mut rng = Stream::new(0, &[]);
        assert!(matches!(mutate(&pop, &b, 0, 0.5, DonorMode::PlainRand1, &mut rng), Err(Error::InsufficientPopulation(3))));
        assert!(DeConfig { pop_size: 3, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn triplets_are_distinct() {
        let mut rng = Stream::new(5, &[]);
        for _ in 0..5000 {
            let n = 4 + rng.index(10);
            let t = rng.index(n);
            let [a, b, c] = pick_triplet(n, t, &mut rng).unwrap();
            assert!(a != b && b != c && a != c && a != t && b != t && c != t);
            assert!(a < n && b < n && c < n);
        }
    }

    #[test]
    fn crossover_extremes() {
        let parent = vec![0.0; 8];
        let mutant = vec![1.0; 8];
        let mut rng = Stream::new(3, &[]);
        assert_eq!(crossover(&parent, &mutant, 1.0, &mut rng), mutant);
        for _ in 0..50 {
            let t = crossover(&parent, &mutant, 0.0, &mut rng);
            assert_eq!(t.iter().filter(|&&g| g == 1.0).count(), 1);
        }
    }

    #[test]
    fn crossover_hand_trace() {
        // rands (0.1, 0.9, 0.3), Cr 0.2, forced index is the second gene
        let t = binomial_crossover(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0], 0.2, 1, &[0.1, 0.9, 0.3]);
        assert_eq!(t, vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn selection_rules() {
        assert_eq!(select_by_cost(2.0, 3.0, 1.0), Survivor::Trial);
        assert_eq!(select_by_cost(1.0, 1.0, 1.0), Survivor::Trial);
        assert_eq!(select_by_cost(1.0, 1.0, 2.0), Survivor::Mutant);
        assert_eq!(select_by_cost(1.0, 2.0, 2.0), Survivor::Parent);
        assert_eq!(select_by_cost(1.0, f64::NAN, f64::INFINITY), Survivor::Parent);
        assert_eq!(select_by_cost(f64::NAN, 5.0, f64::NAN), Survivor::Mutant);
    }

    #[test]
    fn selection_is_min_of_three() {
        let mut rng = Stream::new(12, &[]);
        for _ in 0..100 {
            let c = [rng.uniform(), rng.uniform(), rng.uniform()];
            let min = c.iter().cloned().fold(f64::INFINITY, f64::min);
            let (p, m, t) = ([0.0], [1.0], [2.0]);
            let (_, cost) = select(&p, &m, &t, |x| c[x[0] as usize]);
            assert_eq!(cost, min);
        }
    }

    #[test]
    fn reflection_stays_inside() {
        assert_eq!(reflect(1.5, 0.0, 1.0), 0.5);
        assert_eq!(reflect(-0.25, 0.0, 1.0), 0.25);
        assert_eq!(reflect(3.5, 0.0, 1.0), 0.5);
        assert_eq!(reflect(7.0, 2.0, 2.0), 2.0);
        assert_eq!(reflect(f64::NAN, 0.0, 4.0), 2.0);
        let mut rng = Stream::new(4, &[]);
        for _ in 0..1000 {
            let x = rng.uniform_in(-1e4, 1e4);
            let r = reflect(x, -3.0, 5.0);
            assert!((-3.0..=5.0).contains(&r));
        }
    }

    #[test]
    fn sphere_converges() {
        let cfg = DeConfig { seed: 1, ..Default::default() };
        let b = Bounds::uniform(15, -5.0, 5.0).unwrap();
        let res = run(&cfg, &b, &mut FnObjective(sphere)).unwrap();
        assert!(res.best_cost < 1e-3, "{}", res.best_cost);
        assert_eq!(res.trace.records.len(), 201);
        assert!(res.trace.best_costs().windows(2).all(|w| w[1] <= w[0]));
        assert!(b.contains(&res.best));
        assert_eq!(res.evaluations, 100 + 200 * 100);
    }

    #[test]
    fn zero_iterations_returns_initial_best() {
        let cfg = DeConfig { iter_max: 0, seed: 9, pop_size: 12, ..Default::default() };
        let b = Bounds::uniform(4, -5.0, 5.0).unwrap();
        let res = run(&cfg, &b, &mut FnObjective(sphere)).unwrap();
        let init = init_population(&cfg, &b).unwrap();
        let best = init.members.iter().map(|m| sphere(m)).fold(f64::INFINITY, f64::min);
        assert_eq!(res.best_cost, best);
        assert_eq!(res.trace.records.len(), 1);
    }

    #[test]
    fn runs_are_reproducible() {
        let cfg = DeConfig { iter_max: 30, seed: 5, pop_size: 20, ..Default::default() };
        let b = Bounds::uniform(6, -5.0, 5.0).unwrap();
        let a = run(&cfg, &b, &mut FnObjective(sphere)).unwrap();
        let c = run(&cfg, &b, &mut FnObjective(sphere)).unwrap();
        assert_eq!(a.trace, c.trace);
        assert_eq!(a.best, c.best);
    }

    #[test]
    fn trace_csv_shape() {
        let cfg = DeConfig { iter_max: 2, pop_size: 5, ..Default::default() };
        let res = run(&cfg, &Bounds::uniform(2, -1.0, 1.0).unwrap(), &mut FnObjective(sphere)).unwrap();
        let mut buf = Vec::new();
        res.trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("generation,best_cost,mean_cost,collision_violation,"));
    }
}
