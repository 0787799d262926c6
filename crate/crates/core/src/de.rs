//! The differential-evolution worker.
//!
//! Standard DE with direct constraint handling: every individual carries
//! its objective value and per-constraint evaluations, and selection
//! follows feasibility rules instead of penalties. Feasibility is
//! decided rigorously (interval evaluation of each constraint at the
//! point), and only reliable upper bounds — right endpoints of interval
//! objective evaluations at rigorously feasible points — are ever
//! reported to the branch-and-contract peer.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::interval::IntervalBox;
use crate::model::Problem;

#[derive(Clone, Debug)]
pub struct DeConfig {
    /// Population size (NP); crossover needs at least 4 individuals.
    pub population: usize,
    /// Amplitude factor W applied to the difference vector.
    pub weight: f64,
    /// Crossover rate CR.
    pub crossover_rate: f64,
    pub seed: u64,
    /// Generation cap (used by de-only mode and as a safety net).
    pub max_generations: u64,
    /// Drop the elite individual on domain reductions instead of
    /// reinserting it (matches a literal population restart).
    pub strict_restart: bool,
}

impl Default for DeConfig {
    fn default() -> Self {
        DeConfig {
            population: 30,
            weight: 0.7,
            crossover_rate: 0.9,
            seed: 0,
            max_generations: u64::MAX,
            strict_restart: false,
        }
    }
}

/// A candidate solution with its cached evaluation vector.
#[derive(Clone, Debug)]
pub struct Individual {
    pub position: Vec<f64>,
    /// Floating objective value; NaN marks an evaluation domain error.
    pub objective: f64,
    /// Reliable (interval upper bound) value of each constraint at the
    /// position; +inf when the constraint cannot be evaluated there.
    pub constraint_values: Vec<f64>,
    /// Rigorous feasibility: every constraint's interval evaluation is
    /// nonpositive.
    pub feasible: bool,
    /// Reliable objective upper bound, computed lazily on candidate
    /// bests only.
    pub rigorous_ub: Option<f64>,
}

impl Individual {
    fn violation(&self, i: usize) -> f64 {
        self.constraint_values[i].max(0.0)
    }
}

/// Rigorous feasibility test: the interval evaluation of every
/// (normalized) constraint at `x` has a nonpositive upper bound.
pub fn rigorous_feasible(x: &[f64], problem: &Problem) -> bool {
    let point = IntervalBox::degenerate(x);
    problem.constraints().iter().all(|c| {
        let g = c.eval_natural(&point);
        !g.is_empty() && g.hi() <= 0.0
    })
}

/// Reliable upper bound of the objective at `x`: the right endpoint of
/// its interval evaluation. `None` when the objective is undefined at x.
pub fn rigorous_upper_bound(x: &[f64], problem: &Problem) -> Option<f64> {
    let f = problem
        .objective()
        .eval_natural(&IntervalBox::degenerate(x));
    if f.is_empty() {
        None
    } else {
        Some(f.hi())
    }
}

/// Index of the base individual for target `i` under the shared
/// per-generation offset: base assignment is a permutation, so every
/// individual serves as base exactly once per generation.
pub fn base_index(i: usize, offset: usize, np: usize) -> usize {
    debug_assert!(offset >= 1 && offset < np);
    (i + offset) % np
}

/// Draws the two difference partners, distinct from each other and from
/// the target and base.
pub fn pick_partners<R: Rng>(rng: &mut R, np: usize, target: usize, base: usize) -> (usize, usize) {
    debug_assert!(np >= 4);
    let v = loop {
        let k = rng.gen_range(0..np);
        if k != target && k != base {
            break k;
        }
    };
    let w = loop {
        let k = rng.gen_range(0..np);
        if k != target && k != base && k != v {
            break k;
        }
    };
    (v, w)
}

/// Deterministic crossover kernel: coordinate `i` mutates to
/// `u_i + W*(v_i - w_i)` when `i == forced` or `draws[i] < cr`, and is
/// copied from the target otherwise.
pub fn crossover_with(
    x: &[f64],
    u: &[f64],
    v: &[f64],
    w: &[f64],
    weight: f64,
    cr: f64,
    forced: usize,
    draws: &[f64],
) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            if i == forced || draws[i] < cr {
                u[i] + weight * (v[i] - w[i])
            } else {
                x[i]
            }
        })
        .collect()
}

/// Crossover with randomness drawn from `rng`: the forced index
/// guarantees the offspring differs from the target in at least one
/// coordinate.
pub fn crossover<R: Rng>(
    rng: &mut R,
    x: &[f64],
    u: &[f64],
    v: &[f64],
    w: &[f64],
    weight: f64,
    cr: f64,
) -> Vec<f64> {
    let n = x.len();
    let forced = rng.gen_range(0..n);
    let draws: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    crossover_with(x, u, v, w, weight, cr, forced, &draws)
}

/// Repairs out-of-bound coordinates by placing them between the base
/// coordinate and the violated bound.
pub fn bounce_back<R: Rng>(rng: &mut R, y: &mut [f64], u: &[f64], domain: &IntervalBox) {
    for i in 0..y.len() {
        let c = domain.comp(i);
        if y[i] > c.hi() {
            let omega: f64 = rng.gen();
            y[i] = u[i] + omega * (c.hi() - u[i]);
        } else if y[i] < c.lo() {
            let omega: f64 = rng.gen();
            y[i] = u[i] + omega * (c.lo() - u[i]);
        }
        y[i] = y[i].clamp(c.lo(), c.hi());
    }
}

/// Direct-constraint-handling selection: is the challenger acceptable
/// in place of the incumbent? True when both are feasible and the
/// challenger's objective is no worse, when only the challenger is
/// feasible, or when both are infeasible and the challenger violates no
/// constraint more.
pub fn better(incumbent: &Individual, challenger: &Individual) -> bool {
    if incumbent.feasible && challenger.feasible {
        return challenger.objective <= incumbent.objective;
    }
    if challenger.feasible && !incumbent.feasible {
        return true;
    }
    if !incumbent.feasible && !challenger.feasible {
        return (0..incumbent.constraint_values.len())
            .all(|i| challenger.violation(i) <= incumbent.violation(i));
    }
    false
}

/// Messages a DE worker can receive from its peer.
#[derive(Clone, Debug)]
pub enum DeIncoming {
    /// A punctual solution found by the peer, with its reliable value.
    Solution(Vec<f64>, f64),
    /// Replace the search domain and restart the population inside it.
    Reduction(IntervalBox),
    Terminate,
}

/// How the worker talks to its branch-and-contract peer.
pub trait DeLink {
    fn drain(&mut self) -> Vec<DeIncoming>;
    fn send_upper_bound(&mut self, x: &[f64], ub: f64);
    /// Called once per completed generation (drives reduction periods).
    fn note_generation(&mut self);
}

/// Link for running the worker alone (de-only mode).
pub struct SoloDe;

impl DeLink for SoloDe {
    fn drain(&mut self) -> Vec<DeIncoming> {
        Vec::new()
    }
    fn send_upper_bound(&mut self, _x: &[f64], _ub: f64) {}
    fn note_generation(&mut self) {}
}

/// The resumable DE worker; `step_generation` advances one generation.
pub struct DeWorker<'p, L: DeLink> {
    problem: &'p Problem,
    cfg: DeConfig,
    pub domain: IntervalBox,
    pub population: Vec<Individual>,
    rng: ChaCha8Rng,
    /// Best reliable upper bound established so far (the worker's view
    /// of the incumbent).
    pub best_reliable_ub: f64,
    /// The point that produced `best_reliable_ub`, when this worker
    /// found it.
    pub best_reliable_point: Option<Vec<f64>>,
    /// Floating objective of the best rigorously feasible individual;
    /// the trigger for paying the interval-evaluation cost.
    best_float: f64,
    pub generation: u64,
    link: L,
    eval_buf: Vec<f64>,
    done: bool,
}

impl<'p, L: DeLink> DeWorker<'p, L> {
    /// `initial_domain` should be the constraint-contracted problem
    /// domain so the population starts clear of obviously infeasible
    /// space.
    pub fn new(problem: &'p Problem, cfg: DeConfig, link: L, initial_domain: IntervalBox) -> Self {
        assert!(cfg.population >= 4, "crossover needs at least 4 individuals");
        assert!(cfg.weight > 0.0 && (0.0..=1.0).contains(&cfg.crossover_rate));
        let mut worker = DeWorker {
            problem,
            cfg: cfg.clone(),
            domain: initial_domain,
            population: Vec::with_capacity(cfg.population),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            best_reliable_ub: f64::INFINITY,
            best_reliable_point: None,
            best_float: f64::INFINITY,
            generation: 0,
            link,
            eval_buf: Vec::new(),
            done: false,
        };
        let initial: Vec<Vec<f64>> = (0..cfg.population)
            .map(|_| worker.sample_point())
            .collect();
        worker.population = initial
            .into_iter()
            .map(|x| worker.evaluate(x))
            .collect();
        worker.refresh_best();
        worker
    }

    fn sample_point(&mut self) -> Vec<f64> {
        (0..self.domain.dim())
            .map(|i| {
                let c = self.domain.comp(i);
                if c.lo() == c.hi() {
                    c.lo()
                } else {
                    self.rng.gen_range(c.lo()..=c.hi())
                }
            })
            .collect()
    }

    fn evaluate(&mut self, position: Vec<f64>) -> Individual {
        let objective = self
            .problem
            .objective()
            .eval_real_buf(&position, &mut self.eval_buf);
        let m = self.problem.constraints().len();
        if objective.is_nan() {
            return Individual {
                position,
                objective,
                constraint_values: vec![f64::INFINITY; m],
                feasible: false,
                rigorous_ub: None,
            };
        }
        let point = IntervalBox::degenerate(&position);
        let mut feasible = true;
        let constraint_values: Vec<f64> = self
            .problem
            .constraints()
            .iter()
            .map(|c| {
                let g = c.eval_natural(&point);
                if g.is_empty() {
                    feasible = false;
                    f64::INFINITY
                } else {
                    if g.hi() > 0.0 {
                        feasible = false;
                    }
                    g.hi()
                }
            })
            .collect();
        Individual {
            position,
            objective,
            constraint_values,
            feasible,
            rigorous_ub: None,
        }
    }

    /// Index of the current worst individual: largest total violation
    /// among the infeasible, else largest objective.
    fn worst_index(&self) -> usize {
        let total = |ind: &Individual| -> f64 {
            ind.constraint_values
                .iter()
                .map(|v| v.max(0.0))
                .sum::<f64>()
        };
        let any_infeasible = self.population.iter().any(|p| !p.feasible);
        let mut worst = 0;
        for i in 1..self.population.len() {
            let (a, b) = (&self.population[worst], &self.population[i]);
            let b_is_worse = if any_infeasible {
                match (a.feasible, b.feasible) {
                    (true, false) => true,
                    (false, true) => false,
                    _ => total(b) > total(a),
                }
            } else {
                !(b.objective <= a.objective) || b.objective.is_nan()
            };
            if b_is_worse {
                worst = i;
            }
        }
        worst
    }

    /// Re-derives the incumbent trigger from the population and reports
    /// a fresh reliable bound when it improves.
    fn refresh_best(&mut self) {
        let mut best: Option<usize> = None;
        for (i, ind) in self.population.iter().enumerate() {
            if ind.feasible && !ind.objective.is_nan() {
                if best.map_or(true, |b| ind.objective < self.population[b].objective) {
                    best = Some(i);
                }
            }
        }
        let Some(bi) = best else { return };
        if self.population[bi].objective < self.best_float {
            self.best_float = self.population[bi].objective;
            if let Some(ub) = rigorous_upper_bound(&self.population[bi].position, self.problem) {
                self.population[bi].rigorous_ub = Some(ub);
                if ub < self.best_reliable_ub {
                    self.best_reliable_ub = ub;
                    let x = self.population[bi].position.clone();
                    self.best_reliable_point = Some(x.clone());
                    self.link.send_upper_bound(&x, ub);
                }
            }
        }
    }

    /// Regenerates the population inside a new (smaller) domain. The
    /// best rigorously feasible individual survives when it still lies
    /// inside, unless strict restarts are requested.
    pub fn restart_in(&mut self, new_domain: IntervalBox) {
        debug_assert!(!new_domain.is_empty());
        let keep: Option<Individual> = if self.cfg.strict_restart {
            None
        } else {
            self.population
                .iter()
                .filter(|p| p.feasible && !p.objective.is_nan())
                .min_by(|a, b| a.objective.total_cmp(&b.objective))
                .filter(|p| new_domain.contains_point(&p.position))
                .cloned()
        };
        self.domain = new_domain;
        let np = self.cfg.population;
        let fresh: Vec<Vec<f64>> = (0..np).map(|_| self.sample_point()).collect();
        self.population = fresh.into_iter().map(|x| self.evaluate(x)).collect();
        if let Some(elite) = keep {
            self.population[0] = elite;
        }
        // the trigger resets so the new population can re-establish it
        self.best_float = self
            .population
            .iter()
            .filter(|p| p.feasible && !p.objective.is_nan())
            .map(|p| p.objective)
            .fold(f64::INFINITY, f64::min);
    }

    fn inject(&mut self, x: Vec<f64>, ub: f64) {
        if x.len() != self.problem.dim() {
            return;
        }
        let candidate = self.evaluate(x);
        let worst = self.worst_index();
        self.population[worst] = candidate;
        if ub < self.best_reliable_ub {
            self.best_reliable_ub = ub;
        }
    }

    pub fn is_done(&self) -> bool {
        self.done || self.generation >= self.cfg.max_generations
    }

    /// One generation: drain peer messages, breed NP offspring, select,
    /// then report any improved reliable bound.
    pub fn step_generation(&mut self) {
        if self.is_done() {
            return;
        }
        for msg in self.link.drain() {
            match msg {
                DeIncoming::Solution(x, ub) => self.inject(x, ub),
                DeIncoming::Reduction(b) => self.restart_in(b),
                DeIncoming::Terminate => {
                    self.done = true;
                    return;
                }
            }
        }
        let np = self.cfg.population;
        let offset = self.rng.gen_range(1..np);
        let mut next: Vec<Individual> = Vec::with_capacity(np);
        for i in 0..np {
            let u = base_index(i, offset, np);
            let (v, w) = pick_partners(&mut self.rng, np, i, u);
            let mut y = crossover(
                &mut self.rng,
                &self.population[i].position,
                &self.population[u].position,
                &self.population[v].position,
                &self.population[w].position,
                self.cfg.weight,
                self.cfg.crossover_rate,
            );
            let base = self.population[u].position.clone();
            bounce_back(&mut self.rng, &mut y, &base, &self.domain);
            let challenger = self.evaluate(y);
            if better(&self.population[i], &challenger) {
                next.push(challenger);
            } else {
                next.push(self.population[i].clone());
            }
        }
        self.population = next;
        self.generation += 1;
        self.link.note_generation();
        self.refresh_best();
    }

    pub fn run(&mut self) {
        while !self.is_done() {
            self.step_generation();
        }
    }

    /// The best individual by the selection rules (feasible-first).
    pub fn best_individual(&self) -> &Individual {
        let mut best = &self.population[0];
        for ind in &self.population[1..] {
            if better(best, ind) {
                best = ind;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use crate::model::parse_problem;

    fn sphere() -> Problem {
        parse_problem(
            "var x in [-5, 5]; var y in [-5, 5]; minimize sqr(x) + sqr(y);",
            1e-8,
        )
        .unwrap()
    }

    #[test]
    fn base_index_is_modular() {
        assert_eq!(base_index(4, 2, 5), 1);
    }

    #[test]
    fn base_assignment_is_a_permutation() {
        let np = 7;
        for offset in 1..np {
            let mut seen = vec![false; np];
            for i in 0..np {
                seen[base_index(i, offset, np)] = true;
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn partners_are_distinct_even_at_np4() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let (v, w) = pick_partners(&mut rng, 4, 0, 1);
            assert!(v != w && v != 0 && v != 1 && w != 0 && w != 1);
        }
    }

    #[test]
    fn crossover_matches_hand_example() {
        let y = crossover_with(
            &[1.0, 2.0],
            &[0.0, 0.0],
            &[1.0, 1.0],
            &[0.0, 2.0],
            0.5,
            0.9,
            0,
            &[0.95, 0.3],
        );
        assert_eq!(y, vec![0.5, -0.5]);
    }

    #[test]
    fn crossover_with_full_rate_mutates_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let y = crossover(
            &mut rng,
            &[9.0, 9.0, 9.0],
            &[1.0, 2.0, 3.0],
            &[2.0, 2.0, 2.0],
            &[1.0, 1.0, 1.0],
            0.5,
            1.0,
        );
        assert_eq!(y, vec![1.5, 2.5, 3.5]);
    }

    #[test]
    fn crossover_with_equal_partners_copies_base() {
        let v = [3.0, 4.0];
        let y = crossover_with(&[9.0, 9.0], &[1.0, 2.0], &v, &v, 0.7, 1.0, 0, &[0.0, 0.0]);
        assert_eq!(y, vec![1.0, 2.0]);
    }

    #[test]
    fn bounce_back_lands_between_base_and_bound() {
        let domain = IntervalBox::new(vec![Interval::new(0.0, 5.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut y = vec![7.0];
            bounce_back(&mut rng, &mut y, &[2.0], &domain);
            assert!(y[0] >= 2.0 && y[0] <= 5.0);
        }
        // in-bounds coordinates are untouched
        let mut y = vec![4.25];
        bounce_back(&mut rng, &mut y, &[2.0], &domain);
        assert_eq!(y[0], 4.25);
    }

    fn ind(feasible: bool, objective: f64, viol: &[f64]) -> Individual {
        Individual {
            position: vec![0.0],
            objective,
            constraint_values: viol.to_vec(),
            feasible,
            rigorous_ub: None,
        }
    }

    #[test]
    fn selection_rules() {
        // equal objectives: challenger accepted
        assert!(better(&ind(true, 1.0, &[]), &ind(true, 1.0, &[])));
        // feasible challenger beats infeasible incumbent
        assert!(better(&ind(false, 0.0, &[1.0]), &ind(true, 9.0, &[-1.0])));
        // both infeasible: componentwise violations decide
        assert!(!better(
            &ind(false, 0.0, &[0.5, 1.0]),
            &ind(false, 0.0, &[0.4, 2.0])
        ));
        assert!(better(
            &ind(false, 0.0, &[0.5, 1.0]),
            &ind(false, 0.0, &[0.5, 0.5])
        ));
        // feasible incumbent never yields to infeasible challenger
        assert!(!better(&ind(true, 1.0, &[-1.0]), &ind(false, -5.0, &[1.0])));
    }

    #[test]
    fn rigorous_feasibility_is_strict() {
        let p = parse_problem(
            "var x in [0, 2]; minimize x; subject to x - 1 <= 0;",
            1e-8,
        )
        .unwrap();
        assert!(rigorous_feasible(&[1.0], &p));
        assert!(!rigorous_feasible(&[1.0 + 1e-6], &p));
        assert!(rigorous_feasible(&[0.5], &p));
    }

    #[test]
    fn rigorous_bound_dominates_float_eval() {
        let p = sphere();
        let x = [3.0, 0.0];
        assert_eq!(rigorous_upper_bound(&x, &p), Some(9.0));
        let x2 = [0.1, 0.2];
        let ub = rigorous_upper_bound(&x2, &p).unwrap();
        assert!(ub >= p.objective().eval_real(&x2));
    }

    #[test]
    fn sphere_converges_with_fixed_seed() {
        let p = sphere();
        let cfg = DeConfig {
            seed: 42,
            max_generations: 200,
            ..DeConfig::default()
        };
        let domain = p.domain().clone();
        let mut de = DeWorker::new(&p, cfg, SoloDe, domain);
        de.run();
        let best = de.best_individual();
        assert!(best.feasible);
        assert!(
            best.objective <= 1e-6,
            "best objective {} after 200 generations",
            best.objective
        );
        // population stayed inside the domain
        for ind in &de.population {
            assert!(de.domain.contains_point(&ind.position));
        }
        assert_eq!(de.population.len(), 30);
    }

    #[test]
    fn injected_superior_solution_becomes_best() {
        let p = sphere();
        let cfg = DeConfig {
            seed: 9,
            ..DeConfig::default()
        };
        let domain = p.domain().clone();
        let mut de = DeWorker::new(&p, cfg, SoloDe, domain);
        de.inject(vec![0.0, 0.0], 0.0);
        // after one generation the injected optimum is the best individual
        de.step_generation();
        let best = de.best_individual();
        assert_eq!(best.objective, 0.0);
        assert_eq!(de.population.len(), 30);
    }

    #[test]
    fn restart_keeps_elite_only_when_inside() {
        let p = sphere();
        let cfg = DeConfig {
            seed: 5,
            ..DeConfig::default()
        };
        let domain = p.domain().clone();
        let mut de = DeWorker::new(&p, cfg, SoloDe, domain);
        de.inject(vec![4.5, 4.5], 40.5);
        for _ in 0..5 {
            de.step_generation();
        }
        let reduced = IntervalBox::new(vec![
            Interval::new(-1.0, 1.0),
            Interval::new(-1.0, 1.0),
        ]);
        de.restart_in(reduced.clone());
        assert_eq!(de.population.len(), 30);
        for ind in &de.population {
            assert!(
                reduced.contains_point(&ind.position),
                "individual {:?} escaped the reduced domain",
                ind.position
            );
        }
    }
}
