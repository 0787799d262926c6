//! The cooperation layer between the two workers.
//!
//! The differential-evolution worker ships rigorously validated upper
//! bounds; the branch-and-contract worker ships punctual solutions,
//! periodic domain reductions (the convex hull of its queue), and the
//! final certificate. Transport is a pair of in-process FIFO queues;
//! the message contract itself is transport-agnostic.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::mpsc::{channel, Receiver, Sender};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use crate::contractor::{hc4, RelationalConstraint};
use crate::de::{DeConfig, DeIncoming, DeLink, DeWorker, SoloDe};
use crate::ibc::{
    BisectStrategy, IbcConfig, IbcLink, IbcWorker, NoCoop, QueueStrategy, WorkItem, WorkQueue,
};
use crate::interval::{point_box_distance, IntervalBox};
use crate::model::Problem;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SolveStatus {
    /// The returned pair (global_lb, best_ub) encloses the global
    /// minimum with gap at most eps, witnessed by a rigorously feasible
    /// point.
    Certified,
    /// The whole domain was eliminated: no feasible point exists.
    Infeasible,
    /// A cap or an unsplittable remainder stopped the search early; the
    /// reported gap is whatever was proven by then.
    Uncertified,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolveStatus::Certified => "CERTIFIED",
            SolveStatus::Infeasible => "INFEASIBLE",
            SolveStatus::Uncertified => "UNCERTIFIED",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolveStats {
    pub boxes_processed: u64,
    pub max_queue_size: usize,
    /// Incumbent improvements accepted by the branch-and-contract side.
    pub ub_updates: u64,
    /// The subset of those that arrived from the DE worker.
    pub ub_updates_from_de: u64,
    pub reductions_sent: u64,
    pub de_generations: u64,
    /// Every accepted incumbent value, in order (strictly decreasing).
    pub ub_history: Vec<f64>,
    /// Discarded boxes with the incumbent at discard time; only filled
    /// when discard recording is enabled.
    pub discard_log: Vec<(IntervalBox, f64)>,
}

/// The solver's final answer: an enclosure of the global minimum and
/// the witness point.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub status: SolveStatus,
    /// Best reliable upper bound found (+inf when no feasible point was
    /// ever validated).
    pub best_ub: f64,
    pub global_lb: f64,
    pub best_point: Option<Vec<f64>>,
    pub stats: SolveStats,
}

impl Certificate {
    pub fn gap(&self) -> f64 {
        self.best_ub - self.global_lb
    }
}

/// Typed payloads exchanged between the workers.
#[derive(Clone, Debug)]
pub enum Message {
    /// DE -> IBC: a rigorously validated upper bound at a feasible point.
    UpperBound { point: Vec<f64>, ub: f64 },
    /// IBC -> DE: a punctual solution to inject into the population.
    Solution { point: Vec<f64>, ub: f64 },
    /// IBC -> DE: replace the search domain with this box.
    DomainReduction(IntervalBox),
    /// IBC -> DE: the search is over; the certificate is authoritative.
    Terminate(Box<Certificate>),
}

fn render_floats(xs: &[f64]) -> String {
    xs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn render_message(msg: &Message) -> String {
    match msg {
        Message::UpperBound { point, ub } => format!("UB {} {}", render_floats(point), ub),
        Message::Solution { point, ub } => {
            format!("SOLUTION {} {}", render_floats(point), ub)
        }
        Message::DomainReduction(b) => {
            let bounds: Vec<f64> = b
                .components()
                .iter()
                .flat_map(|c| [c.lo(), c.hi()])
                .collect();
            format!("REDUCE {}", render_floats(&bounds))
        }
        Message::Terminate(cert) => format!(
            "TERMINATE {} {} {}",
            cert.status, cert.best_ub, cert.global_lb
        ),
    }
}

/// Farthest-first key: the coordinate-wise distance from the incumbent
/// to the box. Boxes containing the incumbent get priority 0 and are
/// extracted last.
pub fn maxdist_priority(item: &WorkItem, incumbent: &[f64]) -> f64 {
    point_box_distance(incumbent, &item.region)
}

/// Rekeys the whole queue under a new incumbent and restores heap order.
pub fn reprioritize(queue: &mut WorkQueue, incumbent: &[f64]) {
    queue.rebuild(|item| maxdist_priority(item, incumbent));
}

/// Component-wise convex hull of every box in the queue (linear in the
/// queue size). `None` on an empty queue, which means the search space
/// is exhausted.
pub fn queue_hull(queue: &WorkQueue) -> Option<IntervalBox> {
    let mut iter = queue.iter();
    let first = iter.next()?;
    let mut hull = first.region.clone();
    for item in iter {
        hull = hull.hull(&item.region);
    }
    Some(hull)
}

struct Shared {
    log: Mutex<Vec<String>>,
    seq_de_to_ibc: AtomicU64,
    seq_ibc_to_de: AtomicU64,
    de_generations: AtomicU64,
    cancelled: AtomicBool,
}

impl Shared {
    fn log_send(&self, direction: &str, seq: u64, msg: &Message) {
        let line = format!("{seq} {direction} {}", render_message(msg));
        self.log.lock().unwrap().push(line);
    }
}

/// IBC-side endpoint of the cooperation channel.
pub struct IbcEnd {
    shared: Arc<Shared>,
    to_de: Sender<Message>,
    from_de: Receiver<Message>,
    reduction_period: u64,
    reductions_done: u64,
}

impl IbcLink for IbcEnd {
    fn drain_upper_bounds(&mut self) -> Vec<(Vec<f64>, f64)> {
        let mut out = Vec::new();
        while let Ok(msg) = self.from_de.try_recv() {
            if let Message::UpperBound { point, ub } = msg {
                out.push((point, ub));
            }
        }
        out
    }

    fn send_solution(&mut self, x: &[f64], ub: f64) {
        let msg = Message::Solution {
            point: x.to_vec(),
            ub,
        };
        let seq = self.shared.seq_ibc_to_de.fetch_add(1, Ordering::Relaxed);
        self.shared.log_send("IBC2DE", seq, &msg);
        let _ = self.to_de.send(msg);
    }

    fn reduction_due(&mut self) -> bool {
        if self.reduction_period == 0 {
            return false;
        }
        let gens = self.shared.de_generations.load(Ordering::Relaxed);
        gens >= (self.reductions_done + 1) * self.reduction_period
    }

    fn send_reduction(&mut self, hull: IntervalBox) {
        let msg = Message::DomainReduction(hull);
        let seq = self.shared.seq_ibc_to_de.fetch_add(1, Ordering::Relaxed);
        self.shared.log_send("IBC2DE", seq, &msg);
        let _ = self.to_de.send(msg);
        self.reductions_done += 1;
    }

    fn send_terminate(&mut self, certificate: &Certificate) {
        let msg = Message::Terminate(Box::new(certificate.clone()));
        let seq = self.shared.seq_ibc_to_de.fetch_add(1, Ordering::Relaxed);
        self.shared.log_send("IBC2DE", seq, &msg);
        let _ = self.to_de.send(msg);
    }

    fn cancelled(&self) -> bool {
        self.shared.cancelled.load(Ordering::Relaxed)
    }
}

/// DE-side endpoint of the cooperation channel.
pub struct DeEnd {
    shared: Arc<Shared>,
    to_ibc: Sender<Message>,
    from_ibc: Receiver<Message>,
}

impl DeLink for DeEnd {
    fn drain(&mut self) -> Vec<DeIncoming> {
        let mut out = Vec::new();
        while let Ok(msg) = self.from_ibc.try_recv() {
            match msg {
                Message::Solution { point, ub } => out.push(DeIncoming::Solution(point, ub)),
                Message::DomainReduction(b) => out.push(DeIncoming::Reduction(b)),
                Message::Terminate(_) => out.push(DeIncoming::Terminate),
                Message::UpperBound { .. } => {}
            }
        }
        if self.shared.cancelled.load(Ordering::Relaxed) {
            out.push(DeIncoming::Terminate);
        }
        out
    }

    fn send_upper_bound(&mut self, x: &[f64], ub: f64) {
        let msg = Message::UpperBound {
            point: x.to_vec(),
            ub,
        };
        let seq = self.shared.seq_de_to_ibc.fetch_add(1, Ordering::Relaxed);
        self.shared.log_send("DE2IBC", seq, &msg);
        let _ = self.to_ibc.send(msg);
    }

    fn note_generation(&mut self) {
        self.shared.de_generations.fetch_add(1, Ordering::Relaxed);
    }
}

/// Builds a connected pair of endpoints plus the orchestrator's handle
/// to shared state (log, generation counter, cancellation).
fn coop_channel(reduction_period: u64) -> (IbcEnd, DeEnd, Arc<Shared>) {
    let shared = Arc::new(Shared {
        log: Mutex::new(Vec::new()),
        seq_de_to_ibc: AtomicU64::new(0),
        seq_ibc_to_de: AtomicU64::new(0),
        de_generations: AtomicU64::new(0),
        cancelled: AtomicBool::new(false),
    });
    let (tx_to_de, rx_from_ibc) = channel();
    let (tx_to_ibc, rx_from_de) = channel();
    let ibc_end = IbcEnd {
        shared: Arc::clone(&shared),
        to_de: tx_to_de,
        from_de: rx_from_de,
        reduction_period,
        reductions_done: 0,
    };
    let de_end = DeEnd {
        shared: Arc::clone(&shared),
        to_ibc: tx_to_ibc,
        from_ibc: rx_from_ibc,
    };
    (ibc_end, de_end, shared)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Hybrid,
    IbcOnly,
    DeOnly,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Objective precision eps.
    pub eps: f64,
    /// Equality relaxation tolerance (applied at parse time; carried
    /// here for reporting).
    pub eps_eq: f64,
    pub population: usize,
    pub weight: f64,
    pub crossover_rate: f64,
    /// Quasi-fixed-point ratio for contraction loops.
    pub eta: f64,
    pub bisect: BisectStrategy,
    /// Queue strategy override. Unset, the cooperative solver uses
    /// farthest-first (whose point is exploring away from the incumbent
    /// the DE keeps sharp), while standalone branch-and-contract uses
    /// best-first, which does not depend on a peer for upper bounds.
    pub queue: Option<QueueStrategy>,
    pub seed: u64,
    pub mode: Mode,
    /// Run both workers on one thread with a fixed interleaving; two
    /// runs with the same seed then produce identical logs.
    pub deterministic: bool,
    /// Send a domain reduction every this many DE generations.
    pub reduction_period: u64,
    pub max_boxes: u64,
    pub max_generations: u64,
    pub max_time: Option<Duration>,
    /// Deterministic mode only: boxes processed per DE generation.
    pub ibc_steps_per_generation: u64,
    pub strict_restart: bool,
    pub record_discards: bool,
    /// A constraint counts as active at the witness when its interval
    /// value's upper bound lies within this much of zero.
    pub activity_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps: 1e-8,
            eps_eq: 1e-8,
            population: 30,
            weight: 0.7,
            crossover_rate: 0.9,
            eta: 0.0,
            bisect: BisectStrategy::RoundRobin,
            queue: None,
            seed: 0,
            mode: Mode::Hybrid,
            deterministic: false,
            reduction_period: 10,
            max_boxes: 50_000_000,
            max_generations: 100_000,
            max_time: None,
            ibc_steps_per_generation: 50,
            strict_restart: false,
            record_discards: false,
            activity_threshold: 1e-4,
        }
    }
}

/// A finished run: the certificate plus the full message log (one line
/// per message: `seq direction kind payload...`).
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub certificate: Certificate,
    pub message_log: Vec<String>,
    pub wall_time: Duration,
}

fn ibc_config(cfg: &SolverConfig) -> IbcConfig {
    let queue = cfg.queue.unwrap_or(match cfg.mode {
        Mode::Hybrid => QueueStrategy::MaxDist,
        _ => QueueStrategy::BestFirst,
    });
    IbcConfig {
        eps: cfg.eps,
        eta: cfg.eta,
        bisect: cfg.bisect,
        queue,
        use_taylor: true,
        max_boxes: cfg.max_boxes,
        max_time: cfg.max_time,
        record_discards: cfg.record_discards,
    }
}

fn de_config(cfg: &SolverConfig) -> DeConfig {
    DeConfig {
        population: cfg.population,
        weight: cfg.weight,
        crossover_rate: cfg.crossover_rate,
        seed: cfg.seed,
        max_generations: cfg.max_generations,
        strict_restart: cfg.strict_restart,
    }
}

/// Runs the configured solver on a problem and returns the certificate.
///
/// The initial domain is first contracted against the constraints; both
/// workers start from the contracted box. In hybrid mode the two
/// workers run concurrently (or deterministically interleaved) and
/// exchange messages; the branch-and-contract certificate is always the
/// authoritative result.
pub fn orchestrate(problem: &Problem, cfg: &SolverConfig) -> SolveResult {
    let started = Instant::now();
    let base_constraints: Vec<RelationalConstraint> = problem
        .constraints()
        .iter()
        .map(|c| RelationalConstraint::le_zero(c.clone()))
        .collect();
    let initial = hc4(&base_constraints, problem.domain(), cfg.eta);
    if initial.is_empty() {
        return SolveResult {
            certificate: Certificate {
                status: SolveStatus::Infeasible,
                best_ub: f64::INFINITY,
                global_lb: f64::INFINITY,
                best_point: None,
                stats: SolveStats::default(),
            },
            message_log: Vec::new(),
            wall_time: started.elapsed(),
        };
    }

    let result = match cfg.mode {
        Mode::IbcOnly => {
            let mut worker = IbcWorker::new(problem, ibc_config(cfg), NoCoop, initial);
            worker.run();
            SolveResult {
                certificate: worker.certificate(),
                message_log: Vec::new(),
                wall_time: started.elapsed(),
            }
        }
        Mode::DeOnly => run_de_only(problem, cfg, initial, started),
        Mode::Hybrid => {
            if cfg.deterministic {
                run_hybrid_deterministic(problem, cfg, initial, started)
            } else {
                run_hybrid_threaded(problem, cfg, initial, started)
            }
        }
    };
    result
}

fn run_de_only(
    problem: &Problem,
    cfg: &SolverConfig,
    initial: IntervalBox,
    started: Instant,
) -> SolveResult {
    let mut de = DeWorker::new(problem, de_config(cfg), SoloDe, initial.clone());
    let deadline = cfg.max_time.map(|d| started + d);
    while !de.is_done() {
        if deadline.is_some_and(|d| Instant::now() > d) {
            break;
        }
        de.step_generation();
    }
    // stochastic search alone proves nothing beyond the natural bound
    // over the contracted domain
    let global_lb = problem
        .objective()
        .eval_natural(&initial)
        .lo();
    let mut stats = SolveStats::default();
    stats.de_generations = de.generation;
    SolveResult {
        certificate: Certificate {
            status: SolveStatus::Uncertified,
            best_ub: de.best_reliable_ub,
            global_lb,
            best_point: de.best_reliable_point.clone(),
            stats,
        },
        message_log: Vec::new(),
        wall_time: started.elapsed(),
    }
}

fn run_hybrid_deterministic(
    problem: &Problem,
    cfg: &SolverConfig,
    initial: IntervalBox,
    started: Instant,
) -> SolveResult {
    let (ibc_end, de_end, shared) = coop_channel(cfg.reduction_period);
    let mut ibc = IbcWorker::new(problem, ibc_config(cfg), ibc_end, initial.clone());
    let mut de = DeWorker::new(problem, de_config(cfg), de_end, initial);
    let deadline = cfg.max_time.map(|d| started + d);
    while !ibc.is_finished() {
        if !de.is_done() {
            de.step_generation();
        }
        for _ in 0..cfg.ibc_steps_per_generation {
            let over_budget = ibc.state.stats.boxes_processed >= cfg.max_boxes
                || deadline.is_some_and(|d| Instant::now() > d);
            if over_budget {
                shared.cancelled.store(true, Ordering::Relaxed);
            }
            if !ibc.step() {
                break;
            }
        }
    }
    // let the DE worker observe the termination message
    if !de.is_done() {
        de.step_generation();
    }
    let mut certificate = ibc.certificate();
    certificate.stats.de_generations = shared.de_generations.load(Ordering::Relaxed);
    let message_log = shared.log.lock().unwrap().clone();
    SolveResult {
        certificate,
        message_log,
        wall_time: started.elapsed(),
    }
}

fn run_hybrid_threaded(
    problem: &Problem,
    cfg: &SolverConfig,
    initial: IntervalBox,
    started: Instant,
) -> SolveResult {
    let (ibc_end, de_end, shared) = coop_channel(cfg.reduction_period);
    let ibc_cfg = ibc_config(cfg);
    let de_cfg = de_config(cfg);
    let de_initial = initial.clone();
    let certificate = std::thread::scope(|scope| {
        let ibc_handle = scope.spawn(move || {
            let mut worker = IbcWorker::new(problem, ibc_cfg, ibc_end, initial);
            worker.run();
            worker.certificate()
        });
        let de_handle = scope.spawn(move || {
            let mut worker = DeWorker::new(problem, de_cfg, de_end, de_initial);
            worker.run();
        });
        let certificate = ibc_handle.join().expect("branch-and-contract worker panicked");
        // unblock the DE worker if it is still evolving (cap not reached)
        shared.cancelled.store(true, Ordering::Relaxed);
        de_handle.join().expect("differential-evolution worker panicked");
        certificate
    });
    let mut certificate = certificate;
    certificate.stats.de_generations = shared.de_generations.load(Ordering::Relaxed);
    let message_log = shared.log.lock().unwrap().clone();
    SolveResult {
        certificate,
        message_log,
        wall_time: started.elapsed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    fn queue_of(boxes: &[IntervalBox]) -> WorkQueue {
        let mut q = WorkQueue::new();
        for b in boxes {
            let w = b.width();
            q.push(b.clone(), f64::NEG_INFINITY, w);
        }
        q
    }

    #[test]
    fn maxdist_priority_is_point_box_distance() {
        let mut q = WorkQueue::new();
        q.push(
            IntervalBox::new(vec![iv(2.0, 3.0), iv(0.0, 0.5)]),
            0.0,
            0.0,
        );
        let item = q.pop().unwrap();
        assert_eq!(maxdist_priority(&item, &[1.0, 1.0]), 1.5);
        assert_eq!(maxdist_priority(&item, &[2.5, 0.25]), 0.0);
    }

    #[test]
    fn farther_box_extracted_first() {
        let near = IntervalBox::new(vec![iv(0.0, 1.0)]);
        let far = IntervalBox::new(vec![iv(3.0, 4.0)]);
        let mut q = WorkQueue::new();
        q.push(near.clone(), 0.0, point_box_distance(&[0.5], &near));
        q.push(far.clone(), 0.0, point_box_distance(&[0.5], &far));
        assert_eq!(q.pop().unwrap().region, far);
        assert_eq!(q.pop().unwrap().region, near);
    }

    #[test]
    fn reprioritize_matches_full_resort() {
        let boxes: Vec<IntervalBox> = (0..12)
            .map(|i| {
                let lo = i as f64;
                IntervalBox::new(vec![iv(lo, lo + 0.5), iv(-lo, lo)])
            })
            .collect();
        let mut q = queue_of(&boxes);
        let incumbent = [4.2, 0.3];
        reprioritize(&mut q, &incumbent);
        let mut extracted = Vec::new();
        while let Some(it) = q.pop() {
            extracted.push(it);
        }
        // multiset of boxes unchanged
        assert_eq!(extracted.len(), boxes.len());
        for b in &boxes {
            assert!(extracted.iter().any(|it| it.region == *b));
        }
        // order agrees with an independent full sort by distance
        let mut oracle: Vec<f64> = boxes
            .iter()
            .map(|b| point_box_distance(&incumbent, b))
            .collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        let got: Vec<f64> = extracted
            .iter()
            .map(|it| point_box_distance(&incumbent, &it.region))
            .collect();
        assert_eq!(got, oracle);
    }

    #[test]
    fn reprioritize_empty_and_singleton() {
        let mut q = WorkQueue::new();
        reprioritize(&mut q, &[0.0]);
        assert!(q.is_empty());
        q.push(IntervalBox::new(vec![iv(1.0, 2.0)]), 0.0, 0.0);
        reprioritize(&mut q, &[0.0]);
        assert_eq!(q.len(), 1);
        assert_eq!(q.pop().unwrap().priority, 1.0);
    }

    #[test]
    fn hull_of_queue() {
        let q = queue_of(&[
            IntervalBox::new(vec![iv(0.0, 1.0), iv(0.0, 1.0)]),
            IntervalBox::new(vec![iv(2.0, 3.0), iv(0.0, 0.5)]),
        ]);
        let hull = queue_hull(&q).unwrap();
        assert_eq!(hull, IntervalBox::new(vec![iv(0.0, 3.0), iv(0.0, 1.0)]));

        let single = queue_of(&[IntervalBox::new(vec![iv(1.0, 2.0)])]);
        assert_eq!(
            queue_hull(&single).unwrap(),
            IntervalBox::new(vec![iv(1.0, 2.0)])
        );
        assert!(queue_hull(&WorkQueue::new()).is_none());
    }

    #[test]
    fn message_rendering_round_trips_floats() {
        let msg = Message::UpperBound {
            point: vec![8.532424, 0.274717],
            ub: -2.825296148,
        };
        let line = render_message(&msg);
        let parts: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(parts[0], "UB");
        assert_eq!(parts[1].parse::<f64>().unwrap(), 8.532424);
        assert_eq!(parts[3].parse::<f64>().unwrap(), -2.825296148);
    }
}
