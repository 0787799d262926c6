use certiopt::coop::{orchestrate, Mode, SolverConfig};
use certiopt::model::parse_problem;

const BANANA: &str = "\
var x in [0, 10];
var y in [0, 10];
minimize -sqr(x + y - 10) / 30 - sqr(x - y + 10) / 120;
subject to 20 / sqr(x) - y <= 0;
subject to sqr(x) + 8 * y - 75 <= 0;
";

fn main() {
    // threaded hybrid, three seeds
    for seed in [0, 7, 99] {
        let p = parse_problem(BANANA, 1e-8).unwrap();
        let cfg = SolverConfig { seed, deterministic: false, ..SolverConfig::default() };
        let t = std::time::Instant::now();
        let r = orchestrate(&p, &cfg);
        let c = &r.certificate;
        println!("threaded seed {seed}: {:?} ub={:.12} boxes={} de_ubs={} msgs={} in {:?}",
            c.status, c.best_ub, c.stats.boxes_processed, c.stats.ub_updates_from_de,
            r.message_log.len(), t.elapsed());
    }
    // infeasible model
    let p = parse_problem("var x in [-1, 2]; minimize x; subject to x <= 0; subject to 1 - x <= 0;", 1e-8).unwrap();
    let r = orchestrate(&p, &SolverConfig::default());
    println!("infeasible: {:?} ub={} lb={}", r.certificate.status, r.certificate.best_ub, r.certificate.global_lb);
    // de-only
    let p = parse_problem(BANANA, 1e-8).unwrap();
    let cfg = SolverConfig { mode: Mode::DeOnly, max_generations: 200, seed: 3, ..SolverConfig::default() };
    let r = orchestrate(&p, &cfg);
    let c = &r.certificate;
    println!("de-only: {:?} ub={:.12} lb={:.6} point={:?} gens={}",
        c.status, c.best_ub, c.global_lb, c.best_point, c.stats.de_generations);
    // deterministic reproducibility
    let cfg = SolverConfig { deterministic: true, seed: 5, ..SolverConfig::default() };
    let r1 = orchestrate(&p, &cfg);
    let r2 = orchestrate(&p, &cfg);
    println!("reproducible: {} (log {} lines)", r1.message_log == r2.message_log, r1.message_log.len());
    println!("sample log lines:");
    for l in r1.message_log.iter().take(3) { println!("  {l}"); }
    for l in r1.message_log.iter().rev().take(2) { println!("  {l}"); }
}
