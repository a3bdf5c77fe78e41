use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::QueueError;
use crate::estimate::{EstimateDiagnostics, EstimateMethod, WorkloadEstimate};
use crate::service::exp_draw;
use crate::spec::QueueSpec;
use crate::Result;

/// Run length: a fixed number of arrivals, or a fixed span of simulated
/// time.
#[derive(Debug, Clone, Copy)]
pub enum Horizon {
    Arrivals(u64),
    Time(f64),
}

/// Simulation controls. All randomness flows from `seed` through fixed,
/// independent substreams (initial state, environment jumps, arrival gaps,
/// service draws), so runs reproduce bit for bit.
#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub horizon: Horizon,
    pub batches: usize,
    /// Fraction of the run discarded before statistics start.
    pub warmup_fraction: f64,
    pub seed: u64,
    /// Permit simulating an unstable spec (the estimate then grows with
    /// the horizon).
    pub allow_unstable: bool,
}

impl SimOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            horizon: Horizon::Arrivals(100_000),
            batches: 32,
            warmup_fraction: 0.10,
            seed,
            allow_unstable: false,
        }
    }
}

/// Simulation outcome: the time-average workload (headline statistic) and
/// the customer-average waiting time from the Lindley recursion
/// (secondary).
#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub workload: WorkloadEstimate,
    pub waiting: WorkloadEstimate,
    pub arrivals: u64,
    pub duration: f64,
}

const STREAM_INIT: u64 = 0;
const STREAM_ENV: u64 = 1;
const STREAM_ARRIVAL: u64 = 2;
const STREAM_SERVICE: u64 = 3;

fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Point estimate and 95% half-width via Student-t over batch means.
fn summarize(means: &[f64]) -> (f64, f64) {
    let b = means.len();
    if b == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = means.iter().sum::<f64>() / b as f64;
    if b < 2 {
        return (mean, f64::INFINITY);
    }
    let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (b - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (b - 1) as f64)
        .expect("valid dof")
        .inverse_cdf(0.975);
    (mean, t * (var / b as f64).sqrt())
}

/// Mutable trajectory state: clock, workload level, and batch accumulators.
struct Trajectory {
    clock: f64,
    /// Virtual waiting time; drains at unit rate, jumps at arrivals.
    level: f64,
    collecting: bool,
    batch_area: f64,
    batch_start: f64,
    batch_wait_sum: f64,
    batch_wait_count: u64,
    workload_means: Vec<f64>,
    wait_means: Vec<f64>,
}

impl Trajectory {
    fn new() -> Self {
        Self {
            clock: 0.0,
            level: 0.0,
            collecting: false,
            batch_area: 0.0,
            batch_start: 0.0,
            batch_wait_sum: 0.0,
            batch_wait_count: 0,
            workload_means: Vec::new(),
            wait_means: Vec::new(),
        }
    }

    /// Advances the clock, draining the workload along the exact
    /// piecewise-linear path and accumulating its integral when
    /// statistics collection is on.
    fn advance_to(&mut self, target: f64) {
        let dt = target - self.clock;
        debug_assert!(dt >= 0.0);
        let area = if self.level >= dt {
            let a = self.level * dt - 0.5 * dt * dt;
            self.level -= dt;
            a
        } else {
            let a = 0.5 * self.level * self.level;
            self.level = 0.0;
            a
        };
        if self.collecting {
            self.batch_area += area;
        }
        self.clock = target;
    }

    fn start_collection(&mut self) {
        self.collecting = true;
        self.batch_start = self.clock;
        self.batch_area = 0.0;
        self.batch_wait_sum = 0.0;
        self.batch_wait_count = 0;
    }

    /// Closes the current batch at the current clock.
    fn close_batch(&mut self) {
        let span = self.clock - self.batch_start;
        if span > 0.0 {
            self.workload_means.push(self.batch_area / span);
        }
        if self.batch_wait_count > 0 {
            self.wait_means
                .push(self.batch_wait_sum / self.batch_wait_count as f64);
        }
        self.batch_start = self.clock;
        self.batch_area = 0.0;
        self.batch_wait_sum = 0.0;
        self.batch_wait_count = 0;
    }

    fn record_wait(&mut self, wait: f64) {
        if self.collecting {
            self.batch_wait_sum += wait;
            self.batch_wait_count += 1;
        }
    }
}

/// Estimates the mean stationary workload by discrete-event simulation.
///
/// The environment trajectory comes from the modulated generator (holding
/// times exponential with rate `c |Q_ss|`), arrivals are Poisson at the
/// current state's intensity, and every arrival brings an IID service
/// requirement. The workload integral between events is exact. Waiting
/// times follow the Lindley recursion
/// `W_{k+1} = max(W_k + S_k - A_k, 0)`, which for this work-conserving
/// FIFO queue coincides with the workload found on arrival.
///
/// The run starts in a stationary environment state with an empty queue;
/// the warm-up fraction of the horizon is discarded, and the rest splits
/// into `batches` contiguous segments (by arrival count or by time,
/// matching the horizon) for batch-means confidence intervals.
pub fn simulate_mean_workload(spec: &QueueSpec, opts: &SimOptions) -> Result<SimulationReport> {
    let stability = spec.stability_check();
    if !stability.stable && !opts.allow_unstable {
        return Err(QueueError::UnstableWithoutOverride { rho: stability.rho });
    }
    if opts.batches < 2 {
        return Err(QueueError::InvalidSpec("need at least 2 batches".into()));
    }
    if !(0.0..0.9).contains(&opts.warmup_fraction) {
        return Err(QueueError::InvalidSpec(
            "warm-up fraction must lie in [0, 0.9)".into(),
        ));
    }
    let arrival_target = match opts.horizon {
        Horizon::Arrivals(n) => {
            if n < 100 {
                return Err(QueueError::InvalidSpec(
                    "arrival horizon too short for batching".into(),
                ));
            }
            n
        }
        Horizon::Time(t) => {
            if !(t.is_finite() && t > 0.0) {
                return Err(QueueError::InvalidSpec(
                    "time horizon must be positive".into(),
                ));
            }
            u64::MAX
        }
    };

    let chain = spec.chain().modulate(spec.c())?;
    let m = chain.state_count();
    let mut env_rng = substream(opts.seed, STREAM_ENV);
    let mut arrival_rng = substream(opts.seed, STREAM_ARRIVAL);
    let mut service_rng = substream(opts.seed, STREAM_SERVICE);

    let mut state = {
        let mut init_rng = substream(opts.seed, STREAM_INIT);
        let u: f64 = init_rng.random_range(0.0..1.0);
        let mut acc = 0.0;
        (0..m)
            .find(|&i| {
                acc += chain.pi()[i];
                u < acc
            })
            .unwrap_or(m - 1)
    };

    // Horizon-specific batching layout.
    let (warmup_arrivals, arrivals_per_batch) = match opts.horizon {
        Horizon::Arrivals(n) => {
            let warm = (((n as f64) * opts.warmup_fraction).ceil() as u64).max(1);
            (warm, ((n - warm) / opts.batches as u64).max(1))
        }
        Horizon::Time(_) => (u64::MAX, u64::MAX),
    };
    let (time_cutoff, time_end, batch_span) = match opts.horizon {
        Horizon::Time(t) => {
            let cutoff = t * opts.warmup_fraction;
            (cutoff, t, (t - cutoff) / opts.batches as f64)
        }
        Horizon::Arrivals(_) => (f64::INFINITY, f64::INFINITY, f64::INFINITY),
    };
    let mut next_batch_edge = f64::INFINITY;

    let mut traj = Trajectory::new();
    let mut arrivals: u64 = 0;
    let mut wait = 0.0f64;
    let mut prev_arrival_time = 0.0f64;
    let mut prev_service = 0.0f64;
    let mut done = false;

    while !done {
        let hold_rate = -chain.generator()[(state, state)];
        let state_end = if hold_rate > 0.0 {
            traj.clock + exp_draw(&mut env_rng, hold_rate)
        } else {
            f64::INFINITY
        };
        let intensity = chain.lambda()[state];

        // Arrivals within the holding interval; the leftover partial gap is
        // discarded at the switch (memorylessness).
        loop {
            let next_arrival = if intensity > 0.0 {
                traj.clock + exp_draw(&mut arrival_rng, intensity)
            } else {
                f64::INFINITY
            };
            let next_event = next_arrival.min(state_end);

            // Pending time-horizon milestones before the next event: the
            // warm-up cutoff, batch edges, and the end of the run.
            if !traj.collecting && time_cutoff <= next_event {
                traj.advance_to(time_cutoff);
                traj.start_collection();
                next_batch_edge = time_cutoff + batch_span;
            }
            while traj.collecting && next_batch_edge <= next_event.min(time_end) {
                traj.advance_to(next_batch_edge);
                traj.close_batch();
                next_batch_edge += batch_span;
            }
            if time_end <= next_event {
                traj.advance_to(time_end);
                if traj.collecting && traj.clock > traj.batch_start {
                    // Floating-point slack can leave the final sliver of
                    // the last batch unpushed; close it.
                    traj.close_batch();
                }
                done = true;
                break;
            }

            if next_arrival >= state_end {
                traj.advance_to(state_end);
                break;
            }

            traj.advance_to(next_arrival);
            let gap = traj.clock - prev_arrival_time;
            wait = if arrivals == 0 {
                0.0
            } else {
                (wait + prev_service - gap).max(0.0)
            };
            debug_assert!(
                (wait - traj.level).abs() <= 1e-6 * (1.0 + wait),
                "Lindley recursion must track the workload at arrivals"
            );
            let service = spec.service().sample(&mut service_rng);
            arrivals += 1;
            prev_arrival_time = traj.clock;
            prev_service = service;

            if arrivals == warmup_arrivals && !traj.collecting {
                traj.start_collection();
            } else {
                traj.record_wait(wait);
                if traj.batch_wait_count >= arrivals_per_batch
                    && traj.workload_means.len() < opts.batches
                {
                    traj.close_batch();
                }
            }
            traj.level += service;

            if arrivals >= arrival_target {
                if traj.collecting && traj.workload_means.len() < opts.batches {
                    traj.close_batch();
                }
                done = true;
                break;
            }
        }
        if done {
            break;
        }

        // Environment jump out of the current state.
        if hold_rate > 0.0 {
            let u: f64 = env_rng.random_range(0.0..1.0);
            let mut acc = 0.0;
            let mut chosen = None;
            for j in 0..m {
                if j == state {
                    continue;
                }
                acc += chain.generator()[(state, j)] / hold_rate;
                if u < acc {
                    chosen = Some(j);
                    break;
                }
            }
            state = chosen.unwrap_or_else(|| if state == m - 1 { m - 2 } else { m - 1 });
        }
    }

    let (w_mean, w_hw) = summarize(&traj.workload_means);
    let (q_mean, q_hw) = summarize(&traj.wait_means);
    Ok(SimulationReport {
        workload: WorkloadEstimate {
            value: w_mean,
            half_width: w_hw,
            method: EstimateMethod::Simulation,
            diagnostics: EstimateDiagnostics::Simulation {
                batches: traj.workload_means.len(),
                arrivals,
            },
        },
        waiting: WorkloadEstimate {
            value: q_mean,
            half_width: q_hw,
            method: EstimateMethod::Simulation,
            diagnostics: EstimateDiagnostics::Simulation {
                batches: traj.wait_means.len(),
                arrivals,
            },
        },
        arrivals,
        duration: traj.clock,
    })
}
