use std::path::{Path, PathBuf};

use ctmc_core::NumericPolicy;
use order_lab::{
    check_ccp_structure, check_doubly_monotone, counterexample_search, sm_check, sm_decrease_scan,
    OrderPolicy, OrderStatus, SearchConfig,
};
use queue_engine::{
    rolski_bounds, w_curve, CurveMetadata, CurveMethod, CurveVerdict, Horizon, QbdOptions,
    QueueSpec, ServiceDistribution, SimOptions,
};
use serde::Serialize;

use crate::exit::{CliError, EXIT_CURVE_VIOLATION, EXIT_OK, EXIT_SM_VIOLATION};
use crate::input::{load_input, load_pmf_pair, LoadedChain};
use crate::report::{emit, emit_json, number_or_inf, spec_hash, PolicyBlock, Report};

pub struct Context {
    pub seed: u64,
    pub numeric: NumericPolicy,
    pub order: OrderPolicy,
    pub out: Option<PathBuf>,
}

impl Context {
    fn policy_block(&self) -> PolicyBlock {
        PolicyBlock {
            numeric: self.numeric,
            order: self.order,
        }
    }
}

fn require_service(loaded: &LoadedChain) -> Result<ServiceDistribution, CliError> {
    loaded
        .service
        .clone()
        .ok_or_else(|| CliError::parse("input file needs a \"service\" block for queue commands"))
}

// ---------------------------------------------------------------------------
// analyze

#[derive(Serialize)]
struct AnalyzeBody {
    labels: Vec<String>,
    permutation: Vec<usize>,
    already_sorted: bool,
    lambda: Vec<f64>,
    pi: Vec<f64>,
    generator: Vec<Vec<f64>>,
    time_reversal: Vec<Vec<f64>>,
    reversible: bool,
    monotonicity: order_lab::MonotonicityReport,
    reversal_monotonicity: order_lab::MonotonicityReport,
    doubly_monotone: bool,
    ccp: order_lab::CcpReport,
}

pub fn cmd_analyze(ctx: &Context, input: &Path) -> Result<u8, CliError> {
    let loaded = load_input(input, ctx.numeric)?;
    let chain = &loaded.chain;
    let m = chain.state_count();
    let reversed = chain.time_reverse();
    let double = check_doubly_monotone(chain, ctx.order.monotonicity_tol);
    let matrix = |c: &ctmc_core::Ctmc| -> Vec<Vec<f64>> {
        (0..m)
            .map(|i| (0..m).map(|j| c.generator()[(i, j)]).collect())
            .collect()
    };
    let body = AnalyzeBody {
        labels: loaded.report.labels.clone(),
        permutation: loaded.report.permutation.clone(),
        already_sorted: loaded.report.already_sorted,
        lambda: chain.lambda().iter().copied().collect(),
        pi: chain.pi().iter().copied().collect(),
        generator: matrix(chain),
        time_reversal: matrix(&reversed),
        reversible: chain.is_reversible(1e-10),
        doubly_monotone: double.is_doubly_monotone(),
        monotonicity: double.forward,
        reversal_monotonicity: double.reversed,
        ccp: check_ccp_structure(chain, 1e-9),
    };
    emit_json(
        &ctx.out,
        &Report {
            command: "analyze",
            seed: ctx.seed,
            policy: ctx.policy_block(),
            body,
        },
    )?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// sm-check

#[derive(Serialize)]
struct SmCheckBody {
    c_list: Vec<f64>,
    grids: Vec<Vec<f64>>,
    scan: order_lab::ScanReport,
}

#[derive(Serialize)]
struct PmfPairBody {
    #[serde(flatten)]
    verdict: order_lab::OrderVerdict,
}

pub struct SmCheckInput {
    pub input: Option<PathBuf>,
    pub pmf_pair: Option<PathBuf>,
    pub c_list: Vec<f64>,
    pub grids: Vec<ctmc_core::TimeGrid>,
}

pub fn cmd_sm_check(ctx: &Context, args: &SmCheckInput) -> Result<u8, CliError> {
    if let Some(pair_path) = &args.pmf_pair {
        let (x, y) = load_pmf_pair(pair_path, ctx.numeric.pmf_tol)?;
        let verdict = sm_check(&x, &y, &ctx.order)?;
        let violated = verdict.status == OrderStatus::Violated;
        emit_json(
            &ctx.out,
            &Report {
                command: "sm-check",
                seed: ctx.seed,
                policy: ctx.policy_block(),
                body: PmfPairBody { verdict },
            },
        )?;
        return Ok(if violated { EXIT_SM_VIOLATION } else { EXIT_OK });
    }

    let input = args
        .input
        .as_ref()
        .ok_or_else(|| CliError::parse("sm-check needs --input or --pmf-pair"))?;
    let loaded = load_input(input, ctx.numeric)?;
    let scan = sm_decrease_scan(&loaded.chain, &args.c_list, &args.grids, &ctx.order)?;
    let violated = scan.has_violation();
    let body = SmCheckBody {
        c_list: args.c_list.clone(),
        grids: args.grids.iter().map(|g| g.points().to_vec()).collect(),
        scan,
    };
    emit_json(
        &ctx.out,
        &Report {
            command: "sm-check",
            seed: ctx.seed,
            policy: ctx.policy_block(),
            body,
        },
    )?;
    Ok(if violated { EXIT_SM_VIOLATION } else { EXIT_OK })
}

// ---------------------------------------------------------------------------
// sweep

pub struct SweepInput {
    pub input: PathBuf,
    pub c_list: Vec<f64>,
    pub method: CurveMethod,
    pub arrivals: u64,
    pub batches: usize,
    pub warmup: f64,
    pub allow_unstable: bool,
}

pub fn cmd_sweep(ctx: &Context, args: &SweepInput) -> Result<u8, CliError> {
    let loaded = load_input(&args.input, ctx.numeric)?;
    let service = require_service(&loaded)?;

    // Stability gate up front so the exit code is crisp even for sim runs.
    let probe = QueueSpec::new(loaded.chain.clone(), args.c_list[0], service.clone())?;
    let stability = probe.stability_check();
    if !stability.stable && !args.allow_unstable {
        return Err(
            queue_engine::QueueError::UnstableWithoutOverride { rho: stability.rho }.into(),
        );
    }

    let sim_opts = SimOptions {
        horizon: Horizon::Arrivals(args.arrivals),
        batches: args.batches,
        warmup_fraction: args.warmup,
        seed: ctx.seed,
        allow_unstable: args.allow_unstable,
    };
    let curve = w_curve(
        &loaded.chain,
        &service,
        &args.c_list,
        args.method,
        &QbdOptions::default(),
        &sim_opts,
    )?;
    let meta = CurveMetadata {
        seed: ctx.seed,
        spec_hash: spec_hash(&loaded.canonical, &format!("{:?}", args.c_list)),
        policy: ctx.policy_block().compact_json(),
    };
    emit(&ctx.out, &curve.to_csv(&meta))?;
    Ok(match curve.verdict {
        CurveVerdict::Decreasing => EXIT_OK,
        CurveVerdict::ViolationSuspected { .. } => EXIT_CURVE_VIOLATION,
    })
}

// ---------------------------------------------------------------------------
// bounds

pub fn cmd_bounds(ctx: &Context, input: &Path) -> Result<u8, CliError> {
    let loaded = load_input(input, ctx.numeric)?;
    let service = require_service(&loaded)?;
    let spec = QueueSpec::new(loaded.chain.clone(), 1.0, service)?;
    let bounds = rolski_bounds(&spec);
    let stability = spec.stability_check();
    let body = serde_json::json!({
        "lower": number_or_inf(bounds.lower),
        "upper": number_or_inf(bounds.upper),
        "lambda_bar": bounds.lambda_bar,
        "rho": bounds.rho,
        "stable": stability.stable,
    });
    emit_json(
        &ctx.out,
        &Report {
            command: "bounds",
            seed: ctx.seed,
            policy: ctx.policy_block(),
            body,
        },
    )?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// search

#[derive(Serialize)]
struct SearchBody {
    states: usize,
    budget: usize,
    lambda_max: f64,
    sampler: order_lab::RateSampler,
    c_list: Vec<f64>,
    grids: Vec<Vec<f64>>,
    report: order_lab::SearchReport,
}

pub struct SearchInput {
    pub states: usize,
    pub budget: usize,
    pub c_list: Vec<f64>,
    pub grids: Vec<ctmc_core::TimeGrid>,
    pub sampler: order_lab::RateSampler,
    pub lambda_max: f64,
    pub inject: Vec<PathBuf>,
}

pub fn cmd_search(ctx: &Context, args: &SearchInput) -> Result<u8, CliError> {
    let mut injected = Vec::new();
    for path in &args.inject {
        injected.push(load_input(path, ctx.numeric)?.chain);
    }
    let config = SearchConfig {
        states: args.states,
        c_list: args.c_list.clone(),
        grids: args.grids.clone(),
        sampler: args.sampler,
        lambda_max: args.lambda_max,
        budget: args.budget,
        seed: ctx.seed,
    };
    let report = counterexample_search(&config, &injected, &ctx.order)?;
    eprintln!(
        "search: {} samples tried, {} skipped, {} candidates, {} violations",
        report.samples_tried, report.skipped, report.candidates_found, report.violations_found
    );
    let body = SearchBody {
        states: args.states,
        budget: args.budget,
        lambda_max: args.lambda_max,
        sampler: args.sampler,
        c_list: args.c_list.clone(),
        grids: args.grids.iter().map(|g| g.points().to_vec()).collect(),
        report,
    };
    emit_json(
        &ctx.out,
        &Report {
            command: "search",
            seed: ctx.seed,
            policy: ctx.policy_block(),
            body,
        },
    )?;
    Ok(EXIT_OK)
}
