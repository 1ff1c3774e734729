//! Verification suites. Each suite is a list of independent tasks that run
//! on a bounded thread pool; their checks are assembled in task order.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use clap::ValueEnum;
use gsek::quantities::{SupOptions, SupResult};
use gsek::{QuadConfig, Result};
use rayon::prelude::*;
use serde_json::json;

use crate::family::FAMILY_VERSION;
use crate::report::{Check, Meta, SuiteReport, SCHEMA};

mod annulus;
mod bands;
mod drift;
mod genest;
mod normalization;
mod sandwiches;

pub use drift::{drift_constants, DriftConstants};

/// Relative accuracy credited to a sup search on top of the quadrature
/// error; refinement evaluations are accurate to about this level.
pub const SEARCH_REL: f64 = 1e-5;

/// Inequality slack as a multiple of the combined error.
pub const SLACK_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Normalization,
    Sandwiches,
    Doubling,
    Dilatation,
    #[value(name = "prop35")]
    Prop35,
    #[value(name = "lemma36")]
    Lemma36,
    #[value(name = "thm31_band")]
    Thm31Band,
    #[value(name = "thm15_band")]
    Thm15Band,
    Genest,
    #[value(name = "lemD")]
    LemD,
    All,
}

impl Suite {
    pub const EACH: [Suite; 10] = [
        Suite::Normalization,
        Suite::Sandwiches,
        Suite::Doubling,
        Suite::Dilatation,
        Suite::Prop35,
        Suite::Lemma36,
        Suite::Thm31Band,
        Suite::Thm15Band,
        Suite::Genest,
        Suite::LemD,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Normalization => "normalization",
            Suite::Sandwiches => "sandwiches",
            Suite::Doubling => "doubling",
            Suite::Dilatation => "dilatation",
            Suite::Prop35 => "prop35",
            Suite::Lemma36 => "lemma36",
            Suite::Thm31Band => "thm31_band",
            Suite::Thm15Band => "thm15_band",
            Suite::Genest => "genest",
            Suite::LemD => "lemD",
            Suite::All => "all",
        }
    }
}

/// Settings shared by all suites of one run, plus a cache of sup results
/// so that suites reusing a quantity compute it once.
pub struct Ctx {
    pub cfg: QuadConfig,
    pub seed: u64,
    pub jobs: usize,
    /// Monte Carlo path count for the Feynman-Kac checks.
    pub fk_paths: u64,
    cache: Mutex<HashMap<String, SupResult>>,
    refined: OnceLock<Box<Ctx>>,
}

impl Ctx {
    pub fn new(cfg: QuadConfig, seed: u64, jobs: usize) -> Self {
        Self {
            cfg,
            seed,
            jobs: jobs.max(1),
            fk_paths: 1_000_000,
            cache: Mutex::new(HashMap::new()),
            refined: OnceLock::new(),
        }
    }

    /// The same settings with every tolerance divided by ten, sharing one
    /// cache across suites.
    pub fn refined(&self) -> &Ctx {
        self.refined.get_or_init(|| {
            let cfg = QuadConfig { abs_tol: self.cfg.abs_tol / 10.0, rel_tol: self.cfg.rel_tol / 10.0, ..self.cfg };
            Box::new(Ctx { fk_paths: self.fk_paths, ..Ctx::new(cfg, self.seed, self.jobs) })
        })
    }

    /// Memoised sup computation keyed by quantity, potential and time.
    pub fn sup<F>(&self, what: &str, dsl: &str, dim: usize, t: f64, f: F) -> Result<SupResult>
    where
        F: FnOnce(&QuadConfig, &SupOptions) -> Result<SupResult>,
    {
        let key = format!("{what}|{dsl}|{dim}|{t:e}|{:e}|{:e}", self.cfg.abs_tol, self.cfg.rel_tol);
        if let Some(r) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(r.clone());
        }
        let r = f(&self.cfg, &SupOptions::default())?;
        self.cache.lock().expect("cache lock").insert(key, r.clone());
        Ok(r)
    }

    pub fn config_json(&self) -> serde_json::Value {
        json!({
            "abs_tol": self.cfg.abs_tol,
            "rel_tol": self.cfg.rel_tol,
            "max_evals": self.cfg.max_evals,
            "tail_sigma": self.cfg.tail_sigma,
            "jobs": self.jobs,
            "fk_paths": self.fk_paths,
        })
    }
}

/// Combined error of sup results: quadrature bounds plus the search term.
pub fn sup_error(rs: &[&SupResult]) -> f64 {
    rs.iter().map(|r| r.err_bound + SEARCH_REL * r.value.abs()).sum()
}

pub fn converged(rs: &[&SupResult]) -> bool {
    rs.iter().all(|r| r.converged)
}

pub(crate) type Task<'a> = Box<dyn Fn() -> Vec<Check> + Send + Sync + 'a>;

fn run_tasks(ctx: &Ctx, tasks: Vec<Task<'_>>) -> Vec<Check> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(ctx.jobs).build().expect("thread pool");
    let parts: Vec<Vec<Check>> = pool.install(|| tasks.par_iter().map(|t| t()).collect());
    parts.into_iter().flatten().collect()
}

fn tasks_for<'a>(suite: Suite, ctx: &'a Ctx) -> Vec<Task<'a>> {
    match suite {
        Suite::Normalization => normalization::tasks(ctx),
        Suite::Sandwiches => sandwiches::sandwich_tasks(ctx),
        Suite::Doubling => sandwiches::doubling_tasks(ctx),
        Suite::Dilatation => sandwiches::dilatation_tasks(ctx),
        Suite::Prop35 => drift::prop_tasks(ctx),
        Suite::Lemma36 => drift::bound_tasks(ctx),
        Suite::Thm31Band => bands::k_band_tasks(ctx),
        Suite::Thm15Band => bands::a_band_tasks(ctx),
        Suite::Genest => genest::tasks(ctx),
        Suite::LemD => annulus::tasks(ctx),
        Suite::All => Suite::EACH.iter().flat_map(|&s| tasks_for(s, ctx)).collect(),
    }
}

/// Runs a suite and assembles its report.
pub fn run_suite(suite: Suite, ctx: &Ctx) -> SuiteReport {
    let start = Instant::now();
    let checks = run_tasks(ctx, tasks_for(suite, ctx));
    SuiteReport {
        meta: Meta {
            schema: SCHEMA,
            suite: suite.name().to_string(),
            seed: ctx.seed,
            config: ctx.config_json(),
            family: FAMILY_VERSION,
            version: env!("CARGO_PKG_VERSION"),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        checks,
    }
}

/// Turns a fallible block of checks into checks, reporting errors in place.
pub(crate) fn guard(id: &str, anchor: &str, f: impl FnOnce() -> Result<Vec<Check>>) -> Vec<Check> {
    f().unwrap_or_else(|e| vec![Check::error(id, anchor, &e)])
}
