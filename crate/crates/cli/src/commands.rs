use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use rmj::estimation::coverage_report;
use rmj::io::{convert_sushi as convert, read_choice_log, write_choice_log, ChoiceLog, ModelFile};
use rmj::mixture::EmRun;
use rmj::oracle::{demo_inconsistency, run_verification, DemoOutcome};
use rmj::synth::{generate as sample, DisplayPolicy};
use rmj::{
    fit as fit_single, fit_mixture, log_likelihood, mixture_log_likelihood, uniform_log_likelihood,
    ChoiceObservation, DisplaySet, EmOptions, Error, FitOptions, MixtureModel, Ranking, Result,
    RmjModel, SolverStatus,
};

use crate::{create, open, DemoArgs, EvalArgs, FitArgs, GenerateArgs, Status, SushiArgs, VerifyArgs};

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    writeln!(out, "{text}")?;
    out.flush()?;
    Ok(())
}

fn load_model(path: &std::path::Path) -> Result<MixtureModel> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text)?;
    ModelFile::from_json(&text)?.to_mixture()
}

fn load_log(path: &std::path::Path) -> Result<ChoiceLog> {
    read_choice_log(open(path)?)
}

/// Display sets for `list:PATH`, one JSON array of item ids per line.
fn load_display_list(path: &std::path::Path, n: usize) -> Result<Vec<DisplaySet>> {
    let mut sets = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |detail: String| Error::Format { line: i + 1, detail };
        let items: Vec<usize> = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
        sets.push(DisplaySet::new(items, n).map_err(|e| err(e.to_string()))?);
    }
    if sets.is_empty() {
        return Err(Error::Precondition(format!("{}: no display sets", path.display())));
    }
    Ok(sets)
}

pub fn generate(args: GenerateArgs) -> Result<Status> {
    let mix = match &args.model {
        Some(path) => load_model(path)?,
        None => {
            let (Some(n), Some(q)) = (args.n, args.q) else {
                return Err(Error::Precondition("give --model or both --n and --q".into()));
            };
            let center = match &args.center {
                Some(order) => Ranking::new(order.clone())?,
                None => Ranking::identity(n),
            };
            if center.n() != n {
                return Err(Error::SizeMismatch { expected: n, actual: center.n() });
            }
            MixtureModel::single(RmjModel::new(center, q)?)
        }
    };
    let policy = match args.policy.strip_prefix("list:") {
        Some(path) => DisplayPolicy::List(load_display_list(path.as_ref(), mix.n())?),
        None => args.policy.parse()?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let data = sample(&mix, &policy, args.k, args.t, &mut rng)?;
    write_choice_log(create(args.out.as_deref())?, mix.n(), &data)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct CoverageSummary {
    all_pairs_covered: bool,
    uncovered_pairs: usize,
    /// First few uncovered pairs; their relative order is not identified.
    examples: Vec<(usize, usize)>,
}

#[derive(Serialize)]
struct EmSummary {
    restarts: usize,
    best_run: usize,
    iterations: usize,
    termination: rmj::mixture::Termination,
    reseed_iterations: Vec<usize>,
    log_likelihoods: Vec<f64>,
}

impl EmSummary {
    fn new(restarts: usize, best_run: usize, run: &EmRun) -> Self {
        Self {
            restarts,
            best_run,
            iterations: run.log_likelihoods.len() - 1,
            termination: run.termination,
            reseed_iterations: run.reseed_iterations.clone(),
            log_likelihoods: run.log_likelihoods.clone(),
        }
    }
}

#[derive(Serialize)]
struct FitReport {
    n: usize,
    records: usize,
    components: usize,
    log_likelihood: f64,
    uniform_log_likelihood: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solver_status: Option<SolverStatus>,
    coverage: CoverageSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    em: Option<EmSummary>,
    warnings: Vec<String>,
}

pub fn fit(args: FitArgs) -> Result<Status> {
    let log = load_log(&args.log)?;
    let data = &log.observations;
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let coverage = coverage_report(log.n, data);
    let mut warnings = Vec::new();
    if !coverage.all_covered() {
        warnings.push(format!(
            "{} item pairs never appear together; their order is not identified",
            coverage.uncovered.len()
        ));
    }
    let (mix, ll, objective, status, em) = if args.mixture <= 1 {
        let options = FitOptions {
            exact_cap: args.exact_cap,
            restarts: args.solver_restarts,
            seed: args.seed,
        };
        let result = fit_single(data, &options)?;
        if result.solver_status == SolverStatus::Heuristic {
            warnings.push(format!("n = {} above exact cap {}; centre is heuristic", log.n, args.exact_cap));
        }
        let mix = MixtureModel::single(result.model());
        (mix, result.log_likelihood, Some(result.objective), Some(result.solver_status), None)
    } else {
        let options = EmOptions {
            restarts: args.em_restarts,
            max_iterations: args.max_iterations,
            exact_cap: args.exact_cap,
            solver_restarts: args.solver_restarts,
            seed: args.seed,
        };
        let result = fit_mixture(data, args.mixture, &options)?;
        warnings.extend(result.warnings.iter().cloned());
        let best = result.trace.best_run;
        let em = EmSummary::new(result.trace.runs.len(), best, &result.trace.runs[best]);
        (result.model, result.log_likelihood, None, None, Some(em))
    };
    for w in &warnings {
        log::warn!("{w}");
    }
    let mut out = create(Some(&args.out))?;
    writeln!(out, "{}", ModelFile::from_mixture(&mix).to_json())?;
    out.flush()?;
    let report = FitReport {
        n: log.n,
        records: data.len(),
        components: mix.len(),
        log_likelihood: ll,
        uniform_log_likelihood: uniform_log_likelihood(data),
        objective,
        solver_status: status,
        coverage: CoverageSummary {
            all_pairs_covered: coverage.all_covered(),
            uncovered_pairs: coverage.uncovered.len(),
            examples: coverage.uncovered.iter().take(10).copied().collect(),
        },
        em,
        warnings,
    };
    write_json(&mut *create(args.report.as_deref())?, &report)?;
    Ok(Status::Ok)
}

#[derive(Serialize, Default)]
struct SizeBreakdown {
    records: usize,
    log_likelihood: f64,
    mean_log_likelihood: f64,
    uniform_log_likelihood: f64,
}

#[derive(Serialize)]
struct EvalReport {
    n: usize,
    records: usize,
    log_likelihood: f64,
    mean_log_likelihood: f64,
    uniform_log_likelihood: f64,
    uniform_mean_log_likelihood: f64,
    by_display_size: BTreeMap<usize, SizeBreakdown>,
}

fn total_log_likelihood(mix: &MixtureModel, data: &[ChoiceObservation]) -> Result<f64> {
    match mix.components() {
        [single] => log_likelihood(&single.model, data),
        _ => mixture_log_likelihood(mix, data),
    }
}

pub fn eval(args: EvalArgs) -> Result<Status> {
    let mix = load_model(&args.model)?;
    let log = load_log(&args.log)?;
    if log.n != mix.n() {
        return Err(Error::SizeMismatch { expected: mix.n(), actual: log.n });
    }
    let data = &log.observations;
    let mut groups: BTreeMap<usize, Vec<ChoiceObservation>> = BTreeMap::new();
    for obs in data {
        groups.entry(obs.display().len()).or_default().push(obs.clone());
    }
    let mut by_display_size = BTreeMap::new();
    for (size, group) in &groups {
        let ll = total_log_likelihood(&mix, group)?;
        by_display_size.insert(
            *size,
            SizeBreakdown {
                records: group.len(),
                log_likelihood: ll,
                mean_log_likelihood: ll / group.len() as f64,
                uniform_log_likelihood: uniform_log_likelihood(group),
            },
        );
    }
    let ll = total_log_likelihood(&mix, data)?;
    let uniform = uniform_log_likelihood(data);
    let count = data.len().max(1) as f64;
    let report = EvalReport {
        n: log.n,
        records: data.len(),
        log_likelihood: ll,
        mean_log_likelihood: ll / count,
        uniform_log_likelihood: uniform,
        uniform_mean_log_likelihood: uniform / count,
        by_display_size,
    };
    write_json(&mut *create(None)?, &report)?;
    Ok(Status::Ok)
}

pub fn verify(args: VerifyArgs) -> Result<Status> {
    let report = run_verification(args.n, &args.q_grid)?;
    let mut out = create(None)?;
    if args.json {
        write_json(&mut *out, &report)?;
    } else {
        for c in &report.checks {
            let verdict = match (c.skipped, c.passed) {
                (true, _) => "SKIP",
                (false, true) => "PASS",
                (false, false) => "FAIL",
            };
            writeln!(
                out,
                "{verdict} n={} q={} {:<45} cases={:<7} max_err={:.3e}",
                report.n, c.q, c.name, c.cases, c.max_error
            )?;
        }
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        writeln!(out, "{} checks, {failed} failed", report.checks.len())?;
        out.flush()?;
    }
    Ok(if report.passed() { Status::Ok } else { Status::VerificationFailed })
}

fn one_indexed(r: &Ranking) -> String {
    let items: Vec<String> = r.order().iter().map(|x| (x + 1).to_string()).collect();
    format!("({})", items.join(","))
}

pub fn demo(args: DemoArgs) -> Result<Status> {
    let report = demo_inconsistency(args.n, args.q)?;
    let mut out = create(None)?;
    if args.json {
        write_json(&mut *out, &report)?;
    } else {
        writeln!(out, "n = {}, q = {}", report.n, report.q)?;
        writeln!(out, "F_n(q) = {:.12}", report.f_n)?;
        if report.outcome == DemoOutcome::Inconclusive {
            writeln!(out, "construction inconclusive: F_n(q) <= 0, the bottom-swap mass is not below 1/2")?;
            out.flush()?;
            return Ok(Status::Ok);
        }
        let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3e}"));
        writeln!(out, "tilde-lambda total mass - 1        = {}", opt(report.tilde_total.map(|t| t - 1.0)))?;
        writeln!(out, "max top-(n-2) marginal gap         = {}", opt(report.max_topk_marginal_gap))?;
        writeln!(
            out,
            "max |S|>=3 choice-probability gap  = {} over {} cases",
            opt(report.max_choice_gap),
            report.choice_cases
        )?;
        writeln!(
            out,
            "P({} before {}) under tilde-lambda  = {:.12}",
            report.n - 1,
            report.n,
            report.tilde_pairwise.unwrap_or(f64::NAN)
        )?;
        writeln!(
            out,
            "group-1 mass: formula {:.12}, enumeration {:.12}",
            report.group1_formula.unwrap_or(f64::NAN),
            report.group1_enumerated.unwrap_or(f64::NAN)
        )?;
        writeln!(out, "max class-probability gap          = {}", opt(report.max_class_gap))?;
        writeln!(out, "pairwise marginals of tilde-lambda (row before column):")?;
        for row in &report.pairwise {
            let cells: Vec<String> = row.iter().map(|p| format!("{p:.6}")).collect();
            writeln!(out, "  {}", cells.join(" "))?;
        }
        if let (Some(t), Some(r)) = (&report.true_ranking, &report.recovered_ranking) {
            writeln!(out, "true ranking      {}", one_indexed(t))?;
            writeln!(out, "recovered ranking {}", one_indexed(r))?;
        }
        let verdict = match report.outcome {
            DemoOutcome::Demonstrated => "inconsistency demonstrated",
            _ => "FAILED",
        };
        writeln!(out, "{verdict}")?;
        out.flush()?;
    }
    Ok(match report.outcome {
        DemoOutcome::Failed => Status::VerificationFailed,
        _ => Status::Ok,
    })
}

pub fn convert_sushi(args: SushiArgs) -> Result<Status> {
    let log = convert(open(&args.input)?, args.k)?;
    write_choice_log(create(args.out.as_deref())?, log.n, &log.observations)?;
    Ok(Status::Ok)
}
