use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use gamelab::cache::{self, CacheKey, LoadStatus};
use gamelab::cram::{self, bluff_check, cram_closed_form, cram_outcome, CramError, GridBoard};
use gamelab::periodicity::{
    certify_compound_grundy, certify_compound_outcomes, certify_subtraction_grundy,
    certify_subtraction_outcomes, detect_period, heap_grundy, heap_outcomes, outcome_sequence,
    period_bounds, predicted_period, PeriodError, PeriodicTable,
};
use gamelab::push::{p_positions_up_to, push_p_oracle};
use gamelab::verify::{self, Suite, SuiteParams};
use gamelab::zeruclid::{self, heatmap_row, Heatmap, ZeruclidError, HEATMAP_MAX};
use gamelab::{
    CacheStats, Compound, Convention, HeapGame, HeapPosition, Outcome, PushPosition, Ruleset,
    SolveError, Solver, SubtractionSet, DEFAULT_MEMO_CAP,
};

use crate::args::{
    ConventionArg, CramArgs, Format, GameArgs, GameSelect, HeatmapArgs, Method, PeriodArgs,
    PhaseArg, PposArgs, VerifyArgs,
};

pub const MEMO_CAP_VAR: &str = "GAMELAB_MEMO_CAP";

#[derive(Debug)]
pub enum CliError {
    /// Bad position or other input the games reject.
    Domain(String),
    /// Memo cap or search horizon reached.
    Resource(String),
    /// Malformed flag value.
    Usage(String),
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        CliError::Resource(e.to_string())
    }
}

impl From<PeriodError> for CliError {
    fn from(e: PeriodError) -> Self {
        match e {
            PeriodError::Solve(s) => s.into(),
            other => CliError::Resource(other.to_string()),
        }
    }
}

impl From<CramError> for CliError {
    fn from(e: CramError) -> Self {
        match e {
            CramError::Solve(s) => s.into(),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<ZeruclidError> for CliError {
    fn from(e: ZeruclidError) -> Self {
        match e {
            ZeruclidError::Solve(s) => s.into(),
            other => CliError::Domain(other.to_string()),
        }
    }
}

fn domain(e: impl ToString) -> CliError {
    CliError::Domain(e.to_string())
}

/// What a command produced.
pub enum Output {
    Report { report: Box<Report>, failed: bool },
    Text(String),
}

#[derive(Serialize)]
pub struct Report {
    pub command: &'static str,
    pub params: Value,
    pub result: Value,
    pub cache: CacheInfo,
    pub elapsed_ms: f64,
}

#[derive(Serialize, Default)]
pub struct CacheInfo {
    #[serde(flatten)]
    stats: CacheStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    file: Option<Value>,
}

pub struct Context<'a> {
    pub jobs: usize,
    pub cache: Option<&'a Path>,
    pub memo_cap: usize,
    pub started: Instant,
}

impl Context<'_> {
    fn report(
        &self,
        command: &'static str,
        params: Value,
        result: Value,
        cache: CacheInfo,
    ) -> Output {
        self.finish(command, params, result, cache, false)
    }

    fn finish(
        &self,
        command: &'static str,
        params: Value,
        result: Value,
        cache: CacheInfo,
        failed: bool,
    ) -> Output {
        let ms = self.started.elapsed().as_secs_f64() * 1000.0;
        Output::Report {
            report: Box::new(Report {
                command,
                params,
                result,
                cache,
                elapsed_ms: (ms * 1000.0).round() / 1000.0,
            }),
            failed,
        }
    }

    fn solver<R: Ruleset>(&self, ruleset: R) -> Solver<R> {
        Solver::with_cap(ruleset, self.memo_cap)
    }

    fn load<R>(&self, solver: &mut Solver<R>, tag: &str) -> Option<LoadStatus>
    where
        R: Ruleset,
        R::Position: CacheKey,
    {
        self.cache.map(|p| cache::load(solver, p, tag))
    }

    fn save<R>(&self, solver: &Solver<R>, tag: &str, loaded: Option<LoadStatus>) -> CacheInfo
    where
        R: Ruleset,
        R::Position: CacheKey,
    {
        let file = self.cache.map(|p| {
            let loaded = match loaded {
                Some(LoadStatus::Loaded { entries }) => json!({"loaded": entries}),
                Some(LoadStatus::Ignored { reason }) => json!({"ignored": reason}),
                _ => json!("missing"),
            };
            let saved = match cache::save(solver, p, tag) {
                Ok(n) => json!(n),
                Err(e) => json!({"error": e.to_string()}),
            };
            json!({"path": p.display().to_string(), "load": loaded, "saved": saved})
        });
        CacheInfo {
            stats: solver.stats(),
            file,
        }
    }
}

/// Memo cap from the environment, or the default.
pub fn memo_cap_from_env() -> Result<usize, CliError> {
    match std::env::var(MEMO_CAP_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "{MEMO_CAP_VAR} must be a positive integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_MEMO_CAP),
    }
}

fn convention(c: ConventionArg) -> Convention {
    match c {
        ConventionArg::Normal => Convention::Normal,
        ConventionArg::Misere => Convention::Misere,
    }
}

enum Game {
    Heap(HeapGame),
    Compound(Compound),
}

fn select(g: &GameSelect) -> Result<Game, CliError> {
    match (&g.ruleset, &g.compound) {
        (Some(r), None) => r
            .parse()
            .map(Game::Heap)
            .map_err(|e| CliError::Usage(format!("{e}"))),
        (None, Some(c)) => c
            .parse()
            .map(Game::Compound)
            .map_err(|e| CliError::Usage(e.to_string())),
        _ => Err(CliError::Usage(
            "give exactly one of --ruleset or --compound".into(),
        )),
    }
}

fn parse_position(s: &str) -> Result<HeapPosition, CliError> {
    s.parse().map_err(domain)
}

fn validate_compound(c: Compound, p: &HeapPosition) -> Result<(), CliError> {
    let rules = c.ruleset();
    rules.first.validate(p).map_err(domain)?;
    rules.second.validate(p).map_err(domain)
}

pub fn solve(ctx: &Context, a: &GameArgs, with_grundy: bool) -> Result<Output, CliError> {
    let pos = parse_position(&a.pos)?;
    let conv = convention(a.convention);
    let command = if with_grundy { "grundy" } else { "solve" };
    match select(&a.game)? {
        Game::Heap(game) => {
            game.validate(&pos).map_err(domain)?;
            let tag = format!("heap:{game}");
            let params =
                json!({"ruleset": game.name(), "pos": pos.to_string(), "convention": conv});
            let mut s = ctx.solver(game);
            let loaded = ctx.load(&mut s, &tag);
            let result = if with_grundy {
                json!({"grundy": s.grundy(&pos)?.0})
            } else {
                json!({"outcome": s.outcome(&pos, conv)?})
            };
            let cache = ctx.save(&s, &tag, loaded);
            Ok(ctx.report(command, params, result, cache))
        }
        Game::Compound(c) => {
            validate_compound(c, &pos)?;
            let tag = format!("push:{c}");
            let phase = match a.phase {
                PhaseArg::Before => "before",
                PhaseArg::After => "after",
            };
            let params =
                json!({"compound": c, "pos": pos.to_string(), "phase": phase, "convention": conv});
            let p = match a.phase {
                PhaseArg::Before => PushPosition::before(pos.clone()),
                PhaseArg::After => PushPosition::after(pos.clone()),
            };
            let mut s = ctx.solver(c.ruleset());
            let loaded = ctx.load(&mut s, &tag);
            let result = if with_grundy {
                json!({"grundy": s.grundy(&p)?.0})
            } else {
                let outcome = s.outcome(&p, conv)?;
                let oracle =
                    (a.phase == PhaseArg::Before && conv == Convention::Normal && pos.len() == 2)
                        .then(|| push_p_oracle(c, pos.heaps()[0], pos.heaps()[1]).ok())
                        .flatten();
                match oracle {
                    Some(o) => json!({"outcome": outcome, "oracle": o}),
                    None => json!({"outcome": outcome}),
                }
            };
            let cache = ctx.save(&s, &tag, loaded);
            Ok(ctx.report(command, params, result, cache))
        }
    }
}

fn pairs_csv(pairs: &[(u64, u64)]) -> String {
    let mut out = String::from("a,b\n");
    for (a, b) in pairs {
        out.push_str(&format!("{a},{b}\n"));
    }
    out
}

fn searched_pairs<R>(
    solver: &mut Solver<R>,
    max: u64,
    conv: Convention,
    wrap: impl Fn(HeapPosition) -> R::Position,
) -> Result<Vec<(u64, u64)>, CliError>
where
    R: Ruleset,
{
    let mut out = Vec::new();
    for a in 0..=max {
        for b in a..=max {
            if solver
                .outcome(&wrap(HeapPosition::new(&[a, b])), conv)?
                .is_p()
            {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}

pub fn ppos(ctx: &Context, a: &PposArgs) -> Result<Output, CliError> {
    let conv = convention(a.convention);
    let (name, pairs, method, stats) = match select(&a.game)? {
        Game::Heap(game) => {
            game.validate(&HeapPosition::new(&[0, 0])).map_err(domain)?;
            let mut s = ctx.solver(game.clone());
            let pairs = searched_pairs(&mut s, a.max, conv, |p| p)?;
            (game.name(), pairs, Method::Search, s.stats())
        }
        Game::Compound(c) => match a.method {
            Method::Oracle => {
                if conv != Convention::Normal {
                    return Err(domain(
                        "closed forms are for normal play; use --method search",
                    ));
                }
                let pairs = p_positions_up_to(c, a.max).map_err(domain)?;
                (
                    c.name().to_string(),
                    pairs,
                    Method::Oracle,
                    CacheStats::default(),
                )
            }
            Method::Search => {
                let mut s = ctx.solver(c.ruleset());
                let pairs = searched_pairs(&mut s, a.max, conv, PushPosition::before)?;
                (c.name().to_string(), pairs, Method::Search, s.stats())
            }
        },
    };
    if a.format == Format::Csv {
        return Ok(Output::Text(pairs_csv(&pairs)));
    }
    let method = match method {
        Method::Oracle => "oracle",
        Method::Search => "search",
    };
    let params = json!({"game": name, "max": a.max, "convention": conv, "method": method});
    let result = json!({"count": pairs.len(), "pairs": pairs});
    Ok(ctx.report("ppos", params, result, CacheInfo { stats, file: None }))
}

pub fn heatmap(ctx: &Context, a: &HeatmapArgs) -> Result<Output, CliError> {
    if a.max == 0 || a.max > HEATMAP_MAX {
        return Err(domain(format!("--max must be in 1..={HEATMAP_MAX}")));
    }
    let tag = "zeruclid";
    let (map, cache) = if ctx.jobs <= 1 {
        let mut s = ctx.solver(*zeruclid::new_solver().ruleset());
        let loaded = ctx.load(&mut s, tag);
        let rows = (0..=a.max)
            .map(|r| heatmap_row(&mut s, r, a.max))
            .collect::<Result<Vec<_>, _>>()?;
        (Heatmap::from_rows(rows), ctx.save(&s, tag, loaded))
    } else {
        // Rows are dealt round-robin to workers; each worker keeps its own memo.
        let jobs = ctx.jobs;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Resource(e.to_string()))?;
        let parts = pool.install(|| {
            (0..jobs)
                .into_par_iter()
                .map(|w| {
                    let mut s = ctx.solver(*zeruclid::new_solver().ruleset());
                    let rows = (w as u64..=a.max)
                        .step_by(jobs)
                        .map(|r| heatmap_row(&mut s, r, a.max).map(|v| (r, v)))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok::<_, SolveError>((rows, s.stats()))
                })
                .collect::<Result<Vec<_>, _>>()
        })?;
        let mut stats = CacheStats::default();
        let mut rows = vec![Vec::new(); a.max as usize + 1];
        for (part, st) in parts {
            stats.hits += st.hits;
            stats.computed += st.computed;
            stats.entries += st.entries;
            for (r, v) in part {
                rows[r as usize] = v;
            }
        }
        (Heatmap::from_rows(rows), CacheInfo { stats, file: None })
    };
    if a.format == Format::Csv {
        return Ok(Output::Text(map.to_csv()));
    }
    let rows: Vec<Vec<u32>> = (0..map.size)
        .map(|r| map.row(r).iter().map(|v| v.0).collect())
        .collect();
    let zeros = map.values().iter().filter(|v| v.0 == 0).count();
    let params = json!({"max": a.max, "jobs": ctx.jobs});
    let result = json!({"size": map.size, "zeros": zeros, "rows": rows});
    Ok(ctx.report("heatmap", params, result, cache))
}

fn outcome_string(seq: &[Outcome]) -> String {
    seq.iter().map(|o| o.to_string()).collect()
}

#[derive(Serialize)]
struct Slim {
    preperiod: usize,
    period: usize,
}

pub fn period(ctx: &Context, a: &PeriodArgs) -> Result<Output, CliError> {
    let conv = convention(a.convention);
    if let (Some(k1), Some(k2)) = (a.k1, a.k2) {
        let s1 = SubtractionSet::interval(k1).map_err(domain)?;
        let s2 = SubtractionSet::interval(k2).map_err(domain)?;
        let (_, r2) = certify_subtraction_outcomes(&s2, conv)?;
        let c = certify_compound_outcomes(&s1, &r2)?;
        let shown: Vec<Outcome> = (0..a.show).map(|n| r2.at(n)).collect();
        let params = json!({"k1": k1, "k2": k2, "convention": conv});
        let mut result = json!({
            "predicted": predicted_period(k1, k2),
            "certified": Slim { preperiod: c.preperiod, period: c.period },
            "window": c.window,
            "modulus": c.modulus,
            "outcomes": outcome_string(&outcome_sequence(&s1, &shown)),
        });
        if conv == Convention::Misere {
            result["note"] = json!("the closed-form period is stated for normal play");
        }
        return Ok(ctx.report("period", params, result, CacheInfo::default()));
    }
    let (Some(s1), Some(r2)) = (&a.s1, &a.r2) else {
        return Err(CliError::Usage(
            "give --k1 and --k2, or --s1 and --r2".into(),
        ));
    };
    let s1: SubtractionSet = s1
        .parse()
        .map_err(|e| CliError::Usage(format!("--s1: {e}")))?;
    let r2game: HeapGame = r2
        .parse()
        .map_err(|e| CliError::Usage(format!("--r2: {e}")))?;
    r2game
        .validate(&HeapPosition::new(&[0]))
        .map_err(|e| domain(format!("--r2 must be a one-heap ruleset: {e}")))?;
    let mut warnings = Vec::new();
    // Outcome and value tables for R2, certified when R2 is a subtraction game.
    let (r2o, r2o_certified, r2g): (
        PeriodicTable<Outcome>,
        bool,
        Option<(PeriodicTable<_>, bool)>,
    ) = match &r2game {
        HeapGame::Subtraction(s2) => {
            let (_, o) = certify_subtraction_outcomes(s2, conv)?;
            let (_, g) = certify_subtraction_grundy(s2)?;
            (o, true, Some((g, true)))
        }
        other => {
            let mut s = ctx.solver(other.clone());
            let o = heap_outcomes(&mut s, a.length, conv)?;
            let Some((pre, per)) = detect_period(&o) else {
                return Err(domain(format!(
                    "no period found in {} outcomes of {other}; a finite period is required",
                    a.length
                )));
            };
            warnings.push(format!(
                    "period of {other} detected on {} heaps, not proven; the compound certificate assumes it persists",
                    a.length
                ));
            let g = heap_grundy(&mut s, a.length)?;
            let g = detect_period(&g).map(|(gp, gq)| (PeriodicTable::new(g, gp, gq), false));
            if g.is_none() {
                warnings.push(format!(
                    "values of {other} show no period; no value certificate"
                ));
            }
            (PeriodicTable::new(o, pre, per), false, g)
        }
    };
    let c = certify_compound_outcomes(&s1, &r2o)?;
    let bounds = period_bounds(&s1, r2o.period);
    let value = match (&r2g, conv) {
        (Some((g, certified)), Convention::Normal) => {
            let gc = certify_compound_grundy(&s1, g)?;
            json!({
                "certified": Slim { preperiod: gc.preperiod, period: gc.period },
                "second": {"preperiod": g.preperiod, "period": g.period, "proven": certified},
                "bound": period_bounds(&s1, g.period).value,
            })
        }
        _ => Value::Null,
    };
    let shown: Vec<Outcome> = (0..a.show).map(|n| r2o.at(n)).collect();
    let params = json!({"s1": s1.to_string(), "r2": r2game.name(), "convention": conv});
    let result = json!({
        "certified": Slim { preperiod: c.preperiod, period: c.period },
        "second": {"preperiod": r2o.preperiod, "period": r2o.period, "proven": r2o_certified},
        "bound": bounds.outcome,
        "bound_applies": r2o.preperiod == 0,
        "values": value,
        "outcomes": outcome_string(&outcome_sequence(&s1, &shown)),
        "warnings": warnings,
    });
    Ok(ctx.report("period", params, result, CacheInfo::default()))
}

pub fn cram(ctx: &Context, a: &CramArgs) -> Result<Output, CliError> {
    let board = GridBoard::empty(a.rows, a.cols)?;
    let tag = "push-cram";
    let mut s = Solver::with_cap(cram::PushCram, ctx.memo_cap);
    let loaded = ctx.load(&mut s, tag);
    let outcome = cram_outcome(&mut s, &board)?;
    let closed = cram_closed_form(a.rows as u64, a.cols as u64);
    let mut result = json!({
        "outcome": outcome,
        "closed_form": closed,
        "post_button_value": board.post_button_value().0,
    });
    if a.bluff {
        result["bluff"] =
            serde_json::to_value(bluff_check(&mut s, a.rows, a.cols)?).expect("plain data");
    }
    let cache = ctx.save(&s, tag, loaded);
    let params = json!({"rows": a.rows, "cols": a.cols, "bluff": a.bluff});
    Ok(ctx.report("cram", params, result, cache))
}

pub fn verify(ctx: &Context, a: &VerifyArgs) -> Result<Output, CliError> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![a.suite.parse().map_err(CliError::Usage)?]
    };
    let mut params = SuiteParams::default();
    if let Some(seed) = a.seed {
        params.seed = seed;
    }
    let reports: Vec<_> = suites.iter().map(|&s| verify::run(s, &params)).collect();
    let failed = reports.iter().any(|r| !r.passed());
    let result = json!({"passed": !failed, "suites": reports});
    let params = json!({"suite": a.suite, "domains": params});
    Ok(ctx.finish("verify", params, result, CacheInfo::default(), failed))
}
