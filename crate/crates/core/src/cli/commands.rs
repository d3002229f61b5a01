use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::info;

use super::config::{DataPaths, IrfSection, LoadedConfig, RunConfig};
use super::svg::irf_svg;
use super::CommonArgs;
use crate::error::Error;
use crate::ingest::csvio::csv_field;
use crate::ingest::{
    monthly_volume, market_panel, parse_asset_file, parse_employment_file, parse_market_file, parse_monthly_file,
    parse_release_file, parse_vintage_file, write_asset_csv, write_market_csv, write_release_csv, write_vintage_csv,
    AssetPrices, ContractQuote, MarketPanel,
};
use crate::lp::{
    impact_scale, run_lp_daily, run_lp_monthly, run_lp_onestep, run_lp_prob, write_irf_csv, ImpulseResponse, LpSpec,
    Normalization, ShockVariant,
};
use crate::regress::nw_bandwidth;
use crate::shockgen::{
    crude_outcome_series, estimate_shocks, monthly_aggregate, narrative_shocks, parse_events_file, DesignOptions,
    NarrativeEventList, NewsInputs, NewsPanel, ShockEstimate, ShockSeries,
};
use crate::synth::{
    coverage_from, fwl_gap, hac_oracle_gap, prob_irf, replicate_irfs, simulate_dgp, true_irf, wls_identity_gap,
};
use crate::timeline::{DailySeries, ElectionCycle, SeriesUnit, TradingCalendar};

/// How a command failed.
#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Pipeline(#[from] Error),
    #[error("failed properties: {}", .0.join(", "))]
    Properties(Vec<String>),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Usage(_) => super::EXIT_USAGE,
            CommandError::Pipeline(e) => match e {
                Error::InvalidConfig(_)
                | Error::Io { .. }
                | Error::Csv { .. }
                | Error::Schema { .. }
                | Error::Value { .. }
                | Error::Overlap { .. } => super::EXIT_USAGE,
                _ => super::EXIT_FAILURE,
            },
            CommandError::Properties(_) => super::EXIT_FAILURE,
        }
    }
}

type CmdResult<T = ()> = std::result::Result<T, CommandError>;

const MODULES: &str = "timeline,ingest,regress,shockgen,lp,synth,cli";

/// Output directory that stamps every file and refuses to overwrite inputs.
struct Output {
    dir: PathBuf,
    header: String,
    inputs: Vec<PathBuf>,
}

impl Output {
    fn new(args: &CommonArgs, lc: &LoadedConfig, command: &str) -> CmdResult<Self> {
        std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
        let mut inputs = vec![canonical(&args.config)];
        let d = &lc.config.data;
        for p in [&d.market, &d.assets, &d.vintages, &d.releases, &d.events, &d.employment, &d.monthly_controls]
            .into_iter()
            .flatten()
        {
            inputs.push(canonical(&if p.is_absolute() { p.clone() } else { lc.base_dir.join(p) }));
        }
        Ok(Self {
            dir: args.out.clone(),
            header: format!(
                "elecshock {} modules={MODULES} command={command} config-sha256={}",
                env!("CARGO_PKG_VERSION"),
                lc.hash
            ),
            inputs,
        })
    }

    fn target(&self, name: &str) -> CmdResult<PathBuf> {
        let path = self.dir.join(name);
        if path.exists() && self.inputs.contains(&canonical(&path)) {
            return Err(CommandError::Usage(format!("refusing to overwrite input file {}", path.display())));
        }
        Ok(path)
    }

    fn put(&self, name: &str, body: &str) -> CmdResult {
        let path = self.target(name)?;
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        info!("wrote {}", path.display());
        Ok(())
    }

    /// CSV or TOML file with a `#` comment header.
    fn text(&self, name: &str, body: &str) -> CmdResult {
        self.put(name, &format!("# {}\n{body}", self.header))
    }

    fn irf(&self, ir: &ImpulseResponse, x_label: &str, y_label: &str) -> CmdResult {
        let stem = format!("irf_{}_{}", file_safe(&ir.spec), file_safe(&ir.series));
        self.text(&format!("{stem}.csv"), &write_irf_csv(std::slice::from_ref(ir)))?;
        let title = format!("{} response to the {} shock", ir.series, ir.spec);
        self.put(&format!("{stem}.svg"), &irf_svg(ir, &title, x_label, y_label, &self.header))
    }
}

fn canonical(p: &Path) -> PathBuf {
    p.canonicalize().unwrap_or_else(|_| p.to_path_buf())
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn load(args: &CommonArgs) -> CmdResult<LoadedConfig> {
    Ok(LoadedConfig::load(&args.config, args.seed)?)
}

/// Inputs and first-stage results shared by the empirical commands.
struct Context {
    calendar: Arc<TradingCalendar>,
    cycles: Vec<ElectionCycle>,
    assets: AssetPrices,
    quotes: Vec<ContractQuote>,
    panel: MarketPanel,
    est: ShockEstimate,
    news: NewsPanel,
    events: Option<NarrativeEventList>,
}

fn load_context(lc: &LoadedConfig) -> CmdResult<Context> {
    let cfg = &lc.config;
    let s = &cfg.shocks;
    let cycles = lc.cycles();
    if cycles.is_empty() {
        return Err(CommandError::Usage("no election cycles configured".into()));
    }
    let d: &DataPaths = &cfg.data;
    let quotes = parse_market_file(lc.path(&d.market, "market")?)?;
    let assets = parse_asset_file(lc.path(&d.assets, "assets")?)?;
    let vintages = parse_vintage_file(lc.path(&d.vintages, "vintages")?)?;
    let releases = parse_release_file(lc.path(&d.releases, "releases")?)?;
    let events = match &d.events {
        Some(_) => Some(parse_events_file(lc.path(&d.events, "events")?)?),
        None => None,
    };

    let calendar = Arc::new(assets.common_calendar(&[&s.yield_series, &s.sp500_series])?);
    let level = |id: &str| -> CmdResult<DailySeries> {
        let pairs = assets.get(id).expect("checked by common_calendar").iter().copied();
        Ok(DailySeries::from_pairs(id, SeriesUnit::Level, calendar.clone(), pairs)?.0)
    };
    let (yields, sp500) = (level(&s.yield_series)?, level(&s.sp500_series)?);
    let panel = market_panel(&quotes, calendar.clone(), &cycles, s.volume_rule)?;
    let macro_ids = [s.macro_series[0].as_str(), s.macro_series[1].as_str(), s.macro_series[2].as_str()];
    let news = NewsPanel::build(NewsInputs {
        calendar: calendar.clone(),
        yield_levels: &yields,
        sp500_levels: &sp500,
        vintages: &vintages,
        releases: &releases,
        macro_ids,
        cycles: &cycles,
        mode: s.indicator_mode,
    })?;
    let est = estimate_shocks(
        &panel.prob,
        &news,
        &cycles,
        &panel.weights,
        &DesignOptions {
            weighted: s.weighted_first_stage,
        },
    )?;
    info!(
        "first stage: {} observations, R2 {:.4}, {} dropped quote dates",
        est.fit.n_obs,
        est.fit.r_squared,
        panel.dropped_dates.len()
    );
    Ok(Context {
        calendar,
        cycles,
        assets,
        quotes,
        panel,
        est,
        news,
        events,
    })
}

/// Natural log of an asset's closes on the analysis calendar.
fn log_series(ctx: &Context, id: &str) -> CmdResult<DailySeries> {
    let pairs = ctx
        .assets
        .get(id)
        .ok_or_else(|| Error::InvalidConfig(format!("asset series {id:?} not found")))?;
    if let Some((d, v)) = pairs.iter().find(|(_, v)| *v <= 0.0) {
        return Err(Error::OutOfRange {
            what: format!("asset series {id}"),
            detail: format!("non-positive close {v} at {d}"),
        }
        .into());
    }
    let logs = pairs.iter().map(|(d, v)| (*d, v.ln()));
    Ok(DailySeries::from_pairs(id, SeriesUnit::LogLevel, ctx.calendar.clone(), logs)?.0)
}

fn cycle_field(c: Option<i32>) -> String {
    c.map(|c| c.to_string()).unwrap_or_default()
}

/// Shock series, fit summary, largest shocks, monthly volume and the quote
/// dates that fell off the calendar.
pub fn cmd_shocks(args: &CommonArgs) -> CmdResult {
    let lc = load(args)?;
    let ctx = load_context(&lc)?;
    let out = Output::new(args, &lc, "shocks")?;
    let sh = &ctx.est.shocks;
    let dates = ctx.calendar.dates();

    let mut body = String::from("date,shock_pp,weight,cycle\n");
    for i in (0..sh.len()).filter(|&i| sh.defined[i]) {
        let _ = writeln!(body, "{},{},{},{}", dates[i], sh.values[i], sh.weights[i], cycle_field(sh.cycles[i]));
    }
    out.text("shocks.csv", &body)?;

    let fit = &ctx.est.fit;
    let mut body = String::from("term,coef,se\n");
    for (j, l) in fit.labels.iter().enumerate() {
        let _ = writeln!(body, "{l},{},{}", fit.coefficients[j], ctx.est.hac.se(j));
    }
    out.text("fit_coefficients.csv", &body)?;
    let body = format!(
        "statistic,value\nobservations,{}\nr_squared,{}\nhac_lags,{}\ncondition,{}\ncycles,{}\n",
        fit.n_obs,
        fit.r_squared,
        ctx.est.hac.lags,
        fit.condition,
        ctx.cycles.len()
    );
    out.text("fit_summary.csv", &body)?;

    let mut order: Vec<usize> = (0..sh.len()).filter(|&i| sh.defined[i]).collect();
    order.sort_by(|&a, &b| sh.values[b].abs().total_cmp(&sh.values[a].abs()).then(a.cmp(&b)));
    let mut body = String::from("rank,date,cycle,shock_pp,nearest_event,event_date,days_apart\n");
    for (rank, &i) in order.iter().take(lc.config.shocks.top_shocks).enumerate() {
        let near = ctx.events.as_ref().and_then(|e| e.nearest(dates[i]));
        let (label, ed, gap) = match near {
            Some(e) => (
                csv_field(&e.label),
                e.date.to_string(),
                (e.date - dates[i]).num_days().abs().to_string(),
            ),
            None => Default::default(),
        };
        let _ = writeln!(
            body,
            "{},{},{},{},{label},{ed},{gap}",
            rank + 1,
            dates[i],
            cycle_field(sh.cycles[i]),
            sh.values[i]
        );
    }
    out.text("largest_shocks.csv", &body)?;

    let mut body = String::from("month,units\n");
    for (m, u) in monthly_volume(&ctx.quotes, lc.config.shocks.volume_rule) {
        let _ = writeln!(body, "{m},{u}");
    }
    out.text("monthly_volume.csv", &body)?;

    let mut body = String::from("date\n");
    for d in &ctx.panel.dropped_dates {
        let _ = writeln!(body, "{d}");
    }
    out.text("dropped_dates.csv", &body)?;

    println!(
        "shocks: {} observations, R2 {:.4}, {} cycles",
        fit.n_obs,
        fit.r_squared,
        ctx.cycles.len()
    );
    Ok(())
}

fn narrative_events(ctx: &Context) -> CmdResult<&NarrativeEventList> {
    ctx.events
        .as_ref()
        .ok_or_else(|| CommandError::Usage("data.events is required for narrative shocks".into()))
}

/// Shock series, spec name, normalization and y-axis unit for one variant.
fn variant_setup(
    ctx: &Context,
    irf: &IrfSection,
    variant: ShockVariant,
) -> CmdResult<(Option<ShockSeries>, String, Normalization, &'static str)> {
    let spec = &irf.spec;
    let norm = |sh: &ShockSeries| -> CmdResult<Normalization> {
        Ok(if irf.normalize {
            Normalization::Scale(impact_scale(sh, &ctx.est.prob, spec)?)
        } else {
            Normalization::Raw
        })
    };
    let (unit_norm, unit_raw) = ("percent per 10pp", "log points per pp of shock");
    Ok(match variant {
        ShockVariant::Baseline => {
            let sh = ctx.est.shocks.clone();
            let n = norm(&sh)?;
            (Some(sh), "baseline".into(), n, if irf.normalize { unit_norm } else { unit_raw })
        }
        ShockVariant::Narrative => {
            let sh = narrative_shocks(&ctx.est.shocks, narrative_events(ctx)?, irf.narrative_window)?;
            let n = norm(&sh)?;
            let name = format!("narrative{}", irf.narrative_window);
            (Some(sh), name, n, if irf.normalize { unit_norm } else { unit_raw })
        }
        ShockVariant::Crude => {
            let sh = crude_outcome_series(ctx.calendar.clone(), &ctx.cycles)?;
            if irf.normalize {
                (Some(sh), "crude".into(), Normalization::Scale(100.0), "percent per Republican win")
            } else {
                (Some(sh), "crude".into(), Normalization::Raw, "log points per Republican win")
            }
        }
        ShockVariant::OneStep => {
            if irf.normalize {
                (None, "one_step".into(), Normalization::Scale(10.0), unit_norm)
            } else {
                (None, "one_step".into(), Normalization::Raw, "log points per unit probability")
            }
        }
    })
}

/// Daily projections for every configured variant and series, plus the
/// optional probability and monthly employment responses.
pub fn cmd_irf(args: &CommonArgs) -> CmdResult {
    let lc = load(args)?;
    let irf = lc
        .config
        .irf
        .clone()
        .ok_or_else(|| CommandError::Usage("config has no [irf] section".into()))?;
    if irf.variants.is_empty() {
        return Err(CommandError::Usage("irf.variants is empty".into()));
    }
    let ctx = load_context(&lc)?;
    let out = Output::new(args, &lc, "irf")?;
    let ys = irf.series.iter().map(|id| log_series(&ctx, id)).collect::<CmdResult<Vec<_>>>()?;
    let mut scales = String::from("spec,factor,unit\n");
    let mut baseline_scale = None;

    for &variant in &irf.variants {
        let (shocks, name, normalization, unit) = variant_setup(&ctx, &irf, variant)?;
        let spec = LpSpec {
            name: name.clone(),
            variant,
            normalization,
            ..irf.spec.clone()
        };
        let _ = writeln!(scales, "{name},{},{}", normalization.factor(), csv_field(unit));
        if variant == ShockVariant::Baseline {
            baseline_scale = Some(normalization);
        }
        for y in &ys {
            let ir = match &shocks {
                Some(sh) => run_lp_daily(sh, y, &spec)?,
                None => run_lp_onestep(&ctx.est.prob, &ctx.news, &ctx.cycles, &ctx.panel.weights, y, &spec)?,
            };
            out.irf(&ir, "business days", unit)?;
        }
        if irf.probability && matches!(variant, ShockVariant::Baseline | ShockVariant::Narrative) {
            let sh = shocks.as_ref().expect("shock-based variant");
            let ir = run_lp_prob(sh, &ctx.est.prob, &spec)?;
            let y_unit = if irf.normalize { "percentage points per 10pp" } else { "probability per pp of shock" };
            out.irf(&ir, "business days", y_unit)?;
        }
    }
    out.text("normalization.csv", &scales)?;

    if let Some(m) = &lc.config.monthly {
        let d = &lc.config.data;
        let employment = parse_employment_file(lc.path(&d.employment, "employment")?)?;
        let control_file = if m.controls.is_empty() {
            None
        } else {
            Some(parse_monthly_file(lc.path(&d.monthly_controls, "monthly_controls")?)?)
        };
        let controls = m
            .controls
            .iter()
            .map(|id| {
                control_file
                    .as_ref()
                    .and_then(|f| f.get(id))
                    .ok_or_else(|| CommandError::Usage(format!("monthly control {id:?} not found")))
            })
            .collect::<CmdResult<Vec<_>>>()?;
        let normalization = match baseline_scale {
            Some(n) => n,
            None if irf.normalize => Normalization::Scale(impact_scale(&ctx.est.shocks, &ctx.est.prob, &irf.spec)?),
            None => Normalization::Raw,
        };
        let spec = LpSpec {
            normalization,
            ..m.spec.clone()
        };
        let shock_m = monthly_aggregate(&ctx.est.shocks);
        for key in &m.industries {
            let level = employment
                .get(key)
                .ok_or_else(|| CommandError::Usage(format!("industry {key:?} not in employment file")))?;
            let y = level.map(key, SeriesUnit::LogLevel, f64::ln);
            let ir = run_lp_monthly(&shock_m, &y, &controls, &spec)?;
            let unit = if irf.normalize { "percent per 10pp" } else { "log points per pp of shock" };
            out.irf(&ir, "months", unit)?;
        }
    }
    println!("irf: {} variants, {} series", irf.variants.len(), ys.len());
    Ok(())
}

/// Narrative shocks at each listed event for windows of 1, 3, 5 and the
/// configured width, plus the configured-window daily series.
pub fn cmd_narrative(args: &CommonArgs) -> CmdResult {
    let lc = load(args)?;
    let ctx = load_context(&lc)?;
    let events = narrative_events(&ctx)?;
    let out = Output::new(args, &lc, "narrative")?;
    let window = lc.config.irf.as_ref().map(|i| i.narrative_window).unwrap_or(5);
    let windows: BTreeSet<usize> = [1, 3, 5, window].into_iter().collect();
    let series = windows
        .iter()
        .map(|&w| narrative_shocks(&ctx.est.shocks, events, w))
        .collect::<crate::Result<Vec<_>>>()?;
    let sh = &ctx.est.shocks;

    let mut body = String::from("date,label,trading_date,cycle,shock_pp");
    for w in &windows {
        let _ = write!(body, ",window_{w}");
    }
    body.push('\n');
    for e in events.events() {
        let idx = ctx.calendar.next_on_or_after(e.date).filter(|&i| sh.cycles[i].is_some());
        let _ = write!(body, "{},{}", e.date, csv_field(&e.label));
        match idx {
            Some(i) => {
                let _ = write!(body, ",{},{},{}", ctx.calendar.date(i), cycle_field(sh.cycles[i]), sh.values[i]);
                for s in &series {
                    let _ = write!(body, ",{}", s.values[i]);
                }
            }
            None => body.push_str(&",".repeat(3 + windows.len())),
        }
        body.push('\n');
    }
    out.text("narrative_events.csv", &body)?;

    let chosen = &series[windows.iter().position(|w| *w == window).expect("window in set")];
    let mut body = String::from("date,shock_pp,cycle\n");
    for i in (0..chosen.len()).filter(|&i| chosen.values[i] != 0.0) {
        let _ = writeln!(body, "{},{},{}", ctx.calendar.date(i), chosen.values[i], cycle_field(chosen.cycles[i]));
    }
    out.text("narrative_shocks.csv", &body)?;
    println!("narrative: {} events, window {window}", events.len());
    Ok(())
}

/// Synthetic data in the ingest schemas, the true responses, and a config
/// that runs `shocks` and `irf` on them.
pub fn cmd_simulate(args: &CommonArgs) -> CmdResult {
    let lc = load(args)?;
    let mut dgp = lc
        .config
        .simulate
        .clone()
        .ok_or_else(|| CommandError::Usage("config has no [simulate] section".into()))?;
    if let Some(s) = args.seed {
        dgp.seed = s;
    }
    let sim = simulate_dgp(&dgp)?;
    let out = Output::new(args, &lc, "simulate")?;
    let dates = sim.calendar.dates();

    out.text("market.csv", &write_market_csv(&sim.quotes))?;
    out.text("assets.csv", &write_asset_csv(&sim.asset_prices()))?;
    out.text("vintages.csv", &write_vintage_csv(&sim.vintages))?;
    out.text("releases.csv", &write_release_csv(&sim.releases))?;

    let mut body = String::from("date,label,description\n");
    for c in &sim.cycles {
        let largest = (0..dates.len())
            .filter(|&i| c.contains(dates[i]))
            .max_by(|&a, &b| sim.true_shocks[a].abs().total_cmp(&sim.true_shocks[b].abs()).then(b.cmp(&a)));
        let mut rows = vec![(c.election_date, format!("Election {}", c.id), "election day".to_string())];
        if let Some(i) = largest.filter(|&i| dates[i] != c.election_date) {
            rows.push((dates[i], format!("Largest shock {}", c.id), format!("{:.3} pp", sim.true_shocks[i])));
        }
        rows.sort();
        for (d, l, desc) in rows {
            let _ = writeln!(body, "{d},{},{}", csv_field(&l), csv_field(&desc));
        }
    }
    out.text("events.csv", &body)?;

    let mask = crate::timeline::cycle_mask(&sim.calendar, &sim.cycles)?;
    let mut body = String::from("date,shock_pp,cycle\n");
    for (i, d) in dates.iter().enumerate().filter(|(i, _)| mask.cycle_at(*i).is_some()) {
        let _ = writeln!(body, "{d},{},{}", sim.true_shocks[i], cycle_field(mask.cycle_at(i)));
    }
    out.text("true_shocks.csv", &body)?;

    let horizons = LpSpec::daily("").horizons;
    let mut body = String::from("series,horizon,response\n");
    for (k, a) in dgp.assets.iter().enumerate() {
        for (h, v) in true_irf(&dgp, k, horizons).iter().enumerate() {
            let _ = writeln!(body, "{},{h},{v}", csv_field(&a.name));
        }
    }
    for (h, v) in prob_irf(&dgp, horizons).iter().enumerate() {
        let _ = writeln!(body, "pi_r,{h},{v}");
    }
    out.text("true_irf.csv", &body)?;

    let run = RunConfig {
        data: DataPaths {
            market: Some("market.csv".into()),
            assets: Some("assets.csv".into()),
            vintages: Some("vintages.csv".into()),
            releases: Some("releases.csv".into()),
            events: Some("events.csv".into()),
            ..DataPaths::default()
        },
        cycles: sim.cycles.clone(),
        irf: Some(IrfSection {
            series: dgp.assets.iter().map(|a| a.name.clone()).collect(),
            ..IrfSection::default()
        }),
        simulate: Some(dgp.clone()),
        ..RunConfig::default()
    };
    let text = toml::to_string(&run).map_err(|e| Error::InvalidConfig(format!("run config: {e}")))?;
    out.text("run.toml", &text)?;
    println!(
        "simulate: {} days, {} cycles, {} assets",
        dates.len(),
        sim.cycles.len(),
        dgp.assets.len()
    );
    Ok(())
}

/// Oracle and Monte Carlo property suite. Writes `validate_report.csv` and
/// fails with the names of the properties that did not hold.
pub fn cmd_validate(args: &CommonArgs) -> CmdResult {
    let lc = load(args)?;
    let mut v = lc
        .config
        .validate
        .clone()
        .ok_or_else(|| CommandError::Usage("config has no [validate] section".into()))?;
    if let Some(s) = args.seed {
        v.seed = s;
        v.dgp.seed = s;
    }
    if v.coverage_reps < 100 {
        return Err(CommandError::Usage("validate.coverage_reps must be at least 100".into()));
    }
    let (lo, hi) = v.coverage_bounds;
    if !(0.0..=1.0).contains(&lo) || !(lo..=1.0).contains(&hi) {
        return Err(CommandError::Usage("validate.coverage_bounds must satisfy 0 <= lo <= hi <= 1".into()));
    }
    let out = Output::new(args, &lc, "validate")?;
    let mut results: Vec<(&str, bool, String)> = Vec::new();

    let fwl = fwl_gap(&v.dgp, v.coverage_horizons, 0)?;
    results.push(("fwl_equivalence", fwl <= 1e-8, format!("max |alpha - 100 gamma| = {fwl:.3e}")));

    let offset = usize::from(v.bandwidth_off_by_one);
    let hac = hac_oracle_gap(v.seed, v.hac_problems, offset)?;
    results.push((
        "hac_oracle",
        hac <= 1e-12,
        format!("{} problems, max relative difference {hac:.3e}", v.hac_problems),
    ));

    let wls = wls_identity_gap(v.seed, v.wls_problems)?;
    results.push((
        "wls_scaling",
        wls <= 1e-10,
        format!("{} problems, max relative difference {wls:.3e}", v.wls_problems),
    ));

    let bw = (nw_bandwidth(4096), nw_bandwidth(1259));
    results.push(("bandwidth_rule", bw == (12, 8), format!("T=4096 -> {}, T=1259 -> {}", bw.0, bw.1)));

    let spec = LpSpec {
        horizons: v.coverage_horizons,
        ..LpSpec::daily("coverage")
    };
    let irs = replicate_irfs(&v.dgp, &spec, 0, v.coverage_reps)?;
    let truth = true_irf(&v.dgp, 0, spec.horizons);
    let c90 = coverage_from(&irs, &truth, 0.90);
    let c68 = coverage_from(&irs, &truth, 0.68);
    let (min90, max90) = c90.coverage.iter().fold((1.0f64, 0.0f64), |(a, b), c| (a.min(*c), b.max(*c)));
    results.push((
        "coverage",
        min90 >= lo && max90 <= hi,
        format!(
            "{} reps, 90% band coverage in [{min90:.3}, {max90:.3}], bounds [{lo}, {hi}]",
            v.coverage_reps
        ),
    ));
    let nested = c68.coverage.iter().zip(&c90.coverage).all(|(a, b)| a <= b);
    results.push(("band_nesting", nested, "68% coverage never exceeds 90% coverage".into()));

    let mut body = String::from("property,status,detail\n");
    for (name, ok, detail) in &results {
        let status = if *ok { "pass" } else { "fail" };
        let _ = writeln!(body, "{name},{status},{}", csv_field(detail));
        println!("{status:>4}  {name}: {detail}");
    }
    out.text("validate_report.csv", &body)?;
    let failed: Vec<String> = results.iter().filter(|r| !r.1).map(|r| r.0.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CommandError::Properties(failed))
    }
}
