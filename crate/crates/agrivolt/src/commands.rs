//! One function per CLI verb. Each computes every output in memory and returns
//! it with a short summary; nothing touches the output directory until the caller commits.

use std::collections::BTreeMap;
use std::fmt::Write;

use agrivolt_core::agronomy::{annual_y_crop, rotation_yield, ResponseSet};
use agrivolt_core::planner::{
    ct_economics, feasible_st_window, max_st_hours_per_month, monthly_day_length, optimize_ct, schedule_economics,
    CtCache, FeasibilityReport, MonthlyResponses, Optimum, SweepRow, SweepSpec,
};
use agrivolt_core::simulate::{y_pv, YieldSeries};
use agrivolt_core::solar::{TrackingMode, TrackingScheme};
use agrivolt_core::time::{Month, MonthSet};
use agrivolt_core::weather::WeatherSeries;

use crate::error::{AppError, AppResult};
use crate::ingest::Scenario;
use crate::output::{self, num, OutputSet, Table, ECON_HEADER};
use crate::plot::{render_svg, Chart, Series};
use crate::run;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Options {
    pub dump_timesteps: bool,
}

#[derive(Debug, Default)]
pub struct CommandOutput {
    pub files: OutputSet,
    pub summary: String,
}

fn svg(files: &mut OutputSet, name: &str, chart: &Chart) -> AppResult<()> {
    files.add(name, render_svg(chart)?.into_bytes());
    Ok(())
}

/// ST hours represented by a scheme, for reporting.
fn st_hours(scheme: &TrackingScheme) -> f64 {
    match scheme.mode {
        TrackingMode::Ct { st_hours } => st_hours,
        TrackingMode::St => 24.0,
        _ => 0.0,
    }
}

fn simulate_primary(scenario: &Scenario, weather: &WeatherSeries) -> AppResult<YieldSeries> {
    let scheme = scenario.tracking_scheme()?;
    run::simulate_year(weather, &scenario.layout()?, &scheme, scenario.layout.ground_points)
}

fn primary_cache(scenario: &Scenario, weather: &WeatherSeries) -> AppResult<CtCache> {
    let layout = scenario.layout_for(&TrackingScheme::st(), scenario.layout.a_lm)?;
    run::ct_cache(
        weather,
        &layout,
        scenario.scheme.rotation_limit,
        scenario.layout.ground_points,
    )
}

pub fn simulate(scenario: &Scenario, options: Options) -> AppResult<CommandOutput> {
    let weather = scenario.site.load_weather()?;
    let responses = scenario.responses()?;
    let series = simulate_primary(scenario, &weather)?;
    let classes = responses.curves();
    let mut files = OutputSet::new();
    let table = output::yield_monthly(&series, classes);
    files.add_table("yield_monthly.csv", &table);
    if options.dump_timesteps {
        files.add_table("timesteps.csv", &output::timesteps(&series));
    }

    let month_points = |col: &str| -> Vec<(f64, f64)> {
        let i = table.column(col).expect("column exists");
        table
            .rows
            .iter()
            .filter_map(|r| Some((r[0].parse().ok()?, r[i].parse().ok()?)))
            .collect()
    };
    let mut lines = vec![Series::new("Y_PV", month_points("y_pv"))];
    for c in classes {
        let col = format!("y_crop_{}", c.class.code());
        lines.push(Series::new(format!("Y_Crop ({})", c.class.code()), month_points(&col)));
    }
    svg(
        &mut files,
        "yield_monthly.svg",
        &Chart {
            title: format!("Monthly yields, {}", scenario.tracking_scheme()?.label()),
            x_label: "month".into(),
            y_label: "relative yield".into(),
            series: lines,
        },
    )?;

    let plan = scenario.crop_plan(&responses)?;
    let crop = rotation_yield(&plan, &series, &responses)?;
    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "scheme {}, a_lm {}",
        scenario.tracking_scheme()?.label(),
        scenario.layout.a_lm
    );
    let _ = writeln!(summary, "annual Y_PV {}", num(y_pv(&series, MonthSet::ALL)?, 4));
    let _ = writeln!(summary, "plan {} Y_Crop {}", plan.name, num(crop.y_crop(), 4));
    Ok(CommandOutput { files, summary })
}

/// Annual Y_PV and per-class Y_Crop of the customized schedule at every grid value.
fn schedule_curves(cache: &CtCache, grid: &[f64], responses: &ResponseSet) -> AppResult<Table> {
    let mut header = vec!["n".to_string(), "y_pv".into()];
    header.extend(responses.curves().iter().map(|c| format!("y_crop_{}", c.class.code())));
    let mut t = Table::new(header);
    for &n in grid {
        let series = cache.series(n)?;
        let mut row = vec![num(n, 1), num(y_pv(&series, MonthSet::ALL)?, 6)];
        for c in responses.curves() {
            row.push(num(annual_y_crop(c, &series)?, 6));
        }
        t.push(row);
    }
    Ok(t)
}

fn column_points(t: &Table, col: usize) -> Vec<(f64, f64)> {
    t.rows
        .iter()
        .filter_map(|r| Some((r[0].parse().ok()?, r[col].parse().ok()?)))
        .collect()
}

fn window_line(report: &FeasibilityReport) -> String {
    match (report.bounds(), report.binding()) {
        (Some((lo, hi)), _) => format!("feasible ST hours: {} to {}", num(lo, 1), num(hi, 1)),
        (None, Some(b)) => format!("no feasible ST hours: {}", b.describe()),
        (None, None) => "no feasible ST hours".into(),
    }
}

pub fn feasibility(scenario: &Scenario, _options: Options) -> AppResult<CommandOutput> {
    let weather = scenario.site.load_weather()?;
    let responses = scenario.responses()?;
    let plan = scenario.crop_plan(&responses)?;
    let monthly = MonthlyResponses::for_plan(&plan, &responses)?;
    let thresholds = scenario.thresholds()?;
    let grid = scenario.grid()?;
    let cache = primary_cache(scenario, &weather)?;
    let report = feasible_st_window(
        &cache,
        &monthly,
        &thresholds,
        scenario.period()?,
        &scenario.enforcement(),
        &grid,
    )?;
    let year = weather.records()[0].timestamp.year;
    let day = monthly_day_length(weather.site(), year);
    let max_st = max_st_hours_per_month(&cache, &monthly, &thresholds, &grid, &day)?;

    let mut files = OutputSet::new();
    files.add_table("feasibility.csv", &output::feasibility_table(&report));
    let mut t = Table::new(["month", "day_length_h", "max_st_hours"]);
    for m in Month::all() {
        t.push(vec![
            m.number().to_string(),
            num(day[m.index()], 2),
            num(max_st[m.index()], 1),
        ]);
    }
    files.add_table("max_st_hours.csv", &t);

    let curves = schedule_curves(&cache, &grid, &responses)?;
    files.add_table("yield_vs_st_hours.csv", &curves);
    let lines = (1..curves.header.len())
        .map(|i| {
            let label = match curves.header[i].strip_prefix("y_crop_") {
                Some(class) => format!("Y_Crop ({class})"),
                None => "Y_PV".into(),
            };
            Series::new(label, column_points(&curves, i))
        })
        .collect();
    svg(
        &mut files,
        "yield_vs_st_hours.svg",
        &Chart {
            title: format!("Yields vs ST hours, a_lm {}", scenario.layout.a_lm),
            x_label: "ST hours per day".into(),
            y_label: "relative yield".into(),
            series: lines,
        },
    )?;

    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "plan {}, thresholds energy {} crop {}",
        plan.name, thresholds.energy, thresholds.crop
    );
    let _ = writeln!(summary, "{}", window_line(&report));
    Ok(CommandOutput { files, summary })
}

pub fn economics(scenario: &Scenario, _options: Options) -> AppResult<CommandOutput> {
    let weather = scenario.site.load_weather()?;
    let responses = scenario.responses()?;
    let plan = scenario.crop_plan(&responses)?;
    let econ = scenario.econ_params()?;
    let scheme = scenario.tracking_scheme()?;
    let series = simulate_primary(scenario, &weather)?;
    let a_lm = scenario.layout.a_lm;
    let result = schedule_economics(
        &series,
        st_hours(&scheme),
        a_lm,
        scheme.is_tracked(),
        &plan,
        &responses,
        &econ,
    )?;

    let mut files = OutputSet::new();
    let mut t = Table::new(ECON_HEADER);
    t.push(output::econ_row(&scheme.label(), a_lm, econ.m_l, &plan.name, &result));
    files.add_table("econ.csv", &t);
    let mut summary = String::new();
    let _ = writeln!(summary, "{}", agrivolt_core::economics::describe(&result.econ));
    Ok(CommandOutput { files, summary })
}

pub fn optimize(scenario: &Scenario, _options: Options) -> AppResult<CommandOutput> {
    let weather = scenario.site.load_weather()?;
    let responses = scenario.responses()?;
    let plan = scenario.crop_plan(&responses)?;
    let monthly = MonthlyResponses::for_plan(&plan, &responses)?;
    let econ = scenario.econ_params()?;
    let grid = scenario.grid()?;
    let a_lm = scenario.layout.a_lm;
    let cache = primary_cache(scenario, &weather)?;
    let report = feasible_st_window(
        &cache,
        &monthly,
        &scenario.thresholds()?,
        scenario.period()?,
        &scenario.enforcement(),
        &grid,
    )?;
    let per_n = ct_economics(&cache, a_lm, &plan, &responses, &econ, &grid)?;

    let mut header: Vec<String> = ECON_HEADER.iter().map(|s| s.to_string()).collect();
    header.extend(["n", "y_pv", "y_crop", "feasible"].map(String::from));
    let mut t = Table::new(header.clone());
    for (e, p) in per_n.iter().zip(&report.points) {
        let mut row = output::econ_row(&TrackingScheme::ct(e.n).label(), a_lm, econ.m_l, &plan.name, e);
        row.extend([
            num(e.n, 1),
            num(e.y_pv, 6),
            num(e.crop.y_crop(), 6),
            p.passes().to_string(),
        ]);
        t.push(row);
    }
    let mut files = OutputSet::new();
    files.add_table("optimize.csv", &t);

    let mut best = Table::new(header.iter().cloned().chain(["status".to_string()]));
    let mut summary = String::new();
    let _ = writeln!(summary, "{}", window_line(&report));
    match optimize_ct(&report, &per_n) {
        Optimum::Optimal(e) => {
            let mut row = output::econ_row(&TrackingScheme::ct(e.n).label(), a_lm, econ.m_l, &plan.name, &e);
            row.extend([
                num(e.n, 1),
                num(e.y_pv, 6),
                num(e.crop.y_crop(), 6),
                "true".into(),
                "optimal".into(),
            ]);
            best.push(row);
            let _ = writeln!(summary, "optimum: {} ST hours, ppr {}", num(e.n, 1), num(e.econ.ppr, 4));
        }
        Optimum::Infeasible(b) => {
            let mut row = vec![String::new(); header.len()];
            row.push(format!("infeasible: {}", b.describe()));
            best.push(row);
            let _ = writeln!(summary, "no optimum: {}", b.describe());
        }
    }
    files.add_table("optimum.csv", &best);

    let pick = |f: fn(&agrivolt_core::planner::ScheduleEconomics) -> f64| per_n.iter().map(|e| (e.n, f(e))).collect();
    svg(
        &mut files,
        "optimize.svg",
        &Chart {
            title: format!("Price-performance vs ST hours, plan {}", plan.name),
            x_label: "ST hours per day".into(),
            y_label: "ratio".into(),
            series: vec![
                Series::new("ppr", pick(|e| e.econ.ppr)),
                Series::new("Y_PV", pick(|e| e.y_pv)),
                Series::new("Y_Crop", pick(|e| e.crop.y_crop())),
            ],
        },
    )?;
    Ok(CommandOutput { files, summary })
}

fn load_sites(scenario: &Scenario, spec: &SweepSpec) -> AppResult<BTreeMap<String, WeatherSeries>> {
    spec.site
        .iter()
        .map(|name| Ok((name.clone(), scenario.site_named(name)?.load_weather()?)))
        .collect()
}

fn execute(scenario: &Scenario, spec: &SweepSpec) -> AppResult<(Vec<SweepRow>, String)> {
    let weather = load_sites(scenario, spec)?;
    let responses = scenario.responses()?;
    let rows = run::run_sweep(scenario, spec, &weather, &responses, &scenario.econ_params()?)?;
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    let mut summary = format!("{} cells evaluated", rows.len());
    if failed > 0 {
        let _ = write!(summary, ", {failed} failed");
    }
    summary.push('\n');
    Ok((rows, summary))
}

pub fn sweep(scenario: &Scenario, _options: Options) -> AppResult<CommandOutput> {
    let spec = scenario.sweep_spec()?;
    let (rows, summary) = execute(scenario, &spec)?;
    let mut files = OutputSet::new();
    files.add_table("sweep.csv", &output::sweep_table(&rows));
    Ok(CommandOutput { files, summary })
}

/// The standard tariff-threshold grid for the scenario's primary site.
pub fn table2_spec(scenario: &Scenario) -> SweepSpec {
    let mut spec = SweepSpec::table2(scenario.site_name());
    for s in &mut spec.scheme {
        *s = s.with_limit(scenario.scheme.rotation_limit);
    }
    spec
}

/// Rows per (M_L, A_LM); columns N/S, ST, AT for LV then HV.
pub fn table2_layout(spec: &SweepSpec, rows: &[SweepRow]) -> Table {
    let plans = ["LV", "HV"];
    let mut header = vec!["M_L".to_string(), "A_LM".into()];
    for plan in plans {
        header.extend(spec.scheme.iter().map(|s| format!("{}_{}", s.label(), plan)));
    }
    let mut t = Table::new(header);
    for &m_l in &spec.m_l {
        for &a_lm in &spec.a_lm {
            let mut row = vec![num(m_l, 0), num(a_lm, 0)];
            for plan in plans {
                for scheme in &spec.scheme {
                    let value = rows
                        .iter()
                        .find(|r| {
                            let c = &r.cell;
                            c.m_l == m_l && c.a_lm == a_lm && c.crop_plan == plan && c.scheme == *scheme
                        })
                        .and_then(|r| r.outcome.as_ref().ok())
                        .map(|e| num(e.econ.delta_fit_th, 2))
                        .unwrap_or_default();
                    row.push(value);
                }
            }
            t.push(row);
        }
    }
    t
}

pub fn table2(scenario: &Scenario, _options: Options) -> AppResult<CommandOutput> {
    let spec = table2_spec(scenario);
    let (rows, summary) = execute(scenario, &spec)?;
    if let Some(r) = rows.iter().find(|r| r.outcome.is_err()) {
        let err = r.outcome.as_ref().err().map(|e| e.to_string()).unwrap_or_default();
        return Err(AppError::data(format!("table2 cell {} failed: {err}", r.cell.index)));
    }
    let mut files = OutputSet::new();
    files.add_table("table2.csv", &output::sweep_table(&rows));
    files.add_table("table2_layout.csv", &table2_layout(&spec, &rows));
    Ok(CommandOutput { files, summary })
}
