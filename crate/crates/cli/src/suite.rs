//! Acceptance bounds, run reports and the golden suite.

use std::path::{Path, PathBuf};

use serde::Serialize;

use zest_core::behavior_tree::ZestLeaf;
use zest_core::simulator::{
    run_scenario_with, scenarios, track_crossing, Metrics, RunOptions, ScenarioConfig, SimLog,
};

use crate::csv_log::{write_bt_dump, write_log_csv};
use crate::svg::render_trajectory_svg;
use crate::CliError;

/// Figure-8 cross-track bounds in metres.
pub const FIGURE_EIGHT_RMS: f64 = 1.0;
pub const FIGURE_EIGHT_MAX: f64 = 3.0;
/// Stand-on bounds.
pub const STAND_ON_HEADING_DEG: f64 = 5.0;
pub const STAND_ON_CROSS_TRACK: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub bound: String,
    pub pass: bool,
}

impl Check {
    fn at_least(name: &str, value: Option<f64>, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound: format!(">= {bound}"),
            pass: value.is_some_and(|v| v >= bound),
        }
    }

    fn below(name: &str, value: Option<f64>, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound: format!("< {bound}"),
            pass: value.is_some_and(|v| v < bound),
        }
    }

    fn flag(name: &str, pass: bool) -> Self {
        Self {
            name: name.into(),
            value: None,
            bound: "true".into(),
            pass,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub version: &'static str,
    pub metrics: Metrics,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub artifacts: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub dump_bt: bool,
    /// Multiplies the required minimum separation.
    pub safety_factor: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            dump_bt: false,
            safety_factor: 1.0,
        }
    }
}

fn separation_check(m: &Metrics, c: &ScenarioConfig, factor: f64) -> Check {
    Check::at_least(
        "min_separation",
        m.min_separation,
        factor * c.field.safety_radius,
    )
}

/// Bounds for a golden scenario by name; any other scenario gets the
/// separation bound if it has a red vessel.
pub fn checks_for(log: &SimLog, m: &Metrics, c: &ScenarioConfig, factor: f64) -> Vec<Check> {
    let mut checks = Vec::new();
    match c.name.as_str() {
        scenarios::FIGURE_EIGHT => {
            checks.push(Check::flag("circuit_completed", log.goal_reached));
            checks.push(Check::below(
                "cross_track_rms",
                Some(m.cross_track_rms),
                FIGURE_EIGHT_RMS,
            ));
            checks.push(Check::below(
                "max_cross_track",
                Some(m.max_cross_track),
                FIGURE_EIGHT_MAX,
            ));
        }
        scenarios::OVERTAKING => {
            checks.push(Check::flag("goal_reached", log.goal_reached));
            checks.push(separation_check(m, c, factor));
            let cruise = c.white.params.cruise_speed;
            let active: Vec<f64> = log
                .records
                .iter()
                .filter(|r| r.leaf == Some(ZestLeaf::ApplyRule13))
                .map(|r| r.command.desired_speed)
                .collect();
            let top = active.iter().copied().reduce(f64::max);
            checks.push(Check::below("rule_speed_command", top, cruise));
        }
        scenarios::HEAD_ON => {
            checks.push(separation_check(m, c, factor));
            checks.push(Check::at_least(
                "cpa_starboard_offset",
                m.cpa_lateral_offset.filter(|v| *v > 0.0),
                0.0,
            ));
        }
        scenarios::CROSSING_GIVE_WAY => {
            checks.push(separation_check(m, c, factor));
            let crossing = track_crossing(log);
            checks.push(Check {
                name: "passes_astern".into(),
                value: crossing.map(|x| x.red_along - x.crossing_along),
                bound: "> 0".into(),
                pass: crossing.is_some_and(|x| x.passes_astern()),
            });
        }
        scenarios::STAND_ON => {
            checks.push(Check::below(
                "max_heading_deviation_deg",
                Some(m.max_heading_deviation.to_degrees()),
                STAND_ON_HEADING_DEG,
            ));
            checks.push(Check::below(
                "max_cross_track",
                Some(m.max_cross_track),
                STAND_ON_CROSS_TRACK,
            ));
            checks.push(separation_check(m, c, factor));
        }
        _ => {
            if c.red.is_some() {
                checks.push(separation_check(m, c, factor));
            }
        }
    }
    checks.push(Check::flag("no_collision", !log.collided));
    checks
}

/// Runs one scenario, writes `<name>.csv`, `<name>.svg`, `<name>.json` (and
/// `<name>_bt.log` when dumping) into `out`.
pub fn run_and_report(
    config: &ScenarioConfig,
    out: &Path,
    opts: SuiteOptions,
) -> Result<RunReport, CliError> {
    let (log, metrics) = run_scenario_with(
        config,
        RunOptions {
            dump_bt: opts.dump_bt,
        },
    )?;
    let checks = checks_for(&log, &metrics, config, opts.safety_factor);
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;

    let mut artifacts = Vec::new();
    let csv = out.join(format!("{}.csv", config.name));
    write_log_csv(&log, &csv)?;
    artifacts.push(csv);
    let svg = out.join(format!("{}.svg", config.name));
    render_trajectory_svg(&log, config, &svg)?;
    artifacts.push(svg);
    if opts.dump_bt {
        let bt = out.join(format!("{}_bt.log", config.name));
        write_bt_dump(&log, &bt)?;
        artifacts.push(bt);
    }
    let json = out.join(format!("{}.json", config.name));
    artifacts.push(json.clone());

    let report = RunReport {
        scenario: config.name.clone(),
        version: env!("CARGO_PKG_VERSION"),
        metrics,
        pass: checks.iter().all(|c| c.pass),
        checks,
        artifacts,
    };
    let text = serde_json::to_string_pretty(&report)?;
    std::fs::write(&json, text + "\n").map_err(|e| CliError::io(&json, e))?;
    Ok(report)
}

/// Runs the given scenarios on worker threads; reports come back in input
/// order.
pub fn run_suite(
    configs: &[ScenarioConfig],
    out: &Path,
    opts: SuiteOptions,
) -> Result<Vec<RunReport>, CliError> {
    let results: Vec<Result<RunReport, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| scope.spawn(move || run_and_report(c, out, opts)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario worker panicked"))
            .collect()
    });
    let reports = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let summary = out.join("suite.json");
    let text = serde_json::to_string_pretty(&reports)?;
    std::fs::write(&summary, text + "\n").map_err(|e| CliError::io(&summary, e))?;
    Ok(reports)
}

fn opt(v: Option<f64>) -> String {
    v.map_or("-".into(), |v| format!("{v:.2}"))
}

/// Fixed-width pass/fail table.
pub fn format_table(reports: &[RunReport]) -> String {
    let mut s = format!(
        "{:<20} {:>9} {:>9} {:>9} {:>9}  {}\n",
        "scenario", "min_sep", "xte_rms", "xte_max", "t_goal", "result"
    );
    for r in reports {
        let m = &r.metrics;
        s.push_str(&format!(
            "{:<20} {:>9} {:>9.2} {:>9.2} {:>9}  {}\n",
            r.scenario,
            opt(m.min_separation),
            m.cross_track_rms,
            m.max_cross_track,
            opt(m.time_to_goal),
            if r.pass { "PASS" } else { "FAIL" }
        ));
        for c in r.checks.iter().filter(|c| !c.pass) {
            s.push_str(&format!(
                "    {} = {} (want {})\n",
                c.name,
                opt(c.value),
                c.bound
            ));
        }
    }
    s
}
