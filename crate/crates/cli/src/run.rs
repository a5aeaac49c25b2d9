//! Command dispatch.

use std::io::Write;
use std::path::{Path, PathBuf};

use qcosym_core::catalog::warped_r3;
use qcosym_core::fastslow::{
    build_structure, compare_full_vs_averaged, idx, run_scenario, ComparisonReport, ScenarioRun,
};
use qcosym_core::nalgebra::DMatrix;
use qcosym_core::sampling::sample_box;
use qcosym_core::{
    poisson_bracket, validate_structure, Chart, OneFormField, QCosymplecticStructure, ScalarField,
    TwoFormField, ValidationReport,
};
use serde::Serialize;

use crate::config::{CliConfig, Command, Job, StructureJob, StructureKind};
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, format_value, write_csv, write_svg};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION_FAILED: i32 = 1;

pub const FULL_HEADER: [&str; 10] = ["s", "t", "tau", "q", "p", "Q", "P", "I", "J", "H"];
pub const AVERAGED_HEADER: [&str; 5] = ["s", "tau", "Q", "P", "I"];
pub const COMPARE_FULL_HEADER: [&str; 8] = ["s", "t", "tau", "q", "p", "Q", "P", "I"];
pub const DEVIATION_HEADER: [&str; 4] = ["eps", "s", "dQ", "dP"];

/// Runs a command. Reports go to `out`, human-readable tables to `err`.
/// Returns the process exit status; errors map to status 2.
pub fn execute(cfg: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    match (&cfg.command, &cfg.job) {
        (Command::Validate, Job::Structure(job)) => validate(job, out, err),
        (Command::Brackets, Job::Structure(job)) => brackets(job, out),
        (Command::Simulate | Command::Average, Job::Scenario(sc)) => {
            let run = run_scenario(sc)?;
            write_scenario(cfg, &run, out)
        }
        (Command::Compare, Job::Compare(cc)) => {
            let report = compare_full_vs_averaged(cc)?;
            write_comparison(cfg, &report, out)
        }
        (c, _) => Err(CliError::ConfigValidation(format!(
            "no job for command `{c}`"
        ))),
    }
}

pub fn build(job: &StructureJob) -> CliResult<QCosymplecticStructure> {
    Ok(match job.kind {
        StructureKind::Standard => QCosymplecticStructure::standard(job.n, job.q)?,
        StructureKind::FastSlow => build_structure(),
        StructureKind::Warped => warped_r3()?,
        StructureKind::Twisted => twisted_example()?,
    })
}

fn twisted_example() -> CliResult<QCosymplecticStructure> {
    let omega = TwoFormField::new(|x| {
        let mut w = DMatrix::zeros(3, 3);
        w[(0, 1)] = 1.0 + x[2];
        w[(1, 0)] = -1.0 - x[2];
        w
    });
    Ok(QCosymplecticStructure::new(
        Chart::canonical(1, 1)?,
        omega,
        vec![OneFormField::coordinate_differential(2, 3)],
    )?)
}

fn sample_points(s: &QCosymplecticStructure, job: &StructureJob) -> Vec<Vec<f64>> {
    sample_box(
        s.dim(),
        -job.sample_radius,
        job.sample_radius,
        job.samples,
        job.seed,
    )
}

fn io(path: &str) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::io(path, e)
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::io("<stdout>", std::io::Error::other(e)))?;
    writeln!(out, "{text}").map_err(io("<stdout>"))
}

fn validate(job: &StructureJob, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let s = build(job)?;
    let report = validate_structure(&s, &sample_points(&s, job), s.fd_config());
    print_json(out, &report)?;
    write_validation_table(&report, err).map_err(io("<stderr>"))?;
    Ok(if report.passed {
        EXIT_OK
    } else {
        EXIT_VALIDATION_FAILED
    })
}

fn write_validation_table(r: &ValidationReport, w: &mut dyn Write) -> std::io::Result<()> {
    let count = |f: &dyn Fn(&qcosym_core::validate::PointReport) -> bool| {
        r.points.iter().filter(|p| f(p)).count()
    };
    let total = r.points.len();
    writeln!(w, "structure n={} q={} at {total} points", r.n, r.q)?;
    let rows: [(&str, usize); 7] = [
        ("antisymmetry", count(&|p| p.antisymmetric)),
        ("rank 2n", count(&|p| p.rank_ok)),
        ("lambda independence", count(&|p| p.lambdas_independent)),
        ("lambda closedness", count(&|p| p.lambdas_closed)),
        ("omega closedness", count(&|p| p.omega_closed)),
        ("musical invertibility", count(&|p| p.musical_invertible)),
        ("reeb relations", count(&|p| p.reeb_ok)),
    ];
    for (name, ok) in rows {
        let verdict = if ok == total { "pass" } else { "FAIL" };
        writeln!(w, "  {name:<22} {ok:>4}/{total:<4} {verdict}")?;
    }
    writeln!(w, "overall: {}", if r.passed { "pass" } else { "FAIL" })
}

fn brackets(job: &StructureJob, out: &mut dyn Write) -> CliResult<i32> {
    let s = build(job)?;
    let names = s.chart().names().to_vec();
    let pairs: Vec<(String, String)> = match &job.pairs {
        Some(p) => p.clone(),
        None => (0..names.len())
            .flat_map(|i| (i + 1..names.len()).map(move |j| (i, j)))
            .map(|(i, j)| (names[i].clone(), names[j].clone()))
            .collect(),
    };
    let coord = |name: &str| -> CliResult<ScalarField> {
        let i = s.chart().index_of(name).ok_or_else(|| {
            CliError::ConfigValidation(format!("unknown coordinate `{name}`; chart has {names:?}"))
        })?;
        Ok(ScalarField::coordinate(i, s.dim()))
    };
    let points = sample_points(&s, job);
    let w = io("<stdout>");
    write!(out, "{:<8} {:<8}", "f", "g").map_err(&w)?;
    for k in 0..points.len() {
        write!(out, " {:>20}", format!("x{k}")).map_err(&w)?;
    }
    writeln!(out).map_err(&w)?;
    for (a, b) in &pairs {
        let (f, g) = (coord(a)?, coord(b)?);
        write!(out, "{a:<8} {b:<8}").map_err(&w)?;
        for x in &points {
            let v = poisson_bracket(&s, &f, &g, x)?;
            write!(out, " {:>20}", format_value(v, 12)).map_err(&w)?;
        }
        writeln!(out).map_err(&w)?;
    }
    Ok(EXIT_OK)
}

fn output_dir(cfg: &CliConfig) -> CliResult<PathBuf> {
    let dir = cfg.output.dir.clone();
    ensure_dir(&dir)?;
    Ok(dir)
}

/// Rows of `trajectory.csv` for a scenario run.
pub fn scenario_rows(run: &ScenarioRun) -> Vec<Vec<f64>> {
    let t = &run.trajectory;
    let mon = |name: &str| t.monitor(name).unwrap_or(&[]);
    let (i, j, h) = (mon("I"), mon("J"), mon("H"));
    (0..t.len())
        .map(|k| {
            let mut row = Vec::with_capacity(10);
            row.push(t.times[k]);
            row.extend_from_slice(&t.states[k]);
            row.push(i[k]);
            if !run.is_averaged() {
                row.push(j[k]);
                row.push(h[k]);
            }
            row
        })
        .collect()
}

fn write_scenario(cfg: &CliConfig, run: &ScenarioRun, out: &mut dyn Write) -> CliResult<i32> {
    let dir = output_dir(cfg)?;
    let header: &[&str] = if run.is_averaged() {
        &AVERAGED_HEADER
    } else {
        &FULL_HEADER
    };
    let rows = scenario_rows(run);
    let path = dir.join("trajectory.csv");
    write_csv(
        &path,
        header,
        rows.iter().map(Vec::as_slice),
        cfg.output.csv_precision,
    )?;
    if cfg.output.svg {
        let t = &run.trajectory;
        let mut series: Vec<(&str, Vec<f64>)> = Vec::new();
        if run.is_averaged() {
            series.push(("Q", t.component(1)));
            series.push(("P", t.component(2)));
        } else {
            for (name, i) in [("q", idx::Q), ("Q", idx::SLOW_Q), ("P", idx::SLOW_P)] {
                series.push((name, t.component(i)));
            }
            series.push(("I", t.monitor("I").unwrap_or(&[]).to_vec()));
        }
        write_svg(&dir.join("trajectory.svg"), "trajectory", &t.times, &series)?;
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        trajectory: PathBuf,
        samples: usize,
        diagnostics: &'a qcosym_core::fastslow::DiagnosticsReport,
    }
    print_json(
        out,
        &Summary {
            trajectory: path,
            samples: rows.len(),
            diagnostics: &run.diagnostics,
        },
    )?;
    Ok(EXIT_OK)
}

fn eps_tag(eps: f64) -> String {
    format!("{eps}")
}

fn write_comparison(
    cfg: &CliConfig,
    report: &ComparisonReport,
    out: &mut dyn Write,
) -> CliResult<i32> {
    let dir = output_dir(cfg)?;
    let digits = cfg.output.csv_precision;
    let mut files = Vec::new();
    for run in &report.runs {
        let tag = eps_tag(run.eps);
        let full_rows: Vec<Vec<f64>> = (0..run.full.len())
            .map(|k| {
                let mut row = vec![run.full.times[k]];
                row.extend_from_slice(&run.full.states[k]);
                row.push(run.full.monitor("I").map_or(f64::NAN, |m| m[k]));
                row
            })
            .collect();
        let full_path = dir.join(format!("full_eps_{tag}.csv"));
        write_csv(
            &full_path,
            &COMPARE_FULL_HEADER,
            full_rows.iter().map(Vec::as_slice),
            digits,
        )?;
        let av_rows: Vec<Vec<f64>> = (0..run.averaged.len())
            .map(|k| {
                let mut row = vec![run.averaged.times[k]];
                row.extend_from_slice(&run.averaged.states[k]);
                row.push(run.averaged.monitor("I").map_or(f64::NAN, |m| m[k]));
                row
            })
            .collect();
        let av_path = dir.join(format!("averaged_eps_{tag}.csv"));
        write_csv(
            &av_path,
            &AVERAGED_HEADER,
            av_rows.iter().map(Vec::as_slice),
            digits,
        )?;
        files.push(full_path);
        files.push(av_path);
        if cfg.output.svg {
            let series = vec![
                ("dQ", run.deviation_q.clone()),
                ("dP", run.deviation_p.clone()),
            ];
            let svg = dir.join(format!("deviation_eps_{tag}.svg"));
            write_svg(
                &svg,
                &format!("full - averaged, eps = {tag}"),
                &run.full.times,
                &series,
            )?;
        }
    }
    let deviation_rows: Vec<[f64; 4]> = report
        .runs
        .iter()
        .flat_map(|r| {
            (0..r.full.len())
                .map(move |k| [r.eps, r.full.times[k], r.deviation_q[k], r.deviation_p[k]])
        })
        .collect();
    let dev_path = dir.join("deviation.csv");
    write_csv(
        &dev_path,
        &DEVIATION_HEADER,
        deviation_rows.iter().map(|r| r.as_slice()),
        digits,
    )?;
    files.push(dev_path);

    #[derive(Serialize)]
    struct RunSummary {
        eps: f64,
        horizon: f64,
        sup_deviation_q: f64,
        sup_deviation_p: f64,
        sup_deviation_action: f64,
    }
    #[derive(Serialize)]
    struct Summary {
        runs: Vec<RunSummary>,
        ratio: f64,
        exponent: f64,
        files: Vec<PathBuf>,
    }
    let summary = Summary {
        runs: report
            .runs
            .iter()
            .map(|r| RunSummary {
                eps: r.eps,
                horizon: r.horizon,
                sup_deviation_q: r.sup_deviation_q,
                sup_deviation_p: r.sup_deviation_p,
                sup_deviation_action: r.sup_deviation_action,
            })
            .collect(),
        ratio: report.ratio,
        exponent: report.exponent,
        files,
    };
    print_json(out, &summary)?;
    Ok(EXIT_OK)
}

/// Reads a config file, applying the command-line overrides.
pub fn load(
    path: &Path,
    command: Option<Command>,
    out_dir: Option<PathBuf>,
    svg: bool,
) -> CliResult<CliConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let seed = crate::config::seed_from_env()?;
    let mut cfg = crate::config::parse_config_with(&text, command, seed)?;
    if let Some(dir) = out_dir {
        cfg.output.dir = dir;
    }
    cfg.output.svg |= svg;
    Ok(cfg)
}
