use std::time::Instant;

use zeta_moments::moments::{
    closed_form_poly, formula_k1_opts, formula_k2_opts, formula_k3_opts, multi_integral_form_opts,
    scan_delta_opts,
};
use zeta_moments::verify::{run_suite, SuiteConfig};
use zeta_moments::zeta_line::{moment_direct_opts, Method, MomentReport};
use zeta_moments::Error;

use crate::config::{CommandKind, OutputFormat, RunConfig};
use crate::report::{to_json, MomentOutput, ScanOutput, TableOutput, VerifyOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    IdentityFailed = 1,
    Config = 2,
    Tolerance = 3,
}

/// Result of a command: the report text (if any), a diagnostic, and the
/// process exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: ExitCode,
    pub body: Option<String>,
    pub message: Option<String>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self {
            code: ExitCode::Ok,
            body: Some(body),
            message: None,
        }
    }

    fn error(e: &Error) -> Self {
        Self {
            code: exit_code_for(e),
            body: None,
            message: Some(e.to_string()),
        }
    }
}

/// Exit code for a library error.
pub fn exit_code_for(e: &Error) -> ExitCode {
    match e {
        Error::ToleranceNotMet { .. } | Error::NonFinite(_) => ExitCode::Tolerance,
        Error::Inconsistent(_) => ExitCode::IdentityFailed,
        Error::Domain(_)
        | Error::Range(_)
        | Error::Guard(_)
        | Error::Capacity { .. }
        | Error::Pole(_) => ExitCode::Config,
    }
}

fn render<J: serde::Serialize>(
    format: OutputFormat,
    json: &J,
    csv: impl FnOnce() -> String,
    text: impl FnOnce() -> String,
) -> String {
    match format {
        OutputFormat::Json => to_json(json),
        OutputFormat::Csv => csv(),
        OutputFormat::Text => text(),
    }
}

fn moment_report(cfg: &RunConfig, delta: f64) -> Result<MomentReport, Error> {
    let (k, spec, guards) = (cfg.k, &cfg.spec, cfg.guards);
    let need_k = |want: u32| {
        if k == want {
            Ok(())
        } else {
            Err(Error::Range(format!(
                "method {} needs --k {want}, got {k}",
                cfg.method
            )))
        }
    };
    match cfg.method {
        Method::Direct => moment_direct_opts(k, delta, spec, guards),
        Method::FormulaK1 => need_k(1).and_then(|_| formula_k1_opts(delta, spec, guards)),
        Method::FormulaK2 => need_k(2).and_then(|_| formula_k2_opts(delta, spec, guards)),
        Method::FormulaK3 => {
            need_k(3).and_then(|_| formula_k3_opts(delta, spec, guards).map(|(r, _)| r))
        }
        Method::MultiIntegral => multi_integral_form_opts(k, delta, spec, guards),
        Method::ClosedForm => Err(Error::Range(
            "closed_form is a table, not a moment route".into(),
        )),
    }
}

/// Runs the configured command.
pub fn execute(cfg: &RunConfig) -> Outcome {
    if let Err(e) = cfg.spec.validate() {
        return Outcome::error(&e);
    }
    match cfg.command {
        CommandKind::Verify(suite) => {
            let suite_cfg = SuiteConfig {
                spec: cfg.spec,
                deltas: cfg.deltas.clone(),
            };
            match run_suite(suite, &suite_cfg) {
                Ok(rows) => {
                    let out = VerifyOutput::new(suite.as_str(), rows, cfg.spec);
                    let code = if out.all_pass() {
                        ExitCode::Ok
                    } else {
                        ExitCode::IdentityFailed
                    };
                    let message =
                        (!out.all_pass()).then(|| format!("{} identities failed", out.failed));
                    let body = render(cfg.format, &out, || out.to_csv(), || out.to_text());
                    Outcome {
                        code,
                        body: Some(body),
                        message,
                    }
                }
                Err(e) => Outcome::error(&e),
            }
        }
        CommandKind::Moment => {
            let delta = cfg.deltas[0];
            let start = Instant::now();
            match moment_report(cfg, delta) {
                Ok(report) => {
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    let out = MomentOutput::new(&report, ms, cfg.spec);
                    Outcome::ok(render(cfg.format, &out, || out.to_csv(), || out.to_text()))
                }
                Err(e) => Outcome::error(&e),
            }
        }
        CommandKind::Scan => match scan_delta_opts(cfg.k, &cfg.deltas, &cfg.spec, cfg.guards) {
            Ok(rows) => {
                let any_ok = rows.iter().any(|r| r.error.is_none());
                let out = ScanOutput {
                    k: cfg.k,
                    rows,
                    spec: cfg.spec,
                };
                let body = render(cfg.format, &out, || out.to_csv(), || out.to_text());
                if any_ok {
                    Outcome::ok(body)
                } else {
                    Outcome {
                        code: ExitCode::Config,
                        body: Some(body),
                        message: Some("no grid point succeeded".into()),
                    }
                }
            }
            Err(e) => Outcome::error(&e),
        },
        CommandKind::Table => {
            let rows: Result<Vec<_>, _> = (0..=cfg.n_max)
                .map(|n| closed_form_poly(n, &cfg.spec))
                .collect();
            match rows {
                Ok(rows) => {
                    let out = TableOutput {
                        rows,
                        spec: cfg.spec,
                    };
                    Outcome::ok(render(cfg.format, &out, || out.to_csv(), || out.to_text()))
                }
                Err(e) => Outcome::error(&e),
            }
        }
    }
}
