//! Result serialization and atomic file output.
//!
//! Documents are assembled in memory first and written in one step: file
//! output goes to a temporary file in the destination directory and is
//! renamed into place, so a failing command never leaves a partial file.
//! Numbers use the shortest representation that round-trips the exact
//! double, in both JSON and CSV.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::evaluate::EvalSummary;
use crate::fitting::{FitMode, FitResult};
use crate::models::{CurvePoint, FdrTable};
use crate::{Error, Result};

/// Write `text` to the path, atomically, or to stdout when no path is given.
pub fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let write = || -> std::io::Result<()> {
                let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
                tmp.write_all(text.as_bytes())?;
                tmp.persist(path).map_err(|e| e.error)?;
                Ok(())
            };
            write().map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
        }
    }
}

/// Pretty JSON document with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain data structures serialize");
    text.push('\n');
    text
}

fn mode_label(mode: FitMode) -> &'static str {
    match mode {
        FitMode::Plugin => "plugin",
        FitMode::Mle => "mle",
    }
}

/// One-row CSV rendering of a fit; log_likelihood is empty when not
/// evaluable on the input scale.
pub fn fit_csv(fit: &FitResult) -> String {
    let ll = fit
        .log_likelihood
        .map(|v| v.to_string())
        .unwrap_or_default();
    format!(
        "model_kind,mode,s_hat,sigma_hat,eta0_hat,log_likelihood,converged,at_boundary,n_obs\n\
         {},{},{},{},{},{},{},{},{}\n",
        fit.model_kind,
        mode_label(fit.mode),
        fit.s_hat,
        fit.sigma_hat,
        fit.eta0_hat,
        ll,
        fit.converged,
        fit.at_boundary,
        fit.n_obs
    )
}

/// Per-row scores in input order.
pub fn score_csv(table: &FdrTable) -> String {
    let mut text = String::from("raw,y,fdr,Fdr\n");
    for row in &table.rows {
        writeln!(text, "{},{},{},{}", row.raw, row.y, row.fdr, row.tail_fdr).unwrap();
    }
    text
}

/// Curve grid in plotting column order.
pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut text = String::from("x,fdr,Fdr,f,f0,fA\n");
    for p in points {
        writeln!(
            text,
            "{},{},{},{},{},{}",
            p.x, p.fdr, p.tail_fdr, p.f, p.f0, p.f_alt
        )
        .unwrap();
    }
    text
}

/// Flat study table: one row per repetition x method; failed repetitions
/// keep their row with empty metric cells.
pub fn study_table_csv(summary: &EvalSummary) -> String {
    let mut text = String::from(
        "method,rep,failed,mae_fdr,mae_Fdr,mse_fdr,mse_Fdr,eta0_hat,sigma_hat,converged,at_boundary\n",
    );
    for series in &summary.methods {
        let mut ok = series.reps.iter().peekable();
        for rep in 0..summary.scenario.reps {
            match ok.peek() {
                Some(r) if r.rep == rep => {
                    let r = ok.next().unwrap();
                    writeln!(
                        text,
                        "{},{},false,{},{},{},{},{},{},{},{}",
                        series.method,
                        rep,
                        r.mae_fdr,
                        r.mae_tail_fdr,
                        r.mse_fdr,
                        r.mse_tail_fdr,
                        r.eta0_hat,
                        r.sigma_hat,
                        r.converged,
                        r.at_boundary
                    )
                    .unwrap();
                }
                _ => {
                    writeln!(text, "{},{rep},true,,,,,,,,", series.method).unwrap();
                }
            }
        }
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluate::{run_study, MethodSpec};
    use crate::fitting::plugin_fit;
    use crate::models::{ModelKind, StatisticBatch, StatisticScale};
    use crate::simulate::SimulationScenario;

    #[test]
    fn file_output_is_written_and_replaced_whole() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_output(Some(&path), "first\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "first\n");
        write_output(Some(&path), "second\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second\n");
        // no stray temporaries left behind
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn write_into_missing_directory_fails_cleanly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nope").join("out.csv");
        let err = write_output(Some(&path), "x").unwrap_err();
        assert!(err.to_string().contains("cannot write"), "{err}");
    }

    #[test]
    fn csv_renderings_round_trip_doubles() {
        let batch =
            StatisticBatch::new(vec![0.0, 1.862, -3.1], StatisticScale::ZScore).unwrap();
        let (fit, table) = plugin_fit(ModelKind::Hnd, 0.8, 1.0, &batch).unwrap();
        let fit_text = fit_csv(&fit);
        assert!(fit_text.starts_with("model_kind,mode,"), "{fit_text}");
        assert!(fit_text.contains("hnd,plugin,"), "{fit_text}");
        let score_text = score_csv(&table);
        let mut lines = score_text.lines();
        assert_eq!(lines.next(), Some("raw,y,fdr,Fdr"));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0].parse::<f64>().unwrap(), 0.0);
        assert_eq!(first[2].parse::<f64>().unwrap(), 1.0);
        let fdr: f64 = score_text.lines().nth(2).unwrap().split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(fdr, table.rows[1].fdr, "shortest form must round-trip");
    }

    #[test]
    fn study_table_has_one_row_per_rep_and_method() {
        let sc = SimulationScenario::new(0.8, 2.0, 5.0, 10.0, 5, 3, 1).unwrap();
        let methods = [
            MethodSpec::Truth,
            // m = 5 starves the MLE so this method fails every rep
            MethodSpec::Mle { kind: ModelKind::Hnd },
        ];
        let summary = run_study(&sc, &methods).unwrap();
        let text = study_table_csv(&summary);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert!(lines[1].starts_with("truth,0,false,0,0,0,0,"), "{}", lines[1]);
        assert_eq!(lines[4], "hnd-native,0,true,,,,,,,,");
    }
}
