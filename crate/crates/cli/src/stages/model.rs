use crate::charts;
use crate::checkpoint::{self, ProjectRow, Workspace};
use crate::{AppError, AppResult};
use coevo_core::dataset::CommitObservation;
use coevo_core::distill::ChangeType;
use coevo_core::stats::{
    anova_sequential, chisq_goodness_of_fit, coefficient_csv, fit_logistic, fit_negbin,
    log_transform, model_table, odds_ratios, split_train_validation, AnovaTable, DesignMatrix,
    Family, ModelFit,
};
use coevo_core::testdet::has_test_maintenance;
use std::path::{Path, PathBuf};

/// Minimum odds-ratio distance from 1 for a predictor to be charted.
const ODDS_STRENGTH_THRESHOLD: f64 = 0.15;
/// Bars kept per direction in the odds-ratio charts.
const ODDS_TOP_N: usize = 5;

fn reports_dir(ws: &Workspace) -> AppResult<PathBuf> {
    let dir = ws.reports_dir();
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// The six control/activity predictors of the project-level count
/// models, log(x+1)-transformed.
fn project_predictors(rows: &[ProjectRow]) -> AppResult<Vec<(String, Vec<f64>)>> {
    let columns: [(&str, fn(&ProjectRow) -> u64); 6] = [
        ("log(corrective)", |r| r.corrective),
        ("log(perfective)", |r| r.perfective),
        ("log(adaptive)", |r| r.adaptive),
        ("log(developers)", |r| r.developers),
        ("log(LOC)", |r| r.loc),
        ("log(age)", |r| r.age_days),
    ];
    let mut out = Vec::new();
    for (name, select) in columns {
        let mut values = Vec::with_capacity(rows.len());
        for row in rows {
            values.push(log_transform(select(row) as f64).map_err(anyhow::Error::from)?);
        }
        out.push((name.to_string(), values));
    }
    Ok(out)
}

fn matrix_for(
    columns: &[(String, Vec<f64>)],
    keep_rows: Option<&[usize]>,
) -> AppResult<DesignMatrix> {
    let selected: Vec<(String, Vec<f64>)> = columns
        .iter()
        .map(|(name, values)| {
            let values = match keep_rows {
                Some(rows) => rows.iter().map(|&i| values[i]).collect(),
                None => values.clone(),
            };
            (name.clone(), values)
        })
        .collect();
    DesignMatrix::with_columns(selected).map_err(|e| AppError::Runtime(e.into()))
}

fn anova_csv(table: &AnovaTable) -> String {
    let mut out = String::from("term,df,deviance,residual_df,residual_deviance,p_value\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{:.4},{}\n",
            row.term,
            row.df.map(|d| d.to_string()).unwrap_or_default(),
            row.deviance_reduction.map(|d| format!("{d:.4}")).unwrap_or_default(),
            row.residual_df,
            row.residual_deviance,
            row.p_value.map(|p| format!("{p:.6}")).unwrap_or_default(),
        ));
    }
    out
}

/// Negative-binomial count models for the head test-method and
/// test-class counts: full fits for the coefficient table, a reduced
/// predictive model evaluated on a held-out validation split, sequential
/// ANOVA of the predictive model, and predicted-vs-actual charts.
///
/// Refuses data with fewer observations than model parameters.
pub fn test_counts(out: &Path, seed: u64, holdout: usize) -> AppResult<()> {
    test_counts_inner(out, seed, holdout, false)
}

/// `run`-pipeline variant: a project table too small to identify the
/// count models writes a note instead of failing the whole run (desk
/// corpora have a handful of projects; the model needs more rows than
/// its seven parameters).
pub fn test_counts_lenient(out: &Path, seed: u64, holdout: usize) -> AppResult<()> {
    test_counts_inner(out, seed, holdout, true)
}

fn test_counts_inner(out: &Path, seed: u64, holdout: usize, lenient: bool) -> AppResult<()> {
    let ws = Workspace::new(out);
    let reports = reports_dir(&ws)?;
    let rows = checkpoint::read_projects_csv(&ws.dataset_dir().join("projects.csv"), "model")?;
    if rows.is_empty() {
        return crate::usage_error("projects.csv is empty; nothing to model");
    }
    const MODEL_PARAMETERS: usize = 7; // six predictors plus intercept
    let train_rows = rows.len().saturating_sub(holdout);
    if rows.len() < MODEL_PARAMETERS || train_rows < MODEL_PARAMETERS {
        let message = format!(
            "test-counts model needs more observations than parameters: \
             {} projects ({} after holdout {holdout}) vs {MODEL_PARAMETERS} parameters",
            rows.len(),
            train_rows
        );
        if lenient {
            checkpoint::write_text(
                &reports.join("test_counts_notes.txt"),
                &format!("{message}; model skipped\n"),
            )?;
            println!("model test-counts: skipped ({} projects)", rows.len());
            return Ok(());
        }
        return Err(AppError::Runtime(anyhow::anyhow!(message)));
    }
    let predictors = project_predictors(&rows)?;
    let all_terms: Vec<&str> = predictors.iter().map(|(n, _)| n.as_str()).collect();

    let mut summary_fits: Vec<(String, ModelFit)> = Vec::new();
    let mut gof_lines = String::from("metric,statistic,df,p_value,holdout,terms\n");
    for (metric, outcome) in [
        ("methods", rows.iter().map(|r| r.test_methods as f64).collect::<Vec<f64>>()),
        ("classes", rows.iter().map(|r| r.test_classes as f64).collect::<Vec<f64>>()),
    ] {
        let x_full = matrix_for(&predictors, None)?;
        let full = fit_negbin(&x_full, &outcome).map_err(|e| AppError::Runtime(e.into()))?;
        checkpoint::write_text(
            &reports.join(format!("test_counts_{metric}_coefficients.csv")),
            &coefficient_csv(&full),
        )?;

        // Predictive model: keep the strongly significant predictors;
        // fall back to the full set when nothing clears the bar.
        let mut reduced: Vec<&str> = full
            .terms
            .iter()
            .skip(1)
            .filter(|t| t.p_value < 0.01)
            .map(|t| t.name.as_str())
            .collect();
        if reduced.is_empty() {
            reduced = all_terms.clone();
        }

        let indices: Vec<usize> = (0..rows.len()).collect();
        let (train_idx, validation_idx) = split_train_validation(&indices, holdout, seed)
            .map_err(|e| AppError::Runtime(e.into()))?;
        let y_train: Vec<f64> = train_idx.iter().map(|&i| outcome[i]).collect();
        let x_train = matrix_for(&predictors, Some(&train_idx))?;

        let anova = anova_sequential(&x_train, &y_train, Family::NegBinomial, &reduced)
            .map_err(|e| AppError::Runtime(e.into()))?;
        checkpoint::write_text(
            &reports.join(format!("test_counts_{metric}_anova.csv")),
            &anova_csv(&anova),
        )?;

        if validation_idx.len() >= 2 {
            let train_fit = fit_negbin(&x_train.select(&reduced).map_err(|e| AppError::Runtime(e.into()))?, &y_train)
                .map_err(|e| AppError::Runtime(e.into()))?;
            let x_validation = matrix_for(&predictors, Some(&validation_idx))?;
            let predicted = train_fit
                .predict(&x_validation)
                .map_err(|e| AppError::Runtime(e.into()))?;
            let actual: Vec<f64> = validation_idx.iter().map(|&i| outcome[i]).collect();
            let gof = chisq_goodness_of_fit(&predicted, &actual)
                .map_err(|e| AppError::Runtime(e.into()))?;
            gof_lines.push_str(&format!(
                "{metric},{:.4},{},{:.6},{},{}\n",
                gof.statistic,
                gof.df,
                gof.p_value,
                validation_idx.len(),
                reduced.join("+"),
            ));

            let mut chart_csv = String::from("index,actual,predicted\n");
            for (i, (a, p)) in actual.iter().zip(&predicted).enumerate() {
                chart_csv.push_str(&format!("{},{a:.4},{p:.4}\n", i + 1));
            }
            checkpoint::write_text(
                &reports.join(format!("test_counts_{metric}_validation.csv")),
                &chart_csv,
            )?;
            let svg = charts::line_chart(
                &format!("Test {metric}: predicted vs. actual"),
                &[("actual", &actual, "#c0392b"), ("predicted", &predicted, "#1abc9c")],
            );
            checkpoint::write_text(
                &reports.join(format!("test_counts_{metric}_validation.svg")),
                &svg,
            )?;
        } else {
            gof_lines.push_str(&format!("{metric},,,,{},{}\n", validation_idx.len(), reduced.join("+")));
        }
        summary_fits.push((format!("Test^{metric}"), full));
    }

    let fits_ref: Vec<(&str, &ModelFit)> =
        summary_fits.iter().map(|(n, f)| (n.as_str(), f)).collect();
    checkpoint::write_text(&reports.join("test_counts_summary.txt"), &model_table(&fits_ref))?;
    checkpoint::write_text(&reports.join("test_counts_gof.csv"), &gof_lines)?;
    println!("model test-counts: fitted methods and classes over {} projects", rows.len());
    Ok(())
}

/// Change-type predictor columns (production-side counts); the
/// unclassified bucket stays out of the models by design.
fn change_type_columns(rows: &[CommitObservation]) -> (Vec<(String, Vec<f64>)>, Vec<String>) {
    let mut columns = Vec::new();
    let mut dropped = Vec::new();
    for ct in ChangeType::ALL {
        if ct == ChangeType::Unclassified {
            continue;
        }
        let values: Vec<f64> = rows
            .iter()
            .map(|r| r.change_type_counts.get(&ct).copied().unwrap_or(0) as f64)
            .collect();
        let constant = values.windows(2).all(|w| w[0] == w[1]);
        if constant {
            dropped.push(ct.as_str().to_string());
        } else {
            columns.push((ct.as_str().to_string(), values));
        }
    }
    (columns, dropped)
}

/// Chart selection: only predictors with |OR - 1| above the strength
/// threshold, at most five per direction, ordered by decreasing odds
/// ratio.
fn charted_entries(entries: &[coevo_core::stats::OddsRatioEntry]) -> Vec<&coevo_core::stats::OddsRatioEntry> {
    let mut strong: Vec<_> = entries
        .iter()
        .filter(|e| (e.point - 1.0).abs() > ODDS_STRENGTH_THRESHOLD)
        .collect();
    strong.sort_by(|a, b| b.point.partial_cmp(&a.point).unwrap());
    let positives = strong.iter().filter(|e| e.point > 1.0).take(ODDS_TOP_N).copied();
    let negatives =
        strong.iter().rev().filter(|e| e.point < 1.0).take(ODDS_TOP_N).copied();
    let mut charted: Vec<_> = positives.chain(negatives).collect();
    charted.sort_by(|a, b| b.point.partial_cmp(&a.point).unwrap());
    charted
}

struct OddsOutcome<'a> {
    stem: &'a str,
    title: &'a str,
    y: Vec<f64>,
}

fn fit_and_report_odds(
    reports: &Path,
    rows: &[CommitObservation],
    outcome: &OddsOutcome,
    notes: &mut Vec<String>,
) -> AppResult<bool> {
    let ones = outcome.y.iter().filter(|&&v| v == 1.0).count();
    if ones == 0 || ones == outcome.y.len() {
        notes.push(format!(
            "{}: outcome is constant ({} of {} true); logistic fit refused",
            outcome.stem,
            ones,
            outcome.y.len()
        ));
        return Ok(false);
    }
    let (columns, dropped) = change_type_columns(rows);
    if !dropped.is_empty() {
        notes.push(format!(
            "{}: dropped constant predictors: {}",
            outcome.stem,
            dropped.join(" ")
        ));
    }
    if columns.is_empty() {
        notes.push(format!("{}: no varying predictors; fit skipped", outcome.stem));
        return Ok(false);
    }
    // Exactly collinear predictors are aliased away (dropped with a
    // note) rather than failing the run; small corpora produce them.
    let mut columns = columns;
    let fit = loop {
        let x = matrix_for(&columns, None)?;
        match fit_logistic(&x, &outcome.y) {
            Ok(fit) => break fit,
            Err(coevo_core::stats::StatsError::SingularDesign(column)) => {
                let before = columns.len();
                columns.retain(|(name, _)| *name != column);
                if columns.is_empty() || columns.len() == before {
                    return Err(AppError::Runtime(anyhow::anyhow!(
                        "{}: singular design could not be resolved (column {column})",
                        outcome.stem
                    )));
                }
                notes.push(format!(
                    "{}: dropped collinear predictor {column}",
                    outcome.stem
                ));
            }
            Err(e) => return Err(AppError::Runtime(e.into())),
        }
    };
    checkpoint::write_text(
        &reports.join(format!("{}_coefficients.csv", outcome.stem)),
        &coefficient_csv(&fit),
    )?;
    if !fit.converged {
        notes.push(format!(
            "{}: fit not converged ({}); odds ratios skipped",
            outcome.stem,
            fit.diagnostic.clone().unwrap_or_default()
        ));
        return Ok(false);
    }

    let report = odds_ratios(&fit).map_err(|e| AppError::Runtime(e.into()))?;
    let mut full_csv = String::from("term,odds_ratio,ci_low,ci_high\n");
    for entry in &report.entries {
        full_csv.push_str(&format!(
            "{},{:.6},{:.6},{:.6}\n",
            entry.term, entry.point, entry.ci_low, entry.ci_high
        ));
    }
    checkpoint::write_text(&reports.join(format!("{}_odds.csv", outcome.stem)), &full_csv)?;

    let charted = charted_entries(&report.entries);
    let mut chart_csv = String::from("term,odds_ratio,ci_low,ci_high\n");
    let chart_entries: Vec<(String, f64, f64, f64)> = charted
        .iter()
        .map(|e| {
            chart_csv.push_str(&format!(
                "{},{:.6},{:.6},{:.6}\n",
                e.term, e.point, e.ci_low, e.ci_high
            ));
            (e.term.clone(), e.point, e.ci_low, e.ci_high)
        })
        .collect();
    checkpoint::write_text(&reports.join(format!("{}_chart.csv", outcome.stem)), &chart_csv)?;
    checkpoint::write_text(
        &reports.join(format!("{}_chart.svg", outcome.stem)),
        &charts::odds_ratio_bars(outcome.title, &chart_entries),
    )?;
    Ok(true)
}

/// Logistic model for HasTestMaintenance against production change-type
/// counts, with the odds-ratio report and chart.
pub fn has_maintenance(out: &Path) -> AppResult<()> {
    let ws = Workspace::new(out);
    let reports = reports_dir(&ws)?;
    let rows =
        checkpoint::read_commit_observations_csv(&ws.dataset_dir().join("commits.csv"), "model")?;
    let y: Vec<f64> =
        rows.iter().map(|r| if has_test_maintenance(&r.profile) { 1.0 } else { 0.0 }).collect();
    let ones = y.iter().filter(|&&v| v == 1.0).count();
    if ones == 0 || ones == y.len() {
        return Err(AppError::Runtime(anyhow::anyhow!(
            "HasTestMaintenance is constant over the dataset ({ones} of {} true); \
             a logistic fit is meaningless",
            y.len()
        )));
    }
    let mut notes = Vec::new();
    let outcome = OddsOutcome { stem: "has_maintenance", title: "Odds ratios: HasTestMaintenance", y };
    let fitted = fit_and_report_odds(&reports, &rows, &outcome, &mut notes)?;
    if !notes.is_empty() {
        checkpoint::write_text(
            &reports.join("has_maintenance_notes.txt"),
            &(notes.join("\n") + "\n"),
        )?;
    }
    println!(
        "model has-maintenance: {} commits, odds report {}",
        rows.len(),
        if fitted { "written" } else { "skipped (see notes)" }
    );
    Ok(())
}

/// Six logistic models, one per binarized test-activity metric.
pub fn activity_odds(out: &Path) -> AppResult<()> {
    let ws = Workspace::new(out);
    let reports = reports_dir(&ws)?;
    let rows =
        checkpoint::read_commit_observations_csv(&ws.dataset_dir().join("commits.csv"), "model")?;
    let metrics: [(&str, &str, fn(&CommitObservation) -> u32); 6] = [
        ("activity_odds_method_added", "Odds ratios: test methods added", |r| r.profile.method_added),
        ("activity_odds_method_removed", "Odds ratios: test methods removed", |r| r.profile.method_removed),
        ("activity_odds_method_updated", "Odds ratios: test methods updated", |r| r.profile.method_updated),
        ("activity_odds_class_added", "Odds ratios: test classes added", |r| r.profile.class_added),
        ("activity_odds_class_removed", "Odds ratios: test classes removed", |r| r.profile.class_removed),
        ("activity_odds_class_updated", "Odds ratios: test classes updated", |r| r.profile.class_updated),
    ];
    let mut notes = Vec::new();
    let mut written = 0;
    for (stem, title, select) in metrics {
        let y: Vec<f64> = rows.iter().map(|r| if select(r) > 0 { 1.0 } else { 0.0 }).collect();
        let outcome = OddsOutcome { stem, title, y };
        if fit_and_report_odds(&reports, &rows, &outcome, &mut notes)? {
            written += 1;
        }
    }
    if !notes.is_empty() {
        checkpoint::write_text(
            &reports.join("activity_odds_notes.txt"),
            &(notes.join("\n") + "\n"),
        )?;
    }
    println!("model activity-odds: {written}/6 outcomes fitted over {} commits", rows.len());
    Ok(())
}
