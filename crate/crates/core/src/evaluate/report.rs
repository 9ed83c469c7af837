//! Report files: one JSON document with everything, plus flat TSV views and
//! per-cell confusion tables for quick reading and diffing.
//!
//! Layout under the output directory:
//!
//! ```text
//! report.json            full structured report
//! summary.tsv            one line per cell: pooled and fold-mean macro F
//! per_class.tsv          precision/recall/F1 per cell, scope and class
//! confusion/<cell>.tsv   pooled confusion matrix of each cell
//! feature_schema.json    feature column names per cell
//! ```
//!
//! All writers emit identical bytes for identical reports: maps are ordered,
//! floats in the TSV views are fixed to four decimals, `report.json` keeps
//! full precision.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::evaluate::experiment::ExperimentReport;

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

fn summary_tsv(report: &ExperimentReport) -> String {
    let mut out = String::from("cell\tsensors\ttask\tpooled_macro_f\tfold_mean_macro_f\tn_instances\n");
    for (key, cell) in &report.cells {
        out.push_str(&format!(
            "{key}\t{}\t{}\t{:.4}\t{:.4}\t{}\n",
            cell.sensors, cell.task, cell.pooled.macro_f, cell.fold_mean_macro_f,
            cell.pooled.n_instances
        ));
    }
    out
}

fn per_class_tsv(report: &ExperimentReport) -> String {
    let mut out = String::from("cell\tscope\tclass\tprecision\trecall\tf1\tsupport\n");
    for (key, cell) in &report.cells {
        let scopes = std::iter::once(("pooled".to_string(), &cell.pooled))
            .chain(cell.folds.iter().map(|(k, b)| (k.clone(), b)));
        for (scope, block) in scopes {
            for (class, scores) in cell.classes.iter().zip(&block.per_class) {
                out.push_str(&format!(
                    "{key}\t{scope}\t{class}\t{:.4}\t{:.4}\t{:.4}\t{}\n",
                    scores.precision, scores.recall, scores.f1, scores.support
                ));
            }
        }
    }
    out
}

fn confusion_tsv(classes: &[String], matrix: &[Vec<usize>]) -> String {
    let mut out = String::from("truth\\prediction");
    for class in classes {
        out.push('\t');
        out.push_str(class);
    }
    out.push('\n');
    for (class, row) in classes.iter().zip(matrix) {
        out.push_str(class);
        for &n in row {
            out.push_str(&format!("\t{n}"));
        }
        out.push('\n');
    }
    out
}

fn feature_schema_json(report: &ExperimentReport) -> Result<String> {
    let cells: std::collections::BTreeMap<&String, &Vec<String>> = report
        .cells
        .iter()
        .map(|(key, cell)| (key, &cell.feature_names))
        .collect();
    let doc = serde_json::json!({
        "version": report.version,
        "cells": cells,
    });
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::config(format!("cannot serialize feature schema: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Writes every report file under `dir`, creating directories as needed.
pub fn write_report(dir: &Path, report: &ExperimentReport) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let confusion_dir = dir.join("confusion");
    fs::create_dir_all(&confusion_dir)
        .map_err(|e| Error::io(confusion_dir.display().to_string(), e))?;

    let mut json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::config(format!("cannot serialize report: {e}")))?;
    json.push('\n');
    write_text(&dir.join("report.json"), &json)?;
    write_text(&dir.join("summary.tsv"), &summary_tsv(report))?;
    write_text(&dir.join("per_class.tsv"), &per_class_tsv(report))?;
    write_text(&dir.join("feature_schema.json"), &feature_schema_json(report)?)?;
    for (key, cell) in &report.cells {
        write_text(
            &confusion_dir.join(format!("{key}.tsv")),
            &confusion_tsv(&cell.classes, &cell.pooled.confusion),
        )?;
    }
    Ok(())
}

/// Reads back a `report.json` written by [`write_report`].
pub fn load_report(path: &Path) -> Result<ExperimentReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: e.line(),
        message: e.to_string(),
    })
}
