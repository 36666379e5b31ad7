//! Plot-ready delimited text, one recipe per figure panel.
//!
//! Each recipe writes `<recipe>.csv`, with a header of `name [unit]` cells and
//! values at 17 significant digits, and `<recipe>.meta.json` holding the
//! dataset metadata (fit parameters, windows, tolerances).

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::archive::{Column, Dataset, ResultArchive};
use crate::error::{LabError, Result};

pub struct Recipe {
    pub name: &'static str,
    pub dataset: &'static str,
    /// Columns in output order; empty means all.
    pub columns: &'static [&'static str],
}

pub const RECIPES: &[Recipe] = &[
    Recipe { name: "fig1a", dataset: "chaos_map", columns: &["epsilon", "gamma", "fraction"] },
    Recipe { name: "fig1b", dataset: "r_map", columns: &["epsilon", "gamma", "mean_ratio"] },
    Recipe { name: "fig2a", dataset: "peres", columns: &["epsilon", "n_over_j"] },
    Recipe { name: "fig2b", dataset: "peres", columns: &["epsilon", "n_ex_over_j"] },
    Recipe { name: "fig2c", dataset: "delta_mic", columns: &[] },
    Recipe { name: "fig3a", dataset: "diagonal_n", columns: &["centered"] },
    Recipe { name: "fig3b", dataset: "diagonal_n_ex", columns: &["centered"] },
    Recipe { name: "fig3c", dataset: "offdiagonal_n", columns: &["element"] },
    Recipe { name: "fig3d", dataset: "offdiagonal_n_ex", columns: &["element"] },
    Recipe { name: "fig4", dataset: "entropy", columns: &["epsilon", "exp_s_en_scaled"] },
    Recipe { name: "fig4-tc", dataset: "tc_entropy", columns: &["epsilon", "exp_s_en_scaled"] },
    Recipe { name: "fig5", dataset: "entropy_fluctuations", columns: &[] },
    Recipe { name: "fig6", dataset: "entropy", columns: &["epsilon", "s_sh_fock_scaled"] },
    Recipe { name: "fig7", dataset: "entropy", columns: &["epsilon", "s_sh_eff_scaled"] },
    Recipe { name: "dos", dataset: "dos", columns: &[] },
    Recipe { name: "spectrum", dataset: "spectrum", columns: &[] },
];

pub fn recipe(name: &str) -> Option<&'static Recipe> {
    RECIPES.iter().find(|r| r.name == name)
}

/// Recipes whose dataset is present in `archive`.
pub fn applicable(archive: &ResultArchive) -> Vec<&'static Recipe> {
    RECIPES
        .iter()
        .filter(|r| {
            archive
                .dataset(r.dataset)
                .is_some_and(|d| r.columns.iter().all(|c| d.column(c).is_some()))
        })
        .collect()
}

fn header_cell(c: &Column) -> String {
    format!("{} [{}]", c.name, c.unit)
}

fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Serialize)]
struct SidecarMeta<'a> {
    recipe: &'a str,
    dataset: &'a str,
    pipeline: &'a str,
    config_hash: &'a str,
    meta: &'a std::collections::BTreeMap<String, serde_json::Value>,
}

/// Writes one recipe into `dir`; returns the CSV path.
pub fn export_plot_data(archive: &ResultArchive, recipe: &Recipe, dir: &Path) -> Result<PathBuf> {
    let missing = |what: &str| LabError::Recipe {
        recipe: recipe.name.into(),
        missing: what.into(),
        available: archive.datasets.keys().cloned().collect::<Vec<_>>().join(", "),
    };
    let data = archive.dataset(recipe.dataset).ok_or_else(|| missing(recipe.dataset))?;
    let columns: Vec<&Column> = if recipe.columns.is_empty() {
        data.columns.iter().collect()
    } else {
        recipe
            .columns
            .iter()
            .map(|c| data.column(c).ok_or_else(|| missing(&format!("{}.{c}", recipe.dataset))))
            .collect::<Result<_>>()?
    };
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let path = dir.join(format!("{}.csv", recipe.name));
    let mut w = csv::Writer::from_path(&path).map_err(|e| LabError::io(&path, e.into()))?;
    let io = |e: csv::Error| LabError::io(&path, e.into());
    w.write_record(columns.iter().map(|c| header_cell(c))).map_err(io)?;
    for row in 0..data.rows() {
        w.write_record(columns.iter().map(|c| format_value(c.values[row]))).map_err(io)?;
    }
    w.flush().map_err(|e| LabError::io(&path, e))?;
    let meta_path = dir.join(format!("{}.meta.json", recipe.name));
    let meta = SidecarMeta {
        recipe: recipe.name,
        dataset: recipe.dataset,
        pipeline: &archive.metadata.pipeline,
        config_hash: &archive.metadata.config_hash,
        meta: &data.meta,
    };
    let text = serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n";
    std::fs::write(&meta_path, text).map_err(|e| LabError::io(&meta_path, e))?;
    Ok(path)
}

/// Reads an exported CSV back into columns.
pub fn read_plot_data(path: &Path) -> Result<Dataset> {
    let mut r = csv::Reader::from_path(path).map_err(|e| LabError::io(path, e.into()))?;
    let bad = |msg: String| LabError::config(path.display().to_string(), msg);
    let headers = r.headers().map_err(|e| LabError::io(path, e.into()))?.clone();
    let mut columns: Vec<Column> = headers
        .iter()
        .map(|h| {
            let (name, unit) = h
                .strip_suffix(']')
                .and_then(|s| s.split_once(" ["))
                .ok_or_else(|| bad(format!("header cell `{h}` lacks a unit")))?;
            Ok(Column::new(name, unit, Vec::new()))
        })
        .collect::<Result<_>>()?;
    for record in r.records() {
        let record = record.map_err(|e| LabError::io(path, e.into()))?;
        for (c, cell) in columns.iter_mut().zip(record.iter()) {
            c.values.push(cell.parse().map_err(|_| bad(format!("bad number `{cell}`")))?);
        }
    }
    Ok(Dataset::new(columns))
}
