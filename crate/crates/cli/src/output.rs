//! CSV/JSON emission. Floats are written with 17 significant digits so that
//! parsing them back reproduces the exact bit pattern, and files are staged
//! through a rename so readers never observe a half-written artifact.

use std::fs;
use std::path::{Path, PathBuf};

use searchlight_core::domain::{Allocation, SearchSpace};
use searchlight_core::evaluator::DetectionCurve;

use crate::error::CliError;

/// Round-trip exact float formatting.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write `bytes` to `path` via a sibling temp file + rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.to_path_buf();
    let mut file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    file_name.push_str(".tmp");
    tmp.set_file_name(file_name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Detection-curve CSV: `t,P_subjective,P_true[,P_subjective_alt,P_true_alt]`.
pub fn curves_csv(
    t_grid: &[f64],
    subjective: &DetectionCurve,
    true_prob: &DetectionCurve,
    alt: Option<(&DetectionCurve, &DetectionCurve)>,
) -> String {
    let mut out = String::from("t,P_subjective,P_true");
    if alt.is_some() {
        out.push_str(",P_subjective_alt,P_true_alt");
    }
    out.push('\n');
    for (i, &t) in t_grid.iter().enumerate() {
        out.push_str(&fmt_float(t));
        out.push(',');
        out.push_str(&fmt_float(subjective.values()[i]));
        out.push(',');
        out.push_str(&fmt_float(true_prob.values()[i]));
        if let Some((subj_alt, true_alt)) = alt {
            out.push(',');
            out.push_str(&fmt_float(subj_alt.values()[i]));
            out.push(',');
            out.push_str(&fmt_float(true_alt.values()[i]));
        }
        out.push('\n');
    }
    out
}

/// Two-strategy comparison CSV of true detection probabilities.
pub fn compare_csv(
    t_grid: &[f64],
    optimal_true: &DetectionCurve,
    composite_true: &DetectionCurve,
    difference: &[f64],
) -> String {
    let mut out = String::from("t,P_true_optimal,P_true_composite,difference\n");
    for (i, &t) in t_grid.iter().enumerate() {
        out.push_str(&fmt_float(t));
        out.push(',');
        out.push_str(&fmt_float(optimal_true.values()[i]));
        out.push(',');
        out.push_str(&fmt_float(composite_true.values()[i]));
        out.push(',');
        out.push_str(&fmt_float(difference[i]));
        out.push('\n');
    }
    out
}

/// Allocation snapshots in long format; zero-effort cells are omitted.
/// `effort` is an amount on discrete spaces and a density on grids.
pub fn plan_csv(space: &SearchSpace, snapshots: &[(f64, Allocation)]) -> String {
    let mut out = String::from("t,cell,x1,x2,effort\n");
    for (t, alloc) in snapshots {
        for cell in 0..space.cells() {
            let y = alloc.value(cell);
            if y <= 0.0 {
                continue;
            }
            let c = space.center(cell);
            out.push_str(&fmt_float(*t));
            out.push(',');
            out.push_str(&cell.to_string());
            out.push(',');
            out.push_str(&fmt_float(c[0]));
            out.push(',');
            out.push_str(&fmt_float(c[1]));
            out.push(',');
            out.push_str(&fmt_float(y));
            out.push('\n');
        }
    }
    out
}

/// `<dir>/<stem>_<kind>.<ext>`
pub fn artifact_path(dir: &Path, stem: &str, kind: &str, ext: &str) -> PathBuf {
    dir.join(format!("{stem}_{kind}.{ext}"))
}
