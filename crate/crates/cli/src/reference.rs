//! Reference Choi-trajectory files: a CSV with one row per time point
//! carrying t followed by the re/im pairs of the matrix entries, row-major.
//! A physical Choi operator is itself a unit-trace PSD matrix on the doubled
//! space, so each row is validated like a density matrix.

use std::path::Path;

use choireg::choi::ChoiOperator;
use choireg::diagnostics::TrajectoryRecord;
use choireg::linalg::{CMat, C64, HermitianMatrix};

/// Result of loading a reference file: the trajectory plus any validation
/// warnings (unit-trace or positivity violations beyond 1e-6).
#[derive(Debug)]
pub struct LoadedReference {
    pub record: TrajectoryRecord,
    pub warnings: Vec<String>,
}

pub fn load_reference_trajectory(path: &Path) -> Result<LoadedReference, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read reference {}: {e}", path.display()))?;
    let mut grid = Vec::new();
    let mut chois = Vec::new();
    let mut warnings = Vec::new();
    let mut expected_cols: Option<usize> = None;

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if lineno == 0 && line.starts_with('t') {
            continue; // header
        }
        let fields: Vec<&str> = line.split(',').collect();
        let cols = fields.len();
        if let Some(expected) = expected_cols {
            if cols != expected {
                return Err(format!(
                    "{}:{}: expected {} fields, found {}",
                    path.display(),
                    lineno + 1,
                    expected,
                    cols
                ));
            }
        } else {
            if cols < 3 || !(cols - 1).is_multiple_of(2) {
                return Err(format!(
                    "{}:{}: a row is t followed by re/im pairs, found {} fields",
                    path.display(),
                    lineno + 1,
                    cols
                ));
            }
            let entries = (cols - 1) / 2;
            let side = (entries as f64).sqrt().round() as usize;
            if side * side != entries {
                return Err(format!(
                    "{}:{}: {} entries do not form a square matrix",
                    path.display(),
                    lineno + 1,
                    entries
                ));
            }
            let dim = (side as f64).sqrt().round() as usize;
            if dim * dim != side {
                return Err(format!(
                    "{}:{}: matrix side {} is not a squared dimension, so the rows \
                     cannot be Choi operators",
                    path.display(),
                    lineno + 1,
                    side
                ));
            }
            expected_cols = Some(cols);
        }

        let parse = |s: &str, field: usize| -> Result<f64, String> {
            s.trim().parse::<f64>().map_err(|e| {
                format!("{}:{}: field {}: {e}", path.display(), lineno + 1, field + 1)
            })
        };
        let t = parse(fields[0], 0)?;
        let entries = (cols - 1) / 2;
        let side = (entries as f64).sqrt().round() as usize;
        let mut m = CMat::zeros(side, side);
        for k in 0..entries {
            let re = parse(fields[1 + 2 * k], 1 + 2 * k)?;
            let im = parse(fields[2 + 2 * k], 2 + 2 * k)?;
            m[(k / side, k % side)] = C64::new(re, im);
        }
        let (herm, deviation) = HermitianMatrix::symmetrize(m);
        if deviation > 1e-6 {
            warnings.push(format!(
                "row {}: hermiticity deviation {deviation:.3e}",
                lineno + 1
            ));
        }
        let trace = herm.matrix().trace();
        if (trace - C64::new(1.0, 0.0)).norm() > 1e-6 {
            warnings.push(format!("row {}: trace {} is not 1", lineno + 1, trace.re));
        }
        let min_eig = herm.eigs().min_eigenvalue();
        if min_eig < -1e-6 {
            warnings.push(format!(
                "row {}: negative eigenvalue {min_eig:.3e}",
                lineno + 1
            ));
        }
        let dim = (side as f64).sqrt().round() as usize;
        grid.push(t);
        chois.push(
            ChoiOperator::new(dim, herm.into_matrix())
                .map_err(|e| format!("{}:{}: {e}", path.display(), lineno + 1))?,
        );
    }

    if grid.is_empty() {
        return Err(format!("{}: no data rows", path.display()));
    }
    let record = TrajectoryRecord::new(grid, chois, "reference").map_err(|e| e.to_string())?;
    Ok(LoadedReference { record, warnings })
}

pub fn save_reference_trajectory(path: &Path, record: &TrajectoryRecord) -> Result<(), String> {
    let mut out = String::new();
    let side = match record.chois.first() {
        Some(p) => p.dim() * p.dim(),
        None => return Err("cannot save an empty trajectory".into()),
    };
    out.push('t');
    for i in 0..side {
        for j in 0..side {
            out.push_str(&format!(",re_{i}_{j},im_{i}_{j}"));
        }
    }
    out.push('\n');
    for (t, p) in record.grid.iter().zip(&record.chois) {
        out.push_str(&format!("{t}"));
        for i in 0..side {
            for j in 0..side {
                let z = p.matrix()[(i, j)];
                out.push_str(&format!(",{},{}", z.re, z.im));
            }
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| format!("cannot write {}: {e}", path.display()))
}
