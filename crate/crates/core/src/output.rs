//! CSV serialization of densities, Ulam matrices and experiment rows, and
//! atomic file writes.
//!
//! Floats are written in scientific notation with 17 significant digits, so
//! parsing a field back yields the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::density::{PiecewisePolyDensity, SparseMatrix};
use crate::error::Result;
use crate::experiments::{LyRow, OrbitStats, SweepRow, TestFunction};
use crate::maps::NormConvention;

/// `v` with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn join(fields: impl IntoIterator<Item = String>) -> String {
    fields.into_iter().collect::<Vec<_>>().join(",")
}

/// One row per cell; vertex columns run to the largest cell.
pub fn density_csv(f: &PiecewisePolyDensity) -> String {
    let max_vertices = f.cells().iter().map(|c| c.polygon.len()).max().unwrap_or(0);
    let mut out = String::from("cell_id,area,centroid_x,centroid_y,value,n_vertices");
    for k in 0..max_vertices {
        let _ = write!(out, ",v{k}x,v{k}y");
    }
    out.push('\n');
    for (i, c) in f.cells().iter().enumerate() {
        let p = &c.polygon;
        let centroid = p.centroid();
        let mut fields = vec![
            i.to_string(),
            fmt_f64(p.area()),
            fmt_f64(centroid.x),
            fmt_f64(centroid.y),
            fmt_f64(c.value),
            p.len().to_string(),
        ];
        for v in p.vertices() {
            fields.push(fmt_f64(v.x));
            fields.push(fmt_f64(v.y));
        }
        out.push_str(&join(fields));
        out.push('\n');
    }
    out
}

/// `i,j,weight` for every stored entry.
pub fn matrix_csv(m: &SparseMatrix) -> String {
    let mut out = String::from("i,j,weight\n");
    for (i, j, w) in m.triples() {
        let _ = writeln!(out, "{i},{j},{}", fmt_f64(w));
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("t,t0,power,resolution,iterations,residual,l1_dist");
    for f in TestFunction::ALL {
        let _ = write!(out, ",gap_{f}");
    }
    out.push('\n');
    for r in rows {
        let mut fields = vec![
            fmt_f64(r.t),
            fmt_f64(r.t0),
            r.power.to_string(),
            r.resolution.to_string(),
            r.iterations.to_string(),
            fmt_f64(r.residual),
            fmt_f64(r.l1_dist),
        ];
        fields.extend(r.weakstar_gaps.iter().map(|&g| fmt_f64(g)));
        out.push_str(&join(fields));
        out.push('\n');
    }
    out
}

pub fn ly_csv(t: f64, convention: NormConvention, rows: &[LyRow]) -> String {
    let mut out = String::from("t,convention,j,variation_j,bound,ratio\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(t),
            convention.as_str(),
            r.j,
            fmt_f64(r.variation_j),
            fmt_f64(r.bound),
            fmt_f64(r.ratio)
        );
    }
    out
}

/// Birkhoff columns follow the test functions of the first row.
pub fn orbit_csv(rows: &[OrbitStats]) -> String {
    let mut out = String::from("t,seed,n,lyapunov");
    if let Some(first) = rows.first() {
        for (f, _) in &first.birkhoff {
            let _ = write!(out, ",birkhoff_{f}");
        }
    }
    out.push('\n');
    for r in rows {
        let mut fields = vec![
            fmt_f64(r.t),
            r.seed.to_string(),
            r.n.to_string(),
            fmt_f64(r.lyapunov),
        ];
        fields.extend(r.birkhoff.iter().map(|&(_, b)| fmt_f64(b)));
        out.push_str(&join(fields));
        out.push('\n');
    }
    out
}

/// Writes `contents` to a temporary sibling of `path`, then renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}
