//! CSV and text rendering, atomic file output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use gksl_core::bloch::to_bloch;
use gksl_core::dynamics::Trajectory;
use gksl_core::liealg::{standard_basis, ComplexMatrix};
use gksl_core::Result;

/// Columns `t, r_1..r_{n²−1}, purity, trace_err, min_eig[, z]`.
pub fn trajectory_csv(traj: &Trajectory, n: usize) -> Result<String> {
    let basis = standard_basis(n)?;
    let contact = traj.diagnostics.first().is_some_and(|d| d.contact_z.is_some());
    let mut out = String::from("t");
    for a in 1..=basis.len() {
        write!(out, ",r_{a}").unwrap();
    }
    out.push_str(",purity,trace_err,min_eig");
    if contact {
        out.push_str(",z");
    }
    out.push('\n');
    for ((t, rho), d) in traj.times.iter().zip(&traj.states).zip(&traj.diagnostics) {
        write!(out, "{t:.16e}").unwrap();
        for r in to_bloch(rho, &basis)?.components() {
            write!(out, ",{r:.16e}").unwrap();
        }
        write!(out, ",{:.16e},{:.16e},{:.16e}", d.purity, d.trace_error, d.min_eigenvalue).unwrap();
        if let Some(z) = d.contact_z {
            write!(out, ",{z:.16e}").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// One row per line, entries as `re+imi`.
pub fn matrix_text(m: &ComplexMatrix, indent: &str) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|z| format!("{:+.4}{:+.4}i", z.re, z.im)).collect();
        writeln!(out, "{indent}[{}]", cells.join(", ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use gksl_core::dynamics::{simulate, Generator, SimulationConfig};
    use gksl_core::liealg::{DensityMatrix, HermitianOperator};

    #[test]
    fn csv_shape() {
        let g = Generator::gksl(HermitianOperator::zeros(3), vec![]).unwrap();
        let cfg = SimulationConfig::new(0.01, 1e-3, 5).unwrap();
        let traj = simulate(&DensityMatrix::maximally_mixed(3), &g, &cfg).unwrap();
        let csv = trajectory_csv(&traj, 3).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,r_1,r_2,r_3,r_4,r_5,r_6,r_7,r_8,purity,trace_err,min_eig");
        assert_eq!(lines.len(), 1 + traj.len());
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 12));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn matrix_rendering() {
        let m = ComplexMatrix::identity(2);
        assert_eq!(matrix_text(&m, ""), "[+1.0000+0.0000i, +0.0000+0.0000i]\n[+0.0000+0.0000i, +1.0000+0.0000i]\n");
    }
}
