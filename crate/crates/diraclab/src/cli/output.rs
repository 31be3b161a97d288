//! File writers: the frozen diagnostics CSV, JSON record dumps, run
//! manifests, and plain-text curve exports.
//!
//! Every writer builds the full byte string first and writes it in one call,
//! and every number is printed with `{}` — the shortest representation that
//! round-trips — so a repeated run produces bit-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::CliError;
use crate::diagnostics::DiagnosticsRecord;
use crate::filament::Curve3;

/// The diagnostics CSV header. Column order is part of the interface and
/// matches the field order of [`DiagnosticsRecord`].
pub const CSV_HEADER: &str = "step,t,mass,grad_l2,potential_l2,energy,\
cum_dissipation,energy_residual,mass_residual,boundary_contamination";

/// Write the run ledger as CSV under the frozen header.
pub fn write_csv(path: &Path, records: &[DiagnosticsRecord]) -> Result<(), CliError> {
    let mut text = String::with_capacity(32 + records.len() * 192);
    text.push_str(CSV_HEADER);
    text.push('\n');
    for r in records {
        writeln!(
            text,
            "{},{},{},{},{},{},{},{},{},{}",
            r.step,
            r.t,
            r.mass,
            r.grad_l2,
            r.potential_l2,
            r.energy,
            r.cum_dissipation,
            r.energy_residual,
            r.mass_residual,
            r.boundary_contamination,
        )
        .expect("string formatting is infallible");
    }
    fs::write(path, text)?;
    Ok(())
}

/// Write the run ledger as a pretty-printed JSON array (the `json` output
/// format).
pub fn write_json_records(path: &Path, records: &[DiagnosticsRecord]) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(records).expect("records serialize");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Write a run manifest (or any other summary document) as pretty JSON.
pub fn write_manifest<T: Serialize>(path: &Path, manifest: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Export a reconstructed curve as plain text: comment lines carrying the
/// frame time and column names, then one `x y z` row per node.
pub fn write_curve(path: &Path, curve: &Curve3) -> Result<(), CliError> {
    let points = curve.points();
    let mut text = String::with_capacity(64 + points.len() * 72);
    writeln!(text, "# time {}", curve.time()).expect("string formatting is infallible");
    text.push_str("# columns: x y z\n");
    for p in points {
        writeln!(text, "{} {} {}", p[0], p[1], p[2]).expect("string formatting is infallible");
    }
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filament::{reconstruct_curve, CurvatureTorsion, Frame3, MetricSign};

    fn sample_records() -> Vec<DiagnosticsRecord> {
        vec![DiagnosticsRecord {
            step: 0,
            t: 1.0,
            mass: 0.125,
            grad_l2: 0.5,
            potential_l2: 0.25,
            energy: 0.3125,
            cum_dissipation: 0.0,
            energy_residual: 1e-17,
            mass_residual: 0.0,
            boundary_contamination: 1e-30,
        }]
    }

    #[test]
    fn csv_output_is_deterministic_and_carries_the_frozen_header() {
        let dir = std::env::temp_dir().join("diraclab-output-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ledger.csv");
        let records = sample_records();
        write_csv(&path, &records).unwrap();
        let first = std::fs::read(&path).unwrap();
        write_csv(&path, &records).unwrap();
        let second = std::fs::read(&path).unwrap();
        assert_eq!(first, second);
        let text = String::from_utf8(first).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(
            lines.next(),
            Some("0,1,0.125,0.5,0.25,0.3125,0,0.00000000000000001,0,0.000000000000000000000000000001")
        );
    }

    #[test]
    fn json_records_round_trip_the_field_names() {
        let dir = std::env::temp_dir().join("diraclab-output-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ledger.json");
        write_json_records(&path, &sample_records()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        let row = &parsed.as_array().unwrap()[0];
        for key in CSV_HEADER.split(',') {
            assert!(row.get(key).is_some(), "missing column {key}");
        }
    }

    #[test]
    fn curve_export_lists_every_node() {
        let grid = crate::solver::SpatialGrid::new(16, 0.5).unwrap();
        let n = grid.n();
        let ct = CurvatureTorsion::new(grid, vec![0.0; n], vec![0.0; n]).unwrap();
        let curve = reconstruct_curve(
            &ct,
            MetricSign::Euclidean,
            &Frame3::standard(MetricSign::Euclidean),
            [0.0, 0.0, 0.0],
        )
        .unwrap();
        let dir = std::env::temp_dir().join("diraclab-output-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("curve.txt");
        write_curve(&path, &curve).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body.len(), n + 1);
        // Straight line along the seed tangent: the backward endpoint sits at
        // arclength -L from the center node where integration starts.
        assert_eq!(body[0], "0 0 -0.5");
    }
}
