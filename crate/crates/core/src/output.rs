//! CSV and JSON emission. All numbers print with 17 significant digits so a
//! parsed value is bit-identical to the computed one.

use std::io::{self, Write};

use crate::ensemble::{CorrelationCurve, IntensitySummary};
use crate::oracle::DeviationReport;

/// Round-trip exact float formatting (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a sweep as `tau,delta_tau,r_raw,r_norm` rows (ascending τ), with
/// one extra `trace_<j>` column per kept per-pair trace.
pub fn write_sweep_csv<W: Write>(
    w: &mut W,
    curve: &CorrelationCurve,
    bandwidth: f64,
    traces: Option<&[Vec<f64>]>,
) -> io::Result<()> {
    let mut header = String::from("tau,delta_tau,r_raw,r_norm");
    if let Some(rows) = traces {
        for j in 0..rows.len() {
            header.push_str(&format!(",trace_{j}"));
        }
    }
    writeln!(w, "{header}")?;

    for k in 0..curve.tau_grid.len() {
        let tau = curve.tau_grid[k];
        let mut line = format!(
            "{},{},{},{}",
            fmt_f64(tau),
            fmt_f64(bandwidth * tau),
            fmt_f64(curve.r_raw[k]),
            fmt_f64(curve.r_norm[k])
        );
        if let Some(rows) = traces {
            for row in rows {
                line.push(',');
                line.push_str(&fmt_f64(row[k]));
            }
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Writes the `mean_ic,mean_id` summary.
pub fn write_intensities_csv<W: Write>(w: &mut W, summary: &IntensitySummary) -> io::Result<()> {
    writeln!(w, "mean_ic,mean_id")?;
    writeln!(w, "{},{}", fmt_f64(summary.mean_ic), fmt_f64(summary.mean_id))
}

/// Renders a deviation report as a single JSON object.
pub fn compare_report_json(report: &DeviationReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Convention;

    #[test]
    fn formatted_floats_round_trip() {
        for x in [0.0, 1.0, -1.0, 0.5, 2.0 / 3.0, 1.2345678901234567e-13, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn sweep_csv_layout() {
        let curve = CorrelationCurve {
            tau_grid: vec![-1.0e-12, 0.0, 1.0e-12],
            r_raw: vec![0.25, 0.0, 0.25],
            r_norm: vec![0.5, 0.0, 0.5],
            per_pair: None,
        };
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &curve, 1.0e12, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "tau,delta_tau,r_raw,r_norm");
        let expect = format!("{},{},", fmt_f64(-1.0e-12), fmt_f64(1.0e12 * -1.0e-12));
        assert!(lines[1].starts_with(&expect), "{}", lines[1]);
        assert!(text.ends_with('\n'));
        assert!(!text.contains(",\n"));
    }

    #[test]
    fn sweep_csv_with_trace_columns() {
        let curve = CorrelationCurve {
            tau_grid: vec![0.0, 1.0e-12],
            r_raw: vec![0.0, 0.1],
            r_norm: vec![0.0, 0.2],
            per_pair: None,
        };
        let traces = vec![vec![0.0, 2.0], vec![0.0, 1.5]];
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &curve, 1.0e12, Some(&traces)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "tau,delta_tau,r_raw,r_norm,trace_0,trace_1");
        assert_eq!(lines[1].split(',').count(), 6);
    }

    #[test]
    fn intensities_csv_layout() {
        let mut buf = Vec::new();
        write_intensities_csv(&mut buf, &IntensitySummary { mean_ic: 1.0, mean_id: 1.0 }).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "mean_ic,mean_id\n1.0000000000000000e0,1.0000000000000000e0\n");
    }

    #[test]
    fn compare_report_shape() {
        let report = DeviationReport {
            max_abs_dev: 1.0e-15,
            rms_dev: 2.0e-16,
            n_samples: 12,
            convention: Convention::SinglePhase,
        };
        let json = compare_report_json(&report);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["max_abs_dev"], 1.0e-15);
        assert_eq!(value["rms_dev"], 2.0e-16);
        assert_eq!(value["n_samples"], 12);
        assert_eq!(value["convention"], "eq8");
        assert!(json.ends_with('\n'));
    }
}
