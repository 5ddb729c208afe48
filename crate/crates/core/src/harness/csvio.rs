//! CSV persistence for experiment results.
//!
//! The schema is fixed:
//!
//! ```text
//! process,estimator,n,m,replicates,metric,value,stderr,seed
//! ```
//!
//! Fields containing commas or quotes are quoted RFC-4180 style. Floats are
//! printed with Rust's shortest round-trip formatting, so identical results
//! serialize to identical bytes.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

use super::experiment::ExperimentResult;

/// Exact header line of every result CSV.
pub const CSV_HEADER: &str = "process,estimator,n,m,replicates,metric,value,stderr,seed";

fn escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Write `result` as CSV. An empty result produces the header only.
pub fn write_csv<W: Write>(result: &ExperimentResult, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for row in &result.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            escape(&result.process_id),
            escape(&result.estimator_id),
            row.n,
            row.m,
            result.replicates,
            escape(&result.metric_id),
            row.value,
            row.stderr,
            result.seed
        )?;
    }
    Ok(())
}

/// Render the CSV in memory.
pub fn csv_string(result: &ExperimentResult) -> String {
    let mut buf = Vec::new();
    write_csv(result, &mut buf).expect("in-memory write cannot fail");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

pub fn write_csv_file(result: &ExperimentResult, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(result, std::io::BufWriter::new(file))?;
    Ok(())
}

/// Plain two-column export of a simulated path (`index,value`).
pub fn write_path_csv<W: Write>(values: &[f64], mut w: W) -> std::io::Result<()> {
    writeln!(w, "index,value")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(w, "{},{}", i + 1, v)?;
    }
    Ok(())
}

/// Plain two-column export of grid estimates (`x,density`).
pub fn write_density_csv<W: Write>(pairs: &[(f64, f64)], mut w: W) -> std::io::Result<()> {
    writeln!(w, "x,density")?;
    for (x, v) in pairs {
        writeln!(w, "{x},{v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::experiment::{ExperimentRow, OracleKind};

    fn empty_result() -> ExperimentResult {
        ExperimentResult {
            rows: vec![],
            fitted_slope: 0.0,
            slope_ci: (0.0, 0.0),
            theoretical_exponent: None,
            verdict: None,
            oracle: OracleKind::Exact,
            warnings: vec![],
            process_id: "iid(uniform(0,1))".into(),
            estimator_id: "compact2".into(),
            metric_id: "pointwise_lq(x=0.5,q=2)".into(),
            replicates: 10,
            seed: 1,
        }
    }

    #[test]
    fn empty_result_is_header_only() {
        assert_eq!(csv_string(&empty_result()), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn fields_with_commas_are_quoted() {
        let mut result = empty_result();
        result.rows.push(ExperimentRow { n: 64, m: 2, value: 0.5, stderr: 0.01 });
        let text = csv_string(&result);
        let line = text.lines().nth(1).unwrap();
        // Process and metric ids contain commas, so both get quoted.
        assert!(line.starts_with("\"iid(uniform(0,1))\""));
        assert!(line.contains("\"pointwise_lq(x=0.5,q=2)\""));
        assert!(line.ends_with(",0.5,0.01,1"));
    }
}
