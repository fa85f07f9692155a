//! CSV and JSON writers.

use std::io::Write;

use igamg_core::SolveReport;

use crate::error::CliResult;
use crate::tables::TableRow;

pub const TABLE_HEADER: [&str; 9] = ["grid", "p", "method", "iter", "global_iter", "res_l2", "err_l2", "seconds", "status"];
pub const HISTORY_HEADER: [&str; 3] = ["global_iteration", "residual_l2", "error_l2"];

/// `printf("%.6e")`: six mantissa digits and a signed, at least two-digit exponent.
pub fn sci(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.6e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

pub fn write_table_csv<W: Write>(out: W, rows: &[TableRow]) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(TABLE_HEADER)?;
    for r in rows {
        w.write_record([
            r.grid.clone(),
            r.p.to_string(),
            r.method.clone(),
            opt(r.iter, |v| v.to_string()),
            opt(r.global_iter, |v| v.to_string()),
            opt(r.res_l2, sci),
            opt(r.err_l2, sci),
            opt(r.seconds, sci),
            r.status.label().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_history_csv<W: Write>(out: W, report: &SolveReport) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HISTORY_HEADER)?;
    for (i, r) in report.residual_history.iter().enumerate() {
        let err = report.error_history.as_ref().and_then(|e| e.get(i).copied());
        w.write_record([i.to_string(), sci(*r), opt(err, sci)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: serde::Serialize>(mut out: W, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}
