use std::fs::File;
use std::io::Write;
use std::path::Path;

use zest_core::simulator::SimLog;

use crate::CliError;

pub const HEADER: [&str; 17] = [
    "t",
    "wx",
    "wy",
    "wpsi",
    "wu",
    "wr",
    "rx",
    "ry",
    "rpsi",
    "ru",
    "rr",
    "leaf",
    "encounter",
    "tl",
    "tr",
    "sep",
    "xte",
];

/// One row per record. Floats use the shortest representation that parses
/// back to the same value (exponent form for very small or large magnitudes); red columns and `sep` are empty without a red
/// vessel, `leaf` is empty when no leaf produced the command.
pub fn write_log_csv_to<W: Write>(log: &SimLog, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    let num = |v: f64| format!("{v:?}");
    for r in &log.records {
        let mut row = Vec::with_capacity(HEADER.len());
        row.push(num(r.t));
        let s = &r.white;
        row.extend([s.x, s.y, s.psi, s.u, s.r].map(num));
        match &r.red {
            Some(s) => row.extend([s.x, s.y, s.psi, s.u, s.r].map(num)),
            None => row.extend(std::iter::repeat_n(String::new(), 5)),
        }
        row.push(r.leaf.map(|l| l.name().to_string()).unwrap_or_default());
        row.push(r.encounter.as_str().to_string());
        row.push(num(r.thrust.t_left));
        row.push(num(r.thrust.t_right));
        row.push(r.separation.map(num).unwrap_or_default());
        row.push(num(r.cross_track));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_log_csv(log: &SimLog, path: &Path) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::io(path, e);
    let file = File::create(path).map_err(io)?;
    write_log_csv_to(log, file).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(e) => io(e),
        other => CliError::io(path, std::io::Error::other(format!("{other:?}"))),
    })
}

/// Per-tick node statuses, one line per record.
pub fn write_bt_dump(log: &SimLog, path: &Path) -> Result<(), CliError> {
    let mut text = String::new();
    for r in &log.records {
        text.push_str(&r.t.to_string());
        text.push('\t');
        text.push_str(r.bt_trace.as_deref().unwrap_or(""));
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
