//! Report and CSV serialization.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use crate::experiments::{Outcome, Series};

pub fn report_json(o: &Outcome) -> io::Result<String> {
    let mut s = serde_json::to_string_pretty(&o.report)?;
    s.push('\n');
    Ok(s)
}

/// `x,value[,value2]` header, 17 significant digits per number.
pub fn csv(series: &Series) -> String {
    let width = series.rows.first().map_or(2, Vec::len);
    let mut s = String::from("x,value");
    for i in 2..width {
        write!(s, ",value{i}").unwrap();
    }
    s.push('\n');
    for row in &series.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn print(o: &Outcome) -> io::Result<()> {
    io::stdout().lock().write_all(report_json(o)?.as_bytes())
}

/// Writes `<dir>/<experiment>.json` and `<dir>/<experiment>-<series>.csv`.
pub fn write(dir: &Path, o: &Outcome) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let name = &o.report.experiment;
    fs::write(dir.join(format!("{name}.json")), report_json(o)?)?;
    for s in &o.series {
        fs::write(dir.join(format!("{name}-{}.csv", s.name)), csv(s))?;
    }
    Ok(())
}
