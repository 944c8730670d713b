//! CSV export of time series.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::numerics::TimeSeries;

/// Writes each series to `<dir>/<name>.csv` with header `t,<name>[unit]`.
///
/// Values use the shortest round-trip form, so [`read_csv`] recovers them
/// bit for bit. An empty slice succeeds and writes nothing.
pub fn export_csv(series: &[(String, TimeSeries)], dir: &Path) -> Result<Vec<PathBuf>> {
    if series.is_empty() {
        return Ok(Vec::new());
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::with_capacity(series.len());
    for (name, ts) in series {
        let path = dir.join(format!("{name}.csv"));
        let mut text = format!("t,{name}[{}]\n", ts.unit().symbol());
        for (t, v) in ts.times().zip(ts.values()) {
            writeln!(text, "{t:?},{v:?}").expect("write to String");
        }
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Reads back a file written by [`export_csv`] as `(times, values)`.
pub fn read_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut t = Vec::new();
    let mut v = Vec::new();
    for (n, line) in text.lines().enumerate().skip(1) {
        let bad = || Error::Domain(format!("{}:{}: malformed row", path.display(), n + 1));
        let (a, b) = line.split_once(',').ok_or_else(bad)?;
        t.push(a.parse().map_err(|_| bad())?);
        v.push(b.parse().map_err(|_| bad())?);
    }
    Ok((t, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{TimeGrid, Unit};

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let g = TimeGrid::new(0.0, 0.1, 5).unwrap();
        let ts = TimeSeries::from_fn(g, Unit::Concentration, |t| (t * 7.3).sin() / 3.0).unwrap();
        let paths = export_csv(&[("c".into(), ts.clone())], dir.path()).unwrap();
        let text = fs::read_to_string(&paths[0]).unwrap();
        assert!(text.starts_with("t,c[mol/m^3]\n"));
        let (t, v) = read_csv(&paths[0]).unwrap();
        assert_eq!(v, ts.values());
        assert_eq!(t, ts.times().collect::<Vec<_>>());
    }

    #[test]
    fn empty_set_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let sub = dir.path().join("never");
        assert!(export_csv(&[], &sub).unwrap().is_empty());
        assert!(!sub.exists());
    }
}
