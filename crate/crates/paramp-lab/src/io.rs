//! Trace containers and the CSV formats the toolkit reads and writes.
//!
//! Three typed schemas, dispatched on the header line:
//!
//! - complex traces: `freq_hz,re,im`
//! - gain traces: `freq_hz,gain_db` (an `idler_gain_db` column is accepted
//!   and preserved)
//! - spectra: `freq_hz,power_dbm`
//!
//! Files are UTF-8 with `.` decimals; lines starting with `#` are comments.
//! Every CSV this crate writes is re-readable either through its typed
//! reader or through [`read_table`], the generic header-plus-numeric-columns
//! reader. Writes go through a temporary file renamed into place, so readers
//! never observe a partial file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A complex reflection/transmission sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexTrace {
    /// Probe frequencies [Hz], strictly increasing.
    pub freq_hz: Vec<f64>,
    /// Complex scattering parameter, same length as `freq_hz`.
    pub s21: Vec<Complex64>,
    /// Probe power at the device port [W], when known.
    pub power_at_port_watts: Option<f64>,
    /// Free-form acquisition metadata.
    pub metadata: BTreeMap<String, String>,
}

/// A scalar gain sweep in dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainTrace {
    /// Signal frequencies [Hz], strictly increasing.
    pub freq_hz: Vec<f64>,
    /// Signal power gain [dB], same length as `freq_hz`.
    pub gain_db: Vec<f64>,
    /// Idler conversion gain [dB] when the source provided it.
    pub idler_gain_db: Option<Vec<f64>>,
    /// Pump frequency [Hz], when known.
    pub f_pump_hz: Option<f64>,
    /// Pump power [W], when known.
    pub p_pump_watts: Option<f64>,
}

/// A power spectrum in dBm per resolution bandwidth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Bin frequencies [Hz], strictly increasing.
    pub freq_hz: Vec<f64>,
    /// Bin powers [dBm], same length as `freq_hz`.
    pub power_dbm: Vec<f64>,
}

fn check_axis(freq: &[f64], values: usize, what: &str) -> Result<()> {
    if freq.len() != values {
        return Err(Error::Validation(format!(
            "{what}: {} frequencies vs {} values",
            freq.len(),
            values
        )));
    }
    if freq.is_empty() {
        return Err(Error::Validation(format!("{what}: empty trace")));
    }
    if freq.iter().any(|f| !f.is_finite()) {
        return Err(Error::Validation(format!("{what}: non-finite frequency")));
    }
    if freq.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation(format!(
            "{what}: frequencies must be strictly increasing"
        )));
    }
    Ok(())
}

impl ComplexTrace {
    pub fn new(freq_hz: Vec<f64>, s21: Vec<Complex64>) -> Result<Self> {
        check_axis(&freq_hz, s21.len(), "complex trace")?;
        Ok(Self {
            freq_hz,
            s21,
            power_at_port_watts: None,
            metadata: BTreeMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.freq_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq_hz.is_empty()
    }

    /// Fitting needs enough points to constrain a resonance model; short
    /// traces are valid containers but rejected here.
    pub fn validate_for_fit(&self) -> Result<()> {
        check_axis(&self.freq_hz, self.s21.len(), "complex trace")?;
        if self.len() < 8 {
            return Err(Error::Validation(format!(
                "complex trace has {} points; fitting needs at least 8",
                self.len()
            )));
        }
        Ok(())
    }
}

impl GainTrace {
    pub fn new(freq_hz: Vec<f64>, gain_db: Vec<f64>) -> Result<Self> {
        check_axis(&freq_hz, gain_db.len(), "gain trace")?;
        Ok(Self {
            freq_hz,
            gain_db,
            idler_gain_db: None,
            f_pump_hz: None,
            p_pump_watts: None,
        })
    }

    pub fn len(&self) -> usize {
        self.freq_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq_hz.is_empty()
    }

    pub fn validate_for_fit(&self) -> Result<()> {
        check_axis(&self.freq_hz, self.gain_db.len(), "gain trace")?;
        if self.len() < 12 {
            return Err(Error::Validation(format!(
                "gain trace has {} points; fitting needs at least 12",
                self.len()
            )));
        }
        Ok(())
    }
}

impl Spectrum {
    pub fn new(freq_hz: Vec<f64>, power_dbm: Vec<f64>) -> Result<Self> {
        check_axis(&freq_hz, power_dbm.len(), "spectrum")?;
        Ok(Self { freq_hz, power_dbm })
    }

    pub fn len(&self) -> usize {
        self.freq_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq_hz.is_empty()
    }
}

/// A parsed CSV: header names plus column-major numeric data.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    /// One Vec per column, all equal length.
    pub data: Vec<Vec<f64>>,
}

impl Table {
    pub fn n_rows(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    /// Column by exact header name.
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .position(|c| c == name)
            .map(|i| self.data[i].as_slice())
    }
}

/// Render a float so the value round-trips exactly through parsing.
fn fmt_float(x: f64) -> String {
    let mut s = format!("{x}");
    if !s.contains(['.', 'e', 'E', 'N', 'i']) {
        s.push_str(".0");
    }
    s
}

/// Write `content` to `path` atomically (temporary file + rename).
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, content).map_err(|e| Error::io(tmp.display().to_string(), e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Serialize a table to CSV text: header row, then one row per record.
pub fn table_to_csv(columns: &[&str], data: &[&[f64]]) -> Result<String> {
    if columns.len() != data.len() || columns.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{} column names vs {} columns",
            columns.len(),
            data.len()
        )));
    }
    let n = data[0].len();
    if data.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidArgument("ragged columns".into()));
    }
    let mut out = String::new();
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in 0..n {
        for (i, col) in data.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", fmt_float(col[row]));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Parse CSV text into a [`Table`]: first non-comment line is the header,
/// every following non-comment line holds one float per column. Errors cite
/// the 1-based line and column of the first offending cell.
pub fn parse_table(text: &str) -> Result<Table> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim_start().starts_with('#') && !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        column: 1,
        reason: "empty file: no header line".into(),
    })?;
    let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
    if columns.iter().any(String::is_empty) {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            reason: format!("malformed header {header:?}"),
        });
    }
    let mut data: Vec<Vec<f64>> = vec![Vec::new(); columns.len()];
    let mut any_row = false;
    for (idx, line) in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != columns.len() {
            return Err(Error::Parse {
                line: idx + 1,
                column: 1,
                reason: format!(
                    "expected {} cells, found {}",
                    columns.len(),
                    cells.len()
                ),
            });
        }
        for (c, cell) in cells.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                line: idx + 1,
                column: c + 1,
                reason: format!("not a number: {cell:?}"),
            })?;
            data[c].push(v);
        }
        any_row = true;
    }
    if !any_row {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            reason: "header-only file: no data rows".into(),
        });
    }
    Ok(Table { columns, data })
}

/// Read any CSV written by this crate as a generic numeric table.
pub fn read_table(path: &Path) -> Result<Table> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_table(&text)
}

fn required<'t>(t: &'t Table, name: &str, kind: &str) -> Result<&'t [f64]> {
    t.column(name).ok_or_else(|| Error::Validation(format!(
        "{kind} CSV needs a `{name}` column, found {:?}",
        t.columns
    )))
}

/// Read a `freq_hz,re,im` complex trace.
pub fn read_complex_trace(path: &Path) -> Result<ComplexTrace> {
    let t = read_table(path)?;
    let freq = required(&t, "freq_hz", "complex trace")?;
    let re = required(&t, "re", "complex trace")?;
    let im = required(&t, "im", "complex trace")?;
    let s21 = re
        .iter()
        .zip(im)
        .map(|(&r, &i)| Complex64::new(r, i))
        .collect();
    ComplexTrace::new(freq.to_vec(), s21)
}

/// Write a complex trace as `freq_hz,re,im`.
pub fn write_complex_trace(path: &Path, trace: &ComplexTrace) -> Result<()> {
    check_axis(&trace.freq_hz, trace.s21.len(), "complex trace")?;
    let re: Vec<f64> = trace.s21.iter().map(|z| z.re).collect();
    let im: Vec<f64> = trace.s21.iter().map(|z| z.im).collect();
    let csv = table_to_csv(&["freq_hz", "re", "im"], &[&trace.freq_hz, &re, &im])?;
    write_atomic(path, &csv)
}

/// Read a `freq_hz,gain_db[,idler_gain_db]` gain trace.
pub fn read_gain_trace(path: &Path) -> Result<GainTrace> {
    let t = read_table(path)?;
    let freq = required(&t, "freq_hz", "gain trace")?;
    let gain = required(&t, "gain_db", "gain trace")?;
    let mut trace = GainTrace::new(freq.to_vec(), gain.to_vec())?;
    trace.idler_gain_db = t.column("idler_gain_db").map(<[f64]>::to_vec);
    Ok(trace)
}

/// Write a gain trace as `freq_hz,gain_db[,idler_gain_db]`.
pub fn write_gain_trace(path: &Path, trace: &GainTrace) -> Result<()> {
    check_axis(&trace.freq_hz, trace.gain_db.len(), "gain trace")?;
    let csv = match &trace.idler_gain_db {
        Some(idler) => {
            if idler.len() != trace.freq_hz.len() {
                return Err(Error::Validation("idler column length mismatch".into()));
            }
            table_to_csv(
                &["freq_hz", "gain_db", "idler_gain_db"],
                &[&trace.freq_hz, &trace.gain_db, idler],
            )?
        }
        None => table_to_csv(&["freq_hz", "gain_db"], &[&trace.freq_hz, &trace.gain_db])?,
    };
    write_atomic(path, &csv)
}

/// Read a `freq_hz,power_dbm` spectrum.
pub fn read_spectrum(path: &Path) -> Result<Spectrum> {
    let t = read_table(path)?;
    let freq = required(&t, "freq_hz", "spectrum")?;
    let power = required(&t, "power_dbm", "spectrum")?;
    Spectrum::new(freq.to_vec(), power.to_vec())
}

/// Write a spectrum as `freq_hz,power_dbm`.
pub fn write_spectrum(path: &Path, s: &Spectrum) -> Result<()> {
    check_axis(&s.freq_hz, s.power_dbm.len(), "spectrum")?;
    let csv = table_to_csv(&["freq_hz", "power_dbm"], &[&s.freq_hz, &s.power_dbm])?;
    write_atomic(path, &csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for x in [
            0.0,
            1.5,
            -2.75e-13,
            6.4e9,
            1.0 / 3.0,
            f64::MIN_POSITIVE,
            9.999999999999999e22,
        ] {
            let s = fmt_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{x:e} -> {s}");
        }
    }

    #[test]
    fn complex_trace_validation() {
        assert!(ComplexTrace::new(vec![1.0, 2.0], vec![Complex64::ZERO]).is_err());
        assert!(ComplexTrace::new(vec![2.0, 1.0], vec![Complex64::ZERO; 2]).is_err());
        assert!(ComplexTrace::new(vec![1.0, 1.0], vec![Complex64::ZERO; 2]).is_err());
        let t = ComplexTrace::new(vec![1.0, 2.0, 3.0], vec![Complex64::ZERO; 3]).unwrap();
        assert_eq!(t.len(), 3);
        // Short traces are valid containers but not fittable.
        assert!(t.validate_for_fit().is_err());
    }

    #[test]
    fn csv_round_trip_complex() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let freq: Vec<f64> = (0..16).map(|i| 6.0e9 + i as f64 * 1e6).collect();
        let s21: Vec<Complex64> = freq
            .iter()
            .map(|&f| Complex64::new((f / 1e9).sin(), 1.0 / (f / 1e9)))
            .collect();
        let trace = ComplexTrace::new(freq, s21).unwrap();
        write_complex_trace(&path, &trace).unwrap();
        let back = read_complex_trace(&path).unwrap();
        assert_eq!(trace.freq_hz, back.freq_hz);
        assert_eq!(trace.s21, back.s21);
    }

    #[test]
    fn csv_round_trip_gain_with_idler() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gain.csv");
        let mut trace =
            GainTrace::new(vec![1.0, 2.0, 3.0], vec![0.1, 18.0, 0.2]).unwrap();
        trace.idler_gain_db = Some(vec![-30.0, 17.9, -31.0]);
        write_gain_trace(&path, &trace).unwrap();
        let back = read_gain_trace(&path).unwrap();
        assert_eq!(back.gain_db, trace.gain_db);
        assert_eq!(back.idler_gain_db, trace.idler_gain_db);
        // Gain CSVs also parse as generic tables.
        let t = read_table(&path).unwrap();
        assert_eq!(t.columns, vec!["freq_hz", "gain_db", "idler_gain_db"]);
        assert_eq!(t.n_rows(), 3);
    }

    #[test]
    fn parse_errors_cite_line_and_column() {
        let text = "freq_hz,re,im\n1.0,0.5,0.1\n2.0,oops,0.2\n";
        match parse_table(text) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!((line, column), (3, 2));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let ragged = "freq_hz,re,im\n1.0,0.5\n";
        assert!(matches!(parse_table(ragged), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn header_only_file_is_an_error() {
        assert!(matches!(
            parse_table("freq_hz,gain_db\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(parse_table(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# provenance comment\nfreq_hz,power_dbm\n\n1.0,-150.0\n# midway\n2.0,-149.5\n";
        let t = parse_table(text).unwrap();
        assert_eq!(t.n_rows(), 2);
        assert_eq!(t.column("power_dbm").unwrap(), &[-150.0, -149.5]);
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, "freq_hz\n1.0\n").unwrap();
        assert!(path.exists());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn trace_json_round_trip() {
        let mut trace =
            ComplexTrace::new(vec![1.0, 2.0], vec![Complex64::new(0.3, -0.4); 2]).unwrap();
        trace.metadata.insert("vna".into(), "synthetic".into());
        trace.power_at_port_watts = Some(1e-13);
        let back: ComplexTrace =
            serde_json::from_str(&serde_json::to_string(&trace).unwrap()).unwrap();
        assert_eq!(trace, back);
    }
}
