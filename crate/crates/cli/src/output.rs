use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use mapq_core::experiment::SweepRow;
use serde::Serialize;

/// Where output goes: a file, or stdout.
pub struct Sink(Option<PathBuf>);

impl Sink {
    pub fn new(path: Option<&Path>) -> Self {
        Sink(path.map(Path::to_path_buf))
    }

    /// `out.csv` becomes `out-3.csv`.
    pub fn numbered(path: &Path, i: usize) -> Self {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
        let name = match path.extension().and_then(|e| e.to_str()) {
            Some(ext) => format!("{stem}-{i}.{ext}"),
            None => format!("{stem}-{i}"),
        };
        Sink(Some(path.with_file_name(name)))
    }

    fn open(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.0 {
            Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
            None => Box::new(io::stdout().lock()),
        })
    }
}

pub fn write_json<T: Serialize + ?Sized>(sink: &Sink, value: &T) -> Result<()> {
    let mut w = sink.open()?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

/// Columns: method, N, N_eval, estimate, relative_error, wall_time_s.
pub fn write_sweep_csv(sink: &Sink, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink.open()?);
    if rows.is_empty() {
        w.write_record(["method", "N", "N_eval", "estimate", "relative_error", "wall_time_s"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
