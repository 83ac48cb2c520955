//! Plain CSV tables of floating-point columns.
//!
//! Values are written with Rust's shortest round-trip formatting, so the same
//! data always produces byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::Result;

pub fn write_csv<W: Write, R: AsRef<[f64]>>(
    mut w: W,
    header: &[&str],
    rows: impl IntoIterator<Item = R>,
) -> Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.as_ref().iter().map(|v| format!("{v:?}")).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file<R: AsRef<[f64]>>(
    path: impl AsRef<Path>,
    header: &[&str],
    rows: impl IntoIterator<Item = R>,
) -> Result<()> {
    let file = File::create(path)?;
    write_csv(BufWriter::new(file), header, rows)
}
