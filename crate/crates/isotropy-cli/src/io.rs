//! Cloud file formats: a little-endian binary layout for bulk data and a
//! plain CSV layout for interoperability.
//!
//! Binary layout: 6 magic bytes `ISOPC1`, the dimension as unsigned 32-bit,
//! the point count as unsigned 64-bit, then `count * n` IEEE-754 doubles,
//! row-major, everything little-endian. CSV holds one point per row and is
//! written with 17 significant digits so doubles survive a round trip
//! exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use isotropy::PointCloud;
use ndarray::Array2;

pub const MAGIC: &[u8; 6] = b"ISOPC1";

/// Block size (in values) for streaming the binary payload, so memory stays
/// bounded at one matrix plus one block.
const BLOCK_VALUES: usize = 65_536;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Detect by sniffing the binary magic bytes.
    Auto,
    Csv,
    Binary,
}

/// Reads a cloud in the requested format; `Auto` treats any file opening
/// with the magic bytes as binary and everything else as CSV.
pub fn read_cloud(path: &Path, format: Format, header: bool) -> Result<PointCloud> {
    let format = match format {
        Format::Auto => detect(path)?,
        other => other,
    };
    match format {
        Format::Csv => read_csv(path, header),
        Format::Binary => read_binary(path),
        Format::Auto => unreachable!("resolved above"),
    }
}

/// Writes a cloud, choosing CSV for a `.csv` extension and binary
/// otherwise.
pub fn write_cloud(path: &Path, cloud: &PointCloud) -> Result<()> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        write_csv(path, cloud)
    } else {
        write_binary(path, cloud)
    }
}

fn detect(path: &Path) -> Result<Format> {
    let mut file =
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut head = [0u8; 6];
    let mut got = 0;
    while got < head.len() {
        match file.read(&mut head[got..])? {
            0 => break,
            read => got += read,
        }
    }
    if got == head.len() && &head == MAGIC {
        Ok(Format::Binary)
    } else {
        Ok(Format::Csv)
    }
}

pub fn read_binary(path: &Path) -> Result<PointCloud> {
    let file =
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut reader = BufReader::new(file);

    let mut magic = [0u8; 6];
    reader
        .read_exact(&mut magic)
        .with_context(|| format!("{}: file too short for a header", path.display()))?;
    if &magic != MAGIC {
        bail!(
            "{}: bad magic {:?}, expected {:?}",
            path.display(),
            String::from_utf8_lossy(&magic),
            String::from_utf8_lossy(MAGIC)
        );
    }
    let mut word4 = [0u8; 4];
    reader.read_exact(&mut word4).context("truncated header")?;
    let n = u32::from_le_bytes(word4) as usize;
    let mut word8 = [0u8; 8];
    reader.read_exact(&mut word8).context("truncated header")?;
    let count = u64::from_le_bytes(word8) as usize;

    let total = count
        .checked_mul(n)
        .with_context(|| format!("{}: count * n overflows", path.display()))?;
    let mut values = Vec::with_capacity(total);
    let mut buf = vec![0u8; BLOCK_VALUES * 8];
    let mut remaining = total
        .checked_mul(8)
        .with_context(|| format!("{}: payload size overflows", path.display()))?;
    while remaining > 0 {
        let take = buf.len().min(remaining);
        reader.read_exact(&mut buf[..take]).with_context(|| {
            format!(
                "{}: payload truncated, expected {} bytes",
                path.display(),
                total * 8
            )
        })?;
        for chunk in buf[..take].chunks_exact(8) {
            values.push(f64::from_le_bytes(chunk.try_into().expect("8-byte chunk")));
        }
        remaining -= take;
    }
    if reader.read(&mut word4[..1])? != 0 {
        bail!(
            "{}: trailing bytes after the {} declared values",
            path.display(),
            total
        );
    }

    let data = Array2::from_shape_vec((count, n), values)
        .context("header does not match payload shape")?;
    Ok(PointCloud::new(data)?)
}

pub fn write_binary(path: &Path, cloud: &PointCloud) -> Result<()> {
    let file =
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut writer = BufWriter::new(file);
    writer.write_all(MAGIC)?;
    writer.write_all(&(cloud.dim() as u32).to_le_bytes())?;
    writer.write_all(&(cloud.count() as u64).to_le_bytes())?;
    for value in cloud.data().iter() {
        writer.write_all(&value.to_le_bytes())?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path, header: bool) -> Result<PointCloud> {
    // First pass: learn the width and count data rows so the value buffer
    // can be allocated once.
    let mut n = 0usize;
    let mut rows = 0usize;
    for (line, _) in csv_lines(path, header)? {
        let width = line.split(',').count();
        if n == 0 {
            n = width;
        }
        rows += 1;
    }

    // Second pass: parse into the preallocated buffer.
    let mut values = Vec::with_capacity(rows.saturating_mul(n));
    for (line, line_no) in csv_lines(path, header)? {
        let mut width = 0usize;
        for token in line.split(',') {
            let token = token.trim();
            let value: f64 = token.parse().with_context(|| {
                format!("{}: line {line_no}: not a number: {token:?}", path.display())
            })?;
            values.push(value);
            width += 1;
        }
        if width != n {
            bail!(
                "{}: line {line_no}: expected {n} values, found {width}",
                path.display()
            );
        }
    }

    let data = Array2::from_shape_vec((rows, n), values).context("inconsistent row count")?;
    Ok(PointCloud::new(data)?)
}

/// Iterates non-empty data lines with their 1-based physical line numbers,
/// skipping one header line when asked.
fn csv_lines(
    path: &Path,
    header: bool,
) -> Result<impl Iterator<Item = (String, usize)>> {
    let file =
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let skip = usize::from(header);
    Ok(BufReader::new(file)
        .lines()
        .enumerate()
        .skip(skip)
        .filter_map(|(i, line)| match line {
            Ok(l) if l.trim().is_empty() => None,
            Ok(l) => Some((l, i + 1)),
            Err(_) => None,
        }))
}

pub fn write_csv(path: &Path, cloud: &PointCloud) -> Result<()> {
    let file =
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut writer = BufWriter::new(file);
    for row in cloud.data().rows() {
        let mut first = true;
        for value in row {
            if !first {
                writer.write_all(b",")?;
            }
            // 17 significant digits: doubles round-trip exactly.
            write!(writer, "{value:.16e}")?;
            first = false;
        }
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}
