//! Grid files: raw binary (`TODA` magic, u32 nx, ny, l, then f64 LE values
//! row-major, node-major) and CSV.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::grid::{DomainGrid, HFieldGrid};
use crate::error::{Result, TodaError};

const MAGIC: &[u8; 4] = b"TODA";

pub fn encode_binary(field: &HFieldGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 8 * field.values.len());
    out.extend_from_slice(MAGIC);
    for v in [field.grid.nx, field.grid.ny, field.rank] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    for v in &field.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Header `(nx, ny, l)` and values.
pub fn decode_binary(bytes: &[u8]) -> Result<(usize, usize, usize, Vec<f64>)> {
    if bytes.len() < 16 || &bytes[..4] != MAGIC {
        return Err(TodaError::Parse("not a TODA grid file (bad magic)".into()));
    }
    let u = |k: usize| u32::from_le_bytes(bytes[4 + 4 * k..8 + 4 * k].try_into().unwrap()) as usize;
    let (nx, ny, l) = (u(0), u(1), u(2));
    let count = nx
        .checked_mul(ny)
        .and_then(|v| v.checked_mul(l))
        .ok_or_else(|| TodaError::Parse("grid header overflows".into()))?;
    let body = &bytes[16..];
    if body.len() != 8 * count {
        return Err(TodaError::Parse(format!(
            "grid body has {} bytes, header implies {}",
            body.len(),
            8 * count
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((nx, ny, l, values))
}

pub fn write_binary(path: &Path, field: &HFieldGrid) -> Result<()> {
    fs::write(path, encode_binary(field))?;
    Ok(())
}

/// Read a binary grid, taking topology and spacing from `grid`.
pub fn read_binary(path: &Path, grid: DomainGrid) -> Result<HFieldGrid> {
    let (nx, ny, l, values) = decode_binary(&fs::read(path)?)?;
    if nx != grid.nx || ny != grid.ny {
        return Err(TodaError::Parse(format!(
            "file grid is {nx}x{ny}, expected {}x{}",
            grid.nx, grid.ny
        )));
    }
    HFieldGrid::new(grid, l, values)
}

/// Header `ix,iy,h1,...,hl`, one row per node.
pub fn write_csv(path: &Path, field: &HFieldGrid) -> Result<()> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    let names: Vec<String> = (1..=field.rank).map(|k| format!("h{k}")).collect();
    writeln!(w, "ix,iy,{}", names.join(","))?;
    for n in 0..field.grid.len() {
        let (ix, iy) = field.grid.coords(n);
        let vals: Vec<String> = field.at(n).iter().map(|v| format!("{v:e}")).collect();
        writeln!(w, "{ix},{iy},{}", vals.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path, grid: DomainGrid) -> Result<HFieldGrid> {
    let r = BufReader::new(fs::File::open(path)?);
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| TodaError::Parse("empty CSV".into()))??;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 3 || cols[0] != "ix" || cols[1] != "iy" {
        return Err(TodaError::Parse(format!("unexpected CSV header '{header}'")));
    }
    let l = cols.len() - 2;
    let mut values = vec![f64::NAN; grid.len() * l];
    let mut seen = vec![false; grid.len()];
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != l + 2 {
            return Err(TodaError::Parse(format!("bad CSV row '{line}'")));
        }
        let bad = || TodaError::Parse(format!("bad CSV row '{line}'"));
        let ix: usize = f[0].parse().map_err(|_| bad())?;
        let iy: usize = f[1].parse().map_err(|_| bad())?;
        if ix >= grid.nx || iy >= grid.ny {
            return Err(bad());
        }
        let n = grid.index(ix, iy);
        for k in 0..l {
            values[n * l + k] = f[k + 2].parse().map_err(|_| bad())?;
        }
        seen[n] = true;
    }
    if let Some(n) = seen.iter().position(|s| !s) {
        let (ix, iy) = grid.coords(n);
        return Err(TodaError::Parse(format!("CSV is missing node ({ix},{iy})")));
    }
    HFieldGrid::new(grid, l, values)
}
