//! `ICX1` table files: the magic `ICX1`, a version byte `0x01`, the limit `N`
//! as a little-endian `u64`, then `f(1)..=f(N)` one byte each.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::complexity::ComplexityTable;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"ICX1";
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 13;

pub fn write_table<W: Write>(table: &ComplexityTable, mut out: W) -> Result<()> {
    out.write_all(&MAGIC)?;
    out.write_all(&[VERSION])?;
    out.write_all(&table.limit().to_le_bytes())?;
    out.write_all(table.as_slice())?;
    out.flush()?;
    Ok(())
}

pub fn read_table<R: Read>(mut input: R) -> Result<ComplexityTable> {
    let mut header = [0u8; HEADER_LEN];
    input
        .read_exact(&mut header)
        .map_err(|_| Error::Format("truncated header".into()))?;
    if header[..4] != MAGIC {
        return Err(Error::Format("missing ICX1 magic".into()));
    }
    if header[4] != VERSION {
        return Err(Error::Format(format!("unsupported version {}", header[4])));
    }
    let limit = u64::from_le_bytes(header[5..13].try_into().unwrap());
    let len = usize::try_from(limit).map_err(|_| Error::Allocation(limit))?;
    if len == 0 {
        return Err(Error::Format("empty table".into()));
    }
    let mut values = Vec::new();
    values
        .try_reserve_exact(len)
        .map_err(|_| Error::Allocation(limit))?;
    input.by_ref().take(limit).read_to_end(&mut values)?;
    if values.len() != len {
        return Err(Error::Format(format!(
            "expected {len} entries, found {}",
            values.len()
        )));
    }
    let mut trailing = [0u8; 1];
    if input.read(&mut trailing)? != 0 {
        return Err(Error::Format("trailing bytes after table".into()));
    }
    ComplexityTable::from_values(&values)
}

pub fn save(table: &ComplexityTable, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_table(table, BufWriter::new(file)).map_err(|e| match e {
        Error::Stream(source) => io_err(source),
        other => other,
    })
}

pub fn load(path: &Path) -> Result<ComplexityTable> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_table(BufReader::new(file)).map_err(|e| match e {
        Error::Stream(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}
