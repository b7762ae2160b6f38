//! Matrix files: a little-endian binary format tagged `FPRM` and a
//! `row,col,re,im` CSV.

use std::io::{Read, Write};
use std::path::Path;

use faer::c64;

use super::matrix::{BipartiteOperator, HermitianMatrix};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"FPRM";
pub const FORMAT_VERSION: u32 = 1;

pub fn write_binary<W: Write>(mut w: W, op: &BipartiteOperator) -> Result<()> {
    let dim = op.dim();
    let mut buf = Vec::with_capacity(20 + 16 * dim * dim);
    buf.extend_from_slice(MAGIC);
    for v in [FORMAT_VERSION, dim as u32, op.n() as u32, op.d() as u32] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let m = op.matrix();
    for i in 0..dim {
        for j in 0..dim {
            let z = m.get(i, j);
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn to_bytes(op: &BipartiteOperator) -> Vec<u8> {
    let mut out = Vec::new();
    write_binary(&mut out, op).expect("writing to a Vec cannot fail");
    out
}

pub fn read_binary<R: Read>(mut r: R) -> Result<BipartiteOperator> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 20 || &bytes[..4] != MAGIC {
        return Err(Error::Parse("missing FPRM header".into()));
    }
    let word = |k: usize| u32::from_le_bytes(bytes[4 + 4 * k..8 + 4 * k].try_into().expect("4 bytes")) as usize;
    let (version, dim, n, d) = (word(0), word(1), word(2), word(3));
    if version != FORMAT_VERSION as usize {
        return Err(Error::Parse(format!("unsupported FPRM version {version}")));
    }
    if n * d != dim {
        return Err(Error::Parse(format!("header dim {dim} differs from n·d = {}", n * d)));
    }
    let body = &bytes[20..];
    if body.len() != 16 * dim * dim {
        return Err(Error::Parse(format!(
            "expected {} payload bytes, found {}",
            16 * dim * dim,
            body.len()
        )));
    }
    let f = |k: usize| f64::from_le_bytes(body[8 * k..8 * k + 8].try_into().expect("8 bytes"));
    let entries: Vec<c64> = (0..dim * dim).map(|k| c64::new(f(2 * k), f(2 * k + 1))).collect();
    BipartiteOperator::new(n, d, HermitianMatrix::from_row_major(dim, &entries)?)
}

/// Writes every entry as `row,col,re,im` (zero-based indices) under a header line.
pub fn write_csv<W: Write>(w: W, m: &HermitianMatrix) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["row", "col", "re", "im"])?;
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            let z = m.get(i, j);
            wr.write_record([
                i.to_string(),
                j.to_string(),
                format!("{:e}", z.re),
                format!("{:e}", z.im),
            ])?;
        }
    }
    wr.flush()?;
    Ok(())
}

/// Reads a `row,col,re,im` CSV; missing entries are zero, the dimension is
/// one more than the largest index.
pub fn read_csv<R: Read>(r: R) -> Result<HermitianMatrix> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut triples = Vec::new();
    let mut dim = 0;
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        if rec.len() != 4 {
            return Err(Error::Parse(format!(
                "line {}: expected 4 fields, found {}",
                line + 2,
                rec.len()
            )));
        }
        let parse_err = |what: &str| Error::Parse(format!("line {}: bad {what}", line + 2));
        let i: usize = rec[0].parse().map_err(|_| parse_err("row"))?;
        let j: usize = rec[1].parse().map_err(|_| parse_err("col"))?;
        let re: f64 = rec[2].parse().map_err(|_| parse_err("re"))?;
        let im: f64 = rec[3].parse().map_err(|_| parse_err("im"))?;
        dim = dim.max(i + 1).max(j + 1);
        triples.push((i, j, c64::new(re, im)));
    }
    let mut entries = vec![c64::new(0.0, 0.0); dim * dim];
    for (i, j, z) in triples {
        entries[i * dim + j] = z;
    }
    HermitianMatrix::from_row_major(dim, &entries)
}

/// Loads a Choi matrix, choosing the format from the extension (`.csv` or binary).
pub fn load_operator(path: &Path, n: usize, d: usize) -> Result<BipartiteOperator> {
    let file = std::fs::File::open(path)?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        BipartiteOperator::new(n, d, read_csv(std::io::BufReader::new(file))?)
    } else {
        let op = read_binary(std::io::BufReader::new(file))?;
        if op.n() != n || op.d() != d {
            return Err(Error::ShapeMismatch(format!(
                "file holds n={}, d={}, requested n={n}, d={d}",
                op.n(),
                op.d()
            )));
        }
        Ok(op)
    }
}

pub fn save_operator(path: &Path, op: &BipartiteOperator) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        write_csv(file, op.matrix())
    } else {
        write_binary(file, op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmt::{sample_gue, Seed};

    #[test]
    fn binary_round_trip() {
        let op = BipartiteOperator::new(2, 3, sample_gue(6, Seed::new(2))).unwrap();
        let bytes = to_bytes(&op);
        assert_eq!(&bytes[..4], b"FPRM");
        assert_eq!(bytes.len(), 20 + 16 * 36);
        assert_eq!(read_binary(&bytes[..]).unwrap(), op);
    }

    #[test]
    fn csv_round_trip() {
        let m = sample_gue(4, Seed::new(8));
        let mut buf = Vec::new();
        write_csv(&mut buf, &m).unwrap();
        assert_eq!(read_csv(&buf[..]).unwrap(), m);
    }

    #[test]
    fn truncated_binary_is_rejected() {
        let op = BipartiteOperator::identity(1, 2);
        let bytes = to_bytes(&op);
        assert!(matches!(read_binary(&bytes[..bytes.len() - 1]), Err(Error::Parse(_))));
    }
}
