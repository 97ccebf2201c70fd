//! Plain-text and binary persistence. Floats are written with 17
//! significant digits so that files round-trip bit-exactly.

use std::io::{BufRead, Read, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GridDomain;
use crate::scalar::Real;
use crate::stability::StabilityRecord;

/// Round-trip float formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header block written as `# key: value` lines.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub s: f64,
    pub h: f64,
    pub gamma0: Option<f64>,
    pub geometry_hash: String,
}

impl Provenance {
    fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "# s: {}", fmt_f64(self.s))?;
        writeln!(w, "# h: {}", fmt_f64(self.h))?;
        if let Some(g) = self.gamma0 {
            writeln!(w, "# gamma0: {}", fmt_f64(g))?;
        }
        writeln!(w, "# geometry_hash: {}", self.geometry_hash)?;
        Ok(())
    }
}

/// Writes a header, a column line and rows of preformatted cells.
pub fn write_table<W: Write>(
    w: &mut W,
    provenance: Option<&Provenance>,
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    if let Some(p) = provenance {
        p.write(w)?;
    }
    writeln!(w, "{}", columns.join(","))?;
    for row in rows {
        if row.len() != columns.len() {
            return Err(Error::Shape { expected: columns.len(), got: row.len() });
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// A parsed table: `# key: value` header entries, column names and rows.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Numeric cell, with the line number in the error.
    pub fn number(&self, row: usize, col: usize) -> Result<f64> {
        let cell = &self.rows[row][col];
        cell.trim().parse::<f64>().map_err(|_| {
            Error::Config(format!("data row {}: column {} is not a number: {cell:?}", row + 1, self.columns[col]))
        })
    }
}

/// Reads a table written by [`write_table`]. Every row must have as many
/// cells as the column line.
pub fn read_table<R: BufRead>(r: R) -> Result<Table> {
    let mut table = Table::default();
    let mut have_columns = false;
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some((key, value)) = rest.split_once(':') {
                table.header.push((key.trim().to_string(), value.trim().to_string()));
            }
            continue;
        }
        let cells: Vec<String> = trimmed.split(',').map(|c| c.trim().to_string()).collect();
        if !have_columns {
            table.columns = cells;
            have_columns = true;
        } else if cells.len() != table.columns.len() {
            return Err(Error::Config(format!(
                "line {}: {} cells, expected {}",
                k + 1,
                cells.len(),
                table.columns.len()
            )));
        } else {
            table.rows.push(cells);
        }
    }
    if !have_columns {
        return Err(Error::Config("table has no column line".into()));
    }
    Ok(table)
}

/// Column names of a records file.
pub const RECORD_COLUMNS: [&str; 13] = [
    "eps",
    "delta",
    "d_hs",
    "d_lp",
    "d_sqrt_hs",
    "delta_w",
    "q_gap",
    "q_dual",
    "audit_i",
    "audit_ii",
    "audit_iii",
    "solver_ok",
    "note",
];

/// Writes sweep records, one row each.
pub fn write_records<W: Write>(w: &mut W, provenance: Option<&Provenance>, records: &[StabilityRecord]) -> Result<()> {
    let flag = |b: bool| if b { "1".to_string() } else { "0".to_string() };
    let rows = records.iter().map(|r| {
        vec![
            fmt_f64(r.eps),
            fmt_f64(r.delta),
            fmt_f64(r.d_hs),
            fmt_f64(r.d_lp),
            fmt_f64(r.d_sqrt_hs),
            fmt_f64(r.delta_w),
            fmt_f64(r.q_gap),
            fmt_f64(r.q_dual),
            flag(r.support_ok),
            flag(r.bounds_ok),
            flag(r.regularity_ok),
            flag(r.solver_ok),
            r.note.replace([',', '\n'], ";"),
        ]
    });
    write_table(w, provenance, &RECORD_COLUMNS, rows)
}

/// Reads records written by [`write_records`].
pub fn read_records<R: BufRead>(r: R) -> Result<Vec<StabilityRecord>> {
    let t = read_table(r)?;
    let idx: Vec<usize> = RECORD_COLUMNS
        .iter()
        .map(|c| t.column(c).ok_or_else(|| Error::Config(format!("records file lacks column {c}"))))
        .collect::<Result<_>>()?;
    let flag = |row: usize, col: usize| -> Result<bool> {
        match t.rows[row][col].as_str() {
            "1" => Ok(true),
            "0" => Ok(false),
            other => Err(Error::Config(format!("data row {}: flag {other:?} is not 0 or 1", row + 1))),
        }
    };
    (0..t.rows.len())
        .map(|k| {
            Ok(StabilityRecord {
                eps: t.number(k, idx[0])?,
                delta: t.number(k, idx[1])?,
                d_hs: t.number(k, idx[2])?,
                d_lp: t.number(k, idx[3])?,
                d_sqrt_hs: t.number(k, idx[4])?,
                delta_w: t.number(k, idx[5])?,
                q_gap: t.number(k, idx[6])?,
                q_dual: t.number(k, idx[7])?,
                support_ok: flag(k, idx[8])?,
                bounds_ok: flag(k, idx[9])?,
                regularity_ok: flag(k, idx[10])?,
                solver_ok: flag(k, idx[11])?,
                note: t.rows[k][idx[12]].clone(),
            })
        })
        .collect()
}

/// Nodal fields with node index and coordinate columns.
pub fn write_nodal<W: Write, T: Real>(
    w: &mut W,
    provenance: Option<&Provenance>,
    domain: &GridDomain<T>,
    fields: &[(&str, &[f64])],
) -> Result<()> {
    for (name, f) in fields {
        if f.len() != domain.node_count() {
            return Err(Error::Config(format!(
                "field {name} has {} values for {} nodes",
                f.len(),
                domain.node_count()
            )));
        }
    }
    let mut columns = vec!["node", "x"];
    if domain.dim() == 2 {
        columns.push("y");
    }
    columns.extend(fields.iter().map(|(n, _)| *n));
    let rows = (0..domain.node_count()).map(|i| {
        let mut row = vec![i.to_string()];
        row.extend(domain.point(i).iter().map(|c| fmt_f64(c.as_f64())));
        row.extend(fields.iter().map(|(_, f)| fmt_f64(f[i])));
        row
    });
    write_table(w, provenance, &columns, rows)
}

/// A matrix block with the global node indices of its rows and columns.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeBlock {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub values: DMatrix<f64>,
}

/// Writes a block as CSV: the column line is `node` followed by the column
/// node indices, each row starts with its node index.
pub fn write_block<W: Write>(w: &mut W, provenance: Option<&Provenance>, block: &NodeBlock) -> Result<()> {
    if block.values.nrows() != block.rows.len() || block.values.ncols() != block.cols.len() {
        return Err(Error::Shape { expected: block.rows.len(), got: block.values.nrows() });
    }
    let names: Vec<String> =
        std::iter::once("node".to_string()).chain(block.cols.iter().map(|c| c.to_string())).collect();
    let columns: Vec<&str> = names.iter().map(String::as_str).collect();
    let rows = block.rows.iter().enumerate().map(|(r, &node)| {
        std::iter::once(node.to_string()).chain((0..block.cols.len()).map(|c| fmt_f64(block.values[(r, c)]))).collect()
    });
    write_table(w, provenance, &columns, rows)
}

fn parse_index(s: &str, what: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Config(format!("{what} {s:?} is not a node index")))
}

/// Reads a block written by [`write_block`].
pub fn read_block<R: BufRead>(r: R) -> Result<(Table, NodeBlock)> {
    let t = read_table(r)?;
    if t.columns.first().map(String::as_str) != Some("node") {
        return Err(Error::Config("block file must start with a `node` column".into()));
    }
    let cols: Vec<usize> = t.columns[1..].iter().map(|c| parse_index(c, "column")).collect::<Result<_>>()?;
    let rows: Vec<usize> = t.rows.iter().map(|r| parse_index(&r[0], "row")).collect::<Result<_>>()?;
    let mut values = DMatrix::zeros(rows.len(), cols.len());
    for r in 0..rows.len() {
        for c in 0..cols.len() {
            values[(r, c)] = t.number(r, c + 1)?;
        }
    }
    Ok((t, NodeBlock { rows, cols, values }))
}

const MAGIC: &[u8; 8] = b"FRCMAT01";

/// Binary container: magic, rows and columns as little-endian `u64`, then
/// row-major little-endian `f64` entries.
pub fn write_matrix_bin<W: Write>(w: &mut W, m: &DMatrix<f64>) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(m.nrows() as u64).to_le_bytes())?;
    w.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            w.write_all(&m[(r, c)].to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads a matrix written by [`write_matrix_bin`].
pub fn read_matrix_bin<R: Read>(r: &mut R) -> Result<DMatrix<f64>> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Config("not a matrix container (bad magic)".into()));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let len = rows.checked_mul(cols).ok_or_else(|| Error::Config("matrix dimensions overflow".into()))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != len * 8 {
        return Err(Error::Config(format!("matrix payload has {} bytes, expected {}", bytes.len(), len * 8)));
    }
    let data = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")));
    Ok(DMatrix::from_row_iterator(rows, cols, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn floats_round_trip_bit_exactly() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI * 1e-300, -2.5e17, 5e-324] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn records_round_trip() {
        let mut r = StabilityRecord::observation(0.5, 1e-3, 0.2, 0.1, 0.05);
        r.note = "a, b".into();
        let prov = Provenance { s: 0.25, h: 0.125, gamma0: Some(0.5), geometry_hash: "abc".into() };
        let mut buf = Vec::new();
        write_records(&mut buf, Some(&prov), &[r.clone()]).unwrap();
        let back = read_records(Cursor::new(&buf)).unwrap();
        assert_eq!(back[0].delta, r.delta);
        assert_eq!(back[0].note, "a; b");
        let t = read_table(Cursor::new(&buf)).unwrap();
        assert_eq!(t.header_value("geometry_hash"), Some("abc"));
    }

    #[test]
    fn block_round_trip_and_corruption() {
        let block =
            NodeBlock { rows: vec![3, 4], cols: vec![10], values: DMatrix::from_column_slice(2, 1, &[0.1, -7.0]) };
        let mut buf = Vec::new();
        write_block(&mut buf, None, &block).unwrap();
        let (_, back) = read_block(Cursor::new(&buf)).unwrap();
        assert_eq!(back, block);
        let bad = String::from_utf8(buf).unwrap().replace("-7", "x7");
        assert!(read_block(Cursor::new(bad.as_bytes())).is_err());
        assert!(read_block(Cursor::new(b"node,1\n2,3,4\n".as_slice())).is_err());
    }

    #[test]
    fn binary_container_round_trip() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.5]);
        let mut buf = Vec::new();
        write_matrix_bin(&mut buf, &m).unwrap();
        assert_eq!(buf.len(), 8 + 16 + 48);
        assert_eq!(read_matrix_bin(&mut Cursor::new(&buf)).unwrap(), m);
        buf.pop();
        assert!(read_matrix_bin(&mut Cursor::new(&buf)).is_err());
    }
}
