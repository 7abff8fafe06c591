//! Flat binary container for physical grid fields and CSV export.
//!
//! Container layout, all little-endian: the 4 bytes `TPSG`, a u32 format version, then n, N, Nt,
//! L and T as f64, then the real field values as f64 in (component, time, space) order. The
//! component count follows from the payload length.

use super::field::GridField;
use super::grid::{make_grid, GridSpec};
use crate::error::{Error, Result};
use crate::kernels::Params;
use std::io::{Read, Write};

pub const MAGIC: &[u8; 4] = b"TPSG";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 5 * 8;

pub fn write_field(mut w: impl Write, field: &GridField) -> Result<()> {
    let values = field.to_real()?;
    let g = field.grid();
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * values.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    for v in [g.dim() as f64, g.n_space() as f64, g.n_time() as f64, g.half_length(), g.params().period()] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn header_integer(v: f64, what: &str) -> Result<usize> {
    if v.fract() != 0.0 || !(0.0..=(1u64 << 32) as f64).contains(&v) {
        return Err(Error::Io(format!("header field {what} = {v} is not a valid size")));
    }
    Ok(v as usize)
}

pub fn read_field(mut r: impl Read) -> Result<GridField> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(Error::Io("not a TPSG field container".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(Error::Io(format!("unsupported container version {version}")));
    }
    let f = |i: usize| f64::from_le_bytes(bytes[8 + 8 * i..16 + 8 * i].try_into().expect("8 bytes"));
    let n = header_integer(f(0), "n")?;
    let nn = header_integer(f(1), "N")?;
    let nt = header_integer(f(2), "Nt")?;
    let grid: GridSpec = make_grid(f(3), nn, nt, Params::new(n, f(4))?)?;
    let payload = &bytes[HEADER_LEN..];
    let per_component = 8 * grid.component_len();
    if payload.is_empty() || payload.len() % per_component != 0 {
        return Err(Error::Shape(format!(
            "payload of {} bytes is not a whole number of {per_component}-byte components",
            payload.len()
        )));
    }
    let values: Vec<f64> =
        payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    GridField::from_real(&grid, payload.len() / per_component, &values)
}

/// Quotes a CSV field when it contains a separator, quote or line break.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Scientific notation with 17 significant digits.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `# key=value` preamble lines, a header row and numeric rows (empty cells for None).
pub fn write_csv(
    mut w: impl Write,
    preamble: &[(String, String)],
    columns: &[String],
    rows: &[Vec<Option<f64>>],
) -> Result<()> {
    let mut out = String::new();
    for (k, v) in preamble {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str(&columns.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
    out.push('\n');
    for row in rows {
        if row.len() != columns.len() {
            return Err(Error::Shape(format!("row has {} cells, header has {}", row.len(), columns.len())));
        }
        let cells: Vec<String> = row.iter().map(|v| v.map(format_number).unwrap_or_default()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn container_round_trip() {
        let g = make_grid(1.5, 8, 3, Params::new(2, 2.0 * PI).unwrap()).unwrap();
        let f = GridField::from_fn(&g, 2, |x, t, out| {
            out[0] = x[0] * t;
            out[1] = (x[1] + t).sin();
        });
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        assert_eq!(&buf[..4], b"TPSG");
        assert_eq!(buf.len(), HEADER_LEN + 8 * 2 * 64 * 3);
        let back = read_field(&buf[..]).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn corrupt_containers_rejected() {
        assert!(read_field(&b"XXXX"[..]).is_err());
        let g = make_grid(1.0, 8, 3, Params::new(2, 1.0).unwrap()).unwrap();
        let f = GridField::from_fn(&g, 1, |_, _, out| out[0] = 1.0);
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        buf.pop();
        assert!(matches!(read_field(&buf[..]), Err(Error::Shape(_))));
        buf[4] = 9;
        assert!(read_field(&buf[..]).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut out = Vec::new();
        write_csv(
            &mut out,
            &[("seed".into(), "7".into())],
            &["r".into(), "value, scaled".into()],
            &[vec![Some(0.1), None], vec![Some(1.0), Some(-2.5e-300)]],
        )
        .unwrap();
        let s = String::from_utf8(out).unwrap();
        assert_eq!(
            s,
            "# seed=7\nr,\"value, scaled\"\n1.0000000000000001e-1,\n1.0000000000000000e0,-2.5000000000000000e-300\n"
        );
        let back: f64 = "1.0000000000000001e-1".parse().unwrap();
        assert_eq!(back, 0.1);
    }
}
