//! CSV and PGM emission helpers.
//!
//! The CSV dialect is fixed: comma separator, `.` decimal point, LF line
//! endings, one header row after an optional `#` comment line carrying the
//! resolved configuration. Floats are printed with 17 significant digits so
//! outputs round-trip bit-exactly.

use std::io::Write;
use std::path::Path;

/// Format with 17 significant digits (round-trip safe for f64).
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a 16-bit big-endian P5 PGM with values linearly scaled to
/// `[0, 65535]`; the scaling extremes go into `<path>.minmax.txt`.
pub fn write_pgm16(path: &Path, nx: usize, ny: usize, values: &[f64]) -> std::io::Result<()> {
    assert_eq!(values.len(), nx * ny, "grid size mismatch");
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = hi - lo;
    let mut out = Vec::with_capacity(32 + 2 * values.len());
    out.extend_from_slice(format!("P5\n{nx} {ny}\n65535\n").as_bytes());
    for &v in values {
        let scaled = if span > 0.0 {
            ((v - lo) / span * 65535.0).round().clamp(0.0, 65535.0) as u16
        } else {
            0
        };
        out.extend_from_slice(&scaled.to_be_bytes());
    }
    std::fs::write(path, out)?;

    let sidecar = path.with_extension(format!(
        "{}minmax.txt",
        path.extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    let mut f = std::fs::File::create(sidecar)?;
    writeln!(f, "min={}", fmt_g17(lo))?;
    writeln!(f, "max={}", fmt_g17(hi))?;
    Ok(())
}
