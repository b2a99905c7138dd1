//! Curve serialization.
//!
//! CSV layout is `x,y,s` with one vertex per row, every value printed with
//! 17 significant digits so f64 round-trips exactly. A closed curve repeats
//! its first vertex as the final row with `s` equal to the total length
//! (closing chord included); the reader detects that repeat and rebuilds the
//! curve as closed. An open curve that genuinely ends where it starts is not
//! representable, which the constructor's coincident-endpoint check already
//! rules out for the seam anyway.

use std::io::{BufRead, Write};

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::point::Point;

pub fn write_curve_csv<W: Write>(curve: &SampledCurve, mut w: W) -> Result<()> {
    writeln!(w, "x,y,s")?;
    for (p, s) in curve.points().iter().zip(curve.arclens()) {
        writeln!(w, "{:.17e},{:.17e},{:.17e}", p.x, p.y, s)?;
    }
    if curve.is_closed() {
        let first = curve.points()[0];
        writeln!(w, "{:.17e},{:.17e},{:.17e}", first.x, first.y, curve.total_len())?;
    }
    Ok(())
}

pub fn read_curve_csv<R: BufRead>(r: R) -> Result<SampledCurve> {
    let mut pts: Vec<Point> = Vec::new();
    let mut svals: Vec<f64> = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let row = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if row == 1 {
            if trimmed != "x,y,s" {
                return Err(Error::Parse {
                    row,
                    msg: format!("expected header 'x,y,s', found '{trimmed}'"),
                });
            }
            continue;
        }
        let mut fields = trimmed.split(',');
        let mut next = |name: &str| -> Result<f64> {
            let raw = fields.next().ok_or_else(|| Error::Parse {
                row,
                msg: format!("missing {name} column"),
            })?;
            raw.trim().parse::<f64>().map_err(|e| Error::Parse {
                row,
                msg: format!("bad {name} value '{}': {e}", raw.trim()),
            })
        };
        let x = next("x")?;
        let y = next("y")?;
        let s = next("s")?;
        if fields.next().is_some() {
            return Err(Error::Parse {
                row,
                msg: "more than three columns".into(),
            });
        }
        pts.push(Point::new(x, y));
        svals.push(s);
    }
    if pts.len() < 2 {
        return Err(Error::InsufficientData {
            points: pts.len(),
            required: 2,
        });
    }
    let closed = pts.len() > 3 && pts[0] == pts[pts.len() - 1];
    if closed {
        pts.pop();
        svals.pop();
    }
    let curve = SampledCurve::from_points(pts, closed)?;
    // The s column is redundant; require it to agree with the rebuilt table
    // so silently corrupted files are rejected.
    let tol = 1e-9 * curve.total_len().max(1.0);
    for (i, (&want, &got)) in curve.arclens().iter().zip(&svals).enumerate() {
        if (want - got).abs() > tol {
            return Err(Error::Parse {
                row: i + 2,
                msg: format!("arclength column {got} disagrees with rebuilt value {want}"),
            });
        }
    }
    Ok(curve)
}

/// Writes the curve as a single-path SVG with a 5% padded viewBox. Raw
/// curve coordinates are used (no y flip), so the image is the mathematical
/// plane mirrored vertically. `stroke` is the stroke width in curve units;
/// `None` picks 0.2% of the larger bounding-box dimension.
pub fn write_curve_svg<W: Write>(
    curve: &SampledCurve,
    mut w: W,
    stroke: Option<f64>,
) -> Result<()> {
    let (min, max) = curve.bounding_box();
    let width = (max.x - min.x).max(1e-12);
    let height = (max.y - min.y).max(1e-12);
    let pad = 0.05 * width.max(height);
    let vb = (
        min.x - pad,
        min.y - pad,
        width + 2.0 * pad,
        height + 2.0 * pad,
    );
    let stroke = stroke.unwrap_or(0.002 * width.max(height));
    writeln!(
        w,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">",
        vb.0, vb.1, vb.2, vb.3
    )?;
    write!(
        w,
        "<path fill=\"none\" stroke=\"black\" stroke-width=\"{stroke}\" d=\""
    )?;
    for (i, p) in curve.points().iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        write!(w, "{}{} {} ", cmd, p.x, p.y)?;
    }
    if curve.is_closed() {
        write!(w, "Z")?;
    }
    writeln!(w, "\"/>")?;
    writeln!(w, "</svg>")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wiggle(n: usize) -> SampledCurve {
        let pts: Vec<Point> = (0..=n)
            .map(|i| {
                let x = i as f64 / n as f64;
                Point::new(x, (9.0 * x).sin() / 7.0)
            })
            .collect();
        SampledCurve::from_points(pts, false).unwrap()
    }

    #[test]
    fn csv_roundtrip_open() {
        let c = wiggle(257);
        let mut buf = Vec::new();
        write_curve_csv(&c, &mut buf).unwrap();
        let back = read_curve_csv(buf.as_slice()).unwrap();
        assert!(!back.is_closed());
        assert_eq!(back.points(), c.points());
        assert_eq!(back.arclens(), c.arclens());
    }

    #[test]
    fn csv_roundtrip_closed() {
        let pts: Vec<Point> = (0..100)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 100.0;
                Point::new(t.cos(), t.sin())
            })
            .collect();
        let c = SampledCurve::from_points(pts, true).unwrap();
        let mut buf = Vec::new();
        write_curve_csv(&c, &mut buf).unwrap();
        // Closing row repeats the first vertex at s = total.
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 102);
        let back = read_curve_csv(buf.as_slice()).unwrap();
        assert!(back.is_closed());
        assert_eq!(back.points(), c.points());
        assert_eq!(back.total_len(), c.total_len());
    }

    #[test]
    fn csv_rejects_corruption() {
        let c = wiggle(40);
        let mut buf = Vec::new();
        write_curve_csv(&c, &mut buf).unwrap();
        let mut text = String::from_utf8(buf).unwrap();
        // Tamper with one s value.
        text = text.replace(
            &format!("{:.17e}", c.arclens()[7]),
            &format!("{:.17e}", c.arclens()[7] + 0.5),
        );
        let err = read_curve_csv(text.as_bytes());
        assert!(matches!(err, Err(Error::Parse { .. })));
    }

    #[test]
    fn csv_17_digits() {
        let c = wiggle(5);
        let mut buf = Vec::new();
        write_curve_csv(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row = text.lines().nth(2).unwrap();
        // 17 fractional digits in scientific notation.
        assert!(row.split(',').all(|f| {
            let mantissa = f.split('e').next().unwrap();
            mantissa.split('.').nth(1).unwrap().len() == 17
        }));
    }

    #[test]
    fn svg_smoke() {
        let c = wiggle(64);
        let mut buf = Vec::new();
        write_curve_svg(&c, &mut buf, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.contains("<path"));
        assert!(!text.contains('Z'));
        assert_eq!(text.matches("<path").count(), 1);
    }

    #[test]
    fn svg_explicit_stroke() {
        let c = wiggle(64);
        let mut buf = Vec::new();
        write_curve_svg(&c, &mut buf, Some(0.03125)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("stroke-width=\"0.03125\""));
    }
}
