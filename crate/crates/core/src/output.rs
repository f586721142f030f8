//! CSV writers. Column layouts are fixed and covered by golden tests.

use std::io::Write;

use crate::analytics::ContourCurve;
use crate::error::Result;
use crate::sampling::SpectrumSample;
use crate::stats::Histogram;

pub const EIGENVALUE_HEADER: [&str; 4] = ["realization", "index", "re", "im"];
pub const SINGULAR_VALUE_HEADER: [&str; 3] = ["realization", "index", "sigma"];
pub const CONTOUR_HEADER: [&str; 5] = ["theta", "psi_re", "psi_im", "z_re", "z_im"];
pub const CURVE_HEADER: [&str; 2] = ["coord", "value"];
pub const HISTOGRAM_HEADER: [&str; 3] = ["bin_lo", "bin_hi", "density"];
pub const PLANAR_HISTOGRAM_HEADER: [&str; 5] = ["x_lo", "x_hi", "y_lo", "y_hi", "density"];

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

pub fn write_eigenvalues<W: Write>(w: W, samples: &[SpectrumSample]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(EIGENVALUE_HEADER)?;
    for s in samples {
        for (i, v) in s.eigenvalues.values.iter().enumerate() {
            out.serialize((s.realization_index, i, v.re, v.im))?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_singular_values<W: Write>(w: W, samples: &[SpectrumSample]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(SINGULAR_VALUE_HEADER)?;
    for s in samples {
        for (i, v) in s.singular_values.iter().enumerate() {
            out.serialize((s.realization_index, i, v))?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_contour<W: Write>(w: W, curve: &ContourCurve) -> Result<()> {
    let mut out = writer(w);
    out.write_record(CONTOUR_HEADER)?;
    for p in &curve.trace {
        out.serialize((p.theta, p.psi.re, p.psi.im, p.z.re, p.z.im))?;
    }
    out.flush()?;
    Ok(())
}

/// Sampled function values, one `(coord, value)` pair per row.
pub fn write_curve<W: Write>(w: W, points: &[(f64, f64)]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(CURVE_HEADER)?;
    for p in points {
        out.serialize(p)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_histogram<W: Write>(w: W, h: &Histogram) -> Result<()> {
    let mut out = writer(w);
    match &h.y_edges {
        None => {
            out.write_record(HISTOGRAM_HEADER)?;
            for (i, d) in h.normalized.iter().enumerate() {
                out.serialize((h.edges[i], h.edges[i + 1], d))?;
            }
        }
        Some(ye) => {
            out.write_record(PLANAR_HISTOGRAM_HEADER)?;
            let nx = h.bins();
            for (k, d) in h.normalized.iter().enumerate() {
                let (ix, iy) = (k % nx, k / nx);
                out.serialize((h.edges[ix], h.edges[ix + 1], ye[iy], ye[iy + 1], d))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
