//! CSV output with fixed 12-significant-digit scientific formatting.

use std::io::{self, Write};

use crate::jost::JostResult;
use crate::regions::BoundaryCurve;
use crate::resonances::Resonance;
use crate::spectral::SpectralSample;

/// `x` with 12 significant digits in scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

fn row<W: Write>(w: &mut W, values: &[f64]) -> io::Result<()> {
    let cells: Vec<String> = values.iter().map(|&v| fmt_num(v)).collect();
    writeln!(w, "{}", cells.join(","))
}

pub fn write_boundary_csv<W: Write>(w: &mut W, curve: &BoundaryCurve) -> io::Result<()> {
    writeln!(w, "theta,radius,re_z,im_z")?;
    for s in &curve.samples {
        let z = s.z();
        row(w, &[s.theta, s.radius, z.re, z.im])?;
    }
    Ok(())
}

/// Rows are `(parameter, resonance)`; `phi` and `R` are empty for series-based zeros.
pub fn write_resonances_csv<W: Write>(w: &mut W, rows: &[(f64, Resonance)]) -> io::Result<()> {
    writeln!(w, "param,re_z,im_z,residual,phi,R")?;
    for (param, r) in rows {
        let head: Vec<String> = [*param, r.z.re, r.z.im, r.residual].iter().map(|&v| fmt_num(v)).collect();
        let tail = match &r.config {
            Some(cfg) => format!("{},{}", fmt_num(cfg.phi), fmt_num(cfg.r)),
            None => ",".to_string(),
        };
        writeln!(w, "{},{}", head.join(","), tail)?;
    }
    Ok(())
}

pub fn write_spectral_csv<W: Write>(w: &mut W, samples: &[SpectralSample]) -> io::Result<()> {
    writeln!(w, "mu,rho_prime")?;
    for s in samples {
        row(w, &[s.mu, s.rho_prime])?;
    }
    Ok(())
}

pub fn write_jost_csv<W: Write>(w: &mut W, results: &[JostResult]) -> io::Result<()> {
    writeln!(w, "re_z,im_z,re_Psi,im_Psi,tail_bound")?;
    for r in results {
        row(w, &[r.z.re, r.z.im, r.big_psi.re, r.big_psi.im, r.tail_bound])?;
    }
    Ok(())
}
