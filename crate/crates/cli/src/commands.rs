//! Subcommand implementations. Each writes its data files into the output
//! directory and returns the problems that left the results incomplete.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use sturm_resonance::export::{write_boundary_csv, write_jost_csv, write_resonances_csv, write_spectral_csv};
use sturm_resonance::jost::{evaluate, JostOptions};
use sturm_resonance::regions::{
    boundary_curve, certify_general, dirichlet_sector, sector_certificate, theta_grid, BoundaryCurve, Criterion,
    SectorCertificate,
};
use sturm_resonance::resonances::{find_resonances, track_resonance, Resonance, SearchReport, Shooter};
use sturm_resonance::spectral::{concentration_scan, spectral_density, ConcentrationPoint, SpectralSample};
use sturm_resonance::{AnalyticPotential, Error};

use crate::config::{linspace, RegionParams, RunConfig};
use crate::CliError;

/// Problems that leave a run with partial results.
pub type Issues = Vec<String>;

fn lib_error(e: Error) -> CliError {
    match e {
        Error::InvalidParameter(_) | Error::OutOfSector { .. } | Error::OutOfContinuationSector { .. } => {
            CliError::Config(e.to_string())
        }
        e => CliError::Numerical(e.to_string()),
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_with<F>(dir: &Path, name: &str, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let mut w = create(dir, name)?;
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    write_with(dir, name, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    })
}

fn missing(section: &str) -> CliError {
    CliError::Config(format!("config has no `{section}` section"))
}

fn jost_options(cfg: &RunConfig) -> JostOptions {
    JostOptions::with_tol(cfg.tol)
}

/// `|c|` of the potential, required nonzero for the scaled outputs.
fn strength_scale(pot: &AnalyticPotential) -> Result<f64, CliError> {
    let c = pot.strength().abs();
    if c > 0.0 {
        Ok(c)
    } else {
        Err(CliError::Config("normalize_c needs a potential with nonzero strength".into()))
    }
}

fn scaled(r: &Resonance, s: f64) -> Resonance {
    Resonance { z: r.z / s, lambda: r.lambda / (s * s), ..r.clone() }
}

fn scaled_curve(curve: &BoundaryCurve, s: f64) -> BoundaryCurve {
    let mut out = curve.clone();
    for p in &mut out.samples {
        p.radius /= s;
    }
    out
}

pub fn jost(cfg: &RunConfig, out: &Path) -> Result<Issues, CliError> {
    let params = cfg.jost.as_ref().ok_or_else(|| missing("jost"))?;
    let mut zs: Vec<Complex64> = params.grid.map(|g| g.points()).unwrap_or_default();
    zs.extend(params.points.iter().map(|&p| Complex64::from(p)));
    let opts = jost_options(cfg);
    let results: Vec<_> = zs.par_iter().map(|&z| (z, evaluate(&cfg.potential, z, cfg.alpha, params.method, &opts))).collect();
    let mut ok = Vec::new();
    let mut issues = Issues::new();
    for (z, r) in results {
        match r {
            Ok(r) => ok.push(r),
            Err(e) => issues.push(format!("z = {z}: {e}")),
        }
    }
    write_with(out, "jost.csv", |w| write_jost_csv(w, &ok))?;
    Ok(issues)
}

#[derive(Serialize)]
struct RegionSummary {
    criterion: Criterion,
    sector: Option<SectorCertificate>,
    /// Dirichlet sector angle, when the Dirichlet criterion applies.
    dirichlet_theta1: Option<f64>,
    /// Set for `q = 0`, where the curve collapses to radius 0.
    degenerate: bool,
    failed: Vec<(f64, String)>,
}

fn region_curve(cfg: &RunConfig, params: &RegionParams) -> Result<BoundaryCurve, CliError> {
    let thetas = params.thetas.clone().unwrap_or_else(|| theta_grid(&cfg.potential, params.n_theta));
    boundary_curve(&cfg.potential, cfg.alpha, params.criterion, &thetas, cfg.tol).map_err(lib_error)
}

pub fn region(cfg: &RunConfig, out: &Path) -> Result<Issues, CliError> {
    let params = cfg.region.clone().unwrap_or_default();
    let pot = &cfg.potential;
    let curve = region_curve(cfg, &params)?;
    let mut issues: Issues = curve.failed.iter().map(|(t, e)| format!("theta = {t}: {e}")).collect();
    write_with(out, "boundary.csv", |w| write_boundary_csv(w, &curve))?;
    if cfg.normalize_c {
        let s = strength_scale(pot)?;
        write_with(out, "boundary_scaled.csv", |w| write_boundary_csv(w, &scaled_curve(&curve, s)))?;
    }
    let sector = match sector_certificate(pot, cfg.alpha, cfg.tol) {
        Ok(s) => Some(s),
        Err(e) => {
            issues.push(format!("sector certificate: {e}"));
            None
        }
    };
    let dirichlet_theta1 = match params.criterion {
        Criterion::Dirichlet => match dirichlet_sector(pot, cfg.tol) {
            Ok(t) => t,
            Err(e) => {
                issues.push(format!("dirichlet sector: {e}"));
                None
            }
        },
        Criterion::General => None,
    };
    let summary = RegionSummary {
        criterion: params.criterion,
        sector,
        dirichlet_theta1,
        degenerate: pot.is_identically_zero(),
        failed: curve.failed.clone(),
    };
    write_json(out, "sector.json", &summary)?;
    Ok(issues)
}

#[derive(Serialize)]
struct ResonanceRun {
    searches: Vec<SearchReport>,
    polished: Vec<Resonance>,
    /// Rows withheld because the non-resonance certificate holds there.
    withheld: Vec<(Resonance, String)>,
}

/// Keeps the resonances at which the certificate does not hold.
fn certified_out(cfg: &RunConfig, found: Vec<Resonance>, withheld: &mut Vec<(Resonance, String)>) -> Vec<Resonance> {
    let mut keep = Vec::new();
    for r in found {
        match certify_general(&cfg.potential, cfg.alpha, r.z, cfg.tol) {
            Ok(v) if !v.certified => keep.push(r),
            Ok(_) => withheld.push((r, "inside the certified resonance-free region".into())),
            Err(e) => withheld.push((r, format!("certificate check failed: {e}"))),
        }
    }
    keep
}

pub fn resonance(cfg: &RunConfig, out: &Path) -> Result<Issues, CliError> {
    let params = cfg.resonance.as_ref().ok_or_else(|| missing("resonance"))?;
    if params.regions.is_empty() && params.seeds.is_empty() {
        return Err(CliError::Config("resonance needs `regions` or `seeds`".into()));
    }
    let pot = &cfg.potential;
    let scale = if cfg.normalize_c { Some(strength_scale(pot)?) } else { None };
    let mut issues = Issues::new();
    let mut run = ResonanceRun { searches: vec![], polished: vec![], withheld: vec![] };
    let mut found = Vec::new();
    for region in &params.regions {
        let rep = find_resonances(pot, cfg.alpha, &cfg.scaling, region, &params.search).map_err(lib_error)?;
        issues.extend(rep.unresolved.iter().map(|(r, e)| format!("unresolved {r:?}: {e}")));
        found.extend(rep.resonances.iter().cloned());
        run.searches.push(rep);
    }
    if !params.seeds.is_empty() {
        let sh = Shooter::new(pot, cfg.alpha, &cfg.scaling).map_err(lib_error)?;
        for &seed in &params.seeds {
            match sh.polish(seed.into(), &params.search.newton) {
                Ok(r) => {
                    if !found.iter().any(|f: &Resonance| (f.z - r.z).norm() <= params.search.dedup_distance) {
                        found.push(r.clone());
                    }
                    run.polished.push(r);
                }
                Err(e) => issues.push(format!("seed {}: {e}", Complex64::from(seed))),
            }
        }
    }
    let kept = certified_out(cfg, found, &mut run.withheld);
    issues.extend(run.withheld.iter().map(|(r, why)| format!("withheld {}: {why}", r.z)));
    let c = pot.strength();
    let rows: Vec<(f64, Resonance)> = kept.iter().map(|r| (c, r.clone())).collect();
    write_with(out, "resonances.csv", |w| write_resonances_csv(w, &rows))?;
    write_json(out, "resonances.json", &run)?;
    if let Some(s) = scale {
        let rows: Vec<_> = rows.iter().map(|(p, r)| (*p, scaled(r, s))).collect();
        write_with(out, "resonances_scaled.csv", |w| write_resonances_csv(w, &rows))?;
        let region = RegionParams { n_theta: params.overlay_n_theta, ..RegionParams::default() };
        let curve = region_curve(cfg, &region)?;
        issues.extend(curve.failed.iter().map(|(t, e)| format!("overlay theta = {t}: {e}")));
        write_with(out, "boundary_scaled.csv", |w| write_boundary_csv(w, &scaled_curve(&curve, s)))?;
    }
    Ok(issues)
}

#[derive(Serialize)]
struct TrackRun<'a> {
    points: &'a [(f64, Resonance)],
    stopped: Option<String>,
}

pub fn track(cfg: &RunConfig, out: &Path) -> Result<Issues, CliError> {
    let params = cfg.track.as_ref().ok_or_else(|| missing("track"))?;
    if params.params.contains(&0.0) && cfg.normalize_c {
        return Err(CliError::Config("normalize_c needs nonzero track parameters".into()));
    }
    let tr = track_resonance(&cfg.potential, &params.params, cfg.alpha, &cfg.scaling, params.seed.into(), &params.options)
        .map_err(lib_error)?;
    let mut issues = Issues::new();
    let mut withheld = Vec::new();
    let mut rows = Vec::new();
    for (c, r) in &tr.points {
        let pot = cfg.potential.with_strength(*c).map_err(lib_error)?;
        match certify_general(&pot, cfg.alpha, r.z, cfg.tol) {
            Ok(v) if !v.certified => rows.push((*c, r.clone())),
            Ok(_) => withheld.push(format!("c = {c}: {} inside the certified region", r.z)),
            Err(e) => withheld.push(format!("c = {c}: certificate check failed: {e}")),
        }
    }
    issues.extend(withheld);
    if let Some(e) = &tr.stopped {
        issues.push(format!("track stopped: {e}"));
    }
    write_with(out, "track.csv", |w| write_resonances_csv(w, &rows))?;
    write_json(out, "track.json", &TrackRun { points: &rows, stopped: tr.stopped.as_ref().map(|e| e.to_string()) })?;
    if cfg.normalize_c {
        let scaled_rows: Vec<_> = rows.iter().map(|(c, r)| (*c, scaled(r, c.abs()))).collect();
        write_with(out, "track_scaled.csv", |w| write_resonances_csv(w, &scaled_rows))?;
    }
    Ok(issues)
}

#[derive(Serialize)]
struct SpectralRun {
    concentration: Vec<ConcentrationPoint>,
    failed: Vec<(f64, String)>,
}

pub fn spectral(cfg: &RunConfig, out: &Path) -> Result<Issues, CliError> {
    let params = cfg.spectral.as_ref().ok_or_else(|| missing("spectral"))?;
    let (lo, hi) = params.mu_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(CliError::Config(format!("mu_range ({lo}, {hi}) must satisfy 0 < lo < hi")));
    }
    let opts = jost_options(cfg);
    let mus = linspace(lo, hi, params.grid_n);
    let results: Vec<_> = mus.par_iter().map(|&mu| (mu, spectral_density(&cfg.potential, cfg.alpha, mu, &opts))).collect();
    let mut samples = Vec::new();
    let mut failed = Vec::new();
    for (mu, r) in results {
        match r {
            Ok(rho_prime) => samples.push(SpectralSample { mu, rho_prime }),
            Err(e) => failed.push((mu, e.to_string())),
        }
    }
    write_with(out, "spectral.csv", |w| write_spectral_csv(w, &samples))?;
    let mut issues: Issues = failed.iter().map(|(mu, e)| format!("mu = {mu}: {e}")).collect();
    let concentration = match concentration_scan(&cfg.potential, cfg.alpha, (lo, hi), params.grid_n, &opts) {
        Ok(c) => c,
        Err(e) => {
            issues.push(format!("concentration scan: {e}"));
            vec![]
        }
    };
    write_json(out, "concentration.json", &SpectralRun { concentration, failed })?;
    Ok(issues)
}
