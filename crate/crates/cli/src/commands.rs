use std::fs;
use std::io::{self, BufWriter, Write};

use ising_core::eigensolve::{diagonalize, CacheLookup, EigenCache, EigenDecomposition};
use ising_core::empirics::{
    compare_with, default_level_count, empirical_moments, goe_surrogate, parity_resolved_spectra, poisson_surrogate,
    spacing_ratio, windowed_coefficient_stats, CoefficientOptions, ComparisonReport, EmpiricalSeries, EnergyWindowing,
    SpacingStats, WindowPolicy,
};
use ising_core::format::float;
use ising_core::hamiltonian::build_sector_hamiltonian;
use ising_core::spin_basis::{enumerate_orbits, sector_dimension_approx, MomentumBasis, SpinConfig};
use ising_core::statmodel::{energy_grid, PredictionCurve, Predictor, SectorKind, StrengthModel};
use ising_core::{Error, ModelParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Corrections, Format, Provenance, RunConfig};
use crate::CliError;

type Writer<'a> = &'a mut dyn Write;

/// Writes `name.ext` plus the provenance block into the output directory, or
/// the body alone to standard output.
fn emit(
    command: &str,
    config: &RunConfig,
    name: &str,
    ext: &str,
    body: impl FnOnce(Writer<'_>) -> ising_core::Result<()>,
) -> Result<(), CliError> {
    match &config.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let mut file = BufWriter::new(fs::File::create(dir.join(format!("{name}.{ext}")))?);
            body(&mut file)?;
            file.flush()?;
            let provenance = serde_json::to_vec_pretty(&Provenance::new(command, config)).map_err(Error::from)?;
            fs::write(dir.join(format!("{command}.provenance.json")), provenance)?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = BufWriter::new(stdout.lock());
            body(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn json<T: Serialize + ?Sized>(value: &T, out: Writer<'_>) -> ising_core::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn bases(config: &RunConfig) -> Result<Vec<MomentumBasis>, CliError> {
    let orbits = enumerate_orbits(config.sites)?;
    Ok(config
        .momenta
        .iter()
        .map(|&k| MomentumBasis::from_orbits(config.sites, k, &orbits))
        .collect::<ising_core::Result<_>>()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Source {
    Cache,
    Computed,
}

/// Cached decomposition, computed and stored on a miss. Stale or corrupted
/// entries are recomputed with a warning.
fn decomposition(
    cache: &EigenCache,
    basis: &MomentumBasis,
    params: &ModelParams,
) -> Result<(EigenDecomposition, Source), CliError> {
    let k = basis.momentum();
    match cache.load(params, k) {
        Ok(CacheLookup::Hit(d)) => return Ok((d, Source::Cache)),
        Ok(CacheLookup::Miss) => {}
        Ok(CacheLookup::VersionMismatch { found }) => {
            log::warn!("cache entry for k={k} has version {found}; recomputing")
        }
        Err(e @ Error::CacheCorrupted { .. }) => log::warn!("{e}; recomputing"),
        Err(e) => return Err(e.into()),
    }
    let d = diagonalize(&build_sector_hamiltonian(basis, params)?)?;
    cache.store(&d)?;
    Ok((d, Source::Computed))
}

fn decompositions(config: &RunConfig, bases: &[MomentumBasis]) -> Result<Vec<(EigenDecomposition, Source)>, CliError> {
    let params = config.params()?;
    let cache = EigenCache::new(&config.cache_dir)?;
    bases.par_iter().map(|b| decomposition(&cache, b, &params)).collect()
}

fn windowing(config: &RunConfig, energies: &[f64]) -> Result<EnergyWindowing, CliError> {
    let policy = config
        .windowing
        .unwrap_or(WindowPolicy::FixedLevelCount(default_level_count(energies.len())));
    Ok(EnergyWindowing::new(energies, policy)?)
}

fn predictor<'a>(
    corrections: Corrections,
    model: &'a StrengthModel,
    basis: &'a MomentumBasis,
    counts: &'a ising_core::spin_basis::SectorCounts,
) -> Predictor<'a> {
    match corrections {
        Corrections::None => Predictor::uncorrected(model, SectorKind::of(basis.sites(), basis.momentum())),
        _ => Predictor::corrected(model, counts),
    }
}

#[derive(Serialize)]
struct SectorInfo {
    k: usize,
    dim: usize,
    approx_dim: f64,
    n_inv: usize,
    delta: f64,
    self_conjugate: bool,
    nu_tot: Vec<u64>,
    nu_inv: Vec<u64>,
}

pub fn basis_info(command: &str, config: &RunConfig) -> Result<(), CliError> {
    let approx = sector_dimension_approx(config.sites);
    let rows: Vec<SectorInfo> = bases(config)?
        .iter()
        .map(|b| {
            let counts = b.counts();
            SectorInfo {
                k: b.momentum(),
                dim: b.dim(),
                approx_dim: approx,
                n_inv: b.invariant_count(),
                delta: counts.delta(),
                self_conjugate: b.is_self_conjugate(),
                nu_tot: counts.nu_tot,
                nu_inv: counts.nu_inv,
            }
        })
        .collect();
    match config.format {
        Format::Json => emit(command, config, "basis-info", "json", |out| json(&rows, out)),
        Format::Csv => emit(command, config, "basis-info", "csv", |out| {
            writeln!(out, "k,dim,approx_dim,n_inv,delta,self_conjugate")?;
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.k,
                    r.dim,
                    float(r.approx_dim),
                    r.n_inv,
                    float(r.delta),
                    r.self_conjugate
                )?;
            }
            Ok(())
        }),
    }
}

#[derive(Serialize)]
struct DiagRow {
    k: usize,
    dim: usize,
    source: Source,
    e_min: f64,
    e_max: f64,
}

pub fn diag(command: &str, config: &RunConfig) -> Result<(), CliError> {
    let bases = bases(config)?;
    let rows: Vec<DiagRow> = decompositions(config, &bases)?
        .into_iter()
        .map(|(d, source)| DiagRow {
            k: d.momentum,
            dim: d.dim(),
            source,
            e_min: d.energies.first().copied().unwrap_or(f64::NAN),
            e_max: d.energies.last().copied().unwrap_or(f64::NAN),
        })
        .collect();
    match config.format {
        Format::Json => emit(command, config, "diag", "json", |out| json(&rows, out)),
        Format::Csv => emit(command, config, "diag", "csv", |out| {
            writeln!(out, "k,dim,source,e_min,e_max")?;
            for r in &rows {
                let source = if r.source == Source::Cache { "cache" } else { "computed" };
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.k,
                    r.dim,
                    source,
                    float(r.e_min),
                    float(r.e_max)
                )?;
            }
            Ok(())
        }),
    }
}

/// One strength model per requested correction, in request order.
fn models(config: &RunConfig) -> Result<Vec<(Corrections, StrengthModel)>, CliError> {
    let params = config.params()?;
    config
        .corrections
        .iter()
        .map(|&c| Ok((c, StrengthModel::new(&params, c.variant())?)))
        .collect()
}

/// Union of `E_n +- 4 sigma_n` over all up counts.
fn energy_range(model: &StrengthModel) -> (f64, f64) {
    model
        .moments
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| {
            (lo.min(m.energy - 4.0 * m.sigma()), hi.max(m.energy + 4.0 * m.sigma()))
        })
}

pub fn predict(command: &str, config: &RunConfig) -> Result<(), CliError> {
    let bases = bases(config)?;
    let models = models(config)?;
    let mut curves = Vec::new();
    for basis in &bases {
        let counts = basis.counts();
        for (corrections, model) in &models {
            let (lo, hi) = energy_range(model);
            let grid = energy_grid(lo, hi, config.grid);
            let p = predictor(*corrections, model, basis, &counts);
            curves.push(PredictionCurve::compute(
                &p,
                basis.momentum(),
                &grid,
                &config.orders,
                corrections.label(),
            ));
        }
    }
    match config.format {
        Format::Json => emit(command, config, "predict", "json", |out| json(&curves, out)),
        Format::Csv => emit(command, config, "predict", "csv", |out| {
            if let Some(first) = curves.first() {
                first.write_csv_header(&mut *out)?;
            }
            for c in &curves {
                c.write_csv_rows(&mut *out)?;
            }
            Ok(())
        }),
    }
}

pub fn compare(command: &str, config: &RunConfig) -> Result<(), CliError> {
    let mut config = config.clone();
    if !config.corrections.contains(&Corrections::None) {
        config.corrections.insert(0, Corrections::None);
    }
    let bases = bases(&config)?;
    let decomps = decompositions(&config, &bases)?;
    let models = models(&config)?;
    let mut reports: Vec<ComparisonReport> = Vec::new();
    for (basis, (d, _)) in bases.iter().zip(&decomps) {
        let counts = basis.counts();
        let windows = windowing(&config, &d.energies)?;
        let m2 = empirical_moments(d, 2.0, &windows)?;
        let pr = EmpiricalSeries::new("Pr", m2.iter().map(|w| (w.mean_energy, 1.0 / w.direct)));
        let mut moments = Vec::new();
        for &q in &config.orders {
            let m = empirical_moments(d, q, &windows)?;
            moments.push((
                q,
                EmpiricalSeries::new(format!("M_{q}"), m.iter().map(|w| (w.mean_energy, w.direct))),
            ));
        }
        for (corrections, model) in &models {
            let p = predictor(*corrections, model, basis, &counts);
            let label = |quantity: &str| format!("k={}:{}:{quantity}", basis.momentum(), corrections.label());
            reports.push(compare_with(
                |e| Some(p.participation_ratio(e)),
                &pr,
                config.bulk_fraction,
                &label("Pr"),
            )?);
            for (q, series) in &moments {
                reports.push(compare_with(
                    |e| Some(p.moment(e, *q)),
                    series,
                    config.bulk_fraction,
                    &label(&series.quantity),
                )?);
            }
        }
    }
    let write_csv = |out: Writer<'_>| -> ising_core::Result<()> {
        writeln!(out, "E,empirical,predicted,deviation,in_bulk,label")?;
        for r in &reports {
            for p in &r.points {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    float(p.energy),
                    float(p.empirical),
                    float(p.predicted),
                    float(p.deviation),
                    p.in_bulk,
                    r.label
                )?;
            }
        }
        Ok(())
    };
    match (&config.out, config.format) {
        (Some(_), _) => {
            emit(command, &config, "compare", "json", |out| json(&reports, out))?;
            emit(command, &config, "compare", "csv", write_csv)
        }
        (None, Format::Json) => emit(command, &config, "compare", "json", |out| json(&reports, out)),
        (None, Format::Csv) => emit(command, &config, "compare", "csv", write_csv),
    }
}

fn symbol_index(symbol: Option<&str>, basis: &MomentumBasis) -> Result<usize, CliError> {
    let Some(symbol) = symbol else {
        return Ok(basis.dim() / 2);
    };
    if symbol.len() == basis.sites() && symbol.chars().all(|c| c == '0' || c == '1') {
        let config: SpinConfig = symbol.parse()?;
        return basis
            .locate(config)
            .map(|(i, _)| i)
            .ok_or_else(|| CliError::usage(format!("{symbol} has no state in sector k={}", basis.momentum())));
    }
    let index: usize = symbol
        .parse()
        .map_err(|_| CliError::usage(format!("symbol {symbol:?} is neither a spin string nor an index")))?;
    if index >= basis.dim() {
        return Err(CliError::usage(format!(
            "symbol index {index} outside sector of dimension {}",
            basis.dim()
        )));
    }
    Ok(index)
}

#[derive(Serialize)]
struct CoefficientReport {
    k: usize,
    symbol: usize,
    representative: String,
    windows: Vec<ising_core::empirics::CoefficientWindowStats>,
}

pub fn coeff_hist(command: &str, config: &RunConfig) -> Result<(), CliError> {
    let bases = bases(config)?;
    let decomps = decompositions(config, &bases)?;
    let mut reports = Vec::new();
    for (basis, (d, _)) in bases.iter().zip(&decomps) {
        let symbol = symbol_index(config.symbol.as_deref(), basis)?;
        let windows = windowing(config, &d.energies)?;
        let stats = windowed_coefficient_stats(
            d,
            symbol,
            &windows,
            basis.is_self_conjugate(),
            &CoefficientOptions::default(),
        )?;
        reports.push(CoefficientReport {
            k: basis.momentum(),
            symbol,
            representative: basis.state(symbol).representative().to_string(),
            windows: stats,
        });
    }
    match config.format {
        Format::Json => emit(command, config, "coeff-hist", "json", |out| json(&reports, out)),
        Format::Csv => emit(command, config, "coeff-hist", "csv", |out| {
            writeln!(
                out,
                "k,symbol,window,E_lo,E_hi,reduced_chi2,insufficient,bin_lo,bin_hi,density"
            )?;
            for r in &reports {
                for (w, s) in r.windows.iter().enumerate() {
                    for (b, density) in s.histogram.density.iter().enumerate() {
                        writeln!(
                            out,
                            "{},{},{w},{},{},{},{},{},{},{}",
                            r.k,
                            r.representative,
                            float(s.lo),
                            float(s.hi),
                            float(s.reduced_chi2),
                            s.insufficient,
                            float(s.histogram.edges[b]),
                            float(s.histogram.edges[b + 1]),
                            float(*density)
                        )?;
                    }
                }
            }
            Ok(())
        }),
    }
}

#[derive(Serialize)]
struct SpacingRow {
    k: Option<usize>,
    subset: String,
    #[serde(flatten)]
    stats: SpacingStats,
}

/// Sizes of the surrogate ensembles reported next to the chain.
const SURROGATE_DIM: usize = 400;
const SURROGATE_SAMPLES: usize = 20;

pub fn spacing(command: &str, config: &RunConfig) -> Result<(), CliError> {
    let bases = bases(config)?;
    let decomps = decompositions(config, &bases)?;
    let mut rows = Vec::new();
    for (basis, (d, _)) in bases.iter().zip(&decomps) {
        let k = Some(basis.momentum());
        if basis.is_self_conjugate() {
            let split = parity_resolved_spectra(basis, d)?;
            let even = spacing_ratio(&split.even, config.bulk_fraction)?;
            let odd = spacing_ratio(&split.odd, config.bulk_fraction)?;
            rows.push(SpacingRow {
                k,
                subset: "even".into(),
                stats: even,
            });
            rows.push(SpacingRow {
                k,
                subset: "odd".into(),
                stats: odd,
            });
            rows.push(SpacingRow {
                k,
                subset: "pooled".into(),
                stats: SpacingStats::pooled(&[even, odd]),
            });
        } else {
            rows.push(SpacingRow {
                k,
                subset: "all".into(),
                stats: spacing_ratio(&d.energies, config.bulk_fraction)?,
            });
        }
    }
    let goe = goe_surrogate(SURROGATE_DIM, SURROGATE_SAMPLES, config.bulk_fraction, config.seed)?;
    let poisson = poisson_surrogate(SURROGATE_DIM, SURROGATE_SAMPLES, config.bulk_fraction, config.seed)?;
    rows.push(SpacingRow {
        k: None,
        subset: "goe-surrogate".into(),
        stats: goe,
    });
    rows.push(SpacingRow {
        k: None,
        subset: "poisson-surrogate".into(),
        stats: poisson,
    });
    match config.format {
        Format::Json => emit(command, config, "spacing", "json", |out| json(&rows, out)),
        Format::Csv => emit(command, config, "spacing", "csv", |out| {
            writeln!(out, "k,subset,mean_r,ratios,excluded")?;
            for r in &rows {
                let k = r.k.map_or(String::new(), |k| k.to_string());
                writeln!(
                    out,
                    "{k},{},{},{},{}",
                    r.subset,
                    float(r.stats.mean_r),
                    r.stats.ratios,
                    r.stats.excluded
                )?;
            }
            Ok(())
        }),
    }
}
