use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use zernlets_core::fit::{
    evaluate_on, fit_difference, hierarchy_discrepancy, least_squares_fit, plot_grid,
    residual_norms, synth_surface, wavelet_analysis, write_grid_csv, ResidualNorms,
};
use zernlets_core::mra::{reconstruct, MraLadder};
use zernlets_core::sampling::regular_points;
use zernlets_core::validate::run_validation;
use zernlets_core::wavelet::wavelet_parameters;
use zernlets_core::{
    DiskSamples, HierarchyMode, MultiscaleBasis, PointStrategy, PolarPoint, SurfaceKind,
    SynthParams, ValidateOptions,
};

use crate::output::{check_input, check_output, render, Outputs};
use crate::{
    DecomposeArgs, FitArgs, Hierarchy, Kind, Norm, PointsArgs, Strategy, SynthArgs, ValidateArgs,
};

fn strategy(s: Strategy, seed: u64) -> PointStrategy {
    match s {
        Strategy::Fekete => PointStrategy::Fekete,
        Strategy::Random => PointStrategy::Random { seed },
    }
}

fn selected(norm: Norm, r: ResidualNorms) -> (&'static str, f64) {
    match norm {
        Norm::L2 => ("l2", r.l2),
        Norm::Rms => ("rms", r.rms),
    }
}

fn load(input: &Path, normalize: bool) -> Result<DiskSamples> {
    DiskSamples::ingest(input, normalize).with_context(|| format!("reading {}", input.display()))
}

pub fn points(args: &PointsArgs) -> Result<bool> {
    if let Some(path) = &args.output {
        check_output(path)?;
    }
    let bytes = if args.wavelet {
        let Some(level) = args.level else {
            bail!("--wavelet needs --level");
        };
        let params = wavelet_parameters(level, strategy(args.strategy, args.seed))?;
        render(|out| params.write_csv(out))?
    } else {
        let set = regular_points(args.degree);
        render(|out| set.write_csv(out))?
    };
    let mut outputs = Outputs::default();
    outputs.add(args.output.as_deref(), bytes);
    outputs.commit()?;
    Ok(true)
}

pub fn fit(args: &FitArgs) -> Result<bool> {
    check_input(&args.input)?;
    check_output(&args.output)?;
    let summary_path = args
        .summary
        .clone()
        .unwrap_or_else(|| args.output.with_extension("json"));
    check_output(&summary_path)?;

    let samples = load(&args.input, args.normalize)?;
    let fit = least_squares_fit(&samples, args.degree)?;
    let coefficients = render(|out| fit.write_coefficients_csv(out))?;
    let mut summary = serde_json::to_vec_pretty(&fit.summary())?;
    summary.push(b'\n');

    let mut outputs = Outputs::default();
    outputs.add(Some(&args.output), coefficients);
    outputs.add(Some(&summary_path), summary);
    outputs.commit()?;

    let (name, value) = selected(args.norm, fit.residual);
    println!(
        "degree {}  J = {}  samples = {}",
        fit.degree,
        fit.coeffs.len(),
        samples.len()
    );
    println!("residual ({name}) = {value:.16e}");
    println!("condition = {:.16e}", fit.condition);
    Ok(true)
}

pub fn decompose(args: &DecomposeArgs) -> Result<bool> {
    check_input(&args.input)?;
    let extra: Vec<&PathBuf> = args.grid.iter().chain(&args.difference).collect();
    for path in std::iter::once(&args.output).chain(extra) {
        check_output(path)?;
    }
    MraLadder::new(args.degree)?;
    if args.difference.is_some() && args.degree < 2 {
        bail!("a difference map needs N >= 2");
    }

    let samples = load(&args.input, args.normalize)?;
    let bases = Arc::new(MultiscaleBasis::build(
        args.degree,
        strategy(args.strategy, args.seed),
    )?);
    let fit = least_squares_fit(&samples, args.degree)?;
    let decomposition = wavelet_analysis(&fit, &bases)?;
    let rebuilt = reconstruct(&decomposition);
    let wavelet_residual = residual_norms(&samples, &rebuilt);

    let mut outputs = Outputs::default();
    outputs.add(
        Some(&args.output),
        render(|out| decomposition.write_csv(out))?,
    );
    let grid = plot_grid(args.grid_res);
    if let Some(path) = &args.grid {
        let values = evaluate_on(&rebuilt, &grid);
        outputs.add(
            Some(path),
            render(|out| write_grid_csv(out, &grid, &values))?,
        );
    }
    let mut discrepancy = None;
    if let Some(path) = &args.difference {
        let low = least_squares_fit(&samples, args.degree / 2)?;
        let mode = match args.hierarchy {
            Hierarchy::Independent => HierarchyMode::Independent,
            Hierarchy::Projection => HierarchyMode::Projection,
        };
        let diff = fit_difference(&fit, &low, mode)?;
        let values = evaluate_on(&diff, &grid);
        outputs.add(
            Some(path),
            render(|out| write_grid_csv(out, &grid, &values))?,
        );
        discrepancy = Some(hierarchy_discrepancy(&fit, &low)?);
    }
    outputs.commit()?;

    println!(
        "degree {}  coefficients = {}",
        args.degree,
        decomposition.len()
    );
    println!("{:<6} {:>4} {:>24}", "level", "dim", "energy");
    println!(
        "{:<6} {:>4} {:>24.16e}",
        "V_0",
        1,
        decomposition.scaling().norm_sqr()
    );
    for level in decomposition.levels() {
        println!(
            "{:<6} {:>4} {:>24.16e}",
            format!("W_{}", level.level),
            level.coeffs.len(),
            level.energy()
        );
    }
    println!("top {} wavelet coefficients:", args.top);
    for e in decomposition.top_wavelet_coefficients(args.top) {
        let p = e.point.unwrap_or(PolarPoint { r: 0.0, phi: 0.0 });
        println!(
            "  {} slot {:>3}  r = {:.16e}  theta = {:.16e}  |c| = {:.16e}",
            e.level,
            e.slot,
            p.r,
            p.phi,
            e.value.norm()
        );
    }
    let (name, zernike) = selected(args.norm, fit.residual);
    let (_, wavelet) = selected(args.norm, wavelet_residual);
    println!("residual ({name}) zernike = {zernike:.16e}");
    println!("residual ({name}) wavelet = {wavelet:.16e}");
    println!("residual difference = {:.16e}", (zernike - wavelet).abs());
    if let Some(d) = discrepancy {
        println!("hierarchy discrepancy ||f_(N/2) - P f_N|| = {d:.16e}");
    }
    Ok(true)
}

pub fn synth(args: &SynthArgs) -> Result<bool> {
    if let Some(path) = &args.output {
        check_output(path)?;
    }
    let kind = match args.kind {
        Kind::Normal => SurfaceKind::Normal,
        Kind::Astigmatism => SurfaceKind::Astigmatism,
        Kind::Keratoconus => SurfaceKind::Keratoconus,
    };
    let mut params = SynthParams::new(kind);
    params.noise = args.noise;
    params.seed = args.seed;
    if let Some(v) = args.radius {
        params.sphere_radius = v;
    }
    if let Some(v) = args.amplitude {
        params.astigmatism = v;
    }
    if let Some(v) = args.axis {
        params.astigmatism_axis = v;
    }
    if let Some(v) = args.bump_height {
        params.bump_height = v;
    }
    if let Some(v) = args.bump_r {
        params.bump_center.r = v;
    }
    if let Some(v) = args.bump_theta {
        params.bump_center.phi = v;
    }
    if let Some(v) = args.bump_width {
        params.bump_width = v;
    }
    if let Some(v) = args.rings {
        params.rings = v;
    }
    if let Some(v) = args.meridians {
        params.meridians = v;
    }
    let samples = synth_surface(&params)?;
    let mut outputs = Outputs::default();
    outputs.add(
        args.output.as_deref(),
        render(|out| samples.write_csv(out))?,
    );
    outputs.commit()?;
    Ok(true)
}

pub fn validate(args: &ValidateArgs) -> Result<bool> {
    if let Some(path) = &args.output {
        check_output(path)?;
    }
    let report = run_validation(&ValidateOptions {
        max_degree: args.max_degree,
        seed: args.seed,
        corrupt: args.corrupt,
    })?;
    let mut json = serde_json::to_vec_pretty(&report)?;
    json.push(b'\n');
    let mut outputs = Outputs::default();
    outputs.add(args.output.as_deref(), json);
    outputs.commit()?;
    for suite in report.suites.iter().filter(|s| !s.passed) {
        eprintln!(
            "suite {} failed: max error {:.3e} exceeds {:.0e}",
            suite.name, suite.max_error, suite.tolerance
        );
    }
    Ok(report.passed)
}
