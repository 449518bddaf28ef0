use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use fraclest::apriori::{
    entropy_at_opt, evaluate_smag_input, pdf_compare, scatter_export, sweep_alpha_input, write_sweep_csv,
    AprioriInput, AprioriReport,
};
use fraclest::dns::{self, compute_stats, write_stats_csv, Forcing, SolverConfig, TimeStep};
use fraclest::filter::{true_sgs_stress, BoxFilterSpec};
use fraclest::fractional::{fsgs_divergence, FractionalExponent, FsgsParams};
use fraclest::io::{FieldFile, FieldMeta};
use fraclest::smagorinsky::{smagorinsky_divergence, smagorinsky_stress, SmagorinskyParams};
use fraclest::surrogate::{read_samples_csv, write_surface_csv, KernelChoice, KernelParams, KrigingModel};
use fraclest::{Error, GridSpec, Result, ScalarField, VectorField};

use crate::config::{
    parse_range, AprioriArgs, Command, DnsArgs, FilterArgs, ForcingKind, GenIcArgs, KrigingArgs, ModelKind, SmagArgs,
};

pub fn run(cmd: &Command) -> Result<()> {
    match cmd {
        Command::GenIc(a) => gen_ic(a),
        Command::Dns(a) => run_dns(a),
        Command::Filter(a) => filter(a),
        Command::Apriori(a) => apriori(a),
        Command::Smag(a) => smag(a),
        Command::Kriging(a) => kriging(a),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn load_vector(path: &Path) -> Result<(VectorField, FieldMeta)> {
    let file = FieldFile::load(path)?;
    let meta = file.meta();
    Ok((file.into_vector()?, meta))
}

fn gen_ic(a: &GenIcArgs) -> Result<()> {
    let grid = GridSpec::with_length(a.n, a.length)?;
    let v = dns::generate_ic(grid, a.energy, a.peak_k, a.seed)?;
    let meta = FieldMeta {
        time: 0.0,
        nu: a.nu,
        seed: Some(a.seed),
    };
    FieldFile::from_vector(&v, meta).save(&a.output)?;
    log::info!("wrote {} ({}³, K = {})", a.output.display(), a.n, a.energy);
    Ok(())
}

fn run_dns(a: &DnsArgs) -> Result<()> {
    let (ic, meta) = load_vector(&a.ic)?;
    let grid = *ic.grid();
    let time_step = match a.dt {
        Some(dt) => TimeStep::Fixed { dt },
        None => TimeStep::Cfl {
            cfl: a.cfl,
            dt_max: a.dt_max,
        },
    };
    let mut cfg = SolverConfig::new(grid, a.nu, time_step, a.t_end);
    cfg.seed = meta.seed.unwrap_or(0);
    cfg.snapshot_times = a.snap.clone();
    cfg.stats_every = a.stats_every;
    let out = match a.forcing {
        ForcingKind::None => dns::run_decaying(&cfg, &ic)?,
        ForcingKind::Shell => {
            let power = match a.power {
                Some(p) => p,
                None => compute_stats(&ic, a.nu, 0.0)?.eps,
            };
            cfg.forcing = Forcing::LowShell { k_f: a.k_f, power };
            dns::run_forced(&cfg, &ic)?
        }
    };
    fs::create_dir_all(&a.out_dir)?;
    for (t, v) in &out.snapshots {
        let path = a.out_dir.join(format!("snap_t{t}.vfld"));
        let meta = FieldMeta {
            time: *t,
            nu: a.nu,
            seed: meta.seed,
        };
        FieldFile::from_vector(v, meta).save(&path)?;
        log::info!("wrote {}", path.display());
    }
    if let Some(path) = &a.stats {
        write_stats_csv(&out.history, create(path)?)?;
    }
    if let Some(last) = out.history.last() {
        log::info!(
            "t = {}: K = {:.5e}, eps = {:.5e}, Re_lambda = {:.2}, kmax*eta = {:.3}",
            last.time,
            last.k,
            last.eps,
            last.re_lambda,
            last.k_max_eta
        );
    }
    Ok(())
}

fn filter(a: &FilterArgs) -> Result<()> {
    let (v, meta) = load_vector(&a.input)?;
    let pair = true_sgs_stress(&v, &BoxFilterSpec::new(a.ldelta)?)?;
    FieldFile::from_vector(&pair.filtered, meta).save(&a.output)?;
    if let Some(path) = &a.stress {
        FieldFile::from_tensor(&pair.residual_stress, meta).save(path)?;
    }
    Ok(())
}

fn write_pdf_and_scatter(a: &AprioriArgs, truth: &ScalarField, model: &ScalarField) -> Result<()> {
    if a.pdf.is_none() && a.scatter.is_none() {
        return Ok(());
    }
    if model.max_abs() == 0.0 {
        log::warn!("model force vanishes identically; skipping PDF and scatter output");
        return Ok(());
    }
    if let Some(path) = &a.pdf {
        let h = pdf_compare(truth, model, a.pdf_bins)?;
        h.write_csv(create(path)?)?;
        log::info!(
            "PDF mass beyond 8 sigma: truth {:.3e}, model {:.3e}",
            h.outside_truth,
            h.outside_model
        );
    }
    if let Some(path) = &a.scatter {
        let s = scatter_export(truth, model, a.scatter_n, a.seed)?;
        if s.clipped {
            log::warn!("scatter size clipped to the {} grid points", s.pairs.len());
        }
        s.write_csv(create(path)?)?;
    }
    Ok(())
}

fn apriori(a: &AprioriArgs) -> Result<()> {
    let (v, meta) = load_vector(&a.input)?;
    let nu = a.nu.unwrap_or(meta.nu);
    let spec = BoxFilterSpec::new(a.ldelta)?;
    let input = AprioriInput::from_dns(&v, &spec)?;
    let re_lambda = compute_stats(&v, nu, meta.time).ok().map(|s| s.re_lambda);
    let case = a.case.clone().unwrap_or_else(|| {
        a.input
            .file_stem()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned())
    });

    let (report, model) = match a.model {
        ModelKind::Fsgs => {
            let alphas = parse_range(&a.alpha).map_err(Error::InvalidParameter)?;
            let base = FsgsParams {
                rho: a.rho,
                nu,
                agitation_speed: a.agitation_speed,
                c_bar: a.c_bar,
                alpha: FractionalExponent::new(alphas[0])?,
            };
            base.validate()?;
            let sweep = sweep_alpha_input(&input, &alphas, &base, a.r_tol)?;
            let entropy = match entropy_at_opt(&input, &base, &sweep) {
                Ok(e) => Some(e),
                Err(e) => {
                    log::warn!("entropy bound unavailable: {e}");
                    None
                }
            };
            if let Some(path) = &a.sweep {
                write_sweep_csv(&sweep, create(path)?)?;
            }
            let best = &sweep.results[sweep.opt_index()];
            log::info!(
                "alpha_opt = {} (rho1 = {:.4}); {}",
                sweep.alpha_opt,
                best.rho[0],
                sweep.selection_note
            );
            let model = fsgs_divergence(&input.filtered, &base.with_alpha(sweep.alpha_opt)?)?;
            (
                AprioriReport::from_sweep(&case, re_lambda, a.ldelta, &sweep, entropy, a.seed),
                model,
            )
        }
        ModelKind::Smag => {
            let p = SmagorinskyParams::for_box_filter(a.cs, &spec, v.grid())?;
            let r = evaluate_smag_input(&input, &p)?;
            log::info!("Smagorinsky rho = {:?}", r.rho);
            if a.sweep.is_some() {
                log::warn!("--sweep applies to the FSGS model only");
            }
            (
                AprioriReport::from_smagorinsky(&case, re_lambda, a.ldelta, &r, a.seed),
                smagorinsky_divergence(&input.filtered, &p),
            )
        }
    };
    if let Some(path) = &a.report {
        let mut w = create(path)?;
        serde_json::to_writer_pretty(&mut w, &report)?;
        std::io::Write::write_all(&mut w, b"\n")?;
    }
    write_pdf_and_scatter(a, input.truth_div.component(0), model.component(0))
}

fn smag(a: &SmagArgs) -> Result<()> {
    apriori(&a.as_apriori())?;
    if a.force.is_none() && a.stress.is_none() {
        return Ok(());
    }
    let (v, meta) = load_vector(&a.input)?;
    let spec = BoxFilterSpec::new(a.ldelta)?;
    let p = SmagorinskyParams::for_box_filter(a.cs, &spec, v.grid())?;
    let filtered = true_sgs_stress(&v, &spec)?.filtered;
    if let Some(path) = &a.force {
        FieldFile::from_vector(&smagorinsky_divergence(&filtered, &p), meta).save(path)?;
    }
    if let Some(path) = &a.stress {
        FieldFile::from_tensor(&smagorinsky_stress(&filtered, &p), meta).save(path)?;
    }
    Ok(())
}

fn kriging(a: &KrigingArgs) -> Result<()> {
    let samples = read_samples_csv(File::open(&a.samples)?)?;
    let kernel = match &a.theta {
        Some(theta) => {
            if theta.len() != 2 {
                return Err(Error::InvalidParameter(format!(
                    "--theta takes two length scales, got {}",
                    theta.len()
                )));
            }
            let sigma2 = a.sigma2.unwrap_or_else(|| {
                let n = samples.len() as f64;
                let m = samples.iter().map(|s| s.alpha_opt).sum::<f64>() / n;
                let var = samples.iter().map(|s| (s.alpha_opt - m).powi(2)).sum::<f64>() / n;
                if var > 0.0 {
                    var
                } else {
                    1.0
                }
            });
            KernelChoice::Fixed(KernelParams {
                theta: [theta[0], theta[1]],
                sigma2,
            })
        }
        None => KernelChoice::Auto,
    };
    let model = KrigingModel::fit(&samples, kernel, a.nugget)?;
    let ld = parse_range(&a.grid_ld).map_err(Error::InvalidParameter)?;
    let re = parse_range(&a.grid_re).map_err(Error::InvalidParameter)?;
    let surface = model.surface(&ld, &re);
    let clamped = surface.iter().filter(|p| p.prediction.clamped).count();
    if clamped > 0 {
        log::warn!("{clamped} of {} predictions clamped to (0, 1]", surface.len());
    }
    write_surface_csv(&surface, create(&a.output)?)?;
    let k = model.kernel();
    log::info!(
        "kriging: theta = {:?}, sigma2 = {:.4e}, nugget = {:e}",
        k.theta,
        k.sigma2,
        model.nugget()
    );
    Ok(())
}
