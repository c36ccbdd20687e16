//! The four experiments. Each returns its files as in-memory text plus a
//! JSON summary for the manifest; nothing here touches the filesystem.

use std::f64::consts::PI;

use serde_json::{json, Value};

use fanowave_core::{
    dynamics::{
        realspace_envelope, AnalyticEvolution, Direction, OdeOracle, SingleExcitationState,
        DEFAULT_CACHE_SPACING,
    },
    effective_rate,
    smatrix::{ScatterCoeffs, Scatterer},
    twophoton::{
        auto_grid, density_moments, hom_optimum, hom_sweep, input_density, scatter_two_photon,
        two_photon_density, ChannelPair, HomTarget, TwoPhotonInput, TwoPhotonSystem,
    },
    KGrid, PteParams,
};

use crate::config::{Experiment, RunConfig, SystemKind, TargetChoice};
use crate::error::CliError;
use crate::output::{num, Table};

/// Files (name, contents) and a results object.
#[derive(Debug, Clone)]
pub struct Report {
    pub files: Vec<(String, String)>,
    pub results: Value,
}

pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    match cfg.experiment {
        Experiment::Dynamics => run_dynamics(cfg),
        Experiment::Spectrum => run_spectrum(cfg),
        Experiment::HomSweep => run_hom(cfg),
        Experiment::TwoPhotonDensity => run_density(cfg),
    }
}

fn fixed_grid(cfg: &RunConfig, centre: f64) -> Result<KGrid, CliError> {
    match (cfg.grid.span, cfg.grid.n) {
        (Some(span), Some(n)) => Ok(KGrid::centered(centre, span, n)?),
        _ => Err(CliError::config(format!(
            "experiment `{}` needs grid.span and grid.n",
            cfg.experiment.name()
        ))),
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn two_photon_system(cfg: &RunConfig) -> Result<TwoPhotonSystem, CliError> {
    Ok(match cfg.system.kind {
        SystemKind::Tle => TwoPhotonSystem::tle(cfg.system.tle_params()?),
        SystemKind::Cavity => TwoPhotonSystem::cavity(cfg.system.tle_params()?),
        SystemKind::Jc => TwoPhotonSystem::jc(cfg.system.jc_params()?),
    })
}

// ---------------------------------------------------------------- dynamics

fn run_dynamics(cfg: &RunConfig) -> Result<Report, CliError> {
    if cfg.system.kind == SystemKind::Jc {
        return Err(fanowave_core::Error::Unsupported(
            "time-resolved dynamics are implemented for a single emitter or cavity".into(),
        )
        .into());
    }
    let params = cfg.system.tle_params()?;
    let pte = cfg.pte()?;
    let env = cfg.envelope()?;
    let d = &cfg.dynamics;
    if d.n_times < 2 || d.field_every == 0 {
        return Err(CliError::config(
            "dynamics.n_times must be >= 2 and dynamics.field_every >= 1",
        ));
    }
    if !(d.t_end > env.t_i) {
        return Err(CliError::config(format!(
            "dynamics.t_end = {} must exceed the initial time {}",
            d.t_end, env.t_i
        )));
    }
    let grid = fixed_grid(cfg, env.k_c)?;
    let init = SingleExcitationState::right_moving(&env, grid)?;
    let input_norm = init.norm();
    let times = linspace(env.t_i, d.t_end, d.n_times);

    let (states, method, p_lost, peak) = if params.is_lossless() {
        let evo = AnalyticEvolution::new(&init, &params, &pte)?;
        let states = evo.states_at(&times, DEFAULT_CACHE_SPACING / params.gamma_wg)?;
        // The emitter amplitude is cheap, so its peak is located on a
        // much finer time axis than the trace.
        let step = 0.01 / params.gamma_wg;
        let fine = ((d.t_end - env.t_i) / step).ceil() as usize + 1;
        let mut peak = (0.0, env.t_i);
        for t in linspace(env.t_i, d.t_end, fine) {
            let p = evo.chi(t)?.norm_sqr();
            if p > peak.0 {
                peak = (p, t);
            }
        }
        (states, "analytic", vec![0.0; times.len()], peak)
    } else {
        // RK4 with a comfortable margin below its stability limit.
        let dt = (0.25 / grid.half_span()).min(0.05 / (params.gamma_wg + params.gamma_loss));
        let oracle = OdeOracle::new(params, pte, dt);
        let mut states = vec![init.clone()];
        let mut lost = vec![0.0];
        for &t in &times[1..] {
            let run = oracle.run(states.last().unwrap(), t)?;
            lost.push(lost.last().unwrap() + run.p_lost);
            states.push(run.state);
        }
        let peak = states
            .iter()
            .map(|s| (s.p_emitter(), s.t))
            .fold((0.0, env.t_i), |a, b| if b.0 > a.0 { b } else { a });
        (states, "ode", lost, peak)
    };

    let mut trace = Table::new(&[
        "t[1/Gamma]",
        "p_emitter[1]",
        "p_right[1]",
        "p_left[1]",
        "p_lost[1]",
        "total[1]",
    ]);
    for (s, lost) in states.iter().zip(&p_lost) {
        trace.row(&[
            s.t,
            s.p_emitter(),
            s.p_right(),
            s.p_left(),
            *lost,
            s.norm() + lost,
        ]);
    }

    let last = states.last().unwrap();
    let ks = grid.points();
    let mut spectra = Table::new(&[
        "k[Gamma]",
        "abs_xi_right2[1/Gamma]",
        "abs_xi_left2[1/Gamma]",
        "abs_xi_input2[1/Gamma]",
    ]);
    for i in 0..ks.len() {
        spectra.row(&[
            ks[i],
            last.xi_r[i].norm_sqr(),
            last.xi_l[i].norm_sqr(),
            init.xi_r[i].norm_sqr(),
        ]);
    }

    let x_span = d
        .x_span
        .unwrap_or(env.t_i.abs().max(d.t_end.abs()) + 4.0 / env.sigma);
    let dx = d.dx.unwrap_or(0.5 * PI / grid.half_span());
    if !(x_span > 0.0 && dx > 0.0) {
        return Err(CliError::config(
            "dynamics.x_span and dynamics.dx must be positive",
        ));
    }
    let nx = (2.0 * x_span / dx).round() as usize + 1;
    let xs = linspace(-x_span, x_span, nx.max(2));
    let mut field = Table::new(&[
        "x[1/Gamma]",
        "t[1/Gamma]",
        "abs_field_right[Gamma^0.5]",
        "abs_field_left[Gamma^0.5]",
        "abs_field[Gamma^0.5]",
    ]);
    for s in states.iter().step_by(d.field_every) {
        let right = realspace_envelope(&s.xi_r, &grid, &xs, Direction::Right)?;
        let left = realspace_envelope(&s.xi_l, &grid, &xs, Direction::Left)?;
        for ((x, r), l) in xs.iter().zip(&right).zip(&left) {
            let (r2, l2) = (r.norm_sqr(), l.norm_sqr());
            field.row(&[*x, s.t, r2.sqrt(), l2.sqrt(), (r2 + l2).sqrt()]);
        }
    }

    let results = json!({
        "method": method,
        "input_norm": input_norm,
        "peak_p_emitter": peak.0,
        "t_peak": peak.1,
        "final": {
            "t": last.t,
            "p_emitter": last.p_emitter(),
            "p_right": last.p_right(),
            "p_left": last.p_left(),
            "p_lost": p_lost.last().unwrap(),
        },
    });
    Ok(Report {
        files: vec![
            ("trace.csv".into(), trace.into_string()),
            ("spectra.csv".into(), spectra.into_string()),
            ("field_xt.csv".into(), field.into_string()),
        ],
        results,
    })
}

// ---------------------------------------------------------------- spectrum

fn run_spectrum(cfg: &RunConfig) -> Result<Report, CliError> {
    let sys = &cfg.system;
    let jc = sys.kind == SystemKind::Jc;
    let ks = fixed_grid(cfg, sys.omega_e)?.points();
    let vs = cfg
        .spectrum
        .v_values
        .clone()
        .unwrap_or_else(|| vec![cfg.pte.v]);
    let sets = cfg.spectrum.dissipation.clone().unwrap_or_else(|| {
        if jc {
            vec![vec![sys.gamma_c, sys.gamma_e]]
        } else {
            vec![vec![sys.gamma_loss]]
        }
    });
    let arity = if jc { 2 } else { 1 };
    if let Some(bad) = sets.iter().find(|s| s.len() != arity) {
        return Err(CliError::config(format!(
            "spectrum.dissipation entries need {arity} value(s) for this system, got {bad:?}"
        )));
    }
    if cfg.spectrum.omega_c_follows_pte && !jc {
        return Err(CliError::config(
            "spectrum.omega_c_follows_pte applies to the jc system only",
        ));
    }

    let mut table = if jc {
        Table::new(&[
            "v[1]",
            "gamma_c[Gamma]",
            "gamma_e[Gamma]",
            "omega_c[Gamma]",
            "k[Gamma]",
            "abs_t2[1]",
            "abs_r2[1]",
            "loss[1]",
        ])
    } else {
        Table::new(&[
            "v[1]",
            "gamma_loss[Gamma]",
            "k[Gamma]",
            "abs_t2[1]",
            "abs_r2[1]",
            "loss[1]",
        ])
    };
    let mut curves = Vec::new();
    for &v in &vs {
        let pte = PteParams::new(v)?;
        for set in &sets {
            let (scatterer, omega_c) = if jc {
                let mut s = sys.clone();
                (s.gamma_c, s.gamma_e) = (set[0], set[1]);
                if cfg.spectrum.omega_c_follows_pte {
                    s.omega_c = Some(sys.omega_e - effective_rate(sys.gamma, &pte)?.im / 2.0);
                }
                let p = s.jc_params()?;
                (Scatterer::Jc(p), p.omega_c)
            } else {
                let mut s = sys.clone();
                s.gamma_loss = set[0];
                (Scatterer::Tle(s.tle_params()?), f64::NAN)
            };
            let coeffs = ScatterCoeffs::new(scatterer, pte);
            let mut t_min = (f64::INFINITY, 0.0);
            let mut t_max = (f64::NEG_INFINITY, 0.0);
            let mut loss_max = 0.0f64;
            for &k in &ks {
                let (t, r) = coeffs.at(k)?;
                let (t2, r2) = (t.norm_sqr(), r.norm_sqr());
                let loss = 1.0 - t2 - r2;
                if jc {
                    table.row(&[v, set[0], set[1], omega_c, k, t2, r2, loss]);
                } else {
                    table.row(&[v, set[0], k, t2, r2, loss]);
                }
                if t2 < t_min.0 {
                    t_min = (t2, k);
                }
                if t2 > t_max.0 {
                    t_max = (t2, k);
                }
                loss_max = loss_max.max(loss.abs());
            }
            let mut curve = json!({
                "v": v,
                "dissipation": set,
                "min_abs_t2": t_min.0,
                "k_at_min": t_min.1,
                "max_abs_t2": t_max.0,
                "k_at_max": t_max.1,
                "max_abs_loss": loss_max,
            });
            if jc {
                curve["omega_c"] = json!(omega_c);
            }
            curves.push(curve);
        }
    }
    Ok(Report {
        files: vec![("transmission.csv".into(), table.into_string())],
        results: json!({ "curves": curves }),
    })
}

// ---------------------------------------------------------------- HOM

fn run_hom(cfg: &RunConfig) -> Result<Report, CliError> {
    let h = &cfg.hom;
    if !(h.sigma_min > 0.0 && h.sigma_max >= h.sigma_min && h.n_sigma >= 1 && h.tol > 0.0) {
        return Err(CliError::config(
            "hom needs 0 < sigma_min <= sigma_max, n_sigma >= 1 and tol > 0",
        ));
    }
    let system = two_photon_system(cfg)?;
    let pte = cfg.pte()?;
    let k_c = cfg.envelope.k_c;
    let target = match h.target {
        TargetChoice::Auto => HomTarget::for_pte(&pte),
        TargetChoice::On => HomTarget::On,
        TargetChoice::Off => HomTarget::Off,
    };
    let sigmas = logspace(h.sigma_min, h.sigma_max, h.n_sigma);
    let pts = hom_sweep(&sigmas, &system, &pte, k_c)?;
    let lin = hom_sweep(&sigmas, &system.linear(), &pte, k_c)?;

    let mut table = Table::new(&[
        "sigma[Gamma]",
        "p_counter[1]",
        "p_co[1]",
        "total[1]",
        "p_counter_linear[1]",
        "p_co_linear[1]",
    ]);
    for (p, l) in pts.iter().zip(&lin) {
        table.row(&[p.sigma, p.p_counter, p.p_co, p.total, l.p_counter, l.p_co]);
    }

    let floor = lin
        .iter()
        .min_by(|a, b| target.error(a).total_cmp(&target.error(b)))
        .expect("at least one width");
    let max_dev = pts
        .iter()
        .chain(&lin)
        .map(|p| (p.total - 1.0).abs())
        .fold(0.0, f64::max);
    let mut results = json!({
        "target": target.label(),
        "linear_floor": { "sigma": floor.sigma, "error": target.error(floor) },
        "max_total_deviation": max_dev,
    });
    if h.optimize && system.nonlinear && h.sigma_max > h.sigma_min {
        let opt = hom_optimum(
            &system,
            &pte,
            k_c,
            target,
            (h.sigma_min, h.sigma_max),
            h.tol,
        )?;
        results["optimum"] = json!({
            "sigma": opt.sigma,
            "error": opt.error,
            "p_counter": opt.point.p_counter,
            "p_co": opt.point.p_co,
            "total": opt.point.total,
        });
    }
    Ok(Report {
        files: vec![("hom.csv".into(), table.into_string())],
        results,
    })
}

// ---------------------------------------------------------------- density

fn matrix_csv(density: &[f64], n: usize, ps: &[f64], idx: &[usize]) -> String {
    let mut header = vec!["p1\\p2[Gamma]".to_string()];
    header.extend(idx.iter().map(|&j| num(ps[j])));
    let mut text = header.join(",");
    text.push('\n');
    for &i in idx {
        let mut row = vec![num(ps[i])];
        row.extend(idx.iter().map(|&j| num(density[i * n + j])));
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

fn run_density(cfg: &RunConfig) -> Result<Report, CliError> {
    let dc = &cfg.density;
    if !(dc.half_width > 0.0 && dc.max_points >= 2) {
        return Err(CliError::config(
            "density needs half_width > 0 and max_points >= 2",
        ));
    }
    let system = two_photon_system(cfg)?;
    let pte = cfg.pte()?;
    let env = cfg.envelope()?;
    let grid = match (cfg.grid.span, cfg.grid.n) {
        (None, None) => auto_grid(&env, &system, &pte)?,
        _ => fixed_grid(cfg, env.k_c)?,
    };
    let out = scatter_two_photon(
        &TwoPhotonInput::counter_propagating(env),
        &system,
        &pte,
        &grid,
    )?;
    let n = grid.len();
    let ps = grid.points();

    let inside: Vec<usize> = (0..n)
        .filter(|&i| (ps[i] - env.k_c).abs() <= dc.half_width)
        .collect();
    if inside.len() < 2 {
        return Err(CliError::config(
            "density.half_width selects fewer than two grid points",
        ));
    }
    let stride = inside.len().div_ceil(dc.max_points);
    let idx: Vec<usize> = inside.into_iter().step_by(stride).collect();

    let mut files = Vec::new();
    let mut elong = serde_json::Map::new();
    for pair in ChannelPair::ALL {
        let dens = two_photon_density(&out, pair);
        elong.insert(
            pair.label().into(),
            json!(density_moments(&dens, &grid).elongation()),
        );
        files.push((
            format!("density_{}.csv", pair.label()),
            matrix_csv(&dens, n, &ps, &idx),
        ));
    }
    let din = input_density(&env, &grid);
    elong.insert(
        "in".into(),
        json!(density_moments(&din, &grid).elongation()),
    );
    files.push(("density_in.csv".into(), matrix_csv(&din, n, &ps, &idx)));

    let p = out.probabilities();
    let results = json!({
        "grid": { "n": n, "spacing": grid.spacing(), "k_min": grid.k_min(), "k_max": grid.k_max() },
        "written_points": idx.len(),
        "p_ll": p.p_ll,
        "p_rr": p.p_rr,
        "p_lr": p.p_lr,
        "total": p.total(),
        "elongation": elong,
    });
    Ok(Report { files, results })
}
