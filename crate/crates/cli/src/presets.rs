//! Named parameter sets for the published figures.
//!
//! Rows run over three PTE strengths: none, balanced and blocking. Photons
//! are centred on the shifted resonance `ω̃_e`, and their widths are scaled
//! by `Re(1/(1+iV/2))` so that all rows see the same effective linewidth.

use fanowave_core::{effective_resonance, PteParams};

use crate::config::{Experiment, RunConfig, SystemKind};

pub const NAMES: [&str; 14] = [
    "fig2-row1",
    "fig2-row2",
    "fig2-row3",
    "fig3a-row1",
    "fig3a-row2",
    "fig3a-row3",
    "fig3b",
    "fig3c",
    "fig4a",
    "fig4b",
    "fig4c",
    "fig5-row1",
    "fig5-row2",
    "fig5-row3",
];

fn row_v(row: usize) -> f64 {
    [
        PteParams::none().v,
        PteParams::balanced().v,
        PteParams::blocking().v,
    ][row]
}

fn shifted_resonance(v: f64) -> f64 {
    effective_resonance(0.0, 1.0, &PteParams { v }).expect("finite preset")
}

fn rescale(v: f64) -> f64 {
    PteParams { v }.coupling_factor().re
}

fn fig2(row: usize) -> RunConfig {
    let v = row_v(row);
    let mut c = RunConfig::default_for(Experiment::Dynamics);
    c.pte.v = v;
    let sigma = 0.73 * rescale(v);
    c.envelope.k_c = shifted_resonance(v);
    c.envelope.sigma = sigma;
    c.envelope.t_i = -5.0 / sigma;
    c
}

fn fig3a(row: usize) -> RunConfig {
    let mut c = RunConfig::default_for(Experiment::Spectrum);
    c.pte.v = row_v(row);
    c.spectrum.dissipation = Some(vec![vec![0.0], vec![0.1]]);
    c
}

fn fig3_jc(g: f64) -> RunConfig {
    let mut c = RunConfig::default_for(Experiment::Spectrum);
    c.system.kind = SystemKind::Jc;
    c.system.g = g;
    c.spectrum.v_values = Some((0..3).map(row_v).collect());
    c.spectrum.dissipation = Some(vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![0.1, 0.1]]);
    c.spectrum.omega_c_follows_pte = true;
    c
}

fn fig4(row: usize) -> RunConfig {
    let v = row_v(row);
    let mut c = RunConfig::default_for(Experiment::HomSweep);
    c.pte.v = v;
    c.envelope.k_c = shifted_resonance(v);
    c
}

fn fig5(row: usize, sigma: f64) -> RunConfig {
    let v = row_v(row);
    let mut c = RunConfig::default_for(Experiment::TwoPhotonDensity);
    c.pte.v = v;
    c.envelope.k_c = shifted_resonance(v);
    c.envelope.sigma = sigma;
    c
}

pub fn preset(name: &str) -> Option<RunConfig> {
    let mut c = match name {
        "fig2-row1" => fig2(0),
        "fig2-row2" => fig2(1),
        "fig2-row3" => fig2(2),
        "fig3a-row1" => fig3a(0),
        "fig3a-row2" => fig3a(1),
        "fig3a-row3" => fig3a(2),
        "fig3b" => fig3_jc(0.5),
        "fig3c" => fig3_jc(1.0),
        "fig4a" => fig4(0),
        "fig4b" => fig4(1),
        "fig4c" => fig4(2),
        "fig5-row1" => fig5(0, 0.43),
        "fig5-row2" => fig5(1, 0.36),
        "fig5-row3" => fig5(2, 0.21),
        _ => return None,
    };
    c.output_dir = ["out", name].iter().collect();
    Some(c)
}
