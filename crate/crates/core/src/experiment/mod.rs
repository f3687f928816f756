//! Experiment harness: runs the selected samplers on one problem and writes
//! reports, traces and a manifest of everything written.

mod config;
mod output;

pub use config::{
    load_model, ExperimentConfig, Prepared, PriorSpec, SamplerKind, SyntheticSpec, BUILTIN_PREFIX,
};
pub use output::{read_csv, Manifest, ManifestEntry};

use std::path::Path;

use crate::amh::run_amh;
use crate::bayes::Posterior;
use crate::error::{Error, Result};
use crate::fem::FrequencySolver;
use crate::mcdwis::{run_mcdwis, FeTarget};
use crate::report::FrequencyReport;
use output::OutputDir;

#[derive(Debug, Clone, PartialEq)]
pub struct TmeRow {
    pub label: String,
    pub tme: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub rows: Vec<TmeRow>,
    pub estimates: Vec<(String, Vec<f64>)>,
    pub warnings: Vec<String>,
    pub manifest: Manifest,
}

impl ExperimentSummary {
    pub fn tme(&self, label: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.label == label).map(|r| r.tme)
    }

    /// Plain-text TME table.
    pub fn table(&self) -> String {
        let mut s = format!("{:<10} {:>10}\n", "column", "TME (%)");
        for r in &self.rows {
            s.push_str(&format!("{:<10} {:>10.4}\n", r.label, r.tme));
        }
        s
    }
}

/// Runs the experiment described by `config`; relative input paths resolve
/// against `base`, and all outputs go to `out_dir`.
pub fn run_experiment(
    config: &ExperimentConfig,
    base: &Path,
    out_dir: &Path,
) -> Result<ExperimentSummary> {
    let prepared = Prepared::new(config, base)?;
    run_prepared(&prepared, out_dir)
}

pub fn run_prepared(p: &Prepared, out_dir: &Path) -> Result<ExperimentSummary> {
    let mut out = OutputDir::create(out_dir)?;
    let names = p.model.parameter_space().names.clone();
    let measured = p.data.frequencies().to_vec();
    let n_modes = measured.len();
    let solver = FrequencySolver::new(p.model.clone());

    out.write_text("config_resolved.toml", "resolved experiment configuration", &p.config.to_toml())?;
    out.write_text("measured_data.toml", "measured frequencies and covariance", &p.data.to_toml())?;

    let initial_f = solver.elastic_frequencies(&p.start, n_modes)?;
    let initial = FrequencyReport::new("initial", &measured, &initial_f)?;
    out.write_initial_report(&initial)?;

    let mut rows = vec![TmeRow {
        label: "initial".into(),
        tme: initial.tme,
    }];
    let mut estimates = Vec::new();
    let mut warnings = Vec::new();
    let posterior = Posterior::new(p.model.clone(), p.data.clone(), p.prior.clone())?;

    for &kind in &p.config.samplers {
        let seed = p.config.seed;
        let estimate = match kind {
            SamplerKind::Amh => {
                let cov = FeTarget::diagonal_proposal(&p.sigma, p.config.amh.initial_scale);
                let run = run_amh(&posterior, &p.start, &cov, &p.config.amh, seed)?;
                out.write_chain(&names, &run)?;
                warnings.extend(run.warnings.iter().map(|w| format!("amh: {w}")));
                run.mean
            }
            SamplerKind::Mcdwis => {
                let cov = FeTarget::diagonal_proposal(&p.sigma, p.config.mcdwis.proposal_scale);
                let target = FeTarget::new(posterior.clone(), &cov)?;
                match run_mcdwis(&target, &p.start, &p.config.mcdwis, seed) {
                    Ok(run) => {
                        out.write_traces(&run.trace)?;
                        out.write_population(&names, &run.population)?;
                        run.estimate
                    }
                    Err(failure) => {
                        out.write_traces(&failure.trace)?;
                        out.finish()?;
                        return Err(failure.error);
                    }
                }
            }
        };
        if !p.model.parameter_space().contains(&estimate) {
            warnings.push(format!("{}: estimate lies outside the bounds", kind.name()));
        }
        let f = solver.elastic_frequencies(&estimate, n_modes).map_err(|e| {
            Error::Estimation(format!("{} estimate has no modal solution: {e}", kind.name()))
        })?;
        let report = FrequencyReport::new(kind.name(), &measured, &f)?;
        out.write_sampler_report(kind.name(), &initial, &report)?;
        out.write_estimate(kind.name(), &names, &p.start, &estimate, p.model.parameter_space())?;
        rows.push(TmeRow {
            label: kind.name().into(),
            tme: report.tme,
        });
        estimates.push((kind.name().to_string(), estimate));
    }

    out.write_summary(&rows)?;
    let manifest = out.finish()?;
    Ok(ExperimentSummary {
        rows,
        estimates,
        warnings,
        manifest,
    })
}
