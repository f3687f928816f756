use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::TmeRow;
use crate::amh::AmhRun;
use crate::error::{Error, Result};
use crate::mcdwis::{DiagnosticsTrace, Population};
use crate::params::ParameterSpace;
use crate::report::FrequencyReport;

pub const MANIFEST: &str = "manifest.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub description: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        toml::from_str(&text).map_err(|e| Error::Parse {
            path,
            message: e.to_string(),
        })
    }
}

/// Reads a CSV written by the harness into its header and rows.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let parse = |e: csv::Error| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut reader = csv::Reader::from_path(path).map_err(parse)?;
    let header = reader.headers().map_err(parse)?.iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(String::from).collect()))
        .collect::<std::result::Result<Vec<Vec<String>>, _>>()
        .map_err(parse)?;
    Ok((header, rows))
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub(super) struct OutputDir {
    dir: PathBuf,
    manifest: Manifest,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest: Manifest::default(),
        })
    }

    fn record(&mut self, name: &str, description: &str) {
        self.manifest.files.push(ManifestEntry {
            path: name.to_string(),
            description: description.to_string(),
        });
    }

    pub fn write_text(&mut self, name: &str, description: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        self.record(name, description);
        Ok(())
    }

    fn write_csv(
        &mut self,
        name: &str,
        description: &str,
        header: &[String],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<()> {
        let path = self.dir.join(name);
        let err = |e: csv::Error| Error::Io {
            path: path.clone(),
            source: std::io::Error::other(e.to_string()),
        };
        let mut w = csv::Writer::from_path(&path).map_err(err)?;
        w.write_record(header).map_err(err)?;
        for row in rows {
            w.write_record(&row).map_err(err)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        self.record(name, description);
        Ok(())
    }

    pub fn write_initial_report(&mut self, initial: &FrequencyReport) -> Result<()> {
        let header = ["mode", "measured", "computed", "error_percent"].map(String::from);
        let rows = initial.rows.iter().map(|r| {
            vec![r.mode.to_string(), num(r.measured), num(r.computed), num(r.error_percent)]
        });
        self.write_csv("report_initial.csv", "frequencies at the starting point", &header, rows)
    }

    pub fn write_sampler_report(
        &mut self,
        name: &str,
        initial: &FrequencyReport,
        updated: &FrequencyReport,
    ) -> Result<()> {
        let header = [
            "mode",
            "measured",
            "initial",
            "initial_error_percent",
            "updated",
            "updated_error_percent",
        ]
        .map(String::from);
        let rows = initial.rows.iter().zip(&updated.rows).map(|(a, b)| {
            vec![
                a.mode.to_string(),
                num(a.measured),
                num(a.computed),
                num(a.error_percent),
                num(b.computed),
                num(b.error_percent),
            ]
        });
        self.write_csv(
            &format!("report_{name}.csv"),
            &format!("initial and {name}-updated frequencies"),
            &header,
            rows,
        )
    }

    pub fn write_estimate(
        &mut self,
        name: &str,
        names: &[String],
        start: &[f64],
        estimate: &[f64],
        space: &ParameterSpace,
    ) -> Result<()> {
        let header = ["parameter", "initial", "estimate", "lower", "upper"].map(String::from);
        let rows = (0..names.len()).map(|i| {
            vec![
                names[i].clone(),
                num(start[i]),
                num(estimate[i]),
                num(space.lower[i]),
                num(space.upper[i]),
            ]
        });
        self.write_csv(
            &format!("estimate_{name}.csv"),
            &format!("{name} posterior-mean parameters"),
            &header,
            rows,
        )
    }

    pub fn write_chain(&mut self, names: &[String], run: &AmhRun) -> Result<()> {
        let mut header = vec!["iteration".to_string()];
        header.extend(names.iter().cloned());
        header.extend(["log_posterior", "accepted"].map(String::from));
        let rows = run.chain.iter().map(|s| {
            let mut row = vec![s.iteration.to_string()];
            row.extend(s.theta.iter().map(|v| num(*v)));
            row.push(num(s.log_density));
            row.push(u8::from(s.accepted).to_string());
            row
        });
        self.write_csv("chain_amh.csv", "AMH chain", &header, rows)
    }

    pub fn write_traces(&mut self, trace: &DiagnosticsTrace) -> Result<()> {
        let g = |i: usize| (i + 1).to_string();
        let h = |a: &str, b: &str| vec![a.to_string(), b.to_string()];
        self.write_csv(
            "trace_popsize.csv",
            "population size after control",
            &h("generation", "population_size"),
            trace.population_size.iter().enumerate().map(|(i, n)| vec![g(i), n.to_string()]),
        )?;
        self.write_csv(
            "trace_wup.csv",
            "upper weight bound (natural log)",
            &h("generation", "log_w_up"),
            trace.log_w_up.iter().enumerate().map(|(i, w)| vec![g(i), num(*w)]),
        )?;
        self.write_csv(
            "trace_phi.csv",
            "switching parameter",
            &h("generation", "phi"),
            trace.phi.iter().enumerate().map(|(i, p)| vec![g(i), u8::from(*p).to_string()]),
        )?;
        self.write_csv(
            "trace_acceptance.csv",
            "fraction of accepted dynamic-weighting moves",
            &h("generation", "acceptance"),
            trace.acceptance.iter().enumerate().map(|(i, a)| vec![g(i), num(*a)]),
        )?;
        let header = ["generation", "state", "log_weight"].map(String::from);
        let rows = trace
            .tracked_log_weights
            .iter()
            .enumerate()
            .flat_map(|(i, ws)| {
                trace
                    .tracked_states
                    .iter()
                    .zip(ws)
                    .map(move |(s, w)| vec![g(i), (s + 1).to_string(), opt(*w)])
            })
            .collect::<Vec<_>>();
        self.write_csv(
            "trace_logweight.csv",
            "log-weights of tracked population states (1-based)",
            &header,
            rows,
        )
    }

    pub fn write_population<E>(&mut self, names: &[String], pop: &Population<E>) -> Result<()> {
        let mut header = vec!["index".to_string()];
        header.extend(names.iter().cloned());
        header.extend(["log_weight", "log_posterior"].map(String::from));
        let rows = pop.samples.iter().enumerate().map(|(i, s)| {
            let mut row = vec![(i + 1).to_string()];
            row.extend(s.theta.iter().map(|v| num(*v)));
            row.push(num(s.log_weight));
            row.push(num(s.log_density));
            row
        });
        self.write_csv("population_final.csv", "final MCDWIS population", &header, rows)
    }

    pub fn write_summary(&mut self, rows: &[TmeRow]) -> Result<()> {
        let header = ["column", "tme_percent"].map(String::from);
        let rows = rows.iter().map(|r| vec![r.label.clone(), num(r.tme)]);
        self.write_csv("summary.csv", "total mean error per column", &header, rows)
    }

    /// Writes the manifest and returns it.
    pub fn finish(self) -> Result<Manifest> {
        let path = self.dir.join(MANIFEST);
        let text = toml::to_string(&self.manifest).expect("manifest serializes");
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(self.manifest)
    }
}
