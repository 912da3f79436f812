//! CSV reports and run metadata.
//!
//! All files are UTF-8, comma separated, with a header row and LF line
//! endings. Floats are written with 17 significant digits (`{:.16e}`) so
//! they round-trip exactly; missing values are written as `NA`.
//!
//! | file | columns |
//! |------|---------|
//! | `weights.csv` | `index,x,weight` |
//! | `riskdist.csv` | `n,rep,risk` |
//! | `riskdist_summary.csv` | `n,count,mean,variance,skew_g1,skew_G1,oracle_mean,oracle_variance,oracle_skewness_or_NA` |
//! | `modelsel.csv` | `n,rep,risk_min,lambda_hat,part` |
//! | `modelsel_summary.csv` | `n,body_count,tail_count,degenerate_count,body_fraction,body_mean_lambda,tail_mean_lambda,body_median_lambda,tail_median_lambda` |

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::experiments::{
    ExperimentConfig, ModelSelection, Part, RiskDistribution, WeightHistogram,
};
use crate::risk::THETA_BASE;
use crate::sampling::{NORMAL_METHOD, PRNG_ALGORITHM};
use crate::stats::histogram;
use crate::svg::{box_summary_svg, histogram_svg};
use crate::{Error, Result};

pub const WEIGHTS_HEADER: [&str; 3] = ["index", "x", "weight"];
pub const RISKDIST_HEADER: [&str; 3] = ["n", "rep", "risk"];
pub const RISKDIST_SUMMARY_HEADER: [&str; 9] = [
    "n",
    "count",
    "mean",
    "variance",
    "skew_g1",
    "skew_G1",
    "oracle_mean",
    "oracle_variance",
    "oracle_skewness_or_NA",
];
pub const MODELSEL_HEADER: [&str; 5] = ["n", "rep", "risk_min", "lambda_hat", "part"];
pub const MODELSEL_SUMMARY_HEADER: [&str; 9] = [
    "n",
    "body_count",
    "tail_count",
    "degenerate_count",
    "body_fraction",
    "body_mean_lambda",
    "tail_mean_lambda",
    "body_median_lambda",
    "tail_median_lambda",
];

pub const NA: &str = "NA";

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        NA.to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn format_opt(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), format_float)
}

/// Everything needed to rerun an experiment with this implementation.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub command: String,
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub prng_algorithm: String,
    pub normal_method: String,
    pub tool_version: String,
    pub timestamp: String,
    pub outputs: Vec<String>,
}

impl RunMetadata {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        Self {
            command: command.to_string(),
            config: config.clone(),
            master_seed: config.master_seed,
            prng_algorithm: PRNG_ALGORITHM.to_string(),
            normal_method: NORMAL_METHOD.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            outputs: Vec::new(),
        }
    }
}

/// Results to report; absent experiments produce no files.
#[derive(Debug, Default, Clone, Copy)]
pub struct RunResults<'a> {
    pub weights: Option<&'a WeightHistogram>,
    pub risk_distribution: Option<&'a [RiskDistribution]>,
    pub model_selection: Option<&'a [ModelSelection]>,
}

#[derive(Debug, Default, Clone, Copy)]
pub struct OutputFormats {
    pub svg: bool,
}

struct CsvFile {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl CsvFile {
    fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self> {
        let path = dir.join(name);
        let writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&path)
            .map_err(|source| Error::Csv {
                path: path.clone(),
                source,
            })?;
        let mut file = Self { path, writer };
        file.row(header)?;
        Ok(file)
    }

    fn row<I, T>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.writer
            .write_record(fields)
            .map_err(|source| Error::Csv {
                path: self.path.clone(),
                source,
            })
    }

    fn finish(mut self) -> Result<PathBuf> {
        self.writer.flush().map_err(|source| Error::Io {
            path: self.path.clone(),
            source,
        })?;
        Ok(self.path)
    }
}

fn write_text(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn write_weights(
    dir: &Path,
    w: &WeightHistogram,
    formats: OutputFormats,
    manifest: &mut Vec<PathBuf>,
) -> Result<()> {
    let mut csv = CsvFile::create(dir, "weights.csv", &WEIGHTS_HEADER)?;
    for (i, (x, wt)) in w.xs.iter().zip(&w.weights).enumerate() {
        csv.row([i.to_string(), format_float(*x), format_float(*wt)])?;
    }
    manifest.push(csv.finish()?);
    if formats.svg {
        let svg = histogram_svg(
            "Importance weights of source draws",
            "importance weight",
            &w.histogram,
        );
        manifest.push(write_text(dir.join("weights_hist.svg"), &svg)?);
    }
    Ok(())
}

fn write_risk_distribution(
    dir: &Path,
    runs: &[RiskDistribution],
    formats: OutputFormats,
    manifest: &mut Vec<PathBuf>,
) -> Result<()> {
    let mut records = CsvFile::create(dir, "riskdist.csv", &RISKDIST_HEADER)?;
    let mut summary = CsvFile::create(dir, "riskdist_summary.csv", &RISKDIST_SUMMARY_HEADER)?;
    for run in runs {
        for r in &run.records {
            records.row([r.n.to_string(), r.rep.to_string(), format_float(r.risk)])?;
        }
        let s = &run.summary;
        summary.row([
            run.n.to_string(),
            s.count.to_string(),
            format_float(s.mean),
            format_float(s.variance),
            format_opt(s.skewness_g1),
            format_opt(s.skewness_adjusted),
            format_float(run.oracle.mean),
            format_opt(run.oracle.variance),
            format_opt(run.oracle.skewness),
        ])?;
    }
    manifest.push(records.finish()?);
    manifest.push(summary.finish()?);
    if formats.svg {
        for run in runs {
            let svg = histogram_svg(
                &format!("Weighted risk estimates, n = {}", run.n),
                "importance-weighted risk",
                &run.histogram,
            );
            manifest.push(write_text(
                dir.join(format!("riskdist_hist_n{}.svg", run.n)),
                &svg,
            )?);
        }
    }
    Ok(())
}

fn write_model_selection(
    dir: &Path,
    runs: &[ModelSelection],
    bins: usize,
    formats: OutputFormats,
    manifest: &mut Vec<PathBuf>,
) -> Result<()> {
    let mut records = CsvFile::create(dir, "modelsel.csv", &MODELSEL_HEADER)?;
    let mut summary = CsvFile::create(dir, "modelsel_summary.csv", &MODELSEL_SUMMARY_HEADER)?;
    for run in runs {
        for r in &run.records {
            let part = r.part.unwrap_or(Part::Degenerate);
            let risk_min = if part == Part::Degenerate {
                None
            } else {
                Some(r.risk)
            };
            records.row([
                r.n.to_string(),
                r.rep.to_string(),
                format_opt(risk_min),
                format_opt(r.lambda_hat),
                part.as_str().to_string(),
            ])?;
        }
        summary.row([
            run.n.to_string(),
            run.body_count().to_string(),
            run.tail_count().to_string(),
            run.degenerate_count.to_string(),
            format_opt(run.body_fraction()),
            format_opt(run.body_lambda.map(|s| s.mean)),
            format_opt(run.tail_lambda.map(|s| s.mean)),
            format_opt(run.body_lambda.map(|s| s.median)),
            format_opt(run.tail_lambda.map(|s| s.median)),
        ])?;
    }
    manifest.push(records.finish()?);
    manifest.push(summary.finish()?);
    if formats.svg {
        for run in runs {
            let lambdas: Vec<f64> = run.records.iter().filter_map(|r| r.lambda_hat).collect();
            if !lambdas.is_empty() {
                let h = histogram(&lambdas, bins)?;
                let svg = histogram_svg(
                    &format!("Selected lambda, n = {}", run.n),
                    "selected lambda",
                    &h,
                );
                manifest.push(write_text(
                    dir.join(format!("modelsel_hist_n{}.svg", run.n)),
                    &svg,
                )?);
            }
            let svg = box_summary_svg(
                &format!("Selected lambda by part, n = {} (dashed: optimum)", run.n),
                run.body_lambda.as_ref(),
                run.tail_lambda.as_ref(),
                THETA_BASE,
            );
            manifest.push(write_text(
                dir.join(format!("modelsel_box_n{}.svg", run.n)),
                &svg,
            )?);
        }
    }
    Ok(())
}

/// Writes every present experiment's CSVs (and SVGs when requested), then
/// `run_meta.json` listing all files. Returns the manifest.
pub fn write_outputs(
    results: &RunResults<'_>,
    metadata: &RunMetadata,
    out_dir: &Path,
    formats: OutputFormats,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut manifest = Vec::new();
    if let Some(w) = results.weights {
        write_weights(out_dir, w, formats, &mut manifest)?;
    }
    if let Some(runs) = results.risk_distribution {
        write_risk_distribution(out_dir, runs, formats, &mut manifest)?;
    }
    if let Some(runs) = results.model_selection {
        write_model_selection(out_dir, runs, metadata.config.bins, formats, &mut manifest)?;
    }

    let meta_path = out_dir.join("run_meta.json");
    manifest.push(meta_path.clone());
    let mut meta = metadata.clone();
    meta.outputs = manifest
        .iter()
        .map(|p| {
            p.file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned()
        })
        .collect();
    let json = serde_json::to_string_pretty(&meta).map_err(|source| Error::Json {
        path: meta_path.clone(),
        source,
    })?;
    write_text(meta_path, &(json + "\n"))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [
            0.761_267_585_362_157_2,
            1e-300,
            -3.5,
            12_345.678_901_234_567,
            f64::MIN_POSITIVE,
        ] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(format_float(f64::NAN), "NA");
        assert_eq!(format_opt(None), "NA");
    }
}
