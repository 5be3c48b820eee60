use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::{Format, RunConfig};

/// Seventeen significant digits: enough to read back the same `f64`.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub n: u64,
    pub x: f64,
    pub model: String,
    pub ratio: f64,
    pub reference_phi: f64,
    pub deviation: f64,
    pub mc_halfwidth: Option<f64>,
}

impl RatioRow {
    pub fn exact(n: u64, x: f64, model: &str, ratio: f64, reference_phi: f64) -> RatioRow {
        RatioRow {
            n,
            x,
            model: model.to_string(),
            ratio,
            reference_phi,
            deviation: (ratio - reference_phi).abs(),
            mc_halfwidth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioTable {
    pub config: RunConfig,
    pub rows: Vec<RatioRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRow {
    pub x: f64,
    pub exact: f64,
    pub pathwise: f64,
    pub pathwise_halfwidth: f64,
    pub conditioned: f64,
    pub conditioned_halfwidth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub config: RunConfig,
    pub tv_pathwise: f64,
    pub tv_conditioned: f64,
    pub rows: Vec<SampleRow>,
}

fn config_line(config: &RunConfig) -> Result<String> {
    Ok(format!("# config: {}\n", serde_json::to_string(config)?))
}

fn csv_body(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

impl RatioTable {
    pub fn to_csv(&self) -> Result<String> {
        let body = csv_body(
            &["n", "x", "model", "ratio", "reference_phi", "deviation", "mc_halfwidth"],
            self.rows.iter().map(|r| {
                vec![
                    r.n.to_string(),
                    fmt_float(r.x),
                    r.model.clone(),
                    fmt_float(r.ratio),
                    fmt_float(r.reference_phi),
                    fmt_float(r.deviation),
                    r.mc_halfwidth.map(fmt_float).unwrap_or_default(),
                ]
            }),
        )?;
        Ok(config_line(&self.config)? + &body)
    }
}

impl SampleReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut out = config_line(&self.config)?;
        out += &format!(
            "# tv_pathwise: {}, tv_conditioned: {}\n",
            fmt_float(self.tv_pathwise),
            fmt_float(self.tv_conditioned)
        );
        out += &csv_body(
            &["x", "exact", "pathwise", "pathwise_halfwidth", "conditioned", "conditioned_halfwidth"],
            self.rows.iter().map(|r| {
                [r.x, r.exact, r.pathwise, r.pathwise_halfwidth, r.conditioned, r.conditioned_halfwidth]
                    .into_iter()
                    .map(fmt_float)
                    .collect()
            }),
        )?;
        Ok(out)
    }
}

/// Renders a report in the configured format.
pub fn render<T: Serialize>(value: &T, csv: impl FnOnce(&T) -> Result<String>, format: Format) -> Result<String> {
    match format {
        Format::Csv => csv(value),
        Format::Json => Ok(serde_json::to_string_pretty(value)? + "\n"),
    }
}

/// Writes `text` to the configured file, or to standard output.
pub fn emit(config: &RunConfig, text: &str) -> Result<()> {
    match &config.output_path {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path}")),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).context("writing to standard output")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, 123456.789] {
            assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn deviation_is_absolute() {
        let r = RatioRow::exact(10, 2.0, "m", 0.5, 0.7);
        assert!((r.deviation - 0.2).abs() < 1e-15);
        assert!(r.mc_halfwidth.is_none());
    }
}
