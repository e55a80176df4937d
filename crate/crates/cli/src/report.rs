//! CSV emission and ingestion. Floats are written with 17 significant digits.

use std::io::{Read, Write};

use hypermult_core::bounds::SweepRow;
use hypermult_core::verify::SuiteReport;
use hypermult_core::{Point, PointCloud};
use serde::Deserialize;

use crate::{CliError, CliResult};

pub(crate) fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn optional(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

pub fn write_checks_csv<W: Write>(out: W, reports: &[SuiteReport]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["suite", "property", "point", "value", "limit", "passed"])?;
    for report in reports {
        for c in &report.checks {
            w.write_record([
                c.suite.name(),
                &c.property,
                &c.point,
                &float(c.value),
                &float(c.limit),
                if c.passed { "true" } else { "false" },
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["g", "eps", "lambda", "N_eps", "I_eps", "thm1", "thm2", "stronger"])?;
    for r in rows {
        w.write_record([
            r.g.to_string(),
            float(r.eps),
            float(r.lambda),
            r.n_eps.to_string(),
            r.i_eps.to_string(),
            optional(r.thm1),
            optional(r.thm2),
            r.stronger.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_cloud_csv<W: Write>(out: W, cloud: &PointCloud) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "x", "y"])?;
    for p in cloud.points() {
        w.write_record([p.id.to_string(), float(p.x), float(p.y)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct CloudRow {
    id: usize,
    x: f64,
    y: f64,
}

pub fn read_cloud_csv<R: Read>(input: R, eps: f64) -> CliResult<PointCloud> {
    let mut r = csv::Reader::from_reader(input);
    let points = r
        .deserialize::<CloudRow>()
        .map(|row| row.map(|CloudRow { id, x, y }| Point { id, x, y }))
        .collect::<Result<Vec<_>, _>>()?;
    PointCloud::new(eps, points).map_err(|e| CliError::Input(e.to_string()))
}
