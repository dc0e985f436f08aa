use std::path::Path;

use christoffel::needles::NeedleSpec;
use christoffel::Point2;
use clap::ValueEnum;

use super::degrees;
use crate::config::{write_file, RunConfig};
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Univariate,
    Radial,
    Narrowed,
    TwoAnnuli,
}

struct Params {
    t: f64,
    r1: f64,
    r2: f64,
    lam: f64,
    h: f64,
    x: Point2,
    zeta: f64,
}

fn parse_params(pairs: &[String]) -> Result<Params, CliError> {
    let mut p = Params { t: 1.0, r1: 1.0, r2: 2.0, lam: 1.25, h: 0.5, x: Point2::new(1.05, 0.0), zeta: 0.1 };
    for pair in pairs.iter().filter(|s| !s.is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("needle parameter '{pair}' is not key=value")))?;
        let v: f64 = v.trim().parse().map_err(|_| CliError::Usage(format!("needle parameter '{pair}' is not numeric")))?;
        match k.trim() {
            "t" => p.t = v,
            "r1" => p.r1 = v,
            "r2" => p.r2 = v,
            "lam" => p.lam = v,
            "h" => p.h = v,
            "x" => p.x.x = v,
            "y" => p.x.y = v,
            "zeta" => p.zeta = v,
            other => return Err(CliError::Usage(format!("unknown needle parameter '{other}'"))),
        }
    }
    Ok(p)
}

pub fn spec(kind: Kind, n: usize, pairs: &[String]) -> Result<NeedleSpec, CliError> {
    let Params { t, r1, r2, lam, h, x, zeta } = parse_params(pairs)?;
    Ok(match kind {
        Kind::Univariate => NeedleSpec::Univariate { n, t },
        Kind::Radial => NeedleSpec::Radial { n, r1, r2, lam },
        Kind::Narrowed => NeedleSpec::Narrowed { n, r1, r2, lam },
        Kind::TwoAnnuli => NeedleSpec::TwoAnnuli { n, r1, r2, h, x, zeta },
    })
}

pub fn run(
    config: &RunConfig,
    kind: Kind,
    pairs: &[String],
    reference: Option<f64>,
    emit_profile: Option<&Path>,
) -> Result<(), CliError> {
    let mut violated = 0;
    for n in degrees(config, &[16]) {
        let spec = spec(kind, n, pairs)?;
        let report = spec.report(reference)?;
        if report.max_violation > 0.0 {
            violated += 1;
        }
        let doc = serde_json::json!({
            "config": config,
            "config_hash": config.hash(),
            "report": report,
        });
        let name = format!("needle_{}_n{n}.json", spec.kind());
        let path = config.output_path(&name)?;
        write_file(&path, &(serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"))?;
        println!("{} c_fit={} max_violation={}", path.display(), report.c_fit, report.max_violation);

        if let Some(base) = emit_profile {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(["coordinate", "x", "y", "value", "envelope"])?;
            for s in spec.profile()? {
                wtr.write_record([s.coordinate, s.point.x, s.point.y, s.value, s.envelope].map(|v| v.to_string()))?;
            }
            let body = String::from_utf8(wtr.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8");
            // one file per degree when several are requested
            let target = if config.degrees.len() > 1 {
                let stem = base.file_stem().map_or("profile".into(), |s| s.to_string_lossy().into_owned());
                base.with_file_name(format!("{stem}_n{n}.csv"))
            } else {
                base.to_path_buf()
            };
            if let Some(dir) = target.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            write_file(&target, &(config.csv_preamble() + &body))?;
        }
    }
    if reference.is_some() && violated > 0 {
        return Err(CliError::Assertion(violated));
    }
    Ok(())
}
