use std::path::Path;

use christoffel::rho::{theorem_rhs, FormulaMode};
use christoffel::verification::{grid_points, GridSpec};
use christoffel::{build_evaluator, Point2};

use super::{degrees, num};
use crate::config::{write_file, RunConfig};
use crate::error::CliError;

pub const COLUMNS: [&str; 9] = ["x", "y", "n", "lambda", "formula", "ratio", "argmin", "cond", "precision_mode"];

pub fn read_points(path: &Path) -> Result<Vec<Point2>, CliError> {
    if !path.exists() {
        return Err(CliError::Usage(format!("points file {} does not exist", path.display())));
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).trim(csv::Trim::All).from_path(path)?;
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let parse = |k: usize| row.get(k).and_then(|s| s.parse::<f64>().ok());
        match (parse(0), parse(1)) {
            (Some(x), Some(y)) => out.push(Point2::new(x, y)),
            // a non-numeric first row is a header
            _ if i == 0 => continue,
            _ => return Err(CliError::Usage(format!("{}: row {} is not `x,y`", path.display(), i + 1))),
        }
    }
    Ok(out)
}

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let domain = config.domains(&["disc"])[0].load()?;
    let mut grids = config.grid_specs();
    if grids.is_empty() && config.points.is_none() {
        grids.push(GridSpec::Cartesian { nx: 21, ny: 21 });
    }
    let mut points = Vec::new();
    for g in &grids {
        points.extend(grid_points(&domain, g)?);
    }
    if let Some(p) = &config.points {
        points.extend(read_points(p)?);
    }

    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(COLUMNS)?;
    for n in degrees(config, &[4]) {
        if points.is_empty() {
            break;
        }
        let ev = build_evaluator(&domain, n, &config.evaluator_options())?;
        let cond = ev.cond_estimate().to_string();
        let mode = ev.precision_mode().to_string();
        for (x, lam) in points.iter().zip(ev.lambda_many(&points)) {
            let rhs = if n == 0 { None } else { Some(theorem_rhs(&domain, *x, n, FormulaMode::Full)?) };
            wtr.write_record([
                x.x.to_string(),
                x.y.to_string(),
                n.to_string(),
                lam.to_string(),
                num(rhs.as_ref().map(|r| r.value)),
                num(rhs.as_ref().map(|r| lam / r.value)),
                rhs.as_ref().map_or(String::new(), |r| r.argmin.to_string()),
                cond.clone(),
                mode.clone(),
            ])?;
        }
    }
    let body = String::from_utf8(wtr.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8");
    let path = config.output_path("lambda.csv")?;
    write_file(&path, &(config.csv_preamble() + &body))?;
    println!("{}", path.display());
    Ok(())
}
