use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use christoffel::verification::svg;
use christoffel::Point2;

use crate::config::{write_file, RunConfig};
use crate::error::CliError;

/// Header comments and data rows of one of our CSV outputs.
fn read_table(path: &Path) -> Result<(Option<String>, csv::StringRecord, Vec<csv::StringRecord>), CliError> {
    if !path.exists() {
        return Err(CliError::Usage(format!("input {} does not exist", path.display())));
    }
    let text = fs::read_to_string(path)?;
    let source_hash = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix("# config_hash:"))
        .map(|h| h.trim().to_string());
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    let rows = reader.records().collect::<Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return Err(CliError::Usage(format!("{} has no data rows", path.display())));
    }
    Ok((source_hash, header, rows))
}

fn column(header: &csv::StringRecord, name: &str) -> Option<usize> {
    header.iter().position(|h| h == name)
}

fn field(row: &csv::StringRecord, k: usize) -> Result<f64, CliError> {
    row.get(k)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::Usage(format!("non-numeric field in row {:?}", row.iter().collect::<Vec<_>>())))
}

/// Tags an SVG with the run's config hash and, if known, its input's.
fn stamp(svg: String, config: &RunConfig, source: Option<&str>) -> String {
    let (first, rest) = svg.split_once('\n').unwrap_or((&svg, ""));
    let mut note = format!("<!-- config_hash: {} -->\n", config.hash());
    if let Some(h) = source {
        note += &format!("<!-- source_config_hash: {h} -->\n");
    }
    format!("{first}\n{note}{rest}")
}

pub fn run(config: &RunConfig, input: &Path) -> Result<(), CliError> {
    let (source, header, rows) = read_table(input)?;
    let stem = input.file_stem().map_or("plot".into(), |s| s.to_string_lossy().into_owned());
    if let (Some(n), Some(x), Some(y), Some(r)) =
        (column(&header, "n"), column(&header, "x"), column(&header, "y"), column(&header, "ratio"))
    {
        let mut by_n: BTreeMap<usize, Vec<(Point2, f64)>> = BTreeMap::new();
        for row in &rows {
            let Ok(ratio) = field(row, r) else { continue };
            let deg = field(row, n)? as usize;
            by_n.entry(deg).or_default().push((Point2::new(field(row, x)?, field(row, y)?), ratio));
        }
        if by_n.is_empty() {
            return Err(CliError::Usage(format!("{} has no ratio values", input.display())));
        }
        for (deg, pts) in by_n {
            let title = format!("{stem}: log10 λ/Λ, n = {deg}");
            let path = config.output_path(&format!("{stem}_n{deg}.svg"))?;
            write_file(&path, &stamp(svg::heatmap(&pts, &title), config, source.as_deref()))?;
            println!("{}", path.display());
        }
        return Ok(());
    }
    if let (Some(c), Some(v), Some(e)) = (column(&header, "coordinate"), column(&header, "value"), column(&header, "envelope")) {
        let samples = rows
            .iter()
            .map(|row| Ok((field(row, c)?, field(row, v)?, field(row, e)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        let constant = samples.iter().map(|(_, v, e)| v / e).fold(0.0, f64::max);
        let path = config.output_path(&format!("{stem}.svg"))?;
        let title = format!("{stem}: |P| against c·envelope, c = {constant:.3}");
        write_file(&path, &stamp(svg::profile(&samples, constant, &title), config, source.as_deref()))?;
        println!("{}", path.display());
        return Ok(());
    }
    Err(CliError::Usage(format!(
        "{}: expected ratio columns (n, x, y, ratio) or profile columns (coordinate, value, envelope)",
        input.display()
    )))
}
