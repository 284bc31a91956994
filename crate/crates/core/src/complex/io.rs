use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};

use super::{Filtration, PointCloud, Simplex};

impl PointCloud {
    /// One point per line, comma-separated coordinates, no header.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(input);
        let mut points = Vec::new();
        for (n, record) in reader.records().enumerate() {
            let record = record?;
            let point = record
                .iter()
                .map(|field| {
                    field.parse::<f64>().map_err(|e| Error::Parse {
                        line: n + 1,
                        message: format!("`{field}`: {e}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            points.push(point);
        }
        PointCloud::new(points)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        for p in &self.points {
            writer.write_record(p.iter().map(|x| x.to_string()))?;
        }
        writer.flush()?;
        Ok(())
    }
}

impl Filtration {
    /// One line per simplex: `index dim scale v1 ... vk`, index 1-based.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        for (idx, s) in self.simplices.iter().enumerate() {
            write!(out, "{} {} {}", idx + 1, s.dim(), s.scale)?;
            for v in &s.vertices {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Reads the format of [`Filtration::write_text`]. The scale grid becomes
    /// the distinct positive scales present.
    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut simplices = Vec::new();
        for (n, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: String| Error::Parse {
                line: n + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 4 {
                return Err(bad(format!("expected at least 4 fields, found {}", fields.len())));
            }
            let int = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("`{s}`: {e}")));
            let index = int(fields[0])?;
            if index != simplices.len() + 1 {
                return Err(bad(format!("expected index {}, found {index}", simplices.len() + 1)));
            }
            let dim = int(fields[1])?;
            let scale = fields[2]
                .parse::<f64>()
                .map_err(|e| bad(format!("`{}`: {e}", fields[2])))?;
            let vertices = fields[3..].iter().map(|s| int(s)).collect::<Result<Vec<_>>>()?;
            if vertices.len() != dim + 1 {
                return Err(bad(format!("dimension {dim} with {} vertices", vertices.len())));
            }
            simplices.push(Simplex { vertices, scale });
        }
        let mut grid: Vec<f64> = simplices.iter().map(|s| s.scale).filter(|&r| r > 0.0).collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        Filtration::new(simplices, grid)
    }
}
