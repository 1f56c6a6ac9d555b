use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use conformal_isometry::{Grid2D, ResidualReport};
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

/// One or more value columns sampled over a grid.
#[derive(Debug, Clone)]
pub struct Table {
    pub grid: Grid2D,
    pub columns: Vec<Column>,
}

#[derive(Debug, Clone)]
pub struct Column {
    /// Key of this column in the JSON `grids` map.
    pub key: String,
    /// CSV header; single-column tables use `value`.
    pub header: String,
    pub values: Vec<f64>,
}

impl Table {
    pub fn single(grid: Grid2D, key: &str, values: Vec<f64>) -> Self {
        Self {
            grid,
            columns: vec![Column {
                key: key.to_owned(),
                header: "value".to_owned(),
                values,
            }],
        }
    }

    pub fn pair(grid: Grid2D, keys: [&str; 2], headers: [&str; 2], values: Vec<[f64; 2]>) -> Self {
        let (a, b) = values.iter().map(|v| (v[0], v[1])).unzip();
        Self {
            grid,
            columns: vec![
                Column {
                    key: keys[0].to_owned(),
                    header: headers[0].to_owned(),
                    values: a,
                },
                Column {
                    key: keys[1].to_owned(),
                    header: headers[1].to_owned(),
                    values: b,
                },
            ],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridJson<'a> {
    pub origin: [f64; 2],
    pub step: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: &'a [f64],
}

#[derive(Debug, Clone)]
pub struct Document {
    pub meta: Value,
    /// Tables keyed by file stem, in output order.
    pub tables: Vec<(String, Table)>,
    pub reports: Vec<ResidualReport>,
}

#[derive(Serialize)]
struct DocumentJson<'a> {
    meta: &'a Value,
    grids: BTreeMap<&'a str, GridJson<'a>>,
    reports: &'a [ResidualReport],
}

/// Compact JSON with every float written as 17 significant digits.
struct FullPrecision;

impl Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision);
    value
        .serialize(&mut ser)
        .expect("serializing to memory cannot fail");
    out.push(b'\n');
    out
}

pub fn document_json(doc: &Document) -> Vec<u8> {
    let mut grids = BTreeMap::new();
    for (_, table) in &doc.tables {
        for col in &table.columns {
            grids.insert(
                col.key.as_str(),
                GridJson {
                    origin: [table.grid.origin.x, table.grid.origin.y],
                    step: table.grid.step,
                    nx: table.grid.nx,
                    ny: table.grid.ny,
                    values: &col.values,
                },
            );
        }
    }
    to_json(&DocumentJson {
        meta: &doc.meta,
        grids,
        reports: &doc.reports,
    })
}

pub fn table_csv(table: &Table) -> String {
    let mut s = String::from("x,y");
    for col in &table.columns {
        s.push(',');
        s.push_str(&col.header);
    }
    s.push('\n');
    for (k, p) in table.grid.points().enumerate() {
        write!(s, "{:.16e},{:.16e}", p.x, p.y).unwrap();
        for col in &table.columns {
            write!(s, ",{:.16e}", col.values[k]).unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn reports_csv(reports: &[ResidualReport]) -> String {
    let mut s = String::from("name,max_abs_residual,tolerance,pass\n");
    for r in reports {
        writeln!(
            s,
            "{},{:.16e},{:.16e},{}",
            r.name, r.max_abs_residual, r.tolerance, r.pass
        )
        .unwrap();
    }
    s
}

/// Writes `doc` to `out` (a file for JSON, a directory for CSV) or to stdout.
pub fn emit(doc: &Document, csv: bool, out: Option<&Path>) -> io::Result<()> {
    match (csv, out) {
        (false, None) => io::stdout().lock().write_all(&document_json(doc)),
        (false, Some(path)) => fs::write(path, document_json(doc)),
        (true, None) => {
            let mut stdout = io::stdout().lock();
            for (i, (name, table)) in doc.tables.iter().enumerate() {
                if i > 0 {
                    writeln!(stdout)?;
                }
                writeln!(stdout, "# {name}")?;
                stdout.write_all(table_csv(table).as_bytes())?;
            }
            if !doc.reports.is_empty() {
                if !doc.tables.is_empty() {
                    writeln!(stdout)?;
                }
                writeln!(stdout, "# reports")?;
                stdout.write_all(reports_csv(&doc.reports).as_bytes())?;
            }
            Ok(())
        }
        (true, Some(dir)) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("meta.json"), to_json(&doc.meta))?;
            for (name, table) in &doc.tables {
                fs::write(dir.join(format!("{name}.csv")), table_csv(table))?;
            }
            if !doc.reports.is_empty() {
                fs::write(dir.join("reports.csv"), reports_csv(&doc.reports))?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use conformal_isometry::Point;

    fn grid() -> Grid2D {
        Grid2D::new(Point::new(-0.5, 0.25), 0.5, 3, 3)
    }

    #[test]
    fn floats_keep_seventeen_digits_and_round_trip() {
        let values = [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            6.02214076e23,
            0.0,
            f64::MIN_POSITIVE,
        ];
        let text = String::from_utf8(to_json(&values)).unwrap();
        assert!(text.starts_with("[1.0000000000000001e-1,"), "{text}");
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, values);
    }

    #[test]
    fn non_finite_values_become_null() {
        let text = String::from_utf8(to_json(&[f64::NAN, 1.0])).unwrap();
        assert_eq!(text, "[null,1.0000000000000000e0]\n");
    }

    #[test]
    fn csv_layout() {
        let values: Vec<[f64; 2]> = (0..9).map(|k| [k as f64, -(k as f64)]).collect();
        let text = table_csv(&Table::pair(grid(), ["W1", "W2"], ["w1", "w2"], values));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,y,w1,w2");
        assert_eq!(lines.len(), 10);
        let row: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row, vec![0.0, 0.25, 1.0, -1.0]);
        let single = table_csv(&Table::single(grid(), "Phi", vec![0.0; 9]));
        assert!(single.starts_with("x,y,value\n"));
    }

    #[test]
    fn document_splits_columns_into_grids() {
        let doc = Document {
            meta: serde_json::json!({"expression": "z"}),
            tables: vec![(
                "W".into(),
                Table::pair(grid(), ["W1", "W2"], ["w1", "w2"], vec![[1.0, 2.0]; 9]),
            )],
            reports: vec![],
        };
        let v: Value = serde_json::from_slice(&document_json(&doc)).unwrap();
        assert_eq!(v["grids"]["W2"]["values"][4], 2.0);
        assert_eq!(v["grids"]["W1"]["nx"], 3);
        assert_eq!(v["grids"]["W1"]["origin"][1], 0.25);
        assert!(v["reports"].as_array().unwrap().is_empty());
    }
}
