//! CSV form of a [`SweepTable`].

use std::path::Path;

use super::sweep::{Source, SweepRow, SweepTable};
use crate::analytic::MeanAge;
use crate::error::{Error, Result};

const LEADING: [&str; 8] = [
    "sweep_param",
    "sweep_value",
    "gamma_db",
    "avg_aoi",
    "plp",
    "p_queue_nonempty",
    "q_d",
    "q_aoi",
];

pub fn header(constraints: &[u32]) -> String {
    let mut cols: Vec<String> = LEADING.iter().map(|s| s.to_string()).collect();
    cols.extend(constraints.iter().map(|c| format!("violation_c{c}")));
    cols.push("source".into());
    cols.join(",")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "na".to_string(), |x| x.to_string())
}

fn age(v: Option<MeanAge>) -> String {
    v.map_or_else(|| "na".to_string(), |a| a.to_string())
}

fn row_cells(row: &SweepRow) -> Vec<String> {
    let mut cells = vec![
        row.sweep_param.clone(),
        opt(row.sweep_value),
        row.gamma_db.to_string(),
        age(row.avg_aoi),
        row.plp.to_string(),
        row.p_queue_nonempty.to_string(),
        opt(row.q_d),
        opt(row.q_aoi),
    ];
    cells.extend(row.violations.iter().map(|v| opt(*v)));
    cells.push(row.source.name().to_string());
    cells
}

fn csv_err(line: usize, message: impl Into<String>) -> Error {
    Error::Csv {
        line,
        message: message.into(),
    }
}

fn from_csv_error(e: ::csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    csv_err(line, e.to_string())
}

/// Renders the table. Floats use the shortest representation that reads
/// back to the same value, so output is byte-stable across runs.
pub fn to_csv_string(table: &SweepTable) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut w = ::csv::WriterBuilder::new()
        .terminator(::csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header(&table.constraints).split(','))
        .map_err(from_csv_error)?;
    for row in &table.rows {
        w.write_record(row_cells(row)).map_err(from_csv_error)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| csv_err(0, e.error().to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Writes the table to `path`. Nothing is created for an empty table.
pub fn emit_csv(table: &SweepTable, path: &Path) -> Result<()> {
    let text = to_csv_string(table)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn parse_f64(line: usize, col: &str, cell: &str) -> Result<f64> {
    cell.parse::<f64>()
        .map_err(|_| csv_err(line, format!("column `{col}`: cannot parse `{cell}`")))
}

fn parse_opt(line: usize, col: &str, cell: &str) -> Result<Option<f64>> {
    if cell == "na" {
        Ok(None)
    } else {
        parse_f64(line, col, cell).map(Some)
    }
}

/// Reads back a table written by [`to_csv_string`]. The label is left empty
/// and `alpha` unknown.
pub fn parse_csv(text: &str) -> Result<SweepTable> {
    let mut reader = ::csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let head = reader.headers().map_err(from_csv_error)?.clone();
    let cols: Vec<&str> = head.iter().collect();
    if cols.len() < LEADING.len() + 1
        || cols[..LEADING.len()] != LEADING
        || cols.last() != Some(&"source")
    {
        return Err(csv_err(
            1,
            format!("unexpected header `{}`", cols.join(",")),
        ));
    }
    let constraints = cols[LEADING.len()..cols.len() - 1]
        .iter()
        .map(|c| {
            c.strip_prefix("violation_c")
                .and_then(|k| k.parse::<u32>().ok())
                .ok_or_else(|| csv_err(1, format!("unexpected column `{c}`")))
        })
        .collect::<Result<Vec<u32>>>()?;

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(from_csv_error)?;
        let n = record.position().map_or(0, |p| p.line() as usize);
        let cells: Vec<&str> = record.iter().collect();
        let avg_aoi = match cells[3] {
            "na" => None,
            "inf" => Some(MeanAge::Unbounded),
            c => Some(MeanAge::Finite(parse_f64(n, "avg_aoi", c)?)),
        };
        let source = match cells[cells.len() - 1] {
            "analytic" => Source::Analytic,
            "simulated" => Source::Simulated,
            other => return Err(csv_err(n, format!("unknown source `{other}`"))),
        };
        rows.push(SweepRow {
            sweep_param: cells[0].to_string(),
            sweep_value: parse_opt(n, "sweep_value", cells[1])?,
            gamma_db: parse_f64(n, "gamma_db", cells[2])?,
            avg_aoi,
            plp: parse_f64(n, "plp", cells[4])?,
            p_queue_nonempty: parse_f64(n, "p_queue_nonempty", cells[5])?,
            q_d: parse_opt(n, "q_d", cells[6])?,
            q_aoi: parse_opt(n, "q_aoi", cells[7])?,
            violations: cells[LEADING.len()..cells.len() - 1]
                .iter()
                .map(|c| parse_opt(n, "violation", c))
                .collect::<Result<_>>()?,
            source,
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    Ok(SweepTable {
        label: String::new(),
        alpha: None,
        constraints,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(avg: Option<MeanAge>) -> SweepRow {
        SweepRow {
            sweep_param: "p1".into(),
            sweep_value: Some(0.1),
            gamma_db: -2.0,
            avg_aoi: avg,
            plp: 0.25,
            p_queue_nonempty: 0.5,
            q_d: Some(0.2),
            q_aoi: None,
            violations: vec![Some(0.3), None],
            source: Source::Analytic,
        }
    }

    fn table(rows: Vec<SweepRow>) -> SweepTable {
        SweepTable {
            label: String::new(),
            alpha: None,
            constraints: vec![3, 5],
            rows,
        }
    }

    #[test]
    fn header_is_exact() {
        assert_eq!(
            header(&[3, 5]),
            "sweep_param,sweep_value,gamma_db,avg_aoi,plp,p_queue_nonempty,q_d,q_aoi,\
             violation_c3,violation_c5,source"
        );
        assert_eq!(
            header(&[]),
            "sweep_param,sweep_value,gamma_db,avg_aoi,plp,p_queue_nonempty,q_d,q_aoi,source"
        );
    }

    #[test]
    fn markers_round_trip() {
        let t = table(vec![
            row(Some(MeanAge::Unbounded)),
            row(None),
            row(Some(MeanAge::Finite(4.5))),
        ]);
        let text = to_csv_string(&t).unwrap();
        assert!(text.lines().nth(1).unwrap().contains(",inf,"));
        assert!(text.lines().nth(2).unwrap().starts_with("p1,0.1,-2,na,"));
        let back = parse_csv(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(to_csv_string(&back).unwrap(), text);
    }

    #[test]
    fn empty_table_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        assert!(matches!(
            emit_csv(&table(vec![]), &path),
            Err(Error::EmptyTable)
        ));
        assert!(!path.exists());
    }

    #[test]
    fn malformed_input() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("a,b,c\n").is_err());
        let good = to_csv_string(&table(vec![row(None)])).unwrap();
        let short = good.replace(",analytic", "");
        assert!(matches!(parse_csv(&short), Err(Error::Csv { line: 2, .. })));
        let bad_source = good.replace("analytic", "guess");
        assert!(parse_csv(&bad_source).is_err());
        let header_only = format!("{}\n", header(&[3, 5]));
        assert!(matches!(parse_csv(&header_only), Err(Error::EmptyTable)));
    }
}
