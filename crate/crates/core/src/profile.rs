//! Tab-separated profile tables.
//!
//! Columns whose name starts with `H_` hold entropies in nats and are
//! converted to the requested log base on output. Real values are written
//! with 12 significant digits, so output is byte-stable.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::numeric::format_g;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Chain,
    Tree,
    /// One row per input sequence or tree.
    Summary,
}

impl ProfileKind {
    pub fn index_name(self) -> &'static str {
        match self {
            ProfileKind::Chain => "t",
            ProfileKind::Tree => "vertex",
            ProfileKind::Summary => "input",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnType {
    Integer,
    Real,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnType,
    /// Integer columns hold integral values; `NaN` marks a missing cell.
    pub values: Vec<f64>,
}

impl Column {
    pub fn is_entropy(&self) -> bool {
        self.name.starts_with("H_")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogBase {
    E,
    Two,
}

impl LogBase {
    /// Factor converting nats to this base.
    pub fn factor(self) -> f64 {
        match self {
            LogBase::E => 1.0,
            LogBase::Two => 1.0 / std::f64::consts::LN_2,
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" => Ok(LogBase::E),
            "2" => Ok(LogBase::Two),
            other => Err(Error::InvalidArgument(format!(
                "log base must be 'e' or '2', got {other:?}"
            ))),
        }
    }
}

/// One row per time step or vertex. The index column is implicit and runs
/// `0..rows`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub kind: ProfileKind,
    pub rows: usize,
    pub columns: Vec<Column>,
}

impl ProfileTable {
    pub fn new(kind: ProfileKind, rows: usize) -> Self {
        Self {
            kind,
            rows,
            columns: Vec::new(),
        }
    }

    fn push(&mut self, name: String, kind: ColumnType, values: Vec<f64>) {
        assert_eq!(values.len(), self.rows, "column {name} has the wrong length");
        self.columns.push(Column { name, kind, values });
    }

    pub fn push_integer<I: IntoIterator<Item = i64>>(&mut self, name: impl Into<String>, values: I) {
        let values = values.into_iter().map(|v| v as f64).collect();
        self.push(name.into(), ColumnType::Integer, values);
    }

    pub fn push_real<I: IntoIterator<Item = f64>>(&mut self, name: impl Into<String>, values: I) {
        self.push(name.into(), ColumnType::Real, values.into_iter().collect());
    }

    pub fn push_array(&mut self, name: impl Into<String>, values: &Array1<f64>) {
        self.push_real(name, values.iter().copied());
    }

    /// One real column per matrix column, named `{prefix}{j}`.
    pub fn push_matrix(&mut self, prefix: &str, values: &Array2<f64>) {
        for j in 0..values.ncols() {
            self.push_real(format!("{prefix}{j}"), values.column(j).iter().copied());
        }
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }
}

fn format_cell(value: f64, kind: ColumnType) -> String {
    if value.is_nan() {
        return "NA".to_string();
    }
    match kind {
        ColumnType::Integer => format!("{}", value as i64),
        ColumnType::Real => format_g(value, 12),
    }
}

/// Header plus one line per row, `\t` separated, `\n` terminated.
pub fn write_profile(table: &ProfileTable, base: LogBase) -> String {
    let mut out = String::new();
    out.push_str(table.kind.index_name());
    for c in &table.columns {
        out.push('\t');
        out.push_str(&c.name);
    }
    out.push('\n');
    for r in 0..table.rows {
        out.push_str(&r.to_string());
        for c in &table.columns {
            let v = if c.is_entropy() { c.values[r] * base.factor() } else { c.values[r] };
            out.push('\t');
            out.push_str(&format_cell(v, c.kind));
        }
        out.push('\n');
    }
    out
}

/// Parses a table written by [`write_profile`]. Values are read as written,
/// without undoing any log-base conversion.
pub fn read_profile(text: &str) -> Result<ProfileTable> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "empty profile".into(),
    })?;
    let names: Vec<&str> = header.split('\t').collect();
    let kind = match names[0] {
        "t" => ProfileKind::Chain,
        "vertex" => ProfileKind::Tree,
        "input" => ProfileKind::Summary,
        other => {
            return Err(Error::Parse {
                line: 1,
                message: format!("unknown index column {other:?}"),
            })
        }
    };
    let mut columns: Vec<Column> = names[1..]
        .iter()
        .map(|&name| Column {
            name: name.to_string(),
            kind: ColumnType::Integer,
            values: Vec::new(),
        })
        .collect();
    let mut rows = 0;
    for (i, line) in lines {
        let line_no = i + 1;
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != names.len() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("{} cells, expected {}", cells.len(), names.len()),
            });
        }
        if cells[0] != rows.to_string() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("index {:?}, expected {rows}", cells[0]),
            });
        }
        for (col, cell) in columns.iter_mut().zip(&cells[1..]) {
            let value = if *cell == "NA" {
                f64::NAN
            } else {
                if cell.parse::<i64>().is_err() {
                    col.kind = ColumnType::Real;
                }
                cell.parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("column {}: {cell:?} is not a number", col.name),
                })?
            };
            col.values.push(value);
        }
        rows += 1;
    }
    Ok(ProfileTable { kind, rows, columns })
}

/// Writes several tables separated by blank lines.
pub fn write_profiles(tables: &[ProfileTable], base: LogBase) -> String {
    tables
        .iter()
        .map(|t| write_profile(t, base))
        .collect::<Vec<_>>()
        .join("\n")
}
