//! DMU datasets: loading, validation and column access.
//!
//! A dataset is the generator data of the constant-returns technology: one
//! column per DMU, an input matrix (m × n) and an output matrix (s × n).
//! The CSV layout is `dmu,in:<name>,...,out:<name>,...`; roles come from the
//! `in:`/`out:` prefixes so the columns may appear in any order.

use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INPUT_PREFIX: &str = "in:";
const OUTPUT_PREFIX: &str = "out:";

/// Immutable set of decision-making units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    name_column: String,
    names: Vec<String>,
    input_names: Vec<String>,
    output_names: Vec<String>,
    /// `inputs[i][j]` is input i of DMU j.
    inputs: Vec<Vec<f64>>,
    /// `outputs[r][j]` is output r of DMU j.
    outputs: Vec<Vec<f64>>,
}

/// Role of one CSV column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColumnRole {
    Name,
    Input(String),
    Output(String),
}

/// Column-role mapping read from a CSV header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    pub roles: Vec<ColumnRole>,
    pub name_column: String,
}

impl Schema {
    pub fn from_header<'a, I>(header: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut roles = Vec::new();
        let mut name_column = None;
        let mut seen = HashSet::new();
        for raw in header {
            let col = raw.trim();
            if !seen.insert(col.to_string()) {
                return Err(Error::Header(format!("duplicate column '{col}'")));
            }
            if let Some(name) = col.strip_prefix(INPUT_PREFIX) {
                roles.push(ColumnRole::Input(name.trim().to_string()));
            } else if let Some(name) = col.strip_prefix(OUTPUT_PREFIX) {
                roles.push(ColumnRole::Output(name.trim().to_string()));
            } else {
                if let Some(prev) = &name_column {
                    return Err(Error::Header(format!(
                        "two name columns: '{prev}' and '{col}'"
                    )));
                }
                name_column = Some(col.to_string());
                roles.push(ColumnRole::Name);
            }
        }
        let name_column =
            name_column.ok_or_else(|| Error::Header("missing DMU name column".into()))?;
        if !roles.iter().any(|r| matches!(r, ColumnRole::Input(_))) {
            return Err(Error::Header("no input column (prefix 'in:')".into()));
        }
        if !roles.iter().any(|r| matches!(r, ColumnRole::Output(_))) {
            return Err(Error::Header("no output column (prefix 'out:')".into()));
        }
        Ok(Schema { roles, name_column })
    }
}

/// Which invariant a [`Violation`] breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    EmptyName,
    DuplicateName,
    NonPositiveInput,
    NonPositiveOutput,
    NonFinite,
    Shape,
    TooFewDmus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub dmu: Option<String>,
    pub dimension: Option<String>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl Dataset {
    /// Builds a dataset from its parts. Only the matrix shapes are checked
    /// here; use [`validate_dataset`] for the full invariant list.
    pub fn from_parts(
        names: Vec<String>,
        input_names: Vec<String>,
        output_names: Vec<String>,
        inputs: Vec<Vec<f64>>,
        outputs: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = names.len();
        if inputs.len() != input_names.len() || outputs.len() != output_names.len() {
            return Err(Error::Dimension(
                "row count does not match the number of dimension names".into(),
            ));
        }
        if let Some(bad) = inputs.iter().chain(&outputs).find(|row| row.len() != n) {
            return Err(Error::Dimension(format!(
                "matrix row of length {} for {} DMUs",
                bad.len(),
                n
            )));
        }
        Ok(Dataset {
            name_column: "dmu".to_string(),
            names,
            input_names,
            output_names,
            inputs,
            outputs,
        })
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn m(&self) -> usize {
        self.inputs.len()
    }

    pub fn s(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, j: usize) -> &str {
        &self.names[j]
    }

    pub fn input_names(&self) -> &[String] {
        &self.input_names
    }

    pub fn output_names(&self) -> &[String] {
        &self.output_names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Resolves a DMU name, failing with [`Error::UnknownDmu`].
    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownDmu(name.to_string()))
    }

    pub fn input(&self, i: usize, j: usize) -> f64 {
        self.inputs[i][j]
    }

    pub fn output(&self, r: usize, j: usize) -> f64 {
        self.outputs[r][j]
    }

    /// Input vector x_j.
    pub fn x(&self, j: usize) -> Vec<f64> {
        self.inputs.iter().map(|row| row[j]).collect()
    }

    /// Output vector y_j.
    pub fn y(&self, j: usize) -> Vec<f64> {
        self.outputs.iter().map(|row| row[j]).collect()
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Vec<f64>] {
        &self.outputs
    }

    /// Largest output value in the data; the Big-M policy scales from it.
    pub fn max_output(&self) -> f64 {
        self.outputs.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Writes the dataset in the canonical column order (name, inputs,
    /// outputs). Values are written with Rust's shortest round-trip float
    /// formatting, so re-loading reproduces them bit for bit.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![self.name_column.clone()];
        header.extend(
            self.input_names
                .iter()
                .map(|n| format!("{INPUT_PREFIX}{n}")),
        );
        header.extend(
            self.output_names
                .iter()
                .map(|n| format!("{OUTPUT_PREFIX}{n}")),
        );
        w.write_record(&header)?;
        for j in 0..self.n() {
            let mut rec = vec![self.names[j].clone()];
            rec.extend(self.inputs.iter().map(|row| row[j].to_string()));
            rec.extend(self.outputs.iter().map(|row| row[j].to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "<csv writer>".into(),
            source: e,
        })?;
        Ok(())
    }
}

/// Loads and validates a dataset from a CSV file.
pub fn load_dataset<P: AsRef<Path>>(path: P) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    read_dataset(file)
}

/// Parses and validates a dataset from CSV text.
pub fn read_dataset<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(rec) => rec?,
        None => return Err(Error::NoDataRows),
    };
    if header.iter().all(|c| c.is_empty()) {
        return Err(Error::NoDataRows);
    }
    let schema = Schema::from_header(header.iter())?;
    let header_names: Vec<String> = header.iter().map(str::to_string).collect();

    let input_names: Vec<String> = schema
        .roles
        .iter()
        .filter_map(|r| match r {
            ColumnRole::Input(n) => Some(n.clone()),
            _ => None,
        })
        .collect();
    let output_names: Vec<String> = schema
        .roles
        .iter()
        .filter_map(|r| match r {
            ColumnRole::Output(n) => Some(n.clone()),
            _ => None,
        })
        .collect();

    let mut names = Vec::new();
    let mut seen = HashSet::new();
    let mut inputs = vec![Vec::new(); input_names.len()];
    let mut outputs = vec![Vec::new(); output_names.len()];

    for (k, rec) in records.enumerate() {
        let rec = rec?;
        // 1-based file line numbers; the header is line 1.
        let row = k + 2;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != schema.roles.len() {
            return Err(Error::RaggedRow {
                row,
                expected: schema.roles.len(),
                found: rec.len(),
            });
        }
        let (mut ii, mut rr) = (0, 0);
        for (c, (cell, role)) in rec.iter().zip(&schema.roles).enumerate() {
            match role {
                ColumnRole::Name => {
                    if cell.is_empty() {
                        return Err(Error::EmptyName { row });
                    }
                    if !seen.insert(cell.to_string()) {
                        return Err(Error::DuplicateName {
                            row,
                            name: cell.to_string(),
                        });
                    }
                    names.push(cell.to_string());
                }
                ColumnRole::Input(_) => {
                    inputs[ii].push(parse_positive(cell, row, &header_names[c])?);
                    ii += 1;
                }
                ColumnRole::Output(_) => {
                    outputs[rr].push(parse_positive(cell, row, &header_names[c])?);
                    rr += 1;
                }
            }
        }
    }
    if names.is_empty() {
        return Err(Error::NoDataRows);
    }

    let mut ds = Dataset::from_parts(names, input_names, output_names, inputs, outputs)?;
    ds.name_column = schema.name_column;
    let violations = validate_dataset(&ds);
    if !violations.is_empty() {
        let msg: Vec<String> = violations.iter().map(|v| v.message.clone()).collect();
        return Err(Error::InvalidDataset(msg.join("; ")));
    }
    Ok(ds)
}

fn parse_positive(cell: &str, row: usize, column: &str) -> Result<f64> {
    let value: f64 = cell.parse().map_err(|_| Error::NonNumeric {
        row,
        column: column.to_string(),
        value: cell.to_string(),
    })?;
    if !value.is_finite() {
        return Err(Error::NonNumeric {
            row,
            column: column.to_string(),
            value: cell.to_string(),
        });
    }
    if value <= 0.0 {
        return Err(Error::NonPositive {
            row,
            column: column.to_string(),
            value,
        });
    }
    Ok(value)
}

/// Lists every invariant the dataset breaks. Empty means valid.
pub fn validate_dataset(ds: &Dataset) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (j, name) in ds.names.iter().enumerate() {
        if name.trim().is_empty() {
            out.push(Violation {
                rule: Rule::EmptyName,
                dmu: Some(name.clone()),
                dimension: None,
                message: format!("DMU #{} has an empty name", j + 1),
            });
        } else if !seen.insert(name.as_str()) {
            out.push(Violation {
                rule: Rule::DuplicateName,
                dmu: Some(name.clone()),
                dimension: None,
                message: format!("duplicate DMU name '{name}'"),
            });
        }
    }

    let n = ds.n();
    let blocks = [
        (&ds.inputs, &ds.input_names, Rule::NonPositiveInput, "input"),
        (
            &ds.outputs,
            &ds.output_names,
            Rule::NonPositiveOutput,
            "output",
        ),
    ];
    for (matrix, dims, rule, kind) in blocks {
        for (row, dim) in matrix.iter().zip(dims) {
            if row.len() != n {
                out.push(Violation {
                    rule: Rule::Shape,
                    dmu: None,
                    dimension: Some(dim.clone()),
                    message: format!("{kind} '{dim}' has {} values for {n} DMUs", row.len()),
                });
                continue;
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    out.push(Violation {
                        rule: Rule::NonFinite,
                        dmu: Some(ds.names[j].clone()),
                        dimension: Some(dim.clone()),
                        message: format!("{kind} '{dim}' of DMU '{}' is not finite", ds.names[j]),
                    });
                } else if v <= 0.0 {
                    out.push(Violation {
                        rule,
                        dmu: Some(ds.names[j].clone()),
                        dimension: Some(dim.clone()),
                        message: format!(
                            "{kind} '{dim}' of DMU '{}' is {v}, must be strictly positive",
                            ds.names[j]
                        ),
                    });
                }
            }
        }
    }

    let (m, s) = (ds.m(), ds.s());
    if m == 0 || s == 0 {
        out.push(Violation {
            rule: Rule::Shape,
            dmu: None,
            dimension: None,
            message: format!("need at least one input and one output (m = {m}, s = {s})"),
        });
    } else if n + 1 < s + m {
        out.push(Violation {
            rule: Rule::TooFewDmus,
            dmu: None,
            dimension: None,
            message: format!(
                "too few DMUs for any FDEF: n = {n} < s + m - 1 = {}",
                s + m - 1
            ),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "dmu,in:input,out:o1,out:o2,out:o3\n\
                       A,1,5,10,120\nB,1,10,5,120\nC,1,100,100,90\n";

    #[test]
    fn parses_roles_in_any_order() {
        let text = "out:b,name,in:x,out:a\n2,P,1,3\n4,Q,2,5\n";
        let ds = read_dataset(text.as_bytes()).unwrap();
        assert_eq!(ds.names(), ["P", "Q"]);
        assert_eq!(ds.input_names(), ["x"]);
        assert_eq!(ds.output_names(), ["b", "a"]);
        assert_eq!(ds.y(0), vec![2.0, 3.0]);
        assert_eq!(ds.x(1), vec![2.0]);
    }

    #[test]
    fn empty_file_has_no_data_rows() {
        let err = read_dataset("".as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "no data rows");
        let err = read_dataset("dmu,in:x,out:y\n".as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "no data rows");
    }

    #[test]
    fn header_errors() {
        assert!(matches!(
            read_dataset("dmu,out:y\nA,1\n".as_bytes()),
            Err(Error::Header(_))
        ));
        assert!(matches!(
            read_dataset("dmu,in:x\nA,1\n".as_bytes()),
            Err(Error::Header(_))
        ));
        assert!(matches!(
            read_dataset("dmu,label,in:x,out:y\nA,a,1,1\n".as_bytes()),
            Err(Error::Header(_))
        ));
        assert!(matches!(
            read_dataset("dmu,in:x,in:x,out:y\nA,1,1,1\n".as_bytes()),
            Err(Error::Header(_))
        ));
    }

    #[test]
    fn cell_errors_carry_location() {
        let err = read_dataset("dmu,in:x,out:y\nA,1,2\nB,abc,2\n".as_bytes()).unwrap_err();
        match err {
            Error::NonNumeric { row, column, .. } => {
                assert_eq!(row, 3);
                assert_eq!(column, "in:x");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = read_dataset("dmu,in:x,out:y\nA,1,0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::NonPositive { row: 2, .. }));
        let err = read_dataset("dmu,in:x,out:y\nA,1,1\nA,2,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::DuplicateName { row: 3, .. }));
        let err = read_dataset("dmu,in:x,out:y\nA,1,inf\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::NonNumeric { .. }));
    }

    #[test]
    fn valid_toy_has_no_violations() {
        let ds = read_dataset(TOY.as_bytes()).unwrap();
        assert!(validate_dataset(&ds).is_empty());
        assert_eq!((ds.n(), ds.m(), ds.s()), (3, 1, 3));
    }

    #[test]
    fn zero_output_is_one_violation() {
        let ds = Dataset::from_parts(
            vec!["A".into(), "B".into(), "C".into()],
            vec!["x".into()],
            vec!["y1".into(), "y2".into()],
            vec![vec![1.0, 1.0, 1.0]],
            vec![vec![1.0, 0.0, 2.0], vec![3.0, 3.0, 1.0]],
        )
        .unwrap();
        let v = validate_dataset(&ds);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::NonPositiveOutput);
        assert_eq!(v[0].dmu.as_deref(), Some("B"));
        assert_eq!(v[0].dimension.as_deref(), Some("y1"));
    }

    #[test]
    fn too_few_dmus() {
        // s + m - 2 = 3 DMUs with s = 3, m = 2.
        let ds = Dataset::from_parts(
            vec!["A".into(), "B".into(), "C".into()],
            vec!["x1".into(), "x2".into()],
            vec!["y1".into(), "y2".into(), "y3".into()],
            vec![vec![1.0; 3], vec![2.0; 3]],
            vec![vec![1.0; 3], vec![2.0; 3], vec![3.0; 3]],
        )
        .unwrap();
        let v = validate_dataset(&ds);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::TooFewDmus);
        assert!(v[0].message.contains("too few DMUs for any FDEF"));
    }

    #[test]
    fn csv_round_trip() {
        let ds = read_dataset(TOY.as_bytes()).unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let again = read_dataset(buf.as_slice()).unwrap();
        assert_eq!(ds, again);
    }
}
