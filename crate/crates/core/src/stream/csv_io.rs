//! CSV batch source and writer.
//!
//! Input files are UTF-8 with a header row; every column except an optional
//! integer label column is parsed as a 64-bit float feature. Batches carry
//! exactly `batch_size` rows in file order; a final partial batch is
//! dropped so every batch has the same size.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::Array2;

use super::Batch;
use crate::error::{Error, Result};

pub struct CsvStream {
    reader: csv::Reader<File>,
    feature_columns: Vec<usize>,
    feature_names: Vec<String>,
    label_column: Option<usize>,
    batch_size: usize,
    next_index: usize,
    data_row: usize,
    done: bool,
}

impl CsvStream {
    /// Opens a CSV file as a batch source. When `label_column` is given the
    /// header must contain it; the remaining columns are features.
    pub fn open(
        path: impl AsRef<Path>,
        batch_size: usize,
        label_column: Option<&str>,
    ) -> Result<Self> {
        if batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be positive".into()));
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path.as_ref())?;
        let headers = reader.headers()?.clone();

        let label_idx = match label_column {
            Some(name) => Some(
                headers
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| Error::MissingLabelColumn(name.to_string()))?,
            ),
            None => None,
        };
        let mut feature_columns = Vec::new();
        let mut feature_names = Vec::new();
        for (i, name) in headers.iter().enumerate() {
            if Some(i) != label_idx {
                feature_columns.push(i);
                feature_names.push(name.to_string());
            }
        }
        if feature_columns.is_empty() {
            return Err(Error::InvalidConfig("no feature columns in header".into()));
        }

        Ok(Self {
            reader,
            feature_columns,
            feature_names,
            label_column: label_idx,
            batch_size,
            next_index: 0,
            data_row: 0,
            done: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.feature_columns.len()
    }

    pub fn has_labels(&self) -> bool {
        self.label_column.is_some()
    }

    fn read_batch(&mut self) -> Result<Option<Batch>> {
        let d = self.feature_columns.len();
        let mut values = Vec::with_capacity(self.batch_size * d);
        let mut labels = self.label_column.map(|_| Vec::with_capacity(self.batch_size));
        let mut rows = 0;

        let mut record = csv::StringRecord::new();
        while rows < self.batch_size {
            if !self.reader.read_record(&mut record)? {
                self.done = true;
                break;
            }
            self.data_row += 1;
            for (&col, name) in self.feature_columns.iter().zip(&self.feature_names) {
                let cell = record.get(col).unwrap_or("");
                let value: f64 = cell.parse().map_err(|_| Error::CsvParse {
                    row: self.data_row,
                    column: name.clone(),
                    message: format!("cannot parse {cell:?} as a float"),
                })?;
                if !value.is_finite() {
                    return Err(Error::CsvParse {
                        row: self.data_row,
                        column: name.clone(),
                        message: format!("value {value} is not finite"),
                    });
                }
                values.push(value);
            }
            if let (Some(labels), Some(col)) = (labels.as_mut(), self.label_column) {
                let cell = record.get(col).unwrap_or("");
                let label: u8 = cell.parse().map_err(|_| Error::CsvParse {
                    row: self.data_row,
                    column: "label".into(),
                    message: format!("cannot parse {cell:?} as an integer label"),
                })?;
                if label > 1 {
                    return Err(Error::CsvParse {
                        row: self.data_row,
                        column: "label".into(),
                        message: format!("label must be 0 or 1, got {label}"),
                    });
                }
                labels.push(label);
            }
            rows += 1;
        }

        // A trailing partial batch is dropped to keep batch sizes equal.
        if rows < self.batch_size {
            return Ok(None);
        }
        let data = Array2::from_shape_vec((rows, d), values)
            .expect("row-major buffer matches shape");
        let index = self.next_index;
        self.next_index += 1;
        Ok(Some(Batch::new(data, labels, index)?))
    }
}

impl Iterator for CsvStream {
    type Item = Result<Batch>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.read_batch() {
            Ok(Some(batch)) => Some(Ok(batch)),
            Ok(None) => None,
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Writes batches as a CSV stream with feature columns `f0..f{d-1}` and a
/// trailing `label` column when labels are present. Floats are written in
/// shortest round-trip form, so re-reading reproduces them bit for bit.
pub fn write_stream_csv(path: impl AsRef<Path>, batches: &[Batch]) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut out = BufWriter::new(file);

    let Some(first) = batches.first() else {
        return Err(Error::InvalidConfig("no batches to write".into()));
    };
    let d = first.dim();
    let labeled = first.labels.is_some();

    let mut header: Vec<String> = (0..d).map(|i| format!("f{i}")).collect();
    if labeled {
        header.push("label".into());
    }
    writeln!(out, "{}", header.join(","))?;

    let mut line = String::new();
    for batch in batches {
        for (i, row) in batch.data.rows().into_iter().enumerate() {
            line.clear();
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{v}"));
            }
            if let Some(labels) = &batch.labels {
                line.push(',');
                line.push_str(&labels[i].to_string());
            }
            writeln!(out, "{line}")?;
        }
    }
    out.flush()?;
    Ok(())
}
