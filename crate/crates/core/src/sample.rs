//! Point sets and labeled samples.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector, RowDVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg;

/// An `m × d` matrix whose rows are points in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SampleMatrix(DMatrix<f64>);

impl SampleMatrix {
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        if x.ncols() == 0 {
            return invalid("points must have at least one coordinate");
        }
        if x.iter().any(|v| !v.is_finite()) {
            return invalid("points contain non-finite entries");
        }
        Ok(SampleMatrix(x))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return invalid("point set is empty");
        };
        let d = first.len();
        if rows.iter().any(|r| r.len() != d) {
            return invalid("rows have differing lengths");
        }
        Self::new(DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]))
    }

    /// Rows of `scale · I_d`.
    pub fn scaled_identity(d: usize, scale: f64) -> Self {
        SampleMatrix(DMatrix::identity(d, d) * scale)
    }

    pub fn m(&self) -> usize {
        self.0.nrows()
    }

    pub fn dim(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn row(&self, i: usize) -> RowDVector<f64> {
        self.0.row(i).into_owned()
    }

    pub fn row_vec(&self, i: usize) -> DVector<f64> {
        self.0.row(i).transpose()
    }

    pub fn gram(&self) -> DMatrix<f64> {
        linalg::gram(&self.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SampleMatrix(&self.0 * factor)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        SampleMatrix(self.0.select_rows(idx))
    }

    /// First `m` rows.
    pub fn prefix(&self, m: usize) -> Self {
        SampleMatrix(self.0.rows(0, m).into_owned())
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &SampleMatrix) -> Result<Self> {
        if self.dim() != other.dim() {
            return invalid("cannot stack point sets of different dimension");
        }
        let (m1, m2) = (self.m(), other.m());
        let d = self.dim();
        Ok(SampleMatrix(DMatrix::from_fn(m1 + m2, d, |i, j| {
            if i < m1 {
                self.0[(i, j)]
            } else {
                other.0[(i - m1, j)]
            }
        })))
    }

    /// Right-multiplies by a `d × d` matrix (e.g. a rotation).
    pub fn transform(&self, r: &DMatrix<f64>) -> Self {
        SampleMatrix(&self.0 * r)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.0
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    /// Reads points from CSV, one point per line. A leading non-numeric line is
    /// taken as a header.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parsed: std::result::Result<Vec<f64>, _> =
                rec.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(r) => rows.push(r),
                Err(_) if line == 0 => continue,
                Err(e) => return invalid(format!("line {}: {e}", line + 1)),
            }
        }
        Self::from_rows(&rows)
    }

    pub fn read_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    /// Writes a header `x1,...,xd` followed by one point per line.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record((1..=self.dim()).map(|j| format!("x{j}")))?;
        for row in self.0.row_iter() {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

impl TryFrom<Vec<Vec<f64>>> for SampleMatrix {
    type Error = crate::error::Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<SampleMatrix> for Vec<Vec<f64>> {
    fn from(x: SampleMatrix) -> Self {
        x.to_rows()
    }
}

/// Points with ±1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    points: SampleMatrix,
    labels: Vec<i8>,
}

impl LabeledSample {
    pub fn new(points: SampleMatrix, labels: Vec<i8>) -> Result<Self> {
        if points.m() != labels.len() {
            return invalid(format!("{} points but {} labels", points.m(), labels.len()));
        }
        if labels.iter().any(|&y| y != 1 && y != -1) {
            return invalid("labels must be +1 or -1");
        }
        Ok(LabeledSample { points, labels })
    }

    pub fn points(&self) -> &SampleMatrix {
        &self.points
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    pub fn m(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    /// Margins `y_i ⟨x_i, w⟩`.
    pub fn margins(&self, w: &DVector<f64>) -> Vec<f64> {
        let scores = self.points.matrix() * w;
        scores
            .iter()
            .zip(&self.labels)
            .map(|(s, &y)| f64::from(y) * s)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_with_and_without_header() {
        let a = SampleMatrix::read_csv("x1,x2\n1,2\n3,4\n".as_bytes()).unwrap();
        let b = SampleMatrix::read_csv("1,2\n3,4\n".as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.m(), 2);
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        assert_eq!(SampleMatrix::read_csv(buf.as_slice()).unwrap(), a);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SampleMatrix::read_csv("1,2\n3,x\n".as_bytes()).is_err());
        assert!(SampleMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(SampleMatrix::from_rows(&[vec![f64::NAN]]).is_err());
        let x = SampleMatrix::scaled_identity(2, 1.0);
        assert!(LabeledSample::new(x.clone(), vec![1]).is_err());
        assert!(LabeledSample::new(x, vec![1, 0]).is_err());
    }

    #[test]
    fn stack_and_prefix() {
        let a = SampleMatrix::scaled_identity(2, 1.0);
        let b = SampleMatrix::from_rows(&[vec![5.0, 6.0]]).unwrap();
        let s = a.stack(&b).unwrap();
        assert_eq!(s.m(), 3);
        assert_eq!(s.prefix(2), a);
        assert_eq!(s.row(2)[1], 6.0);
    }
}
