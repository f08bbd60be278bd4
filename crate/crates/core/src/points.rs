//! Finite point sets, the data being embedded. Parsed from plain text
//! (one vector per line, comma- or whitespace-separated floats) and
//! optionally normalized onto the sphere.

use crate::error::{Error, Result};
use crate::metrics::norm;

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    data: Vec<f64>, // row-major
    dim: usize,
    count: usize,
    normalized: bool,
}

impl PointSet {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("point set"));
        }
        let dim = rows[0].len();
        if dim == 0 {
            return Err(Error::EmptyInput("point dimension"));
        }
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected {dim} columns, got {}", row.len()),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Parse { line: i + 1, msg: "non-finite entry".into() });
            }
            data.extend_from_slice(row);
        }
        Ok(PointSet { data, dim, count: rows.len(), normalized: false })
    }

    /// Parses one vector per line; empty lines are skipped. Reports the
    /// 1-based line number on failure.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut dim = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for tok in line.split(|c: char| c.is_whitespace() || c == ',') {
                if tok.is_empty() {
                    continue;
                }
                let v: f64 = tok.parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: format!("invalid number {tok:?}"),
                })?;
                row.push(v);
            }
            match dim {
                None => dim = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("expected {d} columns, got {}", row.len()),
                    })
                }
                _ => {}
            }
            rows.push(row);
        }
        PointSet::from_rows(rows)
    }

    /// Scales every row to unit norm; rejects zero rows.
    pub fn normalized(mut self) -> Result<Self> {
        for i in 0..self.count {
            let start = i * self.dim;
            let n = norm(&self.data[start..start + self.dim]);
            if n == 0.0 {
                return Err(Error::Parse { line: i + 1, msg: "zero row cannot be normalized".into() });
            }
            for v in &mut self.data[start..start + self.dim] {
                *v /= n;
            }
        }
        self.normalized = true;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.count).map(move |i| self.point(i))
    }

    /// The set together with the antipode of every point.
    pub fn symmetrized(&self) -> PointSet {
        let mut data = self.data.clone();
        data.extend(self.data.iter().map(|v| -v));
        PointSet { data, dim: self.dim, count: 2 * self.count, normalized: self.normalized }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn parse_basic() {
        let ps = PointSet::parse("1,0,0\n0,1,0").unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps.dim(), 3);
        assert_eq!(ps.point(1), &[0.0, 1.0, 0.0]);
        let ws = PointSet::parse("1 0 0\n0 1 0").unwrap();
        assert_eq!(ws, ps);
    }

    #[test]
    fn parse_normalize_three_four_five() {
        let ps = PointSet::parse("3,4").unwrap().normalized().unwrap();
        assert_abs_diff_eq!(ps.point(0)[0], 0.6);
        assert_abs_diff_eq!(ps.point(0)[1], 0.8);
    }

    #[test]
    fn zero_row_rejected_under_normalize() {
        assert!(PointSet::parse("0,0").unwrap().normalized().is_err());
    }

    #[test]
    fn errors_carry_line_numbers() {
        match PointSet::parse("1,2\n3,oops") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        match PointSet::parse("1,2\n3") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn symmetrize_doubles() {
        let ps = PointSet::parse("1,0\n0,1").unwrap();
        let sym = ps.symmetrized();
        assert_eq!(sym.len(), 4);
        assert_eq!(sym.point(2), &[-1.0, 0.0]);
    }
}
