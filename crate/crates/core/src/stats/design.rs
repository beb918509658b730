use super::StatsError;

/// Named predictor columns; the intercept column is implicit and always
/// prepended when the matrix is materialized for fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    n_rows: usize,
}

impl DesignMatrix {
    pub fn new(n_rows: usize) -> Self {
        DesignMatrix { names: Vec::new(), columns: Vec::new(), n_rows }
    }

    pub fn with_columns(columns: Vec<(String, Vec<f64>)>) -> Result<Self, StatsError> {
        let n_rows = columns.first().map(|(_, v)| v.len()).unwrap_or(0);
        let mut m = DesignMatrix::new(n_rows);
        for (name, values) in columns {
            m.push_column(name, values)?;
        }
        Ok(m)
    }

    pub fn push_column(&mut self, name: String, values: Vec<f64>) -> Result<(), StatsError> {
        if self.names.contains(&name) {
            return Err(StatsError::DuplicateColumn(name));
        }
        if values.len() != self.n_rows {
            return Err(StatsError::ColumnLength {
                name,
                len: values.len(),
                expected: self.n_rows,
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite(name));
        }
        self.names.push(name);
        self.columns.push(values);
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.columns[i].as_slice())
    }

    /// New matrix restricted to the given columns, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<DesignMatrix, StatsError> {
        let mut m = DesignMatrix::new(self.n_rows);
        for name in names {
            let col = self
                .column(name)
                .ok_or_else(|| StatsError::UnknownColumn(name.to_string()))?;
            m.push_column(name.to_string(), col.to_vec())?;
        }
        Ok(m)
    }

    /// Row-major matrix with a leading 1.0 intercept column.
    pub(crate) fn rows_with_intercept(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows)
            .map(|r| {
                let mut row = Vec::with_capacity(self.columns.len() + 1);
                row.push(1.0);
                for col in &self.columns {
                    row.push(col[r]);
                }
                row
            })
            .collect()
    }

    /// "(Intercept)" followed by the predictor names.
    pub(crate) fn term_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.names.len() + 1);
        names.push("(Intercept)".to_string());
        names.extend(self.names.iter().cloned());
        names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_bad_lengths_and_non_finite() {
        let mut m = DesignMatrix::new(2);
        m.push_column("a".into(), vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            m.push_column("a".into(), vec![1.0, 2.0]),
            Err(StatsError::DuplicateColumn(_))
        ));
        assert!(matches!(
            m.push_column("b".into(), vec![1.0]),
            Err(StatsError::ColumnLength { .. })
        ));
        assert!(matches!(
            m.push_column("c".into(), vec![1.0, f64::NAN]),
            Err(StatsError::NonFinite(_))
        ));
    }

    #[test]
    fn select_preserves_order_and_checks_names() {
        let m = DesignMatrix::with_columns(vec![
            ("a".into(), vec![1.0]),
            ("b".into(), vec![2.0]),
        ])
        .unwrap();
        let s = m.select(&["b", "a"]).unwrap();
        assert_eq!(s.names(), ["b", "a"]);
        assert!(m.select(&["zz"]).is_err());
    }
}
