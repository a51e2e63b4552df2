//! Symmetric labeled distance matrices and their CSV form.

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};

/// Pairwise distances between the barcodes of a labeled collection.
///
/// Entries are stored dense row-major; construction validates symmetry,
/// nonnegativity, and a zero diagonal, so a value in hand is always a
/// plausible metric table.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    ids: Vec<String>,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Build from explicit entries (row-major, n×n).
    pub fn from_entries(ids: Vec<String>, values: Vec<f64>) -> Result<DistanceMatrix> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::integrity("distance matrix has no ids"));
        }
        if values.len() != n * n {
            return Err(Error::integrity(format!(
                "distance matrix body is {} entries, expected {}",
                values.len(),
                n * n
            )));
        }
        let mut seen = HashSet::new();
        for id in &ids {
            if id.is_empty() {
                return Err(Error::integrity("distance matrix has an empty id"));
            }
            if !seen.insert(id.as_str()) {
                return Err(Error::integrity(format!("duplicate id `{id}`")));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let v = values[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::integrity(format!(
                        "distance({}, {}) = {v} is not a finite nonnegative value",
                        ids[i], ids[j]
                    )));
                }
                if i == j && v != 0.0 {
                    return Err(Error::integrity(format!(
                        "diagonal entry for {} is {v}, expected 0",
                        ids[i]
                    )));
                }
                if values[i * n + j] != values[j * n + i] {
                    return Err(Error::integrity(format!(
                        "matrix is asymmetric at ({}, {})",
                        ids[i], ids[j]
                    )));
                }
            }
        }
        Ok(DistanceMatrix { ids, values })
    }

    /// Build by evaluating `f` on the upper triangle and mirroring.
    pub fn from_fn(
        ids: Vec<String>,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<DistanceMatrix> {
        let n = ids.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = f(i, j);
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        DistanceMatrix::from_entries(ids, values)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.ids
            .iter()
            .position(|x| x == id)
            .ok_or_else(|| Error::integrity(format!("id `{id}` is not in the distance matrix")))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ids.len() + j]
    }

    /// Mean distance between two disjoint nonempty index sets; this is the
    /// permutation-test statistic, always looked up, never recomputed.
    pub fn cross_average(&self, a: &[usize], b: &[usize]) -> f64 {
        assert!(
            !a.is_empty() && !b.is_empty(),
            "cross average needs nonempty sides"
        );
        debug_assert!(a.iter().all(|i| !b.contains(i)), "sides must be disjoint");
        let mut sum = 0.0;
        for &i in a {
            for &j in b {
                sum += self.get(i, j);
            }
        }
        sum / (a.len() * b.len()) as f64
    }

    /// Serialize as CSV: header row of ids, then one row per id with the
    /// id in the first column. Float formatting is shortest-round-trip, so
    /// equal matrices serialize to identical bytes.
    pub fn to_csv_bytes(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let n = self.ids.len();
        let mut header = Vec::with_capacity(n + 1);
        header.push("image_id".to_string());
        header.extend(self.ids.iter().cloned());
        w.write_record(&header).expect("csv write to memory");
        for i in 0..n {
            let mut row = Vec::with_capacity(n + 1);
            row.push(self.ids[i].clone());
            for j in 0..n {
                row.push(self.get(i, j).to_string());
            }
            w.write_record(&row).expect("csv write to memory");
        }
        w.into_inner().expect("csv flush to memory")
    }

    /// Parse and validate a CSV produced by [`to_csv_bytes`]. Malformed
    /// input of any kind is an integrity error.
    pub fn from_csv_bytes(bytes: &[u8]) -> Result<DistanceMatrix> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(bytes);
        let mut records = reader.records();
        let header = match records.next() {
            Some(Ok(rec)) => rec,
            Some(Err(e)) => return Err(Error::integrity(format!("malformed distance CSV: {e}"))),
            None => return Err(Error::integrity("distance CSV is empty")),
        };
        if header.get(0) != Some("image_id") {
            return Err(Error::integrity(
                "distance CSV must start with an `image_id` header column",
            ));
        }
        let ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let n = ids.len();
        let mut values = Vec::with_capacity(n * n);
        let mut row_count = 0usize;
        for (i, rec) in records.enumerate() {
            let rec = rec.map_err(|e| Error::integrity(format!("malformed distance CSV: {e}")))?;
            if rec.len() != n + 1 {
                return Err(Error::integrity(format!(
                    "distance CSV row {} has {} fields, expected {}",
                    i + 2,
                    rec.len(),
                    n + 1
                )));
            }
            let label = rec.get(0).unwrap_or_default();
            if ids.get(i).map(String::as_str) != Some(label) {
                return Err(Error::integrity(format!(
                    "distance CSV row label `{label}` does not match header order"
                )));
            }
            for field in rec.iter().skip(1) {
                let v: f64 = field.parse().map_err(|_| {
                    Error::integrity(format!("`{field}` is not a number in distance CSV"))
                })?;
                values.push(v);
            }
            row_count += 1;
        }
        if row_count != n {
            return Err(Error::integrity(format!(
                "distance CSV has {row_count} rows for {n} header ids"
            )));
        }
        DistanceMatrix::from_entries(ids, values)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<DistanceMatrix> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        DistanceMatrix::from_csv_bytes(&bytes)
    }
}
