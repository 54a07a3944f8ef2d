use std::fmt;

use super::{ModError, Modulus, ResidueInt};

/// Dense row-major matrix over `Z/p^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModMatrix {
    modulus: Modulus,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl ModMatrix {
    pub fn zero(modulus: Modulus, rows: usize, cols: usize) -> Self {
        ModMatrix { modulus, rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(modulus: Modulus, size: usize) -> Self {
        let mut m = Self::zero(modulus, size, size);
        for i in 0..size {
            m.entries[i * size + i] = modulus.reduce(1);
        }
        m
    }

    /// Builds from rows of integers, reducing each entry. All rows must have equal length.
    pub fn from_rows(modulus: Modulus, rows: &[Vec<u64>]) -> Result<Self, ModError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(ModError::DimensionMismatch("ragged rows".into()));
        }
        let entries = rows.iter().flatten().map(|&x| modulus.reduce(x)).collect();
        Ok(ModMatrix { modulus, rows: rows.len(), cols, entries })
    }

    /// Like [`ModMatrix::from_rows`] but with an explicit column count, so that an empty
    /// row list still has a width.
    pub fn from_rows_with_width(modulus: Modulus, rows: &[Vec<u64>], cols: usize) -> Result<Self, ModError> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(ModError::DimensionMismatch(format!("expected rows of width {cols}")));
        }
        let entries = rows.iter().flatten().map(|&x| modulus.reduce(x)).collect();
        Ok(ModMatrix { modulus, rows: rows.len(), cols, entries })
    }

    pub fn from_residues(rows: &[Vec<ResidueInt>]) -> Result<Self, ModError> {
        let modulus = rows
            .iter()
            .flatten()
            .next()
            .map(|r| r.modulus())
            .ok_or_else(|| ModError::DimensionMismatch("empty matrix carries no modulus".into()))?;
        for r in rows.iter().flatten() {
            if r.modulus() != modulus {
                return Err(ModError::ModulusMismatch(modulus.value(), r.modulus().value()));
            }
        }
        let raw: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x.value()).collect()).collect();
        Self::from_rows(modulus, &raw)
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> ResidueInt {
        ResidueInt::new(self.get_raw(i, j), self.modulus)
    }

    #[inline]
    pub fn get_raw(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u64) {
        self.entries[i * self.cols + j] = self.modulus.reduce(value);
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> ModMatrix {
        let mut t = Self::zero(self.modulus, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get_raw(i, j);
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[u64]) -> Vec<u64> {
        assert_eq!(x.len(), self.cols, "vector length must match column count");
        (0..self.rows).map(|i| self.modulus.dot(self.row(i), x)).collect()
    }

    pub fn mul(&self, other: &ModMatrix) -> Result<ModMatrix, ModError> {
        if self.modulus != other.modulus {
            return Err(ModError::ModulusMismatch(self.modulus.value(), other.modulus.value()));
        }
        if self.cols != other.rows {
            return Err(ModError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let m = self.modulus;
        let mut out = Self::zero(m, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get_raw(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] = m.add(out.entries[idx], m.mul(a, other.get_raw(k, j)));
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{:?}", self.row(i))?;
        }
        Ok(())
    }
}
