//! Row-major JSON matrix files: `{"dims": [r, c], "re": [...], "im": [...]}`.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use seqfab::ComplexMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dims: [usize; 2],
    pub re: Vec<f64>,
    /// Omitted means real.
    #[serde(default)]
    pub im: Vec<f64>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            dims: [m.rows(), m.cols()],
            re: m.as_slice().iter().map(|z| z.re).collect(),
            im: m.as_slice().iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_matrix(&self) -> anyhow::Result<ComplexMatrix> {
        let [r, c] = self.dims;
        let im = if self.im.is_empty() {
            vec![0.0; self.re.len()]
        } else {
            self.im.clone()
        };
        if self.re.len() != r * c || im.len() != r * c {
            bail!(
                "dims {r}×{c} need {} entries, got {} real and {} imaginary",
                r * c,
                self.re.len(),
                self.im.len()
            );
        }
        if self.re.iter().chain(&im).any(|x| !x.is_finite()) {
            bail!("matrix entries must be finite");
        }
        Ok(ComplexMatrix::from_parts(r, c, &self.re, &im)?)
    }
}

pub fn read_matrix(path: &Path) -> anyhow::Result<ComplexMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: MatrixFile =
        serde_json::from_str(&text).with_context(|| format!("parsing matrix file {}", path.display()))?;
    file.to_matrix().with_context(|| format!("in {}", path.display()))
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(&MatrixFile::from_matrix(m))?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use seqfab::C64;

    #[test]
    fn roundtrip() {
        let m = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                C64::new(0.1, -0.2),
                C64::new(1.0 / 3.0, 0.0),
                C64::new(-0.0, 1e-300),
                C64::new(2.5, 7.0),
            ],
        )
        .unwrap();
        let text = serde_json::to_string(&MatrixFile::from_matrix(&m)).unwrap();
        let back: MatrixFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    #[test]
    fn imaginary_part_is_optional() {
        let f: MatrixFile = serde_json::from_str(r#"{"dims":[1,2],"re":[1,2]}"#).unwrap();
        let m = f.to_matrix().unwrap();
        assert_eq!(m[(0, 1)], C64::new(2.0, 0.0));
    }

    #[test]
    fn rejects_bad_lengths() {
        let f: MatrixFile = serde_json::from_str(r#"{"dims":[2,2],"re":[1,2,3]}"#).unwrap();
        assert!(f.to_matrix().is_err());
    }
}
