//! Two-point correlation matrices and their text format.

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Where a correlation matrix came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CorrelationSource {
    /// Coupling constants.
    Cc,
    /// Placeholder tag for constant-probability clusters.
    Random,
    /// Thermal Monte Carlo at inverse temperature `beta_s`.
    Mc { beta_s: f64 },
    /// Low-rank SDP relaxation.
    Sdp,
    /// QAOA at depth `p`.
    Qaoa { p: usize },
}

impl fmt::Display for CorrelationSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Cc => write!(f, "CC"),
            Self::Random => write!(f, "RANDOM"),
            Self::Mc { beta_s } => write!(f, "MC {beta_s}"),
            Self::Sdp => write!(f, "SDP"),
            Self::Qaoa { p } => write!(f, "QAOA {p}"),
        }
    }
}

impl FromStr for CorrelationSource {
    type Err = String;

    /// Accepts `CC`, `RANDOM`, `SDP`, `MC <beta_s>` and `QAOA <p>`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut parts = s.split_whitespace();
        let tag = parts.next().ok_or("empty source tag")?;
        let arg = parts.next();
        if parts.next().is_some() {
            return Err(format!("trailing tokens in source tag {s:?}"));
        }
        match (tag.to_ascii_uppercase().as_str(), arg) {
            ("CC", None) => Ok(Self::Cc),
            ("RANDOM", None) => Ok(Self::Random),
            ("SDP", None) => Ok(Self::Sdp),
            ("MC", Some(b)) => b
                .parse()
                .map(|beta_s| Self::Mc { beta_s })
                .map_err(|_| format!("bad beta_s {b:?}")),
            ("QAOA", Some(p)) => p
                .parse()
                .map(|p| Self::Qaoa { p })
                .map_err(|_| format!("bad depth {p:?}")),
            _ => Err(format!("unknown source tag {s:?}")),
        }
    }
}

/// Symmetric dense `n x n` matrix of correlations in `[-1, 1]`.
///
/// The diagonal is carried for completeness (unit for sampled or vector
/// sources) but never consulted by cluster growth.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix<R> {
    n: usize,
    values: Vec<R>,
    source: CorrelationSource,
    mean_abs_nonzero: R,
}

impl<R: Real> CorrelationMatrix<R> {
    /// All-zero matrix.
    pub fn zeros(n: usize, source: CorrelationSource) -> Self {
        Self {
            n,
            values: vec![R::zero(); n * n],
            source,
            mean_abs_nonzero: R::zero(),
        }
    }

    /// Wraps row-major dense values; the matrix must be symmetric with entries in `[-1 - tol, 1 + tol]`.
    pub fn from_dense(n: usize, values: Vec<R>, source: CorrelationSource) -> Result<Self> {
        if values.len() != n * n {
            return invalid(format!("expected {} entries, got {}", n * n, values.len()));
        }
        let tol = R::lit(1e-9);
        for i in 0..n {
            for j in i..n {
                let z = values[i * n + j];
                if !z.is_finite() || z.abs() > R::one() + tol {
                    return invalid(format!("Z[{i}][{j}] = {z} outside [-1, 1]"));
                }
                if z != values[j * n + i] {
                    return invalid(format!("matrix not symmetric at ({i}, {j})"));
                }
            }
        }
        let mut m = Self {
            n,
            values,
            source,
            mean_abs_nonzero: R::zero(),
        };
        m.refresh_mean();
        Ok(m)
    }

    fn refresh_mean(&mut self) {
        self.mean_abs_nonzero = self.compute_mean_abs_nonzero();
    }

    /// `E[|Z_ij| | Z_ij != 0, i != j]` evaluated from the stored values.
    pub fn compute_mean_abs_nonzero(&self) -> R {
        let mut sum = R::zero();
        let mut count = 0usize;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let z = self.values[i * self.n + j];
                if !z.is_zero() {
                    sum += z.abs();
                    count += 1;
                }
            }
        }
        if count == 0 {
            R::zero()
        } else {
            sum / R::from_count(count)
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> CorrelationSource {
        self.source
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> R {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn mean_abs_nonzero(&self) -> R {
        self.mean_abs_nonzero
    }

    /// Number of nonzero off-diagonal pairs `i < j`.
    pub fn nonzero_pairs(&self) -> usize {
        (0..self.n)
            .map(|i| (i + 1..self.n).filter(|&j| !self.get(i, j).is_zero()).count())
            .sum()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> R {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).abs())
            .fold(R::zero(), R::max)
    }

    /// Text form: header `n <source tag>`, then `i j z` for nonzero pairs `i < j`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.n, self.source).unwrap();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let z = self.get(i, j);
                if !z.is_zero() {
                    writeln!(out, "{i} {j} {z}").unwrap();
                }
            }
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output; omitted pairs are zero and the diagonal is unit.
    pub fn from_text(text: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
        let (n_str, tag) = header
            .split_once(char::is_whitespace)
            .ok_or_else(|| err(hl, format!("malformed header {header:?}")))?;
        let n: usize = n_str.parse().map_err(|_| err(hl, format!("bad size {n_str:?}")))?;
        let source: CorrelationSource = tag.trim().parse().map_err(|m| err(hl, m))?;
        let mut values = vec![R::zero(); n * n];
        for i in 0..n {
            values[i * n + i] = R::one();
        }
        for (line, l) in lines {
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 3 {
                return Err(err(line, format!("expected \"i j z\", got {l:?}")));
            }
            let i: usize = f[0].parse().map_err(|_| err(line, format!("bad index {:?}", f[0])))?;
            let j: usize = f[1].parse().map_err(|_| err(line, format!("bad index {:?}", f[1])))?;
            let z: R = f[2].parse().map_err(|_| err(line, format!("bad value {:?}", f[2])))?;
            if i >= n || j >= n || i == j {
                return Err(err(line, format!("invalid pair ({i}, {j}) for n = {n}")));
            }
            values[i * n + j] = z;
            values[j * n + i] = z;
        }
        Self::from_dense(n, values, source)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path)?)
    }
}

/// Builds a dense matrix, clipping entries to `[-1, 1]` and forcing exact symmetry.
pub(crate) fn dense_clipped<R: Real>(n: usize, mut values: Vec<R>, source: CorrelationSource) -> CorrelationMatrix<R> {
    for i in 0..n {
        for j in i..n {
            let z = values[i * n + j].max(-R::one()).min(R::one());
            values[i * n + j] = z;
            values[j * n + i] = z;
        }
    }
    let mut m = CorrelationMatrix {
        n,
        values,
        source,
        mean_abs_nonzero: R::zero(),
    };
    m.refresh_mean();
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_tags_round_trip() {
        for s in [
            CorrelationSource::Cc,
            CorrelationSource::Random,
            CorrelationSource::Sdp,
            CorrelationSource::Mc { beta_s: 0.35 },
            CorrelationSource::Qaoa { p: 3 },
        ] {
            assert_eq!(s.to_string().parse::<CorrelationSource>().unwrap(), s);
        }
        assert!("MC".parse::<CorrelationSource>().is_err());
        assert!("FOO".parse::<CorrelationSource>().is_err());
    }

    #[test]
    fn mean_abs_nonzero_ignores_zeros_and_diagonal() {
        let vals = vec![
            1.0, -0.5, 0.0, //
            -0.5, 1.0, 0.25, //
            0.0, 0.25, 1.0,
        ];
        let m = CorrelationMatrix::from_dense(3, vals, CorrelationSource::Sdp).unwrap();
        assert_eq!(m.mean_abs_nonzero(), 0.375);
        assert_eq!(m.compute_mean_abs_nonzero(), m.mean_abs_nonzero());
        assert_eq!(m.nonzero_pairs(), 2);
    }

    #[test]
    fn rejects_asymmetric_or_out_of_range() {
        assert!(CorrelationMatrix::from_dense(2, vec![1.0, 0.5, 0.4, 1.0], CorrelationSource::Sdp).is_err());
        assert!(CorrelationMatrix::from_dense(2, vec![1.0, 1.5, 1.5, 1.0], CorrelationSource::Sdp).is_err());
        assert!(CorrelationMatrix::<f64>::from_dense(2, vec![1.0], CorrelationSource::Sdp).is_err());
    }

    #[test]
    fn text_round_trip() {
        let vals = vec![1.0, -0.125, 0.0, -0.125, 1.0, 0.1, 0.0, 0.1, 1.0];
        let m = CorrelationMatrix::from_dense(3, vals, CorrelationSource::Mc { beta_s: 1.1 }).unwrap();
        let back = CorrelationMatrix::<f64>::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
        assert!(CorrelationMatrix::<f64>::from_text("2 CC\n0 0 1\n").is_err());
    }

    #[test]
    fn clipping_absorbs_rounding() {
        let m = dense_clipped(2, vec![1.0, -1.0 - 1e-12, -1.0 - 1e-12, 1.0], CorrelationSource::Sdp);
        assert_eq!(m.get(0, 1), -1.0);
    }
}
