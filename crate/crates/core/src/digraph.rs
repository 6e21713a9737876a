//! Rational directed edge weights and their symmetrized Laplacian.

use std::collections::BTreeMap;

use faer::Mat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Nonnegative rational weights on ordered pairs `(i, j)`. The Laplacian
/// `L(Y)` uses the symmetrized weight `Y_ij + Y_ji` on `{i, j}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedDigraph {
    n: usize,
    w: BTreeMap<(usize, usize), BigRational>,
}

impl WeightedDigraph {
    pub fn new(n: usize) -> Self {
        WeightedDigraph { n, w: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sets `Y_ij`; a zero weight removes the entry.
    pub fn set(&mut self, i: usize, j: usize, value: BigRational) {
        assert!(i < self.n && j < self.n && i != j, "bad pair ({i},{j})");
        if value.is_zero() {
            self.w.remove(&(i, j));
        } else {
            self.w.insert((i, j), value);
        }
    }

    pub fn add(&mut self, i: usize, j: usize, value: &BigRational) {
        let cur = self.get(i, j);
        self.set(i, j, cur + value);
    }

    pub fn get(&self, i: usize, j: usize) -> BigRational {
        self.w.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BigRational)> {
        self.w.iter().map(|(&(i, j), v)| (i, j, v))
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// `Σ_j Y_ij` for every `i`.
    pub fn row_sums(&self) -> Vec<BigRational> {
        let mut s = vec![BigRational::zero(); self.n];
        for (&(i, _), v) in &self.w {
            s[i] += v;
        }
        s
    }

    /// Returns the first entry that is negative or sits off the edge set.
    pub fn check_support(&self, g: &Graph) -> Result<()> {
        for (&(i, j), v) in &self.w {
            if v.is_negative() {
                return Err(Error::Certificate(format!("negative weight on ({i},{j})")));
            }
            if !g.has_edge(i, j) {
                return Err(Error::Certificate(format!("weight on non-edge ({i},{j})")));
            }
        }
        Ok(())
    }

    /// Dense `L(Y)` in floating point.
    pub fn laplacian(&self) -> Mat<f64> {
        let mut l = Mat::zeros(self.n, self.n);
        for (&(i, j), v) in &self.w {
            let x = v.to_f64().unwrap_or(f64::NAN);
            l[(i, j)] -= x;
            l[(j, i)] -= x;
            l[(i, i)] += x;
            l[(j, j)] += x;
        }
        l
    }

    pub fn to_tuples(&self) -> Result<Vec<(usize, usize, u64, u64)>> {
        self.w
            .iter()
            .map(|(&(i, j), v)| {
                let num = v.numer().to_u64();
                let den = v.denom().to_u64();
                match (num, den) {
                    (Some(a), Some(b)) => Ok((i, j, a, b)),
                    _ => Err(Error::Certificate(format!("weight on ({i},{j}) exceeds u64"))),
                }
            })
            .collect()
    }

    pub fn from_tuples(n: usize, t: &[(usize, usize, u64, u64)]) -> Result<Self> {
        let mut y = WeightedDigraph::new(n);
        for &(i, j, a, b) in t {
            if b == 0 || i >= n || j >= n || i == j {
                return Err(Error::Parse(format!("bad weight tuple ({i},{j},{a},{b})")));
            }
            y.set(i, j, BigRational::new(BigInt::from(a), BigInt::from(b)));
        }
        Ok(y)
    }
}

impl Serialize for WeightedDigraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            n: usize,
            weights: Vec<(usize, usize, u64, u64)>,
        }
        let weights = self.to_tuples().map_err(serde::ser::Error::custom)?;
        Out { n: self.n, weights }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightedDigraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct In {
            n: usize,
            weights: Vec<(usize, usize, u64, u64)>,
        }
        let v = In::deserialize(d)?;
        WeightedDigraph::from_tuples(v.n, &v.weights).map_err(serde::de::Error::custom)
    }
}

/// `Σ_{i<j} (Y_ij + Y_ji)(X_i − X_j)²`.
pub fn laplacian_quadform(y: &WeightedDigraph, x: &[f64]) -> Result<f64> {
    if x.len() != y.n {
        return Err(Error::Dimension { expected: y.n, got: x.len() });
    }
    Ok(y.w
        .iter()
        .map(|(&(i, j), v)| {
            let d = x[i] - x[j];
            v.to_f64().unwrap_or(f64::NAN) * d * d
        })
        .sum())
}

/// Builds a rational from a small numerator/denominator pair.
pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Serde for a `BigRational` as the string `"p/q"` (or `"p"`).
pub mod qstr {
    use std::str::FromStr;

    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        BigRational::from_str(text.trim()).map_err(|e| serde::de::Error::custom(format!("bad rational {text:?}: {e}")))
    }
}

/// Serde for a list of `BigRational`s as `"p/q"` strings.
pub mod qvec {
    use std::str::FromStr;

    use num_rational::BigRational;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&r.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| {
                BigRational::from_str(t.trim())
                    .map_err(|e| serde::de::Error::custom(format!("bad rational {t:?}: {e}")))
            })
            .collect()
    }
}
