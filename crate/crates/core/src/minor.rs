//! Minor operations: the maps between positive finite ordinals that reindex
//! arguments. An operation `n -> k` is stored as its value list together with
//! the codomain, and printed in the literal syntax `(a0 a1 ... | k)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A map between finite ordinals `n -> k`, given by its list of values.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MinorOp {
    values: Vec<usize>,
    codomain: usize,
}

impl MinorOp {
    pub fn new(values: Vec<usize>, codomain: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid("minor operation needs domain >= 1".into()));
        }
        if codomain == 0 {
            return Err(Error::Invalid("minor operation needs codomain >= 1".into()));
        }
        if let Some(&v) = values.iter().find(|&&v| v >= codomain) {
            return Err(Error::Invalid(format!(
                "entry {v} out of range for codomain {codomain}"
            )));
        }
        Ok(MinorOp { values, codomain })
    }

    pub fn identity(n: usize) -> Self {
        MinorOp {
            values: (0..n).collect(),
            codomain: n,
        }
    }

    pub fn dom(&self) -> usize {
        self.values.len()
    }

    pub fn cod(&self) -> usize {
        self.codomain
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, i: usize) -> usize {
        self.values[i]
    }

    pub fn is_identity(&self) -> bool {
        self.codomain == self.values.len() && self.values.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Diagrammatic composition `self ; other`.
    pub fn compose(&self, other: &MinorOp) -> Result<MinorOp> {
        if self.codomain != other.dom() {
            return Err(Error::ArityMismatch(format!(
                "cannot compose {self} with {other}: codomain {} != domain {}",
                self.codomain,
                other.dom()
            )));
        }
        Ok(MinorOp {
            values: self.values.iter().map(|&v| other.values[v]).collect(),
            codomain: other.codomain,
        })
    }

    /// The canonical inclusion `iota: n -> n+1`.
    pub fn inclusion(n: usize) -> Self {
        MinorOp {
            values: (0..n).collect(),
            codomain: n + 1,
        }
    }

    /// The retraction `from -> to`, `i |-> min(i, to-1)`. Requires `from >= to`.
    pub fn retraction(from: usize, to: usize) -> Self {
        MinorOp {
            values: (0..from).map(|i| i.min(to - 1)).collect(),
            codomain: to,
        }
    }

    /// The total collapse `n -> 1`.
    pub fn collapse(n: usize) -> Self {
        MinorOp {
            values: vec![0; n],
            codomain: 1,
        }
    }

    /// The constant map `(j)_k : n -> k` sending everything to `j`.
    pub fn constant(n: usize, j: usize, k: usize) -> Result<Self> {
        MinorOp::new(vec![j; n], k)
    }

    /// The point map `(i |-> j)_n : n -> n`, identity except at `i`.
    pub fn point(n: usize, i: usize, j: usize) -> Result<Self> {
        if i >= n || j >= n {
            return Err(Error::Invalid(format!(
                "point map (i={i} |-> j={j}) out of range for arity {n}"
            )));
        }
        let mut values: Vec<usize> = (0..n).collect();
        values[i] = j;
        Ok(MinorOp { values, codomain: n })
    }

    /// The set collapse `(S |-> j)_n : n -> n`, sending all of `S` to `j`.
    pub fn set_collapse(n: usize, s: &[usize], j: usize) -> Result<Self> {
        if j >= n || s.iter().any(|&i| i >= n) {
            return Err(Error::Invalid(format!(
                "set collapse out of range for arity {n}"
            )));
        }
        let mut values: Vec<usize> = (0..n).collect();
        for &i in s {
            values[i] = j;
        }
        Ok(MinorOp { values, codomain: n })
    }

    /// Transposition of the first two coordinates of `n` (requires `n >= 2`).
    pub fn transposition(n: usize) -> Self {
        let mut values: Vec<usize> = (0..n).collect();
        values.swap(0, 1);
        MinorOp { values, codomain: n }
    }

    /// The n-cycle `i |-> i+1 mod n`.
    pub fn cycle(n: usize) -> Self {
        MinorOp {
            values: (0..n).map(|i| (i + 1) % n).collect(),
            codomain: n,
        }
    }

    /// The rank-dropping map fixing everything except `n-1 |-> n-2`
    /// (requires `n >= 2`). Together with the transposition and the cycle it
    /// generates the full transformation monoid on `n`.
    pub fn rank_drop(n: usize) -> Self {
        let mut values: Vec<usize> = (0..n).collect();
        values[n - 1] = n - 2;
        MinorOp { values, codomain: n }
    }

    /// The extension `alpha^ : n+1 -> k+1` of `alpha: n -> k`, sending the new
    /// domain element `n` to the new codomain element `k`.
    pub fn extend(&self) -> Self {
        let mut values = self.values.clone();
        values.push(self.codomain);
        MinorOp {
            values,
            codomain: self.codomain + 1,
        }
    }

    /// Lift `alpha: a -> c` to `n+a -> n+c`, fixing the first `n` coordinates.
    pub fn shift_lift(&self, n: usize) -> Self {
        let mut values: Vec<usize> = (0..n).collect();
        values.extend(self.values.iter().map(|&v| n + v));
        MinorOp {
            values,
            codomain: n + self.codomain,
        }
    }

    /// The sum `self (+) other : dom+dom' -> cod+cod'`, acting as `self` on the
    /// first block and as `other` (shifted) on the second.
    pub fn juxtapose(&self, other: &MinorOp) -> Self {
        let mut values = self.values.clone();
        values.extend(other.values.iter().map(|&v| self.codomain + v));
        MinorOp {
            values,
            codomain: self.codomain + other.codomain,
        }
    }

    /// Rank of this map among all maps `n -> k`, in lexicographic order of the
    /// value list (coordinate 0 most significant).
    pub fn index(&self) -> usize {
        self.values.iter().fold(0, |acc, &v| acc * self.codomain + v)
    }

    pub fn from_index(n: usize, k: usize, mut idx: usize) -> Self {
        let mut values = vec![0; n];
        for i in (0..n).rev() {
            values[i] = idx % k;
            idx /= k;
        }
        MinorOp { values, codomain: k }
    }

    /// All maps `n -> k` in lexicographic order.
    pub fn all(n: usize, k: usize) -> impl Iterator<Item = MinorOp> {
        let count = k.checked_pow(n as u32).expect("map count overflow");
        (0..count).map(move |idx| MinorOp::from_index(n, k, idx))
    }

    /// The sorted, deduplicated image of this map.
    pub fn image(&self) -> Vec<usize> {
        let mut img = self.values.clone();
        img.sort_unstable();
        img.dedup();
        img
    }

    pub fn is_surjective(&self) -> bool {
        self.image().len() == self.codomain
    }

    /// Factor `alpha = surj ; inj` with `surj` surjective onto `|Im alpha|`
    /// and `inj` the sorted inclusion of the image.
    pub fn surjective_factor(&self) -> (MinorOp, MinorOp) {
        let img = self.image();
        let surj = MinorOp {
            values: self
                .values
                .iter()
                .map(|&v| img.binary_search(&v).unwrap())
                .collect(),
            codomain: img.len(),
        };
        let inj = MinorOp {
            values: img,
            codomain: self.codomain,
        };
        (surj, inj)
    }
}

impl fmt::Display for MinorOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, " | {})", self.codomain)
    }
}

impl FromStr for MinorOp {
    type Err = Error;

    /// Parses the literal syntax `(a0 a1 ... | k)`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Invalid(format!("minor operation literal must be parenthesized: {s}")))?;
        let (vals, cod) = inner
            .split_once('|')
            .ok_or_else(|| Error::Invalid(format!("minor operation literal needs `| k`: {s}")))?;
        let values = vals
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::Invalid(format!("bad entry `{t}` in {s}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let codomain = cod
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Invalid(format!("bad codomain in {s}")))?;
        MinorOp::new(values, codomain)
    }
}

/// Generators of the full transformation monoid on `n` (for `n >= 2`):
/// a transposition, the n-cycle, and a rank-dropping map.
pub fn transformation_monoid_generators(n: usize) -> Vec<MinorOp> {
    vec![
        MinorOp::transposition(n),
        MinorOp::cycle(n),
        MinorOp::rank_drop(n),
    ]
}
