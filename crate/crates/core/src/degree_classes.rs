//! Geometric degree classes.
//!
//! For a growth factor `c > 1`, class `i` holds the vertices with
//! `c^i <= deg < c^(i+1)`. Class membership is decided by comparing the
//! integer degree against the exact integer thresholds `ceil(c^i)`, computed
//! from the binary expansion of `c` with big integers, so a degree that
//! equals `c^i` is never misplaced by rounding.
//!
//! Degree-0 vertices sit in a separate isolated bucket that contributes
//! exactly one per vertex to both `beta_i` and `beta'_i`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{Float, One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{compensated_sum, Graph, VertexId};

/// Upper limit on the number of classes `ceil(log_c n)`.
pub const MAX_CLASSES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassError {
    #[error("growth factor must be a finite real > 1, got {0}")]
    BadGrowth(f64),
    #[error("growth factor {c} needs more than {MAX_CLASSES} classes for n = {n}")]
    TooManyClasses { c: f64, n: usize },
    #[error("degree 0 has no geometric class")]
    Isolated,
}

/// Bucket identifier: the isolated bucket sorts before every geometric class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassKey {
    Isolated,
    Degree(usize),
}

/// Precomputed class boundaries for a growth factor and vertex count.
#[derive(Debug, Clone)]
pub struct GeometricClasses {
    c: f64,
    count: usize,
    // thresholds[i] = ceil(c^i), for i in 0..=count
    thresholds: Vec<u64>,
}

impl GeometricClasses {
    /// Classes for a graph on `n` vertices; `count() = max(1, ceil(log_c n))`.
    pub fn new(c: f64, n: usize) -> Result<Self, ClassError> {
        if !(c.is_finite() && c > 1.0) {
            return Err(ClassError::BadGrowth(c));
        }
        let n = n as u64;
        if (n as f64).ln() / c.ln() > MAX_CLASSES as f64 + 1.0 {
            return Err(ClassError::TooManyClasses { c, n: n as usize });
        }
        let mut thresholds = Vec::new();
        loop {
            thresholds.push(ceil_power(c, thresholds.len()));
            // count = smallest i >= 1 with c^i >= n
            if thresholds.len() >= 2 && thresholds[thresholds.len() - 1] >= n {
                break;
            }
            if thresholds.len() > MAX_CLASSES {
                return Err(ClassError::TooManyClasses { c, n: n as usize });
            }
        }
        let count = thresholds.len() - 1;
        Ok(GeometricClasses {
            c,
            count,
            thresholds,
        })
    }

    pub fn growth(&self) -> f64 {
        self.c
    }

    /// Number of geometric classes, `ceil(log_c n)` (at least one).
    pub fn count(&self) -> usize {
        self.count
    }

    /// Class of a positive degree, `None` for degree 0.
    ///
    /// A result `>= count()` means `deg >= c^count >= n`, which cannot occur
    /// in a simple graph on `n` vertices.
    pub fn index(&self, deg: u64) -> Option<usize> {
        if deg == 0 {
            return None;
        }
        Some(self.thresholds.partition_point(|&t| t <= deg) - 1)
    }

    pub fn key(&self, deg: u64) -> ClassKey {
        self.index(deg).map_or(ClassKey::Isolated, ClassKey::Degree)
    }

    /// `c^(i+1) + 1`, the denominator of `beta'_i`.
    pub fn upper_denominator(&self, i: usize) -> f64 {
        self.c.powi(i as i32 + 1) + 1.0
    }
}

/// `ceil(c^i)`, saturating at `u64::MAX`.
///
/// Floating point is used unless `c^i` lies close to an integer, in which
/// case the power is evaluated exactly from the binary expansion of `c`.
fn ceil_power(c: f64, i: usize) -> u64 {
    let approx = c.powi(i as i32);
    if approx >= u64::MAX as f64 {
        return u64::MAX;
    }
    let nearest = approx.round();
    if (approx - nearest).abs() > 1e-7 * approx.max(1.0) {
        return approx.ceil() as u64;
    }
    let (mantissa, exponent, _) = c.integer_decode();
    let shift = mantissa.trailing_zeros();
    let (mantissa, exponent) = (mantissa >> shift, i64::from(exponent) + i64::from(shift));
    let power = BigUint::from(mantissa).pow(i as u32);
    let e = exponent * i as i64;
    let value = if e >= 0 {
        power << (e as u64)
    } else {
        let s = (-e) as u64;
        let bias = (BigUint::one() << s) - 1u32;
        (power + bias) >> s
    };
    value.to_u64().unwrap_or(u64::MAX)
}

/// Standalone class lookup: the unique `i` with `c^i <= deg < c^(i+1)`.
pub fn class_index(deg: u64, c: f64) -> Result<usize, ClassError> {
    if !(c.is_finite() && c > 1.0) {
        return Err(ClassError::BadGrowth(c));
    }
    if deg == 0 {
        return Err(ClassError::Isolated);
    }
    let classes = GeometricClasses::new(c, deg.saturating_add(1) as usize)?;
    Ok(classes.index(deg).expect("positive degree"))
}

/// Class sizes of a graph's vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeClassPartition {
    pub c: f64,
    pub num_classes: usize,
    pub class_sizes: Vec<usize>,
    pub isolated_count: usize,
}

impl DegreeClassPartition {
    pub fn size(&self, key: ClassKey) -> usize {
        match key {
            ClassKey::Isolated => self.isolated_count,
            ClassKey::Degree(i) => self.class_sizes.get(i).copied().unwrap_or(0),
        }
    }
}

/// Per-class `beta_i` and `beta'_i = |V_i| / (c^(i+1) + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    pub beta: Vec<f64>,
    pub beta_prime: Vec<f64>,
    /// Isolated vertices: `beta_iso = beta'_iso = isolated_count`.
    pub isolated: f64,
}

impl ClassStats {
    pub fn num_classes(&self) -> usize {
        self.beta.len()
    }

    pub fn beta_of(&self, key: ClassKey) -> f64 {
        match key {
            ClassKey::Isolated => self.isolated,
            ClassKey::Degree(i) => self.beta[i],
        }
    }

    pub fn beta_prime_of(&self, key: ClassKey) -> f64 {
        match key {
            ClassKey::Isolated => self.isolated,
            ClassKey::Degree(i) => self.beta_prime[i],
        }
    }

    /// Every bucket, isolated first.
    pub fn keys(&self) -> impl Iterator<Item = ClassKey> {
        std::iter::once(ClassKey::Isolated).chain((0..self.num_classes()).map(ClassKey::Degree))
    }

    pub fn total_beta(&self) -> f64 {
        compensated_sum(self.keys().map(|k| self.beta_of(k)))
    }
}

/// Splits the vertices of `g` into geometric degree classes with factor `c`.
pub fn partition(g: &Graph, c: f64) -> Result<(DegreeClassPartition, ClassStats), ClassError> {
    let classes = GeometricClasses::new(c, g.n())?;
    let k = classes.count();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut isolated_count = 0;
    for v in 0..g.n() as VertexId {
        let d = g.degree(v);
        match classes.index(d as u64) {
            None => isolated_count += 1,
            Some(i) => members[i].push(d),
        }
    }
    let class_sizes: Vec<usize> = members.iter().map(Vec::len).collect();
    let beta = members
        .iter()
        .map(|degs| compensated_sum(degs.iter().map(|&d| 1.0 / (d as f64 + 1.0))))
        .collect();
    let beta_prime = class_sizes
        .iter()
        .enumerate()
        .map(|(i, &size)| size as f64 / classes.upper_denominator(i))
        .collect();
    Ok((
        DegreeClassPartition {
            c,
            num_classes: k,
            class_sizes,
            isolated_count,
        },
        ClassStats {
            beta,
            beta_prime,
            isolated: isolated_count as f64,
        },
    ))
}

/// Heavy buckets `I_1`: nonempty buckets with
/// `beta_i >= beta_total / (num_classes * g)`.
///
/// `beta_total` is the true `beta(G)`, so this is an analysis oracle and not
/// something a streaming algorithm can evaluate.
pub fn heavy_classes(stats: &ClassStats, g: f64, beta_total: f64) -> BTreeSet<ClassKey> {
    let threshold = beta_total / (stats.num_classes() as f64 * g);
    stats
        .keys()
        .filter(|&k| {
            let b = stats.beta_of(k);
            b > 0.0 && b >= threshold
        })
        .collect()
}
