//! Multi-integer indices, linear orders on `Z^d` and half-space lattices.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Deref, Neg, Sub};

use crate::error::{check_dim, Error, Result};

/// A point of `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeIndex(Vec<i64>);

impl LatticeIndex {
    pub fn new(coords: Vec<i64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("lattice index needs d >= 1".into()));
        }
        Ok(Self(coords))
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim.max(1)])
    }

    /// Unit vector along `axis` (0-based).
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = vec![0; dim];
        v[axis] = 1;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn norm_inf(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn norm_1(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).sum()
    }

    pub fn norm_2(&self) -> f64 {
        self.0.iter().map(|&c| (c * c) as f64).sum::<f64>().sqrt()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(self + other)
    }
}

impl From<Vec<i64>> for LatticeIndex {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl From<&[i64]> for LatticeIndex {
    fn from(v: &[i64]) -> Self {
        Self(v.to_vec())
    }
}

impl Deref for LatticeIndex {
    type Target = [i64];
    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl fmt::Display for LatticeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &LatticeIndex {
    type Output = LatticeIndex;
    fn add(self, rhs: &LatticeIndex) -> LatticeIndex {
        debug_assert_eq!(self.dim(), rhs.dim());
        LatticeIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeIndex {
    type Output = LatticeIndex;
    fn sub(self, rhs: &LatticeIndex) -> LatticeIndex {
        debug_assert_eq!(self.dim(), rhs.dim());
        LatticeIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeIndex {
    type Output = LatticeIndex;
    fn neg(self) -> LatticeIndex {
        LatticeIndex(self.0.iter().map(|a| -a).collect())
    }
}

/// Linear order on `Z^d` compatible with addition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinearOrder {
    /// Lexicographic order; `priority[0]` is the most significant axis (0-based).
    Lex { priority: Vec<usize> },
    /// Coordinate sum first, then lexicographic on `(j_d, j_{d-1}, ..., j_1)`.
    GradedLex,
}

impl LinearOrder {
    /// Lex order with axis 1 most significant.
    pub fn lex(dim: usize) -> Self {
        Self::Lex {
            priority: (0..dim).collect(),
        }
    }

    pub fn lex_with_priority(priority: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; priority.len()];
        for &p in &priority {
            if p >= priority.len() || seen[p] {
                return Err(Error::InvalidParameter(format!(
                    "axis priority {priority:?} is not a permutation"
                )));
            }
            seen[p] = true;
        }
        Ok(Self::Lex { priority })
    }

    /// Compares raw coordinate slices of equal length.
    pub fn cmp_raw(&self, j: &[i64], k: &[i64]) -> Ordering {
        match self {
            LinearOrder::Lex { priority } => {
                for &a in priority {
                    match j[a].cmp(&k[a]) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            LinearOrder::GradedLex => {
                let sj: i64 = j.iter().sum();
                let sk: i64 = k.iter().sum();
                sj.cmp(&sk).then_with(|| {
                    for a in (0..j.len()).rev() {
                        match j[a].cmp(&k[a]) {
                            Ordering::Equal => continue,
                            o => return o,
                        }
                    }
                    Ordering::Equal
                })
            }
        }
    }

    /// Whether `0 ⪯ j`, without allocating.
    pub fn is_nonnegative(&self, j: &[i64]) -> bool {
        match self {
            LinearOrder::Lex { priority } => {
                for &a in priority {
                    if j[a] != 0 {
                        return j[a] > 0;
                    }
                }
                true
            }
            LinearOrder::GradedLex => {
                let s: i64 = j.iter().sum();
                if s != 0 {
                    return s > 0;
                }
                for a in (0..j.len()).rev() {
                    if j[a] != 0 {
                        return j[a] > 0;
                    }
                }
                true
            }
        }
    }

    fn check(&self, dim: usize) -> Result<()> {
        if let LinearOrder::Lex { priority } = self {
            check_dim(priority.len(), dim)?;
        }
        Ok(())
    }
}

pub fn order_compare(ord: &LinearOrder, j: &LatticeIndex, k: &LatticeIndex) -> Result<Ordering> {
    check_dim(j.dim(), k.dim())?;
    ord.check(j.dim())?;
    Ok(ord.cmp_raw(j, k))
}

pub fn order_min(ord: &LinearOrder, j: &LatticeIndex, k: &LatticeIndex) -> Result<LatticeIndex> {
    Ok(match order_compare(ord, j, k)? {
        Ordering::Greater => k.clone(),
        _ => j.clone(),
    })
}

/// Half-space lattice in `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HalfSpace {
    /// `{j : j_axis >= 0}`; `axis` is 1-based.
    Coordinate { dim: usize, axis: usize },
    /// `{j : 0 ⪯ j}`.
    Ordered { dim: usize, order: LinearOrder },
}

impl HalfSpace {
    pub fn coordinate(dim: usize, axis: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if axis == 0 || axis > dim {
            return Err(Error::InvalidParameter(format!(
                "half-space axis {axis} outside 1..={dim}"
            )));
        }
        Ok(Self::Coordinate { dim, axis })
    }

    /// Coordinate half-space on the last axis.
    pub fn standard(dim: usize) -> Self {
        Self::Coordinate { dim, axis: dim }
    }

    pub fn ordered(dim: usize, order: LinearOrder) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        order.check(dim)?;
        Ok(Self::Ordered { dim, order })
    }

    pub fn dim(&self) -> usize {
        match self {
            HalfSpace::Coordinate { dim, .. } | HalfSpace::Ordered { dim, .. } => *dim,
        }
    }

    pub fn order(&self) -> Option<&LinearOrder> {
        match self {
            HalfSpace::Ordered { order, .. } => Some(order),
            HalfSpace::Coordinate { .. } => None,
        }
    }

    /// Membership test on raw coordinates; the caller guarantees the length.
    #[inline]
    pub fn contains_raw(&self, j: &[i64]) -> bool {
        match self {
            HalfSpace::Coordinate { axis, .. } => j[axis - 1] >= 0,
            HalfSpace::Ordered { order, .. } => order.is_nonnegative(j),
        }
    }

    pub fn contains(&self, j: &LatticeIndex) -> Result<bool> {
        check_dim(self.dim(), j.dim())?;
        Ok(self.contains_raw(j))
    }

    /// Short descriptor used in reports and cache keys.
    pub fn label(&self) -> String {
        match self {
            HalfSpace::Coordinate { axis, .. } => format!("coordinate:{axis}"),
            HalfSpace::Ordered {
                order: LinearOrder::GradedLex,
                ..
            } => "order:graded_lex".into(),
            HalfSpace::Ordered {
                order: LinearOrder::Lex { priority },
                ..
            } => {
                let default: Vec<usize> = (0..priority.len()).collect();
                if *priority == default {
                    "order:lex".into()
                } else {
                    let p: Vec<String> = priority.iter().map(|a| (a + 1).to_string()).collect();
                    format!("order:lex[{}]", p.join(","))
                }
            }
        }
    }
}

pub fn halfspace_contains(h: &HalfSpace, j: &LatticeIndex) -> Result<bool> {
    h.contains(j)
}

/// All points of `[-r, r]^d` in row-major order (axis 1 slowest).
pub fn box_points(dim: usize, radius: usize) -> Vec<LatticeIndex> {
    let r = radius as i64;
    let side = 2 * radius + 1;
    let total = side.pow(dim as u32);
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![-r; dim];
    for _ in 0..total {
        out.push(LatticeIndex(cur.clone()));
        for a in (0..dim).rev() {
            if cur[a] < r {
                cur[a] += 1;
                break;
            }
            cur[a] = -r;
        }
    }
    out
}

/// `H ∩ [-r, r]^d`, sorted by the order for ordered half-spaces and row-major otherwise.
pub fn enumerate_window(h: &HalfSpace, box_radius: usize) -> Vec<LatticeIndex> {
    let mut pts: Vec<LatticeIndex> = box_points(h.dim(), box_radius)
        .into_iter()
        .filter(|p| h.contains_raw(p))
        .collect();
    if let HalfSpace::Ordered { order, .. } = h {
        pts.sort_by(|a, b| order.cmp_raw(a, b));
    }
    pts
}

/// The ⪯-maximum of `{k ∈ H : ‖k‖₂ ≤ n}` for an ordered half-space.
pub fn exhausting_maximum(h: &HalfSpace, n: usize) -> Option<LatticeIndex> {
    let order = h.order()?;
    let n2 = (n * n) as i64;
    box_points(h.dim(), n)
        .into_iter()
        .filter(|p| h.contains_raw(p) && p.iter().map(|c| c * c).sum::<i64>() <= n2)
        .max_by(|a, b| order.cmp_raw(a, b))
}
