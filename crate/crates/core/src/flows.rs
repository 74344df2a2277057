//! Elements of the free metabelian group as 1-chains on the integer grid.
//!
//! A word traces a path in the Cayley graph of `Z^n` starting at the
//! origin. The algebraic sum of traversed edges together with the endpoint
//! determines the element of `M_n` exactly, so [`SigmaImage`] doubles as the
//! normal form and as the word-problem solution.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse;
use crate::words::GroupWord;

/// A point of `Z^n`, equivalently an element of the abelianization `A_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<i64>);

impl Point {
    pub fn new(coords: Vec<i64>) -> Self {
        Point(coords)
    }

    pub fn zero(rank: usize) -> Self {
        Point(vec![0; rank])
    }

    /// The standard basis vector for the 1-based direction `dir`.
    pub fn unit(rank: usize, dir: usize) -> Self {
        let mut p = Point::zero(rank);
        p.0[dir - 1] = 1;
        p
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Word length in `A_n` with respect to the standard basis.
    pub fn l1_norm(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).sum()
    }

    pub(crate) fn check_rank(&self, rank: usize) -> Result<()> {
        if self.rank() != rank {
            return Err(Error::RankMismatch { left: rank, right: self.rank() });
        }
        Ok(())
    }

    pub(crate) fn bump(&mut self, dir: usize, delta: i64) {
        let c = &mut self.0[dir - 1];
        *c = c.checked_add(delta).expect("lattice coordinate overflow");
    }

    pub(crate) fn add_scaled(&mut self, other: &Point, k: i64) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            let prod = b.checked_mul(k).expect("lattice coordinate overflow");
            *a = a.checked_add(prod).expect("lattice coordinate overflow");
        }
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [i64] {
        &mut self.0
    }
}

impl From<Vec<i64>> for Point {
    fn from(v: Vec<i64>) -> Self {
        Point(v)
    }
}

impl<const N: usize> From<[i64; N]> for Point {
    fn from(v: [i64; N]) -> Self {
        Point(v.to_vec())
    }
}

impl Add for &Point {
    type Output = Point;

    fn add(self, rhs: &Point) -> Point {
        assert_eq!(self.rank(), rhs.rank(), "point rank mismatch");
        let mut out = self.clone();
        out.add_scaled(rhs, 1);
        out
    }
}

impl Sub for &Point {
    type Output = Point;

    fn sub(self, rhs: &Point) -> Point {
        assert_eq!(self.rank(), rhs.rank(), "point rank mismatch");
        let mut out = self.clone();
        out.add_scaled(rhs, -1);
        out
    }
}

impl Neg for &Point {
    type Output = Point;

    fn neg(self) -> Point {
        Point(self.0.iter().map(|c| c.checked_neg().expect("lattice coordinate overflow")).collect())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// The positively oriented edge `base → base + e_dir`; `dir` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridEdge {
    pub base: Point,
    pub dir: usize,
}

impl GridEdge {
    pub fn new(base: impl Into<Point>, dir: usize) -> Self {
        GridEdge { base: base.into(), dir }
    }
}

impl fmt::Display for GridEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};{})", self.base, self.dir)
    }
}

/// Writes one `(<coords>;<dir>) <coefficient>` line per term.
pub(crate) fn dump_terms<'a, I>(terms: I) -> String
where
    I: IntoIterator<Item = (&'a GridEdge, i64)>,
{
    let mut out = String::new();
    for (e, c) in terms {
        out.push_str(&format!("{e} {c}\n"));
    }
    out
}

/// A finitely supported integer 1-chain on the grid, kept sorted by edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Flow {
    rank: usize,
    terms: Vec<(GridEdge, i64)>,
}

impl Flow {
    pub fn zero(rank: usize) -> Self {
        Flow { rank, terms: Vec::new() }
    }

    /// Builds a flow from arbitrary terms; duplicates are summed.
    pub fn from_terms<I>(rank: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (GridEdge, i64)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        for (e, _) in &terms {
            e.base.check_rank(rank)?;
            if e.dir == 0 || e.dir > rank {
                return Err(Error::IndexOutOfRange { index: e.dir, rank });
            }
        }
        Ok(Flow { rank, terms: sparse::normalize(terms) })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> &[(GridEdge, i64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, edge: &GridEdge) -> i64 {
        self.terms
            .binary_search_by(|(e, _)| e.cmp(edge))
            .map(|i| self.terms[i].1)
            .unwrap_or(0)
    }

    fn check_rank(&self, other: usize) -> Result<()> {
        if self.rank != other {
            return Err(Error::RankMismatch { left: self.rank, right: other });
        }
        Ok(())
    }

    pub fn add(&self, other: &Flow) -> Result<Flow> {
        self.check_rank(other.rank)?;
        Ok(Flow { rank: self.rank, terms: sparse::merge(&self.terms, &other.terms) })
    }

    pub fn neg(&self) -> Flow {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect();
        Flow { rank: self.rank, terms }
    }

    /// Translates every edge by `v`. Translation preserves the edge order.
    pub fn shift(&self, v: &Point) -> Result<Flow> {
        v.check_rank(self.rank)?;
        if v.is_zero() {
            return Ok(self.clone());
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (GridEdge { base: &e.base + v, dir: e.dir }, *c))
            .collect();
        Ok(Flow { rank: self.rank, terms })
    }

    /// The 0-chain boundary: `(b; i)` with coefficient `k` gives `+k` at
    /// `b + e_i` and `-k` at `b`.
    pub fn boundary(&self) -> BTreeMap<Point, i64> {
        let mut acc: BTreeMap<Point, i64> = BTreeMap::new();
        for (e, k) in &self.terms {
            let mut head = e.base.clone();
            head.bump(e.dir, 1);
            *acc.entry(head).or_insert(0) += k;
            *acc.entry(e.base.clone()).or_insert(0) -= k;
        }
        acc.retain(|_, c| *c != 0);
        acc
    }

    pub fn is_cycle(&self) -> bool {
        self.boundary().is_empty()
    }

    pub fn dump(&self) -> String {
        dump_terms(self.terms.iter().map(|(e, c)| (e, *c)))
    }
}

/// `σ(g)` paired with the abelianized endpoint `ḡ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SigmaImage {
    pub chain: Flow,
    pub endpoint: Point,
}

impl SigmaImage {
    pub fn identity(rank: usize) -> Self {
        SigmaImage { chain: Flow::zero(rank), endpoint: Point::zero(rank) }
    }

    pub fn rank(&self) -> usize {
        self.chain.rank
    }

    pub fn is_identity(&self) -> bool {
        self.chain.is_zero() && self.endpoint.is_zero()
    }

    /// Membership in the derived subgroup `M_n'`.
    pub fn is_commutator(&self) -> bool {
        self.endpoint.is_zero()
    }

    /// `σ(gh) = σ(g) + ḡ·σ(h)`.
    pub fn multiply(&self, other: &SigmaImage) -> Result<SigmaImage> {
        self.chain.check_rank(other.rank())?;
        let shifted = other.chain.shift(&self.endpoint)?;
        Ok(SigmaImage { chain: self.chain.add(&shifted)?, endpoint: &self.endpoint + &other.endpoint })
    }

    pub fn invert(&self) -> SigmaImage {
        let back = -&self.endpoint;
        let chain = self.chain.shift(&back).expect("same rank").neg();
        SigmaImage { chain, endpoint: back }
    }
}

/// Walks the path labelled by `w` from the origin in one pass.
pub fn sigma(w: &GroupWord) -> SigmaImage {
    let rank = w.rank();
    let mut acc: HashMap<GridEdge, i64> = HashMap::with_capacity(w.len());
    let mut at = Point::zero(rank);
    for l in w.letters() {
        if l.inverse {
            at.bump(l.gen, -1);
            let c = acc.entry(GridEdge { base: at.clone(), dir: l.gen }).or_insert(0);
            *c = sparse::checked_add(*c, -1);
        } else {
            let c = acc.entry(GridEdge { base: at.clone(), dir: l.gen }).or_insert(0);
            *c = sparse::checked_add(*c, 1);
            at.bump(l.gen, 1);
        }
    }
    let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
    terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    SigmaImage { chain: Flow { rank, terms }, endpoint: at }
}

pub fn multiply(g: &SigmaImage, h: &SigmaImage) -> Result<SigmaImage> {
    g.multiply(h)
}

pub fn invert(g: &SigmaImage) -> SigmaImage {
    g.invert()
}

pub fn shift(c: &Flow, v: &Point) -> Result<Flow> {
    c.shift(v)
}

pub fn boundary(c: &Flow) -> BTreeMap<Point, i64> {
    c.boundary()
}

/// Decides the word problem in `M_n`.
pub fn words_equal(u: &GroupWord, w: &GroupWord) -> Result<bool> {
    if u.rank() != w.rank() {
        return Err(Error::RankMismatch { left: u.rank(), right: w.rank() });
    }
    Ok(sigma(u) == sigma(w))
}
