//! 1-chains on the quotient graph `Γ_n / L_Q` and the projection `τ_Q`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::flows::{dump_terms, GridEdge, Point, SigmaImage};
use crate::lattice::QuotientSpec;
use crate::sparse;

/// An edge of the quotient graph; its base is a canonical coset representative.
pub type QuotientEdge = GridEdge;

#[derive(Clone)]
pub struct QuotientChain {
    spec: Arc<QuotientSpec>,
    terms: Vec<(QuotientEdge, i64)>,
}

impl fmt::Debug for QuotientChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuotientChain").field("terms", &self.terms).finish()
    }
}

impl PartialEq for QuotientChain {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.spec.same_quotient(&other.spec)
    }
}

impl Eq for QuotientChain {}

impl QuotientChain {
    pub fn zero(spec: Arc<QuotientSpec>) -> Self {
        QuotientChain { spec, terms: Vec::new() }
    }

    /// Projects `σ(g)` to the quotient: bases are canonicalized, coinciding
    /// edges merge.
    pub fn tau(g: &SigmaImage, spec: Arc<QuotientSpec>) -> Result<Self> {
        if g.rank() != spec.rank() {
            return Err(Error::RankMismatch { left: spec.rank(), right: g.rank() });
        }
        let terms = g
            .chain
            .terms()
            .iter()
            .map(|(e, c)| {
                let mut base = e.base.clone();
                spec.reduce_in_place(&mut base);
                (GridEdge { base, dir: e.dir }, *c)
            })
            .collect();
        Ok(QuotientChain { terms: sparse::normalize(terms), spec })
    }

    /// Terms must be sorted, zero-free and canonical under `spec`.
    pub(crate) fn from_sorted_terms(spec: Arc<QuotientSpec>, terms: Vec<(QuotientEdge, i64)>) -> Self {
        QuotientChain { spec, terms }
    }

    pub fn spec(&self) -> &Arc<QuotientSpec> {
        &self.spec
    }

    pub fn terms(&self) -> &[(QuotientEdge, i64)] {
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

    pub fn coefficient(&self, edge: &QuotientEdge) -> i64 {
        self.terms
            .binary_search_by(|(e, _)| e.cmp(edge))
            .map(|i| self.terms[i].1)
            .unwrap_or(0)
    }

    pub fn support(&self) -> BTreeSet<QuotientEdge> {
        self.terms.iter().map(|(e, _)| e.clone()).collect()
    }

    fn check_spec(&self, other: &QuotientChain) -> Result<()> {
        if Arc::ptr_eq(&self.spec, &other.spec) || self.spec.same_quotient(&other.spec) {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    pub fn add(&self, other: &QuotientChain) -> Result<QuotientChain> {
        self.check_spec(other)?;
        Ok(QuotientChain { spec: self.spec.clone(), terms: sparse::merge(&self.terms, &other.terms) })
    }

    pub fn neg(&self) -> QuotientChain {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect();
        QuotientChain { spec: self.spec.clone(), terms }
    }

    /// The action of `v ∈ A_n`; depends only on the coset `v + L_Q`.
    pub fn shift(&self, v: &Point) -> Result<QuotientChain> {
        v.check_rank(self.spec.rank())?;
        if v.is_zero() {
            return Ok(self.clone());
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut base = &e.base + v;
                self.spec.reduce_in_place(&mut base);
                (GridEdge { base, dir: e.dir }, *c)
            })
            .collect();
        let terms = if self.spec.is_trivial() { terms } else { sparse::normalize(terms) };
        Ok(QuotientChain { spec: self.spec.clone(), terms })
    }

    pub fn dump(&self) -> String {
        dump_terms(self.terms.iter().map(|(e, c)| (e, *c)))
    }
}

pub fn tau(g: &SigmaImage, spec: &Arc<QuotientSpec>) -> Result<QuotientChain> {
    QuotientChain::tau(g, spec.clone())
}

pub fn shift_q(t: &QuotientChain, v: &Point) -> Result<QuotientChain> {
    t.shift(v)
}

pub fn support(t: &QuotientChain) -> BTreeSet<QuotientEdge> {
    t.support()
}
