//! The sublattice `L_Q ≤ Z^n` spanned by abelianized constants, in Hermite
//! normal form, and canonical representatives of its cosets.
//!
//! The basis is kept in row form: pivot columns strictly increase, pivots
//! are positive, and the entries above each pivot lie in `[0, pivot)`.
//! Reducing a point against the rows in order gives a representative that is
//! constant on the coset, so it can be used directly as a map key for the
//! vertices of the quotient graph.

use crate::error::{Error, Result};
use crate::flows::Point;

#[derive(Debug, Clone)]
pub struct QuotientSpec {
    rank: usize,
    generators: Vec<Point>,
    basis: Vec<Point>,
    pivots: Vec<usize>,
}

impl QuotientSpec {
    pub fn build(generators: &[Point], rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        for g in generators {
            g.check_rank(rank)?;
        }
        let (basis, pivots) = hermite_rows(rank, generators);
        Ok(QuotientSpec { rank, generators: generators.to_vec(), basis, pivots })
    }

    /// The quotient by the trivial lattice, i.e. the grid itself.
    pub fn trivial(rank: usize) -> Self {
        QuotientSpec { rank, generators: Vec::new(), basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    pub fn basis(&self) -> &[Point] {
        &self.basis
    }

    /// 0-based pivot column of each basis row.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    /// Number of cosets when the lattice has full rank.
    pub fn index(&self) -> Option<u64> {
        if self.basis.len() < self.rank {
            return None;
        }
        Some(self.basis.iter().zip(&self.pivots).map(|(b, &p)| b.coords()[p] as u64).product())
    }

    /// Two specs describe the same quotient graph.
    pub fn same_quotient(&self, other: &QuotientSpec) -> bool {
        self.rank == other.rank && self.basis == other.basis
    }

    pub fn canonicalize(&self, v: &Point) -> Result<Point> {
        v.check_rank(self.rank)?;
        let mut out = v.clone();
        self.reduce_in_place(&mut out);
        Ok(out)
    }

    /// Rank is assumed to match.
    pub(crate) fn reduce_in_place(&self, v: &mut Point) {
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let q = v.coords()[p].div_euclid(row.coords()[p]);
            if q != 0 {
                v.add_scaled(row, -q);
            }
        }
    }

    pub fn contains(&self, v: &Point) -> Result<bool> {
        Ok(self.canonicalize(v)?.is_zero())
    }
}

fn hermite_rows(rank: usize, generators: &[Point]) -> (Vec<Point>, Vec<usize>) {
    let mut rows: Vec<Point> = generators.iter().filter(|g| !g.is_zero()).cloned().collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..rank {
        if r == rows.len() {
            break;
        }
        // Euclid on the column below row r until a single nonzero entry remains.
        loop {
            let best = (r..rows.len())
                .filter(|&k| rows[k].coords()[col] != 0)
                .min_by_key(|&k| rows[k].coords()[col].unsigned_abs());
            let Some(best) = best else { break };
            rows.swap(r, best);
            let pivot = rows[r].coords()[col];
            let head = rows[r].clone();
            let mut dirty = false;
            for row in rows.iter_mut().skip(r + 1) {
                let q = row.coords()[col] / pivot;
                if q != 0 {
                    row.add_scaled(&head, -q);
                }
                dirty |= row.coords()[col] != 0;
            }
            if !dirty {
                break;
            }
        }
        if rows[r].coords()[col] == 0 {
            continue;
        }
        if rows[r].coords()[col] < 0 {
            for c in rows[r].coords_mut() {
                *c = -*c;
            }
        }
        let pivot = rows[r].coords()[col];
        let head = rows[r].clone();
        for row in rows.iter_mut().take(r) {
            let q = row.coords()[col].div_euclid(pivot);
            if q != 0 {
                row.add_scaled(&head, -q);
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn build_spec(gens: &[Point], rank: usize) -> Result<QuotientSpec> {
    QuotientSpec::build(gens, rank)
}

pub fn canonicalize(v: &Point, spec: &QuotientSpec) -> Result<Point> {
    spec.canonicalize(v)
}

pub fn contains(v: &Point, spec: &QuotientSpec) -> Result<bool> {
    spec.contains(v)
}
