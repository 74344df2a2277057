//! Square packing as spherical equations in `M_2`.
//!
//! The commutator `[a1^k, a2^k]` traces the boundary of a `k × k` square, so
//! the equation with constants `[a2^n0, a1^n0], [a1^n1, a2^n1], …` is
//! solvable exactly when translated copies of the small contours cancel the
//! reversed box contour, i.e. when the squares tile the box.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::{sigma, Point};
use crate::solver::{Certificate, SolverInstance, SphericalEquation};
use crate::words::GroupWord;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingInstance {
    sides: Vec<u64>,
    box_side: u64,
}

impl PackingInstance {
    pub fn new(sides: &[u64]) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::EmptyEquation);
        }
        if sides.contains(&0) {
            return Err(Error::InvalidSide);
        }
        let area = sides
            .iter()
            .try_fold(0u64, |acc, &s| s.checked_mul(s).and_then(|sq| acc.checked_add(sq)))
            .ok_or(Error::NotPerfectSquare(u64::MAX))?;
        let root = area.isqrt();
        if root * root != area {
            return Err(Error::NotPerfectSquare(area));
        }
        Ok(PackingInstance { sides: sides.to_vec(), box_side: root })
    }

    pub fn sides(&self) -> &[u64] {
        &self.sides
    }

    pub fn box_side(&self) -> u64 {
        self.box_side
    }

    /// Input size under unary encoding, `Σ n_i`.
    pub fn unary_size(&self) -> u64 {
        self.sides.iter().sum()
    }

    pub fn equation(&self) -> SphericalEquation {
        let a1 = GroupWord::generator(2, 1).expect("rank 2");
        let a2 = GroupWord::generator(2, 2).expect("rank 2");
        let n0 = self.box_side as i64;
        let mut constants = vec![GroupWord::commutator(&a2.pow(n0), &a1.pow(n0)).expect("rank 2")];
        for &n in &self.sides {
            let n = n as i64;
            constants.push(GroupWord::commutator(&a1.pow(n), &a2.pow(n)).expect("rank 2"));
        }
        assert!(
            constants.iter().all(|c| sigma(c).endpoint.is_zero()),
            "packing constants are commutators"
        );
        SphericalEquation::new(2, constants).expect("nonempty rank-2 constants")
    }
}

/// Lower-left corners of the pieces, in input order, inside the box at the origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Placement {
    pub offsets: Vec<[i64; 2]>,
}

/// Wire form: `{ "box": n0, "offsets": [[x,y],...] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementRecord {
    #[serde(rename = "box")]
    pub box_side: u64,
    pub offsets: Vec<[i64; 2]>,
}

impl Placement {
    pub fn record(&self, inst: &PackingInstance) -> PlacementRecord {
        PlacementRecord { box_side: inst.box_side, offsets: self.offsets.clone() }
    }

    /// Checks containment, pairwise disjoint interiors and full coverage.
    pub fn validate(&self, inst: &PackingInstance) -> Result<()> {
        let bad = |msg: String| Err(Error::CertificateInvalid(msg));
        if self.offsets.len() != inst.sides.len() {
            return bad(format!("{} offsets for {} pieces", self.offsets.len(), inst.sides.len()));
        }
        let n0 = inst.box_side as i64;
        for (k, (&[x, y], &s)) in self.offsets.iter().zip(&inst.sides).enumerate() {
            let s = s as i64;
            if x < 0 || y < 0 || x + s > n0 || y + s > n0 {
                return bad(format!("piece {k} at ({x},{y}) leaves the box"));
            }
        }
        for i in 0..self.offsets.len() {
            for j in i + 1..self.offsets.len() {
                let ([xi, yi], si) = (self.offsets[i], inst.sides[i] as i64);
                let ([xj, yj], sj) = (self.offsets[j], inst.sides[j] as i64);
                if xi < xj + sj && xj < xi + si && yi < yj + sj && yj < yi + si {
                    return bad(format!("pieces {i} and {j} overlap"));
                }
            }
        }
        // Disjoint pieces of total area n0² inside the box cover it.
        Ok(())
    }

    /// The certificate placing the box contour at the origin.
    pub fn certificate(&self) -> Certificate {
        let mut alphas = vec![Point::zero(2)];
        alphas.extend(self.offsets.iter().map(|&[x, y]| Point::from([x, y])));
        Certificate { alphas }
    }

    /// One character per cell, top row first; pieces are labelled `A`, `B`, …
    pub fn render_ascii(&self, inst: &PackingInstance) -> String {
        const LABELS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
        let n0 = inst.box_side as usize;
        let mut grid = vec![vec![b'.'; n0]; n0];
        for (k, (&[x, y], &s)) in self.offsets.iter().zip(&inst.sides).enumerate() {
            let label = LABELS[k % LABELS.len()];
            for row in grid.iter_mut().skip(y as usize).take(s as usize) {
                for cell in row.iter_mut().skip(x as usize).take(s as usize) {
                    *cell = label;
                }
            }
        }
        let mut out = String::new();
        for row in grid.iter().rev() {
            let _ = writeln!(out, "{}", String::from_utf8_lossy(row));
        }
        out
    }
}

pub fn encode(sides: &[u64]) -> Result<SphericalEquation> {
    Ok(PackingInstance::new(sides)?.equation())
}

/// Geometric tiling search: fill the lowest, then leftmost, empty cell with
/// the largest piece size that still fits.
pub fn pack_brute_force(inst: &PackingInstance) -> Option<Placement> {
    let n0 = inst.box_side as usize;
    let mut sizes: Vec<u64> = inst.sides.clone();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes.dedup();
    let mut left: Vec<usize> =
        sizes.iter().map(|s| inst.sides.iter().filter(|&&t| t == *s).count()).collect();
    let mut grid = vec![false; n0 * n0];
    let mut placed: Vec<(usize, usize, usize)> = Vec::new();

    fn fits(grid: &[bool], n0: usize, x: usize, y: usize, s: usize) -> bool {
        x + s <= n0 && y + s <= n0 && (y..y + s).all(|r| (x..x + s).all(|c| !grid[r * n0 + c]))
    }
    fn fill(grid: &mut [bool], n0: usize, x: usize, y: usize, s: usize, v: bool) {
        for r in y..y + s {
            for c in x..x + s {
                grid[r * n0 + c] = v;
            }
        }
    }
    fn go(
        grid: &mut [bool],
        n0: usize,
        sizes: &[u64],
        left: &mut [usize],
        placed: &mut Vec<(usize, usize, usize)>,
    ) -> bool {
        let Some(cell) = grid.iter().position(|&f| !f) else { return true };
        let (x, y) = (cell % n0, cell / n0);
        for (k, &s) in sizes.iter().enumerate() {
            let s = s as usize;
            if left[k] == 0 || !fits(grid, n0, x, y, s) {
                continue;
            }
            left[k] -= 1;
            fill(grid, n0, x, y, s, true);
            placed.push((s, x, y));
            if go(grid, n0, sizes, left, placed) {
                return true;
            }
            placed.pop();
            fill(grid, n0, x, y, s, false);
            left[k] += 1;
        }
        false
    }

    if !go(&mut grid, n0, &sizes, &mut left, &mut placed) {
        return None;
    }
    // Hand out placements of each size to pieces of that size in input order.
    let mut offsets = vec![[0i64; 2]; inst.sides.len()];
    let mut used = vec![false; placed.len()];
    for (i, &s) in inst.sides.iter().enumerate() {
        let k = (0..placed.len()).find(|&k| !used[k] && placed[k].0 as u64 == s).expect("one slot per piece");
        used[k] = true;
        offsets[i] = [placed[k].1 as i64, placed[k].2 as i64];
    }
    Some(Placement { offsets })
}

/// Reads a solver certificate for `encode(inst.sides)` as a packing.
pub fn decode_certificate(inst: &PackingInstance, cert: &Certificate) -> Result<Placement> {
    let solver = SolverInstance::new(inst.equation())?;
    let sum = solver.shifted_sum(&cert.alphas).map_err(|e| match e {
        Error::LengthMismatch { .. } | Error::RankMismatch { .. } => Error::CertificateInvalid(e.to_string()),
        other => other,
    })?;
    if !sum.is_zero() {
        return Err(Error::CertificateInvalid(format!("{} edges survive the shifted sum", sum.len())));
    }
    let origin = &cert.alphas[0];
    let offsets = cert.alphas[1..]
        .iter()
        .map(|a| {
            let d = a - origin;
            [d.coords()[0], d.coords()[1]]
        })
        .collect();
    let placement = Placement { offsets };
    placement.validate(inst)?;
    Ok(placement)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::verify_certificate;

    fn inst(sides: &[u64]) -> PackingInstance {
        PackingInstance::new(sides).unwrap()
    }

    #[test]
    fn encode_examples() {
        let eq = encode(&[3, 4]).unwrap();
        let a1 = GroupWord::generator(2, 1).unwrap();
        let a2 = GroupWord::generator(2, 2).unwrap();
        let c = |x: &GroupWord, y: &GroupWord| GroupWord::commutator(x, y).unwrap();
        assert_eq!(
            eq.constants(),
            &[c(&a2.pow(5), &a1.pow(5)), c(&a1.pow(3), &a2.pow(3)), c(&a1.pow(4), &a2.pow(4))]
        );
        let eq = encode(&[2]).unwrap();
        assert_eq!(eq.constants(), &[c(&a2.pow(2), &a1.pow(2)), c(&a1.pow(2), &a2.pow(2))]);
        assert_eq!(encode(&[1, 1, 1]), Err(Error::NotPerfectSquare(3)));
        assert_eq!(encode(&[0, 1]), Err(Error::InvalidSide));
        assert_eq!(encode(&[]), Err(Error::EmptyEquation));
    }

    #[test]
    fn contour_shape() {
        // [a1^2, a2^2] walks the 2x2 square counterclockwise from the origin.
        let s = sigma(&encode(&[2]).unwrap().constants()[1]);
        assert_eq!(s.chain.len(), 8);
        assert_eq!(s.chain.coefficient(&crate::flows::GridEdge::new([1, 0], 1)), 1);
        assert_eq!(s.chain.coefficient(&crate::flows::GridEdge::new([2, 1], 2)), 1);
        assert_eq!(s.chain.coefficient(&crate::flows::GridEdge::new([0, 2], 1)), -1);
    }

    #[test]
    fn brute_force_examples() {
        let p = pack_brute_force(&inst(&[2, 2, 2, 2])).unwrap();
        assert_eq!(p.offsets, vec![[0, 0], [2, 0], [0, 2], [2, 2]]);
        assert_eq!(pack_brute_force(&inst(&[3, 4])), None);
        assert_eq!(pack_brute_force(&inst(&[5])).unwrap().offsets, vec![[0, 0]]);
        let i = inst(&[2, 4, 2, 1, 1, 1, 1, 2, 2]);
        let p = pack_brute_force(&i).unwrap();
        p.validate(&i).unwrap();
    }

    #[test]
    fn decode_examples() {
        let i = inst(&[2, 2, 2, 2]);
        let cert = Certificate {
            alphas: [[0, 0], [0, 0], [2, 0], [0, 2], [2, 2]].into_iter().map(Point::from).collect(),
        };
        let solver = SolverInstance::new(i.equation()).unwrap();
        assert!(verify_certificate(&solver, &cert).unwrap());
        assert_eq!(decode_certificate(&i, &cert).unwrap().offsets, vec![[0, 0], [2, 0], [0, 2], [2, 2]]);

        let moved = Certificate { alphas: cert.alphas.iter().map(|a| a + &Point::from([-3, 1])).collect() };
        assert_eq!(decode_certificate(&i, &moved).unwrap().offsets, vec![[0, 0], [2, 0], [0, 2], [2, 2]]);

        let single = inst(&[5]);
        let zero = Certificate { alphas: vec![Point::zero(2), Point::zero(2)] };
        assert_eq!(decode_certificate(&single, &zero).unwrap().offsets, vec![[0, 0]]);

        let mut broken = cert.clone();
        broken.alphas[2] = Point::from([1, 0]);
        assert!(matches!(decode_certificate(&i, &broken), Err(Error::CertificateInvalid(_))));
        let short = Certificate { alphas: vec![Point::zero(2)] };
        assert!(matches!(decode_certificate(&i, &short), Err(Error::CertificateInvalid(_))));
    }

    #[test]
    fn validate_rejects() {
        let i = inst(&[2, 2, 2, 2]);
        let overlap = Placement { offsets: vec![[0, 0], [1, 0], [0, 2], [2, 2]] };
        assert!(overlap.validate(&i).is_err());
        let outside = Placement { offsets: vec![[0, 0], [3, 0], [0, 2], [2, 2]] };
        assert!(outside.validate(&i).is_err());
    }

    #[test]
    fn ascii() {
        let i = inst(&[2, 2, 2, 2]);
        let p = pack_brute_force(&i).unwrap();
        assert_eq!(p.render_ascii(&i), "CCDD\nCCDD\nAABB\nAABB\n");
    }

    #[test]
    fn record_json() {
        let i = inst(&[5]);
        let p = pack_brute_force(&i).unwrap();
        let s = serde_json::to_string(&p.record(&i)).unwrap();
        assert_eq!(s, r#"{"box":5,"offsets":[[0,0]]}"#);
        assert_eq!(serde_json::from_str::<PlacementRecord>(&s).unwrap(), p.record(&i));
    }
}
