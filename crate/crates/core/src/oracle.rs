//! Brute-force reference machinery, independent of the solver.
//!
//! Elements of `M_n` of bounded word length are enumerated breadth-first and
//! deduplicated by their σ-image; an equation is then checked by direct
//! substitution. Exponential by nature, meant for desk-scale cross-checks.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flows::{sigma, SigmaImage};
use crate::solver::SphericalEquation;
use crate::words::{GroupWord, Letter};

/// Candidate values `(u₁, …, u_m)` for the variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessTuple {
    pub words: Vec<GroupWord>,
}

impl WitnessTuple {
    /// `W(ũ) = u₁c₁u₁⁻¹ ⋯ u_m c_m u_m⁻¹` as a word.
    pub fn substitute(&self, eq: &SphericalEquation) -> Result<GroupWord> {
        if self.words.len() != eq.len() {
            return Err(Error::LengthMismatch { expected: eq.len(), got: self.words.len() });
        }
        let mut out = GroupWord::identity(eq.rank());
        for (u, c) in self.words.iter().zip(eq.constants()) {
            out = GroupWord::product(eq.rank(), [&out, u, c, &u.inverse()])?;
        }
        Ok(out)
    }
}

/// All distinct elements of `M_n` of length at most `max_len`, in BFS order.
pub struct ElementBall {
    rank: usize,
    elements: Vec<(GroupWord, SigmaImage)>,
}

impl ElementBall {
    pub fn new(rank: usize, max_len: usize) -> Self {
        let id = GroupWord::identity(rank);
        let mut seen: HashSet<SigmaImage> = HashSet::new();
        seen.insert(SigmaImage::identity(rank));
        let mut elements = vec![(id, SigmaImage::identity(rank))];
        let mut level = 0..1;
        for _ in 0..max_len {
            let start = elements.len();
            for idx in level.clone() {
                let word = elements[idx].0.clone();
                let last = word.letters().last().copied();
                for gen in 1..=rank {
                    for l in [Letter::pos(gen), Letter::neg(gen)] {
                        if last == Some(l.inv()) {
                            continue;
                        }
                        let mut letters = word.letters().to_vec();
                        letters.push(l);
                        let next = GroupWord::new(rank, letters).expect("letters in range");
                        let s = sigma(&next);
                        if seen.insert(s.clone()) {
                            elements.push((next, s));
                        }
                    }
                }
            }
            level = start..elements.len();
        }
        ElementBall { rank, elements }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[(GroupWord, SigmaImage)] {
        &self.elements
    }

    /// Searches tuples with `u₁ = 1` (every solution can be conjugated into
    /// this form) and `|u_i| ≤ max_len`, subject to `accept(i, ū_i's σ)`.
    pub fn solve_where<F>(&self, eq: &SphericalEquation, accept: F) -> Option<WitnessTuple>
    where
        F: Fn(usize, &SigmaImage) -> bool + Sync,
    {
        assert_eq!(eq.rank(), self.rank, "equation rank differs from the enumerated ball");
        let consts: Vec<SigmaImage> = eq.constants().iter().map(sigma).collect();
        let id = SigmaImage::identity(self.rank);
        if !accept(0, &id) {
            return None;
        }
        let m = consts.len();
        if m == 1 {
            return consts[0].is_identity().then(|| WitnessTuple { words: vec![GroupWord::identity(self.rank)] });
        }
        let conj = |u: &SigmaImage, c: &SigmaImage| u.multiply(c).unwrap().multiply(&u.invert()).unwrap();
        // Last variable: σ(u c_m u⁻¹) -> admissible element indices.
        let mut last: HashMap<SigmaImage, Vec<usize>> = HashMap::new();
        for (k, (_, u)) in self.elements.iter().enumerate() {
            if accept(m - 1, u) {
                last.entry(conj(u, &consts[m - 1])).or_default().push(k);
            }
        }
        let finish = |prefix: &SigmaImage, chosen: &[usize]| -> Option<WitnessTuple> {
            let need = prefix.invert();
            let &k = last.get(&need)?.first()?;
            let mut words = vec![GroupWord::identity(self.rank)];
            words.extend(chosen.iter().map(|&i| self.elements[i].0.clone()));
            words.push(self.elements[k].0.clone());
            Some(WitnessTuple { words })
        };
        let first = consts[0].clone();
        if m == 2 {
            return finish(&first, &[]);
        }
        // Middle variables u₂ … u_{m-1}; the outermost loop runs in parallel.
        fn rec<'a>(
            ball: &'a ElementBall,
            consts: &[SigmaImage],
            accept: &(dyn Fn(usize, &SigmaImage) -> bool + Sync),
            var: usize,
            prefix: &SigmaImage,
            chosen: &mut Vec<usize>,
            finish: &dyn Fn(&SigmaImage, &[usize]) -> Option<WitnessTuple>,
        ) -> Option<WitnessTuple> {
            if var == consts.len() - 1 {
                return finish(prefix, chosen);
            }
            for (k, (_, u)) in ball.elements.iter().enumerate() {
                if !accept(var, u) {
                    continue;
                }
                let term = u.multiply(&consts[var]).unwrap().multiply(&u.invert()).unwrap();
                chosen.push(k);
                let r = rec(ball, consts, accept, var + 1, &prefix.multiply(&term).unwrap(), chosen, finish);
                chosen.pop();
                if r.is_some() {
                    return r;
                }
            }
            None
        }
        let accept_ref: &(dyn Fn(usize, &SigmaImage) -> bool + Sync) = &accept;
        let finish_ref = &finish;
        self.elements.par_iter().enumerate().find_map_first(|(k, (_, u))| {
            if !accept(1, u) {
                return None;
            }
            let prefix = first.multiply(&conj(u, &consts[1])).unwrap();
            let mut chosen = vec![k];
            rec(self, &consts, accept_ref, 2, &prefix, &mut chosen, finish_ref)
        })
    }

    pub fn solve(&self, eq: &SphericalEquation) -> Option<WitnessTuple> {
        self.solve_where(eq, |_, _| true)
    }
}

/// Searches for a solution with every `|u_i| ≤ max_len` (after conjugating
/// so that `u₁ = 1`).
pub fn brute_force_solve(eq: &SphericalEquation, max_len: usize) -> Option<WitnessTuple> {
    ElementBall::new(eq.rank(), max_len).solve(eq)
}

fn check_gen(i: usize, rank: usize) -> Result<()> {
    if i == 0 || i > rank {
        return Err(Error::IndexOutOfRange { index: i, rank });
    }
    Ok(())
}

/// Family (a): the literal word `h⁻¹[a_i,a_j]⁻¹h · c_k⁻¹ · h⁻¹[a_i,a_j]h · c_k`.
pub fn hq_generator_a(i: usize, j: usize, h: &GroupWord, k: usize, eq: &SphericalEquation) -> Result<GroupWord> {
    let rank = eq.rank();
    check_gen(i, rank)?;
    check_gen(j, rank)?;
    check_gen(k, eq.len())?;
    let ai = GroupWord::generator(rank, i)?;
    let aj = GroupWord::generator(rank, j)?;
    let x = GroupWord::commutator(&ai, &aj)?.conjugate_by(h)?;
    let c = &eq.constants()[k - 1];
    GroupWord::product(rank, [&x.inverse(), &c.inverse(), &x, c])
}

/// Family (b): `[c_i, c_j]`.
pub fn hq_generator_b(i: usize, j: usize, eq: &SphericalEquation) -> Result<GroupWord> {
    check_gen(i, eq.len())?;
    check_gen(j, eq.len())?;
    GroupWord::commutator(&eq.constants()[i - 1], &eq.constants()[j - 1])
}
