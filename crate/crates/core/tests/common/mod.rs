#![allow(dead_code)]

use metabel_core::{GroupWord, Letter, SphericalEquation};
use rand::Rng;

pub fn word(text: &str, rank: usize) -> GroupWord {
    GroupWord::parse(text, rank).unwrap()
}

pub fn random_word<R: Rng>(rng: &mut R, rank: usize, min_len: usize, max_len: usize) -> GroupWord {
    let len = rng.gen_range(min_len..=max_len);
    let letters = (0..len)
        .map(|_| Letter { gen: rng.gen_range(1..=rank), inverse: rng.gen_bool(0.5) })
        .collect();
    GroupWord::new(rank, letters).unwrap()
}

/// Every word (reduced or not) over the 2n-letter alphabet up to `max_len`.
pub fn all_words(rank: usize, max_len: usize) -> Vec<GroupWord> {
    let alphabet: Vec<Letter> = (1..=rank).flat_map(|g| [Letter::pos(g), Letter::neg(g)]).collect();
    let mut out = vec![GroupWord::identity(rank)];
    let mut level = vec![Vec::<Letter>::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &level {
            for &l in &alphabet {
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().map(|v| GroupWord::new(rank, v.clone()).unwrap()));
        level = next;
    }
    out
}

pub fn all_reduced_words(rank: usize, max_len: usize) -> Vec<GroupWord> {
    all_words(rank, max_len).into_iter().filter(|w| w.is_reduced()).collect()
}

pub fn commutator(x: &GroupWord, y: &GroupWord) -> GroupWord {
    GroupWord::commutator(x, y).unwrap()
}

pub fn equation(rank: usize, constants: Vec<GroupWord>) -> SphericalEquation {
    SphericalEquation::new(rank, constants).unwrap()
}

/// Multisets of positive sides (non-increasing) whose squares sum to `target`.
pub fn square_partitions(target: u64) -> Vec<Vec<u64>> {
    fn go(rest: u64, max_side: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for s in (1..=max_side).rev() {
            if s * s <= rest {
                cur.push(s);
                go(rest - s * s, s, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(target, target.isqrt(), &mut Vec::new(), &mut out);
    out
}
