//! Sorted sparse integer vectors shared by flows and quotient chains.

pub(crate) fn checked_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("chain coefficient overflow")
}

/// Sorts by key, merges duplicate keys and drops zero coefficients.
pub(crate) fn normalize<K: Ord>(mut terms: Vec<(K, i64)>) -> Vec<(K, i64)> {
    terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(K, i64)> = Vec::with_capacity(terms.len());
    for (k, c) in terms {
        match out.last_mut() {
            Some((last, acc)) if *last == k => *acc = checked_add(*acc, c),
            _ => {
                if matches!(out.last(), Some((_, 0))) {
                    out.pop();
                }
                out.push((k, c));
            }
        }
    }
    if matches!(out.last(), Some((_, 0))) {
        out.pop();
    }
    out
}

/// Merge of two already-normalized vectors.
pub(crate) fn merge<K: Ord + Clone>(a: &[(K, i64)], b: &[(K, i64)]) -> Vec<(K, i64)> {
    use std::cmp::Ordering;
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                let c = checked_add(a[i].1, b[j].1);
                if c != 0 {
                    out.push((a[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_drops_zeros() {
        let v = normalize(vec![(3, 1), (1, 2), (3, -1), (2, 0), (1, 1)]);
        assert_eq!(v, vec![(1, 3)]);
        assert!(normalize::<u8>(vec![(1, 1), (1, -1)]).is_empty());
    }

    #[test]
    fn merge_cancels() {
        let a = vec![(1, 1), (2, 2), (5, 1)];
        let b = vec![(0, 4), (2, -2), (5, 1)];
        assert_eq!(merge(&a, &b), vec![(0, 4), (1, 1), (5, 2)]);
    }
}
