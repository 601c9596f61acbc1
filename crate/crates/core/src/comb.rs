//! Subsets of `{0..n}` as bitmasks: lexicographic ranking and the Koszul
//! sign of a wedge of two monomials.

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Rank of a k-subset among all k-subsets of `{0..n}` in lexicographic
/// order of the ascending index tuple.
pub fn rank_lex(mask: u64, n: usize) -> usize {
    let k = mask.count_ones() as usize;
    let mut rank = 0u64;
    let mut prev: isize = -1;
    let mut taken = 0;
    for c in 0..n {
        if mask & (1u64 << c) == 0 {
            continue;
        }
        for j in (prev + 1) as usize..c {
            rank += binomial(n - j - 1, k - taken - 1);
        }
        prev = c as isize;
        taken += 1;
    }
    rank as usize
}

pub fn unrank_lex(mut rank: usize, n: usize, k: usize) -> u64 {
    let mut mask = 0u64;
    let mut start = 0;
    for taken in 0..k {
        let mut j = start;
        loop {
            let block = binomial(n - j - 1, k - taken - 1) as usize;
            if rank < block {
                break;
            }
            rank -= block;
            j += 1;
        }
        mask |= 1u64 << j;
        start = j + 1;
    }
    mask
}

/// Sign of `e_a ∧ e_b` relative to the sorted monomial `e_{a∪b}` for
/// anticommuting generators. Zero when the monomials overlap.
pub fn wedge_sign(a: u64, b: u64) -> i32 {
    if a & b != 0 {
        return 0;
    }
    // count pairs (x in a, y in b) with x > y
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let y = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (a >> (y + 1)).count_ones();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|k| mask & (1u64 << k) != 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_unrank_round_trip() {
        for n in 0..9 {
            for k in 0..=n {
                for r in 0..binomial(n, k) as usize {
                    let m = unrank_lex(r, n, k);
                    assert_eq!(m.count_ones() as usize, k);
                    assert_eq!(rank_lex(m, n), r);
                }
            }
        }
    }

    #[test]
    fn lex_order_is_tuple_order() {
        assert_eq!(indices(unrank_lex(0, 6, 3)), vec![0, 1, 2]);
        assert_eq!(indices(unrank_lex(1, 6, 3)), vec![0, 1, 3]);
        assert_eq!(indices(unrank_lex(19, 6, 3)), vec![3, 4, 5]);
    }

    #[test]
    fn signs() {
        assert_eq!(wedge_sign(0b01, 0b10), 1);
        assert_eq!(wedge_sign(0b10, 0b01), -1);
        assert_eq!(wedge_sign(0b11, 0b01), 0);
        // w2 ^ (w1 w3) = - w1 w2 w3
        assert_eq!(wedge_sign(0b010, 0b101), -1);
        assert_eq!(binomial(24, 12), 2_704_156);
    }
}
