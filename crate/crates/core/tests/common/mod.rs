#![allow(dead_code)]

use cornerkit::poset::{FactorKind, FactorType, ProductType};

/// Every canonical product of total dimension `1..=max_dim`.
pub fn all_types(max_dim: usize) -> Vec<ProductType> {
    let mut factors = Vec::new();
    for n in 2..=max_dim {
        factors.push(FactorType::sigma(n).unwrap());
    }
    for n in 1..=max_dim {
        factors.push(FactorType::delta(n).unwrap());
    }
    let mut out = Vec::new();
    fn go(factors: &[FactorType], start: usize, left: usize, cur: &mut Vec<FactorType>, out: &mut Vec<ProductType>) {
        if !cur.is_empty() {
            out.push(ProductType::new(cur.clone()));
        }
        for i in start..factors.len() {
            if factors[i].n() <= left {
                cur.push(factors[i]);
                go(factors, i, left - factors[i].n(), cur, out);
                cur.pop();
            }
        }
    }
    go(&factors, 0, max_dim, &mut Vec::new(), &mut out);
    out
}

pub fn is_delta_product(t: &ProductType) -> bool {
    t.factors().iter().all(|f| f.kind() == FactorKind::Delta)
}

/// Cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0] as i128;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] as i128 * cofactor_det(&minor)
        })
        .sum()
}

/// Rank over the rationals by fraction-free elimination in i128.
pub fn rank_oracle(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, p);
        for r in 0..rows {
            if r != rank && a[r][c] != 0 {
                let (x, y) = (a[rank][c], a[r][c]);
                for k in 0..cols {
                    a[r][k] = a[r][k] * x - a[rank][k] * y;
                }
                let g = a[r].iter().fold(0i128, |g, &v| gcd(g, v));
                if g > 1 {
                    a[r].iter_mut().for_each(|v| *v /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}
