//! Small dense square matrices over F_q, row-major.

use crate::gfq::FieldCtx;

pub fn identity(n: usize) -> Vec<u32> {
    let mut m = vec![0; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
    }
    m
}

pub fn mat_mul(f: &FieldCtx, n: usize, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                let y = b[k * n + j];
                if y != 0 {
                    out[i * n + j] = f.add(out[i * n + j], f.mul(x, y));
                }
            }
        }
    }
    out
}

pub fn transpose(n: usize, a: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j];
        }
    }
    out
}

/// `a - c·I`.
pub fn sub_scalar(f: &FieldCtx, n: usize, a: &[u32], c: u32) -> Vec<u32> {
    let mut out = a.to_vec();
    for i in 0..n {
        out[i * n + i] = f.sub(out[i * n + i], c);
    }
    out
}

pub fn rank(f: &FieldCtx, rows: usize, cols: usize, a: &[u32]) -> usize {
    let mut m = a.to_vec();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| m[i * cols + c] != 0) else {
            continue;
        };
        for j in 0..cols {
            m.swap(r * cols + j, piv * cols + j);
        }
        let inv = f.inv(m[r * cols + c]).expect("pivot is nonzero");
        for i in 0..rows {
            if i != r && m[i * cols + c] != 0 {
                let t = f.mul(m[i * cols + c], inv);
                for j in c..cols {
                    let v = f.mul(t, m[r * cols + j]);
                    m[i * cols + j] = f.sub(m[i * cols + j], v);
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

pub fn is_invertible(f: &FieldCtx, n: usize, a: &[u32]) -> bool {
    rank(f, n, n, a) == n
}

/// Characteristic polynomial `det(x·I - a)`, coefficients low first, via Hessenberg reduction.
pub fn charpoly(f: &FieldCtx, n: usize, a: &[u32]) -> Vec<u32> {
    let mut h = a.to_vec();
    let at = |i: usize, j: usize| i * n + j;
    for c in 0..n.saturating_sub(2) {
        let Some(piv) = (c + 1..n).find(|&i| h[at(i, c)] != 0) else {
            continue;
        };
        if piv != c + 1 {
            for j in 0..n {
                h.swap(at(piv, j), at(c + 1, j));
            }
            for i in 0..n {
                h.swap(at(i, piv), at(i, c + 1));
            }
        }
        let inv = f.inv(h[at(c + 1, c)]).expect("pivot is nonzero");
        for i in c + 2..n {
            let t = f.mul(h[at(i, c)], inv);
            if t == 0 {
                continue;
            }
            // row_i -= t·row_{c+1}, then col_{c+1} += t·col_i
            for j in 0..n {
                let v = f.mul(t, h[at(c + 1, j)]);
                h[at(i, j)] = f.sub(h[at(i, j)], v);
            }
            for r in 0..n {
                let v = f.mul(t, h[at(r, i)]);
                h[at(r, c + 1)] = f.add(h[at(r, c + 1)], v);
            }
        }
    }
    // p[k] is the charpoly of the leading k×k block.
    let mut p: Vec<Vec<u32>> = vec![vec![1]];
    for k in 0..n {
        let prev = &p[k];
        let mut next = vec![0u32; k + 2];
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] = f.add(next[i + 1], c);
            next[i] = f.sub(next[i], f.mul(h[at(k, k)], c));
        }
        let mut sub = 1u32;
        for i in (0..k).rev() {
            sub = f.mul(sub, h[at(i + 1, i)]);
            let t = f.mul(sub, h[at(i, k)]);
            if t == 0 {
                continue;
            }
            for (j, &c) in p[i].iter().enumerate() {
                next[j] = f.sub(next[j], f.mul(t, c));
            }
        }
        p.push(next);
    }
    p.pop().unwrap()
}

/// Gauss-Jordan inverse, `None` when singular.
pub fn inverse(f: &FieldCtx, n: usize, a: &[u32]) -> Option<Vec<u32>> {
    let w = 2 * n;
    let mut m = vec![0u32; n * w];
    for i in 0..n {
        m[i * w..i * w + n].copy_from_slice(&a[i * n..(i + 1) * n]);
        m[i * w + n + i] = 1;
    }
    for c in 0..n {
        let piv = (c..n).find(|&i| m[i * w + c] != 0)?;
        for j in 0..w {
            m.swap(c * w + j, piv * w + j);
        }
        let inv = f.inv(m[c * w + c]).ok()?;
        for j in 0..w {
            m[c * w + j] = f.mul(m[c * w + j], inv);
        }
        for i in 0..n {
            let t = m[i * w + c];
            if i != c && t != 0 {
                for j in 0..w {
                    let v = f.mul(t, m[c * w + j]);
                    m[i * w + j] = f.sub(m[i * w + j], v);
                }
            }
        }
    }
    Some((0..n).flat_map(|i| m[i * w + n..(i + 1) * w].to_vec()).collect())
}

pub fn mat_pow(f: &FieldCtx, n: usize, a: &[u32], mut e: u64) -> Vec<u32> {
    let mut result = identity(n);
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            result = mat_mul(f, n, &result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mat_mul(f, n, &base, &base);
        }
    }
    result
}

/// `p(A)` for coefficients `p` listed low first.
pub fn poly_at(f: &FieldCtx, n: usize, p: &[u32], a: &[u32]) -> Vec<u32> {
    let mut acc = vec![0u32; n * n];
    for &c in p.iter().rev() {
        acc = mat_mul(f, n, &acc, a);
        for i in 0..n {
            acc[i * n + i] = f.add(acc[i * n + i], c);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charpoly_small() {
        let f = FieldCtx::new(5, 1).unwrap();
        // [[0,4],[1,0]] has charpoly x^2 + 1
        assert_eq!(charpoly(&f, 2, &[0, 4, 1, 0]), vec![1, 0, 1]);
        assert_eq!(charpoly(&f, 2, &identity(2)), vec![1, 3, 1]);
        assert_eq!(rank(&f, 2, 2, &[1, 2, 2, 4]), 1);
    }

    #[test]
    fn inverse_power_and_evaluation() {
        let f = FieldCtx::new(5, 1).unwrap();
        let a = [0u32, 4, 1, 0];
        let inv = inverse(&f, 2, &a).unwrap();
        assert_eq!(mat_mul(&f, 2, &a, &inv), identity(2));
        assert_eq!(inverse(&f, 2, &[1, 2, 2, 4]), None);
        assert_eq!(mat_pow(&f, 2, &a, 4), identity(2));
        assert_eq!(poly_at(&f, 2, &[1, 0, 1], &a), vec![0; 4]);
    }

    #[test]
    fn charpoly_matches_cofactor_expansion() {
        let f = FieldCtx::new(7, 1).unwrap();
        let a = [3u32, 1, 4, 1, 5, 2, 6, 5, 3];
        // det(xI - A) by direct expansion at a handful of points.
        let cp = charpoly(&f, 3, &a);
        for x in 0..7u32 {
            let m = sub_scalar(&f, 3, &a, x);
            let neg: Vec<u32> = m.iter().map(|&v| f.neg(v)).collect();
            let det = |m: &[u32]| {
                let t1 = f.mul(m[0], f.sub(f.mul(m[4], m[8]), f.mul(m[5], m[7])));
                let t2 = f.mul(m[1], f.sub(f.mul(m[3], m[8]), f.mul(m[5], m[6])));
                let t3 = f.mul(m[2], f.sub(f.mul(m[3], m[7]), f.mul(m[4], m[6])));
                f.add(f.sub(t1, t2), t3)
            };
            let val = cp.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c));
            assert_eq!(val, det(&neg));
        }
    }
}
