//! Exact integer matrix routines: Hermite and Smith normal forms, kernels,
//! and membership/expression against row lattices.
//!
//! All lattices are row spans of integer matrices. The Hermite normal form
//! used throughout is the canonical row echelon form: pivot columns strictly
//! increase, pivots are positive, entries above a pivot are reduced into
//! `[0, pivot)`, and zero rows are dropped. Two row spans are equal iff their
//! HNFs are identical.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Row = Vec<Int>;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn zero_row(width: usize) -> Row {
    vec![Int::zero(); width]
}

pub fn is_zero_row(row: &[Int]) -> bool {
    row.iter().all(|x| x.is_zero())
}

pub fn identity(n: usize) -> Vec<Row> {
    (0..n)
        .map(|i| {
            let mut r = zero_row(n);
            r[i] = Int::one();
            r
        })
        .collect()
}

pub fn row_add(dst: &mut [Int], src: &[Int], factor: &Int) {
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        *d += factor * s;
    }
}

pub fn row_neg(row: &mut [Int]) {
    for x in row.iter_mut() {
        *x = -std::mem::take(x);
    }
}

/// Row vector times matrix: `v * m`, where `m` is given by rows.
pub fn apply(v: &[Int], m: &[Row]) -> Row {
    assert_eq!(v.len(), m.len(), "apply: dimension mismatch");
    let width = m.first().map_or(0, |r| r.len());
    let mut out = zero_row(width);
    for (c, row) in v.iter().zip(m.iter()) {
        if !c.is_zero() {
            row_add(&mut out, row, c);
        }
    }
    out
}

pub fn mat_mul(a: &[Row], b: &[Row]) -> Vec<Row> {
    a.iter().map(|r| apply(r, b)).collect()
}

pub fn mat_pow(m: &[Row], mut e: u64) -> Vec<Row> {
    let n = m.len();
    let mut acc = identity(n);
    let mut base = m.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mat_mul(&acc, &base);
        }
        base = mat_mul(&base, &base);
        e >>= 1;
    }
    acc
}

pub fn mat_eq_identity(m: &[Row]) -> bool {
    m == identity(m.len()).as_slice()
}

fn swap_rows<T>(rows: &mut [T], i: usize, j: usize) {
    if i != j {
        rows.swap(i, j);
    }
}

/// Canonical Hermite normal form of the row span, zero rows dropped.
pub fn hnf(rows: &[Row], width: usize) -> Vec<Row> {
    hnf_with_transform(rows, width).0
}

/// HNF together with a unimodular transform `u` such that `u * rows = [h; 0]`:
/// the first `h.len()` rows of `u` express the HNF rows as integer
/// combinations of the input rows, and the remaining rows of `u` span the
/// left kernel of the input.
pub fn hnf_with_transform(rows: &[Row], width: usize) -> (Vec<Row>, Vec<Row>) {
    let n = rows.len();
    let mut a: Vec<Row> = rows.to_vec();
    for r in &a {
        assert_eq!(r.len(), width, "hnf: ragged input");
    }
    let mut u = identity(n);
    let mut pivot_row = 0usize;
    for col in 0..width {
        // Eliminate below `pivot_row` in `col` by gcd row operations.
        let mut k = pivot_row;
        while k < n {
            if !a[k][col].is_zero() {
                break;
            }
            k += 1;
        }
        if k == n {
            continue;
        }
        swap_rows(&mut a, pivot_row, k);
        swap_rows(&mut u, pivot_row, k);
        for r in pivot_row + 1..n {
            while !a[r][col].is_zero() {
                let q = &a[r][col] / &a[pivot_row][col];
                if !q.is_zero() {
                    let negq = -q;
                    let (head, tail) = a.split_at_mut(r);
                    row_add(&mut tail[0], &head[pivot_row], &negq);
                    let (head, tail) = u.split_at_mut(r);
                    row_add(&mut tail[0], &head[pivot_row], &negq);
                }
                if !a[r][col].is_zero() {
                    swap_rows(&mut a, pivot_row, r);
                    swap_rows(&mut u, pivot_row, r);
                }
            }
        }
        if a[pivot_row][col].is_negative() {
            row_neg(&mut a[pivot_row]);
            row_neg(&mut u[pivot_row]);
        }
        // Reduce the entries above the pivot into [0, pivot).
        for r in 0..pivot_row {
            let q = a[r][col].div_floor(&a[pivot_row][col]);
            if !q.is_zero() {
                let negq = -q;
                let (head, tail) = a.split_at_mut(pivot_row);
                row_add(&mut head[r], &tail[0], &negq);
                let (head, tail) = u.split_at_mut(pivot_row);
                row_add(&mut head[r], &tail[0], &negq);
            }
        }
        pivot_row += 1;
        if pivot_row == n {
            break;
        }
    }
    a.truncate(pivot_row);
    (a, u)
}

/// Basis (in HNF) of `{ x : x * rows = 0 }`.
pub fn left_kernel(rows: &[Row], width: usize) -> Vec<Row> {
    let n = rows.len();
    let (h, u) = hnf_with_transform(rows, width);
    let rank = h.len();
    let ker: Vec<Row> = u[rank..n].to_vec();
    hnf(&ker, n)
}

/// Reduce `v` against HNF rows; returns the residue and the coefficients used.
fn reduce_against(hnf_rows: &[Row], v: &[Int]) -> (Row, Vec<Int>) {
    let mut residue = v.to_vec();
    let mut coeffs = vec![Int::zero(); hnf_rows.len()];
    for (i, row) in hnf_rows.iter().enumerate() {
        let col = row.iter().position(|x| !x.is_zero()).expect("zero HNF row");
        if residue[col].is_zero() {
            continue;
        }
        let q = residue[col].div_floor(&row[col]);
        if !q.is_zero() {
            let negq = -&q;
            row_add(&mut residue, row, &negq);
            coeffs[i] = q;
        }
    }
    (residue, coeffs)
}

/// Is `v` in the row span of the HNF matrix?
pub fn hnf_member(hnf_rows: &[Row], v: &[Int]) -> bool {
    is_zero_row(&reduce_against(hnf_rows, v).0)
}

/// Coefficients of `v` as an integer combination of the given (arbitrary)
/// rows, if one exists.
pub fn express_in_rows(rows: &[Row], width: usize, v: &[Int]) -> Option<Vec<Int>> {
    let (h, u) = hnf_with_transform(rows, width);
    let (residue, c) = reduce_against(&h, v);
    if !is_zero_row(&residue) {
        return None;
    }
    // v = sum c_i h_i and h_i = sum_j u_ij rows_j.
    let mut out = vec![Int::zero(); rows.len()];
    for (ci, urow) in c.iter().zip(u.iter()) {
        if !ci.is_zero() {
            row_add(&mut out, urow, ci);
        }
    }
    Some(out)
}

/// Smith normal form: returns `(d, t, t_inv)` where `d` is the diagonal of
/// `s * a * t` (padded with zeros up to `width`), `t` is the unimodular
/// column transform and `t_inv` its inverse. The row transform is not needed
/// by callers and is dropped.
pub fn smith_diagonal(a: &[Row], width: usize) -> (Vec<Int>, Vec<Row>, Vec<Row>) {
    let mut m: Vec<Row> = a.to_vec();
    let rows = m.len();
    let mut t = identity(width);
    let mut t_inv = identity(width);

    let col_add = |m: &mut Vec<Row>, t: &mut Vec<Row>, t_inv: &mut Vec<Row>, dst: usize, src: usize, f: &Int| {
        for r in m.iter_mut() {
            let add = f * &r[src];
            r[dst] += add;
        }
        for r in t.iter_mut() {
            let add = f * &r[src];
            r[dst] += add;
        }
        // inverse op on t_inv: row `src` -= f * row `dst`
        let negf = -f;
        let (a, b) = if src < dst {
            let (h, tl) = t_inv.split_at_mut(dst);
            (&mut h[src], &tl[0])
        } else {
            let (h, tl) = t_inv.split_at_mut(src);
            (&mut tl[0], &h[dst])
        };
        row_add(a, b, &negf);
    };
    let col_swap = |m: &mut Vec<Row>, t: &mut Vec<Row>, t_inv: &mut Vec<Row>, i: usize, j: usize| {
        if i == j {
            return;
        }
        for r in m.iter_mut() {
            r.swap(i, j);
        }
        for r in t.iter_mut() {
            r.swap(i, j);
        }
        t_inv.swap(i, j);
    };
    let col_neg = |m: &mut Vec<Row>, t: &mut Vec<Row>, t_inv: &mut Vec<Row>, i: usize| {
        for r in m.iter_mut() {
            r[i] = -std::mem::take(&mut r[i]);
        }
        for r in t.iter_mut() {
            r[i] = -std::mem::take(&mut r[i]);
        }
        row_neg(&mut t_inv[i]);
    };

    let mut k = 0usize;
    while k < rows.min(width) {
        // Find a nonzero entry at or after (k, k).
        let mut found = None;
        'search: for i in k..rows {
            for j in k..width {
                if !m[i][j].is_zero() {
                    found = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = found else { break };
        swap_rows(&mut m, k, pi);
        col_swap(&mut m, &mut t, &mut t_inv, k, pj);
        loop {
            // Clear column k below the pivot by row ops.
            for i in k + 1..rows {
                while !m[i][k].is_zero() {
                    let q = &m[i][k] / &m[k][k];
                    if !q.is_zero() {
                        let negq = -q;
                        let (head, tail) = m.split_at_mut(i);
                        row_add(&mut tail[0], &head[k], &negq);
                    }
                    if !m[i][k].is_zero() {
                        swap_rows(&mut m, k, i);
                    }
                }
            }
            // Clear row k after the pivot by column ops.
            let mut row_clear = true;
            for j in k + 1..width {
                while !m[k][j].is_zero() {
                    let q = &m[k][j] / &m[k][k];
                    if !q.is_zero() {
                        col_add(&mut m, &mut t, &mut t_inv, j, k, &-q);
                    }
                    if !m[k][j].is_zero() {
                        col_swap(&mut m, &mut t, &mut t_inv, j, k);
                        row_clear = false;
                    }
                }
            }
            // Column ops may have reintroduced entries below the pivot.
            if row_clear && (k + 1..rows).all(|i| m[i][k].is_zero()) {
                break;
            }
        }
        if m[k][k].is_negative() {
            col_neg(&mut m, &mut t, &mut t_inv, k);
        }
        k += 1;
    }
    // Fix divisibility d_i | d_{i+1}.
    let rank = k;
    loop {
        let mut stable = true;
        for i in 0..rank.saturating_sub(1) {
            let (a, b) = (m[i][i].clone(), m[i + 1][i + 1].clone());
            if a.is_zero() || (&b % &a).is_zero() {
                continue;
            }
            stable = false;
            // Standard 2x2 SNF step on the diagonal block (i, i+1).
            col_add(&mut m, &mut t, &mut t_inv, i, i + 1, &Int::one());
            loop {
                for r in i + 1..i + 2 {
                    while !m[r][i].is_zero() {
                        let q = &m[r][i] / &m[i][i];
                        if !q.is_zero() {
                            let negq = -q;
                            let (head, tail) = m.split_at_mut(r);
                            row_add(&mut tail[0], &head[i], &negq);
                        }
                        if !m[r][i].is_zero() {
                            swap_rows(&mut m, i, r);
                        }
                    }
                }
                let mut clear = true;
                for j in i + 1..i + 2 {
                    while !m[i][j].is_zero() {
                        let q = &m[i][j] / &m[i][i];
                        if !q.is_zero() {
                            col_add(&mut m, &mut t, &mut t_inv, j, i, &-q);
                        }
                        if !m[i][j].is_zero() {
                            col_swap(&mut m, &mut t, &mut t_inv, j, i);
                            clear = false;
                        }
                    }
                }
                if clear && m[i + 1][i].is_zero() {
                    break;
                }
            }
            if m[i][i].is_negative() {
                col_neg(&mut m, &mut t, &mut t_inv, i);
            }
            if m[i + 1][i + 1].is_negative() {
                col_neg(&mut m, &mut t, &mut t_inv, i + 1);
            }
        }
        if stable {
            break;
        }
    }
    let mut d = vec![Int::zero(); width];
    for i in 0..rank {
        d[i] = m[i][i].clone();
    }
    (d, t, t_inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Row> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn hnf_standard_example() {
        let h = hnf(&m(&[&[2, 0], &[0, 2], &[1, 1]]), 2);
        assert_eq!(h, m(&[&[1, 1], &[0, 2]]));
    }

    #[test]
    fn hnf_identity_fixed() {
        let id = identity(3);
        assert_eq!(hnf(&id, 3), id);
    }

    #[test]
    fn hnf_gcd_column() {
        let h = hnf(&m(&[&[4], &[6]]), 1);
        assert_eq!(h, m(&[&[2]]));
    }

    #[test]
    fn transform_reconstructs_hnf() {
        let a = m(&[&[3, 1, 2], &[0, 4, 1], &[6, 6, 6], &[3, 5, 3]]);
        let (h, u) = hnf_with_transform(&a, 3);
        for (i, hrow) in h.iter().enumerate() {
            assert_eq!(&apply(&u[i], &a), hrow);
        }
        for urow in &u[h.len()..] {
            assert!(is_zero_row(&apply(urow, &a)));
        }
    }

    #[test]
    fn kernel_of_projection() {
        // rows (1,0),(0,1),(1,1): kernel spanned by (1,1,-1)
        let k = left_kernel(&m(&[&[1, 0], &[0, 1], &[1, 1]]), 2);
        assert_eq!(k, m(&[&[1, 1, -1]]));
    }

    #[test]
    fn express_roundtrip() {
        let rows = m(&[&[2, 1], &[0, 3]]);
        let v: Row = vec![int(4), int(8)];
        let c = express_in_rows(&rows, 2, &v).unwrap();
        assert_eq!(apply(&c, &rows), v);
        assert!(express_in_rows(&rows, 2, &[int(1), int(0)]).is_none());
    }

    #[test]
    fn smith_of_transfer_image() {
        // Z^2 / <(2,0),(0,3)> has invariant factors 1? no: d = (2,3) -> (1,6).
        let (d, t, t_inv) = smith_diagonal(&m(&[&[2, 0], &[0, 3]]), 2);
        assert_eq!(d, vec![int(1), int(6)]);
        assert!(mat_eq_identity(&mat_mul(&t, &t_inv)));
    }
}
