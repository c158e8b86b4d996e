//! Dense linear algebra over `Rat` and over the integers.
//!
//! Everything here is Gaussian elimination on small matrices; there is no
//! pivoting strategy beyond "first nonzero", which is fine for exact
//! arithmetic.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rat::{IntVector, Rat, RatVector};

/// Reduced row echelon form in place. Returns the pivot columns; rows past
/// the rank are zero and are truncated.
pub fn rref(m: &mut Vec<RatVector>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row >= m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r != row && !other[col].is_zero() {
                let f = other[col].clone();
                for (x, y) in other.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    pivots
}

pub fn rank(rows: &[RatVector]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of the row space (rref rows).
pub fn row_basis(rows: &[RatVector], ncols: usize) -> Vec<RatVector> {
    let mut m = rows.to_vec();
    rref(&mut m, ncols);
    m
}

/// Basis of `{x : rows · x = 0}`.
pub fn nullspace(rows: &[RatVector], ncols: usize) -> Vec<RatVector> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); ncols];
            v[f] = Rat::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Coefficients `c` with `Σ c_i basis_i = target`, if any.
pub fn solve_in_span(basis: &[RatVector], target: &[Rat]) -> Option<RatVector> {
    let n = target.len();
    let k = basis.len();
    // augmented system: columns are basis vectors, last column target
    let mut m: Vec<RatVector> = (0..n)
        .map(|i| {
            let mut row: RatVector = basis.iter().map(|b| b[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut m, k + 1);
    if pivots.contains(&k) {
        return None;
    }
    let mut c = vec![Rat::zero(); k];
    for (r, &pc) in pivots.iter().enumerate() {
        c[pc] = m[r][k].clone();
    }
    Some(c)
}

pub fn det(mat: &[RatVector]) -> Rat {
    let n = mat.len();
    let mut m = mat.to_vec();
    let mut d = Rat::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rat::zero();
        };
        if p != col {
            m.swap(p, col);
            d = -d;
        }
        let piv = m[col][col].clone();
        d *= &piv;
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let f = &m[r][col] / &piv;
                let prow = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
    }
    d
}

pub fn transpose(m: &[RatVector], ncols: usize) -> Vec<RatVector> {
    (0..ncols)
        .map(|c| m.iter().map(|row| row[c].clone()).collect())
        .collect()
}

pub fn mat_vec(m: &[RatVector], v: &[Rat]) -> RatVector {
    m.iter().map(|row| crate::rat::dot(row, v)).collect()
}

/// Smallest positive integer multiple of a rational vector that is integral,
/// divided by the gcd of its entries.
pub fn primitive_integer(v: &[Rat]) -> IntVector {
    let l = v
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<num_bigint::BigInt> = v.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    let g = ints
        .iter()
        .fold(num_bigint::BigInt::zero(), |acc, x| acc.gcd(x));
    ints.iter()
        .map(|x| {
            let y = if g.is_zero() { x.clone() } else { x / &g };
            i64::try_from(y).expect("lattice vector entry exceeds i64")
        })
        .collect()
}

pub fn primitive(v: &[i64]) -> IntVector {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

/// Extended gcd: returns `(g, s, t)` with `s a + t b = g >= 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

fn to_i64(v: &[i128]) -> IntVector {
    v.iter()
        .map(|&x| i64::try_from(x).expect("lattice vector entry exceeds i64"))
        .collect()
}

/// Row Hermite normal form of the lattice generated by `gens`: echelon,
/// positive pivots, entries above each pivot reduced into `[0, pivot)`.
/// Zero rows are dropped.
pub fn hnf(gens: &[IntVector], ncols: usize) -> Vec<IntVector> {
    let mut m: Vec<Vec<i128>> = gens
        .iter()
        .map(|g| g.iter().map(|&x| x as i128).collect())
        .collect();
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..ncols {
        if row >= m.len() {
            break;
        }
        // gcd-combine all rows below into `row`
        for r in row + 1..m.len() {
            if m[r][col] == 0 {
                continue;
            }
            let a = m[row][col];
            let b = m[r][col];
            let (g, s, t) = ext_gcd(a, b);
            let (ag, bg) = (a / g, b / g);
            let top: Vec<i128> = (0..ncols).map(|c| s * m[row][c] + t * m[r][c]).collect();
            let bottom: Vec<i128> = (0..ncols).map(|c| -bg * m[row][c] + ag * m[r][c]).collect();
            m[row] = top;
            m[r] = bottom;
        }
        if m[row][col] == 0 {
            continue;
        }
        if m[row][col] < 0 {
            for x in m[row].iter_mut() {
                *x = -*x;
            }
        }
        let p = m[row][col];
        for r in 0..row {
            let f = m[r][col].div_euclid(p);
            if f != 0 {
                for c in 0..ncols {
                    m[r][c] -= f * m[row][c];
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    m.iter().map(|r| to_i64(r)).collect()
}

/// Basis of `{x ∈ Z^n : A x = 0}` in Hermite normal form.
pub fn integer_kernel(a: &[IntVector], ncols: usize) -> Vec<IntVector> {
    let nrows = a.len();
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    // columns of u track the column operations applied to m
    let mut u: Vec<Vec<i128>> = (0..ncols)
        .map(|i| (0..ncols).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut c = 0;
    for r in 0..nrows {
        if c >= ncols {
            break;
        }
        for j in c + 1..ncols {
            if m[r][j] == 0 {
                continue;
            }
            let a0 = m[r][c];
            let b0 = m[r][j];
            let (g, s, t) = ext_gcd(a0, b0);
            let (ag, bg) = (a0 / g, b0 / g);
            for row in m.iter_mut() {
                let (x, y) = (row[c], row[j]);
                row[c] = s * x + t * y;
                row[j] = -bg * x + ag * y;
            }
            for row in u.iter_mut() {
                let (x, y) = (row[c], row[j]);
                row[c] = s * x + t * y;
                row[j] = -bg * x + ag * y;
            }
        }
        if m[r][c] != 0 {
            c += 1;
        }
    }
    let kernel: Vec<IntVector> = (c..ncols)
        .map(|j| to_i64(&u.iter().map(|row| row[j]).collect::<Vec<_>>()))
        .collect();
    hnf(&kernel, ncols)
}

/// Basis (in HNF) of `span(vectors) ∩ Z^n`.
pub fn saturated_lattice(vectors: &[RatVector], n: usize) -> Vec<IntVector> {
    let basis = row_basis(vectors, n);
    if basis.is_empty() {
        return Vec::new();
    }
    let complement = nullspace(&basis, n);
    if complement.is_empty() {
        return (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
    }
    let rows: Vec<IntVector> = complement.iter().map(|v| primitive_integer(v)).collect();
    integer_kernel(&rows, n)
}

/// Reduces `u` modulo the lattice with HNF basis `h`.
pub fn reduce_mod_hnf(u: &[i64], h: &[IntVector]) -> IntVector {
    let mut out = u.to_vec();
    for row in h {
        let Some(pc) = row.iter().position(|&x| x != 0) else {
            continue;
        };
        let f = out[pc].div_euclid(row[pc]);
        if f != 0 {
            for (o, r) in out.iter_mut().zip(row) {
                *o -= f * r;
            }
        }
    }
    out
}

/// `|det|` of the lattice generated by integer rows inside its saturation,
/// i.e. the index `[sat : L]`. Rows must be independent.
pub fn lattice_index(rows: &[IntVector], n: usize) -> Rat {
    let rv: Vec<RatVector> = rows.iter().map(|r| crate::rat::to_rat_vec(r)).collect();
    let sat = saturated_lattice(&rv, n);
    let sat_rv: Vec<RatVector> = sat.iter().map(|r| crate::rat::to_rat_vec(r)).collect();
    // coordinates of rows in the saturated basis
    let coords: Vec<RatVector> = rv
        .iter()
        .map(|r| solve_in_span(&sat_rv, r).expect("row outside its own span"))
        .collect();
    det(&coords).abs()
}
