//! Smith normal form of sparse integer matrices.
//!
//! Entries are exact integers that live in an `i64` until an operation would
//! overflow and are promoted to `BigInt` from then on. Elimination works on
//! sparse columns with a row-support index:
//!
//! 1. pick a pivot of minimal absolute value (ties: fewest entries in its row),
//! 2. reduce every other entry of the pivot row by column operations,
//! 3. reduce the pivot column modulo the pivot (row operations; since the
//!    pivot row is now clear they only touch the pivot column),
//! 4. if a nonzero remainder is left anywhere, it becomes the next pivot,
//!    otherwise the pivot is split off as a diagonal entry.
//!
//! The diagonal is finally brought into divisibility order by replacing
//! pairs with their gcd and lcm.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact integer with an inline fast path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Int {
    Small(i64),
    Big(BigInt),
}

impl Int {
    fn normalize(b: BigInt) -> Int {
        match b.to_i64() {
            Some(v) => Int::Small(v),
            None => Int::Big(b),
        }
    }

    fn to_big(&self) -> BigInt {
        match self {
            Int::Small(v) => BigInt::from(*v),
            Int::Big(b) => b.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Int::Small(0))
    }

    fn is_unit(&self) -> bool {
        matches!(self, Int::Small(1) | Int::Small(-1))
    }

    fn cmp_abs(&self, other: &Int) -> Ordering {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => a.unsigned_abs().cmp(&b.unsigned_abs()),
            _ => self.to_big().magnitude().cmp(other.to_big().magnitude()),
        }
    }

    fn abs_big(&self) -> BigUint {
        match self {
            Int::Small(v) => BigUint::from(v.unsigned_abs()),
            Int::Big(b) => b.magnitude().clone(),
        }
    }

    /// `self − q·x`.
    fn sub_mul(&self, q: &Int, x: &Int) -> Int {
        if let (Int::Small(a), Int::Small(q), Int::Small(x)) = (self, q, x) {
            if let Some(v) = q.checked_mul(*x).and_then(|p| a.checked_sub(p)) {
                return Int::Small(v);
            }
        }
        Int::normalize(self.to_big() - q.to_big() * x.to_big())
    }

    /// Quotient rounded to nearest, so the remainder has absolute value at
    /// most `|p|/2`.
    fn div_round(&self, p: &Int) -> Int {
        // nearest integer to a/p is floor((2·a·sgn(p) + |p|) / (2|p|))
        if let (Int::Small(a), Int::Small(p)) = (self, p) {
            let (a, p) = (*a as i128, *p as i128);
            let q = (2 * a * p.signum() + p.abs()).div_euclid(2 * p.abs());
            return Int::normalize(BigInt::from(q));
        }
        let (a, p) = (self.to_big(), p.to_big());
        let num = BigInt::from(2) * a * p.signum() + p.abs();
        Int::normalize(num.div_floor(&(BigInt::from(2) * p.abs())))
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Self {
        Int::Small(v)
    }
}

impl From<BigInt> for Int {
    fn from(v: BigInt) -> Self {
        Int::normalize(v)
    }
}

/// Column-sparse integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    /// Each column sorted by row index, no explicit zeros.
    cols: Vec<Vec<(usize, Int)>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols: vec![Vec::new(); cols],
        }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged matrix");
        let cols = (0..n_cols)
            .map(|j| {
                (0..n_rows)
                    .filter(|&i| rows[i][j] != 0)
                    .map(|i| (i, Int::Small(rows[i][j])))
                    .collect()
            })
            .collect();
        IntMatrix { rows: n_rows, cols }
    }

    pub fn from_dense_big(rows: &[Vec<BigInt>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged matrix");
        let cols = (0..n_cols)
            .map(|j| {
                (0..n_rows)
                    .filter(|&i| !rows[i][j].is_zero())
                    .map(|i| (i, Int::from(rows[i][j].clone())))
                    .collect()
            })
            .collect();
        IntMatrix { rows: n_rows, cols }
    }

    /// Columns given as `(row, value)` lists sorted by row.
    pub fn from_sparse_columns(rows: usize, columns: Vec<Vec<(usize, i64)>>) -> Self {
        let cols = columns
            .into_iter()
            .map(|c| {
                debug_assert!(c.windows(2).all(|w| w[0].0 < w[1].0));
                debug_assert!(c.iter().all(|e| e.0 < rows));
                c.into_iter().filter(|e| e.1 != 0).map(|(i, v)| (i, Int::Small(v))).collect()
            })
            .collect();
        IntMatrix { rows, cols }
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        match self.cols[j].binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.cols[j][k].1.to_big(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.n_cols()]; self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                d[*i][j] = v.to_big();
            }
        }
        d
    }

    /// Dense `i64` copy; panics if an entry does not fit.
    pub fn to_dense_i64(&self) -> Vec<Vec<i64>> {
        self.to_dense()
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.to_i64().expect("entry exceeds i64")).collect())
            .collect()
    }

    /// Matrix product, used to check `∂∘∂ = 0`.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n_cols(), other.rows, "dimension mismatch");
        let cols = other
            .cols
            .iter()
            .map(|ocol| {
                let mut acc: std::collections::BTreeMap<usize, BigInt> = Default::default();
                for (k, w) in ocol {
                    let w = w.to_big();
                    for (i, v) in &self.cols[*k] {
                        *acc.entry(*i).or_insert_with(BigInt::zero) += v.to_big() * &w;
                    }
                }
                acc.into_iter()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(i, v)| (i, Int::from(v)))
                    .collect()
            })
            .collect();
        IntMatrix { rows: self.rows, cols }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// `d₁ | d₂ | … | d_r`, all positive.
    pub invariant_factors: Vec<BigUint>,
    pub rank: usize,
}

impl SmithForm {
    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigUint> {
        self.invariant_factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

struct Elimination {
    cols: Vec<Vec<(usize, Int)>>,
    /// Columns with a nonzero entry in each row.
    row_support: Vec<BTreeSet<usize>>,
    diagonal: Vec<BigUint>,
}

impl Elimination {
    fn new(m: &IntMatrix) -> Self {
        let mut row_support = vec![BTreeSet::new(); m.rows];
        for (j, col) in m.cols.iter().enumerate() {
            for (i, _) in col {
                row_support[*i].insert(j);
            }
        }
        Elimination {
            cols: m.cols.clone(),
            row_support,
            diagonal: Vec::new(),
        }
    }

    fn entry(&self, i: usize, j: usize) -> Option<&Int> {
        let col = &self.cols[j];
        col.binary_search_by_key(&i, |e| e.0).ok().map(|k| &col[k].1)
    }

    /// `col_j ← col_j − q·col_c`, keeping the row index in sync.
    fn column_axpy(&mut self, j: usize, q: &Int, c: usize) {
        let target = std::mem::take(&mut self.cols[j]);
        let source = &self.cols[c];
        let mut out = Vec::with_capacity(target.len() + source.len());
        let (mut a, mut b) = (target.into_iter().peekable(), source.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((ia, _)), Some((ib, _))) if ia < ib => out.push(a.next().unwrap()),
                (Some((ia, _)), Some((ib, _))) if ia > ib => {
                    let (i, v) = b.next().unwrap();
                    out.push((*i, Int::Small(0).sub_mul(q, v)));
                    self.row_support[*i].insert(j);
                }
                (Some(_), Some(_)) => {
                    let (i, x) = a.next().unwrap();
                    let (_, v) = b.next().unwrap();
                    let y = x.sub_mul(q, v);
                    if y.is_zero() {
                        self.row_support[i].remove(&j);
                    } else {
                        out.push((i, y));
                    }
                }
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, Some(_)) => {
                    let (i, v) = b.next().unwrap();
                    out.push((*i, Int::Small(0).sub_mul(q, v)));
                    self.row_support[*i].insert(j);
                }
                (None, None) => break,
            }
        }
        self.cols[j] = out;
    }

    fn remove_column(&mut self, c: usize) {
        for (i, _) in std::mem::take(&mut self.cols[c]) {
            self.row_support[i].remove(&c);
        }
    }

    /// Smallest entry (fewest row companions on ties) over the given columns.
    fn best_in<I: Iterator<Item = usize>>(&self, columns: I) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, &Int, usize)> = None;
        for j in columns {
            for (i, v) in &self.cols[j] {
                let support = self.row_support[*i].len();
                let better = match best {
                    None => true,
                    Some((_, _, bv, bs)) => match v.cmp_abs(bv) {
                        Ordering::Less => true,
                        Ordering::Equal => support < bs,
                        Ordering::Greater => false,
                    },
                };
                if better {
                    best = Some((*i, j, v, support));
                }
            }
        }
        best.map(|(i, j, _, _)| (i, j))
    }

    fn unit_in_column(&self, j: usize) -> Option<usize> {
        self.cols[j]
            .iter()
            .filter(|(_, v)| v.is_unit())
            .min_by_key(|(i, _)| self.row_support[*i].len())
            .map(|(i, _)| *i)
    }

    /// Eliminates from pivot `(r, c)` until it splits off, following the
    /// pivot wherever a smaller remainder appears.
    fn pivot_from(&mut self, mut r: usize, mut c: usize) {
        loop {
            let p = self.entry(r, c).expect("pivot is nonzero").clone();
            // clear the pivot row with column operations
            let others: Vec<usize> = self.row_support[r].iter().copied().filter(|&j| j != c).collect();
            for &j in &others {
                let a = self.entry(r, j).expect("row support is exact").clone();
                let q = a.div_round(&p);
                if !q.is_zero() {
                    self.column_axpy(j, &q, c);
                }
            }
            let row_remainder = self.row_support[r]
                .iter()
                .copied()
                .filter(|&j| j != c)
                .min_by(|&x, &y| self.entry(r, x).unwrap().cmp_abs(self.entry(r, y).unwrap()));
            if let Some(j) = row_remainder {
                c = j;
                continue;
            }
            // reduce the pivot column modulo p; only column c changes
            let mut col = std::mem::take(&mut self.cols[c]);
            col.retain_mut(|(i, v)| {
                if *i == r {
                    return true;
                }
                let q = v.div_round(&p);
                let rem = v.sub_mul(&q, &p);
                if rem.is_zero() {
                    self.row_support[*i].remove(&c);
                    false
                } else {
                    *v = rem;
                    true
                }
            });
            let col_remainder = col
                .iter()
                .filter(|(i, _)| *i != r)
                .min_by(|x, y| x.1.cmp_abs(&y.1))
                .map(|(i, _)| *i);
            self.cols[c] = col;
            if let Some(i) = col_remainder {
                r = i;
                continue;
            }
            self.diagonal.push(p.abs_big());
            self.remove_column(c);
            return;
        }
    }

    fn run(mut self) -> SmithForm {
        loop {
            // unit pivots first, column by column
            for c in 0..self.cols.len() {
                while !self.cols[c].is_empty() {
                    match self.unit_in_column(c) {
                        Some(r) => self.pivot_from(r, c),
                        None => break,
                    }
                }
            }
            let active: Vec<usize> = (0..self.cols.len()).filter(|&j| !self.cols[j].is_empty()).collect();
            match self.best_in(active.into_iter()) {
                Some((r, c)) => self.pivot_from(r, c),
                None => break,
            }
        }
        let rank = self.diagonal.len();
        SmithForm {
            invariant_factors: divisibility_chain(self.diagonal),
            rank,
        }
    }
}

/// Rewrites a diagonal into `d₁ | d₂ | …` with the same Smith form by
/// replacing pairs with their gcd and lcm.
fn divisibility_chain(diag: Vec<BigUint>) -> Vec<BigUint> {
    let ones = diag.iter().filter(|d| d.is_one()).count();
    let mut rest: Vec<BigUint> = diag.into_iter().filter(|d| !d.is_one()).collect();
    for i in 0..rest.len() {
        for j in i + 1..rest.len() {
            if (&rest[j] % &rest[i]).is_zero() {
                continue;
            }
            let g = rest[i].gcd(&rest[j]);
            let l = &rest[i] / &g * &rest[j];
            rest[i] = g;
            rest[j] = l;
        }
    }
    let mut out = vec![BigUint::one(); ones];
    out.extend(rest);
    debug_assert!(out.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
    out
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    Elimination::new(m).run()
}

/// Rank over the integers (equivalently over `Q`).
pub fn rank(m: &IntMatrix) -> usize {
    smith_normal_form(m).rank
}
