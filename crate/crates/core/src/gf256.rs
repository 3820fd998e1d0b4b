//! Arithmetic in GF(2^8) and dense matrices over it.
//!
//! Elements are bytes read as polynomials over GF(2) of degree < 8. Addition
//! is XOR. Multiplication is reduced modulo [`POLYNOMIAL`] and is evaluated
//! through log/antilog tables built at compile time with generator `x` (0x02).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Sub};

use rand::Rng;

use crate::error::{Error, Result};

/// Irreducible reduction polynomial x^8 + x^4 + x^3 + x^2 + 1.
pub const POLYNOMIAL: u16 = 0x11D;

const fn build_tables() -> ([u8; 256], [u8; 512]) {
    let mut log = [0u8; 256];
    let mut exp = [0u8; 512];
    let mut x: u16 = 1;
    let mut i = 0;
    while i < 255 {
        exp[i] = x as u8;
        exp[i + 255] = x as u8;
        log[x as usize] = i as u8;
        x <<= 1;
        if x & 0x100 != 0 {
            x ^= POLYNOMIAL;
        }
        i += 1;
    }
    (log, exp)
}

const TABLES: ([u8; 256], [u8; 512]) = build_tables();
static LOG: [u8; 256] = TABLES.0;
static EXP: [u8; 512] = TABLES.1;

/// An element of GF(2^8).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
#[repr(transparent)]
pub struct Gf256(pub u8);

impl Gf256 {
    pub const ZERO: Self = Self(0);
    pub const ONE: Self = Self(1);

    #[inline]
    pub const fn new(v: u8) -> Self {
        Self(v)
    }

    #[inline]
    pub const fn value(self) -> u8 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Multiplicative inverse, `None` for zero.
    #[inline]
    pub fn inv(self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(Self(EXP[255 - LOG[self.0 as usize] as usize]))
        }
    }

    /// Uniform draw over all 256 elements.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self(rng.random())
    }
}

impl fmt::Debug for Gf256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#04x}", self.0)
    }
}

impl From<u8> for Gf256 {
    fn from(v: u8) -> Self {
        Self(v)
    }
}

impl Add for Gf256 {
    type Output = Self;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Self) -> Self {
        Self(self.0 ^ rhs.0)
    }
}

impl AddAssign for Gf256 {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: Self) {
        self.0 ^= rhs.0;
    }
}

impl Sub for Gf256 {
    type Output = Self;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 ^ rhs.0)
    }
}

impl Mul for Gf256 {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        if self.0 == 0 || rhs.0 == 0 {
            return Self::ZERO;
        }
        Self(EXP[LOG[self.0 as usize] as usize + LOG[rhs.0 as usize] as usize])
    }
}

impl MulAssign for Gf256 {
    #[inline]
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Div for Gf256 {
    type Output = Self;
    /// Panics on division by zero.
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv().expect("division by zero in GF(256)")
    }
}

/// `dst += c * src`, element-wise.
#[inline]
pub fn axpy(dst: &mut [Gf256], c: Gf256, src: &[Gf256]) {
    debug_assert_eq!(dst.len(), src.len());
    if c.is_zero() {
        return;
    }
    if c == Gf256::ONE {
        for (d, s) in dst.iter_mut().zip(src) {
            *d += *s;
        }
        return;
    }
    let lc = LOG[c.0 as usize] as usize;
    for (d, s) in dst.iter_mut().zip(src) {
        if s.0 != 0 {
            d.0 ^= EXP[lc + LOG[s.0 as usize] as usize];
        }
    }
}

/// Dense row-major matrix over GF(2^8).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Gf256>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FieldMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| format!("{:02x}", v.0)).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Gf256::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Gf256::ONE;
        }
        m
    }

    pub fn from_rows<R: AsRef<[Gf256]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_bytes(rows: usize, cols: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} bytes for a {rows}x{cols} matrix",
                bytes.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            data: bytes.iter().copied().map(Gf256).collect(),
        })
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        Self {
            rows,
            cols,
            data: (0..rows * cols).map(|_| Gf256::random(rng)).collect(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Gf256] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [Gf256] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * self.cols);
        head[lo * self.cols..(lo + 1) * self.cols].swap_with_slice(&mut tail[..self.cols]);
    }

    pub fn scale_row(&mut self, r: usize, c: Gf256) {
        for v in self.row_mut(r) {
            *v *= c;
        }
    }

    /// `row[dst] += c * row[src]`.
    fn add_scaled_row(&mut self, dst: usize, src: usize, c: Gf256) {
        debug_assert_ne!(dst, src);
        let cols = self.cols;
        let (d, s) = if dst < src {
            let (head, tail) = self.data.split_at_mut(src * cols);
            (&mut head[dst * cols..(dst + 1) * cols], &tail[..cols])
        } else {
            let (head, tail) = self.data.split_at_mut(dst * cols);
            (&mut tail[..cols], &head[src * cols..(src + 1) * cols])
        };
        axpy(d, c, s);
    }

    /// Submatrix built from the given row indices, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for (j, &c) in self.row(i).iter().enumerate() {
                let src = rhs.row(j);
                axpy(out.row_mut(i), c, src);
            }
        }
        Ok(out)
    }

    /// Row rank via Gaussian elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.forward_eliminate(None)
    }

    /// Reduces `self` (and `rhs` alongside, if given) to reduced row echelon
    /// form and returns the rank. Pivot rows are moved to the top.
    fn forward_eliminate(&mut self, mut rhs: Option<&mut FieldMatrix>) -> usize {
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(pivot) = (rank..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(rank, pivot);
            if let Some(b) = rhs.as_deref_mut() {
                b.swap_rows(rank, pivot);
            }
            let inv = self[(rank, col)].inv().expect("pivot is nonzero");
            self.scale_row(rank, inv);
            if let Some(b) = rhs.as_deref_mut() {
                b.scale_row(rank, inv);
            }
            for r in 0..self.rows {
                if r == rank {
                    continue;
                }
                let f = self[(r, col)];
                if !f.is_zero() {
                    self.add_scaled_row(r, rank, f);
                    if let Some(b) = rhs.as_deref_mut() {
                        b.add_scaled_row(r, rank, f);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Solves `self · X = rhs` for `X`.
    ///
    /// `self` may have more rows than columns as long as its column rank is
    /// full; surplus rows are assumed consistent and dropped.
    pub fn solve(&self, rhs: &FieldMatrix) -> Result<FieldMatrix> {
        if rhs.rows != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "coefficients have {} rows, right-hand side {}",
                self.rows, rhs.rows
            )));
        }
        let mut a = self.clone();
        let mut b = rhs.clone();
        let rank = a.forward_eliminate(Some(&mut b));
        if rank < self.cols {
            return Err(Error::SingularMatrix {
                rank,
                required: self.cols,
            });
        }
        b.data.truncate(self.cols * b.cols);
        b.rows = self.cols;
        Ok(b)
    }

    pub fn inverse(&self) -> Result<FieldMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "inverse of non-square {}x{}",
                self.rows, self.cols
            )));
        }
        self.solve(&FieldMatrix::identity(self.rows))
    }
}

impl std::ops::Index<(usize, usize)> for FieldMatrix {
    type Output = Gf256;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Gf256 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for FieldMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Gf256 {
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::gf_mul_reference;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn addition_examples() {
        assert_eq!(Gf256(0x00) + Gf256(0x57), Gf256(0x57));
        assert_eq!(Gf256(0x57) + Gf256(0x57), Gf256(0x00));
        assert_eq!(Gf256(0x53) + Gf256(0xCA), Gf256(0x99));
    }

    #[test]
    fn multiplication_matches_reference_table() {
        let table: Vec<u8> = (0..=255u8)
            .flat_map(|a| (0..=255u8).map(move |b| gf_mul_reference(a, b)))
            .collect();
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                assert_eq!(
                    (Gf256(a) * Gf256(b)).0,
                    table[a as usize * 256 + b as usize],
                    "{a:#x} * {b:#x}"
                );
            }
        }
    }

    #[test]
    fn identities_and_inverses() {
        for x in 0..=255u8 {
            assert_eq!(Gf256::ONE * Gf256(x), Gf256(x));
            assert_eq!(Gf256::ZERO * Gf256(x), Gf256::ZERO);
        }
        assert_eq!(Gf256::ZERO.inv(), None);
        for a in 1..=255u8 {
            let inv = Gf256(a).inv().unwrap();
            assert_eq!(Gf256(a) * inv, Gf256::ONE);
        }
    }

    #[test]
    fn log_table_is_a_bijection() {
        let mut seen = [false; 256];
        for &v in &EXP[..255] {
            assert!(!seen[v as usize]);
            seen[v as usize] = true;
        }
        assert!(!seen[0]);
    }

    proptest! {
        #[test]
        fn field_axioms(a: u8, b: u8, c: u8) {
            let (a, b, c) = (Gf256(a), Gf256(b), Gf256(c));
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a * (b + c), a * b + a * c);
            prop_assert_eq!(a * b, b * a);
            prop_assert_eq!((a + b) + c, a + (b + c));
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(FieldMatrix::identity(5).rank(), 5);
        assert_eq!(FieldMatrix::zeros(4, 4).rank(), 0);

        let rows = [
            [Gf256(1), Gf256(2), Gf256(3), Gf256(4)],
            [Gf256(0), Gf256(1), Gf256(7), Gf256(9)],
            [Gf256(1), Gf256(2), Gf256(3), Gf256(4)],
            [Gf256(0), Gf256(0), Gf256(0), Gf256(5)],
        ];
        let m = FieldMatrix::from_rows(&rows).unwrap();
        assert_eq!(m.rank(), 3);
    }

    #[test]
    fn rank_invariant_under_row_operations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let rows = rng.random_range(1..7);
            let cols = rng.random_range(1..7);
            let mut m = FieldMatrix::random(rows, cols, &mut rng);
            // Force some dependence now and then.
            if rows > 2 && rng.random_bool(0.5) {
                let src = m.row(0).to_vec();
                m.row_mut(1).copy_from_slice(&src);
            }
            let r0 = m.rank();
            assert!(r0 <= rows.min(cols));
            let a = rng.random_range(0..rows);
            let b = rng.random_range(0..rows);
            m.swap_rows(a, b);
            assert_eq!(m.rank(), r0);
            let c = Gf256(rng.random_range(1..=255));
            m.scale_row(a, c);
            assert_eq!(m.rank(), r0);
        }
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = FieldMatrix::random(4, 8, &mut rng);
        assert_eq!(FieldMatrix::identity(4).solve(&r).unwrap(), r);
    }

    #[test]
    fn solve_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut checked = 0;
        while checked < 500 {
            let k = rng.random_range(1..=10);
            let a = FieldMatrix::random(k, k, &mut rng);
            if a.rank() < k {
                continue;
            }
            let x = FieldMatrix::random(k, 8, &mut rng);
            let b = a.mul(&x).unwrap();
            assert_eq!(a.solve(&b).unwrap(), x);
            let inv = a.inverse().unwrap();
            assert_eq!(inv.mul(&a).unwrap(), FieldMatrix::identity(k));
            checked += 1;
        }
    }

    #[test]
    fn solve_singular_fails() {
        let rows = [[Gf256(3), Gf256(5)], [Gf256(3), Gf256(5)]];
        let a = FieldMatrix::from_rows(&rows).unwrap();
        let b = FieldMatrix::zeros(2, 8);
        assert_eq!(
            a.solve(&b),
            Err(Error::SingularMatrix {
                rank: 1,
                required: 2
            })
        );
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = FieldMatrix::zeros(2, 3);
        assert!(matches!(a.mul(&a), Err(Error::DimensionMismatch(_))));
        assert!(FieldMatrix::from_rows(&[vec![Gf256(1)], vec![]]).is_err());
    }
}
