//! Arithmetic in the binary extension field GF(2^n), 1 ≤ n ≤ 8.
//!
//! Elements use the integer representation: bit `i` of the value is the
//! coefficient of `x^i` in the residue polynomial. Addition is XOR and
//! multiplication is carry-less polynomial multiplication reduced modulo a
//! fixed monic irreducible polynomial.
//!
//! The reduction polynomials are:
//!
//! | n | polynomial            | mask        |
//! |---|-----------------------|-------------|
//! | 1 | x + 1                 | `0b11`      |
//! | 2 | x² + x + 1            | `0b111`     |
//! | 3 | x³ + x + 1            | `0b1011`    |
//! | 4 | x⁴ + x + 1            | `0b10011`   |
//! | 5 | x⁵ + x² + 1           | `0b100101`  |
//! | 6 | x⁶ + x + 1            | `0b1000011` |
//! | 7 | x⁷ + x + 1            | `0b10000011`|
//! | 8 | x⁸ + x⁴ + x³ + x + 1  | `0x11b`     |
//!
//! For n = 1 the polynomial never triggers a reduction, so the field is F₂
//! with XOR/AND and every downstream formula holds unchanged.

use std::fmt;
use std::ops::{Add, BitXor};

use crate::error::{Error, Result};

pub const MAX_FIELD_DEGREE: u32 = 8;

const IRREDUCIBLE: [u32; 9] = [
    0, 0b11, 0b111, 0b1011, 0b10011, 0b100101, 0b1000011, 0b10000011, 0x11b,
];

/// An element of GF(2^n) in integer representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GfElement(u32);

impl GfElement {
    pub const ZERO: GfElement = GfElement(0);
    pub const ONE: GfElement = GfElement(1);

    pub fn value(self) -> u32 {
        self.0
    }

    /// Coefficient of `x^i`.
    pub fn bit(self, i: u32) -> u32 {
        (self.0 >> i) & 1
    }

    /// `(-1)^a`, which only depends on the constant coefficient `a_0`.
    pub fn sign(self) -> i32 {
        if self.0 & 1 == 0 {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for GfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for GfElement {
    type Output = GfElement;
    fn add(self, rhs: GfElement) -> GfElement {
        gf_add(self, rhs)
    }
}

impl BitXor for GfElement {
    type Output = GfElement;
    fn bitxor(self, rhs: GfElement) -> GfElement {
        gf_add(self, rhs)
    }
}

/// Field addition: component-wise addition modulo 2.
pub fn gf_add(a: GfElement, b: GfElement) -> GfElement {
    GfElement(a.0 ^ b.0)
}

/// Square matrix over F₂ with at most 32 columns; row `r` is stored as a bit mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    dim: usize,
    rows: Vec<u32>,
}

impl BitMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim <= 32);
        BitMatrix {
            dim,
            rows: vec![0; dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let mut m = Self::zeros(rows.len());
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), rows.len(), "bit matrix must be square");
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, u32::from(v & 1));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        (self.rows[r] >> c) & 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        if v & 1 == 1 {
            self.rows[r] |= 1 << c;
        } else {
            self.rows[r] &= !(1 << c);
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| self.get(r, c) == self.get(c, r)))
    }

    /// `M · v` with `v` a column vector given as a bit mask.
    pub fn mul_vec(&self, v: u32) -> u32 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (r, row)| acc | (((row & v).count_ones() & 1) << r))
    }

    /// The bilinear form `a · M · bᵀ (mod 2)`.
    pub fn bilinear(&self, a: u32, b: u32) -> u32 {
        (a & self.mul_vec(b)).count_ones() & 1
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.dim, other.dim);
        let mut out = BitMatrix::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                let bit = (0..self.dim).fold(0, |acc, k| acc ^ (self.get(r, k) & other.get(k, c)));
                out.set(r, c, bit);
            }
        }
        out
    }

    /// Inverse over F₂ by Gauss-Jordan elimination, `None` when singular.
    pub fn inverse(&self) -> Option<BitMatrix> {
        let n = self.dim;
        let mut a = self.rows.clone();
        let mut inv = BitMatrix::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n).find(|&r| (a[r] >> col) & 1 == 1)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..n {
                if r != col && (a[r] >> col) & 1 == 1 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Some(BitMatrix { dim: n, rows: inv })
    }
}

/// Carry-less product of two polynomials over F₂.
fn clmul(a: u32, b: u32) -> u32 {
    let mut acc = 0;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

fn degree(p: u32) -> Option<u32> {
    if p == 0 {
        None
    } else {
        Some(31 - p.leading_zeros())
    }
}

/// Remainder of `p` modulo `m` over F₂.
fn poly_rem(mut p: u32, m: u32) -> u32 {
    let dm = degree(m).expect("modulus must be non-zero");
    while let Some(dp) = degree(p) {
        if dp < dm {
            break;
        }
        p ^= m << (dp - dm);
    }
    p
}

/// Brute-force irreducibility test: no divisor of degree 1..=deg/2.
pub fn is_irreducible(poly: u32) -> bool {
    let Some(d) = degree(poly) else {
        return false;
    };
    if d == 0 {
        return false;
    }
    (1..=d / 2).all(|k| (1u32 << k..1u32 << (k + 1)).all(|div| poly_rem(poly, div) != 0))
}

/// The field GF(2^n) with its multiplication table and multiplication matrices.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct FieldContext {
    n: u32,
    poly: u32,
    size: usize,
    table: Vec<u8>,
    mult_matrices: Vec<BitMatrix>,
}

impl FieldContext {
    pub fn new(n: u32) -> Result<Self> {
        field_new(n)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn element(&self, value: u32) -> Result<GfElement> {
        if (value as usize) < self.size {
            Ok(GfElement(value))
        } else {
            Err(Error::Config(format!(
                "{value} is not an element of GF(2^{})",
                self.n
            )))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = GfElement> + '_ {
        (0..self.size as u32).map(GfElement)
    }

    pub fn mul(&self, a: GfElement, b: GfElement) -> GfElement {
        GfElement(self.mul_raw(a.0, b.0))
    }

    /// Table lookup on raw integer representations. Both operands must be `< size`.
    #[inline]
    pub fn mul_raw(&self, a: u32, b: u32) -> u32 {
        u32::from(self.table[(a as usize) * self.size + b as usize])
    }

    /// `(-1)^(a ⊙ b)`.
    #[inline]
    pub fn sign_of_product(&self, a: u32, b: u32) -> f64 {
        if self.mul_raw(a, b) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn mult_matrices(&self) -> &[BitMatrix] {
        &self.mult_matrices
    }

    /// Exponents `a'` with `Ẑ_a = ⊗_i Z^{a'_i}` (bit `i` of `a'` acts on
    /// the qubit carrying bit `i` of the basis label). `a' = M₀ a`.
    pub fn phase_pauli_exponents(&self, a: GfElement) -> u32 {
        self.mult_matrices[0].mul_vec(a.0)
    }
}

/// Builds GF(2^n) for `1 ≤ n ≤ 8` from the fixed polynomial table.
pub fn field_new(n: u32) -> Result<FieldContext> {
    if !(1..=MAX_FIELD_DEGREE).contains(&n) {
        return Err(Error::Config(format!(
            "field degree must be in 1..={MAX_FIELD_DEGREE}, got {n}"
        )));
    }
    let poly = IRREDUCIBLE[n as usize];
    debug_assert_eq!(degree(poly), Some(n));
    if !is_irreducible(poly) {
        return Err(Error::Config(format!("polynomial {poly:#b} is reducible")));
    }
    let size = 1usize << n;
    let mut table = vec![0u8; size * size];
    for a in 0..size as u32 {
        for b in 0..size as u32 {
            table[a as usize * size + b as usize] = poly_rem(clmul(a, b), poly) as u8;
        }
    }
    let mut ctx = FieldContext {
        n,
        poly,
        size,
        table,
        mult_matrices: Vec::new(),
    };
    ctx.mult_matrices = build_mult_matrices(&ctx);
    Ok(ctx)
}

pub fn gf_mul(ctx: &FieldContext, a: GfElement, b: GfElement) -> GfElement {
    ctx.mul(a, b)
}

pub fn mult_matrices(ctx: &FieldContext) -> &[BitMatrix] {
    ctx.mult_matrices()
}

// M_i[r][t] = bit i of (x^r ⊙ x^t)
fn build_mult_matrices(ctx: &FieldContext) -> Vec<BitMatrix> {
    let n = ctx.n as usize;
    (0..n)
        .map(|i| {
            let mut m = BitMatrix::zeros(n);
            for r in 0..n {
                for t in 0..n {
                    m.set(r, t, (ctx.mul_raw(1 << r, 1 << t) >> i) & 1);
                }
            }
            m
        })
        .collect()
}
