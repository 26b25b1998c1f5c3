//! Dense bit-packed linear algebra over the two-element field, plus assembly of
//! the block matrices that define 1-, 2- and 3-sums of binary matroids.

use std::fmt;
use std::str::FromStr;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Gf2Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("column index {index} out of range for {cols} columns")]
    ColumnOutOfRange { index: usize, cols: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A vector over GF(2), packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gf2Vector {
    len: usize,
    words: Vec<u64>,
}

impl Gf2Vector {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &Gf2Vector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse_bits(s: &str) -> Result<Self, Gf2Error> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Gf2Error::Parse { line: 0, msg: format!("invalid bit `{other}`") }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_bits(&bits))
    }

    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &Gf2Vector) -> Gf2Vector {
        let mut v = Gf2Vector::zeros(self.len + other.len);
        for i in 0..self.len {
            v.set(i, self.get(i));
        }
        for i in 0..other.len {
            v.set(self.len + i, other.get(i));
        }
        v
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Vector({})", self.to_bit_string())
    }
}

/// Incrementally built echelon basis of a subspace of GF(2)^n.
#[derive(Debug, Clone, Default)]
pub struct XorBasis {
    rows: Vec<(usize, Gf2Vector)>,
}

impl XorBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &mut Gf2Vector) {
        for (pivot, row) in &self.rows {
            if v.get(*pivot) {
                v.xor_assign(row);
            }
        }
    }

    pub fn contains(&self, v: &Gf2Vector) -> bool {
        let mut v = v.clone();
        self.reduce(&mut v);
        v.is_zero()
    }

    /// Adds `v`; returns `false` (and leaves the basis unchanged) if `v` is
    /// already in the span.
    pub fn insert(&mut self, v: &Gf2Vector) -> bool {
        let mut v = v.clone();
        self.reduce(&mut v);
        match v.first_one() {
            None => false,
            Some(pivot) => {
                // Each row is zero on the pivots of all earlier rows, so a
                // single ordered pass in `reduce` suffices.
                self.rows.push((pivot, v));
                true
            }
        }
    }
}

/// Dense matrix over GF(2) with bit-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Gf2Vector>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Gf2Vector::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from row-major bit rows; every row must have `cols` entries.
    pub fn from_rows(cols: usize, rows: &[Vec<bool>]) -> Result<Self, Gf2Error> {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Gf2Error::Dimension(format!("row {i} has {} entries, expected {cols}", row.len())));
            }
            m.data[i] = Gf2Vector::from_bits(row);
        }
        Ok(m)
    }

    /// Convenience constructor from `0`/`1` strings, one per row.
    pub fn from_strs(cols: usize, rows: &[&str]) -> Result<Self, Gf2Error> {
        let mut out = Vec::with_capacity(rows.len());
        for r in rows {
            let v = Gf2Vector::parse_bits(r)?;
            out.push(v.iter().collect::<Vec<_>>());
        }
        Self::from_rows(cols, &out)
    }

    /// Single-column matrix holding `v`.
    pub fn column_matrix(v: &Gf2Vector) -> Self {
        let mut m = Self::zeros(v.len(), 1);
        for i in 0..v.len() {
            m.set(i, 0, v.get(i));
        }
        m
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value)
    }

    pub fn row(&self, r: usize) -> &Gf2Vector {
        &self.data[r]
    }

    pub fn column(&self, c: usize) -> Gf2Vector {
        let mut v = Gf2Vector::zeros(self.rows);
        for r in 0..self.rows {
            v.set(r, self.get(r, c));
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Gf2Vector::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Row rank by in-place elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut basis = XorBasis::new();
        self.data.iter().filter(|row| basis.insert(row)).count()
    }

    /// Whether the selected columns are linearly independent. The empty
    /// selection is independent; repeated indices are dependent.
    pub fn columns_independent(&self, cols: &[usize]) -> Result<bool, Gf2Error> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Gf2Error::ColumnOutOfRange { index: bad, cols: self.cols });
        }
        let mut basis = XorBasis::new();
        Ok(cols.iter().all(|&c| basis.insert(&self.column(c))))
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (i, r) in rows.clone().enumerate() {
            for (j, c) in cols.clone().enumerate() {
                m.set(i, j, self.get(r, c));
            }
        }
        m
    }

    /// `(I_p | self)` for a `p x q` matrix.
    pub fn identity_extension(&self) -> Self {
        let p = self.rows;
        let mut m = Self::zeros(p, p + self.cols);
        for r in 0..p {
            m.set(r, r, true);
            for c in 0..self.cols {
                m.set(r, p + c, self.get(r, c));
            }
        }
        m
    }

    fn paste(&mut self, top: usize, left: usize, block: &Gf2Matrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                if block.get(r, c) {
                    self.set(top + r, left + c, true);
                }
            }
        }
    }

    /// Outer product `u v^T`.
    pub fn outer(u: &Gf2Vector, v: &Gf2Vector) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for r in 0..u.len() {
            if u.get(r) {
                m.data[r] = v.clone();
            }
        }
        m
    }

    fn blocks(tl: &Gf2Matrix, tr: &Gf2Matrix, bl: &Gf2Matrix, br: &Gf2Matrix) -> Self {
        let mut m = Self::zeros(tl.rows + bl.rows, tl.cols + tr.cols);
        m.paste(0, 0, tl);
        m.paste(0, tl.cols, tr);
        m.paste(tl.rows, 0, bl);
        m.paste(tl.rows, tl.cols, br);
        m
    }

    /// Vertical concatenation.
    pub fn stack(top: &Gf2Matrix, bottom: &Gf2Matrix) -> Result<Self, Gf2Error> {
        if top.cols != bottom.cols {
            return Err(Gf2Error::Dimension(format!("cannot stack {} and {} columns", top.cols, bottom.cols)));
        }
        let mut m = top.clone();
        m.rows += bottom.rows;
        m.data.extend(bottom.data.iter().cloned());
        Ok(m)
    }

    /// Horizontal concatenation.
    pub fn hcat(left: &Gf2Matrix, right: &Gf2Matrix) -> Result<Self, Gf2Error> {
        if left.rows != right.rows {
            return Err(Gf2Error::Dimension(format!("cannot join {} and {} rows", left.rows, right.rows)));
        }
        let mut m = Self::zeros(left.rows, left.cols + right.cols);
        m.paste(0, 0, left);
        m.paste(0, left.cols, right);
        Ok(m)
    }

    /// Parses the text format: a `p q` header followed by `p` rows of `q`
    /// characters from `{0,1}`; blank lines and `#` comments are ignored. With
    /// `q = 0` the header alone describes the matrix.
    pub fn parse_text(text: &str) -> Result<Self, Gf2Error> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(Gf2Error::Parse { line: 0, msg: "missing `p q` header".into() })?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| Gf2Error::Parse { line: hline, msg: format!("bad header `{header}`") })?;
        let [p, q] = dims[..] else {
            return Err(Gf2Error::Parse { line: hline, msg: format!("header must be `p q`, got `{header}`") });
        };
        if p + q == 0 {
            return Err(Gf2Error::Parse { line: hline, msg: "matrix must have p + q > 0".into() });
        }
        let mut m = Self::zeros(p, q);
        let mut r = if q == 0 { p } else { 0 };
        for (ln, line) in lines {
            if r == p {
                return Err(Gf2Error::Parse { line: ln, msg: format!("more than {p} rows") });
            }
            let row: String = line.split_whitespace().collect();
            if row.chars().count() != q {
                return Err(Gf2Error::Parse { line: ln, msg: format!("expected {q} entries, got {}", row.len()) });
            }
            for (c, ch) in row.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(r, c, true),
                    other => return Err(Gf2Error::Parse { line: ln, msg: format!("invalid entry `{other}`") }),
                }
            }
            r += 1;
        }
        if r != p {
            return Err(Gf2Error::Parse { line: 0, msg: format!("expected {p} rows, found {r}") });
        }
        Ok(m)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for row in self.data.iter().filter(|_| self.cols > 0) {
            s.push_str(&row.to_bit_string());
            s.push('\n');
        }
        s
    }
}

impl FromStr for Gf2Matrix {
    type Err = Gf2Error;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_text(s)
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Matrix {}x{} [", self.rows, self.cols)?;
        for (i, row) in self.data.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", row.to_bit_string())?;
        }
        write!(f, "]")
    }
}

/// `(A 0; 0 B)`.
pub fn assemble_1sum(a: &Gf2Matrix, b: &Gf2Matrix) -> Gf2Matrix {
    Gf2Matrix::blocks(a, &Gf2Matrix::zeros(a.rows, b.cols), &Gf2Matrix::zeros(b.rows, a.cols), b)
}

/// `(A  a b^T; 0  B)`.
pub fn assemble_2sum(a_mat: &Gf2Matrix, a: &Gf2Vector, b: &Gf2Vector, b_mat: &Gf2Matrix) -> Result<Gf2Matrix, Gf2Error> {
    if a.len() != a_mat.rows {
        return Err(Gf2Error::Dimension(format!("|a| = {} but A has {} rows", a.len(), a_mat.rows)));
    }
    if b.len() != b_mat.cols {
        return Err(Gf2Error::Dimension(format!("|b| = {} but B has {} columns", b.len(), b_mat.cols)));
    }
    Ok(Gf2Matrix::blocks(
        a_mat,
        &Gf2Matrix::outer(a, b),
        &Gf2Matrix::zeros(b_mat.rows, a_mat.cols),
        b_mat,
    ))
}

/// `(A  a b^T; d c^T  B)`.
pub fn assemble_3sum(
    a_mat: &Gf2Matrix,
    a: &Gf2Vector,
    b: &Gf2Vector,
    c: &Gf2Vector,
    d: &Gf2Vector,
    b_mat: &Gf2Matrix,
) -> Result<Gf2Matrix, Gf2Error> {
    if a.len() != a_mat.rows {
        return Err(Gf2Error::Dimension(format!("|a| = {} but A has {} rows", a.len(), a_mat.rows)));
    }
    if c.len() != a_mat.cols {
        return Err(Gf2Error::Dimension(format!("|c| = {} but A has {} columns", c.len(), a_mat.cols)));
    }
    if b.len() != b_mat.cols {
        return Err(Gf2Error::Dimension(format!("|b| = {} but B has {} columns", b.len(), b_mat.cols)));
    }
    if d.len() != b_mat.rows {
        return Err(Gf2Error::Dimension(format!("|d| = {} but B has {} rows", d.len(), b_mat.rows)));
    }
    Ok(Gf2Matrix::blocks(a_mat, &Gf2Matrix::outer(a, b), &Gf2Matrix::outer(d, c), b_mat))
}
