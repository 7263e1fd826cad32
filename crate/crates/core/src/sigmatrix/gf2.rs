//! GF(2) elimination over packed signatures.

use super::{MatrixError, Signature, VerdictMatrix};

/// An incrementally built row-echelon basis over GF(2).
///
/// Each stored row is reduced against every earlier row, so its pivot (lowest
/// set bit) is clear in all rows inserted after it. Reducing a vector by the
/// rows in insertion order therefore never reintroduces an earlier pivot.
#[derive(Clone, Debug)]
pub struct Echelon {
    width: usize,
    rows: Vec<(usize, Signature)>,
}

impl Echelon {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            rows: Vec::new(),
        }
    }

    pub fn with_rows<'a, I>(width: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = &'a Signature>,
    {
        let mut e = Self::new(width);
        for r in rows {
            e.insert(r);
        }
        e
    }

    /// Dimension of the span.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Residual of `v` after elimination; zero iff `v` is in the span.
    pub fn reduce(&self, v: &Signature) -> Signature {
        let mut r = v.clone();
        for (pivot, row) in &self.rows {
            if r.get(*pivot) {
                r.xor_assign(row);
            }
        }
        r
    }

    pub fn contains(&self, v: &Signature) -> bool {
        debug_assert_eq!(v.width(), self.width);
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the basis. Returns `false` (and leaves the basis alone)
    /// when `v` is already in the span.
    pub fn insert(&mut self, v: &Signature) -> bool {
        debug_assert_eq!(v.width(), self.width);
        let r = self.reduce(v);
        match r.lowest_one() {
            Some(pivot) => {
                self.rows.push((pivot, r));
                true
            }
            None => false,
        }
    }
}

/// Coordinates of vectors in a fixed independent basis.
///
/// Alongside each echelon row it keeps the set of basis rows that were
/// XORed into it, so a reduction also yields the combination that produced
/// the vector.
#[derive(Clone, Debug)]
pub(crate) struct Coordinates {
    rows: Vec<(usize, Signature, Signature)>,
    k: usize,
}

impl Coordinates {
    /// `basis` must be linearly independent.
    pub(crate) fn new(basis: &[&Signature]) -> Self {
        let k = basis.len();
        let mut c = Self {
            rows: Vec::with_capacity(k),
            k,
        };
        for (i, b) in basis.iter().enumerate() {
            let (r, mut mask) = c.reduce(b);
            mask.set(i);
            let pivot = r.lowest_one().expect("basis rows are independent");
            c.rows.push((pivot, r, mask));
        }
        c
    }

    fn reduce(&self, v: &Signature) -> (Signature, Signature) {
        let mut r = v.clone();
        let mut mask = Signature::zeros(self.k);
        for (pivot, row, m) in &self.rows {
            if r.get(*pivot) {
                r.xor_assign(row);
                mask.xor_assign(m);
            }
        }
        (r, mask)
    }

    /// Bit `i` is set iff basis row `i` appears in `v`'s representation;
    /// `None` when `v` is outside the span.
    pub(crate) fn of(&self, v: &Signature) -> Option<Signature> {
        let (r, mask) = self.reduce(v);
        r.is_zero().then_some(mask)
    }
}

/// GF(2) rank of a list of equal-width rows.
pub fn rank_of<'a, I>(rows: I) -> usize
where
    I: IntoIterator<Item = &'a Signature>,
{
    let mut iter = rows.into_iter().peekable();
    let Some(first) = iter.peek() else {
        return 0;
    };
    let mut e = Echelon::new(first.width());
    for r in iter {
        e.insert(r);
        if e.rank() == e.width() {
            break;
        }
    }
    e.rank()
}

/// GF(2) row rank of the matrix.
pub fn rank(m: &VerdictMatrix) -> usize {
    rank_of(m.rows())
}

/// Whether `r` is a GF(2) linear combination of `rows`. The empty
/// combination counts, so the zero vector is in every span.
pub fn in_span(r: &Signature, rows: &[Signature]) -> Result<bool, MatrixError> {
    for row in rows {
        r.check_width(row)?;
    }
    Ok(Echelon::with_rows(r.width(), rows).contains(r))
}

/// Whether the rows are linearly independent.
pub fn independent<'a, I>(rows: I) -> bool
where
    I: IntoIterator<Item = &'a Signature>,
{
    let mut iter = rows.into_iter().peekable();
    let Some(first) = iter.peek() else {
        return true;
    };
    let mut e = Echelon::new(first.width());
    iter.all(|r| e.insert(r))
}

/// Columns of `rows` as length-`rows.len()` signatures.
pub fn transpose(rows: &[Signature], width: usize) -> Vec<Signature> {
    let mut cols = vec![Signature::zeros(rows.len()); width];
    for (i, row) in rows.iter().enumerate() {
        for j in row.ones() {
            cols[j].set(i);
        }
    }
    cols
}

/// Leftmost-pivot column basis of `rows`: scan columns left to right and keep
/// each one that is independent of the columns already kept.
pub fn column_basis_of(rows: &[Signature], width: usize) -> Vec<usize> {
    let mut e = Echelon::new(rows.len());
    let mut picked = Vec::new();
    if rows.is_empty() {
        return picked;
    }
    for (j, col) in transpose(rows, width).iter().enumerate() {
        if e.insert(col) {
            picked.push(j);
            if e.rank() == rows.len() {
                break;
            }
        }
    }
    picked
}

pub fn column_basis(m: &VerdictMatrix) -> Vec<usize> {
    column_basis_of(m.rows(), m.width())
}
