//! Packed GF(2) linear algebra: the row-reduction workhorse behind group
//! membership, rank checks and erasure reasoning.

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// Row-major packed bit matrix.
#[derive(Clone, Debug)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    wpr: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let wpr = words_for(cols).max(1);
        BitMatrix { rows, cols, wpr, bits: vec![0; rows * wpr] }
    }

    pub fn from_rows(rows: &[Vec<u64>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let dst = &mut m.bits[i * m.wpr..(i + 1) * m.wpr];
            for (d, s) in dst.iter_mut().zip(r) {
                *d = *s;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.wpr + c / WORD] >> (c % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = r * self.wpr + c / WORD;
        let m = 1u64 << (c % WORD);
        if v {
            self.bits[w] |= m;
        } else {
            self.bits[w] &= !m;
        }
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.wpr..(r + 1) * self.wpr]
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let (a, b) = if src < dst {
            let (lo, hi) = self.bits.split_at_mut(dst * self.wpr);
            (&lo[src * self.wpr..src * self.wpr + self.wpr], &mut hi[..self.wpr])
        } else {
            let (lo, hi) = self.bits.split_at_mut(src * self.wpr);
            (&hi[..self.wpr], &mut lo[dst * self.wpr..dst * self.wpr + self.wpr])
        };
        for (d, s) in b.iter_mut().zip(a) {
            *d ^= s;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.wpr {
            self.bits.swap(a * self.wpr + w, b * self.wpr + w);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().row_reduce().1.len()
    }

    /// In-place reduced row echelon form. Returns the matrix and the pivot
    /// column list (one per nonzero row, ascending).
    pub fn row_reduce(mut self) -> (Self, Vec<usize>) {
        let mut pivots = Vec::new();
        let mut next_row = 0usize;
        for c in 0..self.cols {
            if next_row >= self.rows {
                break;
            }
            let Some(pr) = (next_row..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(pr, next_row);
            for r in 0..self.rows {
                if r != next_row && self.get(r, c) {
                    self.xor_row_into(next_row, r);
                }
            }
            pivots.push(c);
            next_row += 1;
        }
        (self, pivots)
    }
}

/// Row space of a set of packed GF(2) vectors, with membership and solve
/// support. Reduction is against row-echelon rows kept sorted by pivot.
#[derive(Clone, Debug)]
pub struct RowSpace {
    cols: usize,
    wpr: usize,
    /// Echelon rows and, per row, the combination of input rows producing it.
    rows: Vec<(Vec<u64>, Vec<u64>)>,
    pivots: Vec<usize>,
    n_inputs: usize,
}

impl RowSpace {
    pub fn new(cols: usize) -> Self {
        RowSpace { cols, wpr: words_for(cols).max(1), rows: Vec::new(), pivots: Vec::new(), n_inputs: 0 }
    }

    pub fn from_rows<'a, I: IntoIterator<Item = &'a [u64]>>(cols: usize, rows: I) -> Self {
        let mut s = Self::new(cols);
        for r in rows {
            s.insert(r);
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn leading_bit(v: &[u64]) -> Option<usize> {
        for (w, &word) in v.iter().enumerate() {
            if word != 0 {
                return Some(w * WORD + word.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Adds an input row. Returns true when it enlarged the span.
    pub fn insert(&mut self, row: &[u64]) -> bool {
        let idx = self.n_inputs;
        self.n_inputs += 1;
        let mut v = vec![0u64; self.wpr];
        v[..row.len().min(self.wpr)].copy_from_slice(&row[..row.len().min(self.wpr)]);
        let comb_words = words_for(self.n_inputs).max(1);
        let mut comb = vec![0u64; comb_words];
        comb[idx / WORD] |= 1 << (idx % WORD);
        for (i, &p) in self.pivots.iter().enumerate() {
            if v[p / WORD] >> (p % WORD) & 1 == 1 {
                let (rv, rc) = &self.rows[i];
                for (d, s) in v.iter_mut().zip(rv) {
                    *d ^= s;
                }
                for (d, s) in comb.iter_mut().zip(rc) {
                    *d ^= s;
                }
            }
        }
        match Self::leading_bit(&v) {
            None => false,
            Some(p) => {
                // back-substitute into existing rows to keep reduced form
                for (rv, rc) in self.rows.iter_mut() {
                    if rv[p / WORD] >> (p % WORD) & 1 == 1 {
                        for (d, s) in rv.iter_mut().zip(&v) {
                            *d ^= s;
                        }
                        if rc.len() < comb.len() {
                            rc.resize(comb.len(), 0);
                        }
                        for (d, s) in rc.iter_mut().zip(&comb) {
                            *d ^= s;
                        }
                    }
                }
                let pos = self.pivots.partition_point(|&q| q < p);
                self.pivots.insert(pos, p);
                self.rows.insert(pos, (v, comb));
                true
            }
        }
    }

    /// Membership test for the span.
    pub fn contains(&self, row: &[u64]) -> bool {
        self.reduce(row).iter().all(|&w| w == 0)
    }

    /// Reduces `row` modulo the span; the result is zero iff contained.
    pub fn reduce(&self, row: &[u64]) -> Vec<u64> {
        let mut v = vec![0u64; self.wpr];
        v[..row.len().min(self.wpr)].copy_from_slice(&row[..row.len().min(self.wpr)]);
        for (i, &p) in self.pivots.iter().enumerate() {
            if v[p / WORD] >> (p % WORD) & 1 == 1 {
                for (d, s) in v.iter_mut().zip(&self.rows[i].0) {
                    *d ^= s;
                }
            }
        }
        v
    }

    /// Expresses `row` as a combination of the *input* rows, if possible.
    /// Returns the input-row index set.
    pub fn solve(&self, row: &[u64]) -> Option<Vec<usize>> {
        let mut v = vec![0u64; self.wpr];
        v[..row.len().min(self.wpr)].copy_from_slice(&row[..row.len().min(self.wpr)]);
        let mut comb: Vec<u64> = vec![0; words_for(self.n_inputs).max(1)];
        for (i, &p) in self.pivots.iter().enumerate() {
            if v[p / WORD] >> (p % WORD) & 1 == 1 {
                let (rv, rc) = &self.rows[i];
                for (d, s) in v.iter_mut().zip(rv) {
                    *d ^= s;
                }
                for (d, s) in comb.iter_mut().zip(rc) {
                    *d ^= s;
                }
            }
        }
        if v.iter().any(|&w| w != 0) {
            return None;
        }
        let mut idxs = Vec::new();
        for i in 0..self.n_inputs {
            if comb.get(i / WORD).copied().unwrap_or(0) >> (i % WORD) & 1 == 1 {
                idxs.push(i);
            }
        }
        Some(idxs)
    }
}

/// Solves `rows · x = rhs` over GF(2); any solution (free variables zero).
/// Row `i` is a packed `cols`-bit vector.
pub fn solve_linear(rows: &[Vec<u64>], cols: usize, rhs: &[bool]) -> Option<Vec<u64>> {
    assert_eq!(rows.len(), rhs.len());
    let wpr = words_for(cols).max(1);
    // augmented column at bit position `cols`
    let aug_w = words_for(cols + 1).max(1);
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut v = vec![0u64; aug_w];
            v[..r.len().min(aug_w)].copy_from_slice(&r[..r.len().min(aug_w)]);
            if b {
                v[cols / WORD] |= 1 << (cols % WORD);
            }
            v
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut next_row = 0usize;
    for c in 0..cols {
        let Some(pr) = (next_row..m.len()).find(|&r| m[r][c / WORD] >> (c % WORD) & 1 == 1) else {
            continue;
        };
        m.swap(pr, next_row);
        for r in 0..m.len() {
            if r != next_row && m[r][c / WORD] >> (c % WORD) & 1 == 1 {
                let (src, dst) = if next_row < r {
                    let (a, b) = m.split_at_mut(r);
                    (&a[next_row], &mut b[0])
                } else {
                    let (a, b) = m.split_at_mut(next_row);
                    (&b[0], &mut a[r])
                };
                for (d, s) in dst.iter_mut().zip(src) {
                    *d ^= s;
                }
            }
        }
        pivots.push((next_row, c));
        next_row += 1;
        if next_row == m.len() {
            break;
        }
    }
    // inconsistent if any zero row has the augmented bit set
    for (r, row) in m.iter().enumerate() {
        if pivots.iter().any(|&(pr, _)| pr == r) {
            continue;
        }
        let mut lhs_zero = true;
        for c in 0..cols {
            if row[c / WORD] >> (c % WORD) & 1 == 1 {
                lhs_zero = false;
                break;
            }
        }
        if lhs_zero && row[cols / WORD] >> (cols % WORD) & 1 == 1 {
            return None;
        }
    }
    let mut x = vec![0u64; wpr];
    for &(r, c) in &pivots {
        if m[r][cols / WORD] >> (cols % WORD) & 1 == 1 {
            x[c / WORD] |= 1 << (c % WORD);
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_linear_small() {
        // x0 + x1 = 1, x1 + x2 = 0, x0 + x2 = 1
        let rows = vec![vec![0b011u64], vec![0b110], vec![0b101]];
        let x = solve_linear(&rows, 3, &[true, false, true]).unwrap();
        let bit = |i: usize| x[0] >> i & 1;
        assert_eq!((bit(0) + bit(1)) % 2, 1);
        assert_eq!((bit(1) + bit(2)) % 2, 0);
        assert_eq!((bit(0) + bit(2)) % 2, 1);
        // inconsistent system
        let rows2 = vec![vec![0b01u64], vec![0b01]];
        assert!(solve_linear(&rows2, 2, &[true, false]).is_none());
    }

    #[test]
    fn rank_and_rref() {
        let rows = vec![vec![0b101u64], vec![0b011], vec![0b110]];
        let m = BitMatrix::from_rows(&rows, 3);
        assert_eq!(m.rank(), 2);
        let (r, pivots) = m.row_reduce();
        assert_eq!(pivots, vec![0, 1]);
        // idempotence on reduced input
        let again = r.clone().row_reduce().0;
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(r.get(i, j), again.get(i, j));
            }
        }
    }

    #[test]
    fn rowspace_membership_and_solve() {
        let mut s = RowSpace::new(4);
        s.insert(&[0b1001]);
        s.insert(&[0b0011]);
        assert!(s.contains(&[0b1010]));
        assert!(!s.contains(&[0b0100]));
        let combo = s.solve(&[0b1010]).unwrap();
        assert_eq!(combo, vec![0, 1]);
        assert!(s.solve(&[0b0111]).is_none());
    }

    #[test]
    fn rowspace_invariant_under_row_ops() {
        // span unchanged when a generator is replaced by a product
        let a = RowSpace::from_rows(3, [vec![0b101u64].as_slice(), &[0b011]]);
        let b = RowSpace::from_rows(3, [vec![0b101u64].as_slice(), &[0b110]]);
        for v in 0..8u64 {
            assert_eq!(a.contains(&[v]), b.contains(&[v]));
        }
    }
}
