//! Dense n-qubit Pauli operators with exact quarter-phase tracking.
//!
//! An operator is stored as packed X/Z bit-vectors plus a phase exponent:
//! `value = i^phase · Π_q X_q^{x_q} Z_q^{z_q}` with the X factor written
//! before the Z factor on every qubit. Under this layout CNOT conjugation
//! is phase-free and the group product needs a single AND/popcount pass.
//!
//! The letter `Y` abbreviates `i·X·Z`, so every Hermitian operator carries
//! a displayed phase in `{+1, -1}` and the displayed prefix of a parsed
//! string round-trips exactly.

use std::fmt;
use std::str::FromStr;

use crate::error::FtccError;

const WORD: usize = 64;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

#[inline]
fn parity_and(a: &[u64], b: &[u64]) -> u8 {
    let mut acc = 0u64;
    for (x, y) in a.iter().zip(b) {
        acc ^= x & y;
    }
    (acc.count_ones() & 1) as u8
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliLetter::I => (false, false),
            PauliLetter::X => (true, false),
            PauliLetter::Y => (true, true),
            PauliLetter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (true, true) => PauliLetter::Y,
            (false, true) => PauliLetter::Z,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }
}

/// Dense Pauli operator on `n` qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    /// Power of i in the X-before-Z normal form (mod 4).
    phase: u8,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        PauliOperator { n, x: vec![0; w], z: vec![0; w], phase: 0 }
    }

    /// Weight-1 operator with `letter` at `qubit`.
    pub fn single(n: usize, qubit: usize, letter: PauliLetter) -> Self {
        assert!(qubit < n, "qubit {qubit} out of range for n={n}");
        let mut p = Self::identity(n);
        p.set_letter(qubit, letter);
        p
    }

    pub fn from_letters(letters: &[PauliLetter]) -> Self {
        let mut p = Self::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set_letter(q, l);
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn x_bit(&self, q: usize) -> bool {
        self.x[q / WORD] >> (q % WORD) & 1 == 1
    }

    #[inline]
    pub fn z_bit(&self, q: usize) -> bool {
        self.z[q / WORD] >> (q % WORD) & 1 == 1
    }

    #[inline]
    pub fn set_x_bit(&mut self, q: usize, v: bool) {
        let m = 1u64 << (q % WORD);
        if v {
            self.x[q / WORD] |= m;
        } else {
            self.x[q / WORD] &= !m;
        }
    }

    #[inline]
    pub fn set_z_bit(&mut self, q: usize, v: bool) {
        let m = 1u64 << (q % WORD);
        if v {
            self.z[q / WORD] |= m;
        } else {
            self.z[q / WORD] &= !m;
        }
    }

    pub fn letter(&self, q: usize) -> PauliLetter {
        PauliLetter::from_bits(self.x_bit(q), self.z_bit(q))
    }

    /// Replaces the letter at `q`, keeping the normal-form phase unchanged.
    pub fn set_letter(&mut self, q: usize, letter: PauliLetter) {
        // Y contributes i·XZ, so insertion/removal adjusts the exponent.
        let before = matches!(self.letter(q), PauliLetter::Y) as u8;
        let (x, z) = letter.bits();
        self.set_x_bit(q, x);
        self.set_z_bit(q, z);
        let after = matches!(letter, PauliLetter::Y) as u8;
        self.phase = (self.phase + 4 + after - before) % 4;
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    /// Normal-form phase exponent (power of i multiplying `Π X^x Z^z`).
    pub fn raw_phase(&self) -> u8 {
        self.phase
    }

    pub fn set_raw_phase(&mut self, p: u8) {
        self.phase = p % 4;
    }

    pub fn mul_raw_phase(&mut self, p: u8) {
        self.phase = (self.phase + p) % 4;
    }

    fn y_count(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(x, z)| (x & z).count_ones()).sum()
    }

    /// Displayed phase exponent relative to the letter string, so that
    /// `value = i^phase() · (tensor of letters)`. `-iY` reports 3.
    pub fn phase(&self) -> u8 {
        ((self.phase as u32 + 4 * self.n as u32 - self.y_count()) % 4) as u8
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Qubits with a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.x_bit(q) || self.z_bit(q)).collect()
    }

    /// True when the operator squares to +I (displayed phase in {0, 2}).
    pub fn is_hermitian(&self) -> bool {
        self.phase() % 2 == 0
    }

    pub fn check_same_len(&self, other: &PauliOperator) -> Result<(), FtccError> {
        if self.n != other.n {
            return Err(FtccError::LengthMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    /// Exact group product `self · other` including phase.
    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator, FtccError> {
        self.check_same_len(other)?;
        let mut out = self.clone();
        out.mul_assign(other);
        Ok(out)
    }

    /// In-place product; panics on length mismatch (hot-loop variant).
    pub fn mul_assign(&mut self, other: &PauliOperator) {
        debug_assert_eq!(self.n, other.n);
        // Z^{z1} X^{x2} = (-1)^{z1·x2} X^{x2} Z^{z1}
        let swaps = parity_and(&self.z, &other.x);
        self.phase = (self.phase + other.phase + 2 * swaps) % 4;
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
    }

    /// Symplectic inner product: 0 when the operators commute, 1 otherwise.
    pub fn symplectic_form(&self, other: &PauliOperator) -> u8 {
        debug_assert_eq!(self.n, other.n);
        parity_and(&self.x, &other.z) ^ parity_and(&self.z, &other.x)
    }

    pub fn commutes(&self, other: &PauliOperator) -> Result<bool, FtccError> {
        self.check_same_len(other)?;
        Ok(self.symplectic_form(other) == 0)
    }

    /// Embeds this operator into a larger register starting at `offset`.
    pub fn embed(&self, total_n: usize, offset: usize) -> PauliOperator {
        assert!(offset + self.n <= total_n);
        let mut out = PauliOperator::identity(total_n);
        for q in 0..self.n {
            if self.x_bit(q) {
                out.set_x_bit(offset + q, true);
            }
            if self.z_bit(q) {
                out.set_z_bit(offset + q, true);
            }
        }
        out.phase = self.phase;
        out
    }

    /// Restriction to `qubits` (in the given order), dropping the phase to 0
    /// unless the dropped letters are all identity.
    pub fn restrict(&self, qubits: &[usize]) -> PauliOperator {
        let mut out = PauliOperator::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            out.set_x_bit(i, self.x_bit(q));
            out.set_z_bit(i, self.z_bit(q));
        }
        out
    }

    /// The 2n-bit symplectic row `[x | z]`, packed little-endian.
    pub fn symplectic_row(&self) -> Vec<u64> {
        let mut row = vec![0u64; words_for(2 * self.n)];
        for q in 0..self.n {
            if self.x_bit(q) {
                row[q / WORD] |= 1 << (q % WORD);
            }
            if self.z_bit(q) {
                let b = self.n + q;
                row[b / WORD] |= 1 << (b % WORD);
            }
        }
        row
    }

    pub fn from_symplectic_row(n: usize, row: &[u64]) -> PauliOperator {
        let mut p = PauliOperator::identity(n);
        for q in 0..n {
            if row[q / WORD] >> (q % WORD) & 1 == 1 {
                p.set_x_bit(q, true);
            }
            let b = n + q;
            if row[b / WORD] >> (b % WORD) & 1 == 1 {
                p.set_z_bit(q, true);
            }
        }
        p
    }

    pub fn letters(&self) -> Vec<PauliLetter> {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    /// Hermitian representative: forces the displayed phase into {+, -}
    /// by dropping a stray factor of i (used only by diagnostics).
    pub fn canonical_string(&self) -> String {
        self.to_string()
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase() {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}")?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).to_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliOperator {
    type Err = FtccError;

    /// Grammar: `[+|-|i|-i]?[IXYZ]{n}`.
    fn from_str(text: &str) -> Result<Self, FtccError> {
        let (ext_phase, body) = if let Some(rest) = text.strip_prefix("-i") {
            (3u8, rest)
        } else if let Some(rest) = text.strip_prefix('i') {
            (1u8, rest)
        } else if let Some(rest) = text.strip_prefix('-') {
            (2u8, rest)
        } else if let Some(rest) = text.strip_prefix('+') {
            (0u8, rest)
        } else {
            (0u8, text)
        };
        if body.is_empty() {
            return Err(FtccError::PauliParse { position: text.len(), text: text.to_string() });
        }
        let mut letters = Vec::with_capacity(body.len());
        for (i, c) in body.chars().enumerate() {
            let l = match c {
                'I' => PauliLetter::I,
                'X' => PauliLetter::X,
                'Y' => PauliLetter::Y,
                'Z' => PauliLetter::Z,
                _ => {
                    return Err(FtccError::PauliParse {
                        position: text.len() - body.len() + i,
                        text: text.to_string(),
                    })
                }
            };
            letters.push(l);
        }
        let mut p = PauliOperator::from_letters(&letters);
        p.phase = (p.phase + ext_phase) % 4;
        Ok(p)
    }
}

/// Parses a phase-prefixed Pauli string.
pub fn parse_pauli(text: &str) -> Result<PauliOperator, FtccError> {
    text.parse()
}

/// Formats an operator in the canonical string grammar.
pub fn format_pauli(p: &PauliOperator) -> String {
    p.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    // Independent oracle: dense matrix form of a Pauli operator for n <= 3.
    fn matrix(p: &PauliOperator) -> Vec<Vec<Complex64>> {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let mats: [[[Complex64; 2]; 2]; 4] = [
            [[one, zero], [zero, one]],
            [[zero, one], [one, zero]],
            [[zero, -i], [i, zero]],
            [[one, zero], [zero, -one]],
        ];
        let idx = |l: PauliLetter| match l {
            PauliLetter::I => 0,
            PauliLetter::X => 1,
            PauliLetter::Y => 2,
            PauliLetter::Z => 3,
        };
        let dim = 1usize << p.n();
        let mut out = vec![vec![zero; dim]; dim];
        let scale = i.powu(p.phase() as u32);
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                let mut v = scale;
                for q in 0..p.n() {
                    // qubit q maps to bit q of the index
                    let rb = (r >> q) & 1;
                    let cb = (c >> q) & 1;
                    v *= mats[idx(p.letter(q))][rb][cb];
                }
                *cell = v;
            }
        }
        out
    }

    fn mat_mul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let dim = a.len();
        let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for r in 0..dim {
            for k in 0..dim {
                if a[r][k].norm_sqr() < 1e-20 {
                    continue;
                }
                for c in 0..dim {
                    out[r][c] += a[r][k] * b[k][c];
                }
            }
        }
        out
    }

    fn mats_close(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> bool {
        a.iter()
            .zip(b)
            .all(|(ra, rb)| ra.iter().zip(rb).all(|(x, y)| (x - y).norm() < 1e-9))
    }

    #[test]
    fn parse_examples() {
        let p: PauliOperator = "XZZXI".parse().unwrap();
        assert_eq!(p.n(), 5);
        assert_eq!(p.weight(), 4);
        assert_eq!(p.phase(), 0);

        let q: PauliOperator = "-iY".parse().unwrap();
        assert_eq!(q.n(), 1);
        assert_eq!(q.phase(), 3);
        assert!(q.x_bit(0) && q.z_bit(0));

        let r: PauliOperator = "IIIII".parse().unwrap();
        assert_eq!(r.weight(), 0);
        assert_eq!(r, PauliOperator::identity(5));
    }

    #[test]
    fn parse_rejects_bad_character() {
        let err = parse_pauli("XZQZ").unwrap_err();
        match err {
            FtccError::PauliParse { position, .. } => assert_eq!(position, 2),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(parse_pauli("").is_err());
        assert!(parse_pauli("-i").is_err());
    }

    #[test]
    fn multiply_examples() {
        let x: PauliOperator = "X".parse().unwrap();
        let z: PauliOperator = "Z".parse().unwrap();
        assert_eq!(x.multiply(&z).unwrap().to_string(), "-iY");
        assert_eq!(x.multiply(&x).unwrap().to_string(), "I");

        let xx: PauliOperator = "XX".parse().unwrap();
        let zz: PauliOperator = "ZZ".parse().unwrap();
        assert_eq!(xx.multiply(&zz).unwrap().to_string(), "-YY");
    }

    #[test]
    fn multiply_matches_matrix_oracle() {
        // exhaustive over 2-qubit letter pairs
        let letters = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
        for a0 in letters {
            for a1 in letters {
                for b0 in letters {
                    for b1 in letters {
                        let p = PauliOperator::from_letters(&[a0, a1]);
                        let q = PauliOperator::from_letters(&[b0, b1]);
                        let prod = p.multiply(&q).unwrap();
                        let m = mat_mul(&matrix(&p), &matrix(&q));
                        assert!(
                            mats_close(&m, &matrix(&prod)),
                            "mismatch {p} * {q} = {prod}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn commutes_examples() {
        let x: PauliOperator = "X".parse().unwrap();
        let z: PauliOperator = "Z".parse().unwrap();
        assert!(!x.commutes(&z).unwrap());

        let xx: PauliOperator = "XX".parse().unwrap();
        let zz: PauliOperator = "ZZ".parse().unwrap();
        assert!(xx.commutes(&zz).unwrap());

        // five-qubit cyclic generators commute (frozen from symplectic form)
        let g1: PauliOperator = "XZZXI".parse().unwrap();
        let g2: PauliOperator = "IXZZX".parse().unwrap();
        assert!(g1.commutes(&g2).unwrap());
    }

    #[test]
    fn weight_examples() {
        assert_eq!(parse_pauli("IXYZI").unwrap().weight(), 3);
        assert_eq!(PauliOperator::identity(4).weight(), 0);
        assert_eq!(parse_pauli("XZZXI").unwrap().weight(), 4);
    }

    #[test]
    fn length_mismatch_is_reported() {
        let a = PauliOperator::identity(3);
        let b = PauliOperator::identity(4);
        assert!(a.multiply(&b).is_err());
        assert!(a.commutes(&b).is_err());
    }

    #[test]
    fn roundtrip_canonical_strings() {
        for s in ["XZZXI", "-iY", "IIIII", "iXYZ", "-ZZ", "Y"] {
            let p: PauliOperator = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        // "+" prefix normalizes away
        assert_eq!(parse_pauli("+XZ").unwrap().to_string(), "XZ");
    }

    proptest::proptest! {
        #[test]
        fn associativity(seed in 0u64..500) {
            let mut rng = seed;
            let mut next = || {
                rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (rng >> 33) as usize
            };
            let n = 1 + next() % 6;
            let rand_pauli = |next: &mut dyn FnMut() -> usize| {
                let mut p = PauliOperator::identity(n);
                for q in 0..n {
                    let l = match next() % 4 {
                        0 => PauliLetter::I,
                        1 => PauliLetter::X,
                        2 => PauliLetter::Y,
                        _ => PauliLetter::Z,
                    };
                    p.set_letter(q, l);
                }
                p.mul_raw_phase((next() % 4) as u8);
                p
            };
            let p = rand_pauli(&mut next);
            let q = rand_pauli(&mut next);
            let r = rand_pauli(&mut next);
            let left = p.multiply(&q).unwrap().multiply(&r).unwrap();
            let right = p.multiply(&q.multiply(&r).unwrap()).unwrap();
            proptest::prop_assert_eq!(left, right);
            proptest::prop_assert_eq!(
                p.commutes(&q).unwrap(),
                q.commutes(&p).unwrap()
            );
            proptest::prop_assert_eq!(p.multiply(&p).unwrap().weight(), 0);
            // round-trip through the string grammar
            let s = p.to_string();
            let back: PauliOperator = s.parse().unwrap();
            proptest::prop_assert_eq!(back, p);
        }
    }
}
