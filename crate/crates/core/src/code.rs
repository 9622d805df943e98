//! Stabilizer-code model, the built-in base codes (five-qubit, Steane,
//! 15-qubit Reed-Muller) and the static analyses used everywhere else:
//! syndrome extraction, brute-force distance search, erasure-style
//! subset-logical checks and CSS detection.

use serde::{Deserialize, Serialize};

use crate::error::FtccError;
use crate::gf2::RowSpace;
use crate::pauli::{PauliLetter, PauliOperator};

/// Identifier for the bundled base codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseCode {
    FiveQubit,
    Steane,
    Rm15,
}

impl BaseCode {
    pub fn parse(name: &str) -> Result<Self, FtccError> {
        match name {
            "five_qubit" | "5q" | "five-qubit" => Ok(BaseCode::FiveQubit),
            "steane" => Ok(BaseCode::Steane),
            "rm15" | "rm" => Ok(BaseCode::Rm15),
            other => Err(FtccError::UnknownCode(other.to_string())),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BaseCode::FiveQubit => "five_qubit",
            BaseCode::Steane => "steane",
            BaseCode::Rm15 => "rm15",
        }
    }
}

/// Nontrivial logical classes of a k=1 code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogicalClass {
    X,
    Y,
    Z,
}

/// Letter filter for distance sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeFilter {
    Any,
    XOnly,
    ZOnly,
}

/// Syndrome bit-vector: bit i set iff the error anticommutes with
/// generator i.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syndrome {
    len: usize,
    bits: Vec<u64>,
}

impl Syndrome {
    pub fn zero(len: usize) -> Self {
        Syndrome { len, bits: vec![0; len.div_ceil(64).max(1)] }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set_bit(&mut self, i: usize, v: bool) {
        let m = 1u64 << (i % 64);
        if v {
            self.bits[i / 64] |= m;
        } else {
            self.bits[i / 64] &= !m;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn xor(&self, other: &Syndrome) -> Syndrome {
        assert_eq!(self.len, other.len);
        Syndrome {
            len: self.len,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect(),
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    /// Packs the bits into a u64 (only valid for len <= 64).
    pub fn as_u64(&self) -> u64 {
        debug_assert!(self.len <= 64);
        self.bits[0]
    }
}

impl std::fmt::Display for Syndrome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.bit(i)))?;
        }
        Ok(())
    }
}

/// An [[n, k, d]] stabilizer code with fixed +1 generator signs and stored
/// minimal-weight logical representatives.
#[derive(Debug, Clone)]
pub struct StabilizerCode {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub generators: Vec<PauliOperator>,
    pub logical_x: PauliOperator,
    pub logical_z: PauliOperator,
    pub claimed_distance: Option<usize>,
}

/// Default cap on `C(n, w) * 3^w` enumeration work.
pub const DEFAULT_ENUM_BUDGET: u64 = 4_000_000_000;

impl StabilizerCode {
    /// Loads one of the built-in base codes with its canonical generator
    /// set, validates it and minimizes the stored logical representatives.
    pub fn base(which: BaseCode) -> StabilizerCode {
        let mut code = match which {
            BaseCode::FiveQubit => {
                let gens = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"];
                StabilizerCode {
                    name: "five_qubit".into(),
                    n: 5,
                    k: 1,
                    generators: gens.iter().map(|s| s.parse().unwrap()).collect(),
                    logical_x: "XXXXX".parse().unwrap(),
                    logical_z: "ZZZZZ".parse().unwrap(),
                    claimed_distance: Some(3),
                }
            }
            BaseCode::Steane => {
                // Hamming check matrix with columns 001 010 100 101 110 111 011,
                // chosen so that {q1, q2, q7} is a codeword line.
                let rows: [&[usize]; 3] = [&[2, 3, 4, 5], &[1, 4, 5, 6], &[0, 3, 5, 6]];
                let mut generators = Vec::new();
                for letter in [PauliLetter::X, PauliLetter::Z] {
                    for support in rows {
                        let mut p = PauliOperator::identity(7);
                        for &q in support {
                            p.set_letter(q, letter);
                        }
                        generators.push(p);
                    }
                }
                StabilizerCode {
                    name: "steane".into(),
                    n: 7,
                    k: 1,
                    generators,
                    logical_x: "XXXXXXX".parse().unwrap(),
                    logical_z: "ZZZZZZZ".parse().unwrap(),
                    claimed_distance: Some(3),
                }
            }
            BaseCode::Rm15 => {
                // Qubit j <-> point j+1 of F_2^4 \ {0}. X rows are the four
                // hyperplane indicators; Z rows add their pairwise products.
                let point = |j: usize| j + 1;
                let mut generators = Vec::new();
                for i in 0..4 {
                    let mut p = PauliOperator::identity(15);
                    for j in 0..15 {
                        if point(j) >> i & 1 == 1 {
                            p.set_letter(j, PauliLetter::X);
                        }
                    }
                    generators.push(p);
                }
                for i in 0..4 {
                    let mut p = PauliOperator::identity(15);
                    for j in 0..15 {
                        if point(j) >> i & 1 == 1 {
                            p.set_letter(j, PauliLetter::Z);
                        }
                    }
                    generators.push(p);
                }
                for i in 0..4 {
                    for l in i + 1..4 {
                        let mut p = PauliOperator::identity(15);
                        for j in 0..15 {
                            if point(j) >> i & 1 == 1 && point(j) >> l & 1 == 1 {
                                p.set_letter(j, PauliLetter::Z);
                            }
                        }
                        generators.push(p);
                    }
                }
                let mut lx = PauliOperator::identity(15);
                let mut lz = PauliOperator::identity(15);
                for j in 0..15 {
                    lx.set_letter(j, PauliLetter::X);
                    lz.set_letter(j, PauliLetter::Z);
                }
                StabilizerCode {
                    name: "rm15".into(),
                    n: 15,
                    k: 1,
                    generators,
                    logical_x: lx,
                    logical_z: lz,
                    claimed_distance: Some(3),
                }
            }
        };
        code.minimize_logicals();
        debug_assert!(code.validate().is_empty(), "base code failed validation");
        code
    }

    /// Replaces the stored logical operators by their lowest-weight,
    /// lexicographically-least coset representatives.
    pub fn minimize_logicals(&mut self) {
        self.logical_x = self.min_coset_rep(&self.logical_x.clone());
        self.logical_z = self.min_coset_rep(&self.logical_z.clone());
    }

    fn min_coset_rep(&self, logical: &PauliOperator) -> PauliOperator {
        let mut best = logical.clone();
        let mut best_key = (best.weight(), best.to_string());
        for elem in self.coset_iter(logical) {
            let key = (elem.weight(), elem.to_string());
            if key < best_key {
                best_key = key;
                best = elem;
            }
        }
        best
    }

    /// Iterates the whole coset `rep * <generators>` by a Gray-code walk.
    pub fn coset_iter(&self, rep: &PauliOperator) -> impl Iterator<Item = PauliOperator> + '_ {
        let m = self.generators.len();
        assert!(m < 63, "coset too large to enumerate");
        let mut current = rep.clone();
        let mut step = 0u64;
        let total = 1u64 << m;
        std::iter::from_fn(move || {
            if step >= total {
                return None;
            }
            let out = current.clone();
            step += 1;
            if step < total {
                let flip = step.trailing_zeros() as usize;
                current.mul_assign(&self.generators[flip]);
            }
            Some(out)
        })
    }

    /// Representative of a logical class (exact phase, minimal stored reps).
    pub fn logical_rep(&self, class: LogicalClass) -> PauliOperator {
        match class {
            LogicalClass::X => self.logical_x.clone(),
            LogicalClass::Z => self.logical_z.clone(),
            LogicalClass::Y => {
                let mut y = self.logical_x.multiply(&self.logical_z).unwrap();
                y.mul_raw_phase(1); // Y_L = i X_L Z_L
                y
            }
        }
    }

    /// All minimum-weight elements of a logical-class coset together with
    /// the weight itself.
    pub fn class_min_reps(&self, class: LogicalClass) -> (usize, Vec<PauliOperator>) {
        let rep = self.logical_rep(class);
        let mut min_w = usize::MAX;
        let mut reps = Vec::new();
        for elem in self.coset_iter(&rep) {
            let w = elem.weight();
            if w < min_w {
                min_w = w;
                reps.clear();
                reps.push(elem);
            } else if w == min_w {
                reps.push(elem);
            }
        }
        reps.sort_by_key(|p| p.to_string());
        reps.dedup_by_key(|p| p.symplectic_row());
        (min_w, reps)
    }

    /// Minimum-weight coset element whose support is exactly `support`,
    /// if one exists.
    pub fn coset_rep_on_support(
        &self,
        class: LogicalClass,
        support: &[usize],
    ) -> Option<PauliOperator> {
        let rep = self.logical_rep(class);
        let want: std::collections::BTreeSet<usize> = support.iter().copied().collect();
        let mut best: Option<PauliOperator> = None;
        for elem in self.coset_iter(&rep) {
            let supp: std::collections::BTreeSet<usize> = elem.support().into_iter().collect();
            if supp == want {
                let better = match &best {
                    None => true,
                    Some(b) => elem.to_string() < b.to_string(),
                };
                if better {
                    best = Some(elem);
                }
            }
        }
        best
    }

    /// Row space of the generators' symplectic vectors.
    pub fn generator_space(&self) -> RowSpace {
        RowSpace::from_rows(
            2 * self.n,
            self.generators.iter().map(|g| g.symplectic_row()).collect::<Vec<_>>().iter().map(|r| r.as_slice()),
        )
    }

    /// Checks every structural invariant; returns human-readable violations
    /// (empty means the code is well formed).
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if self.generators.len() != self.n - self.k {
            violations.push(format!(
                "expected {} generators for [[{},{}]], found {}",
                self.n - self.k,
                self.n,
                self.k,
                self.generators.len()
            ));
        }
        for (i, g) in self.generators.iter().enumerate() {
            if g.n() != self.n {
                violations.push(format!("generator {i} acts on {} qubits, code has {}", g.n(), self.n));
                return violations;
            }
            if g.phase() != 0 {
                violations.push(format!("generator {i} has sign i^{} (must be +1)", g.phase()));
            }
        }
        if self.logical_x.n() != self.n || self.logical_z.n() != self.n {
            violations.push("logical operator length mismatch".into());
            return violations;
        }
        for i in 0..self.generators.len() {
            for j in i + 1..self.generators.len() {
                if self.generators[i].symplectic_form(&self.generators[j]) != 0 {
                    violations.push(format!("anticommuting pair: generators {i} and {j}"));
                }
            }
        }
        let mut space = RowSpace::new(2 * self.n);
        for (i, g) in self.generators.iter().enumerate() {
            if !space.insert(&g.symplectic_row()) {
                violations.push(format!("dependent generators: generator {i} lies in the span of earlier ones"));
            }
        }
        for (label, l) in [("logical_x", &self.logical_x), ("logical_z", &self.logical_z)] {
            for (i, g) in self.generators.iter().enumerate() {
                if l.symplectic_form(g) != 0 {
                    violations.push(format!("{label} anticommutes with generator {i}"));
                }
            }
            if space.contains(&l.symplectic_row()) {
                violations.push(format!("{label} lies in the generator span"));
            }
        }
        if self.logical_x.symplectic_form(&self.logical_z) != 1 {
            violations.push("logical_x and logical_z do not anticommute".into());
        }
        violations
    }

    pub fn check(&self) -> Result<(), FtccError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(FtccError::InvalidCode(v.join("; ")))
        }
    }

    /// Anticommutation pattern of `e` against the generator list.
    pub fn syndrome(&self, e: &PauliOperator) -> Result<Syndrome, FtccError> {
        if e.n() != self.n {
            return Err(FtccError::LengthMismatch { left: e.n(), right: self.n });
        }
        let mut s = Syndrome::zero(self.generators.len());
        for (i, g) in self.generators.iter().enumerate() {
            if e.symplectic_form(g) == 1 {
                s.set_bit(i, true);
            }
        }
        Ok(s)
    }

    /// True iff the generator group row-reduces to pure-X plus pure-Z sets.
    pub fn is_css(&self) -> bool {
        let m = self.generators.len();
        let x_rank = RowSpace::from_rows(
            self.n,
            self.generators.iter().map(|g| g.x_words().to_vec()).collect::<Vec<_>>().iter().map(|r| r.as_slice()),
        )
        .rank();
        let z_rank = RowSpace::from_rows(
            self.n,
            self.generators.iter().map(|g| g.z_words().to_vec()).collect::<Vec<_>>().iter().map(|r| r.as_slice()),
        )
        .rank();
        // pure-Z subgroup has dim m - x_rank, pure-X subgroup m - z_rank
        (m - x_rank) + (m - z_rank) == m
    }

    /// The pure-X (or pure-Z) subgroup of the stabilizer group, as a list of
    /// generating elements. Only meaningful for CSS codes.
    pub fn pure_subgroup(&self, letter: PauliLetter) -> Vec<PauliOperator> {
        assert!(matches!(letter, PauliLetter::X | PauliLetter::Z));
        let mut out = Vec::new();
        let mut seen = RowSpace::new(2 * self.n);
        // eliminate the opposite component by Gaussian elimination over the group
        let opposite_words = |p: &PauliOperator| match letter {
            PauliLetter::X => p.z_words().to_vec(),
            _ => p.x_words().to_vec(),
        };
        let mut basis: Vec<PauliOperator> = Vec::new();
        let mut opp = RowSpace::new(self.n);
        for g in &self.generators {
            let w = opposite_words(g);
            if opp.contains(&w) {
                // combination of earlier rows cancels the opposite part
                if let Some(idxs) = opp.solve(&w) {
                    let mut p = g.clone();
                    for &i in &idxs {
                        p.mul_assign(&basis[i]);
                    }
                    if !p.is_identity_up_to_phase() && seen.insert(&p.symplectic_row()) {
                        out.push(p);
                    }
                }
            }
            opp.insert(&w);
            basis.push(g.clone());
        }
        out
    }

    /// Minimum-weight pure-X / pure-Z logical representative (CSS codes).
    pub fn pure_logical_min(&self, letter: PauliLetter) -> Option<PauliOperator> {
        let class = match letter {
            PauliLetter::X => LogicalClass::X,
            PauliLetter::Z => LogicalClass::Z,
            _ => return None,
        };
        let rep = self.logical_rep(class);
        let pure = |p: &PauliOperator| match letter {
            PauliLetter::X => p.z_words().iter().all(|&w| w == 0),
            _ => p.x_words().iter().all(|&w| w == 0),
        };
        let start = if pure(&rep) {
            rep
        } else {
            // scan the full coset for a pure representative
            self.coset_iter(&self.logical_rep(class)).find(|p| pure(p))?
        };
        let subgroup = self.pure_subgroup(letter);
        let mut best = start.clone();
        let mut best_key = (best.weight(), best.to_string());
        let m = subgroup.len();
        let mut current = start;
        for step in 1u64..(1 << m) {
            let flip = step.trailing_zeros() as usize;
            current.mul_assign(&subgroup[flip]);
            let key = (current.weight(), current.to_string());
            if key < best_key {
                best_key = key;
                best = current.clone();
            }
        }
        Some(best)
    }

    fn enum_cost(&self, w_max: usize, filter: TypeFilter) -> u64 {
        let letters: u64 = match filter {
            TypeFilter::Any => 3,
            _ => 1,
        };
        let mut total = 0u64;
        for w in 1..=w_max {
            let mut c = 1u128;
            for i in 0..w {
                c = c * (self.n as u128 - i as u128) / (i as u128 + 1);
            }
            let cost = c.saturating_mul(letters.pow(w as u32) as u128);
            total = total.saturating_add(cost.min(u64::MAX as u128) as u64);
        }
        total
    }

    /// Brute-force minimum weight (up to `w_max`) of an operator commuting
    /// with every generator yet outside the generator span, with its witness.
    pub fn min_logical_weight_witness(
        &self,
        w_max: usize,
        filter: TypeFilter,
        budget: u64,
    ) -> Result<Option<(usize, PauliOperator)>, FtccError> {
        let cost = self.enum_cost(w_max, filter);
        if cost > budget {
            return Err(FtccError::BudgetExceeded(format!(
                "distance sweep cost {cost} exceeds budget {budget}"
            )));
        }
        let space = self.generator_space();
        let letters: &[PauliLetter] = match filter {
            TypeFilter::Any => &[PauliLetter::X, PauliLetter::Y, PauliLetter::Z],
            TypeFilter::XOnly => &[PauliLetter::X],
            TypeFilter::ZOnly => &[PauliLetter::Z],
        };
        for w in 1..=w_max {
            if let Some(hit) = self.sweep_weight(w, letters, &space) {
                return Ok(Some((w, hit)));
            }
        }
        Ok(None)
    }

    /// As `min_logical_weight_witness`, returning only the weight.
    pub fn min_logical_weight(
        &self,
        w_max: usize,
        filter: TypeFilter,
        budget: u64,
    ) -> Result<Option<usize>, FtccError> {
        Ok(self.min_logical_weight_witness(w_max, filter, budget)?.map(|(w, _)| w))
    }

    fn sweep_weight(
        &self,
        w: usize,
        letters: &[PauliLetter],
        space: &RowSpace,
    ) -> Option<PauliOperator> {
        let mut support: Vec<usize> = (0..w).collect();
        let n = self.n;
        loop {
            if let Some(hit) = self.sweep_letters(&support, letters, space) {
                return Some(hit);
            }
            // next combination
            let mut i = w;
            loop {
                if i == 0 {
                    return None;
                }
                i -= 1;
                if support[i] != i + n - w {
                    support[i] += 1;
                    for j in i + 1..w {
                        support[j] = support[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    fn sweep_letters(
        &self,
        support: &[usize],
        letters: &[PauliLetter],
        space: &RowSpace,
    ) -> Option<PauliOperator> {
        let w = support.len();
        let count = letters.len().pow(w as u32);
        let mut p = PauliOperator::identity(self.n);
        for idx in 0..count {
            let mut rem = idx;
            for &q in support {
                p.set_letter(q, letters[rem % letters.len()]);
                rem /= letters.len();
            }
            if self.generators.iter().all(|g| p.symplectic_form(g) == 0)
                && !space.contains(&p.symplectic_row())
            {
                return Some(p.clone());
            }
        }
        for &q in support {
            p.set_letter(q, PauliLetter::I);
        }
        None
    }

    /// True iff some operator supported entirely on `subset` commutes with
    /// all generators and is not in the generator span. Computed by rank
    /// comparison, never enumeration.
    pub fn supports_nontrivial_logical(&self, subset: &[usize]) -> bool {
        let in_set: std::collections::HashSet<usize> = subset.iter().copied().collect();
        let complement: Vec<usize> = (0..self.n).filter(|q| !in_set.contains(q)).collect();
        // dim of operators on the subset commuting with every generator
        let r1 = RowSpace::from_rows(
            2 * subset.len(),
            self.generators
                .iter()
                .map(|g| g.restrict(subset).symplectic_row())
                .collect::<Vec<_>>()
                .iter()
                .map(|r| r.as_slice()),
        )
        .rank();
        let normalizer_dim = 2 * subset.len() - r1;
        // dim of stabilizer elements supported inside the subset
        let r2 = RowSpace::from_rows(
            2 * complement.len(),
            self.generators
                .iter()
                .map(|g| g.restrict(&complement).symplectic_row())
                .collect::<Vec<_>>()
                .iter()
                .map(|r| r.as_slice()),
        )
        .rank();
        let stab_dim = self.generators.len() - r2;
        normalizer_dim > stab_dim
    }
}

/// Phase handling for group-membership checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMode {
    /// Symplectic span membership only.
    Ignore,
    /// Membership with the exact sign reproduced by some generator product.
    Exact,
}

/// Stabilizer-group membership of `p` in the group generated by
/// `generators`, honoring `mode`.
pub fn in_group(
    p: &PauliOperator,
    generators: &[PauliOperator],
    mode: PhaseMode,
) -> Result<bool, FtccError> {
    for g in generators {
        if g.n() != p.n() {
            return Err(FtccError::LengthMismatch { left: g.n(), right: p.n() });
        }
    }
    let rows: Vec<Vec<u64>> = generators.iter().map(|g| g.symplectic_row()).collect();
    let space = RowSpace::from_rows(2 * p.n(), rows.iter().map(|r| r.as_slice()));
    match space.solve(&p.symplectic_row()) {
        None => Ok(false),
        Some(idxs) => match mode {
            PhaseMode::Ignore => Ok(true),
            PhaseMode::Exact => {
                let mut prod = PauliOperator::identity(p.n());
                for &i in &idxs {
                    prod.mul_assign(&generators[i]);
                }
                Ok(prod == *p)
            }
        },
    }
}

/// JSON code-file schema.
#[derive(Debug, Serialize, Deserialize)]
pub struct CodeFile {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub stabilizers: Vec<String>,
    pub logical_x: String,
    pub logical_z: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claimed_distance: Option<usize>,
}

impl CodeFile {
    pub fn from_code(code: &StabilizerCode) -> CodeFile {
        CodeFile {
            name: code.name.clone(),
            n: code.n,
            k: code.k,
            stabilizers: code.generators.iter().map(|g| g.to_string()).collect(),
            logical_x: code.logical_x.to_string(),
            logical_z: code.logical_z.to_string(),
            claimed_distance: code.claimed_distance,
        }
    }

    /// Parses and validates; invalid files are rejected.
    pub fn into_code(self) -> Result<StabilizerCode, FtccError> {
        let code = StabilizerCode {
            name: self.name,
            n: self.n,
            k: self.k,
            generators: self
                .stabilizers
                .iter()
                .map(|s| s.parse())
                .collect::<Result<Vec<_>, _>>()?,
            logical_x: self.logical_x.parse()?,
            logical_z: self.logical_z.parse()?,
            claimed_distance: self.claimed_distance,
        };
        code.check()?;
        Ok(code)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::parse_pauli;

    #[test]
    fn base_codes_load_and_validate() {
        let fq = StabilizerCode::base(BaseCode::FiveQubit);
        assert_eq!((fq.n, fq.generators.len()), (5, 4));
        let st = StabilizerCode::base(BaseCode::Steane);
        assert_eq!((st.n, st.generators.len()), (7, 6));
        assert!(st.is_css());
        let rm = StabilizerCode::base(BaseCode::Rm15);
        assert_eq!((rm.n, rm.generators.len()), (15, 14));
        for c in [&fq, &st, &rm] {
            assert!(c.validate().is_empty(), "{}: {:?}", c.name, c.validate());
        }
        assert!(!fq.is_css());
        assert!(rm.is_css());
    }

    #[test]
    fn validate_catches_tampering() {
        let mut st = StabilizerCode::base(BaseCode::Steane);
        st.generators[0] = parse_pauli("XIIIIII").unwrap();
        let v = st.validate();
        assert!(v.iter().any(|m| m.contains("anticommuting pair")), "{v:?}");

        let mut st2 = StabilizerCode::base(BaseCode::Steane);
        st2.generators[5] = st2.generators[0].clone();
        let v2 = st2.validate();
        assert!(v2.iter().any(|m| m.contains("dependent generators")), "{v2:?}");
    }

    #[test]
    fn syndrome_basics() {
        let st = StabilizerCode::base(BaseCode::Steane);
        let id = PauliOperator::identity(7);
        assert!(st.syndrome(&id).unwrap().is_zero());

        let prod = st.generators[0].multiply(&st.generators[3]).unwrap();
        assert!(st.syndrome(&prod).unwrap().is_zero());

        // distinct nonzero syndromes for each single-qubit X
        let mut seen = std::collections::HashSet::new();
        for q in 0..7 {
            let e = PauliOperator::single(7, q, PauliLetter::X);
            let s = st.syndrome(&e).unwrap();
            assert!(!s.is_zero());
            assert!(seen.insert(s.to_string()));
        }
    }

    #[test]
    fn syndrome_linearity() {
        let codes = [
            StabilizerCode::base(BaseCode::FiveQubit),
            StabilizerCode::base(BaseCode::Steane),
            StabilizerCode::base(BaseCode::Rm15),
        ];
        let mut state = 0x12345678u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as usize
        };
        for code in &codes {
            for _ in 0..1000 {
                let mut e = PauliOperator::identity(code.n);
                let mut f = PauliOperator::identity(code.n);
                for q in 0..code.n {
                    for p in [&mut e, &mut f] {
                        let l = match next() % 4 {
                            0 => PauliLetter::I,
                            1 => PauliLetter::X,
                            2 => PauliLetter::Y,
                            _ => PauliLetter::Z,
                        };
                        p.set_letter(q, l);
                    }
                }
                let lhs = code.syndrome(&e.multiply(&f).unwrap()).unwrap();
                let rhs = code.syndrome(&e).unwrap().xor(&code.syndrome(&f).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    // Independent oracle: recursive scan over all operators of weight <= w,
    // in a different enumeration order than the production sweep.
    fn oracle_min_logical(code: &StabilizerCode, w_max: usize, filter: TypeFilter) -> Option<usize> {
        fn rec(
            code: &StabilizerCode,
            space: &RowSpace,
            letters: &[PauliLetter],
            p: &mut PauliOperator,
            from: usize,
            left: usize,
            best: &mut Option<usize>,
        ) {
            let w = p.weight();
            if w > 0 && best.map_or(true, |b| w < b)
                && code.generators.iter().all(|g| p.symplectic_form(g) == 0)
                && !space.contains(&p.symplectic_row())
            {
                *best = Some(w);
            }
            if left == 0 || from >= code.n {
                return;
            }
            for q in from..code.n {
                for &l in letters {
                    p.set_letter(q, l);
                    rec(code, space, letters, p, q + 1, left - 1, best);
                    p.set_letter(q, PauliLetter::I);
                }
            }
        }
        let letters: &[PauliLetter] = match filter {
            TypeFilter::Any => &[PauliLetter::X, PauliLetter::Y, PauliLetter::Z],
            TypeFilter::XOnly => &[PauliLetter::X],
            TypeFilter::ZOnly => &[PauliLetter::Z],
        };
        let space = code.generator_space();
        let mut best = None;
        let mut p = PauliOperator::identity(code.n);
        rec(code, &space, letters, &mut p, 0, w_max, &mut best);
        best
    }

    #[test]
    fn base_code_distances() {
        let fq = StabilizerCode::base(BaseCode::FiveQubit);
        assert_eq!(fq.min_logical_weight(3, TypeFilter::Any, DEFAULT_ENUM_BUDGET).unwrap(), Some(3));
        assert_eq!(oracle_min_logical(&fq, 3, TypeFilter::Any), Some(3));

        let st = StabilizerCode::base(BaseCode::Steane);
        assert_eq!(st.min_logical_weight(3, TypeFilter::Any, DEFAULT_ENUM_BUDGET).unwrap(), Some(3));
        assert_eq!(oracle_min_logical(&st, 3, TypeFilter::Any), Some(3));

        let rm = StabilizerCode::base(BaseCode::Rm15);
        assert_eq!(rm.min_logical_weight(3, TypeFilter::Any, DEFAULT_ENUM_BUDGET).unwrap(), Some(3));
        assert_eq!(rm.min_logical_weight(3, TypeFilter::ZOnly, DEFAULT_ENUM_BUDGET).unwrap(), Some(3));
        assert_eq!(rm.min_logical_weight(7, TypeFilter::XOnly, DEFAULT_ENUM_BUDGET).unwrap(), Some(7));
        assert_eq!(oracle_min_logical(&rm, 3, TypeFilter::ZOnly), Some(3));
        // no X-only logical below weight 7
        assert_eq!(rm.min_logical_weight(6, TypeFilter::XOnly, DEFAULT_ENUM_BUDGET).unwrap(), None);
    }

    #[test]
    fn weight_one_errors_have_unique_syndromes() {
        for which in [BaseCode::FiveQubit, BaseCode::Steane, BaseCode::Rm15] {
            let code = StabilizerCode::base(which);
            let mut seen = std::collections::HashMap::new();
            for q in 0..code.n {
                for l in [PauliLetter::X, PauliLetter::Y, PauliLetter::Z] {
                    let e = PauliOperator::single(code.n, q, l);
                    let s = code.syndrome(&e).unwrap().to_string();
                    assert_ne!(s, "0".repeat(code.generators.len()), "{which:?} {q} {l:?}");
                    if let Some(prev) = seen.insert(s, (q, l)) {
                        panic!("{which:?}: syndrome collision between {prev:?} and {:?}", (q, l));
                    }
                }
            }
        }
    }

    #[test]
    fn budget_guard_trips() {
        let rm = StabilizerCode::base(BaseCode::Rm15);
        assert!(matches!(
            rm.min_logical_weight(15, TypeFilter::Any, 1000),
            Err(FtccError::BudgetExceeded(_))
        ));
    }

    #[test]
    fn subset_logical_checks() {
        let st = StabilizerCode::base(BaseCode::Steane);
        let lz_support = st.logical_z.support();
        assert!(st.supports_nontrivial_logical(&lz_support));
        assert!(!st.supports_nontrivial_logical(&[0]));
        let all: Vec<usize> = (0..7).collect();
        assert!(st.supports_nontrivial_logical(&all));

        // agreement with the brute-force witness
        let (w, witness) = st
            .min_logical_weight_witness(3, TypeFilter::Any, DEFAULT_ENUM_BUDGET)
            .unwrap()
            .unwrap();
        assert_eq!(w, 3);
        assert!(st.supports_nontrivial_logical(&witness.support()));
    }

    #[test]
    fn in_group_modes() {
        let st = StabilizerCode::base(BaseCode::Steane);
        let prod = st.generators[1].multiply(&st.generators[4]).unwrap();
        assert!(in_group(&prod, &st.generators, PhaseMode::Ignore).unwrap());
        assert!(in_group(&prod, &st.generators, PhaseMode::Exact).unwrap());
        assert!(!in_group(&st.logical_z, &st.generators, PhaseMode::Ignore).unwrap());
        assert!(in_group(&PauliOperator::identity(7), &st.generators, PhaseMode::Ignore).unwrap());

        // a sign flip is caught only in exact mode
        let mut flipped = prod.clone();
        flipped.mul_raw_phase(2);
        assert!(in_group(&flipped, &st.generators, PhaseMode::Ignore).unwrap());
        assert!(!in_group(&flipped, &st.generators, PhaseMode::Exact).unwrap());
    }

    #[test]
    fn in_group_invariant_under_row_ops() {
        let st = StabilizerCode::base(BaseCode::Steane);
        let mut alt = st.generators.clone();
        let combined = alt[0].multiply(&alt[1]).unwrap();
        alt[0] = combined;
        for probe in [&st.logical_x, &st.logical_z, &st.generators[2]] {
            assert_eq!(
                in_group(probe, &st.generators, PhaseMode::Ignore).unwrap(),
                in_group(probe, &alt, PhaseMode::Ignore).unwrap()
            );
        }
    }

    #[test]
    fn stored_logical_reps_are_minimal() {
        let st = StabilizerCode::base(BaseCode::Steane);
        assert_eq!(st.logical_x.weight(), 3);
        assert_eq!(st.logical_z.weight(), 3);
        let fq = StabilizerCode::base(BaseCode::FiveQubit);
        assert_eq!(fq.logical_x.weight(), 3);
        assert_eq!(fq.logical_z.weight(), 3);
        let rm = StabilizerCode::base(BaseCode::Rm15);
        assert_eq!(rm.logical_z.weight(), 3);
        assert_eq!(rm.logical_x.weight(), 7);
        // representatives keep the defining commutation relations
        for c in [&st, &fq, &rm] {
            assert_eq!(c.logical_x.symplectic_form(&c.logical_z), 1);
        }
    }

    #[test]
    fn paper_active_sets_have_representatives() {
        // {q1,q2,q7} for Steane, pure Z
        let st = StabilizerCode::base(BaseCode::Steane);
        let rep = st.coset_rep_on_support(LogicalClass::Z, &[0, 1, 6]).unwrap();
        assert_eq!(rep.to_string(), "ZZIIIIZ");
        // {q1,q3,q5} for the 5-qubit code; the exact element is -XIZIX
        let fq = StabilizerCode::base(BaseCode::FiveQubit);
        let rep5 = fq.coset_rep_on_support(LogicalClass::Z, &[0, 2, 4]).unwrap();
        assert_eq!(rep5.to_string(), "-XIZIX");
    }

    #[test]
    fn code_file_roundtrip_and_rejection() {
        let st = StabilizerCode::base(BaseCode::Steane);
        let json = serde_json::to_string(&CodeFile::from_code(&st)).unwrap();
        let back: CodeFile = serde_json::from_str(&json).unwrap();
        let code = back.into_code().unwrap();
        assert_eq!(code.n, 7);

        let mut bad = CodeFile::from_code(&st);
        bad.stabilizers[0] = "XIIIIII".into();
        assert!(bad.into_code().is_err());
    }

    #[test]
    fn pure_logical_minima() {
        let rm = StabilizerCode::base(BaseCode::Rm15);
        let px = rm.pure_logical_min(PauliLetter::X).unwrap();
        assert_eq!(px.weight(), 7);
        assert!(px.z_words().iter().all(|&w| w == 0));
        let pz = rm.pure_logical_min(PauliLetter::Z).unwrap();
        assert_eq!(pz.weight(), 3);
        let st = StabilizerCode::base(BaseCode::Steane);
        assert_eq!(st.pure_logical_min(PauliLetter::Z).unwrap().weight(), 3);
        assert_eq!(st.pure_logical_min(PauliLetter::X).unwrap().weight(), 3);
    }
}
