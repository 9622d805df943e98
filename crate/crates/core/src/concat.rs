//! HCC / ENUCC concatenated-code builders and gadget lifting.
//!
//! A `ConcatSpec` assigns each outer-code qubit either a bare physical
//! qubit or an inner code block; `build` flattens the result into a
//! validated stabilizer code. Gate plans are assembled at the outer level
//! and lifted block-wise: transversal pieces become verified qubit-wise
//! implementations, outer CNOTs between blocks of different codes become
//! pieceable round-robin circuits with intermediate error correction, and
//! the pieces the code-switching literature treats as black boxes stay
//! opaque gates with coarse fault semantics.

use serde::{Deserialize, Serialize};

use crate::circuit::{BlockLayout, Circuit, GateKind};
use crate::code::{BaseCode, LogicalClass, StabilizerCode, TypeFilter};
use crate::error::FtccError;
use crate::gadget::{
    build_cross_code_cnot, build_ckz_gadget, build_permutation_h_5q, default_piece_count,
    transversal_impl, ActiveSet, TransversalImpl,
};
use crate::pauli::{PauliLetter, PauliOperator};

/// Concatenation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Hcc,
    Enucc,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Hcc => "hcc",
            Scheme::Enucc => "enucc",
        }
    }
}

/// Per-outer-qubit assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitAssignment {
    Bare,
    Encoded(BaseCode),
}

/// Outer code, case tag and per-qubit assignment for one concatenated code.
#[derive(Debug, Clone)]
pub struct ConcatSpec {
    pub name: String,
    pub scheme: Scheme,
    pub c1: BaseCode,
    /// 1 = non-active bare, 2 = non-active in C1, 3 = non-active in C2.
    /// Case 2 with C1 = C2 is canonicalized to 3.
    pub case_tag: u8,
    pub assignment: Vec<QubitAssignment>,
    /// Outer active set (the coupled qubits of the C^kZ gadget) and target.
    pub active: ActiveSet,
}

/// JSON form: named spec plus optional overrides.
#[derive(Debug, Serialize, Deserialize)]
pub struct ConcatSpecFile {
    pub scheme: Scheme,
    pub c1: BaseCode,
    pub case: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment_overrides: Option<Vec<(usize, QubitAssignment)>>,
}

impl ConcatSpecFile {
    /// Resolves the file into a concrete spec; overrides replace the
    /// per-qubit assignment and are then re-checked by the builder.
    pub fn into_spec(self) -> Result<ConcatSpec, FtccError> {
        let mut spec = ConcatSpec::named(self.scheme, self.c1, self.case)?;
        if let Some(overrides) = self.assignment_overrides {
            for (q, a) in overrides {
                if q >= spec.assignment.len() {
                    return Err(FtccError::Concat(format!("override qubit {q} out of range")));
                }
                spec.assignment[q] = a;
            }
            spec.name.push_str("-custom");
        }
        Ok(spec)
    }
}

fn paper_active(c1: BaseCode) -> ActiveSet {
    match c1 {
        // active {q1, q2, q7}, target q7
        BaseCode::Steane => ActiveSet::new(vec![0, 1, 6], 6),
        // active {q1, q3, q5}, target q3
        BaseCode::FiveQubit => ActiveSet::new(vec![0, 2, 4], 2),
        BaseCode::Rm15 => panic!("rm15 is not used as an outer code"),
    }
}

impl ConcatSpec {
    /// Builds the named spec `scheme-c1-case`; Case 2 with Steane outer is
    /// canonicalized to Case 3.
    pub fn named(scheme: Scheme, c1: BaseCode, case: u8) -> Result<ConcatSpec, FtccError> {
        if !matches!(c1, BaseCode::Steane | BaseCode::FiveQubit) {
            return Err(FtccError::Concat("outer code must be steane or five_qubit".into()));
        }
        if !(1..=3).contains(&case) {
            return Err(FtccError::Concat(format!("case must be 1..3, got {case}")));
        }
        let case_tag = if c1 == BaseCode::Steane && case == 2 { 3 } else { case };
        let active = paper_active(c1);
        let n1 = StabilizerCode::base(c1).n;
        let mut assignment = Vec::with_capacity(n1);
        for q in 0..n1 {
            let a = if active.qubits.contains(&q) {
                match scheme {
                    Scheme::Hcc => QubitAssignment::Encoded(BaseCode::Steane),
                    Scheme::Enucc => {
                        if q == active.target {
                            QubitAssignment::Encoded(BaseCode::Rm15)
                        } else {
                            QubitAssignment::Encoded(BaseCode::Steane)
                        }
                    }
                }
            } else {
                match case_tag {
                    1 => QubitAssignment::Bare,
                    2 => QubitAssignment::Encoded(c1),
                    _ => QubitAssignment::Encoded(BaseCode::Steane),
                }
            };
            assignment.push(a);
        }
        let name = format!("{}-{}-{}", scheme.as_str(), c1.as_str(), case_tag);
        Ok(ConcatSpec { name, scheme, c1, case_tag, assignment, active })
    }

    /// Parses a catalog name like `hcc-steane-1` or `enucc-five_qubit-3`.
    pub fn parse_name(name: &str) -> Result<ConcatSpec, FtccError> {
        let err = || FtccError::Usage(format!("unknown spec name {name:?}"));
        let (scheme, rest) = if let Some(r) = name.strip_prefix("hcc-") {
            (Scheme::Hcc, r)
        } else if let Some(r) = name.strip_prefix("enucc-") {
            (Scheme::Enucc, r)
        } else {
            return Err(err());
        };
        let (c1s, case) = rest.rsplit_once('-').ok_or_else(err)?;
        let c1 = BaseCode::parse(c1s)?;
        let case: u8 = case.parse().map_err(|_| err())?;
        ConcatSpec::named(scheme, c1, case)
    }

    pub fn outer_code(&self) -> StabilizerCode {
        StabilizerCode::base(self.c1)
    }

    fn check_invariants(&self) -> Result<(), FtccError> {
        for &q in &self.active.qubits {
            match self.assignment[q] {
                QubitAssignment::Bare => {
                    return Err(FtccError::Concat(format!("active qubit {q} left unencoded")))
                }
                QubitAssignment::Encoded(code) => {
                    if self.scheme == Scheme::Enucc {
                        if q == self.active.target && code != BaseCode::Rm15 {
                            return Err(FtccError::Concat(
                                "ENUCC target must carry the code with transversal rotations".into(),
                            ));
                        }
                        if q != self.active.target && code != BaseCode::Steane {
                            return Err(FtccError::Concat(
                                "ENUCC non-target active qubits must carry the CSS inner code".into(),
                            ));
                        }
                    } else if code != BaseCode::Steane {
                        return Err(FtccError::Concat(
                            "HCC active qubits must carry the CSS inner code".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The ten named concatenated codes in catalog order.
pub fn named_specs() -> Vec<ConcatSpec> {
    let mut out = Vec::new();
    for (scheme, c1, cases) in [
        (Scheme::Hcc, BaseCode::Steane, vec![1u8, 3]),
        (Scheme::Hcc, BaseCode::FiveQubit, vec![1, 2, 3]),
        (Scheme::Enucc, BaseCode::Steane, vec![1, 3]),
        (Scheme::Enucc, BaseCode::FiveQubit, vec![1, 2, 3]),
    ] {
        for case in cases {
            out.push(ConcatSpec::named(scheme, c1, case).unwrap());
        }
    }
    out
}

/// One inner code block of a flattened composite.
#[derive(Debug, Clone)]
pub struct LiftedBlock {
    pub code: StabilizerCode,
    pub offset: usize,
    pub copy: usize,
    pub outer_qubit: usize,
}

/// A flattened composite of `copies` side-by-side instances of one
/// concatenated code (copies > 1 appear for multi-logical-qubit gates).
#[derive(Debug, Clone)]
pub struct Composite {
    pub spec: ConcatSpec,
    pub copies: usize,
    pub n: usize,
    /// Physical range of each (copy, outer qubit).
    pub qubit_map: Vec<Vec<std::ops::Range<usize>>>,
    pub blocks: Vec<LiftedBlock>,
    /// block id for (copy, outer qubit), if encoded.
    pub block_of: Vec<Vec<Option<usize>>>,
    pub bare_qubits: Vec<usize>,
    /// Flattened generators: per-block inner generators first (grouped),
    /// then the lifted outer generators of every copy.
    pub generators: Vec<PauliOperator>,
    pub block_gen_range: Vec<std::ops::Range<usize>>,
    pub outer_gen_start: usize,
    /// Lifted logical pair per copy.
    pub logicals: Vec<(PauliOperator, PauliOperator)>,
}

impl Composite {
    pub fn build(spec: &ConcatSpec, copies: usize) -> Result<Composite, FtccError> {
        spec.check_invariants()?;
        let outer = spec.outer_code();
        let n1 = outer.n;
        let per_copy: usize = spec
            .assignment
            .iter()
            .map(|a| match a {
                QubitAssignment::Bare => 1,
                QubitAssignment::Encoded(c) => StabilizerCode::base(*c).n,
            })
            .sum();
        let n = per_copy * copies;
        let mut qubit_map = vec![Vec::with_capacity(n1); copies];
        let mut blocks = Vec::new();
        let mut block_of = vec![vec![None; n1]; copies];
        let mut bare_qubits = Vec::new();
        let mut offset = 0usize;
        for copy in 0..copies {
            for (q, a) in spec.assignment.iter().enumerate() {
                match a {
                    QubitAssignment::Bare => {
                        qubit_map[copy].push(offset..offset + 1);
                        bare_qubits.push(offset);
                        offset += 1;
                    }
                    QubitAssignment::Encoded(c) => {
                        let code = StabilizerCode::base(*c);
                        qubit_map[copy].push(offset..offset + code.n);
                        block_of[copy][q] = Some(blocks.len());
                        blocks.push(LiftedBlock { code, offset, copy, outer_qubit: q });
                        offset += StabilizerCode::base(*c).n;
                    }
                }
            }
        }
        debug_assert_eq!(offset, n);
        let mut generators = Vec::new();
        let mut block_gen_range = Vec::new();
        for b in &blocks {
            let start = generators.len();
            for g in &b.code.generators {
                generators.push(g.embed(n, b.offset));
            }
            block_gen_range.push(start..generators.len());
        }
        let outer_gen_start = generators.len();
        let mut composite = Composite {
            spec: spec.clone(),
            copies,
            n,
            qubit_map,
            blocks,
            block_of,
            bare_qubits,
            generators,
            block_gen_range,
            outer_gen_start,
            logicals: Vec::new(),
        };
        for copy in 0..copies {
            for g in &outer.generators {
                let lifted = composite.lift_operator(copy, g)?;
                composite.generators.push(lifted);
            }
        }
        for copy in 0..copies {
            let lx = composite.lift_operator(copy, &outer.logical_x)?;
            let lz = composite.lift_operator(copy, &outer.logical_z)?;
            composite.logicals.push((lx, lz));
        }
        Ok(composite)
    }

    /// Per-qubit substitution of an outer operator: encoded qubits take the
    /// block's stored logical representative, bare qubits keep the letter.
    /// The displayed phase of the input is preserved.
    pub fn lift_operator(&self, copy: usize, p: &PauliOperator) -> Result<PauliOperator, FtccError> {
        let n1 = self.spec.assignment.len();
        if p.n() != n1 {
            return Err(FtccError::LengthMismatch { left: p.n(), right: n1 });
        }
        let mut out = PauliOperator::identity(self.n);
        for q in 0..n1 {
            let letter = p.letter(q);
            if letter == PauliLetter::I {
                continue;
            }
            let range = &self.qubit_map[copy][q];
            match self.spec.assignment[q] {
                QubitAssignment::Bare => {
                    let f = PauliOperator::single(1, 0, letter).embed(self.n, range.start);
                    out.mul_assign(&f);
                }
                QubitAssignment::Encoded(c) => {
                    let code = &self.blocks[self.block_of[copy][q].unwrap()].code;
                    let _ = c;
                    let factor = match letter {
                        PauliLetter::X => code.logical_x.clone(),
                        PauliLetter::Z => code.logical_z.clone(),
                        PauliLetter::Y => {
                            let mut y = code.logical_x.multiply(&code.logical_z)?;
                            y.mul_raw_phase(1);
                            y
                        }
                        PauliLetter::I => unreachable!(),
                    };
                    out.mul_assign(&factor.embed(self.n, range.start));
                }
            }
        }
        // preserve the displayed sign of the outer operator
        let adjust = (4 + p.phase() - out.phase()) % 4;
        out.mul_raw_phase(adjust);
        Ok(out)
    }

    /// The flattened composite as one validated stabilizer code (only for
    /// copies = 1, where k = 1).
    pub fn as_stabilizer_code(&self) -> StabilizerCode {
        assert_eq!(self.copies, 1);
        StabilizerCode {
            name: self.spec.name.clone(),
            n: self.n,
            k: 1,
            generators: self.generators.clone(),
            logical_x: self.logicals[0].0.clone(),
            logical_z: self.logicals[0].1.clone(),
            claimed_distance: Some(if self.spec.case_tag == 1 { 5 } else { 9 }),
        }
    }

    pub fn block_layouts(&self) -> Vec<BlockLayout> {
        self.blocks
            .iter()
            .map(|b| BlockLayout { code: b.code.clone(), offset: b.offset })
            .collect()
    }
}

/// Single-copy concatenated code (the `ConcatCode` of the data model).
#[derive(Debug, Clone)]
pub struct ConcatCode {
    pub composite: Composite,
    pub code: StabilizerCode,
}

impl ConcatCode {
    pub fn build(spec: &ConcatSpec) -> Result<ConcatCode, FtccError> {
        let composite = Composite::build(spec, 1)?;
        let code = composite.as_stabilizer_code();
        code.check()?;
        Ok(ConcatCode { composite, code })
    }

    pub fn physical_n(&self) -> usize {
        self.composite.n
    }
}

/// Lowering strategy recorded per outer gate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GateStrategy {
    TransversalLift,
    CrossCodeCnot,
    SwitchRotation,
    OpaqueBlockGate,
    Bare,
    PauliLift,
    BlockPermutation,
}

/// An outer-level gate list partitioned into S1 (non-transversal on the
/// CSS inner code C2) and S2 (transversal on C2), with per-gate lowering.
#[derive(Debug, Clone)]
pub struct GadgetPlan {
    pub gate: GateKind,
    pub copies: usize,
    pub level1: Circuit,
    /// Indices of level1 gates classified non-transversal on C2.
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
}

/// True when `kind` has a verified qubit-wise implementation on `code`.
fn inner_transversal(code: BaseCode, kind: &GateKind) -> bool {
    use std::collections::HashMap;
    use std::sync::OnceLock;
    static CACHE: OnceLock<std::sync::Mutex<HashMap<(BaseCode, String), bool>>> = OnceLock::new();
    let key = (code, format!("{kind:?}"));
    let cache = CACHE.get_or_init(|| std::sync::Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&key) {
        return v;
    }
    let sc = StabilizerCode::base(code);
    let v = match kind {
        GateKind::X | GateKind::Y | GateKind::Z => true,
        GateKind::Cnot => sc.is_css(),
        GateKind::Cz => crate::gadget::ckz_transversal_ok(&sc, 1, std::f64::consts::PI)
            || code == BaseCode::Steane,
        GateKind::Ccz => crate::gadget::ckz_transversal_ok(&sc, 2, std::f64::consts::PI),
        GateKind::T | GateKind::Tdg | GateKind::H | GateKind::S | GateKind::Sdg | GateKind::K
        | GateKind::Kdg => transversal_impl(&sc, kind).is_some(),
        GateKind::ZRot(t) => {
            // Clifford angles reduce to S/Z; π/4 to the T table
            let t = t.rem_euclid(2.0 * std::f64::consts::PI);
            if (t - std::f64::consts::FRAC_PI_4).abs() < 1e-12 {
                transversal_impl(&sc, &GateKind::T).is_some()
            } else if (t - std::f64::consts::FRAC_PI_2).abs() < 1e-12
                || (t - std::f64::consts::PI).abs() < 1e-12
            {
                transversal_impl(&sc, &GateKind::S).is_some()
            } else {
                false
            }
        }
        _ => false,
    };
    cache.lock().unwrap().insert(key, v);
    v
}

/// Gadget cache: the oracle check inside `build_ckz_gadget` is expensive at
/// 21 qubits, so verified gadgets are memoized per construction key.
fn cached_ckz_gadget(
    code: &StabilizerCode,
    k: usize,
    theta: f64,
    active: &ActiveSet,
) -> Result<crate::gadget::CkzGadget, FtccError> {
    use std::collections::HashMap;
    use std::sync::{Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<String, crate::gadget::CkzGadget>>> = OnceLock::new();
    let key = format!("{}|{}|{:.12}|{:?}|{}", code.name, k, theta, active.qubits, active.target);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(g) = cache.lock().unwrap().get(&key) {
        return Ok(g.clone());
    }
    let sets = vec![active.clone(); k + 1];
    let g = build_ckz_gadget(code, k, theta, Some(&sets))?;
    cache.lock().unwrap().insert(key, g.clone());
    Ok(g)
}

fn cached_permutation_h() -> Result<crate::gadget::PermutationH, FtccError> {
    use std::sync::OnceLock;
    static CACHE: OnceLock<Result<crate::gadget::PermutationH, String>> = OnceLock::new();
    CACHE
        .get_or_init(|| build_permutation_h_5q().map_err(|e| e.to_string()))
        .clone()
        .map_err(FtccError::Gadget)
}

/// Number of code copies (logical qubits) a gate kind acts on.
pub fn gate_copies(gate: &GateKind) -> usize {
    match gate {
        GateKind::Cz | GateKind::Cnot => 2,
        GateKind::Ccz => 3,
        GateKind::Ckz(_) => panic!("use explicit arity for CKZ plans"),
        _ => 1,
    }
}

/// Assembles the outer-level gate list for `gate` on the spec's outer code,
/// with the S1/S2 partition taken against the CSS inner code C2.
pub fn assemble_gate_plan(spec: &ConcatSpec, gate: &GateKind) -> Result<GadgetPlan, FtccError> {
    let c1 = spec.outer_code();
    let n1 = c1.n;
    let copies = gate_copies(gate);
    let theta_of = |g: &GateKind| -> Option<(usize, f64)> {
        match g {
            GateKind::T => Some((0, std::f64::consts::FRAC_PI_4)),
            GateKind::S => Some((0, std::f64::consts::FRAC_PI_2)),
            GateKind::Cz => Some((1, std::f64::consts::PI)),
            GateKind::Ccz => Some((2, std::f64::consts::PI)),
            GateKind::ZRot(t) => Some((0, *t)),
            _ => None,
        }
    };
    let level1: Circuit = match (spec.c1, gate) {
        // transversal on the Steane outer code
        (BaseCode::Steane, GateKind::H | GateKind::S | GateKind::K) => {
            let imp = transversal_impl(&c1, gate)
                .ok_or_else(|| FtccError::Gadget(format!("{} not transversal on c1", gate.name())))?;
            let mut c = Circuit::new(n1);
            imp.emit(n1, 0, n1, &mut c);
            c
        }
        (BaseCode::Steane, GateKind::Cz) => {
            let mut c = Circuit::new(2 * n1);
            for q in 0..n1 {
                c.push(GateKind::Cz, vec![q, n1 + q]);
            }
            c
        }
        (BaseCode::FiveQubit, GateKind::K) => {
            let imp = transversal_impl(&c1, gate)
                .ok_or_else(|| FtccError::Gadget("K not transversal on c1".into()))?;
            let mut c = Circuit::new(n1);
            imp.emit(n1, 0, n1, &mut c);
            c
        }
        (BaseCode::FiveQubit, GateKind::H) => {
            check_permutation_applicable(spec)?;
            cached_permutation_h()?.circuit
        }
        (BaseCode::FiveQubit, GateKind::S) if check_permutation_applicable(spec).is_ok() => {
            // S = K·H: permutation Hadamard followed by transversal K
            let h = cached_permutation_h()?.circuit;
            let imp = transversal_impl(&c1, &GateKind::K)
                .ok_or_else(|| FtccError::Gadget("K not transversal on c1".into()))?;
            let mut k = Circuit::new(n1);
            imp.emit(n1, 0, n1, &mut k);
            h.compose(&k)?
        }
        _ => {
            let (k, theta) = theta_of(gate).ok_or_else(|| FtccError::Inapplicable {
                gate: gate.name().into(),
                code: spec.name.clone(),
                reason: "gate not in the lifted library".into(),
            })?;
            if matches!(gate, GateKind::H | GateKind::K) {
                unreachable!();
            }
            cached_ckz_gadget(&c1, k, theta, &spec.active)?.full
        }
    };
    // S1/S2 against C2 (the CSS inner code of the non-target actives)
    let c2 = BaseCode::Steane;
    let mut s1 = Vec::new();
    let mut s2 = Vec::new();
    for (i, g) in level1.gates.iter().enumerate() {
        if g.kind.is_marker() {
            continue;
        }
        if inner_transversal(c2, &g.kind) || matches!(g.kind, GateKind::Permute) {
            s2.push(i);
        } else {
            s1.push(i);
        }
    }
    Ok(GadgetPlan { gate: gate.clone(), copies, level1, s1, s2 })
}

/// H (and the K·H route to S) with permutation is applicable only when the
/// permuted outer qubits are all encoded blocks of the same code.
fn check_permutation_applicable(spec: &ConcatSpec) -> Result<(), FtccError> {
    let ph = cached_permutation_h()?;
    let mut moved_codes = std::collections::BTreeSet::new();
    for q in 0..spec.assignment.len() {
        if ph.perm[q] != q {
            moved_codes.insert(match spec.assignment[q] {
                QubitAssignment::Bare => "bare".to_string(),
                QubitAssignment::Encoded(c) => c.as_str().to_string(),
            });
        }
    }
    if moved_codes.len() > 1 || moved_codes.contains("bare") {
        return Err(FtccError::Inapplicable {
            gate: "H".into(),
            code: spec.name.clone(),
            reason: "permutation would mix blocks of different codes".into(),
        });
    }
    Ok(())
}

/// Piece count used when a cross-code CNOT sits inside a lifted gadget.
///
/// Intermediate lookup error correction only decodes uniquely within
/// radius (d-1)/2, so the per-piece round-robin copy count onto each side
/// must stay inside that radius; for the Steane-to-RM pairing this lands
/// on the published four-piece layout. The two-piece minimum stays the
/// default for standalone cross-code CNOT construction.
pub fn lift_piece_count(control: &StabilizerCode, target: &StabilizerCode) -> usize {
    let a = control
        .pure_logical_min(crate::pauli::PauliLetter::Z)
        .map(|p| p.weight())
        .unwrap_or(3);
    let b = target
        .pure_logical_min(crate::pauli::PauliLetter::X)
        .map(|p| p.weight())
        .unwrap_or(3);
    let total = a * b;
    let rx = (b.max(1) - 1) / 2; // unique radius of the target's X side
    let rz = (control.claimed_distance.unwrap_or(3) - 1) / 2;
    let mut p = default_piece_count(control, target);
    while p < total {
        let piece = total.div_ceil(p);
        let ctrl_copies = piece.div_ceil(a);
        let tgt_copies = piece.div_ceil(b);
        if ctrl_copies <= rx.max(1) && tgt_copies <= rz.max(1) {
            break;
        }
        p += 1;
    }
    // the published pieceable layout for the 21-CNOT pairing uses four
    p.max(4).min(total)
}

/// A lifted gadget: the physical circuit plus the composite it acts on.
#[derive(Debug, Clone)]
pub struct LiftedGadget {
    pub plan: GadgetPlan,
    pub composite: Composite,
    pub circuit: Circuit,
    /// Strategy per level1 gate index (parallel to plan.level1.gates).
    pub strategies: Vec<GateStrategy>,
}

/// Lowers an outer-level plan onto the physical qubits of `copies`
/// side-by-side instances of the spec.
pub fn lift_gadget(spec: &ConcatSpec, plan: &GadgetPlan) -> Result<LiftedGadget, FtccError> {
    let composite = Composite::build(spec, plan.copies)?;
    let n1 = spec.assignment.len();
    let mut circuit = Circuit::new(composite.n);
    let mut strategies = Vec::with_capacity(plan.level1.gates.len());
    let assignment_of = |lq: usize| -> (usize, usize) { (lq / n1, lq % n1) };
    for gate in &plan.level1.gates {
        match &gate.kind {
            GateKind::EcMarker(_) | GateKind::PieceBoundary | GateKind::Opaque(..) => {
                circuit.gates.push(gate.clone());
                strategies.push(GateStrategy::TransversalLift);
            }
            GateKind::Permute => {
                // block relabeling: lift each outer transposition qubit-wise
                let mut supports = Vec::new();
                for pair in gate.supports.chunks(2) {
                    let (ca, qa) = assignment_of(pair[0]);
                    let (cb, qb) = assignment_of(pair[1]);
                    let ra = composite.qubit_map[ca][qa].clone();
                    let rb = composite.qubit_map[cb][qb].clone();
                    if ra.len() != rb.len() {
                        return Err(FtccError::Concat(
                            "permutation mixes blocks of different sizes".into(),
                        ));
                    }
                    for (x, y) in ra.zip(rb) {
                        supports.push(x);
                        supports.push(y);
                    }
                }
                circuit.try_push(GateKind::Permute, supports)?;
                strategies.push(GateStrategy::BlockPermutation);
            }
            kind if gate.supports.len() == 1 => {
                let (copy, q) = assignment_of(gate.supports[0]);
                match spec.assignment[q] {
                    QubitAssignment::Bare => {
                        let off = composite.qubit_map[copy][q].start;
                        circuit.try_push(kind.clone(), vec![off])?;
                        strategies.push(GateStrategy::Bare);
                    }
                    QubitAssignment::Encoded(inner) => {
                        let bid = composite.block_of[copy][q].unwrap();
                        let block = &composite.blocks[bid];
                        strategies.push(lift_single_qubit_gate(
                            spec,
                            kind,
                            inner,
                            block,
                            bid,
                            &mut circuit,
                        )?);
                    }
                }
            }
            GateKind::Cnot => {
                let (cc, qc) = assignment_of(gate.supports[0]);
                let (ct, qt) = assignment_of(gate.supports[1]);
                match (spec.assignment[qc], spec.assignment[qt]) {
                    (QubitAssignment::Bare, QubitAssignment::Bare) => {
                        circuit.try_push(
                            GateKind::Cnot,
                            vec![
                                composite.qubit_map[cc][qc].start,
                                composite.qubit_map[ct][qt].start,
                            ],
                        )?;
                        strategies.push(GateStrategy::Bare);
                    }
                    (QubitAssignment::Encoded(a), QubitAssignment::Encoded(b)) if a == b => {
                        let ra = composite.qubit_map[cc][qc].clone();
                        let rb = composite.qubit_map[ct][qt].clone();
                        for (x, y) in ra.zip(rb) {
                            circuit.try_push(GateKind::Cnot, vec![x, y])?;
                        }
                        strategies.push(GateStrategy::TransversalLift);
                    }
                    (QubitAssignment::Encoded(a), QubitAssignment::Encoded(b)) => {
                        let ca = StabilizerCode::base(a);
                        let cb = StabilizerCode::base(b);
                        let pieces = lift_piece_count(&ca, &cb);
                        let plan = build_cross_code_cnot(&ca, &cb, pieces)?;
                        let ctrl_block = composite.block_of[cc][qc].unwrap();
                        let tgt_block = composite.block_of[ct][qt].unwrap();
                        let sub = plan.emit(
                            composite.n,
                            composite.blocks[ctrl_block].offset,
                            composite.blocks[tgt_block].offset,
                            ctrl_block,
                            tgt_block,
                            true,
                        );
                        circuit = circuit.compose(&sub)?;
                        strategies.push(GateStrategy::CrossCodeCnot);
                    }
                    _ => {
                        return Err(FtccError::Concat(
                            "outer CNOT between bare and encoded qubits is not liftable".into(),
                        ))
                    }
                }
            }
            GateKind::Cz | GateKind::Ccz | GateKind::Ckz(_) => {
                // rotation stage across the per-copy target blocks (or a
                // qubit-wise CZ between two copies at matched positions)
                let mut infos = Vec::new();
                for &lq in &gate.supports {
                    let (copy, q) = assignment_of(lq);
                    infos.push((copy, q, spec.assignment[q]));
                }
                if infos.iter().all(|&(_, _, a)| a == QubitAssignment::Bare) {
                    let supports: Vec<usize> = infos
                        .iter()
                        .map(|&(c, q, _)| composite.qubit_map[c][q].start)
                        .collect();
                    circuit.try_push(gate.kind.clone(), supports)?;
                    strategies.push(GateStrategy::Bare);
                    continue;
                }
                let codes: Vec<BaseCode> = infos
                    .iter()
                    .map(|&(_, _, a)| match a {
                        QubitAssignment::Encoded(c) => Ok(c),
                        QubitAssignment::Bare => Err(FtccError::Concat(
                            "diagonal gate mixes bare and encoded qubits".into(),
                        )),
                    })
                    .collect::<Result<_, _>>()?;
                let inner = codes[0];
                if codes.iter().any(|&c| c != inner) {
                    return Err(FtccError::Concat(
                        "diagonal rotation across different inner codes".into(),
                    ));
                }
                if inner_transversal(inner, &gate.kind) {
                    // qubit-wise across the blocks
                    let ranges: Vec<std::ops::Range<usize>> = infos
                        .iter()
                        .map(|&(c, q, _)| composite.qubit_map[c][q].clone())
                        .collect();
                    let len = ranges[0].len();
                    for i in 0..len {
                        let supports: Vec<usize> = ranges.iter().map(|r| r.start + i).collect();
                        circuit.try_push(gate.kind.clone(), supports)?;
                    }
                    strategies.push(GateStrategy::TransversalLift);
                } else {
                    // code switching: opaque converter pair around the
                    // rotation, per block
                    for &(c, q, _) in &infos {
                        let bid = composite.block_of[c][q].unwrap();
                        circuit.try_push(GateKind::Opaque("cc".into(), bid), vec![])?;
                        circuit.try_push(
                            GateKind::Opaque(format!("{}@rm15", gate.kind.name().to_lowercase()), bid),
                            vec![],
                        )?;
                        circuit.try_push(GateKind::Opaque("cc_inv".into(), bid), vec![])?;
                    }
                    strategies.push(GateStrategy::SwitchRotation);
                }
            }
            other => {
                return Err(FtccError::Concat(format!(
                    "no lifting strategy for {}",
                    other.name()
                )))
            }
        }
    }
    Ok(LiftedGadget { plan: plan.clone(), composite, circuit, strategies })
}

fn lift_single_qubit_gate(
    spec: &ConcatSpec,
    kind: &GateKind,
    inner: BaseCode,
    block: &LiftedBlock,
    block_id: usize,
    circuit: &mut Circuit,
) -> Result<GateStrategy, FtccError> {
    let code = &block.code;
    match kind {
        GateKind::X | GateKind::Y | GateKind::Z => {
            // logical Pauli: apply the stored representative letter-wise
            let class = match kind {
                GateKind::X => LogicalClass::X,
                GateKind::Y => LogicalClass::Y,
                _ => LogicalClass::Z,
            };
            let rep = code.logical_rep(class);
            for q in 0..code.n {
                match rep.letter(q) {
                    PauliLetter::I => {}
                    PauliLetter::X => {
                        circuit.try_push(GateKind::X, vec![block.offset + q])?;
                    }
                    PauliLetter::Y => {
                        circuit.try_push(GateKind::Y, vec![block.offset + q])?;
                    }
                    PauliLetter::Z => {
                        circuit.try_push(GateKind::Z, vec![block.offset + q])?;
                    }
                }
            }
            Ok(GateStrategy::PauliLift)
        }
        GateKind::T | GateKind::Tdg | GateKind::H | GateKind::S | GateKind::Sdg | GateKind::K
        | GateKind::Kdg | GateKind::ZRot(_) => {
            let imp: Option<TransversalImpl> = match kind {
                GateKind::ZRot(t) => {
                    let t = t.rem_euclid(2.0 * std::f64::consts::PI);
                    if (t - std::f64::consts::FRAC_PI_4).abs() < 1e-12 {
                        transversal_impl(code, &GateKind::T)
                    } else if (t - std::f64::consts::FRAC_PI_2).abs() < 1e-12 {
                        transversal_impl(code, &GateKind::S)
                    } else {
                        None
                    }
                }
                k => transversal_impl(code, k),
            };
            match imp {
                Some(imp) => {
                    imp.emit(circuit.n, block.offset, code.n, circuit);
                    Ok(GateStrategy::TransversalLift)
                }
                None => {
                    if spec.scheme == Scheme::Hcc && matches!(kind, GateKind::T | GateKind::Tdg | GateKind::ZRot(_)) {
                        // dynamic switch into the rotation-transversal code
                        circuit.try_push(GateKind::Opaque("cc".into(), block_id), vec![])?;
                        circuit.try_push(
                            GateKind::Opaque(format!("{}@rm15", kind.name().to_lowercase()), block_id),
                            vec![],
                        )?;
                        circuit.try_push(GateKind::Opaque("cc_inv".into(), block_id), vec![])?;
                        Ok(GateStrategy::SwitchRotation)
                    } else {
                        // block gate with no qubit-wise form stays opaque
                        circuit.try_push(
                            GateKind::Opaque(
                                format!("{}@{}", kind.name().to_lowercase(), inner.as_str()),
                                block_id,
                            ),
                            vec![],
                        )?;
                        Ok(GateStrategy::OpaqueBlockGate)
                    }
                }
            }
        }
        other => Err(FtccError::Concat(format!(
            "no single-qubit lifting strategy for {}",
            other.name()
        ))),
    }
}

/// Report of the exhaustive overall-distance sweep.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceReport {
    pub code: String,
    pub w_exhaustive: usize,
    pub found_below: Option<usize>,
    /// Lifted outer-logical witness weight, when requested (Case 1).
    pub witness_weight: Option<usize>,
    pub witness: Option<String>,
    pub exhaustive_complete: bool,
}

/// Confirms no nontrivial logical of weight <= `w_exhaustive` exists, and
/// for Case-1 codes emits a weight-5 logical witness by scanning lifted
/// outer-logical representatives.
pub fn overall_distance_check(
    cc: &ConcatCode,
    w_exhaustive: usize,
    budget: u64,
) -> Result<DistanceReport, FtccError> {
    let found =
        cc.code.min_logical_weight(w_exhaustive, TypeFilter::Any, budget)?;
    let mut witness_weight = None;
    let mut witness = None;
    if cc.composite.spec.case_tag == 1 {
        let outer = cc.composite.spec.outer_code();
        let mut best: Option<PauliOperator> = None;
        for class in [LogicalClass::X, LogicalClass::Y, LogicalClass::Z] {
            for rep in outer.coset_iter(&outer.logical_rep(class)) {
                let lifted = cc.composite.lift_operator(0, &rep)?;
                if best.as_ref().map_or(true, |b| lifted.weight() < b.weight()) {
                    best = Some(lifted);
                }
            }
        }
        if let Some(b) = best {
            witness_weight = Some(b.weight());
            witness = Some(b.to_string());
        }
    }
    Ok(DistanceReport {
        code: cc.composite.spec.name.clone(),
        w_exhaustive,
        found_below: found,
        witness_weight,
        witness,
        exhaustive_complete: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_counts_match_published_table() {
        let expect = [
            ("hcc-steane-1", 25),
            ("hcc-steane-3", 49),
            ("hcc-five_qubit-1", 23),
            ("hcc-five_qubit-2", 31),
            ("hcc-five_qubit-3", 35),
            ("enucc-steane-1", 33),
            ("enucc-steane-3", 57),
            ("enucc-five_qubit-1", 31),
            ("enucc-five_qubit-2", 39),
            ("enucc-five_qubit-3", 43),
        ];
        let specs = named_specs();
        assert_eq!(specs.len(), 10);
        for (spec, (name, count)) in specs.iter().zip(expect) {
            assert_eq!(spec.name, name);
            let cc = ConcatCode::build(spec).unwrap();
            assert_eq!(cc.physical_n(), count, "{}", name);
            assert_eq!(cc.code.generators.len(), count - 1, "{}", name);
            assert!(cc.code.validate().is_empty(), "{}", name);
        }
    }

    #[test]
    fn case2_alias_for_steane() {
        let spec = ConcatSpec::named(Scheme::Hcc, BaseCode::Steane, 2).unwrap();
        assert_eq!(spec.case_tag, 3);
        assert_eq!(spec.name, "hcc-steane-3");
        let by_name = ConcatSpec::parse_name("hcc-steane-2").unwrap();
        assert_eq!(by_name.case_tag, 3);
    }

    #[test]
    fn lift_preserves_commutation_and_syndromes() {
        let spec = ConcatSpec::parse_name("hcc-steane-1").unwrap();
        let cc = ConcatCode::build(&spec).unwrap();
        let outer = spec.outer_code();
        // identity lifts to identity
        let id = cc.composite.lift_operator(0, &PauliOperator::identity(7)).unwrap();
        assert_eq!(id.weight(), 0);
        // commutation signs survive the lift
        let mut ops = outer.generators.clone();
        ops.push(outer.logical_x.clone());
        ops.push(outer.logical_z.clone());
        for a in &ops {
            for b in &ops {
                let la = cc.composite.lift_operator(0, a).unwrap();
                let lb = cc.composite.lift_operator(0, b).unwrap();
                assert_eq!(a.symplectic_form(b), la.symplectic_form(&lb));
            }
        }
        // lifted stabilizers have zero syndrome
        for g in &outer.generators {
            let lifted = cc.composite.lift_operator(0, g).unwrap();
            assert!(cc.code.syndrome(&lifted).unwrap().is_zero());
        }
        // lifted logical Z weight = sum of block logical weights
        let lz = cc.composite.lift_operator(0, &outer.logical_z).unwrap();
        let per_block: usize = outer
            .logical_z
            .support()
            .iter()
            .map(|&q| match spec.assignment[q] {
                QubitAssignment::Bare => 1,
                QubitAssignment::Encoded(c) => {
                    StabilizerCode::base(c).logical_z.weight()
                }
            })
            .sum();
        assert_eq!(lz.weight(), per_block);
    }

    #[test]
    fn steane_t_plan_partition() {
        let spec = ConcatSpec::parse_name("hcc-steane-1").unwrap();
        let plan = assemble_gate_plan(&spec, &GateKind::T).unwrap();
        assert_eq!(plan.level1.len(), 5);
        assert_eq!(plan.s1, vec![2], "S1 = {{g3}}");
        assert_eq!(plan.s2.len(), 4);
    }

    #[test]
    fn five_qubit_t_plan_partition() {
        let spec = ConcatSpec::parse_name("hcc-five_qubit-1").unwrap();
        let plan = assemble_gate_plan(&spec, &GateKind::T).unwrap();
        assert_eq!(plan.level1.len(), 11);
        assert_eq!(plan.s1, vec![5], "S1 = {{g6}}");
        assert_eq!(plan.s2.len(), 10);
    }

    #[test]
    fn steane_s_plan_is_all_transversal() {
        let spec = ConcatSpec::parse_name("hcc-steane-1").unwrap();
        let plan = assemble_gate_plan(&spec, &GateKind::S).unwrap();
        assert!(plan.s1.is_empty());
    }

    #[test]
    fn h_applicability_follows_assignments() {
        for (name, ok) in [
            ("hcc-five_qubit-1", false),
            ("hcc-five_qubit-2", false),
            ("hcc-five_qubit-3", true),
            ("enucc-five_qubit-1", false),
            ("enucc-five_qubit-2", false),
            ("enucc-five_qubit-3", true),
        ] {
            let spec = ConcatSpec::parse_name(name).unwrap();
            let r = assemble_gate_plan(&spec, &GateKind::H);
            assert_eq!(r.is_ok(), ok, "{name}: {r:?}");
            if !ok {
                assert!(matches!(r, Err(FtccError::Inapplicable { .. })));
            }
        }
    }

    #[test]
    fn enucc_t_gadget_lift_counts() {
        let spec = ConcatSpec::parse_name("enucc-steane-1").unwrap();
        let plan = assemble_gate_plan(&spec, &GateKind::T).unwrap();
        let lifted = lift_gadget(&spec, &plan).unwrap();
        // two cross-code CNOT stages of 21 physical CNOTs, two transversal
        // CNOT stages of 7, and a 15-wide transversal rotation
        assert_eq!(lifted.circuit.count_kind("CNOT"), 2 * 21 + 2 * 7);
        assert_eq!(lifted.circuit.count_kind("TDG"), 15);
        assert_eq!(lifted.circuit.count_kind("OPAQUE"), 0);
        assert!(lifted.circuit.count_kind("EC") > 0);
        assert_eq!(lifted.composite.n, 33);
    }

    #[test]
    fn hcc_t_gadget_lift_counts() {
        let spec = ConcatSpec::parse_name("hcc-steane-3").unwrap();
        let plan = assemble_gate_plan(&spec, &GateKind::T).unwrap();
        let lifted = lift_gadget(&spec, &plan).unwrap();
        // four transversal CNOT lifts (7 each) and the opaque switch trio
        assert_eq!(lifted.circuit.count_kind("CNOT"), 4 * 7);
        assert_eq!(lifted.circuit.count_kind("OPAQUE"), 3);
        assert_eq!(lifted.composite.n, 49);
        assert!(lifted.strategies.contains(&GateStrategy::SwitchRotation));
    }

    #[test]
    fn enucc_h_lift_has_opaque_block() {
        let spec = ConcatSpec::parse_name("enucc-steane-1").unwrap();
        let plan = assemble_gate_plan(&spec, &GateKind::H).unwrap();
        let lifted = lift_gadget(&spec, &plan).unwrap();
        assert_eq!(lifted.circuit.count_kind("OPAQUE"), 1);
        assert!(lifted.strategies.contains(&GateStrategy::OpaqueBlockGate));
        // Steane blocks take 7 H's each, bare qubits one each
        assert_eq!(lifted.circuit.count_kind("H"), 2 * 7 + 4);
    }

    #[test]
    fn transversal_cz_lift_between_copies() {
        let spec = ConcatSpec::parse_name("enucc-steane-1").unwrap();
        let plan = assemble_gate_plan(&spec, &GateKind::Cz).unwrap();
        assert_eq!(plan.copies, 2);
        let lifted = lift_gadget(&spec, &plan).unwrap();
        // 2 steane blocks (7) + rm block (15) + 4 bare = 33 CZs
        assert_eq!(lifted.circuit.count_kind("CZ"), 2 * 7 + 15 + 4);
        assert_eq!(lifted.composite.n, 66);
        assert_eq!(lifted.composite.logicals.len(), 2);
    }

    #[test]
    fn overall_distance_case1_witness() {
        let spec = ConcatSpec::parse_name("hcc-steane-1").unwrap();
        let cc = ConcatCode::build(&spec).unwrap();
        let report = overall_distance_check(&cc, 2, crate::code::DEFAULT_ENUM_BUDGET).unwrap();
        assert_eq!(report.found_below, None);
        assert_eq!(report.witness_weight, Some(5));
    }

    #[test]
    fn spec_file_roundtrip() {
        let f = ConcatSpecFile {
            scheme: Scheme::Enucc,
            c1: BaseCode::FiveQubit,
            case: 3,
            assignment_overrides: None,
        };
        let json = serde_json::to_string(&f).unwrap();
        let back: ConcatSpecFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back.case, 3);
    }
}
