//! Gate and circuit representation, exact Pauli conjugation through
//! Clifford gates, the conservative branching rule for diagonal
//! non-Cliffords, and tableau-style logical-action analysis.

use std::fmt;

use crate::code::StabilizerCode;
use crate::error::FtccError;
use crate::gf2::RowSpace;
use crate::pauli::PauliOperator;

/// Gate kinds. `EcMarker`, `PieceBoundary` and `Opaque` carry no unitary
/// action; they structure fault analysis.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    H,
    S,
    Sdg,
    /// K = S·H (apply H, then S).
    K,
    Kdg,
    T,
    Tdg,
    X,
    Y,
    Z,
    /// diag(1, e^{iθ})
    ZRot(f64),
    Cnot,
    Cz,
    Ccz,
    /// Controlled-^k Z(θ) over its whole support (k + 1 qubits).
    Ckz(f64),
    /// Relabeling given as disjoint transpositions over the support list.
    Permute,
    EcMarker(usize),
    PieceBoundary,
    Opaque(String, usize),
}

fn is_multiple_of(theta: f64, unit: f64) -> bool {
    let t = theta.rem_euclid(2.0 * std::f64::consts::PI);
    let r = (t / unit).round();
    (t - r * unit).abs() < 1e-12
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::K => "K",
            GateKind::Kdg => "KDG",
            GateKind::T => "T",
            GateKind::Tdg => "TDG",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::ZRot(_) => "ZROT",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Ccz => "CCZ",
            GateKind::Ckz(_) => "CKZ",
            GateKind::Permute => "PERMUTE",
            GateKind::EcMarker(_) => "EC",
            GateKind::PieceBoundary => "PIECE",
            GateKind::Opaque(..) => "OPAQUE",
        }
    }

    /// Expected support size; `None` means variable arity.
    pub fn arity(&self) -> Option<usize> {
        match self {
            GateKind::H
            | GateKind::S
            | GateKind::Sdg
            | GateKind::K
            | GateKind::Kdg
            | GateKind::T
            | GateKind::Tdg
            | GateKind::X
            | GateKind::Y
            | GateKind::Z
            | GateKind::ZRot(_) => Some(1),
            GateKind::Cnot | GateKind::Cz => Some(2),
            GateKind::Ccz => Some(3),
            GateKind::Ckz(_) | GateKind::Permute => None,
            GateKind::EcMarker(_) | GateKind::PieceBoundary | GateKind::Opaque(..) => Some(0),
        }
    }

    pub fn is_marker(&self) -> bool {
        matches!(self, GateKind::EcMarker(_) | GateKind::PieceBoundary | GateKind::Opaque(..))
    }

    /// Exact Clifford conjugation available (no branching required).
    pub fn is_clifford(&self) -> bool {
        match self {
            GateKind::H
            | GateKind::S
            | GateKind::Sdg
            | GateKind::K
            | GateKind::Kdg
            | GateKind::X
            | GateKind::Y
            | GateKind::Z
            | GateKind::Cnot
            | GateKind::Cz
            | GateKind::Permute => true,
            GateKind::ZRot(theta) => is_multiple_of(*theta, std::f64::consts::FRAC_PI_2),
            GateKind::Ckz(_) => false, // the 2-qubit θ=π case is normalized to Cz
            _ => false,
        }
    }
}

/// A gate with its ordered qubit support.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub supports: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, supports: Vec<usize>) -> Gate {
        Gate { kind, supports }
    }

    fn check(&self, n: usize) -> Result<(), FtccError> {
        if !self.kind.is_marker() {
            if let Some(a) = self.kind.arity() {
                if self.supports.len() != a {
                    return Err(FtccError::Circuit(format!(
                        "{} expects {} support qubits, got {}",
                        self.kind.name(),
                        a,
                        self.supports.len()
                    )));
                }
            }
        }
        if matches!(self.kind, GateKind::Ckz(_)) && self.supports.len() < 2 {
            return Err(FtccError::Circuit("CKZ needs at least 2 supports".into()));
        }
        if matches!(self.kind, GateKind::Permute) && self.supports.len() % 2 != 0 {
            return Err(FtccError::Circuit("PERMUTE takes transposition pairs".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &q in &self.supports {
            if q >= n {
                return Err(FtccError::Circuit(format!(
                    "{} support {} out of range (n={})",
                    self.kind.name(),
                    q,
                    n
                )));
            }
            if !seen.insert(q) {
                return Err(FtccError::Circuit(format!("{} repeats qubit {}", self.kind.name(), q)));
            }
        }
        Ok(())
    }
}

/// Ordered gate list over `n` named physical qubits. Piece boundaries are
/// implied by `PieceBoundary` markers in the gate stream.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Circuit {
        Circuit { n, gates: Vec::new() }
    }

    pub fn push(&mut self, kind: GateKind, supports: Vec<usize>) -> &mut Self {
        self.try_push(kind, supports).expect("invalid gate");
        self
    }

    pub fn try_push(&mut self, kind: GateKind, supports: Vec<usize>) -> Result<(), FtccError> {
        // normalize the Clifford members of the CKZ family
        let (kind, supports) = match kind {
            GateKind::Ckz(t) if supports.len() == 2 && is_multiple_of(t, std::f64::consts::PI) && !is_multiple_of(t, 2.0 * std::f64::consts::PI) => {
                (GateKind::Cz, supports)
            }
            other => (other, supports),
        };
        let g = Gate::new(kind, supports);
        g.check(self.n)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Concatenation; both circuits must agree on qubit count.
    pub fn compose(&self, other: &Circuit) -> Result<Circuit, FtccError> {
        if self.n != other.n {
            return Err(FtccError::LengthMismatch { left: self.n, right: other.n });
        }
        let mut out = self.clone();
        out.gates.extend(other.gates.iter().cloned());
        Ok(out)
    }

    /// Exact gate-wise inverse in reverse order. Markers are rejected.
    pub fn inverse(&self) -> Result<Circuit, FtccError> {
        let mut out = Circuit::new(self.n);
        for g in self.gates.iter().rev() {
            let kind = match &g.kind {
                GateKind::H
                | GateKind::X
                | GateKind::Y
                | GateKind::Z
                | GateKind::Cnot
                | GateKind::Cz
                | GateKind::Ccz
                | GateKind::Permute => g.kind.clone(),
                GateKind::S => GateKind::Sdg,
                GateKind::Sdg => GateKind::S,
                GateKind::K => GateKind::Kdg,
                GateKind::Kdg => GateKind::K,
                GateKind::T => GateKind::Tdg,
                GateKind::Tdg => GateKind::T,
                GateKind::ZRot(t) => GateKind::ZRot(-t),
                GateKind::Ckz(t) => GateKind::Ckz(-t),
                other => {
                    return Err(FtccError::Circuit(format!("{} is not invertible", other.name())))
                }
            };
            out.gates.push(Gate::new(kind, g.supports.clone()));
        }
        Ok(out)
    }

    pub fn count_kind(&self, name: &str) -> usize {
        self.gates.iter().filter(|g| g.kind.name() == name).count()
    }

    /// Serializes to the line-per-gate text format:
    /// `KIND q0 [q1 q2] [@theta=<radians>]`, markers as `EC b`, `PIECE`,
    /// `OPAQUE label b`.
    pub fn to_text(&self) -> String {
        let mut out = format!("# qubits {}\n", self.n);
        for g in &self.gates {
            match &g.kind {
                GateKind::EcMarker(b) => out.push_str(&format!("EC {b}\n")),
                GateKind::PieceBoundary => out.push_str("PIECE\n"),
                GateKind::Opaque(label, b) => out.push_str(&format!("OPAQUE {label} {b}\n")),
                GateKind::ZRot(t) => out.push_str(&format!("ZROT {} @theta={}\n", g.supports[0], t)),
                GateKind::Ckz(t) => {
                    let qs: Vec<String> = g.supports.iter().map(|q| q.to_string()).collect();
                    out.push_str(&format!("CKZ {} @theta={}\n", qs.join(" "), t));
                }
                kind => {
                    let qs: Vec<String> = g.supports.iter().map(|q| q.to_string()).collect();
                    out.push_str(&format!("{} {}\n", kind.name(), qs.join(" ")));
                }
            }
        }
        out
    }

    /// Parses the text format produced by [`Circuit::to_text`].
    pub fn from_text(text: &str) -> Result<Circuit, FtccError> {
        let mut n: Option<usize> = None;
        let mut parsed: Vec<(GateKind, Vec<usize>)> = Vec::new();
        let mut max_q = 0usize;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| FtccError::CircuitParse { line: lineno + 1, message };
            if let Some(rest) = line.strip_prefix('#') {
                let mut it = rest.split_whitespace();
                if it.next() == Some("qubits") {
                    n = it.next().and_then(|v| v.parse().ok());
                }
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().unwrap();
            let mut qubits: Vec<usize> = Vec::new();
            let mut theta: Option<f64> = None;
            let mut label: Option<String> = None;
            for tok in parts {
                if let Some(v) = tok.strip_prefix("@theta=") {
                    theta = Some(v.parse().map_err(|_| err(format!("bad theta {v:?}")))?);
                } else if let Ok(q) = tok.parse::<usize>() {
                    qubits.push(q);
                } else {
                    label = Some(tok.to_string());
                }
            }
            for &q in &qubits {
                max_q = max_q.max(q + 1);
            }
            let kind = match head {
                "H" => GateKind::H,
                "S" => GateKind::S,
                "SDG" => GateKind::Sdg,
                "K" => GateKind::K,
                "KDG" => GateKind::Kdg,
                "T" => GateKind::T,
                "TDG" => GateKind::Tdg,
                "X" => GateKind::X,
                "Y" => GateKind::Y,
                "Z" => GateKind::Z,
                "ZROT" => GateKind::ZRot(theta.ok_or_else(|| err("ZROT needs @theta".into()))?),
                "CNOT" => GateKind::Cnot,
                "CZ" => GateKind::Cz,
                "CCZ" => GateKind::Ccz,
                "CKZ" => GateKind::Ckz(theta.ok_or_else(|| err("CKZ needs @theta".into()))?),
                "PERMUTE" => GateKind::Permute,
                "EC" => {
                    let b = qubits.pop().ok_or_else(|| err("EC needs a block id".into()))?;
                    GateKind::EcMarker(b)
                }
                "PIECE" => GateKind::PieceBoundary,
                "OPAQUE" => {
                    let b = qubits.pop().ok_or_else(|| err("OPAQUE needs a block id".into()))?;
                    GateKind::Opaque(label.ok_or_else(|| err("OPAQUE needs a label".into()))?, b)
                }
                other => return Err(err(format!("unknown gate kind {other:?}"))),
            };
            let supports = if kind.is_marker() { Vec::new() } else { qubits };
            parsed.push((kind, supports));
        }
        let mut c = Circuit::new(n.unwrap_or(max_q).max(max_q));
        for (kind, supports) in parsed {
            c.try_push(kind, supports)?;
        }
        Ok(c)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// One propagated-error branch with a provenance note.
#[derive(Debug, Clone)]
pub struct ErrorBranch {
    pub pauli: PauliOperator,
    pub note: String,
}

/// Branch set produced by conjugating a fault through a circuit; a
/// singleton for pure-Clifford propagation.
#[derive(Debug, Clone)]
pub struct PropagatedError {
    pub branches: Vec<ErrorBranch>,
}

impl PropagatedError {
    pub fn single(p: PauliOperator) -> Self {
        PropagatedError { branches: vec![ErrorBranch { pauli: p, note: String::new() }] }
    }
}

/// Exact conjugation of `p` by one Clifford gate (`p -> U p U†`).
pub fn conjugate_gate_clifford(p: &mut PauliOperator, gate: &Gate) {
    match &gate.kind {
        GateKind::H => {
            let q = gate.supports[0];
            let (x, z) = (p.x_bit(q), p.z_bit(q));
            if x && z {
                p.mul_raw_phase(2);
            }
            p.set_x_bit(q, z);
            p.set_z_bit(q, x);
        }
        GateKind::S => {
            let q = gate.supports[0];
            if p.x_bit(q) {
                // S (X Z^z) S† = i · X Z^{z+1}
                p.mul_raw_phase(1);
                p.set_z_bit(q, !p.z_bit(q));
            }
        }
        GateKind::Sdg => {
            let q = gate.supports[0];
            if p.x_bit(q) {
                p.mul_raw_phase(3);
                p.set_z_bit(q, !p.z_bit(q));
            }
        }
        GateKind::K => {
            conjugate_gate_clifford(p, &Gate::new(GateKind::H, gate.supports.clone()));
            conjugate_gate_clifford(p, &Gate::new(GateKind::S, gate.supports.clone()));
        }
        GateKind::Kdg => {
            conjugate_gate_clifford(p, &Gate::new(GateKind::Sdg, gate.supports.clone()));
            conjugate_gate_clifford(p, &Gate::new(GateKind::H, gate.supports.clone()));
        }
        GateKind::X => {
            let q = gate.supports[0];
            if p.z_bit(q) {
                p.mul_raw_phase(2);
            }
        }
        GateKind::Y => {
            let q = gate.supports[0];
            if p.z_bit(q) != p.x_bit(q) {
                p.mul_raw_phase(2);
            }
        }
        GateKind::Z => {
            let q = gate.supports[0];
            if p.x_bit(q) {
                p.mul_raw_phase(2);
            }
        }
        GateKind::ZRot(theta) => {
            let q = gate.supports[0];
            let t = theta.rem_euclid(2.0 * std::f64::consts::PI);
            if (t - std::f64::consts::FRAC_PI_2).abs() < 1e-12 {
                conjugate_gate_clifford(p, &Gate::new(GateKind::S, vec![q]));
            } else if (t - std::f64::consts::PI).abs() < 1e-12 {
                conjugate_gate_clifford(p, &Gate::new(GateKind::Z, vec![q]));
            } else if (t - 3.0 * std::f64::consts::FRAC_PI_2).abs() < 1e-12 {
                conjugate_gate_clifford(p, &Gate::new(GateKind::Sdg, vec![q]));
            } else if t.abs() > 1e-12 {
                panic!("non-Clifford ZROT in exact conjugation");
            }
        }
        GateKind::Cnot => {
            let (c, t) = (gate.supports[0], gate.supports[1]);
            // phase-free in the X-before-Z layout
            p.set_x_bit(t, p.x_bit(t) ^ p.x_bit(c));
            p.set_z_bit(c, p.z_bit(c) ^ p.z_bit(t));
        }
        GateKind::Cz => {
            let (a, b) = (gate.supports[0], gate.supports[1]);
            if p.x_bit(a) && p.x_bit(b) {
                p.mul_raw_phase(2);
            }
            let (xa, xb) = (p.x_bit(a), p.x_bit(b));
            if xa {
                p.set_z_bit(b, !p.z_bit(b));
            }
            if xb {
                p.set_z_bit(a, !p.z_bit(a));
            }
        }
        GateKind::Permute => {
            for pair in gate.supports.chunks(2) {
                let (a, b) = (pair[0], pair[1]);
                let (xa, za) = (p.x_bit(a), p.z_bit(a));
                let (xb, zb) = (p.x_bit(b), p.z_bit(b));
                p.set_x_bit(a, xb);
                p.set_z_bit(a, zb);
                p.set_x_bit(b, xa);
                p.set_z_bit(b, za);
            }
        }
        other => panic!("conjugate_gate_clifford on unsupported kind {}", other.name()),
    }
}

fn needs_branching(p: &PauliOperator, gate: &Gate) -> bool {
    match &gate.kind {
        GateKind::T | GateKind::Tdg => p.x_bit(gate.supports[0]),
        GateKind::ZRot(_) if !gate.kind.is_clifford() => p.x_bit(gate.supports[0]),
        GateKind::Ccz | GateKind::Ckz(_) => gate.supports.iter().any(|&q| p.x_bit(q)),
        _ => false,
    }
}

/// Conjugates one branch through one gate. Diagonal non-Cliffords split an
/// incoming X/Y component into {X, Y} on its own support with a possible Z
/// on each partner support; Z components pass through unchanged.
fn conjugate_gate_branching(p: &PauliOperator, gate: &Gate, out: &mut Vec<PauliOperator>) {
    let diagonal_nonclifford = matches!(
        gate.kind,
        GateKind::T | GateKind::Tdg | GateKind::Ccz | GateKind::Ckz(_)
    ) || matches!(gate.kind, GateKind::ZRot(_) if !gate.kind.is_clifford());
    if diagonal_nonclifford {
        if needs_branching(p, gate) {
            let k = gate.supports.len();
            for mask in 0..(1u32 << k) {
                let mut b = p.clone();
                for (i, &q) in gate.supports.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        b.set_z_bit(q, !b.z_bit(q));
                    }
                }
                out.push(b);
            }
        } else {
            out.push(p.clone());
        }
    } else {
        let mut b = p.clone();
        conjugate_gate_clifford(&mut b, gate);
        out.push(b);
    }
}

/// Conjugates `p` through `circuit` starting at gate index `from`
/// (0 = whole circuit). Markers are skipped; `Opaque` gates are rejected.
pub fn conjugate_through(
    circuit: &Circuit,
    p: &PauliOperator,
    from: usize,
) -> Result<PropagatedError, FtccError> {
    if p.n() != circuit.n {
        return Err(FtccError::LengthMismatch { left: p.n(), right: circuit.n });
    }
    let mut branches = vec![ErrorBranch { pauli: p.clone(), note: String::new() }];
    for (gi, gate) in circuit.gates.iter().enumerate().skip(from) {
        match &gate.kind {
            GateKind::Opaque(label, _) => {
                return Err(FtccError::Circuit(format!(
                    "conjugate_through hit OPAQUE gate {label:?} at index {gi}"
                )));
            }
            GateKind::EcMarker(_) | GateKind::PieceBoundary => continue,
            _ => {}
        }
        let mut next: Vec<ErrorBranch> = Vec::with_capacity(branches.len());
        for b in &branches {
            let mut outs = Vec::new();
            conjugate_gate_branching(&b.pauli, gate, &mut outs);
            let split = outs.len() > 1;
            for o in outs {
                let mut note = b.note.clone();
                if split {
                    note.push_str(&format!("[branch@{gi}:{}]", gate.kind.name()));
                }
                next.push(ErrorBranch { pauli: o, note });
            }
        }
        let mut seen = std::collections::HashSet::new();
        branches = next
            .into_iter()
            .filter(|b| seen.insert(b.pauli.symplectic_row()))
            .collect();
    }
    Ok(PropagatedError { branches })
}

/// A code block occupying a contiguous qubit range of a larger register.
#[derive(Debug, Clone)]
pub struct BlockLayout {
    pub code: StabilizerCode,
    pub offset: usize,
}

impl BlockLayout {
    pub fn qubits(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.code.n
    }
}

/// Induced map on the logical X/Z of each block, as Pauli words over the
/// logical qubits plus a phase exponent (power of i).
#[derive(Debug, Clone)]
pub struct LogicalAction {
    pub image_x: Vec<(Vec<u64>, Vec<u64>, u8)>,
    pub image_z: Vec<(Vec<u64>, Vec<u64>, u8)>,
    pub blocks: usize,
}

impl LogicalAction {
    fn bit(bits: &[u64], i: usize) -> bool {
        bits[i / 64] >> (i % 64) & 1 == 1
    }

    fn tuple(img: &(Vec<u64>, Vec<u64>, u8), blocks: usize) -> (Vec<(bool, bool)>, u8) {
        ((0..blocks).map(|b| (Self::bit(&img.0, b), Self::bit(&img.1, b))).collect(), img.2)
    }

    pub fn is_identity(&self) -> bool {
        (0..self.blocks).all(|b| {
            let (lx, sx) = Self::tuple(&self.image_x[b], self.blocks);
            let (lz, sz) = Self::tuple(&self.image_z[b], self.blocks);
            sx == 0
                && sz == 0
                && lx.iter().enumerate().all(|(i, &(x, z))| x == (i == b) && !z)
                && lz.iter().enumerate().all(|(i, &(x, z))| !x && z == (i == b))
        })
    }

    /// X -> Z, Z -> X with +1 signs on `block`, identity elsewhere.
    pub fn is_logical_h(&self, block: usize) -> bool {
        let (lx, sx) = Self::tuple(&self.image_x[block], self.blocks);
        let (lz, sz) = Self::tuple(&self.image_z[block], self.blocks);
        sx == 0
            && sz == 0
            && lx.iter().enumerate().all(|(i, &(x, z))| !x && z == (i == block))
            && lz.iter().enumerate().all(|(i, &(x, z))| x == (i == block) && !z)
            && self.identity_outside(&[block])
    }

    /// K = S·H: X -> Z, Z -> Y (phase exponent 1 on the Y image).
    pub fn is_logical_k(&self, block: usize) -> bool {
        let (lx, sx) = Self::tuple(&self.image_x[block], self.blocks);
        let (lz, sz) = Self::tuple(&self.image_z[block], self.blocks);
        sx == 0
            && sz == 1
            && lx.iter().enumerate().all(|(i, &(x, z))| !x && z == (i == block))
            && lz.iter().enumerate().all(|(i, &(x, z))| x == (i == block) && z == (i == block))
            && self.identity_outside(&[block])
    }

    /// S: X -> Y, Z -> Z.
    pub fn is_logical_s(&self, block: usize) -> bool {
        let (lx, sx) = Self::tuple(&self.image_x[block], self.blocks);
        let (lz, sz) = Self::tuple(&self.image_z[block], self.blocks);
        sx == 1
            && sz == 0
            && lx.iter().enumerate().all(|(i, &(x, z))| x == (i == block) && z == (i == block))
            && lz.iter().enumerate().all(|(i, &(x, z))| !x && z == (i == block))
            && self.identity_outside(&[block])
    }

    fn identity_outside(&self, blocks: &[usize]) -> bool {
        (0..self.blocks).filter(|b| !blocks.contains(b)).all(|b| {
            let (lx, sx) = Self::tuple(&self.image_x[b], self.blocks);
            let (lz, sz) = Self::tuple(&self.image_z[b], self.blocks);
            sx == 0
                && sz == 0
                && lx.iter().enumerate().all(|(i, &(x, z))| x == (i == b) && !z)
                && lz.iter().enumerate().all(|(i, &(x, z))| !x && z == (i == b))
        })
    }

    /// CNOT from `c` to `t`: X_c -> X_c X_t, Z_t -> Z_c Z_t, others fixed.
    pub fn is_logical_cnot(&self, c: usize, t: usize) -> bool {
        (0..self.blocks).all(|b| {
            let (lx, sx) = Self::tuple(&self.image_x[b], self.blocks);
            let (lz, sz) = Self::tuple(&self.image_z[b], self.blocks);
            if sx != 0 || sz != 0 {
                return false;
            }
            let ex: Vec<(bool, bool)> = (0..self.blocks)
                .map(|i| (i == b || (b == c && i == t), false))
                .collect();
            let ez: Vec<(bool, bool)> = (0..self.blocks)
                .map(|i| (false, i == b || (b == t && i == c)))
                .collect();
            lx == ex && lz == ez
        })
    }

    /// CZ between `a` and `b`: X_a -> X_a Z_b, X_b -> X_b Z_a, Z fixed.
    pub fn is_logical_cz(&self, a: usize, bq: usize) -> bool {
        (0..self.blocks).all(|b| {
            let (lx, sx) = Self::tuple(&self.image_x[b], self.blocks);
            let (lz, sz) = Self::tuple(&self.image_z[b], self.blocks);
            if sx != 0 || sz != 0 {
                return false;
            }
            let partner = if b == a {
                Some(bq)
            } else if b == bq {
                Some(a)
            } else {
                None
            };
            let ex: Vec<(bool, bool)> = (0..self.blocks)
                .map(|i| (i == b, partner == Some(i)))
                .collect();
            let ez: Vec<(bool, bool)> =
                (0..self.blocks).map(|i| (false, i == b)).collect();
            lx == ex && lz == ez
        })
    }
}

/// Tableau check: does the all-Clifford `circuit` preserve the joint
/// stabilizer group of `blocks`, and if so which logical Clifford does it
/// induce? Returns an error naming the violated generator otherwise.
pub fn induced_logical_action(
    circuit: &Circuit,
    blocks: &[BlockLayout],
) -> Result<LogicalAction, FtccError> {
    for g in circuit.gates.iter() {
        if matches!(g.kind, GateKind::Opaque(..)) {
            return Err(FtccError::LogicalAction("OPAQUE gate in tableau check".into()));
        }
        if !g.kind.is_marker() && !g.kind.is_clifford() {
            return Err(FtccError::LogicalAction(format!(
                "non-Clifford gate {} in tableau check",
                g.kind.name()
            )));
        }
    }
    let n = circuit.n;
    let mut all_gens: Vec<PauliOperator> = Vec::new();
    let mut logicals: Vec<(PauliOperator, PauliOperator)> = Vec::new();
    for b in blocks {
        for g in &b.code.generators {
            all_gens.push(g.embed(n, b.offset));
        }
        logicals.push((b.code.logical_x.embed(n, b.offset), b.code.logical_z.embed(n, b.offset)));
    }
    let mut full_rows: Vec<Vec<u64>> = all_gens.iter().map(|g| g.symplectic_row()).collect();
    let gen_count = full_rows.len();
    for (lx, lz) in &logicals {
        full_rows.push(lx.symplectic_row());
        full_rows.push(lz.symplectic_row());
    }
    let full_space = RowSpace::from_rows(2 * n, full_rows.iter().map(|r| r.as_slice()));

    let conj = |p: &PauliOperator| -> PauliOperator {
        let mut out = p.clone();
        for g in circuit.gates.iter().filter(|g| !g.kind.is_marker()) {
            conjugate_gate_clifford(&mut out, g);
        }
        out
    };

    for (i, g) in all_gens.iter().enumerate() {
        let img = conj(g);
        let Some(combo) = full_space.solve(&img.symplectic_row()) else {
            return Err(FtccError::LogicalAction(format!(
                "not code-preserving: generator {i} image leaves the joint normalizer"
            )));
        };
        if combo.iter().any(|&r| r >= gen_count) {
            return Err(FtccError::LogicalAction(format!(
                "not code-preserving: generator {i} image picks up a logical factor"
            )));
        }
        let mut prod = PauliOperator::identity(n);
        for &r in &combo {
            prod.mul_assign(&all_gens[r]);
        }
        if prod != img {
            return Err(FtccError::LogicalAction(format!(
                "not code-preserving: generator {i} image carries a sign flip"
            )));
        }
    }

    let nb = blocks.len();
    let words = nb.div_ceil(64).max(1);
    let mut action = LogicalAction {
        image_x: vec![(vec![0u64; words], vec![0u64; words], 0); nb],
        image_z: vec![(vec![0u64; words], vec![0u64; words], 0); nb],
        blocks: nb,
    };
    for (b, (lx, lz)) in logicals.iter().enumerate() {
        for which in 0..2 {
            let l = if which == 0 { lx } else { lz };
            let img = conj(l);
            let combo = full_space.solve(&img.symplectic_row()).ok_or_else(|| {
                FtccError::LogicalAction(format!("logical image of block {b} leaves the normalizer"))
            })?;
            let mut xs = vec![0u64; words];
            let mut zs = vec![0u64; words];
            let mut prod = PauliOperator::identity(n);
            // canonical order: logical X factors, then logical Z, then stabilizer
            let mut ordered: Vec<usize> = combo.clone();
            ordered.sort_by_key(|&r| {
                if r >= gen_count {
                    ((r - gen_count) % 2, (r - gen_count) / 2, 0usize)
                } else {
                    (2, 0, r)
                }
            });
            for &r in &ordered {
                if r >= gen_count {
                    let li = (r - gen_count) / 2;
                    if (r - gen_count) % 2 == 0 {
                        xs[li / 64] |= 1 << (li % 64);
                        prod.mul_assign(&logicals[li].0);
                    } else {
                        zs[li / 64] |= 1 << (li % 64);
                        prod.mul_assign(&logicals[li].1);
                    }
                } else {
                    prod.mul_assign(&all_gens[r]);
                }
            }
            let s = (4 + img.raw_phase() - prod.raw_phase()) % 4;
            let entry = (xs, zs, s);
            if which == 0 {
                action.image_x[b] = entry;
            } else {
                action.image_z[b] = entry;
            }
        }
    }
    Ok(action)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{BaseCode, StabilizerCode};
    use crate::pauli::{parse_pauli, PauliLetter};

    fn single_block(code: StabilizerCode) -> Vec<BlockLayout> {
        vec![BlockLayout { code, offset: 0 }]
    }

    #[test]
    fn cnot_and_h_propagation() {
        let mut c = Circuit::new(2);
        c.push(GateKind::Cnot, vec![0, 1]);
        let out = conjugate_through(&c, &parse_pauli("XI").unwrap(), 0).unwrap();
        assert_eq!(out.branches.len(), 1);
        assert_eq!(out.branches[0].pauli.to_string(), "XX");

        let mut h = Circuit::new(1);
        h.push(GateKind::H, vec![0]);
        assert_eq!(
            conjugate_through(&h, &parse_pauli("X").unwrap(), 0).unwrap().branches[0]
                .pauli
                .to_string(),
            "Z"
        );
    }

    #[test]
    fn t_branching() {
        let mut c = Circuit::new(1);
        c.push(GateKind::T, vec![0]);
        let out = conjugate_through(&c, &parse_pauli("X").unwrap(), 0).unwrap();
        let mut letters: Vec<char> =
            out.branches.iter().map(|b| b.pauli.letter(0).to_char()).collect();
        letters.sort();
        assert_eq!(letters, vec!['X', 'Y']);
        assert!(out.branches.iter().any(|b| !b.note.is_empty()));
        let z = parse_pauli("Z").unwrap();
        assert_eq!(conjugate_through(&c, &z, 0).unwrap().branches.len(), 1);
    }

    #[test]
    fn ckz_branching_covers_partner_z() {
        let mut c = Circuit::new(3);
        c.push(GateKind::Ccz, vec![0, 1, 2]);
        let out = conjugate_through(&c, &parse_pauli("XII").unwrap(), 0).unwrap();
        assert_eq!(out.branches.len(), 8);
        // branch supports never exceed the gate support union
        for b in &out.branches {
            assert!(b.pauli.support().iter().all(|&q| q < 3));
        }
    }

    #[test]
    fn exact_clifford_signs_match_known_tables() {
        let mut c = Circuit::new(2);
        c.push(GateKind::Cnot, vec![0, 1]);
        assert_eq!(
            conjugate_through(&c, &parse_pauli("YY").unwrap(), 0).unwrap().branches[0]
                .pauli
                .to_string(),
            "-XZ"
        );
        let mut c2 = Circuit::new(2);
        c2.push(GateKind::Cz, vec![0, 1]);
        assert_eq!(
            conjugate_through(&c2, &parse_pauli("YY").unwrap(), 0).unwrap().branches[0]
                .pauli
                .to_string(),
            "XX"
        );
        let mut c3 = Circuit::new(1);
        c3.push(GateKind::S, vec![0]);
        for (inp, outp) in [("X", "Y"), ("Y", "-X"), ("Z", "Z")] {
            assert_eq!(
                conjugate_through(&c3, &parse_pauli(inp).unwrap(), 0).unwrap().branches[0]
                    .pauli
                    .to_string(),
                outp
            );
        }
        let mut c4 = Circuit::new(1);
        c4.push(GateKind::K, vec![0]);
        for (inp, outp) in [("X", "Z"), ("Z", "Y"), ("Y", "X")] {
            assert_eq!(
                conjugate_through(&c4, &parse_pauli(inp).unwrap(), 0).unwrap().branches[0]
                    .pauli
                    .to_string(),
                outp
            );
        }
    }

    #[test]
    fn compose_inverse_gives_identity_action() {
        let mut c = Circuit::new(3);
        c.push(GateKind::H, vec![0]);
        c.push(GateKind::S, vec![1]);
        c.push(GateKind::Cnot, vec![0, 2]);
        c.push(GateKind::Cz, vec![1, 2]);
        c.push(GateKind::K, vec![2]);
        let round = c.compose(&c.inverse().unwrap()).unwrap();
        for s in ["XII", "IZI", "IIY", "ZXZ"] {
            let p = parse_pauli(s).unwrap();
            let out = conjugate_through(&round, &p, 0).unwrap();
            assert_eq!(out.branches.len(), 1);
            assert_eq!(out.branches[0].pauli, p, "{s}");
        }
        let mut sc = Circuit::new(3);
        sc.push(GateKind::Cnot, vec![0, 1]);
        sc.push(GateKind::Cnot, vec![1, 2]);
        let inv = sc.inverse().unwrap();
        assert_eq!(inv.gates[0].supports, vec![1, 2]);
        assert_eq!(inv.gates[1].supports, vec![0, 1]);
    }

    #[test]
    fn propagation_is_homomorphism_on_clifford_segments() {
        let mut c = Circuit::new(3);
        c.push(GateKind::H, vec![0]);
        c.push(GateKind::Cnot, vec![0, 1]);
        c.push(GateKind::Cz, vec![1, 2]);
        c.push(GateKind::S, vec![2]);
        let p = parse_pauli("XYI").unwrap();
        let q = parse_pauli("ZIX").unwrap();
        let pq = p.multiply(&q).unwrap();
        let ip = conjugate_through(&c, &p, 0).unwrap().branches.remove(0).pauli;
        let iq = conjugate_through(&c, &q, 0).unwrap().branches.remove(0).pauli;
        let ipq = conjugate_through(&c, &pq, 0).unwrap().branches.remove(0).pauli;
        assert_eq!(ip.multiply(&iq).unwrap(), ipq);
    }

    #[test]
    fn transversal_h_on_steane_is_logical_h() {
        let st = StabilizerCode::base(BaseCode::Steane);
        let mut c = Circuit::new(7);
        for q in 0..7 {
            c.push(GateKind::H, vec![q]);
        }
        let action = induced_logical_action(&c, &single_block(st)).unwrap();
        assert!(action.is_logical_h(0));
    }

    #[test]
    fn transversal_cnot_between_steane_blocks() {
        let st = StabilizerCode::base(BaseCode::Steane);
        let blocks = vec![
            BlockLayout { code: st.clone(), offset: 0 },
            BlockLayout { code: st, offset: 7 },
        ];
        let mut c = Circuit::new(14);
        for q in 0..7 {
            c.push(GateKind::Cnot, vec![q, 7 + q]);
        }
        let action = induced_logical_action(&c, &blocks).unwrap();
        assert!(action.is_logical_cnot(0, 1));
    }

    #[test]
    fn transversal_h_on_rm15_is_rejected() {
        let rm = StabilizerCode::base(BaseCode::Rm15);
        let mut c = Circuit::new(15);
        for q in 0..15 {
            c.push(GateKind::H, vec![q]);
        }
        let err = induced_logical_action(&c, &single_block(rm)).unwrap_err();
        assert!(err.to_string().contains("not code-preserving"), "{err}");
    }

    #[test]
    fn weight_one_fault_stays_weight_one_per_block_under_transversal() {
        let mut c = Circuit::new(14);
        for q in 0..7 {
            c.push(GateKind::Cnot, vec![q, 7 + q]);
        }
        for q in 0..14 {
            for l in [PauliLetter::X, PauliLetter::Y, PauliLetter::Z] {
                let p = PauliOperator::single(14, q, l);
                let out = conjugate_through(&c, &p, 0).unwrap();
                for b in &out.branches {
                    let w0 = (0..7).filter(|&i| b.pauli.letter(i) != PauliLetter::I).count();
                    let w1 = (7..14).filter(|&i| b.pauli.letter(i) != PauliLetter::I).count();
                    assert!(w0 <= 1 && w1 <= 1, "fault spread inside a block");
                }
            }
        }
    }

    #[test]
    fn circuit_text_roundtrip() {
        let mut c = Circuit::new(4);
        c.push(GateKind::H, vec![0]);
        c.push(GateKind::Cnot, vec![0, 1]);
        c.push(GateKind::ZRot(0.5), vec![2]);
        c.push(GateKind::Ckz(0.25), vec![0, 1, 3]);
        c.push(GateKind::EcMarker(1), vec![]);
        c.push(GateKind::PieceBoundary, vec![]);
        c.push(GateKind::Opaque("cc".into(), 0), vec![]);
        c.push(GateKind::Permute, vec![0, 1, 2, 3]);
        let text = c.to_text();
        let back = Circuit::from_text(&text).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn ckz_pi_normalizes_to_cz() {
        let mut c = Circuit::new(2);
        c.push(GateKind::Ckz(std::f64::consts::PI), vec![0, 1]);
        assert_eq!(c.gates[0].kind, GateKind::Cz);
    }

    #[test]
    fn opaque_is_rejected_in_conjugation() {
        let mut c = Circuit::new(2);
        c.push(GateKind::Opaque("cc".into(), 0), vec![]);
        assert!(conjugate_through(&c, &parse_pauli("XI").unwrap(), 0).is_err());
    }

    #[test]
    fn invalid_gates_are_rejected() {
        let mut c = Circuit::new(2);
        assert!(c.try_push(GateKind::Cnot, vec![0]).is_err());
        assert!(c.try_push(GateKind::H, vec![5]).is_err());
        assert!(c.try_push(GateKind::Cnot, vec![1, 1]).is_err());
        assert!(c.try_push(GateKind::Permute, vec![0, 1, 1, 0]).is_err());
    }
}
