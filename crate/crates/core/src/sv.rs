//! Dense state-vector oracle for exact verification of gadget logical
//! action on small systems.
//!
//! Encoding is built from projector products Π (I + g)/2 applied to a
//! fiducial basis state, which keeps it code-agnostic and exact. The
//! default budget is 24 qubits (~256 MiB of amplitudes); `FTCC_BUDGET_MB`
//! caps it lower or raises it.

use num_complex::Complex64;

use crate::circuit::{BlockLayout, Circuit, GateKind};
use crate::code::StabilizerCode;
use crate::error::FtccError;
use crate::pauli::PauliOperator;
#[cfg(test)]
use crate::pauli::PauliLetter;

const NORM_TOL: f64 = 1e-12;

/// Maximum qubit count the oracle will allocate, honoring `FTCC_BUDGET_MB`.
pub fn budget_qubits() -> usize {
    let default = 24usize;
    match std::env::var("FTCC_BUDGET_MB").ok().and_then(|v| v.parse::<u64>().ok()) {
        None => default,
        Some(mb) => {
            let bytes = mb.saturating_mul(1 << 20);
            let amps = (bytes / 16).max(2);
            (63 - amps.leading_zeros()) as usize
        }
    }
}

/// Dense complex state over `n` qubits; index bit `q` is qubit `q`.
#[derive(Clone)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n: usize) -> Result<StateVector, FtccError> {
        let budget = budget_qubits();
        if n > budget {
            return Err(FtccError::SvBudget { qubits: n, budget });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            for a in &mut self.amps {
                *a /= norm;
            }
        }
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn axpy(&mut self, scale: Complex64, other: &StateVector) {
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += scale * b;
        }
    }

    pub fn scale(&mut self, s: Complex64) {
        for a in &mut self.amps {
            *a *= s;
        }
    }

    /// Applies a Pauli operator exactly (including its phase).
    pub fn apply_pauli(&mut self, p: &PauliOperator) {
        assert_eq!(p.n(), self.n);
        let i = Complex64::new(0.0, 1.0);
        let global = i.powu(p.raw_phase() as u32);
        let mut x_mask = 0usize;
        let mut z_mask = 0usize;
        for q in 0..self.n {
            if p.x_bit(q) {
                x_mask |= 1 << q;
            }
            if p.z_bit(q) {
                z_mask |= 1 << q;
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (idx, &a) in self.amps.iter().enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let sign = if (idx & z_mask).count_ones() % 2 == 1 { -global } else { global };
            out[idx ^ x_mask] += sign * a;
        }
        self.amps = out;
    }

    /// Expectation value of a Pauli observable.
    pub fn expectation(&self, p: &PauliOperator) -> Complex64 {
        let mut moved = self.clone();
        moved.apply_pauli(p);
        self.inner(&moved)
    }

    fn apply_single(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let stride = 1usize << q;
        let len = self.amps.len();
        let mut base = 0usize;
        while base < len {
            for off in base..base + stride {
                let a0 = self.amps[off];
                let a1 = self.amps[off + stride];
                self.amps[off] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[off + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
            base += stride << 1;
        }
    }

    fn apply_cnot(&mut self, c: usize, t: usize) {
        let cm = 1usize << c;
        let tm = 1usize << t;
        for idx in 0..self.amps.len() {
            if idx & cm != 0 && idx & tm == 0 {
                self.amps.swap(idx, idx | tm);
            }
        }
    }

    fn apply_phase_on_mask(&mut self, mask: usize, phase: Complex64) {
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if idx & mask == mask {
                *a *= phase;
            }
        }
    }

    fn apply_permute(&mut self, pairs: &[usize]) {
        let mut out = self.amps.clone();
        for (idx, &a) in self.amps.iter().enumerate() {
            let mut target = idx;
            for pair in pairs.chunks(2) {
                let (p, q) = (pair[0], pair[1]);
                if (idx >> p & 1) != (idx >> q & 1) {
                    target ^= (1 << p) | (1 << q);
                }
            }
            out[target] = a;
        }
        self.amps = out;
    }

    /// Exact unitary action of `circuit`; markers and opaque gates are
    /// rejected. Norm is preserved within 1e-12 per operation.
    pub fn apply(&mut self, circuit: &Circuit) -> Result<(), FtccError> {
        if circuit.n != self.n {
            return Err(FtccError::LengthMismatch { left: circuit.n, right: self.n });
        }
        let frac = std::f64::consts::FRAC_1_SQRT_2;
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        for g in &circuit.gates {
            match &g.kind {
                GateKind::EcMarker(_) | GateKind::PieceBoundary => {
                    return Err(FtccError::Circuit(format!(
                        "state-vector apply hit marker {}",
                        g.kind.name()
                    )))
                }
                GateKind::Opaque(label, _) => {
                    return Err(FtccError::Circuit(format!(
                        "state-vector apply hit OPAQUE {label:?}"
                    )))
                }
                GateKind::H => self
                    .apply_single(g.supports[0], [[one * frac, one * frac], [one * frac, -one * frac]]),
                GateKind::S => self.apply_single(g.supports[0], [[one, zero], [zero, i]]),
                GateKind::Sdg => self.apply_single(g.supports[0], [[one, zero], [zero, -i]]),
                // K = S·H
                GateKind::K => self
                    .apply_single(g.supports[0], [[one * frac, one * frac], [i * frac, -i * frac]]),
                GateKind::Kdg => self
                    .apply_single(g.supports[0], [[one * frac, -i * frac], [one * frac, i * frac]]),
                GateKind::T => self.apply_single(
                    g.supports[0],
                    [[one, zero], [zero, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
                ),
                GateKind::Tdg => self.apply_single(
                    g.supports[0],
                    [[one, zero], [zero, Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)]],
                ),
                GateKind::X => self.apply_single(g.supports[0], [[zero, one], [one, zero]]),
                GateKind::Y => self.apply_single(g.supports[0], [[zero, -i], [i, zero]]),
                GateKind::Z => self.apply_single(g.supports[0], [[one, zero], [zero, -one]]),
                GateKind::ZRot(t) => self.apply_single(
                    g.supports[0],
                    [[one, zero], [zero, Complex64::from_polar(1.0, *t)]],
                ),
                GateKind::Cnot => self.apply_cnot(g.supports[0], g.supports[1]),
                GateKind::Cz | GateKind::Ccz => {
                    let mask: usize = g.supports.iter().map(|&q| 1usize << q).sum();
                    self.apply_phase_on_mask(mask, -one);
                }
                GateKind::Ckz(t) => {
                    let mask: usize = g.supports.iter().map(|&q| 1usize << q).sum();
                    self.apply_phase_on_mask(mask, Complex64::from_polar(1.0, *t));
                }
                GateKind::Permute => self.apply_permute(&g.supports),
            }
        }
        let norm = self.norm_sqr();
        debug_assert!(
            (norm - 1.0).abs() < NORM_TOL * (self.amps.len() as f64).max(1e6),
            "norm drift {norm}"
        );
        Ok(())
    }

    /// Little-endian complex128 dump for debugging.
    pub fn dump_to(&self, path: &std::path::Path) -> Result<(), FtccError> {
        let mut bytes = Vec::with_capacity(self.amps.len() * 16);
        for a in &self.amps {
            bytes.extend_from_slice(&a.re.to_le_bytes());
            bytes.extend_from_slice(&a.im.to_le_bytes());
        }
        std::fs::write(path, bytes)?;
        Ok(())
    }
}

/// Encodes `alpha |0_L> + beta |1_L>` for a single code block.
pub fn encode(
    code: &StabilizerCode,
    logical: (Complex64, Complex64),
) -> Result<StateVector, FtccError> {
    let zero = encode_zero(code)?;
    let mut one = zero.clone();
    one.apply_pauli(&code.logical_x);
    let mut out = StateVector { n: code.n, amps: vec![Complex64::new(0.0, 0.0); 1 << code.n] };
    out.axpy(logical.0, &zero);
    out.axpy(logical.1, &one);
    out.normalize();
    Ok(out)
}

fn project(state: &mut StateVector, g: &PauliOperator) {
    let mut moved = state.clone();
    moved.apply_pauli(g);
    state.axpy(Complex64::new(1.0, 0.0), &moved);
    state.scale(Complex64::new(0.5, 0.0));
}

/// Logical |0> of a code: projector products on a fiducial basis state.
pub fn encode_zero(code: &StabilizerCode) -> Result<StateVector, FtccError> {
    let mut state = StateVector::zero_state(code.n)?;
    for g in &code.generators {
        project(&mut state, g);
    }
    project(&mut state, &code.logical_z);
    if state.norm_sqr() < 1e-9 {
        // fiducial |0..0> annihilated; retry from |+..+>
        let mut plus = StateVector::zero_state(code.n)?;
        let mut h = Circuit::new(code.n);
        for q in 0..code.n {
            h.push(GateKind::H, vec![q]);
        }
        plus.apply(&h)?;
        for g in &code.generators {
            project(&mut plus, g);
        }
        project(&mut plus, &code.logical_z);
        state = plus;
    }
    state.normalize();
    Ok(state)
}

/// Joint encoded basis state over a block layout: bit `b` of `basis`
/// selects |1_L> on block `b`. Blocks must tile the register.
pub fn encode_blocks_basis(blocks: &[BlockLayout], basis: usize) -> Result<StateVector, FtccError> {
    let total: usize = blocks.iter().map(|b| b.code.n).sum();
    let budget = budget_qubits();
    if total > budget {
        return Err(FtccError::SvBudget { qubits: total, budget });
    }
    let mut per_block: Vec<StateVector> = Vec::new();
    for (bi, b) in blocks.iter().enumerate() {
        let amp = if basis >> bi & 1 == 1 {
            (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
        } else {
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        };
        per_block.push(encode(&b.code, amp)?);
    }
    let mut amps = vec![Complex64::new(1.0, 0.0); 1 << total];
    for (idx, a) in amps.iter_mut().enumerate() {
        for (bi, b) in blocks.iter().enumerate() {
            let sub = (idx >> b.offset) & ((1usize << b.code.n) - 1);
            *a *= per_block[bi].amps[sub];
            if a.re == 0.0 && a.im == 0.0 {
                break;
            }
        }
    }
    let mut out = StateVector { n: total, amps };
    out.normalize();
    Ok(out)
}

/// Outcome of a logical-equivalence check.
#[derive(Debug, Clone)]
pub struct EquivReport {
    pub equivalent: bool,
    /// Minimum fidelity over the spanning set of logical axis states.
    pub fidelity: f64,
    /// Common global phase (radians) aligning circuit and target.
    pub phase: f64,
    /// Violated generator index and its expectation when the circuit
    /// leaks out of the code space.
    pub leakage: Option<(usize, f64)>,
}

fn axis_states() -> [(Complex64, Complex64); 6] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        (Complex64::new(r, 0.0), Complex64::new(r, 0.0)),
        (Complex64::new(r, 0.0), Complex64::new(-r, 0.0)),
        (Complex64::new(r, 0.0), Complex64::new(0.0, r)),
        (Complex64::new(r, 0.0), Complex64::new(0.0, -r)),
    ]
}

/// Checks that `circuit` acts on the code space of `blocks` as the
/// 2^k-dimensional logical unitary `target`, up to one global phase common
/// to all inputs. Spanning set: six axis states per logical qubit, product
/// combinations across blocks; fidelity threshold 1 - 1e-9.
pub fn logical_equiv(
    circuit: &Circuit,
    blocks: &[BlockLayout],
    target: &[Vec<Complex64>],
) -> Result<EquivReport, FtccError> {
    let k = blocks.len();
    let dim = 1usize << k;
    assert_eq!(target.len(), dim, "target dimension mismatch");
    let mut encoded: Vec<StateVector> = Vec::with_capacity(dim);
    for b in 0..dim {
        encoded.push(encode_blocks_basis(blocks, b)?);
    }
    let mut images: Vec<StateVector> = Vec::with_capacity(dim);
    for enc in encoded.iter() {
        let mut s = enc.clone();
        s.apply(circuit)?;
        images.push(s);
    }
    // logical-subspace matrix M[b'][b] = <enc(b') | U | enc(b)>
    let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for b in 0..dim {
        for bp in 0..dim {
            m[bp][b] = encoded[bp].inner(&images[b]);
        }
    }
    for (b, img) in images.iter().enumerate() {
        let in_span: f64 = (0..dim).map(|bp| m[bp][b].norm_sqr()).sum();
        if in_span < 1.0 - 1e-9 {
            let mut worst = (0usize, 1.0f64);
            let mut gen_idx = 0usize;
            for blk in blocks {
                for g in &blk.code.generators {
                    let e = img.expectation(&g.embed(circuit.n, blk.offset)).re;
                    if e < worst.1 {
                        worst = (gen_idx, e);
                    }
                    gen_idx += 1;
                }
            }
            return Ok(EquivReport {
                equivalent: false,
                fidelity: in_span,
                phase: 0.0,
                leakage: Some(worst),
            });
        }
    }
    // global phase from the largest target entry
    let mut best = (0usize, 0usize, 0.0f64);
    for r in 0..dim {
        for c in 0..dim {
            if target[r][c].norm() > best.2 {
                best = (r, c, target[r][c].norm());
            }
        }
    }
    let phase = (m[best.0][best.1] / target[best.0][best.1]).arg();
    let align = Complex64::from_polar(1.0, -phase);
    let axes = axis_states();
    let mut min_fid = 1.0f64;
    let mut ok = true;
    let combos = 6usize.pow(k as u32);
    for combo in 0..combos {
        let mut coeff = vec![Complex64::new(1.0, 0.0); dim];
        let mut rem = combo;
        for qi in 0..k {
            let (a0, a1) = axes[rem % 6];
            rem /= 6;
            for (b, c) in coeff.iter_mut().enumerate() {
                *c *= if b >> qi & 1 == 1 { a1 } else { a0 };
            }
        }
        let mut dot = Complex64::new(0.0, 0.0);
        for r in 0..dim {
            let mut out_r = Complex64::new(0.0, 0.0);
            let mut want_r = Complex64::new(0.0, 0.0);
            for c in 0..dim {
                out_r += m[r][c] * coeff[c];
                want_r += target[r][c] * coeff[c];
            }
            dot += want_r.conj() * out_r * align;
        }
        // |<target s | aligned U s>|^2; both sides are unit vectors
        let fid = dot.norm_sqr();
        min_fid = min_fid.min(fid);
        if fid < 1.0 - 1e-9 || dot.re < 0.0 {
            ok = false;
        }
    }
    Ok(EquivReport { equivalent: ok, fidelity: min_fid, phase, leakage: None })
}

/// Dense matrix of a named logical gate on `k` logical qubits. For the
/// CKZ family the phase lands on the all-ones logical basis state.
pub fn logical_target(kind: &GateKind, k: usize) -> Vec<Vec<Complex64>> {
    let dim = 1usize << k;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let frac = std::f64::consts::FRAC_1_SQRT_2;
    let single = |m: [[Complex64; 2]; 2]| -> Vec<Vec<Complex64>> {
        assert_eq!(k, 1, "single-qubit target on k={k}");
        vec![vec![m[0][0], m[0][1]], vec![m[1][0], m[1][1]]]
    };
    match kind {
        GateKind::H => single([[one * frac, one * frac], [one * frac, -one * frac]]),
        GateKind::S => single([[one, zero], [zero, i]]),
        GateKind::Sdg => single([[one, zero], [zero, -i]]),
        GateKind::K => single([[one * frac, one * frac], [i * frac, -i * frac]]),
        GateKind::Kdg => single([[one * frac, -i * frac], [one * frac, i * frac]]),
        GateKind::T => {
            single([[one, zero], [zero, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]])
        }
        GateKind::Tdg => {
            single([[one, zero], [zero, Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)]])
        }
        GateKind::X => single([[zero, one], [one, zero]]),
        GateKind::Y => single([[zero, -i], [i, zero]]),
        GateKind::Z => single([[one, zero], [zero, -one]]),
        GateKind::ZRot(t) => single([[one, zero], [zero, Complex64::from_polar(1.0, *t)]]),
        GateKind::Cnot => {
            assert_eq!(k, 2);
            // logical qubit 0 = control (basis bit 0), qubit 1 = target
            let mut m = vec![vec![zero; dim]; dim];
            for b in 0..dim {
                let out = if b & 1 == 1 { b ^ 2 } else { b };
                m[out][b] = one;
            }
            m
        }
        GateKind::Cz | GateKind::Ccz | GateKind::Ckz(_) => {
            let theta = match kind {
                GateKind::Ckz(t) => *t,
                _ => std::f64::consts::PI,
            };
            let mut m = vec![vec![zero; dim]; dim];
            for (b, row) in m.iter_mut().enumerate() {
                row[b] = if b == dim - 1 { Complex64::from_polar(1.0, theta) } else { one };
            }
            m
        }
        other => panic!("no logical target for {}", other.name()),
    }
}

/// Identity target of dimension 2^k.
pub fn identity_target(k: usize) -> Vec<Vec<Complex64>> {
    let dim = 1usize << k;
    let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (b, row) in m.iter_mut().enumerate() {
        row[b] = Complex64::new(1.0, 0.0);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::BaseCode;

    fn block(code: StabilizerCode) -> Vec<BlockLayout> {
        vec![BlockLayout { code, offset: 0 }]
    }

    #[test]
    fn encode_is_stabilized() {
        for which in [BaseCode::FiveQubit, BaseCode::Steane] {
            let code = StabilizerCode::base(which);
            let s = encode(&code, (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))).unwrap();
            for g in &code.generators {
                let e = s.expectation(g);
                assert!((e.re - 1.0).abs() < 1e-10 && e.im.abs() < 1e-10, "{which:?}");
            }
            assert!((s.expectation(&code.logical_z).re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn encode_logical_one_and_plus() {
        let fq = StabilizerCode::base(BaseCode::FiveQubit);
        let one = encode(&fq, (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))).unwrap();
        assert!((one.expectation(&fq.logical_z).re + 1.0).abs() < 1e-10);

        let rm = StabilizerCode::base(BaseCode::Rm15);
        let inv = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let plus = encode(&rm, (inv, inv)).unwrap();
        assert!((plus.expectation(&rm.logical_x).re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn transversal_x_flips_logical_z() {
        let st = StabilizerCode::base(BaseCode::Steane);
        let mut s = encode(&st, (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))).unwrap();
        s.apply_pauli(&st.logical_x);
        assert!((s.expectation(&st.logical_z).re + 1.0).abs() < 1e-10);
    }

    #[test]
    fn zrot_zero_is_identity() {
        let st = StabilizerCode::base(BaseCode::Steane);
        let s = encode(&st, (Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0))).unwrap();
        let mut t = s.clone();
        let mut c = Circuit::new(7);
        c.push(GateKind::ZRot(0.0), vec![0]);
        t.apply(&c).unwrap();
        assert!((s.inner(&t).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_circuit_equivalence() {
        let st = StabilizerCode::base(BaseCode::Steane);
        let c = Circuit::new(7);
        let rep = logical_equiv(&c, &block(st), &identity_target(1)).unwrap();
        assert!(rep.equivalent);
        assert!(rep.fidelity > 1.0 - 1e-12);
    }

    #[test]
    fn equivalence_invariant_under_appended_stabilizer() {
        let st = StabilizerCode::base(BaseCode::Steane);
        let mut c = Circuit::new(7);
        for q in 0..7 {
            c.push(GateKind::H, vec![q]);
        }
        // append a stabilizer generator as explicit gates
        for &q in &st.generators[0].support() {
            match st.generators[0].letter(q) {
                PauliLetter::X => c.push(GateKind::X, vec![q]),
                PauliLetter::Z => c.push(GateKind::Z, vec![q]),
                PauliLetter::Y => c.push(GateKind::Y, vec![q]),
                PauliLetter::I => &mut c,
            };
        }
        let rep = logical_equiv(&c, &block(st), &logical_target(&GateKind::H, 1)).unwrap();
        assert!(rep.equivalent, "fidelity {}", rep.fidelity);
    }

    #[test]
    fn rm15_transversal_t_dagger_convention() {
        let rm = StabilizerCode::base(BaseCode::Rm15);
        let mut hits = Vec::new();
        for kind in [GateKind::T, GateKind::Tdg] {
            let mut c = Circuit::new(15);
            for q in 0..15 {
                c.push(kind.clone(), vec![q]);
            }
            let rep =
                logical_equiv(&c, &block(rm.clone()), &logical_target(&GateKind::T, 1)).unwrap();
            if rep.equivalent {
                hits.push(kind.name());
            }
        }
        assert_eq!(hits.len(), 1, "dagger convention must be unique: {hits:?}");
    }

    #[test]
    fn leakage_is_reported() {
        let st = StabilizerCode::base(BaseCode::Steane);
        let mut c = Circuit::new(7);
        c.push(GateKind::H, vec![0]);
        let rep = logical_equiv(&c, &block(st), &identity_target(1)).unwrap();
        assert!(!rep.equivalent);
        assert!(rep.leakage.is_some());
    }

    #[test]
    fn random_state_roundtrip_fidelity() {
        // composed gadget and inverse target on random logical states
        let st = StabilizerCode::base(BaseCode::Steane);
        let mut rng = 0xABCDu64;
        let mut next = move || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((rng >> 33) as f64) / (u32::MAX >> 2) as f64
        };
        for _ in 0..100 {
            let (a, b) = (next(), next());
            let norm = (a * a + b * b).sqrt().max(1e-9);
            let state = encode(
                &st,
                (Complex64::new(a / norm, 0.0), Complex64::new(b / norm, 0.0)),
            )
            .unwrap();
            let mut c = Circuit::new(7);
            for q in 0..7 {
                c.push(GateKind::H, vec![q]);
            }
            let round = c.compose(&c.inverse().unwrap()).unwrap();
            let mut out = state.clone();
            out.apply(&round).unwrap();
            assert!((state.inner(&out).norm_sqr() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn budget_is_enforced() {
        std::env::set_var("FTCC_BUDGET_MB", "1");
        let r = StateVector::zero_state(20);
        std::env::remove_var("FTCC_BUDGET_MB");
        assert!(matches!(r, Err(FtccError::SvBudget { .. })));
    }
}
