//! Fault models, fault propagation with ideal intermediate error
//! correction, the decoder-independent correctability criterion, and the
//! effective-distance verifier.
//!
//! The criterion: enumerate (or sample) fault patterns of size <= t,
//! propagate every branch to the end of the circuit recording the syndrome
//! history at each EC marker, and bucket by (history, final syndrome).
//! A configuration is correctable iff no bucket mixes two logical classes.
//! Blocks corrupted by opaque gates are handled as erasures through a
//! subset-logical rank check over the corrupted block plus the involved
//! error supports.

pub mod decoder;
pub mod witness;

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::circuit::{conjugate_gate_clifford, BlockLayout, Circuit, Gate, GateKind};
use crate::code::{StabilizerCode, Syndrome};
use crate::concat::Composite;
use crate::error::FtccError;
use crate::gf2::RowSpace;
use crate::pauli::{PauliLetter, PauliOperator};

/// Everything the verifier needs to know about the system a circuit acts
/// on: inner blocks, bare qubits, the flattened generator list (inner
/// generators grouped per block, then outer generators) and logical pairs.
#[derive(Debug, Clone)]
pub struct VerifyContext {
    pub n: usize,
    pub blocks: Vec<BlockLayout>,
    pub bare_qubits: Vec<usize>,
    pub generators: Vec<PauliOperator>,
    /// Generator index range of each block (into `generators`).
    pub block_gen_range: Vec<std::ops::Range<usize>>,
    pub outer_gen_start: usize,
    pub logicals: Vec<(PauliOperator, PauliOperator)>,
    /// Sub-context describing the outer level, when one exists.
    pub outer: Option<OuterInfo>,
}

/// Outer-level structure for hierarchical decoding and witness search.
#[derive(Debug, Clone)]
pub struct OuterInfo {
    pub code: StabilizerCode,
    pub copies: usize,
    /// (copy, outer qubit) -> block id, for encoded qubits.
    pub block_of: Vec<Vec<Option<usize>>>,
    /// (copy, outer qubit) -> physical offset, for bare qubits.
    pub bare_of: Vec<Vec<Option<usize>>>,
}

impl VerifyContext {
    pub fn from_composite(c: &Composite) -> VerifyContext {
        let outer_code = c.spec.outer_code();
        let n1 = outer_code.n;
        let mut bare_of = vec![vec![None; n1]; c.copies];
        for copy in 0..c.copies {
            for q in 0..n1 {
                if c.block_of[copy][q].is_none() {
                    bare_of[copy][q] = Some(c.qubit_map[copy][q].start);
                }
            }
        }
        VerifyContext {
            n: c.n,
            blocks: c.block_layouts(),
            bare_qubits: c.bare_qubits.clone(),
            generators: c.generators.clone(),
            block_gen_range: c.block_gen_range.clone(),
            outer_gen_start: c.outer_gen_start,
            logicals: c.logicals.clone(),
            outer: Some(OuterInfo {
                code: outer_code,
                copies: c.copies,
                block_of: c.block_of.clone(),
                bare_of,
            }),
        }
    }

    /// A bare multi-block system (no outer level), e.g. for verifying a
    /// standalone cross-code CNOT between two code blocks.
    pub fn from_blocks(blocks: &[BlockLayout]) -> VerifyContext {
        let n = blocks.iter().map(|b| b.offset + b.code.n).max().unwrap_or(0);
        let mut generators = Vec::new();
        let mut block_gen_range = Vec::new();
        let mut logicals = Vec::new();
        for b in blocks {
            let start = generators.len();
            for g in &b.code.generators {
                generators.push(g.embed(n, b.offset));
            }
            block_gen_range.push(start..generators.len());
            logicals.push((b.code.logical_x.embed(n, b.offset), b.code.logical_z.embed(n, b.offset)));
        }
        let outer_gen_start = generators.len();
        VerifyContext {
            n,
            blocks: blocks.to_vec(),
            bare_qubits: Vec::new(),
            generators,
            block_gen_range,
            outer_gen_start,
            logicals,
            outer: None,
        }
    }

    /// Full flattened syndrome of an error.
    pub fn syndrome(&self, e: &PauliOperator) -> Syndrome {
        let mut s = Syndrome::zero(self.generators.len());
        for (i, g) in self.generators.iter().enumerate() {
            if e.symplectic_form(g) == 1 {
                s.set_bit(i, true);
            }
        }
        s
    }

    /// Block-local syndrome bits of an error.
    pub fn block_syndrome(&self, block: usize, e: &PauliOperator) -> u64 {
        let mut bits = 0u64;
        for (i, gi) in self.block_gen_range[block].clone().enumerate() {
            if e.symplectic_form(&self.generators[gi]) == 1 {
                bits |= 1 << i;
            }
        }
        bits
    }

    /// Logical class bits: (anti-commutation with L_Z, with L_X) per pair,
    /// i.e. the X-part and Z-part of the class.
    pub fn class_bits(&self, e: &PauliOperator) -> u64 {
        let mut bits = 0u64;
        for (i, (lx, lz)) in self.logicals.iter().enumerate() {
            if e.symplectic_form(lz) == 1 {
                bits |= 1 << (2 * i);
            }
            if e.symplectic_form(lx) == 1 {
                bits |= 1 << (2 * i + 1);
            }
        }
        bits
    }

    pub fn block_of_qubit(&self, q: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.qubits().contains(&q))
    }

    /// True iff some operator supported on `subset` commutes with every
    /// generator but lies outside the generator span (nontrivial logical
    /// class on the erased region).
    pub fn supports_nontrivial_logical(&self, subset: &[usize]) -> bool {
        let inset: std::collections::HashSet<usize> = subset.iter().copied().collect();
        let complement: Vec<usize> = (0..self.n).filter(|q| !inset.contains(q)).collect();
        let rows_s: Vec<Vec<u64>> =
            self.generators.iter().map(|g| g.restrict(subset).symplectic_row()).collect();
        let r1 = RowSpace::from_rows(2 * subset.len(), rows_s.iter().map(|r| r.as_slice())).rank();
        let rows_c: Vec<Vec<u64>> =
            self.generators.iter().map(|g| g.restrict(&complement).symplectic_row()).collect();
        let r2 =
            RowSpace::from_rows(2 * complement.len(), rows_c.iter().map(|r| r.as_slice())).rank();
        let normalizer_dim = 2 * subset.len() - r1;
        let stab_dim = self.generators.len() - r2;
        normalizer_dim > stab_dim
    }
}

/// A single fault location.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Location {
    /// Error present on a qubit before the circuit starts.
    Input { qubit: usize },
    /// Error injected on one support qubit right after a gate.
    AfterGate { gate: usize, qubit: usize },
    /// Arbitrary Pauli over a rotation gate's full support.
    RotationJoint { gate: usize },
    /// Single internal fault of an opaque region: arbitrary Pauli on the
    /// block it owns.
    OpaqueCorruption { gate: usize, block: usize },
}

impl Location {
    fn time(&self) -> (usize, usize) {
        match self {
            Location::Input { .. } => (0, 0),
            Location::AfterGate { gate, .. }
            | Location::RotationJoint { gate }
            | Location::OpaqueCorruption { gate, .. } => (gate + 1, 0),
        }
    }
}

/// Enumerates fault locations: one after each gate per support qubit, one
/// joint location per multi-qubit rotation, one corruption location per
/// opaque gate, plus input locations. EC markers contribute none.
pub fn fault_locations(circuit: &Circuit) -> Vec<Location> {
    let mut out = Vec::new();
    for q in 0..circuit.n {
        out.push(Location::Input { qubit: q });
    }
    for (gi, g) in circuit.gates.iter().enumerate() {
        match &g.kind {
            GateKind::EcMarker(_) | GateKind::PieceBoundary => {}
            GateKind::Opaque(_, b) => out.push(Location::OpaqueCorruption { gate: gi, block: *b }),
            kind => {
                for &q in &g.supports {
                    out.push(Location::AfterGate { gate: gi, qubit: q });
                }
                if g.supports.len() >= 2
                    && matches!(kind, GateKind::Cz | GateKind::Ccz | GateKind::Ckz(_))
                {
                    out.push(Location::RotationJoint { gate: gi });
                }
            }
        }
    }
    out
}

/// One located fault with its Pauli content.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fault {
    pub location: Location,
    /// Letters matching the location: one letter for input/port faults,
    /// one per support qubit for joint rotation faults, empty for opaque
    /// corruptions.
    pub letters: Vec<PauliLetter>,
}

/// A set of located faults.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct FaultPattern {
    pub faults: Vec<Fault>,
}

impl FaultPattern {
    pub fn size(&self) -> usize {
        self.faults.len()
    }
}

/// Outcome of propagating one pattern.
#[derive(Debug, Clone)]
pub struct PropagationOutcome {
    /// Per branch: final error and the EC syndrome history (one entry per
    /// EC marker encountered, in order).
    pub branches: Vec<(PauliOperator, Vec<u64>)>,
    /// Blocks treated as wildcards (opaque corruption or errors entering
    /// an opaque region).
    pub wildcard_blocks: BTreeSet<usize>,
}

fn apply_gate_branches(
    gate: &Gate,
    branches: &mut Vec<(PauliOperator, Vec<u64>)>,
) {
    let diagonal_nc = matches!(
        gate.kind,
        GateKind::T | GateKind::Tdg | GateKind::Ccz | GateKind::Ckz(_)
    ) || matches!(gate.kind, GateKind::ZRot(_) if !gate.kind.is_clifford());
    if diagonal_nc {
        let mut next = Vec::with_capacity(branches.len());
        for (err, hist) in branches.iter() {
            if gate.supports.iter().any(|&q| err.x_bit(q)) {
                let k = gate.supports.len();
                for mask in 0..(1u32 << k) {
                    let mut b = err.clone();
                    for (i, &q) in gate.supports.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            b.set_z_bit(q, !b.z_bit(q));
                        }
                    }
                    next.push((b, hist.clone()));
                }
            } else {
                next.push((err.clone(), hist.clone()));
            }
        }
        // dedupe phase-insensitively
        let mut seen = std::collections::HashSet::new();
        branches.clear();
        for (b, h) in next {
            if seen.insert((b.symplectic_row(), h.clone())) {
                branches.push((b, h));
            }
        }
    } else {
        for (err, _) in branches.iter_mut() {
            conjugate_gate_clifford(err, gate);
        }
    }
}

/// The decoder used at EC markers (ideal intermediate error correction:
/// the accumulated block error is replaced by the lookup decoder residual).
pub use decoder::LookupTables;

/// Propagates a fault pattern through the circuit. Intermediate EC markers
/// record the block syndrome into the branch history and apply the block
/// lookup correction. Opaque gates turn their block into a wildcard: its
/// tracked error content is absorbed (the erasure handling accounts for
/// anything supported there).
pub fn propagate_faults(
    ctx: &VerifyContext,
    circuit: &Circuit,
    tables: &LookupTables,
    pattern: &FaultPattern,
) -> PropagationOutcome {
    let mut branches: Vec<(PauliOperator, Vec<u64>)> =
        vec![(PauliOperator::identity(ctx.n), Vec::new())];
    let mut wildcard_blocks: BTreeSet<usize> = BTreeSet::new();
    // group faults by injection time
    let mut by_time: HashMap<(usize, usize), Vec<&Fault>> = HashMap::new();
    for f in &pattern.faults {
        by_time.entry(f.location.time()).or_default().push(f);
    }
    let inject = |branches: &mut Vec<(PauliOperator, Vec<u64>)>,
                  wild: &mut BTreeSet<usize>,
                  faults: &[&Fault]| {
        for f in faults {
            match &f.location {
                Location::Input { qubit } | Location::AfterGate { qubit, .. } => {
                    let p = PauliOperator::single(ctx.n, *qubit, f.letters[0]);
                    for (err, _) in branches.iter_mut() {
                        err.mul_assign(&p);
                    }
                }
                Location::RotationJoint { gate } => {
                    let supports = &circuit.gates[*gate].supports;
                    let mut p = PauliOperator::identity(ctx.n);
                    for (i, &q) in supports.iter().enumerate() {
                        p.set_letter(q, f.letters[i]);
                    }
                    for (err, _) in branches.iter_mut() {
                        err.mul_assign(&p);
                    }
                }
                Location::OpaqueCorruption { block, .. } => {
                    wild.insert(*block);
                }
            }
        }
    };
    if let Some(fs) = by_time.get(&(0, 0)) {
        inject(&mut branches, &mut wildcard_blocks, fs);
    }
    for (gi, gate) in circuit.gates.iter().enumerate() {
        match &gate.kind {
            GateKind::EcMarker(b) => {
                let block = &ctx.blocks[*b];
                if wildcard_blocks.contains(b) {
                    // erased block: no usable record
                } else {
                    for (err, hist) in branches.iter_mut() {
                        let synd = ctx.block_syndrome(*b, err);
                        hist.push(synd);
                        if synd != 0 {
                            let correction = tables.block_correction(&block.code, synd);
                            err.mul_assign(&correction.embed(ctx.n, block.offset));
                        }
                    }
                }
            }
            GateKind::PieceBoundary => {}
            GateKind::Opaque(_, b) => {
                // any tracked content on the block is absorbed by the wildcard
                let block = &ctx.blocks[*b];
                let touches = branches.iter().any(|(err, _)| {
                    block.qubits().any(|q| err.x_bit(q) || err.z_bit(q))
                });
                if touches || wildcard_blocks.contains(b) {
                    wildcard_blocks.insert(*b);
                }
                if wildcard_blocks.contains(b) {
                    for (err, _) in branches.iter_mut() {
                        for q in block.qubits() {
                            err.set_x_bit(q, false);
                            err.set_z_bit(q, false);
                        }
                        err.set_raw_phase(0);
                    }
                }
            }
            _ => {
                apply_gate_branches(gate, &mut branches);
                // wildcard blocks stay erased: drop content copied onto them
                if !wildcard_blocks.is_empty() {
                    for &b in wildcard_blocks.iter() {
                        let block = &ctx.blocks[b];
                        for (err, _) in branches.iter_mut() {
                            for q in block.qubits() {
                                err.set_x_bit(q, false);
                                err.set_z_bit(q, false);
                            }
                        }
                    }
                }
            }
        }
        if let Some(fs) = by_time.get(&(gi + 1, 0)) {
            inject(&mut branches, &mut wildcard_blocks, fs);
        }
    }
    PropagationOutcome { branches, wildcard_blocks }
}

/// Verification mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Sampled { seed: u64, samples: u64 },
}

/// Verdict of a correctability run.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Verdict {
    Correctable,
    Counterexample {
        pattern_a: FaultPattern,
        pattern_b: FaultPattern,
        /// Logical class bits differing between the two propagated errors.
        class_a: u64,
        class_b: u64,
    },
    /// An erasure envelope admits a nontrivial logical.
    WildcardCounterexample {
        pattern_a: FaultPattern,
        pattern_b: FaultPattern,
        envelope: Vec<usize>,
    },
}

impl Verdict {
    pub fn is_correctable(&self) -> bool {
        matches!(self, Verdict::Correctable)
    }
}

/// Result of a correctability check.
#[derive(Debug, Clone, Serialize)]
pub struct CorrectabilityReport {
    pub t: usize,
    pub mode: Mode,
    pub verdict: Verdict,
    pub locations_scanned: usize,
    pub patterns_checked: u64,
    pub wildcard_patterns: u64,
    pub runtime_ms: u128,
}

struct SignatureTable {
    map: HashMap<Vec<u64>, (u64, FaultPattern)>,
}

impl SignatureTable {
    fn new() -> SignatureTable {
        SignatureTable { map: HashMap::new() }
    }

    /// Inserts one propagated branch; returns a conflicting pattern when
    /// the same syndrome history carries a different logical class.
    fn insert(
        &mut self,
        history: &[u64],
        syndrome: &Syndrome,
        class: u64,
        pattern: &FaultPattern,
    ) -> Option<(FaultPattern, u64)> {
        let mut key = Vec::with_capacity(history.len() + syndrome.words().len() + 1);
        key.push(history.len() as u64);
        key.extend_from_slice(history);
        key.extend_from_slice(syndrome.words());
        match self.map.get(&key) {
            Some((existing_class, existing_pattern)) => {
                if *existing_class != class {
                    Some((existing_pattern.clone(), *existing_class))
                } else {
                    None
                }
            }
            None => {
                self.map.insert(key, (class, pattern.clone()));
                None
            }
        }
    }
}

/// Options for `correctable`.
#[derive(Debug, Clone)]
pub struct CorrectableOptions {
    pub t: usize,
    pub mode: Mode,
}

fn letters3() -> [PauliLetter; 3] {
    [PauliLetter::X, PauliLetter::Y, PauliLetter::Z]
}

/// Single-fault choices at a location.
fn fault_choices(circuit: &Circuit, loc: &Location) -> Vec<Fault> {
    match loc {
        Location::Input { .. } | Location::AfterGate { .. } => letters3()
            .iter()
            .map(|&l| Fault { location: loc.clone(), letters: vec![l] })
            .collect(),
        Location::RotationJoint { gate } => {
            let arity = circuit.gates[*gate].supports.len();
            let mut out = Vec::new();
            let total = 4usize.pow(arity as u32);
            for combo in 1..total {
                let mut letters = Vec::with_capacity(arity);
                let mut rem = combo;
                let mut nontrivial = 0;
                for _ in 0..arity {
                    let l = match rem % 4 {
                        0 => PauliLetter::I,
                        1 => PauliLetter::X,
                        2 => PauliLetter::Y,
                        _ => PauliLetter::Z,
                    };
                    if l != PauliLetter::I {
                        nontrivial += 1;
                    }
                    letters.push(l);
                    rem /= 4;
                }
                // single-qubit contents already exist as port faults
                if nontrivial >= 2 {
                    out.push(Fault { location: loc.clone(), letters });
                }
            }
            out
        }
        Location::OpaqueCorruption { .. } => {
            vec![Fault { location: loc.clone(), letters: Vec::new() }]
        }
    }
}

/// Packed qubit-support mask.
fn mask_words(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

fn mask_set(mask: &mut [u64], q: usize) {
    mask[q / 64] |= 1 << (q % 64);
}

fn mask_or(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d |= s;
    }
}

fn mask_qubits(mask: &[u64], n: usize) -> Vec<usize> {
    (0..n).filter(|&q| mask[q / 64] >> (q % 64) & 1 == 1).collect()
}

/// Wildcard-pattern record for the erasure analysis (deduplicated on the
/// block set and support mask).
struct WildRecord {
    blocks: BTreeSet<usize>,
    mask: Vec<u64>,
    pattern: FaultPattern,
}

/// Necessary-condition profile of one outer-logical completion: the bare
/// qubits it needs plus the encoded blocks that must each receive a
/// weight-3 representative from the paired supports.
struct CompletionProfile {
    bare_mask: Vec<u64>,
    block_needs: Vec<usize>,
}

/// Prefilter profiles for a given wildcard block set: every nontrivial
/// outer-class coset element, with positions covered by the wild blocks
/// dropped. Completions through blocks whose class representatives exceed
/// weight 3 are kept with the weight-3 necessity relaxed to the block
/// count (still a sound necessary condition).
fn completion_profiles(ctx: &VerifyContext, wild: &BTreeSet<usize>) -> Option<Vec<CompletionProfile>> {
    let outer = ctx.outer.as_ref()?;
    let words = mask_words(ctx.n);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for copy in 0..outer.copies {
        for class in [crate::code::LogicalClass::X, crate::code::LogicalClass::Y, crate::code::LogicalClass::Z] {
            for rep in outer.code.coset_iter(&outer.code.logical_rep(class)) {
                let mut bare_mask = vec![0u64; words];
                let mut block_needs = Vec::new();
                let mut ok = true;
                for q in rep.support() {
                    if let Some(b) = outer.block_of[copy][q] {
                        if wild.contains(&b) {
                            continue;
                        }
                        block_needs.push(b);
                    } else if let Some(off) = outer.bare_of[copy][q] {
                        mask_set(&mut bare_mask, off);
                    } else {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    continue;
                }
                block_needs.sort_unstable();
                let key = (bare_mask.clone(), block_needs.clone());
                if seen.insert(key) {
                    out.push(CompletionProfile { bare_mask, block_needs });
                }
            }
        }
    }
    Some(out)
}

struct EnvelopeCache<'a> {
    ctx: &'a VerifyContext,
    cache: HashMap<Vec<u64>, bool>,
}

impl<'a> EnvelopeCache<'a> {
    fn new(ctx: &'a VerifyContext) -> Self {
        EnvelopeCache { ctx, cache: HashMap::new() }
    }

    fn admits_logical(&mut self, envelope_mask: &[u64]) -> bool {
        if let Some(&v) = self.cache.get(envelope_mask) {
            return v;
        }
        let qubits = mask_qubits(envelope_mask, self.ctx.n);
        let v = self.ctx.supports_nontrivial_logical(&qubits);
        self.cache.insert(envelope_mask.to_vec(), v);
        v
    }
}

/// Decoder-independent correctability of `circuit` against `ctx` for all
/// fault patterns of size <= t (exhaustive) or a seeded sample.
pub fn correctable(
    ctx: &VerifyContext,
    circuit: &Circuit,
    tables: &LookupTables,
    opts: &CorrectableOptions,
) -> Result<CorrectabilityReport, FtccError> {
    let start = std::time::Instant::now();
    let words = mask_words(ctx.n);
    let locations = fault_locations(circuit);
    let mut table = SignatureTable::new();
    let mut wild_records: Vec<WildRecord> = Vec::new();
    let mut wild_seen: std::collections::HashSet<(Vec<usize>, Vec<u64>)> =
        std::collections::HashSet::new();
    // distinct support masks of deterministic patterns that concentrate
    // weight >= 2 in one block or touch a bare qubit: the only shapes able
    // to complete an erasure into a logical together with a wildcard
    let mut dense_masks: std::collections::HashSet<Vec<u64>> = std::collections::HashSet::new();
    let mut dense_list: Vec<(Vec<u64>, FaultPattern)> = Vec::new();
    let mut patterns_checked = 0u64;
    let mut wildcard_patterns = 0u64;
    let mut verdict = Verdict::Correctable;

    let consider =
        |pattern: &FaultPattern,
         table: &mut SignatureTable,
         wild_records: &mut Vec<WildRecord>,
         wild_seen: &mut std::collections::HashSet<(Vec<usize>, Vec<u64>)>,
         dense_masks: &mut std::collections::HashSet<Vec<u64>>,
         dense_list: &mut Vec<(Vec<u64>, FaultPattern)>,
         patterns_checked: &mut u64,
         wildcard_patterns: &mut u64|
         -> Option<Verdict> {
            *patterns_checked += 1;
            let outcome = propagate_faults(ctx, circuit, tables, pattern);
            let mut mask = vec![0u64; words];
            if outcome.wildcard_blocks.is_empty() {
                for (err, hist) in &outcome.branches {
                    let synd = ctx.syndrome(err);
                    let class = ctx.class_bits(err);
                    for q in err.support() {
                        mask_set(&mut mask, q);
                    }
                    if let Some((other, other_class)) = table.insert(hist, &synd, class, pattern) {
                        // replay both patterns to confirm before reporting
                        if confirm_counterexample(ctx, circuit, tables, pattern, &other) {
                            return Some(Verdict::Counterexample {
                                pattern_a: other,
                                pattern_b: pattern.clone(),
                                class_a: other_class,
                                class_b: class,
                            });
                        }
                    }
                }
                // dense shapes feed the wildcard pair analysis
                let mut dense = false;
                let mut per_block: HashMap<usize, usize> = HashMap::new();
                for q in mask_qubits(&mask, ctx.n) {
                    match ctx.block_of_qubit(q) {
                        Some(b) => {
                            let c = per_block.entry(b).or_insert(0);
                            *c += 1;
                            if *c >= 2 {
                                dense = true;
                            }
                        }
                        None => dense = true,
                    }
                }
                if dense && dense_masks.len() < 60_000 && dense_masks.insert(mask.clone()) {
                    dense_list.push((mask, pattern.clone()));
                }
            } else {
                *wildcard_patterns += 1;
                for (err, _) in &outcome.branches {
                    for q in err.support() {
                        mask_set(&mut mask, q);
                    }
                }
                let key: Vec<usize> = outcome.wildcard_blocks.iter().copied().collect();
                if wild_seen.insert((key, mask.clone())) {
                    wild_records.push(WildRecord {
                        blocks: outcome.wildcard_blocks,
                        mask,
                        pattern: pattern.clone(),
                    });
                }
            }
            None
        };

    match opts.mode {
        Mode::Exhaustive => {
            // empty pattern participates too (baseline bucket)
            let empty = FaultPattern::default();
            if let Some(v) = consider(
                &empty,
                &mut table,
                &mut wild_records,
                &mut wild_seen,
                &mut dense_masks,
                &mut dense_list,
                &mut patterns_checked,
                &mut wildcard_patterns,
            ) {
                verdict = v;
            }
            let singles: Vec<Fault> =
                locations.iter().flat_map(|l| fault_choices(circuit, l)).collect();
            'outer: for t_level in 1..=opts.t {
                if singles.len() < t_level {
                    break;
                }
                let mut idx = vec![0usize; t_level];
                for (i, slot) in idx.iter_mut().enumerate() {
                    *slot = i;
                }
                loop {
                    let pattern =
                        FaultPattern { faults: idx.iter().map(|&i| singles[i].clone()).collect() };
                    if let Some(v) = consider(
                        &pattern,
                        &mut table,
                        &mut wild_records,
                        &mut wild_seen,
                        &mut dense_masks,
                        &mut dense_list,
                        &mut patterns_checked,
                        &mut wildcard_patterns,
                    ) {
                        verdict = v;
                        break 'outer;
                    }
                    if idx[0] == singles.len() - t_level {
                        break;
                    }
                    // next combination of fault indices
                    let mut i = t_level;
                    while i > 0 {
                        i -= 1;
                        if idx[i] != i + singles.len() - t_level {
                            idx[i] += 1;
                            for j in i + 1..t_level {
                                idx[j] = idx[j - 1] + 1;
                            }
                            break;
                        }
                    }
                }
            }
        }
        Mode::Sampled { seed, samples } => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            let singles: Vec<Fault> =
                locations.iter().flat_map(|l| fault_choices(circuit, l)).collect();
            let empty = FaultPattern::default();
            let _ = consider(
                &empty,
                &mut table,
                &mut wild_records,
                &mut wild_seen,
                &mut dense_masks,
                &mut dense_list,
                &mut patterns_checked,
                &mut wildcard_patterns,
            );
            for _ in 0..samples {
                let size = rng.gen_range(1..=opts.t);
                let mut chosen: BTreeSet<usize> = BTreeSet::new();
                while chosen.len() < size.min(singles.len()) {
                    chosen.insert(rng.gen_range(0..singles.len()));
                }
                let pattern =
                    FaultPattern { faults: chosen.iter().map(|&i| singles[i].clone()).collect() };
                if let Some(v) = consider(
                    &pattern,
                    &mut table,
                    &mut wild_records,
                    &mut wild_seen,
                    &mut dense_masks,
                    &mut dense_list,
                    &mut patterns_checked,
                    &mut wildcard_patterns,
                ) {
                    verdict = v;
                    break;
                }
            }
        }
    }

    // erasure analysis: wildcard patterns against themselves, each other
    // and the dense deterministic shapes, with a completion-profile
    // prefilter keeping the pair volume tractable
    if verdict.is_correctable() && !wild_records.is_empty() {
        let mut cache = EnvelopeCache::new(ctx);
        let blocks_mask = |blocks: &BTreeSet<usize>| -> Vec<u64> {
            let mut m = vec![0u64; words];
            for &b in blocks {
                for q in ctx.blocks[b].qubits() {
                    mask_set(&mut m, q);
                }
            }
            m
        };
        let block_counts = |mask: &[u64]| -> Vec<u8> {
            let mut counts = vec![0u8; ctx.blocks.len()];
            for q in mask_qubits(mask, ctx.n) {
                if let Some(b) = ctx.block_of_qubit(q) {
                    counts[b] = counts[b].saturating_add(1);
                }
            }
            counts
        };
        let subset = |small: &[u64], big: &[u64]| small.iter().zip(big).all(|(s, b)| s & !b == 0);
        let mut profile_cache: HashMap<Vec<usize>, Option<Vec<CompletionProfile>>> = HashMap::new();
        'wild: for (i, w) in wild_records.iter().enumerate() {
            let mut base = blocks_mask(&w.blocks);
            mask_or(&mut base, &w.mask);
            if cache.admits_logical(&base) {
                verdict = Verdict::WildcardCounterexample {
                    pattern_a: w.pattern.clone(),
                    pattern_b: FaultPattern::default(),
                    envelope: mask_qubits(&base, ctx.n),
                };
                break 'wild;
            }
            let base_counts = block_counts(&base);
            let bkey: Vec<usize> = w.blocks.iter().copied().collect();
            if !profile_cache.contains_key(&bkey) {
                profile_cache.insert(bkey.clone(), completion_profiles(ctx, &w.blocks));
            }
            let profiles: &Option<Vec<CompletionProfile>> = &profile_cache[&bkey];
            let prefilter = |counts: &[u8], combined_mask: &[u64]| -> bool {
                match profiles {
                    None => true, // no outer level: always run the exact test
                    Some(list) => list.iter().any(|p| {
                        subset(&p.bare_mask, combined_mask)
                            && p.block_needs.iter().all(|&b| counts[b] >= 3)
                    }),
                }
            };
            // against other wildcard patterns
            for w2 in wild_records.iter().skip(i + 1) {
                let mut env = base.clone();
                mask_or(&mut env, &blocks_mask(&w2.blocks));
                mask_or(&mut env, &w2.mask);
                let counts = block_counts(&env);
                if prefilter(&counts, &env) && cache.admits_logical(&env) {
                    verdict = Verdict::WildcardCounterexample {
                        pattern_a: w.pattern.clone(),
                        pattern_b: w2.pattern.clone(),
                        envelope: mask_qubits(&env, ctx.n),
                    };
                    break 'wild;
                }
            }
            // against dense deterministic patterns
            for (dm, dp) in dense_list.iter() {
                let mut env = base.clone();
                mask_or(&mut env, dm);
                let mut counts = base_counts.clone();
                for q in mask_qubits(dm, ctx.n) {
                    if let Some(b) = ctx.block_of_qubit(q) {
                        counts[b] = counts[b].saturating_add(1);
                    }
                }
                if prefilter(&counts, &env) && cache.admits_logical(&env) {
                    verdict = Verdict::WildcardCounterexample {
                        pattern_a: w.pattern.clone(),
                        pattern_b: dp.clone(),
                        envelope: mask_qubits(&env, ctx.n),
                    };
                    break 'wild;
                }
            }
        }
    }

    Ok(CorrectabilityReport {
        t: opts.t,
        mode: opts.mode,
        verdict,
        locations_scanned: locations.len(),
        patterns_checked,
        wildcard_patterns,
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// Replays two patterns and confirms: identical syndrome histories on some
/// branch pair with logical classes differing.
fn confirm_counterexample(
    ctx: &VerifyContext,
    circuit: &Circuit,
    tables: &LookupTables,
    a: &FaultPattern,
    b: &FaultPattern,
) -> bool {
    let oa = propagate_faults(ctx, circuit, tables, a);
    let ob = propagate_faults(ctx, circuit, tables, b);
    for (ea, ha) in &oa.branches {
        for (eb, hb) in &ob.branches {
            if ha != hb {
                continue;
            }
            let sa = ctx.syndrome(ea);
            let sb = ctx.syndrome(eb);
            if sa == sb && ctx.class_bits(ea) != ctx.class_bits(eb) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::BaseCode;
    use crate::gadget::build_cross_code_cnot;

    fn two_block_ctx() -> (VerifyContext, StabilizerCode, StabilizerCode) {
        let st = StabilizerCode::base(BaseCode::Steane);
        let rm = StabilizerCode::base(BaseCode::Rm15);
        let blocks = vec![
            BlockLayout { code: st.clone(), offset: 0 },
            BlockLayout { code: rm.clone(), offset: 7 },
        ];
        (VerifyContext::from_blocks(&blocks), st, rm)
    }

    #[test]
    fn fault_location_counts() {
        // transversal H on one steane block: 7 inputs + 7 ports
        let mut c = Circuit::new(7);
        for q in 0..7 {
            c.push(GateKind::H, vec![q]);
        }
        assert_eq!(fault_locations(&c).len(), 14);

        // staircase T gadget: inputs 7 + 4 CNOTs x 2 ports + 1 T port
        let st = StabilizerCode::base(BaseCode::Steane);
        let g = crate::gadget::build_ckz_gadget(
            &st,
            0,
            std::f64::consts::FRAC_PI_4,
            Some(&[crate::gadget::ActiveSet::new(vec![0, 1, 6], 6)]),
        )
        .unwrap();
        assert_eq!(fault_locations(&g.full).len(), 7 + 8 + 1);

        // one opaque converter: exactly one corruption location
        let mut oc = Circuit::new(7);
        oc.push(GateKind::Opaque("cc".into(), 0), vec![]);
        let locs = fault_locations(&oc);
        assert_eq!(
            locs.iter().filter(|l| matches!(l, Location::OpaqueCorruption { .. })).count(),
            1
        );
    }

    #[test]
    fn cross_code_cnot_with_ec_is_single_fault_tolerant() {
        let (ctx, st, rm) = two_block_ctx();
        let plan = build_cross_code_cnot(&st, &rm, 4).unwrap();
        let circuit = plan.emit(22, 0, 7, 0, 1, true);
        let tables = LookupTables::new();
        let report = correctable(
            &ctx,
            &circuit,
            &tables,
            &CorrectableOptions { t: 1, mode: Mode::Exhaustive },
        )
        .unwrap();
        assert!(report.verdict.is_correctable(), "{:?}", report.verdict);
    }

    #[test]
    fn cross_code_cnot_without_ec_fails_at_one_fault() {
        let (ctx, st, rm) = two_block_ctx();
        let plan = build_cross_code_cnot(&st, &rm, 4).unwrap();
        let circuit = plan.emit(22, 0, 7, 0, 1, false);
        let tables = LookupTables::new();
        let report = correctable(
            &ctx,
            &circuit,
            &tables,
            &CorrectableOptions { t: 1, mode: Mode::Exhaustive },
        )
        .unwrap();
        assert!(!report.verdict.is_correctable());
    }

    #[test]
    fn two_piece_layout_is_single_fault_tolerant() {
        let (ctx, st, rm) = two_block_ctx();
        let plan = build_cross_code_cnot(&st, &rm, 2).unwrap();
        let circuit = plan.emit(22, 0, 7, 0, 1, true);
        let tables = LookupTables::new();
        let report = correctable(
            &ctx,
            &circuit,
            &tables,
            &CorrectableOptions { t: 1, mode: Mode::Exhaustive },
        )
        .unwrap();
        assert!(report.verdict.is_correctable(), "{:?}", report.verdict);
    }

    #[test]
    fn correctable_is_monotone_in_t() {
        let (ctx, st, rm) = two_block_ctx();
        let plan = build_cross_code_cnot(&st, &rm, 4).unwrap();
        let circuit = plan.emit(22, 0, 7, 0, 1, false);
        let tables = LookupTables::new();
        // no EC: t=1 already fails, so t=2 must fail as well
        for t in [1usize, 2] {
            let report = correctable(
                &ctx,
                &circuit,
                &tables,
                &CorrectableOptions { t, mode: Mode::Exhaustive },
            )
            .unwrap();
            assert!(!report.verdict.is_correctable(), "t={t}");
        }
    }

    #[test]
    fn pairwise_criterion_matches_decoder_existence_on_base_codes() {
        // t=1 on an identity circuit: correctable iff every pair of weight-1
        // errors with equal syndrome differs by a stabilizer, which brute
        // force confirms for all three base codes
        let tables = LookupTables::new();
        for which in [BaseCode::FiveQubit, BaseCode::Steane, BaseCode::Rm15] {
            let code = StabilizerCode::base(which);
            let blocks = vec![BlockLayout { code: code.clone(), offset: 0 }];
            let ctx = VerifyContext::from_blocks(&blocks);
            let circuit = Circuit::new(code.n);
            let report = correctable(
                &ctx,
                &circuit,
                &tables,
                &CorrectableOptions { t: 1, mode: Mode::Exhaustive },
            )
            .unwrap();
            // brute-force oracle: all single-qubit errors pairwise
            let mut ok = true;
            let mut errors = vec![PauliOperator::identity(code.n)];
            for q in 0..code.n {
                for l in letters3() {
                    errors.push(PauliOperator::single(code.n, q, l));
                }
            }
            for a in &errors {
                for b in &errors {
                    let sa = code.syndrome(a).unwrap();
                    let sb = code.syndrome(b).unwrap();
                    if sa == sb {
                        let prod = a.multiply(b).unwrap();
                        let trivial = prod.symplectic_form(&code.logical_x) == 0
                            && prod.symplectic_form(&code.logical_z) == 0;
                        if !trivial {
                            ok = false;
                        }
                    }
                }
            }
            assert_eq!(report.verdict.is_correctable(), ok, "{which:?}");
            assert!(ok, "{which:?} must correct one error");
        }
    }
}
