//! Guided search for tightness witnesses: small fault patterns that drive
//! the concrete hierarchical lookup decoder to a nontrivial logical
//! residual. Two generators cover the interesting shapes:
//!
//! - block pairs: two same-placement faults inside one inner block drawn
//!   from a minimum-weight logical representative, planted at every stage
//!   of the circuit (this finds the staircase-copy defeats);
//! - outer-coset assemblies: an outer logical representative realized
//!   end-of-circuit from per-position ingredients (bare letters, block
//!   defeat pairs), optionally leaving one position for the outer lookup
//!   stage to complete by miscorrection.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::circuit::Circuit;
use crate::code::LogicalClass;
use crate::error::FtccError;
use crate::ft::decoder::{decode, LookupTables};
use crate::ft::{propagate_faults, Fault, FaultPattern, Location, VerifyContext};
use crate::pauli::PauliLetter;

/// A confirmed tightness witness.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub faults: FaultPattern,
    /// Residual logical class bits after decoding the propagated error.
    pub class_bits: u64,
    pub strategy: String,
}

/// Per-qubit latest fault location at or before gate index `stage`
/// (usize::MAX = end of circuit).
fn location_at(circuit: &Circuit, qubit: usize, stage: usize) -> Location {
    let mut best: Option<usize> = None;
    for (gi, g) in circuit.gates.iter().enumerate() {
        if gi >= stage {
            break;
        }
        if !g.kind.is_marker() && g.supports.contains(&qubit) {
            best = Some(gi);
        }
    }
    match best {
        Some(gate) => Location::AfterGate { gate, qubit },
        None => Location::Input { qubit },
    }
}

fn letter_fault(circuit: &Circuit, qubit: usize, letter: PauliLetter, stage: usize) -> Fault {
    Fault { location: location_at(circuit, qubit, stage), letters: vec![letter] }
}

/// Replays a candidate: propagate exactly (single branch only), decode,
/// and accept when the residual class is nontrivial.
fn replay(
    ctx: &VerifyContext,
    circuit: &Circuit,
    tables: &LookupTables,
    pattern: &FaultPattern,
) -> Result<Option<u64>, FtccError> {
    let outcome = propagate_faults(ctx, circuit, tables, pattern);
    if !outcome.wildcard_blocks.is_empty() || outcome.branches.len() != 1 {
        return Ok(None);
    }
    let (err, _) = &outcome.branches[0];
    let synd = ctx.syndrome(err);
    let correction = decode(ctx, tables, &synd, &[])?;
    let mut residual = err.clone();
    residual.mul_assign(&correction);
    let class = ctx.class_bits(&residual);
    Ok((class != 0).then_some(class))
}

/// Weight-d class representatives of a block code reduced to their first
/// two factors, the seed of an inner-decoder defeat.
fn defeat_seeds(code: &crate::code::StabilizerCode) -> Vec<(LogicalClass, [(usize, PauliLetter); 2])> {
    let mut out = Vec::new();
    for class in [LogicalClass::X, LogicalClass::Y, LogicalClass::Z] {
        let (w, reps) = code.class_min_reps(class);
        if w != 3 {
            continue;
        }
        for rep in reps {
            let support = rep.support();
            out.push((class, [
                (support[0], rep.letter(support[0])),
                (support[1], rep.letter(support[1])),
            ]));
        }
    }
    out
}

/// Stage points worth planting block faults at: the input, and after each
/// gate that touches the block.
fn block_stages(ctx: &VerifyContext, circuit: &Circuit, block: usize) -> Vec<usize> {
    let range = ctx.blocks[block].qubits();
    let mut stages = vec![0usize];
    for (gi, g) in circuit.gates.iter().enumerate() {
        if !g.kind.is_marker() && g.supports.iter().any(|q| range.contains(q)) {
            stages.push(gi + 1);
        }
    }
    stages.push(circuit.len() + 1);
    stages.dedup();
    stages
}

/// Searches for a pattern of exactly `size` faults whose decode residual is
/// a nontrivial logical.
pub fn find_witness(
    ctx: &VerifyContext,
    circuit: &Circuit,
    tables: &LookupTables,
    size: usize,
) -> Result<Option<WitnessReport>, FtccError> {
    // strategy 1: same-block defeat pairs planted at every stage
    if size >= 2 {
        for (b, block) in ctx.blocks.iter().enumerate() {
            let seeds = defeat_seeds(&block.code);
            let stages = block_stages(ctx, circuit, b);
            for stage in stages {
                for (_, seed) in &seeds {
                    let faults: Vec<Fault> = seed
                        .iter()
                        .map(|&(q, l)| letter_fault(circuit, block.offset + q, l, stage))
                        .collect();
                    if faults[0].location == faults[1].location {
                        continue;
                    }
                    let mut pattern = FaultPattern { faults };
                    if size > 2 && !pad_pattern(ctx, circuit, &mut pattern, size) {
                        continue;
                    }
                    if pattern.faults.len() != size {
                        continue;
                    }
                    if let Some(class) = replay(ctx, circuit, tables, &pattern)? {
                        return Ok(Some(WitnessReport {
                            faults: pattern,
                            class_bits: class,
                            strategy: "block-pair".into(),
                        }));
                    }
                }
            }
        }
    }
    // strategy 2: outer-coset assemblies at the end of the circuit
    if let Some(outer) = &ctx.outer {
        let outer_code = &outer.code;
        let end = circuit.len() + 1;
        for copy in 0..outer.copies {
            for class in [LogicalClass::X, LogicalClass::Y, LogicalClass::Z] {
                for rep in outer_code.coset_iter(&outer_code.logical_rep(class)) {
                    let support = rep.support();
                    if support.is_empty() {
                        continue;
                    }
                    // optionally leave one position to the outer lookup
                    for drop in std::iter::once(None).chain(support.iter().copied().map(Some)) {
                        let mut faults: Vec<Fault> = Vec::new();
                        let mut feasible = true;
                        for &q in &support {
                            if Some(q) == drop {
                                continue;
                            }
                            let letter = rep.letter(q);
                            if let Some(bid) = outer.block_of[copy][q] {
                                let block = &ctx.blocks[bid];
                                let class_q = match letter {
                                    PauliLetter::X => LogicalClass::X,
                                    PauliLetter::Y => LogicalClass::Y,
                                    PauliLetter::Z => LogicalClass::Z,
                                    PauliLetter::I => unreachable!(),
                                };
                                let seeds: Vec<_> = defeat_seeds(&block.code)
                                    .into_iter()
                                    .filter(|(c, _)| *c == class_q)
                                    .collect();
                                match seeds.first() {
                                    Some((_, seed)) => {
                                        for &(sq, sl) in seed {
                                            faults.push(letter_fault(
                                                circuit,
                                                block.offset + sq,
                                                sl,
                                                end,
                                            ));
                                        }
                                    }
                                    None => {
                                        feasible = false;
                                        break;
                                    }
                                }
                            } else if let Some(off) = outer.bare_of[copy][q] {
                                faults.push(letter_fault(circuit, off, letter, end));
                            } else {
                                feasible = false;
                                break;
                            }
                        }
                        if !feasible || faults.len() > size {
                            continue;
                        }
                        let mut pattern = FaultPattern { faults };
                        if pattern.faults.len() < size && !pad_pattern(ctx, circuit, &mut pattern, size)
                        {
                            continue;
                        }
                        if pattern.faults.len() != size {
                            continue;
                        }
                        if let Some(class) = replay(ctx, circuit, tables, &pattern)? {
                            return Ok(Some(WitnessReport {
                                faults: pattern,
                                class_bits: class,
                                strategy: "outer-coset".into(),
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Pads a pattern to `size` faults with benign end-of-circuit faults on
/// qubits the pattern does not touch (the decoder recovers them exactly,
/// leaving the logical outcome intact).
fn pad_pattern(
    ctx: &VerifyContext,
    circuit: &Circuit,
    pattern: &mut FaultPattern,
    size: usize,
) -> bool {
    let mut used: BTreeSet<usize> = BTreeSet::new();
    for f in &pattern.faults {
        match &f.location {
            Location::Input { qubit } | Location::AfterGate { qubit, .. } => {
                if let Some(b) = ctx.block_of_qubit(*qubit) {
                    used.extend(ctx.blocks[b].qubits());
                } else {
                    used.insert(*qubit);
                }
            }
            _ => return false,
        }
    }
    let end = circuit.len() + 1;
    for q in 0..ctx.n {
        if pattern.faults.len() >= size {
            break;
        }
        if used.contains(&q) {
            continue;
        }
        if let Some(b) = ctx.block_of_qubit(q) {
            used.extend(ctx.blocks[b].qubits());
        } else {
            used.insert(q);
        }
        pattern.faults.push(letter_fault(circuit, q, PauliLetter::X, end));
    }
    pattern.faults.len() == size
}

/// Verdict of an effective-distance check for one (code, gate) cell.
#[derive(Debug, Clone, Serialize)]
pub struct EffectiveDistanceReport {
    pub claimed: usize,
    pub t: usize,
    pub correctable: bool,
    pub correctable_mode: super::Mode,
    pub exhaustive_sub_t: Option<usize>,
    pub witness: Option<WitnessReport>,
    pub pass: bool,
    pub locations_scanned: usize,
    pub patterns_checked: u64,
}

/// Verifies a claimed effective distance: correctable at
/// t = (claimed-1)/2 (exhaustive when t <= 2, seeded sampling above with
/// an exhaustive t<=2 sub-check) plus a tightness witness of t+1 faults.
pub fn effective_distance(
    ctx: &VerifyContext,
    circuit: &Circuit,
    tables: &LookupTables,
    claimed: usize,
    seed: u64,
    samples: u64,
) -> Result<EffectiveDistanceReport, FtccError> {
    let t = (claimed - 1) / 2;
    let mut patterns = 0u64;
    let locations;
    let (correct, mode, sub) = if t <= 2 {
        let r = super::correctable(
            ctx,
            circuit,
            tables,
            &super::CorrectableOptions { t, mode: super::Mode::Exhaustive },
        )?;
        patterns += r.patterns_checked;
        locations = r.locations_scanned;
        (r.verdict.is_correctable(), super::Mode::Exhaustive, None)
    } else {
        let sub = super::correctable(
            ctx,
            circuit,
            tables,
            &super::CorrectableOptions { t: 2, mode: super::Mode::Exhaustive },
        )?;
        patterns += sub.patterns_checked;
        let mode = super::Mode::Sampled { seed, samples };
        let r = super::correctable(
            ctx,
            circuit,
            tables,
            &super::CorrectableOptions { t, mode },
        )?;
        patterns += r.patterns_checked;
        locations = r.locations_scanned;
        (
            sub.verdict.is_correctable() && r.verdict.is_correctable(),
            mode,
            Some(2usize),
        )
    };
    let witness = find_witness(ctx, circuit, tables, t + 1)?;
    let pass = correct && witness.is_some();
    Ok(EffectiveDistanceReport {
        claimed,
        t,
        correctable: correct,
        correctable_mode: mode,
        exhaustive_sub_t: sub,
        witness,
        pass,
        locations_scanned: locations,
        patterns_checked: patterns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind as GK;
    use crate::concat::{assemble_gate_plan, lift_gadget, ConcatSpec};

    fn cell(
        spec_name: &str,
        gate: &GK,
    ) -> (VerifyContext, Circuit) {
        let spec = ConcatSpec::parse_name(spec_name).unwrap();
        let plan = assemble_gate_plan(&spec, gate).unwrap();
        let lifted = lift_gadget(&spec, &plan).unwrap();
        (VerifyContext::from_composite(&lifted.composite), lifted.circuit)
    }

    #[test]
    fn two_fault_witness_for_the_49_qubit_t_gadget() {
        let (ctx, circuit) = cell("hcc-steane-3", &GK::T);
        let tables = LookupTables::new();
        let w = find_witness(&ctx, &circuit, &tables, 2).unwrap();
        let w = w.expect("2-fault witness must exist");
        assert_ne!(w.class_bits, 0);
        // replay through decode confirms the class (replay happens inside
        // find_witness; confirm again from scratch)
        let again = replay(&ctx, &circuit, &tables, &w.faults).unwrap();
        assert_eq!(again, Some(w.class_bits));
    }

    #[test]
    fn two_fault_witness_for_the_33_qubit_t_gadget() {
        let (ctx, circuit) = cell("enucc-steane-1", &GK::T);
        let tables = LookupTables::new();
        let w = find_witness(&ctx, &circuit, &tables, 2).unwrap();
        assert!(w.is_some(), "claimed distance 3 needs a 2-fault witness");
    }

    #[test]
    fn three_fault_witness_for_claimed_five_cells() {
        let (ctx, circuit) = cell("hcc-steane-1", &GK::H);
        let tables = LookupTables::new();
        let w = find_witness(&ctx, &circuit, &tables, 3).unwrap();
        assert!(w.is_some(), "claimed distance 5 needs a 3-fault witness");
    }

    #[test]
    fn t_gadget_effective_distance_three_on_the_small_codes() {
        let tables = LookupTables::new();
        for name in ["hcc-steane-1", "enucc-steane-1"] {
            let (ctx, circuit) = cell(name, &GK::T);
            let r = effective_distance(&ctx, &circuit, &tables, 3, 7, 0).unwrap();
            assert!(r.pass, "{name}: correctable={} witness={:?}", r.correctable, r.witness.is_some());
        }
    }
}
