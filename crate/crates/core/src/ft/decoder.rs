//! Syndrome-lookup decoding: complete per-code tables built by weight-
//! ordered enumeration (ties broken toward the lexicographically least
//! string), plus the hierarchical inner-then-outer decode used on
//! concatenated codes.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::code::{StabilizerCode, Syndrome};
use crate::error::FtccError;
use crate::ft::VerifyContext;
use crate::pauli::{PauliLetter, PauliOperator};

/// Complete syndrome -> minimum-weight correction table for one code.
#[derive(Debug, Clone)]
pub struct CodeTable {
    pub n: usize,
    pub gens: usize,
    entries: Vec<Option<PauliOperator>>,
}

impl CodeTable {
    /// Builds the full table by enumerating errors of increasing weight.
    /// Base codes here have at most 14 generators, so the table is dense.
    pub fn build(code: &StabilizerCode) -> CodeTable {
        let m = code.generators.len();
        assert!(m <= 20, "syndrome table too large");
        let size = 1usize << m;
        let mut entries: Vec<Option<(usize, String, PauliOperator)>> = vec![None; size];
        let mut filled = 0usize;
        entries[0] = Some((0, "I".repeat(code.n), PauliOperator::identity(code.n)));
        filled += 1;
        let letters = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
        let mut weight = 1usize;
        while filled < size && weight <= code.n {
            let mut support: Vec<usize> = (0..weight).collect();
            loop {
                let combos = 3usize.pow(weight as u32);
                let mut p = PauliOperator::identity(code.n);
                for idx in 0..combos {
                    let mut rem = idx;
                    for &q in &support {
                        p.set_letter(q, letters[rem % 3]);
                        rem /= 3;
                    }
                    let mut synd = 0usize;
                    for (i, g) in code.generators.iter().enumerate() {
                        if p.symplectic_form(g) == 1 {
                            synd |= 1 << i;
                        }
                    }
                    let key = (p.weight(), p.to_string());
                    match &entries[synd] {
                        None => {
                            entries[synd] = Some((key.0, key.1, p.clone()));
                            filled += 1;
                        }
                        Some((w, s, _)) => {
                            if key < (*w, s.clone()) {
                                entries[synd] = Some((key.0, key.1, p.clone()));
                            }
                        }
                    }
                }
                for &q in &support {
                    p.set_letter(q, PauliLetter::I);
                }
                let mut i = weight;
                let mut advanced = false;
                while i > 0 {
                    i -= 1;
                    if support[i] != i + code.n - weight {
                        support[i] += 1;
                        for j in i + 1..weight {
                            support[j] = support[j - 1] + 1;
                        }
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    break;
                }
            }
            weight += 1;
        }
        debug_assert_eq!(filled, size, "incomplete syndrome table for {}", code.name);
        CodeTable {
            n: code.n,
            gens: m,
            entries: entries.into_iter().map(|e| e.map(|(_, _, p)| p)).collect(),
        }
    }

    pub fn correction(&self, syndrome_bits: u64) -> &PauliOperator {
        self.entries[syndrome_bits as usize]
            .as_ref()
            .expect("complete table")
    }
}

/// Global cache of per-code lookup tables, keyed by code name.
#[derive(Debug, Default)]
pub struct LookupTables;

static TABLES: OnceLock<Mutex<HashMap<String, std::sync::Arc<CodeTable>>>> = OnceLock::new();

impl LookupTables {
    pub fn new() -> LookupTables {
        LookupTables
    }

    pub fn table_for(&self, code: &StabilizerCode) -> std::sync::Arc<CodeTable> {
        let cache = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut lock = cache.lock().unwrap();
        if let Some(t) = lock.get(&code.name) {
            return t.clone();
        }
        let t = std::sync::Arc::new(CodeTable::build(code));
        lock.insert(code.name.clone(), t.clone());
        t
    }

    /// Minimum-weight correction for a block syndrome.
    pub fn block_correction(&self, code: &StabilizerCode, syndrome_bits: u64) -> PauliOperator {
        self.table_for(code).correction(syndrome_bits).clone()
    }
}

/// Hierarchical decode: inner lookup per block, then the outer level with
/// optional erasure flags (blocks whose residual class may be chosen
/// freely). The returned correction reproduces the requested syndrome.
pub fn decode(
    ctx: &VerifyContext,
    tables: &LookupTables,
    syndrome: &Syndrome,
    flags: &[usize],
) -> Result<PauliOperator, FtccError> {
    if syndrome.len() != ctx.generators.len() {
        return Err(FtccError::Verify(format!(
            "syndrome length {} does not match generator count {}",
            syndrome.len(),
            ctx.generators.len()
        )));
    }
    let mut correction = PauliOperator::identity(ctx.n);
    for (b, block) in ctx.blocks.iter().enumerate() {
        let mut bits = 0u64;
        for (i, gi) in ctx.block_gen_range[b].clone().enumerate() {
            if syndrome.bit(gi) {
                bits |= 1 << i;
            }
        }
        if bits != 0 {
            let c = tables.block_correction(&block.code, bits);
            correction.mul_assign(&c.embed(ctx.n, block.offset));
        }
    }
    let Some(outer) = &ctx.outer else {
        // no outer level: residual outer bits do not exist
        debug_assert_eq!(ctx.outer_gen_start, ctx.generators.len());
        return Ok(correction);
    };
    // residual outer syndrome after the inner corrections
    let outer_code = &outer.code;
    let outer_gens = outer_code.generators.len();
    let outer_table = self_table(outer_code);
    for copy in 0..outer.copies {
        let mut bits = 0u64;
        for i in 0..outer_gens {
            let gi = ctx.outer_gen_start + copy * outer_gens + i;
            let mut bit = syndrome.bit(gi);
            if correction.symplectic_form(&ctx.generators[gi]) == 1 {
                bit = !bit;
            }
            if bit {
                bits |= 1 << i;
            }
        }
        if bits == 0 && flags.is_empty() {
            continue;
        }
        // erasure flags on this copy allow free letters on those positions
        let flagged_positions: Vec<usize> = flags
            .iter()
            .filter_map(|&b| {
                (0..outer_code.n).find(|&q| outer.block_of[copy][q] == Some(b))
            })
            .collect();
        let outer_corr = if flagged_positions.is_empty() {
            outer_table.correction(bits).clone()
        } else {
            best_flagged_correction(outer_code, &outer_table, bits, &flagged_positions)
        };
        // lift the outer correction
        let lifted = lift_outer(ctx, outer, copy, &outer_corr)?;
        correction.mul_assign(&lifted);
    }
    Ok(correction)
}

fn self_table(code: &StabilizerCode) -> std::sync::Arc<CodeTable> {
    LookupTables::new().table_for(code)
}

fn best_flagged_correction(
    code: &StabilizerCode,
    table: &CodeTable,
    bits: u64,
    flagged: &[usize],
) -> PauliOperator {
    // try every letter combination on the flagged positions; pick the
    // lowest-weight total correction
    let letters = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
    let mut best: Option<PauliOperator> = None;
    let combos = 4usize.pow(flagged.len() as u32);
    for c in 0..combos {
        let mut fixed = PauliOperator::identity(code.n);
        let mut rem = c;
        for &q in flagged {
            fixed.set_letter(q, letters[rem % 4]);
            rem /= 4;
        }
        let mut fb = 0u64;
        for (i, g) in code.generators.iter().enumerate() {
            if fixed.symplectic_form(g) == 1 {
                fb |= 1 << i;
            }
        }
        let rest = table.correction(bits ^ fb);
        let total = fixed.multiply(rest).unwrap();
        if best.as_ref().map_or(true, |b| {
            (total.weight(), total.to_string()) < (b.weight(), b.to_string())
        }) {
            best = Some(total);
        }
    }
    best.unwrap()
}

/// Lifts an outer correction onto the physical register of one copy.
pub fn lift_outer(
    ctx: &VerifyContext,
    outer: &crate::ft::OuterInfo,
    copy: usize,
    p: &PauliOperator,
) -> Result<PauliOperator, FtccError> {
    let mut out = PauliOperator::identity(ctx.n);
    for q in 0..p.n() {
        let letter = p.letter(q);
        if letter == PauliLetter::I {
            continue;
        }
        if let Some(b) = outer.block_of[copy][q] {
            let code = &ctx.blocks[b].code;
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
            out.mul_assign(&factor.embed(ctx.n, ctx.blocks[b].offset));
        } else if let Some(off) = outer.bare_of[copy][q] {
            out.mul_assign(&PauliOperator::single(1, 0, letter).embed(ctx.n, off));
        } else {
            return Err(FtccError::Verify(format!("outer qubit {q} unmapped")));
        }
    }
    Ok(out)
}

/// Residual logical-class bits after decoding an error (0 = full recovery
/// up to a stabilizer).
pub fn decode_residual_class(
    ctx: &VerifyContext,
    tables: &LookupTables,
    error: &PauliOperator,
) -> Result<u64, FtccError> {
    let synd = ctx.syndrome(error);
    let correction = decode(ctx, tables, &synd, &[])?;
    let mut residual = error.clone();
    residual.mul_assign(&correction);
    debug_assert!(ctx.syndrome(&residual).is_zero(), "decode syndrome mismatch");
    Ok(ctx.class_bits(&residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::BlockLayout;
    use crate::code::BaseCode;
    use crate::concat::{ConcatCode, ConcatSpec};

    #[test]
    fn tables_cover_every_syndrome_and_correct_weight_one() {
        let tables = LookupTables::new();
        for which in [BaseCode::FiveQubit, BaseCode::Steane, BaseCode::Rm15] {
            let code = StabilizerCode::base(which);
            let table = tables.table_for(&code);
            assert_eq!(table.entries.iter().filter(|e| e.is_some()).count(), 1 << code.generators.len());
            // every weight-1 error is corrected exactly
            for q in 0..code.n {
                for l in [PauliLetter::X, PauliLetter::Y, PauliLetter::Z] {
                    let e = PauliOperator::single(code.n, q, l);
                    let synd = code.syndrome(&e).unwrap().as_u64();
                    let c = table.correction(synd);
                    let prod = e.multiply(c).unwrap();
                    assert!(code.syndrome(&prod).unwrap().is_zero());
                    assert_eq!(prod.symplectic_form(&code.logical_x), 0);
                    assert_eq!(prod.symplectic_form(&code.logical_z), 0);
                }
            }
        }
    }

    #[test]
    fn decoder_soundness_random_syndromes() {
        let spec = ConcatSpec::parse_name("hcc-steane-1").unwrap();
        let cc = ConcatCode::build(&spec).unwrap();
        let ctx = VerifyContext::from_composite(&cc.composite);
        let tables = LookupTables::new();
        // random errors give random syndromes; decode must reproduce them
        let mut state = 0xD00Du64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as usize
        };
        for _ in 0..10_000 {
            let mut e = PauliOperator::identity(ctx.n);
            for _ in 0..(1 + next() % 4) {
                let q = next() % ctx.n;
                let l = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z][next() % 3];
                e.set_letter(q, l);
            }
            let synd = ctx.syndrome(&e);
            let corr = decode(&ctx, &tables, &synd, &[]).unwrap();
            assert_eq!(ctx.syndrome(&corr), synd);
        }
    }

    #[test]
    fn weight_one_errors_fully_recover_on_the_49_qubit_code() {
        let spec = ConcatSpec::parse_name("hcc-steane-3").unwrap();
        let cc = ConcatCode::build(&spec).unwrap();
        let ctx = VerifyContext::from_composite(&cc.composite);
        let tables = LookupTables::new();
        for q in 0..ctx.n {
            for l in [PauliLetter::X, PauliLetter::Y, PauliLetter::Z] {
                let e = PauliOperator::single(ctx.n, q, l);
                let class = decode_residual_class(&ctx, &tables, &e).unwrap();
                assert_eq!(class, 0, "qubit {q} letter {l:?}");
            }
        }
    }

    #[test]
    fn zero_syndrome_gives_identity_correction() {
        let spec = ConcatSpec::parse_name("enucc-steane-1").unwrap();
        let cc = ConcatCode::build(&spec).unwrap();
        let ctx = VerifyContext::from_composite(&cc.composite);
        let tables = LookupTables::new();
        let synd = crate::code::Syndrome::zero(ctx.generators.len());
        let corr = decode(&ctx, &tables, &synd, &[]).unwrap();
        assert_eq!(corr.weight(), 0);
    }

    #[test]
    fn standalone_blocks_decode_without_outer_stage() {
        let st = StabilizerCode::base(BaseCode::Steane);
        let blocks =
            vec![BlockLayout { code: st.clone(), offset: 0 }, BlockLayout { code: st, offset: 7 }];
        let ctx = VerifyContext::from_blocks(&blocks);
        let tables = LookupTables::new();
        let e = PauliOperator::single(14, 9, PauliLetter::X);
        let synd = ctx.syndrome(&e);
        let corr = decode(&ctx, &tables, &synd, &[]).unwrap();
        let prod = e.multiply(&corr).unwrap();
        assert!(ctx.syndrome(&prod).is_zero());
        assert_eq!(ctx.class_bits(&prod), 0);
    }
}
