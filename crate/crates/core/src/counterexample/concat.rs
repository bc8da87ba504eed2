use std::fmt;

use super::blocks::BlockSequence;
use crate::error::{invalid, Result};
use crate::foelner::{FoelnerSequence, Provenance};
use crate::group::{FiniteSubset, GroupKind};
use crate::rational::Rational;

/// How many fluctuation pairs each block carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockMode {
    /// Every block uses the same small pair count, independent of `l`.
    Desk { pairs: usize },
    /// Block `m` uses `l_m` pairs and needs `l_0 > 100`.
    Faithful,
}

impl fmt::Display for BlockMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockMode::Desk { pairs } => write!(f, "desk(pairs={pairs})"),
            BlockMode::Faithful => write!(f, "faithful"),
        }
    }
}

/// Blocks `A^{l_m}` for `m = 0, 1, …` glued into one sequence, with
/// `l_{m+1} = max A^{l_m}_{last}`.
#[derive(Clone, Debug)]
pub struct Concatenation {
    pub lambda: Rational,
    pub mode: BlockMode,
    pub blocks: Vec<BlockSequence>,
    /// `l_0, l_1, …`; one more entry than `blocks`.
    pub ls: Vec<u64>,
    pub sequence: FoelnerSequence,
}

impl Concatenation {
    pub fn is_desk(&self) -> bool {
        matches!(self.mode, BlockMode::Desk { .. })
    }

    /// Number of sets in blocks `0..=m`.
    pub fn horizon_through(&self, m: usize) -> usize {
        self.blocks[..=m].iter().map(|b| b.sets().len()).sum()
    }

    /// `max A` over the last set of block `m`.
    pub fn block_max(&self, m: usize) -> u64 {
        self.blocks[m].last_max()
    }

    /// Builds one more block.
    pub fn extend(&mut self) -> Result<()> {
        let l = *self.ls.last().unwrap();
        let pairs = match self.mode {
            BlockMode::Desk { pairs } => pairs,
            BlockMode::Faithful => usize::try_from(l).map_err(|_| invalid("l too large"))?,
        };
        let b = BlockSequence::build(self.lambda, l, pairs)?;
        self.ls.push(b.last_max());
        self.blocks.push(b);
        self.sequence = sequence_of(&self.blocks, self.mode)?;
        Ok(())
    }
}

fn sequence_of(blocks: &[BlockSequence], mode: BlockMode) -> Result<FoelnerSequence> {
    let sets = blocks.iter().flat_map(|b| b.sets().iter().cloned().map(FiniteSubset::from_runs)).collect();
    FoelnerSequence::new(
        GroupKind::Integers,
        sets,
        Provenance::Derived(format!("concatenated blocks ({mode}, {} blocks)", blocks.len())),
    )
}

pub fn build_concatenated_foelner(lambda: Rational, l0: u64, mode: BlockMode, stages: usize) -> Result<Concatenation> {
    if stages == 0 {
        return Err(invalid("need at least one block"));
    }
    if mode == BlockMode::Faithful && l0 <= 100 {
        return Err(invalid("faithful mode needs l_0 > 100"));
    }
    let first = BlockSequence::build(
        lambda,
        l0,
        match mode {
            BlockMode::Desk { pairs } => pairs,
            BlockMode::Faithful => l0 as usize,
        },
    )?;
    let mut c = Concatenation {
        lambda,
        mode,
        ls: vec![l0, first.last_max()],
        sequence: sequence_of(std::slice::from_ref(&first), mode)?,
        blocks: vec![first],
    };
    while c.blocks.len() < stages {
        c.extend()?;
    }
    Ok(c)
}
