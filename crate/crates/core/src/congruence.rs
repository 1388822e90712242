//! Partitions of a carrier and quotients by congruences.

use serde::{Deserialize, Serialize};

use crate::algebra::{decode_tuple, Elem, FiniteAlgebra, FunctionMap};
use crate::error::{Error, Result};

/// A partition of `0..n`, stored as a block index per element. Blocks are
/// numbered by the order of their least elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    block: Vec<usize>,
    count: usize,
}

impl Partition {
    /// Normalizes an arbitrary labelling into a partition.
    pub fn from_labels<T: PartialEq>(labels: &[T]) -> Partition {
        let mut block = Vec::with_capacity(labels.len());
        let mut reps: Vec<usize> = Vec::new();
        for (i, l) in labels.iter().enumerate() {
            match reps.iter().position(|&r| labels[r] == *l) {
                Some(b) => block.push(b),
                None => {
                    reps.push(i);
                    block.push(reps.len() - 1);
                }
            }
        }
        Partition {
            count: reps.len(),
            block,
        }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<Elem>]) -> Result<Partition> {
        let mut label = vec![usize::MAX; n];
        for (b, members) in blocks.iter().enumerate() {
            for &x in members {
                if x >= n || label[x] != usize::MAX {
                    return Err(Error::NotCongruence(format!("element {x} is out of range or repeated")));
                }
                label[x] = b;
            }
        }
        if let Some(x) = label.iter().position(|&l| l == usize::MAX) {
            return Err(Error::NotCongruence(format!("element {x} lies in no block")));
        }
        Ok(Partition::from_labels(&label))
    }

    pub fn finest(n: usize) -> Partition {
        Partition {
            block: (0..n).collect(),
            count: n,
        }
    }

    pub fn coarsest(n: usize) -> Partition {
        Partition {
            block: vec![0; n],
            count: usize::from(n > 0),
        }
    }

    pub fn block_of(&self, x: Elem) -> usize {
        self.block[x]
    }

    pub fn block_count(&self) -> usize {
        self.count
    }

    pub fn size(&self) -> usize {
        self.block.len()
    }

    pub fn blocks(&self) -> Vec<Vec<Elem>> {
        let mut out = vec![Vec::new(); self.count];
        for (x, &b) in self.block.iter().enumerate() {
            out[b].push(x);
        }
        out
    }

    /// Least element of each block.
    pub fn representatives(&self) -> Vec<Elem> {
        self.blocks().iter().map(|b| b[0]).collect()
    }
}

/// Quotient algebra on blocks plus the projection. Compatibility is checked
/// on all argument tuples; the witness names an operation and two tuples that
/// agree blockwise but land in different blocks.
pub fn quotient(alg: &FiniteAlgebra, part: &Partition) -> Result<(FiniteAlgebra, FunctionMap)> {
    if part.size() != alg.size() {
        return Err(Error::NotCongruence(format!(
            "partition covers {} elements, algebra has {}",
            part.size(),
            alg.size()
        )));
    }
    let n = alg.size();
    let m = part.block_count();
    let reps = part.representatives();
    let mut args = Vec::new();
    let mut rep_args = Vec::new();
    let mut tables = Vec::new();
    for (op, sym) in alg.signature().ops().iter().enumerate() {
        let mut table = vec![0; m.pow(sym.arity as u32)];
        for (idx, &v) in alg.table(op).iter().enumerate() {
            decode_tuple(idx, n, sym.arity, &mut args);
            let mut q = 0;
            for &a in &args {
                q = q * m + part.block_of(a);
            }
            rep_args.clear();
            rep_args.extend(args.iter().map(|&a| reps[part.block_of(a)]));
            let w = alg.apply(op, &rep_args);
            if part.block_of(w) != part.block_of(v) {
                return Err(Error::NotCongruence(format!(
                    "`{}` maps {:?} to {} but the blockwise-equal {:?} to {}",
                    sym.name, rep_args, w, args, v
                )));
            }
            table[q] = part.block_of(v);
        }
        tables.push(table);
    }
    let constants = alg.constants().iter().map(|&c| part.block_of(c)).collect();
    let q = FiniteAlgebra::new(alg.signature().clone(), m, tables, constants)?;
    let proj = FunctionMap::new(n, m, (0..n).map(|x| part.block_of(x)).collect())?;
    Ok((q, proj))
}
