//! Hyper-population block decomposition.
//!
//! The `n x m` population is cut into `nh = conf_h * threads` horizontal and
//! `nv = conf_v * threads` vertical stripes, giving `k = nh * nv` blocks of
//! `br x bc` with `br = n / nh` and `bc = m / nv`. Blocks are numbered
//! row-major over the stripe grid and each worker owns `conf_h` consecutive
//! horizontal stripes, i.e. `l = conf_h * nv` blocks.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::objective::Objective;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecompositionPlan {
    pub n: usize,
    pub m: usize,
    pub threads: usize,
    pub conf_h: usize,
    pub conf_v: usize,
    pub nh: usize,
    pub nv: usize,
    pub k: usize,
    pub br: usize,
    pub bc: usize,
    pub l: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockExtent {
    pub subpop_id: usize,
    pub owner_tid: usize,
    pub rows: Range<usize>,
    pub cols: Range<usize>,
}

/// Shapes of the per-worker buffers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalLayout {
    /// Local population slab, `(conf_h * br) x m`.
    pub population: (usize, usize),
    /// Local fitness matrix, `nv x (conf_h * br)`.
    pub fitness: (usize, usize),
    /// `localbest` / `localworst`, `conf_h x m`.
    pub best_worst: (usize, usize),
}

impl DecompositionPlan {
    /// Plan without binding to an objective.
    pub fn new(n: usize, m: usize, threads: usize, conf_h: usize, conf_v: usize) -> Result<Self> {
        for (name, v) in [
            ("n", n),
            ("m", m),
            ("threads", threads),
            ("conf_h", conf_h),
            ("conf_v", conf_v),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        let nh = conf_h * threads;
        let nv = conf_v * threads;
        if !n.is_multiple_of(nh) {
            return Err(Error::Divisibility {
                what: "rows (n)",
                total: n,
                parts: nh,
            });
        }
        if !m.is_multiple_of(nv) {
            return Err(Error::Divisibility {
                what: "columns (m)",
                total: m,
                parts: nv,
            });
        }
        Ok(DecompositionPlan {
            n,
            m,
            threads,
            conf_h,
            conf_v,
            nh,
            nv,
            k: nh * nv,
            br: n / nh,
            bc: m / nv,
            l: conf_h * nv,
        })
    }

    /// Plan bound to `objective`: blocks must be wide enough to evaluate.
    pub fn for_objective(
        n: usize,
        m: usize,
        threads: usize,
        conf_h: usize,
        conf_v: usize,
        objective: Objective,
    ) -> Result<Self> {
        let plan = Self::new(n, m, threads, conf_h, conf_v)?;
        objective.check_arity(plan.bc)?;
        Ok(plan)
    }

    pub fn block_extent(&self, subpop_id: usize) -> Result<BlockExtent> {
        if subpop_id >= self.k {
            return Err(Error::SubpopOutOfRange {
                id: subpop_id,
                k: self.k,
            });
        }
        let h = subpop_id / self.nv;
        let v = subpop_id % self.nv;
        Ok(BlockExtent {
            subpop_id,
            owner_tid: h / self.conf_h,
            rows: h * self.br..(h + 1) * self.br,
            cols: v * self.bc..(v + 1) * self.bc,
        })
    }

    pub fn blocks(&self) -> impl Iterator<Item = BlockExtent> + '_ {
        (0..self.k).map(|id| self.block_extent(id).expect("id < k"))
    }

    /// Global id of block `(local_stripe, v)` owned by worker `tid`.
    pub fn subpop_id(&self, tid: usize, local_stripe: usize, v: usize) -> usize {
        (tid * self.conf_h + local_stripe) * self.nv + v
    }

    pub fn local_layout(&self) -> LocalLayout {
        let rows = self.conf_h * self.br;
        LocalLayout {
            population: (rows, self.m),
            fitness: (self.nv, rows),
            best_worst: (self.conf_h, self.m),
        }
    }

    /// Rows of the global population held by one worker.
    pub fn worker_rows(&self, tid: usize) -> Range<usize> {
        let rows = self.conf_h * self.br;
        tid * rows..(tid + 1) * rows
    }
}

impl fmt::Display for DecompositionPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "threads={} nh={} nv={} k={} br={} bc={} l={}",
            self.threads, self.nh, self.nv, self.k, self.br, self.bc, self.l
        )
    }
}
