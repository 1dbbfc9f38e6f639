//! Reader for the sparse SDPA format (`.dat-s`).
//!
//! The file describes matrices `F_0 .. F_m` over a block-diagonal structure
//! and a vector `c`. We read it as the dual-side problem: find `Y >= 0`
//! with `<F_k, Y> = c_k` for `k = 1..m`, maximizing `<F_0, Y>`. That maps
//! directly onto a homogeneous quadratic system (equations `<F_k, Y>`,
//! right-hand sides `c_k`) with `F_0` as the objective.

use crate::{CliResult, DataError};
use chrsolve_core::chr::QuadraticSystem;
use chrsolve_core::linalg::SymMatrix;

/// An SDPA problem: objective matrix plus the equality system.
#[derive(Debug, Clone)]
pub struct SdpaProblem {
    /// `F_0`; zero when the file carries no objective entries.
    pub objective: SymMatrix<f64>,
    /// `<F_k, Y> = c_k` for `k = 1..m`.
    pub system: QuadraticSystem<f64>,
}

/// One token plus the 1-based line it came from, for error messages.
struct Tokens<'a> {
    items: Vec<(&'a str, usize)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut items = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            // Comment lines start with '*' or '"'.
            if line.starts_with('*') || line.starts_with('"') {
                continue;
            }
            for tok in line
                .split(|c: char| c.is_whitespace() || matches!(c, '{' | '}' | '(' | ')' | ','))
            {
                if !tok.is_empty() {
                    items.push((tok, lineno + 1));
                }
            }
        }
        Tokens { items, pos: 0 }
    }

    fn next(&mut self, what: &str) -> CliResult<(&'a str, usize)> {
        let item = self.items.get(self.pos).copied().ok_or_else(|| {
            DataError(format!("sdpa: file ended while reading {what}"))
        })?;
        self.pos += 1;
        Ok(item)
    }

    fn usize(&mut self, what: &str) -> CliResult<(usize, usize)> {
        let (tok, line) = self.next(what)?;
        let v = tok.parse::<usize>().map_err(|_| {
            DataError(format!("sdpa line {line}: expected a count for {what}, got `{tok}`"))
        })?;
        Ok((v, line))
    }

    fn i64(&mut self, what: &str) -> CliResult<(i64, usize)> {
        let (tok, line) = self.next(what)?;
        let v = tok.parse::<i64>().map_err(|_| {
            DataError(format!("sdpa line {line}: expected an integer for {what}, got `{tok}`"))
        })?;
        Ok((v, line))
    }

    fn f64(&mut self, what: &str) -> CliResult<(f64, usize)> {
        let (tok, line) = self.next(what)?;
        let v = tok.parse::<f64>().map_err(|_| {
            DataError(format!("sdpa line {line}: expected a number for {what}, got `{tok}`"))
        })?;
        if !v.is_finite() {
            return Err(DataError(format!("sdpa line {line}: non-finite value for {what}")));
        }
        Ok((v, line))
    }

    fn exhausted(&self) -> bool {
        self.pos >= self.items.len()
    }
}

pub fn parse_sdpa(text: &str) -> CliResult<SdpaProblem> {
    let mut toks = Tokens::new(text);
    let (mdim, _) = toks.usize("the constraint count (mDIM)")?;
    if mdim == 0 {
        return Err(DataError("sdpa: mDIM must be at least 1".into()));
    }
    let (nblocks, _) = toks.usize("the block count (nBLOCK)")?;
    if nblocks == 0 {
        return Err(DataError("sdpa: nBLOCK must be at least 1".into()));
    }

    // Block sizes; negative means a diagonal block. offsets[b] is the first
    // row of block b in the assembled matrix.
    let mut sizes = Vec::with_capacity(nblocks);
    let mut diagonal = Vec::with_capacity(nblocks);
    for b in 0..nblocks {
        let (s, line) = toks.i64("a block size")?;
        if s == 0 {
            return Err(DataError(format!("sdpa line {line}: block {} has size 0", b + 1)));
        }
        sizes.push(s.unsigned_abs() as usize);
        diagonal.push(s < 0);
    }
    let mut offsets = Vec::with_capacity(nblocks);
    let mut total = 0usize;
    for &s in &sizes {
        offsets.push(total);
        total += s;
    }

    let mut rhs = Vec::with_capacity(mdim);
    for _ in 0..mdim {
        rhs.push(toks.f64("the c vector")?.0);
    }

    // matno 0 is the objective; 1..=mdim are the constraints.
    let mut triplets: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); mdim + 1];
    while !toks.exhausted() {
        let (matno, line) = toks.usize("a matrix number")?;
        if matno > mdim {
            return Err(DataError(format!(
                "sdpa line {line}: matrix number {matno} exceeds mDIM = {mdim}"
            )));
        }
        let (blkno, line) = toks.usize("a block number")?;
        if blkno == 0 || blkno > nblocks {
            return Err(DataError(format!(
                "sdpa line {line}: block number {blkno} out of range 1..={nblocks}"
            )));
        }
        let (i, line) = toks.usize("a row index")?;
        let (j, _) = toks.usize("a column index")?;
        let size = sizes[blkno - 1];
        if i == 0 || j == 0 || i > size || j > size {
            return Err(DataError(format!(
                "sdpa line {line}: entry ({i}, {j}) out of range for block {blkno} of size {size}"
            )));
        }
        if diagonal[blkno - 1] && i != j {
            return Err(DataError(format!(
                "sdpa line {line}: off-diagonal entry ({i}, {j}) in diagonal block {blkno}"
            )));
        }
        let (v, line) = toks.f64("an entry value")?;
        let gi = offsets[blkno - 1] + i - 1;
        let gj = offsets[blkno - 1] + j - 1;
        let (gi, gj) = (gi.min(gj), gi.max(gj));
        if triplets[matno].iter().any(|&(a, b, _)| (a, b) == (gi, gj)) {
            return Err(DataError(format!(
                "sdpa line {line}: duplicate entry ({i}, {j}) in block {blkno} of matrix {matno}"
            )));
        }
        triplets[matno].push((gi, gj, v));
    }

    let objective = SymMatrix::from_triplets(total, triplets[0].iter().copied())
        .map_err(|e| DataError(format!("sdpa objective matrix: {e}")))?;
    let mut quads = Vec::with_capacity(mdim);
    for (k, t) in triplets.iter().enumerate().skip(1) {
        quads.push(
            SymMatrix::from_triplets(total, t.iter().copied())
                .map_err(|e| DataError(format!("sdpa constraint matrix {k}: {e}")))?,
        );
    }
    let system = QuadraticSystem::homogeneous(quads, rhs)
        .map_err(|e| DataError(format!("sdpa system: {e}")))?;
    Ok(SdpaProblem { objective, system })
}
