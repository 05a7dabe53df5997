//! Full enumeration for small instances.
//!
//! Every multiset of up to `max_rows` Old patterns is tried. For a fixed set
//! of rows, any legal alignment can be read off as a sequence of steps over
//! a vector of row pointers: either skip the symbol under one pointer, or
//! unify the equal symbols under two or more pointers into a column. A dense
//! table over all pointer vectors then yields the best column structure.

use super::search::{finalize, Ctx, State, NEW_ROW};
use super::types::{MultipleAlignment, SearchParams};
use crate::error::{Error, Result};
use crate::scoring::CompressionScore;

/// Upper bound on table cells summed over all row multisets.
const WORK_LIMIT: u64 = 50_000_000;

pub(crate) fn search(ctx: &Ctx, params: &SearchParams) -> Result<Vec<(MultipleAlignment, CompressionScore)>> {
    let n = ctx.pat_syms.len();
    let mut multisets = Vec::new();
    collect_multisets(n, params.max_rows, 0, &mut Vec::new(), &mut multisets);

    let mut work = 0u64;
    for rows in &multisets {
        work = work.saturating_add(table_size(ctx, rows));
        if work > WORK_LIMIT {
            return Err(Error::InvalidParams(format!(
                "instance too large for exhaustive search ({} row sets); lower max_rows or use beam search",
                multisets.len()
            )));
        }
    }
    let states: Vec<State> = multisets.iter().map(|rows| best_for_rows(ctx, rows)).collect();
    finalize(ctx, states, params.max_results)
}

fn collect_multisets(n: usize, left: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(cur.clone());
    if left == 0 {
        return;
    }
    for p in from..n {
        cur.push(p);
        collect_multisets(n, left - 1, p, cur, out);
        cur.pop();
    }
}

fn row_lengths(ctx: &Ctx, rows: &[usize]) -> Vec<usize> {
    std::iter::once(ctx.new_syms.len())
        .chain(rows.iter().map(|&p| ctx.pat_syms[p].len()))
        .collect()
}

fn table_size(ctx: &Ctx, rows: &[usize]) -> u64 {
    row_lengths(ctx, rows)
        .iter()
        .fold(1u64, |acc, &l| acc.saturating_mul(l as u64 + 1))
}

fn best_for_rows(ctx: &Ctx, rows: &[usize]) -> State {
    let all_rows: Vec<usize> = std::iter::once(NEW_ROW).chain(rows.iter().copied()).collect();
    let syms: Vec<&[u32]> = all_rows
        .iter()
        .map(|&p| if p == NEW_ROW { &ctx.new_syms[..] } else { &ctx.pat_syms[p][..] })
        .collect();
    let weights: Vec<&[f64]> = all_rows
        .iter()
        .map(|&p| if p == NEW_ROW { &ctx.new_cost[..] } else { &ctx.pat_shared_cost[p][..] })
        .collect();
    let lens = row_lengths(ctx, rows);
    let r = lens.len();
    let mut stride = vec![1usize; r];
    for i in 1..r {
        stride[i] = stride[i - 1] * (lens[i - 1] + 1);
    }
    let size = stride[r - 1] * (lens[r - 1] + 1);
    let decode = |mut idx: usize| -> Vec<usize> {
        (0..r)
            .map(|i| {
                let v = idx % (lens[i] + 1);
                idx /= lens[i] + 1;
                v
            })
            .collect()
    };

    let self_match = |group: &[usize], subset: u32, ptr: &[usize]| -> bool {
        let chosen: Vec<usize> = (0..group.len()).filter(|g| subset & (1 << g) != 0).map(|g| group[g]).collect();
        chosen.iter().enumerate().any(|(a, &h)| {
            chosen[a + 1..]
                .iter()
                .any(|&k| !ctx.may_unify((all_rows[h], ptr[h]), (all_rows[k], ptr[k])))
        })
    };
    let mut value = vec![0.0f64; size];
    // bit set of rows advanced by the best step: one bit = skip, more = column
    let mut step = vec![0u32; size];
    for idx in (0..size).rev() {
        let ptr = decode(idx);
        let mut best = (0.0f64, 0u32);
        for i in 0..r {
            if ptr[i] < lens[i] {
                let v = value[idx + stride[i]];
                if v > best.0 {
                    best = (v, 1 << i);
                }
            }
        }
        let live: Vec<usize> = (0..r).filter(|&i| ptr[i] < lens[i]).collect();
        for (a, &i) in live.iter().enumerate() {
            let s = syms[i][ptr[i]];
            // group rows by symbol, led by the first row holding it
            if live[..a].iter().any(|&h| syms[h][ptr[h]] == s) {
                continue;
            }
            let group: Vec<usize> = live[a..].iter().copied().filter(|&h| syms[h][ptr[h]] == s).collect();
            for subset in 1u32..(1 << group.len()) {
                if subset.count_ones() < 2 || self_match(&group, subset, &ptr) {
                    continue;
                }
                let (mut gain, mut next, mut mask) = (0.0, idx, 0u32);
                for (g, &h) in group.iter().enumerate() {
                    if subset & (1 << g) != 0 {
                        gain += weights[h][ptr[h]];
                        next += stride[h];
                        mask |= 1 << h;
                    }
                }
                let v = gain + value[next];
                if v > best.0 {
                    best = (v, mask);
                }
            }
        }
        value[idx] = best.0;
        step[idx] = best.1;
    }

    let mut cols = Vec::new();
    let mut idx = 0;
    while step[idx] != 0 {
        let mask = step[idx];
        let ptr = decode(idx);
        let members: Vec<(usize, usize)> = (0..r).filter(|&i| mask & (1 << i) != 0).map(|i| (i, ptr[i])).collect();
        if members.len() >= 2 {
            cols.push(members.clone());
        }
        idx += members.iter().map(|&(i, _)| stride[i]).sum::<usize>();
    }
    State {
        cells: Vec::new(),
        rows: all_rows,
        cols,
        encoded: 0.0,
    }
    .finish(ctx)
}
