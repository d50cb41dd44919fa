//! Brute force over every beam schedule.

use std::collections::HashMap;

use log::{debug, info};
use rayon::prelude::*;

use crate::correlation::CorrelationMatrices;
use crate::error::{invalid, Result};
use crate::scenario::Scenario;

use super::fp::{fp_rate_max_on, FpOutcome};
use super::sca::{active_ids, sca_from};
use super::{check_dimensions, SolveReport, SolverOptions, Status};

/// Largest `K + M` accepted by [`exhaustive_search`].
pub const MAX_EXHAUSTIVE_SLOTS: usize = 20;

/// Schedule `index` as a support mask; slot 0 is the most significant bit so
/// increasing indices walk the schedules in lexicographic order.
pub(crate) fn mask(index: u64, n: usize) -> Vec<bool> {
    (0..n).map(|j| index >> (n - 1 - j) & 1 == 1).collect()
}

/// Solves the restricted problem on each of the `2^(K+M)` schedules and keeps the best.
///
/// Ties go to the lexicographically smallest schedule.
pub fn exhaustive_search(mats: &CorrelationMatrices, sc: &Scenario, opts: &SolverOptions) -> Result<SolveReport> {
    check_dimensions(mats, sc)?;
    opts.validate()?;
    let n = mats.n_slots();
    if n > MAX_EXHAUSTIVE_SLOTS {
        return Err(invalid("exhaustive_search", format!("{n} slots exceeds the limit of {MAX_EXHAUSTIVE_SLOTS}")));
    }
    let count = 1u64 << n;
    let masks: Vec<Vec<bool>> = (0..count).map(|i| mask(i, n)).collect();

    // The rate-maximising start depends only on which IDs are scheduled.
    let mut id_sets: Vec<Vec<usize>> = masks.iter().map(|s| active_ids(mats, s)).collect();
    id_sets.sort();
    id_sets.dedup();
    let starts: HashMap<Vec<usize>, FpOutcome> = id_sets
        .into_par_iter()
        .map(|ids| fp_rate_max_on(mats, sc, opts, &ids).map(|o| (ids, o)))
        .collect::<Result<_>>()?;

    let reports: Vec<Option<SolveReport>> = masks
        .par_iter()
        .map(|support| {
            let ids = active_ids(mats, support);
            if sc.rate_floor > 0.0 && ids.is_empty() {
                return Ok(None);
            }
            sca_from(mats, sc, opts, support, &starts[&ids]).map(Some)
        })
        .collect::<Result<_>>()?;

    let mut best: Option<(usize, SolveReport)> = None;
    let mut newton_steps = 0;
    let mut flops = 0;
    for (idx, (support, rep)) in masks.iter().zip(reports).enumerate() {
        let Some(rep) = rep else {
            debug!("schedule {}: skipped, no ID scheduled", fmt_mask(support));
            continue;
        };
        newton_steps += rep.newton_steps;
        flops += rep.flops;
        debug!("schedule {}: {} objective {:.6e}", fmt_mask(support), rep.status.as_str(), rep.objective);
        if rep.status == Status::Infeasible {
            continue;
        }
        if best.as_ref().is_none_or(|(_, b)| rep.objective > b.objective) {
            best = Some((idx, rep));
        }
    }
    info!("exhaustive search enumerated {count} schedules");
    let mut out = match best {
        Some((idx, rep)) => {
            debug!("best schedule {}", fmt_mask(&masks[idx]));
            rep
        }
        None => SolveReport::infeasible("exhaustive", mats, sc),
    };
    out.scheme = "exhaustive".to_string();
    out.subproblems = count as usize;
    out.newton_steps = newton_steps;
    out.flops = flops;
    Ok(out)
}

pub(crate) fn fmt_mask(support: &[bool]) -> String {
    support.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
