//! Choosing which pivot neighbourhoods a Phase II pass processes.

use std::cmp::Reverse;

use super::{PmsOptions, SchedulePolicy};

/// The columns to the right of `pivot` that currently share its low.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighbourhood {
    pub pivot: usize,
    pub members: Vec<usize>,
}

/// Panics if two neighbourhoods overlap or a member is itself a pivot.
pub(crate) fn assert_disjoint(groups: &[Neighbourhood], m: usize) {
    let mut owner = vec![0usize; m + 1];
    for g in groups {
        owner[g.pivot] = g.pivot;
    }
    for g in groups {
        for &j in &g.members {
            assert!(
                owner[j] == 0,
                "column {j} scheduled under pivot {} and {}",
                g.pivot,
                owner[j]
            );
            owner[j] = g.pivot;
        }
    }
}

/// Orders neighbourhoods by `opts.schedule_policy` and keeps at most
/// `opts.processor_cap` of them. Ties go to the smaller pivot index.
///
/// `known_negative(j)` marks columns certified negative before they are reduced.
pub(crate) fn select(
    mut groups: Vec<Neighbourhood>,
    opts: &PmsOptions,
    known_negative: impl Fn(usize) -> bool,
) -> Vec<Neighbourhood> {
    let Some(cap) = opts.processor_cap else {
        return groups;
    };
    if groups.len() <= cap {
        return groups;
    }
    match opts.schedule_policy {
        SchedulePolicy::All => {}
        SchedulePolicy::LargestNeighbourhoodFirst => {
            groups.sort_by_key(|g| (Reverse(g.members.len()), g.pivot));
        }
        SchedulePolicy::NegativeFirst => {
            groups.sort_by_cached_key(|g| {
                let negatives = g.members.iter().filter(|&&j| known_negative(j)).count();
                (Reverse(negatives), g.pivot)
            });
        }
    }
    groups.truncate(cap);
    groups
}
