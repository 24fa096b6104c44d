//! Row emitters shared by the model builders.
//!
//! Every model here is assembled from the same ingredients: a stage-0
//! roster block, optional re-planning blocks over parts of the horizon,
//! and coverage balances with priced slack. The emitters write those
//! rows identically wherever they appear, so each model prices a given
//! plan exactly the way the cost evaluator does — the builders differ
//! only in which blocks they lay down and how they couple them.

use std::ops::Range;

use crate::domain::{EffectiveLimits, Horizon, NurseProfile, Slot};
use crate::linear::{ConstraintSystem, Relation, VarId, VarKind};
use crate::num::Scalar;

use super::vars::{slot_tag, Scope, VarKey, VarTable};
use crate::instance::Instance;

/// One roster block's worth of per-nurse rule rows.
///
/// The stage-0 block spans the whole horizon with weight one; a
/// re-planning block spans one stage with the scenario's probability as
/// weight. `gate` is the block's scheduling flag for the nurse: hard
/// rules switch off with it, so an off-roster nurse constrains nothing.
pub(super) struct NurseBlock<T> {
    pub scope: Scope,
    pub nurse: usize,
    pub days: Range<usize>,
    pub limits: EffectiveLimits,
    pub gate: VarId,
    /// Objective multiplier for this block's priced columns.
    pub weight: T,
}

/// A nurse's preferred shifts bucketed by time-of-day slot.
pub(super) fn shifts_by_slot(inst: &Instance, profile: &NurseProfile) -> [Vec<usize>; 3] {
    let mut by_slot: [Vec<usize>; 3] = Default::default();
    for &s in &profile.preferred {
        by_slot[inst.catalog.slot_of(s).index()].push(s);
    }
    by_slot
}

/// Register the scheduling flag and assignment columns of one block and
/// return the flag.
pub(super) fn add_roster_columns<T: Scalar>(
    sys: &mut ConstraintSystem<T>,
    table: &mut VarTable,
    inst: &Instance,
    scope: Scope,
    nurse: usize,
    days: Range<usize>,
) -> VarId {
    let gate = table.add_binary(sys, scope, VarKey::Scheduled { nurse });
    for d in days {
        for &s in &inst.nurses[nurse].preferred {
            table.add_binary(
                sys,
                scope,
                VarKey::Assign {
                    nurse,
                    day: d,
                    shift: s,
                },
            );
        }
    }
    gate
}

/// Emit the working-rule rows of one nurse block: single assignment,
/// minute bounds, slot-usage links, night-sequence bans, weekly rest,
/// consecutive-run caps, and the soft-pattern columns feeding the graded
/// violation buckets. Assignment columns must already be registered;
/// slot-usage flags always live in the base block.
pub(super) fn emit_nurse_rules<T: Scalar>(
    sys: &mut ConstraintSystem<T>,
    table: &mut VarTable,
    inst: &Instance,
    blk: &NurseBlock<T>,
) {
    let i = blk.nurse;
    let profile = &inst.nurses[i];
    let by_slot = shifts_by_slot(inst, profile);
    let (ams, pms, nights) = (&by_slot[0], &by_slot[1], &by_slot[2]);
    let pre = blk.scope.prefix();
    let x = |table: &VarTable, d: usize, s: usize| {
        table.get(
            blk.scope,
            VarKey::Assign {
                nurse: i,
                day: d,
                shift: s,
            },
        )
    };
    // Work on any day needs the nurse on this block's roster, and no day
    // carries more than one shift.
    for d in blk.days.clone() {
        let mut terms: Vec<(VarId, T)> = profile
            .preferred
            .iter()
            .map(|&s| (x(table, d, s), T::one()))
            .collect();
        terms.push((blk.gate, -T::one()));
        sys.add_con(format!("{pre}oneshift_n{i}_d{d}"), terms, Relation::Le, T::zero());
    }

    // Worked minutes inside the block's bounds while on the roster.
    let minute_terms = |table: &VarTable| -> Vec<(VarId, T)> {
        blk.days
            .clone()
            .flat_map(|d| {
                profile.preferred.iter().map(move |&s| (d, s))
            })
            .map(|(d, s)| {
                (
                    x(table, d, s),
                    T::from_f64_const(f64::from(inst.catalog.get(s).minutes)),
                )
            })
            .collect()
    };
    if blk.limits.min_minutes > 0.0 {
        let mut terms = minute_terms(table);
        terms.push((blk.gate, -T::from_f64_const(blk.limits.min_minutes)));
        sys.add_con(format!("{pre}minhours_n{i}"), terms, Relation::Ge, T::zero());
    }
    let mut terms = minute_terms(table);
    terms.push((blk.gate, -T::from_f64_const(blk.limits.max_minutes)));
    sys.add_con(format!("{pre}maxhours_n{i}"), terms, Relation::Le, T::zero());

    // Working a slot anywhere raises the nurse's shared slot-usage flag.
    for slot in Slot::ALL {
        let shifts = &by_slot[slot.index()];
        if shifts.is_empty() {
            continue;
        }
        let y = table.get(Scope::Base, VarKey::SlotUsed { nurse: i, slot });
        for d in blk.days.clone() {
            let mut terms: Vec<(VarId, T)> =
                shifts.iter().map(|&s| (x(table, d, s), T::one())).collect();
            terms.push((y, -T::one()));
            sys.add_con(
                format!("{pre}slotuse_n{i}_d{d}_{}", slot_tag(slot)),
                terms,
                Relation::Le,
                T::zero(),
            );
        }
    }

    // No morning or evening work right after a night shift.
    if !nights.is_empty() && !(ams.is_empty() && pms.is_empty()) {
        for d in blk.days.clone() {
            if d + 1 >= blk.days.end {
                break;
            }
            let mut terms: Vec<(VarId, T)> =
                nights.iter().map(|&s| (x(table, d, s), T::one())).collect();
            for &s in ams.iter().chain(pms) {
                terms.push((x(table, d + 1, s), T::one()));
            }
            terms.push((blk.gate, -T::one()));
            sys.add_con(format!("{pre}postnight_n{i}_d{d}"), terms, Relation::Le, T::zero());
        }
    }

    // No night shift, single rest day, then a morning shift.
    if !nights.is_empty() && !ams.is_empty() {
        for d in blk.days.clone() {
            if d + 2 >= blk.days.end {
                break;
            }
            let mut terms: Vec<(VarId, T)> =
                nights.iter().map(|&s| (x(table, d, s), T::one())).collect();
            for &s in &profile.preferred {
                terms.push((x(table, d + 1, s), -T::one()));
            }
            for &s in ams {
                terms.push((x(table, d + 2, s), T::one()));
            }
            terms.push((blk.gate, -T::one()));
            sys.add_con(format!("{pre}nightgap_n{i}_d{d}"), terms, Relation::Le, T::zero());
        }
    }

    // Enough work-free days in every seven-day block; a trailing partial
    // block too short to breach the bound needs no row.
    let workdays_per_week = (7 - blk.limits.weekly_rest_days.min(7)) as usize;
    for (k, week) in Horizon::week_blocks(blk.days.clone()).enumerate() {
        if week.len() <= workdays_per_week {
            continue;
        }
        let mut terms: Vec<(VarId, T)> = week
            .flat_map(|d| profile.preferred.iter().map(move |&s| (d, s)))
            .map(|(d, s)| (x(table, d, s), T::one()))
            .collect();
        terms.push((blk.gate, -T::from_f64_const(workdays_per_week as f64)));
        sys.add_con(format!("{pre}weekrest_n{i}_b{k}"), terms, Relation::Le, T::zero());
    }

    // No run of work days longer than the cap: every window one day
    // wider than the cap must contain a rest day.
    let run_cap = blk.limits.max_consecutive_days as usize;
    if blk.days.len() > run_cap {
        for start in blk.days.start..=(blk.days.end - run_cap - 1) {
            let terms: Vec<(VarId, T)> = (start..=start + run_cap)
                .flat_map(|d| profile.preferred.iter().map(move |&s| (d, s)))
                .map(|(d, s)| (x(table, d, s), T::one()))
                .collect();
            sys.add_con(
                format!("{pre}run_n{i}_d{start}"),
                terms,
                Relation::Le,
                T::from_f64_const(run_cap as f64),
            );
        }
    }

    // Soft patterns: each gets a column its definitional row pushes up to
    // at least the pattern's truth value, and the graded buckets below
    // price the total.
    let excess = table.add(
        sys,
        blk.scope,
        VarKey::WeekendExcess { nurse: i },
        VarKind::Continuous,
        T::zero(),
        T::infinity(),
    );
    let mut soft_terms: Vec<(VarId, T)> = vec![(excess, T::one())];
    let weekend: Vec<usize> = Horizon::weekend_days_in(blk.days.clone()).collect();
    if !weekend.is_empty() {
        let mut terms: Vec<(VarId, T)> = weekend
            .iter()
            .flat_map(|&d| profile.preferred.iter().map(move |&s| (d, s)))
            .map(|(d, s)| (x(table, d, s), T::one()))
            .collect();
        terms.push((excess, -T::one()));
        sys.add_con(
            format!("{pre}weekendcap_n{i}"),
            terms,
            Relation::Le,
            T::from_f64_const(f64::from(blk.limits.max_weekend_days)),
        );
    }

    if !ams.is_empty() {
        for t in blk.days.start + 1..blk.days.end {
            let u = table.add(
                sys,
                blk.scope,
                VarKey::RestThenMorning { nurse: i, day: t },
                VarKind::Continuous,
                T::zero(),
                T::one(),
            );
            let mut terms: Vec<(VarId, T)> =
                ams.iter().map(|&s| (x(table, t, s), T::one())).collect();
            for &s in &profile.preferred {
                terms.push((x(table, t - 1, s), -T::one()));
            }
            terms.push((u, -T::one()));
            sys.add_con(format!("{pre}rtmdef_n{i}_d{t}"), terms, Relation::Le, T::zero());
            soft_terms.push((u, T::one()));
        }
    }

    if !nights.is_empty() {
        for d in blk.days.clone() {
            if !Horizon::is_saturday(d) || d + 1 >= blk.days.end {
                continue;
            }
            let u = table.add(
                sys,
                blk.scope,
                VarKey::DoubleNight { nurse: i, day: d },
                VarKind::Continuous,
                T::zero(),
                T::one(),
            );
            let mut terms: Vec<(VarId, T)> =
                nights.iter().map(|&s| (x(table, d, s), T::one())).collect();
            for &s in nights {
                terms.push((x(table, d + 1, s), T::one()));
            }
            terms.push((u, -T::one()));
            sys.add_con(format!("{pre}dblndef_n{i}_d{d}"), terms, Relation::Le, T::one());
            soft_terms.push((u, T::one()));
        }
    }

    if !profile.preferred.is_empty() && blk.days.len() >= 3 {
        for t in blk.days.start + 1..blk.days.end - 1 {
            let u = table.add(
                sys,
                blk.scope,
                VarKey::IsolatedWork { nurse: i, day: t },
                VarKind::Continuous,
                T::zero(),
                T::one(),
            );
            let mut terms: Vec<(VarId, T)> = Vec::new();
            for &s in &profile.preferred {
                terms.push((x(table, t, s), T::one()));
                terms.push((x(table, t - 1, s), -T::one()));
                terms.push((x(table, t + 1, s), -T::one()));
            }
            terms.push((u, -T::one()));
            sys.add_con(format!("{pre}isodef_n{i}_d{t}"), terms, Relation::Le, T::zero());
            soft_terms.push((u, T::one()));
        }
    }

    // Graded buckets: the chosen level must cover the soft-pattern
    // total, one level at most, nothing beyond the hard cap. With a cap
    // of zero the total itself is forced to zero.
    let cap = blk.limits.violation_cap;
    if cap == 0 {
        sys.add_con(format!("{pre}nosoft_n{i}"), soft_terms, Relation::Le, T::zero());
    } else {
        let mut pick: Vec<(VarId, T)> = Vec::new();
        for level in 1..=cap {
            let v = table.add_binary(
                sys,
                blk.scope,
                VarKey::ViolationLevel { nurse: i, level },
            );
            sys.add_objective(
                v,
                blk.weight * T::from_f64_const(inst.costs.violation_price(level as usize)),
            );
            pick.push((v, T::one()));
            soft_terms.push((v, -T::from_f64_const(f64::from(level))));
        }
        sys.add_con(format!("{pre}onebucket_n{i}"), pick, Relation::Le, T::one());
        sys.add_con(format!("{pre}bucket_n{i}"), soft_terms, Relation::Le, T::zero());
    }
}

/// Emit the coverage balance of one block: supply plus under-coverage
/// minus over-coverage equals demand, with both slacks priced at the
/// coverage cost times the block's weight.
pub(super) fn emit_coverage<T: Scalar>(
    sys: &mut ConstraintSystem<T>,
    table: &mut VarTable,
    inst: &Instance,
    scope: Scope,
    days: Range<usize>,
    demand: impl Fn(Slot, usize) -> u32,
    weight: T,
) {
    let pre = scope.prefix();
    let price = weight * T::from_f64_const(inst.costs.coverage);
    for slot in Slot::ALL {
        for d in days.clone() {
            let mut terms: Vec<(VarId, T)> = Vec::new();
            for (i, p) in inst.nurses.iter().enumerate() {
                for &s in &p.preferred {
                    if inst.catalog.slot_of(s) == slot {
                        terms.push((
                            table.get(
                                scope,
                                VarKey::Assign {
                                    nurse: i,
                                    day: d,
                                    shift: s,
                                },
                            ),
                            T::one(),
                        ));
                    }
                }
            }
            let under = table.add(
                sys,
                scope,
                VarKey::Under { slot, day: d },
                VarKind::Continuous,
                T::zero(),
                T::infinity(),
            );
            let over = table.add(
                sys,
                scope,
                VarKey::Over { slot, day: d },
                VarKind::Continuous,
                T::zero(),
                T::infinity(),
            );
            sys.add_objective(under, price);
            sys.add_objective(over, price);
            terms.push((under, T::one()));
            terms.push((over, -T::one()));
            sys.add_con(
                format!("{pre}cover_{}_d{d}", slot_tag(slot)),
                terms,
                Relation::Eq,
                T::from_f64_const(f64::from(demand(slot, d))),
            );
        }
    }
}

/// Emit the request-grant columns of the stage-0 block. A scheduled
/// nurse pays the request price for every request, refunded through the
/// grant column exactly when the requested cell is worked; the three
/// rows pin the grant to "scheduled and assigned" at every feasible
/// point.
pub(super) fn emit_requests<T: Scalar>(
    sys: &mut ConstraintSystem<T>,
    table: &mut VarTable,
    inst: &Instance,
) {
    let price = T::from_f64_const(inst.costs.request);
    for (i, p) in inst.nurses.iter().enumerate() {
        let gate = table.get(Scope::Base, VarKey::Scheduled { nurse: i });
        for &(day, shift) in &p.requests {
            let x = table.get(
                Scope::Base,
                VarKey::Assign {
                    nurse: i,
                    day,
                    shift,
                },
            );
            let grant = table.add(
                sys,
                Scope::Base,
                VarKey::RequestGranted {
                    nurse: i,
                    day,
                    shift,
                },
                VarKind::Continuous,
                T::zero(),
                T::one(),
            );
            sys.add_objective(gate, price);
            sys.add_objective(grant, -price);
            sys.add_con(
                format!("grantsched_n{i}_d{day}_s{shift}"),
                [(grant, T::one()), (gate, -T::one())],
                Relation::Le,
                T::zero(),
            );
            sys.add_con(
                format!("grantwork_n{i}_d{day}_s{shift}"),
                [(grant, T::one()), (x, -T::one())],
                Relation::Le,
                T::zero(),
            );
            sys.add_con(
                format!("grantboth_n{i}_d{day}_s{shift}"),
                [(gate, T::one()), (x, T::one()), (grant, -T::one())],
                Relation::Le,
                T::one(),
            );
        }
    }
}

/// Lay down the complete stage-0 block: roster columns, shared
/// slot-usage flags with the per-policy budget, all working-rule rows
/// over the flattened horizon, coverage against expected demand, and the
/// request columns. This is the entire deterministic model and the
/// first-stage half of every staged model.
pub(super) fn emit_base_block<T: Scalar>(
    sys: &mut ConstraintSystem<T>,
    table: &mut VarTable,
    inst: &Instance,
) {
    let days = inst.horizon.days();
    let flat = inst.horizon.flatten();
    let staffing = T::from_f64_const(inst.costs.staffing);
    for (i, p) in inst.nurses.iter().enumerate() {
        let gate = add_roster_columns(sys, table, inst, Scope::Base, i, 0..days);
        sys.add_objective(gate, staffing);
        let by_slot = shifts_by_slot(inst, p);
        let mut budget: Vec<(VarId, T)> = Vec::new();
        for slot in Slot::ALL {
            if by_slot[slot.index()].is_empty() {
                continue;
            }
            let y = table.add_binary(sys, Scope::Base, VarKey::SlotUsed { nurse: i, slot });
            budget.push((y, T::one()));
        }
        if !budget.is_empty() {
            sys.add_con(
                format!("slots_n{i}"),
                budget,
                Relation::Le,
                T::from_f64_const(p.policy.slot_allowance() as f64),
            );
        }
    }
    for (i, p) in inst.nurses.iter().enumerate() {
        let blk = NurseBlock {
            scope: Scope::Base,
            nurse: i,
            days: 0..days,
            limits: p.limits_for_stage(&flat, 0),
            gate: table.get(Scope::Base, VarKey::Scheduled { nurse: i }),
            weight: T::one(),
        };
        emit_nurse_rules(sys, table, inst, &blk);
    }
    emit_coverage(
        sys,
        table,
        inst,
        Scope::Base,
        0..days,
        |slot, d| inst.demand.get(slot, d),
        T::one(),
    );
    emit_requests(sys, table, inst);
}
