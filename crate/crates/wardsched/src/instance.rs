//! Problem instances and their on-disk JSON format.
//!
//! An [`Instance`] bundles everything a planning run needs: the shift
//! catalog, the staged horizon, nurse profiles, baseline demand, cost
//! coefficients, and (optionally) the demand scenario tree. The JSON
//! format identifies itself with a `"format": "wardsched-instance/1"`
//! marker; durations are written in hours, time of day as `"HH:MM"`,
//! shifts are referenced by label, and all of it converts back to the
//! minute- and index-based in-memory types on load.

use crate::domain::{
    CostParams, DomainError, EffectiveLimits, Horizon, NurseProfile, ShiftCatalog, Slot, SlotGrid,
    WorkPolicy,
};
use crate::scenario::{ScenarioError, ScenarioTree, StageRealization};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// Format marker accepted and emitted by this crate version.
pub const FORMAT_MARKER: &str = "wardsched-instance/1";

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("malformed instance JSON at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("unsupported format marker `{found}` (expected `{expected}`)", expected = FORMAT_MARKER)]
    BadFormatMarker { found: String },
    #[error("an instance needs at least one nurse")]
    NoNurses,
    #[error("duplicate nurse label `{label}`")]
    DuplicateNurseLabel { label: String },
    #[error("demand for slot {slot} lists {got} days but the horizon has {want}")]
    DemandLength { slot: Slot, want: usize, got: usize },
    #[error("{context}: unknown shift label `{label}`")]
    UnknownShiftLabel { context: String, label: String },
    #[error("{context}: {hours}h is not a whole number of minutes")]
    FractionalMinutes { context: String, hours: f64 },
    #[error("bad time of day `{value}` (expected HH:MM)")]
    BadTime { value: String },
    #[error("scenario tree covers {got} stages but the horizon has {want}")]
    ScenarioStages { want: usize, got: usize },
}

/// A complete planning problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub catalog: ShiftCatalog,
    pub horizon: Horizon,
    pub nurses: Vec<NurseProfile>,
    /// Baseline (expected) demand per slot and day; what the one-shot
    /// deterministic plan and the first planning stage are priced
    /// against.
    pub demand: SlotGrid<u32>,
    pub costs: CostParams<f64>,
    /// Demand uncertainty, when the instance is meant for staged runs.
    pub scenarios: Option<ScenarioTree>,
}

impl Instance {
    /// Largest graded-violation cap over all nurses.
    pub fn max_violation_cap(&self) -> u32 {
        self.nurses.iter().map(|n| n.violation_cap).max().unwrap_or(0)
    }

    /// Check internal consistency of every component.
    pub fn validate(&self) -> Result<(), InstanceError> {
        if self.nurses.is_empty() {
            return Err(InstanceError::NoNurses);
        }
        if self.demand.days() != self.horizon.days() {
            return Err(InstanceError::DemandLength {
                slot: Slot::Am,
                want: self.horizon.days(),
                got: self.demand.days(),
            });
        }
        let mut labels = BTreeSet::new();
        for nurse in &self.nurses {
            if !labels.insert(nurse.label.clone()) {
                return Err(InstanceError::DuplicateNurseLabel {
                    label: nurse.label.clone(),
                });
            }
            nurse.validate(&self.catalog, &self.horizon)?;
        }
        self.costs.validate(self.max_violation_cap())?;
        if let Some(tree) = &self.scenarios {
            if tree.stage_count() != self.horizon.stages() {
                return Err(InstanceError::ScenarioStages {
                    want: self.horizon.stages(),
                    got: tree.stage_count(),
                });
            }
        }
        Ok(())
    }

    /// Serialize to the versioned JSON format.
    pub fn to_json(&self) -> String {
        let io = InstanceIo::from_instance(self);
        serde_json::to_string_pretty(&io).expect("instance serialization cannot fail")
    }

    /// Parse and validate an instance from its JSON form. Parse errors
    /// point at the offending JSON path.
    pub fn from_json(text: &str) -> Result<Instance, InstanceError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let io: InstanceIo =
            serde_path_to_error::deserialize(&mut de).map_err(|e| InstanceError::Parse {
                path: e.path().to_string(),
                message: e.inner().to_string(),
            })?;
        let instance = io.into_instance()?;
        instance.validate()?;
        Ok(instance)
    }
}

// ---------------------------------------------------------------------
// JSON mirror types
// ---------------------------------------------------------------------

fn minutes_from_hours(hours: f64, context: &str) -> Result<u32, InstanceError> {
    let minutes = hours * 60.0;
    let rounded = minutes.round();
    if hours < 0.0 || !minutes.is_finite() || (minutes - rounded).abs() > 1e-6 {
        return Err(InstanceError::FractionalMinutes {
            context: context.to_owned(),
            hours,
        });
    }
    Ok(rounded as u32)
}

fn format_time(minute: u32) -> String {
    format!("{:02}:{:02}", minute / 60, minute % 60)
}

fn parse_time(value: &str) -> Result<u32, InstanceError> {
    let bad = || InstanceError::BadTime {
        value: value.to_owned(),
    };
    let (h, m) = value.split_once(':').ok_or_else(bad)?;
    let h: u32 = h.parse().map_err(|_| bad())?;
    let m: u32 = m.parse().map_err(|_| bad())?;
    if h >= 24 || m >= 60 {
        return Err(bad());
    }
    Ok(h * 60 + m)
}

#[derive(Serialize, Deserialize)]
struct InstanceIo {
    format: String,
    shifts: Vec<ShiftIo>,
    horizon: HorizonIo,
    demand: DemandIo,
    nurses: Vec<NurseIo>,
    costs: CostsIo,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scenarios: Option<Vec<StageIo>>,
}

#[derive(Serialize, Deserialize)]
struct ShiftIo {
    label: String,
    slot: String,
    start: String,
    hours: f64,
}

#[derive(Serialize, Deserialize)]
struct HorizonIo {
    days: usize,
    stage_days: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct DemandIo {
    am: Vec<u32>,
    pm: Vec<u32>,
    night: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct RequestIo {
    day: usize,
    shift: String,
}

#[derive(Serialize, Deserialize)]
struct StageLimitIo {
    min_hours: f64,
    max_hours: f64,
    weekly_rest_days: u32,
    max_consecutive_days: u32,
    max_weekend_days: u32,
    violation_cap: u32,
}

#[derive(Serialize, Deserialize)]
struct NurseIo {
    label: String,
    policy: String,
    min_hours: f64,
    max_hours: f64,
    weekly_rest_days: u32,
    max_consecutive_days: u32,
    max_weekend_days: u32,
    violation_cap: u32,
    preferred_shifts: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    requests: Vec<RequestIo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stage_limits: Option<Vec<StageLimitIo>>,
}

#[derive(Serialize, Deserialize)]
struct CostsIo {
    staffing: f64,
    coverage: f64,
    request: f64,
    violation: Vec<f64>,
    understaffing: f64,
    overstaffing: f64,
    adjustment: f64,
}

#[derive(Serialize, Deserialize)]
struct RealizationIo {
    label: String,
    probability: f64,
    demand: SlotCountsIo,
}

#[derive(Serialize, Deserialize)]
struct SlotCountsIo {
    am: u32,
    pm: u32,
    night: u32,
}

#[derive(Serialize, Deserialize)]
struct StageIo {
    realizations: Vec<RealizationIo>,
}

impl InstanceIo {
    fn from_instance(inst: &Instance) -> InstanceIo {
        InstanceIo {
            format: FORMAT_MARKER.to_owned(),
            shifts: inst
                .catalog
                .iter()
                .map(|(_, s)| ShiftIo {
                    label: s.label.clone(),
                    slot: s.slot.code().to_owned(),
                    start: format_time(s.start_minute),
                    hours: s.hours(),
                })
                .collect(),
            horizon: HorizonIo {
                days: inst.horizon.days(),
                stage_days: inst.horizon.stage_lens().to_vec(),
            },
            demand: DemandIo {
                am: (0..inst.demand.days())
                    .map(|d| inst.demand.get(Slot::Am, d))
                    .collect(),
                pm: (0..inst.demand.days())
                    .map(|d| inst.demand.get(Slot::Pm, d))
                    .collect(),
                night: (0..inst.demand.days())
                    .map(|d| inst.demand.get(Slot::Night, d))
                    .collect(),
            },
            nurses: inst
                .nurses
                .iter()
                .map(|n| NurseIo {
                    label: n.label.clone(),
                    policy: n.policy.name().to_owned(),
                    min_hours: f64::from(n.min_minutes) / 60.0,
                    max_hours: f64::from(n.max_minutes) / 60.0,
                    weekly_rest_days: n.weekly_rest_days,
                    max_consecutive_days: n.max_consecutive_days,
                    max_weekend_days: n.max_weekend_days,
                    violation_cap: n.violation_cap,
                    preferred_shifts: n
                        .preferred
                        .iter()
                        .map(|&s| inst.catalog.get(s).label.clone())
                        .collect(),
                    requests: n
                        .requests
                        .iter()
                        .map(|&(day, s)| RequestIo {
                            day,
                            shift: inst.catalog.get(s).label.clone(),
                        })
                        .collect(),
                    stage_limits: n.stage_limits.as_ref().map(|st| {
                        st.iter()
                            .map(|l| StageLimitIo {
                                min_hours: l.min_minutes / 60.0,
                                max_hours: l.max_minutes / 60.0,
                                weekly_rest_days: l.weekly_rest_days,
                                max_consecutive_days: l.max_consecutive_days,
                                max_weekend_days: l.max_weekend_days,
                                violation_cap: l.violation_cap,
                            })
                            .collect()
                    }),
                })
                .collect(),
            costs: CostsIo {
                staffing: inst.costs.staffing,
                coverage: inst.costs.coverage,
                request: inst.costs.request,
                violation: inst.costs.violation.clone(),
                understaffing: inst.costs.understaffing,
                overstaffing: inst.costs.overstaffing,
                adjustment: inst.costs.adjustment,
            },
            scenarios: inst.scenarios.as_ref().map(|tree| {
                (0..tree.stage_count())
                    .map(|h| StageIo {
                        realizations: tree
                            .stage_realizations(h)
                            .iter()
                            .map(|r| RealizationIo {
                                label: r.label.clone(),
                                probability: r.probability,
                                demand: SlotCountsIo {
                                    am: r.demand[0],
                                    pm: r.demand[1],
                                    night: r.demand[2],
                                },
                            })
                            .collect(),
                    })
                    .collect()
            }),
        }
    }

    fn into_instance(self) -> Result<Instance, InstanceError> {
        if self.format != FORMAT_MARKER {
            return Err(InstanceError::BadFormatMarker { found: self.format });
        }
        let shifts = self
            .shifts
            .into_iter()
            .map(|s| {
                let slot = Slot::from_code(&s.slot).ok_or_else(|| InstanceError::Parse {
                    path: "shifts".to_owned(),
                    message: format!("unknown slot code `{}`", s.slot),
                })?;
                let start = parse_time(&s.start)?;
                let minutes = minutes_from_hours(s.hours, &format!("shift `{}`", s.label))?;
                Ok(crate::domain::Shift {
                    label: s.label,
                    slot,
                    start_minute: start,
                    end_minute: (start + minutes) % (24 * 60),
                    minutes,
                })
            })
            .collect::<Result<Vec<_>, InstanceError>>()?;
        let catalog = ShiftCatalog::new(shifts)?;
        let horizon = Horizon::with_stage_lengths(self.horizon.days, &self.horizon.stage_days)?;

        for (slot, list) in [
            (Slot::Am, &self.demand.am),
            (Slot::Pm, &self.demand.pm),
            (Slot::Night, &self.demand.night),
        ] {
            if list.len() != horizon.days() {
                return Err(InstanceError::DemandLength {
                    slot,
                    want: horizon.days(),
                    got: list.len(),
                });
            }
        }
        let demand = SlotGrid::from_fn(horizon.days(), |slot, d| match slot {
            Slot::Am => self.demand.am[d],
            Slot::Pm => self.demand.pm[d],
            Slot::Night => self.demand.night[d],
        });

        let lookup = |context: String, label: &str| -> Result<usize, InstanceError> {
            catalog
                .by_label(label)
                .ok_or_else(|| InstanceError::UnknownShiftLabel {
                    context,
                    label: label.to_owned(),
                })
        };
        let nurses = self
            .nurses
            .into_iter()
            .map(|n| {
                let policy =
                    WorkPolicy::from_name(&n.policy).ok_or_else(|| InstanceError::Parse {
                        path: format!("nurses.{}.policy", n.label),
                        message: format!("unknown policy `{}`", n.policy),
                    })?;
                let preferred = n
                    .preferred_shifts
                    .iter()
                    .map(|label| lookup(format!("nurse `{}` preferred shifts", n.label), label))
                    .collect::<Result<BTreeSet<_>, _>>()?;
                let requests = n
                    .requests
                    .iter()
                    .map(|r| {
                        lookup(format!("nurse `{}` requests", n.label), &r.shift)
                            .map(|s| (r.day, s))
                    })
                    .collect::<Result<BTreeSet<_>, _>>()?;
                Ok(NurseProfile {
                    min_minutes: minutes_from_hours(
                        n.min_hours,
                        &format!("nurse `{}` minimum hours", n.label),
                    )?,
                    max_minutes: minutes_from_hours(
                        n.max_hours,
                        &format!("nurse `{}` maximum hours", n.label),
                    )?,
                    label: n.label,
                    policy,
                    weekly_rest_days: n.weekly_rest_days,
                    max_consecutive_days: n.max_consecutive_days,
                    max_weekend_days: n.max_weekend_days,
                    violation_cap: n.violation_cap,
                    preferred,
                    requests,
                    stage_limits: n.stage_limits.map(|st| {
                        st.into_iter()
                            .map(|l| EffectiveLimits {
                                min_minutes: l.min_hours * 60.0,
                                max_minutes: l.max_hours * 60.0,
                                weekly_rest_days: l.weekly_rest_days,
                                max_consecutive_days: l.max_consecutive_days,
                                max_weekend_days: l.max_weekend_days,
                                violation_cap: l.violation_cap,
                            })
                            .collect()
                    }),
                })
            })
            .collect::<Result<Vec<_>, InstanceError>>()?;

        let costs = CostParams {
            staffing: self.costs.staffing,
            coverage: self.costs.coverage,
            request: self.costs.request,
            violation: self.costs.violation,
            understaffing: self.costs.understaffing,
            overstaffing: self.costs.overstaffing,
            adjustment: self.costs.adjustment,
        };
        let scenarios = self
            .scenarios
            .map(|stages| {
                ScenarioTree::build(
                    stages
                        .into_iter()
                        .map(|stage| {
                            stage
                                .realizations
                                .into_iter()
                                .map(|r| StageRealization {
                                    label: r.label,
                                    probability: r.probability,
                                    demand: [r.demand.am, r.demand.pm, r.demand.night],
                                })
                                .collect()
                        })
                        .collect(),
                )
            })
            .transpose()?;

        Ok(Instance {
            catalog,
            horizon,
            nurses,
            demand,
            costs,
            scenarios,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::StageRealization;

    pub(crate) fn sample_instance() -> Instance {
        let catalog = ShiftCatalog::standard();
        let horizon = Horizon::weekly_stages(&[1, 1]).unwrap();
        let nurses = vec![
            NurseProfile {
                label: "anna".into(),
                policy: WorkPolicy::Fixed,
                min_minutes: 0,
                max_minutes: 80 * 60,
                weekly_rest_days: 1,
                max_consecutive_days: 5,
                max_weekend_days: 4,
                violation_cap: 4,
                preferred: [0usize, 1, 2].into_iter().collect(),
                requests: [(3usize, 1usize)].into_iter().collect(),
                stage_limits: None,
            },
            NurseProfile {
                label: "ben".into(),
                policy: WorkPolicy::Rotating,
                min_minutes: 10 * 60,
                max_minutes: 80 * 60,
                weekly_rest_days: 2,
                max_consecutive_days: 4,
                max_weekend_days: 2,
                violation_cap: 3,
                preferred: (0..12).collect(),
                requests: [(0usize, 11usize), (8usize, 0usize)].into_iter().collect(),
                stage_limits: None,
            },
        ];
        let tree = ScenarioTree::build(vec![
            vec![
                StageRealization::new("high", 0.6, [7, 8, 6]),
                StageRealization::new("low", 0.4, [3, 3, 3]),
            ],
            vec![
                StageRealization::new("high", 0.5, [6, 6, 5]),
                StageRealization::new("low", 0.5, [4, 4, 3]),
            ],
        ])
        .unwrap();
        Instance {
            catalog,
            horizon,
            nurses,
            demand: SlotGrid::replicate(14, [5, 6, 4]),
            costs: CostParams::baseline(),
            scenarios: Some(tree),
        }
    }

    #[test]
    fn json_round_trip_is_identity() {
        let inst = sample_instance();
        inst.validate().unwrap();
        let text = inst.to_json();
        let back = Instance::from_json(&text).unwrap();
        assert_eq!(back, inst);
        // And the serialized form itself is stable.
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn parse_errors_carry_a_json_path() {
        let mut inst = sample_instance();
        inst.scenarios = None;
        let text = inst.to_json().replace("\"min_hours\": 10.0", "\"min_hours\": \"ten\"");
        let err = Instance::from_json(&text).unwrap_err();
        match err {
            InstanceError::Parse { path, .. } => assert!(path.contains("min_hours"), "{path}"),
            other => panic!("expected a parse error, got {other}"),
        }
    }

    #[test]
    fn rejects_wrong_marker_and_unknown_labels() {
        let inst = sample_instance();
        let text = inst.to_json().replace(FORMAT_MARKER, "wardsched-instance/9");
        assert!(matches!(
            Instance::from_json(&text),
            Err(InstanceError::BadFormatMarker { .. })
        ));
        let text = inst.to_json().replace("\"shift\": \"A2\"", "\"shift\": \"A9\"");
        assert_ne!(text, inst.to_json(), "fixture must contain an A2 request");
        assert!(matches!(
            Instance::from_json(&text),
            Err(InstanceError::UnknownShiftLabel { .. })
        ));
    }

    #[test]
    fn validation_rejects_mismatched_scenario_depth() {
        let mut inst = sample_instance();
        inst.scenarios = Some(ScenarioTree::degenerate(&[[5, 6, 4]]).unwrap());
        assert!(matches!(
            inst.validate(),
            Err(InstanceError::ScenarioStages { want: 2, got: 1 })
        ));
    }

    #[test]
    fn validation_rejects_duplicate_nurses_and_fractional_minutes() {
        let mut inst = sample_instance();
        inst.nurses[1].label = "anna".into();
        assert!(matches!(
            inst.validate(),
            Err(InstanceError::DuplicateNurseLabel { .. })
        ));
        let inst = sample_instance();
        let text = inst.to_json().replace("\"max_hours\": 80.0", "\"max_hours\": 80.000001");
        assert!(matches!(
            Instance::from_json(&text),
            Err(InstanceError::FractionalMinutes { .. })
        ));
    }
}
