//! Construction plans, the structure cost between two assemblies, and
//! disassembly by reversal.

use alloc::vec::Vec;

use crate::error::Error;
use crate::model::{Assembly, BrickPlacement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Action {
    Assemble,
    Disassemble,
}

impl Action {
    pub fn name(self) -> &'static str {
        match self {
            Action::Assemble => "assemble",
            Action::Disassemble => "disassemble",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Task {
    /// 1-based.
    pub step: usize,
    pub action: Action,
    pub placement: BrickPlacement,
}

/// Ordered task list with contiguous 1-based steps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConstructionPlan {
    tasks: Vec<Task>,
}

impl ConstructionPlan {
    /// Validates step numbering; reports the first missing step.
    pub fn from_tasks(tasks: Vec<Task>) -> Result<Self, Error> {
        for (i, t) in tasks.iter().enumerate() {
            if t.step != i + 1 {
                return Err(Error::StepGap { expected: i + 1, found: t.step });
            }
        }
        Ok(ConstructionPlan { tasks })
    }

    /// An all-assemble plan in the given order.
    pub fn assembly<'a>(placements: impl IntoIterator<Item = &'a BrickPlacement>) -> Self {
        let tasks = placements
            .into_iter()
            .enumerate()
            .map(|(i, p)| Task { step: i + 1, action: Action::Assemble, placement: *p })
            .collect();
        ConstructionPlan { tasks }
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn is_assembly(&self) -> bool {
        self.tasks.iter().all(|t| t.action == Action::Assemble)
    }

    pub fn placements(&self) -> impl DoubleEndedIterator<Item = &BrickPlacement> + ExactSizeIterator {
        self.tasks.iter().map(|t| &t.placement)
    }

    /// Executes every task against `start`, checking feasibility of each
    /// assemble step and presence of each disassembled brick.
    pub fn replay(&self, start: &Assembly) -> Result<Assembly, Error> {
        let mut a = start.clone();
        for t in &self.tasks {
            match t.action {
                Action::Assemble => a.push(t.placement).map_err(|e| match e {
                    Error::Infeasible { verdict, .. } => Error::Infeasible { step: t.step, verdict },
                    other => other,
                })?,
                Action::Disassemble => a.remove(&t.placement).map_err(|_| Error::MissingPlacement { step: t.step })?,
            }
        }
        Ok(a)
    }
}

/// Disassembly plan: the same placements, removed in exactly reversed order.
pub fn reverse_plan(plan: &ConstructionPlan) -> Result<ConstructionPlan, Error> {
    if !plan.is_assembly() {
        return Err(Error::NotAnAssemblyPlan);
    }
    let tasks = plan
        .tasks
        .iter()
        .rev()
        .enumerate()
        .map(|(i, t)| Task { step: i + 1, action: Action::Disassemble, placement: t.placement })
        .collect();
    Ok(ConstructionPlan { tasks })
}

/// Per-pair mismatch indicators between a target brick and the built brick
/// matched to it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BrickMismatch {
    pub position: u32,
    pub id: u32,
    pub orientation: u32,
    pub color: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StructureCost {
    /// Size of the symmetric difference of the two canonical placement sets.
    pub total: usize,
    /// One entry per matched (target-only, built-only) pair.
    pub components: Vec<(BrickPlacement, BrickPlacement, BrickMismatch)>,
    /// Target-only bricks with no built counterpart.
    pub missing: Vec<BrickPlacement>,
    /// Built-only bricks with no target counterpart.
    pub extra: Vec<BrickPlacement>,
}

impl StructureCost {
    /// Sums of `(L_p, L_id, L_ω, color)` over matched pairs.
    pub fn totals(&self) -> BrickMismatch {
        self.components.iter().fold(BrickMismatch::default(), |acc, (_, _, m)| BrickMismatch {
            position: acc.position + m.position,
            id: acc.id + m.id,
            orientation: acc.orientation + m.orientation,
            color: acc.color + m.color,
        })
    }
}

/// Symmetric-difference cost between two assemblies, decomposed per brick.
///
/// Bricks present in only one of the two sets are paired greedily by anchor
/// distance (Manhattan, ties in canonical order); each pair reports 0/1
/// indicators for position, type, orientation and color.
pub fn structure_cost(target: &Assembly, built: &Assembly) -> Result<StructureCost, Error> {
    if target.bounds() != built.bounds() {
        return Err(Error::BoundsMismatch(target.bounds(), built.bounds()));
    }
    let t = target.canonical();
    let b = built.canonical();
    let (t_only, b_only) = multiset_difference(&t, &b);
    let total = t_only.len() + b_only.len();

    let mut pool = b_only;
    let mut components = Vec::new();
    let mut missing = Vec::new();
    for tp in t_only {
        let best = pool.iter().enumerate().min_by_key(|(_, bp)| (manhattan(&tp, bp), **bp)).map(|(i, _)| i);
        match best {
            Some(i) => {
                let bp = pool.remove(i);
                let m = BrickMismatch {
                    position: (tp.position != bp.position) as u32,
                    id: (tp.id != bp.id) as u32,
                    orientation: (tp.orientation != bp.orientation) as u32,
                    color: (tp.color != bp.color) as u32,
                };
                components.push((tp, bp, m));
            }
            None => missing.push(tp),
        }
    }
    Ok(StructureCost { total, components, missing, extra: pool })
}

fn manhattan(a: &BrickPlacement, b: &BrickPlacement) -> i32 {
    (a.position.x - b.position.x).abs() + (a.position.y - b.position.y).abs() + (a.position.z - b.position.z).abs()
}

/// Both inputs sorted; returns (a \ b, b \ a) as multisets.
fn multiset_difference(a: &[BrickPlacement], b: &[BrickPlacement]) -> (Vec<BrickPlacement>, Vec<BrickPlacement>) {
    let (mut i, mut j) = (0, 0);
    let (mut ao, mut bo) = (Vec::new(), Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => {
                ao.push(a[i]);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                bo.push(b[j]);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    ao.extend_from_slice(&a[i..]);
    bo.extend_from_slice(&b[j..]);
    (ao, bo)
}
