//! JSON construction-plan files.
//!
//! ```json
//! {"version":1,"bounds":[48,48,24],"tasks":[{"step":1,"action":"assemble","brick":"2x4","omega":0,"position":[10,10,1],"color":"red"}]}
//! ```
//!
//! Output is pretty-printed with two-space indentation and a trailing
//! newline; keys always appear in the order above.

use salfd_core::{Action, Assembly, Bounds, BrickPlacement, Catalog, Cell, Color, ConstructionPlan, Orientation, Task};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PLAN_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum PlanFileError {
    #[error("malformed plan at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported plan version {0}")]
    Version(u64),
    #[error("task {task}: field `{field}`: {message}")]
    Field { task: usize, field: &'static str, message: String },
    #[error(transparent)]
    Plan(#[from] salfd_core::Error),
}

/// Placement as it appears in plan and trace files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementDoc {
    pub brick: String,
    pub omega: u8,
    pub position: [i32; 3],
    pub color: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskDoc {
    step: usize,
    action: String,
    brick: String,
    omega: u8,
    position: [i32; 3],
    color: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanDoc {
    version: u64,
    bounds: [u16; 3],
    tasks: Vec<TaskDoc>,
}

/// Plan together with the workspace it was learned in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanFile {
    pub bounds: Bounds,
    pub plan: ConstructionPlan,
}

impl PlacementDoc {
    pub fn from_placement(b: &BrickPlacement, catalog: &Catalog) -> Result<Self, salfd_core::Error> {
        Ok(PlacementDoc {
            brick: catalog.get(b.id)?.to_string(),
            omega: b.orientation.index() as u8,
            position: b.position.into(),
            color: b.color.name().to_string(),
        })
    }

    /// `task` is only used to label errors.
    pub fn to_placement(&self, catalog: &Catalog, task: usize) -> Result<BrickPlacement, PlanFileError> {
        let field = |field, message: String| PlanFileError::Field { task, field, message };
        let ty = catalog
            .by_name(&self.brick)
            .ok_or_else(|| field("brick", format!("unknown brick type {:?}", self.brick)))?;
        let o = Orientation::from_index(self.omega)
            .ok_or_else(|| field("omega", format!("expected 0 or 1, got {}", self.omega)))?;
        let color =
            Color::from_name(&self.color).ok_or_else(|| field("color", format!("unknown color {:?}", self.color)))?;
        Ok(BrickPlacement::new(Cell::from(self.position), ty.id, o, color))
    }
}

pub fn serialize(file: &PlanFile, catalog: &Catalog) -> Result<String, salfd_core::Error> {
    let tasks = file
        .plan
        .tasks()
        .iter()
        .map(|t| {
            let p = PlacementDoc::from_placement(&t.placement, catalog)?;
            Ok(TaskDoc {
                step: t.step,
                action: t.action.name().to_string(),
                brick: p.brick,
                omega: p.omega,
                position: p.position,
                color: p.color,
            })
        })
        .collect::<Result<Vec<_>, salfd_core::Error>>()?;
    let doc = PlanDoc { version: PLAN_VERSION, bounds: file.bounds.into(), tasks };
    let mut s = serde_json::to_string_pretty(&doc).expect("plan documents always serialize");
    s.push('\n');
    Ok(s)
}

/// Parses and validates a plan: schema, step numbering, and feasibility. An
/// assembly plan must replay from an empty workspace; a disassembly plan must
/// be the reversal of one.
pub fn parse(text: &str, catalog: &Catalog) -> Result<PlanFile, PlanFileError> {
    let doc: PlanDoc = serde_json::from_str(text).map_err(|e| PlanFileError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.version != PLAN_VERSION {
        return Err(PlanFileError::Version(doc.version));
    }
    let bounds = Bounds::from(doc.bounds);
    let mut tasks = Vec::with_capacity(doc.tasks.len());
    for (i, t) in doc.tasks.iter().enumerate() {
        let action = match t.action.as_str() {
            "assemble" => Action::Assemble,
            "disassemble" => Action::Disassemble,
            other => {
                return Err(PlanFileError::Field {
                    task: i + 1,
                    field: "action",
                    message: format!("expected \"assemble\" or \"disassemble\", got {other:?}"),
                })
            }
        };
        let p = PlacementDoc { brick: t.brick.clone(), omega: t.omega, position: t.position, color: t.color.clone() };
        tasks.push(Task { step: t.step, action, placement: p.to_placement(catalog, i + 1)? });
    }
    let plan = ConstructionPlan::from_tasks(tasks)?;
    check_feasible(&plan, catalog, bounds)?;
    Ok(PlanFile { bounds, plan })
}

fn check_feasible(plan: &ConstructionPlan, catalog: &Catalog, bounds: Bounds) -> Result<(), salfd_core::Error> {
    let empty = Assembly::new(catalog.clone(), bounds);
    let disassembly = !plan.is_empty() && plan.tasks().iter().all(|t| t.action == Action::Disassemble);
    if !disassembly {
        plan.replay(&empty)?;
        return Ok(());
    }
    let forward: Vec<BrickPlacement> = plan.placements().rev().copied().collect();
    ConstructionPlan::assembly(&forward).replay(&empty).map_err(|e| match e {
        salfd_core::Error::Infeasible { step, verdict } => {
            salfd_core::Error::Infeasible { step: plan.len() + 1 - step, verdict }
        }
        other => other,
    })?;
    Ok(())
}
