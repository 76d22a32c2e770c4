//! JSON set descriptors.
//!
//! ```json
//! {"system": {"rule": "constant", "params": {"radix": 3}},
//!  "set": {"kind": "product", "levels": [], "tail": {"periodic": [{"only": [0, 2]}]}}}
//! ```
//!
//! `kind` is one of `product`, `union` (`members`), `reflect` (`member`) or
//! `named` (`id`, e.g. `"cl(0)"`). The system may be omitted when the set is
//! named.

use serde::{Deserialize, Serialize};

use crate::constructions::make_from_id;
use crate::digits::{DigitSetExpr, FamilyKind, LevelConstraint, TailRule};
use crate::error::{Error, Result};
use crate::numeric::MixedRadixSystem;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetNode {
    Product {
        #[serde(default)]
        levels: Vec<LevelConstraint>,
        tail: TailRule,
    },
    Union {
        members: Vec<SetNode>,
    },
    Reflect {
        member: Box<SetNode>,
    },
    Named {
        id: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<MixedRadixSystem>,
    pub set: SetNode,
}

impl SetDescriptor {
    pub fn named(id: &str) -> Self {
        SetDescriptor { system: None, set: SetNode::Named { id: id.to_string() } }
    }

    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }

    pub fn build(&self) -> Result<DigitSetExpr> {
        let expr = build_node(&self.set, self.system.as_ref())?;
        if let Some(sys) = &self.system {
            if !sys.same_radices(expr.system()) {
                return Err(Error::SystemMismatch);
            }
        }
        Ok(expr)
    }

    /// Descriptor for an expression; family nodes become named sets.
    pub fn from_expr(expr: &DigitSetExpr) -> Self {
        SetDescriptor { system: Some(expr.system().clone()), set: node_of(expr) }
    }
}

fn build_node(node: &SetNode, system: Option<&MixedRadixSystem>) -> Result<DigitSetExpr> {
    match node {
        SetNode::Product { levels, tail } => {
            let system = system.ok_or_else(|| Error::Parse("a product set needs a system".into()))?.clone();
            DigitSetExpr::product(system, levels.clone(), tail.clone())
        }
        SetNode::Union { members } => {
            DigitSetExpr::union_of(members.iter().map(|m| build_node(m, system)).collect::<Result<_>>()?)
        }
        SetNode::Reflect { member } => Ok(build_node(member, system)?.reflect()),
        SetNode::Named { id } => Ok(make_from_id(id)?.expr),
    }
}

fn node_of(expr: &DigitSetExpr) -> SetNode {
    match expr {
        DigitSetExpr::Product { levels, tail, .. } => SetNode::Product { levels: levels.clone(), tail: tail.clone() },
        DigitSetExpr::Union { members, .. } => SetNode::Union { members: members.iter().map(node_of).collect() },
        DigitSetExpr::Reflect(inner) => SetNode::Reflect { member: Box::new(node_of(inner)) },
        DigitSetExpr::Family { kind, min_escape, .. } => {
            let name = match kind {
                FamilyKind::X => "notideal_X",
                FamilyKind::A => "notideal_A",
                FamilyKind::B => "notideal_B",
            };
            let id = if *min_escape == 0 { name.to_string() } else { format!("{name}({min_escape})") };
            SetNode::Named { id }
        }
    }
}
