//! Behavior-tree tick engine.
//!
//! Composites come in two flavours. A plain Sequence/Fallback remembers the
//! child that returned `Running` and resumes there on the next tick. A
//! recursive one restarts from its first child on every tick.
//!
//! Conditions and leaves are resolved by name through a [`TickHandler`], which
//! keeps the engine free of any domain logic.

mod zest;

pub use zest::{build_zest_tree, leaf_names, Blackboard, LatchedEncounter, ZestLeaf};

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeStatus {
    Success,
    Failure,
    Running,
}

impl fmt::Display for NodeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeStatus::Success => "SUCCESS",
            NodeStatus::Failure => "FAILURE",
            NodeStatus::Running => "RUNNING",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BtNode {
    Root(Box<BtNode>),
    Sequence {
        children: Vec<BtNode>,
        recursive: bool,
        resume_index: usize,
    },
    Fallback {
        children: Vec<BtNode>,
        recursive: bool,
        resume_index: usize,
    },
    Condition(String),
    Leaf(String),
}

impl BtNode {
    pub fn root(child: BtNode) -> Self {
        BtNode::Root(Box::new(child))
    }

    pub fn sequence(children: Vec<BtNode>) -> Self {
        BtNode::Sequence {
            children,
            recursive: false,
            resume_index: 0,
        }
    }

    pub fn recursive_sequence(children: Vec<BtNode>) -> Self {
        BtNode::Sequence {
            children,
            recursive: true,
            resume_index: 0,
        }
    }

    pub fn fallback(children: Vec<BtNode>) -> Self {
        BtNode::Fallback {
            children,
            recursive: false,
            resume_index: 0,
        }
    }

    pub fn recursive_fallback(children: Vec<BtNode>) -> Self {
        BtNode::Fallback {
            children,
            recursive: true,
            resume_index: 0,
        }
    }

    pub fn condition(name: impl Into<String>) -> Self {
        BtNode::Condition(name.into())
    }

    pub fn leaf(name: impl Into<String>) -> Self {
        BtNode::Leaf(name.into())
    }

    /// Short label used in tick dumps.
    pub fn label(&self) -> String {
        match self {
            BtNode::Root(_) => "Root".into(),
            BtNode::Sequence { recursive, .. } => if *recursive { "R->" } else { "->" }.into(),
            BtNode::Fallback { recursive, .. } => if *recursive { "R?" } else { "?" }.into(),
            BtNode::Condition(n) | BtNode::Leaf(n) => n.clone(),
        }
    }

    /// Checks arity and cursor invariants for the whole subtree.
    pub fn validate(&self) -> Result<()> {
        match self {
            BtNode::Root(child) => {
                if matches!(**child, BtNode::Root(_)) {
                    return Err(Error::InvalidTree("nested root".into()));
                }
                child.validate()
            }
            BtNode::Sequence {
                children,
                resume_index,
                ..
            }
            | BtNode::Fallback {
                children,
                resume_index,
                ..
            } => {
                if children.is_empty() {
                    return Err(Error::InvalidTree("composite without children".into()));
                }
                if *resume_index >= children.len() {
                    return Err(Error::InvalidTree("resume index out of range".into()));
                }
                for c in children {
                    if matches!(c, BtNode::Root(_)) {
                        return Err(Error::InvalidTree("root below the top level".into()));
                    }
                    c.validate()?;
                }
                Ok(())
            }
            BtNode::Condition(name) | BtNode::Leaf(name) => {
                if name.is_empty() {
                    Err(Error::InvalidTree("unnamed node".into()))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Domain side of the engine.
pub trait TickHandler {
    /// Conditions only read.
    fn condition(&self, name: &str) -> Result<bool>;
    fn action(&mut self, name: &str) -> Result<NodeStatus>;
    /// Called after every node tick, innermost first.
    fn observe(&mut self, _node: &BtNode, _status: NodeStatus) {}
}

pub fn tick<H: TickHandler + ?Sized>(node: &mut BtNode, handler: &mut H) -> Result<NodeStatus> {
    let status = match node {
        BtNode::Root(child) => tick(child, handler)?,
        BtNode::Sequence {
            children,
            recursive,
            resume_index,
        } => tick_composite(
            children,
            *recursive,
            resume_index,
            NodeStatus::Success,
            handler,
        )?,
        BtNode::Fallback {
            children,
            recursive,
            resume_index,
        } => tick_composite(
            children,
            *recursive,
            resume_index,
            NodeStatus::Failure,
            handler,
        )?,
        BtNode::Condition(name) => {
            if handler.condition(name)? {
                NodeStatus::Success
            } else {
                NodeStatus::Failure
            }
        }
        BtNode::Leaf(name) => handler.action(name)?,
    };
    handler.observe(node, status);
    Ok(status)
}

/// Shared loop for Sequence (`pass = Success`) and Fallback (`pass = Failure`):
/// children returning `pass` hand over to the next child, anything else ends
/// the tick with that status.
fn tick_composite<H: TickHandler + ?Sized>(
    children: &mut [BtNode],
    recursive: bool,
    resume_index: &mut usize,
    pass: NodeStatus,
    handler: &mut H,
) -> Result<NodeStatus> {
    if children.is_empty() {
        return Err(Error::InvalidTree("composite without children".into()));
    }
    let start = if recursive { 0 } else { *resume_index };
    if start >= children.len() {
        return Err(Error::InvalidTree("resume index out of range".into()));
    }
    for (i, child) in children.iter_mut().enumerate().skip(start) {
        let status = tick(child, handler)?;
        if status == pass {
            continue;
        }
        *resume_index = if status == NodeStatus::Running && !recursive {
            i
        } else {
            0
        };
        return Ok(status);
    }
    *resume_index = 0;
    Ok(pass)
}
