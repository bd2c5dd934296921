//! Node tag conventions.
//!
//! Tags are dot-separated: `<flow>.<block>[.<role>]`, e.g.
//! `entry_flow.block2`, `middle_flow.block7.squeeze`,
//! `exit_flow.block13.shortcut`. The first two segments identify a module;
//! the optional third names the node's role inside it. Single-segment tags
//! such as `head` belong to no module.

use std::fmt;

pub const ENTRY_FLOW: &str = "entry_flow";
pub const MIDDLE_FLOW: &str = "middle_flow";
pub const EXIT_FLOW: &str = "exit_flow";
pub const HEAD: &str = "head";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Squeeze,
    Expand1,
    Expand3,
    Shortcut,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Squeeze => "squeeze",
            Role::Expand1 => "expand1",
            Role::Expand3 => "expand3",
            Role::Shortcut => "shortcut",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "squeeze" => Some(Role::Squeeze),
            "expand1" => Some(Role::Expand1),
            "expand3" => Some(Role::Expand3),
            "shortcut" => Some(Role::Shortcut),
            _ => None,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `<flow>.<block>` prefix of a tag, if it has one.
pub fn module_key(tag: &str) -> Option<&str> {
    let mut dots = tag.match_indices('.').map(|(i, _)| i);
    let first = dots.next()?;
    if first == 0 || first + 1 == tag.len() {
        return None;
    }
    Some(match dots.next() {
        Some(second) => &tag[..second],
        None => tag,
    })
}

pub fn role(tag: &str) -> Option<Role> {
    let mut parts = tag.splitn(3, '.');
    parts.next()?;
    parts.next()?;
    Role::parse(parts.next()?)
}

pub fn flow(tag: &str) -> &str {
    tag.split('.').next().unwrap_or(tag)
}

/// Short block name of a module key, used as an id prefix.
pub fn block_name(module_key: &str) -> &str {
    module_key.rsplit('.').next().unwrap_or(module_key)
}

pub fn module_tag(flow: &str, block: &str) -> String {
    format!("{flow}.{block}")
}

pub fn role_tag(module_key: &str, role: Role) -> String {
    format!("{module_key}.{role}")
}
