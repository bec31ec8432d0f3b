use alloc::string::String;

use crate::network::NodeId;

/// Errors produced by the routing core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(NodeId),
    #[error("no route from {from} to {to}")]
    NoRoute { from: NodeId, to: NodeId },
    #[error("way {way} references missing node {node}")]
    DanglingNode { way: i64, node: NodeId },
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("predecessor chain broken at vertex {0}")]
    BrokenChain(NodeId),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
