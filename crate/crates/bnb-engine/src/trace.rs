use serde::Serialize;

use crate::node::NodeId;

/// One line of the JSON-lines solve trace.
#[derive(Debug, Serialize)]
pub struct TraceEvent<'a> {
    pub event: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<NodeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent: Option<NodeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<f64>,
    /// For `comp` events: the ids compared and the decision acted upon.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first: Option<NodeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second: Option<NodeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub action: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ordinal: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
}

impl<'a> TraceEvent<'a> {
    pub fn new(event: &'a str) -> Self {
        Self {
            event,
            node: None,
            parent: None,
            depth: None,
            bound: None,
            estimate: None,
            first: None,
            second: None,
            action: None,
            ordinal: None,
            objective: None,
        }
    }
}

pub(crate) fn emit(sink: &mut Option<&mut dyn std::io::Write>, event: &TraceEvent<'_>) {
    if let Some(w) = sink.as_deref_mut() {
        // Trace output is best-effort diagnostics; serialization of these
        // plain structs cannot fail.
        let line = serde_json::to_string(event).expect("trace events serialize");
        let _ = writeln!(w, "{line}");
    }
}
