use crate::engine::TreeStats;
use crate::node::{BnbNode, NodeId};

/// Read-only view of the open list handed to a selector. `ordered` is sorted
/// best-first under the plugged comparator (FIFO among equals).
pub struct SelectView<'a> {
    pub ordered: &'a [NodeId],
    pub arena: &'a [BnbNode],
    pub tree: &'a TreeStats,
    pub last_focused: Option<&'a BnbNode>,
}

impl SelectView<'_> {
    pub fn node(&self, id: NodeId) -> &BnbNode {
        &self.arena[id]
    }
}

/// Node-selection policy: picks which open node to focus next. The view's
/// list is nonempty by contract.
pub trait NodeSelector {
    fn select(&mut self, view: &SelectView<'_>) -> NodeId;
}

/// Always takes the highest-ranked open node.
pub struct PlainSelector;

impl NodeSelector for PlainSelector {
    fn select(&mut self, view: &SelectView<'_>) -> NodeId {
        *view.ordered.first().expect("open list is nonempty")
    }
}

/// Diving selector in the style of solver defaults: prefer the
/// highest-ranked open child of the last focused node, then a sibling, then
/// the best node overall.
pub struct ScipLikeSelector;

impl NodeSelector for ScipLikeSelector {
    fn select(&mut self, view: &SelectView<'_>) -> NodeId {
        if let Some(focused) = view.last_focused {
            let child = view
                .ordered
                .iter()
                .find(|&&id| view.node(id).parent == Some(focused.id));
            if let Some(&id) = child {
                return id;
            }
            if focused.parent.is_some() {
                let sibling = view
                    .ordered
                    .iter()
                    .find(|&&id| view.node(id).parent == focused.parent);
                if let Some(&id) = sibling {
                    return id;
                }
            }
        }
        *view.ordered.first().expect("open list is nonempty")
    }
}

/// Follows the plugged comparator's ranking until two incumbents have been
/// found, then switches to plain best-estimate selection.
pub struct HybridSelector;

impl NodeSelector for HybridSelector {
    fn select(&mut self, view: &SelectView<'_>) -> NodeId {
        if view.tree.incumbent_count < 2 {
            return *view.ordered.first().expect("open list is nonempty");
        }
        // Lowest estimate wins; FIFO (lowest id) among exact ties.
        let mut best = view.ordered[0];
        for &id in &view.ordered[1..] {
            let (n, b) = (view.node(id), view.node(best));
            if n.estimate < b.estimate || (n.estimate == b.estimate && id < best) {
                best = id;
            }
        }
        best
    }
}
