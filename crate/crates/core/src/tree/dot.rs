use std::fmt::Write;

use super::{LeafKind, TreePresentation};

impl TreePresentation {
    /// Graphviz rendering. Nodes show their exact level and approximate
    /// depth; edges into RAY leaves end in an arrowhead.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tree {\n  rankdir=TB;\n  node [shape=circle, fontsize=10];\n");
        for n in self.nodes() {
            let name = match n.label() {
                Some(l) => format!("{} {}", n.id().0, l),
                None => n.id().0.to_string(),
            };
            let shape = match n.kind() {
                Some(LeafKind::Ray) => ", shape=none",
                Some(LeafKind::Tip) => ", shape=box",
                None => "",
            };
            let _ = writeln!(
                out,
                "  n{} [label=\"{}\\nu={}\\nt={:.4}\"{}];",
                n.id().0,
                name.replace('"', "\\\""),
                n.level(),
                n.level().depth(),
                shape
            );
        }
        for i in self.preorder_indices() {
            let parent = self.node_at(i).id();
            for &c in self.children_idx(i) {
                let child = self.node_at(c);
                let style = if child.kind() == Some(LeafKind::Ray) {
                    "arrowhead=normal"
                } else {
                    "arrowhead=none"
                };
                let _ = writeln!(out, "  n{} -> n{} [{}];", parent.0, child.id().0, style);
            }
        }
        out.push_str("}\n");
        out
    }
}
