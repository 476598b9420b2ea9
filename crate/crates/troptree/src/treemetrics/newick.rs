//! Newick text for equidistant trees.
//!
//! The accepted grammar is the usual one — nested parentheses, labels,
//! mandatory `:length` on every non-root edge, terminating `;` — restricted
//! to trees this crate can represent: all root-to-leaf path sums must agree
//! (relative tolerance 1e−6), internal vertices other than the root must
//! have at least two children, and leaf labels must be unique.  Zero-length
//! internal edges are collapsed into multifurcations.  Leaves are numbered
//! 1..=N in sorted label order — numerically when every label is an
//! integer, lexicographically otherwise — so text round trips are stable
//! regardless of how subtrees are arranged.

use crate::error::{Error, Result};
use crate::topology::Clade;
use crate::treemetrics::{EquidistantTree, TreeChild};

/// Relative tolerance on root-to-leaf path sums.
const EQUIDISTANCE_RTOL: f64 = 1e-6;

struct RawNode {
    offset: usize,
    label: Option<String>,
    length: Option<f64>,
    children: Vec<RawNode>,
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self { text, pos: 0 }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::NewickSyntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, expected: char) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == expected => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected '{expected}', found '{c}'"))),
            None => Err(self.error(format!("expected '{expected}', found end of input"))),
        }
    }

    fn parse_node(&mut self) -> Result<RawNode> {
        self.skip_ws();
        let offset = self.pos;
        let mut node = if self.peek() == Some('(') {
            self.eat('(')?;
            let mut children = vec![self.parse_node()?];
            loop {
                self.skip_ws();
                match self.peek() {
                    Some(',') => {
                        self.eat(',')?;
                        children.push(self.parse_node()?);
                    }
                    Some(')') => {
                        self.eat(')')?;
                        break;
                    }
                    Some(c) => return Err(self.error(format!("expected ',' or ')', found '{c}'"))),
                    None => return Err(self.error("unclosed '('")),
                }
            }
            RawNode {
                offset,
                label: None,
                length: None,
                children,
            }
        } else {
            RawNode {
                offset,
                label: None,
                length: None,
                children: Vec::new(),
            }
        };
        // Optional label (required later for leaves), optional :length.
        if let Some(label) = self.parse_label() {
            node.label = Some(label);
        }
        self.skip_ws();
        if self.peek() == Some(':') {
            self.eat(':')?;
            node.length = Some(self.parse_number()?);
        }
        Ok(node)
    }

    fn parse_label(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || matches!(c, '(' | ')' | ',' | ':' | ';') {
                break;
            }
            self.pos += c.len_utf8();
        }
        if self.pos > start {
            Some(self.text[start..self.pos].to_string())
        } else {
            None
        }
    }

    fn parse_number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E') {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.error("expected a branch length"));
        }
        self.text[start..self.pos]
            .parse::<f64>()
            .map_err(|e| self.error(format!("bad branch length: {e}")))
    }
}

/// Parses a single Newick expression into an equidistant tree.
pub fn parse_newick(text: &str) -> Result<EquidistantTree> {
    let mut parser = Parser::new(text);
    let root = parser.parse_node()?;
    parser.eat(';')?;
    parser.skip_ws();
    if parser.pos != text.len() {
        return Err(parser.error("trailing input after ';'"));
    }

    if root.children.is_empty() {
        return Err(Error::NewickSyntax {
            offset: 0,
            message: "a single leaf is not a tree".into(),
        });
    }
    if let Some(length) = root.length {
        if length != 0.0 {
            return Err(Error::NewickSyntax {
                offset: 0,
                message: "a root edge with nonzero length is not supported".into(),
            });
        }
    }

    // Pass 1: leaf labels in appearance order, with duplicate detection.
    let mut labels: Vec<String> = Vec::new();
    gather_labels(&root, &mut labels)?;
    let n = labels.len();
    if n < 2 {
        return Err(Error::TooFewLeaves(n));
    }

    // Indices follow sorted label order, numeric when every label is one,
    // so text round trips are independent of subtree arrangement.
    if labels.iter().all(|l| l.parse::<u64>().is_ok()) {
        labels.sort_by_key(|l| l.parse::<u64>().expect("checked numeric"));
    } else {
        labels.sort();
    }
    let id_of = |label: &str| labels.iter().position(|l| l == label).unwrap() + 1;

    // Pass 2: depths and clades in terms of the assigned leaf ids.
    let mut depths: Vec<f64> = vec![0.0; n];
    let mut internal_edges: Vec<(Clade, f64)> = Vec::new();
    collect(&root, 0.0, true, &id_of, &mut depths, &mut internal_edges)?;

    let height = depths[0];
    let slack = EQUIDISTANCE_RTOL * height.abs().max(1.0);
    for (k, &depth) in depths.iter().enumerate() {
        if (depth - height).abs() > slack {
            return Err(Error::NotEquidistant {
                leaf: k + 1,
                got: depth,
                expected: height,
            });
        }
    }
    EquidistantTree::new(labels, internal_edges, height)
}

fn gather_labels(node: &RawNode, labels: &mut Vec<String>) -> Result<()> {
    if node.children.is_empty() {
        let label = node.label.clone().ok_or(Error::NewickSyntax {
            offset: node.offset,
            message: "leaf without a label".into(),
        })?;
        if labels.contains(&label) {
            return Err(Error::DuplicateLeafLabel(label));
        }
        labels.push(label);
        return Ok(());
    }
    for child in &node.children {
        gather_labels(child, labels)?;
    }
    Ok(())
}

/// Walks the raw parse, recording leaf depths and clade edges.
fn collect(
    node: &RawNode,
    depth: f64,
    is_root: bool,
    id_of: &impl Fn(&str) -> usize,
    depths: &mut [f64],
    internal_edges: &mut Vec<(Clade, f64)>,
) -> Result<Vec<usize>> {
    if node.children.is_empty() {
        let label = node.label.as_deref().expect("checked in pass 1");
        let length = node.length.ok_or(Error::NewickSyntax {
            offset: node.offset,
            message: format!("leaf {label:?} has no branch length"),
        })?;
        if length < 0.0 {
            return Err(Error::NewickSyntax {
                offset: node.offset,
                message: format!("leaf {label:?} has a negative branch length"),
            });
        }
        let id = id_of(label);
        depths[id - 1] = depth + length;
        return Ok(vec![id]);
    }

    if node.children.len() < 2 {
        return Err(Error::NewickSyntax {
            offset: node.offset,
            message: "internal vertex of degree 2 (single child)".into(),
        });
    }
    let length = if is_root {
        0.0
    } else {
        let length = node.length.ok_or(Error::NewickSyntax {
            offset: node.offset,
            message: "internal edge has no branch length".into(),
        })?;
        if length < 0.0 {
            return Err(Error::NewickSyntax {
                offset: node.offset,
                message: "internal edge has a negative branch length".into(),
            });
        }
        length
    };

    let mut leaves = Vec::new();
    for child in &node.children {
        leaves.extend(collect(
            child,
            depth + length,
            false,
            id_of,
            depths,
            internal_edges,
        )?);
    }
    // Zero-length internal edges collapse into a multifurcation.
    if !is_root && length > 0.0 {
        internal_edges.push((Clade::new(leaves.clone()), length));
    }
    Ok(leaves)
}

/// Renders a tree as Newick text, children ordered by their smallest leaf,
/// terminated by `;`.  Branch lengths print with six decimals when that is
/// exact, and otherwise with however many digits the value needs, so the
/// text always parses back to the same tree.
pub fn write_newick(tree: &EquidistantTree) -> String {
    let mut out = String::new();
    render(tree, None, &mut out);
    out.push(';');
    out
}

fn format_length(length: f64) -> String {
    let fixed = format!("{length:.6}");
    if fixed.parse::<f64>() == Ok(length) {
        fixed
    } else {
        format!("{length}")
    }
}

fn render(tree: &EquidistantTree, of: Option<&Clade>, out: &mut String) {
    out.push('(');
    for (k, child) in tree.children(of).iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        match child {
            TreeChild::Leaf(leaf) => {
                out.push_str(&tree.leaf_labels()[leaf - 1]);
                out.push(':');
                out.push_str(&format_length(tree.external_edge(*leaf)));
            }
            TreeChild::Internal(clade) => {
                render(tree, Some(clade), out);
                out.push(':');
                out.push_str(&format_length(tree.internal_edges()[clade]));
            }
        }
    }
    out.push(')');
}
