use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dnf::{DnfFormula, Term};
use crate::cube::CubePoint;
use crate::{Error, Result};

/// A decision-tree node. `minus` is followed when the tested coordinate is `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Node {
    Leaf(bool),
    Split { var: usize, minus: Box<Node>, plus: Box<Node> },
}

impl Node {
    pub fn leaf(label: bool) -> Self {
        Node::Leaf(label)
    }

    pub fn split(var: usize, minus: Node, plus: Node) -> Self {
        Node::Split { var, minus: Box::new(minus), plus: Box::new(plus) }
    }

    fn leaf_count(&self) -> usize {
        match self {
            Node::Leaf(_) => 1,
            Node::Split { minus, plus, .. } => minus.leaf_count() + plus.leaf_count(),
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Node::Leaf(_) => None,
            Node::Split { var, minus, plus } => {
                Some(*var).max(minus.max_var()).max(plus.max_var())
            }
        }
    }

    fn depth(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Split { minus, plus, .. } => 1 + minus.depth().max(plus.depth()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionTree {
    n: usize,
    root: Node,
}

impl DecisionTree {
    pub fn new(n: usize, root: Node) -> Result<Self> {
        if let Some(v) = root.max_var() {
            if v >= n {
                return Err(Error::CoordinateOutOfRange { index: v, dim: n });
            }
        }
        Ok(DecisionTree { n, root })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Number of leaves, the size measure of a tree.
    pub fn leaf_count(&self) -> usize {
        self.root.leaf_count()
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn eval(&self, x: &CubePoint) -> Result<bool> {
        x.check_dim(self.n)?;
        Ok(self.holds(x))
    }

    pub(crate) fn holds(&self, x: &CubePoint) -> bool {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf(label) => return *label,
                Node::Split { var, minus, plus } => {
                    node = if x.get(*var) { plus } else { minus };
                }
            }
        }
    }

    /// A random tree with at most `max_leaves` leaves; no variable repeats on a
    /// root-to-leaf path. Leaf labels are fair coin flips.
    pub fn random<R: Rng + ?Sized>(n: usize, max_leaves: usize, rng: &mut R) -> Self {
        fn grow<R: Rng + ?Sized>(
            node: &mut Node,
            path: &mut Vec<usize>,
            n: usize,
            rng: &mut R,
            budget: &mut usize,
        ) {
            if *budget == 0 || path.len() == n {
                return;
            }
            if let Node::Leaf(_) = node {
                // Split this leaf with probability decreasing in depth.
                if path.is_empty() || rng.random_range(0..path.len() + 2) < 2 {
                    let free: Vec<usize> = (0..n).filter(|v| !path.contains(v)).collect();
                    let var = free[rng.random_range(0..free.len())];
                    *node = Node::split(var, Node::Leaf(rng.random()), Node::Leaf(rng.random()));
                    *budget -= 1;
                }
            }
            if let Node::Split { var, minus, plus } = node {
                path.push(*var);
                if rng.random() {
                    grow(minus, path, n, rng, budget);
                    grow(plus, path, n, rng, budget);
                } else {
                    grow(plus, path, n, rng, budget);
                    grow(minus, path, n, rng, budget);
                }
                path.pop();
            }
        }

        let mut root = Node::Leaf(rng.random());
        let mut budget = max_leaves.saturating_sub(1);
        // Repeated passes let shallow leaves split further until the budget runs dry.
        for _ in 0..4 * max_leaves.max(1) {
            let before = budget;
            grow(&mut root, &mut Vec::new(), n, rng, &mut budget);
            if budget == 0 || (before == budget && rng.random_range(0..4) == 0) {
                break;
            }
        }
        DecisionTree { n, root }
    }
}

pub fn eval_tree(tree: &DecisionTree, x: &CubePoint) -> Result<bool> {
    tree.eval(x)
}

/// One term per 1-leaf, conjoining the literals along its root-to-leaf path.
///
/// A path that tests the same variable twice with opposite outcomes is
/// unreachable and contributes no term.
pub fn dnf_of_tree(tree: &DecisionTree) -> DnfFormula {
    fn walk(node: &Node, pos: &mut Vec<usize>, neg: &mut Vec<usize>, out: &mut Vec<Term>) {
        match node {
            Node::Leaf(true) => {
                if let Ok(t) = Term::new(pos.iter().copied(), neg.iter().copied()) {
                    out.push(t);
                }
            }
            Node::Leaf(false) => {}
            Node::Split { var, minus, plus } => {
                neg.push(*var);
                walk(minus, pos, neg, out);
                neg.pop();
                pos.push(*var);
                walk(plus, pos, neg, out);
                pos.pop();
            }
        }
    }
    let mut terms = Vec::new();
    walk(&tree.root, &mut Vec::new(), &mut Vec::new(), &mut terms);
    DnfFormula::new(tree.n, terms).expect("tree variables are within its dimension")
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::cube::enumerate_cube;
    use crate::rng;

    /// root x1: (+1) → 1; (-1) → x2: (+1) → 0, (-1) → 1
    pub(crate) fn example_tree() -> DecisionTree {
        DecisionTree::new(
            2,
            Node::split(0, Node::split(1, Node::leaf(true), Node::leaf(false)), Node::leaf(true)),
        )
        .unwrap()
    }

    #[test]
    fn trace_example_tree() {
        let t = example_tree();
        assert!(eval_tree(&t, &"--".parse().unwrap()).unwrap());
        assert!(!eval_tree(&t, &"-+".parse().unwrap()).unwrap());
        assert!(eval_tree(&t, &"+-".parse().unwrap()).unwrap());
        assert_eq!(t.leaf_count(), 3);
    }

    #[test]
    fn dnf_of_example_tree() {
        let f = dnf_of_tree(&example_tree());
        let expected = [Term::from_signed(&[-1, -2]).unwrap(), Term::from_signed(&[1]).unwrap()];
        assert_eq!(f.len(), 2);
        for t in expected {
            assert!(f.terms().contains(&t));
        }
    }

    #[test]
    fn dnf_of_degenerate_trees() {
        let zero = DecisionTree::new(3, Node::split(0, Node::leaf(false), Node::leaf(false))).unwrap();
        assert!(dnf_of_tree(&zero).is_empty());
        let one = DecisionTree::new(3, Node::leaf(true)).unwrap();
        assert_eq!(dnf_of_tree(&one).terms(), &[Term::empty()]);
    }

    #[test]
    fn tree_dnf_equivalence_on_random_trees() {
        let mut r = rng::stream(11);
        for case in 0..200 {
            let n = 1 + case % 12;
            let t = DecisionTree::random(n, 1 + case % 64, &mut r);
            assert!(t.leaf_count() <= 64);
            let f = dnf_of_tree(&t);
            assert!(f.len() <= t.leaf_count());
            for x in enumerate_cube(n).unwrap() {
                let sat = f.satisfied_terms(&x).unwrap();
                assert_eq!(t.holds(&x), !sat.is_empty());
                assert!(sat.len() <= 1, "positive points satisfy exactly one path term");
            }
        }
    }

    #[test]
    fn random_trees_respect_leaf_budget() {
        let mut r = rng::stream(3);
        let mut largest = 0;
        for _ in 0..100 {
            let t = DecisionTree::random(8, 16, &mut r);
            assert!(t.leaf_count() <= 16);
            largest = largest.max(t.leaf_count());
        }
        assert!(largest >= 8);
    }
}
