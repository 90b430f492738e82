#pragma once

#include "smoothdt/subset.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smoothdt {

/// A Boolean decision tree over {-1,1}^n: internal nodes split on a
/// variable, leaves carry a label of +1 or -1. Nodes live in a flat pool
/// with the root at slot 0. Trees are immutable once built, so read-only
/// evaluation from many threads is safe.
///
/// Invariants enforced at construction:
///   - every split variable is in [1, n]
///   - no variable repeats on any root-to-leaf path
///   - every leaf value is +1 or -1
class DecisionTree {
public:
    struct Node {
        int var = 0;           // 1-indexed split variable; 0 marks a leaf
        std::int32_t neg = -1; // child followed when x_var = -1
        std::int32_t pos = -1; // child followed when x_var = +1
        int value = 0;         // leaf label
        bool is_leaf() const { return var == 0; }
    };

    /// Constant tree: a single leaf over n variables.
    static DecisionTree leaf(int n, int value);
    /// Builds from an explicit node pool after validating all invariants.
    static DecisionTree from_nodes(int n, std::vector<Node> nodes);

    int n() const { return n_; }
    const std::vector<Node>& nodes() const { return nodes_; }

    int size() const;  // number of leaves
    int depth() const; // longest root-to-leaf edge count; the root is depth 0

    /// Walks the split path; x must have exactly n entries in {-1,+1}.
    int evaluate(std::span<const std::int8_t> x) const;
    /// Same value through the weighted recursion
    /// f = (1/2 + x_i/2) f_pos + (1/2 - x_i/2) f_neg at every internal node.
    double evaluate_recursive(std::span<const std::int8_t> x) const;

    /// Variables appearing anywhere in the tree.
    SubsetIndex support() const;

private:
    DecisionTree() = default;
    int n_ = 1;
    std::vector<Node> nodes_;
};

/// The source tree with every internal node at depth d replaced by a
/// 0-valued leaf. Evaluates to 0 exactly when evaluation of the source
/// tree would continue past depth d; ranges over {-1,0,+1}, which is why
/// this is a separate evaluable object and not a DecisionTree.
class TruncatedTree {
public:
    TruncatedTree(DecisionTree tree, int cut_depth);
    int evaluate(std::span<const std::int8_t> x) const;
    int cut_depth() const { return cut_; }
    const DecisionTree& tree() const { return tree_; }

private:
    DecisionTree tree_;
    int cut_;
};

/// Grows a tree with exactly target_size leaves by repeatedly splitting a
/// uniformly random expandable leaf on a uniformly random variable unused
/// on that leaf's path. Requires 1 <= target_size <= 2^n.
DecisionTree random_tree(int n, int target_size, std::mt19937_64& rng);

/// The canonical size-2^|vars| tree computing prod_{i in vars} x_i.
DecisionTree parity_tree(SubsetIndex vars, int n);

/// Throws std::invalid_argument describing the first violated invariant.
void validate_tree(int n, const std::vector<DecisionTree::Node>& nodes);

/// S-expression text format:
///   "(leaf +1)" | "(leaf -1)" | "(node <i> <neg-subtree> <pos-subtree>)"
/// Parsing is whitespace-insensitive; serialization uses single spaces.
/// If n == 0 the variable count is inferred as the largest index used
/// (minimum 1); otherwise indices are validated against n.
DecisionTree parse_tree(std::string_view text, int n = 0);
std::string serialize_tree(const DecisionTree& t);

} // namespace smoothdt
