#include "smoothdt/tree.hpp"

#include "smoothdt/rng.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <stdexcept>
#include <utility>

namespace smoothdt {

namespace {

void check_n(int n) {
    if (n < 1 || n > 64)
        throw std::invalid_argument("DecisionTree: n must be in [1, 64]");
}

} // namespace

DecisionTree DecisionTree::leaf(int n, int value) {
    check_n(n);
    if (value != 1 && value != -1)
        throw std::invalid_argument("DecisionTree: leaf value must be +1 or -1");
    DecisionTree t;
    t.n_ = n;
    Node node;
    node.value = value;
    t.nodes_.push_back(node);
    return t;
}

DecisionTree DecisionTree::from_nodes(int n, std::vector<Node> nodes) {
    check_n(n);
    validate_tree(n, nodes);
    DecisionTree t;
    t.n_ = n;
    t.nodes_ = std::move(nodes);
    return t;
}

void validate_tree(int n, const std::vector<DecisionTree::Node>& nodes) {
    if (nodes.empty()) throw std::invalid_argument("tree: empty node pool");
    const auto sz = static_cast<std::int32_t>(nodes.size());
    std::vector<char> seen(nodes.size(), 0);
    // DFS from the root carrying the set of variables used on the path.
    struct Item {
        std::int32_t idx;
        std::uint64_t used;
    };
    std::vector<Item> stack{{0, 0}};
    std::size_t visited = 0;
    while (!stack.empty()) {
        auto [idx, used] = stack.back();
        stack.pop_back();
        if (idx < 0 || idx >= sz)
            throw std::invalid_argument("tree: child index out of range");
        if (seen[static_cast<std::size_t>(idx)])
            throw std::invalid_argument("tree: node reached twice");
        seen[static_cast<std::size_t>(idx)] = 1;
        ++visited;
        const auto& node = nodes[static_cast<std::size_t>(idx)];
        if (node.is_leaf()) {
            if (node.value != 1 && node.value != -1)
                throw std::invalid_argument("tree: leaf value must be +1 or -1");
            if (node.neg != -1 || node.pos != -1)
                throw std::invalid_argument("tree: leaf with children");
            continue;
        }
        if (node.var < 1 || node.var > n)
            throw std::invalid_argument("tree: variable index out of range");
        const std::uint64_t bit = 1ull << (node.var - 1);
        if (used & bit)
            throw std::invalid_argument("tree: variable repeats on a path");
        if (node.neg < 0 || node.pos < 0)
            throw std::invalid_argument("tree: internal node missing a child");
        stack.push_back({node.neg, used | bit});
        stack.push_back({node.pos, used | bit});
    }
    if (visited != nodes.size())
        throw std::invalid_argument("tree: unreachable nodes in pool");
}

int DecisionTree::size() const {
    int leaves = 0;
    for (const auto& node : nodes_)
        if (node.is_leaf()) ++leaves;
    return leaves;
}

int DecisionTree::depth() const {
    struct Item {
        std::int32_t idx;
        int depth;
    };
    std::vector<Item> stack{{0, 0}};
    int best = 0;
    while (!stack.empty()) {
        auto [idx, d] = stack.back();
        stack.pop_back();
        const auto& node = nodes_[static_cast<std::size_t>(idx)];
        if (node.is_leaf()) {
            best = std::max(best, d);
            continue;
        }
        stack.push_back({node.neg, d + 1});
        stack.push_back({node.pos, d + 1});
    }
    return best;
}

int DecisionTree::evaluate(std::span<const std::int8_t> x) const {
    if (static_cast<int>(x.size()) != n_)
        throw std::invalid_argument("evaluate: point dimension mismatch");
    const Node* node = &nodes_[0];
    while (!node->is_leaf()) {
        const std::int32_t next =
            x[static_cast<std::size_t>(node->var - 1)] > 0 ? node->pos
                                                           : node->neg;
        node = &nodes_[static_cast<std::size_t>(next)];
    }
    return node->value;
}

double DecisionTree::evaluate_recursive(std::span<const std::int8_t> x) const {
    if (static_cast<int>(x.size()) != n_)
        throw std::invalid_argument("evaluate: point dimension mismatch");
    // Recursion via explicit lambda; kept separate from evaluate() so tests
    // can compare the two routes.
    auto rec = [&](auto&& self, std::int32_t idx) -> double {
        const auto& node = nodes_[static_cast<std::size_t>(idx)];
        if (node.is_leaf()) return node.value;
        const double xi = x[static_cast<std::size_t>(node.var - 1)];
        return (0.5 + xi / 2.0) * self(self, node.pos) +
               (0.5 - xi / 2.0) * self(self, node.neg);
    };
    return rec(rec, 0);
}

SubsetIndex DecisionTree::support() const {
    SubsetIndex s;
    for (const auto& node : nodes_)
        if (!node.is_leaf()) s = s.with(node.var);
    return s;
}

TruncatedTree::TruncatedTree(DecisionTree tree, int cut_depth)
    : tree_(std::move(tree)), cut_(cut_depth) {
    if (cut_ < 0) throw std::invalid_argument("truncate: depth must be >= 0");
}

int TruncatedTree::evaluate(std::span<const std::int8_t> x) const {
    if (static_cast<int>(x.size()) != tree_.n())
        throw std::invalid_argument("evaluate: point dimension mismatch");
    const auto& nodes = tree_.nodes();
    const DecisionTree::Node* node = &nodes[0];
    int depth = 0;
    while (!node->is_leaf()) {
        if (depth == cut_) return 0;
        const std::int32_t next =
            x[static_cast<std::size_t>(node->var - 1)] > 0 ? node->pos
                                                           : node->neg;
        node = &nodes[static_cast<std::size_t>(next)];
        ++depth;
    }
    return node->value;
}

DecisionTree random_tree(int n, int target_size, std::mt19937_64& rng) {
    check_n(n);
    if (target_size < 1)
        throw std::invalid_argument("random_tree: target_size must be >= 1");
    if (n < 63 && static_cast<std::uint64_t>(target_size) > (1ull << n))
        throw std::invalid_argument("random_tree: target_size exceeds 2^n");

    std::vector<DecisionTree::Node> nodes;
    nodes.reserve(static_cast<std::size_t>(2 * target_size));
    DecisionTree::Node root;
    root.value = random_sign(rng);
    nodes.push_back(root);

    struct Expandable {
        std::int32_t idx;
        std::uint64_t used; // variables on the path to this leaf
    };
    std::vector<Expandable> open;
    if (n > 0) open.push_back({0, 0});

    int leaves = 1;
    while (leaves < target_size) {
        // Feasibility guarantees an expandable leaf exists: a tree whose
        // every leaf sits at depth n has exactly 2^n leaves.
        const std::size_t pick =
            uniform_below(rng, static_cast<std::uint64_t>(open.size()));
        const Expandable ex = open[pick];
        open[pick] = open.back();
        open.pop_back();

        const int unused = n - std::popcount(ex.used);
        int skip = static_cast<int>(
            uniform_below(rng, static_cast<std::uint64_t>(unused)));
        int var = 0;
        for (int i = 1; i <= n; ++i) {
            if (ex.used & (1ull << (i - 1))) continue;
            if (skip-- == 0) {
                var = i;
                break;
            }
        }

        DecisionTree::Node neg_leaf, pos_leaf;
        neg_leaf.value = random_sign(rng);
        pos_leaf.value = random_sign(rng);
        const auto neg_idx = static_cast<std::int32_t>(nodes.size());
        nodes.push_back(neg_leaf);
        const auto pos_idx = static_cast<std::int32_t>(nodes.size());
        nodes.push_back(pos_leaf);

        auto& parent = nodes[static_cast<std::size_t>(ex.idx)];
        parent.var = var;
        parent.value = 0;
        parent.neg = neg_idx;
        parent.pos = pos_idx;

        const std::uint64_t used = ex.used | (1ull << (var - 1));
        if (std::popcount(used) < n) {
            open.push_back({neg_idx, used});
            open.push_back({pos_idx, used});
        }
        ++leaves;
    }
    return DecisionTree::from_nodes(n, std::move(nodes));
}

DecisionTree parity_tree(SubsetIndex vars, int n) {
    check_n(n);
    if (vars.empty())
        throw std::invalid_argument("parity_tree: variable set is empty");
    if (vars.max_var() > n)
        throw std::invalid_argument("parity_tree: variable index exceeds n");

    const std::vector<int> order = vars.vars();
    std::vector<DecisionTree::Node> nodes;
    auto build = [&](auto&& self, std::size_t k, int sign) -> std::int32_t {
        DecisionTree::Node node;
        const auto idx = static_cast<std::int32_t>(nodes.size());
        nodes.push_back(node);
        if (k == order.size()) {
            nodes[static_cast<std::size_t>(idx)].value = sign;
            return idx;
        }
        nodes[static_cast<std::size_t>(idx)].var = order[k];
        const std::int32_t neg = self(self, k + 1, -sign);
        const std::int32_t pos = self(self, k + 1, sign);
        nodes[static_cast<std::size_t>(idx)].neg = neg;
        nodes[static_cast<std::size_t>(idx)].pos = pos;
        return idx;
    };
    build(build, 0, 1);
    return DecisionTree::from_nodes(n, std::move(nodes));
}

namespace {

struct Parser {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw std::runtime_error("parse_tree: " + what + " at offset " +
                                 std::to_string(pos));
    }
    void expect(char ch) {
        skip_ws();
        if (pos >= text.size() || text[pos] != ch)
            fail(std::string("expected '") + ch + "'");
        ++pos;
    }
    std::string_view token() {
        skip_ws();
        const std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
               text[pos] != '(' && text[pos] != ')')
            ++pos;
        if (pos == start) fail("expected a token");
        return text.substr(start, pos - start);
    }

    std::int32_t parse_node(std::vector<DecisionTree::Node>& nodes) {
        expect('(');
        const std::string_view kind = token();
        const auto idx = static_cast<std::int32_t>(nodes.size());
        nodes.emplace_back();
        if (kind == "leaf") {
            const std::string_view val = token();
            if (val == "+1")
                nodes[static_cast<std::size_t>(idx)].value = 1;
            else if (val == "-1")
                nodes[static_cast<std::size_t>(idx)].value = -1;
            else
                fail("leaf value must be +1 or -1");
        } else if (kind == "node") {
            const std::string_view num = token();
            int var = 0;
            auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), var);
            if (ec != std::errc() || p != num.data() + num.size() || var < 1)
                fail("bad variable index '" + std::string(num) + "'");
            nodes[static_cast<std::size_t>(idx)].var = var;
            const std::int32_t neg = parse_node(nodes);
            const std::int32_t pos_child = parse_node(nodes);
            nodes[static_cast<std::size_t>(idx)].neg = neg;
            nodes[static_cast<std::size_t>(idx)].pos = pos_child;
        } else {
            fail("expected 'leaf' or 'node'");
        }
        expect(')');
        return idx;
    }
};

} // namespace

DecisionTree parse_tree(std::string_view text, int n) {
    Parser parser{text};
    std::vector<DecisionTree::Node> nodes;
    parser.parse_node(nodes);
    parser.skip_ws();
    if (parser.pos != text.size())
        parser.fail("trailing input after tree");
    int max_var = 0;
    for (const auto& node : nodes) max_var = std::max(max_var, node.var);
    if (n == 0) n = std::max(max_var, 1);
    // from_nodes re-validates variable range and path distinctness.
    return DecisionTree::from_nodes(n, std::move(nodes));
}

std::string serialize_tree(const DecisionTree& t) {
    std::string out;
    auto rec = [&](auto&& self, std::int32_t idx) -> void {
        const auto& node = t.nodes()[static_cast<std::size_t>(idx)];
        if (node.is_leaf()) {
            out += node.value > 0 ? "(leaf +1)" : "(leaf -1)";
            return;
        }
        out += "(node ";
        out += std::to_string(node.var);
        out += ' ';
        self(self, node.neg);
        out += ' ';
        self(self, node.pos);
        out += ')';
    };
    rec(rec, 0);
    return out;
}

} // namespace smoothdt
