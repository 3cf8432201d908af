#pragma once

#include "disjoint_set.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "neighborhood_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>
#include <vector>

namespace tlp {

enum class NodeKind { minimum, saddle, root };

inline const char* to_string(NodeKind k)
{
    switch (k) {
    case NodeKind::minimum:
        return "minimum";
    case NodeKind::saddle:
        return "saddle";
    case NodeKind::root:
        return "root";
    }
    return "?";
}

struct TreeNode {
    std::size_t id = 0;
    std::size_t vertex = 0;
    double value = 0.0;
    NodeKind kind = NodeKind::minimum;
    std::optional<std::size_t> parent;
};

/// Join tree of the sublevel-set filtration (a forest when the graph is
/// disconnected). Node ids follow the sweep order. `segmentation[v]` is the id
/// of the minimum node whose branch owns vertex v.
struct MergeTree {
    std::vector<TreeNode> nodes;
    std::vector<std::size_t> segmentation;
    std::vector<double> values;

    std::size_t vertex_count() const noexcept { return values.size(); }

    std::size_t count(NodeKind kind) const
    {
        return static_cast<std::size_t>(
            std::count_if(nodes.begin(), nodes.end(), [kind](const TreeNode& n) { return n.kind == kind; }));
    }

    std::vector<std::vector<std::size_t>> children() const
    {
        std::vector<std::vector<std::size_t>> out(nodes.size());
        for (const auto& n : nodes)
            if (n.parent)
                out[*n.parent].push_back(n.id);
        return out;
    }
};

/// Sweep order: value ascending, vertex index breaking ties.
inline bool sweep_less(double va, std::size_t a, double vb, std::size_t b)
{
    return va < vb || (va == vb && a < b);
}

namespace detail {

struct BranchSpec {
    std::size_t min_vertex = 0;
    std::optional<std::size_t> death_vertex;
    std::size_t death_order = 0; // ranks saddles sharing a vertex
    std::optional<std::size_t> parent;
};

struct ComponentSpec {
    std::size_t root_vertex = 0;
    std::size_t master = 0;
};

/// Builds nodes and arcs from a branch table. Each branch becomes a chain
/// minimum -> (saddles where its children die, in sweep order) -> terminal,
/// where the terminal is the branch's own death saddle or its component root.
/// `vertex_branch` maps each vertex to an index into `branches`.
inline MergeTree assemble_tree(const std::vector<double>& values,
                               const std::vector<BranchSpec>& branches,
                               const std::vector<ComponentSpec>& components,
                               const std::vector<std::size_t>& vertex_branch)
{
    struct Key {
        double value;
        std::size_t vertex;
        int cls;
        std::size_t sub;
        NodeKind kind;
        std::size_t owner; // branch for minima/saddles, component for roots
    };
    std::vector<Key> keys;
    keys.reserve(2 * branches.size() + components.size());
    for (std::size_t b = 0; b < branches.size(); ++b) {
        const auto& br = branches[b];
        keys.push_back({values[br.min_vertex], br.min_vertex, 0, 0, NodeKind::minimum, b});
        if (br.death_vertex)
            keys.push_back({values[*br.death_vertex], *br.death_vertex, 1, br.death_order, NodeKind::saddle, b});
    }
    for (std::size_t c = 0; c < components.size(); ++c)
        keys.push_back({values[components[c].root_vertex], components[c].root_vertex, 2, 0, NodeKind::root, c});

    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
        if (a.value != b.value || a.vertex != b.vertex)
            return sweep_less(a.value, a.vertex, b.value, b.vertex);
        return std::tie(a.cls, a.sub) < std::tie(b.cls, b.sub);
    });

    MergeTree tree;
    tree.values = values;
    tree.nodes.resize(keys.size());
    std::vector<std::size_t> min_node(branches.size()), death_node(branches.size()), root_node(components.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto& k = keys[i];
        tree.nodes[i] = TreeNode{i, k.vertex, k.value, k.kind, std::nullopt};
        if (k.kind == NodeKind::minimum)
            min_node[k.owner] = i;
        else if (k.kind == NodeKind::saddle)
            death_node[k.owner] = i;
        else
            root_node[k.owner] = i;
    }

    std::vector<std::optional<std::size_t>> terminal(branches.size());
    for (std::size_t b = 0; b < branches.size(); ++b)
        if (branches[b].death_vertex)
            terminal[b] = death_node[b];
    for (std::size_t c = 0; c < components.size(); ++c)
        terminal[components[c].master] = root_node[c];

    std::vector<std::vector<std::size_t>> chain(branches.size());
    for (std::size_t b = 0; b < branches.size(); ++b)
        if (branches[b].parent)
            chain[*branches[b].parent].push_back(death_node[b]);
    for (std::size_t b = 0; b < branches.size(); ++b) {
        auto& c = chain[b];
        std::sort(c.begin(), c.end());
        std::size_t prev = min_node[b];
        for (std::size_t node : c) {
            tree.nodes[prev].parent = node;
            prev = node;
        }
        if (!terminal[b])
            throw Error("internal: branch without terminal node");
        tree.nodes[prev].parent = *terminal[b];
    }

    tree.segmentation.resize(vertex_branch.size());
    for (std::size_t v = 0; v < vertex_branch.size(); ++v)
        tree.segmentation[v] = min_node[vertex_branch[v]];
    return tree;
}

} // namespace detail

/// Sublevel-set sweep with union-find. Vertices are visited in ascending
/// (value, index) order: a vertex without processed neighbors starts a new
/// component (minimum); one that touches m > 1 components becomes m - 1
/// degree-three saddles at its value, the component with the lowest minimum
/// surviving (elder rule). Every vertex is assigned to the surviving branch of
/// the component it joins; each component's root sits at its last vertex.
inline MergeTree compute_merge_tree(const ScalarField& field, const NeighborhoodGraph& graph)
{
    const std::size_t n = field.size();
    if (graph.vertex_count != n)
        throw ParameterError("graph has " + std::to_string(graph.vertex_count) + " vertices but field has " +
                             std::to_string(n) + " points");
    for (std::size_t v = 0; v < n; ++v)
        if (!std::isfinite(field.value(v)))
            throw FormatError("non-finite value at vertex " + std::to_string(v));

    const auto& values = field.values();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sweep_less(values[a], a, values[b], b); });

    const Adjacency adj = build_adjacency(graph);
    DisjointSet sets(n);
    std::vector<char> processed(n, 0);
    std::vector<std::size_t> comp_branch(n, 0);
    std::vector<std::size_t> vertex_branch(n, 0);
    std::vector<detail::BranchSpec> branches;
    std::vector<std::size_t> touching;

    for (std::size_t v : order) {
        touching.clear();
        for (std::size_t u : adj.of(v)) {
            if (!processed[u])
                continue;
            const std::size_t r = sets.find(u);
            if (std::find(touching.begin(), touching.end(), r) == touching.end())
                touching.push_back(r);
        }

        if (touching.empty()) {
            comp_branch[v] = branches.size();
            vertex_branch[v] = branches.size();
            branches.push_back({v, std::nullopt, 0, std::nullopt});
        } else {
            // Branch indices follow creation order, which is the sweep order of
            // their minima: the smallest index is the elder.
            std::sort(touching.begin(), touching.end(),
                      [&](std::size_t a, std::size_t b) { return comp_branch[a] < comp_branch[b]; });
            const std::size_t elder = comp_branch[touching.front()];
            for (std::size_t j = 1; j < touching.size(); ++j) {
                auto& dying = branches[comp_branch[touching[j]]];
                dying.death_vertex = v;
                dying.death_order = j - 1;
                dying.parent = elder;
            }
            std::size_t r = v;
            for (std::size_t t : touching)
                r = sets.unite(r, t);
            comp_branch[r] = elder;
            vertex_branch[v] = elder;
        }
        processed[v] = 1;
    }

    std::vector<detail::ComponentSpec> components;
    std::vector<std::size_t> comp_index(n, static_cast<std::size_t>(-1));
    for (std::size_t b = 0; b < branches.size(); ++b) {
        if (branches[b].death_vertex)
            continue;
        comp_index[sets.find(branches[b].min_vertex)] = components.size();
        components.push_back({branches[b].min_vertex, b});
    }
    for (std::size_t v : order)
        components[comp_index[sets.find(v)]].root_vertex = v;

    return detail::assemble_tree(values, branches, components, vertex_branch);
}

struct Branch {
    std::size_t minimum_node = 0;
    /// Saddle where the branch dies, or the component root for a master branch.
    std::size_t terminal_node = 0;
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;
    double birth = 0.0;
    double death = 0.0;
    double persistence = 0.0;
    std::vector<std::size_t> members;
    std::size_t component = 0;
    bool master = false;
};

/// Elder-rule branch decomposition. Branches are indexed in sweep order of
/// their minima; components are numbered by their global minimum.
struct BranchDecomposition {
    std::vector<Branch> branches;
    std::vector<std::size_t> masters;
    /// Branch index for each tree node that is a minimum, npos otherwise.
    std::vector<std::size_t> branch_of_node;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Derives the branch decomposition from the tree structure alone: the elder
/// child of every saddle is the subtree holding the lowest minimum; a branch
/// climbs from its minimum until it reaches a saddle where it is not the elder
/// (its death) or the root.
inline BranchDecomposition branch_decomposition(const MergeTree& tree)
{
    const auto& nodes = tree.nodes;
    const std::size_t m = nodes.size();

    // Children always carry smaller ids than their parent, so one ascending
    // pass propagates subtree minima.
    std::vector<std::size_t> sub_min(m, BranchDecomposition::npos);
    for (std::size_t i = 0; i < m; ++i) {
        if (nodes[i].kind == NodeKind::minimum)
            sub_min[i] = i;
        if (nodes[i].parent) {
            const std::size_t p = *nodes[i].parent;
            if (p <= i)
                throw Error("internal: merge tree arcs must point to later nodes");
            if (sub_min[i] != BranchDecomposition::npos &&
                (sub_min[p] == BranchDecomposition::npos || sub_min[i] < sub_min[p]))
                sub_min[p] = sub_min[i];
        }
    }

    BranchDecomposition out;
    out.branch_of_node.assign(m, BranchDecomposition::npos);
    for (std::size_t i = 0; i < m; ++i)
        if (nodes[i].kind == NodeKind::minimum) {
            out.branch_of_node[i] = out.branches.size();
            out.branches.push_back({});
            out.branches.back().minimum_node = i;
        }

    for (auto& br : out.branches) {
        std::size_t at = br.minimum_node;
        while (true) {
            const auto parent = nodes[at].parent;
            if (!parent)
                throw Error("internal: branch climbed past a root");
            const std::size_t p = *parent;
            if (nodes[p].kind == NodeKind::root) {
                br.terminal_node = p;
                br.master = true;
                break;
            }
            if (sub_min[p] != br.minimum_node) {
                br.terminal_node = p;
                br.parent = out.branch_of_node[sub_min[p]];
                break;
            }
            at = p;
        }
        br.birth = nodes[br.minimum_node].value;
        br.death = nodes[br.terminal_node].value;
        br.persistence = br.death - br.birth;
    }

    for (std::size_t b = 0; b < out.branches.size(); ++b) {
        if (out.branches[b].master)
            out.masters.push_back(b);
        else
            out.branches[*out.branches[b].parent].children.push_back(b);
    }
    // Masters come out in sweep order of their minima; label each branch with
    // its master's position.
    for (std::size_t c = 0; c < out.masters.size(); ++c)
        out.branches[out.masters[c]].component = c;
    for (auto& br : out.branches) {
        std::size_t b = out.branch_of_node[br.minimum_node];
        while (!out.branches[b].master)
            b = *out.branches[b].parent;
        br.component = out.branches[b].component;
    }

    for (std::size_t v = 0; v < tree.segmentation.size(); ++v)
        out.branches[out.branch_of_node[tree.segmentation[v]]].members.push_back(v);
    return out;
}

struct PersistencePair {
    double birth = 0.0;
    double death = 0.0;
    std::size_t branch = 0;

    double persistence() const { return death - birth; }
};

/// Zero-dimensional persistence: one finite pair per non-master branch and
/// one essential class (birth only) per component.
struct PersistenceDiagram {
    std::vector<PersistencePair> pairs;
    std::vector<double> essential;
};

inline PersistenceDiagram persistence_pairs(const BranchDecomposition& decomp)
{
    PersistenceDiagram d;
    for (std::size_t b = 0; b < decomp.branches.size(); ++b) {
        const auto& br = decomp.branches[b];
        if (br.master)
            d.essential.push_back(br.birth);
        else
            d.pairs.push_back({br.birth, br.death, b});
    }
    return d;
}

/// Persistence simplification: every non-master branch with persistence <=
/// epsilon is merged into its nearest surviving ancestor, which inherits its
/// vertices. epsilon == 0 returns the tree unchanged.
inline MergeTree simplify(const MergeTree& tree, const BranchDecomposition& decomp, double epsilon)
{
    if (!(epsilon >= 0.0))
        throw ParameterError("simplification epsilon must be >= 0");
    if (epsilon == 0.0)
        return tree;

    const auto& old = decomp.branches;
    std::vector<char> keep(old.size());
    for (std::size_t b = 0; b < old.size(); ++b)
        keep[b] = old[b].master || old[b].persistence > epsilon;

    auto survivor = [&](std::size_t b) {
        while (!keep[b])
            b = *old[b].parent;
        return b;
    };

    std::vector<std::size_t> new_index(old.size(), BranchDecomposition::npos);
    std::vector<detail::BranchSpec> branches;
    for (std::size_t b = 0; b < old.size(); ++b)
        if (keep[b]) {
            new_index[b] = branches.size();
            branches.push_back({tree.nodes[old[b].minimum_node].vertex, std::nullopt, 0, std::nullopt});
        }
    for (std::size_t b = 0; b < old.size(); ++b) {
        if (!keep[b] || old[b].master)
            continue;
        auto& spec = branches[new_index[b]];
        spec.death_vertex = tree.nodes[old[b].terminal_node].vertex;
        spec.death_order = old[b].terminal_node;
        spec.parent = new_index[survivor(*old[b].parent)];
    }

    std::vector<detail::ComponentSpec> components;
    for (std::size_t b : decomp.masters)
        components.push_back({tree.nodes[old[b].terminal_node].vertex, new_index[b]});

    std::vector<std::size_t> vertex_branch(tree.segmentation.size());
    for (std::size_t v = 0; v < vertex_branch.size(); ++v)
        vertex_branch[v] = new_index[survivor(decomp.branch_of_node[tree.segmentation[v]])];

    return detail::assemble_tree(tree.values, branches, components, vertex_branch);
}

/// Simplification threshold given as a fraction of the field's value range.
inline double relative_epsilon(const MergeTree& tree, double fraction)
{
    if (tree.values.empty())
        return 0.0;
    const auto [lo, hi] = std::minmax_element(tree.values.begin(), tree.values.end());
    return fraction * (*hi - *lo);
}

} // namespace tlp
