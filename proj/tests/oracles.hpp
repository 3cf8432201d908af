#pragma once

// Test-only reference implementations. These deliberately avoid the library's
// algorithms (no union-find, no sweep, no nth_element) so agreement is evidence.

#include <tlp/tlp.hpp>

#include <algorithm>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace tlp::oracle {

/// Full pairwise sort; ties broken by index.
inline std::vector<std::vector<std::size_t>> brute_knn(const ScalarField& field, std::size_t k)
{
    const std::size_t n = field.size();
    std::vector<std::vector<std::size_t>> out(n);
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<std::pair<double, std::size_t>> all;
        for (std::size_t u = 0; u < n; ++u) {
            if (u == v)
                continue;
            double d = 0.0;
            for (std::size_t j = 0; j < field.dims(); ++j)
                d += (field.point(v)[j] - field.point(u)[j]) * (field.point(v)[j] - field.point(u)[j]);
            all.emplace_back(d, u);
        }
        std::sort(all.begin(), all.end());
        for (std::size_t j = 0; j < k; ++j)
            out[v].push_back(all[j].second);
    }
    return out;
}

inline std::set<std::pair<std::size_t, std::size_t>> mutual_edges(const std::vector<std::vector<std::size_t>>& lists)
{
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t u = 0; u < lists.size(); ++u)
        for (std::size_t v : lists[u])
            if (std::find(lists[v].begin(), lists[v].end(), u) != lists[v].end())
                out.insert({std::min(u, v), std::max(u, v)});
    return out;
}

inline std::vector<std::vector<std::size_t>> adjacency_lists(std::size_t n, const std::vector<Edge>& edges)
{
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& e : edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    return adj;
}

/// Breadth-first component labels restricted to `active` vertices; inactive
/// vertices get label -1.
inline std::vector<long> bfs_labels(const std::vector<std::vector<std::size_t>>& adj, const std::vector<char>& active)
{
    std::vector<long> label(adj.size(), -1);
    long next = 0;
    for (std::size_t s = 0; s < adj.size(); ++s) {
        if (!active[s] || label[s] >= 0)
            continue;
        std::queue<std::size_t> q;
        q.push(s);
        label[s] = next;
        while (!q.empty()) {
            const auto x = q.front();
            q.pop();
            for (std::size_t y : adj[x])
                if (active[y] && label[y] < 0) {
                    label[y] = next;
                    q.push(y);
                }
        }
        ++next;
    }
    return label;
}

inline std::size_t bfs_component_count(std::size_t n, const std::vector<Edge>& edges)
{
    const auto labels = bfs_labels(adjacency_lists(n, edges), std::vector<char>(n, 1));
    return labels.empty() ? 0 : static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end()) + 1);
}

/// What a merge tree must reproduce, read directly off sublevel-set
/// components at every threshold of the (value, index) order.
struct SublevelResult {
    std::set<std::size_t> minima;
    std::map<std::size_t, std::size_t> death_of_min; // minimum vertex -> vertex where it merges
    std::vector<std::size_t> segmentation;            // vertex -> minimum vertex of its branch
    std::set<std::size_t> roots;                      // last vertex of each component
};

inline SublevelResult sublevel_components(const std::vector<double>& values, const std::vector<Edge>& edges)
{
    const std::size_t n = values.size();
    const auto adj = adjacency_lists(n, edges);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    auto before = [&](std::size_t a, std::size_t b) { return values[a] < values[b] || (values[a] == values[b] && a < b); };
    std::sort(order.begin(), order.end(), before);

    SublevelResult out;
    out.segmentation.assign(n, 0);
    std::vector<char> active(n, 0);
    // Components of the previous threshold, keyed by their lowest vertex.
    std::map<std::size_t, std::set<std::size_t>> prev;
    for (std::size_t step = 0; step < n; ++step) {
        const std::size_t v = order[step];
        active[v] = 1;
        const auto labels = bfs_labels(adj, active);
        std::map<long, std::set<std::size_t>> groups;
        for (std::size_t x = 0; x < n; ++x)
            if (labels[x] >= 0)
                groups[labels[x]].insert(x);
        std::map<std::size_t, std::set<std::size_t>> cur;
        for (auto& [l, members] : groups) {
            std::size_t lowest = *members.begin();
            for (std::size_t x : members)
                if (before(x, lowest))
                    lowest = x;
            cur[lowest] = std::move(members);
        }

        const auto& mine = *std::find_if(cur.begin(), cur.end(), [&](const auto& kv) { return kv.second.count(v); });
        const std::size_t elder = mine.first;
        std::vector<std::size_t> merged;
        for (const auto& [lowest, members] : prev)
            if (mine.second.count(*members.begin()))
                merged.push_back(lowest);
        if (merged.empty())
            out.minima.insert(v);
        for (std::size_t m : merged)
            if (m != elder)
                out.death_of_min[m] = v;
        out.segmentation[v] = elder;
        prev = std::move(cur);
    }
    for (auto& [lowest, members] : prev) {
        std::size_t last = lowest;
        for (std::size_t x : members)
            if (before(last, x))
                last = x;
        out.roots.insert(last);
    }
    return out;
}

/// Empty string on agreement, otherwise a description of the first mismatch.
inline std::string compare_tree(const MergeTree& tree, const BranchDecomposition& decomp, const SublevelResult& ref)
{
    std::set<std::size_t> minima;
    std::multiset<std::size_t> saddles;
    std::set<std::size_t> roots;
    for (const auto& node : tree.nodes) {
        if (node.kind == NodeKind::minimum)
            minima.insert(node.vertex);
        else if (node.kind == NodeKind::saddle)
            saddles.insert(node.vertex);
        else
            roots.insert(node.vertex);
    }
    if (minima != ref.minima)
        return "minimum vertex sets differ";
    if (roots != ref.roots)
        return "root vertex sets differ";
    std::multiset<std::size_t> ref_saddles;
    for (const auto& [m, s] : ref.death_of_min)
        ref_saddles.insert(s);
    if (saddles != ref_saddles)
        return "saddle vertex multisets differ";

    std::size_t pairs = 0;
    for (const auto& br : decomp.branches) {
        const std::size_t mv = tree.nodes[br.minimum_node].vertex;
        const auto it = ref.death_of_min.find(mv);
        if (br.master) {
            if (it != ref.death_of_min.end())
                return "branch of minimum " + std::to_string(mv) + " should die but is a master";
            if (!ref.roots.count(tree.nodes[br.terminal_node].vertex))
                return "master branch does not end at a component root";
            continue;
        }
        ++pairs;
        if (it == ref.death_of_min.end())
            return "branch of minimum " + std::to_string(mv) + " should be a master";
        if (tree.nodes[br.terminal_node].vertex != it->second)
            return "branch of minimum " + std::to_string(mv) + " pairs with the wrong saddle";
    }
    if (pairs != ref.death_of_min.size())
        return "pair count differs";
    for (std::size_t v = 0; v < ref.segmentation.size(); ++v)
        if (tree.nodes[tree.segmentation[v]].vertex != ref.segmentation[v])
            return "segmentation differs at vertex " + std::to_string(v);
    return {};
}

/// Checks the structural merge-tree invariants. Empty string when all hold.
inline std::string check_tree_invariants(const MergeTree& tree, std::size_t expected_components)
{
    const auto kids = tree.children();
    std::size_t roots = 0;
    for (const auto& node : tree.nodes) {
        const std::size_t degree = kids[node.id].size() + (node.parent ? 1 : 0);
        switch (node.kind) {
        case NodeKind::minimum:
            if (degree != 1)
                return "minimum node " + std::to_string(node.id) + " has degree " + std::to_string(degree);
            break;
        case NodeKind::saddle:
            if (degree != 3)
                return "saddle node " + std::to_string(node.id) + " has degree " + std::to_string(degree);
            break;
        case NodeKind::root:
            ++roots;
            if (node.parent)
                return "root with a parent";
            break;
        }
        if (node.parent && tree.nodes[*node.parent].value < node.value)
            return "value decreases along an arc";
    }
    if (roots != expected_components)
        return "root count " + std::to_string(roots) + " != components " + std::to_string(expected_components);
    std::vector<std::size_t> seen(tree.vertex_count(), 0);
    if (tree.segmentation.size() != tree.vertex_count())
        return "segmentation size mismatch";
    for (std::size_t v = 0; v < tree.vertex_count(); ++v)
        if (tree.nodes[tree.segmentation[v]].kind != NodeKind::minimum)
            return "segmentation points at a non-minimum node";
    return {};
}

/// Random spanning tree plus `extra` random edges.
template<typename Rng>
std::vector<Edge> random_connected_edges(std::size_t n, std::size_t extra, Rng& rng)
{
    std::vector<Edge> edges;
    for (std::size_t v = 1; v < n; ++v) {
        std::uniform_int_distribution<std::size_t> pick(0, v - 1);
        edges.push_back({pick(rng), v});
    }
    if (n >= 2) {
        std::uniform_int_distribution<std::size_t> any(0, n - 1);
        for (std::size_t i = 0; i < extra; ++i) {
            const std::size_t a = any(rng), b = any(rng);
            if (a != b)
                edges.push_back({a, b});
        }
    }
    return edges;
}

/// 1-D placeholder coordinates for fields whose graph is supplied directly.
inline ScalarField field_from_values(std::vector<double> values)
{
    std::vector<double> coords(values.size());
    for (std::size_t i = 0; i < coords.size(); ++i)
        coords[i] = static_cast<double>(i);
    return ScalarField(1, std::move(coords), std::move(values));
}

inline NeighborhoodGraph path_graph(std::size_t n)
{
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < n; ++i)
        edges.push_back({i, i + 1});
    return make_graph(n, edges);
}

/// Lattice vertices lower than all 3^n - 1 surrounding lattice neighbors under
/// the (value, index) order.
inline std::vector<std::size_t> lattice_local_minima(const ScalarField& field)
{
    const auto& spec = *field.grid();
    std::vector<std::size_t> out;
    const std::size_t n = field.size();
    std::size_t offsets = 1;
    for (std::size_t d = 0; d < spec.dims; ++d)
        offsets *= 3;
    for (std::size_t v = 0; v < n; ++v) {
        const auto c = lattice_coords(spec, v);
        bool is_min = true;
        for (std::size_t o = 0; o < offsets && is_min; ++o) {
            std::size_t code = o;
            std::vector<std::size_t> nc(spec.dims);
            bool inside = true, self = true;
            for (std::size_t d = spec.dims; d-- > 0;) {
                const long delta = static_cast<long>(code % 3) - 1;
                code /= 3;
                const long x = static_cast<long>(c[d]) + delta;
                if (delta != 0)
                    self = false;
                if (x < 0 || x >= static_cast<long>(spec.resolution))
                    inside = false;
                nc[d] = static_cast<std::size_t>(std::max(0L, x));
            }
            if (self || !inside)
                continue;
            const std::size_t u = lattice_index(spec, nc);
            const double a = field.value(u), b = field.value(v);
            if (a < b || (a == b && u < v))
                is_min = false;
        }
        if (is_min)
            out.push_back(v);
    }
    return out;
}

} // namespace tlp::oracle
