#pragma once

#include "disjoint_set.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <istream>
#include <mutex>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace tlp {

enum class KnnMethod { exact, nn_descent };

inline const char* to_string(KnnMethod m)
{
    return m == KnnMethod::exact ? "exact" : "nn_descent";
}

/// Directed k-neighbor lists, stored flat (vertex v owns entries [v*k, v*k+k)),
/// each list ordered nearest first.
struct NeighborLists {
    std::size_t vertex_count = 0;
    std::size_t k = 0;
    KnnMethod method = KnnMethod::exact;
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    bool converged = true;
    std::vector<std::size_t> neighbors{};

    std::span<const std::size_t> of(std::size_t v) const { return {neighbors.data() + v * k, k}; }
};

struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph over field vertices. Edges are stored with u < v,
/// sorted and unique.
struct NeighborhoodGraph {
    std::size_t vertex_count = 0;
    std::vector<Edge> edges;
    std::size_t k = 0;
    KnnMethod method = KnnMethod::exact;
    bool symmetric = false;
    std::uint64_t seed = 0;
};

/// Normalizes an arbitrary edge list into a NeighborhoodGraph: orients u < v,
/// drops self-loops and duplicates.
inline NeighborhoodGraph make_graph(std::size_t vertex_count, std::vector<Edge> edges)
{
    NeighborhoodGraph g;
    g.vertex_count = vertex_count;
    for (auto& e : edges) {
        if (e.u >= vertex_count || e.v >= vertex_count)
            throw ParameterError("edge endpoint out of range");
        if (e.u > e.v)
            std::swap(e.u, e.v);
    }
    std::erase_if(edges, [](const Edge& e) { return e.u == e.v; });
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    g.edges = std::move(edges);
    return g;
}

/// Compressed adjacency: neighbors of v are targets[offsets[v] .. offsets[v+1]).
struct Adjacency {
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> targets;

    std::span<const std::size_t> of(std::size_t v) const
    {
        return {targets.data() + offsets[v], offsets[v + 1] - offsets[v]};
    }
    std::size_t degree(std::size_t v) const { return offsets[v + 1] - offsets[v]; }
};

inline Adjacency build_adjacency(const NeighborhoodGraph& g)
{
    Adjacency adj;
    adj.offsets.assign(g.vertex_count + 1, 0);
    for (const auto& e : g.edges) {
        ++adj.offsets[e.u + 1];
        ++adj.offsets[e.v + 1];
    }
    for (std::size_t v = 0; v < g.vertex_count; ++v)
        adj.offsets[v + 1] += adj.offsets[v];
    adj.targets.resize(adj.offsets.back());
    std::vector<std::size_t> fill(adj.offsets.begin(), adj.offsets.end() - 1);
    for (const auto& e : g.edges) {
        adj.targets[fill[e.u]++] = e.v;
        adj.targets[fill[e.v]++] = e.u;
    }
    return adj;
}

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double t = a[d] - b[d];
        s += t * t;
    }
    return s;
}

// Candidate neighbor ordered by (distance, index): the total order that makes
// every kNN result independent of evaluation order.
struct Candidate {
    double dist = 0.0;
    std::size_t id = 0;

    friend bool operator<(const Candidate& a, const Candidate& b)
    {
        return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
    }
};

} // namespace detail

/// Brute-force k nearest neighbors under Euclidean distance on grid
/// coordinates; equidistant candidates are ranked by lower index.
inline NeighborLists exact_knn(const ScalarField& field, std::size_t k, unsigned threads = thread_count())
{
    const std::size_t n = field.size();
    if (k < 1)
        throw ParameterError("k must be >= 1");
    if (k >= n)
        throw ParameterError("k = " + std::to_string(k) + " must be smaller than the point count " +
                             std::to_string(n));

    NeighborLists out;
    out.vertex_count = n;
    out.k = k;
    out.method = KnnMethod::exact;
    out.neighbors.resize(n * k);

    parallel_for(
        0, n,
        [&](std::size_t lo, std::size_t hi) {
            std::vector<detail::Candidate> cand(n - 1);
            for (std::size_t v = lo; v < hi; ++v) {
                const auto p = field.point(v);
                std::size_t c = 0;
                for (std::size_t u = 0; u < n; ++u)
                    if (u != v)
                        cand[c++] = {detail::squared_distance(p, field.point(u)), u};
                std::nth_element(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k - 1), cand.end());
                std::sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(k));
                for (std::size_t j = 0; j < k; ++j)
                    out.neighbors[v * k + j] = cand[j].id;
            }
        },
        threads);
    return out;
}

struct NnDescentParams {
    std::size_t k = 16;
    std::size_t max_iterations = 20;
    double sample_rate = 0.5;
    /// Stop once fewer than delta * N neighbor lists changed in an iteration.
    double delta = 0.001;
    std::uint64_t seed = 0;
    /// Fields smaller than this are solved exactly.
    std::size_t exact_below = 1000;
};

namespace detail {

// Bounded k-nearest list sorted ascending; `stamp` is the iteration that
// inserted the entry and `fresh` marks entries not yet used in a local join.
struct HeapEntry {
    double dist;
    std::size_t id;
    std::size_t stamp;
    bool fresh;
};

class KnnHeap {
public:
    explicit KnnHeap(std::size_t k) : k_(k) { items_.reserve(k); }

    std::vector<HeapEntry>& items() { return items_; }
    const std::vector<HeapEntry>& items() const { return items_; }

    bool push(double dist, std::size_t id, std::size_t stamp)
    {
        const Candidate c{dist, id};
        if (items_.size() == k_ && !(c < Candidate{items_.back().dist, items_.back().id}))
            return false;
        for (const auto& e : items_)
            if (e.id == id)
                return false;
        auto pos = std::lower_bound(items_.begin(), items_.end(), c, [](const HeapEntry& e, const Candidate& x) {
            return Candidate{e.dist, e.id} < x;
        });
        items_.insert(pos, HeapEntry{dist, id, stamp, true});
        if (items_.size() > k_)
            items_.pop_back();
        return true;
    }

private:
    std::size_t k_;
    std::vector<HeapEntry> items_;
};

template<typename Rng>
void sample_in_place(std::vector<std::size_t>& items, std::size_t keep, Rng& rng)
{
    if (items.size() <= keep)
        return;
    for (std::size_t i = 0; i < keep; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, items.size() - 1);
        std::swap(items[i], items[pick(rng)]);
    }
    items.resize(keep);
}

} // namespace detail

/// Approximate k nearest neighbors by NN-Descent (neighbor-of-neighbor local
/// joins with sampling). Deterministic for a given seed regardless of thread
/// count: every heap keeps the k smallest offers under a total order, and the
/// per-iteration change count is read off insertion stamps after the join.
inline NeighborLists nn_descent(const ScalarField& field, const NnDescentParams& params,
                                unsigned threads = thread_count())
{
    const std::size_t n = field.size();
    const std::size_t k = params.k;
    if (k < 1)
        throw ParameterError("k must be >= 1");
    if (k >= n)
        throw ParameterError("k = " + std::to_string(k) + " must be smaller than the point count " +
                             std::to_string(n));
    if (!(params.sample_rate > 0.0 && params.sample_rate <= 1.0))
        throw ParameterError("sample_rate must lie in (0, 1]");

    if (n < params.exact_below || n <= 2 * k + 1) {
        auto exact = exact_knn(field, k, threads);
        exact.seed = params.seed;
        return exact;
    }

    std::mt19937_64 rng(params.seed);
    std::vector<detail::KnnHeap> heaps(n, detail::KnnHeap(k));
    {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t v = 0; v < n; ++v) {
            while (heaps[v].items().size() < k) {
                const std::size_t u = pick(rng);
                if (u != v)
                    heaps[v].push(detail::squared_distance(field.point(v), field.point(u)), u, 0);
            }
        }
    }

    const std::size_t sample = std::max<std::size_t>(1, static_cast<std::size_t>(params.sample_rate * k));
    constexpr std::size_t lock_stripes = 1024;
    std::array<std::mutex, lock_stripes> locks;

    std::vector<std::vector<std::size_t>> old_lists(n), new_lists(n), old_rev(n), new_rev(n);
    bool converged = false;
    std::size_t iter = 0;
    while (iter < params.max_iterations) {
        ++iter;
        for (std::size_t v = 0; v < n; ++v) {
            old_lists[v].clear();
            new_lists[v].clear();
            old_rev[v].clear();
            new_rev[v].clear();
        }
        for (std::size_t v = 0; v < n; ++v) {
            std::vector<std::size_t> fresh_idx;
            for (std::size_t j = 0; j < heaps[v].items().size(); ++j) {
                const auto& e = heaps[v].items()[j];
                if (e.fresh)
                    fresh_idx.push_back(j);
                else
                    old_lists[v].push_back(e.id);
            }
            detail::sample_in_place(fresh_idx, sample, rng);
            for (std::size_t j : fresh_idx) {
                auto& e = heaps[v].items()[j];
                e.fresh = false;
                new_lists[v].push_back(e.id);
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            for (std::size_t u : old_lists[v])
                old_rev[u].push_back(v);
            for (std::size_t u : new_lists[v])
                new_rev[u].push_back(v);
        }
        for (std::size_t v = 0; v < n; ++v) {
            detail::sample_in_place(old_rev[v], sample, rng);
            detail::sample_in_place(new_rev[v], sample, rng);
            auto merge_unique = [](std::vector<std::size_t>& dst, const std::vector<std::size_t>& src) {
                for (std::size_t u : src)
                    if (std::find(dst.begin(), dst.end(), u) == dst.end())
                        dst.push_back(u);
            };
            merge_unique(old_lists[v], old_rev[v]);
            merge_unique(new_lists[v], new_rev[v]);
        }

        auto offer = [&](std::size_t a, std::size_t b, double dist) {
            std::lock_guard<std::mutex> guard(locks[a % lock_stripes]);
            heaps[a].push(dist, b, iter);
        };
        parallel_for(
            0, n,
            [&](std::size_t lo, std::size_t hi) {
                for (std::size_t v = lo; v < hi; ++v) {
                    const auto& fresh = new_lists[v];
                    const auto& old = old_lists[v];
                    for (std::size_t i = 0; i < fresh.size(); ++i) {
                        const std::size_t a = fresh[i];
                        for (std::size_t j = i + 1; j < fresh.size(); ++j) {
                            const std::size_t b = fresh[j];
                            if (a == b)
                                continue;
                            const double d = detail::squared_distance(field.point(a), field.point(b));
                            offer(a, b, d);
                            offer(b, a, d);
                        }
                        for (std::size_t b : old) {
                            if (a == b)
                                continue;
                            const double d = detail::squared_distance(field.point(a), field.point(b));
                            offer(a, b, d);
                            offer(b, a, d);
                        }
                    }
                }
            },
            threads);

        std::size_t changed_lists = 0;
        for (const auto& h : heaps)
            changed_lists += std::any_of(h.items().begin(), h.items().end(),
                                         [&](const auto& e) { return e.stamp == iter; });
        if (static_cast<double>(changed_lists) < params.delta * static_cast<double>(n)) {
            converged = true;
            break;
        }
    }

    NeighborLists out;
    out.vertex_count = n;
    out.k = k;
    out.method = KnnMethod::nn_descent;
    out.seed = params.seed;
    out.iterations = iter;
    out.converged = converged;
    out.neighbors.resize(n * k);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t j = 0; j < k; ++j)
            out.neighbors[v * k + j] = heaps[v].items()[j].id;
    return out;
}

/// Keeps edge (u, v) only when each endpoint lists the other.
inline NeighborhoodGraph symmetrize_mutual(const NeighborLists& lists)
{
    std::vector<Edge> edges;
    for (std::size_t u = 0; u < lists.vertex_count; ++u) {
        for (std::size_t v : lists.of(u)) {
            if (v <= u)
                continue;
            const auto back = lists.of(v);
            if (std::find(back.begin(), back.end(), u) != back.end())
                edges.push_back({u, v});
        }
    }
    auto g = make_graph(lists.vertex_count, std::move(edges));
    g.k = lists.k;
    g.method = lists.method;
    g.seed = lists.seed;
    g.symmetric = true;
    return g;
}

struct Components {
    /// Component label per vertex, numbered in order of each component's
    /// lowest-index vertex.
    std::vector<std::size_t> labels;
    std::size_t count = 0;
};

inline Components connected_components(const NeighborhoodGraph& g)
{
    DisjointSet sets(g.vertex_count);
    for (const auto& e : g.edges)
        sets.unite(e.u, e.v);

    Components c;
    c.labels.resize(g.vertex_count);
    std::vector<std::size_t> label_of_root(g.vertex_count, static_cast<std::size_t>(-1));
    for (std::size_t v = 0; v < g.vertex_count; ++v) {
        auto& l = label_of_root[sets.find(v)];
        if (l == static_cast<std::size_t>(-1))
            l = c.count++;
        c.labels[v] = l;
    }
    return c;
}

/// Writes the `u v` edge-list dump with a header comment describing the graph.
inline void write_edge_list(const NeighborhoodGraph& g, std::ostream& out)
{
    out << "# tlp-graph vertices=" << g.vertex_count << " k=" << g.k << " method=" << to_string(g.method)
        << " seed=" << g.seed << " symmetric=" << (g.symmetric ? 1 : 0) << '\n';
    for (const auto& e : g.edges)
        out << e.u << ' ' << e.v << '\n';
}

inline NeighborhoodGraph read_edge_list(std::istream& in)
{
    std::string line;
    std::size_t vertex_count = 0;
    bool have_count = false;
    NeighborhoodGraph meta;
    std::vector<Edge> edges;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string tok;
            while (hs >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos)
                    continue;
                const auto key = tok.substr(0, eq);
                const auto val = tok.substr(eq + 1);
                if (key == "vertices") {
                    vertex_count = std::stoull(val);
                    have_count = true;
                } else if (key == "k") {
                    meta.k = std::stoull(val);
                } else if (key == "method") {
                    meta.method = val == "nn_descent" ? KnnMethod::nn_descent : KnnMethod::exact;
                } else if (key == "seed") {
                    meta.seed = std::stoull(val);
                } else if (key == "symmetric") {
                    meta.symmetric = val == "1";
                }
            }
            continue;
        }
        std::istringstream ls(line);
        Edge e;
        if (!(ls >> e.u >> e.v))
            throw FormatError("malformed edge at line " + std::to_string(line_no));
        edges.push_back(e);
    }
    if (!have_count)
        throw FormatError("edge list header is missing 'vertices='");
    auto g = make_graph(vertex_count, std::move(edges));
    g.k = meta.k;
    g.method = meta.method;
    g.seed = meta.seed;
    g.symmetric = meta.symmetric;
    return g;
}

} // namespace tlp
