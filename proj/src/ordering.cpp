#include "sfvq/ordering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "sfvq/errors.hpp"

namespace sfvq {

namespace {

std::vector<double> distance_matrix(const Codebook& cb) {
    const std::size_t n = cb.size();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = distance(cb.word(i), cb.word(j), cb.dim);
            m[i * n + j] = d;
            m[j * n + i] = d;
        }
    return m;
}

std::vector<std::size_t> nn_from(const std::vector<double>& dist, std::size_t n,
                                 std::size_t start, double& total) {
    std::vector<char> used(n, 0);
    std::vector<std::size_t> path;
    path.reserve(n);
    path.push_back(start);
    used[start] = 1;
    total = 0.0;
    std::size_t cur = start;
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t best = n;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < n; ++v) {
            if (used[v])
                continue;
            const double d = dist[cur * n + v];
            if (d < best_d) {
                best_d = d;
                best = v;
            }
        }
        used[best] = 1;
        path.push_back(best);
        total += best_d;
        cur = best;
    }
    return path;
}

std::vector<std::size_t> nearest_neighbor_order(const std::vector<double>& dist,
                                                std::size_t n) {
    std::vector<std::size_t> best_path;
    double best_len = std::numeric_limits<double>::infinity();
    for (std::size_t start = 0; start < n; ++start) {
        double len = 0.0;
        auto path = nn_from(dist, n, start, len);
        if (len < best_len) {
            best_len = len;
            best_path = std::move(path);
        }
    }
    return best_path;
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }
    std::size_t find(std::size_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return false;
        parent[b] = a;
        return true;
    }
};

std::vector<std::size_t> walk_path(const std::vector<std::vector<std::size_t>>& adj,
                                   std::size_t n) {
    std::size_t start = n;
    for (std::size_t v = 0; v < n; ++v)
        if (adj[v].size() == 1) {
            start = v;
            break;
        }
    std::vector<std::size_t> path;
    path.reserve(n);
    std::size_t prev = n, cur = start;
    for (std::size_t step = 0; step < n; ++step) {
        path.push_back(cur);
        std::size_t next = n;
        for (std::size_t nb : adj[cur])
            if (nb != prev) {
                next = nb;
                break;
            }
        prev = cur;
        cur = next;
        if (cur == n)
            break;
    }
    return path;
}

std::vector<std::size_t> greedy_order(const std::vector<double>& dist,
                                      std::size_t n) {
    struct Edge {
        double d;
        std::size_t a, b;
    };
    std::vector<Edge> edges;
    edges.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            edges.push_back({dist[i * n + j], i, j});
    std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
        if (x.d != y.d)
            return x.d < y.d;
        if (x.a != y.a)
            return x.a < y.a;
        return x.b < y.b;
    });

    std::vector<int> degree(n, 0);
    UnionFind uf(n);
    std::vector<std::vector<std::size_t>> adj(n);
    std::size_t accepted = 0;
    for (const Edge& e : edges) {
        if (accepted == n - 1)
            break;
        if (degree[e.a] >= 2 || degree[e.b] >= 2)
            continue;
        if (uf.find(e.a) == uf.find(e.b))
            continue; // would close a cycle early
        uf.unite(e.a, e.b);
        ++degree[e.a];
        ++degree[e.b];
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
        ++accepted;
    }
    return walk_path(adj, n);
}

std::vector<std::size_t> christofides_like_order(const std::vector<double>& dist,
                                                 std::size_t n) {
    // Prim MST from vertex 0, ties toward the lower vertex index.
    std::vector<char> in_tree(n, 0);
    std::vector<double> best_d(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> best_from(n, 0);
    std::vector<std::pair<std::size_t, std::size_t>> mst_edges;
    in_tree[0] = 1;
    for (std::size_t v = 1; v < n; ++v) {
        best_d[v] = dist[v]; // row 0
        best_from[v] = 0;
    }
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t pick = n;
        double pick_d = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < n; ++v)
            if (!in_tree[v] && best_d[v] < pick_d) {
                pick_d = best_d[v];
                pick = v;
            }
        in_tree[pick] = 1;
        mst_edges.emplace_back(best_from[pick], pick);
        for (std::size_t v = 0; v < n; ++v)
            if (!in_tree[v] && dist[pick * n + v] < best_d[v]) {
                best_d[v] = dist[pick * n + v];
                best_from[v] = pick;
            }
    }

    std::vector<int> degree(n, 0);
    for (auto& [a, b] : mst_edges) {
        ++degree[a];
        ++degree[b];
    }

    // Greedy matching of odd-degree vertices: repeatedly join the closest
    // unmatched pair.
    std::vector<std::size_t> odd;
    for (std::size_t v = 0; v < n; ++v)
        if (degree[v] % 2 == 1)
            odd.push_back(v);
    std::vector<std::pair<std::size_t, std::size_t>> match_edges;
    std::vector<char> matched(n, 0);
    while (true) {
        std::size_t ba = n, bb = n;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < odd.size(); ++i) {
            if (matched[odd[i]])
                continue;
            for (std::size_t j = i + 1; j < odd.size(); ++j) {
                if (matched[odd[j]])
                    continue;
                const double d = dist[odd[i] * n + odd[j]];
                if (d < bd) {
                    bd = d;
                    ba = odd[i];
                    bb = odd[j];
                }
            }
        }
        if (ba == n)
            break;
        matched[ba] = matched[bb] = 1;
        match_edges.emplace_back(ba, bb);
    }

    // Eulerian circuit over MST + matching (Hierholzer).
    std::vector<std::vector<std::size_t>> multi(n);
    auto add_edge = [&](std::size_t a, std::size_t b) {
        multi[a].push_back(b);
        multi[b].push_back(a);
    };
    for (auto& [a, b] : mst_edges)
        add_edge(a, b);
    for (auto& [a, b] : match_edges)
        add_edge(a, b);
    for (auto& lst : multi)
        std::sort(lst.begin(), lst.end());

    std::vector<std::size_t> circuit;
    std::vector<std::size_t> stack{0};
    std::vector<std::size_t> next_idx(n, 0);
    std::vector<std::vector<char>> consumed(n);
    for (std::size_t v = 0; v < n; ++v)
        consumed[v].assign(multi[v].size(), 0);
    // Track multiplicities by consuming one reverse-edge slot per traversal.
    auto consume_reverse = [&](std::size_t from, std::size_t to) {
        auto& lst = multi[to];
        for (std::size_t k = 0; k < lst.size(); ++k)
            if (!consumed[to][k] && lst[k] == from) {
                consumed[to][k] = 1;
                return;
            }
    };
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        bool advanced = false;
        while (next_idx[v] < multi[v].size()) {
            const std::size_t k = next_idx[v];
            if (consumed[v][k]) {
                ++next_idx[v];
                continue;
            }
            consumed[v][k] = 1;
            const std::size_t to = multi[v][k];
            ++next_idx[v];
            consume_reverse(v, to);
            stack.push_back(to);
            advanced = true;
            break;
        }
        if (!advanced) {
            circuit.push_back(v);
            stack.pop_back();
        }
    }

    // Shortcut repeated vertices to a Hamiltonian cycle.
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> tour;
    tour.reserve(n);
    for (std::size_t v : circuit)
        if (!seen[v]) {
            seen[v] = 1;
            tour.push_back(v);
        }

    // Cut the longest cycle edge to obtain an open path.
    std::size_t cut = 0;
    double longest = -1.0;
    for (std::size_t k = 0; k < tour.size(); ++k) {
        const std::size_t a = tour[k];
        const std::size_t b = tour[(k + 1) % tour.size()];
        const double d = dist[a * n + b];
        if (d > longest) {
            longest = d;
            cut = k;
        }
    }
    std::vector<std::size_t> path;
    path.reserve(n);
    for (std::size_t k = 1; k <= tour.size(); ++k)
        path.push_back(tour[(cut + k) % tour.size()]);
    return path;
}

} // namespace

PathOrder order_path(const Codebook& cb, Heuristic heuristic) {
    const std::size_t n = cb.size();
    if (n < 2)
        throw InvalidArgument("order_path: need at least 2 codewords");

    PathOrder order;
    order.heuristic = heuristic;
    if (heuristic == Heuristic::Identity) {
        order.permutation.resize(n);
        std::iota(order.permutation.begin(), order.permutation.end(),
                  std::size_t{0});
        return order;
    }

    const auto dist = distance_matrix(cb);
    switch (heuristic) {
    case Heuristic::NearestNeighbor:
        order.permutation = nearest_neighbor_order(dist, n);
        break;
    case Heuristic::Greedy:
        order.permutation = greedy_order(dist, n);
        break;
    case Heuristic::ChristofidesLike:
        order.permutation = christofides_like_order(dist, n);
        break;
    default:
        throw InvalidArgument("order_path: unknown heuristic");
    }
    return order;
}

double path_length(const Codebook& cb, const PathOrder& order) {
    const std::size_t n = cb.size();
    if (order.permutation.size() != n)
        throw InvalidArgument("path_length: permutation size does not match codebook");
    std::vector<char> seen(n, 0);
    for (std::size_t v : order.permutation) {
        if (v >= n || seen[v])
            throw InvalidArgument("path_length: permutation is not a bijection");
        seen[v] = 1;
    }
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k)
        total += distance(cb.word(order.permutation[k]),
                          cb.word(order.permutation[k + 1]), cb.dim);
    return total;
}

Codebook apply_order(const Codebook& cb, const PathOrder& order) {
    path_length(cb, order); // validates the permutation
    Codebook out(cb.dim, cb.size());
    for (std::size_t k = 0; k < cb.size(); ++k)
        std::copy(cb.word(order.permutation[k]),
                  cb.word(order.permutation[k]) + cb.dim, out.word(k));
    return out;
}

Heuristic heuristic_from_string(std::string_view name) {
    if (name == "nn" || name == "nearest_neighbor") return Heuristic::NearestNeighbor;
    if (name == "greedy") return Heuristic::Greedy;
    if (name == "christofides" || name == "christofides_like")
        return Heuristic::ChristofidesLike;
    if (name == "identity") return Heuristic::Identity;
    throw InvalidArgument("unknown ordering heuristic: " + std::string(name));
}

} // namespace sfvq
