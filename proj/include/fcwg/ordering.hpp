#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

namespace fcwg {

// Fill-reducing ordering for sparse factorization. The input pattern
// must be structurally symmetric (callers symmetrize with A + A^T).

namespace ordering_detail {

struct Graph {
    int n = 0;
    const std::vector<int>& ptr;
    const std::vector<int>& adj;

    int degree(int v) const { return ptr[v + 1] - ptr[v]; }
};

// BFS over vertices with active[v] == mark, assuming level_of == -1 on
// entry for all active vertices; fills queue with the reached set in
// BFS order and returns the depth. Caller resets level_of afterwards.
inline int bfs_levels(const Graph& g, int root, const std::vector<int>& active,
                      int mark, std::vector<int>& level_of,
                      std::vector<int>& queue) {
    queue.clear();
    queue.push_back(root);
    level_of[root] = 0;
    int depth = 0;
    for (size_t head = 0; head < queue.size(); ++head) {
        const int v = queue[head];
        for (int k = g.ptr[v]; k < g.ptr[v + 1]; ++k) {
            const int w = g.adj[k];
            if (active[w] == mark && level_of[w] < 0) {
                level_of[w] = level_of[v] + 1;
                depth = std::max(depth, level_of[w]);
                queue.push_back(w);
            }
        }
    }
    return depth;
}

inline void reset_levels(std::vector<int>& level_of, const std::vector<int>& touched) {
    for (int v : touched) level_of[v] = -1;
}

inline int pseudo_peripheral(const Graph& g, int start,
                             const std::vector<int>& active, int mark,
                             std::vector<int>& level_of,
                             std::vector<int>& queue) {
    int root = start;
    int ecc = -1;
    for (int pass = 0; pass < 6; ++pass) {
        const int depth = bfs_levels(g, root, active, mark, level_of, queue);
        int best = root, best_deg = g.n + 1;
        for (int v : queue)
            if (level_of[v] == depth && g.degree(v) < best_deg) {
                best = v;
                best_deg = g.degree(v);
            }
        reset_levels(level_of, queue);
        if (depth <= ecc) break;
        ecc = depth;
        root = best;
    }
    return root;
}

} // namespace ordering_detail

// Automatic nested dissection (level-structure bisection): recursively
// split each connected piece with a vertex separator taken from the
// middle BFS level, ordering separators last.
inline std::vector<int> nested_dissection(int n, const std::vector<int>& sym_ptr,
                                          const std::vector<int>& sym_adj,
                                          int leaf_size = 48) {
    using namespace ordering_detail;
    Graph g{n, sym_ptr, sym_adj};
    std::vector<int> perm;
    perm.reserve(n);
    std::vector<int> active(n, 0);
    std::vector<int> level_of(n, -1), queue;

    struct Task {
        std::vector<int> verts;
        bool emit; // true: append verts to the ordering as-is
    };
    std::vector<Task> stack;
    {
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        stack.push_back({std::move(all), false});
    }
    int generation = 0;

    while (!stack.empty()) {
        Task task = std::move(stack.back());
        stack.pop_back();
        if (task.emit || static_cast<int>(task.verts.size()) <= leaf_size) {
            for (int v : task.verts) perm.push_back(v);
            continue;
        }
        const int mark = ++generation;
        for (int v : task.verts) active[v] = mark;

        const int root =
            pseudo_peripheral(g, task.verts.front(), active, mark, level_of, queue);
        const int depth = bfs_levels(g, root, active, mark, level_of, queue);

        if (queue.size() < task.verts.size()) {
            // Disconnected: handle the reached component and the rest separately.
            std::vector<int> rest;
            for (int v : task.verts)
                if (level_of[v] < 0) rest.push_back(v);
            std::vector<int> comp = queue;
            reset_levels(level_of, comp);
            stack.push_back({std::move(rest), false});
            stack.push_back({std::move(comp), false});
            continue;
        }
        if (depth < 2) {
            reset_levels(level_of, queue);
            for (int v : task.verts) perm.push_back(v);
            continue;
        }

        const int mid = depth / 2;
        std::vector<int> sep, lower, upper;
        for (int v : queue) {
            if (level_of[v] != mid) continue;
            bool touches_next = false;
            for (int k = g.ptr[v]; k < g.ptr[v + 1] && !touches_next; ++k) {
                const int w = g.adj[k];
                touches_next = active[w] == mark && level_of[w] == mid + 1;
            }
            if (touches_next) level_of[v] = -2;
        }
        for (int v : queue) {
            if (level_of[v] == -2) sep.push_back(v);
            else (level_of[v] <= mid ? lower : upper).push_back(v);
        }
        reset_levels(level_of, queue);
        if (sep.empty() || lower.empty() || upper.empty()) {
            for (int v : task.verts) perm.push_back(v);
            continue;
        }
        stack.push_back({std::move(sep), true}); // separator ordered last
        stack.push_back({std::move(lower), false});
        stack.push_back({std::move(upper), false});
    }
    return perm;
}

// Structure of A + A^T with the diagonal removed, deduplicated.
template <typename Mat>
void symmetric_pattern(const Mat& a, std::vector<int>& ptr, std::vector<int>& adj) {
    const int n = a.rows();
    auto rp = a.row_ptr();
    auto ci = a.col_idx();
    std::vector<int> count(n, 0);
    for (int r = 0; r < n; ++r)
        for (int k = rp[r]; k < rp[r + 1]; ++k)
            if (ci[k] != r) {
                ++count[r];
                ++count[ci[k]];
            }
    std::vector<int> raw_ptr(n + 1, 0);
    for (int v = 0; v < n; ++v) raw_ptr[v + 1] = raw_ptr[v] + count[v];
    std::vector<int> raw_adj(raw_ptr[n]);
    std::vector<int> next(raw_ptr.begin(), raw_ptr.end() - 1);
    for (int r = 0; r < n; ++r)
        for (int k = rp[r]; k < rp[r + 1]; ++k)
            if (ci[k] != r) {
                raw_adj[next[r]++] = ci[k];
                raw_adj[next[ci[k]]++] = r;
            }
    ptr.assign(n + 1, 0);
    adj.clear();
    adj.reserve(raw_adj.size());
    for (int v = 0; v < n; ++v) {
        const auto first = raw_adj.begin() + raw_ptr[v];
        const auto last = raw_adj.begin() + next[v];
        std::sort(first, last);
        const auto end = std::unique(first, last);
        for (auto it = first; it != end; ++it) adj.push_back(*it);
        ptr[v + 1] = static_cast<int>(adj.size());
    }
}

} // namespace fcwg
