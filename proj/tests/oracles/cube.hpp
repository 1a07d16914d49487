#pragma once

// Brute-force Khovanov and Bar-Natan complexes on the full cube of resolutions.

#include <algorithm>
#include <climits>
#include <array>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "dense.hpp"

namespace oracle {

using PD = std::vector<std::array<int, 4>>;

// Sign rule for PD codes whose labels run consecutively along the knot.
inline bool positive_by_labels(const std::array<int, 4>& x) {
    int j = x[1], l = x[3];
    return j - l == 1 || l - j > 1;
}

struct Cube {
    struct Gen {
        int h, q;
    };
    std::vector<Gen> gens;
    // coefficient c * H^k on src -> tgt
    struct Edge {
        int src, tgt;
        long long c;
        int hpow;
    };
    std::vector<Edge> edges;
    int n_plus = 0, n_minus = 0;
};

namespace cube_detail {

struct Resolution {
    std::vector<int> circle_of_label; // index by label
    int circles = 0;
    std::vector<int> min_label;       // per circle
};

inline Resolution resolve(const PD& pd, unsigned v, int max_label) {
    std::vector<int> p(max_label + 1);
    std::iota(p.begin(), p.end(), 0);
    auto find = [&](int x) {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    };
    auto unite = [&](int a, int b) { p[find(a)] = find(b); };
    std::vector<char> used(max_label + 1, 0);
    for (std::size_t c = 0; c < pd.size(); ++c) {
        auto& x = pd[c];
        for (int l : x) used[l] = 1;
        if ((v >> c) & 1) {
            unite(x[0], x[3]);
            unite(x[1], x[2]);
        } else {
            unite(x[0], x[1]);
            unite(x[2], x[3]);
        }
    }
    Resolution r;
    r.circle_of_label.assign(max_label + 1, -1);
    std::map<int, int> root_min;
    for (int l = 0; l <= max_label; ++l)
        if (used[l] && !root_min.count(find(l))) root_min[find(l)] = l;
    std::vector<std::pair<int, int>> mins;
    for (auto& [root, m] : root_min) mins.push_back({m, root});
    std::sort(mins.begin(), mins.end());
    std::map<int, int> id;
    for (auto& [m, root] : mins) {
        id[root] = r.circles++;
        r.min_label.push_back(m);
    }
    for (int l = 0; l <= max_label; ++l)
        if (used[l]) r.circle_of_label[l] = id[find(l)];
    return r;
}

} // namespace cube_detail

// Generators: (vertex, states) with state bit 1 meaning x. Frobenius algebra Z[H][x]/(x^2 - Hx).
inline Cube build_cube(const PD& pd) {
    using namespace cube_detail;
    int n = int(pd.size());
    if (n > 16) throw std::invalid_argument("cube too large");
    int max_label = 0;
    for (auto& x : pd)
        for (int l : x) max_label = std::max(max_label, l);
    Cube C;
    for (auto& x : pd) (positive_by_labels(x) ? C.n_plus : C.n_minus)++;
    std::vector<Resolution> res(1u << n);
    std::vector<int> offset(1u << n);
    for (unsigned v = 0; v < (1u << n); ++v) {
        res[v] = resolve(pd, v, max_label);
        offset[v] = int(C.gens.size());
        int ones = __builtin_popcount(v);
        for (unsigned s = 0; s < (1u << res[v].circles); ++s) {
            int deg = res[v].circles - 2 * __builtin_popcount(s);
            C.gens.push_back({ones - C.n_minus, deg + ones + C.n_plus - 2 * C.n_minus});
        }
    }
    for (unsigned v = 0; v < (1u << n); ++v)
        for (int c = 0; c < n; ++c) {
            if ((v >> c) & 1) continue;
            unsigned w = v | (1u << c);
            long long sign = (__builtin_popcount(v & ((1u << c) - 1)) & 1) ? -1 : 1;
            const Resolution &A = res[v], &B = res[w];
            auto& x = pd[c];
            // circles untouched by the change keep their label sets
            std::vector<int> b_of_a(A.circles, -1);
            for (int i = 0; i < A.circles; ++i) {
                int j = B.circle_of_label[A.min_label[i]];
                bool same = true;
                for (int l = 0; l <= max_label; ++l)
                    if (A.circle_of_label[l] >= 0 && ((A.circle_of_label[l] == i) != (B.circle_of_label[l] == j))) same = false;
                if (same) b_of_a[i] = j;
            }
            int a1 = A.circle_of_label[x[0]], a2 = A.circle_of_label[x[2]];
            bool merge = a1 != a2;
            int b1 = B.circle_of_label[x[0]], b2 = B.circle_of_label[x[1]];
            for (unsigned s = 0; s < (1u << A.circles); ++s) {
                unsigned base = 0;
                for (int i = 0; i < A.circles; ++i)
                    if (b_of_a[i] >= 0 && ((s >> i) & 1)) base |= 1u << b_of_a[i];
                auto emit = [&](unsigned t, long long coef, int hp) {
                    C.edges.push_back({offset[v] + int(s), offset[w] + int(t), sign * coef, hp});
                };
                if (merge) {
                    int xa = (s >> a1) & 1, xb = (s >> a2) & 1;
                    int m = B.circle_of_label[x[0]];
                    if (xa && xb) emit(base | 1u << m, 1, 1);
                    else emit(base | (unsigned(xa | xb) << m), 1, 0);
                } else {
                    int xa = (s >> a1) & 1;
                    if (xa) emit(base | 1u << b1 | 1u << b2, 1, 0);
                    else {
                        emit(base | 1u << b1, 1, 0);
                        emit(base | 1u << b2, 1, 0);
                        emit(base, -1, 1);
                    }
                }
            }
        }
    return C;
}

// Khovanov ranks per (h, q): the H = 0 part is q-homogeneous.
template <class R>
std::map<std::pair<int, int>, int> khovanov_ranks(const Cube& C) {
    std::map<std::pair<int, int>, std::vector<int>> block;
    for (int i = 0; i < int(C.gens.size()); ++i) block[{C.gens[i].h, C.gens[i].q}].push_back(i);
    std::map<int, int> local;
    for (auto& [k, v] : block)
        for (int j = 0; j < int(v.size()); ++j) local[v[j]] = j;
    std::map<std::pair<int, int>, int> rk;
    std::map<std::pair<int, int>, Matrix<R>> mats;
    for (auto& [k, v] : block) {
        auto it = block.find({k.first + 1, k.second});
        if (it == block.end()) continue;
        mats[k] = Matrix<R>(it->second.size(), std::vector<R>(v.size(), R{}));
    }
    for (auto& e : C.edges) {
        if (e.hpow) continue;
        auto& g = C.gens[e.src];
        auto& M = mats.at({g.h, g.q});
        M[local[e.tgt]][local[e.src]] += R::from_int(e.c);
    }
    for (auto& [k, M] : mats) rk[k] = rank(M, int(block[k].size()));
    std::map<std::pair<int, int>, int> kh;
    for (auto& [k, v] : block) {
        int d = int(v.size());
        auto a = rk.find(k);
        auto b = rk.find({k.first - 1, k.second});
        d -= (a == rk.end() ? 0 : a->second) + (b == rk.end() ? 0 : b->second);
        if (d) kh[k] = d;
    }
    return kh;
}

// s from the filtered Bar-Natan complex (H = 1): s - 1 is the largest q with H^0(F_q) -> H^0 onto.
template <class R>
int bar_natan_s(const Cube& C) {
    std::vector<int> c0, cm, c1;
    std::map<int, int> pos;
    for (int i = 0; i < int(C.gens.size()); ++i) {
        int h = C.gens[i].h;
        if (h < -1 || h > 1) continue;
        auto& v = h == 0 ? c0 : h == -1 ? cm : c1;
        pos[i] = int(v.size());
        v.push_back(i);
    }
    int n0 = int(c0.size());
    Matrix<R> d0(c1.size(), std::vector<R>(n0, R{}));
    Matrix<R> bvec(cm.size(), std::vector<R>(n0, R{}));
    for (auto& e : C.edges) {
        int h = C.gens[e.src].h;
        if (h == 0) d0[pos[e.tgt]][pos[e.src]] += R::from_int(e.c);
        else if (h == -1) bvec[pos[e.src]][pos[e.tgt]] += R::from_int(e.c);
    }
    std::vector<int> order(n0);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return C.gens[c0[a]].q < C.gens[c0[b]].q; });
    auto Z = kernel(d0, n0);
    auto zl = leading_coordinates(Z, n0, order);
    auto bl = leading_coordinates(bvec, n0, order);
    if (zl.size() != bl.size() + 2) throw std::logic_error("Bar-Natan H^0 is not two-dimensional");
    auto image_dim = [&](int q) {
        int z = 0, b = 0;
        for (int c : zl) z += C.gens[c0[c]].q >= q;
        for (int c : bl) b += C.gens[c0[c]].q >= q;
        return z - b;
    };
    int qmax = INT_MIN, qmin = INT_MAX;
    for (int g : c0) {
        qmax = std::max(qmax, C.gens[g].q);
        qmin = std::min(qmin, C.gens[g].q);
    }
    int onto = INT_MIN, nonzero = INT_MIN;
    for (int q = qmin; q <= qmax; ++q) {
        int d = image_dim(q);
        if (d == 2) onto = q;
        if (d >= 1) nonzero = q;
    }
    if (nonzero != onto + 2) throw std::logic_error("filtration jumps are not two apart");
    return onto + 1;
}

} // namespace oracle
