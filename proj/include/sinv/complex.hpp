#pragma once

#include <algorithm>
#include <array>
#include <climits>
#include <cstdint>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cob.hpp"
#include "coeff.hpp"
#include "diagram.hpp"

namespace sinv {

struct NotCancellable : std::logic_error {
    using std::logic_error::logic_error;
};

struct Mismatch : std::logic_error {
    using std::logic_error::logic_error;
};

// Interned circle-free matchings on the current boundary.
class MatchingTable {
public:
    int intern(const Matching& m) {
        std::string key(m.begin(), m.end());
        auto [it, fresh] = index_.try_emplace(std::move(key), int(list_.size()));
        if (fresh) list_.push_back(m);
        return it->second;
    }
    const Matching& operator[](int id) const { return list_[id]; }
    int size() const { return int(list_.size()); }

private:
    std::vector<Matching> list_;
    std::unordered_map<std::string, int> index_;
};

// Smoothings of a crossing in interface order: partner arrays on the four interface positions.
struct CrossingComplex {
    CrossingType type = CrossingType::P;
    std::array<int, 4> iface{};
    std::array<std::uint8_t, 4> smoothing0{}, smoothing1{};
};

inline CrossingComplex crossing_complex(CrossingType type, const std::array<int, 4>& iface) {
    CrossingComplex X{type, iface, {1, 0, 3, 2}, {3, 2, 1, 0}};
    if (type == CrossingType::M) std::swap(X.smoothing0, X.smoothing1);
    return X;
}

enum class ScanMode { Full, S, Sq1 };

inline const char* mode_name(ScanMode m) {
    switch (m) {
    case ScanMode::Full: return "full";
    case ScanMode::S: return "s";
    case ScanMode::Sq1: return "sq1";
    }
    return "?";
}

struct Window {
    int lo = INT_MIN / 2;
    int hi = INT_MAX / 2;
    bool contains(int h) const { return lo <= h && h <= hi; }
};

template <class R>
class FilteredComplex {
public:
    struct Object {
        int h = 0;
        int q = 0;
        int match = 0;
        bool alive = true;
    };
    using Entry = std::pair<int, Terms<R>>;

    std::vector<int> boundary;
    MatchingTable matchings;
    std::vector<Object> objects;
    std::vector<std::vector<Entry>> out;
    std::vector<std::vector<int>> in;

    int add_object(int h, int q, int match) {
        objects.push_back({h, q, match, true});
        out.emplace_back();
        in.emplace_back();
        return int(objects.size()) - 1;
    }

    int live_count() const {
        int n = 0;
        for (auto& o : objects) n += o.alive;
        return n;
    }

    const Terms<R>* entry(int a, int b) const {
        auto& v = out[a];
        auto it = std::lower_bound(v.begin(), v.end(), b, [](const Entry& e, int k) { return e.first < k; });
        return (it != v.end() && it->first == b) ? &it->second : nullptr;
    }

    // entry(a -> b) += scale * t
    void add_to_entry(int a, int b, const Terms<R>& t, const R& scale) {
        auto& v = out[a];
        auto it = std::lower_bound(v.begin(), v.end(), b, [](const Entry& e, int k) { return e.first < k; });
        if (it != v.end() && it->first == b) {
            add_terms(it->second, t, scale);
            if (it->second.empty()) {
                v.erase(it);
                auto& w = in[b];
                w.erase(std::lower_bound(w.begin(), w.end(), a));
            }
            return;
        }
        Terms<R> n;
        add_terms(n, t, scale);
        if (n.empty()) return;
        v.insert(it, {b, std::move(n)});
        auto& w = in[b];
        w.insert(std::lower_bound(w.begin(), w.end(), a), a);
    }

    void kill(int i) {
        objects[i].alive = false;
        for (auto& [b, t] : out[i]) {
            auto& w = in[b];
            w.erase(std::lower_bound(w.begin(), w.end(), i));
        }
        for (int a : in[i]) {
            auto& v = out[a];
            v.erase(std::lower_bound(v.begin(), v.end(), i, [](const Entry& e, int k) { return e.first < k; }));
        }
        out[i].clear();
        out[i].shrink_to_fit();
        in[i].clear();
        in[i].shrink_to_fit();
    }

    // Unit multiple of the identity at equal quantum shift, or zero.
    R unit_identity(int a, int b) const {
        if (objects[a].q != objects[b].q || objects[a].match != objects[b].match) return R{};
        const Terms<R>* t = entry(a, b);
        if (!t || t->size() != 1 || (*t)[0].dots != 0 || !is_unit((*t)[0].c)) return R{};
        return (*t)[0].c;
    }

    const Topology& composition(int a, int b, int e) {
        std::uint64_t key = std::uint64_t(objects[a].match) | std::uint64_t(objects[b].match) << 21 |
                            std::uint64_t(objects[e].match) << 42;
        auto it = compose_cache_.find(key);
        if (it != compose_cache_.end()) return it->second;
        return compose_cache_
            .emplace(key, compose_topology(matchings[objects[a].match], matchings[objects[b].match], matchings[objects[e].match]))
            .first->second;
    }

    void clear_caches() { compose_cache_.clear(); }

    // Removes b1 -> b2 (phi = k id) and updates eps - gamma phi^-1 delta.
    void gauss_eliminate(int b1, int b2) {
        R k = unit_identity(b1, b2);
        if (is_zero(k)) throw NotCancellable("entry is not a unit multiple of the identity");
        R minus_kinv = -invert(k);
        std::vector<int> sources;
        for (int a : in[b2])
            if (a != b1) sources.push_back(a);
        std::vector<int> targets;
        for (auto& [e, t] : out[b1])
            if (e != b2) targets.push_back(e);
        for (int a : sources) {
            Terms<R> delta = *entry(a, b2);
            for (int e : targets) {
                const Terms<R>& gamma = *entry(b1, e);
                Terms<R> ge = apply_terms(composition(a, b1, e), delta, gamma);
                add_to_entry(a, e, ge, minus_kinv);
            }
        }
        kill(b1);
        kill(b2);
    }

    // Fill-in estimate of cancelling a -> b.
    long long cancel_cost(int a, int b) const { return (long long)(in[b].size() - 1) * (long long)(out[a].size() - 1); }

    // Cancels every unit-identity entry whose source degree lies in the window, lowest degree first.
    int reduce(const Window& elim) {
        int h_lo = INT_MAX, h_hi = INT_MIN;
        for (auto& o : objects)
            if (o.alive && elim.contains(o.h)) {
                h_lo = std::min(h_lo, o.h);
                h_hi = std::max(h_hi, o.h);
            }
        int count = 0;
        using Cand = std::tuple<long long, int, int>;
        for (int h = h_lo; h <= h_hi; ++h) {
            std::priority_queue<Cand, std::vector<Cand>, std::greater<>> pq;
            auto consider = [&](int a) {
                for (auto& [b, t] : out[a])
                    if (!is_zero(unit_identity(a, b))) pq.push({cancel_cost(a, b), a, b});
            };
            for (int a = 0; a < int(objects.size()); ++a)
                if (objects[a].alive && objects[a].h == h) consider(a);
            while (!pq.empty()) {
                auto [cost, a, b] = pq.top();
                pq.pop();
                if (!objects[a].alive || !objects[b].alive || is_zero(unit_identity(a, b))) continue;
                long long now = cancel_cost(a, b);
                if (now != cost) {
                    pq.push({now, a, b});
                    continue;
                }
                std::vector<int> touched;
                for (int s : in[b])
                    if (s != a) touched.push_back(s);
                gauss_eliminate(a, b);
                ++count;
                for (int s : touched) consider(s);
            }
        }
        return count;
    }

    void truncate(const Window& keep) {
        for (int i = 0; i < int(objects.size()); ++i)
            if (objects[i].alive && !keep.contains(objects[i].h)) kill(i);
    }

    // Drops dead objects and renumbers the survivors in order.
    void compact() {
        std::vector<int> idx(objects.size(), -1);
        int n = 0;
        for (int i = 0; i < int(objects.size()); ++i)
            if (objects[i].alive) idx[i] = n++;
        std::vector<Object> o2;
        std::vector<std::vector<Entry>> out2;
        std::vector<std::vector<int>> in2;
        o2.reserve(n);
        out2.reserve(n);
        in2.reserve(n);
        for (int i = 0; i < int(objects.size()); ++i) {
            if (!objects[i].alive) continue;
            o2.push_back(objects[i]);
            auto v = std::move(out[i]);
            for (auto& [b, t] : v) b = idx[b];
            out2.push_back(std::move(v));
            auto w = std::move(in[i]);
            for (int& a : w) a = idx[a];
            in2.push_back(std::move(w));
        }
        objects = std::move(o2);
        out = std::move(out2);
        in = std::move(in2);
    }

    // Every entry has degree >= 0 with a valid power of I.
    bool check_degrees() const {
        for (int a = 0; a < int(objects.size()); ++a)
            for (auto& [b, t] : out[a]) {
                if (objects[b].h != objects[a].h + 1) return false;
                const Matching& S = matchings[objects[a].match];
                const Matching& T = matchings[objects[b].match];
                int nl = loops(S, T).total();
                for (auto& term : t) {
                    int twice = objects[b].q - objects[a].q + nl - int(S.size()) / 2 - 2 * std::popcount(term.dots);
                    if (twice < 0 || (twice & 1)) return false;
                }
            }
        return true;
    }

    // d o d reduces to the empty sum; entries through dead objects are absent by construction.
    bool check_d_squared() {
        for (int a = 0; a < int(objects.size()); ++a) {
            if (!objects[a].alive) continue;
            std::vector<std::pair<int, Terms<R>>> acc;
            for (auto& [b, f] : out[a])
                for (auto& [e, g] : out[b]) {
                    Terms<R> c = apply_terms(composition(a, b, e), f, g);
                    auto it = std::find_if(acc.begin(), acc.end(), [&](auto& p) { return p.first == e; });
                    if (it == acc.end()) acc.push_back({e, c});
                    else add_terms(it->second, c, R::one());
                }
            for (auto& [e, t] : acc)
                if (!t.empty()) return false;
        }
        return true;
    }

    // `h q index` per generator, then `h i j coeff hpow` per entry; only meaningful once the boundary is empty.
    void dump(std::ostream& os) const {
        std::vector<int> idx(objects.size(), -1);
        int n = 0;
        for (int i = 0; i < int(objects.size()); ++i)
            if (objects[i].alive) idx[i] = n++;
        for (int i = 0; i < int(objects.size()); ++i)
            if (objects[i].alive) os << objects[i].h << ' ' << objects[i].q << ' ' << idx[i] << '\n';
        for (int i = 0; i < int(objects.size()); ++i) {
            if (!objects[i].alive) continue;
            for (auto& [b, t] : out[i]) {
                R c{};
                for (auto& term : t) c += term.c;
                os << objects[i].h << ' ' << idx[i] << ' ' << idx[b] << ' ' << to_string(c) << ' '
                   << (objects[b].q - objects[i].q) / 2 << '\n';
            }
        }
    }

private:
    std::unordered_map<std::uint64_t, Topology> compose_cache_;
};

namespace detail {

// Gluing data between the current boundary B (nodes 0..m-1) and a crossing interface (nodes m..m+3).
struct GlueFrame {
    int m = 0;
    std::vector<int> glue;    // node -> glued node or -1
    std::vector<int> new_idx; // node -> index in the new boundary, -1 if glued
    std::vector<int> new_boundary;
};

inline GlueFrame make_frame(const std::vector<int>& B, const std::array<int, 4>& X) {
    GlueFrame F;
    F.m = int(B.size());
    int N = F.m + 4;
    F.glue.assign(N, -1);
    F.new_idx.assign(N, -1);
    std::vector<std::pair<int, int>> labels;
    for (int i = 0; i < F.m; ++i) labels.push_back({B[i], i});
    for (int s = 0; s < 4; ++s) labels.push_back({X[s], F.m + s});
    std::sort(labels.begin(), labels.end());
    for (std::size_t i = 0; i < labels.size();) {
        if (i + 1 < labels.size() && labels[i].first == labels[i + 1].first) {
            if (i + 2 < labels.size() && labels[i + 2].first == labels[i].first) throw Mismatch("label appears three times");
            F.glue[labels[i].second] = labels[i + 1].second;
            F.glue[labels[i + 1].second] = labels[i].second;
            i += 2;
        } else {
            F.new_idx[labels[i].second] = int(F.new_boundary.size());
            F.new_boundary.push_back(labels[i].first);
            ++i;
        }
    }
    bool any_glue = false;
    for (int s = 0; s < 4; ++s) any_glue |= F.glue[F.m + s] >= 0 && F.glue[F.m + s] < F.m;
    if (F.m > 0 && !any_glue) throw Mismatch("crossing does not touch the boundary");
    return F;
}

struct Glued {
    Matching partner;
    std::vector<int> circle_rep; // one node on each closed circle
};

inline Glued glue_matching(const GlueFrame& F, const Matching& S, const std::array<std::uint8_t, 4>& sigma) {
    int m = F.m, N = m + 4;
    auto across = [&](int v) { return v < m ? int(S[v]) : m + sigma[v - m]; };
    Glued G;
    G.partner.assign(F.new_boundary.size(), 0);
    std::vector<char> seen(N, 0);
    for (int v = 0; v < N; ++v) {
        if (F.new_idx[v] < 0 || seen[v]) continue;
        int cur = v;
        seen[cur] = 1;
        while (true) {
            cur = across(cur);
            seen[cur] = 1;
            if (F.new_idx[cur] >= 0) break;
            cur = F.glue[cur];
            seen[cur] = 1;
        }
        G.partner[F.new_idx[v]] = std::uint8_t(F.new_idx[cur]);
        G.partner[F.new_idx[cur]] = std::uint8_t(F.new_idx[v]);
    }
    for (int v = 0; v < N; ++v) {
        if (seen[v]) continue;
        G.circle_rep.push_back(v);
        int cur = v;
        do {
            seen[cur] = 1;
            cur = across(cur);
            seen[cur] = 1;
            cur = F.glue[cur];
        } while (cur != v);
    }
    return G;
}

// Assembles pieces glued along the frame's glued points and caps the circles of the glued ends.
inline Topology glue_topology(const GlueFrame& F, int n_pieces, const std::vector<int>& piece_of_node,
                              const std::vector<std::uint32_t>& fbit, const Glued& src, const Glued& tgt) {
    int N = F.m + 4;
    UnionFind uf(n_pieces);
    std::vector<int> glue_piece;
    for (int v = 0; v < N; ++v)
        if (F.glue[v] > v) {
            uf.unite(piece_of_node[v], piece_of_node[F.glue[v]]);
            glue_piece.push_back(piece_of_node[v]);
        }
    Topology T;
    std::vector<int> cid(n_pieces, -1);
    auto comp = [&](int piece) {
        int r = uf.find(piece);
        if (cid[r] < 0) {
            cid[r] = int(T.comps.size());
            T.comps.emplace_back();
        }
        return cid[r];
    };
    for (int p = 0; p < n_pieces; ++p) {
        auto& C = T.comps[comp(p)];
        C.chi += 1;
        C.fmask |= fbit[p];
    }
    for (int p : glue_piece) T.comps[comp(p)].chi -= 1;
    LoopStructure L = loops(src.partner, tgt.partner);
    T.n_res = L.arc_loops;
    std::vector<int> rep(L.arc_loops, -1);
    for (int v = 0; v < N; ++v)
        if (F.new_idx[v] >= 0 && rep[L.loop_of_point[F.new_idx[v]]] < 0) rep[L.loop_of_point[F.new_idx[v]]] = v;
    for (int l = 0; l < L.arc_loops; ++l) T.comps[comp(piece_of_node[rep[l]])].res.push_back(std::uint8_t(l));
    for (std::size_t k = 0; k < src.circle_rep.size(); ++k) T.comps[comp(piece_of_node[src.circle_rep[k]])].src_caps |= 1u << k;
    for (std::size_t k = 0; k < tgt.circle_rep.size(); ++k) T.comps[comp(piece_of_node[tgt.circle_rep[k]])].tgt_caps |= 1u << k;
    return T;
}

inline std::array<int, 4> sigma_arc_index(const std::array<std::uint8_t, 4>& sigma) {
    std::array<int, 4> idx{};
    int k = 0;
    for (int s = 0; s < 4; ++s)
        if (s < sigma[s]) idx[s] = idx[sigma[s]] = k++;
    return idx;
}

} // namespace detail

// C (x) X followed by delooping every circle; objects of the result are circle-free.
template <class R>
FilteredComplex<R> tensor_with_crossing(const FilteredComplex<R>& C, const CrossingComplex& X) {
    using namespace detail;
    GlueFrame F = make_frame(C.boundary, X.iface);
    int m = F.m;
    FilteredComplex<R> D;
    D.boundary = F.new_boundary;
    const std::array<std::uint8_t, 4>* sig[2] = {&X.smoothing0, &X.smoothing1};

    // glued objects per (old matching, smoothing)
    std::unordered_map<int, Glued> glued[2];
    auto glued_of = [&](int match, int s) -> const Glued& {
        auto it = glued[s].find(match);
        if (it != glued[s].end()) return it->second;
        return glued[s].emplace(match, glue_matching(F, C.matchings[match], *sig[s])).first->second;
    };

    // first[o][s] = id of the delooped object with all circles in state +
    std::vector<std::array<int, 2>> first(C.objects.size(), {-1, -1});
    std::vector<std::array<int, 2>> ncirc(C.objects.size(), {0, 0});
    for (int o = 0; o < int(C.objects.size()); ++o) {
        auto& ob = C.objects[o];
        if (!ob.alive) continue;
        for (int s = 0; s < 2; ++s) {
            const Glued& G = glued_of(ob.match, s);
            int c = int(G.circle_rep.size());
            if (c > 20) throw CobError("too many circles");
            int mid = D.matchings.intern(G.partner);
            first[o][s] = int(D.objects.size());
            ncirc[o][s] = c;
            for (std::uint32_t eps = 0; eps < (1u << c); ++eps)
                D.add_object(ob.h + s, ob.q + s + c - 2 * std::popcount(eps), mid);
        }
    }

    std::vector<std::vector<typename FilteredComplex<R>::Entry>> out(D.objects.size());
    auto emit = [&](int a, int b, Terms<R>&& t) {
        if (!t.empty()) out[a].push_back({b, std::move(t)});
    };

    // f (x) id_sigma for every old entry
    std::unordered_map<std::uint64_t, Topology> cache;
    for (int o = 0; o < int(C.objects.size()); ++o) {
        if (!C.objects[o].alive) continue;
        for (auto& [o2, f] : C.out[o]) {
            int sm = C.objects[o].match, tm = C.objects[o2].match;
            for (int s = 0; s < 2; ++s) {
                std::uint64_t key = std::uint64_t(sm) | std::uint64_t(tm) << 24 | std::uint64_t(s) << 48;
                auto it = cache.find(key);
                if (it == cache.end()) {
                    const Matching& S = C.matchings[sm];
                    const Matching& T = C.matchings[tm];
                    LoopStructure L = loops(S, T);
                    auto sidx = sigma_arc_index(*sig[s]);
                    int np = L.arc_loops + 2;
                    std::vector<int> pon(m + 4);
                    for (int v = 0; v < m; ++v) pon[v] = L.loop_of_point[v];
                    for (int k = 0; k < 4; ++k) pon[m + k] = L.arc_loops + sidx[k];
                    std::vector<std::uint32_t> fbit(np, 0);
                    for (int l = 0; l < L.arc_loops; ++l) fbit[l] = 1u << l;
                    it = cache.emplace(key, glue_topology(F, np, pon, fbit, glued_of(sm, s), glued_of(tm, s))).first;
                }
                const Topology& T = it->second;
                int cs = ncirc[o][s], ct = ncirc[o2][s];
                for (std::uint32_t e1 = 0; e1 < (1u << cs); ++e1)
                    for (std::uint32_t e2 = 0; e2 < (1u << ct); ++e2) {
                        Terms<R> t;
                        for (auto& term : f)
                            apply_topology(T, term.dots, 0u, e1, e2,
                                           [&](std::uint32_t mk, long long k) { add_term(t, mk, term.c * R::from_int(k)); });
                        emit(first[o][s] + int(e1), first[o2][s] + int(e2), std::move(t));
                    }
            }
        }
    }

    // (-1)^h id_S (x) saddle
    std::unordered_map<int, Topology> saddle_cache;
    for (int o = 0; o < int(C.objects.size()); ++o) {
        auto& ob = C.objects[o];
        if (!ob.alive) continue;
        auto it = saddle_cache.find(ob.match);
        if (it == saddle_cache.end()) {
            const Matching& S = C.matchings[ob.match];
            LoopStructure L = loops(S, S);
            int np = L.arc_loops + 1;
            std::vector<int> pon(m + 4);
            for (int v = 0; v < m; ++v) pon[v] = L.loop_of_point[v];
            for (int k = 0; k < 4; ++k) pon[m + k] = L.arc_loops;
            std::vector<std::uint32_t> fbit(np, 0);
            it = saddle_cache.emplace(ob.match, glue_topology(F, np, pon, fbit, glued_of(ob.match, 0), glued_of(ob.match, 1))).first;
        }
        const Topology& T = it->second;
        R sign = (ob.h & 1) ? -R::one() : R::one();
        int cs = ncirc[o][0], ct = ncirc[o][1];
        for (std::uint32_t e1 = 0; e1 < (1u << cs); ++e1)
            for (std::uint32_t e2 = 0; e2 < (1u << ct); ++e2) {
                Terms<R> t;
                apply_topology(T, 0u, 0u, e1, e2, [&](std::uint32_t mk, long long k) { add_term(t, mk, sign * R::from_int(k)); });
                emit(first[o][0] + int(e1), first[o][1] + int(e2), std::move(t));
            }
    }

    for (int a = 0; a < int(out.size()); ++a) {
        std::sort(out[a].begin(), out[a].end(), [](auto& x, auto& y) { return x.first < y.first; });
        for (auto& [b, t] : out[a]) D.in[b].push_back(a);
    }
    D.out = std::move(out);
    return D;
}

// The empty tangle in bidegree (-n_minus, n_plus - 2 n_minus), ready to be tensored with the first crossing.
template <class R>
FilteredComplex<R> empty_complex(int n_plus, int n_minus) {
    FilteredComplex<R> C;
    int mid = C.matchings.intern({});
    C.add_object(-n_minus, n_plus - 2 * n_minus, mid);
    return C;
}

template <class R>
FilteredComplex<R> initial_complex(const CrossingComplex& X, int n_plus, int n_minus) {
    return tensor_with_crossing(empty_complex<R>(n_plus, n_minus), X);
}

struct ScanStats {
    int peak_objects = 0;
    int cancellations = 0;
};

// Elimination and retention windows after crossing i (1-based) of n.
inline std::pair<Window, Window> scan_windows(ScanMode mode, int i, int n) {
    switch (mode) {
    case ScanMode::S: return {{-2 - n + i, 1}, {-1 - n + i, 1}};
    case ScanMode::Sq1: return {{-2 - n + i, 2}, {-2 - n + i, 2}};
    case ScanMode::Full: break;
    }
    return {Window{}, Window{}};
}

template <class R>
FilteredComplex<R> scan(const ScanOrder& order, ScanMode mode, ScanStats* stats = nullptr, bool check = false) {
    int n = int(order.steps.size());
    if (n == 0) {
        FilteredComplex<R> C;
        int mid = C.matchings.intern({});
        C.add_object(0, 1, mid);
        C.add_object(0, -1, mid);
        return C;
    }
    FilteredComplex<R> C = empty_complex<R>(order.n_plus, order.n_minus);
    for (int i = 1; i <= n; ++i) {
        const ScanStep& st = order.steps[i - 1];
        C = tensor_with_crossing(C, crossing_complex(st.type, st.iface));
        if (C.boundary != st.boundary) throw Mismatch("scan boundary bookkeeping");
        if (stats) stats->peak_objects = std::max(stats->peak_objects, int(C.objects.size()));
        if (check && !C.check_d_squared()) throw std::logic_error("d^2 != 0 after tensoring");
        auto [elim, keep] = scan_windows(mode, i, n);
        int c = C.reduce(elim);
        if (stats) stats->cancellations += c;
        C.truncate(keep);
        C.compact();
        C.clear_caches();
        if (check && !C.check_d_squared()) throw std::logic_error("d^2 != 0 after reduction");
    }
    return C;
}

} // namespace sinv
