#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "coeff.hpp"

namespace sinv {

struct CobError : std::logic_error {
    using std::logic_error::logic_error;
};

// partner[i] is the other end of the arc at boundary point i.
using Matching = std::vector<std::uint8_t>;

// Circle-free part is a matching on the boundary points; closed circles are only counted.
struct Tangle {
    std::vector<int> points;
    Matching partner;
    int circles = 0;
    int q = 0;

    int size() const { return int(points.size()); }
    friend bool operator==(const Tangle&, const Tangle&) = default;
};

inline bool same_object(const Tangle& a, const Tangle& b) {
    return a.points == b.points && a.partner == b.partner && a.circles == b.circles;
}

// No two arcs interleave with respect to the cyclic order given as a permutation of point indices.
inline bool is_noncrossing(const Matching& partner, const std::vector<int>& cyclic) {
    int m = int(partner.size());
    std::vector<int> pos(m);
    for (int k = 0; k < m; ++k) pos[cyclic[k]] = k;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            int a = pos[i], b = pos[partner[i]], c = pos[j], d = pos[partner[j]];
            if (a > b) std::swap(a, b);
            if (c > d) std::swap(c, d);
            if (a < c && c < b && b < d) return false;
        }
    return true;
}

// Boundary loops of a surface between two matchings: arc loops alternate S-arcs and T-arcs and
// are numbered by their smallest point; source circles and then target circles follow.
struct LoopStructure {
    std::vector<int> loop_of_point;
    int arc_loops = 0;
    int src_circles = 0;
    int tgt_circles = 0;
    int total() const { return arc_loops + src_circles + tgt_circles; }
};

inline LoopStructure loops(const Matching& S, const Matching& T, int src_circles = 0, int tgt_circles = 0) {
    int m = int(S.size());
    LoopStructure L;
    L.loop_of_point.assign(m, -1);
    for (int i = 0; i < m; ++i) {
        if (L.loop_of_point[i] >= 0) continue;
        int j = i;
        do {
            L.loop_of_point[j] = L.arc_loops;
            int k = S[j];
            L.loop_of_point[k] = L.arc_loops;
            j = T[k];
        } while (j != i);
        ++L.arc_loops;
    }
    L.src_circles = src_circles;
    L.tgt_circles = tgt_circles;
    if (L.total() > 32) throw CobError("too many boundary loops");
    return L;
}

// One summand of a disk-form morphism: every boundary loop bounds its own disk; bit i of dots
// marks a dot on loop i. The power of the twice-dotted sphere is implied by the degree.
template <class R>
struct Term {
    std::uint32_t dots = 0;
    R c{};
};

template <class R>
using Terms = std::vector<Term<R>>;

template <class R>
void add_term(Terms<R>& t, std::uint32_t dots, const R& c) {
    if (is_zero(c)) return;
    for (auto it = t.begin(); it != t.end(); ++it)
        if (it->dots == dots) {
            it->c += c;
            if (is_zero(it->c)) t.erase(it);
            return;
        }
    t.push_back({dots, c});
}

template <class R>
void add_terms(Terms<R>& t, const Terms<R>& u, const R& scale) {
    for (auto& x : u) add_term(t, x.dots, x.c * scale);
}

template <class R>
bool terms_equal(Terms<R> a, Terms<R> b) {
    auto key = [](const Term<R>& x, const Term<R>& y) { return x.dots < y.dots; };
    std::sort(a.begin(), a.end(), key);
    std::sort(b.begin(), b.end(), key);
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].dots != b[i].dots || !(a[i].c == b[i].c)) return false;
    return true;
}

// A surface assembled from disks, reduced to disk form component by component.
struct Topology {
    struct Component {
        std::uint32_t fmask = 0;
        std::uint32_t gmask = 0;
        std::vector<std::uint8_t> res;
        int chi = 0;
        // circles capped by births (source side) or deaths (target side)
        std::uint32_t src_caps = 0;
        std::uint32_t tgt_caps = 0;
    };
    std::vector<Component> comps;
    int n_res = 0;
};

namespace detail {

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    void unite(int a, int b) { p[find(a)] = find(b); }
};

inline int sign_pow(int e) { return (e & 1) ? -1 : 1; }

// Disk-form expansion of one connected component with b boundary loops.
// dotted: some dot present; diff: the (undotted minus dotted) combination from a target cap x - H.
inline void expand_component(int b, int genus, bool dotted, bool diff, std::vector<std::pair<std::uint32_t, long long>>& out) {
    out.clear();
    std::uint32_t full = b >= 32 ? 0xffffffffu : ((1u << b) - 1);
    if (dotted && !diff) {
        out.push_back({full, 1});
        return;
    }
    for (std::uint32_t S = 0; S <= full; ++S) {
        int e = b - std::popcount(S);
        long long c;
        if (diff) c = (genus & 1) ? sign_pow(e) : sign_pow(e + 1);
        else if (S == full) c = (genus & 1) ? 2 : 0;
        else c = (genus & 1) ? sign_pow(e) : sign_pow(e + 1);
        if (c) out.push_back({S, c});
        if (S == full) break;
    }
}

} // namespace detail

// Evaluates the assembled surface for given dot masks on the f- and g-pieces and circle states.
// Circle state bit 1 is the x-summand ({-1} shift): dotted birth on the source side, plain
// death on the target side; state 0 uses plain birth and (dotted death - H death).
template <class Emit>
void apply_topology(const Topology& T, std::uint32_t mf, std::uint32_t mg, std::uint32_t eps_src, std::uint32_t eps_tgt,
                    Emit&& emit) {
    thread_local std::vector<std::pair<std::uint32_t, long long>> acc, next, part;
    acc.assign(1, {0u, 1});
    for (auto& C : T.comps) {
        int caps = std::popcount(C.src_caps) + std::popcount(C.tgt_caps);
        int chi = C.chi + caps;
        int b = int(C.res.size());
        int g2 = 2 - chi - b;
        if (g2 < 0 || (g2 & 1)) throw CobError("inconsistent surface topology");
        int d0 = std::popcount(C.fmask & mf) + std::popcount(C.gmask & mg) + std::popcount(C.src_caps & eps_src);
        int k = std::popcount(C.tgt_caps & ~eps_tgt);
        if (k > 0 && d0 > 0) return;
        detail::expand_component(b, g2 / 2, d0 > 0, k > 0, part);
        if (part.empty()) return;
        long long s = detail::sign_pow(k);
        next.clear();
        for (auto& [m, c] : acc)
            for (auto& [pm, pc] : part) {
                std::uint32_t r = m;
                for (int i = 0; i < b; ++i)
                    if (pm >> i & 1) r |= 1u << C.res[i];
                next.push_back({r, c * pc * s});
            }
        std::swap(acc, next);
    }
    for (auto& [m, c] : acc) emit(m, c);
}

// Vertical gluing of f: S -> T and g: T -> U.
inline Topology compose_topology(const Matching& S, const Matching& T, const Matching& U, int cS = 0, int cT = 0, int cU = 0) {
    LoopStructure F = loops(S, T, cS, cT);
    LoopStructure G = loops(T, U, cT, cU);
    LoopStructure Rl = loops(S, U, cS, cU);
    int nF = F.total(), nG = G.total();
    detail::UnionFind uf(nF + nG);
    int m = int(S.size());
    std::vector<int> glued_arcs;
    for (int i = 0; i < m; ++i)
        if (i < T[i]) {
            uf.unite(F.loop_of_point[i], nF + G.loop_of_point[i]);
            glued_arcs.push_back(F.loop_of_point[i]);
        }
    for (int k = 0; k < cT; ++k) uf.unite(F.arc_loops + cS + k, nF + G.arc_loops + k);

    std::vector<int> comp_id(nF + nG, -1);
    Topology Tp;
    Tp.n_res = Rl.total();
    auto comp = [&](int piece) {
        int r = uf.find(piece);
        if (comp_id[r] < 0) {
            comp_id[r] = int(Tp.comps.size());
            Tp.comps.emplace_back();
        }
        return comp_id[r];
    };
    for (int i = 0; i < nF; ++i) {
        auto& C = Tp.comps[comp(i)];
        C.fmask |= 1u << i;
        C.chi += 1;
    }
    for (int i = 0; i < nG; ++i) {
        auto& C = Tp.comps[comp(nF + i)];
        C.gmask |= 1u << i;
        C.chi += 1;
    }
    for (int l : glued_arcs) Tp.comps[comp(l)].chi -= 1;
    // result loops, located through any of their points or circles
    std::vector<int> rep(Rl.arc_loops, -1);
    for (int i = 0; i < m; ++i)
        if (rep[Rl.loop_of_point[i]] < 0) rep[Rl.loop_of_point[i]] = F.loop_of_point[i];
    for (int l = 0; l < Rl.arc_loops; ++l) Tp.comps[comp(rep[l])].res.push_back(std::uint8_t(l));
    for (int k = 0; k < cS; ++k) Tp.comps[comp(F.arc_loops + k)].res.push_back(std::uint8_t(Rl.arc_loops + k));
    for (int k = 0; k < cU; ++k) Tp.comps[comp(nF + G.arc_loops + cT + k)].res.push_back(std::uint8_t(Rl.arc_loops + cS + k));
    return Tp;
}

template <class R>
Terms<R> apply_terms(const Topology& T, const Terms<R>& f, const Terms<R>& g, std::uint32_t eps_src = 0, std::uint32_t eps_tgt = 0) {
    Terms<R> out;
    for (auto& a : f)
        for (auto& b : g) {
            R ab = a.c * b.c;
            apply_topology(T, a.dots, b.dots, eps_src, eps_tgt,
                           [&](std::uint32_t m, long long c) { add_term(out, m, ab * R::from_int(c)); });
        }
    return out;
}

// K-linear combination of disk-form surfaces between two tangles.
template <class R>
struct DottedCobordism {
    Tangle source, target;
    Terms<R> terms;

    LoopStructure loop_structure() const { return loops(source.partner, target.partner, source.circles, target.circles); }

    int degree() const { return target.q - source.q; }

    // Number of twice-dotted-sphere factors in a summand; negative means the degree is inconsistent.
    int hpow(std::uint32_t dots) const {
        int twice = degree() + loop_structure().total() - source.size() / 2 - 2 * std::popcount(dots);
        return (twice & 1) ? -1 : twice / 2;
    }

    bool is_zero_map() const { return terms.empty(); }

    friend bool operator==(const DottedCobordism& a, const DottedCobordism& b) {
        return a.source == b.source && a.target == b.target && terms_equal(a.terms, b.terms);
    }
};

// An unreduced surface: each component lists its boundary loops (indices into loops(source,target)),
// its genus and its number of dots. Components without loops are closed.
struct DottedSurface {
    Tangle source, target;
    struct Component {
        std::vector<int> loops;
        int genus = 0;
        int dots = 0;
    };
    std::vector<Component> components;
};

template <class R>
DottedCobordism<R> reduce(const DottedSurface& s, const R& c) {
    DottedCobordism<R> out{s.source, s.target, {}};
    int n = loops(s.source.partner, s.target.partner, s.source.circles, s.target.circles).total();
    std::vector<int> seen(n, 0);
    Topology T;
    T.n_res = n;
    for (auto& comp : s.components) {
        Topology::Component C;
        for (int l : comp.loops) {
            if (l < 0 || l >= n || seen[l]++) throw CobError("surface components must partition the boundary loops");
            C.res.push_back(std::uint8_t(l));
        }
        C.chi = 2 - 2 * comp.genus - int(comp.loops.size());
        if (comp.dots > 0) C.fmask = 1;
        T.comps.push_back(C);
    }
    for (int l = 0; l < n; ++l)
        if (!seen[l]) throw CobError("surface components must partition the boundary loops");
    apply_topology(T, 1u, 0u, 0u, 0u, [&](std::uint32_t m, long long k) { add_term(out.terms, m, c * R::from_int(k)); });
    return out;
}

// g o f; f.target and g.source must be the same object with the same shift.
template <class R>
DottedCobordism<R> compose(const DottedCobordism<R>& g, const DottedCobordism<R>& f) {
    if (!(f.target == g.source)) throw CobError("compose: boundary objects differ");
    Topology T = compose_topology(f.source.partner, f.target.partner, g.target.partner, f.source.circles, f.target.circles,
                                  g.target.circles);
    return {f.source, g.target, apply_terms(T, f.terms, g.terms)};
}


// Strips over the arcs and tubes over the circles, in disk form.
template <class R>
DottedCobordism<R> identity(const Tangle& t) {
    DottedSurface s{t, t, {}};
    int arcs = t.size() / 2;
    for (int a = 0; a < arcs; ++a) s.components.push_back({{a}, 0, 0});
    for (int k = 0; k < t.circles; ++k) s.components.push_back({{arcs + k, arcs + t.circles + k}, 0, 0});
    return reduce<R>(s, R::one());
}

template <class R>
DottedCobordism<R> operator+(DottedCobordism<R> a, const DottedCobordism<R>& b) {
    if (!(a.source == b.source && a.target == b.target)) throw CobError("sum of morphisms with different ends");
    add_terms(a.terms, b.terms, R::one());
    return a;
}

template <class R>
DottedCobordism<R> scale(DottedCobordism<R> a, const R& k) {
    Terms<R> t;
    add_terms(t, a.terms, k);
    a.terms = std::move(t);
    return a;
}

// The circle-removing isomorphism t = t'{+1} (+) t'{-1} for the last circle of t.
template <class R>
struct DeloopIso {
    Tangle plus, minus;
    DottedCobordism<R> into_plus, into_minus, out_plus, out_minus;
};

template <class R>
DeloopIso<R> deloop_iso(const Tangle& t) {
    if (t.circles < 1) throw CobError("deloop: no circle");
    DeloopIso<R> d;
    d.plus = t;
    d.plus.circles -= 1;
    d.plus.q += 1;
    d.minus = d.plus;
    d.minus.q -= 2;
    // loops(t, t') are the arcs, the source circles, then the target circles
    int arcs = t.size() / 2;
    auto surface = [&](const Tangle& src, const Tangle& tgt, bool capped_is_source, int dots) {
        DottedSurface s{src, tgt, {}};
        for (int a = 0; a < arcs; ++a) s.components.push_back({{a}, 0, 0});
        int cs = src.circles, ct = tgt.circles;
        int common = std::min(cs, ct);
        for (int k = 0; k < common; ++k) s.components.push_back({{arcs + k, arcs + cs + k}, 0, 0});
        int lone = capped_is_source ? arcs + cs - 1 : arcs + cs + ct - 1;
        s.components.push_back({{lone}, 0, dots});
        return s;
    };
    // deaths cap the last source circle; births create the last target circle
    auto death_dotted = reduce<R>(surface(t, d.plus, true, 1), R::one());
    auto death_plain_p = reduce<R>(surface(t, d.plus, true, 0), R::one());
    d.into_plus = death_dotted + scale(death_plain_p, -R::one());
    d.into_minus = reduce<R>(surface(t, d.minus, true, 0), R::one());
    d.out_plus = reduce<R>(surface(d.plus, t, false, 0), R::one());
    d.out_minus = reduce<R>(surface(d.minus, t, false, 1), R::one());
    return d;
}

// Closed morphism between empty tangles: a single multiple of I^(jump/2).
template <class R>
std::pair<R, int> evaluate(const DottedCobordism<R>& c) {
    if (c.source.size() != 0 || c.target.size() != 0 || c.source.circles || c.target.circles)
        throw CobError("evaluate: not a closed morphism");
    int jump = c.degree();
    if (jump < 0 || (jump & 1)) throw CobError("evaluate: bad quantum jump");
    R v{};
    for (auto& t : c.terms) v += t.c;
    return {v, jump};
}

} // namespace sinv
