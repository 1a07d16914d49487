#pragma once

#include <algorithm>
#include <climits>
#include <iterator>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "coeff.hpp"
#include "complex.hpp"
#include "diagram.hpp"
#include "sinv.hpp"

namespace sinv {

struct NotSaturated : std::logic_error {
    using std::logic_error::logic_error;
};

struct Slide {
    int x = 0, y = 0;
    Z4 u;
};

// Elementary summand of a quantum level: a 2-edge from source (degree h) to target (degree h+1).
struct Elementary {
    int source = 0, target = 0, h = 0;
};

struct Z4NormalForm {
    BasedComplex<Z4> complex;
    std::map<int, std::vector<Elementary>> levels;
    std::vector<Slide> slides;
};

namespace detail {

inline std::vector<int> level_targets(const BasedComplex<Z4>& D, int x) {
    std::vector<int> r;
    for (auto& [b, c] : D.out[x])
        if (D.gens[b].q == D.gens[x].q) r.push_back(b);
    return r;
}

inline std::vector<int> level_sources(const BasedComplex<Z4>& D, int t) {
    std::vector<int> r;
    for (int a : D.in[t])
        if (D.gens[a].q == D.gens[t].q) r.push_back(a);
    return r;
}

} // namespace detail

// Handle slides inside each quantum level until every generator has at most one level 2-edge.
inline Z4NormalForm normal_form(BasedComplex<Z4> D) {
    Z4NormalForm N;
    std::map<int, std::map<int, std::vector<int>>> by_level; // q -> h -> generators
    for (int i = 0; i < int(D.gens.size()); ++i)
        if (D.gens[i].alive) by_level[D.gens[i].q][D.gens[i].h].push_back(i);
    for (int a = 0; a < int(D.gens.size()); ++a)
        for (auto& [b, c] : D.out[a])
            if (D.gens[a].q == D.gens[b].q && is_unit(c)) throw NotSaturated("unit entry inside a quantum level");

    auto do_slide = [&](int x, int y, Z4 u) {
        D.slide(x, y, u);
        N.slides.push_back({x, y, u});
    };

    for (auto it = by_level.rbegin(); it != by_level.rend(); ++it) {
        int q = it->first;
        auto& per_h = it->second;
        std::vector<Elementary> summands;
        for (auto& [h, sources] : per_h) {
            for (int x : sources) {
                auto ts = detail::level_targets(D, x);
                if (ts.empty()) continue;
                int t = ts[0];
                // other level targets of x: t <- t + t2 removes x -> t2
                for (std::size_t k = 1; k < ts.size(); ++k) do_slide(t, ts[k], Z4::one());
                // other level sources into t: x2 <- x2 + x removes x2 -> t
                for (int x2 : detail::level_sources(D, t))
                    if (x2 != x) do_slide(x2, x, Z4::one());
                summands.push_back({x, t, h});
            }
        }
        for (auto& e : summands) {
            if (detail::level_targets(D, e.source) != std::vector<int>{e.target} ||
                detail::level_sources(D, e.target) != std::vector<int>{e.source})
                throw std::logic_error("level differential is not diagonal");
            if (!detail::level_targets(D, e.target).empty())
                throw std::logic_error("elementary summand of length > 1");
        }
        if (!summands.empty()) N.levels[q] = std::move(summands);
    }
    for (int a = 0; a < int(D.gens.size()); ++a)
        for (auto& [b, c] : D.out[a])
            if (D.gens[b].q < D.gens[a].q) throw std::logic_error("slide broke the filtration");
    N.complex = std::move(D);
    return N;
}

// A mod-2 chain: sorted generator ids with coefficient 1.
using Chain2 = std::vector<int>;

inline Chain2 add_chains(const Chain2& a, const Chain2& b) {
    Chain2 r;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

// Targets of level-q summands from degree -1 to degree 0 span the image of Sq^1.
inline std::vector<int> sq1_image(const Z4NormalForm& N, int q) {
    std::vector<int> r;
    auto it = N.levels.find(q);
    if (it == N.levels.end()) return r;
    for (auto& e : it->second)
        if (e.h == -1) r.push_back(e.target);
    std::sort(r.begin(), r.end());
    return r;
}

namespace detail {

// Incremental F2 row reduction keyed by pivot = smallest element.
class F2Span {
public:
    // Reduces v against the basis; returns the remainder and the combination used.
    std::pair<Chain2, std::vector<int>> reduce(Chain2 v) const {
        std::vector<int> used;
        bool changed = true;
        while (changed && !v.empty()) {
            changed = false;
            for (std::size_t i = 0; i < rows_.size(); ++i)
                if (std::binary_search(v.begin(), v.end(), pivots_[i])) {
                    v = add_chains(v, rows_[i]);
                    used = add_chains(used, tags_[i]);
                    changed = true;
                }
        }
        return {v, used};
    }
    bool contains(const Chain2& v) const { return reduce(v).first.empty(); }
    // Adds v tagged by the combination of inputs it came from; returns false if dependent.
    bool insert(const Chain2& v, const std::vector<int>& tag) {
        auto [r, used] = reduce(v);
        if (r.empty()) return false;
        rows_.push_back(r);
        pivots_.push_back(r.front());
        tags_.push_back(add_chains(used, tag));
        return true;
    }
    const std::vector<Chain2>& tags() const { return tags_; }

private:
    std::vector<Chain2> rows_;
    std::vector<int> pivots_;
    std::vector<std::vector<int>> tags_;
};

inline Chain2 mod2_coboundary(const BasedComplex<Z4>& D, const Chain2& c) {
    Chain2 r;
    for (int g : c)
        for (auto& [b, k] : D.out[g])
            if (lift(k) & 1) r = add_chains(r, {b});
    return r;
}

} // namespace detail

// Basis of the classes in span(classes) that lift to mod-2 cocycles of F_q: d(c) must be the mod-2
// coboundary of a degree-0 chain in F_{q+2}.
inline std::vector<Chain2> intersect_with_p(const Z4NormalForm& N, int q, const std::vector<Chain2>& classes) {
    const auto& D = N.complex;
    detail::F2Span high;
    int k = 0;
    for (int g : D.alive_in_degree(0))
        if (D.gens[g].q >= q + 2) high.insert(detail::mod2_coboundary(D, {g}), {--k});
    // kernel of span(classes) -> d(.) modulo d(F_{q+2}^0)
    detail::F2Span img;
    std::vector<Chain2> basis;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        Chain2 r = high.reduce(detail::mod2_coboundary(D, classes[i])).first;
        if (img.insert(r, {int(i)})) continue;
        // dependent image: combination of classes with d in d(F_{q+2})
        auto used = img.reduce(r).second;
        Chain2 v = classes[i];
        for (int j : used) v = add_chains(v, classes[j]);
        if (!v.empty()) basis.push_back(v);
    }
    return basis;
}

// Nonzero in H^0 of the mod-2 quotient complex obtained by dropping generators with q >= q_cut.
inline bool survives_quotient(const Z4NormalForm& N, int q_cut, const Chain2& cls) {
    const auto& D = N.complex;
    Chain2 c;
    for (int g : cls)
        if (D.gens[g].q < q_cut) c.push_back(g);
    if (c.empty()) return false;
    detail::F2Span bd;
    for (int a : D.alive_in_degree(-1)) {
        if (D.gens[a].q >= q_cut) continue;
        Chain2 im;
        for (auto& [b, k] : D.out[a])
            if ((lift(k) & 1) && D.gens[b].q < q_cut) im = add_chains(im, {b});
        bd.insert(im, {a});
    }
    return !bd.contains(c);
}

struct Sq1Quadruple {
    int r_plus = 0, s_plus = 0, r_minus = 0, s_minus = 0;
    friend bool operator==(const Sq1Quadruple&, const Sq1Quadruple&) = default;
};

// The upper half (r+, s+) read off a normal form, given s over F2.
inline std::pair<int, int> refine_plus(const Z4NormalForm& N, int s_f2) {
    auto lifted = [&](int q) {
        std::vector<Chain2> cls;
        for (int t : sq1_image(N, q)) cls.push_back({t});
        return intersect_with_p(N, q, cls);
    };
    auto any_survives = [&](const std::vector<Chain2>& basis, int q_cut) {
        for (auto& v : basis)
            if (survives_quotient(N, q_cut, v)) return true;
        return false;
    };
    int r = any_survives(lifted(s_f2 + 1), s_f2 + 3) ? s_f2 + 2 : s_f2;
    int s = any_survives(lifted(s_f2 - 1), s_f2 + 1) ? s_f2 + 2 : s_f2;
    return {r, s};
}

inline BasedComplex<Fp<2>> reduce_mod2(const BasedComplex<Z4>& D) {
    return D.map_coefficients<Fp<2>>([](const Z4& c) { return Fp<2>::from_int(lift(c)); });
}

// The Z/4 complex of a diagram in the widened window.
inline BasedComplex<Z4> z4_complex(const PDCode& pd, ScanStats* stats = nullptr) {
    auto od = orient_and_sign(pd);
    return from_filtered(scan<Z4>(scan_order(od), ScanMode::Sq1, stats));
}

struct Sq1Result {
    int s_f2 = 0;
    Sq1Quadruple quad;
    int s_f2_mirror = 0;
};

struct HalfResult {
    int s_f2 = 0;
    int r = 0, s = 0;
};

inline HalfResult refine_half(const PDCode& pd) {
    if (pd.size() <= 1) return {0, 0, 0};
    auto D = z4_complex(pd);
    int s2 = s_from_complex(reduce_mod2(D)).s;
    auto [r, s] = refine_plus(normal_form(std::move(D)), s2);
    return {s2, r, s};
}

// Full quadruple; the lower half comes from the mirror diagram.
inline Sq1Result refine(const PDCode& pd) {
    auto plus = refine_half(pd);
    auto minus = refine_half(mirror(pd));
    return {plus.s_f2, {plus.r, plus.s, -minus.r, -minus.s}, minus.s_f2};
}

} // namespace sinv
