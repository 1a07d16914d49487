#pragma once

#include <algorithm>
#include <climits>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coeff.hpp"
#include "complex.hpp"
#include "diagram.hpp"

namespace sinv {

struct NotClosed : std::logic_error {
    using std::logic_error::logic_error;
};

struct Inconsistent : std::logic_error {
    using std::logic_error::logic_error;
};

// Free complex on generators with scalar coboundary; entry a -> b has h(b) = h(a) + 1 and q(b) >= q(a).
template <class R>
class BasedComplex {
public:
    struct Generator {
        int h = 0;
        int q = 0;
        bool alive = true;
    };
    using Entry = std::pair<int, R>;

    std::vector<Generator> gens;
    std::vector<std::vector<Entry>> out;
    std::vector<std::vector<int>> in;

    int add_generator(int h, int q) {
        gens.push_back({h, q, true});
        out.emplace_back();
        in.emplace_back();
        return int(gens.size()) - 1;
    }

    R entry(int a, int b) const {
        auto& v = out[a];
        auto it = std::lower_bound(v.begin(), v.end(), b, [](const Entry& e, int k) { return e.first < k; });
        return (it != v.end() && it->first == b) ? it->second : R{};
    }

    void add_to_entry(int a, int b, const R& c) {
        if (is_zero(c)) return;
        auto& v = out[a];
        auto it = std::lower_bound(v.begin(), v.end(), b, [](const Entry& e, int k) { return e.first < k; });
        if (it != v.end() && it->first == b) {
            it->second += c;
            if (is_zero(it->second)) {
                v.erase(it);
                auto& w = in[b];
                w.erase(std::lower_bound(w.begin(), w.end(), a));
            }
            return;
        }
        v.insert(it, {b, c});
        auto& w = in[b];
        w.insert(std::lower_bound(w.begin(), w.end(), a), a);
    }

    void set_entry(int a, int b, const R& c) { add_to_entry(a, b, c - entry(a, b)); }

    void kill(int i) {
        gens[i].alive = false;
        for (auto& [b, c] : out[i]) {
            auto& w = in[b];
            w.erase(std::lower_bound(w.begin(), w.end(), i));
        }
        for (int a : in[i]) {
            auto& v = out[a];
            v.erase(std::lower_bound(v.begin(), v.end(), i, [](const Entry& e, int k) { return e.first < k; }));
        }
        out[i].clear();
        in[i].clear();
    }

    // Gaussian elimination along the unit entry b1 -> b2.
    void cancel(int b1, int b2) {
        R k = entry(b1, b2);
        if (!is_unit(k)) throw NotCancellable("entry is not a unit");
        R minus_kinv = -invert(k);
        std::vector<std::pair<int, R>> sources, targets;
        for (int a : in[b2])
            if (a != b1) sources.push_back({a, entry(a, b2)});
        for (auto& [e, c] : out[b1])
            if (e != b2) targets.push_back({e, c});
        for (auto& [a, d] : sources)
            for (auto& [e, g] : targets) add_to_entry(a, e, g * minus_kinv * d);
        kill(b1);
        kill(b2);
    }

    // Basis change x <- x + u y for generators of equal degree.
    void slide(int x, int y, const R& u) {
        if (gens[x].h != gens[y].h) throw std::logic_error("slide across degrees");
        if (gens[y].q < gens[x].q) throw std::logic_error("slide breaks the filtration");
        auto ys = out[y];
        for (auto& [b, c] : ys) add_to_entry(x, b, u * c);
        auto xs = in[x];
        for (int s : xs) add_to_entry(s, y, -(u * entry(s, x)));
    }

    std::vector<int> alive_in_degree(int h) const {
        std::vector<int> r;
        for (int i = 0; i < int(gens.size()); ++i)
            if (gens[i].alive && gens[i].h == h) r.push_back(i);
        return r;
    }

    int alive_count() const {
        int n = 0;
        for (auto& g : gens) n += g.alive;
        return n;
    }

    bool check_d_squared() const {
        for (int a = 0; a < int(gens.size()); ++a) {
            if (!gens[a].alive) continue;
            std::map<int, R> acc;
            for (auto& [b, f] : out[a])
                for (auto& [e, g] : out[b]) acc[e] += f * g;
            for (auto& [e, c] : acc)
                if (!is_zero(c)) return false;
        }
        return true;
    }

    bool check_filtration(bool strict) const {
        for (int a = 0; a < int(gens.size()); ++a)
            for (auto& [b, c] : out[a]) {
                if (gens[b].h != gens[a].h + 1) return false;
                if (strict ? gens[b].q <= gens[a].q : gens[b].q < gens[a].q) return false;
            }
        return true;
    }

    // Generators h -> -h, q -> -q with the transposed coboundary.
    BasedComplex dual() const {
        BasedComplex D;
        for (auto& g : gens) {
            D.add_generator(-g.h, -g.q);
            D.gens.back().alive = g.alive;
        }
        for (int a = 0; a < int(gens.size()); ++a)
            for (auto& [b, c] : out[a]) D.add_to_entry(b, a, c);
        return D;
    }

    template <class R2, class F>
    BasedComplex<R2> map_coefficients(F&& f) const {
        BasedComplex<R2> D;
        for (auto& g : gens) {
            D.add_generator(g.h, g.q);
            D.gens.back().alive = g.alive;
        }
        for (int a = 0; a < int(gens.size()); ++a)
            for (auto& [b, c] : out[a]) D.add_to_entry(a, b, f(c));
        return D;
    }
};

// Evaluates a complex of empty tangles; with khovanov set, entries carrying a power of I are dropped.
template <class R>
BasedComplex<R> from_filtered(const FilteredComplex<R>& C, bool khovanov = false) {
    if (!C.boundary.empty()) throw NotClosed("complex still has boundary points");
    BasedComplex<R> D;
    std::vector<int> idx(C.objects.size(), -1);
    for (int i = 0; i < int(C.objects.size()); ++i) {
        if (!C.objects[i].alive) continue;
        if (!C.matchings[C.objects[i].match].empty()) throw NotClosed("object is not the empty tangle");
        idx[i] = D.add_generator(C.objects[i].h, C.objects[i].q);
    }
    for (int i = 0; i < int(C.objects.size()); ++i) {
        if (idx[i] < 0) continue;
        for (auto& [b, t] : C.out[i]) {
            if (khovanov && C.objects[b].q != C.objects[i].q) continue;
            R c{};
            for (auto& term : t) c += term.c;
            D.add_to_entry(idx[i], idx[b], c);
        }
    }
    return D;
}

namespace detail {

// Smallest q, then lowest index; uniform among all candidates when rng is given.
template <class R>
int pick_partner(const BasedComplex<R>& D, const std::vector<int>& cands, std::mt19937* rng) {
    if (rng) return cands[std::uniform_int_distribution<int>(0, int(cands.size()) - 1)(*rng)];
    int b = cands[0];
    for (int c : cands)
        if (std::pair(D.gens[c].q, c) < std::pair(D.gens[b].q, b)) b = c;
    return b;
}

} // namespace detail

// Cancels degree-0 generators of maximal q with nonzero coboundary until delta vanishes on degree 0.
// Without rng: partner of smallest q, then lowest index. With rng: uniform among admissible choices.
template <class R>
void cancel_above(BasedComplex<R>& D, std::mt19937* rng = nullptr) {
    while (true) {
        std::vector<int> cands;
        int best_q = INT_MIN;
        for (int i : D.alive_in_degree(0))
            if (!D.out[i].empty()) best_q = std::max(best_q, D.gens[i].q);
        for (int i : D.alive_in_degree(0))
            if (!D.out[i].empty() && D.gens[i].q == best_q) cands.push_back(i);
        if (cands.empty()) return;
        int c = rng ? cands[std::uniform_int_distribution<int>(0, int(cands.size()) - 1)(*rng)] : cands[0];
        std::vector<int> partners;
        for (auto& [b, k] : D.out[c])
            if (is_unit(k)) partners.push_back(b);
        if (partners.empty()) throw Inconsistent("no unit partner over a non-field ring");
        D.cancel(c, detail::pick_partner(D, partners, rng));
    }
}

// Cancels degree-0 generators of minimal q hit by a unit from degree -1 until nothing maps into degree 0.
template <class R>
void cancel_below(BasedComplex<R>& D, std::mt19937* rng = nullptr) {
    while (true) {
        int best_q = INT_MAX;
        for (int i : D.alive_in_degree(0))
            for (int a : D.in[i])
                if (is_unit(D.entry(a, i))) best_q = std::min(best_q, D.gens[i].q);
        std::vector<int> cands;
        for (int i : D.alive_in_degree(0)) {
            if (D.gens[i].q != best_q) continue;
            for (int a : D.in[i])
                if (is_unit(D.entry(a, i))) {
                    cands.push_back(i);
                    break;
                }
        }
        if (cands.empty()) break;
        int c = rng ? cands[std::uniform_int_distribution<int>(0, int(cands.size()) - 1)(*rng)] : cands[0];
        std::vector<int> partners;
        for (int a : D.in[c])
            if (is_unit(D.entry(a, c))) partners.push_back(a);
        D.cancel(detail::pick_partner(D, partners, rng), c);
    }
    for (int i : D.alive_in_degree(0))
        if (!D.in[i].empty()) throw Inconsistent("non-unit entries into degree 0 remain");
}

struct SResult {
    int s = 0;
    RingDescriptor ring;
    std::pair<int, int> witness{1, -1};
};

template <class R>
SResult read_s(const BasedComplex<R>& D) {
    auto z = D.alive_in_degree(0);
    if (z.size() != 2) throw Inconsistent("expected two survivors in degree 0, found " + std::to_string(z.size()));
    int q1 = D.gens[z[0]].q, q2 = D.gens[z[1]].q;
    if (q1 < q2) std::swap(q1, q2);
    if (q1 - q2 != 2) throw Inconsistent("survivors are not two apart");
    return {(q1 + q2) / 2, R::descriptor(), {q1, q2}};
}

template <class R>
SResult s_from_complex(BasedComplex<R> D, std::mt19937* rng = nullptr) {
    cancel_above(D, rng);
    cancel_below(D, rng);
    return read_s(D);
}

template <class R>
std::map<std::pair<int, int>, int> khovanov_table(const BasedComplex<R>& D) {
    std::map<std::pair<int, int>, int> t;
    for (auto& g : D.gens)
        if (g.alive) ++t[{g.h, g.q}];
    return t;
}

template <class R>
SResult s_invariant(const PDCode& pd, ScanStats* stats = nullptr) {
    if (pd.size() <= 1) return {0, R::descriptor(), {1, -1}};
    auto od = orient_and_sign(pd);
    auto C = scan<R>(scan_order(od), ScanMode::S, stats);
    return s_from_complex(from_filtered(C));
}

inline SResult s_invariant(const PDCode& pd, const RingDescriptor& ring, ScanStats* stats = nullptr) {
    return with_ring(ring, [&](auto tag) {
        using R = typename decltype(tag)::type;
        if (!ring.is_field()) throw std::invalid_argument("s requires a field");
        return s_invariant<R>(pd, stats);
    });
}

// Generator counts per (h, q) of the fully reduced complex.
template <class R>
std::map<std::pair<int, int>, int> khovanov_ranks(const PDCode& pd) {
    if (pd.size() == 0) return {{{0, 1}, 1}, {{0, -1}, 1}};
    auto od = orient_and_sign(pd);
    auto C = scan<R>(scan_order(od), ScanMode::Full);
    return khovanov_table(from_filtered(C));
}

} // namespace sinv
