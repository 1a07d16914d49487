// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any gated criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "oracles/cube.hpp"
#include "oracles/goeritz.hpp"
#include "random_complex.hpp"
#include "sinv/sq1.hpp"
#include "support.hpp"
#include "nonstandard_expected.hpp"

using namespace sinv;
using testsupport::load_pds;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    int failures = 0;
    std::ostringstream log;

    // Records a failed check; the first few are kept for the report.
    void check(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        if (failures++ < 3) log << (log.tellp() > 0 ? "; " : "") << what;
    }
};

int signature_oracle(const PDCode& pd) {
    auto od = orient_and_sign(pd);
    std::vector<bool> pos;
    for (int s : od.sign) pos.push_back(s > 0);
    return oracle::goeritz_signature(pd.crossings, pos);
}

std::string quad_string(const Sq1Quadruple& q) {
    return "(" + std::to_string(q.r_plus) + "," + std::to_string(q.s_plus) + "," + std::to_string(q.r_minus) + "," +
           std::to_string(q.s_minus) + ")";
}

std::map<std::string, PDCode> nonstandard_pds() {
    std::map<std::string, PDCode> r;
    for (auto& pd : load_pds("nonstandard.txt")) r[pd.name] = pd;
    return r;
}

Outcome fourteen_crossing_example() {
    Outcome o;
    auto pd = nonstandard_pds().at("14n19265");
    int sq = s_invariant<Q>(pd).s, s2 = s_invariant<F2>(pd).s;
    auto r = refine(pd);
    o.check(sq == 0, "s_Q = " + std::to_string(sq));
    o.check(s2 == -2, "s_F2 = " + std::to_string(s2));
    o.check(r.s_f2 == -2, "mod 2 s = " + std::to_string(r.s_f2));
    o.check(r.quad == Sq1Quadruple{0, 0, -2, -2}, "quadruple " + quad_string(r.quad));
    o.detail = "s_Q=" + std::to_string(sq) + " s_F2=" + std::to_string(s2) + " sq1=" + quad_string(r.quad);
    return o;
}

Outcome table_regression() {
    Outcome o;
    auto pds = nonstandard_pds();
    int rows = 0, fifteen = 0;
    for (auto& row : testsupport::nonstandard_expected()) {
        auto& pd = pds.at(row.name);
        auto r = refine(pd);
        auto q = r.quad;
        std::array<int, 4> got{q.r_plus, q.s_plus, q.r_minus, q.s_minus};
        int s3 = s_invariant<F3>(pd).s, s2 = s_invariant<F2>(pd).s;
        bool ok = got == row.quad && r.s_f2 == row.s_f2 && s2 == row.s_f2 && s3 == row.s_f3;
        o.check(ok, row.name + " gave " + quad_string(q) + " " + std::to_string(s2) + " " + std::to_string(s3));
        ++rows;
        fifteen += ok && row.name.rfind("15n", 0) == 0;
    }
    o.check(fifteen >= 5, "only " + std::to_string(fifteen) + " fifteen-crossing rows");
    o.detail = std::to_string(rows) + " rows, " + std::to_string(fifteen) + " with 15 crossings";
    return o;
}

Outcome positive_torus_knots() {
    Outcome o;
    for (int n : {3, 5, 7}) {
        auto pd = testsupport::torus_2n(n);
        int k = oracle::cube_detail::resolve(pd.crossings, 0, 2 * n).circles; // oriented resolution
        int expect = -k + n + 1;
        o.check(expect == n - 1, pd.name + ": oriented resolution has " + std::to_string(k) + " circles");
        for (auto ring : {"f2", "f3", "q"}) {
            int s = s_invariant(pd, RingDescriptor::parse(ring)).s;
            o.check(s == expect, pd.name + " over " + ring + " gave " + std::to_string(s));
        }
    }
    o.detail = "T(2,3), T(2,5), T(2,7) give 2, 4, 6";
    return o;
}

Outcome alternating_signature() {
    Outcome o;
    int n = 0;
    for (auto& pd : load_pds("alternating_le10.txt")) {
        int sigma = signature_oracle(pd);
        for (auto ring : {"f2", "f3", "f5", "q"}) {
            int s = s_invariant(pd, RingDescriptor::parse(ring)).s;
            o.check(s == -sigma, pd.name + " over " + ring + ": s=" + std::to_string(s) + " sigma=" + std::to_string(sigma));
        }
        ++n;
    }
    o.detail = std::to_string(n) + " knots over F2, F3, F5, Q";
    return o;
}

Outcome dense_oracle() {
    Outcome o;
    int n = 0;
    for (auto& pd : load_pds("knots_le8.txt")) {
        auto C = oracle::build_cube(pd.crossings);
        o.check(khovanov_ranks<F2>(pd) == oracle::khovanov_ranks<F2>(C), pd.name + " Kh over F2");
        o.check(khovanov_ranks<Q>(pd) == oracle::khovanov_ranks<Q>(C), pd.name + " Kh over Q");
        o.check(s_invariant<F2>(pd).s == oracle::bar_natan_s<F2>(C), pd.name + " s over F2");
        o.check(s_invariant<Q>(pd).s == oracle::bar_natan_s<Q>(C), pd.name + " s over Q");
        ++n;
    }
    o.detail = std::to_string(n) + " knots, Kh and s over F2 and Q";
    return o;
}

Outcome diagram_invariance() {
    Outcome o;
    auto pds = load_pds("invariance_pairs.txt");
    int pairs = 0;
    for (std::size_t i = 0; i + 1 < pds.size(); i += 2) {
        auto &a = pds[i], &b = pds[i + 1];
        o.check(a.crossings != b.crossings, a.name + " and " + b.name + " are the same diagram");
        for (auto ring : {"f2", "f3", "q"}) {
            auto d = RingDescriptor::parse(ring);
            o.check(s_invariant(a, d).s == s_invariant(b, d).s, a.name + " vs " + b.name + " over " + ring);
        }
        auto ra = refine(a), rb = refine(b);
        o.check(ra.quad == rb.quad && ra.s_f2 == rb.s_f2, a.name + " " + quad_string(ra.quad) + " vs " + quad_string(rb.quad));
        ++pairs;
    }
    o.check(pairs >= 20, "only " + std::to_string(pairs) + " pairs");
    o.detail = std::to_string(pairs) + " pairs";
    return o;
}

template <class R>
void deloop_round_trip(Outcome& o, const Tangle& t) {
    auto d = deloop_iso<R>(t);
    bool ok = compose(d.into_plus, d.out_plus) == identity<R>(d.plus) && compose(d.into_minus, d.out_minus) == identity<R>(d.minus) &&
              compose(d.into_plus, d.out_minus).is_zero_map() && compose(d.into_minus, d.out_plus).is_zero_map() &&
              compose(d.out_plus, d.into_plus) + compose(d.out_minus, d.into_minus) == identity<R>(t);
    o.check(ok, "deloop of a " + std::to_string(t.size()) + "-point tangle with " + std::to_string(t.circles) + " circles");
}

Outcome structural() {
    Outcome o;
    int knots = 0;
    for (auto& pd : load_pds("knots_le8.txt")) {
        auto order = scan_order(orient_and_sign(pd));
        try {
            auto full = scan<F2>(order, ScanMode::Full, nullptr, true);
            auto sq = scan<Q>(order, ScanMode::S, nullptr, true);
            auto z4 = scan<Z4>(order, ScanMode::Sq1, nullptr, true);
            o.check(full.check_degrees() && sq.check_degrees() && z4.check_degrees(), pd.name + " filtration degree");
            o.check(from_filtered(sq).check_filtration(true), pd.name + " strict over Q");
            o.check(from_filtered(scan<F3>(order, ScanMode::S)).check_filtration(true), pd.name + " strict over F3");
            o.check(from_filtered(full).check_filtration(true), pd.name + " strict over F2");
        } catch (const std::exception& e) {
            o.check(false, pd.name + ": " + e.what());
        }
        ++knots;
    }
    int tangles = 0;
    for (auto partner : {Matching{}, Matching{1, 0}, Matching{1, 0, 3, 2}, Matching{3, 2, 1, 0}, Matching{1, 0, 5, 4, 3, 2}})
        for (int circles = 1; circles <= 3; ++circles) {
            Tangle t;
            for (int i = 0; i < int(partner.size()); ++i) t.points.push_back(i);
            t.partner = partner;
            t.circles = circles;
            t.q = circles - 1;
            deloop_round_trip<Zint>(o, t);
            deloop_round_trip<F3>(o, t);
            ++tangles;
        }
    std::mt19937 rng(7);
    int complexes = 300;
    for (int trial = 0; trial < complexes; ++trial) {
        auto D = testsupport::random_dense(rng, 1 + trial % 7, 3 * (1 + trial % 7));
        o.check(testsupport::elimination_preserves_homology<F2>(D) && testsupport::elimination_preserves_homology<F3>(D) &&
                    testsupport::elimination_preserves_homology<Q>(D),
                "random complex " + std::to_string(trial));
    }
    o.detail = std::to_string(knots) + " scans, " + std::to_string(tangles) + " deloops, " + std::to_string(complexes) +
               " random eliminations";
    return o;
}

Outcome bounds() {
    Outcome o;
    int n = 0, non_standard = 0;
    for (auto& pd : load_pds("knots_le12.txt")) {
        auto D = z4_complex(pd);
        int s = s_from_complex(reduce_mod2(D)).s;
        auto [rp, sp] = refine_plus(normal_form(D), s);
        // the lower half read from the dual complex of this diagram
        auto dual = D.dual();
        int sd = s_from_complex(reduce_mod2(dual)).s;
        auto [rd, sdd] = refine_plus(normal_form(std::move(dual)), sd);
        int r_minus = -rd, s_minus = -sdd;
        // against the plus half of the mirror diagram
        auto m = refine_half(mirror(pd));
        const std::string& k = pd.name;
        o.check(s <= rp && rp <= s + 2 && s <= sp && sp <= s + 2, k + ": plus half (" + std::to_string(rp) + "," + std::to_string(sp) + ") vs s=" + std::to_string(s));
        o.check(r_minus <= s && s - 2 <= r_minus && s_minus <= s && s - 2 <= s_minus, k + ": minus half out of range");
        o.check(m.s_f2 == -s, k + ": s of mirror");
        o.check(r_minus == -m.r && s_minus == -m.s, k + ": mirror relation");
        non_standard += !(rp == s && sp == s && r_minus == s && s_minus == s);
        ++n;
    }
    o.detail = std::to_string(n) + " knots, " + std::to_string(non_standard) + " non-standard";
    return o;
}

Outcome sixteen_crossings() {
    Outcome o;
    auto pds = load_pds("knot16.txt");
    ScanStats stats;
    int s = s_invariant<F2>(pds.at(0), &stats).s;
    o.detail = pds.at(0).name + " s_F2=" + std::to_string(s);
    return o;
}

struct Criterion {
    int id;
    const char* what;
    double budget_s; // 0: no time limit
    bool gated;
    std::function<Outcome()> run;
};

} // namespace

int main() {
    std::vector<Criterion> criteria{
        {1, "14n19265 s over Q and F2, Sq1 quadruple", 5, true, fourteen_crossing_example},
        {2, "non-standard knot regression", 60, true, table_regression},
        {3, "positive torus knots", 0, true, positive_torus_knots},
        {4, "alternating knots: s = -signature", 0, true, alternating_signature},
        {5, "dense cube oracle up to 8 crossings", 120, true, dense_oracle},
        {6, "diagram invariance", 0, true, diagram_invariance},
        {7, "structural invariants", 0, true, structural},
        {8, "Sq1 bounds and mirror relations up to 12 crossings", 0, true, bounds},
        {9, "16-crossing knot in mode s over F2 (reported only)", 60, false, sixteen_crossings},
    };
    bool all = true;
    for (auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0 && secs > c.budget_s)
            o.check(false, "took " + std::to_string(secs) + " s, budget " + std::to_string(int(c.budget_s)) + " s");
        std::printf("%s %d %s: %s [%.2f s]%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.what, o.detail.c_str(), secs,
                    o.failures ? " -- " : "", o.log.str().c_str());
        std::fflush(stdout);
        if (c.gated && !o.pass) all = false;
    }
    return all ? 0 : 1;
}
