#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sinv {

struct DiagramError : std::runtime_error {
    enum class Kind { ParseError, NotAKnot, Disconnected };
    Kind kind;
    DiagramError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
    const char* kind_name() const {
        switch (kind) {
        case Kind::ParseError: return "ParseError";
        case Kind::NotAKnot: return "NotAKnot";
        case Kind::Disconnected: return "Disconnected";
        }
        return "?";
    }
};

// Slots are listed counterclockwise; slots 0 and 2 lie on the under-strand.
struct PDCode {
    std::string name;
    std::vector<std::array<int, 4>> crossings;

    std::size_t size() const { return crossings.size(); }
};

namespace detail {

inline std::string strip_ws(const std::string& s) {
    std::string r;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) r += c;
    return r;
}

[[noreturn]] inline void parse_fail(const std::string& msg) {
    throw DiagramError(DiagramError::Kind::ParseError, msg);
}

// Reads a signed integer at s[pos], advancing pos.
inline int read_int(const std::string& s, std::size_t& pos) {
    std::size_t start = pos;
    if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
    std::size_t digits = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == digits || pos - digits > 9) parse_fail("expected integer at offset " + std::to_string(start));
    return std::stoi(s.substr(start, pos - start));
}

inline void expect(const std::string& s, std::size_t& pos, char c) {
    if (pos >= s.size() || s[pos] != c) parse_fail(std::string("expected '") + c + "' at offset " + std::to_string(pos));
    ++pos;
}

// occurrences[label] = list of (crossing, slot)
inline std::map<int, std::vector<std::pair<int, int>>> occurrences(const PDCode& pd) {
    std::map<int, std::vector<std::pair<int, int>>> occ;
    for (int c = 0; c < int(pd.size()); ++c)
        for (int s = 0; s < 4; ++s) occ[pd.crossings[c][s]].push_back({c, s});
    return occ;
}

// other[c][s] = (c', s') at the far end of the edge leaving slot s of crossing c.
inline std::vector<std::array<std::pair<int, int>, 4>> edge_ends(const PDCode& pd) {
    auto occ = occurrences(pd);
    std::vector<std::array<std::pair<int, int>, 4>> other(pd.size());
    for (auto& [label, v] : occ) {
        if (v.size() != 2) parse_fail("edge label " + std::to_string(label) + " occurs " + std::to_string(v.size()) + " times");
        other[v[0].first][v[0].second] = v[1];
        other[v[1].first][v[1].second] = v[0];
    }
    return other;
}

// Number of faces of the rotation system; a connected planar 4-valent diagram has n + 2.
inline int count_faces(const std::vector<std::array<std::pair<int, int>, 4>>& other) {
    int n = int(other.size());
    std::vector<std::array<bool, 4>> seen(n, {false, false, false, false});
    int faces = 0;
    for (int c = 0; c < n; ++c)
        for (int s = 0; s < 4; ++s) {
            if (seen[c][s]) continue;
            ++faces;
            int cc = c, ss = s;
            while (!seen[cc][ss]) {
                seen[cc][ss] = true;
                auto [c2, s2] = other[cc][ss];
                cc = c2;
                ss = (s2 + 1) % 4;
            }
        }
    return faces;
}

inline void validate(const PDCode& pd) {
    int n = int(pd.size());
    if (n == 0) return;
    auto other = edge_ends(pd);

    std::vector<int> comp(n, -1);
    std::vector<int> stack{0};
    comp[0] = 0;
    while (!stack.empty()) {
        int c = stack.back();
        stack.pop_back();
        for (int s = 0; s < 4; ++s) {
            int d = other[c][s].first;
            if (comp[d] < 0) {
                comp[d] = 0;
                stack.push_back(d);
            }
        }
    }
    if (std::count(comp.begin(), comp.end(), -1) > 0)
        throw DiagramError(DiagramError::Kind::Disconnected, "diagram is not connected");

    // walk straight through every crossing
    int steps = 0;
    int c = 0, s = 0;
    do {
        auto [c2, s2] = other[c][(s + 2) % 4];
        c = c2;
        s = s2;
        ++steps;
    } while (!(c == 0 && s == 0) && steps <= 2 * n);
    if (steps != 2 * n) throw DiagramError(DiagramError::Kind::NotAKnot, "diagram has more than one component");

    if (count_faces(other) != n + 2) parse_fail("crossing data is not planar");
}

} // namespace detail

// Accepts "PD[X[a,b,c,d],...]"; whitespace is ignored.
inline PDCode parse_pd(const std::string& text, std::string name = {}) {
    std::string s = detail::strip_ws(text);
    std::size_t pos = 0;
    if (s.compare(0, 3, "PD[") != 0) detail::parse_fail("expected 'PD['");
    pos = 3;
    PDCode pd;
    pd.name = std::move(name);
    if (pos < s.size() && s[pos] == ']') {
        ++pos;
    } else {
        while (true) {
            detail::expect(s, pos, 'X');
            detail::expect(s, pos, '[');
            std::array<int, 4> x{};
            for (int i = 0; i < 4; ++i) {
                if (i) detail::expect(s, pos, ',');
                x[i] = detail::read_int(s, pos);
            }
            detail::expect(s, pos, ']');
            pd.crossings.push_back(x);
            if (pos < s.size() && s[pos] == ',') {
                ++pos;
                continue;
            }
            detail::expect(s, pos, ']');
            break;
        }
    }
    if (pos != s.size()) detail::parse_fail("trailing characters after PD code");
    detail::validate(pd);
    return pd;
}

// Dowker-Thistlethwaite code, e.g. "DT[4,6,2]". A negative entry marks the even passage as the
// over-strand. The planar realization is found by search over the local turn at each crossing,
// with the first crossing's turn fixed; this pins the mirror convention.
inline PDCode parse_dt(const std::string& text, std::string name = {}) {
    std::string s = detail::strip_ws(text);
    if (s.compare(0, 3, "DT[") != 0) detail::parse_fail("expected 'DT['");
    std::size_t pos = 3;
    std::vector<int> code;
    if (pos < s.size() && s[pos] == ']') {
        ++pos;
    } else {
        while (true) {
            code.push_back(detail::read_int(s, pos));
            if (pos < s.size() && s[pos] == ',') {
                ++pos;
                continue;
            }
            detail::expect(s, pos, ']');
            break;
        }
    }
    if (pos != s.size()) detail::parse_fail("trailing characters after DT code");
    int n = int(code.size());
    PDCode pd;
    pd.name = std::move(name);
    if (n == 0) return pd;

    // passage k (1..2n) lies on crossing cross_of[k]; edge k runs from passage k to k+1
    std::vector<int> cross_of(2 * n + 1, -1);
    std::vector<bool> even_over(n);
    for (int i = 0; i < n; ++i) {
        int e = std::abs(code[i]);
        if (e % 2 != 0 || e < 2 || e > 2 * n || cross_of[e] >= 0) detail::parse_fail("invalid DT code");
        cross_of[2 * i + 1] = i;
        cross_of[e] = i;
        even_over[i] = code[i] < 0;
    }
    auto in_edge = [&](int k) { return k == 1 ? 2 * n : k - 1; };
    auto out_edge = [&](int k) { return k; };

    std::vector<int> odd(n), even(n);
    for (int i = 0; i < n; ++i) {
        odd[i] = 2 * i + 1;
        even[i] = std::abs(code[i]);
    }
    // ccw order at crossing i: in_odd, A, out_odd, B with (A,B) = (in_even,out_even) if turn, else swapped
    auto build = [&](const std::vector<bool>& turn) {
        PDCode r;
        r.crossings.resize(n);
        for (int i = 0; i < n; ++i) {
            int io = in_edge(odd[i]), oo = out_edge(odd[i]);
            int ie = in_edge(even[i]), oe = out_edge(even[i]);
            std::array<int, 4> ring = turn[i] ? std::array<int, 4>{io, ie, oo, oe} : std::array<int, 4>{io, oe, oo, ie};
            // rotate so that slot 0 is the incoming under-strand
            int start = even_over[i] ? 0 : (turn[i] ? 1 : 3);
            for (int k = 0; k < 4; ++k) r.crossings[i][k] = ring[(start + k) % 4];
        }
        return r;
    };
    std::vector<bool> turn(n, false);
    for (long long mask = 0; mask < (1LL << (n - 1)); ++mask) {
        for (int i = 1; i < n; ++i) turn[i] = (mask >> (i - 1)) & 1;
        PDCode cand = build(turn);
        auto other = detail::edge_ends(cand);
        if (detail::count_faces(other) == n + 2) {
            cand.name = pd.name;
            detail::validate(cand);
            return cand;
        }
    }
    detail::parse_fail("DT code has no planar realization");
}

inline PDCode parse_diagram(const std::string& text, std::string name = {}) {
    std::string s = detail::strip_ws(text);
    if (s.compare(0, 3, "DT[") == 0) return parse_dt(s, std::move(name));
    return parse_pd(s, std::move(name));
}

struct KnotLine {
    std::string name;
    std::string code;
    int line_no = 0;
};

// Splits "<name>;<code>" lines, skipping blanks and '#' comments.
inline std::vector<KnotLine> split_knot_table(const std::string& content) {
    std::vector<KnotLine> out;
    std::size_t start = 0;
    int line_no = 0;
    while (start <= content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string::npos) end = content.size();
        std::string line = content.substr(start, end - start);
        ++line_no;
        start = end + 1;
        std::string t = detail::strip_ws(line);
        if (t.empty() || t[0] == '#') {
            if (end == content.size()) break;
            continue;
        }
        auto semi = t.find(';');
        KnotLine k;
        k.line_no = line_no;
        if (semi == std::string::npos) {
            k.name = "line" + std::to_string(line_no);
            k.code = t;
        } else {
            k.name = t.substr(0, semi);
            k.code = t.substr(semi + 1);
        }
        out.push_back(std::move(k));
        if (end == content.size()) break;
    }
    return out;
}

// Over/under swap at every crossing.
inline PDCode mirror(const PDCode& pd) {
    PDCode r = pd;
    for (auto& x : r.crossings) x = {x[1], x[2], x[3], x[0]};
    return r;
}

struct OrientedDiagram {
    PDCode pd;
    std::vector<int> sign;
    // slot through which the knot enters the crossing on the under- and over-strand
    std::vector<int> under_in, over_in;
    int n_plus = 0;
    int n_minus = 0;

    int writhe() const { return n_plus - n_minus; }
};

inline OrientedDiagram orient_and_sign(const PDCode& pd, bool reverse = false) {
    OrientedDiagram od;
    od.pd = pd;
    int n = int(pd.size());
    od.sign.assign(n, 0);
    od.under_in.assign(n, -1);
    od.over_in.assign(n, -1);
    if (n == 0) return od;
    auto other = detail::edge_ends(pd);
    int c = 0, s = reverse ? 2 : 0;
    int steps = 0;
    do {
        if (s % 2 == 0) od.under_in[c] = s;
        else od.over_in[c] = s;
        auto [c2, s2] = other[c][(s + 2) % 4];
        c = c2;
        s = s2;
        ++steps;
    } while (!(c == 0 && s == (reverse ? 2 : 0)) && steps <= 2 * n);
    if (steps != 2 * n) throw DiagramError(DiagramError::Kind::NotAKnot, "diagram has more than one component");
    for (int i = 0; i < n; ++i) {
        int o = od.under_in[i] == 0 ? od.over_in[i] : (od.over_in[i] + 2) % 4;
        od.sign[i] = o == 3 ? 1 : -1;
        (od.sign[i] > 0 ? od.n_plus : od.n_minus)++;
    }
    return od;
}

enum class CrossingType { P, M };

struct ScanStep {
    int crossing = 0;
    // the crossing's four labels counterclockwise from the first glued slot
    std::array<int, 4> iface{};
    CrossingType type = CrossingType::P;
    // boundary labels of the partial diagram after this step, sorted
    std::vector<int> boundary;
};

struct ScanOrder {
    std::vector<ScanStep> steps;
    int n_plus = 0;
    int n_minus = 0;

    int girth() const {
        std::size_t g = 0;
        for (auto& s : steps) g = std::max(g, s.boundary.size());
        return int(g);
    }
};

namespace detail {

inline std::vector<int> boundary_after(const std::vector<int>& b, const std::array<int, 4>& x) {
    std::vector<int> r = b;
    for (int l : x) {
        auto it = std::lower_bound(r.begin(), r.end(), l);
        if (it != r.end() && *it == l) r.erase(it);
        else r.insert(it, l);
    }
    return r;
}

} // namespace detail

// Greedy order: minimal boundary after the step, then minimal boundary one step later, then index.
// Every prefix after the first crossing is connected.
inline ScanOrder scan_order(const OrientedDiagram& od) {
    const auto& X = od.pd.crossings;
    int n = int(X.size());
    ScanOrder order;
    order.n_plus = od.n_plus;
    order.n_minus = od.n_minus;
    std::vector<bool> used(n, false);
    std::vector<int> B;

    auto touches = [&](int c, const std::vector<int>& b) {
        if (b.empty()) return false;
        for (int l : X[c])
            if (std::binary_search(b.begin(), b.end(), l)) return true;
        return false;
    };
    auto eligible = [&](int c, const std::vector<int>& b, bool first) { return !used[c] && (first || touches(c, b)); };

    for (int step = 0; step < n; ++step) {
        bool first = step == 0;
        int best = -1;
        std::size_t best_size = 0, best_look = 0;
        for (int c = 0; c < n; ++c) {
            if (!eligible(c, B, first)) continue;
            auto B1 = detail::boundary_after(B, X[c]);
            std::size_t look = B1.size();
            if (step + 1 < n) {
                used[c] = true;
                look = SIZE_MAX;
                for (int d = 0; d < n; ++d)
                    if (eligible(d, B1, false)) look = std::min(look, detail::boundary_after(B1, X[d]).size());
                used[c] = false;
            }
            if (best < 0 || B1.size() < best_size || (B1.size() == best_size && look < best_look)) {
                best = c;
                best_size = B1.size();
                best_look = look;
            }
        }
        ScanStep st;
        st.crossing = best;
        int start = 0;
        if (!first)
            for (int s = 0; s < 4; ++s)
                if (std::binary_search(B.begin(), B.end(), X[best][s])) {
                    start = s;
                    break;
                }
        for (int k = 0; k < 4; ++k) st.iface[k] = X[best][(start + k) % 4];
        st.type = start % 2 == 0 ? CrossingType::P : CrossingType::M;
        B = detail::boundary_after(B, X[best]);
        st.boundary = B;
        used[best] = true;
        order.steps.push_back(st);
    }
    return order;
}

} // namespace sinv
