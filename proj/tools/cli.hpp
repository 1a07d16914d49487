#pragma once

// Batch driver behind the `sinv` executable: jobs, result rows, CSV/JSON persistence and the text report.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "sinv/sinv.hpp"
#include "sinv/sq1.hpp"

namespace sinv::cli {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Mode { S, Sq1, Kh };
enum class Format { Csv, Json };

inline Mode parse_mode(const std::string& s) {
    if (s == "s") return Mode::S;
    if (s == "sq1") return Mode::Sq1;
    if (s == "kh") return Mode::Kh;
    throw ConfigError("unknown mode: " + s);
}

inline Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw ConfigError("unknown format: " + s);
}

struct Job {
    std::string input;
    std::vector<RingDescriptor> rings{RingDescriptor::prime_field(2)};
    Mode mode = Mode::S;
    int jobs = 1;
    std::string out;
    Format format = Format::Csv;
    bool fail_fast = false;
    std::string dump_dir;
    bool timings = false;
};

inline std::vector<RingDescriptor> parse_rings(const std::string& list) {
    std::vector<RingDescriptor> r;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.empty()) continue;
        try {
            r.push_back(RingDescriptor::parse(item));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (r.empty()) throw ConfigError("no ring given");
    return r;
}

using KhTable = std::map<std::pair<int, int>, int>;

struct ResultRow {
    std::string name;
    std::map<std::string, int> s; // ring name -> s
    std::optional<Sq1Quadruple> quad;
    std::map<std::string, KhTable> kh;
    std::string error;
    double ms = 0;

    bool ok() const { return error.empty(); }
    // the quadruple is not (s, s, s, s) with s over F2; either half may be the one that moves
    bool non_standard() const {
        if (!quad) return false;
        auto it = s.find("f2");
        if (it == s.end()) return false;
        int v = it->second;
        return !(*quad == Sq1Quadruple{v, v, v, v});
    }
    friend bool operator==(const ResultRow& a, const ResultRow& b) {
        return a.name == b.name && a.s == b.s && a.quad == b.quad && a.kh == b.kh && a.error == b.error;
    }
};

// The rings a job effectively computes over.
inline std::vector<RingDescriptor> effective_rings(const Job& job) {
    if (job.mode == Mode::Sq1) return {RingDescriptor::prime_field(2)};
    for (auto& r : job.rings)
        if (!r.is_field()) throw ConfigError("ring " + r.name() + " is not a field; use --mode sq1 for Z/4");
    return job.rings;
}

namespace detail {

inline std::string safe_file_name(const std::string& s) {
    std::string r;
    for (char c : s) r += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.') ? c : '_';
    return r;
}

template <class R>
void dump_complex(const std::string& dir, const std::string& name, const PDCode& pd, ScanMode mode) {
    if (dir.empty() || pd.size() <= 1) return;
    auto C = scan<R>(scan_order(orient_and_sign(pd)), mode);
    auto path = std::filesystem::path(dir) / (safe_file_name(name) + "." + R::descriptor().name() + ".txt");
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    C.dump(os);
}

} // namespace detail

inline ResultRow compute_row(const KnotLine& line, const Job& job, const std::vector<RingDescriptor>& rings) {
    ResultRow row;
    row.name = line.name;
    auto t0 = std::chrono::steady_clock::now();
    try {
        PDCode pd = parse_diagram(line.code, line.name);
        switch (job.mode) {
        case Mode::S:
            for (auto& ring : rings)
                with_ring(ring, [&](auto tag) {
                    using R = typename decltype(tag)::type;
                    detail::dump_complex<R>(job.dump_dir, line.name, pd, ScanMode::S);
                    row.s[ring.name()] = s_invariant<R>(pd).s;
                });
            break;
        case Mode::Sq1: {
            detail::dump_complex<Z4>(job.dump_dir, line.name, pd, ScanMode::Sq1);
            auto r = refine(pd);
            row.s["f2"] = r.s_f2;
            row.quad = r.quad;
            break;
        }
        case Mode::Kh:
            for (auto& ring : rings)
                with_ring(ring, [&](auto tag) {
                    using R = typename decltype(tag)::type;
                    detail::dump_complex<R>(job.dump_dir, line.name, pd, ScanMode::Full);
                    row.kh[ring.name()] = khovanov_ranks<R>(pd);
                });
            break;
        }
    } catch (const DiagramError& e) {
        row.error = std::string(e.kind_name()) + ": " + e.what();
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        row.error = std::string("Error: ") + e.what();
    }
    row.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

inline std::vector<KnotLine> read_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return split_knot_table(ss.str());
}

struct RunResult {
    std::vector<ResultRow> rows;
    bool tripped = false; // fail-fast stopped the run
};

// Rows come back in input order. Under fail-fast the output ends at the first failing row in input
// order, whatever the thread count.
inline RunResult run(const Job& job, const std::vector<KnotLine>& lines) {
    auto rings = effective_rings(job);
    if (!job.dump_dir.empty()) std::filesystem::create_directories(job.dump_dir);
    int n = int(lines.size());
    std::vector<std::optional<ResultRow>> slots(n);
    std::atomic<int> next{0};
    std::atomic<int> stop_at{n};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;
    auto worker = [&] {
        while (true) {
            int i = next.fetch_add(1);
            if (i >= n || i > stop_at.load()) return;
            try {
                ResultRow r = compute_row(lines[i], job, rings);
                if (!r.ok() && job.fail_fast) {
                    int cur = stop_at.load();
                    while (i < cur && !stop_at.compare_exchange_weak(cur, i)) {
                    }
                }
                slots[i] = std::move(r);
            } catch (...) {
                std::lock_guard lock(fatal_mutex);
                if (!fatal) fatal = std::current_exception();
                stop_at.store(-1);
                return;
            }
        }
    };
    int threads = std::max(1, std::min(job.jobs, n));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (fatal) std::rethrow_exception(fatal);
    RunResult res;
    int last = std::min(n - 1, stop_at.load());
    for (int i = 0; i <= last; ++i) res.rows.push_back(std::move(*slots[i]));
    res.tripped = stop_at.load() < n;
    return res;
}

// ---- persistence

inline std::string kh_to_string(const KhTable& t) {
    std::string r;
    for (auto& [k, v] : t) {
        if (!r.empty()) r += ' ';
        r += std::to_string(k.first) + ":" + std::to_string(k.second) + ":" + std::to_string(v);
    }
    return r;
}

inline KhTable kh_from_string(const std::string& s) {
    KhTable t;
    std::stringstream ss(s);
    for (std::string item; ss >> item;) {
        int h, q, r;
        char c1, c2;
        std::stringstream is(item);
        if (!(is >> h >> c1 >> q >> c2 >> r) || c1 != ':' || c2 != ':') throw IoError("bad Kh entry: " + item);
        t[{h, q}] = r;
    }
    return t;
}

struct Columns {
    std::vector<std::string> s_rings, kh_rings;
    bool quad = false;
    bool timings = false;
};

inline Columns columns_for(const Job& job) {
    Columns c;
    c.timings = job.timings;
    for (auto& r : effective_rings(job)) (job.mode == Mode::Kh ? c.kh_rings : c.s_rings).push_back(r.name());
    c.quad = job.mode == Mode::Sq1;
    return c;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string r = "\"";
    for (char c : s) r += c == '"' ? std::string("\"\"") : std::string(1, c);
    return r + "\"";
}

inline std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> f;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') cur += '"', ++i;
            else if (c == '"') quoted = false;
            else cur += c;
        } else if (c == '"') quoted = true;
        else if (c == ',') f.push_back(std::move(cur)), cur.clear();
        else cur += c;
    }
    f.push_back(cur);
    return f;
}

inline void write_csv(std::ostream& os, const std::vector<ResultRow>& rows, const Columns& c) {
    os << "name";
    for (auto& r : c.s_rings) os << ",s_" << r;
    if (c.quad) os << ",r_plus,s_plus,r_minus,s_minus";
    for (auto& r : c.kh_rings) os << ",kh_" << r;
    os << ",error";
    if (c.timings) os << ",ms";
    os << '\n';
    for (auto& row : rows) {
        os << csv_field(row.name);
        for (auto& r : c.s_rings) {
            os << ',';
            if (auto it = row.s.find(r); it != row.s.end()) os << it->second;
        }
        if (c.quad) {
            if (row.quad) os << ',' << row.quad->r_plus << ',' << row.quad->s_plus << ',' << row.quad->r_minus << ',' << row.quad->s_minus;
            else os << ",,,,";
        }
        for (auto& r : c.kh_rings) {
            os << ',';
            if (auto it = row.kh.find(r); it != row.kh.end()) os << csv_field(kh_to_string(it->second));
        }
        os << ',' << csv_field(row.error);
        if (c.timings) os << ',' << std::fixed << std::setprecision(1) << row.ms;
        os << '\n';
    }
}

inline std::vector<ResultRow> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) return {};
    auto header = csv_split(line);
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = csv_split(line);
        if (f.size() != header.size()) throw IoError("CSV row has " + std::to_string(f.size()) + " fields");
        ResultRow row;
        std::array<std::string, 4> quad;
        bool has_quad = false;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const std::string& h = header[i];
            if (h == "name") row.name = f[i];
            else if (h == "error") row.error = f[i];
            else if (h == "ms") row.ms = f[i].empty() ? 0 : std::stod(f[i]);
            else if (h.rfind("s_", 0) == 0 && h != "s_plus" && h != "s_minus") {
                if (!f[i].empty()) row.s[h.substr(2)] = std::stoi(f[i]);
            } else if (h.rfind("kh_", 0) == 0) {
                row.kh[h.substr(3)] = kh_from_string(f[i]);
            } else {
                static const std::array<const char*, 4> names{"r_plus", "s_plus", "r_minus", "s_minus"};
                for (int k = 0; k < 4; ++k)
                    if (h == names[k]) quad[k] = f[i], has_quad = has_quad || !f[i].empty();
            }
        }
        if (has_quad) row.quad = Sq1Quadruple{std::stoi(quad[0]), std::stoi(quad[1]), std::stoi(quad[2]), std::stoi(quad[3])};
        // an empty Kh cell of a failed row means "not computed"
        if (!row.error.empty())
            for (auto it = row.kh.begin(); it != row.kh.end();) it = it->second.empty() ? row.kh.erase(it) : std::next(it);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline nlohmann::json to_json(const std::vector<ResultRow>& rows, const Columns& c) {
    auto arr = nlohmann::json::array();
    for (auto& row : rows) {
        nlohmann::json j;
        j["name"] = row.name;
        if (!row.s.empty()) j["s"] = row.s;
        if (row.quad) j["sq1"] = {row.quad->r_plus, row.quad->s_plus, row.quad->r_minus, row.quad->s_minus};
        if (!row.kh.empty()) {
            nlohmann::json kh;
            for (auto& [ring, t] : row.kh) {
                auto entries = nlohmann::json::array();
                for (auto& [k, v] : t) entries.push_back({k.first, k.second, v});
                kh[ring] = entries;
            }
            j["kh"] = kh;
        }
        if (!row.error.empty()) j["error"] = row.error;
        if (c.timings) j["ms"] = row.ms;
        arr.push_back(j);
    }
    return arr;
}

inline std::vector<ResultRow> from_json(const nlohmann::json& arr) {
    std::vector<ResultRow> rows;
    for (auto& j : arr) {
        ResultRow row;
        row.name = j.at("name").get<std::string>();
        if (j.contains("s")) row.s = j["s"].get<std::map<std::string, int>>();
        if (j.contains("sq1")) {
            auto v = j["sq1"].get<std::vector<int>>();
            if (v.size() != 4) throw IoError("sq1 needs four entries");
            row.quad = Sq1Quadruple{v[0], v[1], v[2], v[3]};
        }
        if (j.contains("kh"))
            for (auto& [ring, entries] : j["kh"].items()) {
                KhTable t;
                for (auto& e : entries) t[{e.at(0).get<int>(), e.at(1).get<int>()}] = e.at(2).get<int>();
                row.kh[ring] = t;
            }
        if (j.contains("error")) row.error = j["error"].get<std::string>();
        if (j.contains("ms")) row.ms = j["ms"].get<double>();
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void write_rows(std::ostream& os, const std::vector<ResultRow>& rows, const Columns& c, Format f) {
    if (f == Format::Csv) write_csv(os, rows, c);
    else os << to_json(rows, c).dump(2) << '\n';
}

// ---- report

struct Summary {
    int processed = 0, failed = 0, non_standard = 0;
};

inline Summary summarize(const std::vector<ResultRow>& rows) {
    Summary s;
    for (auto& r : rows) {
        ++s.processed;
        s.failed += !r.ok();
        s.non_standard += r.non_standard();
    }
    return s;
}

inline std::string report(const std::vector<ResultRow>& rows, const Columns& c) {
    std::vector<std::string> header{"knot"};
    for (auto& r : c.s_rings) header.push_back("s_" + r);
    if (c.quad) header.push_back("sq1");
    for (auto& r : c.kh_rings) header.push_back("kh_" + r + " ranks");
    header.push_back("ms");
    header.push_back("status");
    std::vector<std::vector<std::string>> cells{header};
    for (auto& row : rows) {
        std::vector<std::string> line{row.name};
        for (auto& r : c.s_rings) {
            auto it = row.s.find(r);
            line.push_back(it == row.s.end() ? "-" : std::to_string(it->second));
        }
        if (c.quad)
            line.push_back(row.quad ? "(" + std::to_string(row.quad->r_plus) + "," + std::to_string(row.quad->s_plus) + "," +
                                          std::to_string(row.quad->r_minus) + "," + std::to_string(row.quad->s_minus) + ")"
                                    : "-");
        for (auto& r : c.kh_rings) {
            auto it = row.kh.find(r);
            int total = 0;
            if (it != row.kh.end())
                for (auto& [k, v] : it->second) total += v;
            line.push_back(it == row.kh.end() ? "-" : std::to_string(total));
        }
        std::ostringstream ms;
        ms << std::fixed << std::setprecision(1) << row.ms;
        line.push_back(ms.str());
        line.push_back(row.ok() ? (row.non_standard() ? "non-standard" : "ok") : row.error);
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (auto& l : cells)
        for (std::size_t i = 0; i < l.size(); ++i) width[i] = std::max(width[i], l[i].size());
    std::ostringstream os;
    for (auto& l : cells) {
        for (std::size_t i = 0; i < l.size(); ++i) {
            if (i + 1 == l.size()) os << l[i];
            else os << std::left << std::setw(int(width[i]) + 2) << l[i];
        }
        os << '\n';
    }
    auto s = summarize(rows);
    os << s.processed << " knots processed, " << s.failed << " failed, " << s.non_standard << " non-standard\n";
    return os.str();
}

} // namespace sinv::cli
