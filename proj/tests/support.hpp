#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sinv/diagram.hpp"

namespace testsupport {

inline std::string data_path(const std::string& file) { return std::string(SINV_TEST_DATA) + "/" + file; }

inline std::vector<sinv::KnotLine> load_table(const std::string& file) {
    std::ifstream in(data_path(file));
    if (!in) throw std::runtime_error("missing fixture " + file);
    std::stringstream ss;
    ss << in.rdbuf();
    return sinv::split_knot_table(ss.str());
}

inline std::vector<sinv::PDCode> load_pds(const std::string& file) {
    std::vector<sinv::PDCode> r;
    for (auto& l : load_table(file)) r.push_back(sinv::parse_diagram(l.code, l.name));
    return r;
}

// Closure of the 2-braid sigma_1^n, n odd; all crossings positive.
inline sinv::PDCode torus_2n(int n) {
    sinv::PDCode pd;
    pd.name = "T(2," + std::to_string(n) + ")";
    int m = 2 * n;
    auto w = [m](int x) { return (x - 1) % m + 1; };
    for (int k = 1; k <= n; ++k) pd.crossings.push_back({w(2 * k - 1), w(2 * k + 3), w(2 * k), w(2 * k + 2)});
    return pd;
}

} // namespace testsupport
