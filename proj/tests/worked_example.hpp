#pragma once

// The worked 14n19265 complex, as a graph: generators 1..20 with (h, q), edges with coefficient 1 or 2.
// Unlabelled edges are taken as +1; only whether they are units matters.

#include <array>
#include <vector>

#include "sinv/sinv.hpp"

namespace testsupport {

struct WorkedGen {
    int id, h, q;
};

inline const std::vector<WorkedGen>& worked_generators() {
    static const std::vector<WorkedGen> g{
        {1, 0, -5},   {2, 0, -3},   {3, 0, -3},   {4, 0, -3},   {5, 0, -1},   {6, 0, -1},   {7, 0, -1},
        {8, 0, 1},    {9, 1, -3},   {10, 1, -1},  {11, 1, -1},  {12, 1, 1},   {13, -1, -5}, {14, -1, -5},
        {15, -1, -3}, {16, -1, -3}, {17, -1, -3}, {18, -1, -3}, {19, -1, -1}, {20, -1, -1},
    };
    return g;
}

inline const std::vector<std::array<int, 3>>& worked_edges() {
    static const std::vector<std::array<int, 3>> e{
        {1, 9, 1},   {3, 9, 2},   {3, 10, 1},  {13, 4, 1},  {14, 2, 2},  {14, 5, 1},  {14, 6, 1},  {14, 7, 2},
        {15, 2, 2},  {15, 5, 1},  {15, 6, 1},  {16, 6, 1},  {16, 7, 1},  {17, 6, 1},  {17, 7, 1},  {17, 8, 1},
        {18, 4, 2},  {18, 5, 2},  {18, 8, 1},  {19, 6, 2},  {19, 8, 1},  {20, 7, 2},  {20, 8, 1},
    };
    return e;
}

// Generator i of the example has index i - 1.
template <class R>
sinv::BasedComplex<R> worked_complex() {
    sinv::BasedComplex<R> D;
    for (auto& g : worked_generators()) D.add_generator(g.h, g.q);
    for (auto& [a, b, c] : worked_edges()) D.add_to_entry(a - 1, b - 1, R::from_int(c));
    return D;
}

} // namespace testsupport
