#pragma once
// Known-good reference objects embedded as data: the order-8 seed square E
// (free of proper subsquares), the two corrupting pairs (A8,B8) and (A9,B9)
// that drive the x8 / x9 extension steps, the order-3 blocks J and Z used by
// the prime-padding and tripling constructions, and the order-4 and order-6
// cubes that cover the dimensions where no such square exists.

#include <vector>

#include "ninf/core.hpp"

namespace ninf {
namespace detail {

inline Hypercube cube_from_layers(int n, const std::vector<std::vector<std::vector<int>>>& layers) {
    // layers[x-1][i-1][j-1] = H[i,j,x]; flat data is last-axis-fastest.
    std::vector<int> data;
    data.reserve(static_cast<size_t>(n) * n * n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int x = 1; x <= n; ++x)
                data.push_back(layers[x - 1][i - 1][j - 1]);
    return Hypercube(n, 3, std::move(data));
}

}  // namespace detail

inline const LatinSquare& table_E() {
    static const LatinSquare sq = ls_from_rows({
        {1, 2, 3, 4, 5, 6, 7, 8},
        {2, 3, 5, 7, 8, 1, 6, 4},
        {3, 1, 8, 5, 6, 4, 2, 7},
        {4, 7, 1, 8, 3, 2, 5, 6},
        {5, 6, 7, 1, 4, 3, 8, 2},
        {6, 4, 2, 3, 7, 8, 1, 5},
        {7, 8, 4, 6, 2, 5, 3, 1},
        {8, 5, 6, 2, 1, 7, 4, 3},
    });
    return sq;
}

inline const LatinSquare& table_A8() {
    static const LatinSquare sq = ls_from_rows({
        {4, 8, 6, 7, 5, 1, 3, 2},
        {8, 6, 4, 2, 7, 5, 1, 3},
        {1, 7, 5, 3, 4, 2, 6, 8},
        {5, 4, 3, 1, 2, 6, 8, 7},
        {3, 2, 1, 4, 6, 8, 7, 5},
        {2, 1, 7, 5, 8, 3, 4, 6},
        {6, 3, 2, 8, 1, 7, 5, 4},
        {7, 5, 8, 6, 3, 4, 2, 1},
    });
    return sq;
}

inline const LatinSquare& table_B8() {
    static const LatinSquare sq = ls_from_rows({
        {4, 1, 7, 2, 8, 6, 5, 3},
        {7, 3, 5, 8, 6, 1, 4, 2},
        {3, 5, 8, 4, 1, 7, 2, 6},
        {2, 7, 4, 6, 3, 8, 1, 5},
        {1, 8, 6, 5, 4, 2, 3, 7},
        {6, 4, 3, 7, 2, 5, 8, 1},
        {5, 2, 1, 3, 7, 4, 6, 8},
        {8, 6, 2, 1, 5, 3, 7, 4},
    });
    return sq;
}

inline const LatinSquare& table_A9() {
    static const LatinSquare sq = ls_from_rows({
        {2, 8, 6, 3, 1, 4, 5, 9, 7},
        {8, 6, 2, 9, 5, 1, 3, 7, 4},
        {3, 4, 7, 1, 2, 5, 6, 8, 9},
        {1, 3, 5, 2, 4, 9, 7, 6, 8},
        {9, 1, 8, 7, 3, 2, 4, 5, 6},
        {7, 2, 1, 6, 9, 3, 8, 4, 5},
        {4, 5, 9, 8, 7, 6, 1, 2, 3},
        {5, 7, 3, 4, 6, 8, 9, 1, 2},
        {6, 9, 4, 5, 8, 7, 2, 3, 1},
    });
    return sq;
}

inline const LatinSquare& table_B9() {
    static const LatinSquare sq = ls_from_rows({
        {2, 4, 3, 7, 8, 6, 9, 5, 1},
        {3, 7, 9, 5, 4, 8, 2, 1, 6},
        {4, 6, 1, 3, 9, 2, 5, 7, 8},
        {6, 2, 4, 9, 5, 1, 8, 3, 7},
        {7, 5, 6, 8, 1, 4, 3, 9, 2},
        {5, 9, 2, 1, 3, 7, 6, 8, 4},
        {1, 3, 8, 2, 6, 5, 7, 4, 9},
        {8, 1, 5, 6, 7, 9, 4, 2, 3},
        {9, 8, 7, 4, 2, 3, 1, 6, 5},
    });
    return sq;
}

// Order-3 block planted in the corner of the prime-padding construction.
inline const LatinSquare& table_J() {
    static const LatinSquare sq = ls_from_rows({
        {3, 2, 1},
        {1, 3, 2},
        {2, 1, 3},
    });
    return sq;
}

// Order-3 outer factor of the tripling construction.
inline const LatinSquare& table_Z() {
    static const LatinSquare sq = ls_from_rows({
        {1, 2, 3},
        {2, 3, 1},
        {3, 1, 2},
    });
    return sq;
}

// The unique (up to species) order-4 cube with no proper subhypercubes.
inline const Hypercube& table_cube4() {
    static const Hypercube cube = detail::cube_from_layers(4, {
        {{1, 2, 3, 4}, {2, 3, 4, 1}, {3, 4, 1, 2}, {4, 1, 2, 3}},
        {{2, 1, 4, 3}, {1, 4, 3, 2}, {4, 3, 2, 1}, {3, 2, 1, 4}},
        {{3, 4, 2, 1}, {4, 2, 1, 3}, {2, 1, 3, 4}, {1, 3, 4, 2}},
        {{4, 3, 1, 2}, {3, 1, 2, 4}, {1, 2, 4, 3}, {2, 4, 3, 1}},
    });
    return cube;
}

// An order-6 cube with no proper subhypercubes.
inline const Hypercube& table_cube6() {
    static const Hypercube cube = detail::cube_from_layers(6, {
        {{1, 2, 3, 4, 5, 6},
         {2, 1, 4, 3, 6, 5},
         {3, 4, 6, 5, 1, 2},
         {4, 3, 5, 6, 2, 1},
         {5, 6, 1, 2, 4, 3},
         {6, 5, 2, 1, 3, 4}},
        {{2, 1, 4, 3, 6, 5},
         {1, 3, 2, 6, 5, 4},
         {6, 2, 5, 4, 3, 1},
         {3, 4, 6, 5, 1, 2},
         {4, 5, 3, 1, 2, 6},
         {5, 6, 1, 2, 4, 3}},
        {{3, 4, 5, 6, 1, 2},
         {4, 2, 6, 5, 3, 1},
         {5, 6, 3, 1, 2, 4},
         {6, 5, 1, 2, 4, 3},
         {1, 3, 2, 4, 6, 5},
         {2, 1, 4, 3, 5, 6}},
        {{4, 3, 6, 5, 2, 1},
         {3, 5, 1, 2, 4, 6},
         {2, 1, 4, 6, 5, 3},
         {5, 6, 2, 1, 3, 4},
         {6, 4, 5, 3, 1, 2},
         {1, 2, 3, 4, 6, 5}},
        {{5, 6, 1, 2, 3, 4},
         {6, 4, 5, 1, 2, 3},
         {1, 5, 2, 3, 4, 6},
         {2, 1, 3, 4, 6, 5},
         {3, 2, 4, 6, 5, 1},
         {4, 3, 6, 5, 1, 2}},
        {{6, 5, 2, 1, 4, 3},
         {5, 6, 3, 4, 1, 2},
         {4, 3, 1, 2, 6, 5},
         {1, 2, 4, 3, 5, 6},
         {2, 1, 6, 5, 3, 4},
         {3, 4, 5, 6, 2, 1}},
    });
    return cube;
}

}  // namespace ninf
