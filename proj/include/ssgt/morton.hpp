// SPDX-FileCopyrightText: 2026 SSGT Codec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

namespace ssgt {

inline constexpr int kMaxDepth = 20;

namespace detail {

// Spreads the low 21 bits of v so that bit i lands at position 3*i.
constexpr std::uint64_t spread3(std::uint64_t v) {
    v &= 0x1fffff;
    v = (v | v << 32) & 0x1f00000000ffff;
    v = (v | v << 16) & 0x1f0000ff0000ff;
    v = (v | v << 8) & 0x100f00f00f00f00f;
    v = (v | v << 4) & 0x10c30c30c30c30c3;
    v = (v | v << 2) & 0x1249249249249249;
    return v;
}

constexpr std::uint32_t compact3(std::uint64_t v) {
    v &= 0x1249249249249249;
    v = (v ^ (v >> 2)) & 0x10c30c30c30c30c3;
    v = (v ^ (v >> 4)) & 0x100f00f00f00f00f;
    v = (v ^ (v >> 8)) & 0x1f0000ff0000ff;
    v = (v ^ (v >> 16)) & 0x1f00000000ffff;
    v = (v ^ (v >> 32)) & 0x1fffff;
    return static_cast<std::uint32_t>(v);
}

}  // namespace detail

// Z-order index over a 2^depth grid. Bit triples are emitted most significant
// level first; within a triple the x bit is the most significant, so the child
// index inside a parent octant is (x << 2) | (y << 1) | z.
inline std::uint64_t morton_encode(std::uint32_t ix, std::uint32_t iy, std::uint32_t iz, int depth) {
    if (depth < 1 || depth > kMaxDepth)
        throw std::invalid_argument("morton_encode: depth out of range");
    const std::uint64_t limit = std::uint64_t{1} << depth;
    if (ix >= limit || iy >= limit || iz >= limit)
        throw std::invalid_argument("morton_encode: voxel index out of range");
    return detail::spread3(ix) << 2 | detail::spread3(iy) << 1 | detail::spread3(iz);
}

inline std::array<std::uint32_t, 3> morton_decode(std::uint64_t code) {
    return {detail::compact3(code >> 2), detail::compact3(code >> 1), detail::compact3(code)};
}

}  // namespace ssgt
