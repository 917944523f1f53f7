// SPDX-FileCopyrightText: 2026 SSGT Codec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <tuple>
#include <vector>

#include "ssgt/color.hpp"
#include "ssgt/errors.hpp"
#include "ssgt/morton.hpp"
#include "ssgt/ply_io.hpp"

namespace ssgt {

// A deduplicated voxel grid over the cloud's bounding cube. Voxels are unique,
// sorted ascending by Morton code; attributes are full-range YCbCr, unclamped.
struct VoxelizedCloud {
    int depth = 1;
    std::vector<std::array<std::uint32_t, 3>> voxels;
    std::vector<std::array<double, 3>> attributes;
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    double edge = 1.0;

    std::size_t size() const { return voxels.size(); }
};

// Snaps a raw cloud onto the 2^depth grid spanned by its bounding cube.
// The cube is isotropic: one edge equal to the largest axis extent, padded by
// one ulp so the far corner still lands inside the last voxel. Points falling
// into the same voxel are merged by the arithmetic mean of their YCbCr values.
inline VoxelizedCloud voxelize(const RawPointCloud& cloud, int depth) {
    if (cloud.size() == 0) throw CodecError("voxelize: empty cloud");
    if (depth < 1 || depth > kMaxDepth) throw CodecError("voxelize: depth out of range");

    std::array<double, 3> lo{cloud.points[0]};
    std::array<double, 3> hi{cloud.points[0]};
    for (const auto& p : cloud.points) {
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    }
    double extent = 0.0;
    for (int a = 0; a < 3; ++a) extent = std::max(extent, hi[a] - lo[a]);
    const double edge = extent == 0.0 ? 1.0 : extent * (1.0 + 0x1p-52);

    const double cells = static_cast<double>(std::uint64_t{1} << depth);
    const std::uint32_t max_index = (std::uint32_t{1} << depth) - 1;

    struct Entry {
        std::uint64_t code;
        std::array<std::uint32_t, 3> voxel;
        std::array<double, 3> ycbcr;
    };
    std::vector<Entry> entries(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        std::array<std::uint32_t, 3> voxel{};
        for (int a = 0; a < 3; ++a) {
            const double t = (cloud.points[i][a] - lo[a]) / edge;
            const double cell = std::floor(t * cells);
            voxel[a] = static_cast<std::uint32_t>(std::clamp(cell, 0.0, static_cast<double>(max_index)));
        }
        const auto& c = cloud.colors[i];
        entries[i] = {morton_encode(voxel[0], voxel[1], voxel[2], depth), voxel,
                      rgb_to_ycbcr(c[0], c[1], c[2])};
    }

    // Sorting by (code, attributes) makes the duplicate merge independent of
    // the input permutation, not just the output order.
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.code, a.ycbcr) < std::tie(b.code, b.ycbcr);
    });

    VoxelizedCloud out;
    out.depth = depth;
    out.origin = lo;
    out.edge = edge;
    for (std::size_t i = 0; i < entries.size();) {
        std::size_t j = i;
        std::array<double, 3> sum{0.0, 0.0, 0.0};
        while (j < entries.size() && entries[j].code == entries[i].code) {
            for (int a = 0; a < 3; ++a) sum[a] += entries[j].ycbcr[a];
            ++j;
        }
        const double n = static_cast<double>(j - i);
        out.voxels.push_back(entries[i].voxel);
        out.attributes.push_back({sum[0] / n, sum[1] / n, sum[2] / n});
        i = j;
    }
    return out;
}

// Voxel center in the original coordinate frame (for decoder write-out).
inline std::array<double, 3> voxel_center(const VoxelizedCloud& cloud, std::size_t index) {
    const double cell = cloud.edge / static_cast<double>(std::uint64_t{1} << cloud.depth);
    std::array<double, 3> p{};
    for (int a = 0; a < 3; ++a)
        p[a] = cloud.origin[a] + (static_cast<double>(cloud.voxels[index][a]) + 0.5) * cell;
    return p;
}

}  // namespace ssgt
