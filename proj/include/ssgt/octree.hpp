// SPDX-FileCopyrightText: 2026 SSGT Codec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "ssgt/errors.hpp"
#include "ssgt/morton.hpp"
#include "ssgt/voxelize.hpp"

namespace ssgt {

struct OctreeNode {
    std::uint64_t morton = 0;             // Morton code at this node's level
    std::array<std::uint32_t, 3> pos{};   // voxel indices at this node's level
    std::uint64_t count = 0;              // occupied leaves in the subtree
    std::uint32_t first_child = 0;        // index into the next level's node list
    std::uint8_t child_mask = 0;          // bit k set iff child k is occupied

    int child_count() const { return std::popcount(child_mask); }
};

// Occupancy tree over a voxelized cloud. levels[0] holds the single root,
// levels[depth] the leaves; every level is sorted ascending by Morton code.
struct Octree {
    int depth = 0;
    std::vector<std::vector<OctreeNode>> levels;

    const std::vector<OctreeNode>& leaves() const { return levels[static_cast<std::size_t>(depth)]; }
    std::uint64_t point_count() const { return levels[0][0].count; }
};

inline Octree build_octree(const VoxelizedCloud& cloud) {
    if (cloud.size() == 0) throw CodecError("build_octree: empty cloud");

    Octree tree;
    tree.depth = cloud.depth;
    tree.levels.resize(static_cast<std::size_t>(cloud.depth) + 1);

    auto& leaves = tree.levels[static_cast<std::size_t>(cloud.depth)];
    leaves.resize(cloud.size());
    std::uint64_t prev = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto& v = cloud.voxels[i];
        const std::uint64_t code = morton_encode(v[0], v[1], v[2], cloud.depth);
        if (i > 0 && code <= prev) throw CodecError("build_octree: cloud is not Morton-sorted");
        prev = code;
        leaves[i] = {code, v, 1, 0, 0};
    }

    for (int level = cloud.depth - 1; level >= 0; --level) {
        const auto& children = tree.levels[static_cast<std::size_t>(level) + 1];
        auto& nodes = tree.levels[static_cast<std::size_t>(level)];
        for (std::uint32_t c = 0; c < children.size(); ++c) {
            const auto& child = children[c];
            const std::uint64_t parent_code = child.morton >> 3;
            if (nodes.empty() || nodes.back().morton != parent_code) {
                nodes.push_back({parent_code,
                                 {child.pos[0] >> 1, child.pos[1] >> 1, child.pos[2] >> 1},
                                 0,
                                 c,
                                 0});
            }
            nodes.back().count += child.count;
            nodes.back().child_mask |= static_cast<std::uint8_t>(1u << (child.morton & 7));
        }
    }
    return tree;
}

// One occupancy byte per internal node, breadth-first from the root level,
// ascending Morton within each level. Bit k (LSB = child 0) marks child k.
inline std::vector<std::uint8_t> serialize_geometry(const Octree& tree) {
    std::vector<std::uint8_t> bytes;
    for (int level = 0; level < tree.depth; ++level)
        for (const auto& node : tree.levels[static_cast<std::size_t>(level)])
            bytes.push_back(node.child_mask);
    return bytes;
}

inline Octree deserialize_geometry(std::span<const std::uint8_t> bytes, int depth,
                                   std::uint64_t point_count) {
    if (depth < 1 || depth > kMaxDepth) throw FormatError("geometry: depth out of range");

    Octree tree;
    tree.depth = depth;
    tree.levels.resize(static_cast<std::size_t>(depth) + 1);
    tree.levels[0].push_back({0, {0, 0, 0}, 0, 0, 0});

    std::size_t cursor = 0;
    for (int level = 0; level < depth; ++level) {
        auto& nodes = tree.levels[static_cast<std::size_t>(level)];
        auto& children = tree.levels[static_cast<std::size_t>(level) + 1];
        for (auto& node : nodes) {
            if (cursor >= bytes.size()) throw FormatError("geometry: truncated stream");
            const std::uint8_t mask = bytes[cursor++];
            if (mask == 0) throw FormatError("geometry: empty occupancy byte");
            node.child_mask = mask;
            node.first_child = static_cast<std::uint32_t>(children.size());
            for (int k = 0; k < 8; ++k) {
                if (!(mask & (1u << k))) continue;
                OctreeNode child;
                child.morton = node.morton << 3 | static_cast<std::uint64_t>(k);
                child.pos = {node.pos[0] << 1 | static_cast<std::uint32_t>(k >> 2 & 1),
                             node.pos[1] << 1 | static_cast<std::uint32_t>(k >> 1 & 1),
                             node.pos[2] << 1 | static_cast<std::uint32_t>(k & 1)};
                children.push_back(child);
            }
        }
    }
    if (cursor != bytes.size()) throw FormatError("geometry: trailing bytes");
    if (tree.leaves().size() != point_count) throw FormatError("geometry: leaf count mismatch");

    for (auto& leaf : tree.levels[static_cast<std::size_t>(depth)]) leaf.count = 1;
    for (int level = depth - 1; level >= 0; --level) {
        const auto& children = tree.levels[static_cast<std::size_t>(level) + 1];
        for (auto& node : tree.levels[static_cast<std::size_t>(level)]) {
            node.count = 0;
            for (int k = 0; k < node.child_count(); ++k)
                node.count += children[node.first_child + static_cast<std::uint32_t>(k)].count;
        }
    }
    return tree;
}

}  // namespace ssgt
