// SPDX-FileCopyrightText: 2026 SSGT Codec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <tuple>
#include <vector>

#include "ssgt/errors.hpp"
#include "ssgt/graph_transform.hpp"
#include "ssgt/octree.hpp"
#include "ssgt/parallel.hpp"
#include "ssgt/voxelize.hpp"

namespace ssgt {

enum class Transform : std::uint8_t { kRaht = 0, kSsgt = 1 };

inline const char* transform_name(Transform t) { return t == Transform::kRaht ? "raht" : "ssgt"; }

struct CodecParams {
    Transform transform = Transform::kSsgt;
    int step = 2;      // subspace growth per stage: 1 => 2x2x2 children, 2 => 4x4x4
    double alpha = 0.1;
    std::array<double, 3> q{15.0, 15.0, 15.0};  // quantization steps for Y, Cb, Cr
    bool parallel = false;
};

inline void validate_params(const CodecParams& params, int depth) {
    if (params.step != 1 && params.step != 2) throw ParamError("step must be 1 or 2");
    if (depth < 1 || depth > kMaxDepth) throw ParamError("depth out of range [1,20]");
    if (params.transform == Transform::kSsgt && depth % params.step != 0)
        throw ParamError("depth must be a multiple of step (L mod s = 0)");
    if (!std::isfinite(params.alpha) || params.alpha < 0.0)
        throw ParamError("alpha must be finite and nonnegative");
    for (double q : params.q)
        if (!(q > 0.0) || !std::isfinite(q)) throw ParamError("quantization step must be positive");
}

// Transform-domain output for one channel: the root DC plus per-stage AC
// lists. Stage 0 is the root-most stage; within a stage, ACs follow the
// canonical order (parent nodes ascending Morton, then the per-node order
// defined by the transform).
struct ChannelCoefficients {
    double root_dc = 0.0;
    std::vector<std::vector<double>> stage_ac;

    std::size_t total() const {
        std::size_t n = 1;
        for (const auto& s : stage_ac) n += s.size();
        return n;
    }
};

struct CoefficientSet {
    std::array<ChannelCoefficients, 3> channels;
};

inline int stage_count(const CodecParams& params, int depth) {
    return params.transform == Transform::kSsgt ? depth / params.step : depth;
}

// AC coefficients produced per stage, derivable from geometry alone. The
// decoder uses this to size its entropy-coder contexts.
inline std::vector<std::size_t> stage_ac_counts(const Octree& tree, const CodecParams& params) {
    const int span = params.transform == Transform::kSsgt ? params.step : 1;
    std::vector<std::size_t> counts;
    for (int level = 0; level + span <= tree.depth; level += span) {
        counts.push_back(tree.levels[static_cast<std::size_t>(level) + span].size() -
                         tree.levels[static_cast<std::size_t>(level)].size());
    }
    return counts;
}

using BasisObserver = std::function<void(const StageBasis&)>;

namespace detail {

// Partition of the nodes at parent_level+span into contiguous runs of
// descendants, one run per parent node, in Morton order.
inline std::vector<std::uint32_t> child_ranges(const Octree& tree, int parent_level, int span) {
    const auto& parents = tree.levels[static_cast<std::size_t>(parent_level)];
    const auto& children = tree.levels[static_cast<std::size_t>(parent_level) + span];
    std::vector<std::uint32_t> begin(parents.size() + 1);
    std::size_t c = 0;
    for (std::size_t p = 0; p < parents.size(); ++p) {
        begin[p] = static_cast<std::uint32_t>(c);
        while (c < children.size() && (children[c].morton >> (3 * span)) == parents[p].morton) ++c;
    }
    begin[parents.size()] = static_cast<std::uint32_t>(c);
    if (c != children.size()) throw CodecError("octree: inconsistent level structure");
    return begin;
}

inline SubspaceGraph node_graph(const Octree& tree, int parent_level, int span,
                                std::size_t parent_index, std::uint32_t child_begin,
                                std::uint32_t child_end, double alpha) {
    const auto& parent = tree.levels[static_cast<std::size_t>(parent_level)][parent_index];
    const auto& children = tree.levels[static_cast<std::size_t>(parent_level) + span];
    std::vector<GraphVertex> vertices(child_end - child_begin);
    for (std::uint32_t c = child_begin; c < child_end; ++c) {
        const auto& child = children[c];
        GraphVertex v;
        for (int a = 0; a < 3; ++a) {
            v.position[static_cast<std::size_t>(a)] = static_cast<std::int32_t>(
                child.pos[static_cast<std::size_t>(a)] - (parent.pos[static_cast<std::size_t>(a)] << span));
        }
        v.count = static_cast<double>(child.count);
        vertices[c - child_begin] = v;
    }
    return build_graph(vertices, alpha);
}

}  // namespace detail

// Bottom-up SSGT cascade. Stages run at parent levels L-s, L-2s, ..., 0; each
// occupied node transforms the DC signal of its descendants s levels down,
// keeps the ACs and propagates the DC. The optional observer receives every
// constructed basis (and forces sequential execution so the order is stable).
inline CoefficientSet ssgt_encode(const VoxelizedCloud& cloud, const Octree& tree,
                                  const CodecParams& params, const BasisObserver& observer = {}) {
    validate_params(params, tree.depth);
    if (cloud.attributes.size() != tree.leaves().size())
        throw CodecError("ssgt_encode: attribute count does not match leaf count");

    const int span = params.step;
    const int stages = stage_count(params, tree.depth);
    const bool parallel = params.parallel && !observer;

    CoefficientSet out;
    for (auto& ch : out.channels) ch.stage_ac.resize(static_cast<std::size_t>(stages));

    std::vector<std::array<double, 3>> values = cloud.attributes;
    for (int level = tree.depth - span; level >= 0; level -= span) {
        const auto& parents = tree.levels[static_cast<std::size_t>(level)];
        const auto begin = detail::child_ranges(tree, level, span);
        const std::size_t stage = static_cast<std::size_t>(level / span);

        std::vector<std::array<double, 3>> next(parents.size());
        for (auto& ch : out.channels)
            ch.stage_ac[stage].resize(values.size() - parents.size());

        parallel_for(parents.size(), parallel, [&](std::size_t p) {
            const std::uint32_t lo = begin[p];
            const std::uint32_t hi = begin[p + 1];
            const int n = static_cast<int>(hi - lo);
            const auto graph = detail::node_graph(tree, level, span, p, lo, hi, params.alpha);
            const auto basis = subspace_basis(graph);
            if (observer) observer(basis);

            const std::size_t ac_offset = lo - p;  // sum of (run length - 1) before p
            std::vector<double> f(static_cast<std::size_t>(n));
            std::vector<double> h(static_cast<std::size_t>(n));
            for (int ch = 0; ch < 3; ++ch) {
                for (int k = 0; k < n; ++k) f[static_cast<std::size_t>(k)] = values[lo + k][static_cast<std::size_t>(ch)];
                spectral_forward(basis, f, h);
                next[p][static_cast<std::size_t>(ch)] = h[0];
                auto& ac = out.channels[static_cast<std::size_t>(ch)].stage_ac[stage];
                for (int k = 1; k < n; ++k) ac[ac_offset + static_cast<std::size_t>(k) - 1] = h[static_cast<std::size_t>(k)];
            }
        });
        values = std::move(next);
    }
    for (int ch = 0; ch < 3; ++ch) out.channels[static_cast<std::size_t>(ch)].root_dc = values[0][static_cast<std::size_t>(ch)];
    return out;
}

// Top-down SSGT inverse. Every basis is recomputed from geometry by the same
// routine the encoder used, so nothing basis-related travels in the stream.
inline std::vector<std::array<double, 3>> ssgt_decode(const CoefficientSet& coeffs, const Octree& tree,
                                                      const CodecParams& params) {
    validate_params(params, tree.depth);
    const int span = params.step;
    const int stages = stage_count(params, tree.depth);
    for (const auto& ch : coeffs.channels)
        if (static_cast<int>(ch.stage_ac.size()) != stages)
            throw CodecError("ssgt_decode: stage count mismatch");

    std::vector<std::array<double, 3>> values(1);
    for (int ch = 0; ch < 3; ++ch) values[0][static_cast<std::size_t>(ch)] = coeffs.channels[static_cast<std::size_t>(ch)].root_dc;

    for (int level = 0; level + span <= tree.depth; level += span) {
        const auto& parents = tree.levels[static_cast<std::size_t>(level)];
        const auto begin = detail::child_ranges(tree, level, span);
        const std::size_t stage = static_cast<std::size_t>(level / span);
        const std::size_t child_count = tree.levels[static_cast<std::size_t>(level) + span].size();

        for (const auto& ch : coeffs.channels)
            if (ch.stage_ac[stage].size() != child_count - parents.size())
                throw CodecError("ssgt_decode: coefficient count mismatch");

        std::vector<std::array<double, 3>> next(child_count);
        parallel_for(parents.size(), params.parallel, [&](std::size_t p) {
            const std::uint32_t lo = begin[p];
            const std::uint32_t hi = begin[p + 1];
            const int n = static_cast<int>(hi - lo);
            const auto graph = detail::node_graph(tree, level, span, p, lo, hi, params.alpha);
            const auto basis = subspace_basis(graph);

            const std::size_t ac_offset = lo - p;
            std::vector<double> h(static_cast<std::size_t>(n));
            std::vector<double> f(static_cast<std::size_t>(n));
            for (int ch = 0; ch < 3; ++ch) {
                h[0] = values[p][static_cast<std::size_t>(ch)];
                const auto& ac = coeffs.channels[static_cast<std::size_t>(ch)].stage_ac[stage];
                for (int k = 1; k < n; ++k) h[static_cast<std::size_t>(k)] = ac[ac_offset + static_cast<std::size_t>(k) - 1];
                spectral_inverse(basis, h, f);
                for (int k = 0; k < n; ++k) next[lo + k][static_cast<std::size_t>(ch)] = f[static_cast<std::size_t>(k)];
            }
        });
        values = std::move(next);
    }
    return values;
}

// Eq.-style two-point butterfly used by the RAHT baseline. v_lo/w_lo belong to
// the Morton-lower node of the pair.
inline std::array<double, 2> raht_forward_pair(double v_lo, double v_hi, double w_lo, double w_hi) {
    const double s_lo = std::sqrt(w_lo);
    const double s_hi = std::sqrt(w_hi);
    const double s_all = std::sqrt(w_lo + w_hi);
    return {(s_lo * v_lo + s_hi * v_hi) / s_all, (-s_hi * v_lo + s_lo * v_hi) / s_all};
}

inline std::array<double, 2> raht_inverse_pair(double dc, double ac, double w_lo, double w_hi) {
    const double s_lo = std::sqrt(w_lo);
    const double s_hi = std::sqrt(w_hi);
    const double s_all = std::sqrt(w_lo + w_hi);
    return {(s_lo * dc - s_hi * ac) / s_all, (s_hi * dc + s_lo * ac) / s_all};
}

namespace detail {

// One RAHT stage merges the nodes at level l+1 into their level-l parents via
// three pairing passes along the z, y, then x bit of the child index. The plan
// is derived from geometry only, so encoder and decoder replay the identical
// structure. AC slots follow the canonical order (parent Morton, pass, pair
// Morton), which differs from scan order (pass-major), hence the sort.
struct RahtOp {
    bool is_pair = false;
    std::uint32_t src = 0;  // index into the pass's input state; pairs consume src and src+1
    double w_lo = 0.0;
    double w_hi = 0.0;
    std::uint32_t ac_slot = 0;
};

struct RahtStagePlan {
    std::array<std::vector<RahtOp>, 3> passes;
    std::array<std::size_t, 3> input_sizes{};
    std::size_t ac_count = 0;
    std::size_t output_count = 0;
};

inline RahtStagePlan build_raht_stage_plan(std::span<const OctreeNode> children) {
    struct WorkEntry {
        std::uint64_t key;
        double weight;
    };
    std::vector<WorkEntry> state(children.size());
    for (std::size_t i = 0; i < children.size(); ++i)
        state[i] = {children[i].morton, static_cast<double>(children[i].count)};

    struct SlotKey {
        std::uint64_t parent;
        int pass;
        std::uint64_t pair_key;
        std::uint32_t op_index;
        int op_pass;
    };
    std::vector<SlotKey> slots;

    RahtStagePlan plan;
    for (int d = 0; d < 3; ++d) {
        plan.input_sizes[static_cast<std::size_t>(d)] = state.size();
        auto& ops = plan.passes[static_cast<std::size_t>(d)];
        const std::uint64_t bit = std::uint64_t{1} << d;
        std::vector<WorkEntry> merged;
        merged.reserve(state.size());
        for (std::size_t i = 0; i < state.size();) {
            if (i + 1 < state.size() && (state[i].key ^ state[i + 1].key) == bit) {
                RahtOp op;
                op.is_pair = true;
                op.src = static_cast<std::uint32_t>(i);
                op.w_lo = state[i].weight;
                op.w_hi = state[i + 1].weight;
                slots.push_back({state[i].key >> 3, d, state[i].key,
                                 static_cast<std::uint32_t>(ops.size()), d});
                ops.push_back(op);
                merged.push_back({state[i].key, state[i].weight + state[i + 1].weight});
                i += 2;
            } else {
                RahtOp op;
                op.src = static_cast<std::uint32_t>(i);
                ops.push_back(op);
                merged.push_back({state[i].key & ~bit, state[i].weight});
                i += 1;
            }
        }
        state = std::move(merged);
    }
    plan.output_count = state.size();
    plan.ac_count = slots.size();

    std::sort(slots.begin(), slots.end(), [](const SlotKey& a, const SlotKey& b) {
        return std::tie(a.parent, a.pass, a.pair_key) < std::tie(b.parent, b.pass, b.pair_key);
    });
    for (std::uint32_t slot = 0; slot < slots.size(); ++slot)
        plan.passes[static_cast<std::size_t>(slots[slot].op_pass)][slots[slot].op_index].ac_slot = slot;
    return plan;
}

}  // namespace detail

// RAHT baseline encoder: one stage per octree level, leaf-most first; the
// subspace step parameter is ignored (pairs always span one level).
inline CoefficientSet raht_encode(const VoxelizedCloud& cloud, const Octree& tree,
                                  const CodecParams& params) {
    validate_params(params, tree.depth);
    if (cloud.attributes.size() != tree.leaves().size())
        throw CodecError("raht_encode: attribute count does not match leaf count");

    CoefficientSet out;
    for (auto& ch : out.channels) ch.stage_ac.resize(static_cast<std::size_t>(tree.depth));

    std::vector<std::array<double, 3>> values = cloud.attributes;
    for (int level = tree.depth - 1; level >= 0; --level) {
        const auto& children = tree.levels[static_cast<std::size_t>(level) + 1];
        const auto plan = detail::build_raht_stage_plan(children);
        if (plan.output_count != tree.levels[static_cast<std::size_t>(level)].size())
            throw CodecError("raht_encode: stage did not reduce to the parent level");

        for (auto& ch : out.channels) ch.stage_ac[static_cast<std::size_t>(level)].resize(plan.ac_count);

        for (int d = 0; d < 3; ++d) {
            const auto& ops = plan.passes[static_cast<std::size_t>(d)];
            std::vector<std::array<double, 3>> merged;
            merged.reserve(ops.size());
            for (const auto& op : ops) {
                if (op.is_pair) {
                    std::array<double, 3> dc{};
                    for (int ch = 0; ch < 3; ++ch) {
                        const auto pair = raht_forward_pair(values[op.src][static_cast<std::size_t>(ch)],
                                                            values[op.src + 1][static_cast<std::size_t>(ch)],
                                                            op.w_lo, op.w_hi);
                        dc[static_cast<std::size_t>(ch)] = pair[0];
                        out.channels[static_cast<std::size_t>(ch)].stage_ac[static_cast<std::size_t>(level)][op.ac_slot] = pair[1];
                    }
                    merged.push_back(dc);
                } else {
                    merged.push_back(values[op.src]);
                }
            }
            values = std::move(merged);
        }
    }
    for (int ch = 0; ch < 3; ++ch) out.channels[static_cast<std::size_t>(ch)].root_dc = values[0][static_cast<std::size_t>(ch)];
    return out;
}

inline std::vector<std::array<double, 3>> raht_decode(const CoefficientSet& coeffs, const Octree& tree,
                                                      const CodecParams& params) {
    validate_params(params, tree.depth);
    for (const auto& ch : coeffs.channels)
        if (static_cast<int>(ch.stage_ac.size()) != tree.depth)
            throw CodecError("raht_decode: stage count mismatch");

    std::vector<std::array<double, 3>> values(1);
    for (int ch = 0; ch < 3; ++ch) values[0][static_cast<std::size_t>(ch)] = coeffs.channels[static_cast<std::size_t>(ch)].root_dc;

    for (int level = 0; level < tree.depth; ++level) {
        const auto& children = tree.levels[static_cast<std::size_t>(level) + 1];
        const auto plan = detail::build_raht_stage_plan(children);
        if (values.size() != plan.output_count) throw CodecError("raht_decode: state size mismatch");
        for (const auto& ch : coeffs.channels)
            if (ch.stage_ac[static_cast<std::size_t>(level)].size() != plan.ac_count)
                throw CodecError("raht_decode: coefficient count mismatch");

        for (int d = 2; d >= 0; --d) {
            const auto& ops = plan.passes[static_cast<std::size_t>(d)];
            std::vector<std::array<double, 3>> split(plan.input_sizes[static_cast<std::size_t>(d)]);
            for (std::size_t o = 0; o < ops.size(); ++o) {
                const auto& op = ops[o];
                if (op.is_pair) {
                    for (int ch = 0; ch < 3; ++ch) {
                        const double ac =
                            coeffs.channels[static_cast<std::size_t>(ch)].stage_ac[static_cast<std::size_t>(level)][op.ac_slot];
                        const auto pair = raht_inverse_pair(values[o][static_cast<std::size_t>(ch)], ac, op.w_lo, op.w_hi);
                        split[op.src][static_cast<std::size_t>(ch)] = pair[0];
                        split[op.src + 1][static_cast<std::size_t>(ch)] = pair[1];
                    }
                } else {
                    split[op.src] = values[o];
                }
            }
            values = std::move(split);
        }
    }
    return values;
}

inline CoefficientSet encode_attributes(const VoxelizedCloud& cloud, const Octree& tree,
                                        const CodecParams& params, const BasisObserver& observer = {}) {
    return params.transform == Transform::kSsgt ? ssgt_encode(cloud, tree, params, observer)
                                                : raht_encode(cloud, tree, params);
}

inline std::vector<std::array<double, 3>> decode_attributes(const CoefficientSet& coeffs,
                                                            const Octree& tree,
                                                            const CodecParams& params) {
    return params.transform == Transform::kSsgt ? ssgt_decode(coeffs, tree, params)
                                                : raht_decode(coeffs, tree, params);
}

// Canonical linearization: root DC first, then stages root-most to leaf-most,
// each stage already in canonical internal order.
inline std::vector<double> canonical_order(const ChannelCoefficients& channel) {
    std::vector<double> flat;
    flat.reserve(channel.total());
    flat.push_back(channel.root_dc);
    for (const auto& stage : channel.stage_ac) flat.insert(flat.end(), stage.begin(), stage.end());
    return flat;
}

inline ChannelCoefficients inverse_order(std::span<const double> flat,
                                         std::span<const std::size_t> ac_counts) {
    std::size_t need = 1;
    for (const auto c : ac_counts) need += c;
    if (flat.size() != need) throw CodecError("inverse_order: coefficient count mismatch");

    ChannelCoefficients channel;
    channel.root_dc = flat[0];
    std::size_t pos = 1;
    for (const auto c : ac_counts) {
        channel.stage_ac.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                                      flat.begin() + static_cast<std::ptrdiff_t>(pos + c));
        pos += c;
    }
    return channel;
}

}  // namespace ssgt
