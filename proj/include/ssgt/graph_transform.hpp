// SPDX-FileCopyrightText: 2026 SSGT Codec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ssgt/errors.hpp"

namespace ssgt {

// Weighted complete graph with self-loops over the occupied children of one
// octree subspace. Vertex positions are integer voxel offsets local to the
// parent, so the geometric pattern is scale-free and one alpha applies at
// every stage of the cascade.
struct SubspaceGraph {
    std::vector<std::array<std::int32_t, 3>> positions;
    std::vector<double> counts;   // points per vertex (a_i)
    std::vector<double> weights;  // dense symmetric matrix, row-major, self-loops on the diagonal
    double alpha = 0.1;

    int size() const { return static_cast<int>(positions.size()); }
    double weight(int i, int j) const { return weights[static_cast<std::size_t>(i) * positions.size() + j]; }
};

// Orthonormal eigenbasis of one subspace's normalized Laplacian. Columns of
// phi are eigenvectors, eigenvalues ascend, column 0 is the DC kernel
// (parallel to D^{1/2} * 1 with positive entries).
struct StageBasis {
    int n = 0;
    std::vector<double> phi;     // row-major, phi[r * n + c]
    std::vector<double> lambda;  // ascending
    std::vector<double> degree;

    double entry(int r, int c) const { return phi[static_cast<std::size_t>(r) * n + c]; }
};

inline constexpr double kWeightFloor = 1e-300;  // guards exp() underflow to exact zero

inline double squared_distance(const std::array<std::int32_t, 3>& a, const std::array<std::int32_t, 3>& b) {
    double d2 = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double d = static_cast<double>(a[k]) - static_cast<double>(b[k]);
        d2 += d * d;
    }
    return d2;
}

// Inter-vertex edge weight: exp(-alpha * |xi - xj|^2) * a_i * a_j.
inline double edge_weight(double a_i, double a_j, const std::array<std::int32_t, 3>& x_i,
                          const std::array<std::int32_t, 3>& x_j, double alpha) {
    const double w = std::exp(-alpha * squared_distance(x_i, x_j)) * a_i * a_j;
    return std::max(w, kWeightFloor);
}

// Self-loop weight: one sub-edge per point pair inside the vertex.
inline double self_loop_weight(double a) { return 0.5 * a * (a - 1.0); }

struct GraphVertex {
    std::array<std::int32_t, 3> position{};
    double count = 1.0;
};

inline SubspaceGraph build_graph(std::span<const GraphVertex> vertices, double alpha) {
    const int n = static_cast<int>(vertices.size());
    if (n < 1) throw CodecError("build_graph: empty vertex set");

    SubspaceGraph g;
    g.alpha = alpha;
    g.positions.resize(vertices.size());
    g.counts.resize(vertices.size());
    for (int i = 0; i < n; ++i) {
        g.positions[i] = vertices[i].position;
        g.counts[i] = vertices[i].count;
    }
    g.weights.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        g.weights[static_cast<std::size_t>(i) * n + i] = self_loop_weight(g.counts[i]);
        for (int j = i + 1; j < n; ++j) {
            if (g.positions[i] == g.positions[j]) throw CodecError("build_graph: duplicate vertex position");
            const double w = edge_weight(g.counts[i], g.counts[j], g.positions[i], g.positions[j], alpha);
            g.weights[static_cast<std::size_t>(i) * n + j] = w;
            g.weights[static_cast<std::size_t>(j) * n + i] = w;
        }
    }
    return g;
}

// Per-vertex degree d_i = a_i(a_i - 1) + sum_{j != i} d_ij a_i a_j. Both terms
// are read off the stored weight matrix (the self-loop contributes twice its
// weight), so globally rescaled weights rescale D and leave L_sym unchanged.
inline std::vector<double> degrees(const SubspaceGraph& g) {
    const int n = g.size();
    std::vector<double> d(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double sum = 2.0 * g.weight(i, i);
        for (int j = 0; j < n; ++j)
            if (j != i) sum += g.weight(i, j);
        d[static_cast<std::size_t>(i)] = sum;
    }
    return d;
}

// Symmetric normalized Laplacian D^{-1/2} (D - 2W_diag - W_off) D^{-1/2}.
// The self-loop cancels out of L but stays in D, which is how it shapes the
// spectrum. Requires n >= 2; single-vertex subspaces bypass the transform.
inline std::vector<double> normalized_laplacian(const SubspaceGraph& g, std::span<const double> degree) {
    const int n = g.size();
    if (n < 2) throw CodecError("normalized_laplacian: need at least two vertices");
    std::vector<double> inv_sqrt(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (!(degree[static_cast<std::size_t>(i)] > 0.0))
            throw CodecError("normalized_laplacian: zero degree");
        inv_sqrt[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(degree[static_cast<std::size_t>(i)]);
    }
    std::vector<double> lsym(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double lij = i == j ? degree[static_cast<std::size_t>(i)] - 2.0 * g.weight(i, i)
                                      : -g.weight(i, j);
            lsym[static_cast<std::size_t>(i) * n + j] =
                lij * inv_sqrt[static_cast<std::size_t>(i)] * inv_sqrt[static_cast<std::size_t>(j)];
        }
    }
    return lsym;
}

namespace detail {

inline double off_diagonal_norm(const std::vector<double>& a, int n) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) sum += a[static_cast<std::size_t>(i) * n + j] * a[static_cast<std::size_t>(i) * n + j];
    return std::sqrt(sum);
}

inline double frobenius_norm(const std::vector<double>& a) {
    double sum = 0.0;
    for (double v : a) sum += v * v;
    return std::sqrt(sum);
}

}  // namespace detail

// Cyclic Jacobi eigendecomposition of a symmetric matrix. The sweep order is
// fixed (row-major upper triangle) and the sort/sign rules below are part of
// the codec contract: the decoder rebuilds every basis from geometry with this
// exact routine, so any implementation drift would corrupt reconstructions.
//   - eigenpairs sorted by eigenvalue ascending, stable in the original
//     column index on ties
//   - each eigenvector is signed so its largest-magnitude entry (lowest index
//     on magnitude ties) is positive
//   - column 0 is additionally signed to be entrywise positive, matching the
//     DC kernel direction D^{1/2} * 1
inline StageBasis eigendecompose(std::vector<double> matrix, std::vector<double> degree) {
    const int n = static_cast<int>(degree.size());
    if (n < 1 || matrix.size() != static_cast<std::size_t>(n) * n)
        throw CodecError("eigendecompose: dimension mismatch");

    StageBasis basis;
    basis.n = n;
    basis.degree = std::move(degree);
    if (n == 1) {
        basis.phi = {1.0};
        basis.lambda = {matrix[0]};
        return basis;
    }

    std::vector<double> vec(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) vec[static_cast<std::size_t>(i) * n + i] = 1.0;

    const double threshold = 1e-13 * detail::frobenius_norm(matrix);
    constexpr int kMaxSweeps = 100;
    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (detail::off_diagonal_norm(matrix, n) <= threshold) {
            converged = true;
            break;
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = matrix[static_cast<std::size_t>(p) * n + q];
                if (apq == 0.0) continue;
                const double app = matrix[static_cast<std::size_t>(p) * n + p];
                const double aqq = matrix[static_cast<std::size_t>(q) * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                    (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                matrix[static_cast<std::size_t>(p) * n + p] = app - t * apq;
                matrix[static_cast<std::size_t>(q) * n + q] = aqq + t * apq;
                matrix[static_cast<std::size_t>(p) * n + q] = 0.0;
                matrix[static_cast<std::size_t>(q) * n + p] = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = matrix[static_cast<std::size_t>(k) * n + p];
                    const double akq = matrix[static_cast<std::size_t>(k) * n + q];
                    matrix[static_cast<std::size_t>(k) * n + p] = c * akp - s * akq;
                    matrix[static_cast<std::size_t>(p) * n + k] = c * akp - s * akq;
                    matrix[static_cast<std::size_t>(k) * n + q] = s * akp + c * akq;
                    matrix[static_cast<std::size_t>(q) * n + k] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = vec[static_cast<std::size_t>(k) * n + p];
                    const double vkq = vec[static_cast<std::size_t>(k) * n + q];
                    vec[static_cast<std::size_t>(k) * n + p] = c * vkp - s * vkq;
                    vec[static_cast<std::size_t>(k) * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged && detail::off_diagonal_norm(matrix, n) > threshold)
        throw CodecError("eigendecompose: Jacobi iteration did not converge");

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return matrix[static_cast<std::size_t>(a) * n + a] < matrix[static_cast<std::size_t>(b) * n + b];
    });

    basis.lambda.resize(static_cast<std::size_t>(n));
    basis.phi.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int c = 0; c < n; ++c) {
        const int src = order[static_cast<std::size_t>(c)];
        basis.lambda[static_cast<std::size_t>(c)] = matrix[static_cast<std::size_t>(src) * n + src];

        int pivot = 0;
        double best = -1.0;
        for (int r = 0; r < n; ++r) {
            const double mag = std::abs(vec[static_cast<std::size_t>(r) * n + src]);
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        const double sign = vec[static_cast<std::size_t>(pivot) * n + src] < 0.0 ? -1.0 : 1.0;
        for (int r = 0; r < n; ++r)
            basis.phi[static_cast<std::size_t>(r) * n + c] = sign * vec[static_cast<std::size_t>(r) * n + src];
    }

    double dc_sum = 0.0;
    for (int r = 0; r < n; ++r) dc_sum += basis.phi[static_cast<std::size_t>(r) * n];
    if (dc_sum < 0.0)
        for (int r = 0; r < n; ++r) basis.phi[static_cast<std::size_t>(r) * n] = -basis.phi[static_cast<std::size_t>(r) * n];

    return basis;
}

// End-to-end basis for one subspace graph. Single-vertex subspaces bypass the
// Laplacian (D^{-1/2} would be singular there) and use the 1x1 identity.
inline StageBasis subspace_basis(const SubspaceGraph& g) {
    auto deg = degrees(g);
    if (g.size() == 1) {
        StageBasis basis;
        basis.n = 1;
        basis.phi = {1.0};
        basis.lambda = {0.0};
        basis.degree = std::move(deg);
        return basis;
    }
    auto lsym = normalized_laplacian(g, deg);
    return eigendecompose(std::move(lsym), std::move(deg));
}

// H = Phi^T f. h[0] is the DC coefficient, the rest are ACs.
inline void spectral_forward(const StageBasis& basis, std::span<const double> f, std::span<double> h) {
    const int n = basis.n;
    if (static_cast<int>(f.size()) != n || static_cast<int>(h.size()) != n)
        throw CodecError("spectral_forward: dimension mismatch");
    for (int c = 0; c < n; ++c) {
        double acc = 0.0;
        for (int r = 0; r < n; ++r) acc += basis.phi[static_cast<std::size_t>(r) * n + c] * f[static_cast<std::size_t>(r)];
        h[static_cast<std::size_t>(c)] = acc;
    }
}

// f = Phi h, the orthonormal inverse.
inline void spectral_inverse(const StageBasis& basis, std::span<const double> h, std::span<double> f) {
    const int n = basis.n;
    if (static_cast<int>(h.size()) != n || static_cast<int>(f.size()) != n)
        throw CodecError("spectral_inverse: dimension mismatch");
    for (int r = 0; r < n; ++r) {
        double acc = 0.0;
        for (int c = 0; c < n; ++c) acc += basis.phi[static_cast<std::size_t>(r) * n + c] * h[static_cast<std::size_t>(c)];
        f[static_cast<std::size_t>(r)] = acc;
    }
}

struct ForwardResult {
    double dc = 0.0;
    std::vector<double> ac;
};

inline ForwardResult forward(const StageBasis& basis, std::span<const double> f) {
    std::vector<double> h(static_cast<std::size_t>(basis.n));
    spectral_forward(basis, f, h);
    ForwardResult out;
    out.dc = h[0];
    out.ac.assign(h.begin() + 1, h.end());
    return out;
}

inline std::vector<double> inverse(const StageBasis& basis, double dc, std::span<const double> ac) {
    if (static_cast<int>(ac.size()) + 1 != basis.n) throw CodecError("inverse: dimension mismatch");
    std::vector<double> h(static_cast<std::size_t>(basis.n));
    h[0] = dc;
    for (std::size_t i = 0; i < ac.size(); ++i) h[i + 1] = ac[i];
    std::vector<double> f(static_cast<std::size_t>(basis.n));
    spectral_inverse(basis, h, f);
    return f;
}

}  // namespace ssgt
