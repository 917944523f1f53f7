// SPDX-FileCopyrightText: 2026 SSGT Codec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

namespace ssgt {

namespace detail {

// Forward color matrix, ITU-R BT.601 full range (JPEG convention).
inline constexpr std::array<std::array<double, 3>, 3> kRgbToYcbcr{{
    {0.299, 0.587, 0.114},
    {-0.168736, -0.331264, 0.5},
    {0.5, -0.418688, -0.081312},
}};

constexpr std::array<std::array<double, 3>, 3> invert3(const std::array<std::array<double, 3>, 3>& m) {
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    std::array<std::array<double, 3>, 3> inv{};
    inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
    inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
    inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
    return inv;
}

inline constexpr std::array<std::array<double, 3>, 3> kYcbcrToRgb = invert3(kRgbToYcbcr);

}  // namespace detail

// RGB in [0,255] to full-range YCbCr. Outputs are not clamped: chroma stays
// floating point through the whole codec, clamping happens only at the final
// RGB write-out.
inline std::array<double, 3> rgb_to_ycbcr(int r, int g, int b) {
    const auto& m = detail::kRgbToYcbcr;
    return {
        m[0][0] * r + m[0][1] * g + m[0][2] * b,
        128.0 + m[1][0] * r + m[1][1] * g + m[1][2] * b,
        128.0 + m[2][0] * r + m[2][1] * g + m[2][2] * b,
    };
}

// Exact matrix inverse of rgb_to_ycbcr, without rounding or clamping.
inline std::array<double, 3> ycbcr_to_rgb_exact(double y, double cb, double cr) {
    const auto& m = detail::kYcbcrToRgb;
    const double u = cb - 128.0;
    const double v = cr - 128.0;
    return {
        m[0][0] * y + m[0][1] * u + m[0][2] * v,
        m[1][0] * y + m[1][1] * u + m[1][2] * v,
        m[2][0] * y + m[2][1] * u + m[2][2] * v,
    };
}

// Inverse conversion for write-out: round half away from zero, clamp to [0,255].
inline std::array<std::uint8_t, 3> ycbcr_to_rgb(double y, double cb, double cr) {
    const auto rgb = ycbcr_to_rgb_exact(y, cb, cr);
    std::array<std::uint8_t, 3> out{};
    for (int i = 0; i < 3; ++i) {
        const long long v = std::llround(rgb[i]);
        out[i] = static_cast<std::uint8_t>(std::clamp<long long>(v, 0, 255));
    }
    return out;
}

}  // namespace ssgt
