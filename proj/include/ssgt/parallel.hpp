// SPDX-FileCopyrightText: 2026 SSGT Codec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <future>
#include <thread>
#include <vector>

namespace ssgt {

// Runs fn(i) for every i in [0, n). When parallel is set, indices are split
// into contiguous chunks across worker threads. Each index must write only to
// its own output slot, which keeps results identical to sequential execution
// regardless of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, bool parallel, Fn&& fn) {
    if (!parallel || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t hw = std::max<std::size_t>(std::thread::hardware_concurrency(), 1);
    const std::size_t workers = std::min({std::max<std::size_t>(hw, 2), n, std::size_t{8}});
    const std::size_t chunk = (n + workers - 1) / workers;

    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(begin + chunk, n);
        if (begin >= end) break;
        futures.push_back(std::async(std::launch::async, [begin, end, &fn] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        }));
    }
    for (auto& f : futures) f.get();
}

}  // namespace ssgt
