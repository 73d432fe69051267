// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace benchkit {

/// Lowercase hex SHA-256 of `data`.
std::string Sha256Hex(std::string_view data);

/// SHA-256 of a file's bytes; throws IoError when unreadable.
std::string Sha256File(const std::string& path);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

/// Fixed-point formatting with half-up rounding ("9.3725" -> "9.373").
std::string FormatFixed(double value, int decimals);

/// Half-up rounding to `decimals` places.
double RoundHalfUp(double value, int decimals);

/// Percentages of `counts` rounded to one decimal using largest-remainder
/// apportionment, so the rounded row always sums to exactly 100.0 (or is all
/// zero when the total is zero).
std::vector<double> PercentagesOneDecimal(std::span<const std::size_t> counts);

/// Apportion `total` units over non-negative `weights` by largest remainder.
/// Ties in the remainder go to the lower index.
std::vector<std::size_t> Apportion(std::size_t total, std::span<const double> weights);

/// Seeded engine. mt19937_64's output sequence is fixed by the standard; the
/// helpers below avoid std distributions, whose outputs are not portable.
using Rng = std::mt19937_64;

/// Unbiased draw from [0, n).
std::size_t UniformIndex(Rng& rng, std::size_t n);

template <typename T>
void Shuffle(Rng& rng, std::vector<T>& items) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[UniformIndex(rng, i)]);
  }
}

/// Runs fn(i) for i in [0, n) on at most `max_parallel` threads. The first
/// exception thrown by any invocation is rethrown after all workers join.
void ParallelFor(std::size_t n, std::size_t max_parallel,
                 const std::function<void(std::size_t)>& fn);

}  // namespace benchkit
