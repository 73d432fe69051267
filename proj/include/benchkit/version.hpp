// Copyright 2026 The benchkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace benchkit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace benchkit
