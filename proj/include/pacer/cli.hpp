/*
 * Copyright (c) 2026, the pacersim contributors.
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <string>
#include <vector>

namespace pacer::cli {

/// Exit codes: 0 success, 1 usage error, 2 validation/data error,
/// 3 assertion failure (suite --assert).
int dispatch(const std::vector<std::string>& args);
int dispatch(int argc, const char* const* argv);

}  // namespace pacer::cli
