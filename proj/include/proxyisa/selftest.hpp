// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace proxyisa {

// User-facing self-test: each suite re-derives expected values through an
// independent route (finite differences, brute-force replay, exhaustive
// ranking) and checks the engine against them.
struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<std::string> selftest_suite_names();

SuiteResult run_selftest_suite(const std::string& name);

// Runs every suite whose name matches `filter` (empty = all), prints one
// pass/fail line per suite, and returns 0 iff all selected suites passed.
int run_selftests(const std::string& filter, std::ostream& out);

}  // namespace proxyisa
