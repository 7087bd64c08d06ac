// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace triage {

using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

constexpr Seconds weeks(long long n) { return Seconds{n * 7 * 24 * 3600}; }
constexpr Seconds days(long long n) { return Seconds{n * 24 * 3600}; }

// Accepts YYYY-MM-DD, YYYY-MM-DDTHH:MM[:SS[.fff]] with optional 'Z' or +hh:mm
// offset (a space is accepted in place of 'T'). Returns nullopt on anything else.
std::optional<Timestamp> parse_iso8601(std::string_view text);

// Always YYYY-MM-DDTHH:MM:SSZ.
std::string format_iso8601(Timestamp t);

Timestamp now_seconds();

}  // namespace triage
