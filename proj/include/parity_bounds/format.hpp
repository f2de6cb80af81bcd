// SPDX-License-Identifier: MIT
#pragma once

#include <charconv>
#include <string>

namespace parity_bounds {

// Shortest round-trip decimal representation; identical across runs and
// platforms with IEEE doubles, which keeps CSV output byte-stable.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace parity_bounds
