#pragma once

#include <cstdint>
#include <random>

namespace hsat::detail {

/// mt19937_64 with a portable double conversion; std distributions are not
/// specified bit-for-bit across standard libraries.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace hsat::detail
