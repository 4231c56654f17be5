#pragma once

// Real-valued path sampled on a uniform time grid.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace stabletree {

struct GridPath {
    double dt = 0.0;
    std::vector<double> values;  // X at times k dt, values[0] = 0

    double horizon() const { return dt * double(values.size() - 1); }
};

// Grid index of a real time, clamped to the path's range.
inline std::int64_t grid_index(const GridPath& p, double t) {
    if (p.values.empty()) throw std::invalid_argument("grid_index: empty path");
    std::int64_t j = static_cast<std::int64_t>(std::llround(t / p.dt));
    if (j < 0) j = 0;
    const std::int64_t last = static_cast<std::int64_t>(p.values.size()) - 1;
    if (j > last) j = last;
    return j;
}

inline double value_at(const GridPath& p, double t) { return p.values[static_cast<std::size_t>(grid_index(p, t))]; }

}  // namespace stabletree
