#pragma once

#include <stdexcept>
#include <string>

#include "moutard/errors.hpp"

namespace moutard {

// Rectangular evaluation lattice, endpoints included.  The r axis must stay
// strictly positive: the operator carries a Y_r / r term and transformed
// potentials carry 1/r^2 terms, so r = 0 is never a usable sample.
struct GridSpec {
    double r_min, r_max, z_min, z_max;
    int n_r, n_z;

    void validate() const {
        if (!(r_min > 0.0))
            throw std::invalid_argument(
                "grid: r_min must be > 0 (1/r and 1/r^2 terms blow up on the axis)");
        if (!(r_min < r_max)) throw std::invalid_argument("grid: need r_min < r_max");
        if (!(z_min < z_max)) throw std::invalid_argument("grid: need z_min < z_max");
        if (n_r < 2 || n_z < 2)
            throw std::invalid_argument("grid: need at least 2 points per axis");
    }

    double r_at(int i) const {
        return r_min + (r_max - r_min) * double(i) / double(n_r - 1);
    }
    double z_at(int j) const {
        return z_min + (z_max - z_min) * double(j) / double(n_z - 1);
    }
    long total() const { return long(n_r) * long(n_z); }

    // "rmin:rmax:nr,zmin:zmax:nz"
    static GridSpec parse(const std::string& text);

    std::string to_text() const;
};

// Shared default for residual verification: r in [0.005, 5] (axis margin
// 1e-3 of r_max), z in [-5, 5], 50 x 50.
inline GridSpec standard_grid() { return GridSpec{0.005, 5.0, -5.0, 5.0, 50, 50}; }

} // namespace moutard
