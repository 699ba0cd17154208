#pragma once

#include <functional>
#include <vector>

#include "moutard/errors.hpp"
#include "moutard/grid.hpp"

namespace moutard {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long n_evaluations = 0;
};

// Deterministic adaptive Gauss-Kronrod (G7, K15) with recursive bisection;
// the error budget is halved per split so segment estimates sum below
// tol * max(1, |value|).  Throws QuadratureError when the maximum subdivision
// depth is exceeded, which in practice means the integrand is singular on the
// segment and the caller should replan.
QuadratureResult integrate_segment(const std::function<double(double)>& f, double a,
                                   double b, double tol);

// One axis-parallel piece of a path: r varies at fixed z, or z varies at
// fixed r.  from == to segments are allowed and contribute nothing.
struct PathSegment {
    bool r_sweep;
    double fixed;
    double from, to;
    double r0() const { return r_sweep ? from : fixed; }
    double z0() const { return r_sweep ? fixed : from; }
    double r1() const { return r_sweep ? to : fixed; }
    double z1() const { return r_sweep ? fixed : to; }
};

struct PathPlan {
    std::vector<PathSegment> segments; // contiguous: each starts where the previous ended
};

// Point predicate: true when the integrand is usable at (r, z).
using PointProbe = std::function<bool(double, double)>;
// Segment predicate: true when the whole axis-parallel segment between the
// two points is usable (dense sampling plus whatever structural checks the
// caller wants, e.g. sign uniformity of denominators).
using SegmentProbe = std::function<bool(double, double, double, double)>;

// Dense-sampling segment check built from a point probe.
SegmentProbe sampled_segment_probe(PointProbe point_ok, int samples = 65);

// Deterministic axis-parallel routing from base to target: try the r-first L,
// then the z-first L, then a breadth-first staircase over a lattice spanning
// an inflated bounding box (resolution and extent from `hint`).  Tie-breaking
// is fixed, so identical inputs always produce identical plans.  Throws
// PathError when base/target fail the probe or no route exists (target in a
// different connected component of the usable set).
PathPlan plan_path(double base_r, double base_z, double target_r, double target_z,
                   const PointProbe& point_ok, const SegmentProbe& segment_ok,
                   const GridSpec& hint);

// Integrates A dr + B dz along the plan; per-segment tolerance is divided so
// the total honors `tol`, and error estimates accumulate additively.
QuadratureResult line_integral(const std::function<double(double, double)>& A,
                               const std::function<double(double, double)>& B,
                               const PathPlan& plan, double tol);

} // namespace moutard
