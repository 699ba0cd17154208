#include "moutard/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace moutard {

namespace {

// 15-point Kronrod extension of 7-point Gauss (QUADPACK dqk15 abscissae and
// weights on [-1, 1]; nodes at +/- xgk[i], xgk[7] = 0).
constexpr double xgk[8] = {0.9914553711208126, 0.9491079123427585,
                           0.8648644233597691, 0.7415311855993944,
                           0.5860872354676911, 0.4058451513773972,
                           0.2077849550078985, 0.0};
constexpr double wgk[8] = {0.0229353220105292, 0.0630920926299785,
                           0.1047900103222502, 0.1406532597155259,
                           0.1690047266392679, 0.1903505780647854,
                           0.2044329400752989, 0.2094821410847278};
constexpr double wg[4] = {0.1294849661688697, 0.2797053914892767,
                          0.3818300505051189, 0.4179591836734694};

struct Panel {
    double k15;
    double g7;
};

Panel gk15(const std::function<double(double)>& f, double a, double b, long& evals) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    evals += 15;
    double k = wgk[7] * fc;
    double g = wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * xgk[i];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        k += wgk[i] * (f1 + f2);
        if (i % 2 == 1) g += wg[i / 2] * (f1 + f2);
    }
    return {k * h, g * h};
}

constexpr int kMaxDepth = 28;

void adapt(const std::function<double(double)>& f, double a, double b, double budget,
           int depth, QuadratureResult& acc, long& evals) {
    const Panel p = gk15(f, a, b, evals);
    const double err = std::abs(p.k15 - p.g7);
    if (err <= budget || !(std::abs(b - a) >
                           1e-14 * (std::abs(a) + std::abs(b) + 1.0))) {
        if (err > budget)
            throw QuadratureError(
                "quadrature: interval exhausted before reaching tolerance "
                "(integrand singular or non-smooth near " +
                std::to_string(0.5 * (a + b)) + ")");
        acc.value += p.k15;
        acc.error_estimate += err;
        return;
    }
    if (depth >= kMaxDepth)
        throw QuadratureError(
            "quadrature: max subdivision depth exceeded (integrand singular or "
            "non-smooth near " +
            std::to_string(0.5 * (a + b)) + ")");
    const double m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * budget, depth + 1, acc, evals);
    adapt(f, m, b, 0.5 * budget, depth + 1, acc, evals);
}

} // namespace

QuadratureResult integrate_segment(const std::function<double(double)>& f, double a,
                                   double b, double tol) {
    QuadratureResult out;
    if (a == b) return out;
    long evals = 0;
    const Panel first = gk15(f, a, b, evals);
    const double scale = std::max(1.0, std::abs(first.k15));
    adapt(f, a, b, tol * scale, 0, out, evals);
    out.n_evaluations = evals;
    return out;
}

SegmentProbe sampled_segment_probe(PointProbe point_ok, int samples) {
    return [point_ok = std::move(point_ok), samples](double r0, double z0, double r1,
                                                     double z1) {
        for (int i = 0; i <= samples; ++i) {
            const double t = double(i) / double(samples);
            if (!point_ok(r0 + t * (r1 - r0), z0 + t * (z1 - z0))) return false;
        }
        return true;
    };
}

namespace {

void push_segment(std::vector<PathSegment>& segs, bool r_sweep, double fixed,
                  double from, double to) {
    if (from == to) return;
    segs.push_back({r_sweep, fixed, from, to});
}

bool try_l_path(double r0, double z0, double r1, double z1, bool r_first,
                const SegmentProbe& ok, PathPlan& out) {
    std::vector<PathSegment> segs;
    if (r_first) {
        push_segment(segs, true, z0, r0, r1);
        push_segment(segs, false, r1, z0, z1);
    } else {
        push_segment(segs, false, r0, z0, z1);
        push_segment(segs, true, z1, r0, r1);
    }
    for (const auto& s : segs)
        if (!ok(s.r0(), s.z0(), s.r1(), s.z1())) return false;
    out.segments = std::move(segs);
    return true;
}

std::vector<double> lattice_lines(double lo, double hi, int n, double a, double b) {
    std::vector<double> lines;
    lines.reserve(n + 2);
    for (int i = 0; i < n; ++i)
        lines.push_back(lo + (hi - lo) * double(i) / double(n - 1));
    lines.push_back(a);
    lines.push_back(b);
    std::sort(lines.begin(), lines.end());
    lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
    return lines;
}

} // namespace

PathPlan plan_path(double base_r, double base_z, double target_r, double target_z,
                   const PointProbe& point_ok, const SegmentProbe& segment_ok,
                   const GridSpec& hint) {
    if (!point_ok(base_r, base_z))
        throw PathError("path: basepoint is singular for the integrand");
    if (!point_ok(target_r, target_z))
        throw PathError("path: target point is singular for the integrand");

    PathPlan plan;
    if (base_r == target_r && base_z == target_z) return plan;

    if (try_l_path(base_r, base_z, target_r, target_z, true, segment_ok, plan))
        return plan;
    if (try_l_path(base_r, base_z, target_r, target_z, false, segment_ok, plan))
        return plan;

    // Staircase search over a lattice that contains base and target exactly.
    const std::vector<double> rl =
        lattice_lines(hint.r_min, hint.r_max, hint.n_r, base_r, target_r);
    const std::vector<double> zl =
        lattice_lines(hint.z_min, hint.z_max, hint.n_z, base_z, target_z);
    const int nr = int(rl.size()), nz = int(zl.size());
    auto index_of = [](const std::vector<double>& v, double x) {
        return int(std::lower_bound(v.begin(), v.end(), x) - v.begin());
    };
    const int si = index_of(rl, base_r), sj = index_of(zl, base_z);
    const int ti = index_of(rl, target_r), tj = index_of(zl, target_z);

    auto id = [nz](int i, int j) { return i * nz + j; };
    std::vector<signed char> open(std::size_t(nr) * nz, -1); // -1 unknown, 0 no, 1 yes
    auto is_open = [&](int i, int j) {
        signed char& o = open[id(i, j)];
        if (o < 0) o = point_ok(rl[i], zl[j]) ? 1 : 0;
        return o == 1;
    };

    std::vector<int> parent(std::size_t(nr) * nz, -2); // -2 unvisited
    std::deque<int> queue;
    parent[id(si, sj)] = -1;
    queue.push_back(id(si, sj));
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    bool found = false;
    while (!queue.empty() && !found) {
        const int cur = queue.front();
        queue.pop_front();
        const int ci = cur / nz, cj = cur % nz;
        for (int d = 0; d < 4; ++d) {
            const int ni = ci + di[d], nj = cj + dj[d];
            if (ni < 0 || ni >= nr || nj < 0 || nj >= nz) continue;
            if (parent[id(ni, nj)] != -2) continue;
            if (!is_open(ni, nj)) continue;
            if (!segment_ok(rl[ci], zl[cj], rl[ni], zl[nj])) {
                continue;
            }
            parent[id(ni, nj)] = cur;
            if (ni == ti && nj == tj) {
                found = true;
                break;
            }
            queue.push_back(id(ni, nj));
        }
    }
    if (!found && !(si == ti && sj == tj))
        throw PathError(
            "path: no singularity-free axis-parallel route from basepoint to "
            "target (points lie in different connected components)");

    // Reconstruct, then merge collinear runs into single segments.
    std::vector<std::pair<double, double>> nodes;
    for (int cur = id(ti, tj); cur != -1; cur = parent[cur])
        nodes.emplace_back(rl[cur / nz], zl[cur % nz]);
    std::reverse(nodes.begin(), nodes.end());

    std::vector<PathSegment> merged;
    std::size_t i = 0;
    while (i + 1 < nodes.size()) {
        const bool r_sweep = nodes[i + 1].second == nodes[i].second;
        std::size_t j = i + 1;
        while (j + 1 < nodes.size() &&
               (r_sweep ? nodes[j + 1].second == nodes[i].second &&
                              (nodes[j + 1].first > nodes[j].first) ==
                                  (nodes[j].first > nodes[i].first)
                        : nodes[j + 1].first == nodes[i].first &&
                              (nodes[j + 1].second > nodes[j].second) ==
                                  (nodes[j].second > nodes[i].second)))
            ++j;
        if (r_sweep)
            merged.push_back({true, nodes[i].second, nodes[i].first, nodes[j].first});
        else
            merged.push_back({false, nodes[i].first, nodes[i].second, nodes[j].second});
        i = j;
    }
    // The merged runs must still pass as whole segments; if one does not
    // (sampling granularity), fall back to the unmerged step sequence.
    bool merged_ok = true;
    for (const auto& s : merged)
        if (!segment_ok(s.r0(), s.z0(), s.r1(), s.z1())) {
            merged_ok = false;
            break;
        }
    if (merged_ok) {
        plan.segments = std::move(merged);
    } else {
        for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
            if (nodes[k + 1].second == nodes[k].second)
                push_segment(plan.segments, true, nodes[k].second, nodes[k].first,
                             nodes[k + 1].first);
            else
                push_segment(plan.segments, false, nodes[k].first, nodes[k].second,
                             nodes[k + 1].second);
        }
    }
    return plan;
}

QuadratureResult line_integral(const std::function<double(double, double)>& A,
                               const std::function<double(double, double)>& B,
                               const PathPlan& plan, double tol) {
    QuadratureResult total;
    if (plan.segments.empty()) return total;
    const double seg_tol = tol / double(plan.segments.size());
    for (const auto& s : plan.segments) {
        QuadratureResult q;
        if (s.r_sweep)
            q = integrate_segment([&](double t) { return A(t, s.fixed); }, s.from,
                                  s.to, seg_tol);
        else
            q = integrate_segment([&](double t) { return B(s.fixed, t); }, s.from,
                                  s.to, seg_tol);
        total.value += q.value;
        total.error_estimate += q.error_estimate;
        total.n_evaluations += q.n_evaluations;
    }
    return total;
}

} // namespace moutard
