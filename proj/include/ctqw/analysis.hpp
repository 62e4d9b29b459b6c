// analysis.hpp
// Uniform-mixing scans, closed-form mixing-time sets, Cartesian-product
// closure checks, and the start-vertex lower bound on the average
// distribution.
//
// Non-attainment is only ever certified numerically: "distance to the target
// stays above the tolerance on the scanned window".

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ctqw/graph.hpp"
#include "ctqw/spectral.hpp"
#include "ctqw/walk.hpp"

namespace ctqw {

inline constexpr double default_scan_t_max = 200.0;
inline constexpr double default_scan_step = 1e-3;
inline constexpr double default_refine_width = 1e-10;
inline constexpr double time_match_tolerance = 1e-9;

// Which Hamiltonian the closed-form mixing times refer to: the adjacency
// matrix itself, or A divided by the (regular) degree.
enum class HamiltonianScale { adjacency, degree_normalized };

// Union of arithmetic progressions offset + k*period (k >= 0) and explicit times.
struct MixingTimeSet {
    struct Progression {
        double offset = 0.0;
        double period = 0.0;
    };
    std::vector<Progression> progressions;
    std::vector<double> times;

    // Sorted members in [0, t_max].
    std::vector<double> enumerate(double t_max) const {
        std::vector<double> out;
        for (const auto& p : progressions) {
            if (!(p.period > 0.0)) throw std::invalid_argument("progression period must be positive");
            for (double t = p.offset, k = 0.0; t <= t_max; k += 1.0, t = p.offset + k * p.period) {
                if (t >= 0.0) out.push_back(t);
            }
        }
        for (double t : times)
            if (t >= 0.0 && t <= t_max) out.push_back(t);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end(),
                              [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
                  out.end());
        return out;
    }

    bool contains(double t, double tol = time_match_tolerance) const {
        for (const auto& p : progressions) {
            const double k = std::round((t - p.offset) / p.period);
            if (k >= 0.0 && std::abs(p.offset + k * p.period - t) <= tol) return true;
        }
        return std::any_of(times.begin(), times.end(), [&](double s) { return std::abs(s - t) <= tol; });
    }

    std::optional<double> first(double t_max = 1e6) const {
        auto all = enumerate(t_max);
        if (all.empty()) return std::nullopt;
        return all.front();
    }
};

// Members of both sets within `tol` of each other, on [0, t_max].
inline std::vector<double> intersect(const MixingTimeSet& a, const MixingTimeSet& b, double t_max,
                                     double tol = time_match_tolerance) {
    const auto xs = a.enumerate(t_max);
    const auto ys = b.enumerate(t_max);
    std::vector<double> out;
    std::size_t j = 0;
    for (double x : xs) {
        while (j < ys.size() && ys[j] < x - tol) ++j;
        if (j < ys.size() && std::abs(ys[j] - x) <= tol) out.push_back(x);
    }
    return out;
}

enum class MixingKind { instantaneous, average };

struct MixingReport {
    MixingKind kind = MixingKind::instantaneous;
    Distribution target;
    std::optional<double> best_time;
    double best_distance = 0.0;
    double t_max = 0.0;
    double step = 0.0;
    double tolerance = 0.0;
    bool feasible = false;
    std::vector<double> mixing_times;  // refined times with distance <= tolerance
    std::string note;

    MixingTimeSet time_set() const { return {{}, mixing_times}; }
};

struct ScanOptions {
    double t_max = default_scan_t_max;
    double step = default_scan_step;
    double tolerance = 1e-9;
    double refine_width = default_refine_width;
    unsigned threads = 0;  // 0 = hardware concurrency
};

namespace detail {

inline double distance_at(const WalkPropagator& prop, const Distribution& target, double t,
                          std::vector<double>& scratch) {
    prop.probabilities(t, scratch);
    double d = 0.0;
    for (std::size_t j = 0; j < scratch.size(); ++j) d = std::max(d, std::abs(scratch[j] - target[j]));
    return d;
}

struct Refined {
    double t;
    double distance;
};

// Golden-section search on [lo, hi]; returns the best point evaluated,
// including the seed.
inline Refined golden_refine(const WalkPropagator& prop, const Distribution& target, double lo,
                             double hi, Refined seed, double width, std::vector<double>& scratch) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    Refined best = seed;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = distance_at(prop, target, x1, scratch);
    double f2 = distance_at(prop, target, x2, scratch);
    while (hi - lo > width) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = distance_at(prop, target, x1, scratch);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = distance_at(prop, target, x2, scratch);
        }
        if (f1 < best.distance) best = {x1, f1};
        if (f2 < best.distance) best = {x2, f2};
    }
    return best;
}

inline unsigned worker_count(unsigned requested, std::size_t work) {
    unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(1, work / 4096)));
}

}  // namespace detail

// Grid scan of the sup-norm distance between p(t) and `target`, followed by
// golden-section refinement of every grid local minimum that could still beat
// the coarse minimum (|dp_j/dt| <= 2 rho bounds the possible improvement).
inline MixingReport mixing_scan(const WeightedGraph& g, Vertex start, const Distribution& target,
                                const ScanOptions& opt = {}) {
    if (!(opt.t_max > 0.0) || !(opt.step > 0.0) || !(opt.tolerance > 0.0)) {
        throw std::invalid_argument("t_max, step and tolerance must be positive");
    }
    if (target.size() != g.size()) throw std::invalid_argument("target size does not match graph");
    check_start(g.size(), start);
    const auto d = decompose(g);
    const WalkPropagator prop(d, start);

    const auto count = static_cast<std::size_t>(std::floor(opt.t_max / opt.step)) + 1;
    std::vector<double> dist(count);
    const unsigned workers = detail::worker_count(opt.threads, count);
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (count + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                std::vector<double> scratch;
                const std::size_t lo = w * chunk;
                const std::size_t hi = std::min(count, lo + chunk);
                for (std::size_t i = lo; i < hi; ++i) {
                    dist[i] = detail::distance_at(prop, target, static_cast<double>(i) * opt.step, scratch);
                }
            });
        }
    }

    const double grid_min = *std::min_element(dist.begin(), dist.end());
    const double margin = 2.0 * std::max(d.spectral_radius, 1e-300) * opt.step;
    const double cutoff = std::max(grid_min, opt.tolerance) + margin;

    std::vector<detail::Refined> minima;
    std::vector<double> scratch;
    for (std::size_t i = 0; i < count; ++i) {
        const bool left_ok = i == 0 || dist[i] <= dist[i - 1];
        const bool right_ok = i + 1 == count || dist[i] <= dist[i + 1];
        if (!left_ok || !right_ok || dist[i] > cutoff) continue;
        const double t = static_cast<double>(i) * opt.step;
        const double lo = std::max(0.0, t - opt.step);
        const double hi = std::min(opt.t_max, t + opt.step);
        minima.push_back(detail::golden_refine(prop, target, lo, hi, {t, dist[i]}, opt.refine_width, scratch));
    }

    MixingReport r;
    r.kind = MixingKind::instantaneous;
    r.target = target;
    r.t_max = opt.t_max;
    r.step = opt.step;
    r.tolerance = opt.tolerance;
    detail::Refined best{0.0, dist[0]};
    for (std::size_t i = 0; i < count; ++i)
        if (dist[i] < best.distance) best = {static_cast<double>(i) * opt.step, dist[i]};
    for (const auto& m : minima) {
        if (m.distance < best.distance) best = m;
        if (m.distance <= opt.tolerance) r.mixing_times.push_back(m.t);
    }
    std::sort(r.mixing_times.begin(), r.mixing_times.end());
    r.mixing_times.erase(std::unique(r.mixing_times.begin(), r.mixing_times.end(),
                                     [&](double a, double b) { return std::abs(a - b) <= opt.step; }),
                         r.mixing_times.end());
    r.best_distance = best.distance;
    r.feasible = best.distance <= opt.tolerance;
    r.best_time = r.feasible ? r.mixing_times.front() : best.t;
    r.note = r.feasible ? "target attained within tolerance; best_time is the earliest such time"
                        : "distance exceeds tolerance on [0, t_max]; numerical evidence over a finite "
                          "window, not a proof of non-attainment";
    return r;
}

inline MixingReport uniform_mixing_scan(const WeightedGraph& g, Vertex start, const ScanOptions& opt = {}) {
    return mixing_scan(g, start, Distribution::uniform(g.size()), opt);
}

// ---------------------------------------------------------------------------
// Closed-form uniform mixing times.

struct CompleteGraphCondition {
    bool feasible = false;
    double required_sin_sq = 0.0;  // n / 4
    MixingTimeSet times;
};

// K_n from any vertex is uniform iff (4/n) sin^2(n t / 2) = 1 under A, or
// (4/n) sin^2(n t / (2(n-1))) = 1 under A/(n-1). Only n <= 4 is feasible.
inline CompleteGraphCondition complete_graph_uniform_condition(
    std::size_t n, HamiltonianScale scale = HamiltonianScale::adjacency) {
    if (n < 2) throw std::invalid_argument("complete graph condition needs n >= 2");
    CompleteGraphCondition c;
    const double nn = static_cast<double>(n);
    c.required_sin_sq = nn / 4.0;
    if (c.required_sin_sq > 1.0) return c;
    c.feasible = true;
    // t = x * factor with sin^2(x) = n/4, x in {x0, pi - x0} + k pi.
    const double factor = scale == HamiltonianScale::adjacency ? 2.0 / nn : 2.0 * (nn - 1.0) / nn;
    const double x0 = std::asin(std::sqrt(c.required_sin_sq));
    const double pi = std::numbers::pi;
    c.times.progressions.push_back({x0 * factor, pi * factor});
    if (std::abs((pi - x0) - x0) > 1e-12) c.times.progressions.push_back({(pi - x0) * factor, pi * factor});
    return c;
}

// Q_d from any vertex: under A the walk factorises into d copies of the K_2
// walk, uniform at t = (2k+1) pi/4 for every d. Under A/d the times are
// (2k+1) d pi / 4.
inline MixingTimeSet hypercube_mixing_times(std::size_t dim,
                                            HamiltonianScale scale = HamiltonianScale::adjacency) {
    if (dim == 0) throw std::invalid_argument("hypercube dimension must be at least 1");
    const double s = scale == HamiltonianScale::adjacency ? 1.0 : static_cast<double>(dim);
    return {{{s * std::numbers::pi / 4.0, s * std::numbers::pi / 2.0}}, {}};
}

// Unweighted K_{1,n} from the center: cos^2(sqrt(n) t) = 1/(n+1).
inline MixingTimeSet claw_mixing_times(std::size_t leaves) {
    if (leaves == 0) throw std::invalid_argument("claw needs at least one leaf");
    const double rn = std::sqrt(static_cast<double>(leaves));
    const double a = std::acos(1.0 / std::sqrt(static_cast<double>(leaves) + 1.0));
    const double pi = std::numbers::pi;
    MixingTimeSet s;
    s.progressions.push_back({a / rn, pi / rn});
    if (std::abs(pi - 2.0 * a) > 1e-12) s.progressions.push_back({(pi - a) / rn, pi / rn});
    return s;
}

// ---------------------------------------------------------------------------
// Cartesian-product closure: the walk on G (+) H from (g0, h0) is the tensor
// product of the factor walks, so common uniform mixing times of the factors
// are uniform mixing times of the product. Each common time is re-verified
// by simulating the product directly.
struct ProductFactor {
    WeightedGraph graph;
    Vertex start = 0;
    MixingTimeSet times;
};

inline MixingReport product_uniform_mixing(const ProductFactor& g, const ProductFactor& h,
                                           double t_max = default_scan_t_max, double tolerance = 1e-9) {
    check_start(g.graph.size(), g.start);
    check_start(h.graph.size(), h.start);
    const WeightedGraph product = cartesian_product(g.graph, h.graph);
    const Vertex start = g.start * h.graph.size() + h.start;
    const auto target = Distribution::uniform(product.size());
    const auto common = intersect(g.times, h.times, t_max);

    MixingReport r;
    r.target = target;
    r.t_max = t_max;
    r.tolerance = tolerance;
    r.best_distance = std::numeric_limits<double>::infinity();
    if (common.empty()) {
        r.note = "no common mixing time of the factors in [0, t_max]: closure not established "
                 "(this is not a disproof)";
        return r;
    }
    const WalkPropagator prop(decompose(product), start);
    std::vector<double> scratch;
    for (double t : common) {
        const double dist = detail::distance_at(prop, target, t, scratch);
        if (dist < r.best_distance) {
            r.best_distance = dist;
            if (!r.feasible) r.best_time = t;
        }
        if (dist <= tolerance) {
            if (!r.feasible) r.best_time = t;
            r.feasible = true;
            r.mixing_times.push_back(t);
        }
    }
    r.note = r.feasible ? "common factor mixing times verified uniform on the product by simulation"
                        : "common factor mixing times found but none verified on the product";
    return r;
}

// ---------------------------------------------------------------------------
// Average mixing.

struct AverageBound {
    std::size_t tau = 0;
    double lower_bound = 0.0;                 // 1 / tau
    std::vector<double> start_probabilities;  // pbar_start for each start vertex
    double min_start_probability = 0.0;
    double max_start_probability = 0.0;
    bool bound_holds = false;  // every pbar_start >= 1/tau - 1e-9
    // Almost-uniform verdict against the bound c/n: excluded when 1/tau > c/n.
    std::optional<double> almost_uniform_constant;
    bool almost_uniform_excluded = false;
};

inline AverageBound average_mixing_bound(const WeightedGraph& g,
                                         std::optional<double> almost_uniform_constant = std::nullopt,
                                         double relative_tolerance = default_grouping_tolerance) {
    const auto d = decompose(g, relative_tolerance);
    AverageBound b;
    b.tau = spectral_type(d);
    b.lower_bound = 1.0 / static_cast<double>(b.tau);
    b.bound_holds = true;
    for (Vertex s = 0; s < g.size(); ++s) {
        const double p = average_distribution(d, s)[s];
        b.start_probabilities.push_back(p);
        if (p < b.lower_bound - 1e-9) b.bound_holds = false;
    }
    b.min_start_probability = *std::min_element(b.start_probabilities.begin(), b.start_probabilities.end());
    b.max_start_probability = *std::max_element(b.start_probabilities.begin(), b.start_probabilities.end());
    if (almost_uniform_constant) {
        if (!(*almost_uniform_constant > 0.0)) throw std::invalid_argument("almost-uniform constant must be positive");
        b.almost_uniform_constant = almost_uniform_constant;
        b.almost_uniform_excluded = b.lower_bound > *almost_uniform_constant / static_cast<double>(g.size());
    }
    return b;
}

struct AverageVerdict {
    bool excluded = false;  // target provably unreachable as an average distribution
    std::size_t tau = 0;
    double bound = 0.0;
    double target_start_mass = 0.0;
    std::string witness;
};

// The average distribution always puts at least 1/tau on the start vertex,
// for every choice of weights with this spectral type. A target below that is
// unreachable; nothing is ever claimed about targets above it.
inline AverageVerdict average_universal_verdict(const WeightedGraph& g, const Distribution& target,
                                                Vertex start, double tolerance = 1e-9,
                                                double relative_tolerance = default_grouping_tolerance) {
    if (target.size() != g.size()) throw std::invalid_argument("target size does not match graph");
    check_start(g.size(), start);
    AverageVerdict v;
    v.tau = spectral_type(decompose(g, relative_tolerance));
    v.bound = 1.0 / static_cast<double>(v.tau);
    v.target_start_mass = target[start];
    v.excluded = v.target_start_mass < v.bound - tolerance;
    if (v.excluded) {
        v.witness = "target puts " + format_double(v.target_start_mass) + " on start vertex " +
                    std::to_string(start) + ", below the average lower bound 1/tau = " +
                    format_double(v.bound) + " (tau = " + std::to_string(v.tau) + ")";
    } else {
        v.witness = "start-vertex criterion does not exclude this target";
    }
    return v;
}

}  // namespace ctqw
