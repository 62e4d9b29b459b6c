// walk.hpp
// Continuous-time quantum walk psi(t) = exp(-i t A) e_start, evaluated through
// the spectral decomposition, plus instantaneous and time-averaged
// distributions.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ctqw/graph.hpp"
#include "ctqw/spectral.hpp"

namespace ctqw {

using cplx = std::complex<double>;

struct WalkState {
    Eigen::VectorXcd amplitudes;
    double time = 0.0;

    double norm() const { return amplitudes.norm(); }
};

class Distribution {
public:
    Distribution() = default;

    // Validates non-negativity (entries >= -1e-14 are clamped to 0) and that
    // the entries sum to 1 within sum_tolerance.
    explicit Distribution(std::vector<double> probs, double sum_tolerance = 1e-10)
        : probs_(std::move(probs)) {
        if (probs_.empty()) throw std::invalid_argument("distribution must be non-empty");
        double sum = 0.0;
        for (double& p : probs_) {
            if (!std::isfinite(p) || p < -1e-14) {
                throw std::invalid_argument("distribution entries must be non-negative");
            }
            if (p < 0.0) p = 0.0;
            sum += p;
        }
        if (std::abs(sum - 1.0) > sum_tolerance) {
            throw std::invalid_argument("distribution entries sum to " + std::to_string(sum) +
                                        ", expected 1");
        }
    }

    static Distribution uniform(std::size_t n) {
        return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    static Distribution point(std::size_t n, Vertex v) {
        if (v >= n) throw std::out_of_range("point mass vertex out of range");
        std::vector<double> p(n, 0.0);
        p[v] = 1.0;
        return Distribution(std::move(p));
    }

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t j) const { return probs_[j]; }
    const std::vector<double>& probs() const { return probs_; }

    double sum() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

private:
    std::vector<double> probs_;
};

inline double sup_distance(const Distribution& a, const Distribution& b) {
    if (a.size() != b.size()) throw std::invalid_argument("distribution sizes differ");
    double d = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - b[j]));
    return d;
}

inline void check_start(std::size_t n, Vertex start) {
    if (start >= n) {
        throw std::out_of_range("start vertex " + std::to_string(start) + " out of range [0," +
                                std::to_string(n) + ")");
    }
}

// Precomputed expansion of e_start in the eigenbasis:
//   psi_j(t) = sum_k coeff(j,k) exp(-i t lambda_k),  coeff(j,k) = v_k[j] v_k[start].
// All evaluation methods are const and reentrant.
class WalkPropagator {
public:
    WalkPropagator(const SpectralDecomposition& d, Vertex start)
        : eigenvalues_(d.eigenvalues), start_(start) {
        check_start(d.size(), start);
        const auto s = static_cast<Eigen::Index>(start);
        coeff_ = d.eigenvectors * d.eigenvectors.row(s).transpose().asDiagonal();
    }

    std::size_t size() const { return static_cast<std::size_t>(eigenvalues_.size()); }
    Vertex start() const { return start_; }

    WalkState state(double t) const {
        Eigen::VectorXcd phases(eigenvalues_.size());
        for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
            phases(k) = std::polar(1.0, -t * eigenvalues_(k));
        }
        return {coeff_.cast<cplx>() * phases, t};
    }

    // |psi_j(t)|^2 written into `out` (size n) without building a WalkState.
    void probabilities(double t, std::vector<double>& out) const {
        const auto n = eigenvalues_.size();
        out.assign(static_cast<std::size_t>(n), 0.0);
        std::vector<cplx> phases(static_cast<std::size_t>(n));
        for (Eigen::Index k = 0; k < n; ++k) {
            phases[static_cast<std::size_t>(k)] = std::polar(1.0, -t * eigenvalues_(k));
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            cplx amp = 0.0;
            for (Eigen::Index k = 0; k < n; ++k) amp += coeff_(j, k) * phases[static_cast<std::size_t>(k)];
            out[static_cast<std::size_t>(j)] = std::norm(amp);
        }
    }

    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    const Eigen::MatrixXd& coefficients() const { return coeff_; }

private:
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd coeff_;
    Vertex start_;
};

inline WalkState evolve(const SpectralDecomposition& d, Vertex start, double t) {
    return WalkPropagator(d, start).state(t);
}

inline WalkState evolve(const WeightedGraph& g, Vertex start, double t) {
    check_start(g.size(), start);
    return evolve(decompose(g), start, t);
}

// exp(-i t A) applied to an arbitrary amplitude vector.
inline Eigen::VectorXcd apply_evolution(const SpectralDecomposition& d, const Eigen::VectorXcd& psi,
                                        double t) {
    if (static_cast<std::size_t>(psi.size()) != d.size()) {
        throw std::invalid_argument("state dimension does not match graph");
    }
    const Eigen::MatrixXcd v = d.eigenvectors.cast<cplx>();
    Eigen::VectorXcd coeffs = v.adjoint() * psi;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) coeffs(k) *= std::polar(1.0, -t * d.eigenvalues(k));
    return v * coeffs;
}

inline Distribution instantaneous_distribution(const WalkState& s) {
    std::vector<double> p(static_cast<std::size_t>(s.amplitudes.size()));
    for (Eigen::Index j = 0; j < s.amplitudes.size(); ++j) p[static_cast<std::size_t>(j)] = std::norm(s.amplitudes(j));
    return Distribution(std::move(p));
}

// Time-averaged distribution: pbar_j = sum over distinct eigenvalues of
// |(Pi_lambda)_{j,start}|^2. Depends on the grouping tolerance in `d`.
inline Distribution average_distribution(const SpectralDecomposition& d, Vertex start) {
    check_start(d.size(), start);
    std::vector<double> p(d.size(), 0.0);
    for (std::size_t g = 0; g < d.groups.size(); ++g) {
        const Eigen::VectorXd col = projector_column(d, g, start);
        for (std::size_t j = 0; j < p.size(); ++j) p[j] += col(static_cast<Eigen::Index>(j)) * col(static_cast<Eigen::Index>(j));
    }
    return Distribution(std::move(p));
}

inline Distribution average_distribution(const WeightedGraph& g, Vertex start,
                                         double relative_tolerance = default_grouping_tolerance) {
    check_start(g.size(), start);
    return average_distribution(decompose(g, relative_tolerance), start);
}

// Trapezoidal (1/T) * integral_0^T p(t) dt over `steps` equal intervals.
// Phases advance by multiplication and are resynchronised periodically.
inline Distribution numerical_time_average(const WeightedGraph& g, Vertex start, double horizon,
                                           std::size_t steps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("time horizon must be positive");
    if (steps < 2) throw std::invalid_argument("need at least 2 steps");
    check_start(g.size(), start);
    const WalkPropagator prop(decompose(g), start);
    const auto n = static_cast<Eigen::Index>(prop.size());
    const double h = horizon / static_cast<double>(steps);
    const Eigen::MatrixXcd coeff = prop.coefficients().cast<cplx>();

    Eigen::VectorXcd step_phase(n);
    for (Eigen::Index k = 0; k < n; ++k) step_phase(k) = std::polar(1.0, -h * prop.eigenvalues()(k));

    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    Eigen::VectorXcd phase = Eigen::VectorXcd::Ones(n);
    for (std::size_t i = 0; i <= steps; ++i) {
        if (i % 4096 == 0) {
            const double t = static_cast<double>(i) * h;
            for (Eigen::Index k = 0; k < n; ++k) phase(k) = std::polar(1.0, -t * prop.eigenvalues()(k));
        }
        const Eigen::VectorXcd amp = coeff * phase;
        const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
        acc += w * amp.cwiseAbs2();
        phase = phase.cwiseProduct(step_phase);
    }
    acc /= static_cast<double>(steps);
    return Distribution(std::vector<double>(acc.data(), acc.data() + n), 1e-8);
}

struct TrajectoryRow {
    double t = 0.0;
    Distribution distribution;
};

// Rows at t = 0, step, 2*step, ... <= t_max.
inline std::vector<TrajectoryRow> trajectory(const WeightedGraph& g, Vertex start, double t_max,
                                             double step) {
    if (!(t_max > 0.0) || !(step > 0.0)) throw std::invalid_argument("t_max and step must be positive");
    check_start(g.size(), start);
    const WalkPropagator prop(decompose(g), start);
    const auto count = static_cast<std::size_t>(std::floor(t_max / step * (1.0 + 1e-12))) + 1;
    std::vector<TrajectoryRow> rows;
    rows.reserve(count);
    std::vector<double> p;
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) * step;
        prop.probabilities(t, p);
        rows.push_back({t, Distribution(p)});
    }
    return rows;
}

inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// CSV with header t,p_0,...,p_{n-1}; 17 significant digits.
inline void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows) {
    if (rows.empty()) return;
    out << "t";
    for (std::size_t j = 0; j < rows.front().distribution.size(); ++j) out << ",p_" << j;
    out << '\n';
    for (const auto& r : rows) {
        out << format_double(r.t);
        for (double p : r.distribution.probs()) out << ',' << format_double(p);
        out << '\n';
    }
}

}  // namespace ctqw
