// spectral.hpp
// Symmetric eigendecomposition of A_G, grouping into distinct eigenvalues
// (spectral type tau), and spectral projectors.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ctqw/graph.hpp"

namespace ctqw {

// Two eigenvalues are treated as equal iff |a - b| <= rel * max(1, rho(A)).
inline constexpr double default_grouping_tolerance = 1e-8;

struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // orthonormal columns
    std::vector<std::vector<std::size_t>> groups;  // runs of equal eigenvalues, ascending
    double spectral_radius = 0.0;
    double grouping_tolerance = 0.0;  // absolute threshold actually applied

    std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }

    // Representative value of a group: the mean of its members.
    double group_value(std::size_t g) const {
        const auto& idx = groups.at(g);
        double s = 0.0;
        for (auto k : idx) s += eigenvalues(static_cast<Eigen::Index>(k));
        return s / static_cast<double>(idx.size());
    }
};

namespace detail {

// Modified Gram-Schmidt on the given columns, applied twice.
inline void reorthonormalize(Eigen::MatrixXd& v, const std::vector<std::size_t>& cols) {
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t a = 0; a < cols.size(); ++a) {
            auto ca = static_cast<Eigen::Index>(cols[a]);
            for (std::size_t b = 0; b < a; ++b) {
                auto cb = static_cast<Eigen::Index>(cols[b]);
                v.col(ca) -= v.col(cb).dot(v.col(ca)) * v.col(cb);
            }
            v.col(ca).normalize();
        }
    }
}

}  // namespace detail

inline SpectralDecomposition decompose(const Eigen::MatrixXd& a,
                                       double relative_tolerance = default_grouping_tolerance) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument("decompose: expected a non-empty square matrix");
    }
    if (!(relative_tolerance > 0.0)) {
        throw std::invalid_argument("grouping tolerance must be positive");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("symmetric eigensolver did not converge");
    }
    SpectralDecomposition d;
    d.eigenvalues = solver.eigenvalues();
    d.eigenvectors = solver.eigenvectors();
    d.spectral_radius = d.eigenvalues.cwiseAbs().maxCoeff();
    d.grouping_tolerance = relative_tolerance * std::max(1.0, d.spectral_radius);

    const auto n = d.size();
    d.groups.push_back({0});
    for (std::size_t k = 1; k < n; ++k) {
        const double gap = d.eigenvalues(static_cast<Eigen::Index>(k)) -
                           d.eigenvalues(static_cast<Eigen::Index>(k - 1));
        if (gap <= d.grouping_tolerance) {
            d.groups.back().push_back(k);
        } else {
            d.groups.push_back({k});
        }
    }
    for (const auto& g : d.groups) {
        if (g.size() > 1) detail::reorthonormalize(d.eigenvectors, g);
    }
    return d;
}

inline SpectralDecomposition decompose(const WeightedGraph& g,
                                       double relative_tolerance = default_grouping_tolerance) {
    return decompose(g.adjacency_matrix(), relative_tolerance);
}

// tau(G): number of distinct eigenvalues.
inline std::size_t spectral_type(const SpectralDecomposition& d) { return d.groups.size(); }

// mu(G): largest multiplicity.
inline std::size_t max_multiplicity(const SpectralDecomposition& d) {
    std::size_t m = 0;
    for (const auto& g : d.groups) m = std::max(m, g.size());
    return m;
}

inline Eigen::MatrixXd projector(const SpectralDecomposition& d, std::size_t group) {
    if (group >= d.groups.size()) throw std::out_of_range("projector: group index out of range");
    const auto n = static_cast<Eigen::Index>(d.size());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (auto k : d.groups[group]) {
        const auto c = d.eigenvectors.col(static_cast<Eigen::Index>(k));
        p.noalias() += c * c.transpose();
    }
    return p;
}

// Column `vertex` of the projector, without forming the full matrix.
inline Eigen::VectorXd projector_column(const SpectralDecomposition& d, std::size_t group,
                                        std::size_t vertex) {
    const auto n = static_cast<Eigen::Index>(d.size());
    Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
    for (auto k : d.groups.at(group)) {
        const auto c = d.eigenvectors.col(static_cast<Eigen::Index>(k));
        col += c(static_cast<Eigen::Index>(vertex)) * c;
    }
    return col;
}

}  // namespace ctqw
