#pragma once

// Figure-data exports and the power-law fit.  Plots are diagnostics: they
// use midpoints only, while the certificate path stays rigorous.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "bandcert/certifier.hpp"

namespace bandcert {

namespace detail {

inline Eigen::MatrixXd midpoint_matrix(const std::vector<std::vector<Ball>>& entries) {
    size_t n = entries.size();
    Eigen::MatrixXd m(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entries[i][j].mid_d();
    return Eigen::MatrixXd(0.5 * (m + m.transpose()));
}

inline void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("figures: cannot open " + path);
    for (const auto& l : lines) os << l << "\n";
    if (!os) throw Error("figures: write failed for " + path);
}

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline double clipped_log_abs(double v) {
    double l = std::log(std::abs(v));
    if (!std::isfinite(l) || l < -16.0) l = -16.0;
    return l;
}

}  // namespace detail

// f1: one row (D, lambda_min midpoint) per block.
inline void figure_1(const Certificate& cert, const std::string& path) {
    std::vector<std::string> lines;
    for (const auto& b : cert.blocks)
        lines.push_back(std::to_string(b.D) + " " + detail::fmt(b.lambda_min.mid_d()));
    detail::write_lines(path, lines);
}

// f2: (N, lambda_min of the D = 0 block) pairs.
inline void figure_2(const std::vector<std::pair<long, double>>& data, const std::string& path) {
    std::vector<std::string> lines;
    for (const auto& [n, lam] : data) lines.push_back(std::to_string(n) + " " + detail::fmt(lam));
    detail::write_lines(path, lines);
}

// f3: sorted spectrum of one block.
inline void figure_3(const BlockMatrix& block, const std::string& path) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(detail::midpoint_matrix(block.entries));
    std::vector<std::string> lines;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
        lines.push_back(std::to_string(i + 1) + " " + detail::fmt(solver.eigenvalues()(i)));
    detail::write_lines(path, lines);
}

// f4 / f5 heatmap: (n1, n2, ln |column entry|) over the hexagon, clipped
// below -16.
inline void figure_column_heatmap(long N, long D, const BlockMatrix& block, const Triple& m,
                                  const std::string& path) {
    std::vector<std::string> lines;
    for (const auto& [n, v] : hexagon_column(N, D, block, m))
        lines.push_back(std::to_string(n[0]) + " " + std::to_string(n[1]) + " " +
                        detail::fmt(detail::clipped_log_abs(v)));
    detail::write_lines(path, lines);
}

// f5 overlay: sample points of the sphere sum n_i^2 = sum m_i^2 inside the
// plane sum n_i = D, in (n1, n2) coordinates.
inline void figure_ellipse(long D, const Triple& m, const std::string& path, int samples = 360) {
    double rho2 = static_cast<double>(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) -
                  static_cast<double>(D) * static_cast<double>(D) / 3.0;
    if (rho2 <= 0.0) throw ValidityViolation("figure_ellipse: degenerate radius");
    double rho = std::sqrt(rho2);
    const double c = static_cast<double>(D) / 3.0;
    const double s2 = std::sqrt(2.0), s6 = std::sqrt(6.0);
    std::vector<std::string> lines;
    for (int i = 0; i < samples; ++i) {
        double th = 2.0 * M_PI * i / samples;
        // orthonormal basis of the plane: (1,-1,0)/sqrt2, (1,1,-2)/sqrt6
        double n1 = c + rho * (std::cos(th) / s2 + std::sin(th) / s6);
        double n2 = c + rho * (-std::cos(th) / s2 + std::sin(th) / s6);
        lines.push_back(detail::fmt(n1) + " " + detail::fmt(n2));
    }
    detail::write_lines(path, lines);
}

// f6: (sqrt(n1^2+n2^2+n3^2), entry) radial profile of one hexagon column.
inline void figure_radial_column(long N, long D, const BlockMatrix& block, const Triple& m,
                                 const std::string& path) {
    std::vector<std::string> lines;
    for (const auto& [n, v] : hexagon_column(N, D, block, m)) {
        double r = std::sqrt(static_cast<double>(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]));
        lines.push_back(detail::fmt(r) + " " + detail::fmt(v));
    }
    detail::write_lines(path, lines);
}

// f7: smallest eigenvector of the D = 0 block painted on the hexagon.
inline void figure_eigenvector(long N, const BlockMatrix& block0, const std::string& path) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(detail::midpoint_matrix(block0.entries));
    Eigen::VectorXd v = solver.eigenvectors().col(0);
    std::map<Triple, double> val;
    for (size_t i = 0; i < block0.index.size(); ++i)
        val[block0.index[i]] = v(static_cast<Eigen::Index>(i));
    std::vector<std::string> lines;
    for (const Triple& n : enumerate_Z_D(N, 0))
        lines.push_back(std::to_string(n[0]) + " " + std::to_string(n[1]) + " " +
                        detail::fmt(val.at(sorted_triple(n))));
    detail::write_lines(path, lines);
}

// f8: (||n||_2, eigenvector entry) for the five smallest eigenvalues of the
// disc-truncated weighted matrix; one file per eigenvalue.
inline void figure_disc_eigenvectors(const DiscBlock& disc, const std::string& path_prefix,
                                     int count = 5) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(detail::midpoint_matrix(disc.entries));
    count = std::min<int>(count, static_cast<int>(disc.index.size()));
    for (int e = 0; e < count; ++e) {
        Eigen::VectorXd v = solver.eigenvectors().col(e);
        std::vector<std::string> lines;
        for (size_t i = 0; i < disc.index.size(); ++i) {
            const Triple& n = disc.index[i];
            double r = std::sqrt(static_cast<double>(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]));
            lines.push_back(detail::fmt(r) + " " + detail::fmt(v(static_cast<Eigen::Index>(i))));
        }
        detail::write_lines(path_prefix + "_sn_" + std::to_string(e + 1) + ".dat", lines);
    }
}

// f9: smallest disc eigenvector against ||n||_2 / (sqrt(3/2) N).
inline void figure_disc_profile(long N, const DiscBlock& disc, const std::string& path) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(detail::midpoint_matrix(disc.entries));
    Eigen::VectorXd v = solver.eigenvectors().col(0);
    double scale = std::sqrt(1.5) * static_cast<double>(N);
    std::vector<std::string> lines;
    for (size_t i = 0; i < disc.index.size(); ++i) {
        const Triple& n = disc.index[i];
        double r = std::sqrt(static_cast<double>(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]));
        lines.push_back(detail::fmt(r / scale) + " " + detail::fmt(v(static_cast<Eigen::Index>(i))));
    }
    detail::write_lines(path, lines);
}

// Least squares of ln(lambda) = ln(a) + b ln(N); returns (a, b).
inline std::pair<double, double> cmd_fit(const std::vector<std::pair<double, double>>& data) {
    if (data.size() < 3) throw DegenerateFit("fit: need at least 3 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [n, lam] : data) {
        if (!(n > 0) || !(lam > 0)) throw DegenerateFit("fit: data must be positive");
        double x = std::log(n), y = std::log(lam);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double count = static_cast<double>(data.size());
    double det = count * sxx - sx * sx;
    if (std::abs(det) < 1e-12 * count * sxx || det == 0.0)
        throw DegenerateFit("fit: abscissas do not span a range");
    double b = (count * sxy - sx * sy) / det;
    double lna = (sy - b * sx) / count;
    return {std::exp(lna), b};
}

}  // namespace bandcert
