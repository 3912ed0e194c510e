#pragma once

// Index-set enumeration, assembly of the Q blocks from integral records,
// certified minimal-eigenvalue enclosures, and the positive-definiteness
// certificate.
//
// The lower eigenvalue bound is established by interval Cholesky of
// Q - alpha I over the ball entries (success proves lambda_min > alpha for
// every symmetric matrix in the enclosure family); the upper bound is the
// interval Rayleigh quotient at the approximate eigenvector.  The a
// posteriori residual of the double-precision solve is reported and seeds
// the Cholesky shift.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bandcert/engine.hpp"

namespace bandcert {

using Triple = std::array<long, 3>;

inline constexpr std::array<std::array<int, 3>, 6> kPerm3 = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

inline constexpr std::array<Triple, 6> kShifts = {{
    {1, -1, 0}, {1, 0, -1}, {-1, 1, 0}, {0, 1, -1}, {-1, 0, 1}, {0, -1, 1}}};

inline Triple permute(const Triple& t, const std::array<int, 3>& s) {
    return Triple{t[static_cast<size_t>(s[0])], t[static_cast<size_t>(s[1])],
                  t[static_cast<size_t>(s[2])]};
}

// X_D: even triples with m1 <= m2 <= m3 summing to D, entries bounded by N,
// excluding the origin; lexicographic order.
inline std::vector<Triple> enumerate_X_D(long N, long D) {
    if (N < 2 || N % 2 != 0) throw InvalidBandLimit("enumerate_X_D: N must be even and >= 2");
    if (D % 2 != 0 || D < 0 || D > 3 * N)
        throw ValidityViolation("enumerate_X_D: D must be even in [0, 3N]");
    std::vector<Triple> out;
    for (long m1 = -N; m1 <= N; m1 += 2) {
        for (long m2 = m1; m2 <= N; m2 += 2) {
            long m3 = D - m1 - m2;
            if (m3 < m2 || m3 > N) continue;
            if (m1 == 0 && m2 == 0 && m3 == 0) continue;
            out.push_back(Triple{m1, m2, m3});
        }
    }
    return out;
}

// Z_D: same constraints without the ordering (the hexagon).
inline std::vector<Triple> enumerate_Z_D(long N, long D) {
    std::vector<Triple> out;
    for (long n1 = -N; n1 <= N; n1 += 2) {
        for (long n2 = -N; n2 <= N; n2 += 2) {
            long n3 = D - n1 - n2;
            if (n3 < -N || n3 > N) continue;
            if (n1 == 0 && n2 == 0 && n3 == 0) continue;
            out.push_back(Triple{n1, n2, n3});
        }
    }
    return out;
}

// Number of distinct permutations of a triple: 1, 3, or 6.
inline long multiplicity(const Triple& m) {
    if (m[0] == m[1] && m[1] == m[2]) return 1;
    if (m[0] == m[1] || m[1] == m[2] || m[0] == m[2]) return 3;
    return 6;
}

namespace detail {
inline std::array<long, 6> concat(const Triple& a, const Triple& b) {
    return {a[0], a[1], a[2], b[0], b[1], b[2]};
}
inline Triple tneg(const Triple& a) { return {-a[0], -a[1], -a[2]}; }
inline Triple tadd(const Triple& a, const Triple& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Triple tsub(const Triple& a, const Triple& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
}  // namespace detail

// The closed set of canonical integrals sufficient to assemble every block.
inline std::vector<ModeKey> required_keys(long N) {
    std::set<std::uint64_t> seen;
    std::vector<ModeKey> out;
    auto emit = [&](const Triple& a, const Triple& b) {
        ModeKey k = canonical_key(detail::concat(a, b));
        if (seen.insert(k.packed()).second) out.push_back(ModeKey{k.orders, 1});
    };
    for (long D = 0; D <= 3 * N; D += 2) {
        std::vector<Triple> XD = enumerate_X_D(N, D);
        for (const Triple& m : XD) {
            for (const Triple& n : XD) {
                for (const auto& sigma : kPerm3) {
                    Triple ns = permute(n, sigma);
                    Triple mns = detail::tneg(ns);
                    emit(m, mns);
                    for (const Triple& sh : kShifts) emit(m, detail::tadd(mns, sh));
                    Triple diff = detail::tsub(m, ns);
                    emit(diff, Triple{0, 0, 0});
                    for (const Triple& sh : kShifts) emit(diff, sh);
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct BlockMatrix {
    long N = 0;
    long D = 0;
    std::vector<Triple> index;
    std::vector<std::vector<Ball>> entries;
    std::optional<Ball> scheme_eps;  // 16 x scheme_error in certified mode
    long prec_bits = 128;

    size_t dim() const { return index.size(); }
};

// Q_{m,n} = (1/6) sum_sigma (R_{m,n_sigma} - L_{m,n_sigma}) with
//   L_{m,n} = 2 I_{m,-n} + sum_tau I_{m,-n+(1,-1,0)_tau}
//   R_{m,n} = 2 I_{m-n,0} + sum_tau I_{m-n,(1,-1,0)_tau}
inline Ball q_entry(const Triple& m, const Triple& n, const IntegralStore& store, Precision p) {
    auto val = [&](const Triple& a, const Triple& b) {
        return store_value(store, canonical_key(detail::concat(a, b)), p);
    };
    Ball acc = Ball::zero(p);
    for (const auto& sigma : kPerm3) {
        Triple ns = permute(n, sigma);
        Triple mns = detail::tneg(ns);
        Ball L = Ball::mul_2si(val(m, mns), 1, p);
        for (const Triple& sh : kShifts) L = Ball::add(L, val(m, detail::tadd(mns, sh)), p);
        Triple diff = detail::tsub(m, ns);
        Ball R = Ball::mul_2si(val(diff, Triple{0, 0, 0}), 1, p);
        for (const Triple& sh : kShifts) R = Ball::add(R, val(diff, sh), p);
        acc = Ball::add(acc, Ball::sub(R, L, p), p);
    }
    return Ball::div_ui(acc, 6, p);
}

// The assembled Q~ is symmetric only up to the scheme error: the L-part
// families for (m,n) and (n,m) are different sets of integrals, so the
// approximation errors enter the two entries independently (the exact Q is
// symmetric by its quadratic-form origin).  Asymmetry beyond twice the
// per-entry budget is a hard error.
inline BlockMatrix assemble_block(long N, long D, const IntegralStore& store,
                                  const SchemeParams& params) {
    BlockMatrix block;
    block.N = N;
    block.D = D;
    block.prec_bits = params.prec_bits;
    block.index = enumerate_X_D(N, D);
    Precision p = params.prec();
    size_t d = block.index.size();
    block.entries.assign(d, std::vector<Ball>(d));
    for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < d; ++j)
            block.entries[i][j] = q_entry(block.index[i], block.index[j], store, p);
    Ball eps16 = Ball::mul_si(
        params.certified ? scheme_error(params) : scheme_error_estimate(params), 16,
        Precision(128));
    Ball tol = eps16.upper_bound_ball(Precision(64));
    for (size_t i = 0; i < d; ++i)
        for (size_t j = i + 1; j < d; ++j)
            if (!Ball::widen(block.entries[i][j], tol)
                     .overlaps(Ball::widen(block.entries[j][i], tol)))
                throw EigensolveFailure("assemble_block: (i,j)/(j,i) enclosures disjoint beyond "
                                        "the scheme budget at D=" + std::to_string(D));
    if (params.certified) block.scheme_eps = eps16;
    return block;
}

namespace detail {

// Interval Cholesky: success proves positive definiteness of every
// symmetric matrix within the entry enclosures.
inline bool verified_positive_definite(const std::vector<std::vector<Ball>>& a, Precision p) {
    size_t n = a.size();
    std::vector<std::vector<Ball>> L(n, std::vector<Ball>(n, Ball::zero(p)));
    for (size_t j = 0; j < n; ++j) {
        Ball d = a[j][j];
        for (size_t k = 0; k < j; ++k) d = Ball::sub(d, Ball::mul(L[j][k], L[j][k], p), p);
        if (!d.definitely_positive()) return false;
        Ball ljj = Ball::sqrt(d, p);
        L[j][j] = ljj;
        for (size_t i = j + 1; i < n; ++i) {
            Ball s = a[i][j];
            for (size_t k = 0; k < j; ++k) s = Ball::sub(s, Ball::mul(L[i][k], L[j][k], p), p);
            L[i][j] = Ball::div(s, ljj, p);
        }
    }
    return true;
}

struct EigInfo {
    Ball enclosure;        // certified [alpha, rayleigh_upper]
    Ball residual;         // ||A x - lambda x|| / ||x|| at the double solve
    double radius_norm;    // row-sum norm of the entry radius matrix
    double approx_lambda;  // double-precision estimate
};

inline EigInfo min_eig_info(const BlockMatrix& block) {
    size_t n = block.dim();
    if (n == 0) throw EigensolveFailure("min_eig: empty block");
    Precision p(block.prec_bits);

    // Certify (Q~ + Q~^T)/2: it is exactly symmetric and stays within the
    // per-entry scheme budget of the true Q, so the certificate's operator
    // bound applies unchanged.
    std::vector<std::vector<Ball>> sym(n, std::vector<Ball>(n));
    for (size_t i = 0; i < n; ++i) {
        sym[i][i] = block.entries[i][i];
        for (size_t j = i + 1; j < n; ++j) {
            Ball avg = Ball::mul_2si(Ball::add(block.entries[i][j], block.entries[j][i], p), -1, p);
            sym[i][j] = avg;
            sym[j][i] = avg;
        }
    }

    double radius_norm = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (size_t j = 0; j < n; ++j) row += sym[i][j].rad_d();
        radius_norm = std::max(radius_norm, row);
    }

    Eigen::MatrixXd mid(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) mid(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sym[i][j].mid_d();
    Eigen::MatrixXd msym = 0.5 * (mid + mid.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(msym);
    if (solver.info() != Eigen::Success) throw EigensolveFailure("min_eig: double solve failed");
    Eigen::VectorXd x = solver.eigenvectors().col(0);
    double lam = solver.eigenvalues()(0);

    // Interval Rayleigh quotient and residual at the approximate vector.
    std::vector<Ball> xb(n);
    for (size_t i = 0; i < n; ++i) xb[i] = Ball::from_double(x(static_cast<Eigen::Index>(i)), p);
    Ball quad = Ball::zero(p);
    Ball norm2 = Ball::zero(p);
    Ball res2 = Ball::zero(p);
    Ball lamb = Ball::from_double(lam, p);
    for (size_t i = 0; i < n; ++i) {
        Ball row = Ball::zero(p);
        for (size_t j = 0; j < n; ++j) row = Ball::add(row, Ball::mul(sym[i][j], xb[j], p), p);
        quad = Ball::add(quad, Ball::mul(xb[i], row, p), p);
        norm2 = Ball::add(norm2, Ball::mul(xb[i], xb[i], p), p);
        Ball r = Ball::sub(row, Ball::mul(lamb, xb[i], p), p);
        res2 = Ball::add(res2, Ball::mul(r, r, p), p);
    }
    Ball rayleigh = Ball::div(quad, norm2, p);
    Ball residual = Ball::sqrt(Ball::div(res2, norm2, p), p);

    double upper = rayleigh.upper_d();
    double base = std::min(rayleigh.lower_d(), lam);
    double margin0 = std::max({2.0 * residual.upper_d(), std::abs(upper) * 1e-13, 1e-60});

    std::optional<double> alpha;
    double margin = margin0;
    for (int attempt = 0; attempt < 40; ++attempt) {
        double cand = base - margin;
        std::vector<std::vector<Ball>> shifted = sym;
        Ball cb = Ball::from_double(cand, p);
        for (size_t i = 0; i < n; ++i) shifted[i][i] = Ball::sub(sym[i][i], cb, p);
        if (verified_positive_definite(shifted, p)) {
            alpha = cand;
            break;
        }
        margin *= 8.0;
        if (margin > std::max(1.0, std::abs(base)) * 1e6) break;
    }
    if (!alpha) {
        // Gershgorin floor, always valid.
        double g = 0.0;
        bool first = true;
        for (size_t i = 0; i < n; ++i) {
            double c = sym[i][i].lower_d();
            for (size_t j = 0; j < n; ++j)
                if (j != i) c -= Ball::abs_enclosure(sym[i][j], p).upper_d();
            if (first || c < g) g = c;
            first = false;
        }
        alpha = g;
    }
    if (*alpha > upper) throw EigensolveFailure("min_eig: inconsistent bounds");

    EigInfo info;
    info.enclosure = Ball::hull(Ball::from_double(*alpha, p), rayleigh.upper_bound_ball(p), p);
    info.residual = residual;
    info.radius_norm = radius_norm;
    info.approx_lambda = lam;
    return info;
}

}  // namespace detail

// Certified enclosure of the smallest eigenvalue over the entry enclosures
// (entry radii are folded in; the true symmetric block lies inside).
inline Ball min_eig(const BlockMatrix& block) { return detail::min_eig_info(block).enclosure; }

struct BlockReport {
    long D = 0;
    size_t dim = 0;
    Ball lambda_min;
    Ball op_norm_err;  // dim x 16 x scheme_error
    Ball residual;
    double radius_norm = 0.0;
    bool pass = false;
};

struct Certificate {
    long N = 0;
    std::string scheme;
    std::vector<BlockReport> blocks;
    bool global_pass = false;
    bool d0_attains_minimum = true;

    std::string table() const {
        std::ostringstream os;
        os << "# D dim lambda_min_mid lambda_min_rad op_norm_err verdict\n";
        os.precision(17);
        for (const auto& b : blocks)
            os << b.D << " " << b.dim << " " << b.lambda_min.mid_d() << " "
               << b.lambda_min.rad_d() << " " << b.op_norm_err.upper_d() << " "
               << (b.pass ? "pass" : "FAIL") << "\n";
        return os.str();
    }

    std::string text() const {
        std::ostringstream os;
        os.precision(10);
        os << "Positive-definiteness certificate, N = " << N << "\n";
        os << "scheme: " << scheme << "\n";
        os << "blocks: " << blocks.size() << "\n";
        for (const auto& b : blocks) {
            os << "  D = " << b.D << ": dim " << b.dim << ", lambda_min in ["
               << b.lambda_min.lower_d() << ", " << b.lambda_min.upper_d() << "], op-norm err <= "
               << b.op_norm_err.upper_d() << ", residual <= " << b.residual.upper_d() << " -> "
               << (b.pass ? "pass" : "FAIL") << "\n";
        }
        if (!d0_attains_minimum)
            os << "WARN: minimal eigenvalue not attained at D = 0 for this N\n";
        os << "verdict: " << (global_pass ? "PASS" : "FAIL") << "\n";
        return os.str();
    }
};

// Verdict rule: the certified lower bound on lambda_min must clear the
// operator-norm bound on the approximation error.
inline bool block_passes(const Ball& lambda_min, const Ball& op_norm_err) {
    return lambda_min.lower_d() > op_norm_err.upper_d();
}

// Per block: verdict pass iff the certified lower bound on lambda_min
// exceeds the operator-norm bound dim x 16 eps on the approximation error.
inline Certificate certify(long N, const SchemeParams& params, const IntegralStore& store) {
    if (!params.certified) throw ValidityViolation("certify: requires certified-mode params");
    Certificate cert;
    cert.N = N;
    cert.scheme = params.describe();
    Precision p128(128);
    Ball eps16 = Ball::mul_si(scheme_error(params), 16, p128);
    bool all = true;
    double min_mid = 0.0;
    long min_d = -1;
    for (long D = 0; D <= 3 * N; D += 2) {
        BlockMatrix block = assemble_block(N, D, store, params);
        detail::EigInfo info = detail::min_eig_info(block);
        BlockReport rep;
        rep.D = D;
        rep.dim = block.dim();
        rep.lambda_min = info.enclosure;
        rep.op_norm_err = Ball::mul_si(eps16, static_cast<long>(block.dim()), p128);
        rep.residual = info.residual;
        rep.radius_norm = info.radius_norm;
        rep.pass = block_passes(rep.lambda_min, rep.op_norm_err);
        all = all && rep.pass;
        if (min_d < 0 || rep.lambda_min.mid_d() < min_mid) {
            min_mid = rep.lambda_min.mid_d();
            min_d = D;
        }
        cert.blocks.push_back(std::move(rep));
    }
    cert.global_pass = all;
    cert.d0_attains_minimum = (min_d == 0);
    return cert;
}

struct HexagonBlock {
    long N = 0;
    long D = 0;
    std::vector<Triple> labels;                // Z_D
    std::vector<std::vector<double>> values;   // midpoints, filled by symmetry
};

inline Triple sorted_triple(const Triple& t) {
    Triple s = t;
    std::sort(s.begin(), s.end());
    return s;
}

inline HexagonBlock hexagon_block(long N, long D, const BlockMatrix& block) {
    HexagonBlock hex;
    hex.N = N;
    hex.D = D;
    hex.labels = enumerate_Z_D(N, D);
    std::map<Triple, size_t> pos;
    for (size_t i = 0; i < block.index.size(); ++i) pos[block.index[i]] = i;
    auto find = [&](const Triple& t) {
        auto it = pos.find(sorted_triple(t));
        if (it == pos.end()) throw MissingKey("hexagon_block: triple outside X_D");
        return it->second;
    };
    size_t z = hex.labels.size();
    hex.values.assign(z, std::vector<double>(z, 0.0));
    for (size_t i = 0; i < z; ++i) {
        size_t bi = find(hex.labels[i]);
        for (size_t j = 0; j < z; ++j)
            hex.values[i][j] = block.entries[bi][find(hex.labels[j])].mid_d();
    }
    return hex;
}

// One hexagon column (for the heatmap exports).
inline std::vector<std::pair<Triple, double>> hexagon_column(long N, long D,
                                                             const BlockMatrix& block,
                                                             const Triple& m) {
    std::map<Triple, size_t> pos;
    for (size_t i = 0; i < block.index.size(); ++i) pos[block.index[i]] = i;
    auto it = pos.find(sorted_triple(m));
    if (it == pos.end()) throw MissingKey("hexagon_column: column triple outside X_D");
    size_t col = it->second;
    std::vector<std::pair<Triple, double>> out;
    for (const Triple& n : enumerate_Z_D(N, D)) {
        auto rt = pos.find(sorted_triple(n));
        if (rt == pos.end()) throw MissingKey("hexagon_column: row triple outside X_D");
        out.emplace_back(n, block.entries[rt->second][col].mid_d());
    }
    return out;
}

struct DiscBlock {
    std::vector<Triple> index;          // X-circle: 2(m1^2+m2^2+m3^2) <= 3 N^2
    std::vector<long> weights;          // p_m
    std::vector<std::vector<Ball>> entries;  // p_m Q_{m,n} p_n
};

inline DiscBlock disc_block(long N, const BlockMatrix& block0) {
    if (block0.D != 0) throw ValidityViolation("disc_block: needs the D = 0 block");
    DiscBlock disc;
    Precision p(block0.prec_bits);
    std::vector<size_t> keep;
    for (size_t i = 0; i < block0.index.size(); ++i) {
        const Triple& m = block0.index[i];
        long s2 = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
        if (2 * s2 <= 3 * N * N) {
            keep.push_back(i);
            disc.index.push_back(m);
            disc.weights.push_back(multiplicity(m));
        }
    }
    size_t d = keep.size();
    disc.entries.assign(d, std::vector<Ball>(d));
    for (size_t a = 0; a < d; ++a)
        for (size_t b = 0; b < d; ++b)
            disc.entries[a][b] = Ball::mul_si(block0.entries[keep[a]][keep[b]],
                                              disc.weights[a] * disc.weights[b], p);
    return disc;
}

// r_m = |Q_{m,m}|^{-1} sum_{n != m} |Q_{m,n}|.
inline Ball diag_ratio(const BlockMatrix& block, const Triple& m) {
    Precision p(block.prec_bits);
    auto it = std::find(block.index.begin(), block.index.end(), sorted_triple(m));
    if (it == block.index.end()) throw MissingKey("diag_ratio: triple outside X_D");
    size_t i = static_cast<size_t>(it - block.index.begin());
    Ball diag = block.entries[i][i];
    if (diag.contains_zero()) throw ZeroDiagonal("diag_ratio: diagonal entry encloses 0");
    Ball sum = Ball::zero(p);
    for (size_t j = 0; j < block.dim(); ++j) {
        if (j == i) continue;
        sum = Ball::add(sum, Ball::abs_enclosure(block.entries[i][j], p), p);
    }
    return Ball::div(sum, Ball::abs_enclosure(diag, p), p);
}

}  // namespace bandcert
