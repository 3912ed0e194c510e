#pragma once

// Orchestration of I~_k = I~^{0,S} + I~^{S,T} + I~^{T,inf} per canonical
// key: scheme parameter resolution, shared Bessel tables over the panel
// nodes, deterministic parallel batches, and a resumable decimal cache.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bandcert/ball.hpp"
#include "bandcert/bessel.hpp"
#include "bandcert/errors.hpp"
#include "bandcert/quadrature.hpp"
#include "bandcert/rational.hpp"
#include "bandcert/tail.hpp"

namespace bandcert {

struct ModeKey {
    std::array<std::uint8_t, 6> orders{};  // non-decreasing
    int sign = 1;

    std::uint64_t packed() const {
        std::uint64_t v = 0;
        for (int i = 0; i < 6; ++i) v = (v << 8) | orders[static_cast<size_t>(i)];
        return v;
    }
    bool operator<(const ModeKey& o) const { return packed() < o.packed(); }
    bool operator==(const ModeKey& o) const { return packed() == o.packed() && sign == o.sign; }

    std::string orders_str() const {
        std::string s;
        for (int i = 0; i < 6; ++i) {
            if (i) s += ' ';
            s += std::to_string(static_cast<int>(orders[static_cast<size_t>(i)]));
        }
        return s;
    }
};

// I_k = sign * I_orders with orders the sorted absolute values, through
// J_{-n} = (-1)^n J_n and permutation invariance of the product.
inline ModeKey canonical_key(const std::array<long, 6>& k) {
    long sum = 0;
    for (long v : k) sum += v;
    if (sum % 2 != 0) throw OddSumKey("canonical_key: component sum is odd");
    ModeKey out;
    long flips = 0;
    std::array<long, 6> mags;
    for (size_t i = 0; i < 6; ++i) {
        long v = k[i];
        if (v < 0) {
            flips += -v;
            v = -v;
        }
        if (v > 255) throw DomainViolation("canonical_key: order magnitude exceeds 255");
        mags[i] = v;
    }
    std::sort(mags.begin(), mags.end());
    for (size_t i = 0; i < 6; ++i) out.orders[i] = static_cast<std::uint8_t>(mags[i]);
    out.sign = (flips % 2 == 0) ? 1 : -1;
    return out;
}

struct SchemeOverrides {
    std::optional<Rational> S, T, d0, d1;
    std::optional<long> gauss_n, prec_bits;
};

struct SchemeParams {
    long N = 0;
    Rational S, T;
    Rational d0{1, 4}, d1{4, 5};
    long gauss_n = 12;
    long prec_bits = 128;
    bool certified = true;

    Precision prec() const { return Precision(prec_bits); }
    std::int64_t panels_0S() const { return ((S - Rational(0, 1)) / (d0 * 2)).num; }
    std::int64_t panels_ST() const { return ((T - S) / (d1 * 2)).num; }
    std::int64_t evals_0S() const { return panels_0S() * gauss_n; }
    std::int64_t evals_ST() const { return panels_ST() * gauss_n; }

    std::string describe() const {
        std::ostringstream os;
        os << "N=" << N << "|S=" << S.str() << "|T=" << T.str() << "|d0=" << d0.str()
           << "|d1=" << d1.str() << "|n=" << gauss_n << "|prec=" << prec_bits
           << "|mode=" << (certified ? "certify" : "explore");
        return os.str();
    }
    std::string hash() const {
        std::uint64_t h = 14695981039346656037ull;
        for (char c : describe()) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        std::ostringstream os;
        os << std::hex << h;
        return os.str();
    }
};

namespace detail {
inline std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
    // den > 0
    return num >= 0 ? (num + den - 1) / den : -((-num) / den);
}
}  // namespace detail

// Resolve S and T from N: S is the smallest grid multiple clearing
// 0.95 N^{3/2} ln N + 1; T the smallest grid point past 1.024 * 10 N^2
// (2.4% headroom over the T >= 10 N^2 requirement).
inline SchemeParams scheme_params(long N, const SchemeOverrides& ov = {}, bool certified = true) {
    if (N < 2 || N % 2 != 0)
        throw InvalidBandLimit("scheme_params: N must be even and >= 2, got " + std::to_string(N));
    if (certified && N < 20)
        throw InvalidBandLimit("scheme_params: certified mode requires N >= 20, got " +
                               std::to_string(N));
    SchemeParams sp;
    sp.N = N;
    sp.certified = certified;
    if (ov.d0) sp.d0 = *ov.d0;
    if (ov.d1) sp.d1 = *ov.d1;
    if (ov.gauss_n) sp.gauss_n = *ov.gauss_n;
    if (ov.prec_bits) sp.prec_bits = *ov.prec_bits;
    if (sp.gauss_n < 1 || sp.gauss_n > 64)
        throw ValidityViolation("scheme_params: gauss n out of [1, 64]");
    if (sp.prec_bits < 53) throw ValidityViolation("scheme_params: precision below 53 bits");
    if (!(sp.d0 > Rational(0, 1)) || !(sp.d1 > Rational(0, 1)))
        throw ValidityViolation("scheme_params: panel half-widths must be positive");

    if (ov.S) {
        sp.S = *ov.S;
    } else {
        Precision p(96);
        Ball nb = Ball::from_long(N, p);
        Ball thr = Ball::mul(Ball::from_ratio(95, 100, p),
                             Ball::mul(Ball::sqrt(Ball::pow_int(nb, 3, p), p), Ball::log_(nb, p), p), p);
        thr = Ball::add(thr, Ball::from_long(1, p), p);
        double up = thr.upper_d();
        Rational step = sp.d0 * 2;
        auto k = static_cast<std::int64_t>(std::ceil(up / step.to_double()));
        while ((step * (k - 1)).to_double() >= up) --k;
        while ((step * k).to_double() < up) ++k;
        sp.S = step * k;
    }
    if (ov.T) {
        sp.T = *ov.T;
    } else {
        Rational target = Rational(256 * N * N, 25);  // 1.024 * 10 N^2
        Rational step = sp.d1 * 2;
        Rational gap = (target - sp.S) / step;
        std::int64_t m = detail::ceil_div(gap.num, gap.den);
        if (m < 1) m = 1;
        sp.T = sp.S + step * m;
    }

    if (!(sp.S > Rational(0, 1))) throw ValidityViolation("scheme_params: S must be positive");
    if (!(sp.T > sp.S)) throw ValidityViolation("scheme_params: T must exceed S");
    Rational q0 = sp.S / (sp.d0 * 2);
    if (!q0.is_integer())
        throw ValidityViolation("scheme_params: S = " + sp.S.str() +
                                " is not a multiple of 2 d0 = " + (sp.d0 * 2).str());
    Rational q1 = (sp.T - sp.S) / (sp.d1 * 2);
    if (!q1.is_integer())
        throw ValidityViolation("scheme_params: T - S = " + (sp.T - sp.S).str() +
                                " is not a multiple of 2 d1 = " + (sp.d1 * 2).str());
    if (certified && sp.T < Rational(10 * N * N, 1))
        throw ValidityViolation("scheme_params: certified mode requires T >= 10 N^2");
    return sp;
}

// bound_0S + bound_ST + tail_error, outward rounded; uniform over keys.
inline Ball scheme_error(const SchemeParams& params) {
    if (!params.certified)
        throw ValidityViolation("scheme_error: bounds are not valid in explore mode");
    Precision p(128);
    Ball b0 = bound_0S(params.S, params.d0, params.gauss_n, p);
    Ball b1 = bound_ST(params.S, params.T, params.d1, params.gauss_n, params.N, p);
    Ball bt = tail_error(params.N, params.T, p);
    return Ball::add(Ball::add(b0, b1, p), bt, p);
}

// Same three-term formula without the validity gates: an *estimate* for
// explore-mode diagnostics, carrying no certification weight.
inline Ball scheme_error_estimate(const SchemeParams& params) {
    Precision p(128);
    Ball b0 = bound_0S(params.S, params.d0, params.gauss_n, p);
    Ball b1 = detail::bound_ST_formula(params.S, params.d1, params.gauss_n, p);
    Ball bt = detail::tail_error_formula(params.N, params.T, p);
    return Ball::add(Ball::add(b0, b1, p), bt, p);
}

struct IntegralRecord {
    ModeKey key;  // canonical orders, sign +1
    Ball value;   // arithmetic enclosure of I~_orders, scheme error excluded
    std::string scheme_hash;
};

using IntegralStore = std::map<std::uint64_t, IntegralRecord>;

// Signed lookup: I_k = key.sign * I_orders.
inline Ball store_value(const IntegralStore& store, const ModeKey& key, Precision p) {
    auto it = store.find(key.packed());
    if (it == store.end())
        throw MissingKey("store_value: no record for orders " + key.orders_str());
    Ball v = Ball::round_to(it->second.value, p);
    return key.sign < 0 ? Ball::neg(v) : v;
}

// Shared evaluation state for one SchemeParams: Gauss rule, panel layouts,
// flattened node positions and the Bessel table over them.
class Pipeline {
  public:
    explicit Pipeline(const SchemeParams& params, const std::string& table_cache_file = "")
        : params_(params),
          rule_(legendre_rule(params.gauss_n, params.prec())),
          layout0_(Rational(0, 1), params.S, params.d0),
          layout1_(params.S, params.T, params.d1) {
        build_nodes();
        std::string key = table_key();
        if (!table_cache_file.empty()) {
            std::ifstream is(table_cache_file);
            if (is) {
                auto t = BesselTable::load(is, key);
                if (t && t->node_count() == nodes_.size()) {
                    table_ = std::move(*t);
                    return;
                }
                std::cerr << "bandcert: table cache mismatch, rebuilding\n";
            }
        }
        table_ = BesselTable(2 * params.N, nodes_, params.prec());
        if (!table_cache_file.empty()) {
            std::string tmp = table_cache_file + ".tmp";
            {
                std::ofstream os(tmp);
                table_.save(os, key);
            }
            std::filesystem::rename(tmp, table_cache_file);
        }
    }

    const SchemeParams& params() const { return params_; }
    const GaussRule& rule() const { return rule_; }
    const PanelLayout& layout_0S() const { return layout0_; }
    const PanelLayout& layout_ST() const { return layout1_; }
    size_t node_count() const { return nodes_.size(); }
    const BesselTable& table() const { return table_; }

    std::uint64_t evaluations() const { return evals_.load(); }

    // I~ for canonical orders (sign handled by the caller).  Orders reach
    // 2N through the difference keys I_{m - n_sigma, ...}.
    IntegralRecord compute(const ModeKey& key) const {
        Precision p = params_.prec();
        for (auto o : key.orders)
            if (o > 2 * params_.N)
                throw DomainViolation("compute: order " + std::to_string(int(o)) +
                                      " exceeds 2 N");
        Ball total = Ball::zero(p);
        size_t idx = 0;
        Ball d0 = params_.d0.to_ball(p);
        for (std::int64_t j = 0; j < layout0_.K; ++j)
            total = Ball::add(total, Ball::mul(d0, panel_value(key, idx, p), p), p);
        Ball d1 = params_.d1.to_ball(p);
        for (std::int64_t j = 0; j < layout1_.K; ++j)
            total = Ball::add(total, Ball::mul(d1, panel_value(key, idx, p), p), p);
        std::array<long, 6> orders;
        for (size_t i = 0; i < 6; ++i) orders[i] = key.orders[i];
        total = Ball::add(total, tail_main(orders, params_.T, p), p);
        IntegralRecord rec;
        rec.key = ModeKey{key.orders, 1};
        rec.value = total;
        rec.scheme_hash = params_.hash();
        return rec;
    }

  private:
    SchemeParams params_;
    GaussRule rule_;
    PanelLayout layout0_;
    PanelLayout layout1_;
    std::vector<Ball> nodes_;
    BesselTable table_;
    mutable std::atomic<std::uint64_t> evals_{0};

    std::string table_key() const {
        return "orders=" + std::to_string(2 * params_.N) + " scheme=" + params_.hash() +
               " prec=" + std::to_string(params_.prec_bits);
    }

    void build_nodes() {
        Precision p = params_.prec();
        nodes_.reserve(static_cast<size_t>((layout0_.K + layout1_.K) * rule_.n));
        auto emit = [&](const PanelLayout& lay) {
            Ball d = lay.d.to_ball(p);
            for (std::int64_t j = 0; j < lay.K; ++j) {
                Rational center = lay.a + lay.d * (2 * j + 1);
                Ball c = center.to_ball(p);
                for (long i = 0; i < rule_.n; ++i)
                    nodes_.push_back(Ball::add(c, Ball::mul(d, rule_.nodes[static_cast<size_t>(i)], p), p));
            }
        };
        emit(layout0_);
        emit(layout1_);
    }

    // One panel of sum_i w_i * r prod_o J_o(r) at the shared nodes.
    Ball panel_value(const ModeKey& key, size_t& idx, Precision p) const {
        Ball acc = Ball::zero(p);
        for (long i = 0; i < rule_.n; ++i, ++idx) {
            Ball f = nodes_[idx];
            for (auto o : key.orders) f = Ball::mul(f, table_.at(o, idx), p);
            acc = Ball::add(acc, Ball::mul(rule_.weights[static_cast<size_t>(i)], f, p), p);
            evals_.fetch_add(1, std::memory_order_relaxed);
        }
        return acc;
    }
};

inline IntegralRecord compute_integral(const Pipeline& pipeline, const ModeKey& key) {
    return pipeline.compute(key);
}

namespace detail {

inline std::optional<IntegralStore> load_cache(const std::string& path, const std::string& hash,
                                               Precision p) {
    std::ifstream is(path);
    if (!is) return std::nullopt;
    std::string line;
    if (!std::getline(is, line) || line != "bandcert-integrals v1") {
        std::cerr << "bandcert: cache header mismatch at " << path << ", recomputing\n";
        return std::nullopt;
    }
    if (!std::getline(is, line) || line != "scheme " + hash + " prec " + std::to_string(p.bits)) {
        std::cerr << "bandcert: cache scheme hash mismatch at " << path << ", recomputing\n";
        return std::nullopt;
    }
    IntegralStore store;
    size_t lineno = 2;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        ModeKey key;
        key.sign = 1;
        for (size_t i = 0; i < 6; ++i) {
            int v;
            if (!(ls >> v) || v < 0 || v > 255) {
                std::cerr << "bandcert: corrupt cache line " << lineno << ", recomputing\n";
                return std::nullopt;
            }
            key.orders[i] = static_cast<std::uint8_t>(v);
        }
        std::string rest;
        std::getline(ls, rest);
        IntegralRecord rec;
        rec.key = key;
        try {
            rec.value = Ball::parse(rest, p);
        } catch (const Error&) {
            std::cerr << "bandcert: corrupt cache line " << lineno << ", recomputing\n";
            return std::nullopt;
        }
        rec.scheme_hash = hash;
        store[key.packed()] = std::move(rec);
    }
    return store;
}

inline void save_cache(const std::string& path, const std::string& hash, Precision p,
                       const IntegralStore& store) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw Error("save_cache: cannot open " + tmp);
        os << "bandcert-integrals v1\n";
        os << "scheme " << hash << " prec " << p.bits << "\n";
        for (const auto& [packed, rec] : store)
            os << rec.key.orders_str() << " " << rec.value.str() << "\n";
        if (!os) throw Error("save_cache: write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace detail

// Resolve every key from the cache or by computation; the store and the
// cache file are independent of worker count and scheduling.
inline IntegralStore batch_compute(const std::vector<ModeKey>& keys, const SchemeParams& params,
                                   const std::string& cache_path, unsigned workers,
                                   const Pipeline* shared_pipeline = nullptr,
                                   const std::string& table_cache_file = "") {
    Precision p = params.prec();
    std::string hash = params.hash();
    IntegralStore store;
    if (!cache_path.empty()) {
        auto cached = detail::load_cache(cache_path, hash, p);
        if (cached) store = std::move(*cached);
    }

    std::vector<ModeKey> missing;
    {
        std::set<std::uint64_t> seen;
        for (const ModeKey& k : keys) {
            ModeKey canon{k.orders, 1};
            if (store.count(canon.packed()) || !seen.insert(canon.packed()).second) continue;
            missing.push_back(canon);
        }
    }
    std::sort(missing.begin(), missing.end());

    if (!missing.empty()) {
        std::unique_ptr<Pipeline> owned;
        const Pipeline* pipe = shared_pipeline;
        if (!pipe) {
            owned = std::make_unique<Pipeline>(params, table_cache_file);
            pipe = owned.get();
        }
        if (workers == 0) workers = 1;
        std::vector<IntegralRecord> results(missing.size());
        std::atomic<size_t> next{0};
        std::atomic<size_t> done{0};
        std::exception_ptr first_error;
        std::mutex io_mutex;
        size_t total = missing.size();
        size_t report_every = std::max<size_t>(1, total / 50);
        auto worker = [&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= total) return;
                try {
                    results[i] = pipe->compute(missing[i]);
                } catch (...) {
                    std::lock_guard<std::mutex> g(io_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
                size_t d = done.fetch_add(1) + 1;
                if (d % report_every == 0 || d == total) {
                    std::lock_guard<std::mutex> g(io_mutex);
                    std::cerr << "bandcert: integrals " << d << " / " << total << "\n";
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned w = 0; w + 1 < workers; ++w) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
        for (auto& rec : results) store[rec.key.packed()] = std::move(rec);
        if (!cache_path.empty()) detail::save_cache(cache_path, hash, p, store);
    }
    return store;
}

}  // namespace bandcert
