// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Criterion 8 (full-scale N = 120 reproduction) is a documented long-running
// CLI mode and is reported as SKIP here.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <thread>
#include <vector>

#include "bandcert/certifier.hpp"
#include "bandcert/engine.hpp"
#include "bandcert/figures.hpp"
#include "oracle.hpp"

using namespace bandcert;
using clock_type = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail, double seconds) {
    std::printf("criterion %d: %s  (%.1f s)  %s\n", criterion, pass ? "PASS" : "FAIL", seconds,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void info(const std::string& line) {
    std::printf("info: %s\n", line.c_str());
    std::fflush(stdout);
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

template <typename F>
void parallel_for(size_t count, F&& body) {
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex m;
    auto run = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(m);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w + 1 < worker_count(); ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

SchemeParams paper_params() {
    SchemeOverrides ov;
    ov.S = Rational(6000, 1);
    ov.T = Rational(150000, 1);
    return scheme_params(120, ov);
}

// ---- criterion 1: error-budget reproduction --------------------------------
void criterion_1() {
    auto t0 = clock_type::now();
    Precision p(128);
    SchemeParams sp = paper_params();
    Ball b0 = bound_0S(sp.S, sp.d0, sp.gauss_n, p);
    Ball b1 = bound_ST(sp.S, sp.T, sp.d1, sp.gauss_n, sp.N, p);
    Ball bt = tail_error(sp.N, sp.T, p);
    Ball se = scheme_error(sp);
    Ball eps16 = Ball::mul_si(se, 16, p);
    Ball opn = Ball::mul_si(eps16, 1860, p);
    bool pass = b0.upper_d() <= 0.1e-10 && b1.upper_d() <= 1.1e-10 && bt.upper_d() <= 0.5e-9 &&
                se.upper_d() <= 0.73e-9 && eps16.upper_d() <= 1.2e-8 &&
                opn.upper_d() <= 0.000023;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "bound_0S %.3e, bound_ST %.3e, tail %.3e, scheme %.3e, 16eps %.3e, op %.3e",
                  b0.upper_d(), b1.upper_d(), bt.upper_d(), se.upper_d(), eps16.upper_d(),
                  opn.upper_d());
    report(1, pass, buf, std::chrono::duration<double>(clock_type::now() - t0).count());
}

// ---- criterion 2: evaluation counts ----------------------------------------
void criterion_2() {
    auto t0 = clock_type::now();
    SchemeParams sp = paper_params();
    bool pass = sp.evals_0S() == 144000 && sp.evals_ST() == 1080000;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "evals [0,S] = %lld, [S,T] = %lld",
                  static_cast<long long>(sp.evals_0S()), static_cast<long long>(sp.evals_ST()));
    report(2, pass, buf, std::chrono::duration<double>(clock_type::now() - t0).count());
}

// ---- criterion 3: enumeration counts ---------------------------------------
void criterion_3() {
    auto t0 = clock_type::now();
    size_t x0 = enumerate_X_D(120, 0).size();
    size_t rk = required_keys(30).size();
    bool pass = x0 == 1860 && rk >= static_cast<size_t>(0.85 * 2.1e5) &&
                rk <= static_cast<size_t>(1.15 * 2.1e5);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "|X_0|(120) = %zu, required keys (30) = %zu", x0, rk);
    report(3, pass, buf, std::chrono::duration<double>(clock_type::now() - t0).count());
}

// shared desk-run state built by criterion 4 and reused by 5 and 7
struct DeskRun {
    SchemeParams params = scheme_params(20);
    std::unique_ptr<Pipeline> pipeline;
    IntegralStore store;
    Certificate certificate;
};

DeskRun desk;

// ---- criterion 4: end-to-end desk certification at N = 20 ------------------
void criterion_4() {
    auto t0 = clock_type::now();
    std::filesystem::create_directories("acceptance_cache");
    std::string cache = "acceptance_cache/integrals-" + desk.params.hash() + ".log";
    std::string tcache = "acceptance_cache/btable-" + desk.params.hash() + ".log";

    desk.pipeline = std::make_unique<Pipeline>(desk.params, tcache);
    std::vector<ModeKey> keys = required_keys(20);
    info("desk run: " + std::to_string(keys.size()) + " canonical integrals over " +
         std::to_string(desk.pipeline->node_count()) + " shared nodes");
    desk.store = batch_compute(keys, desk.params, cache, worker_count(), desk.pipeline.get());
    desk.certificate = certify(20, desk.params, desk.store);

    double lam0 = -1.0;
    for (const auto& b : desk.certificate.blocks)
        if (b.D == 0) lam0 = b.lambda_min.mid_d();
    double target = 0.153 * std::pow(20.0, -1.74);
    bool blocks_ok = desk.certificate.blocks.size() == 31;
    bool lam_ok = lam0 >= target / 2.0 && lam0 <= target * 2.0;
    bool pass = desk.certificate.global_pass && blocks_ok && lam_ok;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "verdict %s, %zu blocks, lambda_min(D=0) = %.4e vs fit %.4e (factor-2 window)",
                  desk.certificate.global_pass ? "PASS" : "FAIL", desk.certificate.blocks.size(),
                  lam0, target);
    report(4, pass, buf, std::chrono::duration<double>(clock_type::now() - t0).count());
    if (!desk.certificate.d0_attains_minimum)
        info("WARN: minimal eigenvalue not attained at D = 0 (reported, not asserted)");
}

// ---- criterion 5: oracle equivalence on sampled keys ------------------------
void criterion_5() {
    auto t0 = clock_type::now();
    std::vector<ModeKey> keys = required_keys(20);
    std::mt19937_64 rng(20250809);
    std::shuffle(keys.begin(), keys.end(), rng);
    size_t count = 20;
    keys.resize(count);

    double budget = scheme_error(desk.params).upper_d();
    std::vector<double> diffs(count), tols(count);
    parallel_for(count, [&](size_t i) {
        std::array<long, 6> orders;
        for (size_t j = 0; j < 6; ++j) orders[j] = keys[i].orders[j];
        auto quad = oracle::integrate_product(orders, 0.0, 1e5, 1e-11);
        auto tail = oracle::tail_beyond(orders, 1e5);
        double oracle_value = quad.value + tail.main;
        double mine = store_value(desk.store, ModeKey{keys[i].orders, 1}, desk.params.prec()).mid_d();
        diffs[i] = std::abs(mine - oracle_value);
        tols[i] = budget + quad.abserr + tail.majorant;
    });
    size_t ok = 0;
    double worst_ratio = 0.0;
    for (size_t i = 0; i < count; ++i) {
        if (diffs[i] <= tols[i]) ++ok;
        worst_ratio = std::max(worst_ratio, diffs[i] / tols[i]);
    }
    bool pass = ok == count;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%zu/%zu keys within tolerance, worst diff/tol = %.3f", ok,
                  count, worst_ratio);
    report(5, pass, buf, std::chrono::duration<double>(clock_type::now() - t0).count());
}

// ---- criterion 6: brute-force matrix equivalence at N in {2, 4} -------------
Ball brute_integral(const std::array<long, 6>& k, const SchemeParams& sp, const GaussRule& rule) {
    Precision p = sp.prec();
    auto f = [&](const Ball& r) {
        Ball v = r;
        for (long n : k) v = Ball::mul(v, bessel_j(n, r, p), p);
        return v;
    };
    PanelLayout l0(Rational(0, 1), sp.S, sp.d0);
    PanelLayout l1(sp.S, sp.T, sp.d1);
    Ball v = Ball::add(panel_sum(f, l0, rule, p), panel_sum(f, l1, rule, p), p);
    return Ball::add(v, tail_main(k, sp.T, p), p);
}

Ball brute_q_entry(const Triple& m, const Triple& n, const SchemeParams& sp,
                   const GaussRule& rule) {
    Precision p = sp.prec();
    auto I = [&](const Triple& a, const Triple& b) {
        return brute_integral({a[0], a[1], a[2], b[0], b[1], b[2]}, sp, rule);
    };
    Ball acc = Ball::zero(p);
    for (const auto& sigma : kPerm3) {
        Triple ns = permute(n, sigma);
        Triple mns{-ns[0], -ns[1], -ns[2]};
        Ball L = Ball::mul_2si(I(m, mns), 1, p);
        for (const Triple& sh : kShifts)
            L = Ball::add(L, I(m, Triple{mns[0] + sh[0], mns[1] + sh[1], mns[2] + sh[2]}), p);
        Triple diff{m[0] - ns[0], m[1] - ns[1], m[2] - ns[2]};
        Ball R = Ball::mul_2si(I(diff, Triple{0, 0, 0}), 1, p);
        for (const Triple& sh : kShifts) R = Ball::add(R, I(diff, sh), p);
        acc = Ball::add(acc, Ball::sub(R, L, p), p);
    }
    return Ball::div_ui(acc, 6, p);
}

void criterion_6() {
    auto t0 = clock_type::now();
    bool pass = true;
    std::string detail;
    for (long N : {2L, 4L}) {
        SchemeParams sp = scheme_params(N, {}, false);
        Pipeline pipe(sp);
        IntegralStore store = batch_compute(required_keys(N), sp, "", worker_count(), &pipe);
        GaussRule rule = legendre_rule(sp.gauss_n, sp.prec());

        struct Task {
            long D;
            size_t i, j;
        };
        std::vector<Task> tasks;
        std::map<long, BlockMatrix> blocks;
        for (long D = 0; D <= 3 * N; D += 2) {
            blocks[D] = assemble_block(N, D, store, sp);
            for (size_t i = 0; i < blocks[D].dim(); ++i)
                for (size_t j = i; j < blocks[D].dim(); ++j) tasks.push_back({D, i, j});
        }
        std::atomic<int> bad{0};
        parallel_for(tasks.size(), [&](size_t t) {
            const auto& task = tasks[t];
            const BlockMatrix& block = blocks[task.D];
            Ball brute = brute_q_entry(block.index[task.i], block.index[task.j], sp, rule);
            if (!brute.overlaps(block.entries[task.i][task.j])) bad.fetch_add(1);
        });
        detail += "N=" + std::to_string(N) + ": " + std::to_string(tasks.size()) +
                  " entries, disjoint " + std::to_string(bad.load()) + "; ";
        pass = pass && bad.load() == 0;
    }
    report(6, pass, detail, std::chrono::duration<double>(clock_type::now() - t0).count());
}

// ---- criterion 7: property suites -------------------------------------------
bool prop_moments() {
    GaussRule rule = legendre_rule(12, Precision(128));
    validate_rule(rule, Precision(128));
    return true;
}

bool prop_bessel() {
    Precision p(128);
    std::mt19937_64 rng(1811);
    std::uniform_real_distribution<double> xs(0.05, 400.0);
    std::uniform_int_distribution<long> ns(1, 20);
    for (int iter = 0; iter < 1000; ++iter) {
        double xv = xs(rng);
        long n = ns(rng);
        Ball x = Ball::from_double(xv, p);
        Ball jm = bessel_j(n - 1, x, p);
        Ball j = bessel_j(n, x, p);
        Ball jp = bessel_j(n + 1, x, p);
        Ball res = Ball::sub(Ball::add(jm, jp, p), Ball::div(Ball::mul_si(j, 2 * n, p), x, p), p);
        if (!res.contains(0.0)) return false;
        Ball refl = bessel_j(-n, x, p);
        Ball expect = (n % 2 == 1) ? Ball::neg(j) : j;
        if (!refl.same_bits(expect)) return false;
        if (j.upper_d() > 1.0 + 2 * j.rad_d() || j.lower_d() < -1.0 - 2 * j.rad_d()) return false;
    }
    return true;
}

bool prop_tail_identity() {
    Precision p(128);
    std::mt19937_64 rng(2025);
    std::uniform_int_distribution<long> ks(-21, 21);
    std::uniform_real_distribution<double> zs(4096.0, 8192.0);
    Ball quarter = Ball::mul_2si(Ball::pi(p), -2, p);
    int checked = 0;
    while (checked < 100) {
        std::array<long, 6> k;
        long sum = 0;
        for (auto& v : k) {
            v = ks(rng);
            sum += v;
        }
        if (sum % 2 != 0) continue;
        ++checked;
        auto tc = expand_products(k, p);
        Ball z = Ball::from_double(zs(rng), p);
        // direct product for the A level
        Ball direct = Ball::from_long(1, p);
        for (long kj : k) {
            Ball w = Ball::sub(z, Ball::mul_si(quarter, 1 + 2 * kj, p), p);
            direct = Ball::mul(direct, Ball::cos_(w, p), p);
        }
        if (!trig_poly_eval(tc.A_terms, z, p).overlaps(direct)) return false;
    }
    return true;
}

bool prop_refinement() {
    SchemeOverrides fine;
    fine.d0 = Rational(1, 8);
    fine.d1 = Rational(2, 5);
    SchemeParams sp_fine = scheme_params(20, fine);
    Pipeline pipe_fine(sp_fine);
    std::vector<ModeKey> keys = required_keys(20);
    std::mt19937_64 rng(4711);
    std::shuffle(keys.begin(), keys.end(), rng);
    keys.resize(10);
    Ball eps_base = scheme_error(desk.params);
    Ball eps_fine = scheme_error(sp_fine);
    std::atomic<int> bad{0};
    parallel_for(keys.size(), [&](size_t i) {
        ModeKey key{keys[i].orders, 1};
        Ball base = Ball::widen(store_value(desk.store, key, desk.params.prec()),
                                eps_base.upper_bound_ball(Precision(64)));
        Ball refined = Ball::widen(pipe_fine.compute(key).value,
                                   eps_fine.upper_bound_ball(Precision(64)));
        if (!base.overlaps(refined)) bad.fetch_add(1);
    });
    return bad.load() == 0;
}

bool prop_determinism() {
    std::vector<ModeKey> keys = required_keys(20);
    std::mt19937_64 rng(1234);
    std::shuffle(keys.begin(), keys.end(), rng);
    keys.resize(100);
    IntegralStore s1 = batch_compute(keys, desk.params, "", 1, desk.pipeline.get());
    IntegralStore s8 = batch_compute(keys, desk.params, "", 8, desk.pipeline.get());
    if (s1.size() != s8.size()) return false;
    for (const auto& [pk, rec] : s1) {
        auto it = s8.find(pk);
        if (it == s8.end() || !it->second.value.same_bits(rec.value)) return false;
    }
    return true;
}

bool prop_symmetry_n8() {
    SchemeParams sp = scheme_params(8, {}, false);
    Pipeline pipe(sp);
    IntegralStore store = batch_compute(required_keys(8), sp, "", worker_count(), &pipe);
    for (long D = 0; D <= 24; D += 2) {
        BlockMatrix block = assemble_block(8, D, store, sp);
        for (size_t i = 0; i < block.dim(); ++i)
            for (size_t j = i + 1; j < block.dim(); ++j)
                if (!block.entries[i][j].overlaps(block.entries[j][i])) return false;
    }
    return true;
}

void criterion_7() {
    auto t0 = clock_type::now();
    struct Item {
        const char* name;
        bool ok;
    };
    std::vector<Item> items;
    items.push_back({"gauss-moments", prop_moments()});
    items.push_back({"bessel-invariants", prop_bessel()});
    items.push_back({"tail-identity", prop_tail_identity()});
    items.push_back({"panel-refinement", prop_refinement()});
    items.push_back({"determinism", prop_determinism()});
    items.push_back({"block-symmetry-n8", prop_symmetry_n8()});
    bool pass = true;
    std::string detail;
    for (const auto& it : items) {
        pass = pass && it.ok;
        detail += std::string(it.name) + (it.ok ? " ok; " : " FAIL; ");
    }
    report(7, pass, detail, std::chrono::duration<double>(clock_type::now() - t0).count());
}

// f5 peak-location check on the desk data (informational; the threshold is
// ours, the phenomenon is the paper's).
void f5_peak_info() {
    BlockMatrix b0 = assemble_block(20, 0, desk.store, desk.params);
    Triple m{-10, 4, 6};
    auto column = hexagon_column(20, 0, b0, m);
    double rho = std::sqrt(static_cast<double>(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]));
    std::vector<std::pair<double, double>> entries;  // (|value|, radius)
    for (const auto& [n, v] : column) {
        if (sorted_triple(n) == sorted_triple(m)) continue;  // diagonal orbit
        double r = std::sqrt(static_cast<double>(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]));
        entries.emplace_back(std::abs(v), r);
    }
    std::sort(entries.rbegin(), entries.rend());
    size_t take = std::min<size_t>(40, entries.size());
    size_t near = 0;
    for (size_t i = 0; i < take; ++i)
        if (std::abs(entries[i].second - rho) <= 2.0) ++near;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "f5 peaks: %zu/%zu largest off-diagonal entries within 2 of ellipse radius %.2f",
                  near, take, rho);
    info(buf);
}

}  // namespace

int main() {
    auto t0 = clock_type::now();
    try {
        criterion_1();
        criterion_2();
        criterion_3();
        criterion_4();
        criterion_5();
        criterion_6();
        criterion_7();
        f5_peak_info();
        std::printf("criterion 8: SKIP  full-scale N=120 reproduction is the documented "
                    "long-running CLI mode (bandcert certify --n 120 --s 6000 --t 150000), "
                    "excluded from CI\n");
    } catch (const std::exception& e) {
        std::printf("acceptance: unexpected exception: %s\n", e.what());
        ++failures;
    }
    std::printf("acceptance: %s  (total %.1f s)\n", failures == 0 ? "ALL PASS" : "FAILURES",
                std::chrono::duration<double>(clock_type::now() - t0).count());
    return failures == 0 ? 0 : 1;
}
