// bandcert CLI: certified Bessel-product integrals, block assembly, and
// positive-definiteness certificates for the band-limited extremizer
// matrices, plus figure-data exports.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bandcert/certifier.hpp"
#include "bandcert/engine.hpp"
#include "bandcert/figures.hpp"

namespace fs = std::filesystem;
using namespace bandcert;

namespace {

struct CommonOpts {
    long N = 20;
    std::string mode = "certify";
    std::string cache;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    long prec = 128;
    std::string out = ".";
    std::string s, t, d0, d1;
    long gauss_n = 12;
};

void add_common(CLI::App* app, CommonOpts& o) {
    app->add_option("--n", o.N, "band limit N");
    app->add_option("--mode", o.mode, "certify | explore")
        ->check(CLI::IsMember({"certify", "explore"}));
    app->add_option("--cache", o.cache, "cache directory for integrals and tables");
    app->add_option("--workers", o.workers, "worker thread count");
    app->add_option("--prec", o.prec, "working precision in bits (>= 53)");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--s", o.s, "override cutoff S (integer or decimal)");
    app->add_option("--t", o.t, "override cutoff T");
    app->add_option("--d0", o.d0, "panel half-width on [0,S] (default 0.25)");
    app->add_option("--d1", o.d1, "panel half-width on [S,T] (default 0.8)");
    app->add_option("--gauss-n", o.gauss_n, "Gauss points per panel (default 12)");
}

SchemeParams resolve(const CommonOpts& o, long n_override = -1) {
    SchemeOverrides ov;
    if (!o.s.empty()) ov.S = Rational::parse(o.s);
    if (!o.t.empty()) ov.T = Rational::parse(o.t);
    if (!o.d0.empty()) ov.d0 = Rational::parse(o.d0);
    if (!o.d1.empty()) ov.d1 = Rational::parse(o.d1);
    ov.gauss_n = o.gauss_n;
    ov.prec_bits = o.prec;
    return scheme_params(n_override > 0 ? n_override : o.N, ov, o.mode == "certify");
}

std::string cache_file(const CommonOpts& o, const SchemeParams& sp) {
    if (o.cache.empty()) return "";
    fs::create_directories(o.cache);
    return (fs::path(o.cache) / ("integrals-" + sp.hash() + ".log")).string();
}

std::string table_cache_file(const CommonOpts& o, const SchemeParams& sp) {
    if (o.cache.empty()) return "";
    fs::create_directories(o.cache);
    return (fs::path(o.cache) / ("btable-" + sp.hash() + ".log")).string();
}

IntegralStore compute_store(const CommonOpts& o, const SchemeParams& sp) {
    std::vector<ModeKey> keys = required_keys(sp.N);
    std::cerr << "bandcert: " << keys.size() << " canonical integrals for N = " << sp.N << "\n";
    return batch_compute(keys, sp, cache_file(o, sp), o.workers, nullptr, table_cache_file(o, sp));
}

std::vector<long> parse_long_list(const std::string& s) {
    std::vector<long> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stol(item));
    }
    return out;
}

Triple parse_triple(const std::string& s) {
    auto v = parse_long_list(s);
    if (v.size() != 3) throw Error("expected a triple m1,m2,m3, got \"" + s + "\"");
    return Triple{v[0], v[1], v[2]};
}

int run_certify(const CommonOpts& o) {
    SchemeParams sp = resolve(o);
    IntegralStore store = compute_store(o, sp);
    Certificate cert = certify(sp.N, sp, store);
    fs::create_directories(o.out);
    std::ofstream txt(fs::path(o.out) / "certificate.txt", std::ios::binary);
    txt << cert.text();
    std::ofstream tsv(fs::path(o.out) / "certificate.tsv", std::ios::binary);
    tsv << cert.table();
    std::cout << cert.text();
    return cert.global_pass ? 0 : 1;
}

int run_integrals(const CommonOpts& o) {
    SchemeParams sp = resolve(o);
    IntegralStore store = compute_store(o, sp);
    std::cout << "scheme " << sp.describe() << "\n";
    std::cout << "records " << store.size() << "\n";
    size_t shown = 0;
    for (const auto& [pk, rec] : store) {
        std::cout << rec.key.orders_str() << " " << rec.value.str() << "\n";
        if (++shown >= 5) break;
    }
    return 0;
}

int run_params(const CommonOpts& o) {
    SchemeParams sp = resolve(o);
    std::cout << "N " << sp.N << "\n";
    std::cout << "mode " << (sp.certified ? "certify" : "explore") << "\n";
    std::cout << "S " << sp.S.str() << "\n";
    std::cout << "T " << sp.T.str() << "\n";
    std::cout << "d0 " << sp.d0.str() << "\n";
    std::cout << "d1 " << sp.d1.str() << "\n";
    std::cout << "gauss_n " << sp.gauss_n << "\n";
    std::cout << "prec " << sp.prec_bits << "\n";
    std::cout << "panels_0S " << sp.panels_0S() << "\n";
    std::cout << "panels_ST " << sp.panels_ST() << "\n";
    std::cout << "evals_0S " << sp.evals_0S() << "\n";
    std::cout << "evals_ST " << sp.evals_ST() << "\n";
    std::cout << "scheme_hash " << sp.hash() << "\n";
    if (sp.certified) {
        Precision p(128);
        Ball b0 = bound_0S(sp.S, sp.d0, sp.gauss_n, p);
        Ball b1 = bound_ST(sp.S, sp.T, sp.d1, sp.gauss_n, sp.N, p);
        Ball bt = tail_error(sp.N, sp.T, p);
        std::printf("bound_0S %.6e\n", b0.upper_d());
        std::printf("bound_ST %.6e\n", b1.upper_d());
        std::printf("tail_error %.6e\n", bt.upper_d());
        std::printf("scheme_error %.6e\n", scheme_error(sp).upper_d());
    } else {
        std::cout << "scheme_error invalid (explore mode)\n";
    }
    return 0;
}

int run_rule(const CommonOpts& o, long points) {
    GaussRule rule = legendre_rule(points, Precision(o.prec));
    for (long i = 0; i < rule.n; ++i)
        std::cout << rule.nodes[static_cast<size_t>(i)].str() << "  "
                  << rule.weights[static_cast<size_t>(i)].str() << "\n";
    return 0;
}

int run_fit(const std::string& input) {
    std::vector<std::pair<double, double>> data;
    std::istream* is = &std::cin;
    std::ifstream file;
    if (!input.empty() && input != "-") {
        file.open(input);
        if (!file) throw Error("fit: cannot open " + input);
        is = &file;
    }
    double n, lam;
    while (*is >> n >> lam) data.emplace_back(n, lam);
    auto [a, b] = cmd_fit(data);
    std::printf("%.6g %.6g\n", a, b);
    return 0;
}

int run_figures(const CommonOpts& o, const std::string& which, const std::string& col,
                long fig_d, const std::string& nlist) {
    fs::create_directories(o.out);
    fs::path out(o.out);
    SchemeParams sp = resolve(o);

    Triple m = col.empty() ? Triple{-sp.N, sp.N / 2, sp.N / 2} : parse_triple(col);
    std::string col_tag = std::to_string(m[0]) + "_" + std::to_string(m[1]);

    auto d0_block = [&](const SchemeParams& spp, const IntegralStore& store) {
        return assemble_block(spp.N, 0, store, spp);
    };

    if (which == "f2" || which == "f9") {
        std::vector<long> ns = nlist.empty() ? std::vector<long>{sp.N} : parse_long_list(nlist);
        std::vector<std::pair<long, double>> lams;
        for (long n : ns) {
            SchemeParams spn = resolve(o, n);
            IntegralStore store = compute_store(o, spn);
            BlockMatrix b0 = d0_block(spn, store);
            if (which == "f2") {
                lams.emplace_back(n, min_eig(b0).mid_d());
            } else {
                figure_disc_profile(n, disc_block(n, b0),
                                    (out / ("figure_9_n_" + std::to_string(n) + ".dat")).string());
            }
        }
        if (which == "f2") figure_2(lams, (out / "figure_2.dat").string());
        return 0;
    }

    IntegralStore store = compute_store(o, sp);
    if (which == "f1") {
        std::vector<std::string> lines;
        for (long D = 0; D <= 3 * sp.N; D += 2) {
            BlockMatrix block = assemble_block(sp.N, D, store, sp);
            lines.push_back(std::to_string(D) + " " +
                            bandcert::detail::fmt(min_eig(block).mid_d()));
        }
        bandcert::detail::write_lines((out / "figure_1.dat").string(), lines);
    } else if (which == "f3") {
        BlockMatrix block = assemble_block(sp.N, fig_d, store, sp);
        figure_3(block, (out / ("figure_3_d_" + std::to_string(fig_d) + ".dat")).string());
    } else if (which == "f4") {
        BlockMatrix b0 = assemble_block(sp.N, fig_d, store, sp);
        figure_column_heatmap(sp.N, fig_d, b0, m,
                              (out / ("figure_4_col_" + col_tag + ".dat")).string());
    } else if (which == "f5") {
        BlockMatrix b0 = assemble_block(sp.N, fig_d, store, sp);
        figure_column_heatmap(sp.N, fig_d, b0, m,
                              (out / ("figure_5_col_" + col_tag + ".dat")).string());
        figure_ellipse(fig_d, m, (out / "figure_5_ellipse.dat").string());
    } else if (which == "f6") {
        BlockMatrix b0 = assemble_block(sp.N, fig_d, store, sp);
        figure_radial_column(sp.N, fig_d, b0, m, (out / "figure_6.dat").string());
    } else if (which == "f7") {
        figure_eigenvector(sp.N, d0_block(sp, store), (out / "figure_7.dat").string());
    } else if (which == "f8") {
        figure_disc_eigenvectors(disc_block(sp.N, d0_block(sp, store)),
                                 (out / "figure_8").string());
    } else {
        throw Error("figures: unknown figure \"" + which + "\"");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified enclosures of six-fold Bessel-product integrals and "
                 "positive-definiteness certificates for band-limited extremizer matrices"};
    app.require_subcommand(1);

    CommonOpts o;

    CLI::App* certify_cmd = app.add_subcommand("certify", "run the full pipeline and certify");
    add_common(certify_cmd, o);

    CLI::App* integrals_cmd = app.add_subcommand("integrals", "compute and cache the integrals");
    add_common(integrals_cmd, o);

    CLI::App* params_cmd = app.add_subcommand("params", "print the resolved scheme parameters");
    add_common(params_cmd, o);

    long rule_points = 12;
    CLI::App* rule_cmd = app.add_subcommand("rule", "print a Gauss-Legendre rule");
    rule_cmd->add_option("--points", rule_points, "node count");
    add_common(rule_cmd, o);

    std::string fit_input;
    CLI::App* fit_cmd = app.add_subcommand("fit", "power-law fit of (N, lambda) pairs");
    fit_cmd->add_option("--input", fit_input, "input file (default stdin)");

    std::string which, col, nlist;
    long fig_d = 0;
    CLI::App* figures_cmd = app.add_subcommand("figures", "export figure data");
    figures_cmd->add_option("which", which, "f1..f9")->required();
    figures_cmd->add_option("--col", col, "column triple m1,m2,m3 (f4/f5/f6)");
    figures_cmd->add_option("--d", fig_d, "block label D (f3/f4/f5/f6)");
    figures_cmd->add_option("--n-list", nlist, "comma-separated N values (f2/f9)");
    add_common(figures_cmd, o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (certify_cmd->parsed()) return run_certify(o);
        if (integrals_cmd->parsed()) return run_integrals(o);
        if (params_cmd->parsed()) return run_params(o);
        if (rule_cmd->parsed()) return run_rule(o, rule_points);
        if (fit_cmd->parsed()) return run_fit(fit_input);
        if (figures_cmd->parsed()) return run_figures(o, which, col, fig_d, nlist);
    } catch (const Error& e) {
        std::cerr << "bandcert: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "bandcert: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
