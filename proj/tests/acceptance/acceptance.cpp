// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--out-dir DIR] [--threads N] [--quick] [--only 1,2,...]
//
// --quick shrinks every campaign for development; its verdicts are not
// meaningful.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "brw/engine.hpp"
#include "brw/error.hpp"
#include "brw/estimators.hpp"
#include "brw/igw.hpp"
#include "brw/io.hpp"
#include "brw/jobs.hpp"
#include "brw/martingales.hpp"
#include "brw/regions.hpp"

namespace fs = std::filesystem;
using namespace brw;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Settings {
    fs::path root;
    int threads = 8;
    bool quick = false;
};

Settings g;

// Job runs whose tables criterion 11 reproduces.
std::vector<std::pair<std::string, Json>> g_runs;

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Json run(const std::string& name, const std::string& command, Json config)
{
    JobOptions o;
    o.threads = g.threads;
    o.out_dir = g.root / name;
    Json m = run_job(command, config, o);
    g_runs.emplace_back(name, m);
    return m;
}

CsvTable table(const std::string& run_name, const std::string& file)
{
    return parse_csv(read_file(g.root / run_name / file));
}

Json json_file(const std::string& run_name, const std::string& file)
{
    return Json::parse(read_file(g.root / run_name / file));
}

double num(const CsvTable& t, std::size_t row, const char* col)
{
    return parse_double(t.rows[row][t.column(col)]);
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

SimSpec spec_of(double beta, int n, double x, std::uint64_t seed, std::uint64_t rep)
{
    SimSpec s;
    s.params = derive_params(beta);
    s.n = n;
    s.x = x;
    s.seed = seed;
    s.replicate = rep;
    return s;
}

double z_abs(std::span<const double> leaves, double beta, int n, double x)
{
    std::vector<double> y(leaves.begin(), leaves.end());
    for (double& v : y)
        v += x;
    MartingaleFold f(beta, n);
    f.add(y);
    return f.Z_abs();
}

// ---------------------------------------------------------------------------

Outcome criterion1()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1001);
    const double betas[] = {0.3, 0.6, 1.0};
    int identical = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const double beta = betas[rng() % 3];
        const int n = static_cast<int>(rng() % 13);
        const double x = std::uniform_real_distribution<double>(-2, 2)(rng);
        SimSpec s = spec_of(beta, n, x, rng(), rng() % 100000);
        if (rng() % 2)
            s.conditioning = std::make_shared<BandSchedule>(s.params, n);
        struct Collect {
            std::vector<double> v;
            void on_leaf(double p) { v.push_back(p); }
        } dfs;
        DfsOptions opts;
        opts.block_levels = 1 + static_cast<int>(rng() % 8);
        run_dfs(s, opts, dfs);
        std::vector<double> bfs = run_bfs(s)[n].positions;
        std::sort(dfs.v.begin(), dfs.v.end());
        std::sort(bfs.begin(), bfs.end());
        identical += dfs.v == bfs;
    }
    const double secs = seconds_since(t0);
    return {identical == 100 && secs < 10,
            fmt("%d/100 specs with bit-identical leaf multisets; %.2f s (limit 10 s)", identical, secs)};
}

Outcome criterion2()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2002);
    std::uniform_real_distribution<double> U(0, 1);
    double worst[3] = {0, 0, 0};
    const int trials = 1000;
    for (int trial = 0; trial < trials; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 9); // 2..10
        const double beta = 0.2 + 0.9 * U(rng);
        const ModelParams p = derive_params(beta);
        const double x = -3 + 6 * U(rng);
        const auto gens = run_bfs(spec_of(beta, n, 0.0, rng(), trial));
        const auto& leaves = gens[n].positions;
        const double w = additive_W(leaves, beta, n);
        const double z = derivative_Z(leaves, beta, n);

        // Shift identity Z^[x]_n = e^{beta x} (Z_n - x W_n).
        const double zx = shifted_Z(leaves, beta, n, x);
        const double s0 = z_abs(leaves, beta, n, x) + std::exp(beta * x) * std::fabs(x) * w;
        worst[0] = std::max(worst[0], std::fabs(zx - std::exp(beta * x) * (z - x * w)) / s0);

        // One-step recursion Z^[x]_n = q sum_{|u|=1} Z^{[x + S_u - beta]}_{n-1}.
        const std::size_t half = std::size_t{1} << (n - 1);
        double rec = 0.0, s1 = 0.0;
        for (int c = 0; c < 2; ++c) {
            const double su = gens[1].positions[c];
            std::vector<double> rel(leaves.begin() + c * half, leaves.begin() + (c + 1) * half);
            for (double& v : rel)
                v -= su;
            rec += p.q * shifted_Z(rel, beta, n - 1, x + su - beta);
            s1 += p.q * z_abs(rel, beta, n - 1, x + su - beta);
        }
        worst[1] = std::max(worst[1], std::fabs(zx - rec) / s1);

        // Generation-m decomposition of Z_n.
        const int m = 1 + static_cast<int>(rng() % (n - 1));
        const std::size_t block = std::size_t{1} << (n - m);
        double acc = 0.0, s2 = 0.0;
        for (std::size_t u = 0; u < gens[m].positions.size(); ++u) {
            const double su = gens[m].positions[u];
            std::vector<double> rel(leaves.begin() + u * block, leaves.begin() + (u + 1) * block);
            for (double& v : rel)
                v -= su;
            const double wu = additive_W(rel, beta, n - m);
            const double zu = derivative_Z(rel, beta, n - m);
            const double f = std::ldexp(std::exp(beta * su - 0.5 * beta * beta * m), -m);
            acc += f * (zu + (beta * m - su) * wu);
            s2 += f * (z_abs(rel, beta, n - m, 0.0) + std::fabs(beta * m - su) * wu);
        }
        worst[2] = std::max(worst[2], std::fabs(z - acc) / s2);
    }
    const double secs = seconds_since(t0);
    const bool ok = worst[0] <= 1e-10 && worst[1] <= 1e-10 && worst[2] <= 1e-10 && secs < 30;
    return {ok, fmt("max relative error shift %.2e, recursion %.2e, decomposition %.2e over %d realizations; "
                    "%.1f s (limit 30 s)",
                    worst[0], worst[1], worst[2], trials, secs)};
}

Outcome criterion3()
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t R = g.quick ? 5000 : 100000;
    int cells = 0, good = 0;
    CsvBuilder out({"beta", "n", "EW2", "EW2_se", "EW2_exact", "EZ2", "EZ2_se", "EZ2_exact", "pass"});
    int bi = 0;
    for (double beta : {0.3, 0.5, 0.7}) {
        std::vector<int> hs;
        for (int n = 1; n < 12; ++n)
            hs.push_back(n);
        const std::string name = "c3_beta" + std::to_string(bi++);
        run(name, "simulate",
            {{"beta", beta}, {"n", 12}, {"horizons", hs}, {"replicates", R}, {"seed", 3000 + bi}});
        const SampleSet s = read_samples_csv(g.root / name / "samples.csv", beta);
        for (int n = 1; n <= 12; ++n) {
            auto sq = [](std::span<const double> v) {
                std::vector<double> o(v.size());
                for (std::size_t i = 0; i < v.size(); ++i)
                    o[i] = v[i] * v[i];
                return mean_se(o);
            };
            const MeanSe w2 = sq(s.W_at(n)), z2 = sq(s.Z_at(n));
            const double ew = exact_second_moment_W(beta, n), ez = exact_second_moment_Z(beta, n);
            const bool pass = std::fabs(w2.mean - ew) <= 3 * w2.se && std::fabs(z2.mean - ez) <= 3 * z2.se;
            ++cells;
            good += pass;
            out.cell(beta).cell(n).cell(w2.mean).cell(w2.se).cell(ew).cell(z2.mean).cell(z2.se).cell(ez).cell(pass)
                .end_row();
        }
    }
    write_file_atomic(g.root / "c3_second_moments.csv", out.str());
    const double secs = seconds_since(t0);
    return {good * 100 >= 95 * cells && secs < 300,
            fmt("%d/%d cells with E[W^2] and E[Z^2] within 3 SE (need >= 95%%); R = %llu; %.1f s (limit 300 s)", good,
                cells, static_cast<unsigned long long>(R), secs)};
}

Outcome criterion4()
{
    const auto t0 = std::chrono::steady_clock::now();
    const double bc = critical_beta();
    const std::vector<double> as{0.0, 0.3 * bc, 0.5 * bc};
    run("c4_biggins", "biggins", {{"a", as}, {"n", g.quick ? 16 : 22}, {"replicates", 50}, {"seed", 4004}});
    const CsvTable t = table("c4_biggins", "biggins.csv");
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double est = num(t, i, "estimate"), lim = num(t, i, "limit");
        const bool pass = std::fabs(est - lim) <= 0.05;
        ok = ok && pass;
        detail += fmt("a=%.4f: %.4f vs %.4f (|d|=%.4f %s); ", num(t, i, "a"), est, lim, std::fabs(est - lim),
                      pass ? "ok" : "> 0.05");
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 120, detail + fmt("%.1f s (limit 120 s)", secs)};
}

// Shared beta = 1 campaign for criteria 5, 7 and 10.
std::string g_campaign;
double g_campaign_seconds = 0.0;

void ensure_campaign()
{
    if (!g_campaign.empty())
        return;
    const auto t0 = std::chrono::steady_clock::now();
    g_campaign = "beta1_campaign";
    const int N = g.quick ? 12 : 16;
    const std::vector<int> hs = g.quick ? std::vector<int>{4, 6, 8, 10} : std::vector<int>{4, 6, 8, 10, 12, 14};
    run(g_campaign, "simulate",
        {{"beta", 1.0}, {"n", N}, {"horizons", hs}, {"replicates", g.quick ? 20000 : 1000000}, {"seed", 5005}});
    g_campaign_seconds = seconds_since(t0);
}

std::string samples_path()
{
    return (g.root / g_campaign / "samples.csv").string();
}

Outcome criterion5()
{
    ensure_campaign();
    const auto t0 = std::chrono::steady_clock::now();
    const double gamma = derive_params(1.0).gamma;
    const int N0 = g.quick ? 10 : 14, N1 = N0 + 2;
    const Json grid{{"p_hi", 1e-2}, {"p_lo", g.quick ? 1e-3 : 1e-4}, {"points", 60}};
    const Json fit{{"model", "power-law-with-log"},
                   {"p_min", std::pow(10.0, -4.5)},
                   {"p_max", 1e-2},
                   {"min_hits", g.quick ? 20 : 100}};
    double slope[2];
    for (int i = 0; i < 2; ++i) {
        const int N = i == 0 ? N0 : N1;
        const std::string name = "c5_tail_N" + std::to_string(N);
        run(name, "tail",
            {{"beta", 1.0}, {"samples", samples_path()}, {"statistic", "D"}, {"horizon", N}, {"grid", grid},
             {"fit", fit}});
        slope[i] = json_file(name, "fit.json")["slope"].get<double>();
    }
    const double secs = seconds_since(t0) + g_campaign_seconds;
    const bool in_band = std::fabs(slope[0] - gamma) <= 0.2;
    const bool stable = std::fabs(slope[1] - slope[0]) < 0.1;
    return {in_band && stable && secs <= 1800,
            fmt("slope %.4f at N=%d (target %.4f +- 0.2), %.4f at N=%d (shift %.4f, limit 0.1); "
                "%.0f s incl. shared campaign",
                slope[0], N0, gamma, slope[1], N1, slope[1] - slope[0], secs)};
}

Outcome criterion6()
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int> ns = g.quick ? std::vector<int>{4, 5, 6, 7} : std::vector<int>{6, 8, 10, 12};
    run("c6_is", "is-lb",
        {{"beta", 1.0}, {"n", ns}, {"m", g.quick ? 4 : 8}, {"replicates", g.quick ? 100 : 1000}, {"seed", 6006}});
    const CsvTable t = table("c6_is", "is_lb.csv");
    bool freq_ok = true;
    std::string detail = "frequencies";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double f = num(t, i, "frequency");
        freq_ok = freq_ok && f > 0.5;
        detail += fmt(" n=%d:%.3f", static_cast<int>(num(t, i, "n")), f);
    }
    const Json fit = json_file("c6_is", "is_fit.json");
    const double r2 = fit["r2"].get<double>();
    const double secs = seconds_since(t0);
    return {freq_ok && r2 >= 0.999 && secs < 600,
            detail + fmt(" (need > 0.5); -log lower bound vs 2^n: R^2 = %.6f (need >= 0.999), slope %.4f; %.1f s "
                         "(limit 600 s)",
                         r2, fit["slope"].get<double>(), secs)};
}

Outcome criterion7()
{
    ensure_campaign();
    const auto t0 = std::chrono::steady_clock::now();
    const int N = g.quick ? 10 : 14;
    run("c7_moments", "moments", {{"beta", 1.0}, {"samples", samples_path()}, {"horizon", N}, {"k_max", 6}});
    const Json j = json_file("c7_moments", "moments.json");
    const double c5 = j["C2_by_k_max"]["5"].get<double>(), c6 = j["C2_by_k_max"]["6"].get<double>();
    const double change = std::fabs(c6 / c5 - 1);
    const CsvTable tk = table("c7_moments", "tk.csv");
    bool tk_ok = true;
    std::string worst;
    for (std::size_t i = 0; i < tk.rows.size(); ++i) {
        const int k = static_cast<int>(num(tk, i, "k"));
        if (k < 2)
            continue;
        const double r = num(tk, i, "residual"), se = num(tk, i, "se");
        const bool ok = r <= 3 * se;
        tk_ok = tk_ok && ok;
        worst += fmt(" k=%d:%.3g(se %.2g)", k, r, se);
    }
    const double secs = seconds_since(t0);
    return {change <= 0.25 && tk_ok,
            fmt("C2(kmax=5) = %.4f, C2(kmax=6) = %.4f, change %.1f%% (limit 25%%); t(k) residuals", c5, c6,
                100 * change) +
                worst + fmt(" (need <= 3 se); %.0f s plus shared campaign", secs)};
}

Outcome criterion8()
{
    const auto t0 = std::chrono::steady_clock::now();
    const int density = 1000;
    // 10 inclusion cases: (beta, Delta, epsilon, n, k, ell, a).
    struct Inc {
        double beta, Delta, eps;
        int n, k, ell;
        double a;
    };
    const Inc inc[] = {
        {1.0, 0.4, 0.001, 100, 1, 6, 0.4045},  {1.0, 0.4, 0.001, 100, 10, 3, 0.55},
        {1.0, 0.4, 0.001, 100, 20, 1, 0.69},   {1.0, 0.4, 0.001, 200, 10, 5, 0.4435},
        {0.9, 0.4, 0.001, 200, 10, 5, 0.6},    {1.0, 0.4, 0.001, 200, 50, 12, 0.65},
        {1.0, 0.3, 0.0005, 500, 5, 20, 0.4},   {1.0, 0.4, 0.001, 500, 100, 1, 0.6},
        {1.0, 0.4, 0.001, 500, 140, 10, 0.68}, {1.0, 0.4, 0.001, 500, 31, 1, 0.5},
    };
    Json inc_cases = Json::array();
    for (const Inc& c : inc)
        inc_cases.push_back({{"beta", c.beta}, {"Delta", c.Delta}, {"epsilon", c.eps}, {"n", c.n}, {"k", c.k},
                             {"ell", c.ell}, {"a", c.a}});
    // 10 disjointness cases: (beta, theta, delta, n, k, j) with b = Phi(beta - theta + delta) + j epsilon.
    struct Dis {
        double beta, theta, delta;
        int n, k;
        double j;
    };
    const Dis dis[] = {
        {1.0, 0.2, 0.1, 100, 1, 0},      {1.0, 0.2, 0.1, 100, 20, 1000},   {1.0, 0.2, 0.1, 100, 40, 100000},
        {1.0, 0.2, 0.1, 200, 10, 0},     {1.0, 0.2, 0.1, 200, 80, 500000}, {1.0, 0.2, 0.1, 500, 20, 0},
        {1.0, 0.2, 0.1, 500, 100, 7},    {1.0, 0.2, 0.1, 500, 202, 0},     {1.0, 0.3, 0.15, 200, 50, 20000},
        {0.8, 0.3, 0.12, 500, 100, 0},
    };
    Json dis_cases = Json::array();
    for (const Dis& c : dis) {
        const double eps = std::pow(c.delta / 4, 4);
        const double bt = c.beta - c.theta + c.delta;
        dis_cases.push_back({{"beta", c.beta}, {"theta", c.theta}, {"delta", c.delta}, {"epsilon", eps},
                             {"n", c.n}, {"k", c.k}, {"b", kLn2 - bt * bt / 2 + c.j * eps}});
    }
    run("c8_inclusion", "ldp-check", {{"check", "inclusion43"}, {"density", density}, {"cases", inc_cases}});
    run("c8_disjoint", "ldp-check", {{"check", "disjoint44"}, {"density", density}, {"cases", dis_cases}});
    int holds = 0;
    double min_margin = INFINITY;
    for (const char* name : {"c8_inclusion", "c8_disjoint"}) {
        const Json report = json_file(name, "check.json");
        for (const Json& r : report["results"]) {
            const bool ok = r["holds"].get<bool>() && !r["margin"].is_null() && r["margin"].get<double>() > 0;
            holds += ok;
            if (!r["margin"].is_null())
                min_margin = std::min(min_margin, r["margin"].get<double>());
        }
    }

    // Each precondition violated on purpose; the reported constraint must match.
    Inclusion43 ib{1.0, 0.4, 0.001, 2 * std::sqrt(0.001), 200, 10, 5, 0.5};
    auto inc_with = [&](auto&& edit) {
        Inclusion43 p = ib;
        edit(p);
        return p;
    };
    std::vector<std::pair<std::string, Inclusion43>> inc_bad{
        {"n_range", inc_with([](Inclusion43& p) { p.n = 0; })},
        {"epsilon_range", inc_with([](Inclusion43& p) { p.epsilon = 0.2, p.delta = 2 * std::sqrt(0.2); })},
        {"delta_two_sqrt_epsilon", inc_with([](Inclusion43& p) { p.delta = 0.06; })},
        {"delta_below_half_beta", inc_with([](Inclusion43& p) { p.beta = 0.1; })},
        {"three_beta_delta", inc_with([](Inclusion43& p) { p.epsilon = 0.002, p.delta = 2 * std::sqrt(0.002); })},
        {"three_delta_over_beta", inc_with([](Inclusion43& p) { p.beta = 0.5; })},
        {"k_range", inc_with([](Inclusion43& p) { p.k = 0; })},
        {"ell_range", inc_with([](Inclusion43& p) { p.ell = 0; })},
        {"ell_plus_k", inc_with([](Inclusion43& p) { p.k = 5; })},
        {"a_lattice", inc_with([](Inclusion43& p) { p.a = 0.50025; })},
        {"a_range", inc_with([](Inclusion43& p) { p.a = 0.44; })},
    };
    const double b0 = kLn2 - 0.9 * 0.9 / 2;
    const double e0 = std::pow(0.1 / 4, 4);
    Disjoint44 db{1.0, 0.2, e0, 0.1, 500, 20, b0};
    auto dis_with = [&](auto&& edit) {
        Disjoint44 p = db;
        edit(p);
        return p;
    };
    std::vector<std::pair<std::string, Disjoint44>> dis_bad{
        {"n_range", dis_with([](Disjoint44& p) { p.n = 0; })},
        {"theta_range", dis_with([](Disjoint44& p) { p.theta = 0.6; })},
        {"epsilon_range", dis_with([](Disjoint44& p) { p.epsilon = 0; })},
        {"delta_below_theta", dis_with([](Disjoint44& p) { p.delta = 0.2; })},
        {"delta_quartic_root", dis_with([](Disjoint44& p) { p.epsilon = 1e-4; })},
        {"phi_margin", dis_with([](Disjoint44& p) { p.beta = 1.15; })},
        {"k_range", dis_with([](Disjoint44& p) { p.k = 300; })},
        {"b_lattice", dis_with([&](Disjoint44& p) { p.b = b0 + 0.5 * e0; })},
        {"b_range", dis_with([&](Disjoint44& p) { p.b = b0 + e0 * std::ceil(0.41 / e0); })},
    };
    int rejected = 0, attempts = 0;
    std::string misses;
    auto expect = [&](const std::string& want, auto&& fn) {
        ++attempts;
        try {
            fn();
            misses += " " + want + "(accepted)";
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::PreconditionViolated && e.subject() == want)
                ++rejected;
            else
                misses += " " + want + "(got " + e.subject() + ")";
        }
    };
    for (const auto& [name, p] : inc_bad)
        expect(name, [&] { check_inclusion_43(p, 50); });
    for (const auto& [name, p] : dis_bad)
        expect(name, [&] { check_disjoint_44(p, 50); });
    const double secs = seconds_since(t0);
    return {holds == 20 && rejected == attempts && secs < 120,
            fmt("%d/20 sweep cases true with positive margin (min margin %.4g) on %dx%d grids; %d/%d violated "
                "preconditions rejected by name",
                holds, min_margin, density, density, rejected, attempts) +
                misses + fmt("; %.1f s (limit 120 s)", secs)};
}

Outcome criterion9()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(9009);
    std::uniform_real_distribution<double> U(0.05, 1.0);
    const std::uint64_t ells[] = {1, 2, 5, 10};
    const double alphas[] = {1.2, 1.5, std::exp(1.0) - 1};
    const double hs[] = {0.1, 0.5, 1.0};
    const double lambda_grid[] = {2.0, 1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 1e-4};
    Json specs = Json::array();
    for (int i = 0; i < 20; ++i) {
        const int n = 3 + i % 6;
        const double alpha = alphas[i % 3];
        std::vector<OffspringLaw> laws;
        Json jl = Json::array();
        for (int gen = 0; gen < n; ++gen) {
            // Random support inside {0,1,2,3} with at least one positive value.
            OffspringLaw law;
            double total = 0.0;
            for (int v = 0; v <= 3; ++v) {
                if (rng() % 3 == 0 && !(v == 3 && law.pmf.empty()))
                    continue;
                const double w = U(rng);
                law.pmf.emplace_back(v, w);
                total += w;
            }
            if (law.pmf.size() == 1 && law.pmf[0].first == 0)
                law.pmf.emplace_back(2, total), total *= 2;
            Json atoms = Json::array();
            for (auto& [v, p] : law.pmf) {
                p /= total;
                atoms.push_back({v, p});
            }
            laws.push_back(law);
            jl.push_back(atoms);
        }
        double lambda = 0.0;
        for (double l : lambda_grid) {
            bool ok = true;
            for (const OffspringLaw& law : laws)
                ok = ok && law.mgf(l) <= std::exp(alpha * l * law.mean()) * (1 - 1e-12);
            if (ok) {
                lambda = l;
                break;
            }
        }
        specs.push_back({{"n", n}, {"ell", ells[i % 4]}, {"alpha", alpha}, {"h", hs[(i / 3) % 3]}, {"lambda", lambda},
                         {"laws", jl}});
    }
    run("c9_igw_bounds", "igw", {{"cap", 100000}, {"specs", specs}});
    run("c9_igw_reference", "igw",
        {{"cap", 1000}, {"n", 6}, {"ell", 1}, {"alpha", 1.5}, {"h", 1.0}, {"lambda", 0.05},
         {"law", Json::array({Json::array({0, 0.4}), Json::array({2, 0.6})})},
         {"simulate", g.quick ? 100000 : 1000000}, {"seed", 9010}});
    const CsvTable b = table("c9_igw_bounds", "igw_bounds.csv");
    int holds = 0, exact = 0;
    for (std::size_t i = 0; i < b.rows.size(); ++i) {
        holds += num(b, i, "lhs") <= num(b, i, "rhs");
        exact += num(b, i, "lhs_exact") == 1;
    }
    const double tv = num(table("c9_igw_reference", "igw_bounds.csv"), 0, "tv");
    const double secs = seconds_since(t0);
    return {holds == 20 && tv <= 0.005 && secs < 120,
            fmt("LHS <= RHS in %d/20 specs (%d with exact LHS); reference TV %.5f (limit 0.005); %.1f s (limit 120 s)",
                holds, exact, tv, secs)};
}

Outcome criterion10()
{
    ensure_campaign();
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int> ns = g.quick ? std::vector<int>{4, 6, 8, 10, 12} : std::vector<int>{4, 6, 8, 10, 12};
    const double Delta = 0.05, theta = 0.2;
    run("c10_scan_low", "scan",
        {{"beta", 1.0}, {"samples", samples_path()}, {"event", "low"}, {"parameter", Delta}, {"n", ns},
         {"compare", {6, 12}}});
    run("c10_scan_high", "scan",
        {{"beta", 1.0}, {"samples", samples_path()}, {"event", "high"}, {"parameter", theta}, {"n", ns},
         {"compare", {6, 12}}});
    const double p_low = json_file("c10_scan_low", "scan.json")["compare"]["p_value"].get<double>();
    const double p_high = json_file("c10_scan_high", "scan.json")["compare"]["p_value"].get<double>();

    // Impossibility flag against the arithmetic n e^{n Delta} > e^{n beta^2 / 2} / (beta e).
    const CsvTable t = table("c10_scan_low", "scan.csv");
    bool flags_ok = true;
    std::string flagged;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const int n = static_cast<int>(num(t, i, "n"));
        const bool must = n * std::exp(n * Delta) > std::exp(n * 0.5) / std::exp(1.0);
        const bool flag = num(t, i, "impossible") == 1;
        flags_ok = flags_ok && flag == must && (!flag || num(t, i, "hits") == 0);
        if (flag)
            flagged += " " + std::to_string(n);
    }
    const CsvTable th = table("c10_scan_high", "scan.csv");
    auto freq = [](const CsvTable& tb, int n) {
        for (std::size_t i = 0; i < tb.rows.size(); ++i)
            if (static_cast<int>(num(tb, i, "n")) == n)
                return num(tb, i, "frequency");
        return std::nan("");
    };
    const double secs = seconds_since(t0);
    return {p_low < 0.01 && p_high < 0.01 && flags_ok && secs < 600,
            fmt("low event (Delta=0.05): freq n=6 %.3g, n=12 %.3g, p=%.3g; high event (theta=0.2): freq n=6 %.4f, "
                "n=12 %.4f, p=%.3g (need p < 0.01 for both); impossibility flags at n =",
                freq(t, 6), freq(t, 12), p_low, freq(th, 6), freq(th, 12), p_high) +
                flagged + (flags_ok ? " match the arithmetic" : " DO NOT match the arithmetic") +
                fmt("; %.1f s plus shared campaign", secs)};
}

Outcome criterion11()
{
    const auto t0 = std::chrono::steady_clock::now();
    int same = 0, total = 0;
    std::string diffs;
    for (const auto& [name, manifest] : g_runs) {
        JobOptions o;
        o.threads = 1;
        o.out_dir = g.root / (name + "_threads1");
        const Json again = rerun_manifest(manifest, o);
        bool eq = again["outputs"] == manifest["outputs"];
        for (const Json& f : manifest["outputs"]) {
            const std::string file = f.get<std::string>();
            eq = eq && read_file(g.root / name / file) == read_file(o.out_dir / file);
        }
        ++total;
        same += eq;
        if (!eq)
            diffs += " " + name;
    }
    const double secs = seconds_since(t0);
    return {total > 0 && same == total,
            fmt("%d/%d job manifests rerun with --threads 1 reproduce the --threads %d tables byte for byte", same,
                total, g.threads) +
                (diffs.empty() ? "" : "; differing:" + diffs) + fmt("; %.0f s", secs)};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance criteria 1-11"};
    std::string out_dir = "acceptance_runs";
    std::vector<int> only;
    app.add_option("--out-dir", out_dir, "Directory for job outputs");
    app.add_option("--threads", g.threads, "Threads for the first run of every job");
    app.add_flag("--quick", g.quick, "Small campaigns for development");
    app.add_option("--only", only, "Criteria to run")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    g.root = out_dir;
    fs::create_directories(g.root);

    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7, criterion8,
                                                         criterion9, criterion10, criterion11};
    int failed = 0;
    Json summary = Json::array();
    for (int i = 1; i <= 11; ++i) {
        if (!only.empty() && std::find(only.begin(), only.end(), i) == only.end())
            continue;
        Outcome o;
        try {
            o = criteria[i - 1]();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << "CRITERION " << i << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
        summary.push_back({{"criterion", i}, {"pass", o.pass}, {"detail", o.detail}});
    }
    write_file_atomic(g.root / "acceptance.json", summary.dump(2) + "\n");
    if (g.quick)
        std::cout << "(quick mode: reduced campaigns, verdicts are not meaningful)" << std::endl;
    return failed ? 1 : 0;
}
