#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "doctest.h"

#include "brw/engine.hpp"
#include "brw/error.hpp"
#include "brw/estimators.hpp"
#include "brw/io.hpp"
#include "brw/martingales.hpp"
#include "brw/stats.hpp"

using namespace brw;

namespace {

ErrorKind kind_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::IoError;
}

TailCurve exact_curve(const std::vector<double>& ys, auto&& survival)
{
    TailCurve c;
    for (double y : ys) {
        TailRow r;
        r.y = y;
        r.estimate = survival(y);
        r.hits = 1000000;
        r.effective = 1000000;
        c.rows.push_back(r);
    }
    return c;
}

} // namespace

// ---------------------------------------------------------------------------
// stats

TEST_CASE("wilson intervals")
{
    const Interval a = wilson_interval(7, 50);
    CHECK(a.lo == doctest::Approx(0.06950833427016288).epsilon(1e-12));
    CHECK(a.hi == doctest::Approx(0.26186193710585537).epsilon(1e-12));
    const Interval b = wilson_interval(0, 100);
    CHECK(b.lo == 0.0);
    CHECK(b.hi == doctest::Approx(0.03699349820698569).epsilon(1e-12));
    CHECK(wilson_interval(100, 100).hi == 1.0);
}

TEST_CASE("OLS with HC1 errors")
{
    const std::vector<double> x{0.5, 1.0, 1.7, 2.2, 3.1, 3.9, 4.4, 5.0};
    const std::vector<double> y{1.2, 1.9, 3.3, 3.9, 6.4, 7.5, 8.1, 10.6};
    const LinearFit f = ols_fit(x, y);
    CHECK(f.intercept == doctest::Approx(-0.08858971).epsilon(1e-7));
    CHECK(f.slope == doctest::Approx(2.00039989).epsilon(1e-8));
    CHECK(f.intercept_se == doctest::Approx(0.2564372).epsilon(1e-6));
    CHECK(f.slope_se == doctest::Approx(0.12356638).epsilon(1e-7));
    CHECK(f.r2 == doctest::Approx(0.9838913589853034).epsilon(1e-12));

    const std::vector<double> line{1, 3, 5, 7};
    const std::vector<double> xs{0, 1, 2, 3};
    const LinearFit g = ols_fit(xs, line);
    CHECK(g.slope == 2.0);
    CHECK(g.intercept == 1.0);
    CHECK(g.slope_se == 0.0);
    CHECK(kind_of([&] { ols_fit(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}); }) ==
          ErrorKind::EmptyWindow);
}

TEST_CASE("binomial tail and decay test")
{
    CHECK(binomial_cdf(3, 20, 0.3) == doctest::Approx(0.10708680450373087).epsilon(1e-12));
    CHECK(binomial_cdf(480, 1000, 0.5) == doctest::Approx(0.10872414660207055).epsilon(1e-10));
    CHECK(binomial_cdf(5, 5, 0.3) == 1.0);
    CHECK(decay_test_pvalue(0, 100, 0, 100) == 1.0);
    CHECK(decay_test_pvalue(3, 20, 17, 20) > 0.99);
    CHECK(decay_test_pvalue(60, 1000000, 20, 1000000) < 1e-5);
}

// ---------------------------------------------------------------------------
// campaigns

TEST_CASE("single-replicate campaign equals a direct engine call")
{
    CampaignConfig c;
    c.beta = 0.8;
    c.horizons = {3, 7};
    c.seed = 42;
    const SampleSet s = run_campaign(c);
    SimSpec spec;
    spec.params = derive_params(0.8);
    spec.n = 7;
    spec.seed = 42;
    const auto gens = run_bfs(spec);
    CHECK(s.W_at(7)[0] == additive_W(gens[7].positions, 0.8, 7));
    CHECK(s.Z_at(7)[0] == derivative_Z(gens[7].positions, 0.8, 7));
    CHECK(s.W_at(3)[0] == additive_W(gens[3].positions, 0.8, 3));
    CHECK(kind_of([&] { s.W_at(5); }) == ErrorKind::ConfigError);
}

TEST_CASE("campaigns are deterministic and thread-count independent")
{
    CampaignConfig c;
    c.horizons = {4, 8};
    c.replicates = 300;
    c.seed = 9;
    const std::string a = samples_csv(run_campaign(c));
    CHECK(samples_csv(run_campaign(c)) == a);
    c.threads = 4;
    CHECK(samples_csv(run_campaign(c)) == a);
    c.seed = 10;
    CHECK(samples_csv(run_campaign(c)) != a);
}

TEST_CASE("sample files round-trip")
{
    CampaignConfig c;
    c.beta = 0.6;
    c.x = 0.5;
    c.horizons = {2, 5, 9};
    c.replicates = 50;
    c.seed = 3;
    const SampleSet s = run_campaign(c);
    const auto path = std::filesystem::temp_directory_path() / "brw_samples_roundtrip.csv";
    write_file_atomic(path, samples_csv(s));
    const SampleSet t = read_samples_csv(path, 0.6);
    std::filesystem::remove(path);
    CHECK(t.horizons == s.horizons);
    CHECK(t.x == 0.5);
    CHECK(t.seed == 3);
    CHECK(t.W == s.W);
    CHECK(t.Z == s.Z);
    const auto zs = statistic_values(t, Statistic::ZShifted, 9);
    CHECK(zs[4] == doctest::Approx(std::exp(0.3) * (s.Z[2][4] - 0.5 * s.W[2][4])));
}

TEST_CASE("martingale mean over a campaign")
{
    CampaignConfig c;
    c.horizons = {12};
    c.replicates = 10000;
    c.seed = 77;
    const SampleSet s = run_campaign(c);
    const MeanSe w = mean_se(s.W_at(12));
    CHECK(std::fabs(w.mean - 1.0) <= 3 * w.se);
}

// ---------------------------------------------------------------------------
// tails and fits

TEST_CASE("tail curve basics")
{
    const std::vector<double> five(10, 5.0);
    const std::vector<double> y4{4.0};
    CHECK(tail_curve(five, y4).rows[0].estimate == 1.0);

    const std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8};
    const std::vector<double> grid{0.5, 2.5, 7.5, 100.0};
    const TailCurve c = tail_curve(s, grid);
    CHECK(c.rows[0].estimate == 1.0);
    CHECK(c.rows[1].estimate == 0.75);
    CHECK(c.rows[2].hits == 1);
    CHECK(c.rows[3].estimate == 0.0);
    for (const auto& r : c.rows) {
        CHECK(r.lo >= 0.0);
        CHECK(r.hi <= 1.0);
        CHECK(r.lo <= r.estimate);
        CHECK(r.estimate <= r.hi);
    }
    const std::vector<double> far{100.0};
    CHECK(kind_of([&] { tail_curve(s, far); }) == ErrorKind::EmptyWindow);
}

TEST_CASE("tail curve is the empirical survival function")
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    std::vector<double> s(5000);
    for (double& v : s)
        v = nd(rng);
    std::vector<double> grid;
    for (int i = -30; i <= 30; ++i)
        grid.push_back(0.1 * i);
    const TailCurve c = tail_curve(s, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto cnt = std::count_if(s.begin(), s.end(), [&](double v) { return v > grid[i]; });
        CHECK(c.rows[i].hits == static_cast<std::uint64_t>(cnt));
        if (i > 0)
            CHECK(c.rows[i].estimate <= c.rows[i - 1].estimate);
    }
}

TEST_CASE("exact synthetic curves recover their slopes")
{
    std::vector<double> ys;
    for (int i = 0; i < 30; ++i)
        ys.push_back(3.0 * std::pow(1.15, i));
    const double g = 1.3862944;
    const TailCurve a = exact_curve(ys, [&](double y) { return std::pow(std::log(y) / y, g); });
    const ExponentFit fa = fit_exponent(a, FitModel::PowerLawLog, FitWindow{});
    CHECK(fa.ols.slope == doctest::Approx(g).epsilon(1e-6));

    std::vector<double> ys2;
    for (int i = 1; i <= 20; ++i)
        ys2.push_back(0.1 * i);
    const TailCurve b = exact_curve(ys2, [&](double y) { return std::exp(-3 * std::pow(y, 1.5)); });
    FitWindow w;
    w.gamma = 1.5;
    const ExponentFit fb = fit_exponent(b, FitModel::Stretched, w);
    CHECK(fb.ols.slope == doctest::Approx(3.0).epsilon(1e-6));

    w.p_min = 0.5;
    CHECK(kind_of([&] { fit_exponent(b, FitModel::Stretched, w); }) == ErrorKind::EmptyWindow);
}

TEST_CASE("Pareto samples give power-law slope -2")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> s(1000000);
    for (double& v : s)
        v = std::pow(1.0 - u(rng), -0.5);
    const auto grid = quantile_grid(s, 1e-1, 1e-4, 25);
    const TailCurve c = tail_curve(s, grid);
    FitWindow w;
    w.p_min = 1e-4;
    w.p_max = 1e-1;
    const ExponentFit f = fit_exponent(c, FitModel::PowerLaw, w);
    CHECK(f.ols.slope == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(f.rows.size() >= 5);
    CHECK(fit_plot_data(c, f, 1.0).rfind("# regressor response fit\n", 0) == 0);
}

// ---------------------------------------------------------------------------
// importance sampling

TEST_CASE("IS log weight")
{
    ISConfig c;
    c.n = 1;
    c.m = 0;
    c.replicates = 4;
    c.y = {0.0};
    CHECK(is_lower_bound(c).log_weight == doctest::Approx(-3.3063).epsilon(1e-4));
    for (double beta : {0.5, 1.0}) {
        const ModelParams p = derive_params(beta);
        for (int n : {1, 3, 8, 12}) {
            double direct = 0.0;
            for (int k = 0; k < n; ++k) {
                const Band b = band(k, p);
                direct += std::ldexp(1.0, n - k) * std::log(norm_mass(b.lo, b.hi));
            }
            const double lw = BandSchedule(p, n).log_weight();
            CHECK(std::fabs(lw - direct) <= 1e-12 * std::fabs(direct));
        }
    }
}

TEST_CASE("IS rows are bounded and the lower bound sits under naive MC")
{
    ISConfig c;
    c.beta = 1.0;
    c.n = 4;
    c.m = 6;
    c.replicates = 2000;
    c.seed = 12;
    c.y = {0.5, 1.0, 2.0};
    const ISResult r = is_lower_bound(c);
    for (const auto& row : r.rows) {
        CHECK(row.frequency >= 0.0);
        CHECK(row.frequency <= 1.0);
        CHECK(row.log_lower_bound <= 0.0);
    }
    CampaignConfig naive;
    naive.horizons = {10};
    naive.replicates = 1000000;
    naive.seed = 13;
    const auto z = run_campaign(naive).Z[0];
    const TailCurve t = tail_curve(z, c.y);
    for (std::size_t i = 0; i < c.y.size(); ++i) {
        const double p = t.rows[i].estimate;
        const double sigma = std::sqrt(p * (1 - p) / 1e6);
        CHECK(p >= std::exp(r.rows[i].log_lower_bound) - 3 * sigma);
    }
}

// ---------------------------------------------------------------------------
// moments

TEST_CASE("moment table basics")
{
    const std::vector<double> W(100, 1.0), Z(100, 0.0);
    const std::vector<double> x0{0.0};
    const MomentTable zero = moment_table(moment_input(W, Z, 1.0, x0), 4);
    for (const auto& r : zero.rows)
        CHECK(r.moment == 0.0);

    CampaignConfig c;
    c.horizons = {8};
    c.replicates = 2000;
    c.seed = 5;
    const SampleSet s = run_campaign(c);
    const std::vector<double> grid{-2, -1, 0, 1, 2};
    const MomentTable t = moment_table(moment_input(s.W[0], s.Z[0], 1.0, grid), 6);
    CHECK(t.rows[0].t == t.rows[0].moment);
    for (const auto& r : t.rows) {
        CHECK(r.t >= 0.0);
        for (std::size_t xi = 0; xi < grid.size(); ++xi)
            CHECK(t.by_x[xi][r.k - 1] <= r.moment);
    }
}

TEST_CASE("induction constant")
{
    CHECK(induction_constant(4) == doctest::Approx(41.0 / 9.0).epsilon(1e-15));
    CHECK(induction_constant(3) < 41.0 / 9.0);
    CHECK(induction_constant(10000) == doctest::Approx(41.0 / 9.0).epsilon(1e-15));
}

TEST_CASE("t(k) residuals on synthetic input")
{
    const double tau = 0.7, q = 0.8;
    const std::vector<double> t{tau, 0, 0, 0};
    const auto r = tk_residuals(t, q);
    CHECK(r[0] == doctest::Approx(tau * (1 - 2 * q)));
    CHECK(r[1] == doctest::Approx(-tau * tau));
    CHECK(r[2] == 0.0);
    CHECK(fit_C3(t) == doctest::Approx(2 * kInductionA * tau));
}

TEST_CASE("tk diagnostics jackknife agrees with the plain residuals")
{
    CampaignConfig c;
    c.horizons = {8};
    c.replicates = 3000;
    c.seed = 6;
    const SampleSet s = run_campaign(c);
    const std::vector<double> grid{-1, 0, 1};
    const MomentInput in = moment_input(s.W[0], s.Z[0], 1.0, grid);
    const MomentTable t = moment_table(in, 5);
    std::vector<double> tv;
    for (const auto& r : t.rows)
        tv.push_back(r.t);
    const auto plain = tk_residuals(tv, derive_params(1.0).q);
    const TkReport rep = tk_diagnostics(in, 5);
    for (int k = 0; k < 5; ++k) {
        CHECK(rep.rows[k].residual == doctest::Approx(plain[k]).epsilon(1e-12));
        CHECK(rep.rows[k].se > 0.0);
    }
    // At k = 1 the residual is (1 - 2q) t(1), so its jackknife error is
    // |1 - 2q| times that of the first moment.
    CHECK(rep.rows[0].se == doctest::Approx(std::fabs(1 - 2 * derive_params(1.0).q) * t.rows[0].se).epsilon(1e-3));
    CHECK(rep.C3 == doctest::Approx(fit_C3(tv)));
}

TEST_CASE("sub-exponential constants")
{
    const std::vector<double> ones(1000, 1.0);
    const std::vector<double> tg{0.5};
    const SubexpConstants a = subexp_constants(ones, tg, 6);
    CHECK(a.K2 == 1.0);
    CHECK(std::isinf(a.K1));

    std::mt19937_64 rng(8);
    std::exponential_distribution<double> ex(1.0);
    std::vector<double> s(1000000);
    for (double& v : s)
        v = ex(rng);
    const std::vector<double> grid{1, 2, 4, 6, 8};
    const SubexpConstants b = subexp_constants(s, grid, 4);
    CHECK(b.K2 == doctest::Approx(1.0).epsilon(0.01));
    CHECK(b.K1 == doctest::Approx(1.0).epsilon(0.05));
    // Stirling oracle: (k!)^{1/k} / k decreases towards 1/e.
    for (int k = 2; k <= 4; ++k) {
        const SubexpConstants only = subexp_constants(s, {}, k);
        CHECK(only.K2 == doctest::Approx(1.0).epsilon(0.01));
        double mk = 0;
        for (double v : s)
            mk += std::pow(v, k);
        mk /= s.size();
        CHECK(std::pow(mk, 1.0 / k) / k ==
              doctest::Approx(std::exp(std::lgamma(k + 1.0) / k) / k).epsilon(0.02));
    }
}

TEST_CASE("ratio exponential moments")
{
    CampaignConfig c;
    c.horizons = {8};
    c.replicates = 5000;
    c.seed = 11;
    const SampleSet s = run_campaign(c);
    const std::vector<double> K{0.0, 0.5, 1.0, 1.5, 2.0};
    const auto rows = ratio_exp_moment(s.W[0], s.Z[0], K);
    CHECK(rows[0].estimate == 1.0);
    CHECK(rows[0].se == 0.0);
    for (std::size_t i = 1; i + 1 < rows.size(); ++i)
        CHECK(rows[i].estimate <= 0.5 * (rows[i - 1].estimate + rows[i + 1].estimate) * (1 + 1e-12));
}

TEST_CASE("rare-event scan flags and regimes")
{
    CampaignConfig c;
    c.horizons = {4, 6, 8, 10, 12};
    c.replicates = 2000;
    c.seed = 14;
    const SampleSet s = run_campaign(c);
    const std::vector<int> ns{4, 6, 8, 10, 12};
    const ScanResult low = rare_event_scan(s, RareEvent::Low, 0.05, ns);
    for (const auto& r : low.rows) {
        const bool arithmetic = r.n * std::exp(0.05 * r.n) > std::exp(r.n / 2.0 - 1.0);
        CHECK(r.impossible == arithmetic);
        if (r.impossible)
            CHECK(r.hits == 0);
    }
    CHECK(low.rows[0].impossible);
    CHECK(low.rows[1].impossible);
    CHECK_FALSE(low.rows[2].impossible);

    const ScanResult high = rare_event_scan(s, RareEvent::High, 0.2, ns);
    CHECK_FALSE(high.outside_tested_regime);
    for (const auto& r : high.rows) {
        CHECK(r.hits > 0);
        CHECK(r.hits < r.replicates);
    }
    CHECK(rare_event_scan(s, RareEvent::High, 0.6, ns).outside_tested_regime);
}
