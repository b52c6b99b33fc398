/*
   Copyright 2026 The brwlab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#include "brw/estimators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <string>

#include "brw/engine.hpp"
#include "brw/error.hpp"
#include "brw/io.hpp"
#include "brw/martingales.hpp"
#include "brw/parallel.hpp"
#include "brw/summation.hpp"

namespace brw {

namespace {

constexpr std::size_t kReplicateBlock = 64;

} // namespace

std::size_t SampleSet::index_of(int n) const
{
    const auto it = std::find(horizons.begin(), horizons.end(), n);
    if (it == horizons.end())
        throw Error(ErrorKind::ConfigError, "horizon " + std::to_string(n) + " not in sample set",
                    "n");
    return static_cast<std::size_t>(it - horizons.begin());
}

SampleSet run_campaign(const CampaignConfig& config)
{
    if (config.replicates < 1)
        throw Error(ErrorKind::ConfigError, "replicates must be >= 1", "replicates");
    if (config.horizons.empty())
        throw Error(ErrorKind::ConfigError, "no horizons", "horizons");
    std::vector<int> hs = config.horizons;
    std::sort(hs.begin(), hs.end());
    hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
    if (hs.front() < 1)
        throw Error(ErrorKind::ConfigError, "horizons must be >= 1", "horizons");
    const int N = hs.back();
    check_bfs_budget(N, kDefaultBfsBudget);

    SampleSet s;
    s.beta = config.beta;
    s.x = config.x;
    s.seed = config.seed;
    s.horizons = hs;
    const std::size_t R = config.replicates;
    s.W.assign(hs.size(), std::vector<double>(R));
    s.Z.assign(hs.size(), std::vector<double>(R));

    SimSpec base;
    base.params = derive_params(config.beta);
    base.n = N;
    base.seed = config.seed;

    std::vector<int> slot(N + 1, -1);
    for (std::size_t i = 0; i < hs.size(); ++i)
        slot[hs[i]] = static_cast<int>(i);

    const std::size_t blocks = (R + kReplicateBlock - 1) / kReplicateBlock;
    parallel_for(blocks, config.threads, [&](std::size_t b) {
        GenerationSweep sweep;
        const std::size_t end = std::min(R, (b + 1) * kReplicateBlock);
        for (std::size_t r = b * kReplicateBlock; r < end; ++r) {
            SimSpec spec = base;
            spec.replicate = r;
            sweep.run(spec, N, [&](int g, std::span<const double> pos) {
                if (slot[g] < 0)
                    return;
                MartingaleFold f(config.beta, g);
                f.add(pos);
                s.W[slot[g]][r] = f.W();
                s.Z[slot[g]][r] = f.Z();
            });
        }
    });
    return s;
}

std::string samples_csv(const SampleSet& s)
{
    std::vector<std::string> header{"replicate", "n", "x", "W", "Z", "Z_shifted", "seed"};
    const std::size_t top = s.horizons.size() - 1;
    for (std::size_t h = 0; h < top; ++h) {
        header.push_back("W_" + std::to_string(s.horizons[h]));
        header.push_back("Z_" + std::to_string(s.horizons[h]));
    }
    CsvBuilder csv(header);
    const double ebx = std::exp(s.beta * s.x);
    for (std::uint64_t r = 0; r < s.replicates(); ++r) {
        const double w = s.W[top][r], z = s.Z[top][r];
        csv.cell(static_cast<unsigned long long>(r))
            .cell(s.horizon())
            .cell(s.x)
            .cell(w)
            .cell(z)
            .cell(s.x == 0.0 ? z : ebx * (z - s.x * w))
            .cell(static_cast<unsigned long long>(s.seed));
        for (std::size_t h = 0; h < top; ++h)
            csv.cell(s.W[h][r]).cell(s.Z[h][r]);
        csv.end_row();
    }
    return csv.str();
}

namespace {

std::vector<std::string_view> split_line(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t c = line.find(',', start);
        if (c == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, c - start));
        start = c + 1;
    }
}

} // namespace

SampleSet read_samples_csv(const std::filesystem::path& path, double beta)
{
    const std::string text = read_file(path);
    std::string_view rest(text);
    auto next_line = [&](std::string_view& line) {
        if (rest.empty())
            return false;
        const std::size_t nl = rest.find('\n');
        line = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        return true;
    };
    std::string_view line;
    if (!next_line(line))
        throw Error(ErrorKind::ConfigError, "empty sample file: " + path.string());
    const auto header = split_line(line);
    if (header.size() < 7 || header[0] != "replicate" || header[3] != "W" || header[4] != "Z" ||
        header[6] != "seed")
        throw Error(ErrorKind::ConfigError, "not a sample file: " + path.string());
    const std::size_t extra = (header.size() - 7) / 2;

    SampleSet s;
    s.beta = beta;
    for (std::size_t h = 0; h < extra; ++h)
        s.horizons.push_back(std::stoi(std::string(header[7 + 2 * h].substr(2))));
    s.W.resize(extra + 1);
    s.Z.resize(extra + 1);
    int top_n = -1;
    std::vector<std::string_view> cells;
    while (next_line(line)) {
        if (line.empty())
            continue;
        cells = split_line(line);
        if (cells.size() != header.size())
            throw Error(ErrorKind::ConfigError, "ragged row in " + path.string());
        if (top_n < 0) {
            top_n = static_cast<int>(parse_double(cells[1]));
            s.x = parse_double(cells[2]);
            std::from_chars(cells[6].data(), cells[6].data() + cells[6].size(), s.seed);
        }
        s.W[extra].push_back(parse_double(cells[3]));
        s.Z[extra].push_back(parse_double(cells[4]));
        for (std::size_t h = 0; h < extra; ++h) {
            s.W[h].push_back(parse_double(cells[7 + 2 * h]));
            s.Z[h].push_back(parse_double(cells[8 + 2 * h]));
        }
    }
    if (top_n < 0)
        throw Error(ErrorKind::ConfigError, "sample file has no rows: " + path.string());
    s.horizons.push_back(top_n);
    return s;
}

Statistic parse_statistic(std::string_view name)
{
    if (name == "W")
        return Statistic::W;
    if (name == "Z")
        return Statistic::Z;
    if (name == "D")
        return Statistic::D;
    if (name == "Z_shifted")
        return Statistic::ZShifted;
    if (name == "ratio")
        return Statistic::Ratio;
    throw Error(ErrorKind::ConfigError, "unknown statistic: " + std::string(name), "statistic");
}

const char* to_string(Statistic s)
{
    switch (s) {
    case Statistic::W: return "W";
    case Statistic::Z: return "Z";
    case Statistic::D: return "D";
    case Statistic::ZShifted: return "Z_shifted";
    case Statistic::Ratio: return "ratio";
    }
    return "?";
}

std::vector<double> statistic_values(const SampleSet& s, Statistic stat, int n)
{
    const auto W = s.W_at(n);
    const auto Z = s.Z_at(n);
    std::vector<double> v(W.size());
    const double ebx = std::exp(s.beta * s.x);
    for (std::size_t r = 0; r < v.size(); ++r) {
        switch (stat) {
        case Statistic::W: v[r] = W[r]; break;
        case Statistic::Z: v[r] = Z[r]; break;
        case Statistic::D: v[r] = -Z[r]; break;
        case Statistic::ZShifted: v[r] = ebx * (Z[r] - s.x * W[r]); break;
        case Statistic::Ratio: v[r] = Z[r] / W[r]; break;
        }
    }
    return v;
}

TailCurve tail_curve(std::span<const double> samples, std::span<const double> grid)
{
    if (samples.empty())
        throw Error(ErrorKind::EmptyWindow, "no samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const std::uint64_t R = sorted.size();
    TailCurve c;
    bool any = false;
    for (double y : grid) {
        TailRow row;
        row.y = y;
        row.hits = static_cast<std::uint64_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), y));
        row.effective = R;
        row.estimate = static_cast<double>(row.hits) / static_cast<double>(R);
        const Interval iv = wilson_interval(row.hits, R);
        row.lo = iv.lo;
        row.hi = iv.hi;
        any = any || row.hits > 0;
        c.rows.push_back(row);
    }
    if (!any)
        throw Error(ErrorKind::EmptyWindow, "no exceedances on the y grid");
    return c;
}

std::vector<double> quantile_grid(std::span<const double> samples, double p_hi, double p_lo,
                                  int points)
{
    if (samples.empty() || !(p_hi > p_lo) || !(p_lo > 0) || points < 2)
        throw Error(ErrorKind::DomainError, "quantile grid needs samples, p_hi > p_lo > 0, points >= 2");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double R = static_cast<double>(sorted.size());
    auto upper_quantile = [&](double p) {
        const auto above = static_cast<std::size_t>(std::ceil(p * R));
        const std::size_t idx = sorted.size() - std::clamp<std::size_t>(above, 1, sorted.size());
        return sorted[idx];
    };
    const double a = upper_quantile(p_hi), b = upper_quantile(p_lo);
    if (!(a > 0) || !(b > a))
        throw Error(ErrorKind::EmptyWindow, "quantiles are not positive and increasing");
    std::vector<double> g(points);
    const double la = std::log(a), lb = std::log(b);
    for (int i = 0; i < points; ++i)
        g[i] = std::exp(la + (lb - la) * i / (points - 1));
    return g;
}

std::string tail_csv(const TailCurve& c)
{
    CsvBuilder csv({"y", "estimate", "ci_lo", "ci_hi", "hits", "effective"});
    for (const auto& r : c.rows) {
        csv.cell(r.y).cell(r.estimate).cell(r.lo).cell(r.hi);
        csv.cell(static_cast<unsigned long long>(r.hits)).cell(static_cast<unsigned long long>(r.effective));
        csv.end_row();
    }
    return csv.str();
}

FitModel parse_fit_model(std::string_view name)
{
    if (name == "power-law-with-log")
        return FitModel::PowerLawLog;
    if (name == "stretched-exponential")
        return FitModel::Stretched;
    if (name == "power-law")
        return FitModel::PowerLaw;
    throw Error(ErrorKind::ConfigError, "unknown fit model: " + std::string(name), "model");
}

const char* to_string(FitModel m)
{
    switch (m) {
    case FitModel::PowerLawLog: return "power-law-with-log";
    case FitModel::Stretched: return "stretched-exponential";
    case FitModel::PowerLaw: return "power-law";
    }
    return "?";
}

double fit_regressor(FitModel m, double y, double gamma)
{
    switch (m) {
    case FitModel::PowerLawLog: return y > 1 ? std::log(std::log(y) / y) : NAN;
    case FitModel::Stretched: return y >= 0 ? std::pow(y, gamma) : NAN;
    case FitModel::PowerLaw: return y > 0 ? std::log(y) : NAN;
    }
    return NAN;
}

double fit_response(FitModel m, double p)
{
    return m == FitModel::Stretched ? -std::log(p) : std::log(p);
}

ExponentFit fit_exponent(const TailCurve& curve, FitModel model, const FitWindow& window)
{
    ExponentFit f;
    f.model = model;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < curve.rows.size(); ++i) {
        const TailRow& r = curve.rows[i];
        if (!(r.estimate > 0) || r.estimate < window.p_min || r.estimate > window.p_max ||
            r.hits < window.min_hits)
            continue;
        const double x = fit_regressor(model, r.y, window.gamma);
        if (!std::isfinite(x))
            continue;
        xs.push_back(x);
        ys.push_back(fit_response(model, r.estimate));
        f.rows.push_back(i);
    }
    if (xs.size() < window.min_points)
        throw Error(ErrorKind::EmptyWindow, "fit window has " + std::to_string(xs.size()) +
                                                " usable points, need " +
                                                std::to_string(window.min_points));
    f.ols = ols_fit(xs, ys);
    f.y_lo = curve.rows[f.rows.front()].y;
    f.y_hi = curve.rows[f.rows.back()].y;
    if (f.y_lo > f.y_hi)
        std::swap(f.y_lo, f.y_hi);
    return f;
}

std::string fit_plot_data(const TailCurve& curve, const ExponentFit& fit, double gamma)
{
    std::string out = "# regressor response fit\n";
    for (const auto& r : curve.rows) {
        if (!(r.estimate > 0))
            continue;
        const double x = fit_regressor(fit.model, r.y, gamma);
        if (!std::isfinite(x))
            continue;
        out += format_double(x) + ' ' + format_double(fit_response(fit.model, r.estimate)) + ' ' +
               format_double(fit.ols.intercept + fit.ols.slope * x) + '\n';
    }
    return out;
}

ISResult is_lower_bound(const ISConfig& config)
{
    if (config.n < 1 || config.m < 0 || config.n + config.m > kMaxDepth)
        throw Error(ErrorKind::ConfigError, "need n >= 1, m >= 0", "n");
    if (config.replicates < 1)
        throw Error(ErrorKind::ConfigError, "replicates must be >= 1", "replicates");
    const ModelParams params = derive_params(config.beta);
    auto schedule = std::make_shared<const BandSchedule>(params, config.n);
    ISResult res;
    res.log_weight = schedule->log_weight();
    res.Z.assign(config.replicates, 0.0);
    const int depth = config.n + config.m;
    parallel_for(config.replicates, config.threads, [&](std::size_t r) {
        SimSpec spec;
        spec.params = params;
        spec.n = depth;
        spec.seed = config.seed;
        spec.replicate = r;
        spec.conditioning = schedule;
        MartingaleFold fold(config.beta, depth);
        run_dfs(spec, fold);
        res.Z[r] = fold.Z();
    });
    std::vector<double> sorted = res.Z;
    std::sort(sorted.begin(), sorted.end());
    const std::uint64_t R = config.replicates;
    for (double y : config.y) {
        ISRow row;
        row.y = y;
        row.hits = static_cast<std::uint64_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), y));
        row.frequency = static_cast<double>(row.hits) / static_cast<double>(R);
        const Interval iv = wilson_interval(row.hits, R);
        row.lo = iv.lo;
        row.hi = iv.hi;
        row.log_lower_bound = row.hits ? res.log_weight + std::log(row.frequency) : -INFINITY;
        res.rows.push_back(row);
    }
    return res;
}

MomentInput moment_input(std::span<const double> W, std::span<const double> Z, double beta,
                         std::span<const double> x_grid)
{
    MomentInput in;
    in.beta = beta;
    in.x_grid.assign(x_grid.begin(), x_grid.end());
    for (double x : x_grid) {
        const double ebx = std::exp(beta * x);
        std::vector<double> v(W.size());
        for (std::size_t r = 0; r < v.size(); ++r)
            v[r] = std::max(0.0, ebx * (Z[r] - x * W[r]));
        in.v.push_back(std::move(v));
    }
    return in;
}

double t_factor(int k, double gamma)
{
    const double kk = k;
    return std::exp((1.0 - 1.0 / gamma) * kk * std::log(kk) - std::lgamma(kk + 1));
}

namespace {

// Power sums S[x][k-1] = sum_r v_r^k.
std::vector<std::vector<double>> power_sums(const MomentInput& in, int k_max)
{
    std::vector<std::vector<double>> S(in.v.size(), std::vector<double>(k_max, 0.0));
    for (std::size_t xi = 0; xi < in.v.size(); ++xi) {
        std::vector<LaneSum> acc(k_max);
        constexpr std::size_t kChunk = 512;
        double buf[kChunk];
        const auto& v = in.v[xi];
        for (std::size_t off = 0; off < v.size(); off += kChunk) {
            const std::size_t m = std::min(kChunk, v.size() - off);
            std::copy(v.begin() + off, v.begin() + off + m, buf);
            for (int k = 0; k < k_max; ++k) {
                acc[k].add({buf, m});
                for (std::size_t i = 0; i < m; ++i)
                    buf[i] *= v[off + i];
            }
        }
        for (int k = 0; k < k_max; ++k)
            S[xi][k] = acc[k].total().value();
    }
    return S;
}

} // namespace

MomentTable moment_table(const MomentInput& in, int k_max)
{
    if (k_max < 1)
        throw Error(ErrorKind::ConfigError, "k_max must be >= 1", "k_max");
    if (in.v.empty() || in.v.front().empty())
        throw Error(ErrorKind::ConfigError, "no samples", "samples");
    const double gamma = derive_params(in.beta).gamma;
    const double R = static_cast<double>(in.v.front().size());
    const auto S = power_sums(in, k_max);
    MomentTable t;
    t.by_x.assign(in.v.size(), std::vector<double>(k_max));
    for (std::size_t xi = 0; xi < in.v.size(); ++xi)
        for (int k = 0; k < k_max; ++k)
            t.by_x[xi][k] = S[xi][k] / R;
    for (int k = 1; k <= k_max; ++k) {
        std::size_t best = 0;
        for (std::size_t xi = 1; xi < in.v.size(); ++xi)
            if (t.by_x[xi][k - 1] > t.by_x[best][k - 1])
                best = xi;
        // The delete-1 jackknife of a mean is its classical standard error.
        std::vector<double> pk(in.v[best].size());
        for (std::size_t r = 0; r < pk.size(); ++r)
            pk[r] = std::pow(in.v[best][r], k);
        const MeanSe ms = mean_se(pk);
        MomentRow row;
        row.k = k;
        row.x = in.x_grid[best];
        row.moment = t.by_x[best][k - 1];
        row.se = ms.se;
        const double f = t_factor(k, gamma);
        row.t = f * row.moment;
        row.t_se = f * row.se;
        t.rows.push_back(row);
    }
    return t;
}

double induction_constant(int k_max)
{
    double best = 0.0;
    for (int k = 2; k <= k_max; ++k) {
        CompensatedSum s;
        for (int j = 1; j < k; ++j) {
            const double a = j, b = k - j;
            s.add(1.0 / (a * a * b * b));
        }
        best = std::max(best, double(k) * k * s.value());
    }
    return best;
}

std::vector<double> tk_residuals(std::span<const double> t, double q)
{
    std::vector<double> r(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const int k = static_cast<int>(i) + 1;
        double conv = 0.0;
        for (int j = 1; j < k; ++j)
            conv += t[j - 1] * t[k - j - 1];
        r[i] = t[i] - (2.0 * std::pow(q, k) * t[i] + conv);
    }
    return r;
}

double fit_C3(std::span<const double> t)
{
    double c = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double k = static_cast<double>(i + 1);
        if (t[i] > 0)
            c = std::max(c, std::pow(2.0 * kInductionA * k * k * t[i], 1.0 / k));
    }
    return c;
}

double fit_C2(std::span<const double> m, double gamma, int k_max)
{
    double c = 0.0;
    for (int k = 2; k <= k_max && k <= static_cast<int>(m.size()); ++k) {
        const double kk = k;
        if (m[k - 1] > 0)
            c = std::max(c, std::pow(m[k - 1] / std::pow(kk, kk / gamma), 1.0 / kk));
    }
    return c;
}

TkReport tk_diagnostics(const MomentInput& in, int k_max)
{
    if (k_max < 1)
        throw Error(ErrorKind::ConfigError, "k_max must be >= 1", "k_max");
    const ModelParams params = derive_params(in.beta);
    const std::size_t X = in.v.size();
    const std::size_t R = in.v.front().size();
    const auto S = power_sums(in, k_max);
    std::vector<double> f(k_max);
    for (int k = 1; k <= k_max; ++k)
        f[k - 1] = t_factor(k, params.gamma);

    auto t_from = [&](auto&& moment_at) {
        std::vector<double> t(k_max);
        for (int k = 0; k < k_max; ++k) {
            double best = moment_at(0, k);
            for (std::size_t xi = 1; xi < X; ++xi)
                best = std::max(best, moment_at(xi, k));
            t[k] = f[k] * best;
        }
        return t;
    };
    const double Rd = static_cast<double>(R);
    const auto t_full = t_from([&](std::size_t xi, int k) { return S[xi][k] / Rd; });
    const auto res_full = tk_residuals(t_full, params.q);

    TkReport rep;
    rep.C3 = fit_C3(t_full);
    if (R < 2) {
        for (int k = 1; k <= k_max; ++k)
            rep.rows.push_back({k, res_full[k - 1], 0.0});
        return rep;
    }
    std::vector<CompensatedSum> sd(k_max), sd2(k_max);
    std::vector<double> pw(X * k_max);
    for (std::size_t r = 0; r < R; ++r) {
        for (std::size_t xi = 0; xi < X; ++xi) {
            double p = in.v[xi][r];
            for (int k = 0; k < k_max; ++k) {
                pw[xi * k_max + k] = p;
                p *= in.v[xi][r];
            }
        }
        const auto t = t_from([&](std::size_t xi, int k) {
            return (S[xi][k] - pw[xi * k_max + k]) / (Rd - 1);
        });
        const auto res = tk_residuals(t, params.q);
        for (int k = 0; k < k_max; ++k) {
            const double d = res[k] - res_full[k];
            sd[k].add(d);
            sd2[k].add(d * d);
        }
    }
    for (int k = 1; k <= k_max; ++k) {
        const double a = sd[k - 1].value(), b = sd2[k - 1].value();
        const double var = (Rd - 1) / Rd * std::max(0.0, b - a * a / Rd);
        rep.rows.push_back({k, res_full[k - 1], std::sqrt(var)});
    }
    return rep;
}

SubexpConstants subexp_constants(std::span<const double> x, std::span<const double> t_grid,
                                 int k_max)
{
    SubexpConstants c;
    if (x.empty())
        return c;
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0)
        throw Error(ErrorKind::DomainError, "sub-exponential constants need a nonnegative statistic");
    const double R = static_cast<double>(sorted.size());
    for (double t : t_grid) {
        if (!(t > 0))
            continue;
        const auto ge = sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), t);
        if (ge == 0)
            continue;
        const double p = static_cast<double>(ge) / R;
        c.K1 = std::max(c.K1, p >= 1.0 ? INFINITY : t / -std::log(p));
    }
    std::vector<CompensatedSum> m(k_max);
    for (double v : x) {
        double p = v;
        for (int k = 0; k < k_max; ++k) {
            m[k].add(p);
            p *= v;
        }
    }
    for (int k = 1; k <= k_max; ++k)
        c.K2 = std::max(c.K2, std::pow(m[k - 1].value() / R, 1.0 / k) / k);
    return c;
}

std::vector<RatioRow> ratio_exp_moment(std::span<const double> W, std::span<const double> Z,
                                       std::span<const double> K_grid)
{
    std::vector<RatioRow> rows;
    std::vector<double> e(W.size());
    for (double K : K_grid) {
        for (std::size_t r = 0; r < e.size(); ++r)
            e[r] = std::exp(K * (Z[r] / W[r]));
        const MeanSe ms = mean_se(e);
        rows.push_back({K, ms.mean, ms.se, ms.mean - kWilsonZ95 * ms.se, ms.mean + kWilsonZ95 * ms.se});
    }
    return rows;
}

ScanResult rare_event_scan(const SampleSet& s, RareEvent event, double parameter,
                           std::span<const int> n_grid)
{
    ScanResult out;
    out.event = event;
    out.parameter = parameter;
    if (event == RareEvent::High) {
        if (!(parameter > 0))
            throw Error(ErrorKind::ConfigError, "theta must be positive", "theta");
        out.outside_tested_regime = parameter > s.beta / 2;
    }
    for (int n : n_grid) {
        const auto W = s.W_at(n);
        const auto Z = s.Z_at(n);
        ScanRow row;
        row.n = n;
        row.replicates = W.size();
        if (event == RareEvent::Low) {
            row.threshold = n * std::exp(n * parameter);
            row.impossible = row.threshold > derivative_cap(s.beta, n);
            for (double z : Z)
                row.hits += z >= row.threshold ? 1 : 0;
        } else {
            row.threshold = NAN;
            for (std::size_t r = 0; r < W.size(); ++r)
                row.hits += Z[r] >= parameter * n * (W[r] - 1.0) ? 1 : 0;
        }
        row.frequency = static_cast<double>(row.hits) / static_cast<double>(row.replicates);
        const Interval iv = wilson_interval(row.hits, row.replicates);
        row.lo = iv.lo;
        row.hi = iv.hi;
        out.rows.push_back(row);
    }
    return out;
}

} // namespace brw
