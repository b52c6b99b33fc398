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


#include "brw/jobs.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "brw/biggins.hpp"
#include "brw/engine.hpp"
#include "brw/estimators.hpp"
#include "brw/igw.hpp"
#include "brw/io.hpp"
#include "brw/martingales.hpp"
#include "brw/regions.hpp"

#ifndef BRW_BUILD_ID
#define BRW_BUILD_ID "unknown"
#endif

namespace brw {

namespace {

Error config_error(const std::string& where, const std::string& what)
{
    return Error(ErrorKind::ConfigError, where.empty() ? what : where + ": " + what, where);
}

// Typed access to one JSON object. Every key read is echoed (with its
// default filled in) into resolved(); finish() rejects keys nobody read.
class Fields {
public:
    Fields(const Json& in, std::string where) : in_(in), where_(std::move(where))
    {
        if (!in_.is_object())
            throw config_error(where_, "expected a JSON object");
    }

    bool has(const char* key) const { return in_.contains(key); }

    double real(const char* key) { return real_impl(key, nullptr); }
    double real(const char* key, double def) { return real_impl(key, &def); }

    std::int64_t integer(const char* key) { return int_impl(key, nullptr); }
    std::int64_t integer(const char* key, std::int64_t def) { return int_impl(key, &def); }

    std::uint64_t count(const char* key) { return nonneg(key, integer(key)); }
    std::uint64_t count(const char* key, std::uint64_t def)
    {
        return nonneg(key, integer(key, static_cast<std::int64_t>(def)));
    }

    std::string text(const char* key, const std::string& def)
    {
        if (!in_.contains(key)) {
            out_[key] = def;
            return def;
        }
        const Json& v = take(key);
        if (!v.is_string())
            throw config_error(name(key), "expected a string");
        out_[key] = v;
        return v.get<std::string>();
    }

    bool flag(const char* key, bool def)
    {
        if (!in_.contains(key)) {
            out_[key] = def;
            return def;
        }
        const Json& v = take(key);
        if (!v.is_boolean())
            throw config_error(name(key), "expected true or false");
        out_[key] = v;
        return v.get<bool>();
    }

    /// A number or an array of numbers.
    std::vector<double> reals(const char* key) { return reals_impl(key, nullptr); }
    std::vector<double> reals(const char* key, const std::vector<double>& def)
    {
        return reals_impl(key, &def);
    }

    std::vector<int> ints(const char* key) { return ints_impl(key, nullptr); }
    std::vector<int> ints(const char* key, const std::vector<int>& def) { return ints_impl(key, &def); }

    /// Nested object; missing keys give an empty object.
    Fields child(const char* key)
    {
        static const Json empty = Json::object();
        return Fields(in_.contains(key) ? take(key) : empty, name(key));
    }

    void adopt(const char* key, Fields& child)
    {
        child.finish();
        out_[key] = child.resolved();
    }

    /// Array of objects.
    std::vector<Fields> list(const char* key)
    {
        const Json& v = take_required(key);
        if (!v.is_array() || v.empty())
            throw config_error(name(key), "expected a non-empty array of objects");
        std::vector<Fields> out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out.emplace_back(v[i], name(key) + "[" + std::to_string(i) + "]");
        return out;
    }

    void adopt_list(const char* key, std::vector<Fields>& items)
    {
        Json arr = Json::array();
        for (Fields& f : items) {
            f.finish();
            arr.push_back(f.resolved());
        }
        out_[key] = std::move(arr);
    }

    const Json& raw(const char* key)
    {
        const Json& v = take_required(key);
        out_[key] = v;
        return v;
    }

    void finish() const
    {
        for (const auto& [k, v] : in_.items())
            if (!used_.count(k))
                throw config_error(name(k.c_str()), "unknown key");
    }

    const Json& resolved() const { return out_; }
    std::string name(const char* key) const { return where_.empty() ? key : where_ + "." + key; }

private:
    const Json& take(const char* key)
    {
        used_.insert(key);
        return in_.at(key);
    }

    const Json& take_required(const char* key)
    {
        if (!in_.contains(key))
            throw config_error(name(key), "missing required key");
        return take(key);
    }

    double real_impl(const char* key, const double* def)
    {
        if (!in_.contains(key) && def) {
            out_[key] = *def;
            return *def;
        }
        const Json& v = take_required(key);
        if (!v.is_number())
            throw config_error(name(key), "expected a number");
        out_[key] = v;
        return v.get<double>();
    }

    std::int64_t int_impl(const char* key, const std::int64_t* def)
    {
        if (!in_.contains(key) && def) {
            out_[key] = *def;
            return *def;
        }
        const Json& v = take_required(key);
        if (!v.is_number_integer())
            throw config_error(name(key), "expected an integer");
        out_[key] = v;
        return v.get<std::int64_t>();
    }

    std::uint64_t nonneg(const char* key, std::int64_t v) const
    {
        if (v < 0)
            throw config_error(name(key), "must be nonnegative");
        return static_cast<std::uint64_t>(v);
    }

    std::vector<double> reals_impl(const char* key, const std::vector<double>* def)
    {
        if (!in_.contains(key) && def) {
            out_[key] = *def;
            return *def;
        }
        const Json& v = take_required(key);
        std::vector<double> out;
        if (v.is_number()) {
            out.push_back(v.get<double>());
        } else if (v.is_array()) {
            for (const Json& e : v) {
                if (!e.is_number())
                    throw config_error(name(key), "expected numbers");
                out.push_back(e.get<double>());
            }
        } else {
            throw config_error(name(key), "expected a number or an array of numbers");
        }
        out_[key] = v;
        return out;
    }

    std::vector<int> ints_impl(const char* key, const std::vector<int>* def)
    {
        if (!in_.contains(key) && def) {
            out_[key] = *def;
            return *def;
        }
        const Json& v = take_required(key);
        std::vector<int> out;
        if (v.is_number_integer()) {
            out.push_back(v.get<int>());
        } else if (v.is_array()) {
            for (const Json& e : v) {
                if (!e.is_number_integer())
                    throw config_error(name(key), "expected integers");
                out.push_back(e.get<int>());
            }
        } else {
            throw config_error(name(key), "expected an integer or an array of integers");
        }
        out_[key] = v;
        return out;
    }

    const Json& in_;
    std::string where_;
    std::set<std::string> used_;
    Json out_ = Json::object();
};

struct Output {
    std::string name;
    std::string content;
};

struct Context {
    explicit Context(Fields& f) : cfg(f) {}

    Fields& cfg;
    std::uint64_t seed = 0;
    int threads = 1;
    std::vector<Output> outputs;
    std::vector<std::pair<std::string, double>> phases;

    void add(std::string name, std::string content) { outputs.push_back({std::move(name), std::move(content)}); }

    template <class Fn>
    auto timed(const char* phase, Fn&& fn)
    {
        const auto t0 = std::chrono::steady_clock::now();
        struct Stop {
            Context& c;
            const char* phase;
            std::chrono::steady_clock::time_point t0;
            ~Stop()
            {
                c.phases.emplace_back(phase,
                                      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            }
        } stop{*this, phase, t0};
        return fn();
    }
};

Json number_or_null(double v)
{
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

std::string dump(const Json& j)
{
    return j.dump(2) + "\n";
}

Json fit_json(const LinearFit& f)
{
    return {{"slope", f.slope},
            {"slope_se", f.slope_se},
            {"intercept", f.intercept},
            {"intercept_se", f.intercept_se},
            {"r2", f.r2},
            {"points", f.points}};
}

// The sample set either comes from a file written by `simulate` or from a
// campaign run in place.
SampleSet load_samples(Context& c, double beta)
{
    if (c.cfg.has("samples")) {
        const Json& path = c.cfg.raw("samples");
        if (!path.is_string())
            throw config_error("samples", "expected a path");
        return c.timed("read", [&] { return read_samples_csv(path.get<std::string>(), beta); });
    }
    Fields camp = c.cfg.child("campaign");
    CampaignConfig cc;
    cc.beta = beta;
    const int n = static_cast<int>(camp.integer("n"));
    cc.horizons = camp.ints("horizons", {});
    cc.horizons.push_back(n);
    std::sort(cc.horizons.begin(), cc.horizons.end());
    cc.horizons.erase(std::unique(cc.horizons.begin(), cc.horizons.end()), cc.horizons.end());
    if (cc.horizons.back() != n || cc.horizons.front() < 0)
        throw config_error("campaign.horizons", "horizons must lie in [0, n]");
    cc.x = camp.real("x", 0.0);
    cc.replicates = camp.count("replicates");
    cc.seed = c.seed;
    cc.threads = c.threads;
    c.cfg.adopt("campaign", camp);
    return c.timed("simulate", [&] { return run_campaign(cc); });
}

// ---------------------------------------------------------------------------

void job_simulate(Context& c)
{
    Fields& f = c.cfg;
    CampaignConfig cc;
    cc.beta = f.real("beta");
    const int n = static_cast<int>(f.integer("n"));
    cc.horizons = f.ints("horizons", {});
    cc.x = f.real("x", 0.0);
    cc.replicates = f.count("replicates");
    const std::uint64_t dump_reps = f.count("dump_replicates", 0);
    f.finish();
    derive_params(cc.beta);
    if (n < 0 || n > kMaxDepth)
        throw config_error("n", "out of range");
    if (cc.replicates < 1)
        throw config_error("replicates", "must be >= 1");
    cc.horizons.push_back(n);
    std::sort(cc.horizons.begin(), cc.horizons.end());
    cc.horizons.erase(std::unique(cc.horizons.begin(), cc.horizons.end()), cc.horizons.end());
    if (cc.horizons.back() != n || cc.horizons.front() < 0)
        throw config_error("horizons", "horizons must lie in [0, n]");
    if (dump_reps > 0 && n > 16)
        throw config_error("dump_replicates", "generation dumps need n <= 16");
    cc.seed = c.seed;
    cc.threads = c.threads;

    const SampleSet s = c.timed("simulate", [&] { return run_campaign(cc); });
    c.timed("format", [&] {
        c.add("samples.csv", samples_csv(s));
        if (dump_reps > 0) {
            std::ostringstream os;
            for (std::uint64_t r = 0; r < std::min(dump_reps, cc.replicates); ++r) {
                SimSpec spec;
                spec.params = derive_params(cc.beta);
                spec.n = n;
                spec.x = cc.x;
                spec.seed = c.seed;
                spec.replicate = r;
                std::ostringstream one;
                write_generation_csv(one, r, run_bfs(spec));
                std::string text = one.str();
                if (r > 0)
                    text.erase(0, text.find('\n') + 1);
                os << text;
            }
            c.add("generations.csv", os.str());
        }
        return 0;
    });
}

void job_tail(Context& c)
{
    Fields& f = c.cfg;
    const double beta = f.real("beta");
    const ModelParams params = derive_params(beta);
    const Statistic stat = parse_statistic(f.text("statistic", "D"));
    const SampleSet s = load_samples(c, beta);
    const int n = static_cast<int>(f.integer("horizon", s.horizon()));
    const std::vector<double> values = statistic_values(s, stat, n);

    std::vector<double> grid;
    Fields g = f.child("grid");
    if (g.has("y")) {
        grid = g.reals("y");
    } else {
        const double p_hi = g.real("p_hi", 1e-2);
        const double p_lo = g.real("p_lo", 1e-4);
        const int points = static_cast<int>(g.integer("points", 60));
        g.finish();
        grid = quantile_grid(values, p_hi, p_lo, points);
    }
    f.adopt("grid", g);

    Fields w = f.child("fit");
    const FitModel model = parse_fit_model(w.text("model", "power-law-with-log"));
    FitWindow win;
    win.p_min = w.real("p_min", std::pow(10.0, -4.5));
    win.p_max = w.real("p_max", 1e-2);
    win.min_hits = w.count("min_hits", 100);
    win.gamma = w.real("gamma", params.gamma);
    win.min_points = w.count("min_points", 5);
    f.adopt("fit", w);
    f.finish();

    const TailCurve curve = c.timed("tail", [&] { return tail_curve(values, grid); });
    const ExponentFit fit = c.timed("fit", [&] { return fit_exponent(curve, model, win); });
    Json j = fit_json(fit.ols);
    j["model"] = to_string(model);
    j["statistic"] = to_string(stat);
    j["horizon"] = n;
    j["y_lo"] = fit.y_lo;
    j["y_hi"] = fit.y_hi;
    j["gamma"] = params.gamma;
    c.add("tail.csv", tail_csv(curve));
    c.add("fit.json", dump(j));
    c.add("fit_plot.dat", fit_plot_data(curve, fit, win.gamma));
}

void job_is_lb(Context& c)
{
    Fields& f = c.cfg;
    ISConfig base;
    base.beta = f.real("beta");
    const std::vector<int> ns = f.ints("n");
    base.m = static_cast<int>(f.integer("m", 8));
    base.replicates = f.count("replicates");
    const std::vector<double> ys = f.reals("y", {});
    f.finish();
    base.seed = c.seed;
    base.threads = c.threads;
    const double beta = base.beta;
    derive_params(beta);

    CsvBuilder csv({"n", "m", "y", "hits", "replicates", "frequency", "lo", "hi", "log_weight",
                    "log_lower_bound"});
    std::vector<double> x, nll;
    for (int n : ns) {
        ISConfig cfg = base;
        cfg.n = n;
        // Default level e^{beta^2 n / 2} / (2 e^2 beta).
        cfg.y = ys.empty() ? std::vector<double>{std::exp(beta * beta * n / 2) / (2 * std::exp(2.0) * beta)} : ys;
        const ISResult r = c.timed("importance-sampling", [&] { return is_lower_bound(cfg); });
        for (const ISRow& row : r.rows) {
            csv.cell(n).cell(cfg.m).cell(row.y).cell(static_cast<unsigned long long>(row.hits))
                .cell(static_cast<unsigned long long>(cfg.replicates)).cell(row.frequency).cell(row.lo)
                .cell(row.hi).cell(r.log_weight).cell(row.log_lower_bound).end_row();
        }
        if (ys.empty() && std::isfinite(r.rows.front().log_lower_bound)) {
            x.push_back(std::ldexp(1.0, n));
            nll.push_back(-r.rows.front().log_lower_bound);
        }
    }
    c.add("is_lb.csv", csv.str());
    if (x.size() >= 3) {
        Json j = fit_json(ols_fit(x, nll));
        j["regressor"] = "2^n";
        j["response"] = "-log lower bound";
        c.add("is_fit.json", dump(j));
    }
}

void job_moments(Context& c)
{
    Fields& f = c.cfg;
    const double beta = f.real("beta");
    const ModelParams params = derive_params(beta);
    const SampleSet s = load_samples(c, beta);
    const int n = static_cast<int>(f.integer("horizon", s.horizon()));
    const std::vector<double> xg = f.reals("x_grid", {-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0});
    const int k_max = static_cast<int>(f.integer("k_max", 6));
    f.finish();
    if (k_max < 2)
        throw config_error("k_max", "must be >= 2");

    const MomentInput in = moment_input(s.W_at(n), s.Z_at(n), beta, xg);
    const MomentTable table = c.timed("moments", [&] { return moment_table(in, k_max); });
    const TkReport tk = c.timed("jackknife", [&] { return tk_diagnostics(in, k_max); });

    CsvBuilder mc({"k", "x", "moment", "se", "t", "t_se"});
    std::vector<double> m;
    for (const MomentRow& r : table.rows) {
        mc.cell(r.k).cell(r.x).cell(r.moment).cell(r.se).cell(r.t).cell(r.t_se).end_row();
        m.push_back(r.moment);
    }
    CsvBuilder tc({"k", "residual", "se"});
    for (const TkRow& r : tk.rows)
        tc.cell(r.k).cell(r.residual).cell(r.se).end_row();

    Json j;
    j["horizon"] = n;
    j["gamma"] = params.gamma;
    j["q"] = params.q;
    Json c2 = Json::object();
    for (int k = 2; k <= k_max; ++k)
        c2[std::to_string(k)] = fit_C2(m, params.gamma, k);
    j["C2_by_k_max"] = c2;
    j["C3"] = tk.C3;
    c.add("moments.csv", mc.str());
    c.add("tk.csv", tc.str());
    c.add("moments.json", dump(j));
}

void job_ratio(Context& c)
{
    Fields& f = c.cfg;
    const double beta = f.real("beta");
    derive_params(beta);
    const SampleSet s = load_samples(c, beta);
    const int n = static_cast<int>(f.integer("horizon", s.horizon()));
    const std::vector<double> K = f.reals("K", {0.5, 1.0, 2.0, 4.0});
    f.finish();
    const auto rows = c.timed("ratio", [&] { return ratio_exp_moment(s.W_at(n), s.Z_at(n), K); });
    CsvBuilder csv({"K", "estimate", "se", "lo", "hi"});
    for (const RatioRow& r : rows)
        csv.cell(r.K).cell(r.estimate).cell(r.se).cell(r.lo).cell(r.hi).end_row();
    c.add("ratio.csv", csv.str());
}

void job_scan(Context& c)
{
    Fields& f = c.cfg;
    const double beta = f.real("beta");
    derive_params(beta);
    const std::string ev = f.text("event", "low");
    RareEvent event;
    if (ev == "low")
        event = RareEvent::Low;
    else if (ev == "high")
        event = RareEvent::High;
    else
        throw config_error("event", "expected \"low\" or \"high\"");
    const double param = f.real("parameter");
    const SampleSet s = load_samples(c, beta);
    const std::vector<int> ns = f.ints("n", s.horizons);
    const std::vector<int> cmp = f.ints("compare", {});
    f.finish();
    if (!cmp.empty() && cmp.size() != 2)
        throw config_error("compare", "expected [n_early, n_late]");

    const ScanResult r = c.timed("scan", [&] { return rare_event_scan(s, event, param, ns); });
    CsvBuilder csv({"event", "parameter", "n", "threshold", "hits", "replicates", "frequency", "lo", "hi",
                    "impossible"});
    for (const ScanRow& row : r.rows)
        csv.cell(ev).cell(param).cell(row.n).cell(row.threshold).cell(static_cast<unsigned long long>(row.hits))
            .cell(static_cast<unsigned long long>(row.replicates)).cell(row.frequency).cell(row.lo).cell(row.hi)
            .cell(row.impossible).end_row();
    c.add("scan.csv", csv.str());

    Json j;
    j["event"] = ev;
    j["parameter"] = param;
    j["outside_tested_regime"] = r.outside_tested_regime;
    if (!cmp.empty()) {
        const ScanRow* a = nullptr;
        const ScanRow* b = nullptr;
        for (const ScanRow& row : r.rows) {
            if (row.n == cmp[0])
                a = &row;
            if (row.n == cmp[1])
                b = &row;
        }
        if (!a || !b)
            throw config_error("compare", "both generations must be in the scan");
        j["compare"] = {{"n_early", a->n},
                        {"n_late", b->n},
                        {"p_value", decay_test_pvalue(a->hits, a->replicates, b->hits, b->replicates)}};
    }
    c.add("scan.json", dump(j));
}

void job_ldp_regions(Context& c)
{
    Fields& f = c.cfg;
    const int n = static_cast<int>(f.integer("n"));
    std::vector<Fields> items = f.list("regions");
    std::vector<RegionSpec> specs;
    for (Fields& it : items)
        specs.push_back({n, it.real("L"), it.real("M"), it.real("x", 0.0)});
    f.adopt_list("regions", items);
    f.finish();
    if (n < 1)
        throw config_error("n", "must be >= 1");
    for (std::size_t i = 0; i < specs.size(); ++i)
        c.add("region_" + std::to_string(i) + ".dat", region_plot_data(region_boundary(specs[i])));
}

Json check_json(const CheckResult& r)
{
    Json j{{"holds", r.holds}, {"margin", number_or_null(r.margin)}, {"points", r.points}};
    if (r.counterexample)
        j["counterexample"] = {{"t", r.counterexample->t}, {"lambda", r.counterexample->lambda}};
    else
        j["counterexample"] = nullptr;
    return j;
}

CheckResult run_check(const std::string& kind, Fields& p, int density)
{
    if (kind == "inclusion43") {
        Inclusion43 q;
        q.beta = p.real("beta", 1.0);
        q.Delta = p.real("Delta");
        q.epsilon = p.real("epsilon");
        q.delta = p.real("delta", 2 * std::sqrt(q.epsilon));
        q.n = static_cast<int>(p.integer("n"));
        q.k = static_cast<int>(p.integer("k"));
        q.ell = static_cast<int>(p.integer("ell"));
        q.a = p.real("a");
        p.finish();
        return check_inclusion_43(q, density);
    }
    if (kind == "disjoint44") {
        Disjoint44 q;
        q.beta = p.real("beta", 1.0);
        q.theta = p.real("theta");
        q.delta = p.real("delta");
        q.epsilon = p.real("epsilon", std::pow(q.delta / 4, 4));
        q.n = static_cast<int>(p.integer("n"));
        q.k = static_cast<int>(p.integer("k"));
        // Default: the smallest admissible b.
        const double bt = q.beta - q.theta + q.delta;
        q.b = p.real("b", kLn2 - bt * bt / 2);
        p.finish();
        return check_disjoint_44(q, density);
    }
    throw config_error("check", "expected \"inclusion43\" or \"disjoint44\"");
}

void job_ldp_check(Context& c)
{
    Fields& f = c.cfg;
    const std::string kind = f.text("check", "inclusion43");
    const int density = static_cast<int>(f.integer("density", 1000));
    Json results = Json::array();
    if (f.has("cases")) {
        std::vector<Fields> items = f.list("cases");
        std::vector<CheckResult> rs;
        for (Fields& it : items)
            rs.push_back(c.timed("check", [&] { return run_check(kind, it, density); }));
        f.adopt_list("cases", items);
        f.finish();
        for (const CheckResult& r : rs)
            results.push_back(check_json(r));
    } else {
        // Parameters given at top level.
        static const char* const keys[] = {"beta", "Delta", "epsilon", "delta", "n",   "k",
                                           "ell",  "a",     "theta",   "b"};
        Json flat = Json::object();
        for (const char* k : keys)
            if (f.has(k))
                flat[k] = f.raw(k);
        f.finish();
        Fields p(flat, "");
        results.push_back(check_json(c.timed("check", [&] { return run_check(kind, p, density); })));
    }
    Json j{{"check", kind}, {"density", density}, {"results", results}};
    bool all = true;
    for (const Json& r : results)
        all = all && r["holds"].get<bool>();
    j["verdict"] = all;
    c.add("check.json", dump(j));
}

OffspringLaw parse_law(const Json& v, const std::string& where)
{
    OffspringLaw law;
    if (!v.is_array() || v.empty())
        throw config_error(where, "expected [[value, probability], ...]");
    for (const Json& atom : v) {
        if (!atom.is_array() || atom.size() != 2 || !atom[0].is_number_integer() || !atom[1].is_number())
            throw config_error(where, "expected [[value, probability], ...]");
        law.pmf.emplace_back(atom[0].get<int>(), atom[1].get<double>());
    }
    return law;
}

IGWSpec parse_igw(Fields& p)
{
    IGWSpec s;
    s.n = static_cast<int>(p.integer("n"));
    s.ell = p.count("ell", 1);
    s.alpha = p.real("alpha");
    s.h = p.real("h");
    s.lambda = p.real("lambda");
    if (p.has("laws")) {
        const Json& laws = p.raw("laws");
        if (!laws.is_array())
            throw config_error(p.name("laws"), "expected one law per generation");
        for (std::size_t i = 0; i < laws.size(); ++i)
            s.laws.push_back(parse_law(laws[i], p.name("laws")));
    } else {
        s.laws.assign(std::max(0, s.n), parse_law(p.raw("law"), p.name("law")));
    }
    validate_igw(s);
    return s;
}

void job_igw(Context& c)
{
    Fields& f = c.cfg;
    const std::uint64_t cap = f.count("cap", 100000);
    const std::uint64_t sims = f.count("simulate", 0);
    std::vector<IGWSpec> specs;
    if (f.has("specs")) {
        std::vector<Fields> items = f.list("specs");
        for (Fields& it : items)
            specs.push_back(parse_igw(it));
        f.adopt_list("specs", items);
    } else {
        static const char* const keys[] = {"n", "ell", "alpha", "h", "lambda", "laws", "law"};
        Json flat = Json::object();
        for (const char* k : keys)
            if (f.has(k))
                flat[k] = f.raw(k);
        Fields p(flat, "");
        specs.push_back(parse_igw(p));
        p.finish();
    }
    f.finish();

    CsvBuilder csv({"spec", "n", "ell", "alpha", "h", "lambda", "threshold", "lhs", "lhs_exact", "rhs",
                    "mass_above_cap", "holds", "tv"});
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const IGWSpec& s = specs[i];
        const IGWBoundReport r = c.timed("exact", [&] { return igw_bound_check(s, cap); });
        double tv = NAN;
        if (sims > 0) {
            const auto samples = c.timed("simulate", [&] { return igw_simulate(s, sims, c.seed, cap, c.threads); });
            tv = igw_total_variation(igw_exact_dp(s, cap), samples);
        }
        csv.cell(static_cast<unsigned long long>(i)).cell(s.n).cell(static_cast<unsigned long long>(s.ell))
            .cell(s.alpha).cell(s.h).cell(s.lambda).cell(r.threshold).cell(r.lhs).cell(r.lhs_exact).cell(r.rhs)
            .cell(r.mass_above_cap).cell(r.holds).cell(tv).end_row();
        if (specs.size() == 1) {
            const IGWDistribution d = igw_exact_dp(s, cap);
            CsvBuilder dist({"x", "p"});
            for (std::size_t x = 0; x < d.p.size(); ++x)
                if (d.p[x] > 0)
                    dist.cell(static_cast<unsigned long long>(x)).cell(d.p[x]).end_row();
            c.add("igw_distribution.csv", dist.str());
        }
    }
    c.add("igw_bounds.csv", csv.str());
}

void job_biggins(Context& c)
{
    Fields& f = c.cfg;
    const std::vector<double> as = f.reals("a");
    BigginsConfig base;
    base.n = static_cast<int>(f.integer("n", 22));
    base.replicates = f.count("replicates", 50);
    base.bootstrap = static_cast<int>(f.integer("bootstrap", 1000));
    f.finish();
    base.seed = c.seed;
    base.threads = c.threads;

    CsvBuilder csv({"a", "n", "replicates", "estimate", "lo", "hi", "limit", "abs_error"});
    CsvBuilder rates({"a", "replicate", "count", "rate"});
    for (double a : as) {
        BigginsConfig cfg = base;
        cfg.a = a;
        const BigginsResult r = c.timed("simulate", [&] { return biggins_rate(cfg); });
        csv.cell(a).cell(cfg.n).cell(static_cast<unsigned long long>(cfg.replicates)).cell(r.estimate)
            .cell(r.lo).cell(r.hi).cell(r.limit).cell(std::fabs(r.estimate - r.limit)).end_row();
        for (std::size_t i = 0; i < r.counts.size(); ++i)
            rates.cell(a).cell(static_cast<unsigned long long>(i)).cell(static_cast<unsigned long long>(r.counts[i]))
                .cell(r.rates[i]).end_row();
    }
    c.add("biggins.csv", csv.str());
    c.add("biggins_rates.csv", rates.str());
}

using JobFn = void (*)(Context&);

const std::map<std::string, JobFn>& registry()
{
    static const std::map<std::string, JobFn> jobs{
        {"simulate", job_simulate},   {"tail", job_tail},       {"is-lb", job_is_lb},
        {"moments", job_moments},     {"ratio", job_ratio},     {"scan", job_scan},
        {"ldp-regions", job_ldp_regions}, {"ldp-check", job_ldp_check}, {"igw", job_igw},
        {"biggins", job_biggins},
    };
    return jobs;
}

} // namespace

const std::vector<std::string>& job_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, fn] : registry())
            v.push_back(k);
        return v;
    }();
    return names;
}

Json run_job(const std::string& command, const Json& config, const JobOptions& options)
{
    const auto it = registry().find(command);
    if (it == registry().end())
        throw Error(ErrorKind::ConfigError, "unknown subcommand: " + command, "command");
    if (options.out_dir.empty())
        throw Error(ErrorKind::ConfigError, "no output directory", "out_dir");
    if (!config.is_object())
        throw Error(ErrorKind::ConfigError, "config must be a JSON object");

    const auto start = std::chrono::steady_clock::now();
    Json cfg = config;
    if (options.seed)
        cfg["seed"] = *options.seed;
    if (options.threads)
        cfg["threads"] = *options.threads;
    Fields fields(cfg, "");
    Context ctx(fields);
    ctx.seed = fields.count("seed", 0);
    const std::int64_t threads = fields.integer("threads", 1);
    if (threads < 1 || threads > 1024)
        throw Error(ErrorKind::ConfigError, "threads must be in [1, 1024]", "threads");
    ctx.threads = static_cast<int>(threads);
    it->second(ctx);
    fields.finish();

    Json manifest;
    manifest["schema"] = kManifestSchema;
    manifest["command"] = command;
    manifest["config"] = fields.resolved();
    manifest["seed"] = ctx.seed;
    manifest["threads"] = ctx.threads;
    manifest["build"] = BRW_BUILD_ID;
    Json outs = Json::array();
    for (const Output& o : ctx.outputs)
        outs.push_back(o.name);
    manifest["outputs"] = outs;

    const auto write_start = std::chrono::steady_clock::now();
    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec)
        throw Error(ErrorKind::IoError, "cannot create " + options.out_dir.string() + ": " + ec.message());
    for (const Output& o : ctx.outputs)
        write_file_atomic(options.out_dir / o.name, o.content);
    const auto end = std::chrono::steady_clock::now();

    Json phases = Json::object();
    for (const auto& [name, secs] : ctx.phases)
        phases[name] = phases.value(name, 0.0) + secs;
    phases["write"] = std::chrono::duration<double>(end - write_start).count();
    manifest["timings"] = {{"wall_seconds", std::chrono::duration<double>(end - start).count()},
                           {"phases", phases}};
    write_file_atomic(options.out_dir / "manifest.json", dump(manifest));
    return manifest;
}

Json rerun_manifest(const Json& manifest, const JobOptions& options)
{
    if (!manifest.is_object() || manifest.value("schema", 0) != kManifestSchema || !manifest.contains("command") ||
        !manifest.contains("config"))
        throw Error(ErrorKind::ConfigError, "not a schema-1 manifest");
    return run_job(manifest["command"].get<std::string>(), manifest["config"], options);
}

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::OutOfRegime:
        return 2;
    case ErrorKind::BudgetExceeded:
        return 3;
    case ErrorKind::IoError:
        return 5;
    default:
        return 4;
    }
}

Json error_json(const Error& e)
{
    Json j{{"error", to_string(e.kind())}, {"message", e.what()}};
    if (!e.subject().empty())
        j[e.kind() == ErrorKind::PreconditionViolated ? "constraint" : "subject"] = e.subject();
    return j;
}

} // namespace brw
