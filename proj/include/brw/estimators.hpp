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


#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "brw/model.hpp"
#include "brw/stats.hpp"

namespace brw {

// ---------------------------------------------------------------------------
// Campaigns

struct CampaignConfig {
    double beta = 1.0;
    std::vector<int> horizons{14}; ///< snapshot generations; the largest is N
    double x = 0.0;                ///< shift recorded in Z_shifted
    std::uint64_t replicates = 1;
    std::uint64_t seed = 0;
    int threads = 1;
};

/// Per-replicate (W_n, Z_n) for every configured horizon. Replicate r uses the
/// stream (seed, r).
struct SampleSet {
    double beta = 1.0;
    double x = 0.0;
    std::uint64_t seed = 0;
    std::vector<int> horizons;           ///< ascending
    std::vector<std::vector<double>> W;  ///< [horizon][replicate]
    std::vector<std::vector<double>> Z;  ///< [horizon][replicate]

    std::uint64_t replicates() const { return W.empty() ? 0 : W.front().size(); }
    int horizon() const { return horizons.back(); }
    std::size_t index_of(int n) const; ///< ConfigError if n was not recorded
    std::span<const double> W_at(int n) const { return W[index_of(n)]; }
    std::span<const double> Z_at(int n) const { return Z[index_of(n)]; }
};

/// Throws BudgetExceeded if one generation N does not fit in memory.
SampleSet run_campaign(const CampaignConfig& config);

/// Columns replicate,n,x,W,Z,Z_shifted,seed followed by W_h,Z_h for every
/// horizon h below N.
std::string samples_csv(const SampleSet& s);
SampleSet read_samples_csv(const std::filesystem::path& path, double beta);

enum class Statistic { W, Z, D, ZShifted, Ratio };

Statistic parse_statistic(std::string_view name);
const char* to_string(Statistic s);

/// Per-replicate values of a statistic at horizon n (D = -Z, Ratio = Z/W,
/// ZShifted = e^{beta x}(Z - x W) with the set's shift).
std::vector<double> statistic_values(const SampleSet& s, Statistic stat, int n);

// ---------------------------------------------------------------------------
// Tails

struct TailRow {
    double y = 0.0;
    double estimate = 0.0; ///< fraction of samples strictly above y
    double lo = 0.0;
    double hi = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t effective = 0;
};

struct TailCurve {
    std::vector<TailRow> rows;
};

/// Empirical survival function on `grid`. Throws EmptyWindow when no grid
/// point has an exceedance.
TailCurve tail_curve(std::span<const double> samples, std::span<const double> grid);

/// Geometric grid of `points` values between the empirical upper quantiles at
/// tail probabilities p_hi > p_lo. Needs positive quantiles.
std::vector<double> quantile_grid(std::span<const double> samples, double p_hi, double p_lo,
                                  int points);

std::string tail_csv(const TailCurve& c);

enum class FitModel {
    PowerLawLog,  ///< ln P against ln(ln y / y); slope estimates gamma
    Stretched,    ///< -ln P against y^gamma; slope estimates the rate
    PowerLaw,     ///< ln P against ln y
};

FitModel parse_fit_model(std::string_view name);
const char* to_string(FitModel m);

struct FitWindow {
    double p_min = 0.0;
    double p_max = 1.0;
    std::uint64_t min_hits = 100; ///< rows carrying IS weights set this to 1
    double gamma = 1.0;           ///< exponent for the stretched model
    std::size_t min_points = 5;
};

struct ExponentFit {
    FitModel model = FitModel::PowerLawLog;
    LinearFit ols;
    double y_lo = 0.0;
    double y_hi = 0.0;
    std::vector<std::size_t> rows; ///< curve rows inside the window
};

/// Throws EmptyWindow if fewer than min_points rows qualify.
ExponentFit fit_exponent(const TailCurve& curve, FitModel model, const FitWindow& window);

/// Regressor and response used by a model at one row.
double fit_regressor(FitModel m, double y, double gamma);
double fit_response(FitModel m, double p);

/// Plot data: regressor, response, fitted line for every row with P > 0.
std::string fit_plot_data(const TailCurve& curve, const ExponentFit& fit, double gamma);

// ---------------------------------------------------------------------------
// Importance-sampling lower bound

struct ISConfig {
    double beta = 1.0;
    int n = 1;  ///< band-conditioned generations
    int m = 0;  ///< free continuation
    std::uint64_t replicates = 1;
    std::uint64_t seed = 0;
    int threads = 1;
    std::vector<double> y;
};

struct ISRow {
    double y = 0.0;
    std::uint64_t hits = 0;
    double frequency = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double log_lower_bound = 0.0; ///< log_weight + ln(frequency); -inf at zero hits
};

struct ISResult {
    double log_weight = 0.0;
    std::vector<double> Z; ///< per-replicate Z_{n+m} under the conditioned law
    std::vector<ISRow> rows;
};

ISResult is_lower_bound(const ISConfig& config);

// ---------------------------------------------------------------------------
// Moments

/// Positive parts (Z^[x]_N)_+ = max(e^{beta x}(Z - x W), 0) per grid point.
struct MomentInput {
    double beta = 1.0;
    std::vector<double> x_grid;
    std::vector<std::vector<double>> v; ///< [x][replicate]
};

MomentInput moment_input(std::span<const double> W, std::span<const double> Z, double beta,
                         std::span<const double> x_grid);

struct MomentRow {
    int k = 0;
    double x = 0.0;        ///< maximizing grid point
    double moment = 0.0;   ///< sup over the grid of the plug-in E[v^k]
    double se = 0.0;       ///< jackknife
    double t = 0.0;        ///< (1/k!) e^{(1 - 1/gamma) k ln k} moment
    double t_se = 0.0;
};

struct MomentTable {
    std::vector<MomentRow> rows;             ///< k = 1..k_max
    std::vector<std::vector<double>> by_x;   ///< [x][k-1] plug-in moments
};

MomentTable moment_table(const MomentInput& in, int k_max);

double t_factor(int k, double gamma);

struct TkRow {
    int k = 0;
    double residual = 0.0; ///< t(k) - [2 q^k t(k) + sum_j t(j) t(k-j)]
    double se = 0.0;       ///< delete-1 jackknife
};

struct TkReport {
    std::vector<TkRow> rows;
    double C3 = 0.0;       ///< smallest C with t(k) <= C^k / (2 A k^2) on the table
};

inline constexpr double kInductionA = 41.0 / 9.0;

/// sup_k k^2 sum_{j=1}^{k-1} 1 / (j^2 (k-j)^2) by direct summation to k_max.
double induction_constant(int k_max);

/// Residuals from plain t values (no error propagation).
std::vector<double> tk_residuals(std::span<const double> t, double q);
double fit_C3(std::span<const double> t);
/// max_{2 <= k <= k_max} (m_k / k^{k / gamma})^{1/k}
double fit_C2(std::span<const double> m, double gamma, int k_max);

TkReport tk_diagnostics(const MomentInput& in, int k_max);

struct SubexpConstants {
    double K1 = 0.0;
    double K2 = 0.0;
};

/// K1 = sup over the grid of t / (-ln P(X >= t)) (grid points with no
/// exceedance are skipped); K2 = max_k (E X^k)^{1/k} / k.
SubexpConstants subexp_constants(std::span<const double> x, std::span<const double> t_grid,
                                 int k_max);

// ---------------------------------------------------------------------------
// Ratio exponential moments

struct RatioRow {
    double K = 0.0;
    double estimate = 0.0;
    double se = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

std::vector<RatioRow> ratio_exp_moment(std::span<const double> W, std::span<const double> Z,
                                       std::span<const double> K_grid);

// ---------------------------------------------------------------------------
// Rare-event frequency scans

enum class RareEvent { Low, High }; ///< Z_n >= n e^{n Delta}; Z_n >= theta n (W_n - 1)

struct ScanRow {
    int n = 0;
    double threshold = 0.0; ///< n e^{n Delta} (Low) or NaN (High)
    std::uint64_t hits = 0;
    std::uint64_t replicates = 0;
    double frequency = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool impossible = false; ///< threshold above the deterministic cap
};

struct ScanResult {
    RareEvent event = RareEvent::Low;
    double parameter = 0.0;
    bool outside_tested_regime = false; ///< High with theta > beta / 2
    std::vector<ScanRow> rows;
};

ScanResult rare_event_scan(const SampleSet& s, RareEvent event, double parameter,
                           std::span<const int> n_grid);

} // namespace brw
