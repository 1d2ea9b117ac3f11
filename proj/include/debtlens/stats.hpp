#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace debtlens::stats {

enum class Alternative { TwoSided, Greater, Less };
enum class TestKind { AndersonDarling, MannWhitneyU, CliffsDelta, PartialSpearman, Descriptive };
enum class Magnitude { Negligible, Small, Medium, Large };
enum class PercentConvention { AfterDenominator, BeforeDenominator };

std::string to_string(Alternative a);
std::string to_string(Magnitude m);
std::string to_string(PercentConvention c);
Alternative alternative_from_string(const std::string& s);
PercentConvention percent_convention_from_string(const std::string& s);

struct StatReport {
    TestKind test;
    double statistic = 0.0;
    std::optional<double> p_value;
    Alternative alternative = Alternative::TwoSided;
    std::size_t n1 = 0, n2 = 0;
    bool significant_at_alpha = false;
    double alpha = 0.05;
};

struct EffectSize {
    double delta = 0.0;
    Magnitude magnitude = Magnitude::Negligible;
};

struct PartialCorrelation {
    double r = 0.0;
    std::pair<double, double> ci95{0.0, 0.0};
    double p_value = 1.0;
    std::size_t n = 0;
    std::size_t n_controls = 1;
};

struct DescriptiveStats {
    double mean = 0.0, median = 0.0, min = 0.0, max = 0.0, sd = 0.0;
    std::size_t n = 0;
};

// Average ranks (1-based, mean rank over each tie group).
std::vector<double> average_ranks(std::span<const double> values);

double normal_cdf(double z);

// Unpaired two-sample rank test. statistic is U of the first sample, computed
// with average-rank tie handling (U_a + U_b = n1*n2 always).
//
// Alternative::Less tests H1 "a is stochastically smaller than b" and so on;
// the exact null distribution (via the standard counting recurrence) is used
// when max(n1, n2) <= 8 and the pooled sample is tie-free, otherwise the
// normal approximation with tie-corrected variance and 0.5 continuity
// correction.
StatReport mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          Alternative alternative = Alternative::TwoSided,
                          double alpha = 0.05);

// delta = (#{a_i > b_j} - #{a_i < b_j}) / (n1*n2), via the rank identity
// delta = 2*U_a/(n1*n2) - 1 (exact also under ties with average ranks).
EffectSize cliffs_delta(std::span<const double> a, std::span<const double> b);
Magnitude delta_magnitude(double delta);

// Normality screen against N(mean, sd) with both parameters estimated.
// statistic is the small-sample adjusted A*^2 = A^2 (1 + 0.75/n + 2.25/n^2);
// significant_at_alpha means "reject normality" (A*^2 above the 5% critical
// value 0.752). No p-value is interpolated.
StatReport anderson_darling(std::span<const double> sample, double alpha = 0.05);

// First-order partial Spearman correlation of x and y given one control:
// rank-transform all three (average ranks), then
//   r = (r_xy - r_xz*r_yz) / sqrt((1 - r_xz^2)(1 - r_yz^2))
// p from t = r*sqrt((n-3)/(1-r^2)) with n-3 df (two-sided); CI95 via Fisher z
// with standard error 1/sqrt(n-4).
PartialCorrelation partial_spearman(std::span<const double> x, std::span<const double> y,
                                    std::span<const double> control);

// sd uses the n-1 denominator; a single observation reports sd = 0.
DescriptiveStats descriptive(std::span<const double> sample);

// AfterDenominator: (after - before) / after. Returned as a fraction.
double percent_change(double before, double after,
                      PercentConvention convention = PercentConvention::AfterDenominator);

// Elementwise ln(1 + v); input must be non-negative.
std::vector<double> log1p_series(std::span<const double> values);

} // namespace debtlens::stats
