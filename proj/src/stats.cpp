#include "debtlens/stats.hpp"

#include "debtlens/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace debtlens::stats {

namespace {

constexpr double kNormalQuantile975 = 1.959963984540054;

// D'Agostino & Stephens, case "mean and variance estimated":
// critical value for A*^2 at alpha = 0.05.
constexpr double kAdCritical05 = 0.752;

double sample_sd(std::span<const double> xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

bool has_ties(std::span<const double> pooled_sorted) {
    for (std::size_t i = 1; i < pooled_sorted.size(); ++i)
        if (pooled_sorted[i] == pooled_sorted[i - 1]) return true;
    return false;
}

// Number of rank assignments of a sample of size n1 (against n2) with
// Mann-Whitney statistic u: K(u) = K(u - n2 | n1-1, n2) + K(u | n1, n2-1).
// Counts fit comfortably in double for the exact-path sizes.
std::vector<double> exact_u_counts(std::size_t n1, std::size_t n2) {
    std::size_t umax = n1 * n2;
    std::vector<std::vector<double>> prev(n1 + 1), cur(n1 + 1);
    for (std::size_t m = 0; m <= n1; ++m) prev[m].assign(umax + 1, 0.0);
    prev[0][0] = 1.0; // n2' = 0: only u = 0 reachable, any m picks top ranks
    for (std::size_t m = 1; m <= n1; ++m) prev[m][0] = 1.0;
    for (std::size_t k = 1; k <= n2; ++k) {
        for (std::size_t m = 0; m <= n1; ++m) cur[m].assign(umax + 1, 0.0);
        cur[0][0] = 1.0;
        for (std::size_t m = 1; m <= n1; ++m)
            for (std::size_t u = 0; u <= m * k; ++u) {
                double v = prev[m][u]; // element of `a` below all k b's? recurrence on b count
                if (u >= k) v += cur[m - 1][u - k];
                cur[m][u] = v;
            }
        std::swap(prev, cur);
    }
    return prev[n1];
}

double binom(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i)
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    std::size_t n = x.size();
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) throw ConstantVariable("pearson input");
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

std::string to_string(Alternative a) {
    switch (a) {
    case Alternative::TwoSided: return "two_sided";
    case Alternative::Greater: return "greater";
    case Alternative::Less: return "less";
    }
    return "?";
}

std::string to_string(Magnitude m) {
    switch (m) {
    case Magnitude::Negligible: return "negligible";
    case Magnitude::Small: return "small";
    case Magnitude::Medium: return "medium";
    case Magnitude::Large: return "large";
    }
    return "?";
}

std::string to_string(PercentConvention c) {
    return c == PercentConvention::AfterDenominator ? "after_denominator" : "before_denominator";
}

Alternative alternative_from_string(const std::string& s) {
    if (s == "two_sided" || s == "two-sided") return Alternative::TwoSided;
    if (s == "greater") return Alternative::Greater;
    if (s == "less") return Alternative::Less;
    throw Error("unknown alternative: " + s);
}

PercentConvention percent_convention_from_string(const std::string& s) {
    if (s == "after_denominator" || s == "after") return PercentConvention::AfterDenominator;
    if (s == "before_denominator" || s == "before") return PercentConvention::BeforeDenominator;
    throw Error("unknown percent convention: " + s);
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
        double avg = static_cast<double>(i + j + 2) / 2.0; // 1-based
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

StatReport mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          Alternative alternative, double alpha) {
    if (a.empty() || b.empty()) throw EmptySample();
    std::size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    auto ranks = average_ranks(pooled);
    double ra = std::accumulate(ranks.begin(), ranks.begin() + static_cast<long>(n1), 0.0);
    double u = ra - static_cast<double>(n1 * (n1 + 1)) / 2.0;

    std::vector<double> sorted_pool = pooled;
    std::sort(sorted_pool.begin(), sorted_pool.end());
    bool tie_free = !has_ties(sorted_pool);

    StatReport rep;
    rep.test = TestKind::MannWhitneyU;
    rep.statistic = u;
    rep.alternative = alternative;
    rep.n1 = n1;
    rep.n2 = n2;
    rep.alpha = alpha;

    double p = 1.0;
    if (tie_free && std::max(n1, n2) <= 8) {
        auto counts = exact_u_counts(n1, n2);
        double total = binom(n, n1);
        auto u_int = static_cast<std::size_t>(std::llround(u));
        double below = 0.0, above = 0.0;
        for (std::size_t k = 0; k < counts.size(); ++k) {
            if (k <= u_int) below += counts[k];
            if (k >= u_int) above += counts[k];
        }
        switch (alternative) {
        case Alternative::Less: p = below / total; break;
        case Alternative::Greater: p = above / total; break;
        case Alternative::TwoSided:
            p = std::min(1.0, 2.0 * std::min(below, above) / total);
            break;
        }
    } else {
        double mu = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;
        std::map<double, std::size_t> groups;
        for (double v : sorted_pool) ++groups[v];
        double tcorr = 0.0;
        for (const auto& [_, t] : groups) {
            double td = static_cast<double>(t);
            tcorr += td * td * td - td;
        }
        double nn = static_cast<double>(n);
        double var = (static_cast<double>(n1) * static_cast<double>(n2) / 12.0) *
                     ((nn + 1.0) - tcorr / (nn * (nn - 1.0)));
        if (var <= 0.0) {
            p = 1.0;
        } else {
            double sd = std::sqrt(var);
            switch (alternative) {
            case Alternative::Less: p = normal_cdf((u - mu + 0.5) / sd); break;
            case Alternative::Greater: p = 1.0 - normal_cdf((u - mu - 0.5) / sd); break;
            case Alternative::TwoSided: {
                double z = 0.0;
                if (u > mu)
                    z = (u - mu - 0.5) / sd;
                else if (u < mu)
                    z = (u - mu + 0.5) / sd;
                p = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::fabs(z))));
                break;
            }
            }
        }
    }
    rep.p_value = p;
    rep.significant_at_alpha = p < alpha;
    return rep;
}

Magnitude delta_magnitude(double delta) {
    double d = std::fabs(delta);
    if (d < 0.147) return Magnitude::Negligible;
    if (d < 0.33) return Magnitude::Small;
    if (d < 0.474) return Magnitude::Medium;
    return Magnitude::Large;
}

EffectSize cliffs_delta(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw EmptySample();
    std::size_t n1 = a.size(), n2 = b.size();
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    auto ranks = average_ranks(pooled);
    double ra = std::accumulate(ranks.begin(), ranks.begin() + static_cast<long>(n1), 0.0);
    double u = ra - static_cast<double>(n1 * (n1 + 1)) / 2.0; // #gt + 0.5*#eq
    double prod = static_cast<double>(n1) * static_cast<double>(n2);
    EffectSize e;
    e.delta = (2.0 * u - prod) / prod;
    e.magnitude = delta_magnitude(e.delta);
    return e;
}

StatReport anderson_darling(std::span<const double> sample, double alpha) {
    constexpr std::size_t kMinN = 8;
    if (sample.size() < kMinN) throw SampleTooSmall(sample.size(), kMinN);
    std::vector<double> xs(sample.begin(), sample.end());
    std::sort(xs.begin(), xs.end());
    std::size_t n = xs.size();
    double nn = static_cast<double>(n);
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / nn;
    double sd = sample_sd(xs, mean);
    if (sd <= 0.0) throw ZeroVariance();

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double zi = (xs[i] - mean) / sd;
        double zr = (xs[n - 1 - i] - mean) / sd;
        double fi = std::clamp(normal_cdf(zi), 1e-300, 1.0 - 1e-16);
        double fr = std::clamp(normal_cdf(zr), 1e-300, 1.0 - 1e-16);
        acc += static_cast<double>(2 * i + 1) * (std::log(fi) + std::log1p(-fr));
    }
    double a2 = -nn - acc / nn;
    double a2_adj = a2 * (1.0 + 0.75 / nn + 2.25 / (nn * nn));

    StatReport rep;
    rep.test = TestKind::AndersonDarling;
    rep.statistic = a2_adj;
    rep.alternative = Alternative::TwoSided;
    rep.n1 = n;
    rep.n2 = 0;
    rep.alpha = alpha;
    rep.significant_at_alpha = a2_adj > kAdCritical05; // reject normality
    return rep;
}

PartialCorrelation partial_spearman(std::span<const double> x, std::span<const double> y,
                                    std::span<const double> control) {
    if (x.size() != y.size() || x.size() != control.size()) throw LengthMismatch();
    constexpr std::size_t kMinN = 5;
    std::size_t n = x.size();
    if (n < kMinN) throw SampleTooSmall(n, kMinN);
    auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double e) { return e == v[0]; });
    };
    if (constant(x)) throw ConstantVariable("x");
    if (constant(y)) throw ConstantVariable("y");
    if (constant(control)) throw ConstantVariable("control");

    auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    auto rz = average_ranks(control);
    double rxy = pearson(rx, ry);
    double rxz = pearson(rx, rz);
    double ryz = pearson(ry, rz);
    double denom = (1.0 - rxz * rxz) * (1.0 - ryz * ryz);
    if (denom <= 0.0) throw DegenerateControl();
    double r = (rxy - rxz * ryz) / std::sqrt(denom);
    r = std::clamp(r, -1.0, 1.0);

    PartialCorrelation pc;
    pc.r = r;
    pc.n = n;
    pc.n_controls = 1;

    double df = static_cast<double>(n) - 3.0;
    if (std::fabs(r) >= 1.0) {
        pc.p_value = 0.0;
    } else {
        double t = r * std::sqrt(df / (1.0 - r * r));
        boost::math::students_t dist(df);
        pc.p_value = 2.0 * boost::math::cdf(dist, -std::fabs(t));
    }

    // Fisher z interval; SE = 1/sqrt(n - 3 - k) with k = 1 control.
    double se_df = static_cast<double>(n) - 4.0;
    double z = std::atanh(r);
    double half = kNormalQuantile975 / std::sqrt(se_df);
    pc.ci95 = {std::tanh(z - half), std::tanh(z + half)};
    return pc;
}

DescriptiveStats descriptive(std::span<const double> sample) {
    if (sample.empty()) throw EmptySample();
    DescriptiveStats d;
    d.n = sample.size();
    std::vector<double> xs(sample.begin(), sample.end());
    std::sort(xs.begin(), xs.end());
    d.min = xs.front();
    d.max = xs.back();
    d.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(d.n);
    d.median = d.n % 2 == 1 ? xs[d.n / 2] : 0.5 * (xs[d.n / 2 - 1] + xs[d.n / 2]);
    d.sd = sample_sd(xs, d.mean); // 0 for a single observation
    return d;
}

double percent_change(double before, double after, PercentConvention convention) {
    double denom = convention == PercentConvention::AfterDenominator ? after : before;
    if (denom == 0.0) throw ZeroDenominator();
    return (after - before) / denom;
}

std::vector<double> log1p_series(std::span<const double> values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
        if (v < 0.0) throw NegativeValue(v);
        out.push_back(std::log1p(v));
    }
    return out;
}

} // namespace debtlens::stats
