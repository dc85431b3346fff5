#include "fakebook/stats/nonparametric.hpp"

#include "fakebook/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace fakebook::stats {

std::string_view to_string(Method m) noexcept { return m == Method::exact ? "EXACT" : "NORMAL_APPROX"; }

namespace {

void require_finite(std::span<const double> values) {
    for (double v : values)
        if (!std::isfinite(v)) fail(ErrorCode::validation, "sample contains a non-finite value");
}

/// Probability mass of sums of doubled mid-ranks. Counts are long double;
/// exact while they stay below 2^64.
struct SumDistribution {
    std::vector<long double> counts;  // indexed by doubled sum
    long double total = 0;

    long double at_most(long long s) const {
        long double acc = 0;
        for (long long i = 0; i <= s && i < static_cast<long long>(counts.size()); ++i) acc += counts[i];
        return acc / total;
    }
    long double at_least(long long s) const {
        long double acc = 0;
        for (long long i = std::max(0LL, s); i < static_cast<long long>(counts.size()); ++i) acc += counts[i];
        return acc / total;
    }
    double two_sided(long long observed) const {
        const auto p = 2 * std::min(at_most(observed), at_least(observed));
        return static_cast<double>(std::min<long double>(1, p));
    }
};

std::vector<long long> doubled(const std::vector<double>& ranks) {
    std::vector<long long> out;
    out.reserve(ranks.size());
    for (double r : ranks) out.push_back(std::llround(2 * r));
    return out;
}

/// Distribution of the doubled rank sum of a size-k subset of `weights`.
SumDistribution subset_sum_distribution(const std::vector<long long>& weights, std::size_t k) {
    const auto max_sum = std::accumulate(weights.begin(), weights.end(), 0LL);
    std::vector<std::vector<long double>> dp(k + 1, std::vector<long double>(max_sum + 1, 0));
    dp[0][0] = 1;
    std::size_t seen = 0;
    for (auto w : weights) {
        ++seen;
        for (std::size_t j = std::min(seen, k); j >= 1; --j)
            for (long long s = max_sum; s >= w; --s) dp[j][s] += dp[j - 1][s - w];
    }
    SumDistribution d;
    d.counts = std::move(dp[k]);
    d.total = std::accumulate(d.counts.begin(), d.counts.end(), 0.0L);
    return d;
}

/// Distribution of the doubled sum over any subset (each weight in or out).
SumDistribution signed_sum_distribution(const std::vector<long long>& weights) {
    const auto max_sum = std::accumulate(weights.begin(), weights.end(), 0LL);
    std::vector<long double> dp(max_sum + 1, 0);
    dp[0] = 1;
    for (auto w : weights)
        for (long long s = max_sum; s >= w; --s) dp[s] += dp[s - w];
    SumDistribution d;
    d.counts = std::move(dp);
    d.total = std::ldexp(1.0L, static_cast<int>(weights.size()));
    return d;
}

double shrink(double deviation, bool continuity) {
    if (!continuity) return deviation;
    const double magnitude = std::max(0.0, std::abs(deviation) - 0.5);
    return std::copysign(magnitude, deviation);
}

}  // namespace

double normal_two_sided_p(double z) noexcept {
    const double p = std::erfc(std::abs(z) / std::sqrt(2.0));
    return std::clamp(p, std::numeric_limits<double>::min(), 1.0);
}

std::vector<double> midranks(std::span<const double> values) {
    const auto n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return values[i] < values[j]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double tie_term(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double term = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        term += t * t * t - t;
        i = j;
    }
    return term;
}

double rank_biserial(double u_a, std::size_t n_a, std::size_t n_b) {
    if (n_a == 0 || n_b == 0) fail(ErrorCode::validation, "rank-biserial correlation needs non-empty groups");
    const double pairs = static_cast<double>(n_a) * static_cast<double>(n_b);
    if (!(u_a >= 0 && u_a <= pairs))
        fail(ErrorCode::validation, fmt::format("U = {} outside [0, {}]", u_a, pairs));
    return 2 * u_a / pairs - 1;
}

UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, const TestOptions& options) {
    if (a.empty() || b.empty()) fail(ErrorCode::validation, "Mann-Whitney U test needs two non-empty groups");
    require_finite(a);
    require_finite(b);

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = midranks(pooled);

    UTestResult r;
    r.n_a = a.size();
    r.n_b = b.size();
    const double na = static_cast<double>(r.n_a), nb = static_cast<double>(r.n_b), n = na + nb;
    const double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + static_cast<long>(r.n_a), 0.0);
    r.u_a = rank_sum_a - na * (na + 1) / 2;
    r.u_b = na * nb - r.u_a;
    r.u_min = std::min(r.u_a, r.u_b);
    r.r_rank_biserial = rank_biserial(r.u_a, r.n_a, r.n_b);

    const double ties = tie_term(pooled);
    const double variance = na * nb / 12 * ((n + 1) - ties / (n * (n - 1)));
    if (variance > 0) r.z = shrink(r.u_a - na * nb / 2, options.continuity_correction) / std::sqrt(variance);

    bool exact = false;
    switch (options.method) {
        case TestOptions::Choice::exact: exact = true; break;
        case TestOptions::Choice::normal_approx: exact = false; break;
        case TestOptions::Choice::automatic: exact = pooled.size() <= kMannWhitneyExactMaxN && ties == 0; break;
    }

    if (exact) {
        r.method = Method::exact;
        const auto weights = doubled(ranks);
        const auto observed =
            std::accumulate(weights.begin(), weights.begin() + static_cast<long>(r.n_a), 0LL);
        r.p_two_sided = subset_sum_distribution(weights, r.n_a).two_sided(observed);
    } else {
        r.method = Method::normal_approx;
        r.p_two_sided = variance > 0 ? normal_two_sided_p(r.z) : 1.0;
    }
    return r;
}

UTestResult mann_whitney_u(const GroupSample& a, const GroupSample& b, const TestOptions& options) {
    return mann_whitney_u(std::span<const double>(a.values), std::span<const double>(b.values), options);
}

WTestResult wilcoxon_signed_rank(std::span<const double> pre, std::span<const double> post,
                                 const TestOptions& options) {
    if (pre.size() != post.size())
        fail(ErrorCode::validation,
             fmt::format("paired samples differ in length ({} vs {})", pre.size(), post.size()));
    if (pre.empty()) fail(ErrorCode::validation, "paired sample is empty");
    require_finite(pre);
    require_finite(post);

    std::vector<double> diffs;
    for (std::size_t i = 0; i < pre.size(); ++i)
        if (post[i] != pre[i]) diffs.push_back(post[i] - pre[i]);
    if (diffs.empty()) fail(ErrorCode::validation, "degenerate sample: every paired difference is zero");

    std::vector<double> magnitudes;
    for (double d : diffs) magnitudes.push_back(std::abs(d));
    const auto ranks = midranks(magnitudes);

    WTestResult r;
    r.n_effective = diffs.size();
    const double n = static_cast<double>(r.n_effective);
    for (std::size_t i = 0; i < diffs.size(); ++i) (diffs[i] > 0 ? r.w_plus : r.w_minus) += ranks[i];

    const double ties = tie_term(magnitudes);
    const double variance = n * (n + 1) * (2 * n + 1) / 24 - ties / 48;
    r.z = shrink(r.w_plus - n * (n + 1) / 4, options.continuity_correction) / std::sqrt(variance);

    bool exact = false;
    switch (options.method) {
        case TestOptions::Choice::exact: exact = true; break;
        case TestOptions::Choice::normal_approx: exact = false; break;
        case TestOptions::Choice::automatic: exact = r.n_effective <= kWilcoxonExactMaxN && ties == 0; break;
    }

    if (exact) {
        r.method = Method::exact;
        const auto weights = doubled(ranks);
        long long observed = 0;
        for (std::size_t i = 0; i < diffs.size(); ++i)
            if (diffs[i] > 0) observed += weights[i];
        r.p_two_sided = signed_sum_distribution(weights).two_sided(observed);
    } else {
        r.method = Method::normal_approx;
        r.p_two_sided = normal_two_sided_p(r.z);
    }
    return r;
}

WTestResult wilcoxon_signed_rank(const PairedSample& paired, const TestOptions& options) {
    return wilcoxon_signed_rank(std::span<const double>(paired.pre), std::span<const double>(paired.post), options);
}

}  // namespace fakebook::stats
