#pragma once

#include "fakebook/domain/model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace fakebook::stats {

enum class Method { exact, normal_approx };
std::string_view to_string(Method m) noexcept;

struct TestOptions {
    enum class Choice { automatic, exact, normal_approx };
    /// automatic: Mann-Whitney is exact for N <= 20 without ties, Wilcoxon for
    /// n <= 12 without tied |d|; otherwise the tie-corrected normal law.
    Choice method = Choice::automatic;
    /// Shrinks |statistic - mean| by 0.5 in the normal approximation.
    bool continuity_correction = false;
};

inline constexpr std::size_t kMannWhitneyExactMaxN = 20;
inline constexpr std::size_t kWilcoxonExactMaxN = 12;

/// Ranks 1..n, tied values sharing the mean of their positions.
std::vector<double> midranks(std::span<const double> values);

/// Sum over tie blocks of (t^3 - t).
double tie_term(std::span<const double> values);

struct GroupSample {
    Condition label = Condition::many_likes;
    std::vector<double> values;
};

struct PairedSample {
    std::vector<double> pre;
    std::vector<double> post;
};

struct UTestResult {
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    /// Pairs with a > b, ties counting one half.
    double u_a = 0;
    double u_b = 0;
    double u_min = 0;
    double p_two_sided = 1;
    /// 2 u_a / (n_a n_b) - 1: positive when group A tends to rank higher.
    double r_rank_biserial = 0;
    /// Standardised u_a under the tie-corrected normal law; 0 when degenerate.
    double z = 0;
    Method method = Method::normal_approx;
};

/// Two-sided Mann-Whitney U test of A against B. Throws validation when
/// either group is empty. When all values are identical the result is
/// degenerate: p = 1 and r = 0.
UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, const TestOptions& options = {});
UTestResult mann_whitney_u(const GroupSample& a, const GroupSample& b, const TestOptions& options = {});

/// Throws validation when u_a lies outside [0, n_a n_b] or a size is zero.
double rank_biserial(double u_a, std::size_t n_a, std::size_t n_b);

struct WTestResult {
    /// Pairs with a non-zero difference.
    std::size_t n_effective = 0;
    double w_plus = 0;
    double w_minus = 0;
    /// Positive when post tends to exceed pre.
    double z = 0;
    double p_two_sided = 1;
    Method method = Method::normal_approx;
};

/// Two-sided Wilcoxon signed-rank test on post - pre. Zero differences are
/// dropped. Throws validation on unequal lengths, empty input, or when every
/// difference is zero.
WTestResult wilcoxon_signed_rank(std::span<const double> pre, std::span<const double> post,
                                 const TestOptions& options = {});
WTestResult wilcoxon_signed_rank(const PairedSample& paired, const TestOptions& options = {});

/// Two-sided normal p-value, clamped into (0, 1].
double normal_two_sided_p(double z) noexcept;

}  // namespace fakebook::stats
