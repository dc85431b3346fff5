#include "fakebook/core/error.hpp"
#include "fakebook/stats/descriptives.hpp"
#include "fakebook/stats/nonparametric.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace fakebook;
using namespace fakebook::stats;

namespace {

const TestOptions kExact{TestOptions::Choice::exact, false};
const TestOptions kApprox{TestOptions::Choice::normal_approx, false};

/// Doubled U by direct pair counting: 2 per win, 1 per tie.
long long doubled_u(const std::vector<double>& a, const std::vector<double>& b) {
    long long u = 0;
    for (double x : a)
        for (double y : b) u += x > y ? 2 : x == y ? 1 : 0;
    return u;
}

struct Enumerated {
    double p = 0;
    double mean = 0;
    double variance = 0;
};

/// Every split of the pooled values into groups of size |a| and |b|.
Enumerated brute_force_mwu(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto n = pooled.size();
    const auto observed = doubled_u(a, b);
    long long total = 0, le = 0, ge = 0;
    double sum = 0, sum_sq = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != a.size()) continue;
        std::vector<double> ga, gb;
        for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1 ? ga : gb).push_back(pooled[i]);
        const auto u = doubled_u(ga, gb);
        ++total;
        le += u <= observed;
        ge += u >= observed;
        sum += u / 2.0;
        sum_sq += (u / 2.0) * (u / 2.0);
    }
    Enumerated e;
    e.p = std::min(1.0, 2.0 * std::min(le, ge) / static_cast<double>(total));
    e.mean = sum / static_cast<double>(total);
    e.variance = sum_sq / static_cast<double>(total) - e.mean * e.mean;
    return e;
}

/// Every assignment of signs to the ranked |d|.
Enumerated brute_force_wilcoxon(const std::vector<double>& diffs) {
    std::vector<double> mags;
    for (double d : diffs) mags.push_back(std::abs(d));
    const auto ranks = midranks(mags);
    const auto n = diffs.size();
    double observed = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (diffs[i] > 0) observed += ranks[i];
    long long le = 0, ge = 0;
    double sum = 0, sum_sq = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        double w = 0;
        for (std::size_t i = 0; i < n; ++i)
            if ((mask >> i) & 1) w += ranks[i];
        le += w <= observed + 1e-9;
        ge += w >= observed - 1e-9;
        sum += w;
        sum_sq += w * w;
    }
    const double total = std::ldexp(1.0, static_cast<int>(n));
    Enumerated e;
    e.p = std::min(1.0, 2.0 * std::min(le, ge) / total);
    e.mean = sum / total;
    e.variance = sum_sq / total - e.mean * e.mean;
    return e;
}

std::vector<double> random_sample(std::mt19937& rng, std::size_t n, int levels) {
    std::vector<double> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(static_cast<double>(rng() % levels));
    return v;
}

}  // namespace

TEST(Midranks, SpecExamples) {
    EXPECT_EQ(midranks(std::vector<double>{10, 20, 30}), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(midranks(std::vector<double>{5, 5, 8}), (std::vector<double>{1.5, 1.5, 3}));
    EXPECT_EQ(midranks(std::vector<double>{7, 7, 7, 7}), (std::vector<double>{2.5, 2.5, 2.5, 2.5}));
    EXPECT_EQ(tie_term(std::vector<double>{5, 5, 8}), 6);
}

TEST(Midranks, SumIsTriangular) {
    std::mt19937 rng(1);
    for (int iter = 0; iter < 500; ++iter) {
        const auto n = 1 + rng() % 40;
        const auto r = midranks(random_sample(rng, n, 1 + rng() % 10));
        EXPECT_DOUBLE_EQ(std::accumulate(r.begin(), r.end(), 0.0), n * (n + 1) / 2.0);
    }
}

TEST(MannWhitney, SpecExamples) {
    const auto r = mann_whitney_u(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6});
    EXPECT_EQ(r.u_a, 0);
    EXPECT_EQ(r.u_min, 0);
    EXPECT_EQ(r.method, Method::exact);
    EXPECT_NEAR(r.p_two_sided, 0.1, 1e-15);
    EXPECT_EQ(r.r_rank_biserial, -1);

    const std::vector<double> same{1, 2, 3, 4};
    const auto s = mann_whitney_u(same, same);
    EXPECT_EQ(s.u_a, 8);
    EXPECT_EQ(s.r_rank_biserial, 0);
}

TEST(MannWhitney, StressRowSample) {
    // B = 0..84; each A value k - 0.5 beats exactly k of them.
    std::vector<double> a, b;
    for (int i = 0; i < 85; ++i) b.push_back(i);
    for (int i = 0; i < 29; ++i) a.push_back(84.5);
    a.push_back(11.5);
    while (a.size() < 85) a.push_back(-0.5);
    const auto r = mann_whitney_u(a, b);
    EXPECT_EQ(r.u_a, 2477);
    EXPECT_EQ(r.u_min, 2477);
    EXPECT_NEAR(r.r_rank_biserial, 2.0 * 2477 / 7225 - 1, 1e-12);
    EXPECT_NEAR(r.r_rank_biserial, -0.3143, 1e-4);
    EXPECT_EQ(format_decimal(r.r_rank_biserial), "-.31");
    EXPECT_EQ(r.method, Method::normal_approx);
    EXPECT_LT(r.p_two_sided, 0.01);
}

TEST(MannWhitney, DegenerateAndInvalid) {
    const auto r = mann_whitney_u(std::vector<double>{3, 3}, std::vector<double>{3, 3, 3});
    EXPECT_EQ(r.p_two_sided, 1);
    EXPECT_EQ(r.r_rank_biserial, 0);
    EXPECT_EQ(r.z, 0);
    EXPECT_THROW(mann_whitney_u(std::vector<double>{}, std::vector<double>{1}), Error);
    EXPECT_THROW(mann_whitney_u(std::vector<double>{NAN}, std::vector<double>{1}), Error);
}

TEST(MannWhitney, AutomaticMethodChoice) {
    std::vector<double> a(10), b(10);
    std::iota(a.begin(), a.end(), 0);
    std::iota(b.begin(), b.end(), 10);
    EXPECT_EQ(mann_whitney_u(a, b).method, Method::exact);
    b.push_back(100);
    EXPECT_EQ(mann_whitney_u(a, b).method, Method::normal_approx);  // N = 21
    b.pop_back();
    b[0] = 0;
    EXPECT_EQ(mann_whitney_u(a, b).method, Method::normal_approx);  // tie
}

// Exact p against enumeration of every labeling, ties included.
TEST(MannWhitney, ExactMatchesBruteForce) {
    std::mt19937 rng(42);
    for (int iter = 0; iter < 500; ++iter) {
        const auto a = random_sample(rng, 1 + rng() % 7, 2 + rng() % 8);
        const auto b = random_sample(rng, 1 + rng() % 7, 2 + rng() % 8);
        const auto r = mann_whitney_u(a, b, kExact);
        const auto oracle = brute_force_mwu(a, b);
        ASSERT_NEAR(r.p_two_sided, oracle.p, 1e-12);
        EXPECT_EQ(2 * r.u_a, doubled_u(a, b));
        EXPECT_EQ(r.u_a + r.u_b, static_cast<double>(a.size() * b.size()));
        EXPECT_GT(r.p_two_sided, 0);
        EXPECT_LE(r.p_two_sided, 1);
    }
}

// The tie-corrected variance equals the variance of U over all labelings.
TEST(MannWhitney, TieCorrectedVarianceMatchesEnumeration) {
    std::mt19937 rng(43);
    for (int iter = 0; iter < 200; ++iter) {
        const auto a = random_sample(rng, 2 + rng() % 6, 2 + rng() % 5);
        const auto b = random_sample(rng, 2 + rng() % 6, 2 + rng() % 5);
        const auto oracle = brute_force_mwu(a, b);
        const auto r = mann_whitney_u(a, b, kApprox);
        const double na = a.size(), nb = b.size();
        EXPECT_NEAR(oracle.mean, na * nb / 2, 1e-9);
        if (oracle.variance < 1e-12) {
            EXPECT_EQ(r.z, 0);
            continue;
        }
        EXPECT_NEAR(r.z, (r.u_a - na * nb / 2) / std::sqrt(oracle.variance), 1e-9);
    }
}

TEST(MannWhitney, LabelSwapAntisymmetry) {
    std::mt19937 rng(44);
    for (int iter = 0; iter < 300; ++iter) {
        const auto a = random_sample(rng, 1 + rng() % 12, 6);
        const auto b = random_sample(rng, 1 + rng() % 12, 6);
        for (const auto& opts : {kExact, kApprox}) {
            const auto ab = mann_whitney_u(a, b, opts);
            const auto ba = mann_whitney_u(b, a, opts);
            EXPECT_DOUBLE_EQ(ba.u_a, ab.u_b);
            EXPECT_DOUBLE_EQ(ba.u_min, ab.u_min);
            EXPECT_NEAR(ba.r_rank_biserial, -ab.r_rank_biserial, 1e-12);
            EXPECT_NEAR(ba.p_two_sided, ab.p_two_sided, 1e-12);
        }
    }
}

TEST(MannWhitney, MonotoneTransformInvariance) {
    std::mt19937 rng(45);
    auto f = [](double x) { return std::exp(x / 3) + 7 * x * x * x; };
    for (int iter = 0; iter < 300; ++iter) {
        const auto a = random_sample(rng, 1 + rng() % 8, 9);
        const auto b = random_sample(rng, 1 + rng() % 8, 9);
        std::vector<double> fa, fb;
        for (double x : a) fa.push_back(f(x));
        for (double x : b) fb.push_back(f(x));
        const auto r1 = mann_whitney_u(a, b, kExact);
        const auto r2 = mann_whitney_u(fa, fb, kExact);
        EXPECT_EQ(r1.u_a, r2.u_a);
        EXPECT_EQ(r1.u_min, r2.u_min);
        EXPECT_EQ(r1.r_rank_biserial, r2.r_rank_biserial);
        EXPECT_EQ(r1.p_two_sided, r2.p_two_sided);
    }
}

TEST(MannWhitney, ApproximationCloseToExactWithCorrection) {
    std::mt19937 rng(46);
    TestOptions approx_cc = kApprox;
    approx_cc.continuity_correction = true;
    double worst = 0;
    for (int iter = 0; iter < 300; ++iter) {
        std::vector<double> pool(20);
        std::iota(pool.begin(), pool.end(), 0);
        std::shuffle(pool.begin(), pool.end(), rng);
        const std::vector<double> a(pool.begin(), pool.begin() + 10), b(pool.begin() + 10, pool.end());
        const auto exact = mann_whitney_u(a, b, kExact);
        const auto approx = mann_whitney_u(a, b, approx_cc);
        worst = std::max(worst, std::abs(exact.p_two_sided - approx.p_two_sided));
    }
    EXPECT_LE(worst, 0.01);
}

TEST(MannWhitney, ContinuityCorrectionShrinksZ) {
    const std::vector<double> a{1, 2, 3, 4, 9}, b{5, 6, 7, 8, 10};
    TestOptions cc = kApprox;
    cc.continuity_correction = true;
    const auto plain = mann_whitney_u(a, b, kApprox);
    const auto corrected = mann_whitney_u(a, b, cc);
    EXPECT_LT(std::abs(corrected.z), std::abs(plain.z));
    EXPECT_GT(corrected.p_two_sided, plain.p_two_sided);
}

TEST(RankBiserial, Examples) {
    EXPECT_EQ(rank_biserial(0, 3, 3), -1);
    EXPECT_EQ(rank_biserial(4.5, 3, 3), 0);
    EXPECT_EQ(rank_biserial(9, 3, 3), 1);
    EXPECT_NEAR(rank_biserial(2477, 85, 85), -0.31432, 1e-5);
    EXPECT_THROW(rank_biserial(-1, 3, 3), Error);
    EXPECT_THROW(rank_biserial(10, 3, 3), Error);
    EXPECT_THROW(rank_biserial(0, 0, 3), Error);
}

TEST(Wilcoxon, SpecExamples) {
    const auto r = wilcoxon_signed_rank(std::vector<double>{0, 0, 0}, std::vector<double>{1, 2, 3});
    EXPECT_EQ(r.w_minus, 0);
    EXPECT_EQ(r.w_plus, 6);
    EXPECT_EQ(r.method, Method::exact);
    EXPECT_NEAR(r.p_two_sided, 0.25, 1e-15);
    EXPECT_GT(r.z, 0);

    const std::vector<double> same{1, 2, 3};
    try {
        wilcoxon_signed_rank(same, same);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::validation);
    }
    EXPECT_THROW(wilcoxon_signed_rank(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
    EXPECT_THROW(wilcoxon_signed_rank(std::vector<double>{}, std::vector<double>{}), Error);
}

TEST(Wilcoxon, ZerosDropped) {
    const auto r = wilcoxon_signed_rank(std::vector<double>{5, 5, 1, 2}, std::vector<double>{5, 6, 1, 4});
    EXPECT_EQ(r.n_effective, 2u);
    EXPECT_EQ(r.w_plus + r.w_minus, 3);
}

TEST(Wilcoxon, ExactMatchesSignEnumeration) {
    std::mt19937 rng(47);
    for (int iter = 0; iter < 500; ++iter) {
        const auto n = 1 + rng() % 10;
        std::vector<double> mags(30);
        std::iota(mags.begin(), mags.end(), 1);
        std::shuffle(mags.begin(), mags.end(), rng);
        std::vector<double> pre, post, diffs;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = rng() % 2 ? mags[i] : -mags[i];
            pre.push_back(50);
            post.push_back(50 + d);
            diffs.push_back(d);
        }
        const auto r = wilcoxon_signed_rank(pre, post);
        ASSERT_EQ(r.method, Method::exact);
        ASSERT_NEAR(r.p_two_sided, brute_force_wilcoxon(diffs).p, 1e-12);
        EXPECT_DOUBLE_EQ(r.w_plus + r.w_minus, n * (n + 1) / 2.0);
    }
}

TEST(Wilcoxon, ExactWithTiesMatchesEnumeration) {
    std::mt19937 rng(48);
    for (int iter = 0; iter < 300; ++iter) {
        std::vector<double> pre, post, diffs;
        const auto n = 1 + rng() % 10;
        for (std::size_t i = 0; i < n; ++i) {
            double d = static_cast<double>(1 + rng() % 4);
            if (rng() % 2) d = -d;
            pre.push_back(0);
            post.push_back(d);
            diffs.push_back(d);
        }
        const auto r = wilcoxon_signed_rank(pre, post, kExact);
        const auto oracle = brute_force_wilcoxon(diffs);
        ASSERT_NEAR(r.p_two_sided, oracle.p, 1e-12);
        // Tie-corrected variance equals the enumerated variance of W+.
        const auto approx = wilcoxon_signed_rank(pre, post, kApprox);
        EXPECT_NEAR(approx.z, (r.w_plus - oracle.mean) / std::sqrt(oracle.variance), 1e-9);
    }
}

TEST(Wilcoxon, SwapNegatesZKeepsP) {
    std::mt19937 rng(49);
    for (int iter = 0; iter < 300; ++iter) {
        const auto pre = random_sample(rng, 3 + rng() % 20, 7);
        auto post = random_sample(rng, pre.size(), 7);
        post[0] = pre[0] + 1;
        for (const auto& opts : {kExact, kApprox}) {
            const auto fwd = wilcoxon_signed_rank(pre, post, opts);
            const auto back = wilcoxon_signed_rank(post, pre, opts);
            EXPECT_NEAR(back.z, -fwd.z, 1e-12);
            EXPECT_NEAR(back.p_two_sided, fwd.p_two_sided, 1e-12);
            EXPECT_DOUBLE_EQ(back.w_plus, fwd.w_minus);
        }
    }
}

TEST(NormalP, ClampedIntoUnitInterval) {
    EXPECT_EQ(normal_two_sided_p(0), 1);
    EXPECT_GT(normal_two_sided_p(60), 0);
    EXPECT_NEAR(normal_two_sided_p(1.959963984540054), 0.05, 1e-12);
}

TEST(Descriptives, SpecExamples) {
    const auto d = descriptives(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9});
    EXPECT_EQ(d.n, 8u);
    EXPECT_DOUBLE_EQ(d.mean, 5);
    ASSERT_TRUE(d.sd);
    EXPECT_NEAR(*d.sd, std::sqrt(32.0 / 7), 1e-12);
    EXPECT_NEAR(*d.sd, 2.138, 1e-3);
    EXPECT_DOUBLE_EQ(d.median, 4.5);

    const auto c = descriptives(std::vector<double>{3.5, 3.5, 3.5});
    EXPECT_EQ(c.mean, 3.5);
    EXPECT_EQ(*c.sd, 0);
    EXPECT_EQ(c.median, 3.5);

    const auto one = descriptives(std::vector<double>{7});
    EXPECT_FALSE(one.sd);
    EXPECT_EQ(format_mean_sd(one), "7.00 (-)");
    EXPECT_THROW(descriptives(std::vector<double>{}), Error);
}

TEST(Formatting, TableStyle) {
    EXPECT_EQ(format_decimal(-0.92), "-.92");
    EXPECT_EQ(format_decimal(1.06), "1.06");
    EXPECT_EQ(format_decimal(0.5), ".50");
    EXPECT_EQ(format_decimal(-0.001), ".00");
    EXPECT_EQ(format_decimal(2477.0, 1), "2477.0");
    EXPECT_EQ(format_mean_sd({85, -0.92, 1.06, 0}), "-.92 (1.06)");
    EXPECT_EQ(format_mean_sd({85, 0.59, 0.99, 0}), ".59 (.99)");
    EXPECT_EQ(format_p(0.0001), "<.01*");
    EXPECT_EQ(format_p(0.04), ".04*");
    EXPECT_EQ(format_p(0.14), ".14");
    EXPECT_EQ(format_p(0.05), ".05");
    EXPECT_EQ(format_p(1.0), "1.00");
}

// The M (SD) rendering of a constructed 85-value sample.
TEST(Formatting, EightyFiveCodes) {
    std::vector<double> codes;
    for (int i = 0; i < 85; ++i) codes.push_back(i % 5 - 2);
    const auto d = descriptives(codes);
    EXPECT_EQ(format_mean_sd(d), ".00 (1.42)");
}
