#include "fakebook/stats/descriptives.hpp"

#include "fakebook/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <fmt/format.h>

namespace fakebook::stats {

Descriptives descriptives(std::span<const double> values) {
    if (values.empty()) fail(ErrorCode::validation, "descriptives need at least one value");
    Descriptives d;
    d.n = values.size();
    const double n = static_cast<double>(d.n);
    d.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (d.n >= 2) {
        double ss = 0;
        for (double v : values) ss += (v - d.mean) * (v - d.mean);
        d.sd = std::sqrt(ss / (n - 1));
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto mid = d.n / 2;
    d.median = d.n % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
    return d;
}

std::string format_decimal(double value, int decimals) {
    auto s = fmt::format("{:.{}f}", value, decimals);
    if (s == fmt::format("-{:.{}f}", 0.0, decimals)) s.erase(0, 1);
    if (s.starts_with("0.")) return s.substr(1);
    if (s.starts_with("-0.")) return "-" + s.substr(2);
    return s;
}

std::string format_mean_sd(const Descriptives& d) {
    return fmt::format("{} ({})", format_decimal(d.mean), d.sd ? format_decimal(*d.sd) : "-");
}

std::string format_p(double p) {
    if (p < 0.01) return "<.01*";
    return format_decimal(p) + (p < 0.05 ? "*" : "");
}

}  // namespace fakebook::stats
