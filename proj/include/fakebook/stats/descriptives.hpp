#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace fakebook::stats {

struct Descriptives {
    std::size_t n = 0;
    double mean = 0;
    /// Sample standard deviation (n - 1); absent for n = 1.
    std::optional<double> sd;
    double median = 0;
};

/// Throws validation on empty input.
Descriptives descriptives(std::span<const double> values);

/// Two decimals without the leading zero: -0.92 -> "-.92", 1.06 -> "1.06".
std::string format_decimal(double value, int decimals = 2);

/// "M (SD)" as in results tables, e.g. "-.92 (1.06)"; SD shown as "-" when absent.
std::string format_mean_sd(const Descriptives& d);

/// "<.01*" below .01, otherwise two decimals with "*" when below .05.
std::string format_p(double p);

}  // namespace fakebook::stats
