#ifndef SPDSIM_TEST_SUPPORT_HPP
#define SPDSIM_TEST_SUPPORT_HPP

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace spd_test {

/// Two-sided Kolmogorov-Smirnov statistic of samples against an analytic
/// CDF. Returns the max deviation D_n.
template <typename Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

/// KS critical value at significance alpha (asymptotic form).
inline double ks_critical(std::size_t n, double alpha) {
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

/// Chi-square critical value via the Wilson-Hilferty approximation.
inline double chi2_critical(double dof, double z_alpha) {
    const double a = 2.0 / (9.0 * dof);
    const double t = 1.0 - a + z_alpha * std::sqrt(a);
    return dof * t * t * t;
}

/// z for alpha = 1e-3 (one-sided).
inline constexpr double kZ_1e3 = 3.0902;

inline std::string temp_path(const std::string& name) {
    static std::uint64_t counter = 0;
    const auto dir = std::filesystem::temp_directory_path() / "spdsim_tests";
    std::filesystem::create_directories(dir);
    return (dir / (std::to_string(::getpid()) + "_" + std::to_string(counter++) + "_" + name))
        .string();
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace spd_test

#endif
