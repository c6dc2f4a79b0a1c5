// Small numerical utilities shared across modules: adaptive quadrature,
// log-gamma, Gauss-Legendre rules, hashing, a minimal parallel_for.
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace kinchem {

// Adaptive Simpson quadrature of f on [a,b]. Relative tolerance on the
// running estimate, with an absolute floor for integrals near zero.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10, double abs_floor = 1e-300,
                        int max_depth = 48);

// Lanczos log-gamma, valid for x > 0. Relative accuracy ~1e-14; validated
// in tests against integer factorials.
double lgamma_lanczos(double x);
double gamma_lanczos(double x);

// Gauss-Legendre nodes/weights on [-1,1], computed by Newton iteration on
// the Legendre recurrence.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

// FNV-1a 64-bit content hash (manifest file inventory).
std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::uint64_t fnv1a64(std::string_view text);

// Chunked parallel map over [0,n). threads <= 1 runs inline. Chunking is a
// fixed function of (n, threads) so results are reproducible per thread count.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t begin, std::size_t end, int chunk)>& body);

// Two-sided Kolmogorov-Smirnov statistic of samples against a CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Asymptotic KS critical value at significance alpha in {0.05, 0.01}.
double ks_critical(std::size_t n, double alpha);

// Pearson chi-square statistic for equiprobable bins.
double chi_square_uniform(std::span<const std::size_t> bin_counts);

}  // namespace kinchem
