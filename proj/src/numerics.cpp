#include "kinchem/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace kinchem {

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, double abs_floor, int max_depth) {
    if (!(b > a)) return 0.0;
    // Coarse pass over a fixed panel set to seed the tolerance; the integrands
    // used here are smooth but can be sharply localized.
    const int panels = 32;
    double coarse = 0.0;
    const double h = (b - a) / panels;
    std::vector<double> fv(2 * panels + 1);
    for (int i = 0; i <= 2 * panels; ++i) fv[i] = f(a + 0.5 * h * i);
    for (int i = 0; i < panels; ++i)
        coarse += simpson(fv[2 * i], fv[2 * i + 1], fv[2 * i + 2], h);
    const double tol = std::max(std::abs(coarse) * rel_tol, abs_floor);
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double x0 = a + h * i, x1 = x0 + h;
        const double whole = simpson(fv[2 * i], fv[2 * i + 1], fv[2 * i + 2], h);
        total += adaptive_simpson_rec(f, x0, x1, fv[2 * i], fv[2 * i + 1], fv[2 * i + 2],
                                      whole, tol / panels, max_depth);
    }
    return total;
}

double lgamma_lanczos(double x) {
    if (!(x > 0.0)) throw std::domain_error("lgamma_lanczos: requires x > 0");
    // g = 7, n = 9 coefficient set.
    static const double g = 7.0;
    static const double c[9] = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // Reflection: Gamma(x)Gamma(1-x) = pi/sin(pi x)
        return std::log(M_PI / std::sin(M_PI * x)) - lgamma_lanczos(1.0 - x);
    }
    const double z = x - 1.0;
    double acc = c[0];
    for (int i = 1; i < 9; ++i) acc += c[i] / (z + i);
    const double t = z + g + 0.5;
    return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t + std::log(acc);
}

double gamma_lanczos(double x) { return std::exp(lgamma_lanczos(x)); }

GaussLegendre gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1");
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        gl.nodes[i] = -x;
        gl.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        gl.weights[i] = w;
        gl.weights[n - 1 - i] = w;
    }
    return gl;
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64(std::string_view text) {
    return fnv1a64(std::span<const unsigned char>(
        reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t, int)>& body) {
    if (n == 0) return;
    if (threads <= 1) {
        body(0, n, 0);
        return;
    }
    const int nt = std::min<std::size_t>(threads, n);
    const std::size_t chunk = (n + nt - 1) / nt;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        const std::size_t b = t * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&body, b, e, t] { body(b, e, t); });
    }
    for (auto& th : pool) th.join();
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        d = std::max(d, std::abs(F - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - F));
    }
    return d;
}

double ks_critical(std::size_t n, double alpha) {
    // Asymptotic Kolmogorov quantiles c(alpha)/sqrt(n).
    double c;
    if (alpha == 0.05)
        c = 1.3581;
    else if (alpha == 0.01)
        c = 1.6276;
    else
        c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    return c / std::sqrt(static_cast<double>(n));
}

double chi_square_uniform(std::span<const std::size_t> bin_counts) {
    std::size_t total = 0;
    for (auto c : bin_counts) total += c;
    if (bin_counts.empty() || total == 0)
        throw std::invalid_argument("chi_square_uniform: empty bins");
    const double expected = static_cast<double>(total) / bin_counts.size();
    double chi2 = 0.0;
    for (auto c : bin_counts) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    return chi2;
}

}  // namespace kinchem
