#include "kinchem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kinchem/numerics.hpp"

namespace kinchem {

namespace {

const char* PASS = "PASS";
const char* FAIL = "FAIL";

CheckItem make_item(std::string check, nlohmann::json inputs, double lhs, double rhs, double tol,
                    std::string note = {}) {
    CheckItem it;
    it.check = std::move(check);
    it.inputs = std::move(inputs);
    it.lhs = lhs;
    it.rhs = rhs;
    it.ratio = rhs != 0 ? lhs / rhs : std::numeric_limits<double>::infinity();
    it.tolerance = tol;
    it.verdict = lhs <= rhs * (1.0 + tol) ? PASS : FAIL;
    it.note = std::move(note);
    return it;
}

}  // namespace

bool Report::passed() const {
    for (const auto& it : items)
        if (it.verdict == FAIL) return false;
    return true;
}

nlohmann::json Report::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& it : items) {
        arr.push_back({{"check", it.check},
                       {"inputs", it.inputs},
                       {"lhs", it.lhs},
                       {"rhs", it.rhs},
                       {"ratio", it.ratio},
                       {"tolerance", it.tolerance},
                       {"verdict", it.verdict},
                       {"note", it.note}});
    }
    return {{"name", name}, {"passed", passed()}, {"items", arr}};
}

double mixed_norm(const KineticDensity& f, const MixedNormSpec& spec) {
    const std::size_t nc = f.grid.cells();
    const std::size_t nv = f.vel.size();
    const double vol = f.grid.cell_volume();
    const bool p_inf = std::isinf(spec.outer_p);
    const bool q_inf = std::isinf(spec.inner_q);

    auto accumulate = [](double acc, double val, double w, double p, bool inf) {
        if (inf) return std::max(acc, std::abs(val));
        return acc + w * std::pow(std::abs(val), p);
    };
    auto finish = [](double acc, double p, bool inf) {
        return inf ? acc : std::pow(acc, 1.0 / p);
    };

    if (spec.order == MixedNormSpec::Order::XOuter) {
        // inner over v per cell, outer over x
        double outer = 0;
        for (std::size_t c = 0; c < nc; ++c) {
            double inner = 0;
            for (std::size_t j = 0; j < nv; ++j)
                inner = accumulate(inner, f.f[j * nc + c], f.vel.weights[j], spec.inner_q, q_inf);
            inner = finish(inner, spec.inner_q, q_inf);
            outer = accumulate(outer, inner, vol, spec.outer_p, p_inf);
        }
        return finish(outer, spec.outer_p, p_inf);
    }
    double outer = 0;
    for (std::size_t j = 0; j < nv; ++j) {
        double inner = 0;
        const double* fj = f.f.data() + j * nc;
        for (std::size_t c = 0; c < nc; ++c)
            inner = accumulate(inner, fj[c], vol, spec.inner_q, q_inf);
        inner = finish(inner, spec.inner_q, q_inf);
        outer = accumulate(outer, inner, f.vel.weights[j], spec.outer_p, p_inf);
    }
    return finish(outer, spec.outer_p, p_inf);
}

Report verify_dispersion(const KineticDensity& f0, double p, std::span<const double> t_grid,
                         double tol) {
    const int d = f0.grid.dim;
    const double d_conj = static_cast<double>(d) / (d - 1);
    Report rep;
    rep.name = "dispersion";
    if (!(p >= 1.0) || !(p < d_conj))
        throw std::invalid_argument("verify_dispersion: requires 1 <= p < d' = d/(d-1)");
    if (f0.vel.domain != VelocitySet::Domain::Ball)
        throw std::invalid_argument(
            "verify_dispersion: the decay rate d/p' needs a velocity set with d-dimensional "
            "measure; use a disk/ball set");
    const double lambda = d * (1.0 - 1.0 / p);
    // ||f0||_{L^1_x L^p_v}: outer x with exponent 1, inner v with exponent p.
    const double rhs_const = mixed_norm(f0, {1.0, p, MixedNormSpec::Order::XOuter});
    const double t_box = 0.5 * f0.grid.extent;
    const double t_min = f0.grid.spacing();  // displacements under one cell are unresolved

    for (double t : t_grid) {
        nlohmann::json inputs{{"t", t}, {"p", p}, {"lambda", lambda}};
        if (!(t > 0) || t < t_min) {
            CheckItem it;
            it.check = "dispersion";
            it.inputs = inputs;
            it.tolerance = tol;
            it.verdict = "INAPPLICABLE";
            it.note = "t below grid resolution; the right side diverges as t -> 0";
            rep.items.push_back(it);
            continue;
        }
        KineticDensity ft = f0;
        transport_in_place(ft, t);
        const double lhs = mixed_norm(ft, {p, 1.0, MixedNormSpec::Order::XOuter});
        const double rhs = std::pow(t, -lambda) * rhs_const;
        CheckItem it = make_item("dispersion", inputs, lhs, rhs, tol);
        if (t > t_box) {
            it.verdict = "EXCLUDED";
            it.note = "beyond box-crossing time L/2: torus saturation, not counted";
            if (lhs > rhs * (1.0 + tol)) it.note += " (ratio exceeds bound here)";
        }
        rep.items.push_back(it);
    }
    return rep;
}

Report verify_symmetrization(const KineticRunResult& run, std::span<const double> p_list,
                             double tol) {
    Report rep;
    rep.name = "symmetrization";
    if (!kernel_is_symmetric(run.kernel))
        throw std::invalid_argument(
            "verify_symmetrization: run used a kernel that is not symmetric in (v, v')");
    for (double p : p_list) {
        std::ostringstream col;
        col << "f_L" << p;
        if (!run.diag.has_column(col.str()))
            throw std::invalid_argument("verify_symmetrization: diagnostics lack column " +
                                        col.str() + "; track it in the run options");
        const std::vector<double> norms = run.diag.column(col.str());
        double worst = 0;
        std::size_t worst_step = 0;
        for (std::size_t i = 1; i < norms.size(); ++i) {
            const double inc = norms[i] - norms[i - 1];
            if (inc > worst) {
                worst = inc;
                worst_step = i;
            }
        }
        nlohmann::json inputs{{"p", p}, {"steps", norms.size() - 1}};
        CheckItem it;
        it.check = "symmetrization-monotone";
        it.inputs = inputs;
        it.lhs = worst;  // largest per-step increase
        it.rhs = tol;
        it.ratio = worst / tol;
        it.tolerance = tol;
        it.verdict = worst <= tol ? PASS : FAIL;
        std::ostringstream note;
        note << "max per-step increase of ||f||_{L^" << p << "} ";
        if (worst > tol) note << "at step " << worst_step;
        it.note = note.str();
        rep.items.push_back(it);
    }
    return rep;
}

EllipticSplit elliptic_split_norms(double p, double R) {
    const double pp = p / (p - 1.0);
    if (!(pp < 3.0)) throw std::invalid_argument("elliptic_split_norms: needs p' < 3");
    // ||G chi_{<=R}||_{p'} with G = e^{-r}/(4 pi r), radial quadrature.
    auto short_kernel = [pp](double r) {
        const double g = std::exp(-r) / (4.0 * M_PI * r);
        return std::pow(g, pp) * 4.0 * M_PI * r * r;
    };
    EllipticSplit out;
    out.short_lp = std::pow(adaptive_simpson(short_kernel, 1e-12, R, 1e-10), 1.0 / pp);
    out.long_sup = std::exp(-R) / (4.0 * M_PI * R);
    return out;
}

Report verify_elliptic_sup(const ScalarField& rho, double p) {
    Report rep;
    rep.name = "elliptic-sup";
    if (rho.grid.dim != 3) throw std::invalid_argument("verify_elliptic_sup: needs dim = 3");
    if (!(p > 1.5)) {
        CheckItem it;
        it.check = "elliptic-sup";
        it.inputs = {{"p", p}};
        it.verdict = "INAPPLICABLE";
        it.note = "requires p > 3/2 so that p' < 3";
        rep.items.push_back(it);
        return rep;
    }
    const double pp = p / (p - 1.0);
    const ScalarField S = solve_screened_poisson(rho);
    const double lhs = S.max_abs();
    const double mass = rho.integral();
    const double rho_p = rho.lp_norm(p);
    const double R = std::pow(mass / rho_p, pp / 3.0);
    const EllipticSplit split = elliptic_split_norms(p, R);
    const double rhs = rho_p * split.short_lp + mass * split.long_sup;
    const double c_eff = rhs / (std::pow(mass, 1.0 - pp / 3.0) * std::pow(rho_p, pp / 3.0));
    std::ostringstream note;
    note << "assembled C = " << c_eff << " at R = " << R;
    rep.items.push_back(make_item("elliptic-sup",
                                  {{"p", p}, {"mass", mass}, {"rho_Lp", rho_p}, {"R", R}}, lhs,
                                  rhs, 0.0, note.str()));
    return rep;
}

Report bessel_log_bound_table(std::span<const double> r_grid, std::vector<BesselRow>* table) {
    Report rep;
    rep.name = "bessel-log-bound";
    const double A = bessel_bound_A();
    // Exact small-r asymptotics of the kernel's own integral:
    // G(r) = -log(r)/(2 pi) + (log 2 - gamma_E)/(2 pi) + o(1).
    const double asympt_const = (std::log(2.0) - std::numbers::egamma) / (2.0 * M_PI);
    double max_residual_small_r = 0;
    double r_smallest = std::numeric_limits<double>::infinity();
    for (double r : r_grid) {
        if (!(r > 0) || r > 1.0)
            throw std::invalid_argument("bessel_log_bound_table: grid must lie in (0, 1]");
        const double g = green_function(2, r);
        const double bound = A + std::abs(std::log(r)) / (2.0 * M_PI);
        const double residual = g + std::log(r) / (2.0 * M_PI) - asympt_const;
        if (table) table->push_back({r, g, bound, residual});
        rep.items.push_back(make_item("bessel-log-bound", {{"r", r}, {"A", A}}, g, bound, 0.0));
        if (r < r_smallest) {
            r_smallest = r;
            max_residual_small_r = std::abs(residual);
        }
    }
    CheckItem it;
    it.check = "bessel-asymptotics";
    it.inputs = {{"r", r_smallest}, {"constant", asympt_const}};
    it.lhs = max_residual_small_r;
    it.rhs = 1e-4;
    it.ratio = it.lhs / it.rhs;
    it.tolerance = 0;
    it.verdict = it.lhs <= it.rhs ? PASS : FAIL;
    it.note = "residual against the exact asymptotics at the smallest grid point";
    rep.items.push_back(it);
    return rep;
}

Report gamma_stirling_checks(std::span<const double> x_grid, std::span<const double> beta_grid,
                             int n_max) {
    Report rep;
    rep.name = "gamma-stirling";
    for (double x : x_grid) {
        for (double beta : beta_grid) {
            if (!(x > 0) || !(beta >= 0))
                throw std::invalid_argument("gamma_stirling_checks: grids must be positive");
            const double lhs = std::pow(x, beta) / gamma_lanczos(beta + 1.0);
            const double rhs = std::exp(x);
            CheckItem it = make_item("exp-dominates-power", {{"x", x}, {"beta", beta}}, lhs, rhs,
                                     0.0, "strict: e^x > x^beta / Gamma(beta+1)");
            if (lhs >= rhs) it.verdict = FAIL;  // strict inequality
            rep.items.push_back(it);
        }
    }
    // Stirling ratio monotone decreasing toward 1 within [1, 1.10].
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true, in_window = true;
    double last_ratio = 0;
    for (int n = 2; n <= n_max; ++n) {
        const double lg = lgamma_lanczos(n + 1.0);
        const double stirling = 0.5 * std::log(2.0 * M_PI * n) + n * (std::log(n) - 1.0);
        const double ratio = std::exp(lg - stirling);
        if (ratio > prev + 1e-13) monotone = false;
        if (ratio < 1.0 - 1e-12 || ratio > 1.10) in_window = false;
        prev = ratio;
        last_ratio = ratio;
    }
    CheckItem it;
    it.check = "stirling-ratio";
    it.inputs = {{"n_max", n_max}};
    it.lhs = last_ratio;
    it.rhs = 1.0;
    it.ratio = last_ratio;
    it.tolerance = 0.10;
    it.verdict = (monotone && in_window) ? PASS : FAIL;
    it.note = monotone ? "monotone decrease within [1, 1.10]" : "monotonicity violated";
    rep.items.push_back(it);
    return rep;
}

SeriesProbeResult series_convergence_probe(double beta, double mu, double mass, int j_max,
                                           double delta) {
    if (!(beta > 0) || beta > 1.0)
        throw std::invalid_argument("series_convergence_probe: beta in (0, 1]");
    if (!(mu > 2.0)) throw std::invalid_argument("series_convergence_probe: mu > 2 required");
    if (!(mass > 0)) throw std::invalid_argument("series_convergence_probe: mass > 0");
    SeriesProbeResult res;
    res.report.name = "series-root-test";
    const double A = bessel_bound_A();
    const double log_2pi = std::log(2.0 * M_PI);
    double log_sum = -std::numeric_limits<double>::infinity();
    res.root_ratio.reserve(j_max);
    for (int j = 1; j <= j_max; ++j) {
        const double muj = mu * j;
        // bracket = A pi^{1/(mu j)} + (1/2pi) (2 pi)^{1/(mu j)} Gamma(mu j + 1)^{1/(mu j)}
        const double gamma_part =
            std::exp(log_2pi / muj - log_2pi + lgamma_lanczos(muj + 1.0) / muj);
        const double bracket = A * std::exp(std::log(M_PI) / muj) + gamma_part;
        const double log_term =
            -lgamma_lanczos(j + 1.0) + j * beta * (std::log(bracket) + std::log(mass));
        // log-sum-exp accumulation keeps partial sums overflow-safe
        if (log_sum == -std::numeric_limits<double>::infinity())
            log_sum = log_term;
        else
            log_sum = std::max(log_sum, log_term) +
                      std::log1p(std::exp(-std::abs(log_sum - log_term)));
        res.root_ratio.push_back(std::exp(log_term / j));
    }
    res.log_partial_sum = log_sum;
    res.limit_estimate = res.root_ratio.back();

    const int window = std::min(20, j_max);
    double wmin = std::numeric_limits<double>::infinity(), wmax = 0;
    for (int j = j_max - window; j < j_max; ++j) {
        wmin = std::min(wmin, res.root_ratio[j]);
        wmax = std::max(wmax, res.root_ratio[j]);
    }
    if (wmax < 1.0 - delta)
        res.verdict = "CONVERGENT";
    else if (wmin > 1.0)
        res.verdict = "DIVERGENT";
    else
        res.verdict = "INCONCLUSIVE";

    CheckItem it;
    it.check = "series-root-test";
    it.inputs = {{"beta", beta}, {"mu", mu}, {"M", mass}, {"j_max", j_max}};
    it.lhs = res.limit_estimate;
    it.rhs = 1.0 - delta;
    it.ratio = res.limit_estimate;
    it.tolerance = delta;
    it.verdict = res.verdict == "INCONCLUSIVE" ? "FAIL" : "PASS";
    std::ostringstream note;
    note << res.verdict << "; beta = 1 limit would be M mu / 2 pi = "
         << mass * mu / (2.0 * M_PI);
    it.note = note.str();
    res.report.items.push_back(it);
    return res;
}

StrichartzTuple strichartz_paper_tuple() {
    const long double s2 = sqrtl(2.0L);
    return {1.0L + s2, (9.0L + 3.0L * s2) / 7.0L, 3.0L * (s2 - 1.0L), 1.5L};
}

Report strichartz_exponent_check(const StrichartzTuple& t, double residual_tol) {
    Report rep;
    rep.name = "strichartz-exponents";
    const long double q = t.q, p = t.p, r = t.r, a = t.a;
    const long double pp = p / (p - 1.0L), rp = r / (r - 1.0L), qp = q / (q - 1.0L);
    auto push = [&](const char* name, long double residual, bool is_inequality, bool ok) {
        CheckItem it;
        it.check = name;
        it.inputs = {{"q", static_cast<double>(q)},
                     {"p", static_cast<double>(p)},
                     {"r", static_cast<double>(r)},
                     {"a", static_cast<double>(a)}};
        it.lhs = static_cast<double>(residual);
        it.rhs = is_inequality ? 0.0 : residual_tol;
        it.ratio = is_inequality ? 0.0 : std::abs(it.lhs) / residual_tol;
        it.tolerance = residual_tol;
        it.verdict = ok ? PASS : FAIL;
        rep.items.push_back(it);
    };
    push("ordering 1<=r<=p", 0.0L, true, 1.0L <= r && r <= p);
    const long double window = 1.0L / r - 1.0L / p;
    push("window 0<=1/r-1/p<1/3", window, true, window >= 0.0L && window < 1.0L / 3.0L);
    push("sum 1<=1/r+1/p", 1.0L / r + 1.0L / p - 1.0L, true, 1.0L / r + 1.0L / p >= 1.0L);
    push("2/q=3(1/r-1/p)", 2.0L / q - 3.0L * window, false,
         fabsl(2.0L / q - 3.0L * window) <= residual_tol);
    push("a=2pr/(p+r)", a - 2.0L * p * r / (p + r), false,
         fabsl(a - 2.0L * p * r / (p + r)) <= residual_tol);
    push("p>3/2", p - 1.5L, true, p > 1.5L);
    push("q'(1+p'/r')=q", qp * (1.0L + pp / rp) - q, false,
         fabsl(qp * (1.0L + pp / rp) - q) <= residual_tol);
    push("1/p+1/r=4/3", 1.0L / p + 1.0L / r - 4.0L / 3.0L, false,
         fabsl(1.0L / p + 1.0L / r - 4.0L / 3.0L) <= residual_tol);
    return rep;
}

Report verify_sublinear_closure(const DiagnosticsSeries& diag, double alpha, double p, double q) {
    Report rep;
    rep.name = "sublinear-closure";
    if (!(alpha > 0) || !(alpha < 1) || !(p > 1.5))
        throw std::invalid_argument("verify_sublinear_closure: needs 0 < alpha < 1 and p > 3/2");
    const double q_expected = 1.0 / (alpha / 3.0 + 1.0 / p);
    if (std::abs(1.0 / q - (alpha / 3.0 + 1.0 / p)) > 1e-12)
        throw std::invalid_argument(
            "verify_sublinear_closure: q violates 1/q = alpha/3 + 1/p (expected q = " +
            std::to_string(q_expected) + ")");
    const double pp = p / (p - 1.0);
    const double qp = q / (q - 1.0);
    const double identity = pp * alpha / 3.0 + pp / qp;  // must equal 1
    rep.items.push_back(make_item("exponent-identity",
                                  {{"alpha", alpha}, {"p", p}, {"q", q}},
                                  std::abs(identity - 1.0), 1e-14, 0.0,
                                  "p' alpha/3 + p'/q' = 1"));

    // trapezoid accumulation of int_0^t (t-s)^{-alpha} ||rho(s)||_p ds, the
    // final singular panel integrated exactly against the constant value
    const std::vector<double> tcol = diag.column("t");
    std::ostringstream cn;
    cn << "rho_L" << p;
    const std::vector<double> rho_p = diag.column(cn.str());
    double sup_integral = 0;
    for (std::size_t n = 1; n < tcol.size(); ++n) {
        const double t = tcol[n];
        double acc = 0;
        for (std::size_t m = 0; m + 1 < n; ++m) {
            const double s0 = tcol[m], s1 = tcol[m + 1];
            const double k0 = std::pow(t - s0, -alpha), k1 = std::pow(t - s1, -alpha);
            acc += 0.5 * (k0 * rho_p[m] + k1 * rho_p[m + 1]) * (s1 - s0);
        }
        const double hlast = t - tcol[n - 1];
        acc += rho_p[n] * std::pow(hlast, 1.0 - alpha) / (1.0 - alpha);
        sup_integral = std::max(sup_integral, acc);
    }
    CheckItem it;
    it.check = "singular-accumulation-bounded";
    it.inputs = {{"alpha", alpha}, {"p", p}};
    it.lhs = sup_integral;
    it.rhs = std::numeric_limits<double>::infinity();
    it.ratio = 0;
    it.tolerance = 0;
    it.verdict = std::isfinite(sup_integral) ? PASS : FAIL;
    std::ostringstream note;
    note << "sup over t of the accumulated integral = " << sup_integral;
    it.note = note.str();
    rep.items.push_back(it);
    return rep;
}

Report verify_moment_bound(const DiagnosticsSeries& diag, const MomentBoundParams& params) {
    Report rep;
    rep.name = "moment-bound";
    if (!diag.has_column("J") || !diag.has_column("s_alpha_rho"))
        throw std::invalid_argument(
            "verify_moment_bound: diagnostics must carry J and s_alpha_rho columns");
    const std::vector<double> tcol = diag.column("t");
    const std::vector<double> J = diag.column("J");
    const std::vector<double> g = diag.column("s_alpha_rho");
    const double C = params.growth_c;
    const double M = params.mass;
    const double dt = params.dt;
    const double phi = C * dt > 1e-12 ? std::expm1(C * dt) / (C * dt) : 1.0;

    double worst_diff = -std::numeric_limits<double>::infinity();
    std::size_t worst_step = 0;
    for (std::size_t n = 0; n + 1 < J.size(); ++n) {
        const double lhs = (J[n + 1] - J[n]) / dt;
        const double rhs = phi * C * (M + J[n] + g[n]) + 3.0 * params.stat_sigma +
                           1e-9 * (1.0 + std::abs(J[n]));
        const double slack = lhs - rhs;
        if (slack > worst_diff) {
            worst_diff = slack;
            worst_step = n;
        }
    }
    {
        CheckItem it;
        it.check = "moment-differential";
        it.inputs = {{"C", C}, {"alpha", params.alpha}, {"M", M}, {"dt", dt}};
        it.lhs = worst_diff;
        it.rhs = 0.0;
        it.ratio = 0.0;
        it.tolerance = 3.0 * params.stat_sigma;
        it.verdict = worst_diff <= 0.0 ? PASS : FAIL;
        std::ostringstream note;
        note << "max slack of (J'/dt) - phi C (M + J + g) at step " << worst_step;
        it.note = note.str();
        rep.items.push_back(it);
    }

    // Duhamel envelope with trapezoid accumulation of C int e^{C(t-tau)} g dtau.
    double worst_env = -std::numeric_limits<double>::infinity();
    std::size_t worst_env_step = 0;
    double conv = 0;  // int_0^{t_n} e^{C(t_n - tau)} g(tau) dtau, updated recursively
    for (std::size_t n = 1; n < J.size(); ++n) {
        const double h = tcol[n] - tcol[n - 1];
        conv = conv * std::exp(C * h) + 0.5 * h * (std::exp(C * h) * g[n - 1] + g[n]);
        const double t = tcol[n] - tcol[0];
        const double envelope = C * std::exp(C * t) + std::exp(C * t) * J[0] + C * conv +
                                3.0 * params.stat_sigma + 1e-9 * (1.0 + J[n]);
        const double slack = J[n] - envelope;
        if (slack > worst_env) {
            worst_env = slack;
            worst_env_step = n;
        }
    }
    {
        CheckItem it;
        it.check = "moment-duhamel";
        it.inputs = {{"C", C}, {"alpha", params.alpha}, {"M", M}};
        it.lhs = worst_env;
        it.rhs = 0.0;
        it.ratio = 0.0;
        it.tolerance = 3.0 * params.stat_sigma;
        it.verdict = worst_env <= 0.0 ? PASS : FAIL;
        std::ostringstream note;
        note << "max slack of J - envelope at step " << worst_env_step;
        it.note = note.str();
        rep.items.push_back(it);
    }
    return rep;
}

}  // namespace kinchem
