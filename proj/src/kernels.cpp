#include "kinchem/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace kinchem {

double PsiSpec::operator()(double eta) const {
    if (kind == Kind::HardStep) return eta < 0.0 ? 1.0 : 0.0;
    // Logistic; clamp the exponent so large |eta| cannot overflow.
    const double z = std::clamp(steepness * eta, -700.0, 700.0);
    return 1.0 / (1.0 + std::exp(z));
}

namespace {

struct Validator {
    std::vector<std::string> problems;
    void require(bool ok, const std::string& msg) {
        if (!ok) problems.push_back(msg);
    }
};

}  // namespace

void validate_kernel(const KernelSpec& spec) {
    Validator v;
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ConstantKernel>) {
                v.require(k.c0 >= 0, "constant kernel: c0 must be >= 0");
            } else if constexpr (std::is_same_v<T, PointwiseLinearKernel>) {
                v.require(k.c >= 0, "pointwise-linear kernel: c must be >= 0");
            } else if constexpr (std::is_same_v<T, SupPowerKernel>) {
                v.require(k.c >= 0, "sup-power kernel: c must be >= 0");
                v.require(k.alpha >= 0, "sup-power kernel: alpha must be >= 0");
            } else if constexpr (std::is_same_v<T, ExpGrowthKernel>) {
                v.require(k.c >= 0, "exp-growth kernel: c must be >= 0");
                v.require(k.beta > 0, "exp-growth kernel: beta must be > 0");
            } else if constexpr (std::is_same_v<T, LrPowerKernel>) {
                v.require(k.c >= 0, "lr-power kernel: c must be >= 0");
                v.require(k.r >= 1, "lr-power kernel: r must be >= 1");
                v.require(k.alpha > 0, "lr-power kernel: alpha must be > 0");
                if (k.strict && k.r > 3)
                    v.require(k.alpha < k.r / (k.r - 3.0),
                              "lr-power kernel: strict mode requires alpha < r/(r-3)");
            } else if constexpr (std::is_same_v<T, DelocalizedKernel>) {
                v.require(k.c >= 0, "delocalized kernel: c must be >= 0");
                v.require(k.eps >= 0, "delocalized kernel: eps must be >= 0");
                v.require(k.s_back || k.grad_back || k.s_fwd || k.grad_fwd,
                          "delocalized kernel: at least one sampled term must be enabled");
            } else if constexpr (std::is_same_v<T, DirectionalDerivativeKernel>) {
                v.require(k.t0 >= 0, "directional-derivative kernel: t0 must be >= 0");
                v.require(k.psi.kind == PsiSpec::Kind::HardStep || k.psi.steepness > 0,
                          "directional-derivative kernel: smooth-step steepness must be > 0");
            } else if constexpr (std::is_same_v<T, SymmetricKernel>) {
                v.require(k.base >= 0, "symmetric kernel: base must be >= 0");
                v.require(k.s_coeff >= 0, "symmetric kernel: s_coeff must be >= 0");
                v.require(k.vdiff_coeff >= 0, "symmetric kernel: vdiff_coeff must be >= 0");
            }
        },
        spec);
    if (!v.problems.empty()) {
        std::ostringstream os;
        os << "invalid kernel spec:";
        for (const auto& p : v.problems) os << "\n  - " << p;
        throw std::invalid_argument(os.str());
    }
}

std::string kernel_name(const KernelSpec& spec) {
    return std::visit(
        [](const auto& k) -> std::string {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ConstantKernel>) return "constant";
            else if constexpr (std::is_same_v<T, PointwiseLinearKernel>) return "pointwise-linear";
            else if constexpr (std::is_same_v<T, SupPowerKernel>) return "sup-power";
            else if constexpr (std::is_same_v<T, ExpGrowthKernel>) return "exp-growth";
            else if constexpr (std::is_same_v<T, LrPowerKernel>) return "lr-power";
            else if constexpr (std::is_same_v<T, DelocalizedKernel>) return "delocalized";
            else if constexpr (std::is_same_v<T, DirectionalDerivativeKernel>)
                return "directional-derivative";
            else return "symmetric";
        },
        spec);
}

bool kernel_is_symmetric(const KernelSpec& spec) {
    if (std::holds_alternative<SymmetricKernel>(spec)) return true;
    // Velocity-independent rates are trivially symmetric in (v, v').
    return kernel_is_velocity_independent(spec);
}

bool kernel_is_velocity_independent(const KernelSpec& spec) {
    return std::holds_alternative<ConstantKernel>(spec) ||
           std::holds_alternative<PointwiseLinearKernel>(spec) ||
           std::holds_alternative<SupPowerKernel>(spec) ||
           std::holds_alternative<ExpGrowthKernel>(spec) ||
           std::holds_alternative<LrPowerKernel>(spec);
}

namespace {

double sup_norm_of(const VectorField& g) {
    double m = 0;
    const std::size_t n = g.grid.cells();
    for (std::size_t i = 0; i < n; ++i) {
        double s2 = 0;
        for (int d = 0; d < g.grid.dim; ++d) s2 += g.comp[d][i] * g.comp[d][i];
        m = std::max(m, s2);
    }
    return std::sqrt(m);
}

double grad_magnitude_at(const VectorField& g, std::span<const double> x) {
    const auto v = sample_vector(g, x);
    double s2 = 0;
    for (int d = 0; d < g.grid.dim; ++d) s2 += v[d] * v[d];
    return std::sqrt(s2);
}

}  // namespace

TurningKernel::TurningKernel(const KernelSpec& spec, const ChemState& chem)
    : spec_(&spec), chem_(&chem) {
    validate_kernel(spec);
    sup_s_ = chem.s.max_abs();
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ConstantKernel>) {
                bound_ = k.c0;
            } else if constexpr (std::is_same_v<T, PointwiseLinearKernel>) {
                bound_ = k.c * (1.0 + sup_s_);
            } else if constexpr (std::is_same_v<T, SupPowerKernel>) {
                norm_term_ = std::pow(sup_s_, k.alpha);
                bound_ = k.c * (1.0 + norm_term_);
            } else if constexpr (std::is_same_v<T, ExpGrowthKernel>) {
                norm_term_ = std::exp(std::pow(sup_s_, k.beta));
                bound_ = k.c * (1.0 + norm_term_);
            } else if constexpr (std::is_same_v<T, LrPowerKernel>) {
                norm_term_ = std::pow(chem.s.lp_norm(k.r), k.alpha);
                bound_ = k.c * (1.0 + norm_term_);
            } else if constexpr (std::is_same_v<T, DelocalizedKernel>) {
                sup_grad_ = sup_norm_of(chem.grad_s);
                double terms = 0;
                if (k.s_back) terms += sup_s_;
                if (k.s_fwd) terms += sup_s_;
                if (k.grad_back) terms += sup_grad_;
                if (k.grad_fwd) terms += sup_grad_;
                bound_ = k.c * (1.0 + terms);
            } else if constexpr (std::is_same_v<T, DirectionalDerivativeKernel>) {
                if (!chem.dt_s)
                    throw std::invalid_argument(
                        "directional-derivative kernel requires dt_s; the chem state holds no "
                        "time derivative yet");
                bound_ = k.t0 + 1.0;  // psi <= 1
            } else if constexpr (std::is_same_v<T, SymmetricKernel>) {
                // |v - v'| <= 2 on the unit-speed set.
                bound_ = (k.base + k.s_coeff * sup_s_) * (1.0 + 2.0 * k.vdiff_coeff);
            }
        },
        spec);
}

double TurningKernel::eval(std::span<const double> x, std::span<const double> v,
                           std::span<const double> vp) const {
    const int dim = chem_->s.grid.dim;
    double rate = std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ConstantKernel>) {
                return k.c0;
            } else if constexpr (std::is_same_v<T, PointwiseLinearKernel>) {
                return k.c * (1.0 + sample_scalar(chem_->s, x));
            } else if constexpr (std::is_same_v<T, SupPowerKernel>) {
                return k.c * (1.0 + norm_term_);
            } else if constexpr (std::is_same_v<T, ExpGrowthKernel>) {
                return k.c * (1.0 + norm_term_);
            } else if constexpr (std::is_same_v<T, LrPowerKernel>) {
                return k.c * (1.0 + norm_term_);
            } else if constexpr (std::is_same_v<T, DelocalizedKernel>) {
                double terms = 0;
                double pt[3];
                if (k.s_back || k.grad_back) {
                    for (int d = 0; d < dim; ++d) pt[d] = x[d] - k.eps * vp[d];
                    std::span<const double> p(pt, static_cast<std::size_t>(dim));
                    if (k.s_back) terms += sample_scalar(chem_->s, p);
                    if (k.grad_back) terms += grad_magnitude_at(chem_->grad_s, p);
                }
                if (k.s_fwd || k.grad_fwd) {
                    for (int d = 0; d < dim; ++d) pt[d] = x[d] + k.eps * v[d];
                    std::span<const double> p(pt, static_cast<std::size_t>(dim));
                    if (k.s_fwd) terms += sample_scalar(chem_->s, p);
                    if (k.grad_fwd) terms += grad_magnitude_at(chem_->grad_s, p);
                }
                return k.c * (1.0 + terms);
            } else if constexpr (std::is_same_v<T, DirectionalDerivativeKernel>) {
                const double st = sample_scalar(*chem_->dt_s, x);
                const auto gs = sample_vector(chem_->grad_s, x);
                double adv = st;
                for (int d = 0; d < dim; ++d) adv += vp[d] * gs[d];
                return k.t0 + k.psi(adv);
            } else {  // SymmetricKernel
                const SymmetricKernel& sk = k;
                double d2 = 0;
                for (int d = 0; d < dim; ++d) d2 += (v[d] - vp[d]) * (v[d] - vp[d]);
                return (sk.base + sk.s_coeff * sample_scalar(chem_->s, x)) *
                       (1.0 + sk.vdiff_coeff * std::sqrt(d2));
            }
        },
        *spec_);
    return rate > 0.0 ? rate : 0.0;
}

double eval_turning_rate(const KernelSpec& spec, const ChemState& chem,
                         std::span<const double> x, std::span<const double> v,
                         std::span<const double> vp) {
    return TurningKernel(spec, chem).eval(x, v, vp);
}

double hypothesis_bound(const KernelSpec& spec, const ChemState& chem) {
    return TurningKernel(spec, chem).bound();
}

}  // namespace kinchem
