// Turning-kernel hypothesis families T[S](t,x,v,v'). Each family is the
// saturated equality of the growth bound it asserts, so runs exercise the
// hardest rate the hypothesis permits.
#pragma once

#include <span>
#include <string>
#include <variant>

#include "kinchem/fields.hpp"

namespace kinchem {

// Nonincreasing response in [0,1]: hard step (1 for eta<0, 0 otherwise) or
// the logistic 1/(1+e^{k eta}).
struct PsiSpec {
    enum class Kind { HardStep, SmoothStep };
    Kind kind = Kind::SmoothStep;
    double steepness = 20.0;

    double operator()(double eta) const;
};

struct ConstantKernel {
    double c0 = 1.0;  // T = c0
};
struct PointwiseLinearKernel {
    double c = 1.0;  // T = c (1 + S(t,x))
};
struct SupPowerKernel {
    double c = 1.0, alpha = 1.0;  // T = c (1 + ||S||_inf^alpha)
};
struct ExpGrowthKernel {
    double c = 1.0, beta = 1.0;  // T = c (1 + exp(||S||_inf^beta))
};
struct LrPowerKernel {
    double c = 1.0, r = 6.0, alpha = 1.0;  // T = c (1 + ||S||_{L^r}^alpha)
    bool strict = true;  // r > 3 requires 0 < alpha < r/(r-3)
};
struct DelocalizedKernel {
    double c = 1.0, eps = 0.1;
    bool s_back = true;      // S(x - eps v')
    bool grad_back = false;  // |grad S|(x - eps v')
    bool s_fwd = false;      // S(x + eps v)
    bool grad_fwd = false;   // |grad S|(x + eps v)
};
struct DirectionalDerivativeKernel {
    double t0 = 1.0;  // T = t0 + psi(S_t + v'. grad S)
    PsiSpec psi;
};
struct SymmetricKernel {
    // T(v,v') = (base + s_coeff S(x)) (1 + vdiff_coeff |v - v'|)
    double base = 1.0, s_coeff = 0.0, vdiff_coeff = 0.0;
};

using KernelSpec =
    std::variant<ConstantKernel, PointwiseLinearKernel, SupPowerKernel, ExpGrowthKernel,
                 LrPowerKernel, DelocalizedKernel, DirectionalDerivativeKernel, SymmetricKernel>;

// Parameter validation; throws std::invalid_argument with the full list of
// problems. LrPower in strict mode rejects alpha >= r/(r-3) when r > 3.
void validate_kernel(const KernelSpec& spec);

std::string kernel_name(const KernelSpec& spec);
bool kernel_is_symmetric(const KernelSpec& spec);
// True when the rate depends on neither v nor v' (sup/Lr/constant/pointwise).
bool kernel_is_velocity_independent(const KernelSpec& spec);

// Binds a spec to a ChemState; precomputes whatever norm of S the family
// needs so per-(x,v,v') evaluation is cheap. Throws if the state is missing
// a required field (dt_s for the directional-derivative family).
class TurningKernel {
  public:
    TurningKernel(const KernelSpec& spec, const ChemState& chem);

    double eval(std::span<const double> x, std::span<const double> v,
                std::span<const double> vp) const;
    // Velocity-independent scalar majorant asserted by the hypothesis.
    double bound() const { return bound_; }
    const KernelSpec& spec() const { return *spec_; }

  private:
    const KernelSpec* spec_;
    const ChemState* chem_;
    double norm_term_ = 0;  // precomputed ||S|| contribution
    double sup_s_ = 0;
    double sup_grad_ = 0;
    double sup_dts_ = 0;
    double bound_ = 0;
};

// Convenience single-shot forms of the two operations.
double eval_turning_rate(const KernelSpec& spec, const ChemState& chem,
                         std::span<const double> x, std::span<const double> v,
                         std::span<const double> vp);
double hypothesis_bound(const KernelSpec& spec, const ChemState& chem);

}  // namespace kinchem
