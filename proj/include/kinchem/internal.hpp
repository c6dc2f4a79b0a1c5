// Internal-state ODE caricatures dy/dt = G(y, S) driving the tumbling rate
// lambda[y]: linear excitation/adaptation, the one-sided algebraic variant,
// a slow-fast FitzHugh-Nagumo type system, and an adversarial model sitting
// exactly on the linear growth boundary |G| = C(1 + |y|).
#pragma once

#include <array>
#include <span>
#include <string>
#include <variant>

namespace kinchem {

struct SaturatingH {};  // h(S) = S / (1 + S)
struct PowerCapH {
    double alpha = 0.5;  // h(S) = S^alpha, 0 <= alpha < 1
};
using HSpec = std::variant<SaturatingH, PowerCapH>;

double h_eval(const HSpec& h, double s);
// Upper bound h(S) <= max(1, S^alpha); used by the growth certificate.
double h_alpha(const HSpec& h);  // Saturating reports 0 (bounded)

struct LinearExcAdapt {
    double tau_e = 0.01, tau_a = 1.0;
    HSpec h = SaturatingH{};
};
struct AlgebraicExcAdapt {
    double tau_a = 1.0;
    HSpec h = SaturatingH{};
};
struct FhnExcAdapt {
    double tau_e = 0.01, tau_a = 1.0;
    // q(u) = q3 u^3 + q2 u^2 + q1 u + q0; default u(u-1)(u-0.2)
    std::array<double, 4> q = {1.0, -1.2, 0.2, 0.0};
    HSpec h = SaturatingH{};
};
struct GrowthBoundary {
    double c = 1.0;  // G(y,S) = c (1 + |y|) y/|y|
};
using InternalModel = std::variant<LinearExcAdapt, AlgebraicExcAdapt, FhnExcAdapt, GrowthBoundary>;

using YState = std::array<double, 2>;

// Parameter validation; the FHN variant additionally requires the slow-fast
// separation tau_a >= 10 tau_e (the excitable regime it exists for).
void validate_model(const InternalModel& model);
std::string model_name(const InternalModel& model);

// Right side G(y, S). The algebraic variant integrates only y2; its dy1
// slot is 0 and the excitation value comes from algebraic_excitation.
YState internal_rhs(const InternalModel& model, const YState& y, double s);
double algebraic_excitation(const AlgebraicExcAdapt& model, double y2, double s);

// Cubic q evaluated from its coefficient array.
double fhn_cubic(const std::array<double, 4>& q, double u);

// Resting state for constant S: (0, h(S)) for the linear/algebraic variants;
// for FHN the root of q(u) + u = 0 paired with y2 = h(S) + u.
YState equilibrium(const InternalModel& model, double s);

// One classical RK4 stage with S frozen over the step.
YState rk4_step(const InternalModel& model, const YState& y, double s, double dt);

// Integrate along a sampled S path, one RK4 step per sample. Rejects dt
// above the stiffness guard (tau_e/10, or tau_a/10 when there is no fast
// time scale; c*dt <= 0.1 for the growth-boundary model).
YState integrate_internal(const InternalModel& model, YState y, std::span<const double> s_path,
                          double dt);
double max_stable_dt(const InternalModel& model);

struct TumblingRate {
    double lambda0 = 1.0;
    double lambda1 = 1.0;
    int component = 0;  // which y_i drives tumbling
};
// lambda[y] = lambda0 + lambda1 * max(0, y_sel); nonnegative and at most
// linear in |y|.
double tumbling_rate(const TumblingRate& rate, const YState& y);

// Certificate constant: |G|(y,S) <= C (1 + |y| + S^alpha) for |y| within
// domain_radius (global for the linear/algebraic/boundary variants; the FHN
// cubic only satisfies the premise on bounded sets).
double growth_constant(const InternalModel& model, double domain_radius);

}  // namespace kinchem
