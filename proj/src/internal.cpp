#include "kinchem/internal.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace kinchem {

double h_eval(const HSpec& h, double s) {
    if (s < 0) throw std::domain_error("h(S): S must be >= 0");
    if (std::holds_alternative<SaturatingH>(h)) return s / (1.0 + s);
    const double a = std::get<PowerCapH>(h).alpha;
    return a == 0.0 ? 1.0 : std::pow(s, a);
}

double h_alpha(const HSpec& h) {
    if (std::holds_alternative<SaturatingH>(h)) return 0.0;
    return std::get<PowerCapH>(h).alpha;
}

void validate_model(const InternalModel& model) {
    std::vector<std::string> problems;
    auto check_h = [&](const HSpec& h) {
        if (const auto* pc = std::get_if<PowerCapH>(&h)) {
            if (!(pc->alpha >= 0 && pc->alpha < 1))
                problems.push_back("power-cap h: alpha must satisfy 0 <= alpha < 1");
        }
    };
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearExcAdapt>) {
                if (!(m.tau_e > 0)) problems.push_back("linear model: tau_e must be > 0");
                if (!(m.tau_a > 0)) problems.push_back("linear model: tau_a must be > 0");
                check_h(m.h);
            } else if constexpr (std::is_same_v<T, AlgebraicExcAdapt>) {
                if (!(m.tau_a > 0)) problems.push_back("algebraic model: tau_a must be > 0");
                check_h(m.h);
            } else if constexpr (std::is_same_v<T, FhnExcAdapt>) {
                if (!(m.tau_e > 0)) problems.push_back("fhn model: tau_e must be > 0");
                if (!(m.tau_a > 0)) problems.push_back("fhn model: tau_a must be > 0");
                if (m.tau_e > 0 && m.tau_a > 0 && m.tau_a < 10.0 * m.tau_e)
                    problems.push_back("fhn model: excitable regime needs tau_a >= 10 tau_e");
                check_h(m.h);
            } else {
                if (!(m.c > 0)) problems.push_back("growth-boundary model: c must be > 0");
            }
        },
        model);
    if (!problems.empty()) {
        std::ostringstream os;
        os << "invalid internal model:";
        for (const auto& p : problems) os << "\n  - " << p;
        throw std::invalid_argument(os.str());
    }
}

std::string model_name(const InternalModel& model) {
    return std::visit(
        [](const auto& m) -> std::string {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearExcAdapt>) return "linear";
            else if constexpr (std::is_same_v<T, AlgebraicExcAdapt>) return "algebraic";
            else if constexpr (std::is_same_v<T, FhnExcAdapt>) return "fhn";
            else return "growth-boundary";
        },
        model);
}

double fhn_cubic(const std::array<double, 4>& q, double u) {
    return ((q[0] * u + q[1]) * u + q[2]) * u + q[3];
}

YState internal_rhs(const InternalModel& model, const YState& y, double s) {
    return std::visit(
        [&](const auto& m) -> YState {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearExcAdapt>) {
                const double h = h_eval(m.h, s);
                return {(h - (y[0] + y[1])) / m.tau_e, (h - y[1]) / m.tau_a};
            } else if constexpr (std::is_same_v<T, AlgebraicExcAdapt>) {
                const double h = h_eval(m.h, s);
                return {0.0, (h - y[1]) / m.tau_a};
            } else if constexpr (std::is_same_v<T, FhnExcAdapt>) {
                const double h = h_eval(m.h, s);
                return {(h - fhn_cubic(m.q, y[0]) - y[1]) / m.tau_e,
                        (h + y[0] - y[1]) / m.tau_a};
            } else {
                const double r = std::hypot(y[0], y[1]);
                if (r == 0.0) return {m.c, 0.0};  // direction convention at the origin
                const double fac = m.c * (1.0 + r) / r;
                return {fac * y[0], fac * y[1]};
            }
        },
        model);
}

double algebraic_excitation(const AlgebraicExcAdapt& model, double y2, double s) {
    return std::max(0.0, h_eval(model.h, s) - y2);
}

YState equilibrium(const InternalModel& model, double s) {
    return std::visit(
        [&](const auto& m) -> YState {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearExcAdapt> ||
                          std::is_same_v<T, AlgebraicExcAdapt>) {
                return {0.0, h_eval(m.h, s)};
            } else if constexpr (std::is_same_v<T, FhnExcAdapt>) {
                // y2 = h + y1 and q(y1) + y1 = 0; Newton from 0.
                double u = 0.0;
                for (int it = 0; it < 60; ++it) {
                    const double fu = fhn_cubic(m.q, u) + u;
                    const double dq = (3.0 * m.q[0] * u + 2.0 * m.q[1]) * u + m.q[2] + 1.0;
                    const double du = fu / dq;
                    u -= du;
                    if (std::abs(du) < 1e-15) break;
                }
                return {u, h_eval(m.h, s) + u};
            } else {
                throw std::domain_error("growth-boundary model has no equilibrium");
            }
        },
        model);
}

YState rk4_step(const InternalModel& model, const YState& y, double s, double dt) {
    const YState k1 = internal_rhs(model, y, s);
    const YState y2{y[0] + 0.5 * dt * k1[0], y[1] + 0.5 * dt * k1[1]};
    const YState k2 = internal_rhs(model, y2, s);
    const YState y3{y[0] + 0.5 * dt * k2[0], y[1] + 0.5 * dt * k2[1]};
    const YState k3 = internal_rhs(model, y3, s);
    const YState y4{y[0] + dt * k3[0], y[1] + dt * k3[1]};
    const YState k4 = internal_rhs(model, y4, s);
    YState out{y[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
               y[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
    // The algebraic variant reports excitation through its constraint.
    if (const auto* alg = std::get_if<AlgebraicExcAdapt>(&model))
        out[0] = algebraic_excitation(*alg, out[1], s);
    return out;
}

double max_stable_dt(const InternalModel& model) {
    return std::visit(
        [](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearExcAdapt>) return m.tau_e / 10.0;
            else if constexpr (std::is_same_v<T, AlgebraicExcAdapt>) return m.tau_a / 10.0;
            else if constexpr (std::is_same_v<T, FhnExcAdapt>) return m.tau_e / 10.0;
            else return 0.1 / m.c;
        },
        model);
}

YState integrate_internal(const InternalModel& model, YState y, std::span<const double> s_path,
                          double dt) {
    validate_model(model);
    if (!(dt > 0)) throw std::invalid_argument("integrate_internal: dt must be > 0");
    const double guard = max_stable_dt(model);
    if (dt > guard * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "integrate_internal: dt = " << dt << " exceeds the stiffness guard " << guard;
        throw std::invalid_argument(os.str());
    }
    for (double s : s_path) y = rk4_step(model, y, s, dt);
    return y;
}

double tumbling_rate(const TumblingRate& rate, const YState& y) {
    if (rate.lambda0 < 0 || rate.lambda1 < 0 || rate.component < 0 || rate.component > 1)
        throw std::invalid_argument("tumbling_rate: lambda0, lambda1 >= 0, component in {0,1}");
    return rate.lambda0 + rate.lambda1 * std::max(0.0, y[rate.component]);
}

double growth_constant(const InternalModel& model, double domain_radius) {
    const double Y = std::max(1.0, domain_radius);
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearExcAdapt>) {
                // |G1| <= (h + |y1| + |y2|)/tau_e, |G2| <= (h + |y2|)/tau_a
                return 2.0 * (1.0 / m.tau_e + 1.0 / m.tau_a);
            } else if constexpr (std::is_same_v<T, AlgebraicExcAdapt>) {
                return 2.0 / m.tau_a;
            } else if constexpr (std::is_same_v<T, FhnExcAdapt>) {
                // |q(u)| <= kappa(Y) |u| for |u| <= Y
                const double kappa =
                    std::abs(m.q[0]) * Y * Y + std::abs(m.q[1]) * Y + std::abs(m.q[2]);
                const double q0 = std::abs(m.q[3]);
                return (1.0 / m.tau_e + 1.0 / m.tau_a) * std::max(2.0 * (kappa + 1.0), 1.0 + q0);
            } else {
                return m.c;
            }
        },
        model);
}

}  // namespace kinchem
