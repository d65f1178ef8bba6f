#pragma once

#include "bifront/error.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>

namespace bifront::numerics {

/// Dormand-Prince 5(4) with dense output, thin wrapper over odeint.
/// Integrate forward only: with a step cap set, odeint 1.74 resets a
/// rejected negative step to +max_step. Callers flip the variable instead.
template <std::size_t N>
class DenseRk45 {
public:
    using State = std::array<double, N>;

    DenseRk45(double abs_tol, double rel_tol, double max_step)
        : stepper_(boost::numeric::odeint::make_dense_output(
              abs_tol, rel_tol, max_step, boost::numeric::odeint::runge_kutta_dopri5<State>())) {}

    void initialize(const State& x0, double t0, double dt0) { stepper_.initialize(x0, t0, dt0); }

    /// One accepted step. Throws ErrorKind::Stiffness if the controller gives
    /// up or the step collapses to round-off size.
    template <class System>
    std::pair<double, double> step(System&& system) {
        try {
            auto r = stepper_.do_step(std::forward<System>(system));
            const double dt = r.second - r.first;
            if (std::abs(dt) < 1e-15 * std::max(1.0, std::abs(r.second))) {
                std::ostringstream os;
                os << "step size underflow at t = " << r.second << " (dt = " << dt << ")";
                throw Error(ErrorKind::Stiffness, os.str());
            }
            return r;
        } catch (const boost::numeric::odeint::step_adjustment_error& e) {
            std::ostringstream os;
            os << "step size control failed near t = " << stepper_.current_time() << ": " << e.what();
            throw Error(ErrorKind::Stiffness, os.str());
        }
    }

    State state_at(double t) const {
        State x{};
        stepper_.calc_state(t, x);
        return x;
    }

    const State& current_state() const { return stepper_.current_state(); }
    double current_time() const { return stepper_.current_time(); }
    double previous_time() const { return stepper_.previous_time(); }

private:
    using Base = boost::numeric::odeint::runge_kutta_dopri5<State>;
    using Dense = typename boost::numeric::odeint::result_of::make_dense_output<Base>::type;
    Dense stepper_;
};

} // namespace bifront::numerics
