#include <cmath>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "floquet/errors.hpp"
#include "floquet/potential.hpp"
#include "floquet/propagator.hpp"

namespace floquet {

namespace {

using State = std::vector<cplx>;

struct Schroedinger {
    const ValidatedConfig& cfg;
    RVector kinetic;

    void operator()(const State& u, State& dudt, double t) const {
        const int D = cfg.dim();
        CMatrix H = instantaneous_potential(t, cfg);
        H.diagonal() += kinetic.cast<cplx>();
        Eigen::Map<const CMatrix> U(u.data(), D, D);
        Eigen::Map<CMatrix> dU(dudt.data(), D, D);
        dU.noalias() = cplx(0.0, -1.0) * (H * U);
    }
};

}  // namespace

PropagatorBlock oracle_propagator(double t1, double t2, double kappa, const ValidatedConfig& cfg,
                                  const OracleOptions& options) {
    namespace odeint = boost::numeric::odeint;
    if (!(t1 < t2)) throw IndexOutOfRange("oracle interval requires t1 < t2");

    const int D = cfg.dim();
    Schroedinger rhs{cfg, RVector(D)};
    for (int r = 0; r < D; ++r) {
        const double k = cfg.wavenumber(cfg.mu_of(r), kappa);
        rhs.kinetic(r) = 0.5 * k * k;
    }

    State u(static_cast<std::size_t>(D) * D, cplx(0.0));
    for (int r = 0; r < D; ++r) u[static_cast<std::size_t>(r) * D + r] = 1.0;

    auto stepper = odeint::make_controlled(options.abs_tol, options.rel_tol,
                                           odeint::runge_kutta_fehlberg78<State>());
    const double h0 = 1e-3 * (t2 - t1);
    std::size_t steps = 0;
    try {
        steps = odeint::integrate_adaptive(stepper, rhs, u, t1, t2, h0,
                                           [&](const State&, double) {});
    } catch (const std::exception& e) {
        throw StepperFailure(std::string("ODE integration failed: ") + e.what());
    }
    if (static_cast<long>(steps) > options.max_steps) throw StepperFailure("ODE step budget exceeded");
    for (const cplx& z : u)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw StepperFailure("non-finite ODE state");

    return {kappa, t1, t2, Eigen::Map<const CMatrix>(u.data(), D, D)};
}

}  // namespace floquet
