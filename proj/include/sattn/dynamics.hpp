#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include "sattn/geometry.hpp"
#include "sattn/trajectory.hpp"

namespace sattn {

enum class Model { SA, USA };

struct ModelKind {
    Model model = Model::SA;
    double beta = 1.0;  // inverse temperature, > 0

    ModelKind(Model m, double b) : model(m), beta(b) {
        if (!(beta > 0.0)) throw std::invalid_argument("ModelKind: beta > 0 required");
    }
};

enum class Scheme { EulerProject, Rk4Project };

struct IntegratorSpec {
    Scheme scheme = Scheme::EulerProject;
    double dt = 0.01;
    double t_max = 1.0;
    std::size_t cadence = 1;  // steps between trace records

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("IntegratorSpec: dt > 0 required");
        if (!(t_max >= 0.0)) throw std::invalid_argument("IntegratorSpec: t_max >= 0 required");
        if (cadence == 0) throw std::invalid_argument("IntegratorSpec: cadence >= 1 required");
    }
};

/// Raised when the state goes non-finite mid-run; carries the step index.
class numeric_error : public std::runtime_error {
public:
    numeric_error(const std::string& what, std::size_t step)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

/// Self-attention velocity field:
///   v_i = P_{x_i} sum_j a_ij x_j,
///   a_ij = m_j e^{beta <x_i, x_j>} / sum_k m_k e^{beta <x_i, x_k>},
/// softmax computed with max-subtraction.  Each v_i is orthogonal to x_i.
std::vector<Vec> sa_velocity(const Configuration& config, double beta);

/// Unnormalized self-attention velocity field:
///   v_i = (1/N) P_{x_i} sum_j m_j e^{beta (<x_i, x_j> - 1)} x_j,  N = sum_j m_j.
/// All exponents are <= 0, so the field is overflow-safe for any beta.
std::vector<Vec> usa_velocity(const Configuration& config, double beta);

/// Angular USA rates on the circle (the gradient clock):
///   dtheta_i/dt = (1/N^2) sum_j m_j e^{beta (cos(theta_j - theta_i) - 1)} sin(theta_j - theta_i).
/// Identical to grad_angular of the energy module; differs from the
/// Cartesian usa_velocity by the global time dilation factor N.
std::vector<double> angular_usa_velocity(const AngularConfiguration& theta, double beta);

/// Angular SA rates: dtheta_i/dt = sum_j a_ij sin(theta_j - theta_i).
std::vector<double> angular_sa_velocity(const AngularConfiguration& theta, double beta);

using Observer = std::function<void(const TraceRecord&)>;

/// Advances the flow with the chosen scheme, renormalizing every point to
/// unit norm after each step.  Records (and invokes the observer on) the
/// initial state, every `cadence` steps, and the final state.  Deterministic
/// given its inputs; throws numeric_error on a non-finite state.
Trajectory integrate(const ModelKind& model, const Configuration& config, const IntegratorSpec& spec,
                     const Observer& observer = {});

/// Same stepping for the angular USA gradient flow (d = 2, 1/N^2 clock);
/// angles are wrapped mod 2*pi instead of renormalized.
AngularTrajectory integrate_angular(const AngularConfiguration& theta0, double beta,
                                    const IntegratorSpec& spec);

}  // namespace sattn
