#pragma once

#include <array>
#include <complex>
#include <filesystem>

#include "cilc/lifted_system.hpp"

namespace cilc {

/// Physical constants of the planar two-wheeled inverted pendulum.
///
/// Model (Lagrangian, generalized coordinates s and theta, both wheels
/// lumped together, motor torque u acting on the wheels with reaction on
/// the body, viscous friction c on the wheel-body relative rotation):
///
///   m_t s''       + m_b l cos(theta) theta'' =
///       m_b l theta'^2 sin(theta) + u / r_w - (c / r_w)(s'/r_w - theta')
///   m_b l cos(theta) s'' + I_b theta'' =
///       m_b g l sin(theta) - u + c (s'/r_w - theta')
///
/// with m_t = m_b + m_w + I_w / r_w^2 the effective translational mass.
/// Symbols: m_b body mass, m_w wheel mass (both wheels), I_b body inertia
/// about the wheel axle, I_w wheel inertia, l axle-to-COM distance,
/// r_w wheel radius, g gravity, c viscous friction coefficient.
struct TwiprParams {
    double body_mass = 2.5;          // m_b [kg]
    double wheel_mass = 0.6;         // m_w [kg], both wheels
    double body_inertia = 0.08;      // I_b [kg m^2], about the wheel axle
    double wheel_inertia = 0.0015;   // I_w [kg m^2], both wheels
    double com_distance = 0.15;      // l [m]
    double wheel_radius = 0.07;      // r_w [m]
    double gravity = 9.81;           // g [m/s^2]
    double viscous_friction = 0.01;  // c [N m s]
    double sample_period = 0.02;     // T [s]
    double inertia_scale = 1.0;      // multiplies I_b and I_w (uncertainty knob)
};

/// Sampled closed loop z(n+1) = (A - B K) z(n) + B u_ilc(n), y = C z.
/// State ordering z = (theta, theta', s, s') with the pitch states in
/// degrees, so C = (1, 0, 0, 0) reads the pitch angle in degrees.
struct DiscreteClosedLoop {
    Eigen::Matrix4d A;
    Eigen::Vector4d B;
    Eigen::RowVector4d C;
    Eigen::RowVector4d K;
    double T = 0.02;
};

/// State derivative of the nonlinear model above. z = (theta, theta', s, s')
/// in SI units (radians); u is the motor torque [N m]. Pure function.
Eigen::Vector4d twipr_dynamics(const Eigen::Vector4d& z, double u,
                               const TwiprParams& p);

/// Analytic Jacobians of twipr_dynamics at (z, u) = (0, 0), SI units.
struct Linearization {
    Eigen::Matrix4d A;
    Eigen::Vector4d B;
};
Linearization linearize_upright(const TwiprParams& p);

/// Exact zero-order-hold discretization through the augmented matrix
/// exponential, computed by scaling-and-squaring (series truncated below
/// 1e-16 per term; well past the 1e-12 contract).
std::pair<Matrix, Matrix> discretize_zoh(const Matrix& A_c, const Matrix& B_c,
                                         double T);

/// Pole placement (Ackermann) for the 4-state single-input loop. The pole
/// set must be closed under conjugation; (A, B) must be controllable.
Eigen::RowVector4d design_feedback(const Eigen::Matrix4d& A,
                                   const Eigen::Vector4d& B,
                                   const std::array<std::complex<double>, 4>& poles);

/// Conservative real cluster used when no pole set is configured.
std::array<std::complex<double>, 4> default_poles();

/// Full pipeline: linearize at upright, rescale the pitch states to
/// degrees, ZOH-discretize at p.sample_period, place the poles.
DiscreteClosedLoop make_closed_loop(const TwiprParams& p,
                                    const std::array<std::complex<double>, 4>& poles);

/// Lower-triangular Toeplitz lifted plant of the Markov parameters
/// p_i = C (A - BK)^(i-1) B; d is the lifted free response from z0 plus a
/// constant output disturbance (zero state, zero disturbance => d = 0).
LiftedPlant markov_lifted_plant(const DiscreteClosedLoop& loop, int N,
                                const Eigen::Vector4d& z0 = Eigen::Vector4d::Zero(),
                                double constant_disturbance = 0.0);

/// r(n) = 30 sin(pi T n) degrees for n = 0..N-1.
Vector reference_maneuver(int N, double T);

/// One trial of the nonlinear model under the stabilizing feedback plus
/// the ILC feed-forward: u(n) = -K z(n) + u_ilc(n), held zero-order over
/// each sample, integrated with fixed-step RK4 at T/10 substeps from
/// z = 0. Returns the pitch trajectory in degrees, sample n holding the
/// pitch reached at the end of interval n (matches the lifted plant's
/// output shift). K is in the degree-scaled state convention of
/// DiscreteClosedLoop. Throws NumericalBlowup when |theta| exceeds the
/// guard.
Vector simulate_nonlinear_trial(const TwiprParams& p,
                                const Eigen::RowVector4d& K,
                                const Vector& u_ilc, double T,
                                double blowup_guard_deg = 90.0);

/// Parameter file (versioned JSON schema, see README). Poles may be given
/// as reals or [re, im] pairs.
struct TwiprConfig {
    TwiprParams params;
    std::array<std::complex<double>, 4> poles = default_poles();
};
TwiprConfig load_twipr_config(const std::filesystem::path& file);
void save_twipr_config(const TwiprConfig& cfg, const std::filesystem::path& file);

} // namespace cilc
