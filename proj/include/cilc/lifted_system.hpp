#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cilc/errors.hpp"

namespace cilc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One trial of the lifted dynamics is the single matrix equation
/// y = P u + d over the horizon N. P must be invertible; d is the
/// trial-invariant disturbance.
struct LiftedPlant {
    Matrix P;
    Vector d;
    Eigen::Index N = 0;
};

/// One agent's learning law u+ = Q (u + L e). Ids are 1-based.
struct AgentLaw {
    int id = 1;
    Matrix Q;
    Matrix L;
};

/// Everything recorded about one trial of one agent.
struct TrialRecord {
    int trial = 0;
    Vector u;
    Vector y;
    Vector e;      // e = r - y
    double e_norm = 0.0;
};

/// Certificates for a single agent: spectral radius rho of Q(I - LP),
/// induced 2-norm gamma of Omega, and the monotonicity threshold kappa.
/// kappa is only finite when gamma < 1; residual_error is only present
/// when the iteration is asymptotically stable (rho < 1).
struct ConvergenceReport {
    double rho = 0.0;
    double gamma = 0.0;
    double kappa = 0.0;
    bool kappa_finite = false;
    bool asymptotically_stable = false;
    bool monotone_above_threshold = false;
    std::optional<Vector> residual_error;
};

/// Maps an input trajectory to the resulting output trajectory. Used to
/// swap the lifted plant for a nonlinear simulator (or per-agent
/// perturbed plants) without touching the trial loops.
using PlantSim = std::function<Vector(const Vector&)>;

/// Validates dimensions and invertibility. The plant is singular when
/// its smallest singular value is at most `tolerance` times the largest.
LiftedPlant make_lifted_plant(const Matrix& P, const Vector& d,
                              double tolerance = 1e-12);

/// y = P u + d.
Vector simulate_trial(const LiftedPlant& plant, const Vector& u);

/// u+ = Q (u + L e).
Vector ilc_update(const AgentLaw& law, const Vector& u, const Vector& e);

/// Omega = P Q (I - L P) P^-1, the error-propagation matrix. P^-1 is
/// applied through an LU solve, never formed explicitly.
Matrix contraction_matrix(const LiftedPlant& plant, const AgentLaw& law);

/// Psi = I - P Q P^-1, the trial-invariant error bias map.
Matrix filter_matrix(const LiftedPlant& plant, const AgentLaw& law);

/// Full single-agent certificate for the reference r. The eigenvalue and
/// singular-value routines converge to machine precision (< 1e-10).
ConvergenceReport analyze_agent(const LiftedPlant& plant, const AgentLaw& law,
                                const Vector& r);

/// Runs `trials` trials j = 0..trials-1 starting from u0. Deterministic.
std::vector<TrialRecord> run_isolated_ilc(const LiftedPlant& plant,
                                          const AgentLaw& law, const Vector& r,
                                          const Vector& u0, int trials);

/// Same loop against an arbitrary input->output simulator. Throws whatever
/// the simulator throws; NumericalBlowup gets the trial index filled in.
std::vector<TrialRecord> run_isolated_ilc_custom(const PlantSim& sim,
                                                 const AgentLaw& law,
                                                 const Vector& r,
                                                 const Vector& u0, int trials);

/// Largest singular value (induced Euclidean norm).
double induced_norm2(const Matrix& A);

/// Largest eigenvalue magnitude of a (generally non-symmetric) matrix.
double spectral_radius(const Matrix& A);

} // namespace cilc
