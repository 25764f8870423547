#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cilc/lifted_system.hpp"

namespace cilc {

/// A group of agents sharing one plant and one reference. Agent ids must
/// be exactly 1..M (any order, no duplicates).
struct Collective {
    LiftedPlant plant;
    std::vector<AgentLaw> laws;
    Vector r;
};

Collective make_collective(LiftedPlant plant, std::vector<AgentLaw> laws,
                           Vector r);

/// One trial of the collective: every agent's record, the elected best
/// performer, the shared (u_bar, e_bar) pair, and whether the
/// hold-on-no-improvement variant froze the update out of this trial.
struct CilcTrial {
    int trial = 0;
    std::vector<TrialRecord> agents;
    int best_performer = 0;
    Vector u_bar;
    Vector e_bar;
    double e_bar_norm = 0.0;
    bool held = false;
};

struct CilcHistory {
    std::vector<CilcTrial> trials;
};

enum class Certification { Certified, Refuted, Inconclusive };

/// Which gamma-bar value backed the reported kappa-bar.
enum class KappaBarFlavor {
    Corollary1,        // smallest individual threshold (Theorem 5 route)
    CertifiedGammaBar, // rigorous upper bound on gamma-bar
    HeuristicGammaBar, // explicitly marked non-rigorous
    NotMonotone        // gamma-bar >= 1, threshold infinite
};

struct GammaBarBounds {
    double lower = 0.0;               // sampled lower bound
    double upper = 0.0;               // min_m ||Omega_m|| (rigorous)
    std::optional<double> certified;  // N = 2 grid bound, also rigorous
};

struct CollectiveReport {
    std::vector<ConvergenceReport> agents;
    GammaBarBounds gamma_bar;
    double kappa_bar = 0.0;
    bool kappa_bar_finite = false;
    KappaBarFlavor kappa_bar_flavor = KappaBarFlavor::NotMonotone;
    Certification theorem4 = Certification::Inconclusive;
    Certification theorem5 = Certification::Inconclusive;
    Certification theorem6 = Certification::Inconclusive;
};

/// Point sets tracing ||Omega v|| v over the unit circle (N = 2 only):
/// one polygon per agent plus the collective min-envelope.
struct ContractionLocus {
    std::vector<Eigen::MatrixX2d> agents;
    Eigen::MatrixX2d collective;
};

/// Id of the minimal-Euclidean-norm error; ties break to the lowest id.
/// Agent ids are the 1-based positions in `errors`.
int select_best_performer(const std::vector<Vector>& errors);

/// Every agent updates from the same (u_bar, e_bar) pair:
/// u+^m = Q_m (u_bar + L_m e_bar). Returned in law order.
std::vector<Vector> collective_update(const Collective& collective,
                                      const Vector& u_bar,
                                      const Vector& e_bar);

/// The CILC trial loop: simulate all agents, elect the best performer,
/// apply the collective update. All agents start from the same u0. With
/// hold_on_no_improvement, a one-step lookahead freezes the inputs for a
/// trial whenever no agent's candidate update would lower the best error
/// norm; the trial that froze carries held = true.
CilcHistory run_cilc(const Collective& collective, const Vector& u0,
                     int trials, bool hold_on_no_improvement = false);

/// Same loop with one simulator per agent (perturbation hook; Assumption-1
/// collectives pass M views of the same plant).
CilcHistory run_cilc_custom(const std::vector<PlantSim>& sims,
                            const std::vector<AgentLaw>& laws, const Vector& r,
                            const Vector& u0, int trials,
                            bool hold_on_no_improvement = false);

/// Bounds for the collective convergence rate
///   gamma_bar = sup_{v != 0} min_m ||Omega_m v|| / ||v||.
/// lower: best sampled direction (uniform sphere samples + every agent's
/// singular-vector directions). upper: min_m ||Omega_m||, rigorous since
/// max-min <= min-max. certified: N = 2 only — angular grid theta_k =
/// 2 pi k delta padded by the Lipschitz term max_m||Omega_m|| pi delta.
GammaBarBounds gamma_bar(const std::vector<Matrix>& omegas,
                         int sampling_budget, std::uint64_t seed = 1,
                         double grid_spacing = 1e-4);

/// kappa_bar = max_m ||Psi_m (r - d)|| / (1 - gamma_bar); infinity (and
/// kappa_bar_finite = false downstream) when gamma_bar >= 1.
double kappa_bar(const Collective& collective, double gamma_bar_value);

/// Certificates for Theorems 4-6 on one collective. Theorem flags only
/// claim "certified" from rigorous gamma-bar bounds, never from the
/// sampled lower bound.
CollectiveReport certify_collective(const Collective& collective,
                                    int sampling_budget = 2000,
                                    std::uint64_t seed = 1,
                                    double grid_spacing = 1e-4);

/// Loci for `directions` evenly spaced unit vectors.
/// Throws UnsupportedDimension unless the Omegas are 2x2.
ContractionLocus contraction_locus(const std::vector<Matrix>& omegas,
                                   int directions);

} // namespace cilc
