#include "cilc/collective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/SVD>

namespace cilc {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_laws(const LiftedPlant& plant, const std::vector<AgentLaw>& laws) {
    if (laws.empty()) throw EmptyCollective("collective needs at least one agent");
    const int M = static_cast<int>(laws.size());
    std::vector<bool> seen(static_cast<size_t>(M), false);
    for (const auto& law : laws) {
        if (law.Q.rows() != plant.N || law.Q.cols() != plant.N ||
            law.L.rows() != plant.N || law.L.cols() != plant.N) {
            throw DimensionMismatch("agent law not dimensioned for the plant");
        }
        if (law.id < 1 || law.id > M || seen[static_cast<size_t>(law.id - 1)]) {
            throw DimensionMismatch("agent ids must be 1..M and unique");
        }
        seen[static_cast<size_t>(law.id - 1)] = true;
    }
}

} // namespace

Collective make_collective(LiftedPlant plant, std::vector<AgentLaw> laws,
                           Vector r) {
    check_laws(plant, laws);
    if (r.size() != plant.N)
        throw DimensionMismatch("reference length must equal N");
    return Collective{std::move(plant), std::move(laws), std::move(r)};
}

int select_best_performer(const std::vector<Vector>& errors) {
    if (errors.empty()) throw EmptyCollective("no error trajectories given");
    const Eigen::Index n = errors.front().size();
    int best = 1;
    double best_norm = errors.front().norm();
    for (size_t m = 1; m < errors.size(); ++m) {
        if (errors[m].size() != n)
            throw DimensionMismatch("error trajectories differ in length");
        const double nm = errors[m].norm();
        if (nm < best_norm) { // ties keep the lowest id
            best_norm = nm;
            best = static_cast<int>(m) + 1;
        }
    }
    return best;
}

std::vector<Vector> collective_update(const Collective& collective,
                                      const Vector& u_bar,
                                      const Vector& e_bar) {
    if (u_bar.size() != collective.plant.N || e_bar.size() != collective.plant.N)
        throw DimensionMismatch("trajectories must have length N");
    std::vector<Vector> next;
    next.reserve(collective.laws.size());
    for (const auto& law : collective.laws)
        next.push_back(ilc_update(law, u_bar, e_bar));
    return next;
}

CilcHistory run_cilc_custom(const std::vector<PlantSim>& sims,
                            const std::vector<AgentLaw>& laws, const Vector& r,
                            const Vector& u0, int trials,
                            bool hold_on_no_improvement) {
    if (laws.empty()) throw EmptyCollective("collective needs at least one agent");
    if (sims.size() != laws.size())
        throw DimensionMismatch("one simulator per agent required");
    if (trials < 1) throw DimensionMismatch("trials must be >= 1");

    const size_t M = laws.size();
    CilcHistory history;
    history.trials.reserve(static_cast<size_t>(trials));

    std::vector<Vector> inputs(M, u0);
    for (int j = 0; j < trials; ++j) {
        CilcTrial trial;
        trial.trial = j;
        trial.agents.resize(M);
        std::vector<Vector> errors(M);
        for (size_t m = 0; m < M; ++m) {
            Vector y;
            try {
                y = sims[m](inputs[m]);
            } catch (NumericalBlowup& b) {
                throw NumericalBlowup(b.what(), j, b.sample);
            }
            TrialRecord& rec = trial.agents[m];
            rec.trial = j;
            rec.u = inputs[m];
            rec.e = r - y;
            rec.y = std::move(y);
            rec.e_norm = rec.e.norm();
            errors[m] = rec.e;
        }
        trial.best_performer = select_best_performer(errors);
        const TrialRecord& best = trial.agents[static_cast<size_t>(trial.best_performer - 1)];
        trial.u_bar = best.u;
        trial.e_bar = best.e;
        trial.e_bar_norm = best.e_norm;

        std::vector<Vector> next(M);
        for (size_t m = 0; m < M; ++m)
            next[m] = ilc_update(laws[m], trial.u_bar, trial.e_bar);

        if (hold_on_no_improvement) {
            // One-step lookahead: freeze unless some agent's candidate
            // would strictly lower the best error norm.
            double best_candidate = std::numeric_limits<double>::infinity();
            for (size_t m = 0; m < M; ++m) {
                try {
                    best_candidate = std::min(
                        best_candidate, (r - sims[m](next[m])).norm());
                } catch (const NumericalBlowup&) {
                    // A candidate that leaves the envelope cannot improve.
                }
            }
            if (!(best_candidate < trial.e_bar_norm)) {
                trial.held = true;
                next = inputs;
            }
        }

        inputs = std::move(next);
        history.trials.push_back(std::move(trial));
    }
    return history;
}

CilcHistory run_cilc(const Collective& collective, const Vector& u0,
                     int trials, bool hold_on_no_improvement) {
    check_laws(collective.plant, collective.laws);
    PlantSim sim = [&collective](const Vector& u) {
        return simulate_trial(collective.plant, u);
    };
    std::vector<PlantSim> sims(collective.laws.size(), sim);
    return run_cilc_custom(sims, collective.laws, collective.r, u0, trials,
                           hold_on_no_improvement);
}

GammaBarBounds gamma_bar(const std::vector<Matrix>& omegas,
                         int sampling_budget, std::uint64_t seed,
                         double grid_spacing) {
    if (omegas.empty()) throw EmptyCollective("no contraction matrices given");
    const Eigen::Index n = omegas.front().rows();
    for (const auto& w : omegas) {
        if (w.rows() != n || w.cols() != n)
            throw DimensionMismatch("contraction matrices differ in size");
    }
    if (sampling_budget < 1)
        throw DimensionMismatch("sampling budget must be >= 1");

    const auto min_image_norm = [&omegas](const Vector& v) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& w : omegas) best = std::min(best, (w * v).norm());
        return best;
    };

    GammaBarBounds bounds;

    double upper = std::numeric_limits<double>::infinity();
    double lower = 0.0;
    for (const auto& w : omegas) {
        Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeFullV);
        upper = std::min(upper, svd.singularValues()(0));
        // Singular-vector directions seed the sampling so the one-agent
        // case closes the gap exactly.
        for (Eigen::Index k = 0; k < n; ++k)
            lower = std::max(lower, min_image_norm(svd.matrixV().col(k)));
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < sampling_budget; ++i) {
        Vector v(n);
        double nrm = 0.0;
        do {
            for (Eigen::Index k = 0; k < n; ++k) v(k) = gauss(rng);
            nrm = v.norm();
        } while (nrm == 0.0);
        lower = std::max(lower, min_image_norm(v / nrm));
    }

    bounds.lower = lower;
    bounds.upper = upper;

    if (n == 2) {
        double lip = 0.0;
        for (const auto& w : omegas) lip = std::max(lip, induced_norm2(w));
        const auto steps = static_cast<long>(std::ceil(1.0 / grid_spacing));
        double grid_max = 0.0;
        Vector v(2);
        for (long k = 0; k < steps; ++k) {
            const double theta = 2.0 * kPi * static_cast<double>(k) * grid_spacing;
            v << std::cos(theta), std::sin(theta);
            grid_max = std::max(grid_max, min_image_norm(v));
        }
        // Points between grid nodes are at arc distance <= pi * spacing.
        bounds.certified = grid_max + lip * kPi * grid_spacing;
        bounds.lower = std::max(bounds.lower, grid_max);
    }
    return bounds;
}

double kappa_bar(const Collective& collective, double gamma_bar_value) {
    if (!(gamma_bar_value < 1.0))
        return std::numeric_limits<double>::infinity();
    const Vector rd = collective.r - collective.plant.d;
    double worst = 0.0;
    for (const auto& law : collective.laws) {
        const Matrix psi = filter_matrix(collective.plant, law);
        worst = std::max(worst, (psi * rd).norm());
    }
    return worst / (1.0 - gamma_bar_value);
}

CollectiveReport certify_collective(const Collective& collective,
                                    int sampling_budget, std::uint64_t seed,
                                    double grid_spacing) {
    check_laws(collective.plant, collective.laws);
    CollectiveReport report;

    std::vector<Matrix> omegas;
    omegas.reserve(collective.laws.size());
    for (const auto& law : collective.laws) {
        report.agents.push_back(analyze_agent(collective.plant, law, collective.r));
        omegas.push_back(contraction_matrix(collective.plant, law));
    }
    report.gamma_bar = gamma_bar(omegas, sampling_budget, seed, grid_spacing);

    const Vector rd = collective.r - collective.plant.d;

    bool any_monotone = false;
    bool any_zero_residual = false;
    double smallest_kappa = std::numeric_limits<double>::infinity();
    for (const auto& agent : report.agents) {
        if (!agent.monotone_above_threshold) continue;
        any_monotone = true;
        smallest_kappa = std::min(smallest_kappa, agent.kappa);
        if (agent.residual_error &&
            agent.residual_error->norm() <= 1e-10 * rd.norm()) {
            any_zero_residual = true;
        }
    }
    report.theorem5 =
        any_monotone ? Certification::Certified : Certification::Refuted;
    report.theorem6 =
        any_zero_residual ? Certification::Certified : Certification::Refuted;

    // min_m gamma_m already bounds gamma_bar from above (max-min <= min-max),
    // and the N = 2 grid bound may be tighter.
    double rigorous = report.gamma_bar.upper;
    if (report.gamma_bar.certified)
        rigorous = std::min(rigorous, *report.gamma_bar.certified);
    if (rigorous < 1.0) {
        report.theorem4 = Certification::Certified;
    } else if (report.gamma_bar.lower >= 1.0) {
        report.theorem4 = Certification::Refuted;
    } else {
        report.theorem4 = Certification::Inconclusive;
    }

    if (any_monotone) {
        report.kappa_bar = smallest_kappa;
        report.kappa_bar_finite = true;
        report.kappa_bar_flavor = KappaBarFlavor::Corollary1;
    } else if (report.theorem4 == Certification::Certified) {
        report.kappa_bar = kappa_bar(collective, rigorous);
        report.kappa_bar_finite = true;
        report.kappa_bar_flavor = KappaBarFlavor::CertifiedGammaBar;
    } else if (report.gamma_bar.lower < 1.0) {
        // Heuristic only: the true gamma_bar may exceed the sampled bound.
        report.kappa_bar = kappa_bar(collective, report.gamma_bar.lower);
        report.kappa_bar_finite = std::isfinite(report.kappa_bar);
        report.kappa_bar_flavor = KappaBarFlavor::HeuristicGammaBar;
    } else {
        report.kappa_bar = std::numeric_limits<double>::infinity();
        report.kappa_bar_finite = false;
        report.kappa_bar_flavor = KappaBarFlavor::NotMonotone;
    }
    return report;
}

ContractionLocus contraction_locus(const std::vector<Matrix>& omegas,
                                   int directions) {
    if (omegas.empty()) throw EmptyCollective("no contraction matrices given");
    for (const auto& w : omegas) {
        if (w.rows() != 2 || w.cols() != 2)
            throw UnsupportedDimension("contraction loci exist for N = 2 only");
    }
    if (directions < 1)
        throw DimensionMismatch("need at least one direction");

    ContractionLocus locus;
    locus.agents.assign(omegas.size(), Eigen::MatrixX2d(directions, 2));
    locus.collective.resize(directions, 2);
    for (int k = 0; k < directions; ++k) {
        const double theta = 2.0 * kPi * k / directions;
        const Eigen::Vector2d v(std::cos(theta), std::sin(theta));
        double envelope = std::numeric_limits<double>::infinity();
        for (size_t m = 0; m < omegas.size(); ++m) {
            const double radius = (omegas[m] * v).norm();
            locus.agents[m].row(k) = (radius * v).transpose();
            envelope = std::min(envelope, radius);
        }
        locus.collective.row(k) = (envelope * v).transpose();
    }
    return locus;
}

} // namespace cilc
