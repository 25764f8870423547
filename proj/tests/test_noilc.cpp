#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cilc/noilc.hpp"
#include "cilc/twipr.hpp"
#include "test_support.hpp"

using namespace cilc;
using namespace cilc::testing;

namespace {

// Test-side oracle: minimize the next-trial cost by steepest descent with
// finite-difference gradients and exact (parabola-fit) line searches.
// Independent of the closed-form synthesis it checks.
Vector descend_cost(const LiftedPlant& plant, const Vector& u_prev,
                    const Vector& e_prev, const NoilcWeights& w,
                    int iterations = 400) {
    const auto cost = [&](const Vector& x) {
        return next_trial_cost(plant, u_prev, x, e_prev, w);
    };
    const double fd_step = 1e-6;
    Vector x = u_prev;
    for (int it = 0; it < iterations; ++it) {
        Vector grad(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            Vector hi = x;
            Vector lo = x;
            hi(i) += fd_step;
            lo(i) -= fd_step;
            grad(i) = (cost(hi) - cost(lo)) / (2.0 * fd_step);
        }
        const double gnorm = grad.norm();
        if (gnorm < 1e-13) break;
        const Vector dir = -grad / gnorm;
        // The cost is exactly quadratic along the ray; three samples pin it.
        const double h = 1e-3;
        const double j0 = cost(x);
        const double j1 = cost(x + h * dir);
        const double j2 = cost(x + 2.0 * h * dir);
        const double curv = (j2 - 2.0 * j1 + j0) / (2.0 * h * h);
        if (curv <= 0.0) break;
        const double slope = (j1 - j0) / h - curv * h;
        x += (-slope / (2.0 * curv)) * dir;
    }
    return x;
}

Vector analytic_gradient(const LiftedPlant& plant, const Vector& u_prev,
                         const Vector& u_next, const Vector& e_prev,
                         const NoilcWeights& w) {
    const Matrix gram = plant.P.transpose() * plant.P;
    return 2.0 * (gram + (w.s + w.r) * Matrix::Identity(plant.N, plant.N)) *
               u_next -
           2.0 * (gram + w.s * Matrix::Identity(plant.N, plant.N)) * u_prev -
           2.0 * plant.P.transpose() * e_prev;
}

} // namespace

TEST_CASE("design_noilc closed form") {
    Rng rng(41);
    const LiftedPlant plant = random_plant(rng, 4);

    SUBCASE("zero weights give the deadbeat law") {
        const AgentLaw law = design_noilc(plant, {0.0, 0.0});
        CHECK((law.Q - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
        CHECK((law.L * plant.P - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <=
              1e-10);
        const Vector r = random_vector(rng, 4);
        const auto run = run_isolated_ilc(plant, law, r, Vector::Zero(4), 2);
        CHECK(run[1].e_norm <= 1e-10);
    }

    SUBCASE("r = 0 pins Q to the identity and zeroes the residual") {
        for (double s : {0.1, 1.0, 10.0}) {
            const AgentLaw law = design_noilc(plant, {s, 0.0});
            CHECK((law.Q - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
            const Vector r = random_vector(rng, 4);
            const ConvergenceReport rep = analyze_agent(plant, law, r);
            REQUIRE(rep.residual_error.has_value());
            CHECK(rep.residual_error->norm() <=
                  1e-10 * (r - plant.d).norm());
            CHECK(rep.kappa <= 1e-10 * (r - plant.d).norm());
        }
    }

    SUBCASE("negative weights are rejected") {
        CHECK_THROWS_AS(design_noilc(plant, {-1.0, 0.0}), IllPosed);
        CHECK_THROWS_AS(design_noilc(plant, {0.0, -0.5}), IllPosed);
    }
}

TEST_CASE("next_trial_cost") {
    Rng rng(43);
    const LiftedPlant plant = random_plant(rng, 3);
    const Vector u = random_vector(rng, 3);
    const Vector e = random_vector(rng, 3);

    SUBCASE("no change, no magnitude penalty: cost is the squared error") {
        CHECK(next_trial_cost(plant, u, u, e, {0.7, 0.0}) ==
              doctest::Approx(e.squaredNorm()).epsilon(1e-14));
    }

    SUBCASE("deadbeat step with zero weights has zero cost") {
        const AgentLaw db = deadbeat_law(plant);
        const Vector u_next = ilc_update(db, u, e);
        CHECK(next_trial_cost(plant, u, u_next, e, {0.0, 0.0}) <= 1e-18);
    }

    CHECK_THROWS_AS(next_trial_cost(plant, Vector::Zero(2), u, e, {1, 1}),
                    DimensionMismatch);
}

TEST_CASE("synthesized update minimizes the cost") {
    Rng rng(47);
    std::uniform_real_distribution<double> weight(0.05, 2.0);
    for (int sample = 0; sample < 5; ++sample) {
        const Eigen::Index n = 3 + sample % 3;
        const LiftedPlant plant = random_plant(rng, n);
        const NoilcWeights w{weight(rng), weight(rng)};
        const AgentLaw law = design_noilc(plant, w);
        const Vector u_prev = random_vector(rng, n);
        const Vector e_prev = random_vector(rng, n);
        const Vector u_next = ilc_update(law, u_prev, e_prev);
        const double best = next_trial_cost(plant, u_prev, u_next, e_prev, w);

        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int k = 0; k < 200; ++k) {
            Vector delta(n);
            for (Eigen::Index i = 0; i < n; ++i) delta(i) = gauss(rng);
            delta *= 1e-3 / delta.norm();
            CHECK(next_trial_cost(plant, u_prev, u_next + delta, e_prev, w) >=
                  best);
        }

        const Vector grad = analytic_gradient(plant, u_prev, u_next, e_prev, w);
        CHECK(grad.norm() <= 1e-8 * std::max(1.0, u_next.norm()));

        // Central finite differences agree with the analytic gradient away
        // from the optimum too.
        const Vector probe = u_next + random_vector(rng, n, 0.5);
        const Vector g_probe =
            analytic_gradient(plant, u_prev, probe, e_prev, w);
        const double fd_step = 1e-6;
        for (Eigen::Index i = 0; i < n; ++i) {
            Vector hi = probe;
            Vector lo = probe;
            hi(i) += fd_step;
            lo(i) -= fd_step;
            const double fd =
                (next_trial_cost(plant, u_prev, hi, e_prev, w) -
                 next_trial_cost(plant, u_prev, lo, e_prev, w)) /
                (2.0 * fd_step);
            CHECK(fd == doctest::Approx(g_probe(i))
                            .epsilon(1e-6)
                            .scale(std::max(1.0, g_probe.cwiseAbs().maxCoeff())));
        }

        const Vector descended = descend_cost(plant, u_prev, e_prev, w);
        CHECK((descended - u_next).norm() <=
              1e-6 * std::max(1.0, u_next.norm()));
    }
}

TEST_CASE("TWIPR plant weight behavior") {
    const DiscreteClosedLoop loop =
        make_closed_loop(TwiprParams{}, default_poles());
    const LiftedPlant plant = markov_lifted_plant(loop, 100);
    const Vector r = reference_maneuver(100, 0.02);

    SUBCASE("gamma grows toward one as s rises (slower convergence)") {
        // Omega for the synthesized law diagonalizes in the plant's left
        // singular basis: gamma = s / (sigma_min^2 + s + r).
        Eigen::JacobiSVD<Matrix> svd(plant.P);
        const double sigma_min2 =
            svd.singularValues()(plant.N - 1) * svd.singularValues()(plant.N - 1);
        double previous = -1.0;
        for (double s = 1e-3; s <= 10.0; s *= 2.0) {
            const AgentLaw law = design_noilc(plant, {s, 0.0});
            const double gamma = analyze_agent(plant, law, r).gamma;
            CHECK(gamma >= previous);
            CHECK(gamma ==
                  doctest::Approx(s / (sigma_min2 + s)).epsilon(1e-6));
            CHECK(gamma < 1.0);
            previous = gamma;
        }
    }

    SUBCASE("experiment weight pair: slower-but-lower vs faster-but-higher") {
        const AgentLaw slow_low = design_noilc(plant, {5.0, 0.1}, 1);
        const AgentLaw fast_high = design_noilc(plant, {0.05, 1.0}, 2);
        const auto run1 =
            run_isolated_ilc(plant, slow_low, r, Vector::Zero(100), 25);
        const auto run2 =
            run_isolated_ilc(plant, fast_high, r, Vector::Zero(100), 25);
        // Residual ordering from the r weights.
        CHECK(run1.back().e_norm < run2.back().e_norm);
        // The lightly damped design moves faster on the first trials.
        CHECK(run2[1].e_norm < run1[1].e_norm);
    }
}
