#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cilc/perf_eval.hpp"
#include "cilc/scenario.hpp"
#include "test_support.hpp"

using namespace cilc;
using namespace cilc::testing;

namespace {

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

struct Family {
    std::vector<Matrix> omegas;
    std::vector<Matrix> psis;
};

Family family_of(const Collective& collective) {
    Family f;
    for (const auto& law : collective.laws) {
        f.omegas.push_back(contraction_matrix(collective.plant, law));
        f.psis.push_back(filter_matrix(collective.plant, law));
    }
    return f;
}

std::vector<int> elections_of(const CilcHistory& history) {
    std::vector<int> f;
    for (const auto& trial : history.trials) f.push_back(trial.best_performer);
    return f;
}

// Literal product/sum forms of the propagators with the resolved index
// ranges: A has factors f_j ... f_1, B sums products down to f_{p+1}.
Matrix literal_a_bar(const Family& fam, const std::vector<int>& f, int j) {
    const Eigen::Index n = fam.omegas.front().rows();
    Matrix a = Matrix::Identity(n, n);
    for (int i = 1; i <= j; ++i)
        a = fam.omegas[static_cast<size_t>(f[static_cast<size_t>(i)] - 1)] * a;
    return a;
}

Matrix literal_b_bar(const Family& fam, const std::vector<int>& f, int j) {
    const Eigen::Index n = fam.omegas.front().rows();
    Matrix b = Matrix::Zero(n, n);
    for (int p = 1; p <= j; ++p) {
        Matrix prod = Matrix::Identity(n, n);
        for (int l = j; l >= p + 1; --l)
            prod = prod *
                   fam.omegas[static_cast<size_t>(f[static_cast<size_t>(l)] - 1)];
        b += prod * fam.psis[static_cast<size_t>(f[static_cast<size_t>(p)] - 1)];
    }
    return b;
}

Collective appendix_a_collective() {
    return make_collective(appendix_a_plant(), appendix_a_laws(), vec2(1, 0));
}

} // namespace

TEST_CASE("isolated closed form") {
    Rng rng(61);
    const LiftedPlant plant = random_plant(rng, 4);

    SUBCASE("trial zero returns the initial error") {
        const Matrix omega = random_matrix(rng, 4);
        const Matrix psi = random_matrix(rng, 4);
        const Vector e0 = random_vector(rng, 4);
        const Vector rd = random_vector(rng, 4);
        CHECK((isolated_error_closed_form(omega, psi, e0, rd, 0) - e0).norm() ==
              0.0);
    }

    SUBCASE("deadbeat vanishes from trial one") {
        const Vector e0 = random_vector(rng, 4);
        const Vector rd = random_vector(rng, 4);
        for (int j = 1; j <= 5; ++j) {
            CHECK(isolated_error_closed_form(Matrix::Zero(4, 4),
                                             Matrix::Zero(4, 4), e0, rd, j)
                      .norm() == 0.0);
        }
    }

    SUBCASE("matches the simulation for 20 trials") {
        for (int sample = 0; sample < 20; ++sample) {
            const Eigen::Index n = 2 + sample % 7;
            const LiftedPlant p = random_plant(rng, n);
            const AgentLaw law = (sample % 2 == 0)
                                     ? random_law(rng, n, 1, 0.6)
                                     : random_monotone_law(p, rng);
            const Vector r = random_vector(rng, n);
            const Vector u0 = random_vector(rng, n);
            const Matrix omega = contraction_matrix(p, law);
            const Matrix psi = filter_matrix(p, law);
            const auto run = run_isolated_ilc(p, law, r, u0, 21);
            const Vector rd = r - p.d;
            for (int j = 0; j <= 20; ++j) {
                const Vector closed =
                    isolated_error_closed_form(omega, psi, run[0].e, rd, j);
                const double scale =
                    std::max(1.0, run[static_cast<size_t>(j)].e.norm());
                CHECK((closed - run[static_cast<size_t>(j)].e).norm() <=
                      1e-9 * scale);
            }
        }
    }

    CHECK_THROWS_AS(isolated_error_closed_form(Matrix::Zero(2, 2),
                                               Matrix::Zero(3, 3),
                                               Vector::Zero(2),
                                               Vector::Zero(2), 1),
                    DimensionMismatch);
}

TEST_CASE("collective closed form") {
    const Collective collective = appendix_a_collective();
    const Family fam = family_of(collective);
    const Vector rd = collective.r - collective.plant.d;

    SUBCASE("single agent reduces to the isolated form") {
        Rng rng(67);
        const LiftedPlant p = random_plant(rng, 3);
        const AgentLaw law = random_law(rng, 3, 1, 0.7);
        const Matrix omega = contraction_matrix(p, law);
        const Matrix psi = filter_matrix(p, law);
        const Vector e0 = random_vector(rng, 3);
        const Vector rr = random_vector(rng, 3);
        const std::vector<int> constant(25, 1);
        for (int j = 0; j <= 20; ++j) {
            const Vector a =
                cilc_error_closed_form({omega}, {psi}, constant, e0, rr, j);
            const Vector b = isolated_error_closed_form(omega, psi, e0, rr, j);
            CHECK((a - b).norm() <= 1e-12 * std::max(1.0, b.norm()));
        }
    }

    SUBCASE("matches the simulated collective error") {
        const CilcHistory history =
            run_cilc(collective, Vector::Zero(2), 21);
        const std::vector<int> f = elections_of(history);
        for (int j = 0; j <= 20; ++j) {
            const Vector closed = cilc_error_closed_form(
                fam.omegas, fam.psis, f, history.trials[0].e_bar, rd, j);
            const Vector simulated = history.trials[static_cast<size_t>(j)].e_bar;
            CHECK((closed - simulated).norm() <=
                  1e-9 * std::max(1.0, simulated.norm()));
        }
    }

    SUBCASE("alternating deadbeat agents stay at zero") {
        std::vector<int> f = {1, 2, 1, 2, 1, 2};
        const Matrix zero = Matrix::Zero(2, 2);
        for (int j = 1; j <= 5; ++j) {
            CHECK(cilc_error_closed_form({zero, zero}, {zero, zero}, f,
                                         vec2(1, -2), vec2(0.5, 0.5), j)
                      .norm() == 0.0);
        }
    }

    SUBCASE("short sequences are rejected") {
        CHECK_THROWS_AS(cilc_error_closed_form(fam.omegas, fam.psis, {1, 2},
                                               vec2(1, 0), rd, 2),
                        SequenceTooShort);
    }
}

TEST_CASE("collaborative closed form") {
    const Collective collective = appendix_a_collective();
    const Family fam = family_of(collective);
    const Vector rd = collective.r - collective.plant.d;

    SUBCASE("trial one base case") {
        const Vector e0 = vec2(0.3, -0.8);
        for (size_t m = 0; m < 2; ++m) {
            const Vector got = collaborative_error_closed_form(
                fam.omegas[m], fam.psis[m], Matrix::Identity(2, 2),
                Matrix::Zero(2, 2), e0, rd);
            const Vector want = fam.omegas[m] * e0 + fam.psis[m] * rd;
            CHECK((got - want).norm() <= 1e-14);
        }
    }

    SUBCASE("matches every agent's simulated error") {
        const CilcHistory history = run_cilc(collective, Vector::Zero(2), 21);
        const Propagators props = predict_best_performers(
            fam.omegas, fam.psis, history.trials[0].e_bar, rd, 20);
        for (int j = 1; j <= 20; ++j) {
            for (size_t m = 0; m < 2; ++m) {
                const Vector closed = collaborative_error_closed_form(
                    fam.omegas[m], fam.psis[m],
                    props.A_bar[static_cast<size_t>(j - 1)],
                    props.B_bar[static_cast<size_t>(j - 1)],
                    history.trials[0].e_bar, rd);
                const Vector simulated =
                    history.trials[static_cast<size_t>(j)].agents[m].e;
                CHECK((closed - simulated).norm() <=
                      1e-9 * std::max(1.0, simulated.norm()));
            }
        }
    }

    SUBCASE("zero maps ignore the history") {
        Rng rng(3);
        const Matrix zero = Matrix::Zero(2, 2);
        const Vector got = collaborative_error_closed_form(
            zero, zero, random_matrix(rng, 2), Matrix::Zero(2, 2), vec2(1, 2),
            vec2(3, 4));
        CHECK(got.norm() == 0.0);
    }
}

TEST_CASE("predicted elections") {
    SUBCASE("a deadbeat agent wins every trial from one onward") {
        Rng rng(71);
        const LiftedPlant plant = random_plant(rng, 3);
        const AgentLaw other = random_law(rng, 3, 1, 0.6);
        const AgentLaw db = deadbeat_law(plant, 2);
        const Collective c =
            make_collective(plant, {other, db}, random_vector(rng, 3));
        const Family fam = family_of(c);
        const Vector rd = c.r - c.plant.d;
        const Propagators props =
            predict_best_performers(fam.omegas, fam.psis, rd, rd, 15);
        for (size_t j = 1; j < props.f.size(); ++j) CHECK(props.f[j] == 2);
    }

    SUBCASE("reference collective: prediction equals simulation exactly") {
        const Collective collective = appendix_a_collective();
        const Family fam = family_of(collective);
        const Vector rd = collective.r - collective.plant.d;
        const CilcHistory history = run_cilc(collective, Vector::Zero(2), 21);
        const Propagators props =
            predict_best_performers(fam.omegas, fam.psis, rd, rd, 20);
        const std::vector<int> simulated = elections_of(history);
        REQUIRE(props.f.size() == simulated.size());
        for (size_t j = 0; j < simulated.size(); ++j)
            CHECK(props.f[j] == simulated[j]);
    }

    SUBCASE("single agent gives a constant sequence") {
        Rng rng(73);
        const LiftedPlant plant = random_plant(rng, 2);
        const AgentLaw law = random_law(rng, 2);
        const Collective c =
            make_collective(plant, {law}, random_vector(rng, 2));
        const Family fam = family_of(c);
        const Propagators props = predict_best_performers(
            fam.omegas, fam.psis, vec2(1, 1), vec2(1, 1), 10);
        for (int id : props.f) CHECK(id == 1);
    }
}

TEST_CASE("well-performing scores") {
    const Collective collective = appendix_a_collective();
    const Vector rd = collective.r - collective.plant.d;

    SUBCASE("trial zero scores vanish") {
        const Matrix scores = well_performing_scores(collective, rd, rd, 10);
        for (Eigen::Index m = 0; m < scores.cols(); ++m)
            CHECK(scores(0, m) == 0.0);
    }

    SUBCASE("keystone identity: closed form equals simulated difference") {
        Rng rng(79);
        for (int sample = 0; sample < 30; ++sample) {
            const Eigen::Index n = 2 + sample % 7;
            const LiftedPlant plant = random_plant(rng, n);
            const int M = 2 + sample % 3;
            std::vector<AgentLaw> laws;
            for (int m = 1; m <= M; ++m) {
                laws.push_back(m == 1 ? random_monotone_law(plant, rng, m)
                                      : random_law(rng, n, m, 0.6));
            }
            const Vector r = random_vector(rng, n);
            const Collective c = make_collective(plant, laws, r);
            const Vector rdn = r - plant.d;
            const Vector u0 = Vector::Zero(n);

            const CilcHistory history = run_cilc(c, u0, 21);
            std::vector<std::vector<TrialRecord>> isolated;
            for (const auto& law : laws)
                isolated.push_back(run_isolated_ilc(plant, law, r, u0, 21));

            const Matrix scores =
                well_performing_scores(c, history.trials[0].e_bar, rdn, 20);
            for (int j = 0; j <= 20; ++j) {
                const double cilc_sq =
                    history.trials[static_cast<size_t>(j)].e_bar.squaredNorm();
                for (int m = 0; m < M; ++m) {
                    const double iso_sq = isolated[static_cast<size_t>(m)]
                                              [static_cast<size_t>(j)]
                                                  .e.squaredNorm();
                    const double simulated = cilc_sq - iso_sq;
                    const double scale =
                        std::max({1.0, cilc_sq, iso_sq});
                    CHECK(std::abs(scores(j, m) - simulated) <= 1e-9 * scale);
                }
            }
        }
    }

    SUBCASE("zero-input special path agrees with the general path") {
        // Force the general path with an e0 that only differs by address.
        const Vector e0_same = rd;
        Vector e0_general = rd;
        e0_general(0) += 1e-300; // breaks exact equality, not the values
        const Matrix special =
            well_performing_scores(collective, e0_same, rd, 15);
        const Matrix general =
            well_performing_scores(collective, e0_general, rd, 15);
        for (Eigen::Index j = 0; j < special.rows(); ++j)
            for (Eigen::Index m = 0; m < special.cols(); ++m)
                CHECK(special(j, m) ==
                      doctest::Approx(general(j, m)).epsilon(1e-12));
    }

    SUBCASE("a deadbeat member scores zero against itself") {
        Rng rng(83);
        const LiftedPlant plant = random_plant(rng, 3);
        std::vector<AgentLaw> laws = {random_law(rng, 3, 1, 0.6),
                                      deadbeat_law(plant, 2)};
        const Vector r = random_vector(rng, 3);
        const Collective c = make_collective(plant, laws, r);
        const Vector rdn = r - plant.d;
        const Matrix scores = well_performing_scores(c, rdn, rdn, 12);
        for (int j = 1; j <= 12; ++j)
            CHECK(std::abs(scores(j, 1)) <= 1e-12 * rdn.squaredNorm());
    }
}

TEST_CASE("well-performing certification") {
    SUBCASE("homogeneous collectives certify at any horizon") {
        Rng rng(89);
        const LiftedPlant plant = random_plant(rng, 3);
        AgentLaw law = random_law(rng, 3, 1, 0.7);
        AgentLaw copy = law;
        copy.id = 2;
        const Vector r = random_vector(rng, 3);
        const Collective c = make_collective(plant, {law, copy}, r);
        const WellPerformingReport report =
            certify_well_performing(c, r - plant.d, r - plant.d, 40);
        CHECK(report.certified);
        CHECK(report.horizon == 40);
    }

    SUBCASE("a strictly dominant agent carries the collective") {
        // P = I, Q = I, L scaled: error maps 0.9 I and 0.5 I, no bias.
        const LiftedPlant plant =
            make_lifted_plant(Matrix::Identity(2, 2), Vector::Zero(2));
        std::vector<AgentLaw> laws = {
            AgentLaw{1, Matrix::Identity(2, 2), 0.1 * Matrix::Identity(2, 2)},
            AgentLaw{2, Matrix::Identity(2, 2), 0.5 * Matrix::Identity(2, 2)}};
        const Vector r = vec2(1, -2);
        const Collective c = make_collective(plant, laws, r);
        const WellPerformingReport report =
            certify_well_performing(c, r, r, 30);
        CHECK(report.certified);

        const CilcHistory history = run_cilc(c, Vector::Zero(2), 30);
        const auto dominant =
            run_isolated_ilc(plant, laws[1], r, Vector::Zero(2), 30);
        for (int j = 0; j < 30; ++j) {
            CHECK(history.trials[static_cast<size_t>(j)].e_bar_norm ==
                  doctest::Approx(dominant[static_cast<size_t>(j)].e_norm)
                      .epsilon(1e-12));
        }
    }

    SUBCASE("reference collective outperforms its divergent members") {
        const Collective collective = appendix_a_collective();
        const Vector rd = collective.r - collective.plant.d;
        const WellPerformingReport report =
            certify_well_performing(collective, rd, rd, 30);
        CHECK(report.certified);
    }

    SUBCASE("a refutation names the first violation") {
        // Agent 2's first move overshoots: from e0 = rd the map with a
        // large bias beats nobody, so the collective equals agent 1; make
        // agent 1 worse later by an expanding Omega.
        const LiftedPlant plant =
            make_lifted_plant(Matrix::Identity(2, 2), Vector::Zero(2));
        Matrix q1(2, 2);
        q1 << 1.05, 0.4, 0.0, 1.05; // expanding but initially helpful
        std::vector<AgentLaw> laws = {
            AgentLaw{1, q1, 0.9 * Matrix::Identity(2, 2)},
            AgentLaw{2, Matrix::Identity(2, 2), 0.05 * Matrix::Identity(2, 2)}};
        const Vector r = vec2(2, 1);
        const Collective c = make_collective(plant, laws, r);
        const WellPerformingReport report =
            certify_well_performing(c, r, r, 40);
        if (!report.certified) {
            REQUIRE(report.first_violation.has_value());
            CHECK(report.first_violation->first >= 1);
            CHECK(report.first_violation->second >= 1);
            // The named entry really violates the tolerance.
            const Matrix scores = well_performing_scores(c, r, r, 40);
            CHECK(scores(report.first_violation->first,
                         report.first_violation->second - 1) >
                  report.tolerance);
        }
    }
}

TEST_CASE("literal product forms agree with the recursion") {
    Rng rng(97);
    for (int sample = 0; sample < 20; ++sample) {
        const Eigen::Index n = 2 + sample % 5;
        const LiftedPlant plant = random_plant(rng, n);
        const int M = 2 + sample % 2;
        std::vector<AgentLaw> laws;
        for (int m = 1; m <= M; ++m)
            laws.push_back(random_law(rng, n, m, 0.7));
        const Vector r = random_vector(rng, n);
        const Collective c = make_collective(plant, laws, r);
        const Family fam = family_of(c);
        const Vector rd = r - plant.d;
        const Propagators props =
            predict_best_performers(fam.omegas, fam.psis, rd, rd, 3);
        for (int j = 1; j <= 3; ++j) {
            const Matrix a_lit = literal_a_bar(fam, props.f, j);
            const Matrix b_lit = literal_b_bar(fam, props.f, j);
            CHECK((a_lit - props.A_bar[static_cast<size_t>(j)])
                      .cwiseAbs()
                      .maxCoeff() <= 1e-12);
            CHECK((b_lit - props.B_bar[static_cast<size_t>(j)])
                      .cwiseAbs()
                      .maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("property: prediction matches elections outside near-ties") {
    Rng rng(101);
    int compared = 0;
    int near_tie_runs = 0;
    for (int sample = 0; sample < 40; ++sample) {
        const Eigen::Index n = 2 + sample % 5;
        const LiftedPlant plant = random_plant(rng, n);
        const int M = 2 + sample % 3;
        std::vector<AgentLaw> laws;
        for (int m = 1; m <= M; ++m)
            laws.push_back(m == 1 ? random_monotone_law(plant, rng, m)
                                  : random_law(rng, n, m, 0.6));
        const Vector r = random_vector(rng, n);
        const Collective c = make_collective(plant, laws, r);
        const Family fam = family_of(c);
        const Vector rd = r - plant.d;

        const CilcHistory history = run_cilc(c, Vector::Zero(n), 21);
        const Propagators props =
            predict_best_performers(fam.omegas, fam.psis, rd, rd, 20);

        for (size_t j = 0; j < history.trials.size(); ++j) {
            // Near-tie detection on the simulated candidate squared norms.
            std::vector<double> squared;
            for (const auto& rec : history.trials[j].agents)
                squared.push_back(rec.e.squaredNorm());
            std::sort(squared.begin(), squared.end());
            const bool near_tie =
                squared.size() > 1 &&
                squared[1] - squared[0] <=
                    1e-12 * std::max({1.0, squared[0], squared[1]});
            if (near_tie && j > 0) {
                ++near_tie_runs; // logged: comparison undefined beyond here
                break;
            }
            CHECK(props.f[j] == history.trials[j].best_performer);
            ++compared;
        }
    }
    CHECK(compared > 500); // the property must not be vacuous
    (void)near_tie_runs;
}
