#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "cilc/consensus.hpp"
#include "cilc/harness.hpp"
#include "cilc/noilc.hpp"
#include "cilc/perf_eval.hpp"
#include "cilc/scenario.hpp"
#include "cilc/twipr.hpp"

namespace py = pybind11;
using namespace cilc;

PYBIND11_MODULE(cilc, m) {
    m.doc() = "Collective iterative learning control: lifted-plant trial "
              "engines, convergence certificates, norm-optimal gain design, "
              "an inverted-pendulum testbed and max-consensus election.";

    // Exceptions. Everything the library throws derives from cilc.Error.
    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base);
    py::register_exception<SingularPlant>(m, "SingularPlant", base);
    py::register_exception<EmptyCollective>(m, "EmptyCollective", base);
    py::register_exception<UnsupportedDimension>(m, "UnsupportedDimension", base);
    py::register_exception<NotStronglyConnected>(m, "NotStronglyConnected", base);
    py::register_exception<Uncontrollable>(m, "Uncontrollable", base);
    py::register_exception<BadPoleSet>(m, "BadPoleSet", base);
    py::register_exception<NumericalBlowup>(m, "NumericalBlowup", base);
    py::register_exception<IllPosed>(m, "IllPosed", base);
    py::register_exception<SequenceTooShort>(m, "SequenceTooShort", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);

    // Lifted system.
    py::class_<LiftedPlant>(m, "LiftedPlant")
        .def_readonly("P", &LiftedPlant::P)
        .def_readonly("d", &LiftedPlant::d)
        .def_readonly("N", &LiftedPlant::N);

    py::class_<AgentLaw>(m, "AgentLaw")
        .def(py::init<>())
        .def(py::init([](int id, Matrix Q, Matrix L) {
                 return AgentLaw{id, std::move(Q), std::move(L)};
             }),
             py::arg("id"), py::arg("Q"), py::arg("L"))
        .def_readwrite("id", &AgentLaw::id)
        .def_readwrite("Q", &AgentLaw::Q)
        .def_readwrite("L", &AgentLaw::L);

    py::class_<TrialRecord>(m, "TrialRecord")
        .def_readonly("trial", &TrialRecord::trial)
        .def_readonly("u", &TrialRecord::u)
        .def_readonly("y", &TrialRecord::y)
        .def_readonly("e", &TrialRecord::e)
        .def_readonly("e_norm", &TrialRecord::e_norm);

    py::class_<ConvergenceReport>(m, "ConvergenceReport")
        .def_readonly("rho", &ConvergenceReport::rho)
        .def_readonly("gamma", &ConvergenceReport::gamma)
        .def_readonly("kappa", &ConvergenceReport::kappa)
        .def_readonly("kappa_finite", &ConvergenceReport::kappa_finite)
        .def_readonly("asymptotically_stable",
                      &ConvergenceReport::asymptotically_stable)
        .def_readonly("monotone_above_threshold",
                      &ConvergenceReport::monotone_above_threshold)
        .def_readonly("residual_error", &ConvergenceReport::residual_error);

    m.def("make_lifted_plant", &make_lifted_plant, py::arg("P"), py::arg("d"),
          py::arg("tolerance") = 1e-12);
    m.def("simulate_trial", &simulate_trial, py::arg("plant"), py::arg("u"));
    m.def("ilc_update", &ilc_update, py::arg("law"), py::arg("u"), py::arg("e"));
    m.def("contraction_matrix", &contraction_matrix, py::arg("plant"),
          py::arg("law"));
    m.def("filter_matrix", &filter_matrix, py::arg("plant"), py::arg("law"));
    m.def("analyze_agent", &analyze_agent, py::arg("plant"), py::arg("law"),
          py::arg("r"));
    m.def("run_isolated_ilc", &run_isolated_ilc, py::arg("plant"),
          py::arg("law"), py::arg("r"), py::arg("u0"), py::arg("trials"));
    m.def("induced_norm2", &induced_norm2, py::arg("A"));
    m.def("spectral_radius", &spectral_radius, py::arg("A"));

    // Collective engine.
    py::class_<Collective>(m, "Collective")
        .def_readonly("plant", &Collective::plant)
        .def_readonly("laws", &Collective::laws)
        .def_readonly("r", &Collective::r);

    py::class_<CilcTrial>(m, "CilcTrial")
        .def_readonly("trial", &CilcTrial::trial)
        .def_readonly("agents", &CilcTrial::agents)
        .def_readonly("best_performer", &CilcTrial::best_performer)
        .def_readonly("u_bar", &CilcTrial::u_bar)
        .def_readonly("e_bar", &CilcTrial::e_bar)
        .def_readonly("e_bar_norm", &CilcTrial::e_bar_norm)
        .def_readonly("held", &CilcTrial::held);

    py::class_<CilcHistory>(m, "CilcHistory")
        .def_readonly("trials", &CilcHistory::trials);

    py::enum_<Certification>(m, "Certification")
        .value("Certified", Certification::Certified)
        .value("Refuted", Certification::Refuted)
        .value("Inconclusive", Certification::Inconclusive);

    py::enum_<KappaBarFlavor>(m, "KappaBarFlavor")
        .value("Corollary1", KappaBarFlavor::Corollary1)
        .value("CertifiedGammaBar", KappaBarFlavor::CertifiedGammaBar)
        .value("HeuristicGammaBar", KappaBarFlavor::HeuristicGammaBar)
        .value("NotMonotone", KappaBarFlavor::NotMonotone);

    py::class_<GammaBarBounds>(m, "GammaBarBounds")
        .def_readonly("lower", &GammaBarBounds::lower)
        .def_readonly("upper", &GammaBarBounds::upper)
        .def_readonly("certified", &GammaBarBounds::certified);

    py::class_<CollectiveReport>(m, "CollectiveReport")
        .def_readonly("agents", &CollectiveReport::agents)
        .def_readonly("gamma_bar", &CollectiveReport::gamma_bar)
        .def_readonly("kappa_bar", &CollectiveReport::kappa_bar)
        .def_readonly("kappa_bar_finite", &CollectiveReport::kappa_bar_finite)
        .def_readonly("kappa_bar_flavor", &CollectiveReport::kappa_bar_flavor)
        .def_readonly("theorem4", &CollectiveReport::theorem4)
        .def_readonly("theorem5", &CollectiveReport::theorem5)
        .def_readonly("theorem6", &CollectiveReport::theorem6);

    py::class_<ContractionLocus>(m, "ContractionLocus")
        .def_readonly("agents", &ContractionLocus::agents)
        .def_readonly("collective", &ContractionLocus::collective);

    m.def("make_collective", &make_collective, py::arg("plant"),
          py::arg("laws"), py::arg("r"));
    m.def("select_best_performer", &select_best_performer, py::arg("errors"));
    m.def("collective_update", &collective_update, py::arg("collective"),
          py::arg("u_bar"), py::arg("e_bar"));
    m.def("run_cilc", &run_cilc, py::arg("collective"), py::arg("u0"),
          py::arg("trials"), py::arg("hold_on_no_improvement") = false);
    m.def("gamma_bar", &gamma_bar, py::arg("omegas"),
          py::arg("sampling_budget"), py::arg("seed") = 1,
          py::arg("grid_spacing") = 1e-4);
    m.def("kappa_bar", &kappa_bar, py::arg("collective"),
          py::arg("gamma_bar_value"));
    m.def("certify_collective", &certify_collective, py::arg("collective"),
          py::arg("sampling_budget") = 2000, py::arg("seed") = 1,
          py::arg("grid_spacing") = 1e-4);
    m.def("contraction_locus", &contraction_locus, py::arg("omegas"),
          py::arg("directions"));

    // Norm-optimal design.
    py::class_<NoilcWeights>(m, "NoilcWeights")
        .def(py::init<>())
        .def(py::init([](double s, double r) {
                 return NoilcWeights{s, r};
             }),
             py::arg("s"), py::arg("r"))
        .def_readwrite("s", &NoilcWeights::s)
        .def_readwrite("r", &NoilcWeights::r);

    m.def("design_noilc", &design_noilc, py::arg("plant"), py::arg("weights"),
          py::arg("agent_id") = 1);
    m.def("next_trial_cost", &next_trial_cost, py::arg("plant"),
          py::arg("u_prev"), py::arg("u_next"), py::arg("e_prev"),
          py::arg("weights"));

    // Inverted-pendulum testbed.
    py::class_<TwiprParams>(m, "TwiprParams")
        .def(py::init<>())
        .def_readwrite("body_mass", &TwiprParams::body_mass)
        .def_readwrite("wheel_mass", &TwiprParams::wheel_mass)
        .def_readwrite("body_inertia", &TwiprParams::body_inertia)
        .def_readwrite("wheel_inertia", &TwiprParams::wheel_inertia)
        .def_readwrite("com_distance", &TwiprParams::com_distance)
        .def_readwrite("wheel_radius", &TwiprParams::wheel_radius)
        .def_readwrite("gravity", &TwiprParams::gravity)
        .def_readwrite("viscous_friction", &TwiprParams::viscous_friction)
        .def_readwrite("sample_period", &TwiprParams::sample_period)
        .def_readwrite("inertia_scale", &TwiprParams::inertia_scale);

    py::class_<DiscreteClosedLoop>(m, "DiscreteClosedLoop")
        .def_readonly("A", &DiscreteClosedLoop::A)
        .def_readonly("B", &DiscreteClosedLoop::B)
        .def_readonly("C", &DiscreteClosedLoop::C)
        .def_readonly("K", &DiscreteClosedLoop::K)
        .def_readonly("T", &DiscreteClosedLoop::T);

    py::class_<Linearization>(m, "Linearization")
        .def_readonly("A", &Linearization::A)
        .def_readonly("B", &Linearization::B);

    m.def("twipr_dynamics", &twipr_dynamics, py::arg("z"), py::arg("u"),
          py::arg("params"));
    m.def("linearize_upright", &linearize_upright, py::arg("params"));
    m.def("discretize_zoh", &discretize_zoh, py::arg("A_c"), py::arg("B_c"),
          py::arg("T"));
    m.def("design_feedback", &design_feedback, py::arg("A"), py::arg("B"),
          py::arg("poles"));
    m.def("default_poles", &default_poles);
    m.def("make_closed_loop", &make_closed_loop, py::arg("params"),
          py::arg("poles"));
    m.def("markov_lifted_plant", &markov_lifted_plant, py::arg("loop"),
          py::arg("N"), py::arg("z0") = Eigen::Vector4d(Eigen::Vector4d::Zero()),
          py::arg("constant_disturbance") = 0.0);
    m.def("reference_maneuver", &reference_maneuver, py::arg("N"),
          py::arg("T"));
    m.def("simulate_nonlinear_trial", &simulate_nonlinear_trial,
          py::arg("params"), py::arg("K"), py::arg("u_ilc"), py::arg("T"),
          py::arg("blowup_guard_deg") = 90.0);

    // Trial propagators and the well-performing check.
    py::class_<Propagators>(m, "Propagators")
        .def_readonly("A_bar", &Propagators::A_bar)
        .def_readonly("B_bar", &Propagators::B_bar)
        .def_readonly("f", &Propagators::f);

    py::class_<WellPerformingReport>(m, "WellPerformingReport")
        .def_readonly("certified", &WellPerformingReport::certified)
        .def_readonly("horizon", &WellPerformingReport::horizon)
        .def_readonly("tolerance", &WellPerformingReport::tolerance)
        .def_readonly("first_violation",
                      &WellPerformingReport::first_violation);

    m.def("isolated_error_closed_form", &isolated_error_closed_form,
          py::arg("omega"), py::arg("psi"), py::arg("e0"), py::arg("rd"),
          py::arg("j"));
    m.def("cilc_error_closed_form", &cilc_error_closed_form, py::arg("omegas"),
          py::arg("psis"), py::arg("f"), py::arg("e0"), py::arg("rd"),
          py::arg("j"));
    m.def("collaborative_error_closed_form", &collaborative_error_closed_form,
          py::arg("omega_m"), py::arg("psi_m"), py::arg("A_bar_prev"),
          py::arg("B_bar_prev"), py::arg("e0"), py::arg("rd"));
    m.def("predict_best_performers", &predict_best_performers,
          py::arg("omegas"), py::arg("psis"), py::arg("e0"), py::arg("rd"),
          py::arg("horizon"));
    m.def("well_performing_scores", &well_performing_scores,
          py::arg("collective"), py::arg("e0"), py::arg("rd"),
          py::arg("horizon"));
    m.def("certify_well_performing", &certify_well_performing,
          py::arg("collective"), py::arg("e0"), py::arg("rd"),
          py::arg("horizon"));

    // Consensus network.
    py::class_<Topology>(m, "Topology")
        .def_readonly("agent_count", &Topology::agent_count)
        .def_readonly("edges", &Topology::edges);

    py::class_<ConsensusTuple>(m, "ConsensusTuple")
        .def(py::init<>())
        .def(py::init([](double norm, int id, Vector u, Vector e) {
                 return ConsensusTuple{norm, id, std::move(u), std::move(e)};
             }),
             py::arg("norm"), py::arg("id"), py::arg("u"), py::arg("e"))
        .def_readwrite("norm", &ConsensusTuple::norm)
        .def_readwrite("id", &ConsensusTuple::id)
        .def_readwrite("u", &ConsensusTuple::u)
        .def_readwrite("e", &ConsensusTuple::e);

    py::class_<ElectionState>(m, "ElectionState")
        .def_readonly("best", &ElectionState::best)
        .def_readonly("round", &ElectionState::round);

    py::class_<ElectionResult>(m, "ElectionResult")
        .def_readonly("elected", &ElectionResult::elected)
        .def_readonly("winner", &ElectionResult::winner)
        .def_readonly("rounds_used", &ElectionResult::rounds_used);

    m.def("build_topology", &build_topology, py::arg("agent_count"),
          py::arg("edges"));
    m.def("diameter", &diameter, py::arg("topology"));
    m.def("init_election", &init_election, py::arg("local"));
    m.def("consensus_round", &consensus_round, py::arg("topology"),
          py::arg("state"));
    m.def("elect_best_performer", &elect_best_performer, py::arg("topology"),
          py::arg("local"));
    m.def("run_cilc_distributed", &run_cilc_distributed, py::arg("topology"),
          py::arg("collective"), py::arg("u0"), py::arg("trials"),
          py::arg("hold_on_no_improvement") = false);
    m.def("load_topology", &load_topology, py::arg("file"));

    // Scenario helpers.
    m.def("appendix_a_plant", &appendix_a_plant);
    m.def("appendix_a_laws", &appendix_a_laws);
    m.def("greedy_weights", &greedy_weights);
    m.def("conservative_weights", &conservative_weights);
    m.def("balanced_weights", &balanced_weights);
}
