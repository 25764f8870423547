#include "cilc/scenario.hpp"

#include <fstream>

#include "json.hpp"

namespace cilc {

namespace {

using nlohmann::json;

Matrix parse_matrix(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ConfigError(field + ": expected an array of rows");
    const size_t rows = j.size();
    const size_t cols = j[0].size();
    Matrix m(rows, cols);
    for (size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw ConfigError(field + ": ragged rows");
        for (size_t k = 0; k < cols; ++k) {
            if (!j[i][k].is_number())
                throw ConfigError(field + ": entries must be numbers");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                j[i][k].get<double>();
        }
    }
    return m;
}

Vector parse_vector(const json& j, const std::string& field) {
    if (!j.is_array()) throw ConfigError(field + ": expected an array");
    Vector v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw ConfigError(field + ": entries must be numbers");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

} // namespace

LiftedPlant appendix_a_plant() {
    Matrix P(2, 2);
    P << 1.0, 0.0, 0.25, 1.0;
    return make_lifted_plant(P, Vector::Zero(2));
}

std::vector<AgentLaw> appendix_a_laws() {
    Matrix Q1(2, 2);
    Q1 << 1.0, 0.0, 0.1, 0.2;
    Matrix L1(2, 2);
    L1 << -0.3, 0.0, 0.0, -0.3;
    Matrix Q2(2, 2);
    Q2 << 0.25, 0.0, -0.1, 1.15;
    Matrix L2(2, 2);
    L2 << -0.07, 0.0, 0.02, -0.07;
    return {AgentLaw{1, Q1, L1}, AgentLaw{2, Q2, L2}};
}

// Study profiles in the toolkit's units (pitch in degrees, torque in N m;
// the squared-degree scale makes the robust weights numerically large).
// greedy: near-inverse learning, fast and fragile. conservative: heavy
// input-change damping, zero residual (r = 0). balanced: robust with a
// visible residual floor.
NoilcWeights greedy_weights() { return {1.0, 0.001}; }
NoilcWeights conservative_weights() { return {2500.0, 0.0}; }
NoilcWeights balanced_weights() { return {2200.0, 5.0}; }

ScenarioConfig load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file: " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
    if (j.value("schema_version", 0) != 1)
        throw ConfigError("config: schema_version must be 1");

    ScenarioConfig cfg;
    cfg.scenario = j.value("scenario", std::string("certify"));

    if (j.contains("plant")) {
        const auto& plant = j.at("plant");
        const std::string source = plant.value("source", std::string());
        if (source == "appendix-a") {
            cfg.plant_source = PlantSource::AppendixA;
        } else if (source == "twipr") {
            cfg.plant_source = PlantSource::Twipr;
            if (plant.contains("params_file")) {
                cfg.twipr = load_twipr_config(
                    plant.at("params_file").get<std::string>());
            }
            cfg.horizon = plant.value("horizon", 100);
            if (cfg.horizon < 1)
                throw ConfigError("plant.horizon: must be >= 1");
        } else if (source == "explicit") {
            cfg.plant_source = PlantSource::Explicit;
            if (!plant.contains("P"))
                throw ConfigError("plant.P: required for an explicit plant");
            cfg.P = parse_matrix(plant.at("P"), "plant.P");
            cfg.d = plant.contains("d")
                        ? parse_vector(plant.at("d"), "plant.d")
                        : Vector(Vector::Zero(cfg.P->rows()));
        } else {
            throw ConfigError(
                "plant.source: expected appendix-a | twipr | explicit");
        }
    }

    if (j.contains("agents")) {
        const auto& agents = j.at("agents");
        if (!agents.is_array() || agents.empty())
            throw ConfigError("agents: expected a non-empty array");
        for (size_t i = 0; i < agents.size(); ++i) {
            const auto& a = agents[i];
            AgentSpec spec;
            spec.id = a.value("id", static_cast<int>(i) + 1);
            if (a.contains("noilc")) {
                const auto& w = a.at("noilc");
                if (!w.contains("s") || !w.contains("r"))
                    throw ConfigError("agents[].noilc: needs s and r");
                spec.noilc = NoilcWeights{w.at("s").get<double>(),
                                          w.at("r").get<double>()};
            } else if (a.contains("Q") && a.contains("L")) {
                spec.Q = parse_matrix(a.at("Q"), "agents[].Q");
                spec.L = parse_matrix(a.at("L"), "agents[].L");
            } else {
                throw ConfigError(
                    "agents[]: each agent needs either noilc weights or "
                    "explicit Q and L");
            }
            spec.inertia_scale = a.value("inertia_scale", 1.0);
            cfg.agents.push_back(std::move(spec));
        }
    }

    if (j.contains("reference")) {
        const auto& ref = j.at("reference");
        const std::string source = ref.value("source", std::string("explicit"));
        if (source == "twipr-maneuver") {
            cfg.reference_source = ReferenceSource::TwiprManeuver;
        } else if (source == "explicit") {
            cfg.reference_source = ReferenceSource::Explicit;
            if (!ref.contains("values"))
                throw ConfigError("reference.values: required");
            cfg.reference = parse_vector(ref.at("values"), "reference.values");
        } else {
            throw ConfigError(
                "reference.source: expected explicit | twipr-maneuver");
        }
    }

    cfg.trials = j.value("trials", 30);
    if (cfg.trials < 1) throw ConfigError("trials: must be >= 1");
    cfg.seed = j.value("seed", static_cast<std::uint64_t>(1));
    cfg.hold_on_no_improvement = j.value("hold_on_no_improvement", false);
    cfg.distributed_election = j.value("distributed_election", false);
    if (j.contains("topology_file"))
        cfg.topology_file = j.at("topology_file").get<std::string>();
    if (cfg.distributed_election && !cfg.topology_file)
        throw ConfigError("topology_file: required with distributed_election");
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    return cfg;
}

Collective resolve_collective(const ScenarioConfig& cfg) {
    LiftedPlant plant;
    Vector reference;
    switch (cfg.plant_source) {
        case PlantSource::AppendixA:
            plant = appendix_a_plant();
            break;
        case PlantSource::Twipr: {
            const DiscreteClosedLoop loop =
                make_closed_loop(cfg.twipr.params, cfg.twipr.poles);
            plant = markov_lifted_plant(loop, cfg.horizon);
            break;
        }
        case PlantSource::Explicit:
            try {
                plant = make_lifted_plant(*cfg.P, *cfg.d);
            } catch (const Error& e) {
                throw ConfigError(std::string("plant: ") + e.what());
            }
            break;
    }

    if (cfg.reference_source == ReferenceSource::TwiprManeuver) {
        reference = reference_maneuver(static_cast<int>(plant.N),
                                       cfg.twipr.params.sample_period);
    } else if (cfg.reference) {
        reference = *cfg.reference;
    } else if (cfg.plant_source == PlantSource::AppendixA) {
        reference = Vector(2);
        reference << 1.0, 0.0; // the reference example's default target
    } else {
        throw ConfigError("reference: required for this plant");
    }
    if (reference.size() != plant.N)
        throw ConfigError("reference: length does not match the plant horizon");

    std::vector<AgentLaw> laws;
    if (cfg.agents.empty()) {
        if (cfg.plant_source != PlantSource::AppendixA)
            throw ConfigError("agents: required for this plant");
        laws = appendix_a_laws();
    } else {
        for (const auto& spec : cfg.agents) {
            if (spec.noilc) {
                laws.push_back(design_noilc(plant, *spec.noilc, spec.id));
            } else {
                laws.push_back(AgentLaw{spec.id, *spec.Q, *spec.L});
            }
        }
    }

    try {
        return make_collective(std::move(plant), std::move(laws),
                               std::move(reference));
    } catch (const Error& e) {
        throw ConfigError(std::string("agents: ") + e.what());
    }
}

} // namespace cilc
