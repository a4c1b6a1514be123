#include "mscons/scenario_io.hpp"

#include <fstream>
#include <set>
#include <string>

#include "mscons/errors.hpp"

namespace mscons {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& ctx) {
    if (!j.is_object()) throw SchemaError("scenario: '" + ctx + "' must be an object");
}

void check_keys(const json& j, const std::string& ctx, const std::set<std::string>& required,
                const std::set<std::string>& optional) {
    require_object(j, ctx);
    for (const auto& [key, value] : j.items()) {
        if (!required.count(key) && !optional.count(key))
            throw SchemaError("scenario: unknown key '" + key + "' in '" + ctx + "'");
    }
    for (const auto& key : required)
        if (!j.contains(key))
            throw SchemaError("scenario: missing key '" + key + "' in '" + ctx + "'");
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw SchemaError("scenario: '" + ctx + "' must be a non-empty array of rows");
    const std::size_t cols = j[0].size();
    Eigen::MatrixXd m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw SchemaError("scenario: ragged rows in '" + ctx + "'");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number())
                throw SchemaError("scenario: non-numeric entry in '" + ctx + "'");
            m(r, c) = j[r][c].get<double>();
        }
    }
    return m;
}

Eigen::VectorXd parse_vector(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.empty())
        throw SchemaError("scenario: '" + ctx + "' must be a non-empty array");
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw SchemaError("scenario: non-numeric entry in '" + ctx + "'");
        v(i) = j[i].get<double>();
    }
    return v;
}

json dump_matrix(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

json dump_vector(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

GraphMode parse_mode(const std::string& s) {
    if (s == "undirected") return GraphMode::undirected;
    if (s == "leader-follower") return GraphMode::leader_follower;
    if (s == "input-channel") return GraphMode::input_channel;
    throw SchemaError("scenario: unknown topology mode '" + s + "'");
}

}  // namespace

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
    check_keys(j, "scenario", {"model", "topology", "noise", "simulation"}, {"protocol"});

    ScenarioSpec spec;

    const json& jm = j.at("model");
    check_keys(jm, "model", {"A", "B"}, {});
    spec.model.A = parse_matrix(jm.at("A"), "model.A");
    // B may be written flat or as an n x 1 column.
    if (jm.at("B").is_array() && !jm.at("B").empty() && jm.at("B")[0].is_array()) {
        const Eigen::MatrixXd b = parse_matrix(jm.at("B"), "model.B");
        if (b.cols() != 1) throw SchemaError("scenario: model.B must be a single column");
        spec.model.B = b.col(0);
    } else {
        spec.model.B = parse_vector(jm.at("B"), "model.B");
    }
    spec.model.validate();

    const json& jt = j.at("topology");
    check_keys(jt, "topology", {"n_nodes", "mode", "edges"}, {"input_variances"});
    if (!jt.at("n_nodes").is_number_integer())
        throw SchemaError("scenario: topology.n_nodes must be an integer");
    spec.topology.n_nodes = jt.at("n_nodes").get<int>();
    spec.topology.mode = parse_mode(jt.at("mode").get<std::string>());
    if (!jt.at("edges").is_array()) throw SchemaError("scenario: topology.edges must be an array");
    for (const auto& e : jt.at("edges")) {
        if (!e.is_array() || e.size() != 3)
            throw SchemaError("scenario: each edge must be a [from, to, variance] triple");
        if (!e[0].is_number_integer() || !e[1].is_number_integer() || !e[2].is_number())
            throw SchemaError("scenario: edge triple must be [int, int, number]");
        // file uses 1-based agent indices
        spec.topology.edges.push_back(
            {e[0].get<int>() - 1, e[1].get<int>() - 1, e[2].get<double>()});
    }
    if (jt.contains("input_variances")) {
        const Eigen::VectorXd v = parse_vector(jt.at("input_variances"), "topology.input_variances");
        spec.topology.input_variances.assign(v.data(), v.data() + v.size());
    }
    spec.topology.validate();

    if (j.contains("protocol")) {
        const json& jp = j.at("protocol");
        check_keys(jp, "protocol", {}, {"alpha", "delta_sq", "Q"});
        if (jp.contains("alpha")) spec.alpha = jp.at("alpha").get<double>();
        if (jp.contains("delta_sq")) spec.delta_sq = jp.at("delta_sq").get<double>();
        if (jp.contains("Q")) spec.Q = parse_matrix(jp.at("Q"), "protocol.Q");
    }

    const json& jn = j.at("noise");
    check_keys(jn, "noise", {"distribution", "seed"}, {});
    const std::string dist = jn.at("distribution").get<std::string>();
    if (dist == "gaussian") spec.noise.distribution = NoiseDistribution::gaussian;
    else if (dist == "uniform") spec.noise.distribution = NoiseDistribution::uniform;
    else throw SchemaError("scenario: unknown noise distribution '" + dist + "'");
    if (!jn.at("seed").is_number_unsigned())
        throw SchemaError("scenario: noise.seed must be a nonnegative integer");
    spec.noise.seed = jn.at("seed").get<std::uint64_t>();

    const json& js = j.at("simulation");
    check_keys(js, "simulation", {"horizon", "trials", "initial_states"}, {});
    spec.horizon = js.at("horizon").get<int>();
    spec.trials = js.at("trials").get<int>();
    if (!js.at("initial_states").is_array())
        throw SchemaError("scenario: simulation.initial_states must be an array");
    for (const auto& row : js.at("initial_states"))
        spec.initial_states.push_back(parse_vector(row, "simulation.initial_states"));
    if (static_cast<int>(spec.initial_states.size()) != spec.topology.n_nodes)
        throw SchemaError("scenario: need one initial state per agent");
    for (const auto& x : spec.initial_states)
        if (x.size() != spec.model.order())
            throw SchemaError("scenario: initial state dimension must match the model order");
    if (spec.horizon < 1 || spec.trials < 1)
        throw SchemaError("scenario: horizon and trials must be >= 1");

    return spec;
}

nlohmann::json scenario_to_json(const ScenarioSpec& spec) {
    json j;
    j["model"]["A"] = dump_matrix(spec.model.A);
    j["model"]["B"] = dump_vector(spec.model.B);

    j["topology"]["n_nodes"] = spec.topology.n_nodes;
    j["topology"]["mode"] = to_string(spec.topology.mode);
    json edges = json::array();
    for (const auto& e : spec.topology.edges)
        edges.push_back(json::array({e.from + 1, e.to + 1, e.variance}));
    j["topology"]["edges"] = edges;
    if (!spec.topology.input_variances.empty())
        j["topology"]["input_variances"] = spec.topology.input_variances;

    if (spec.alpha || spec.delta_sq || spec.Q) {
        json p = json::object();
        if (spec.alpha) p["alpha"] = *spec.alpha;
        if (spec.delta_sq) p["delta_sq"] = *spec.delta_sq;
        if (spec.Q) p["Q"] = dump_matrix(*spec.Q);
        j["protocol"] = p;
    }

    j["noise"]["distribution"] = to_string(spec.noise.distribution);
    j["noise"]["seed"] = spec.noise.seed;

    j["simulation"]["horizon"] = spec.horizon;
    j["simulation"]["trials"] = spec.trials;
    json states = json::array();
    for (const auto& x : spec.initial_states) states.push_back(dump_vector(x));
    j["simulation"]["initial_states"] = states;
    return j;
}

ScenarioSpec load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open scenario file: " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw SchemaError("scenario: JSON parse error in " + file.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw ValidationError("cannot write scenario file: " + file.string());
    out << scenario_to_json(spec).dump(2) << '\n';
}

Scenario build_scenario(const ScenarioSpec& spec) {
    const Eigen::MatrixXd q =
        spec.Q ? *spec.Q : Eigen::MatrixXd::Identity(spec.model.order(), spec.model.order());
    Scenario s;
    s.model = spec.model;
    s.topology = spec.topology;
    s.gain = synthesize(spec.model, spec.topology, q, spec.alpha, spec.delta_sq);
    s.noise = spec.noise;
    s.initial_states = spec.initial_states;
    s.horizon = spec.horizon;
    s.trials = spec.trials;
    s.validate();
    return s;
}

ScenarioSpec cycle6_benchmark_spec() {
    ScenarioSpec spec;
    spec.model.A = Eigen::MatrixXd{{1.0, 1.0}, {0.0, 1.0}};
    spec.model.B = Eigen::VectorXd{{0.0, 1.0}};
    spec.topology = NetworkTopology::cycle(6, 1.5);
    spec.alpha = cycle6_reference::alpha;
    spec.delta_sq = cycle6_reference::delta_sq;
    spec.Q = 3.0 * Eigen::MatrixXd::Identity(2, 2);
    spec.noise.distribution = NoiseDistribution::gaussian;
    spec.noise.seed = 1;
    spec.horizon = 60;
    spec.trials = 1000;
    spec.initial_states = {Eigen::VectorXd{{1.0, 0.0}},  Eigen::VectorXd{{2.0, -1.0}},
                           Eigen::VectorXd{{-1.0, 0.5}}, Eigen::VectorXd{{0.8, 2.0}},
                           Eigen::VectorXd{{2.0, 3.0}},  Eigen::VectorXd{{0.0, 1.0}}};
    return spec;
}

namespace cycle6_reference {
Eigen::MatrixXd P() {
    return Eigen::MatrixXd{{31.9, 152.1}, {152.1, 1464.3}};
}
Eigen::RowVectorXd K() {
    Eigen::RowVectorXd k(2);
    k << -0.1038, -1.1038;
    return k;
}
}  // namespace cycle6_reference

}  // namespace mscons
