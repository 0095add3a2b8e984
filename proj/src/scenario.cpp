#include "histent/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace histent {

namespace {

using Json = nlohmann::ordered_json;

const Json& require(const Json& node, const char* key, const std::string& path) {
    if (!node.is_object()) {
        throw ScenarioError(path, "expected an object");
    }
    auto it = node.find(key);
    if (it == node.end()) {
        throw ScenarioError(path, std::string("missing field '") + key + "'");
    }
    return *it;
}

int require_int(const Json& node, const char* key, const std::string& path) {
    const Json& value = require(node, key, path);
    if (!value.is_number_integer()) {
        throw ScenarioError(path + "." + key, "expected an integer");
    }
    return value.get<int>();
}

double require_number(const Json& node, const char* key, const std::string& path) {
    const Json& value = require(node, key, path);
    if (!value.is_number()) {
        throw ScenarioError(path + "." + key, "expected a number");
    }
    return value.get<double>();
}

ModeMap parse_mode_map(const Json& node, const std::string& path) {
    if (!node.is_object()) {
        throw ScenarioError(path, "expected an object mapping source modes to rule lists");
    }
    ModeMap map;
    for (const auto& [key, targets] : node.items()) {
        int source = 0;
        try {
            std::size_t used = 0;
            source = std::stoi(key, &used);
            if (used != key.size()) {
                throw std::invalid_argument(key);
            }
        } catch (const std::exception&) {
            throw ScenarioError(path + "." + key, "source mode key is not an integer");
        }
        if (!targets.is_array() || targets.empty()) {
            throw ScenarioError(path + "." + key, "expected a nonempty rule array");
        }
        std::vector<std::pair<int, Complex>> rule;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const std::string at = path + "." + key + "[" + std::to_string(i) + "]";
            rule.emplace_back(require_int(targets[i], "to", at),
                              Complex{require_number(targets[i], "re", at),
                                      require_number(targets[i], "im", at)});
        }
        map.rules[source] = std::move(rule);
    }
    return map;
}

std::vector<int> parse_mode_list(const Json& node, const std::string& path) {
    if (!node.is_array() || node.empty()) {
        throw ScenarioError(path, "expected a nonempty array of mode indices");
    }
    std::vector<int> modes;
    for (std::size_t i = 0; i < node.size(); ++i) {
        if (!node[i].is_number_integer()) {
            throw ScenarioError(path + "[" + std::to_string(i) + "]", "expected an integer");
        }
        modes.push_back(node[i].get<int>());
    }
    return modes;
}

} // namespace

Circuit load_circuit(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw ScenarioError("", std::string("parse error: ") + err.what());
    }

    Circuit circuit(require_int(doc, "modeCountA", ""), require_int(doc, "modeCountB", ""));

    const Json& initial = require(doc, "initial", "");
    if (!initial.is_array() || initial.empty()) {
        throw ScenarioError("initial", "expected a nonempty array of amplitudes");
    }
    for (std::size_t i = 0; i < initial.size(); ++i) {
        const std::string at = "initial[" + std::to_string(i) + "]";
        int a = require_int(initial[i], "a", at);
        int b = require_int(initial[i], "b", at);
        Complex amp{require_number(initial[i], "re", at), require_number(initial[i], "im", at)};
        try {
            circuit.initial.add_amplitude(a, b, amp);
        } catch (const IndexError& err) {
            throw ScenarioError(at, err.what());
        }
    }

    const Json& steps = require(doc, "steps", "");
    if (!steps.is_array()) {
        throw ScenarioError("steps", "expected an array");
    }
    for (std::size_t s = 0; s < steps.size(); ++s) {
        const std::string at = "steps[" + std::to_string(s) + "]";
        TimeStep step;
        step.map_a = parse_mode_map(require(steps[s], "mapA", at), at + ".mapA");
        step.map_b = parse_mode_map(require(steps[s], "mapB", at), at + ".mapB");
        if (steps[s].contains("annihilate")) {
            const Json& ann = steps[s]["annihilate"];
            if (!ann.is_array()) {
                throw ScenarioError(at + ".annihilate", "expected an array of [a,b] pairs");
            }
            for (std::size_t i = 0; i < ann.size(); ++i) {
                if (!ann[i].is_array() || ann[i].size() != 2 || !ann[i][0].is_number_integer() ||
                    !ann[i][1].is_number_integer()) {
                    throw ScenarioError(at + ".annihilate[" + std::to_string(i) + "]",
                                        "expected an [a,b] integer pair");
                }
                step.annihilate.insert({ann[i][0].get<int>(), ann[i][1].get<int>()});
            }
        }
        circuit.steps.push_back(std::move(step));
    }

    const Json& bases = require(doc, "intermediateBases", "");
    if (!bases.is_array()) {
        throw ScenarioError("intermediateBases", "expected an array");
    }
    for (std::size_t l = 0; l < bases.size(); ++l) {
        const std::string at = "intermediateBases[" + std::to_string(l) + "]";
        BasisLayer layer;
        layer.modes_a = parse_mode_list(require(bases[l], "a", at), at + ".a");
        layer.modes_b = parse_mode_list(require(bases[l], "b", at), at + ".b");
        circuit.intermediate_bases.push_back(std::move(layer));
    }

    const Json& posts = require(doc, "postselections", "");
    if (!posts.is_array()) {
        throw ScenarioError("postselections", "expected an array");
    }
    for (std::size_t p = 0; p < posts.size(); ++p) {
        const std::string at = "postselections[" + std::to_string(p) + "]";
        const Json& name = require(posts[p], "name", at);
        if (!name.is_string()) {
            throw ScenarioError(at + ".name", "expected a string");
        }
        circuit.postselections.push_back(
            {name.get<std::string>(), require_int(posts[p], "a", at), require_int(posts[p], "b", at)});
    }

    circuit.validate();
    return circuit;
}

Circuit load_circuit_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError(path, "cannot open scenario file");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_circuit(buffer.str());
}

std::string save_circuit(const Circuit& circuit) {
    Json doc;
    doc["modeCountA"] = circuit.mode_count_a;
    doc["modeCountB"] = circuit.mode_count_b;

    doc["initial"] = Json::array();
    for (const auto& [pair, amp] : circuit.initial.amplitudes()) {
        doc["initial"].push_back(
            {{"a", pair.first}, {"b", pair.second}, {"re", amp.real()}, {"im", amp.imag()}});
    }

    auto mode_map_json = [](const ModeMap& map) {
        Json node = Json::object();
        for (const auto& [src, targets] : map.rules) {
            Json rule = Json::array();
            for (const auto& [to, coef] : targets) {
                rule.push_back({{"to", to}, {"re", coef.real()}, {"im", coef.imag()}});
            }
            node[std::to_string(src)] = std::move(rule);
        }
        return node;
    };

    doc["steps"] = Json::array();
    for (const auto& step : circuit.steps) {
        Json node;
        node["mapA"] = mode_map_json(step.map_a);
        node["mapB"] = mode_map_json(step.map_b);
        Json ann = Json::array();
        for (const auto& [a, b] : step.annihilate) {
            ann.push_back({a, b});
        }
        node["annihilate"] = std::move(ann);
        doc["steps"].push_back(std::move(node));
    }

    doc["intermediateBases"] = Json::array();
    for (const auto& layer : circuit.intermediate_bases) {
        doc["intermediateBases"].push_back({{"a", layer.modes_a}, {"b", layer.modes_b}});
    }

    doc["postselections"] = Json::array();
    for (const auto& post : circuit.postselections) {
        doc["postselections"].push_back({{"name", post.name}, {"a", post.a}, {"b", post.b}});
    }

    return doc.dump(2) + "\n";
}

} // namespace histent
