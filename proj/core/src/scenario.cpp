#include "xlayer/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace xlayer {

using nlohmann::json;

std::string to_string(ReceiverKind kind) {
    return kind == ReceiverKind::matched ? "matched" : "lmmse";
}

ReceiverKind receiver_from_string(const std::string& text) {
    if (text == "matched") return ReceiverKind::matched;
    if (text == "lmmse") return ReceiverKind::lmmse;
    throw ConfigError("receiver", "expected 'matched' or 'lmmse', got '" + text + "'");
}

std::string to_string(InitialPowerMode mode) {
    return mode == InitialPowerMode::equal ? "equal" : "random";
}

void Scenario::validate() const {
    auto require = [](bool ok, const char* key, const char* what) {
        if (!ok) throw ConfigError(key, what);
    };
    require(n_nodes >= 2, "n_nodes", "must be at least 2");
    require(area_side > 0.0, "area_side", "must be positive");
    require(spreading_gain >= 1, "spreading_gain", "must be at least 1");
    require(target_sir > 0.0, "target_sir", "must be positive");
    require(noise_power > 0.0, "noise_power", "must be positive");
    require(path_loss_exp > 0.0, "path_loss_exp", "must be positive");
    require(initial_power > 0.0, "initial_power", "must be positive");
    require(random_power_spread >= 1.0, "random_power_spread", "must be >= 1");
    require(packet_bits >= 1, "packet_bits", "must be at least 1");
    require(chip_bandwidth > 0.0, "chip_bandwidth", "must be positive");
    require(power_cap > 0.0, "power_cap", "must be positive");
    require(pc_tol > 0.0 && pc_tol < 1.0, "pc_tol", "must be in (0, 1)");
    require(pc_max_iter >= 1, "pc_max_iter", "must be at least 1");
    require(improvement_tol >= 0.0, "improvement_tol", "must be non-negative");
    require(phase_cap >= 1, "phase_cap", "must be at least 1");
}

namespace {

template <typename T>
T read_field(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(key, std::string("bad value: ") + e.what());
    }
}

std::size_t read_count(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(key, "expected a non-negative integer");
    return v.get<std::size_t>();
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("<file>", "top level must be an object");

    Scenario s;
    for (const auto& [key, value] : j.items()) {
        const char* k = key.c_str();
        if (key == "n_nodes") s.n_nodes = read_count(j, k);
        else if (key == "area_side") s.area_side = read_field<double>(j, k);
        else if (key == "spreading_gain") s.spreading_gain = read_count(j, k);
        else if (key == "target_sir") s.target_sir = read_field<double>(j, k);
        else if (key == "noise_power") s.noise_power = read_field<double>(j, k);
        else if (key == "path_loss_exp") s.path_loss_exp = read_field<double>(j, k);
        else if (key == "receiver") s.receiver = receiver_from_string(read_field<std::string>(j, k));
        else if (key == "initial_power_mode") {
            const auto mode = read_field<std::string>(j, k);
            if (mode == "equal") s.initial_power_mode = InitialPowerMode::equal;
            else if (mode == "random") s.initial_power_mode = InitialPowerMode::random;
            else throw ConfigError(key, "expected 'equal' or 'random', got '" + mode + "'");
        }
        else if (key == "initial_power") s.initial_power = read_field<double>(j, k);
        else if (key == "random_power_spread") s.random_power_spread = read_field<double>(j, k);
        else if (key == "packet_bits") s.packet_bits = read_count(j, k);
        else if (key == "chip_bandwidth") s.chip_bandwidth = read_field<double>(j, k);
        else if (key == "power_cap") s.power_cap = read_field<double>(j, k);
        else if (key == "pc_tol") s.pc_tol = read_field<double>(j, k);
        else if (key == "pc_max_iter") s.pc_max_iter = read_count(j, k);
        else if (key == "improvement_tol") s.improvement_tol = read_field<double>(j, k);
        else if (key == "phase_cap") s.phase_cap = read_count(j, k);
        else if (key == "master_seed") {
            if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0))
                throw ConfigError(key, "expected an unsigned integer");
            s.master_seed = value.get<std::uint64_t>();
        }
        else throw ConfigError(key, "unknown scenario key");
        (void)value;
    }
    s.validate();
    return s;
}

std::string scenario_to_json(const Scenario& s) {
    json j = json::object();
    j["n_nodes"] = s.n_nodes;
    j["area_side"] = s.area_side;
    j["spreading_gain"] = s.spreading_gain;
    j["target_sir"] = s.target_sir;
    j["noise_power"] = s.noise_power;
    j["path_loss_exp"] = s.path_loss_exp;
    j["receiver"] = to_string(s.receiver);
    j["initial_power_mode"] = to_string(s.initial_power_mode);
    j["initial_power"] = s.initial_power;
    j["random_power_spread"] = s.random_power_spread;
    j["packet_bits"] = s.packet_bits;
    j["chip_bandwidth"] = s.chip_bandwidth;
    j["power_cap"] = s.power_cap;
    j["pc_tol"] = s.pc_tol;
    j["pc_max_iter"] = s.pc_max_iter;
    j["improvement_tol"] = s.improvement_tol;
    j["phase_cap"] = s.phase_cap;
    j["master_seed"] = s.master_seed;
    return j.dump(2);
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

}  // namespace xlayer
