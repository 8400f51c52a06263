#include "cefrsimp/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "cefrsimp/errors.hpp"

namespace cefrsimp {

using nlohmann::json;

Mode mode_from_string(std::string_view name) {
    if (name == "baseline") return Mode::kBaseline;
    if (name == "mrs-rule") return Mode::kMrsRule;
    if (name == "mrs-joint") return Mode::kMrsJoint;
    throw ConfigError("unknown mode '" + std::string(name) +
                      "' (expected baseline, mrs-rule or mrs-joint)");
}

std::string_view to_string(Mode mode) noexcept {
    switch (mode) {
        case Mode::kBaseline: return "baseline";
        case Mode::kMrsRule: return "mrs-rule";
        case Mode::kMrsJoint: return "mrs-joint";
    }
    return "mrs-rule";
}

void PipelineConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("invalid config: " + msg); };
    const auto finite = [](double v) { return std::isfinite(v); };

    if (!finite(similarity_floor) || !finite(sim_floor_min) || !finite(floor_step)) {
        fail("similarity values must be finite");
    }
    if (!(sim_floor_min > 0.0)) fail("sim_floor_min must be > 0");
    if (sim_floor_min > similarity_floor) fail("sim_floor_min must be <= similarity_floor");
    if (similarity_floor > 1.0) fail("similarity_floor must be <= 1");
    if (floor_step < 0.0) fail("floor_step must be >= 0");
    if (max_retries < 1) fail("max_retries must be >= 1");
    if (max_steps < 1) fail("max_steps must be >= 1");
    if (steps_step < 0) fail("steps_step must be >= 0");
    for (double w : {w_hit, w_ref, w_orig}) {
        if (!finite(w) || w < 0.0) fail("weights must be finite and >= 0");
    }
    if (!finite(llm_timeout_s) || llm_timeout_s <= 0.0) fail("llm_timeout_s must be > 0");
    if (endpoints.http_timeout_s <= 0.0) fail("http_timeout_s must be > 0");
    if (endpoints.http_max_inflight < 1 || endpoints.llm_max_inflight < 1) {
        fail("in-flight caps must be >= 1");
    }
}

namespace {

template <typename T>
void read_key(const json& j, const char* key, T& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

}  // namespace

PipelineConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    static const char* const kKnown[] = {
        "similarity_floor", "max_steps",      "max_retries",     "floor_step",
        "steps_step",       "w_hit",          "w_ref",           "w_orig",
        "llm_timeout_s",    "use_llm",        "sim_floor_min",   "mode",
        "predictor_urls",   "embedder_url",   "llm_base_url",    "llm_model",
        "llm_api_key_env",  "http_timeout_s", "http_max_inflight", "llm_max_inflight"};
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* k : kKnown) known = known || key == k;
        if (!known) throw ConfigError("unknown config key '" + key + "'");
    }

    PipelineConfig cfg;
    read_key(j, "similarity_floor", cfg.similarity_floor);
    read_key(j, "max_steps", cfg.max_steps);
    read_key(j, "max_retries", cfg.max_retries);
    read_key(j, "floor_step", cfg.floor_step);
    read_key(j, "steps_step", cfg.steps_step);
    read_key(j, "w_hit", cfg.w_hit);
    read_key(j, "w_ref", cfg.w_ref);
    read_key(j, "w_orig", cfg.w_orig);
    read_key(j, "llm_timeout_s", cfg.llm_timeout_s);
    read_key(j, "use_llm", cfg.use_llm);
    read_key(j, "sim_floor_min", cfg.sim_floor_min);
    std::string mode(to_string(cfg.mode));
    read_key(j, "mode", mode);
    cfg.mode = mode_from_string(mode);

    auto& ep = cfg.endpoints;
    if (auto it = j.find("predictor_urls"); it != j.end()) {
        if (!it->is_array() || it->size() != 3) {
            throw ConfigError("predictor_urls must be an array of three URLs");
        }
        for (std::size_t i = 0; i < 3; ++i) ep.predictor_urls[i] = (*it)[i].get<std::string>();
    }
    read_key(j, "embedder_url", ep.embedder_url);
    read_key(j, "llm_base_url", ep.llm_base_url);
    read_key(j, "llm_model", ep.llm_model);
    read_key(j, "llm_api_key_env", ep.llm_api_key_env);
    read_key(j, "http_timeout_s", ep.http_timeout_s);
    read_key(j, "http_max_inflight", ep.http_max_inflight);
    read_key(j, "llm_max_inflight", ep.llm_max_inflight);

    cfg.validate();
    return cfg;
}

json config_to_json(const PipelineConfig& cfg) {
    const auto& ep = cfg.endpoints;
    return json{
        {"similarity_floor", cfg.similarity_floor},
        {"max_steps", cfg.max_steps},
        {"max_retries", cfg.max_retries},
        {"floor_step", cfg.floor_step},
        {"steps_step", cfg.steps_step},
        {"w_hit", cfg.w_hit},
        {"w_ref", cfg.w_ref},
        {"w_orig", cfg.w_orig},
        {"llm_timeout_s", cfg.llm_timeout_s},
        {"use_llm", cfg.use_llm},
        {"sim_floor_min", cfg.sim_floor_min},
        {"mode", std::string(to_string(cfg.mode))},
        {"predictor_urls", ep.predictor_urls},
        {"embedder_url", ep.embedder_url},
        {"llm_base_url", ep.llm_base_url},
        {"llm_model", ep.llm_model},
        {"llm_api_key_env", ep.llm_api_key_env},
        {"http_timeout_s", ep.http_timeout_s},
        {"http_max_inflight", ep.http_max_inflight},
        {"llm_max_inflight", ep.llm_max_inflight},
    };
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();
    if (content.find_first_not_of(" \t\r\n") == std::string::npos) return PipelineConfig{};
    json j;
    try {
        j = json::parse(content);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

}  // namespace cefrsimp
