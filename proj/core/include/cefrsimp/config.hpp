#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace cefrsimp {

enum class Mode { kBaseline, kMrsRule, kMrsJoint };

/// "baseline" | "mrs-rule" | "mrs-joint". Throws ConfigError otherwise.
Mode mode_from_string(std::string_view name);
std::string_view to_string(Mode mode) noexcept;

/// Where the HTTP-backed scorers live. Unused by the built-in backends.
struct EndpointConfig {
    std::array<std::string, 3> predictor_urls{};
    std::string embedder_url;
    std::string llm_base_url = "https://api.openai.com/v1";
    std::string llm_model = "gpt-4o-mini";
    std::string llm_api_key_env = "OPENAI_API_KEY";
    double http_timeout_s = 30.0;
    int http_max_inflight = 8;
    int llm_max_inflight = 4;
};

/// Hyperparameters of the multi-round engine. Defaults reproduce the
/// standard MRS-Rule / MRS-Joint settings.
struct PipelineConfig {
    double similarity_floor = 0.88;
    int max_steps = 8;
    int max_retries = 6;
    double floor_step = 0.03;
    int steps_step = 6;
    double w_hit = 10.0;
    double w_ref = 2.5;
    double w_orig = 0.5;
    double llm_timeout_s = 60.0;
    bool use_llm = true;
    double sim_floor_min = 0.72;
    Mode mode = Mode::kMrsRule;
    EndpointConfig endpoints;

    /// Throws ConfigError describing the first violated constraint.
    void validate() const;
};

/// Keys are the field names above; endpoint keys live at the top level too.
/// Unknown keys are rejected. Missing keys keep their defaults.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& cfg);

/// Reads a JSON object. An empty (or whitespace-only) file yields defaults.
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace cefrsimp
