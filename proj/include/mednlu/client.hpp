#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mednlu/metrics.hpp"
#include "mednlu/prompt.hpp"
#include "mednlu/types.hpp"

namespace mednlu {

// Talks to an OpenAI-compatible chat completion endpoint.
struct InferenceConfig {
    std::string endpoint;        // http://host:port or http://host:port/prefix
    std::string model;
    double temperature = 0.0;
    int max_tokens = 512;
    int timeout_ms = 30000;
    int max_attempts = 3;
    int backoff_base_ms = 250;
    int max_concurrency = 4;
    std::string api_key_env;     // name of env var holding the bearer token, optional
};

struct ChatResult {
    std::string text;
    int attempts = 0;
    int http_status = 0;
};

ChatResult chat_complete(const InferenceConfig& cfg, const std::string& prompt);

// Few-shot demonstration selection from a pool of prompt pairs.
struct FewShotPolicy {
    std::vector<PromptPair> pool;
    std::size_t k = 2;
    std::uint64_t seed = 0;
    bool require_distinct_outputs = true;
    int max_attempts = 64;
};

std::vector<PromptPair> select_fewshot(const FewShotPolicy& policy, const std::string& query_id);

std::string compose_fewshot_prompt(const std::string& preamble,
                                   const std::vector<PromptPair>& shots,
                                   const std::string& query_input);

// Preprocessing helpers backed by the same endpoint.
std::string summarize_document(const std::string& note, const std::string& type,
                               const InferenceConfig& cfg);

ChoiceSet describe_qa_options(const std::string& question, const std::vector<std::string>& answers,
                              const PromptPair& one_shot, const InferenceConfig& cfg);

// End-to-end benchmark run: render, query, parse, score.
struct RunConfig {
    InferenceConfig inference;
    RenderOptions render;
    std::optional<FewShotPolicy> fewshot;
    std::string fewshot_preamble;
};

struct BenchmarkRun {
    std::vector<Prediction> predictions;   // same order as the input instances
    std::vector<PromptPair> prompts;       // prompt sent per instance, output left empty
    std::vector<EvalReport> reports;
    ojson manifest;
    std::int64_t elapsed_ms = 0;
};

BenchmarkRun run_benchmark(const std::vector<NluInstance>& instances, const RunConfig& cfg);

} // namespace mednlu
