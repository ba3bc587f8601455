#include "mednlu/client.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "mednlu/parse.hpp"
#include "mednlu/rng.hpp"
#include "mednlu/text.hpp"

namespace mednlu {

namespace {

struct ParsedEndpoint {
    std::string host_port; // scheme://host:port for httplib
    std::string prefix;    // path prefix, no trailing slash
};

ParsedEndpoint parse_endpoint(const std::string& endpoint) {
    if (endpoint.rfind("https://", 0) == 0) {
        fail(Errc::Transport, "https endpoints are not supported, use http");
    }
    if (endpoint.rfind("http://", 0) != 0) {
        fail(Errc::InvalidArgument, "endpoint must start with http://");
    }
    auto path_pos = endpoint.find('/', 7);
    ParsedEndpoint out;
    if (path_pos == std::string::npos) {
        out.host_port = endpoint;
    } else {
        out.host_port = endpoint.substr(0, path_pos);
        out.prefix = endpoint.substr(path_pos);
        while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
    }
    return out;
}

} // namespace

ChatResult chat_complete(const InferenceConfig& cfg, const std::string& prompt) {
    if (cfg.model.empty()) fail(Errc::InvalidArgument, "model name is empty");
    if (cfg.max_attempts < 1) fail(Errc::InvalidArgument, "max_attempts must be at least 1");

    std::string api_key;
    if (!cfg.api_key_env.empty()) {
        const char* v = std::getenv(cfg.api_key_env.c_str());
        if (!v || !*v) {
            fail(Errc::AuthRejected, "environment variable " + cfg.api_key_env + " is not set");
        }
        api_key = v;
    }

    ParsedEndpoint ep = parse_endpoint(cfg.endpoint);

    ojson body;
    body["model"] = cfg.model;
    ojson msgs = ojson::array();
    ojson msg;
    msg["role"] = "user";
    msg["content"] = prompt;
    msgs.push_back(std::move(msg));
    body["messages"] = std::move(msgs);
    body["temperature"] = cfg.temperature;
    body["max_tokens"] = cfg.max_tokens;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

    ChatResult result;
    std::string last_error;
    for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
        result.attempts = attempt;
        httplib::Client cli(ep.host_port);
        cli.set_connection_timeout(0, cfg.timeout_ms * 1000LL);
        cli.set_read_timeout(0, cfg.timeout_ms * 1000LL);
        cli.set_write_timeout(0, cfg.timeout_ms * 1000LL);

        auto resp = cli.Post(ep.prefix + "/v1/chat/completions", headers, payload,
                             "application/json");
        if (!resp) {
            last_error = "transport error: " + httplib::to_string(resp.error());
        } else {
            result.http_status = resp->status;
            if (resp->status == 401 || resp->status == 403) {
                fail(Errc::AuthRejected,
                     "endpoint rejected credentials with status " + std::to_string(resp->status));
            }
            if (resp->status >= 200 && resp->status < 300) {
                ojson doc;
                try {
                    doc = ojson::parse(resp->body);
                } catch (const std::exception& e) {
                    fail(Errc::ResponseMalformed, std::string("response is not JSON: ") + e.what());
                }
                if (!doc.contains("choices") || !doc["choices"].is_array() ||
                    doc["choices"].empty()) {
                    fail(Errc::ResponseMalformed, "response has no choices");
                }
                const auto& first = doc["choices"][0];
                if (!first.contains("message") || !first["message"].contains("content") ||
                    !first["message"]["content"].is_string()) {
                    fail(Errc::ResponseMalformed, "response choice has no message content");
                }
                result.text = first["message"]["content"].get<std::string>();
                return result;
            }
            if (resp->status >= 500) {
                last_error = "server returned status " + std::to_string(resp->status);
            } else {
                fail(Errc::Transport,
                     "endpoint returned status " + std::to_string(resp->status));
            }
        }
        if (attempt < cfg.max_attempts) {
            auto delay = std::chrono::milliseconds(
                static_cast<std::int64_t>(cfg.backoff_base_ms) << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
    }
    fail(Errc::Transport, "gave up after " + std::to_string(cfg.max_attempts) + " attempts (" +
                              last_error + ")");
}

std::vector<PromptPair> select_fewshot(const FewShotPolicy& policy, const std::string& query_id) {
    std::vector<const PromptPair*> candidates;
    for (const auto& p : policy.pool) {
        if (p.instance_id != query_id) candidates.push_back(&p);
    }
    if (candidates.size() < policy.k) {
        fail(Errc::CannotSatisfyDistinctness,
             "pool has " + std::to_string(candidates.size()) + " usable pairs, need " +
                 std::to_string(policy.k));
    }
    if (policy.k == 0) return {};

    const std::uint64_t base = rng::combine(policy.seed, rng::fnv1a64(query_id));
    for (int t = 0; t < policy.max_attempts; ++t) {
        rng::SplitMix g(rng::combine(base, static_cast<std::uint64_t>(t)));
        auto picks = rng::sample_without_replacement(candidates.size(), policy.k, g);
        std::vector<PromptPair> shots;
        shots.reserve(picks.size());
        for (std::size_t idx : picks) shots.push_back(*candidates[idx]);
        if (!policy.require_distinct_outputs) return shots;
        std::set<std::string> outputs;
        bool ok = true;
        for (const auto& s : shots) {
            if (!outputs.insert(s.output).second) {
                ok = false;
                break;
            }
        }
        if (ok) return shots;
    }
    fail(Errc::CannotSatisfyDistinctness,
         "could not draw " + std::to_string(policy.k) + " demonstrations with distinct outputs in " +
             std::to_string(policy.max_attempts) + " attempts");
}

std::string compose_fewshot_prompt(const std::string& preamble,
                                   const std::vector<PromptPair>& shots,
                                   const std::string& query_input) {
    std::vector<std::string> segments;
    if (!preamble.empty()) segments.push_back(preamble);
    for (const auto& s : shots) segments.push_back(s.input + "\n" + s.output);
    segments.push_back(query_input);
    return text::join(segments, "\n\n");
}

std::string summarize_document(const std::string& note, const std::string& type,
                               const InferenceConfig& cfg) {
    if (type.empty()) fail(Errc::InvalidArgument, "summary type is empty");
    std::string prompt =
        "Summarize the " + type + " from the following clinical note.\n\n" + note;
    return chat_complete(cfg, prompt).text;
}

ChoiceSet describe_qa_options(const std::string& question, const std::vector<std::string>& answers,
                              const PromptPair& one_shot, const InferenceConfig& cfg) {
    if (answers.empty()) fail(Errc::InvalidArgument, "no answers to describe");
    ChoiceSet set;
    for (std::size_t i = 0; i < answers.size(); ++i) {
        std::string prompt = "Combine the question and the answer into a single statement.\n\n" +
                             one_shot.input + "\n" + one_shot.output + "\n\n" +
                             "Question: " + question + "\nAnswer: " + answers[i];
        std::string completion{text::trim(chat_complete(cfg, prompt).text)};
        if (!completion.empty() && completion.back() == '.') completion.pop_back();
        ChoiceOption opt;
        opt.letter = letter_for_index(i);
        opt.description = completion + " (" + answers[i] + ").";
        opt.canonical = answers[i];
        set.options.push_back(std::move(opt));
    }
    return set;
}

BenchmarkRun run_benchmark(const std::vector<NluInstance>& instances, const RunConfig& cfg) {
    static const std::string kEmpty;
    const auto t0 = std::chrono::steady_clock::now();

    struct Slot {
        RenderedInstance rendered;
        std::string prompt;
        Prediction pred;
        bool transport_failed = false;
    };
    std::vector<Slot> slots(instances.size());

    for (std::size_t i = 0; i < instances.size(); ++i) {
        slots[i].rendered = render_instance_ex(instances[i], cfg.render);
        // The format preamble teaches the line grammar; only extraction
        // outputs need it.
        const bool token_task =
            output_category(instances[i].task) == OutputCategory::TokenClassification;
        const std::string& preamble = token_task ? cfg.fewshot_preamble : kEmpty;
        if (cfg.fewshot) {
            auto shots = select_fewshot(*cfg.fewshot, instances[i].id);
            slots[i].prompt =
                compose_fewshot_prompt(preamble, shots, slots[i].rendered.pair.input);
        } else if (!preamble.empty()) {
            slots[i].prompt = preamble + "\n\n" + slots[i].rendered.pair.input;
        } else {
            slots[i].prompt = slots[i].rendered.pair.input;
        }
    }

    const std::size_t n_threads = std::max<std::size_t>(
        1, std::min<std::size_t>(static_cast<std::size_t>(std::max(1, cfg.inference.max_concurrency)),
                                 instances.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= instances.size()) return;
            Slot& slot = slots[i];
            slot.pred.instance_id = instances[i].id;
            try {
                ChatResult r = chat_complete(cfg.inference, slot.prompt);
                slot.pred.raw = r.text;
                const ChoiceSet* effective = slot.rendered.effective_choices
                                                 ? &*slot.rendered.effective_choices
                                                 : nullptr;
                slot.pred = parse_prediction(r.text, instances[i], effective);
            } catch (const NluError& e) {
                if (e.code() == Errc::Transport || e.code() == Errc::AuthRejected ||
                    e.code() == Errc::ResponseMalformed) {
                    slot.transport_failed = true;
                }
                slot.pred.error = std::string(errc_name(e.code())) + ": " + e.message();
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    BenchmarkRun run;
    std::size_t n_transport = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        run.predictions.push_back(std::move(slots[i].pred));
        PromptPair pp;
        pp.instance_id = instances[i].id;
        pp.input = std::move(slots[i].prompt);
        run.prompts.push_back(std::move(pp));
        if (slots[i].transport_failed) ++n_transport;
    }

    run.reports = score_predictions(instances, run.predictions, cfg.render);

    std::size_t unscoreable = 0;
    for (const auto& r : run.reports) unscoreable += r.n_unscoreable;

    ojson m;
    m["model"] = cfg.inference.model;
    m["endpoint"] = cfg.inference.endpoint;
    m["temperature"] = cfg.inference.temperature;
    m["max_tokens"] = cfg.inference.max_tokens;
    m["seed"] = cfg.render.global_seed;
    m["shuffle_choices"] = cfg.render.shuffle_choices;
    if (cfg.render.negative_count) m["negative_count"] = *cfg.render.negative_count;
    if (cfg.fewshot) {
        m["fewshot_k"] = cfg.fewshot->k;
        m["fewshot_seed"] = cfg.fewshot->seed;
    }
    m["n_instances"] = instances.size();
    m["n_unscoreable"] = unscoreable;
    m["n_transport_failures"] = n_transport;
    m["config_hash"] = [&] {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(rng::fnv1a64(m.dump())));
        return std::string(buf);
    }();
    run.manifest = std::move(m);

    run.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return run;
}

} // namespace mednlu
