#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mednlu/client.hpp"
#include "mednlu/corpus.hpp"
#include "mednlu/merge.hpp"
#include "mednlu/metrics.hpp"
#include "mednlu/parse.hpp"
#include "mednlu/prompt.hpp"
#include "mednlu/types.hpp"

namespace fs = std::filesystem;

namespace mednlu {

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(Errc::EmptyInput, "cannot open '" + path + "'");
    return f;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream f(path);
    if (!f) fail(Errc::InvalidArgument, "cannot write '" + path.string() + "'");
    return f;
}

void write_json_file(const fs::path& path, const ojson& j) {
    auto f = open_output(path);
    f << j.dump(2) << '\n';
}

int cmd_build_corpus(const std::string& plan_path, const std::string& out_dir,
                     std::optional<std::uint64_t> seed_override,
                     const std::string& domain_override, std::ostream& out) {
    auto plan_file = open_input(plan_path);
    PlanConfig cfg = parse_plan_config(plan_file);
    if (seed_override) {
        cfg.render.global_seed = *seed_override;
        if (cfg.plan) cfg.plan->seed = *seed_override;
    }
    if (!domain_override.empty()) cfg.domain_filter = domain_from_name(domain_override);

    BuildResult result = build_corpus(cfg.datasets, cfg.plan, cfg.render, cfg.domain_filter);

    fs::create_directories(out_dir);
    {
        auto f = open_output(fs::path(out_dir) / "corpus.jsonl");
        write_jsonl(f, result.pairs);
    }
    write_json_file(fs::path(out_dir) / "manifest.json", result.manifest);

    out << "wrote " << result.pairs.size() << " pairs to " << out_dir << "\n";
    return result.pairs.empty() ? 1 : 0;
}

int cmd_run_eval(const std::string& instances_path, const RunConfig& run_cfg,
                 const std::string& groups_path, const std::string& out_dir, std::ostream& out) {
    auto in_file = open_input(instances_path);
    std::vector<NluInstance> instances = read_instances(in_file);
    if (instances.empty()) fail(Errc::EmptyInput, "no instances in '" + instances_path + "'");
    for (const auto& inst : instances) validate(inst);

    BenchmarkRun run = run_benchmark(instances, run_cfg);

    fs::create_directories(out_dir);
    {
        auto f = open_output(fs::path(out_dir) / "predictions.jsonl");
        write_jsonl(f, run.predictions);
    }
    {
        auto f = open_output(fs::path(out_dir) / "prompts.jsonl");
        write_jsonl(f, run.prompts);
    }
    {
        auto f = open_output(fs::path(out_dir) / "reports.jsonl");
        for (const auto& r : run.reports) f << to_json(r).dump() << '\n';
    }
    {
        auto f = open_output(fs::path(out_dir) / "results.txt");
        f << results_table(run.reports);
    }
    write_json_file(fs::path(out_dir) / "manifest.json", run.manifest);
    {
        ojson t;
        t["elapsed_ms"] = run.elapsed_ms;
        write_json_file(fs::path(out_dir) / "timings.json", t);
    }
    if (!groups_path.empty()) {
        auto gf = open_input(groups_path);
        ojson gj;
        try {
            gj = ojson::parse(gf);
        } catch (const std::exception& e) {
            fail(Errc::MalformedRecord, std::string("groups file: ") + e.what());
        }
        std::map<std::string, std::vector<std::string>> groups;
        for (const auto& [name, members] : gj.items()) {
            if (!members.is_array()) fail(Errc::SchemaMismatch, "group '" + name + "' must be an array");
            for (const auto& m : members) groups[name].push_back(m.get<std::string>());
        }
        write_json_file(fs::path(out_dir) / "aggregate.json", aggregate_benchmark(run.reports, groups));
    }

    out << results_table(run.reports);
    out << "wrote run artifacts to " << out_dir << "\n";
    return 0;
}

int cmd_merge(const std::string& base_path, const std::string& tuned_path,
              const std::string& out_path, double p, double lambda, std::uint64_t seed,
              bool serial, std::ostream& out) {
    ParameterMap base, tuned;
    {
        std::ifstream f(base_path, std::ios::binary);
        if (!f) fail(Errc::EmptyInput, "cannot open '" + base_path + "'");
        base = load_parameter_map(f);
    }
    {
        std::ifstream f(tuned_path, std::ios::binary);
        if (!f) fail(Errc::EmptyInput, "cannot open '" + tuned_path + "'");
        tuned = load_parameter_map(f);
    }
    MergeConfig cfg;
    cfg.drop_prob = p;
    cfg.lambda = lambda;
    cfg.seed = seed;
    ParameterMap merged = serial ? dare_merge_serial(base, tuned, cfg) : dare_merge(base, tuned, cfg);
    {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) fail(Errc::InvalidArgument, "cannot write '" + out_path + "'");
        save_parameter_map(f, merged);
    }
    out << "merged " << merged.total_elements() << " parameters into " << out_path << "\n";
    return 0;
}

int cmd_format(std::istream& stdin_stream, const std::string& in_path, const std::string& field,
               const RenderOptions& opts, std::ostream& out) {
    std::vector<NluInstance> instances;
    if (in_path.empty()) {
        instances = read_instances(stdin_stream);
    } else {
        auto f = open_input(in_path);
        instances = read_instances(f);
    }
    for (const auto& inst : instances) {
        validate(inst);
        PromptPair pair = render_instance(inst, opts);
        if (field == "json") {
            out << to_json(pair).dump() << '\n';
        } else if (field == "input") {
            out << pair.input << '\n';
        } else if (field == "output") {
            out << pair.output << '\n';
        } else {
            fail(Errc::InvalidArgument, "unknown field '" + field + "'");
        }
    }
    return 0;
}

int cmd_parse(std::istream& stdin_stream, const std::string& instance_path, std::ostream& out,
              std::ostream& err) {
    auto f = open_input(instance_path);
    ojson j;
    try {
        j = ojson::parse(f);
    } catch (const std::exception& e) {
        fail(Errc::MalformedRecord, std::string("instance file: ") + e.what());
    }
    NluInstance inst = instance_from_json(j);
    validate(inst);

    std::stringstream raw;
    raw << stdin_stream.rdbuf();

    Prediction pred = parse_prediction(raw.str(), inst);
    if (pred.error) {
        err << "error: " << *pred.error << "\n";
        return 1;
    }
    out << to_json(pred).dump() << '\n';
    return 0;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
                std::ostream& err) {
    CLI::App app{"medical NLU corpus, prompt and evaluation toolkit"};
    app.require_subcommand(1);

    // build-corpus
    std::string bc_plan, bc_out = "corpus_out", bc_domain;
    std::optional<std::uint64_t> bc_seed;
    auto* bc = app.add_subcommand("build-corpus", "render a training corpus from a plan file");
    bc->add_option("--plan", bc_plan, "plan config file")->required();
    bc->add_option("--out", bc_out, "output directory");
    bc->add_option("--seed", bc_seed, "override the plan seed");
    bc->add_option("--domain", bc_domain, "only keep datasets from this domain");

    // run-eval
    std::string re_instances, re_groups, re_out = "eval_out", re_fewshot_pool;
    RunConfig rc;
    std::size_t re_fewshot_k = 2;
    std::optional<std::size_t> re_negatives;
    auto* re = app.add_subcommand("run-eval", "query an endpoint over instances and score it");
    re->add_option("--instances", re_instances, "instances JSONL file")->required();
    re->add_option("--endpoint", rc.inference.endpoint, "http endpoint")->required();
    re->add_option("--model", rc.inference.model, "model name")->required();
    re->add_option("--api-key-env", rc.inference.api_key_env,
                   "env var holding the bearer token");
    re->add_option("--temperature", rc.inference.temperature, "sampling temperature");
    re->add_option("--max-tokens", rc.inference.max_tokens, "completion token cap");
    re->add_option("--concurrency", rc.inference.max_concurrency, "parallel requests");
    re->add_option("--retries", rc.inference.max_attempts, "attempts per request");
    re->add_option("--timeout-ms", rc.inference.timeout_ms, "per-request timeout");
    re->add_option("--seed", rc.render.global_seed, "render seed");
    re->add_flag("--shuffle", rc.render.shuffle_choices, "shuffle option order");
    re->add_option("--negatives", re_negatives, "sampled negative options per instance");
    re->add_option("--fewshot-pool", re_fewshot_pool, "prompt pair JSONL for demonstrations");
    re->add_option("--fewshot-k", re_fewshot_k, "demonstrations per query");
    re->add_option("--groups", re_groups, "benchmark groups JSON");
    re->add_option("--out", re_out, "output directory");

    // merge
    std::string mg_base, mg_tuned, mg_out;
    double mg_p = 0.5, mg_lambda = 1.0;
    std::uint64_t mg_seed = 0;
    bool mg_serial = false;
    auto* mg = app.add_subcommand("merge", "drop-and-rescale merge of two parameter maps");
    mg->add_option("--base", mg_base, "base parameter file")->required();
    mg->add_option("--tuned", mg_tuned, "fine-tuned parameter file")->required();
    mg->add_option("--out", mg_out, "merged output file")->required();
    mg->add_option("--p", mg_p, "drop probability");
    mg->add_option("--lambda", mg_lambda, "delta scale");
    mg->add_option("--seed", mg_seed, "drop mask seed");
    mg->add_flag("--serial", mg_serial, "use the serial reference kernel");

    // format
    std::string fm_in, fm_field = "json";
    RenderOptions fm_opts;
    std::optional<std::size_t> fm_negatives;
    auto* fm = app.add_subcommand("format", "render instances to prompt pairs");
    fm->add_option("--in", fm_in, "instances JSONL (default: stdin)");
    fm->add_option("--field", fm_field, "json | input | output");
    fm->add_option("--seed", fm_opts.global_seed, "render seed");
    fm->add_flag("--shuffle", fm_opts.shuffle_choices, "shuffle option order");
    fm->add_option("--negatives", fm_negatives, "sampled negative options per instance");

    // parse
    std::string pr_instance;
    auto* pr = app.add_subcommand("parse", "parse raw model output for one instance");
    pr->add_option("--instance", pr_instance, "instance JSON file")->required();

    std::vector<const char*> argv;
    argv.push_back("mednlu");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (bc->parsed()) return cmd_build_corpus(bc_plan, bc_out, bc_seed, bc_domain, out);
        if (re->parsed()) {
            rc.render.negative_count = re_negatives;
            if (!re_fewshot_pool.empty()) {
                auto pf = open_input(re_fewshot_pool);
                FewShotPolicy policy;
                policy.pool = read_prompt_pairs(pf);
                policy.k = re_fewshot_k;
                policy.seed = rc.render.global_seed;
                rc.fewshot = std::move(policy);
                rc.fewshot_preamble = ner_fewshot_preamble();
            }
            return cmd_run_eval(re_instances, rc, re_groups, re_out, out);
        }
        if (mg->parsed()) {
            return cmd_merge(mg_base, mg_tuned, mg_out, mg_p, mg_lambda, mg_seed, mg_serial, out);
        }
        if (fm->parsed()) {
            fm_opts.negative_count = fm_negatives;
            return cmd_format(in, fm_in, fm_field, fm_opts, out);
        }
        if (pr->parsed()) return cmd_parse(in, pr_instance, out, err);
    } catch (const NluError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "usage error: no subcommand\n";
    return 2;
}

} // namespace mednlu
