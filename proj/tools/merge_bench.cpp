#include <chrono>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mednlu/merge.hpp"
#include "mednlu/rng.hpp"

using namespace mednlu;

namespace {

ParameterMap random_map(std::size_t entries, std::size_t elements, std::uint64_t seed) {
    ParameterMap pm;
    rng::SplitMix g(seed);
    for (std::size_t e = 0; e < entries; ++e) {
        ParameterMap::Entry entry;
        entry.shape = {static_cast<std::int64_t>(elements)};
        entry.data.resize(elements);
        for (auto& v : entry.data) {
            v = static_cast<float>(g.next_unit() * 2.0 - 1.0);
        }
        pm.entries["layer." + std::to_string(e) + ".weight"] = std::move(entry);
    }
    return pm;
}

double run_timed(const ParameterMap& base, const ParameterMap& tuned, const MergeConfig& cfg,
                 bool serial, int repeat, ParameterMap& last) {
    double best_ms = 1e300;
    for (int r = 0; r < repeat; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        last = serial ? dare_merge_serial(base, tuned, cfg) : dare_merge(base, tuned, cfg);
        auto t1 = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        if (ms < best_ms) best_ms = ms;
    }
    return best_ms;
}

bool bitwise_equal(const ParameterMap& a, const ParameterMap& b) {
    if (a.entries.size() != b.entries.size()) return false;
    for (const auto& [name, ea] : a.entries) {
        auto it = b.entries.find(name);
        if (it == b.entries.end()) return false;
        const auto& eb = it->second;
        if (ea.shape != eb.shape || ea.data.size() != eb.data.size()) return false;
        if (!ea.data.empty() &&
            std::memcmp(ea.data.data(), eb.data.data(), ea.data.size() * sizeof(float)) != 0) {
            return false;
        }
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compare the parallel and serial merge kernels"};
    std::size_t entries = 8, elements = 1'000'000;
    double p = 0.5, lambda = 1.0;
    std::uint64_t seed = 0;
    int repeat = 3;
    app.add_option("--entries", entries, "parameter tensors");
    app.add_option("--elements", elements, "elements per tensor");
    app.add_option("--p", p, "drop probability");
    app.add_option("--lambda", lambda, "delta scale");
    app.add_option("--seed", seed, "mask seed");
    app.add_option("--repeat", repeat, "timed repetitions, best-of");
    CLI11_PARSE(app, argc, argv);

    ParameterMap base = random_map(entries, elements, seed ^ 0x1111);
    ParameterMap tuned = random_map(entries, elements, seed ^ 0x2222);
    MergeConfig cfg;
    cfg.drop_prob = p;
    cfg.lambda = lambda;
    cfg.seed = seed;

    ParameterMap out_par, out_ser;
    double ms_par = run_timed(base, tuned, cfg, false, repeat, out_par);
    double ms_ser = run_timed(base, tuned, cfg, true, repeat, out_ser);
    bool same = bitwise_equal(out_par, out_ser);

    std::printf("%zu tensors x %zu elements, p=%.2f lambda=%.2f\n", entries, elements, p, lambda);
    std::printf("%-10s %10.2f ms\n", "parallel", ms_par);
    std::printf("%-10s %10.2f ms\n", "serial", ms_ser);
    std::printf("%-10s %10.2fx\n", "speedup", ms_ser / ms_par);
    std::printf("bitwise identical: %s\n", same ? "yes" : "NO");
    return same ? 0 : 1;
}
