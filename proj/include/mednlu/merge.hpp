#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mednlu/error.hpp"

namespace mednlu {

/// Named f32 tensors, ordered by name.
struct ParameterMap {
    struct Entry {
        std::vector<std::int64_t> shape;
        std::vector<float> data;
    };
    std::map<std::string, Entry> entries;

    std::size_t total_elements() const;
};

/// Drop-and-rescale delta merge: delta = tuned - base is dropped element-wise
/// with probability `drop_prob`; survivors are scaled by 1/(1-drop_prob) and
/// added back as base + lambda * delta. Expectation over seeds equals
/// base + lambda * delta.
struct MergeConfig {
    double drop_prob = 0.5;
    double lambda = 1.0;
    std::uint64_t seed = 0;
};

/// Parallel kernel (OpenMP when available). Per-element randomness is
/// counter-based and derived from (seed, entry name, element index), so the
/// result is identical for any thread count and matches the serial
/// reference bitwise. Arithmetic is carried in double and stored as f32;
/// when the effective scale lambda/(1-p) is exactly 1 a kept element is the
/// tuned value bit-for-bit. Throws NameSetMismatch / ShapeMismatch /
/// InvalidArgument (drop_prob outside [0,1]).
ParameterMap dare_merge(const ParameterMap& base, const ParameterMap& tuned,
                        const MergeConfig& cfg);

/// Straightforward single-threaded reference; kept for testing the kernel.
ParameterMap dare_merge_serial(const ParameterMap& base, const ParameterMap& tuned,
                               const MergeConfig& cfg);

/// Container format: magic "MRGPARM1", little-endian u64 header length, a
/// JSON header describing the entries plus an FNV-1a checksum of the
/// payload, then the f32 payload little-endian in name order.
void save_parameter_map(std::ostream& out, const ParameterMap& pm);
ParameterMap load_parameter_map(std::istream& in);

} // namespace mednlu
