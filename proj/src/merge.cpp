#include "mednlu/merge.hpp"

#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "mednlu/rng.hpp"

namespace mednlu {

std::size_t ParameterMap::total_elements() const {
    std::size_t n = 0;
    for (const auto& [name, e] : entries) n += e.data.size();
    return n;
}

namespace {

void check_compatible(const ParameterMap& base, const ParameterMap& tuned) {
    if (base.entries.size() != tuned.entries.size()) {
        fail(Errc::NameSetMismatch, "base has " + std::to_string(base.entries.size()) +
                                        " entries, tuned has " +
                                        std::to_string(tuned.entries.size()));
    }
    for (const auto& [name, be] : base.entries) {
        auto it = tuned.entries.find(name);
        if (it == tuned.entries.end()) {
            fail(Errc::NameSetMismatch, "entry '" + name + "' missing from tuned map");
        }
        if (it->second.shape != be.shape || it->second.data.size() != be.data.size()) {
            fail(Errc::ShapeMismatch, "entry '" + name + "' has different shapes");
        }
    }
}

inline float merge_element(float b, float t, std::uint64_t entry_seed, std::uint64_t i, double p,
                           double scale, bool scale_is_one) {
    const double u = rng::unit_from_bits(rng::stream_at(entry_seed, i));
    if (u < p) return b;
    if (scale_is_one) return t;
    const double delta = static_cast<double>(t) - static_cast<double>(b);
    return static_cast<float>(static_cast<double>(b) + scale * delta);
}

template <bool kParallel>
ParameterMap merge_impl(const ParameterMap& base, const ParameterMap& tuned,
                        const MergeConfig& cfg) {
    if (!(cfg.drop_prob >= 0.0 && cfg.drop_prob <= 1.0)) {
        fail(Errc::InvalidArgument, "drop_prob must be in [0, 1]");
    }
    check_compatible(base, tuned);

    const double p = cfg.drop_prob;
    const bool drop_all = p == 1.0;
    const double scale = drop_all ? 0.0 : cfg.lambda / (1.0 - p);
    const bool scale_is_one = !drop_all && scale == 1.0;

    ParameterMap out;
    for (const auto& [name, be] : base.entries) {
        const auto& te = tuned.entries.at(name);
        ParameterMap::Entry oe;
        oe.shape = be.shape;
        oe.data.resize(be.data.size());
        if (drop_all) {
            oe.data = be.data;
            out.entries.emplace(name, std::move(oe));
            continue;
        }
        const std::uint64_t entry_seed = rng::combine(cfg.seed, rng::fnv1a64(name));
        const std::int64_t n = static_cast<std::int64_t>(be.data.size());
        const float* bp = be.data.data();
        const float* tp = te.data.data();
        float* op = oe.data.data();
        if constexpr (kParallel) {
#pragma omp parallel for schedule(static)
            for (std::int64_t i = 0; i < n; ++i) {
                op[i] = merge_element(bp[i], tp[i], entry_seed, static_cast<std::uint64_t>(i), p,
                                      scale, scale_is_one);
            }
        } else {
            for (std::int64_t i = 0; i < n; ++i) {
                op[i] = merge_element(bp[i], tp[i], entry_seed, static_cast<std::uint64_t>(i), p,
                                      scale, scale_is_one);
            }
        }
        out.entries.emplace(name, std::move(oe));
    }
    return out;
}

} // namespace

ParameterMap dare_merge(const ParameterMap& base, const ParameterMap& tuned,
                        const MergeConfig& cfg) {
    return merge_impl<true>(base, tuned, cfg);
}

ParameterMap dare_merge_serial(const ParameterMap& base, const ParameterMap& tuned,
                               const MergeConfig& cfg) {
    return merge_impl<false>(base, tuned, cfg);
}

// --- container io ----------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'M', 'R', 'G', 'P', 'A', 'R', 'M', '1'};

void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

std::string encode_payload(const ParameterMap& pm) {
    std::string payload;
    payload.reserve(pm.total_elements() * 4);
    for (const auto& [name, e] : pm.entries) {
        for (float f : e.data) {
            std::uint32_t bits;
            std::memcpy(&bits, &f, 4);
            for (int i = 0; i < 4; ++i) {
                payload.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
            }
        }
    }
    return payload;
}

} // namespace

void save_parameter_map(std::ostream& out, const ParameterMap& pm) {
    std::string payload = encode_payload(pm);

    nlohmann::ordered_json header;
    header["entries"] = nlohmann::ordered_json::array();
    std::uint64_t offset = 0;
    for (const auto& [name, e] : pm.entries) {
        nlohmann::ordered_json je;
        je["name"] = name;
        je["shape"] = e.shape;
        je["offset"] = offset;
        je["count"] = e.data.size();
        header["entries"].push_back(std::move(je));
        offset += e.data.size();
    }
    header["total_floats"] = offset;
    char csum[17];
    std::snprintf(csum, sizeof(csum), "%016llx",
                  static_cast<unsigned long long>(rng::fnv1a64(payload)));
    header["payload_checksum"] = csum;

    std::string header_bytes = header.dump();
    std::string head;
    head.append(kMagic, 8);
    put_u64_le(head, header_bytes.size());
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    out.write(header_bytes.data(), static_cast<std::streamsize>(header_bytes.size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    out.flush();
}

ParameterMap load_parameter_map(std::istream& in) {
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
        fail(Errc::CorruptHeader, "bad magic");
    }
    unsigned char lenbuf[8];
    if (!in.read(reinterpret_cast<char*>(lenbuf), 8)) fail(Errc::CorruptHeader, "missing header length");
    std::uint64_t header_len = get_u64_le(lenbuf);
    if (header_len == 0 || header_len > (1ULL << 30)) {
        fail(Errc::CorruptHeader, "implausible header length " + std::to_string(header_len));
    }
    std::string header_bytes(header_len, '\0');
    if (!in.read(header_bytes.data(), static_cast<std::streamsize>(header_len))) {
        fail(Errc::CorruptHeader, "truncated header");
    }
    nlohmann::ordered_json header;
    try {
        header = nlohmann::ordered_json::parse(header_bytes);
    } catch (const std::exception& e) {
        fail(Errc::CorruptHeader, std::string("header is not valid JSON: ") + e.what());
    }
    if (!header.contains("entries") || !header["entries"].is_array() ||
        !header.contains("total_floats") || !header.contains("payload_checksum")) {
        fail(Errc::CorruptHeader, "header missing required fields");
    }
    std::uint64_t total = header["total_floats"].get<std::uint64_t>();
    if (total > (1ULL << 32)) fail(Errc::CorruptHeader, "implausible payload size");
    std::string payload(total * 4, '\0');
    if (!in.read(payload.data(), static_cast<std::streamsize>(payload.size()))) {
        fail(Errc::TruncatedPayload, "payload shorter than header declares");
    }
    char csum[17];
    std::snprintf(csum, sizeof(csum), "%016llx",
                  static_cast<unsigned long long>(rng::fnv1a64(payload)));
    if (header["payload_checksum"].get<std::string>() != csum) {
        fail(Errc::ChecksumMismatch, "payload checksum does not match header");
    }

    ParameterMap pm;
    std::uint64_t expect_offset = 0;
    for (const auto& je : header["entries"]) {
        if (!je.contains("name") || !je.contains("shape") || !je.contains("offset") ||
            !je.contains("count")) {
            fail(Errc::CorruptHeader, "entry missing required fields");
        }
        std::string name = je["name"].get<std::string>();
        std::uint64_t offset = je["offset"].get<std::uint64_t>();
        std::uint64_t count = je["count"].get<std::uint64_t>();
        if (offset != expect_offset) fail(Errc::CorruptHeader, "non-contiguous entry offsets");
        expect_offset += count;
        ParameterMap::Entry e;
        std::uint64_t shape_prod = 1;
        for (const auto& d : je["shape"]) {
            std::int64_t dim = d.get<std::int64_t>();
            if (dim <= 0) fail(Errc::CorruptHeader, "non-positive dimension in '" + name + "'");
            e.shape.push_back(dim);
            shape_prod *= static_cast<std::uint64_t>(dim);
        }
        if (shape_prod != count) {
            fail(Errc::CorruptHeader, "shape/count mismatch in '" + name + "'");
        }
        e.data.resize(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            const auto* p = reinterpret_cast<const unsigned char*>(payload.data() + (offset + i) * 4);
            std::uint32_t bits = 0;
            for (int k = 0; k < 4; ++k) bits |= static_cast<std::uint32_t>(p[k]) << (8 * k);
            std::memcpy(&e.data[i], &bits, 4);
        }
        if (!pm.entries.emplace(std::move(name), std::move(e)).second) {
            fail(Errc::CorruptHeader, "duplicate entry name");
        }
    }
    if (expect_offset != total) fail(Errc::CorruptHeader, "entries do not cover the payload");
    return pm;
}

} // namespace mednlu
