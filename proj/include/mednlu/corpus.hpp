#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mednlu/prompt.hpp"
#include "mednlu/types.hpp"

namespace mednlu {

enum class DatasetFormat { ConllBio, BratStandoff, JsonlNative };
enum class Domain { Biomedical, Clinical, General };

std::string_view format_name(DatasetFormat f);
DatasetFormat format_from_name(std::string_view s);
std::string_view domain_name(Domain d);
Domain domain_from_name(std::string_view s);

struct DatasetDescriptor {
    std::string name;
    TaskKind task = TaskKind::NER;
    Domain domain = Domain::Biomedical;
    DatasetFormat format = DatasetFormat::JsonlNative;
    std::string path;
    std::string split = "train";
    bool sentence_split = false; // document-level extraction -> sentence instances
    bool summarize_inputs = false; // long notes go through the summarizer hook first
    std::string summarize_type;    // e.g. "smoking status"
    std::optional<std::size_t> negative_count; // classification option reduction
    bool nlg_length_filter = false; // keep generation inputs under the word cap
    bool nlg_ratio_filter = false;  // keep summaries at most half the input length
};

/// Instances plus ingest bookkeeping for the build manifest.
struct IngestResult {
    std::vector<NluInstance> instances;
    std::uint64_t records_read = 0;
    std::vector<std::string> warnings;
};

IngestResult ingest_conll_bio(std::istream& in, const DatasetDescriptor& desc);
IngestResult ingest_brat_standoff(const std::string& doc_text, const std::string& ann_text,
                                  const std::string& doc_id, const DatasetDescriptor& desc);
IngestResult ingest_jsonl(std::istream& in, const DatasetDescriptor& desc);

/// Reads from desc.path: a file for ConllBio/JsonlNative; for BratStandoff a
/// .txt file (sibling .ann) or a directory of such pairs.
IngestResult ingest(const DatasetDescriptor& desc);

struct SentenceSpan {
    std::string text;
    std::size_t char_start = 0; // code points into the document
    std::size_t char_end = 0;

    bool operator==(const SentenceSpan&) const = default;
};

/// Rule-based splitter: a sentence ends at . ? or ! followed by whitespace
/// and an ASCII uppercase letter or digit; a period is suppressed after
/// common abbreviations and single-letter initials. Sentences exclude the
/// surrounding whitespace, so the document is exactly the sentences plus
/// whitespace gaps.
std::vector<SentenceSpan> split_sentences(const std::string& doc);

struct ContextWindow {
    std::vector<std::string> before;
    std::vector<std::string> after;
};

/// Up to k sentences on each side of `index`. Throws IndexOutOfRange.
ContextWindow context_window(const std::vector<std::string>& sentences, std::size_t index,
                             std::size_t k);

/// Generation-instance quality gate: input under `max_words` words (when
/// length_filter) and summary at most half the input word count (when
/// ratio_filter).
bool filter_summarization(const NluInstance& inst, bool length_filter, bool ratio_filter,
                          std::size_t max_words = 800);

struct SamplingPlan {
    std::uint64_t total = 50000;
    std::uint64_t seed = 0;
    std::vector<TaskKind> tasks; // quota order; remainder goes to the first tasks
};

struct SampleStats {
    std::map<std::string, std::uint64_t> quota;   // per task name
    std::map<std::string, std::uint64_t> emitted; // per task name
    std::vector<std::string> warnings;            // e.g. sampled with replacement
};

/// Draws total/k instances per task (plan order gets the remainder), each
/// task pooled across its datasets and sampled uniformly without
/// replacement with a per-task derived seed. A short pool is exhausted and
/// refilled with replacement, with a warning. The result is shuffled as a
/// whole. Throws EmptyTaskPool / InvalidArgument.
std::vector<NluInstance> sample_budget(const std::vector<NluInstance>& pool,
                                       const SamplingPlan& plan, SampleStats* stats = nullptr);

struct BuildHooks {
    /// note text + type label -> summary; required by summarize_inputs
    /// datasets (they fail into the manifest without it).
    std::function<std::string(const std::string&, const std::string&)> summarizer;
};

struct BuildResult {
    std::vector<PromptPair> pairs;
    ojson manifest; // per-dataset accounting; no wall-clock content
};

/// Ingest -> preprocess -> filter -> (optional) sample -> render. Dataset
/// failures are recorded in the manifest instead of aborting the build.
BuildResult build_corpus(const std::vector<DatasetDescriptor>& datasets,
                         const std::optional<SamplingPlan>& plan, const RenderOptions& render,
                         std::optional<Domain> domain_filter = std::nullopt,
                         const BuildHooks& hooks = {});

/// Plain-text plan file: global `key = value` lines (seed, total, tasks,
/// shuffle_choices, domain_filter) followed by [dataset] blocks. Throws
/// MalformedRecord with line numbers.
struct PlanConfig {
    std::optional<SamplingPlan> plan;
    RenderOptions render;
    std::optional<Domain> domain_filter;
    std::vector<DatasetDescriptor> datasets;
};

PlanConfig parse_plan_config(std::istream& in);

} // namespace mednlu
