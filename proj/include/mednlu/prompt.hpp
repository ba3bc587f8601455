#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mednlu/types.hpp"

namespace mednlu {

/// Knobs that change how an instance is rendered into an input/output pair.
/// Rendering is pure: the same instance and options always produce the same
/// bytes. Seeds are derived per instance from (dataset, id, global_seed).
struct RenderOptions {
    std::uint64_t global_seed = 0;
    /// Shuffle option order and re-letter (classification sets only; ordinal
    /// score scales keep their ascending order).
    bool shuffle_choices = false;
    /// When set, classification choice sets are cut down to the gold options
    /// plus this many sampled negative options before rendering.
    std::optional<std::size_t> negative_count;
};

/// A rendered pair plus the view of the instance the prompt actually used,
/// needed to interpret model output letters and to score against gold.
struct RenderedInstance {
    PromptPair pair;
    std::optional<ChoiceSet> effective_choices; // after reduction + shuffle
    std::vector<std::string> gold_letters;      // gold re-expressed in effective letters
};

PromptPair render_instance(const NluInstance& inst, const RenderOptions& opts = {});
RenderedInstance render_instance_ex(const NluInstance& inst, const RenderOptions& opts = {});

// Per-category entry points; each rejects instances of the wrong category.
PromptPair render_token_classification(const NluInstance& inst, const RenderOptions& opts = {});
PromptPair render_sequence_classification(const NluInstance& inst, const RenderOptions& opts = {});
PromptPair render_sts(const NluInstance& inst, const RenderOptions& opts = {});
PromptPair render_generation(const NluInstance& inst, const RenderOptions& opts = {});

/// Result of a seeded shuffle; source_index[i] is the position the i-th
/// option held in the original set (letters are reassigned A, B, ... in the
/// new order).
struct ShuffledChoices {
    ChoiceSet set;
    std::vector<std::size_t> source_index;
};

ShuffledChoices shuffle_choice_order(const ChoiceSet& cs, std::uint64_t seed);

/// Keeps every gold label and n distinct negatives sampled from pool \ gold;
/// returns the retained labels in pool order. Throws PoolTooSmall when fewer
/// than n negatives exist and InvalidArgument on duplicate pool entries or
/// gold labels missing from the pool.
std::vector<std::string> sample_negative_categories(const std::vector<std::string>& gold_labels,
                                                    const std::vector<std::string>& pool,
                                                    std::size_t n, std::uint64_t seed);

/// Raw dataset label names -> human-readable option text. Known cryptic
/// names are expanded; anything else passes through unchanged.
std::string expand_label_name(std::string_view raw);

/// Builds a lettered choice set from label names (descriptions expanded).
ChoiceSet make_choice_set(const std::vector<std::string>& labels, bool multi_select);

/// The 6-option ordinal similarity scale (scores 0..5) used for sentence
/// similarity instances.
ChoiceSet default_sts_choices();

/// Format paragraph prepended to zero-/few-shot extraction prompts so a
/// general-purpose model answers in the parseable line format.
std::string ner_fewshot_preamble();

/// " ... ", the separator between multiple spans on one output line.
inline constexpr std::string_view kSpanSeparator = " ... ";

} // namespace mednlu
