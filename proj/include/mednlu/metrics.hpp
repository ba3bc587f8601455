#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mednlu/prompt.hpp"
#include "mednlu/types.hpp"

namespace mednlu {

struct PrfCounts {
    std::uint64_t tp = 0, fp = 0, fn = 0;

    double precision() const { return tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp); }
    double recall() const { return tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn); }
    double f1() const {
        double p = precision(), r = recall();
        return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    }
};

enum class MatchMode {
    Strict,  // same label and identical boundaries
    Relaxed, // same label and at least one overlapping code point
};

/// One-to-one greedy matching: predictions in the given order each claim the
/// first unmatched gold mention they match. Gold mentions must carry offsets
/// (MissingGoldOffsets otherwise); predictions without offsets never match.
PrfCounts entity_prf(const std::vector<EntityMention>& gold,
                     const std::vector<EntityMention>& pred, MatchMode mode);

/// Set PRF over (whitespace-token index, label) pairs; a token carries a
/// label when its span overlaps a mention of that label. Predictions without
/// offsets contribute their own word count as false positives.
PrfCounts token_prf(const std::vector<EntityMention>& gold,
                    const std::vector<EntityMention>& pred, const std::string& source_text);

/// Gold vs predicted answer for one choice instance, both as canonical label
/// values so letter permutations cannot skew scoring.
struct ChoiceOutcome {
    std::vector<std::string> gold;
    std::vector<std::string> pred;
};

/// Fraction of outcomes whose prediction equals gold as a set.
double accuracy(const std::vector<ChoiceOutcome>& outcomes);

/// Micro PRF over (instance, label) pairs across all outcomes.
PrfCounts classification_prf(const std::vector<ChoiceOutcome>& outcomes);

/// Sample Pearson correlation; two-pass in double precision. Throws
/// LengthMismatch, TooFewPoints (< 2) and ZeroVariance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct EvalReport {
    std::string dataset;
    TaskKind task = TaskKind::NER;
    std::string metric; // headline metric name
    double value = 0.0;
    std::uint64_t n_instances = 0;
    std::uint64_t n_unscoreable = 0;
    ojson extra; // secondary metric values
};

ojson to_json(const EvalReport& r);
EvalReport eval_report_from_json(const ojson& j);

/// Headline metric per task: entity F1 (strict) for extraction, micro F1 for
/// label classification, accuracy for NLI/QA, Pearson for similarity, exact
/// match for generation.
std::string_view headline_metric(TaskKind t);

/// Scores parsed predictions against gold, one report per (dataset, task),
/// sorted by dataset name. `opts` must be the options the prompts were
/// rendered with so option letters resolve to the right canonical values.
/// Predictions with errors (or missing entirely) count as unscoreable and
/// score as wrong; similarity pairs need two scoreable points or the value
/// falls back to 0 with a note in `extra`.
std::vector<EvalReport> score_predictions(const std::vector<NluInstance>& instances,
                                          const std::vector<Prediction>& predictions,
                                          const RenderOptions& opts);

/// Per-benchmark rollup: mean of member dataset headline values plus
/// per-task means. `groups` maps benchmark name -> dataset names. Throws
/// DuplicateDataset when one dataset name appears in two reports.
ojson aggregate_benchmark(const std::vector<EvalReport>& reports,
                          const std::map<std::string, std::vector<std::string>>& groups);

/// Fixed-width text table of reports (and a macro-average line per task).
std::string results_table(const std::vector<EvalReport>& reports);

} // namespace mednlu
