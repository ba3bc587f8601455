#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mednlu/error.hpp"

namespace mednlu {

using ojson = nlohmann::ordered_json;

enum class TaskKind { NER, ETE, EAE, EAC, DC, RE, NLI, QA, STS, Summarization };

enum class OutputCategory {
    TokenClassification,
    SequenceClassification,
    SequenceRegression,
    Generation,
};

std::string_view task_name(TaskKind t);
TaskKind task_from_name(std::string_view name); // case-insensitive; throws SchemaMismatch
OutputCategory output_category(TaskKind t);
std::string_view category_name(OutputCategory c);
bool is_token_task(TaskKind t);
bool is_choice_task(TaskKind t); // selection from lettered options (classification or regression)

/// Option letters: A..Z, then AA, AB, ... for large raw label pools.
std::string letter_for_index(std::size_t i);
std::optional<std::size_t> index_for_letter(std::string_view letter);

/// Orders letters by the index they stand for: A..Z before AA..ZZ.
bool letter_less(std::string_view a, std::string_view b);

/// A labeled span. Offsets are in Unicode code points over the instance's
/// source_text and are optional: mentions recovered from model output may
/// carry text only. `occurrence` (1-based) disambiguates repeated surface
/// forms; it is annotation metadata and never affects alignment.
struct EntityMention {
    std::string text;
    std::string label;
    std::optional<std::int64_t> char_start;
    std::optional<std::int64_t> char_end;
    std::optional<std::int32_t> occurrence;

    bool operator==(const EntityMention&) const = default;
};

struct ChoiceOption {
    std::string letter;
    std::string description;
    std::variant<std::string, std::int64_t> canonical;

    bool operator==(const ChoiceOption&) const = default;
};

struct ChoiceSet {
    std::vector<ChoiceOption> options;
    bool multi_select = false;

    const ChoiceOption* find(std::string_view letter) const;
    bool operator==(const ChoiceSet&) const = default;
};

/// Task-dependent gold value:
///   token tasks -> mentions, choice classification -> letters (sorted, unique),
///   regression -> integer score, generation -> reference text.
using GoldValue = std::variant<std::vector<EntityMention>, std::vector<std::string>,
                               std::int64_t, std::string>;

struct NluInstance {
    std::string id;
    std::string dataset;
    TaskKind task = TaskKind::NER;
    std::string source_text;
    std::vector<std::string> context_before; // adjacent sentences, nearest last
    std::vector<std::string> context_after;  // adjacent sentences, nearest first
    std::vector<std::string> label_set;      // token tasks: full label inventory
    std::optional<ChoiceSet> choices;        // choice tasks
    GoldValue gold;
    std::optional<std::string> question;  // QA/DC: question text; EAC: attribute name
    std::optional<std::string> premise;   // NLI premise / STS sentence 1
    std::optional<std::string> hypothesis; // NLI hypothesis / STS sentence 2
    std::optional<EntityMention> trigger; // EAE/EAC event trigger
    std::optional<std::vector<EntityMention>> entity_pair; // RE: exactly two
    std::optional<std::string> template_override; // custom instruction; {text} etc. substituted
};

struct PromptPair {
    std::string instance_id;
    std::string input;
    std::string output;

    bool operator==(const PromptPair&) const = default;
};

/// One model answer after parsing; at most one payload field is set.
struct Prediction {
    std::string instance_id;
    std::optional<std::vector<EntityMention>> mentions;
    std::optional<std::vector<std::string>> letters;
    std::optional<std::int64_t> score;
    std::optional<std::string> text;
    std::optional<std::string> error; // set when the raw output was unusable
    std::string raw;
};

// --- validation ---------------------------------------------------------

/// Checks structural invariants. Hard violations throw NluError; soft issues
/// (empty gold sets, missing offsets on gold mentions) come back as warnings.
std::vector<std::string> validate(const NluInstance& inst);

// --- JSON (de)serialization ---------------------------------------------

ojson to_json(const NluInstance& inst);
NluInstance instance_from_json(const ojson& j);

ojson to_json(const PromptPair& p);
PromptPair prompt_pair_from_json(const ojson& j);

ojson to_json(const Prediction& p);
Prediction prediction_from_json(const ojson& j);

/// Line-oriented JSONL. Readers throw MalformedRecord with 1-based line
/// numbers; writers emit one compact object per line, byte-deterministic.
std::vector<NluInstance> read_instances(std::istream& in);
std::vector<PromptPair> read_prompt_pairs(std::istream& in);
std::vector<Prediction> read_predictions(std::istream& in);
void write_jsonl(std::ostream& out, const std::vector<NluInstance>& v);
void write_jsonl(std::ostream& out, const std::vector<PromptPair>& v);
void write_jsonl(std::ostream& out, const std::vector<Prediction>& v);

} // namespace mednlu
