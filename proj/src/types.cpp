#include "mednlu/types.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

#include "mednlu/prompt.hpp"
#include "mednlu/text.hpp"

namespace mednlu {

namespace {

constexpr std::array<std::string_view, 10> kTaskNames = {
    "ner", "ete", "eae", "eac", "dc", "re", "nli", "qa", "sts", "summarization"};

constexpr std::array<std::string_view, 27> kErrcNames = {
    "InvalidArgument", "EmptyInput", "UnknownLabel", "UnknownGoldLabel", "GoldNotInChoices",
    "ScoreOutOfScale", "PoolTooSmall", "SeparatorCollision", "NoChoiceFound",
    "MissingGoldOffsets", "LengthMismatch", "ZeroVariance", "TooFewPoints", "DuplicateDataset",
    "MalformedRecord", "SchemaMismatch", "IndexOutOfRange", "EmptyTaskPool",
    "CannotSatisfyDistinctness", "Transport", "AuthRejected", "ResponseMalformed",
    "ShapeMismatch", "NameSetMismatch", "CorruptHeader", "TruncatedPayload", "ChecksumMismatch"};

} // namespace

std::string_view errc_name(Errc c) { return kErrcNames[static_cast<std::size_t>(c)]; }

std::string_view task_name(TaskKind t) { return kTaskNames[static_cast<std::size_t>(t)]; }

TaskKind task_from_name(std::string_view name) {
    std::string low = text::lower(name);
    for (std::size_t i = 0; i < kTaskNames.size(); ++i) {
        if (low == kTaskNames[i]) return static_cast<TaskKind>(i);
    }
    fail(Errc::SchemaMismatch, "unknown task '" + std::string(name) + "'");
}

OutputCategory output_category(TaskKind t) {
    switch (t) {
        case TaskKind::NER:
        case TaskKind::ETE:
        case TaskKind::EAE:
            return OutputCategory::TokenClassification;
        case TaskKind::EAC:
        case TaskKind::DC:
        case TaskKind::RE:
        case TaskKind::NLI:
        case TaskKind::QA:
            return OutputCategory::SequenceClassification;
        case TaskKind::STS:
            return OutputCategory::SequenceRegression;
        case TaskKind::Summarization:
            return OutputCategory::Generation;
    }
    fail(Errc::InvalidArgument, "bad TaskKind");
}

std::string_view category_name(OutputCategory c) {
    switch (c) {
        case OutputCategory::TokenClassification: return "token_classification";
        case OutputCategory::SequenceClassification: return "sequence_classification";
        case OutputCategory::SequenceRegression: return "sequence_regression";
        case OutputCategory::Generation: return "generation";
    }
    fail(Errc::InvalidArgument, "bad OutputCategory");
}

bool is_token_task(TaskKind t) {
    return output_category(t) == OutputCategory::TokenClassification;
}

bool is_choice_task(TaskKind t) {
    OutputCategory c = output_category(t);
    return c == OutputCategory::SequenceClassification || c == OutputCategory::SequenceRegression;
}

std::string letter_for_index(std::size_t i) {
    if (i < 26) return std::string(1, static_cast<char>('A' + i));
    if (i < 26 + 26 * 26) {
        std::size_t r = i - 26;
        std::string s;
        s += static_cast<char>('A' + r / 26);
        s += static_cast<char>('A' + r % 26);
        return s;
    }
    fail(Errc::IndexOutOfRange, "option index " + std::to_string(i) + " too large for letters");
}

std::optional<std::size_t> index_for_letter(std::string_view letter) {
    auto val = [](char c) -> int { return (c >= 'A' && c <= 'Z') ? c - 'A' : -1; };
    if (letter.size() == 1) {
        int v = val(letter[0]);
        if (v < 0) return std::nullopt;
        return static_cast<std::size_t>(v);
    }
    if (letter.size() == 2) {
        int a = val(letter[0]), b = val(letter[1]);
        if (a < 0 || b < 0) return std::nullopt;
        return 26 + static_cast<std::size_t>(a) * 26 + static_cast<std::size_t>(b);
    }
    return std::nullopt;
}

bool letter_less(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

const ChoiceOption* ChoiceSet::find(std::string_view letter) const {
    for (const auto& o : options) {
        if (o.letter == letter) return &o;
    }
    return nullptr;
}

// --- validation ---------------------------------------------------------

namespace {

void check_mention(const EntityMention& m, const std::string& source_text, const char* role,
                   std::vector<std::string>* warnings) {
    if (m.text.empty()) fail(Errc::MalformedRecord, std::string(role) + " with empty text");
    if (m.char_start.has_value() != m.char_end.has_value()) {
        fail(Errc::MalformedRecord, std::string(role) + " '" + m.text + "' has only one offset");
    }
    if (m.char_start) {
        if (*m.char_start < 0 || *m.char_start >= *m.char_end) {
            fail(Errc::MalformedRecord,
                 std::string(role) + " '" + m.text + "' has invalid offset range");
        }
        auto len = static_cast<std::int64_t>(text::cp_length(source_text));
        if (*m.char_end > len) {
            fail(Errc::MalformedRecord, std::string(role) + " '" + m.text + "' ends past text");
        }
        std::string slice = text::cp_slice(source_text, static_cast<std::size_t>(*m.char_start),
                                           static_cast<std::size_t>(*m.char_end));
        if (slice != m.text) {
            fail(Errc::MalformedRecord, std::string(role) + " text '" + m.text +
                                            "' does not match source slice '" + slice + "'");
        }
    } else if (warnings) {
        warnings->push_back(std::string(role) + " '" + m.text + "' has no offsets");
    }
    if (m.occurrence && *m.occurrence < 1) {
        fail(Errc::MalformedRecord, std::string(role) + " occurrence must be >= 1");
    }
}

void check_choice_set(const ChoiceSet& cs, OutputCategory cat) {
    if (cs.options.size() < 2) fail(Errc::EmptyInput, "choice set needs at least 2 options");
    std::set<std::string> letters;
    for (const auto& o : cs.options) {
        if (o.letter.empty()) fail(Errc::MalformedRecord, "option with empty letter");
        if (!index_for_letter(o.letter)) {
            fail(Errc::MalformedRecord, "option letter '" + o.letter + "' is not A-Z/AA-ZZ");
        }
        if (!letters.insert(o.letter).second) {
            fail(Errc::MalformedRecord, "duplicate option letter '" + o.letter + "'");
        }
        if (text::trim(o.description).empty()) {
            fail(Errc::MalformedRecord, "option " + o.letter + " has empty description");
        }
    }
    if (cat == OutputCategory::SequenceRegression) {
        if (cs.multi_select) fail(Errc::SchemaMismatch, "regression choice set cannot be multi-select");
        std::set<std::int64_t> scores;
        for (const auto& o : cs.options) {
            const auto* v = std::get_if<std::int64_t>(&o.canonical);
            if (!v) fail(Errc::SchemaMismatch, "regression option " + o.letter + " lacks integer score");
            if (!scores.insert(*v).second) {
                fail(Errc::SchemaMismatch, "duplicate canonical score on option " + o.letter);
            }
        }
        if (*scores.rbegin() - *scores.begin() + 1 != static_cast<std::int64_t>(scores.size())) {
            fail(Errc::SchemaMismatch, "canonical scores are not a contiguous range");
        }
    }
}

} // namespace

std::vector<std::string> validate(const NluInstance& inst) {
    std::vector<std::string> warnings;
    if (inst.id.empty()) fail(Errc::SchemaMismatch, "missing id");
    if (inst.dataset.empty()) fail(Errc::SchemaMismatch, "missing dataset");
    const OutputCategory cat = output_category(inst.task);

    switch (inst.task) {
        case TaskKind::NLI:
        case TaskKind::STS:
            if (!inst.premise || text::trim(*inst.premise).empty() || !inst.hypothesis ||
                text::trim(*inst.hypothesis).empty()) {
                fail(Errc::SchemaMismatch,
                     std::string(task_name(inst.task)) + " needs premise and hypothesis");
            }
            break;
        case TaskKind::QA:
            if (!inst.question || text::trim(*inst.question).empty()) {
                fail(Errc::SchemaMismatch, "qa needs a question");
            }
            if (text::trim(inst.source_text).empty()) fail(Errc::EmptyInput, "qa needs source_text");
            break;
        case TaskKind::DC:
            if (!inst.question || text::trim(*inst.question).empty()) {
                fail(Errc::SchemaMismatch, "dc needs a question");
            }
            if (text::trim(inst.source_text).empty()) fail(Errc::EmptyInput, "dc needs source_text");
            break;
        case TaskKind::EAC:
            if (!inst.question || text::trim(*inst.question).empty()) {
                fail(Errc::SchemaMismatch, "eac needs an attribute name in 'question'");
            }
            [[fallthrough]];
        case TaskKind::EAE:
            if (!inst.trigger) {
                fail(Errc::SchemaMismatch,
                     std::string(task_name(inst.task)) + " needs an event trigger");
            }
            if (text::trim(inst.source_text).empty()) {
                fail(Errc::EmptyInput, std::string(task_name(inst.task)) + " needs source_text");
            }
            check_mention(*inst.trigger, inst.source_text, "trigger", nullptr);
            break;
        case TaskKind::RE:
            if (!inst.entity_pair || inst.entity_pair->size() != 2) {
                fail(Errc::SchemaMismatch, "re needs an entity_pair of exactly two mentions");
            }
            if (text::trim(inst.source_text).empty()) fail(Errc::EmptyInput, "re needs source_text");
            for (const auto& m : *inst.entity_pair) {
                check_mention(m, inst.source_text, "entity_pair member", nullptr);
            }
            break;
        default:
            if (text::trim(inst.source_text).empty()) {
                fail(Errc::EmptyInput, std::string(task_name(inst.task)) + " needs source_text");
            }
            break;
    }

    switch (cat) {
        case OutputCategory::TokenClassification: {
            if (inst.label_set.empty()) fail(Errc::EmptyInput, "token task with empty label_set");
            std::set<std::string> labels(inst.label_set.begin(), inst.label_set.end());
            if (labels.size() != inst.label_set.size()) {
                fail(Errc::SchemaMismatch, "duplicate labels in label_set");
            }
            const auto* mentions = std::get_if<std::vector<EntityMention>>(&inst.gold);
            if (!mentions) fail(Errc::SchemaMismatch, "token task gold must be a mention list");
            for (const auto& m : *mentions) {
                if (!labels.count(m.label)) {
                    fail(Errc::UnknownGoldLabel, "gold label '" + m.label + "' not in label_set");
                }
                check_mention(m, inst.source_text, "gold mention", &warnings);
            }
            break;
        }
        case OutputCategory::SequenceClassification: {
            if (!inst.choices) fail(Errc::SchemaMismatch, "choice task without choice set");
            check_choice_set(*inst.choices, cat);
            const auto* letters = std::get_if<std::vector<std::string>>(&inst.gold);
            if (!letters) fail(Errc::SchemaMismatch, "classification gold must be a letter list");
            std::set<std::string> seen;
            for (const auto& l : *letters) {
                if (!inst.choices->find(l)) {
                    fail(Errc::GoldNotInChoices, "gold letter '" + l + "' not in choice set");
                }
                if (!seen.insert(l).second) fail(Errc::SchemaMismatch, "duplicate gold letter '" + l + "'");
            }
            if (letters->empty()) warnings.push_back("empty gold letter set");
            if (!inst.choices->multi_select && letters->size() > 1) {
                fail(Errc::SchemaMismatch, "multiple gold letters on a single-select task");
            }
            break;
        }
        case OutputCategory::SequenceRegression: {
            const ChoiceSet scale = inst.choices ? *inst.choices : default_sts_choices();
            check_choice_set(scale, cat);
            const auto* score = std::get_if<std::int64_t>(&inst.gold);
            if (!score) fail(Errc::SchemaMismatch, "regression gold must be an integer score");
            std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
            for (const auto& o : scale.options) {
                std::int64_t v = std::get<std::int64_t>(o.canonical);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (*score < lo || *score > hi) {
                fail(Errc::ScoreOutOfScale, "gold score " + std::to_string(*score) + " outside [" +
                                                std::to_string(lo) + "," + std::to_string(hi) + "]");
            }
            break;
        }
        case OutputCategory::Generation: {
            const auto* txt = std::get_if<std::string>(&inst.gold);
            if (!txt) fail(Errc::SchemaMismatch, "generation gold must be a string");
            if (text::trim(*txt).empty()) warnings.push_back("empty gold text");
            break;
        }
    }
    return warnings;
}

// --- JSON ----------------------------------------------------------------

namespace {

ojson mention_to_json(const EntityMention& m) {
    ojson j;
    j["text"] = m.text;
    j["label"] = m.label;
    if (m.char_start) j["char_start"] = *m.char_start;
    if (m.char_end) j["char_end"] = *m.char_end;
    if (m.occurrence) j["occurrence"] = *m.occurrence;
    return j;
}

EntityMention mention_from_json(const ojson& j) {
    if (!j.is_object()) fail(Errc::SchemaMismatch, "mention must be an object");
    EntityMention m;
    if (!j.contains("text") || !j["text"].is_string()) {
        fail(Errc::SchemaMismatch, "mention needs string 'text'");
    }
    m.text = j["text"].get<std::string>();
    if (!j.contains("label") || !j["label"].is_string()) {
        fail(Errc::SchemaMismatch, "mention needs string 'label'");
    }
    m.label = j["label"].get<std::string>();
    if (j.contains("char_start")) {
        if (!j["char_start"].is_number_integer()) fail(Errc::SchemaMismatch, "char_start must be integer");
        m.char_start = j["char_start"].get<std::int64_t>();
    }
    if (j.contains("char_end")) {
        if (!j["char_end"].is_number_integer()) fail(Errc::SchemaMismatch, "char_end must be integer");
        m.char_end = j["char_end"].get<std::int64_t>();
    }
    if (j.contains("occurrence")) {
        if (!j["occurrence"].is_number_integer()) fail(Errc::SchemaMismatch, "occurrence must be integer");
        m.occurrence = j["occurrence"].get<std::int32_t>();
    }
    return m;
}

ojson choice_set_to_json(const ChoiceSet& cs) {
    ojson arr = ojson::array();
    for (const auto& o : cs.options) {
        ojson jo;
        jo["letter"] = o.letter;
        jo["description"] = o.description;
        if (const auto* s = std::get_if<std::string>(&o.canonical)) {
            jo["canonical"] = *s;
        } else {
            jo["canonical"] = std::get<std::int64_t>(o.canonical);
        }
        arr.push_back(std::move(jo));
    }
    return arr;
}

ChoiceSet choice_set_from_json(const ojson& arr, bool multi_select) {
    ChoiceSet cs;
    cs.multi_select = multi_select;
    for (const auto& jo : arr) {
        if (!jo.is_object()) fail(Errc::SchemaMismatch, "label_set mixes strings and objects");
        ChoiceOption o;
        if (!jo.contains("letter") || !jo["letter"].is_string()) {
            fail(Errc::SchemaMismatch, "option needs string 'letter'");
        }
        o.letter = jo["letter"].get<std::string>();
        if (!jo.contains("description") || !jo["description"].is_string()) {
            fail(Errc::SchemaMismatch, "option needs string 'description'");
        }
        o.description = jo["description"].get<std::string>();
        if (!jo.contains("canonical")) {
            o.canonical = o.description; // default: the description is its own canonical form
        } else if (jo["canonical"].is_string()) {
            o.canonical = jo["canonical"].get<std::string>();
        } else if (jo["canonical"].is_number_integer()) {
            o.canonical = jo["canonical"].get<std::int64_t>();
        } else {
            fail(Errc::SchemaMismatch, "canonical must be string or integer");
        }
        cs.options.push_back(std::move(o));
    }
    return cs;
}

std::optional<std::string> opt_string(const ojson& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string()) fail(Errc::SchemaMismatch, std::string(key) + " must be a string");
    return j[key].get<std::string>();
}

} // namespace

ojson to_json(const NluInstance& inst) {
    ojson j;
    j["id"] = inst.id;
    j["dataset"] = inst.dataset;
    j["task"] = std::string(task_name(inst.task));
    j["source_text"] = inst.source_text;
    if (!inst.context_before.empty()) j["context_before"] = inst.context_before;
    if (!inst.context_after.empty()) j["context_after"] = inst.context_after;
    if (inst.choices) {
        j["label_set"] = choice_set_to_json(*inst.choices);
        if (inst.choices->multi_select) j["multi_select"] = true;
    } else if (!inst.label_set.empty()) {
        j["label_set"] = inst.label_set;
    }
    std::visit(
        [&j](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, std::vector<EntityMention>>) {
                ojson arr = ojson::array();
                for (const auto& m : g) arr.push_back(mention_to_json(m));
                j["gold"] = std::move(arr);
            } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
                j["gold"] = g;
            } else {
                j["gold"] = g;
            }
        },
        inst.gold);
    if (inst.question) j["question"] = *inst.question;
    if (inst.premise) j["premise"] = *inst.premise;
    if (inst.hypothesis) j["hypothesis"] = *inst.hypothesis;
    if (inst.trigger) j["trigger"] = mention_to_json(*inst.trigger);
    if (inst.entity_pair) {
        ojson arr = ojson::array();
        for (const auto& m : *inst.entity_pair) arr.push_back(mention_to_json(m));
        j["entity_pair"] = std::move(arr);
    }
    if (inst.template_override) j["template"] = *inst.template_override;
    return j;
}

NluInstance instance_from_json(const ojson& j) {
    if (!j.is_object()) fail(Errc::SchemaMismatch, "instance must be a JSON object");
    NluInstance inst;
    auto req_string = [&j](const char* key) -> std::string {
        if (!j.contains(key) || !j[key].is_string()) {
            fail(Errc::SchemaMismatch, std::string("missing string field '") + key + "'");
        }
        return j[key].get<std::string>();
    };
    inst.id = req_string("id");
    inst.dataset = req_string("dataset");
    inst.task = task_from_name(req_string("task"));
    if (j.contains("source_text")) {
        if (!j["source_text"].is_string()) fail(Errc::SchemaMismatch, "source_text must be a string");
        inst.source_text = j["source_text"].get<std::string>();
    }
    auto read_strings = [&j](const char* key) -> std::vector<std::string> {
        std::vector<std::string> out;
        if (!j.contains(key)) return out;
        if (!j[key].is_array()) fail(Errc::SchemaMismatch, std::string(key) + " must be an array");
        for (const auto& e : j[key]) {
            if (!e.is_string()) fail(Errc::SchemaMismatch, std::string(key) + " must hold strings");
            out.push_back(e.get<std::string>());
        }
        return out;
    };
    inst.context_before = read_strings("context_before");
    inst.context_after = read_strings("context_after");

    if (j.contains("label_set")) {
        const auto& ls = j["label_set"];
        if (!ls.is_array()) fail(Errc::SchemaMismatch, "label_set must be an array");
        bool objects = !ls.empty() && ls.front().is_object();
        bool multi = j.contains("multi_select") && j["multi_select"].is_boolean() &&
                     j["multi_select"].get<bool>();
        if (objects) {
            inst.choices = choice_set_from_json(ls, multi);
        } else {
            for (const auto& e : ls) {
                if (!e.is_string()) fail(Errc::SchemaMismatch, "label_set mixes strings and objects");
                inst.label_set.push_back(e.get<std::string>());
            }
            // Plain label names on a choice task are shorthand for a lettered
            // option set in the given order.
            if (output_category(inst.task) == OutputCategory::SequenceClassification) {
                inst.choices = make_choice_set(inst.label_set, multi);
                inst.label_set.clear();
            }
        }
    }

    if (!j.contains("gold")) fail(Errc::SchemaMismatch, "missing gold");
    const auto& g = j["gold"];
    switch (output_category(inst.task)) {
        case OutputCategory::TokenClassification: {
            if (!g.is_array()) fail(Errc::SchemaMismatch, "token gold must be a mention array");
            std::vector<EntityMention> ms;
            for (const auto& e : g) ms.push_back(mention_from_json(e));
            inst.gold = std::move(ms);
            break;
        }
        case OutputCategory::SequenceClassification: {
            if (!g.is_array()) fail(Errc::SchemaMismatch, "classification gold must be a letter array");
            std::vector<std::string> ls;
            for (const auto& e : g) {
                if (!e.is_string()) fail(Errc::SchemaMismatch, "gold letters must be strings");
                ls.push_back(e.get<std::string>());
            }
            std::sort(ls.begin(), ls.end(),
                      [](const std::string& a, const std::string& b) { return letter_less(a, b); });
            if (std::adjacent_find(ls.begin(), ls.end()) != ls.end()) {
                fail(Errc::SchemaMismatch, "duplicate gold letter");
            }
            inst.gold = std::move(ls);
            break;
        }
        case OutputCategory::SequenceRegression: {
            if (!g.is_number_integer()) fail(Errc::SchemaMismatch, "regression gold must be an integer");
            inst.gold = g.get<std::int64_t>();
            break;
        }
        case OutputCategory::Generation: {
            if (!g.is_string()) fail(Errc::SchemaMismatch, "generation gold must be a string");
            inst.gold = g.get<std::string>();
            break;
        }
    }

    inst.question = opt_string(j, "question");
    inst.premise = opt_string(j, "premise");
    inst.hypothesis = opt_string(j, "hypothesis");
    inst.template_override = opt_string(j, "template");
    if (j.contains("trigger")) inst.trigger = mention_from_json(j["trigger"]);
    if (j.contains("entity_pair")) {
        if (!j["entity_pair"].is_array() || j["entity_pair"].size() != 2) {
            fail(Errc::SchemaMismatch, "entity_pair must contain exactly two mentions");
        }
        std::vector<EntityMention> pair;
        for (const auto& e : j["entity_pair"]) pair.push_back(mention_from_json(e));
        inst.entity_pair = std::move(pair);
    }
    return inst;
}

ojson to_json(const PromptPair& p) {
    ojson j;
    j["instance_id"] = p.instance_id;
    j["input"] = p.input;
    j["output"] = p.output;
    return j;
}

PromptPair prompt_pair_from_json(const ojson& j) {
    if (!j.is_object()) fail(Errc::SchemaMismatch, "prompt pair must be a JSON object");
    PromptPair p;
    for (const char* key : {"instance_id", "input", "output"}) {
        if (!j.contains(key) || !j[key].is_string()) {
            fail(Errc::SchemaMismatch, std::string("missing string field '") + key + "'");
        }
    }
    p.instance_id = j["instance_id"].get<std::string>();
    p.input = j["input"].get<std::string>();
    p.output = j["output"].get<std::string>();
    return p;
}

ojson to_json(const Prediction& p) {
    ojson j;
    j["instance_id"] = p.instance_id;
    if (p.mentions) {
        ojson arr = ojson::array();
        for (const auto& m : *p.mentions) arr.push_back(mention_to_json(m));
        j["mentions"] = std::move(arr);
    }
    if (p.letters) j["letters"] = *p.letters;
    if (p.score) j["score"] = *p.score;
    if (p.text) j["text"] = *p.text;
    if (p.error) j["error"] = *p.error;
    if (!p.raw.empty()) j["raw"] = p.raw;
    return j;
}

Prediction prediction_from_json(const ojson& j) {
    if (!j.is_object()) fail(Errc::SchemaMismatch, "prediction must be a JSON object");
    Prediction p;
    if (!j.contains("instance_id") || !j["instance_id"].is_string()) {
        fail(Errc::SchemaMismatch, "prediction needs string 'instance_id'");
    }
    p.instance_id = j["instance_id"].get<std::string>();
    if (j.contains("mentions")) {
        if (!j["mentions"].is_array()) fail(Errc::SchemaMismatch, "mentions must be an array");
        std::vector<EntityMention> ms;
        for (const auto& e : j["mentions"]) ms.push_back(mention_from_json(e));
        p.mentions = std::move(ms);
    }
    if (j.contains("letters")) {
        if (!j["letters"].is_array()) fail(Errc::SchemaMismatch, "letters must be an array");
        std::vector<std::string> ls;
        for (const auto& e : j["letters"]) {
            if (!e.is_string()) fail(Errc::SchemaMismatch, "letters must hold strings");
            ls.push_back(e.get<std::string>());
        }
        p.letters = std::move(ls);
    }
    if (j.contains("score")) {
        if (!j["score"].is_number_integer()) fail(Errc::SchemaMismatch, "score must be an integer");
        p.score = j["score"].get<std::int64_t>();
    }
    if (j.contains("text")) {
        if (!j["text"].is_string()) fail(Errc::SchemaMismatch, "text must be a string");
        p.text = j["text"].get<std::string>();
    }
    p.error = opt_string(j, "error");
    if (j.contains("raw")) {
        if (!j["raw"].is_string()) fail(Errc::SchemaMismatch, "raw must be a string");
        p.raw = j["raw"].get<std::string>();
    }
    return p;
}

// --- JSONL ----------------------------------------------------------------

namespace {

template <typename T, typename F>
std::vector<T> read_jsonl(std::istream& in, F&& parse_one) {
    std::vector<T> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = text::trim(line);
        if (sv.empty()) continue;
        ojson j;
        try {
            j = ojson::parse(sv);
        } catch (const std::exception& e) {
            fail(Errc::MalformedRecord, "line " + std::to_string(line_no) + ": " + e.what());
        }
        try {
            out.push_back(parse_one(j));
        } catch (const NluError& e) {
            fail(e.code(), "line " + std::to_string(line_no) + ": " + e.message());
        }
    }
    return out;
}

template <typename T>
void write_lines(std::ostream& out, const std::vector<T>& v) {
    for (const auto& x : v) out << to_json(x).dump() << '\n';
}

} // namespace

std::vector<NluInstance> read_instances(std::istream& in) {
    return read_jsonl<NluInstance>(in, [](const ojson& j) { return instance_from_json(j); });
}

std::vector<PromptPair> read_prompt_pairs(std::istream& in) {
    return read_jsonl<PromptPair>(in, [](const ojson& j) { return prompt_pair_from_json(j); });
}

std::vector<Prediction> read_predictions(std::istream& in) {
    return read_jsonl<Prediction>(in, [](const ojson& j) { return prediction_from_json(j); });
}

void write_jsonl(std::ostream& out, const std::vector<NluInstance>& v) { write_lines(out, v); }
void write_jsonl(std::ostream& out, const std::vector<PromptPair>& v) { write_lines(out, v); }
void write_jsonl(std::ostream& out, const std::vector<Prediction>& v) { write_lines(out, v); }

} // namespace mednlu
