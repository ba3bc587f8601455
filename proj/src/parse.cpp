#include "mednlu/parse.hpp"

#include <algorithm>
#include <set>

#include "mednlu/prompt.hpp"
#include "mednlu/text.hpp"

namespace mednlu {

namespace {

std::vector<std::string> split_on(std::string_view s, std::string_view sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            return out;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + sep.size();
    }
}

} // namespace

std::vector<EntityMention> parse_token_output(const std::string& raw, const NluInstance& inst) {
    std::string prefix;
    if (inst.task == TaskKind::EAE && inst.trigger) prefix = inst.trigger->label + " - ";

    std::vector<std::pair<std::string, std::string>> expected; // line prefix -> label
    for (const auto& label : inst.label_set) {
        expected.emplace_back(prefix + label + ": ", label);
    }

    std::vector<EntityMention> out;
    std::set<std::string> seen_labels;
    for (const auto& line_raw : text::split_lines(raw)) {
        std::string_view line = text::trim(line_raw);
        if (line.empty()) continue;
        // Longest matching prefix wins so labels that prefix one another
        // cannot be confused.
        const std::pair<std::string, std::string>* best = nullptr;
        for (const auto& e : expected) {
            if (line.substr(0, e.first.size()) == e.first) {
                if (!best || e.first.size() > best->first.size()) best = &e;
            }
        }
        if (!best) fail(Errc::UnknownLabel, "unrecognized answer line: '" + std::string(line) + "'");
        if (!seen_labels.insert(best->second).second) {
            fail(Errc::MalformedRecord, "duplicate line for label '" + best->second + "'");
        }
        std::string_view rest = text::trim(line.substr(best->first.size()));
        if (rest == "None") continue;
        for (const auto& piece : split_on(rest, kSpanSeparator)) {
            std::string span(text::trim(piece));
            if (span.empty()) {
                fail(Errc::MalformedRecord, "empty span on label '" + best->second + "'");
            }
            EntityMention m;
            m.text = std::move(span);
            m.label = best->second;
            out.push_back(std::move(m));
        }
    }
    return out;
}

std::vector<EntityMention> align_spans(std::vector<EntityMention> mentions,
                                       const std::string& source_text) {
    std::size_t cursor = 0;
    for (auto& m : mentions) {
        m.char_start.reset();
        m.char_end.reset();
        auto pos = text::cp_find(source_text, m.text, cursor);
        if (!pos) pos = text::cp_find(source_text, m.text, 0);
        if (!pos) continue;
        std::size_t len = text::cp_length(m.text);
        m.char_start = static_cast<std::int64_t>(*pos);
        m.char_end = static_cast<std::int64_t>(*pos + len);
        cursor = *pos + len;
    }
    return mentions;
}

std::vector<std::string> parse_choice_output(const std::string& raw, const ChoiceSet& cs) {
    std::vector<std::string> found;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != '(') continue;
        const ChoiceOption* best = nullptr;
        for (const auto& o : cs.options) {
            std::size_t n = o.letter.size();
            if (i + 1 + n < raw.size() && raw.compare(i + 1, n, o.letter) == 0 &&
                raw[i + 1 + n] == ')') {
                if (!best || o.letter.size() > best->letter.size()) best = &o;
            }
        }
        if (best && seen.insert(best->letter).second) found.push_back(best->letter);
    }
    if (found.empty()) fail(Errc::NoChoiceFound, "no option marker found in answer");
    return found;
}

std::int64_t choice_to_score(const std::vector<std::string>& letters, const ChoiceSet& cs) {
    if (letters.size() != 1) {
        fail(Errc::NoChoiceFound,
             "expected exactly one option, got " + std::to_string(letters.size()));
    }
    const ChoiceOption* o = cs.find(letters[0]);
    if (!o) fail(Errc::NoChoiceFound, "letter '" + letters[0] + "' not in choice set");
    const auto* v = std::get_if<std::int64_t>(&o->canonical);
    if (!v) fail(Errc::InvalidArgument, "option " + o->letter + " has no integer score");
    return *v;
}

Prediction parse_prediction(const std::string& raw, const NluInstance& inst,
                            const ChoiceSet* effective) {
    Prediction p;
    p.instance_id = inst.id;
    p.raw = raw;
    switch (output_category(inst.task)) {
        case OutputCategory::TokenClassification:
            p.mentions = align_spans(parse_token_output(raw, inst), inst.source_text);
            break;
        case OutputCategory::SequenceClassification: {
            if (!effective && !inst.choices) {
                fail(Errc::SchemaMismatch, "instance " + inst.id + " has no choice set");
            }
            const ChoiceSet& cs = effective ? *effective : *inst.choices;
            auto letters = parse_choice_output(raw, cs);
            std::sort(letters.begin(), letters.end(),
                      [](const std::string& a, const std::string& b) { return letter_less(a, b); });
            p.letters = std::move(letters);
            break;
        }
        case OutputCategory::SequenceRegression: {
            const ChoiceSet scale =
                effective ? *effective : (inst.choices ? *inst.choices : default_sts_choices());
            p.score = choice_to_score(parse_choice_output(raw, scale), scale);
            break;
        }
        case OutputCategory::Generation:
            p.text = std::string(text::trim(raw));
            break;
    }
    return p;
}

} // namespace mednlu
