#include "mednlu/prompt.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "mednlu/rng.hpp"
#include "mednlu/text.hpp"

namespace mednlu {

namespace {

constexpr std::string_view kSegmentSep = "\n\n";

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

std::string join_segments(const std::vector<std::string>& segs) {
    return text::join(segs, kSegmentSep);
}

/// Target text with its adjacent context sentences, elided on both sides.
std::string contextual_text(const NluInstance& inst) {
    if (inst.context_before.empty() && inst.context_after.empty()) return inst.source_text;
    std::vector<std::string> parts = inst.context_before;
    parts.push_back(inst.source_text);
    parts.insert(parts.end(), inst.context_after.begin(), inst.context_after.end());
    return "... " + text::join(parts, " ") + " ...";
}

void check_span_renderable(const std::string& span) {
    if (span.find('\n') != std::string::npos) {
        fail(Errc::SeparatorCollision, "span contains a newline: '" + span + "'");
    }
    if (span.find(kSpanSeparator) != std::string::npos) {
        fail(Errc::SeparatorCollision, "span contains the span separator: '" + span + "'");
    }
    if (text::trim(span) != span) {
        fail(Errc::SeparatorCollision, "span has surrounding whitespace: '" + span + "'");
    }
    if (span.empty()) fail(Errc::SeparatorCollision, "empty span");
    if (span == "None") fail(Errc::SeparatorCollision, "span equals the absence marker 'None'");
}

void check_label_renderable(const std::string& label) {
    if (label.find('\n') != std::string::npos || label.find(": ") != std::string::npos) {
        fail(Errc::SeparatorCollision, "label cannot contain newline or ': ': '" + label + "'");
    }
    if (text::trim(label).empty()) fail(Errc::SeparatorCollision, "blank label");
}

/// Rejects descriptions that would be indistinguishable from an option
/// marker of this set when the output is scanned.
void check_descriptions_renderable(const ChoiceSet& cs) {
    for (const auto& o : cs.options) {
        if (o.description.find('\n') != std::string::npos) {
            fail(Errc::SeparatorCollision, "option description contains a newline");
        }
        for (const auto& other : cs.options) {
            std::string marker = "(" + other.letter + ")";
            if (o.description.find(marker) != std::string::npos) {
                fail(Errc::SeparatorCollision, "option " + o.letter +
                                                   " description contains marker '" + marker + "'");
            }
        }
    }
}

std::string choice_token(const ChoiceOption& o) {
    return "(" + o.letter + ") " + o.description;
}

std::string options_line(const ChoiceSet& cs) {
    std::string line = "Options:";
    for (const auto& o : cs.options) {
        line += " " + choice_token(o);
    }
    return line;
}

std::uint64_t sub_seed(const NluInstance& inst, std::uint64_t global_seed, std::string_view tag) {
    return rng::combine(rng::instance_seed(inst.dataset, inst.id, global_seed),
                        rng::fnv1a64(tag));
}

struct EffectiveChoices {
    ChoiceSet set;
    std::vector<std::size_t> gold_positions; // ascending positions in `set`
};

/// Applies negative-option reduction and seeded shuffling; tracks where the
/// gold options end up.
EffectiveChoices effective_choices(const NluInstance& inst, const RenderOptions& opts) {
    if (!inst.choices) fail(Errc::SchemaMismatch, "choice task without choice set");
    const ChoiceSet& in = *inst.choices;
    const auto* letters_ptr = std::get_if<std::vector<std::string>>(&inst.gold);
    if (!letters_ptr) fail(Errc::SchemaMismatch, "classification gold must be a letter list");
    const auto& gold_letters = *letters_ptr;

    std::set<std::size_t> gold_idx;
    for (const auto& l : gold_letters) {
        for (std::size_t i = 0; i < in.options.size(); ++i) {
            if (in.options[i].letter == l) gold_idx.insert(i);
        }
    }

    std::vector<std::size_t> kept(in.options.size());
    for (std::size_t i = 0; i < kept.size(); ++i) kept[i] = i;

    if (opts.negative_count) {
        std::vector<std::size_t> negatives;
        for (std::size_t i = 0; i < in.options.size(); ++i) {
            if (!gold_idx.count(i)) negatives.push_back(i);
        }
        if (*opts.negative_count > negatives.size()) {
            fail(Errc::PoolTooSmall, "need " + std::to_string(*opts.negative_count) +
                                         " negative options, only " +
                                         std::to_string(negatives.size()) + " available");
        }
        rng::SplitMix g(sub_seed(inst, opts.global_seed, "negative-sample"));
        auto picks = rng::sample_without_replacement(negatives.size(), *opts.negative_count, g);
        std::set<std::size_t> retained(gold_idx.begin(), gold_idx.end());
        for (std::size_t p : picks) retained.insert(negatives[p]);
        kept.assign(retained.begin(), retained.end()); // original order
    }

    if (opts.shuffle_choices) {
        rng::SplitMix g(sub_seed(inst, opts.global_seed, "choice-shuffle"));
        rng::shuffle(kept, g);
    }

    EffectiveChoices out;
    out.set.multi_select = in.multi_select;
    for (std::size_t pos = 0; pos < kept.size(); ++pos) {
        ChoiceOption o = in.options[kept[pos]];
        o.letter = letter_for_index(pos);
        out.set.options.push_back(std::move(o));
        if (gold_idx.count(kept[pos])) out.gold_positions.push_back(pos);
    }
    return out;
}

void require_category(const NluInstance& inst, OutputCategory want, const char* fn) {
    if (output_category(inst.task) != want) {
        fail(Errc::InvalidArgument, std::string(fn) + " got a " +
                                        std::string(task_name(inst.task)) + " instance");
    }
}

std::string token_instruction(const NluInstance& inst) {
    std::string labels = text::join(inst.label_set, ", ");
    std::string instr;
    if (inst.task == TaskKind::EAE) {
        const EntityMention& trig = inst.trigger.value();
        instr = "According to the medical text, what is the " + labels + " attribute of the " +
                trig.label + " event `" + trig.text +
                "' in the medical text below? Extract the attribute faithfully from the medical text.";
    } else {
        instr = "Extract all relevant medical named entities faithfully from the medical text "
                "below. Focus on identifying the following entities: " +
                labels + ".";
    }
    if (inst.template_override) {
        instr = replace_all(*inst.template_override, "{labels}", labels);
    }
    return instr;
}

RenderedInstance render_token_ex(const NluInstance& inst, const RenderOptions&) {
    const auto* gold_ptr = std::get_if<std::vector<EntityMention>>(&inst.gold);
    if (!gold_ptr) fail(Errc::SchemaMismatch, "token task gold must be a mention list");
    const auto& gold = *gold_ptr;
    for (const auto& l : inst.label_set) check_label_renderable(l);

    std::string prefix;
    if (inst.task == TaskKind::EAE) prefix = inst.trigger.value().label + " - ";

    // Group gold spans per label, in source order when offsets allow it.
    std::map<std::string, std::vector<const EntityMention*>> by_label;
    for (const auto& m : gold) by_label[m.label].push_back(&m);
    for (auto& [label, ms] : by_label) {
        bool all_offsets = std::all_of(ms.begin(), ms.end(),
                                       [](const EntityMention* m) { return m->char_start.has_value(); });
        if (all_offsets) {
            std::stable_sort(ms.begin(), ms.end(), [](const EntityMention* a, const EntityMention* b) {
                return std::tie(*a->char_start, *a->char_end) < std::tie(*b->char_start, *b->char_end);
            });
        }
    }

    std::vector<std::string> lines;
    for (const auto& label : inst.label_set) {
        std::string line = prefix + label + ": ";
        auto it = by_label.find(label);
        if (it == by_label.end() || it->second.empty()) {
            line += "None";
        } else {
            std::vector<std::string> spans;
            for (const auto* m : it->second) {
                check_span_renderable(m->text);
                spans.push_back(m->text);
            }
            line += text::join(spans, std::string(kSpanSeparator));
        }
        lines.push_back(std::move(line));
    }

    RenderedInstance out;
    out.pair.instance_id = inst.id;
    out.pair.input = join_segments({token_instruction(inst), "Medical text: " + contextual_text(inst)});
    out.pair.output = text::join(lines, "\n");
    return out;
}

RenderedInstance render_seqclass_ex(const NluInstance& inst, const RenderOptions& opts) {
    EffectiveChoices eff = effective_choices(inst, opts);
    check_descriptions_renderable(eff.set);
    if (eff.gold_positions.empty()) {
        fail(Errc::EmptyInput, "cannot render an output for an empty gold letter set");
    }

    std::string instr;
    switch (inst.task) {
        case TaskKind::EAC: {
            const EntityMention& trig = inst.trigger.value();
            instr = "According to the medical text, what is the " + inst.question.value() +
                    " attribute of the " + trig.label + " event `" + trig.text +
                    "' in the medical text below? Choose from the following options.";
            break;
        }
        case TaskKind::DC:
            if (inst.choices->multi_select) {
                instr = "According to the medical text below, which options best describe " +
                        inst.question.value() + "? Choose from the following options. Multiple "
                        "options can be true.";
            } else {
                instr = "According to the medical text below, which option best describes " +
                        inst.question.value() + "? Choose from the following options. Only one "
                        "option can be true.";
            }
            break;
        case TaskKind::RE: {
            const auto& pair = inst.entity_pair.value();
            if (pair.size() != 2) fail(Errc::SchemaMismatch, "re needs exactly two entities");
            std::string relation = inst.question.value_or("co-reference");
            instr = "According to the Medical text below, what is the " + relation +
                    " relationship between the " + pair[0].label + " entity `" + pair[0].text +
                    "' and the " + pair[1].label + " entity `" + pair[1].text +
                    "'? Choose from the following options.";
            break;
        }
        case TaskKind::QA:
            instr = "According to the medical literature below, " + inst.question.value() +
                    " Choose from the following options. Only one option can be true.";
            break;
        case TaskKind::NLI:
            instr = "What is the relationship of the hypothesis with respect to the premise? "
                    "Choose from the following options.";
            break;
        default:
            fail(Errc::InvalidArgument, "not a sequence classification task");
    }
    if (inst.template_override) {
        instr = replace_all(*inst.template_override, "{question}", inst.question.value_or(""));
    }

    std::vector<std::string> segments{instr};
    switch (inst.task) {
        case TaskKind::QA:
            segments.push_back("Medical literature: " + contextual_text(inst));
            break;
        case TaskKind::NLI:
            segments.push_back("Premise: " + inst.premise.value());
            segments.push_back("Hypothesis: " + inst.hypothesis.value());
            break;
        default:
            segments.push_back("Medical text: " + contextual_text(inst));
            break;
    }
    segments.push_back(options_line(eff.set));

    std::vector<std::string> answer_tokens;
    std::vector<std::string> gold_letters;
    for (std::size_t pos : eff.gold_positions) {
        answer_tokens.push_back(choice_token(eff.set.options[pos]));
        gold_letters.push_back(eff.set.options[pos].letter);
    }
    std::string answer = text::join(answer_tokens, " ");
    if (inst.task == TaskKind::EAC) {
        answer = inst.trigger.value().label + " - " + inst.question.value() + ": " + answer;
    }

    RenderedInstance out;
    out.pair.instance_id = inst.id;
    out.pair.input = join_segments(segments);
    out.pair.output = std::move(answer);
    out.effective_choices = std::move(eff.set);
    out.gold_letters = std::move(gold_letters);
    return out;
}

RenderedInstance render_sts_ex(const NluInstance& inst, const RenderOptions&) {
    const ChoiceSet cs = inst.choices ? *inst.choices : default_sts_choices();
    check_descriptions_renderable(cs);
    const auto* score_ptr = std::get_if<std::int64_t>(&inst.gold);
    if (!score_ptr) fail(Errc::SchemaMismatch, "regression gold must be an integer score");
    std::int64_t score = *score_ptr;
    const ChoiceOption* gold_opt = nullptr;
    for (const auto& o : cs.options) {
        const auto* v = std::get_if<std::int64_t>(&o.canonical);
        if (v && *v == score) gold_opt = &o;
    }
    if (!gold_opt) {
        fail(Errc::ScoreOutOfScale, "gold score " + std::to_string(score) + " has no option");
    }

    std::string instr = "How similar are the two sentences below? Choose from the following options.";
    if (inst.template_override) instr = *inst.template_override;

    RenderedInstance out;
    out.pair.instance_id = inst.id;
    out.pair.input = join_segments({instr, "Sentence 1: " + inst.premise.value(),
                                    "Sentence 2: " + inst.hypothesis.value(), options_line(cs)});
    out.pair.output = choice_token(*gold_opt);
    out.effective_choices = cs;
    out.gold_letters = {gold_opt->letter};
    return out;
}

RenderedInstance render_generation_ex(const NluInstance& inst, const RenderOptions&) {
    RenderedInstance out;
    out.pair.instance_id = inst.id;
    if (inst.template_override) {
        if (inst.template_override->find("{text}") != std::string::npos) {
            out.pair.input = replace_all(*inst.template_override, "{text}", inst.source_text);
        } else {
            out.pair.input =
                join_segments({*inst.template_override, "Medical text: " + inst.source_text});
        }
    } else {
        out.pair.input =
            join_segments({"Summarize the medical text below.", "Medical text: " + inst.source_text});
    }
    const auto* txt = std::get_if<std::string>(&inst.gold);
    if (!txt) fail(Errc::SchemaMismatch, "generation gold must be a string");
    out.pair.output = *txt;
    return out;
}

} // namespace

RenderedInstance render_instance_ex(const NluInstance& inst, const RenderOptions& opts) {
    switch (output_category(inst.task)) {
        case OutputCategory::TokenClassification: return render_token_ex(inst, opts);
        case OutputCategory::SequenceClassification: return render_seqclass_ex(inst, opts);
        case OutputCategory::SequenceRegression: return render_sts_ex(inst, opts);
        case OutputCategory::Generation: return render_generation_ex(inst, opts);
    }
    fail(Errc::InvalidArgument, "bad category");
}

PromptPair render_instance(const NluInstance& inst, const RenderOptions& opts) {
    return render_instance_ex(inst, opts).pair;
}

PromptPair render_token_classification(const NluInstance& inst, const RenderOptions& opts) {
    require_category(inst, OutputCategory::TokenClassification, "render_token_classification");
    return render_token_ex(inst, opts).pair;
}

PromptPair render_sequence_classification(const NluInstance& inst, const RenderOptions& opts) {
    require_category(inst, OutputCategory::SequenceClassification, "render_sequence_classification");
    return render_seqclass_ex(inst, opts).pair;
}

PromptPair render_sts(const NluInstance& inst, const RenderOptions& opts) {
    require_category(inst, OutputCategory::SequenceRegression, "render_sts");
    return render_sts_ex(inst, opts).pair;
}

PromptPair render_generation(const NluInstance& inst, const RenderOptions& opts) {
    require_category(inst, OutputCategory::Generation, "render_generation");
    return render_generation_ex(inst, opts).pair;
}

ShuffledChoices shuffle_choice_order(const ChoiceSet& cs, std::uint64_t seed) {
    std::vector<std::size_t> idx(cs.options.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng::SplitMix g(seed);
    rng::shuffle(idx, g);

    ShuffledChoices out;
    out.set.multi_select = cs.multi_select;
    out.source_index = idx;
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
        ChoiceOption o = cs.options[idx[pos]];
        o.letter = letter_for_index(pos);
        out.set.options.push_back(std::move(o));
    }
    return out;
}

std::vector<std::string> sample_negative_categories(const std::vector<std::string>& gold_labels,
                                                    const std::vector<std::string>& pool,
                                                    std::size_t n, std::uint64_t seed) {
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!pos.emplace(pool[i], i).second) {
            fail(Errc::InvalidArgument, "duplicate pool label '" + pool[i] + "'");
        }
    }
    std::set<std::size_t> retained;
    for (const auto& g : gold_labels) {
        auto it = pos.find(g);
        if (it == pos.end()) fail(Errc::InvalidArgument, "gold label '" + g + "' not in pool");
        retained.insert(it->second);
    }
    std::vector<std::size_t> negatives;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!retained.count(i)) negatives.push_back(i);
    }
    if (n > negatives.size()) {
        fail(Errc::PoolTooSmall, "need " + std::to_string(n) + " negatives, only " +
                                     std::to_string(negatives.size()) + " available");
    }
    rng::SplitMix g(seed);
    for (std::size_t p : rng::sample_without_replacement(negatives.size(), n, g)) {
        retained.insert(negatives[p]);
    }
    std::vector<std::string> out;
    for (std::size_t i : retained) out.push_back(pool[i]);
    return out;
}

std::string expand_label_name(std::string_view raw) {
    static const std::map<std::string_view, std::string_view> kExpansions = {
        {"GENERIF", "Gene reference into a function (function of a gene)"},
    };
    auto it = kExpansions.find(raw);
    if (it != kExpansions.end()) return std::string(it->second);
    return std::string(raw);
}

ChoiceSet make_choice_set(const std::vector<std::string>& labels, bool multi_select) {
    ChoiceSet cs;
    cs.multi_select = multi_select;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        cs.options.push_back({letter_for_index(i), expand_label_name(labels[i]), labels[i]});
    }
    return cs;
}

ChoiceSet default_sts_choices() {
    ChoiceSet cs;
    const char* descs[6] = {
        "The two sentences are completely dissimilar.",
        "The two sentences are not equivalent, but are on the same topic.",
        "The two sentences are not equivalent, but share some details",
        "The two sentences are roughly equivalent, but some important information differs / missing.",
        "The two sentences are mostly equivalent, but some unimportant details differ.",
        "The two sentences are completely or mostly equivalent, as they mean the same thing.",
    };
    for (std::int64_t i = 0; i < 6; ++i) {
        cs.options.push_back({letter_for_index(static_cast<std::size_t>(i)), descs[i], i});
    }
    return cs;
}

std::string ner_fewshot_preamble() {
    return "Your answer should use the following format, with one entity type per line. The span "
           "refers to the original text span from the Medical text. Output None if there is no "
           "such span. Use `...' to separate multiple spans.";
}

} // namespace mednlu
