#pragma once

// Seeded random instance builders. Every instance they return passes
// validate() and renders without throwing, so property tests can focus on
// behaviour instead of setup.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "mednlu/rng.hpp"
#include "mednlu/text.hpp"
#include "mednlu/types.hpp"

namespace testgen {

inline const std::vector<std::string>& lexicon() {
    static const std::vector<std::string> kWords = {
        "patient",  "denies",   "reports",  "chronic",  "acute",    "bilateral",
        "lesion",   "therapy",  "dosage",   "insulin",  "cardiac",  "renal",
        "hepatic",  "fracture", "swelling", "history",  "symptom",  "relief",
        "nausea",   "fatigue",  "tremor",   "biopsy",   "culture",  "serum",
        "glucose",  "pressure", "rhythm",   "murmur",   "edema",    "cough",
        "fever",    "onset",    "stable",   "elevated", "negative", "positive",
        "daily",    "weekly",   "oral",     "topical",  "admitted", "discharged",
    };
    return kWords;
}

inline std::string word(mednlu::rng::SplitMix& g) {
    const auto& lex = lexicon();
    return lex[g.next_below(lex.size())];
}

inline std::string capitalize(std::string s) {
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = char(s[0] - 'a' + 'A');
    return s;
}

inline std::string sentence(mednlu::rng::SplitMix& g, std::size_t lo = 4, std::size_t hi = 9) {
    std::size_t n = lo + g.next_below(hi - lo + 1);
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n; ++i) words.push_back(word(g));
    words[0] = capitalize(words[0]);
    return mednlu::text::join(words, " ") + ".";
}

struct TokenText {
    std::string source;
    std::vector<mednlu::EntityMention> mentions; // disjoint, sorted, offsets set
};

// Sentence of space-separated words with non-overlapping whole-word mention
// runs labeled from label_set.
inline TokenText token_text(mednlu::rng::SplitMix& g, const std::vector<std::string>& label_set,
                            std::size_t min_words = 8, std::size_t max_words = 16,
                            bool force_mention = true) {
    TokenText out;
    std::size_t n = min_words + g.next_below(max_words - min_words + 1);
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n; ++i) words.push_back(word(g));
    out.source = mednlu::text::join(words, " ");

    std::vector<std::size_t> starts(n);
    std::size_t cp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        starts[i] = cp;
        cp += mednlu::text::cp_length(words[i]) + 1; // +1 for the space
    }

    std::size_t i = 0;
    while (i < n) {
        if (g.next_below(100) < 35) {
            std::size_t len = 1 + g.next_below(3);
            if (i + len > n) len = n - i;
            mednlu::EntityMention m;
            m.label = label_set[g.next_below(label_set.size())];
            std::vector<std::string> run(words.begin() + i, words.begin() + i + len);
            m.text = mednlu::text::join(run, " ");
            m.char_start = static_cast<std::int64_t>(starts[i]);
            m.char_end = *m.char_start + static_cast<std::int64_t>(mednlu::text::cp_length(m.text));
            out.mentions.push_back(std::move(m));
            i += len + 1; // skip a word so runs never touch
        } else {
            ++i;
        }
    }
    if (out.mentions.empty() && force_mention) {
        mednlu::EntityMention m;
        m.label = label_set[g.next_below(label_set.size())];
        m.text = words[0];
        m.char_start = 0;
        m.char_end = static_cast<std::int64_t>(mednlu::text::cp_length(words[0]));
        out.mentions.push_back(std::move(m));
    }
    return out;
}

inline mednlu::ChoiceSet choice_set(mednlu::rng::SplitMix& g, std::size_t count, bool multi) {
    mednlu::ChoiceSet cs;
    cs.multi_select = multi;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < count; ++i) {
        std::string desc;
        do {
            std::size_t words_n = 1 + g.next_below(3);
            std::vector<std::string> ws;
            for (std::size_t w = 0; w < words_n; ++w) ws.push_back(word(g));
            desc = mednlu::text::join(ws, " ");
        } while (!seen.insert(desc).second);
        mednlu::ChoiceOption o;
        o.letter = mednlu::letter_for_index(i);
        o.description = desc;
        o.canonical = desc;
        cs.options.push_back(std::move(o));
    }
    return cs;
}

inline std::vector<std::string> pick_letters(mednlu::rng::SplitMix& g, const mednlu::ChoiceSet& cs,
                                             std::size_t count) {
    auto idx = mednlu::rng::sample_without_replacement(cs.options.size(), count, g);
    std::sort(idx.begin(), idx.end());
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(cs.options[i].letter);
    return out;
}

inline mednlu::NluInstance make_instance(mednlu::TaskKind task, std::uint64_t seed) {
    using namespace mednlu;
    rng::SplitMix g(rng::combine(seed, rng::fnv1a64(task_name(task))));
    NluInstance inst;
    inst.task = task;
    inst.dataset = "gen";
    inst.id = std::string(task_name(task)) + "-" + std::to_string(seed);

    switch (task) {
        case TaskKind::NER:
        case TaskKind::ETE: {
            inst.label_set = {"Problem", "Treatment", "Test"};
            auto tt = token_text(g, inst.label_set);
            inst.source_text = tt.source;
            inst.gold = std::move(tt.mentions);
            break;
        }
        case TaskKind::EAE: {
            inst.label_set = {"Method", "Amount"};
            auto tt = token_text(g, inst.label_set);
            inst.source_text = tt.source;
            inst.gold = std::move(tt.mentions);
            EntityMention trig;
            trig.text = word(g);
            trig.label = capitalize(word(g));
            inst.trigger = std::move(trig);
            if (g.next_below(2)) inst.context_before = {sentence(g)};
            if (g.next_below(2)) inst.context_after = {sentence(g)};
            break;
        }
        case TaskKind::EAC: {
            inst.source_text = sentence(g);
            inst.question = capitalize(word(g)) + " " + word(g);
            EntityMention trig;
            trig.text = word(g);
            trig.label = capitalize(word(g));
            inst.trigger = std::move(trig);
            inst.choices = choice_set(g, 3 + g.next_below(4), false);
            inst.gold = pick_letters(g, *inst.choices, 1);
            break;
        }
        case TaskKind::DC: {
            inst.source_text = sentence(g, 6, 14);
            inst.question = word(g) + " " + word(g);
            inst.choices = choice_set(g, 4 + g.next_below(5), true);
            inst.gold = pick_letters(g, *inst.choices, 1 + g.next_below(3));
            break;
        }
        case TaskKind::RE: {
            inst.source_text = sentence(g, 6, 14);
            EntityMention a, b;
            a.text = capitalize(word(g));
            a.label = capitalize(word(g));
            b.text = word(g);
            b.label = capitalize(word(g));
            inst.entity_pair = {std::move(a), std::move(b)};
            inst.choices = choice_set(g, 2 + g.next_below(3), false);
            inst.gold = pick_letters(g, *inst.choices, 1);
            if (g.next_below(2)) inst.context_before = {sentence(g)};
            if (g.next_below(2)) inst.context_after = {sentence(g)};
            break;
        }
        case TaskKind::NLI: {
            inst.premise = sentence(g, 6, 12);
            inst.hypothesis = sentence(g, 4, 9);
            auto cs = choice_set(g, 3, false);
            cs.options[0].description = "neutral";
            cs.options[0].canonical = std::string("neutral");
            cs.options[1].description = "entailment";
            cs.options[1].canonical = std::string("entailment");
            cs.options[2].description = "contradiction";
            cs.options[2].canonical = std::string("contradiction");
            inst.choices = std::move(cs);
            inst.gold = pick_letters(g, *inst.choices, 1);
            break;
        }
        case TaskKind::QA: {
            inst.question = capitalize(word(g)) + " " + word(g) + " " + word(g) + "?";
            inst.source_text = sentence(g, 8, 16) + " " + sentence(g, 6, 12);
            inst.choices = choice_set(g, 2 + g.next_below(3), false);
            inst.gold = pick_letters(g, *inst.choices, 1);
            break;
        }
        case TaskKind::STS: {
            inst.premise = sentence(g);
            inst.hypothesis = sentence(g);
            inst.gold = static_cast<std::int64_t>(g.next_below(6));
            break;
        }
        case TaskKind::Summarization: {
            inst.source_text = sentence(g, 8, 14) + " " + sentence(g, 8, 14) + " " +
                               sentence(g, 8, 14) + " " + sentence(g, 8, 14);
            inst.gold = sentence(g, 4, 8);
            break;
        }
    }
    return inst;
}

inline const std::vector<mednlu::TaskKind>& all_tasks() {
    static const std::vector<mednlu::TaskKind> kTasks = {
        mednlu::TaskKind::NER, mednlu::TaskKind::ETE, mednlu::TaskKind::EAE,
        mednlu::TaskKind::EAC, mednlu::TaskKind::DC,  mednlu::TaskKind::RE,
        mednlu::TaskKind::NLI, mednlu::TaskKind::QA,  mednlu::TaskKind::STS,
        mednlu::TaskKind::Summarization,
    };
    return kTasks;
}

// Gold and predicted mention lists over one synthetic text, both disjoint and
// sorted by position, as parse + alignment would produce them.
struct SpanCase {
    std::string source;
    std::vector<mednlu::EntityMention> golds;
    std::vector<mednlu::EntityMention> preds;
};

inline SpanCase make_span_case(std::uint64_t seed, std::size_t max_each = 6) {
    using namespace mednlu;
    rng::SplitMix g(rng::combine(seed, rng::fnv1a64("span-case")));
    static const std::vector<std::string> kLabels = {"Problem", "Treatment"};

    SpanCase sc;
    std::size_t n = 14 + g.next_below(10);
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n; ++i) words.push_back(word(g));
    sc.source = text::join(words, " ");
    std::vector<std::size_t> starts(n);
    std::size_t cp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        starts[i] = cp;
        cp += text::cp_length(words[i]) + 1;
    }

    auto draw = [&](std::vector<EntityMention>& out) {
        std::size_t i = 0;
        while (i < n && out.size() < max_each) {
            if (g.next_below(100) < 45) {
                std::size_t len = 1 + g.next_below(3);
                if (i + len > n) len = n - i;
                EntityMention m;
                m.label = kLabels[g.next_below(kLabels.size())];
                std::vector<std::string> run(words.begin() + i, words.begin() + i + len);
                m.text = text::join(run, " ");
                m.char_start = static_cast<std::int64_t>(starts[i]);
                m.char_end = *m.char_start + static_cast<std::int64_t>(text::cp_length(m.text));
                out.push_back(std::move(m));
                i += len; // adjacent runs allowed, overlap not
            } else {
                ++i;
            }
        }
    };
    draw(sc.golds);
    draw(sc.preds);
    return sc;
}

} // namespace testgen
