#pragma once

// Hand-checked reference instances with the exact prompt text each one must
// render to. Golden strings are compared line-wise (trailing whitespace and
// blank lines ignored) so paragraph spacing is not part of the contract.

#include <string>
#include <vector>

#include "mednlu/text.hpp"
#include "mednlu/types.hpp"

namespace fixtures {

struct GoldenCase {
    std::string name;
    mednlu::NluInstance instance;
    std::string input;  // expected rendered prompt
    std::string output; // expected rendered completion
};

// Right-trimmed non-empty lines; the comparison domain for golden cases.
inline std::vector<std::string> content_lines(const std::string& s) {
    std::vector<std::string> out;
    for (const auto& line : mednlu::text::split_lines(s)) {
        auto t = mednlu::text::rtrim(line);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

inline mednlu::EntityMention mention(std::string text, std::string label,
                                     std::int64_t start = -1, std::int64_t end = -1) {
    mednlu::EntityMention m;
    m.text = std::move(text);
    m.label = std::move(label);
    if (start >= 0) {
        m.char_start = start;
        m.char_end = end;
    }
    return m;
}

inline mednlu::ChoiceSet letters(std::vector<std::string> descriptions, bool multi = false) {
    mednlu::ChoiceSet cs;
    cs.multi_select = multi;
    for (std::size_t i = 0; i < descriptions.size(); ++i) {
        mednlu::ChoiceOption o;
        o.letter = mednlu::letter_for_index(i);
        o.description = descriptions[i];
        o.canonical = descriptions[i];
        cs.options.push_back(std::move(o));
    }
    return cs;
}

inline GoldenCase ner_case() {
    GoldenCase c;
    c.name = "ner";
    auto& i = c.instance;
    i.id = "golden-ner";
    i.dataset = "golden";
    i.task = mednlu::TaskKind::NER;
    i.source_text = "Denies any IV drug use or any recreational drug use.";
    i.label_set = {"Living status", "Tobacco", "Drug", "Employment", "Alcohol"};
    i.gold = std::vector<mednlu::EntityMention>{
        mention("IV drug use", "Drug", 11, 22),
        mention("recreational drug use", "Drug", 30, 51),
    };
    c.input =
        "Extract all relevant medical named entities faithfully from the medical text below. "
        "Focus on identifying the following entities: Living status, Tobacco, Drug, Employment, "
        "Alcohol.\n\n"
        "Medical text: Denies any IV drug use or any recreational drug use.";
    c.output =
        "Living status: None\n"
        "Tobacco: None\n"
        "Drug: IV drug use ... recreational drug use\n"
        "Employment: None\n"
        "Alcohol: None";
    return c;
}

inline GoldenCase eae_case() {
    GoldenCase c;
    c.name = "eae";
    auto& i = c.instance;
    i.id = "golden-eae";
    i.dataset = "golden";
    i.task = mednlu::TaskKind::EAE;
    i.source_text = "Denies any IV drug use or any recreational drug use.";
    i.context_before = {"Currently admits to five drinks of alcohol per week."};
    i.context_after = {"Divorced with no children."};
    i.trigger = mention("IV drug use", "Drug");
    i.label_set = {"Method"};
    i.gold = std::vector<mednlu::EntityMention>{mention("IV", "Method", 11, 13)};
    c.input =
        "According to the medical text, what is the Method attribute of the Drug event "
        "`IV drug use' in the medical text below? Extract the attribute faithfully from the "
        "medical text.\n\n"
        "Medical text: ... Currently admits to five drinks of alcohol per week. Denies any IV "
        "drug use or any recreational drug use. Divorced with no children. ...";
    c.output = "Drug - Method: IV";
    return c;
}

inline GoldenCase eac_case() {
    GoldenCase c;
    c.name = "eac";
    auto& i = c.instance;
    i.id = "golden-eac";
    i.dataset = "golden";
    i.task = mednlu::TaskKind::EAC;
    i.source_text = "Denies any IV drug use or any recreational drug use.";
    i.context_before = {"Currently admits to five drinks of alcohol per week."};
    i.context_after = {"Divorced with no children."};
    i.trigger = mention("IV drug use", "Drug");
    i.question = "Status time";
    i.choices = letters({"none", "past", "future", "current"});
    i.gold = std::vector<std::string>{"A"};
    c.input =
        "According to the medical text, what is the Status time attribute of the Drug event "
        "`IV drug use' in the medical text below? Choose from the following options.\n\n"
        "Medical text: ... Currently admits to five drinks of alcohol per week. Denies any IV "
        "drug use or any recreational drug use. Divorced with no children. ...\n\n"
        "Options: (A) none (B) past (C) future (D) current";
    c.output = "Drug - Status time: (A) none";
    return c;
}

inline GoldenCase dc_case() {
    GoldenCase c;
    c.name = "dc";
    auto& i = c.instance;
    i.id = "golden-dc";
    i.dataset = "golden";
    i.task = mednlu::TaskKind::DC;
    i.question = "reason to stop the study";
    i.source_text =
        "13 of 15 patients recruited.Study patients responded with no safety signals. "
        "Recruitment's slow, timely end of study necessary to keep development timelines.";
    i.choices = letters(
        {
            "Insufficient enrollment", "Logistics resources", "Business administrative",
            "Insufficient data", "Endpoint met", "Negative", "Study success", "Regulatory",
            "Interim analysis", "Ethical reason", "Invalid reason", "Study design", "No context",
            "Another study", "Covid19",
        },
        true);
    i.gold = std::vector<std::string>{"A", "C"};
    c.input =
        "According to the medical text below, which options best describe reason to stop the "
        "study? Choose from the following options. Multiple options can be true.\n\n"
        "Medical text: 13 of 15 patients recruited.Study patients responded with no safety "
        "signals. Recruitment's slow, timely end of study necessary to keep development "
        "timelines.\n\n"
        "Options: (A) Insufficient enrollment (B) Logistics resources (C) Business "
        "administrative (D) Insufficient data (E) Endpoint met (F) Negative (G) Study success "
        "(H) Regulatory (I) Interim analysis (J) Ethical reason (K) Invalid reason (L) Study "
        "design (M) No context (N) Another study (O) Covid19";
    c.output = "(A) Insufficient enrollment (C) Business administrative";
    return c;
}

inline GoldenCase re_case() {
    GoldenCase c;
    c.name = "re";
    auto& i = c.instance;
    i.id = "golden-re";
    i.dataset = "golden";
    i.task = mednlu::TaskKind::RE;
    i.source_text =
        "History of Present Illness: Mr. Andersen is a 71-year-old male with worsening anginal "
        "symptoms who underwent catheterization that showed severe three-vessel disease.";
    i.context_after = {"He is presenting for revascularization ."};
    i.entity_pair = {mention("Mr. Andersen", "Person"), mention("who", "Person")};
    i.choices = letters({"`Mr. Andersen' refers to `who'", "None of the above."});
    i.gold = std::vector<std::string>{"A"};
    c.input =
        "According to the Medical text below, what is the co-reference relationship between the "
        "Person entity `Mr. Andersen' and the Person entity `who'? Choose from the following "
        "options.\n\n"
        "Medical text: ... History of Present Illness: Mr. Andersen is a 71-year-old male with "
        "worsening anginal symptoms who underwent catheterization that showed severe "
        "three-vessel disease. He is presenting for revascularization . ...\n\n"
        "Options: (A) `Mr. Andersen' refers to `who' (B) None of the above.";
    c.output = "(A) `Mr. Andersen' refers to `who'";
    return c;
}

inline GoldenCase qa_case() {
    GoldenCase c;
    c.name = "qa";
    auto& i = c.instance;
    i.id = "golden-qa";
    i.dataset = "golden";
    i.task = mednlu::TaskKind::QA;
    i.question = "Is there a connection between sublingual varices and hypertension?";
    i.source_text =
        "BACKGROUND: Sublingual varices have earlier been related to ageing, smoking and "
        "cardiovascular disease. The aim of this study was to investigate whether sublingual "
        "varices are related to presence of ...";
    {
        mednlu::ChoiceSet cs = letters({
            "The answer is not mentioned in the text (maybe).",
            "There is a connection between sublingual varices and hypertension (yes).",
            "There is not a connection between sublingual varices and hypertension (no).",
        });
        cs.options[0].canonical = std::string("maybe");
        cs.options[1].canonical = std::string("yes");
        cs.options[2].canonical = std::string("no");
        i.choices = std::move(cs);
    }
    i.gold = std::vector<std::string>{"B"};
    c.input =
        "According to the medical literature below, Is there a connection between sublingual "
        "varices and hypertension? Choose from the following options. Only one option can be "
        "true.\n\n"
        "Medical literature: BACKGROUND: Sublingual varices have earlier been related to "
        "ageing, smoking and cardiovascular disease. The aim of this study was to investigate "
        "whether sublingual varices are related to presence of ...\n\n"
        "Options: (A) The answer is not mentioned in the text (maybe). (B) There is a "
        "connection between sublingual varices and hypertension (yes). (C) There is not a "
        "connection between sublingual varices and hypertension (no).";
    c.output = "(B) There is a connection between sublingual varices and hypertension (yes).";
    return c;
}

inline GoldenCase nli_case() {
    GoldenCase c;
    c.name = "nli";
    auto& i = c.instance;
    i.id = "golden-nli";
    i.dataset = "golden";
    i.task = mednlu::TaskKind::NLI;
    i.premise =
        "The administration of heparin with or without ACTH significantly decreased hepatic "
        "cholesterol content in catfish. In serum, heparin alone produced first "
        "hypercholesterolemia which was followed by hypocholesterolemia whereas it potentiated "
        "hypercholesterolemic action of ACTH three hours after administration.";
    i.hypothesis =
        "It is concluded that heparin inhibits the cholesterol-lowering action of ACTH in "
        "catfish.";
    i.choices = letters({"neutral", "entailment", "contradiction"});
    i.gold = std::vector<std::string>{"C"};
    c.input =
        "What is the relationship of the hypothesis with respect to the premise? Choose from "
        "the following options.\n\n"
        "Premise: The administration of heparin with or without ACTH significantly decreased "
        "hepatic cholesterol content in catfish. In serum, heparin alone produced first "
        "hypercholesterolemia which was followed by hypocholesterolemia whereas it potentiated "
        "hypercholesterolemic action of ACTH three hours after administration.\n\n"
        "Hypothesis: It is concluded that heparin inhibits the cholesterol-lowering action of "
        "ACTH in catfish.\n\n"
        "Options: (A) neutral (B) entailment (C) contradiction";
    c.output = "(C) contradiction";
    return c;
}

inline GoldenCase sts_case() {
    GoldenCase c;
    c.name = "sts";
    auto& i = c.instance;
    i.id = "golden-sts";
    i.dataset = "golden";
    i.task = mednlu::TaskKind::STS;
    i.premise = "A plane is taking off.";
    i.hypothesis = "An air plane is taking off.";
    i.gold = std::int64_t{5};
    c.input =
        "How similar are the two sentences below? Choose from the following options.\n\n"
        "Sentence 1: A plane is taking off.\n\n"
        "Sentence 2: An air plane is taking off.\n\n"
        "Options: (A) The two sentences are completely dissimilar. (B) The two sentences are "
        "not equivalent, but are on the same topic. (C) The two sentences are not equivalent, "
        "but share some details (D) The two sentences are roughly equivalent, but some "
        "important information differs / missing. (E) The two sentences are mostly equivalent, "
        "but some unimportant details differ. (F) The two sentences are completely or mostly "
        "equivalent, as they mean the same thing.";
    c.output = "(F) The two sentences are completely or mostly equivalent, as they mean the "
               "same thing.";
    return c;
}

// The six cases checked by the acceptance gate.
inline std::vector<GoldenCase> gate_cases() {
    return {ner_case(), eac_case(), dc_case(), re_case(), nli_case(), sts_case()};
}

// Everything, for broader unit coverage.
inline std::vector<GoldenCase> all_cases() {
    return {ner_case(),  eae_case(), eac_case(), dc_case(),
            re_case(),   qa_case(),  nli_case(), sts_case()};
}

} // namespace fixtures
