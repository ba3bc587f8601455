#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "mednlu/prompt.hpp"
#include "mednlu/rng.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace mednlu;

TEST_CASE("golden cases render to the reference text") {
    for (const auto& c : fixtures::all_cases()) {
        CAPTURE(c.name);
        auto pair = render_instance(c.instance);
        CHECK(fixtures::content_lines(pair.input) == fixtures::content_lines(c.input));
        CHECK(fixtures::content_lines(pair.output) == fixtures::content_lines(c.output));
    }
}

TEST_CASE("rendering is deterministic") {
    for (auto task : testgen::all_tasks()) {
        auto inst = testgen::make_instance(task, 99);
        RenderOptions opts;
        opts.global_seed = 7;
        opts.shuffle_choices = true;
        auto a = render_instance(inst, opts);
        auto b = render_instance(inst, opts);
        CHECK(a.input == b.input);
        CHECK(a.output == b.output);
    }
}

TEST_CASE("context sentences are joined with ellipses on both sides") {
    auto inst = fixtures::eae_case().instance;
    inst.context_before.clear();
    auto pair = render_instance(inst);
    CHECK(pair.input.find("Medical text: ... Denies any IV drug use") != std::string::npos);
    CHECK(pair.input.find("children. ...") != std::string::npos);

    inst.context_after.clear();
    pair = render_instance(inst);
    CHECK(pair.input.find("Medical text: Denies any IV drug use") != std::string::npos);
}

TEST_CASE("token output lists every label in set order") {
    auto c = fixtures::ner_case();
    auto pair = render_instance(c.instance);
    auto lines = fixtures::content_lines(pair.output);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0].rfind("Living status:", 0) == 0);
    CHECK(lines[4].rfind("Alcohol:", 0) == 0);
}

TEST_CASE("shuffle_choice_order permutes letters but keeps descriptions attached") {
    rng::SplitMix g(4);
    auto cs = testgen::choice_set(g, 6, false);
    auto shuffled = shuffle_choice_order(cs, 123);
    REQUIRE(shuffled.set.options.size() == 6);
    std::set<std::string> before, after;
    for (const auto& o : cs.options) before.insert(o.description);
    for (const auto& o : shuffled.set.options) after.insert(o.description);
    CHECK(before == after);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(shuffled.set.options[i].letter == letter_for_index(i));
        CHECK(shuffled.set.options[i].description == cs.options[shuffled.source_index[i]].description);
    }
    auto again = shuffle_choice_order(cs, 123);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(again.set.options[i].description == shuffled.set.options[i].description);
    }
}

TEST_CASE("shuffled render keeps the gold description under new letters") {
    auto c = fixtures::nli_case();
    RenderOptions opts;
    opts.shuffle_choices = true;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        opts.global_seed = seed;
        auto r = render_instance_ex(c.instance, opts);
        REQUIRE(r.gold_letters.size() == 1);
        const auto* opt = r.effective_choices->find(r.gold_letters[0]);
        REQUIRE(opt != nullptr);
        CHECK(opt->description == "contradiction");
        CHECK(r.pair.output == "(" + opt->letter + ") contradiction");
    }
}

TEST_CASE("similarity scale is never shuffled") {
    auto c = fixtures::sts_case();
    RenderOptions opts;
    opts.shuffle_choices = true;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        opts.global_seed = seed;
        auto r = render_instance_ex(c.instance, opts);
        REQUIRE(r.effective_choices.has_value());
        for (std::size_t i = 0; i < r.effective_choices->options.size(); ++i) {
            CHECK(std::get<std::int64_t>(r.effective_choices->options[i].canonical) ==
                  static_cast<std::int64_t>(i));
        }
    }
}

TEST_CASE("negative sampling keeps gold and draws from the rest") {
    std::vector<std::string> pool = {"a", "b", "c", "d", "e", "f", "g"};
    auto kept = sample_negative_categories({"c"}, pool, 3, 42);
    REQUIRE(kept.size() == 4);
    CHECK(std::find(kept.begin(), kept.end(), "c") != kept.end());
    // pool order is preserved
    for (std::size_t i = 1; i < kept.size(); ++i) {
        auto a = std::find(pool.begin(), pool.end(), kept[i - 1]);
        auto b = std::find(pool.begin(), pool.end(), kept[i]);
        CHECK(a < b);
    }
    CHECK(sample_negative_categories({"c"}, pool, 3, 42) == kept);

    CHECK_THROWS_AS(sample_negative_categories({"c"}, pool, 7, 0), NluError);
    CHECK_THROWS_AS(sample_negative_categories({"z"}, pool, 2, 0), NluError);
    std::vector<std::string> dup = {"a", "a", "b"};
    CHECK_THROWS_AS(sample_negative_categories({"a"}, dup, 1, 0), NluError);
}

TEST_CASE("negative_count trims rendered choice sets to gold plus n") {
    auto inst = testgen::make_instance(TaskKind::DC, 5);
    // make enough options to cut down
    rng::SplitMix g(17);
    inst.choices = testgen::choice_set(g, 9, true);
    inst.gold = testgen::pick_letters(g, *inst.choices, 2);
    RenderOptions opts;
    opts.negative_count = 3;
    auto r = render_instance_ex(inst, opts);
    REQUIRE(r.effective_choices.has_value());
    CHECK(r.effective_choices->options.size() == 5);
    CHECK(r.gold_letters.size() == 2);
    for (const auto& l : r.gold_letters) CHECK(r.effective_choices->find(l) != nullptr);
}

TEST_CASE("span separator collisions are rejected at render time") {
    auto c = fixtures::ner_case();
    auto bad = c.instance;
    auto& ms = std::get<std::vector<EntityMention>>(bad.gold);
    ms[0].text = "IV drug use ... more";
    ms[0].char_start.reset();
    ms[0].char_end.reset();
    CHECK_THROWS_AS(render_instance(bad), NluError);

    bad = c.instance;
    auto& ms2 = std::get<std::vector<EntityMention>>(bad.gold);
    ms2[0].text = "None";
    ms2[0].char_start.reset();
    ms2[0].char_end.reset();
    CHECK_THROWS_AS(render_instance(bad), NluError);
}

TEST_CASE("label with separator characters is rejected") {
    auto c = fixtures::ner_case();
    auto inst = c.instance;
    inst.label_set.push_back("Bad: label");
    CHECK_THROWS_AS(render_instance(inst), NluError);
}

TEST_CASE("description containing an option marker is rejected") {
    auto c = fixtures::nli_case();
    auto inst = c.instance;
    inst.choices->options[1].description = "entails (A) something";
    CHECK_THROWS_AS(render_instance(inst), NluError);
}

TEST_CASE("sts renders with the default scale when no choices given") {
    auto c = fixtures::sts_case();
    REQUIRE(!c.instance.choices.has_value());
    auto r = render_instance_ex(c.instance);
    REQUIRE(r.effective_choices.has_value());
    CHECK(r.effective_choices->options.size() == 6);
    CHECK(r.gold_letters == std::vector<std::string>{"F"});
}

TEST_CASE("template override substitutes the placeholders") {
    auto inst = testgen::make_instance(TaskKind::Summarization, 1);
    inst.template_override = "Shorten this: {text}";
    auto pair = render_instance(inst);
    CHECK(pair.input == "Shorten this: " + inst.source_text);

    auto tok = testgen::make_instance(TaskKind::NER, 2);
    tok.template_override = "Find {labels} in the text.";
    auto tp = render_instance(tok);
    CHECK(tp.input.find("Find Problem, Treatment, Test in the text.") == 0);
}

TEST_CASE("expand_label_name expands known shorthands and passes others") {
    CHECK(expand_label_name("GENERIF") ==
          "Gene reference into a function (function of a gene)");
    CHECK(expand_label_name("Drug") == "Drug");
}

TEST_CASE("empty gold letters cannot render an output line") {
    auto inst = testgen::make_instance(TaskKind::DC, 8);
    inst.gold = std::vector<std::string>{};
    CHECK_THROWS_AS(render_instance(inst), NluError);
}

TEST_CASE("fewshot preamble text is fixed") {
    CHECK(ner_fewshot_preamble() ==
          "Your answer should use the following format, with one entity type per line. The span "
          "refers to the original text span from the Medical text. Output None if there is no "
          "such span. Use `...' to separate multiple spans.");
}

TEST_CASE("multi select output joins options in effective order") {
    auto c = fixtures::dc_case();
    auto pair = render_instance(c.instance);
    CHECK(pair.output == "(A) Insufficient enrollment (C) Business administrative");
}
