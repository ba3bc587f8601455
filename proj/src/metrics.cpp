#include "mednlu/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "mednlu/parse.hpp"
#include "mednlu/text.hpp"

namespace mednlu {

namespace {

bool spans_equal(const EntityMention& a, const EntityMention& b) {
    return a.char_start == b.char_start && a.char_end == b.char_end;
}

bool spans_overlap(const EntityMention& a, const EntityMention& b) {
    return std::max(*a.char_start, *b.char_start) < std::min(*a.char_end, *b.char_end);
}

} // namespace

PrfCounts entity_prf(const std::vector<EntityMention>& gold,
                     const std::vector<EntityMention>& pred, MatchMode mode) {
    for (const auto& g : gold) {
        if (!g.char_start || !g.char_end) {
            fail(Errc::MissingGoldOffsets, "gold mention '" + g.text + "' lacks offsets");
        }
    }
    std::vector<bool> taken(gold.size(), false);
    PrfCounts c;
    for (const auto& p : pred) {
        bool matched = false;
        if (p.char_start && p.char_end) {
            for (std::size_t i = 0; i < gold.size(); ++i) {
                if (taken[i] || gold[i].label != p.label) continue;
                bool hit = mode == MatchMode::Strict ? spans_equal(gold[i], p)
                                                     : spans_overlap(gold[i], p);
                if (hit) {
                    taken[i] = true;
                    matched = true;
                    break;
                }
            }
        }
        matched ? ++c.tp : ++c.fp;
    }
    for (bool t : taken) {
        if (!t) ++c.fn;
    }
    return c;
}

PrfCounts token_prf(const std::vector<EntityMention>& gold,
                    const std::vector<EntityMention>& pred, const std::string& source_text) {
    // Whitespace tokens with their code-point spans.
    std::vector<std::pair<std::int64_t, std::int64_t>> tokens;
    {
        std::int64_t cp = 0, tok_start = -1;
        std::size_t i = 0;
        while (i <= source_text.size()) {
            bool at_end = i == source_text.size();
            bool space = at_end || text::is_ascii_space(source_text[i]);
            if (space) {
                if (tok_start >= 0) {
                    tokens.emplace_back(tok_start, cp);
                    tok_start = -1;
                }
            } else if (tok_start < 0) {
                tok_start = cp;
            }
            if (at_end) break;
            // advance one code point
            unsigned char c = static_cast<unsigned char>(source_text[i]);
            std::size_t n = 1;
            if ((c & 0xe0) == 0xc0) n = 2;
            else if ((c & 0xf0) == 0xe0) n = 3;
            else if ((c & 0xf8) == 0xf0) n = 4;
            if (i + n > source_text.size()) n = 1;
            i += n;
            ++cp;
        }
    }

    auto pairs_of = [&tokens](const std::vector<EntityMention>& ms, bool gold_side,
                              std::uint64_t* extra_fp) {
        std::set<std::pair<std::size_t, std::string>> out;
        for (const auto& m : ms) {
            if (!m.char_start || !m.char_end) {
                if (gold_side) {
                    fail(Errc::MissingGoldOffsets, "gold mention '" + m.text + "' lacks offsets");
                }
                *extra_fp += text::word_count(m.text);
                continue;
            }
            for (std::size_t t = 0; t < tokens.size(); ++t) {
                if (std::max(tokens[t].first, *m.char_start) <
                    std::min(tokens[t].second, *m.char_end)) {
                    out.emplace(t, m.label);
                }
            }
        }
        return out;
    };

    std::uint64_t unaligned_fp = 0;
    auto gset = pairs_of(gold, true, nullptr);
    auto pset = pairs_of(pred, false, &unaligned_fp);

    PrfCounts c;
    for (const auto& p : pset) {
        gset.count(p) ? ++c.tp : ++c.fp;
    }
    c.fp += unaligned_fp;
    c.fn = static_cast<std::uint64_t>(gset.size()) - c.tp;
    return c;
}

double accuracy(const std::vector<ChoiceOutcome>& outcomes) {
    if (outcomes.empty()) fail(Errc::EmptyInput, "no outcomes to score");
    std::size_t correct = 0;
    for (const auto& o : outcomes) {
        std::set<std::string> g(o.gold.begin(), o.gold.end());
        std::set<std::string> p(o.pred.begin(), o.pred.end());
        if (g == p) ++correct;
    }
    return double(correct) / double(outcomes.size());
}

PrfCounts classification_prf(const std::vector<ChoiceOutcome>& outcomes) {
    if (outcomes.empty()) fail(Errc::EmptyInput, "no outcomes to score");
    PrfCounts c;
    for (const auto& o : outcomes) {
        std::set<std::string> g(o.gold.begin(), o.gold.end());
        std::set<std::string> p(o.pred.begin(), o.pred.end());
        for (const auto& x : p) {
            g.count(x) ? ++c.tp : ++c.fp;
        }
        for (const auto& x : g) {
            if (!p.count(x)) ++c.fn;
        }
    }
    return c;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        fail(Errc::LengthMismatch,
             std::to_string(x.size()) + " vs " + std::to_string(y.size()) + " points");
    }
    if (x.size() < 2) fail(Errc::TooFewPoints, "need at least 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) fail(Errc::ZeroVariance, "constant input series");
    return sxy / std::sqrt(sxx * syy);
}

ojson to_json(const EvalReport& r) {
    ojson j;
    j["dataset"] = r.dataset;
    j["task"] = std::string(task_name(r.task));
    j["metric"] = r.metric;
    j["value"] = r.value;
    j["n_instances"] = r.n_instances;
    j["n_unscoreable"] = r.n_unscoreable;
    if (!r.extra.is_null() && !r.extra.empty()) j["extra"] = r.extra;
    return j;
}

EvalReport eval_report_from_json(const ojson& j) {
    if (!j.is_object()) fail(Errc::SchemaMismatch, "report must be a JSON object");
    EvalReport r;
    for (const char* key : {"dataset", "task", "metric"}) {
        if (!j.contains(key) || !j[key].is_string()) {
            fail(Errc::SchemaMismatch, std::string("report needs string '") + key + "'");
        }
    }
    r.dataset = j["dataset"].get<std::string>();
    r.task = task_from_name(j["task"].get<std::string>());
    r.metric = j["metric"].get<std::string>();
    if (!j.contains("value") || !j["value"].is_number()) {
        fail(Errc::SchemaMismatch, "report needs numeric 'value'");
    }
    r.value = j["value"].get<double>();
    if (j.contains("n_instances")) r.n_instances = j["n_instances"].get<std::uint64_t>();
    if (j.contains("n_unscoreable")) r.n_unscoreable = j["n_unscoreable"].get<std::uint64_t>();
    if (j.contains("extra")) r.extra = j["extra"];
    return r;
}

std::string_view headline_metric(TaskKind t) {
    switch (output_category(t)) {
        case OutputCategory::TokenClassification: return "entity_f1_strict";
        case OutputCategory::SequenceClassification:
            return (t == TaskKind::NLI || t == TaskKind::QA) ? "accuracy" : "micro_f1";
        case OutputCategory::SequenceRegression: return "pearson";
        case OutputCategory::Generation: return "exact_match";
    }
    fail(Errc::InvalidArgument, "bad task");
}

namespace {

std::string canonical_string(const ChoiceOption& o) {
    if (const auto* s = std::get_if<std::string>(&o.canonical)) return *s;
    return std::to_string(std::get<std::int64_t>(o.canonical));
}

struct Bucket {
    TaskKind task;
    std::vector<const NluInstance*> instances;
    std::vector<const Prediction*> preds; // nullptr when missing
};

} // namespace

std::vector<EvalReport> score_predictions(const std::vector<NluInstance>& instances,
                                          const std::vector<Prediction>& predictions,
                                          const RenderOptions& opts) {
    std::unordered_map<std::string, const Prediction*> by_id;
    for (const auto& p : predictions) by_id[p.instance_id] = &p;

    std::map<std::pair<std::string, TaskKind>, Bucket> buckets;
    for (const auto& inst : instances) {
        auto& b = buckets[{inst.dataset, inst.task}];
        b.task = inst.task;
        b.instances.push_back(&inst);
        auto it = by_id.find(inst.id);
        b.preds.push_back(it == by_id.end() ? nullptr : it->second);
    }

    std::vector<EvalReport> reports;
    for (const auto& [key, b] : buckets) {
        EvalReport r;
        r.dataset = key.first;
        r.task = b.task;
        r.metric = std::string(headline_metric(b.task));
        r.n_instances = b.instances.size();
        r.extra = ojson::object();

        switch (output_category(b.task)) {
            case OutputCategory::TokenClassification: {
                PrfCounts strict, relaxed, token;
                for (std::size_t i = 0; i < b.instances.size(); ++i) {
                    const auto& inst = *b.instances[i];
                    const auto& gold = std::get<std::vector<EntityMention>>(inst.gold);
                    std::vector<EntityMention> pred;
                    if (!b.preds[i] || b.preds[i]->error || !b.preds[i]->mentions) {
                        ++r.n_unscoreable;
                    } else {
                        pred = *b.preds[i]->mentions;
                    }
                    auto s = entity_prf(gold, pred, MatchMode::Strict);
                    auto x = entity_prf(gold, pred, MatchMode::Relaxed);
                    auto t = token_prf(gold, pred, inst.source_text);
                    strict.tp += s.tp; strict.fp += s.fp; strict.fn += s.fn;
                    relaxed.tp += x.tp; relaxed.fp += x.fp; relaxed.fn += x.fn;
                    token.tp += t.tp; token.fp += t.fp; token.fn += t.fn;
                }
                r.value = strict.f1();
                r.extra["precision_strict"] = strict.precision();
                r.extra["recall_strict"] = strict.recall();
                r.extra["f1_relaxed"] = relaxed.f1();
                r.extra["precision_relaxed"] = relaxed.precision();
                r.extra["recall_relaxed"] = relaxed.recall();
                r.extra["f1_token"] = token.f1();
                break;
            }
            case OutputCategory::SequenceClassification: {
                std::vector<ChoiceOutcome> outcomes;
                for (std::size_t i = 0; i < b.instances.size(); ++i) {
                    const auto& inst = *b.instances[i];
                    ChoiceOutcome o;
                    for (const auto& l : std::get<std::vector<std::string>>(inst.gold)) {
                        o.gold.push_back(canonical_string(*inst.choices->find(l)));
                    }
                    const Prediction* p = b.preds[i];
                    if (!p || p->error || !p->letters) {
                        ++r.n_unscoreable;
                    } else {
                        // Letters refer to the choice set the prompt showed;
                        // re-derive it to translate back to canonical values.
                        auto eff = render_instance_ex(inst, opts).effective_choices;
                        const ChoiceSet& cs = eff ? *eff : *inst.choices;
                        for (const auto& l : *p->letters) {
                            const ChoiceOption* opt = cs.find(l);
                            if (opt) o.pred.push_back(canonical_string(*opt));
                        }
                    }
                    outcomes.push_back(std::move(o));
                }
                auto prf = classification_prf(outcomes);
                double acc = accuracy(outcomes);
                r.value = r.metric == "accuracy" ? acc : prf.f1();
                r.extra["accuracy"] = acc;
                r.extra["micro_f1"] = prf.f1();
                r.extra["precision"] = prf.precision();
                r.extra["recall"] = prf.recall();
                break;
            }
            case OutputCategory::SequenceRegression: {
                std::vector<double> gold_scores, pred_scores;
                for (std::size_t i = 0; i < b.instances.size(); ++i) {
                    const Prediction* p = b.preds[i];
                    if (!p || p->error || !p->score) {
                        ++r.n_unscoreable;
                        continue;
                    }
                    gold_scores.push_back(
                        static_cast<double>(std::get<std::int64_t>(b.instances[i]->gold)));
                    pred_scores.push_back(static_cast<double>(*p->score));
                }
                r.extra["n_pairs"] = gold_scores.size();
                try {
                    r.value = pearson(gold_scores, pred_scores);
                } catch (const NluError& e) {
                    r.value = 0.0;
                    r.extra["note"] = std::string(errc_name(e.code()));
                }
                break;
            }
            case OutputCategory::Generation: {
                std::size_t correct = 0;
                for (std::size_t i = 0; i < b.instances.size(); ++i) {
                    const Prediction* p = b.preds[i];
                    if (!p || p->error || !p->text) {
                        ++r.n_unscoreable;
                        continue;
                    }
                    const auto& gold = std::get<std::string>(b.instances[i]->gold);
                    if (text::trim(*p->text) == text::trim(gold)) ++correct;
                }
                r.value = b.instances.empty() ? 0.0 : double(correct) / double(b.instances.size());
                break;
            }
        }
        reports.push_back(std::move(r));
    }
    return reports;
}

ojson aggregate_benchmark(const std::vector<EvalReport>& reports,
                          const std::map<std::string, std::vector<std::string>>& groups) {
    std::map<std::string, const EvalReport*> by_dataset;
    for (const auto& r : reports) {
        if (!by_dataset.emplace(r.dataset, &r).second) {
            fail(Errc::DuplicateDataset, "dataset '" + r.dataset + "' reported twice");
        }
    }
    ojson out = ojson::object();
    for (const auto& [group, members] : groups) {
        double sum = 0.0;
        std::size_t n = 0;
        std::map<std::string, std::pair<double, std::size_t>> per_task;
        std::vector<std::string> missing;
        for (const auto& ds : members) {
            auto it = by_dataset.find(ds);
            if (it == by_dataset.end()) {
                missing.push_back(ds);
                continue;
            }
            sum += it->second->value;
            ++n;
            auto& pt = per_task[std::string(task_name(it->second->task))];
            pt.first += it->second->value;
            ++pt.second;
        }
        ojson g;
        g["n_datasets"] = n;
        g["macro_avg"] = n == 0 ? 0.0 : sum / double(n);
        ojson pt = ojson::object();
        for (const auto& [task, acc] : per_task) pt[task] = acc.first / double(acc.second);
        g["per_task"] = std::move(pt);
        if (!missing.empty()) g["missing"] = missing;
        out[group] = std::move(g);
    }
    return out;
}

std::string results_table(const std::vector<EvalReport>& reports) {
    std::size_t wds = 7, wtask = 4, wmetric = 6;
    for (const auto& r : reports) {
        wds = std::max(wds, r.dataset.size());
        wtask = std::max(wtask, task_name(r.task).size());
        wmetric = std::max(wmetric, r.metric.size());
    }
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof(buf), "%-*s  %-*s  %-*s  %10s  %12s  %8s\n", int(wds), "dataset",
                  int(wtask), "task", int(wmetric), "metric", "instances", "unscoreable", "value");
    out += buf;
    out += std::string(wds + wtask + wmetric + 10 + 12 + 8 + 10, '-') + "\n";
    std::map<std::string, std::pair<double, std::size_t>> per_task;
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof(buf), "%-*s  %-*s  %-*s  %10llu  %12llu  %8.4f\n", int(wds),
                      r.dataset.c_str(), int(wtask), std::string(task_name(r.task)).c_str(),
                      int(wmetric), r.metric.c_str(),
                      static_cast<unsigned long long>(r.n_instances),
                      static_cast<unsigned long long>(r.n_unscoreable), r.value);
        out += buf;
        auto& pt = per_task[std::string(task_name(r.task))];
        pt.first += r.value;
        ++pt.second;
    }
    if (!per_task.empty()) {
        out += "\n";
        for (const auto& [task, acc] : per_task) {
            std::snprintf(buf, sizeof(buf), "macro %-*s  %8.4f  (%zu datasets)\n", int(wtask),
                          task.c_str(), acc.first / double(acc.second), acc.second);
            out += buf;
        }
    }
    return out;
}

} // namespace mednlu
