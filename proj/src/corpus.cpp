#include "mednlu/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "mednlu/rng.hpp"
#include "mednlu/text.hpp"

namespace fs = std::filesystem;

namespace mednlu {

std::string_view format_name(DatasetFormat f) {
    switch (f) {
        case DatasetFormat::ConllBio: return "conll_bio";
        case DatasetFormat::BratStandoff: return "brat_standoff";
        case DatasetFormat::JsonlNative: return "jsonl";
    }
    fail(Errc::InvalidArgument, "bad DatasetFormat");
}

DatasetFormat format_from_name(std::string_view s) {
    std::string low = text::lower(s);
    if (low == "conll_bio" || low == "conll") return DatasetFormat::ConllBio;
    if (low == "brat_standoff" || low == "brat") return DatasetFormat::BratStandoff;
    if (low == "jsonl" || low == "jsonl_native") return DatasetFormat::JsonlNative;
    fail(Errc::SchemaMismatch, "unknown dataset format '" + std::string(s) + "'");
}

std::string_view domain_name(Domain d) {
    switch (d) {
        case Domain::Biomedical: return "biomedical";
        case Domain::Clinical: return "clinical";
        case Domain::General: return "general";
    }
    fail(Errc::InvalidArgument, "bad Domain");
}

Domain domain_from_name(std::string_view s) {
    std::string low = text::lower(s);
    if (low == "biomedical") return Domain::Biomedical;
    if (low == "clinical") return Domain::Clinical;
    if (low == "general") return Domain::General;
    fail(Errc::SchemaMismatch, "unknown domain '" + std::string(s) + "'");
}

// --- conll ------------------------------------------------------------------

namespace {

struct BioToken {
    std::string token;
    std::string tag; // "O", "B-X", "I-X"
};

struct BioSentence {
    std::vector<BioToken> tokens;
    std::size_t first_line = 0;
};

std::vector<BioSentence> read_bio_sentences(std::istream& in) {
    std::vector<BioSentence> sentences;
    BioSentence cur;
    std::string line;
    std::size_t line_no = 0;
    auto flush = [&]() {
        if (!cur.tokens.empty()) sentences.push_back(std::move(cur));
        cur = BioSentence{};
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) {
            flush();
            continue;
        }
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size() ||
            line.find('\t', tab + 1) != std::string::npos) {
            fail(Errc::MalformedRecord,
                 "line " + std::to_string(line_no) + ": expected 'token<TAB>tag'");
        }
        BioToken t{line.substr(0, tab), line.substr(tab + 1)};
        if (t.tag != "O" && t.tag.rfind("B-", 0) != 0 && t.tag.rfind("I-", 0) != 0) {
            fail(Errc::MalformedRecord,
                 "line " + std::to_string(line_no) + ": bad tag '" + t.tag + "'");
        }
        if (t.tag.size() == 2 && t.tag != "O") {
            fail(Errc::MalformedRecord, "line " + std::to_string(line_no) + ": empty tag type");
        }
        if (cur.tokens.empty()) cur.first_line = line_no;
        cur.tokens.push_back(std::move(t));
    }
    flush();
    return sentences;
}

} // namespace

IngestResult ingest_conll_bio(std::istream& in, const DatasetDescriptor& desc) {
    IngestResult res;
    auto sentences = read_bio_sentences(in);
    res.records_read = sentences.size();

    // Full label inventory, in first-appearance order across the file.
    std::vector<std::string> label_set;
    std::set<std::string> seen;
    for (const auto& s : sentences) {
        for (const auto& t : s.tokens) {
            if (t.tag == "O") continue;
            std::string label = t.tag.substr(2);
            if (seen.insert(label).second) label_set.push_back(label);
        }
    }

    for (std::size_t si = 0; si < sentences.size(); ++si) {
        const auto& s = sentences[si];
        NluInstance inst;
        inst.id = desc.name + "-" + desc.split + "-" + std::to_string(si);
        inst.dataset = desc.name;
        inst.task = desc.task;
        inst.label_set = label_set;

        std::vector<std::size_t> starts(s.tokens.size()); // code points into joined text
        std::string joined;
        std::size_t cp = 0;
        for (std::size_t i = 0; i < s.tokens.size(); ++i) {
            if (i) {
                joined += ' ';
                ++cp;
            }
            starts[i] = cp;
            joined += s.tokens[i].token;
            cp += text::cp_length(s.tokens[i].token);
        }
        inst.source_text = joined;

        std::vector<EntityMention> mentions;
        std::size_t i = 0;
        while (i < s.tokens.size()) {
            if (s.tokens[i].tag.rfind("B-", 0) == 0 || s.tokens[i].tag.rfind("I-", 0) == 0) {
                // An I- without a preceding mention opens one (common in
                // loosely-tagged corpora).
                std::string label = s.tokens[i].tag.substr(2);
                std::size_t j = i + 1;
                while (j < s.tokens.size() && s.tokens[j].tag == "I-" + label) ++j;
                EntityMention m;
                m.label = label;
                m.char_start = static_cast<std::int64_t>(starts[i]);
                std::vector<std::string> toks;
                for (std::size_t k = i; k < j; ++k) toks.push_back(s.tokens[k].token);
                m.text = text::join(toks, " ");
                m.char_end = *m.char_start + static_cast<std::int64_t>(text::cp_length(m.text));
                mentions.push_back(std::move(m));
                i = j;
            } else {
                ++i;
            }
        }
        inst.gold = std::move(mentions);
        res.instances.push_back(std::move(inst));
    }
    return res;
}

// --- brat -------------------------------------------------------------------

IngestResult ingest_brat_standoff(const std::string& doc_text, const std::string& ann_text,
                                  const std::string& doc_id, const DatasetDescriptor& desc) {
    IngestResult res;
    res.records_read = 1;

    std::vector<EntityMention> mentions;
    std::vector<std::string> label_order;
    std::set<std::string> seen_labels;
    std::size_t line_no = 0;
    for (const auto& line : text::split_lines(ann_text)) {
        ++line_no;
        std::string_view sv = text::trim(line);
        if (sv.empty()) continue;
        if (sv[0] != 'T') continue; // only text-bound annotations carry spans
        // T<id> \t <Label> <start> <end> \t <text>
        auto tab1 = sv.find('\t');
        auto tab2 = tab1 == std::string_view::npos ? std::string_view::npos
                                                   : sv.find('\t', tab1 + 1);
        if (tab1 == std::string_view::npos || tab2 == std::string_view::npos) {
            fail(Errc::MalformedRecord, doc_id + ".ann line " + std::to_string(line_no) +
                                            ": expected three tab-separated fields");
        }
        std::string_view mid = sv.substr(tab1 + 1, tab2 - tab1 - 1);
        std::string_view surface = sv.substr(tab2 + 1);
        if (mid.find(';') != std::string_view::npos) {
            res.warnings.push_back(doc_id + ".ann line " + std::to_string(line_no) +
                                   ": discontinuous span skipped");
            continue;
        }
        std::istringstream fields{std::string(mid)};
        std::string label;
        long long start = -1, end = -1;
        if (!(fields >> label >> start >> end) || start < 0 || end <= start) {
            fail(Errc::MalformedRecord,
                 doc_id + ".ann line " + std::to_string(line_no) + ": bad label/offsets");
        }
        std::string slice;
        if (static_cast<std::size_t>(end) <= text::cp_length(doc_text)) {
            slice = text::cp_slice(doc_text, static_cast<std::size_t>(start),
                                   static_cast<std::size_t>(end));
        }
        if (slice != surface) {
            fail(Errc::MalformedRecord, doc_id + ".ann line " + std::to_string(line_no) +
                                            ": span text '" + std::string(surface) +
                                            "' does not match document slice '" + slice + "'");
        }
        EntityMention m;
        m.text = std::string(surface);
        m.label = label;
        m.char_start = start;
        m.char_end = end;
        mentions.push_back(std::move(m));
        if (seen_labels.insert(label).second) label_order.push_back(label);
    }

    std::sort(mentions.begin(), mentions.end(), [](const EntityMention& a, const EntityMention& b) {
        return std::tie(*a.char_start, *a.char_end) < std::tie(*b.char_start, *b.char_end);
    });

    if (!desc.sentence_split) {
        NluInstance inst;
        inst.id = doc_id;
        inst.dataset = desc.name;
        inst.task = desc.task;
        inst.source_text = doc_text;
        inst.label_set = label_order;
        inst.gold = std::move(mentions);
        res.instances.push_back(std::move(inst));
        return res;
    }

    auto sentences = split_sentences(doc_text);
    for (std::size_t si = 0; si < sentences.size(); ++si) {
        const auto& sent = sentences[si];
        NluInstance inst;
        inst.id = doc_id + "#s" + std::to_string(si);
        inst.dataset = desc.name;
        inst.task = desc.task;
        inst.source_text = sent.text;
        inst.label_set = label_order;
        std::vector<EntityMention> local;
        for (const auto& m : mentions) {
            auto s = static_cast<std::size_t>(*m.char_start);
            auto e = static_cast<std::size_t>(*m.char_end);
            if (s >= sent.char_start && e <= sent.char_end) {
                EntityMention lm = m;
                lm.char_start = static_cast<std::int64_t>(s - sent.char_start);
                lm.char_end = static_cast<std::int64_t>(e - sent.char_start);
                local.push_back(std::move(lm));
            } else if (std::max(s, sent.char_start) < std::min(e, sent.char_end)) {
                res.warnings.push_back(doc_id + ": mention '" + m.text +
                                       "' crosses a sentence boundary, dropped");
            }
        }
        inst.gold = std::move(local);
        res.instances.push_back(std::move(inst));
    }
    return res;
}

// --- jsonl ------------------------------------------------------------------

IngestResult ingest_jsonl(std::istream& in, const DatasetDescriptor& desc) {
    IngestResult res;
    res.instances = read_instances(in);
    res.records_read = res.instances.size();
    for (auto& inst : res.instances) {
        if (inst.dataset.empty() || inst.dataset != desc.name) inst.dataset = desc.name;
    }
    return res;
}

IngestResult ingest(const DatasetDescriptor& desc) {
    switch (desc.format) {
        case DatasetFormat::ConllBio: {
            std::ifstream f(desc.path);
            if (!f) fail(Errc::EmptyInput, "cannot open '" + desc.path + "'");
            return ingest_conll_bio(f, desc);
        }
        case DatasetFormat::JsonlNative: {
            std::ifstream f(desc.path);
            if (!f) fail(Errc::EmptyInput, "cannot open '" + desc.path + "'");
            return ingest_jsonl(f, desc);
        }
        case DatasetFormat::BratStandoff: {
            std::vector<fs::path> txt_files;
            fs::path p(desc.path);
            if (fs::is_directory(p)) {
                for (const auto& e : fs::directory_iterator(p)) {
                    if (e.path().extension() == ".txt") txt_files.push_back(e.path());
                }
                std::sort(txt_files.begin(), txt_files.end());
            } else {
                txt_files.push_back(p);
            }
            if (txt_files.empty()) fail(Errc::EmptyInput, "no .txt documents in '" + desc.path + "'");
            IngestResult all;
            for (const auto& txt : txt_files) {
                fs::path ann = txt;
                ann.replace_extension(".ann");
                std::ifstream tf(txt), af(ann);
                if (!tf) fail(Errc::EmptyInput, "cannot open '" + txt.string() + "'");
                if (!af) fail(Errc::EmptyInput, "cannot open '" + ann.string() + "'");
                std::stringstream tbuf, abuf;
                tbuf << tf.rdbuf();
                abuf << af.rdbuf();
                auto one = ingest_brat_standoff(tbuf.str(), abuf.str(), txt.stem().string(), desc);
                all.records_read += one.records_read;
                std::move(one.instances.begin(), one.instances.end(),
                          std::back_inserter(all.instances));
                std::move(one.warnings.begin(), one.warnings.end(),
                          std::back_inserter(all.warnings));
            }
            return all;
        }
    }
    fail(Errc::InvalidArgument, "bad DatasetFormat");
}

// --- sentence splitting -------------------------------------------------------

namespace {

const std::set<std::string>& abbreviation_guard() {
    static const std::set<std::string> kGuard = {
        "dr", "mr", "mrs", "ms", "prof", "vs", "e.g", "i.e", "etc",
        "fig", "st", "no", "al", "a.m", "p.m",
    };
    return kGuard;
}

bool is_upper_or_digit(char c) { return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }

} // namespace

std::vector<SentenceSpan> split_sentences(const std::string& doc) {
    std::vector<SentenceSpan> out;

    std::vector<std::size_t> boundaries; // code-point index right after the terminator
    {
        std::size_t i = 0, cp = 0;
        while (i < doc.size()) {
            char c = doc[i];
            std::size_t n = 1;
            unsigned char uc = static_cast<unsigned char>(c);
            if ((uc & 0xe0) == 0xc0) n = 2;
            else if ((uc & 0xf0) == 0xe0) n = 3;
            else if ((uc & 0xf8) == 0xf0) n = 4;
            if (i + n > doc.size()) n = 1;

            if ((c == '.' || c == '?' || c == '!') && n == 1) {
                // Require whitespace then an uppercase letter or digit.
                std::size_t j = i + 1;
                bool ws = false;
                while (j < doc.size() && text::is_ascii_space(doc[j])) {
                    ws = true;
                    ++j;
                }
                bool opens_sentence = ws && j < doc.size() && is_upper_or_digit(doc[j]);
                bool guarded = false;
                if (c == '.' && opens_sentence) {
                    // Token immediately before the period, lowercased,
                    // leading punctuation stripped.
                    std::size_t b = i;
                    while (b > 0 && !text::is_ascii_space(doc[b - 1])) --b;
                    std::string tok = text::lower(doc.substr(b, i - b));
                    std::size_t lead = 0;
                    while (lead < tok.size() && !(std::isalnum(static_cast<unsigned char>(tok[lead])))) {
                        ++lead;
                    }
                    tok = tok.substr(lead);
                    bool single_alpha = tok.size() == 1 && tok[0] >= 'a' && tok[0] <= 'z';
                    guarded = single_alpha || abbreviation_guard().count(tok) > 0;
                }
                if (opens_sentence && !guarded) boundaries.push_back(cp + 1);
            }
            i += n;
            ++cp;
        }
    }

    const std::size_t total_cp = text::cp_length(doc);
    std::size_t seg_start = 0;
    auto emit = [&](std::size_t lo, std::size_t hi) {
        // Trim whitespace off both ends, in code points.
        std::string seg = text::cp_slice(doc, lo, hi);
        std::string_view t = text::trim(seg);
        if (t.empty()) return;
        std::size_t lead = text::cp_length(
            std::string_view(seg.data(), static_cast<std::size_t>(t.data() - seg.data())));
        std::size_t body = text::cp_length(t);
        SentenceSpan s;
        s.text = std::string(t);
        s.char_start = lo + lead;
        s.char_end = lo + lead + body;
        out.push_back(std::move(s));
    };
    for (std::size_t b : boundaries) {
        emit(seg_start, b);
        seg_start = b;
    }
    emit(seg_start, total_cp);
    return out;
}

ContextWindow context_window(const std::vector<std::string>& sentences, std::size_t index,
                             std::size_t k) {
    if (index >= sentences.size()) {
        fail(Errc::IndexOutOfRange, "sentence index " + std::to_string(index) + " out of " +
                                        std::to_string(sentences.size()));
    }
    ContextWindow w;
    std::size_t lo = index >= k ? index - k : 0;
    for (std::size_t i = lo; i < index; ++i) w.before.push_back(sentences[i]);
    for (std::size_t i = index + 1; i < std::min(sentences.size(), index + k + 1); ++i) {
        w.after.push_back(sentences[i]);
    }
    return w;
}

bool filter_summarization(const NluInstance& inst, bool length_filter, bool ratio_filter,
                          std::size_t max_words) {
    const std::size_t in_words = text::word_count(inst.source_text);
    if (length_filter && in_words >= max_words) return false;
    if (ratio_filter) {
        const auto* summary = std::get_if<std::string>(&inst.gold);
        if (!summary) fail(Errc::SchemaMismatch, "generation gold must be a string");
        if (text::word_count(*summary) * 2 > in_words) return false;
    }
    return true;
}

// --- sampling -----------------------------------------------------------------

std::vector<NluInstance> sample_budget(const std::vector<NluInstance>& pool,
                                       const SamplingPlan& plan, SampleStats* stats) {
    if (plan.tasks.empty()) fail(Errc::InvalidArgument, "sampling plan has no tasks");
    {
        std::set<TaskKind> uniq(plan.tasks.begin(), plan.tasks.end());
        if (uniq.size() != plan.tasks.size()) {
            fail(Errc::InvalidArgument, "sampling plan lists a task twice");
        }
    }

    const std::uint64_t k = plan.tasks.size();
    const std::uint64_t base_quota = plan.total / k;
    const std::uint64_t remainder = plan.total % k;

    std::vector<NluInstance> out;
    out.reserve(plan.total);
    SampleStats local;
    SampleStats& st = stats ? *stats : local;

    for (std::size_t ti = 0; ti < plan.tasks.size(); ++ti) {
        TaskKind task = plan.tasks[ti];
        const std::uint64_t quota = base_quota + (ti < remainder ? 1 : 0);
        st.quota[std::string(task_name(task))] = quota;

        std::vector<const NluInstance*> candidates;
        for (const auto& inst : pool) {
            if (inst.task == task) candidates.push_back(&inst);
        }
        if (candidates.empty()) {
            fail(Errc::EmptyTaskPool, "no instances for task '" + std::string(task_name(task)) + "'");
        }

        rng::SplitMix g(rng::combine(plan.seed, rng::fnv1a64(task_name(task))));
        if (quota <= candidates.size()) {
            for (std::size_t idx :
                 rng::sample_without_replacement(candidates.size(), quota, g)) {
                out.push_back(*candidates[idx]);
            }
        } else {
            std::vector<std::size_t> order(candidates.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            rng::shuffle(order, g);
            for (std::size_t idx : order) out.push_back(*candidates[idx]);
            for (std::uint64_t i = candidates.size(); i < quota; ++i) {
                out.push_back(*candidates[g.next_below(candidates.size())]);
            }
            st.warnings.push_back("task " + std::string(task_name(task)) + ": pool of " +
                                  std::to_string(candidates.size()) + " short of quota " +
                                  std::to_string(quota) + ", sampled with replacement");
        }
        st.emitted[std::string(task_name(task))] = quota;
    }

    rng::SplitMix g(rng::combine(plan.seed, rng::fnv1a64("interleave")));
    rng::shuffle(out, g);
    return out;
}

// --- build --------------------------------------------------------------------

BuildResult build_corpus(const std::vector<DatasetDescriptor>& datasets,
                         const std::optional<SamplingPlan>& plan, const RenderOptions& render,
                         std::optional<Domain> domain_filter, const BuildHooks& hooks) {
    {
        std::set<std::string> names;
        for (const auto& d : datasets) {
            if (!names.insert(d.name).second) {
                fail(Errc::DuplicateDataset, "dataset '" + d.name + "' listed twice");
            }
        }
    }

    struct DatasetState {
        const DatasetDescriptor* desc;
        std::vector<NluInstance> eligible;
        std::uint64_t records_read = 0, derived = 0;
        std::uint64_t dropped_invalid = 0, dropped_filtered = 0, dropped_render = 0;
        bool skipped_domain = false, failed = false;
        std::string error;
        std::vector<std::string> warnings;
    };
    std::vector<DatasetState> states;

    for (const auto& desc : datasets) {
        DatasetState st;
        st.desc = &desc;
        if (domain_filter && desc.domain != *domain_filter) {
            st.skipped_domain = true;
            states.push_back(std::move(st));
            continue;
        }
        try {
            IngestResult ing = ingest(desc);
            st.records_read = ing.records_read;
            st.warnings = std::move(ing.warnings);

            std::vector<NluInstance> work = std::move(ing.instances);
            if (desc.summarize_inputs) {
                if (!hooks.summarizer) {
                    fail(Errc::InvalidArgument,
                         "dataset needs a summarizer hook and none is configured");
                }
                for (auto& inst : work) {
                    inst.source_text = hooks.summarizer(inst.source_text, desc.summarize_type);
                }
            }
            st.derived = work.size();

            RenderOptions opts = render;
            if (desc.negative_count) opts.negative_count = desc.negative_count;

            for (auto& inst : work) {
                if (output_category(inst.task) == OutputCategory::Generation &&
                    (desc.nlg_length_filter || desc.nlg_ratio_filter)) {
                    if (!filter_summarization(inst, desc.nlg_length_filter,
                                              desc.nlg_ratio_filter)) {
                        ++st.dropped_filtered;
                        continue;
                    }
                }
                try {
                    validate(inst);
                } catch (const NluError& e) {
                    ++st.dropped_invalid;
                    if (st.warnings.size() < 20) {
                        st.warnings.push_back("invalid instance " + inst.id + ": " + e.message());
                    }
                    continue;
                }
                try {
                    render_instance_ex(inst, opts);
                } catch (const NluError& e) {
                    ++st.dropped_render;
                    if (st.warnings.size() < 20) {
                        st.warnings.push_back("unrenderable instance " + inst.id + ": " +
                                              e.message());
                    }
                    continue;
                }
                st.eligible.push_back(std::move(inst));
            }
        } catch (const NluError& e) {
            st.failed = true;
            st.error = e.what();
        }
        states.push_back(std::move(st));
    }

    // Pool eligible instances; remember each instance's dataset options.
    std::map<std::string, RenderOptions> opts_by_dataset;
    std::vector<NluInstance> pool;
    for (auto& st : states) {
        RenderOptions opts = render;
        if (st.desc->negative_count) opts.negative_count = st.desc->negative_count;
        opts_by_dataset[st.desc->name] = opts;
        std::move(st.eligible.begin(), st.eligible.end(), std::back_inserter(pool));
        st.eligible.clear();
    }

    SampleStats sample_stats;
    std::vector<NluInstance> selected;
    if (plan) {
        selected = sample_budget(pool, *plan, &sample_stats);
    } else {
        selected = std::move(pool);
    }

    BuildResult result;
    std::map<std::string, std::uint64_t> emitted_by_dataset;
    std::map<std::string, std::uint64_t> emitted_by_task;
    for (const auto& inst : selected) {
        auto rendered = render_instance_ex(inst, opts_by_dataset.at(inst.dataset));
        result.pairs.push_back(std::move(rendered.pair));
        ++emitted_by_dataset[inst.dataset];
        ++emitted_by_task[std::string(task_name(inst.task))];
    }

    ojson manifest;
    manifest["render_seed"] = render.global_seed;
    manifest["shuffle_choices"] = render.shuffle_choices;
    if (domain_filter) manifest["domain_filter"] = std::string(domain_name(*domain_filter));
    if (plan) {
        ojson jp;
        jp["total"] = plan->total;
        jp["seed"] = plan->seed;
        ojson jt = ojson::array();
        for (TaskKind t : plan->tasks) jt.push_back(std::string(task_name(t)));
        jp["tasks"] = std::move(jt);
        manifest["plan"] = std::move(jp);
    }
    ojson jds = ojson::array();
    // Re-derive eligible counts: derived - drops.
    for (const auto& st : states) {
        ojson d;
        d["name"] = st.desc->name;
        d["task"] = std::string(task_name(st.desc->task));
        d["domain"] = std::string(domain_name(st.desc->domain));
        d["format"] = std::string(format_name(st.desc->format));
        if (st.skipped_domain) {
            d["skipped"] = "domain filter";
            jds.push_back(std::move(d));
            continue;
        }
        if (st.failed) {
            d["failed"] = true;
            d["error"] = st.error;
            jds.push_back(std::move(d));
            continue;
        }
        std::uint64_t eligible =
            st.derived - st.dropped_invalid - st.dropped_filtered - st.dropped_render;
        std::uint64_t emitted = 0;
        auto it = emitted_by_dataset.find(st.desc->name);
        if (it != emitted_by_dataset.end()) emitted = it->second;
        d["records_read"] = st.records_read;
        d["instances"] = st.derived;
        d["dropped_invalid"] = st.dropped_invalid;
        d["dropped_filtered"] = st.dropped_filtered;
        d["dropped_render"] = st.dropped_render;
        d["eligible"] = eligible;
        d["emitted"] = emitted;
        d["unsampled"] = emitted >= eligible ? 0 : eligible - emitted;
        if (emitted > eligible) d["oversampled"] = emitted - eligible;
        if (!st.warnings.empty()) d["warnings"] = st.warnings;
        jds.push_back(std::move(d));
    }
    manifest["datasets"] = std::move(jds);
    ojson jt = ojson::object();
    for (const auto& [task, n] : emitted_by_task) jt[task] = n;
    manifest["per_task_emitted"] = std::move(jt);
    if (plan) {
        ojson jq = ojson::object();
        for (const auto& [task, n] : sample_stats.quota) jq[task] = n;
        manifest["per_task_quota"] = std::move(jq);
    }
    if (!sample_stats.warnings.empty()) manifest["warnings"] = sample_stats.warnings;
    manifest["total_pairs"] = result.pairs.size();
    result.manifest = std::move(manifest);
    return result;
}

// --- plan config ----------------------------------------------------------------

namespace {

bool parse_bool(const std::string& v, std::size_t line_no) {
    std::string low = text::lower(v);
    if (low == "true" || low == "yes" || low == "1") return true;
    if (low == "false" || low == "no" || low == "0") return false;
    fail(Errc::MalformedRecord, "line " + std::to_string(line_no) + ": expected a boolean, got '" + v + "'");
}

std::uint64_t parse_u64(const std::string& v, std::size_t line_no) {
    try {
        std::size_t used = 0;
        unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        fail(Errc::MalformedRecord,
             "line " + std::to_string(line_no) + ": expected an integer, got '" + v + "'");
    }
}

} // namespace

PlanConfig parse_plan_config(std::istream& in) {
    PlanConfig cfg;
    DatasetDescriptor* cur = nullptr;
    bool plan_requested = false;
    SamplingPlan plan;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = text::trim(line);
        if (sv.empty() || sv[0] == '#') continue;
        if (sv == "[dataset]") {
            cfg.datasets.emplace_back();
            cur = &cfg.datasets.back();
            continue;
        }
        if (sv.front() == '[') {
            fail(Errc::MalformedRecord,
                 "line " + std::to_string(line_no) + ": unknown section " + std::string(sv));
        }
        auto eq = sv.find('=');
        if (eq == std::string_view::npos) {
            fail(Errc::MalformedRecord,
                 "line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        std::string key = text::lower(text::trim(sv.substr(0, eq)));
        std::string value{text::trim(sv.substr(eq + 1))};

        if (!cur) {
            if (key == "seed") {
                plan.seed = parse_u64(value, line_no);
                cfg.render.global_seed = plan.seed;
            } else if (key == "total") {
                plan.total = parse_u64(value, line_no);
                plan_requested = true;
            } else if (key == "tasks") {
                std::size_t start = 0;
                while (start <= value.size()) {
                    auto comma = value.find(',', start);
                    std::string part{text::trim(comma == std::string::npos
                                                    ? value.substr(start)
                                                    : value.substr(start, comma - start))};
                    if (!part.empty()) plan.tasks.push_back(task_from_name(part));
                    if (comma == std::string::npos) break;
                    start = comma + 1;
                }
                plan_requested = true;
            } else if (key == "shuffle_choices") {
                cfg.render.shuffle_choices = parse_bool(value, line_no);
            } else if (key == "domain_filter") {
                cfg.domain_filter = domain_from_name(value);
            } else {
                fail(Errc::MalformedRecord,
                     "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
            }
            continue;
        }

        if (key == "name") cur->name = value;
        else if (key == "task") cur->task = task_from_name(value);
        else if (key == "domain") cur->domain = domain_from_name(value);
        else if (key == "format") cur->format = format_from_name(value);
        else if (key == "path") cur->path = value;
        else if (key == "split") cur->split = value;
        else if (key == "sentence_split") cur->sentence_split = parse_bool(value, line_no);
        else if (key == "summarize_inputs") cur->summarize_inputs = parse_bool(value, line_no);
        else if (key == "summarize_type") cur->summarize_type = value;
        else if (key == "negative_count") cur->negative_count = parse_u64(value, line_no);
        else if (key == "nlg_length_filter") cur->nlg_length_filter = parse_bool(value, line_no);
        else if (key == "nlg_ratio_filter") cur->nlg_ratio_filter = parse_bool(value, line_no);
        else {
            fail(Errc::MalformedRecord,
                 "line " + std::to_string(line_no) + ": unknown dataset key '" + key + "'");
        }
    }

    for (std::size_t i = 0; i < cfg.datasets.size(); ++i) {
        if (cfg.datasets[i].name.empty()) {
            fail(Errc::MalformedRecord, "dataset block " + std::to_string(i + 1) + " has no name");
        }
        if (cfg.datasets[i].path.empty()) {
            fail(Errc::MalformedRecord, "dataset '" + cfg.datasets[i].name + "' has no path");
        }
    }

    if (plan_requested) {
        if (plan.tasks.empty()) {
            std::set<TaskKind> seen;
            for (const auto& d : cfg.datasets) {
                if (seen.insert(d.task).second) plan.tasks.push_back(d.task);
            }
        }
        cfg.plan = std::move(plan);
    }
    return cfg;
}

} // namespace mednlu
