#include "rgap/scripted.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "rgap/common.hpp"
#include "rgap/digest.hpp"

namespace rgap {

namespace {

std::vector<std::string> split_tokens(const std::string& text) {
    // Mirrors WhitespaceTokenizer boundaries: token text without its
    // whitespace tail, used to seed per-token signal synthesis.
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) tokens.push_back(text.substr(start, i - start));
    }
    return tokens;
}

std::vector<TopkEntry> synthesize_topk_row(const std::string& token, std::size_t position,
                                           int width, int vocab) {
    std::mt19937_64 rng(fnv1a64(token) ^ (0x9e3779b97f4a7c15ull * (position + 1)));
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    int k = std::min(width, vocab);
    std::vector<double> weights(k);
    double sum = 0.0;
    for (auto& w : weights) {
        w = unit(rng);
        sum += w;
    }
    std::sort(weights.begin(), weights.end(), std::greater<>());
    // Top-k mass below 1 so the rows stay a valid sub-distribution.
    double mass = 0.9;
    std::vector<TopkEntry> row(k);
    auto base_id = static_cast<std::int32_t>(rng() % static_cast<std::uint64_t>(vocab));
    for (int i = 0; i < k; ++i) {
        row[i].token_id = static_cast<std::int32_t>((base_id + i) % vocab);
        row[i].logprob = std::log(weights[i] / sum * mass);
    }
    return row;
}

std::vector<double> synthesize_prompt_logprobs(const std::string& prompt,
                                               std::optional<double> per_token_nll) {
    auto tokens = split_tokens(prompt);
    if (tokens.empty()) tokens.push_back("");
    std::vector<double> logprobs(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (per_token_nll) {
            logprobs[i] = -*per_token_nll;
        } else {
            std::mt19937_64 rng(fnv1a64(tokens[i]) ^ (0xc2b2ae3d27d4eb4full * (i + 1)));
            std::uniform_real_distribution<double> nll(0.5, 3.0);
            logprobs[i] = -nll(rng);
        }
    }
    return logprobs;
}

}  // namespace

std::string ScriptedFixture::generation_key(const std::string& sample_id, const std::string& mode,
                                            std::uint64_t seed) {
    return sample_id + "|" + mode + "|" + std::to_string(seed);
}

ScriptedFixture ScriptedFixture::from_json(const json& j) {
    ScriptedFixture f;
    f.backend_id = j.value("backend_id", f.backend_id);
    if (j.contains("capabilities"))
        f.capabilities = BackendCapabilities::from_json(j.at("capabilities"));
    f.vocab_size = j.value("vocab_size", f.vocab_size);
    if (j.contains("prompt_nll_per_token"))
        f.prompt_nll_per_token = j.at("prompt_nll_per_token").get<double>();

    auto parse_generation = [](const json& g) {
        Generation gen;
        gen.trace = g.value("trace", std::string());
        gen.response = g.value("response", std::string());
        gen.finish_reason = finish_reason_from_name(g.value("finish_reason", std::string("stop")));
        if (g.contains("topk_logprobs")) {
            std::vector<std::vector<TopkEntry>> rows;
            for (const auto& row_j : g.at("topk_logprobs")) {
                std::vector<TopkEntry> row;
                for (const auto& pair : row_j)
                    row.push_back({pair.at(0).get<std::int32_t>(), pair.at(1).get<double>()});
                rows.push_back(std::move(row));
            }
            gen.topk_rows = std::move(rows);
        }
        if (g.contains("prompt_logprobs"))
            gen.prompt_logprobs = g.at("prompt_logprobs").get<std::vector<double>>();
        if (g.contains("hidden_state"))
            gen.hidden_state = g.at("hidden_state").get<std::vector<double>>();
        if (g.contains("hidden_state_by_cutoff")) {
            for (auto it = g.at("hidden_state_by_cutoff").begin();
                 it != g.at("hidden_state_by_cutoff").end(); ++it)
                gen.hidden_state_by_cutoff[std::stoll(it.key())] =
                    it.value().get<std::vector<double>>();
        }
        return gen;
    };

    if (j.contains("default_generation"))
        f.default_generation = parse_generation(j.at("default_generation"));
    if (j.contains("generations")) {
        for (const auto& g : j.at("generations")) {
            std::string key = generation_key(g.at("sample_id").get<std::string>(),
                                             g.value("mode", std::string("base")),
                                             g.value("seed", std::uint64_t{0}));
            f.generations[key] = parse_generation(g);
        }
    }

    auto parse_replies = [&](const char* field, std::map<std::string, std::vector<std::string>>& out) {
        if (!j.contains(field)) return;
        for (auto it = j.at(field).begin(); it != j.at(field).end(); ++it) {
            if (it.value().is_string())
                out[it.key()] = {it.value().get<std::string>()};
            else
                out[it.key()] = it.value().get<std::vector<std::string>>();
        }
    };
    parse_replies("translations", f.translations);
    parse_replies("monitor_responses", f.monitor_responses);
    parse_replies("assessment_responses", f.assessment_responses);
    parse_replies("extraction_responses", f.extraction_responses);
    if (j.contains("reflections")) {
        for (auto it = j.at("reflections").begin(); it != j.at("reflections").end(); ++it)
            f.reflections[it.key()] = it.value().get<std::string>();
    }
    return f;
}

json ScriptedFixture::to_json() const {
    json j;
    j["backend_id"] = backend_id;
    j["capabilities"] = capabilities.to_json();
    j["vocab_size"] = vocab_size;
    if (prompt_nll_per_token) j["prompt_nll_per_token"] = *prompt_nll_per_token;

    auto generation_json = [](const Generation& g) {
        json out;
        out["trace"] = g.trace;
        out["response"] = g.response;
        out["finish_reason"] = finish_reason_name(g.finish_reason);
        if (g.topk_rows) {
            json rows = json::array();
            for (const auto& row : *g.topk_rows) {
                json row_j = json::array();
                for (const auto& e : row) row_j.push_back({e.token_id, e.logprob});
                rows.push_back(row_j);
            }
            out["topk_logprobs"] = rows;
        }
        if (g.prompt_logprobs) out["prompt_logprobs"] = *g.prompt_logprobs;
        if (g.hidden_state) out["hidden_state"] = *g.hidden_state;
        if (!g.hidden_state_by_cutoff.empty()) {
            json by_cutoff = json::object();
            for (const auto& [cutoff, vec] : g.hidden_state_by_cutoff)
                by_cutoff[std::to_string(cutoff)] = vec;
            out["hidden_state_by_cutoff"] = by_cutoff;
        }
        return out;
    };

    if (default_generation) j["default_generation"] = generation_json(*default_generation);
    json gens = json::array();
    for (const auto& [key, gen] : generations) {
        json g = generation_json(gen);
        auto first = key.find('|');
        auto second = key.find('|', first + 1);
        g["sample_id"] = key.substr(0, first);
        g["mode"] = key.substr(first + 1, second - first - 1);
        g["seed"] = std::stoull(key.substr(second + 1));
        gens.push_back(g);
    }
    j["generations"] = gens;
    j["translations"] = translations;
    j["monitor_responses"] = monitor_responses;
    j["assessment_responses"] = assessment_responses;
    j["extraction_responses"] = extraction_responses;
    j["reflections"] = reflections;
    return j;
}

ScriptedFixture ScriptedFixture::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open scripted fixture: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::Schema, "invalid fixture JSON: " + path);
    return from_json(j);
}

void ScriptedFixture::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Config, "cannot write scripted fixture: " + path);
    out << to_json().dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// ScriptedBackend

ScriptedBackend::ScriptedBackend(ScriptedFixture fixture) : fixture_(std::move(fixture)) {
    fixture_.capabilities.validate();
}

const ScriptedFixture::Generation& ScriptedBackend::resolve(const std::string& sample_id,
                                                            bool with_prefix,
                                                            std::uint64_t seed) const {
    const char* first = with_prefix ? "U" : "base";
    const char* second = with_prefix ? "UT" : "T";
    for (const char* mode : {first, second}) {
        auto it = fixture_.generations.find(ScriptedFixture::generation_key(sample_id, mode, seed));
        if (it != fixture_.generations.end()) return it->second;
    }
    if (fixture_.default_generation) return *fixture_.default_generation;
    fail(ErrorKind::Backend, "no scripted generation for sample " + sample_id + " (seed " +
                                 std::to_string(seed) + ") and no default declared");
}

GenerationRecord ScriptedBackend::generate(const GenerateRequest& request) {
    check_generate_preconditions(request, fixture_.capabilities);
    ++generate_calls_;

    const bool with_prefix = request.trace_prefix.has_value();
    const auto& gen = resolve(request.sample.id, with_prefix, request.sampling.seed);

    GenerationRecord record;
    record.sample_id = request.sample.id;
    record.mode = with_prefix ? Mode::U : Mode::Base;  // pipeline overwrites with the true mode
    record.seed = request.sampling.seed;
    record.backend_id = fixture_.backend_id;
    record.response = gen.response;
    record.finish_reason = gen.finish_reason;

    std::string trace = with_prefix ? *request.trace_prefix + gen.trace : gen.trace;
    std::int64_t token_count = tokenizer_.count_tokens(trace);
    if (request.trace_cutoff && token_count > *request.trace_cutoff) {
        trace = tokenizer_.truncate(trace, *request.trace_cutoff);
        token_count = *request.trace_cutoff;
        record.finish_reason = FinishReason::Length;
    }
    record.trace = trace;
    record.trace_token_count = token_count;

    auto tokens = split_tokens(trace);

    if (request.capture.count(Capture::Topk)) {
        int width = std::min(request.sampling.top_k, fixture_.vocab_size);
        TopkMatrix m;
        m.width = static_cast<std::size_t>(width);
        m.entries.reserve(tokens.size() * m.width);
        if (gen.topk_rows) {
            if (gen.topk_rows->size() < tokens.size())
                fail(ErrorKind::Schema, "fixture topk rows shorter than trace for sample " +
                                            request.sample.id);
            m.width = gen.topk_rows->empty() ? 0 : (*gen.topk_rows)[0].size();
            for (std::size_t t = 0; t < tokens.size(); ++t) {
                const auto& row = (*gen.topk_rows)[t];
                if (row.size() != m.width)
                    fail(ErrorKind::Schema, "fixture topk rows must share one width");
                m.entries.insert(m.entries.end(), row.begin(), row.end());
            }
        } else {
            for (std::size_t t = 0; t < tokens.size(); ++t) {
                auto row = synthesize_topk_row(tokens[t], t, width, fixture_.vocab_size);
                m.entries.insert(m.entries.end(), row.begin(), row.end());
            }
        }
        record.topk_logprobs = std::move(m);
    }

    if (request.capture.count(Capture::PromptNll)) {
        record.prompt_token_logprobs =
            gen.prompt_logprobs
                ? *gen.prompt_logprobs
                : synthesize_prompt_logprobs(request.prompt, fixture_.prompt_nll_per_token);
    }

    if (request.capture.count(Capture::Hidden)) {
        int dim = fixture_.capabilities.hidden_dim.value_or(8);
        if (request.trace_cutoff) {
            auto it = gen.hidden_state_by_cutoff.find(*request.trace_cutoff);
            if (it != gen.hidden_state_by_cutoff.end())
                record.final_hidden_state = it->second;
        } else if (gen.hidden_state) {
            record.final_hidden_state = *gen.hidden_state;
        }
        if (!record.final_hidden_state) {
            // Derived from the (already truncated) trace text, so the capture
            // depends only on tokens before the cut point.
            record.final_hidden_state =
                digest_expand_unit(request.sample.id + "|" + trace, static_cast<std::size_t>(dim));
        }
        if (record.final_hidden_state->size() != static_cast<std::size_t>(dim))
            fail(ErrorKind::Schema, "fixture hidden state dimension mismatch for sample " +
                                        request.sample.id);
    }

    return record;
}

std::string ScriptedBackend::continue_trace(const Sample& sample, const std::string& trace_so_far,
                                            const SamplingConfig&) {
    auto it = fixture_.reflections.find(sample.id);
    if (it == fixture_.reflections.end()) it = fixture_.reflections.find("*");
    std::string continuation = it != fixture_.reflections.end() ? it->second : std::string();
    return trace_so_far + continuation;
}

// ---------------------------------------------------------------------------
// Scripted reply plumbing

ScriptedReplySource::ScriptedReplySource(std::map<std::string, std::vector<std::string>> replies)
    : replies_(std::move(replies)) {}

std::string ScriptedReplySource::next(const std::string& key) {
    auto it = replies_.find(key);
    if (it == replies_.end()) it = replies_.find("*");
    if (it == replies_.end() || it->second.empty())
        fail(ErrorKind::Backend, "no scripted reply for key '" + key + "'");
    std::size_t& cursor = cursor_[it->first];
    const auto& list = it->second;
    std::string reply = list[std::min(cursor, list.size() - 1)];
    ++cursor;
    return reply;
}

ScriptedTranslator::ScriptedTranslator(const ScriptedFixture& fixture)
    : replies_(fixture.translations) {}

TranslationResult ScriptedTranslator::translate(const Sample& sample) {
    current_key_ = sample.id;
    ++calls_;
    return PromptingTranslator::translate(sample);
}

std::string ScriptedTranslator::complete(const std::string&) { return replies_.next(current_key_); }

ScriptedJudge::ScriptedJudge(const ScriptedFixture& fixture)
    : monitor_replies_(fixture.monitor_responses),
      assessment_replies_(fixture.assessment_responses),
      extraction_replies_(fixture.extraction_responses) {}

MonitorVerdict ScriptedJudge::monitor(const Sample& sample, const std::string& trace) {
    active_ = &monitor_replies_;
    current_key_ = sample.id;
    return PromptingJudge::monitor(sample, trace);
}

int ScriptedJudge::assess_translation(const std::string& source, const std::string& hypothesis,
                                      const std::string& src_lang, const std::string& tgt_lang) {
    active_ = &assessment_replies_;
    current_key_ = hypothesis;
    return PromptingJudge::assess_translation(source, hypothesis, src_lang, tgt_lang);
}

std::string ScriptedJudge::extract(const std::string& question_or_options,
                                   const std::string& trace, AnswerType answer_type) {
    active_ = &extraction_replies_;
    current_key_ = question_or_options;
    return PromptingJudge::extract(question_or_options, trace, answer_type);
}

std::string ScriptedJudge::complete(const std::string&) {
    if (active_ == nullptr) fail(ErrorKind::Backend, "scripted judge used without an active call");
    return active_->next(current_key_);
}

}  // namespace rgap
