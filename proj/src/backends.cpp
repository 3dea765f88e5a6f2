#include "rgap/backends.hpp"

#include <cctype>
#include <cstdlib>

#include "rgap/assets.hpp"
#include "rgap/common.hpp"
#include "rgap/extraction.hpp"

namespace rgap {

void BackendCapabilities::validate() const {
    if (supports_hidden_state && (!hidden_dim || *hidden_dim <= 0))
        fail(ErrorKind::Config, "supports_hidden_state requires hidden_dim > 0");
}

json BackendCapabilities::to_json() const {
    json j;
    j["supports_trace_prefix"] = supports_trace_prefix;
    j["supports_topk_logprobs"] = supports_topk_logprobs;
    j["supports_prompt_logprobs"] = supports_prompt_logprobs;
    j["supports_hidden_state"] = supports_hidden_state;
    if (hidden_dim) j["hidden_dim"] = *hidden_dim;
    j["end_of_think_marker"] = end_of_think_marker;
    return j;
}

BackendCapabilities BackendCapabilities::from_json(const json& j) {
    BackendCapabilities c;
    c.supports_trace_prefix = j.value("supports_trace_prefix", false);
    c.supports_topk_logprobs = j.value("supports_topk_logprobs", false);
    c.supports_prompt_logprobs = j.value("supports_prompt_logprobs", false);
    c.supports_hidden_state = j.value("supports_hidden_state", false);
    if (j.contains("hidden_dim")) c.hidden_dim = j.at("hidden_dim").get<int>();
    c.end_of_think_marker = j.value("end_of_think_marker", std::string("</think>"));
    c.validate();
    return c;
}

void check_generate_preconditions(const GenerateRequest& request, const BackendCapabilities& caps) {
    if (request.trace_prefix && !caps.supports_trace_prefix)
        fail(ErrorKind::Config, "backend does not support trace prefixes");
    if (request.capture.count(Capture::Topk) && !caps.supports_topk_logprobs)
        fail(ErrorKind::Config, "backend does not support top-k logprob capture");
    if (request.capture.count(Capture::PromptNll) && !caps.supports_prompt_logprobs)
        fail(ErrorKind::Config, "backend does not support prompt logprob capture");
    if (request.capture.count(Capture::Hidden) && !caps.supports_hidden_state)
        fail(ErrorKind::Config, "backend does not support hidden-state capture");
    if (request.trace_cutoff && *request.trace_cutoff <= 0)
        fail(ErrorKind::Precondition, "trace_cutoff must be positive");
}

// ---------------------------------------------------------------------------
// WhitespaceTokenizer

namespace {

bool is_space_byte(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Token boundaries: a token is a maximal run of non-space bytes plus the run
// of space bytes that follows it. Leading whitespace attaches to the first
// token. Concatenating all tokens reproduces the input exactly.
std::vector<std::size_t> token_end_offsets(const std::string& text) {
    std::vector<std::size_t> ends;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && is_space_byte(text[i])) ++i;  // leading/gap whitespace
        if (i >= n) {
            if (!ends.empty()) ends.back() = n;
            break;
        }
        while (i < n && !is_space_byte(text[i])) ++i;
        while (i < n && is_space_byte(text[i])) ++i;
        ends.push_back(i);
    }
    return ends;
}

}  // namespace

std::int64_t WhitespaceTokenizer::count_tokens(const std::string& text) const {
    return static_cast<std::int64_t>(token_end_offsets(text).size());
}

std::string WhitespaceTokenizer::truncate(const std::string& text, std::int64_t n) const {
    if (n <= 0) return std::string();
    auto ends = token_end_offsets(text);
    if (static_cast<std::size_t>(n) >= ends.size()) return text;
    return text.substr(0, ends[static_cast<std::size_t>(n) - 1]);
}

// ---------------------------------------------------------------------------
// PromptingTranslator

namespace {

std::optional<std::string> between_tags(const std::string& text, const std::string& open,
                                        const std::string& close) {
    auto start = text.find(open);
    if (start == std::string::npos) return std::nullopt;
    start += open.size();
    auto end = text.find(close, start);
    if (end == std::string::npos) return std::nullopt;
    return text.substr(start, end - start);
}

std::optional<ordered_json> parse_payload_reply(const std::string& reply,
                                                const ordered_json& expected) {
    // Accept the object possibly surrounded by prose or code fences.
    auto open = reply.find('{');
    auto close = reply.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open)
        return std::nullopt;
    ordered_json parsed = ordered_json::parse(reply.substr(open, close - open + 1), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) return std::nullopt;
    if (parsed.size() != expected.size()) return std::nullopt;
    auto it_p = parsed.begin();
    auto it_e = expected.begin();
    for (; it_e != expected.end(); ++it_p, ++it_e) {
        if (it_p.key() != it_e.key()) return std::nullopt;  // keys and order must match
        if (!it_p.value().is_string()) return std::nullopt;
    }
    return parsed;
}

}  // namespace

ordered_json build_choice_payload(const Sample& sample) {
    ordered_json payload;
    payload["question"] = sample.question;
    for (std::size_t i = 0; i < sample.options.size(); ++i)
        payload["option_" + std::to_string(i)] = sample.options[i];
    return payload;
}

std::string TranslationResult::as_prefix_text() const {
    if (!is_payload) return text;
    std::string out = payload.value("question", std::string());
    for (std::size_t i = 0; i < 10; ++i) {
        std::string key = "option_" + std::to_string(i);
        if (!payload.contains(key)) break;
        out += "\n(" + std::string(1, static_cast<char>('A' + i)) + ") " +
               payload.at(key).get<std::string>();
    }
    return out;
}

TranslationResult PromptingTranslator::translate(const Sample& sample) {
    if (sample.answer_type == AnswerType::MathExpression) {
        std::string prompt =
            render_template(assets::kTranslateMathPrompt, {{"instruction", sample.question}});
        for (int attempt = 0; attempt < 2; ++attempt) {
            std::string reply = complete(prompt);
            if (auto text = between_tags(reply, "<translated>", "</translated>")) {
                TranslationResult r;
                r.text = *text;
                return r;
            }
        }
        fail(ErrorKind::Parse,
             "translator reply missing <translated>...</translated> tags for sample " + sample.id);
    }
    ordered_json payload = build_choice_payload(sample);
    std::string prompt =
        render_template(assets::kTranslateChoicePayloadPrompt, {{"payload", payload.dump(2)}});
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string reply = complete(prompt);
        if (auto parsed = parse_payload_reply(reply, payload)) {
            TranslationResult r;
            r.payload = std::move(*parsed);
            r.is_payload = true;
            return r;
        }
    }
    fail(ErrorKind::Parse, "translator payload reply malformed for sample " + sample.id);
}

// ---------------------------------------------------------------------------
// PromptingJudge

namespace {

std::string sample_problem_text(const Sample& sample) {
    std::string problem = sample.question;
    for (std::size_t i = 0; i < sample.options.size(); ++i)
        problem += "\n(" + std::string(1, static_cast<char>('A' + i)) + ") " + sample.options[i];
    return problem;
}

std::optional<json> find_json_object(const std::string& reply) {
    auto open = reply.find('{');
    auto close = reply.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open)
        return std::nullopt;
    json parsed = json::parse(reply.substr(open, close - open + 1), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) return std::nullopt;
    return parsed;
}

std::optional<int> parse_integer_reply(const std::string& reply) {
    std::size_t i = 0;
    while (i < reply.size() && !(std::isdigit(static_cast<unsigned char>(reply[i])) ||
                                 (reply[i] == '-' && i + 1 < reply.size() &&
                                  std::isdigit(static_cast<unsigned char>(reply[i + 1])))))
        ++i;
    if (i >= reply.size()) return std::nullopt;
    char* end = nullptr;
    long value = std::strtol(reply.c_str() + i, &end, 10);
    if (end == reply.c_str() + i) return std::nullopt;
    return static_cast<int>(value);
}

}  // namespace

MonitorVerdict PromptingJudge::monitor(const Sample& sample, const std::string& trace) {
    std::string prompt = render_template(
        assets::kMonitorPrompt, {{"problem", sample_problem_text(sample)}, {"trace", trace}});
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string reply = complete(prompt);
        auto obj = find_json_object(reply);
        if (obj && obj->contains("understood") && obj->at("understood").is_boolean()) {
            MonitorVerdict v;
            v.understood = obj->at("understood").get<bool>();
            v.reason = obj->value("Reason", obj->value("reason", std::string()));
            return v;
        }
    }
    // Unparseable after retry: default to the negative class, flagged.
    MonitorVerdict v;
    v.understood = true;
    v.parse_failed = true;
    return v;
}

int PromptingJudge::assess_translation(const std::string& source, const std::string& hypothesis,
                                       const std::string& src_lang, const std::string& tgt_lang) {
    std::string prompt = render_template(assets::kTranslationAssessmentPrompt,
                                         {{"src_lang", src_lang},
                                          {"tgt_lang", tgt_lang},
                                          {"source", source},
                                          {"hypothesis", hypothesis}});
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string reply = complete(prompt);
        auto score = parse_integer_reply(reply);
        if (score && *score >= 0 && *score <= 100) return *score;
    }
    fail(ErrorKind::Parse, "translation assessment reply not an integer in [0,100]");
}

std::string PromptingJudge::extract(const std::string& question_or_options,
                                    const std::string& trace, AnswerType answer_type) {
    std::string prompt =
        answer_type == AnswerType::MathExpression
            ? render_template(assets::kExtractMathPrompt,
                              {{"question", question_or_options}, {"reasoning_trace", trace}})
            : render_template(assets::kExtractChoicePrompt, {{"options_block", question_or_options},
                                                             {"reasoning_trace", trace}});
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string reply = complete(prompt);
        if (answer_type == AnswerType::MathExpression) {
            if (auto boxed = last_boxed_content(reply)) return *boxed;
        } else {
            auto pos = reply.rfind("Answer:");
            if (pos != std::string::npos) {
                std::size_t i = pos + 7;
                while (i < reply.size() && reply[i] == ' ') ++i;
                if (i < reply.size()) {
                    char c = static_cast<char>(std::toupper(static_cast<unsigned char>(reply[i])));
                    if (c >= 'A' && c <= 'J') return std::string(1, c);
                }
            }
            if (reply.find(kNoAnswer) != std::string::npos) return kNoAnswer;
        }
    }
    fail(ErrorKind::Parse, "extraction reply violated the output contract");
}

}  // namespace rgap
