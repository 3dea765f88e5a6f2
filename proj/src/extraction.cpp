#include "rgap/extraction.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <regex>
#include <set>

#include "rgap/common.hpp"

namespace rgap {

const char* answer_source_name(AnswerSource source) {
    return source == AnswerSource::Response ? "response" : "trace";
}

AnswerSource answer_source_for_mode(Mode mode) {
    return (mode == Mode::T || mode == Mode::UT) ? AnswerSource::Trace : AnswerSource::Response;
}

std::optional<std::string> last_boxed_content(const std::string& text) {
    static const std::string needle = "\\boxed{";
    std::optional<std::string> found;
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        std::size_t start = pos + needle.size();
        int depth = 1;
        std::size_t i = start;
        for (; i < text.size() && depth > 0; ++i) {
            if (text[i] == '{') ++depth;
            else if (text[i] == '}') --depth;
        }
        if (depth == 0) {
            found = text.substr(start, i - 1 - start);
            pos = i;
        } else {
            break;  // unbalanced tail; keep the last complete match
        }
    }
    return found;
}

namespace {

std::optional<std::string> last_choice_match(const std::string& text, const std::string& pattern) {
    std::regex re(pattern, std::regex::ECMAScript | std::regex::icase);
    std::optional<std::string> found;
    auto begin = std::sregex_iterator(text.begin(), text.end(), re);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        const std::smatch& m = *it;
        if (m.size() >= 2 && m[1].matched) {
            std::string letter = m[1].str();
            found = std::string(1, static_cast<char>(std::toupper(
                                       static_cast<unsigned char>(letter[0]))));
        }
    }
    return found;
}

std::string options_block_for_fallback(const ExtractionContext& ctx) {
    std::string block;
    for (std::size_t i = 0; i < ctx.options.size(); ++i)
        block += "(" + std::string(1, static_cast<char>('A' + i)) + ") " + ctx.options[i] + "\n";
    return block;
}

}  // namespace

ExtractionResult extract_final_answer(const std::string& text, const ExtractionContext& ctx) {
    if (text.empty()) fail(ErrorKind::Precondition, "extraction input text is empty");

    ExtractionResult result;
    if (ctx.answer_type == AnswerType::MathExpression) {
        if (auto boxed = last_boxed_content(text)) {
            result.answer = *boxed;
            return result;
        }
    } else {
        if (auto letter = last_choice_match(text, ctx.closing_pattern)) {
            result.answer = *letter;
            return result;
        }
    }

    if (ctx.fallback != nullptr) {
        result.method = ExtractionMethod::LlmFallback;
        std::string question_or_options = ctx.answer_type == AnswerType::MathExpression
                                              ? ctx.question
                                              : options_block_for_fallback(ctx);
        result.answer = ctx.fallback->extract(question_or_options, text, ctx.answer_type);
        return result;
    }
    result.answer = kNoAnswer;
    return result;
}

// ---------------------------------------------------------------------------
// DefaultMathChecker

namespace {

void strip_outer(std::string& s, const std::string& open, const std::string& close) {
    while (s.size() >= open.size() + close.size() && s.compare(0, open.size(), open) == 0 &&
           s.compare(s.size() - close.size(), close.size(), close) == 0) {
        s = s.substr(open.size(), s.size() - open.size() - close.size());
    }
}

void erase_all(std::string& s, const std::string& needle) {
    std::size_t pos = 0;
    while ((pos = s.find(needle, pos)) != std::string::npos) s.erase(pos, needle.size());
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Parses "\frac{a}{b}" (also \dfrac, \tfrac) returning the two bodies.
std::optional<std::pair<std::string, std::string>> split_frac(const std::string& s) {
    for (const char* name : {"\\frac", "\\dfrac", "\\tfrac"}) {
        std::string prefix = name;
        if (s.size() > prefix.size() && s.compare(0, prefix.size(), prefix) == 0) {
            std::size_t i = prefix.size();
            auto read_group = [&](std::string& out) -> bool {
                while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
                if (i >= s.size() || s[i] != '{') return false;
                int depth = 1;
                std::size_t start = ++i;
                for (; i < s.size() && depth > 0; ++i) {
                    if (s[i] == '{') ++depth;
                    else if (s[i] == '}') --depth;
                }
                if (depth != 0) return false;
                out = s.substr(start, i - 1 - start);
                return true;
            };
            std::string num, den;
            if (read_group(num) && read_group(den) && trim(s.substr(i)).empty())
                return std::make_pair(num, den);
        }
    }
    return std::nullopt;
}

}  // namespace

std::string DefaultMathChecker::normalize(const std::string& input) {
    std::string s = trim(input);
    strip_outer(s, "$$", "$$");
    strip_outer(s, "$", "$");
    strip_outer(s, "\\(", "\\)");
    strip_outer(s, "\\[", "\\]");
    if (s.rfind("\\boxed{", 0) == 0 && s.back() == '}')
        s = s.substr(7, s.size() - 8);
    erase_all(s, "\\left");
    erase_all(s, "\\right");
    erase_all(s, "\\,");
    erase_all(s, "\\!");
    erase_all(s, " ");
    erase_all(s, "\t");
    erase_all(s, "\n");
    strip_outer(s, "{", "}");
    if (s.size() > 1 && s.back() == '.' && !std::isdigit(static_cast<unsigned char>(s[s.size() - 2])))
        s.pop_back();
    return s;
}

std::optional<double> DefaultMathChecker::parse_number(const std::string& input) {
    std::string s = normalize(input);
    if (s.empty()) return std::nullopt;

    bool negate = false;
    if (s[0] == '-' && s.size() > 1 && s[1] == '\\') {
        negate = true;
        s = s.substr(1);
    }

    if (auto frac = split_frac(s)) {
        auto num = parse_number(frac->first);
        auto den = parse_number(frac->second);
        if (num && den && *den != 0.0) return (negate ? -1.0 : 1.0) * (*num / *den);
        return std::nullopt;
    }

    // Plain a/b with both sides numeric.
    auto slash = s.find('/');
    if (slash != std::string::npos && slash > 0 && slash + 1 < s.size()) {
        auto num = parse_number(s.substr(0, slash));
        auto den = parse_number(s.substr(slash + 1));
        if (num && den && *den != 0.0) return *num / *den;
    }

    char* end = nullptr;
    double value = std::strtod(s.c_str(), &end);
    if (end == s.c_str() + s.size() && end != s.c_str()) return negate ? -value : value;
    return std::nullopt;
}

bool DefaultMathChecker::equivalent(const std::string& candidate, const std::string& gold) const {
    auto a = parse_number(candidate);
    auto b = parse_number(gold);
    if (a && b) return std::fabs(*a - *b) <= 1e-9;
    if (a.has_value() != b.has_value()) return false;
    return normalize(candidate) == normalize(gold);
}

const MathChecker& default_math_checker() {
    static DefaultMathChecker checker;
    return checker;
}

bool verify_answer(const std::string& candidate, const std::string& gold, AnswerType answer_type,
                   const MathChecker& checker) {
    if (is_no_answer(candidate)) return false;
    if (answer_type == AnswerType::ChoiceLetter) {
        std::string c = trim(candidate), g = trim(gold);
        if (c.size() != 1 || g.size() != 1) return false;
        return std::toupper(static_cast<unsigned char>(c[0])) ==
               std::toupper(static_cast<unsigned char>(g[0]));
    }
    try {
        return checker.equivalent(candidate, gold);
    } catch (const std::exception& e) {
        warn(std::string("math checker failed on candidate '") + candidate + "': " + e.what());
        return false;
    }
}

// ---------------------------------------------------------------------------
// Scoring

double AccuracyTable::accuracy(const std::string& language, std::uint64_t seed) const {
    return cells.at(language).at(seed).accuracy();
}

double AccuracyTable::seed_mean(const std::string& language) const {
    const auto& per_seed_cells = cells.at(language);
    double sum = 0.0;
    for (const auto& [seed, cell] : per_seed_cells) sum += cell.accuracy();
    return per_seed_cells.empty() ? 0.0 : sum / static_cast<double>(per_seed_cells.size());
}

std::vector<double> AccuracyTable::per_seed(const std::string& language) const {
    std::vector<double> values;
    for (const auto& [seed, cell] : cells.at(language)) values.push_back(cell.accuracy());
    return values;
}

std::vector<std::string> AccuracyTable::languages() const {
    std::vector<std::string> out;
    for (const auto& [language, cells_for_language] : cells) out.push_back(language);
    return out;
}

std::vector<ScoredRecord> score_records(const std::vector<GenerationRecord>& records,
                                        const std::vector<Sample>& samples,
                                        const ScoringOptions& options) {
    std::map<std::string, const Sample*> by_id;
    for (const auto& s : samples) by_id[s.id] = &s;
    const MathChecker& checker =
        options.checker != nullptr ? *options.checker : default_math_checker();

    std::vector<ScoredRecord> scored(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& record = records[i];
        auto it = by_id.find(record.sample_id);
        if (it == by_id.end())
            fail(ErrorKind::Incomplete, "record references unknown sample " + record.sample_id);
        const Sample& sample = *it->second;

        const std::string& text =
            options.answer_source == AnswerSource::Trace ? record.trace : record.response;

        ScoredRecord out;
        out.sample_id = record.sample_id;
        out.language = sample.language.code;
        out.seed = record.seed;
        if (!text.empty()) {
            ExtractionContext ctx;
            ctx.answer_type = sample.answer_type;
            ctx.question = sample.question;
            ctx.options = sample.options;
            ctx.closing_pattern = options.closing_patterns.for_language(sample.language.code);
            ctx.fallback = options.fallback;
            try {
                ExtractionResult extraction = extract_final_answer(text, ctx);
                out.answer = extraction.answer;
                out.method = extraction.method;
                out.correct = verify_answer(extraction.answer, sample.gold, sample.answer_type,
                                            checker);
            } catch (const Error& e) {
                // Extraction contract violations count the sample as incorrect.
                warn("extraction failed for sample " + sample.id + ": " + e.what());
                out.answer = kNoAnswer;
                out.correct = false;
            }
        }
        scored[i] = std::move(out);
    }
    return scored;
}

AccuracyTable accuracy_from_scored(const std::vector<ScoredRecord>& scored,
                                   const std::vector<std::string>& expected_languages,
                                   const std::vector<std::uint64_t>& expected_seeds) {
    AccuracyTable table;
    table.seeds = expected_seeds;
    for (const auto& language : expected_languages)
        for (auto seed : expected_seeds) table.cells[language][seed] = AccuracyCell{};

    for (const auto& r : scored) {
        auto lang_it = table.cells.find(r.language);
        if (lang_it == table.cells.end()) continue;  // language outside the requested set
        auto seed_it = lang_it->second.find(r.seed);
        if (seed_it == lang_it->second.end()) continue;
        seed_it->second.total += 1;
        seed_it->second.correct += r.correct ? 1 : 0;
    }

    std::string gaps;
    for (const auto& [language, per_seed_cells] : table.cells)
        for (const auto& [seed, cell] : per_seed_cells)
            if (cell.total == 0) gaps += " (" + language + ", " + std::to_string(seed) + ")";
    if (!gaps.empty())
        fail(ErrorKind::Incomplete, "missing records for cells:" + gaps);
    return table;
}

AccuracyTable score_accuracy(const std::vector<GenerationRecord>& records,
                             const std::vector<Sample>& samples, const ScoringOptions& options,
                             const std::vector<std::string>& expected_languages,
                             const std::vector<std::uint64_t>& expected_seeds) {
    return accuracy_from_scored(score_records(records, samples, options), expected_languages,
                                expected_seeds);
}

}  // namespace rgap
