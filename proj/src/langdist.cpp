#include "rgap/langdist.hpp"

#include <array>
#include <cstdint>

namespace rgap {

namespace {

std::size_t code_point_at(const std::string& s, std::size_t i, char32_t& out) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = c;
    if (c >= 0xF0) len = 4;
    else if (c >= 0xE0) len = 3;
    else if (c >= 0xC0) len = 2;
    if (len > 1 && i + len <= s.size()) {
        cp = c & (0xFF >> (len + 1));
        for (std::size_t k = 1; k < len; ++k)
            cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    } else {
        len = 1;
        cp = c;
    }
    out = cp;
    return len;
}

}  // namespace

std::size_t count_code_points(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    return n;
}

std::string heuristic_script_identifier(const std::string& sentence) {
    std::map<std::string, std::size_t> counts;
    std::size_t i = 0;
    while (i < sentence.size()) {
        char32_t cp = 0;
        i += code_point_at(sentence, i, cp);
        const char* bucket = nullptr;
        if ((cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z') ||
            (cp >= 0x00C0 && cp <= 0x024F))
            bucket = "en";
        else if (cp >= 0x0400 && cp <= 0x04FF) bucket = "ru";
        else if (cp >= 0x0600 && cp <= 0x06FF) bucket = "ar";
        else if (cp >= 0x0900 && cp <= 0x097F) bucket = "mr";
        else if (cp >= 0x0980 && cp <= 0x09FF) bucket = "bn";
        else if (cp >= 0x0C00 && cp <= 0x0C7F) bucket = "te";
        else if (cp >= 0x0E00 && cp <= 0x0E7F) bucket = "th";
        else if (cp >= 0xAC00 && cp <= 0xD7AF) bucket = "ko";
        else if ((cp >= 0x3040 && cp <= 0x30FF) || (cp >= 0x31F0 && cp <= 0x31FF)) bucket = "ja";
        else if (cp >= 0x4E00 && cp <= 0x9FFF) bucket = "zh";
        if (bucket != nullptr) ++counts[bucket];
    }
    std::string best = "und";
    std::size_t best_count = 0;
    for (const auto& [code, count] : counts) {
        if (count > best_count) {
            best = code;
            best_count = count;
        }
    }
    return best;
}

CleanResult clean_text(const std::string& text) {
    struct Delimiter {
        const char* open;
        const char* close;
    };
    // Longest openers first so "$$" wins over "$" and "```" over "`".
    static const std::array<Delimiter, 6> delimiters = {{{"```", "```"},
                                                         {"$$", "$$"},
                                                         {"`", "`"},
                                                         {"$", "$"},
                                                         {"\\(", "\\)"},
                                                         {"\\[", "\\]"}}};
    CleanResult result;
    std::string& out = result.text;
    out.reserve(text.size());

    std::size_t i = 0;
    while (i < text.size()) {
        bool matched = false;

        if (text.compare(i, 7, "\\begin{") == 0) {
            // Generic environment span with \begin/\end nesting.
            std::size_t scan = i + 7;
            int depth = 1;
            std::size_t end = std::string::npos;
            while (scan < text.size()) {
                if (text.compare(scan, 7, "\\begin{") == 0) {
                    ++depth;
                    scan += 7;
                } else if (text.compare(scan, 5, "\\end{") == 0) {
                    --depth;
                    scan += 5;
                    if (depth == 0) {
                        auto brace = text.find('}', scan);
                        end = brace == std::string::npos ? text.size() : brace + 1;
                        break;
                    }
                } else {
                    ++scan;
                }
            }
            if (end == std::string::npos) {
                auto eol = text.find('\n', i);
                i = eol == std::string::npos ? text.size() : eol;
                result.unbalanced_span = true;
            } else {
                i = end;
            }
            matched = true;
        }

        if (!matched) {
            for (const auto& d : delimiters) {
                std::size_t open_len = std::char_traits<char>::length(d.open);
                if (text.compare(i, open_len, d.open) != 0) continue;
                std::size_t close_len = std::char_traits<char>::length(d.close);
                auto close = text.find(d.close, i + open_len);
                if (close == std::string::npos) {
                    auto eol = text.find('\n', i);
                    i = eol == std::string::npos ? text.size() : eol;
                    result.unbalanced_span = true;
                } else {
                    i = close + close_len;
                }
                matched = true;
                break;
            }
        }

        if (!matched) {
            out.push_back(text[i]);
            ++i;
        }
    }
    return result;
}

std::vector<std::string> segment_sentences(const std::string& text,
                                           const SegmentOptions& options) {
    std::vector<std::string> sentences;
    std::string current;

    auto flush = [&]() {
        std::size_t a = 0, b = current.size();
        while (a < b && std::isspace(static_cast<unsigned char>(current[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(current[b - 1]))) --b;
        std::string trimmed = current.substr(a, b - a);
        if (count_code_points(trimmed) >= options.min_chars) sentences.push_back(trimmed);
        current.clear();
    };

    std::size_t i = 0;
    while (i < text.size()) {
        bool terminated = false;
        for (const auto& term : options.terminators) {
            if (text.compare(i, term.size(), term) == 0) {
                current += term;
                i += term.size();
                // Swallow a run of terminators as one boundary.
                bool more = true;
                while (more && i < text.size()) {
                    more = false;
                    for (const auto& t2 : options.terminators) {
                        if (text.compare(i, t2.size(), t2) == 0) {
                            current += t2;
                            i += t2.size();
                            more = true;
                            break;
                        }
                    }
                }
                flush();
                terminated = true;
                break;
            }
        }
        if (!terminated) {
            current.push_back(text[i]);
            ++i;
        }
    }
    flush();  // trailing text without a terminator still counts
    return sentences;
}

LanguageDistribution language_distribution(const std::string& text,
                                           const LanguageIdentifier& identifier,
                                           const SegmentOptions& options) {
    LanguageDistribution dist;
    CleanResult cleaned = clean_text(text);
    auto sentences = segment_sentences(cleaned.text, options);
    if (sentences.empty()) return dist;

    std::map<std::string, std::size_t> counts;
    for (const auto& sentence : sentences) ++counts[identifier(sentence)];
    dist.valid_sentence_count = sentences.size();
    for (const auto& [language, count] : counts)
        dist.proportions[language] =
            static_cast<double>(count) / static_cast<double>(sentences.size());
    return dist;
}

}  // namespace rgap
