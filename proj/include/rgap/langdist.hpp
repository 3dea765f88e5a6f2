#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace rgap {

// Maps a sentence to a language code. Injected so tests run a deterministic
// fake; production users bind an off-the-shelf identifier here.
using LanguageIdentifier = std::function<std::string(const std::string& sentence)>;

// Coarse Unicode-script identifier: useful for smoke runs, not a substitute
// for a trained model. Latin-script text reports as "en".
std::string heuristic_script_identifier(const std::string& sentence);

struct CleanResult {
    std::string text;
    bool unbalanced_span = false;  // an unterminated span was cut to end-of-line
};

// Removes inline/display math ($...$, $$...$$, \(...\), \[...\]), LaTeX
// environments (\begin{...}...\end{...}) and fenced/backtick code, keeping
// prose. Unbalanced delimiters drop the span to end-of-line and set the flag.
CleanResult clean_text(const std::string& text);

struct SegmentOptions {
    // Terminal punctuation (UTF-8 strings, matched longest-first).
    std::vector<std::string> terminators = {"。", "！", "？", ".", "!", "?"};
    std::size_t min_chars = 10;  // Unicode code points, not bytes
};

std::vector<std::string> segment_sentences(const std::string& text,
                                           const SegmentOptions& options = {});

std::size_t count_code_points(const std::string& text);

struct LanguageDistribution {
    std::map<std::string, double> proportions;  // sums to 1 when any sentence is valid
    std::size_t valid_sentence_count = 0;
};

// Cleans, segments and identifies per sentence; P(l) = count(l) / valid.
LanguageDistribution language_distribution(const std::string& text,
                                           const LanguageIdentifier& identifier,
                                           const SegmentOptions& options = {});

}  // namespace rgap
