#include "rgap/assets.hpp"

#include "rgap/common.hpp"

namespace rgap {

namespace assets {

const char* kUnderstandingPrefixOriginal =
    "Okay, let's see. I understand the question as: '{x_dom}'. Let's solve the problem based on "
    "this understanding.";

const char* kUnderstandingPrefixV1 =
    "Okay, I understand the question as: '{x_dom}'. I will solve the problem based on this "
    "understanding.";

const char* kUnderstandingPrefixV2 =
    "Okay, my understanding of the question in English is: '{x_dom}'. I will proceed using this "
    "interpretation.";

const char* kUnderstandingPrefixV3 =
    "English meaning of the question: '{x_dom}'. I'll solve the problem based on this "
    "understanding.";

const char* kMonitorPrompt =
    "You are given a problem (question and possibly options) and a model\u2019s reasoning trace.\n"
    "Your task is to decide whether the model correctly understood the problem.\n"
    "Do not solve the problem yourself.\n"
    "\n"
    "Return the output strictly in the following JSON format, with no extra text.\n"
    "The \"Reason\" field should be one or two sentences.\n"
    "\n"
    "{\n"
    "  \"understood\": true/false,\n"
    "  \"Reason\": \"<one or two sentences explanation of why you judged it this way>\"\n"
    "}\n"
    "\n"
    "Problem:\n"
    "{problem}\n"
    "\n"
    "Reasoning Trace:\n"
    "{trace}";

const char* kSelfReflectionInstruction =
    "Wait, before proceeding, I will reflect on my prior reasoning to assess my overall "
    "understanding of the problem. I will respond with <Understandability>: YES or NO (YES if "
    "I'm fully confident that I understood the problem correctly, NO otherwise).\n"
    "<Understandability>:";

const char* kTranslateMathPrompt =
    "Translate the following mathematical question enclosed within <instruction> and "
    "</instruction> into English.\n"
    "The text may contain mathematical notation and LaTeX formatting. You must strictly "
    "preserve:\n"
    "- All LaTeX math and commands EXACTLY as written, including inline math $...$, display math "
    "$$...$$, \\(...\\), \\[...\\], and any \\begin{...}...\\end{...} environments.\n"
    "- All mathematical symbols, variables, numbers, operators, and equation labels.\n"
    "\n"
    "Provide only the translated instruction without any additional explanation.\n"
    "Wrap the translated output with <translated> and </translated> tags.\n"
    "\n"
    "<instruction>{instruction}</instruction>";

const char* kTranslateChoicePayloadPrompt =
    "You are a professional scientific translator.\n"
    "\n"
    "TASK\n"
    "- Translate ONLY the string **values** in the given JSON object into English.\n"
    "- Do not change the JSON keys, structure, or order.\n"
    "- Preserve all numbers, mathematical expressions, symbols, and units exactly.\n"
    "- Return ONLY the translated JSON object.\n"
    "\n"
    "INPUT:\n"
    "{payload}";

const char* kExtractMathPrompt =
    "You are an answer extractor.\n"
    "Inputs:\n"
    "- Question: {question}\n"
    "- Reasoning trace: {reasoning_trace}\n"
    "Task:\n"
    "1) Read the Question and determine the expected final answer type.\n"
    "- Possible types include: Numeric scalar, Comparison/Ordering among variables, Set/List, "
    "Interval/Inequality, Coordinate/Tuple, Algebraic expression, or Multiple-choice letter.\n"
    "- Decide the most appropriate type for THIS Question.\n"
    "2) Carefully scan the Reasoning trace and identify the final/conclusive answer consistent "
    "with the expected type.\n"
    "- Prefer the final/most conclusive statement (e.g., \u201cTherefore\u2026\u201d, "
    "\u201cThus\u2026\u201d, \u201cFinal answer\u2026\u201d, or the last decisive equation).\n"
    "- If multiple candidates appear, choose the last one that is self-consistent.\n"
    "- Ignore exploratory or contradicted intermediate guesses.\n"
    "3) Output EXACTLY in the format: \\boxed{FINAL_ANSWER}\n"
    "Formatting rules:\n"
    "- Put ONLY the final answer inside \\boxed{} (no units, words, or explanations).\n"
    "- Do not include any explanation or extra symbols outside \\boxed{}.\n"
    "- If no conclusive final answer is present in the trace, choose the last consistent "
    "candidate stated as final; if still impossible, output \\boxed{NO_ANSWER}.\n"
    "Output:";

const char* kExtractChoicePrompt =
    "You are an answer extractor.\n"
    "\n"
    "You will be provided with the following inputs:\n"
    "- Multiple-choice options (corresponding to the Question)\n"
    "- A reasoning trace that shows the step-by-step thought process\n"
    "\n"
    "Task:\n"
    "1) Carefully scan the Reasoning trace and identify the final multiple-choice option answer.\n"
    "- Valid answers are only single capital letters from [A-J].\n"
    "- If the final answer in the Reasoning trace is given as option text instead of a letter, "
    "use the provided multiple-choice options to map it to the corresponding letter from [A-J].\n"
    "- Prefer the final/most conclusive statement (e.g., \"Therefore...\", \"Thus...\", \"Final "
    "answer...\", or the last decisive choice).\n"
    "- If multiple candidates appear, choose the last consistent one.\n"
    "- Ignore exploratory or contradicted intermediate guesses.\n"
    "2) Output EXACTLY in the format:\n"
    "Answer: X\n"
    "Formatting rules:\n"
    "- Replace X with the chosen letter from [A-J].\n"
    "- Do not include any explanation, units, or extra text.\n"
    "Now, the inputs are given below.\n"
    "Inputs:\n"
    "- Multiple-choice options (corresponding to the Question): {options_block}\n"
    "- Reasoning trace: {reasoning_trace}\n"
    "Output:";

const char* kTranslationAssessmentPrompt =
    "Score the following translation from {src_lang} to {tgt_lang} on a continuous scale from 0 "
    "to 100, where a score of zero means \"no meaning preserved\" and a score of one hundred "
    "means \"perfect meaning and grammar\".\n"
    "\n"
    "{src_lang} source: \"{source}\"\n"
    "{tgt_lang} translation: \"{hypothesis}\"\n"
    "Score:";

const char* kElicitTranslationPrompt =
    "Translate the following {src_lang} text into English. Output only the translation.\n"
    "\n"
    "{text}";

const char* kChoicePromptTemplate =
    "The following are multiple choice questions (with answers) about {subject}.\n"
    "Think step by step and then finish your answer with \"the answer is (X)\" where X is the "
    "correct letter choice.\n"
    "\n"
    "Question: {question}\n"
    "Options:\n"
    "{options_block}\n"
    "Answer: Let's think step by step.";

const char* kMathInstructionEn = "Note: Please put the final answer in the \\boxed{}.";

const char* kChoiceClosingPatternEn = "answer is \\(?([A-J])\\)?";

}  // namespace assets

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        std::size_t open = tmpl.find('{', pos);
        if (open == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        std::size_t close = tmpl.find('}', open);
        if (close == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        std::string name = tmpl.substr(open + 1, close - open - 1);
        auto it = slots.find(name);
        if (it != slots.end()) {
            out.append(tmpl, pos, open - pos);
            out.append(it->second);
            pos = close + 1;
        } else {
            // Not a slot (e.g. literal JSON braces in prompt text); keep the
            // brace and continue scanning after it.
            out.append(tmpl, pos, open - pos + 1);
            pos = open + 1;
        }
    }
    return out;
}

InstructionTable::InstructionTable() { table_["en"] = assets::kMathInstructionEn; }

void InstructionTable::set(const std::string& language, const std::string& instruction) {
    table_[language] = instruction;
}

void InstructionTable::load_json(const json& table) {
    for (auto it = table.begin(); it != table.end(); ++it)
        table_[it.key()] = it.value().get<std::string>();
}

const std::string& InstructionTable::for_language(const std::string& language) const {
    auto it = table_.find(language);
    if (it == table_.end())
        fail(ErrorKind::Config, "no math instruction asset for language '" + language +
                                    "'; supply one via the instruction table");
    return it->second;
}

bool InstructionTable::has(const std::string& language) const {
    return table_.count(language) > 0;
}

ClosingPatternTable::ClosingPatternTable() : fallback_(assets::kChoiceClosingPatternEn) {
    table_["en"] = fallback_;
}

void ClosingPatternTable::set(const std::string& language, const std::string& pattern) {
    table_[language] = pattern;
}

void ClosingPatternTable::load_json(const json& table) {
    for (auto it = table.begin(); it != table.end(); ++it)
        table_[it.key()] = it.value().get<std::string>();
}

const std::string& ClosingPatternTable::for_language(const std::string& language) const {
    auto it = table_.find(language);
    return it != table_.end() ? it->second : fallback_;
}

}  // namespace rgap
