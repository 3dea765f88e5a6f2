#include <doctest.h>

#include "rgap/common.hpp"
#include "rgap/interventions.hpp"
#include "test_helpers.hpp"

using namespace rgap;

TEST_CASE("understanding prefix templates are exact") {
    CHECK(build_understanding_prefix("2+2=?", PrefixVariant::Original) ==
          "Okay, let's see. I understand the question as: '2+2=?'. Let's solve the problem based "
          "on this understanding.");
    CHECK(build_understanding_prefix("Q", PrefixVariant::V1) ==
          "Okay, I understand the question as: 'Q'. I will solve the problem based on this "
          "understanding.");
    CHECK(build_understanding_prefix("Q", PrefixVariant::V2) ==
          "Okay, my understanding of the question in English is: 'Q'. I will proceed using this "
          "interpretation.");
    CHECK(build_understanding_prefix("Q", PrefixVariant::V3) ==
          "English meaning of the question: 'Q'. I'll solve the problem based on this "
          "understanding.");
}

TEST_CASE("x_dom is substituted verbatim, no escaping") {
    std::string with_apostrophe = "What's {x} worth?";
    std::string prefix = build_understanding_prefix(with_apostrophe, PrefixVariant::Original);
    CHECK(prefix.find(with_apostrophe) != std::string::npos);
}

TEST_CASE("empty x_dom violates the precondition") {
    CHECK_THROWS_AS(build_understanding_prefix("", PrefixVariant::Original), Error);
}

TEST_CASE("intervention modes set prefix and answer source") {
    InstructionTable instructions;
    auto sample = rgap_test::math_sample("m1", "en", "1+1?", "2", "what is 1+1?");

    auto base = apply_intervention(sample, InterventionMode::Base, PrefixVariant::Original,
                                   instructions);
    CHECK_FALSE(base.trace_prefix.has_value());
    CHECK(base.answer_source == AnswerSource::Response);

    auto with_u =
        apply_intervention(sample, InterventionMode::U, PrefixVariant::Original, instructions);
    REQUIRE(with_u.trace_prefix.has_value());
    CHECK(*with_u.trace_prefix ==
          build_understanding_prefix(sample.x_dom, PrefixVariant::Original));
    CHECK(with_u.answer_source == AnswerSource::Response);

    auto with_t =
        apply_intervention(sample, InterventionMode::T, PrefixVariant::Original, instructions);
    CHECK_FALSE(with_t.trace_prefix.has_value());
    CHECK(with_t.answer_source == AnswerSource::Trace);

    auto with_ut =
        apply_intervention(sample, InterventionMode::UT, PrefixVariant::Original, instructions);
    REQUIRE(with_ut.trace_prefix.has_value());
    CHECK(with_ut.answer_source == AnswerSource::Trace);

    // Mode algebra: base and T share an unchanged prompt and no prefix.
    CHECK(base.prompt == with_t.prompt);
    CHECK(base.prompt == with_u.prompt);  // U injects the prefix, not a new prompt
}

TEST_CASE("prefix identity holds for every variant") {
    InstructionTable instructions;
    auto sample = rgap_test::math_sample("m1", "en", "q?", "1", "the question");
    for (auto variant :
         {PrefixVariant::Original, PrefixVariant::V1, PrefixVariant::V2, PrefixVariant::V3}) {
        auto plan = apply_intervention(sample, InterventionMode::U, variant, instructions);
        CHECK(*plan.trace_prefix == build_understanding_prefix(sample.x_dom, variant));
    }
}

TEST_CASE("U modes require x_dom") {
    InstructionTable instructions;
    auto sample = rgap_test::math_sample("m1", "en", "1+1?", "2");
    sample.x_dom.clear();
    CHECK_THROWS_AS(
        apply_intervention(sample, InterventionMode::U, PrefixVariant::Original, instructions),
        Error);
    CHECK_NOTHROW(
        apply_intervention(sample, InterventionMode::Base, PrefixVariant::Original, instructions));
}

TEST_CASE("math prompt appends the per-language instruction") {
    InstructionTable instructions;
    auto sample = rgap_test::math_sample("m1", "en", "Compute 3*4.", "12");
    std::string prompt = build_prompt(sample, instructions);
    CHECK(prompt == "Compute 3*4.\nNote: Please put the final answer in the \\boxed{}.");

    // Unsupported languages require user-supplied instruction assets.
    auto sw = rgap_test::math_sample("m2", "sw", "Hesabu 3*4.", "12");
    CHECK_THROWS_AS(build_prompt(sw, instructions), Error);
    instructions.set("sw", "Kumbuka: weka jibu la mwisho katika \\boxed{}.");
    CHECK(build_prompt(sw, instructions).find("Kumbuka") != std::string::npos);
}

TEST_CASE("choice prompt lists options A..J with the closing instruction") {
    InstructionTable instructions;
    auto sample = rgap_test::choice_sample("c1", "en", "Pick one.", {"first", "second", "third"},
                                           "B");
    std::string prompt = build_prompt(sample, instructions);
    CHECK(prompt.find("multiple choice questions (with answers) about math") != std::string::npos);
    CHECK(prompt.find("(A) first\n(B) second\n(C) third\n") != std::string::npos);
    CHECK(prompt.find("\"the answer is (X)\"") != std::string::npos);
    CHECK(prompt.find("Answer: Let's think step by step.") != std::string::npos);
}

TEST_CASE("trace truncation respects the token budget") {
    WhitespaceTokenizer tokenizer;
    std::string trace = "a b c d e f g h i j";  // 10 tokens

    CHECK(truncate_trace(trace, 4, tokenizer) == "a b c d ");
    CHECK(truncate_trace(trace, 512, tokenizer) == trace);  // unchanged when shorter
    CHECK_THROWS_AS(truncate_trace(trace, 0, tokenizer), Error);

    // The standard cutoff grid is accepted.
    for (std::int64_t cutoff : {512, 1024, 2048, 4096, 8192}) {
        CHECK(tokenizer.count_tokens(truncate_trace(trace, cutoff, tokenizer)) <= cutoff);
    }
}

TEST_CASE("whitespace tokenizer reconstructs exact prefixes") {
    WhitespaceTokenizer tokenizer;
    std::string text = "  leading space\tand\nnewlines  trailing  ";
    CHECK(tokenizer.truncate(text, tokenizer.count_tokens(text)) == text);
    std::string two = tokenizer.truncate(text, 2);
    CHECK(text.rfind(two, 0) == 0);  // an exact prefix
    CHECK(tokenizer.count_tokens(two) == 2);
    CHECK(tokenizer.count_tokens("") == 0);
}
