#include <doctest.h>

#include "rgap/common.hpp"
#include "rgap/extraction.hpp"
#include "rgap/scripted.hpp"
#include "test_helpers.hpp"

using namespace rgap;
using rgap_test::basic_fixture;

namespace {

GenerateRequest request_for(const Sample& sample, std::uint64_t seed) {
    GenerateRequest r;
    r.sample = sample;
    r.prompt = sample.question;
    r.sampling.seed = seed;
    return r;
}

}  // namespace

TEST_CASE("scripted backend is a pure function of (sample, mode, seed)") {
    auto fixture = basic_fixture();
    ScriptedFixture::Generation g;
    g.trace = "canned thinking";
    g.response = "\\boxed{7}";
    fixture.generations[ScriptedFixture::generation_key("s1", "base", 32)] = g;
    ScriptedBackend backend(fixture);

    auto sample = rgap_test::math_sample("s1", "en", "q", "7");
    auto req = request_for(sample, 32);
    req.capture = {Capture::Topk, Capture::PromptNll, Capture::Hidden};
    GenerationRecord first = backend.generate(req);
    GenerationRecord second = backend.generate(req);
    CHECK(first == second);
    CHECK(first.trace == "canned thinking");
    CHECK(first.response == "\\boxed{7}");
    CHECK(backend.generate_call_count() == 2);
}

TEST_CASE("prefix forcing: the returned trace begins with the prefix") {
    auto fixture = basic_fixture();
    ScriptedFixture::Generation g;
    g.trace = "continues here";
    fixture.generations[ScriptedFixture::generation_key("s1", "U", 32)] = g;
    ScriptedBackend backend(fixture);

    auto req = request_for(rgap_test::math_sample("s1", "en", "q", "7"), 32);
    req.trace_prefix = "P: ";
    GenerationRecord record = backend.generate(req);
    CHECK(record.trace.rfind("P: ", 0) == 0);
    CHECK(record.trace == "P: continues here");
}

TEST_CASE("trace cutoff truncates and flips the finish reason") {
    auto fixture = basic_fixture();
    ScriptedFixture::Generation g;
    g.trace = "t1 t2 t3 t4 t5 t6 t7 t8 t9 t10";  // 10 tokens
    fixture.generations[ScriptedFixture::generation_key("s1", "base", 32)] = g;
    ScriptedBackend backend(fixture);

    auto req = request_for(rgap_test::math_sample("s1", "en", "q", "7"), 32);
    req.trace_cutoff = 4;
    GenerationRecord record = backend.generate(req);
    CHECK(record.trace_token_count == 4);
    CHECK(record.trace == "t1 t2 t3 t4 ");
    CHECK(record.finish_reason == FinishReason::Length);

    req.trace_cutoff = 512;
    record = backend.generate(req);
    CHECK(record.trace == g.trace);
    CHECK(record.finish_reason == FinishReason::Stop);
}

TEST_CASE("capability gates reject unsupported captures") {
    auto fixture = basic_fixture();
    fixture.capabilities.supports_hidden_state = false;
    fixture.capabilities.hidden_dim.reset();
    ScriptedBackend backend(fixture);

    auto req = request_for(rgap_test::math_sample("s1", "en", "q", "7"), 32);
    req.capture = {Capture::Hidden};
    try {
        backend.generate(req);
        FAIL("expected configuration error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
    }
}

TEST_CASE("prefix/cutoff properties hold over random scripted behaviors") {
    std::mt19937_64 rng(5);
    WhitespaceTokenizer tokenizer;
    for (int trial = 0; trial < 40; ++trial) {
        auto fixture = basic_fixture();
        std::string trace;
        int tokens = 1 + static_cast<int>(rng() % 40);
        for (int t = 0; t < tokens; ++t)
            trace += "w" + std::to_string(rng() % 1000) + (t + 1 < tokens ? " " : "");
        ScriptedFixture::Generation g;
        g.trace = trace;
        fixture.default_generation = g;
        ScriptedBackend backend(fixture);

        auto req = request_for(rgap_test::math_sample("s", "en", "q", "1"), 32);
        if (rng() % 2 == 0) req.trace_prefix = "PFX" + std::to_string(rng() % 10) + " ";
        std::int64_t cutoff = 1 + static_cast<std::int64_t>(rng() % 50);
        if (rng() % 2 == 0) req.trace_cutoff = cutoff;

        GenerationRecord record = backend.generate(req);
        if (req.trace_prefix) CHECK(record.trace.rfind(*req.trace_prefix, 0) == 0);
        if (req.trace_cutoff)
            CHECK(tokenizer.count_tokens(record.trace) <= *req.trace_cutoff);
    }
}

TEST_CASE("scripted translator extracts wrapped math translations") {
    auto fixture = basic_fixture();
    fixture.translations["s1"] = {"<translated>What is 2+2?</translated>"};
    ScriptedTranslator translator(fixture);

    auto result = translator.translate(rgap_test::math_sample("s1", "sw", "2+2 ni nini?", "4"));
    CHECK_FALSE(result.is_payload);
    CHECK(result.text == "What is 2+2?");
    CHECK(result.as_prefix_text() == "What is 2+2?");
}

TEST_CASE("translator repairs once then fails on missing tags") {
    auto fixture = basic_fixture();
    fixture.translations["s1"] = {"no tags here", "still no tags"};
    ScriptedTranslator translator(fixture);
    try {
        translator.translate(rgap_test::math_sample("s1", "sw", "swali", "4"));
        FAIL("expected translation-parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
    }
    CHECK(translator.call_count() == 1);

    // A bad first reply followed by a good one succeeds via the repair retry.
    auto fixture2 = basic_fixture();
    fixture2.translations["s1"] = {"garbled", "<translated>fixed</translated>"};
    ScriptedTranslator second(fixture2);
    CHECK(second.translate(rgap_test::math_sample("s1", "sw", "swali", "4")).text == "fixed");
}

TEST_CASE("choice translation preserves payload keys and order") {
    auto sample = rgap_test::choice_sample("c1", "sw", "Chagua moja.", {"moja", "mbili"}, "A");
    ordered_json payload = build_choice_payload(sample);
    // Translated reply with identical keys in identical order.
    ordered_json reply;
    reply["question"] = "Pick one.";
    reply["option_0"] = "one";
    reply["option_1"] = "two";

    auto fixture = basic_fixture();
    fixture.translations["c1"] = {reply.dump()};
    ScriptedTranslator translator(fixture);
    auto result = translator.translate(sample);
    REQUIRE(result.is_payload);
    auto it = result.payload.begin();
    CHECK(it.key() == "question");
    CHECK((++it).key() == "option_0");
    CHECK((++it).key() == "option_1");
    CHECK(result.as_prefix_text() == "Pick one.\n(A) one\n(B) two");

    // Reordered keys are malformed even with the right key set.
    ordered_json reordered;
    reordered["option_0"] = "one";
    reordered["question"] = "Pick one.";
    reordered["option_1"] = "two";
    auto fixture2 = basic_fixture();
    fixture2.translations["c1"] = {reordered.dump(), reordered.dump()};
    ScriptedTranslator strict(fixture2);
    CHECK_THROWS_AS(strict.translate(sample), Error);
}

TEST_CASE("judge monitor parses the structured verdict") {
    auto fixture = basic_fixture();
    fixture.monitor_responses["s1"] = {
        R"({"understood": false, "Reason": "misread the units"})"};
    fixture.monitor_responses["s2"] = {R"({"understood": true})"};
    fixture.monitor_responses["s3"] = {"prose only", "still prose"};
    ScriptedJudge judge(fixture);

    auto sample1 = rgap_test::math_sample("s1", "sw", "q", "1");
    MonitorVerdict v1 = judge.monitor(sample1, "trace");
    CHECK_FALSE(v1.understood);
    CHECK(v1.reason == "misread the units");
    CHECK_FALSE(v1.parse_failed);

    MonitorVerdict v2 = judge.monitor(rgap_test::math_sample("s2", "en", "q", "1"), "trace");
    CHECK(v2.understood);
    CHECK(v2.reason.empty());

    // Unparseable twice: defaults to understood with the parse flag set.
    MonitorVerdict v3 = judge.monitor(rgap_test::math_sample("s3", "en", "q", "1"), "trace");
    CHECK(v3.understood);
    CHECK(v3.parse_failed);
}

TEST_CASE("judge translation assessment enforces the 0..100 range") {
    auto fixture = basic_fixture();
    fixture.assessment_responses["good"] = {"95"};
    fixture.assessment_responses["bad"] = {"103", "103"};
    fixture.assessment_responses["recovered"] = {"not a number", "88"};
    ScriptedJudge judge(fixture);

    CHECK(judge.assess_translation("src", "good", "sw", "en") == 95);
    CHECK(judge.assess_translation("src", "recovered", "sw", "en") == 88);
    try {
        judge.assess_translation("src", "bad", "sw", "en");
        FAIL("expected assessment error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
    }
}

TEST_CASE("judge extraction honors the output contracts") {
    auto fixture = basic_fixture();
    fixture.extraction_responses["math-q"] = {"\\boxed{42}"};
    fixture.extraction_responses["choice-opts"] = {"Answer: C"};
    fixture.extraction_responses["none-q"] = {"\\boxed{NO_ANSWER}"};
    fixture.extraction_responses["broken"] = {"I refuse", "still refusing"};
    ScriptedJudge judge(fixture);

    CHECK(judge.extract("math-q", "trace", AnswerType::MathExpression) == "42");
    CHECK(judge.extract("choice-opts", "trace", AnswerType::ChoiceLetter) == "C");
    CHECK(is_no_answer(judge.extract("none-q", "trace", AnswerType::MathExpression)));
    CHECK_THROWS_AS(judge.extract("broken", "trace", AnswerType::MathExpression), Error);
}

TEST_CASE("fixture files round-trip") {
    rgap_test::TempDir dir("fixture");
    auto fixture = basic_fixture();
    ScriptedFixture::Generation g;
    g.trace = "alpha beta";
    g.response = "\\boxed{1}";
    g.hidden_state = std::vector<double>{0.5, -0.5};
    g.hidden_state_by_cutoff[2] = {0.125, 0.25};
    fixture.generations[ScriptedFixture::generation_key("s1", "base", 42)] = g;
    fixture.translations["s1"] = {"<translated>x</translated>"};
    fixture.reflections["s1"] = " NO";

    auto path = (dir.path() / "fixture.json").string();
    fixture.save(path);
    ScriptedFixture loaded = ScriptedFixture::load(path);
    CHECK(loaded.to_json() == fixture.to_json());
}
