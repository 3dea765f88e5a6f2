#include <doctest.h>

#include "rgap/common.hpp"
#include "rgap/selective.hpp"
#include "test_helpers.hpp"

using namespace rgap;
using rgap_test::basic_fixture;

namespace {

struct SandwichWorld {
    std::vector<Sample> samples;
    ScriptedFixture fixture;
    InstructionTable instructions;
    std::set<std::string> broken_under_base;  // translation fixes exactly these

    SandwichWorld() {
        instructions.set("sw", "Weka jibu katika \\boxed{}.");
        instructions.set("te", "\\boxed{} instruction.");
        fixture = basic_fixture();
        fixture.translations["*"] = {"<translated>the question in English</translated>"};

        auto add_sample = [&](const std::string& language, int index, bool base_correct) {
            std::string id = language + "-" + std::to_string(index);
            samples.push_back(rgap_test::math_sample(id, language, "question " + id, "1"));
            if (!base_correct) broken_under_base.insert(id);
            for (std::uint64_t seed : {32u, 42u}) {
                ScriptedFixture::Generation base_gen;
                base_gen.trace = "base thinking for " + id;
                base_gen.response = base_correct ? "\\boxed{1}" : "\\boxed{0}";
                fixture.generations[ScriptedFixture::generation_key(id, "base", seed)] = base_gen;

                ScriptedFixture::Generation u_gen;  // the intervention fixes everything
                u_gen.trace = "guided thinking for " + id;
                u_gen.response = "\\boxed{1}";
                fixture.generations[ScriptedFixture::generation_key(id, "U", seed)] = u_gen;
            }
        };
        add_sample("en", 0, true);
        add_sample("en", 1, true);
        add_sample("sw", 0, false);
        add_sample("sw", 1, false);
        add_sample("te", 0, false);
        add_sample("te", 1, true);
    }
};

}  // namespace

TEST_CASE("selective translation sandwich on the scripted fixture") {
    SandwichWorld world;
    ScriptedBackend backend(world.fixture);
    ScriptedTranslator translator(world.fixture);

    SelectiveContext ctx;
    ctx.backend = &backend;
    ctx.translator = &translator;
    ctx.instructions = &world.instructions;
    ctx.seeds = {32, 42};

    SelectiveRunResult base = run_baseline(world.samples, TranslationStrategy::Base, ctx);
    CHECK(base.overall_usage == 0.0);
    for (const auto& [language, usage] : base.usage_by_language) CHECK(usage == 0.0);
    CHECK(base.accuracy_by_language.at("en") == doctest::Approx(100.0));
    CHECK(base.accuracy_by_language.at("sw") == doctest::Approx(0.0));
    CHECK(base.accuracy_by_language.at("te") == doctest::Approx(50.0));

    ScriptedDetector detector(world.broken_under_base);
    SelectiveRunResult selective = run_selective(world.samples, detector, ctx);

    SelectiveRunResult full = run_baseline(world.samples, TranslationStrategy::Full, ctx);
    CHECK(full.overall_usage == doctest::Approx(100.0));
    CHECK(full.overall_accuracy == doctest::Approx(100.0));

    // Sandwich: base <= selective <= full, per language and overall.
    for (const auto& [language, acc] : base.accuracy_by_language) {
        CHECK(selective.accuracy_by_language.at(language) >= acc);
        CHECK(full.accuracy_by_language.at(language) >=
              selective.accuracy_by_language.at(language));
    }
    CHECK(base.overall_accuracy <= selective.overall_accuracy);
    CHECK(selective.overall_accuracy <= full.overall_accuracy);

    // Usage accounting is exact: flagged / total per language.
    CHECK(selective.usage_by_language.at("en") == doctest::Approx(0.0));
    CHECK(selective.usage_by_language.at("sw") == doctest::Approx(100.0));
    CHECK(selective.usage_by_language.at("te") == doctest::Approx(50.0));
    // 6 of 12 (sample, seed) items flagged.
    CHECK(selective.overall_usage == doctest::Approx(100.0 * 6.0 / 12.0));
    CHECK(selective.translation_failures == 0);
}

TEST_CASE("no-op detector path equals the base run") {
    SandwichWorld world;
    ScriptedBackend backend(world.fixture);
    ScriptedTranslator translator(world.fixture);

    SelectiveContext ctx;
    ctx.backend = &backend;
    ctx.translator = &translator;
    ctx.instructions = &world.instructions;
    ctx.seeds = {32};

    SelectiveRunResult base = run_baseline(world.samples, TranslationStrategy::Base, ctx);
    ScriptedDetector nothing({});
    SelectiveRunResult selective = run_selective(world.samples, nothing, ctx);

    CHECK(selective.accuracy_by_language == base.accuracy_by_language);
    CHECK(selective.overall_accuracy == doctest::Approx(base.overall_accuracy));
    CHECK(selective.overall_usage == 0.0);
}

TEST_CASE("saturating detector path equals the full-translation run") {
    SandwichWorld world;
    ScriptedBackend backend(world.fixture);
    ScriptedTranslator translator(world.fixture);

    SelectiveContext ctx;
    ctx.backend = &backend;
    ctx.translator = &translator;
    ctx.instructions = &world.instructions;
    ctx.seeds = {32};

    std::set<std::string> all_ids;
    for (const auto& s : world.samples) all_ids.insert(s.id);
    ScriptedDetector everything(all_ids);
    SelectiveRunResult selective = run_selective(world.samples, everything, ctx);
    SelectiveRunResult full = run_baseline(world.samples, TranslationStrategy::Full, ctx);

    CHECK(selective.accuracy_by_language == full.accuracy_by_language);
    CHECK(selective.overall_usage == doctest::Approx(100.0));
}

TEST_CASE("the selective pipeline is deterministic") {
    SandwichWorld world;
    ScriptedBackend backend(world.fixture);
    ScriptedTranslator translator(world.fixture);

    SelectiveContext ctx;
    ctx.backend = &backend;
    ctx.translator = &translator;
    ctx.instructions = &world.instructions;
    ctx.seeds = {32, 42};

    ScriptedDetector detector(world.broken_under_base);
    auto first = run_selective(world.samples, detector, ctx).to_json().dump();
    auto second = run_selective(world.samples, detector, ctx).to_json().dump();
    CHECK(first == second);
}

TEST_CASE("translation failures keep stage-1 output and are tallied") {
    SandwichWorld world;
    // Every translation reply is malformed.
    world.fixture.translations["*"] = {"no tags", "no tags"};
    ScriptedBackend backend(world.fixture);
    ScriptedTranslator translator(world.fixture);

    SelectiveContext ctx;
    ctx.backend = &backend;
    ctx.translator = &translator;
    ctx.instructions = &world.instructions;
    ctx.seeds = {32};

    ScriptedDetector detector(world.broken_under_base);
    SelectiveRunResult result = run_selective(world.samples, detector, ctx);
    // Flagged items fell back to their stage-1 outputs: accuracy equals base.
    CHECK(result.accuracy_by_language.at("sw") == doctest::Approx(0.0));
    CHECK(result.translation_failures == 3);
    // Usage still reports the flag decisions.
    CHECK(result.usage_by_language.at("sw") == doctest::Approx(100.0));
}

TEST_CASE("full strategy requires a translator") {
    SandwichWorld world;
    ScriptedBackend backend(world.fixture);
    SelectiveContext ctx;
    ctx.backend = &backend;
    ctx.instructions = &world.instructions;
    ctx.seeds = {32};
    CHECK_THROWS_AS(run_baseline(world.samples, TranslationStrategy::Full, ctx), Error);
    CHECK_NOTHROW(run_baseline(world.samples, TranslationStrategy::Base, ctx));
}

TEST_CASE("full translation with identity translator equals the guided run") {
    // With x_dom = question and the translator echoing the question, the
    // full-translation path is plumbing-identical to the intervention run.
    SandwichWorld world;
    world.fixture.translations.clear();
    for (const auto& s : world.samples)
        world.fixture.translations[s.id] = {"<translated>" + s.question + "</translated>"};
    ScriptedBackend backend(world.fixture);
    ScriptedTranslator translator(world.fixture);

    SelectiveContext ctx;
    ctx.backend = &backend;
    ctx.translator = &translator;
    ctx.instructions = &world.instructions;
    ctx.seeds = {32};

    SelectiveRunResult full = run_baseline(world.samples, TranslationStrategy::Full, ctx);
    // Every canned U generation answers correctly, so this equals the w/U run.
    for (const auto& [language, acc] : full.accuracy_by_language)
        CHECK(acc == doctest::Approx(100.0));
    CHECK(full.overall_usage == doctest::Approx(100.0));
}
