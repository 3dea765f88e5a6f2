#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "rgap/scripted.hpp"
#include "rgap/types.hpp"

namespace rgap_test {

namespace fs = std::filesystem;

// Absolute-tolerance comparison (doctest::Approx is relative).
inline bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

inline fs::path fixture_dir() { return fs::path(RGAP_TEST_FIXTURE_DIR); }

// Unique scratch directory removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = fs::temp_directory_path() /
                ("rgap-" + tag + "-" + std::to_string(rng()) + "-" + std::to_string(::getpid()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

  private:
    fs::path path_;
};

inline rgap::Sample math_sample(const std::string& id, const std::string& language,
                                const std::string& question, const std::string& gold,
                                const std::string& x_dom = "") {
    rgap::Sample s;
    s.id = id;
    s.dataset = rgap::DatasetId::Custom;
    s.language = rgap::LanguageTag::for_code(language);
    s.question = question;
    s.x_dom = x_dom.empty() ? question : x_dom;
    s.gold = gold;
    s.answer_type = rgap::AnswerType::MathExpression;
    return s;
}

inline rgap::Sample choice_sample(const std::string& id, const std::string& language,
                                  const std::string& question,
                                  const std::vector<std::string>& options,
                                  const std::string& gold) {
    rgap::Sample s;
    s.id = id;
    s.dataset = rgap::DatasetId::Custom;
    s.language = rgap::LanguageTag::for_code(language);
    s.question = question;
    s.x_dom = question;
    s.options = options;
    s.gold = gold;
    s.answer_type = rgap::AnswerType::ChoiceLetter;
    s.subject = "math";
    return s;
}

// Minimal scripted fixture with full capabilities and a default generation.
inline rgap::ScriptedFixture basic_fixture(int hidden_dim = 8) {
    rgap::ScriptedFixture f;
    f.backend_id = "scripted-test";
    f.capabilities.supports_trace_prefix = true;
    f.capabilities.supports_topk_logprobs = true;
    f.capabilities.supports_prompt_logprobs = true;
    f.capabilities.supports_hidden_state = true;
    f.capabilities.hidden_dim = hidden_dim;
    rgap::ScriptedFixture::Generation d;
    d.trace = "default trace content for tests";
    d.response = "\\boxed{0}";
    f.default_generation = d;
    return f;
}

inline void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << content;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace rgap_test
