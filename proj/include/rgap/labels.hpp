#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rgap/types.hpp"

namespace rgap {

enum class FailureLabel { Understood = 0, NotUnderstood = 1, Excluded };

const char* failure_label_name(FailureLabel label);
FailureLabel failure_label_from_name(const std::string& name);

struct LabeledInstance {
    std::string sample_id;
    std::string language;
    std::uint64_t seed = 0;
    FailureLabel label = FailureLabel::Excluded;
    bool correct_base = false;
    bool correct_u = false;

    json to_json() const;
    static LabeledInstance from_json(const json& j);
};

struct CorrectnessRecord {
    std::string sample_id;
    std::string language;
    bool correct = false;
};

// Ground truth from Base and understanding-intervention verdicts for one
// seed: correct under Base -> understood (0); wrong under Base but correct
// under the intervention -> not understood (1); wrong under both ->
// excluded (beyond the model's reasoning capability, kept with its flag).
std::vector<LabeledInstance> build_labels(const std::vector<CorrectnessRecord>& base_verdicts,
                                          const std::vector<CorrectnessRecord>& u_verdicts,
                                          std::uint64_t seed);

struct LabelCounts {
    std::size_t understood = 0;
    std::size_t not_understood = 0;
    std::size_t excluded = 0;
    std::size_t total() const { return understood + not_understood + excluded; }
};

LabelCounts count_labels(const std::vector<LabeledInstance>& labels);

void save_labels(const std::string& path, const std::vector<LabeledInstance>& labels);
std::vector<LabeledInstance> load_labels(const std::string& path);

}  // namespace rgap
