#include "rgap/labels.hpp"

#include <fstream>
#include <map>

#include "rgap/common.hpp"

namespace rgap {

const char* failure_label_name(FailureLabel label) {
    switch (label) {
        case FailureLabel::Understood: return "0";
        case FailureLabel::NotUnderstood: return "1";
        case FailureLabel::Excluded: return "excluded";
    }
    return "excluded";
}

FailureLabel failure_label_from_name(const std::string& name) {
    if (name == "0") return FailureLabel::Understood;
    if (name == "1") return FailureLabel::NotUnderstood;
    if (name == "excluded") return FailureLabel::Excluded;
    fail(ErrorKind::Schema, "unknown label: " + name);
}

json LabeledInstance::to_json() const {
    json j;
    j["sample_id"] = sample_id;
    j["language"] = language;
    j["seed"] = seed;
    j["label"] = failure_label_name(label);
    j["correct_base"] = correct_base;
    j["correct_U"] = correct_u;
    return j;
}

LabeledInstance LabeledInstance::from_json(const json& j) {
    LabeledInstance li;
    li.sample_id = j.at("sample_id").get<std::string>();
    li.language = j.at("language").get<std::string>();
    li.seed = j.at("seed").get<std::uint64_t>();
    li.label = failure_label_from_name(j.at("label").get<std::string>());
    li.correct_base = j.at("correct_base").get<bool>();
    li.correct_u = j.at("correct_U").get<bool>();
    return li;
}

std::vector<LabeledInstance> build_labels(const std::vector<CorrectnessRecord>& base_verdicts,
                                          const std::vector<CorrectnessRecord>& u_verdicts,
                                          std::uint64_t seed) {
    std::map<std::string, const CorrectnessRecord*> u_by_id;
    for (const auto& v : u_verdicts) u_by_id[v.sample_id] = &v;

    std::string missing;
    std::vector<LabeledInstance> labels;
    labels.reserve(base_verdicts.size());
    std::map<std::string, bool> base_seen;
    for (const auto& base : base_verdicts) {
        base_seen[base.sample_id] = true;
        auto it = u_by_id.find(base.sample_id);
        if (it == u_by_id.end()) {
            missing += " " + base.sample_id;
            continue;
        }
        LabeledInstance li;
        li.sample_id = base.sample_id;
        li.language = base.language;
        li.seed = seed;
        li.correct_base = base.correct;
        li.correct_u = it->second->correct;
        if (base.correct)
            li.label = FailureLabel::Understood;
        else if (it->second->correct)
            li.label = FailureLabel::NotUnderstood;
        else
            li.label = FailureLabel::Excluded;
        labels.push_back(std::move(li));
    }
    for (const auto& u : u_verdicts)
        if (!base_seen.count(u.sample_id)) missing += " " + u.sample_id;
    if (!missing.empty())
        fail(ErrorKind::Incomplete, "label coverage mismatch; unmatched sample ids:" + missing);
    return labels;
}

LabelCounts count_labels(const std::vector<LabeledInstance>& labels) {
    LabelCounts c;
    for (const auto& li : labels) {
        switch (li.label) {
            case FailureLabel::Understood: ++c.understood; break;
            case FailureLabel::NotUnderstood: ++c.not_understood; break;
            case FailureLabel::Excluded: ++c.excluded; break;
        }
    }
    return c;
}

void save_labels(const std::string& path, const std::vector<LabeledInstance>& labels) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Config, "cannot write label file: " + path);
    for (const auto& li : labels) out << canonical_json(li.to_json()) << "\n";
}

std::vector<LabeledInstance> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Upstream, "missing label file: " + path);
    std::vector<LabeledInstance> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) fail(ErrorKind::Schema, "invalid label line in " + path);
        labels.push_back(LabeledInstance::from_json(j));
    }
    return labels;
}

}  // namespace rgap
