#include "rgap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "rgap/attribution.hpp"
#include "rgap/common.hpp"
#include "rgap/digest.hpp"
#include "rgap/langdist.hpp"
#include "rgap/parallel.hpp"
#include "rgap/quality.hpp"
#include "rgap/stats.hpp"

namespace rgap {

namespace fs = std::filesystem;

const char* dataset_role_name(DatasetRole role) {
    return role == DatasetRole::Eval ? "eval" : "calibration";
}

void write_json_file(const fs::path& path, const json& j) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Config, "cannot write artifact: " + path.string());
    out << j.dump(2) << "\n";
}

json read_json_file(const fs::path& path, const char* producer) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Upstream,
             "missing artifact " + path.string() + "; run `" + producer + "` first");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::Schema, "invalid artifact JSON: " + path.string());
    return j;
}

namespace {

std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

json threshold_to_json(const ThresholdResult& r) {
    json j;
    if (std::isinf(r.threshold))
        j["threshold"] = r.threshold > 0 ? "Infinity" : "-Infinity";
    else
        j["threshold"] = r.threshold;
    j["f1"] = r.f1;
    j["degenerate"] = r.degenerate;
    return j;
}

double threshold_from_json(const json& j) {
    const auto& t = j.at("threshold");
    if (t.is_string()) {
        std::string s = t.get<std::string>();
        if (s == "Infinity") return std::numeric_limits<double>::infinity();
        if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
        fail(ErrorKind::Schema, "unknown threshold literal: " + s);
    }
    return t.get<double>();
}

constexpr const char* kSupervisedTypes[] = {"prober", "text-classifier"};

bool is_supervised(const std::string& type) {
    for (const char* t : kSupervisedTypes)
        if (type == t) return true;
    return false;
}

bool is_threshold_signal(const std::string& type) {
    return type == "avg-confidence" || type == "min-confidence" || type == "input-nll";
}

}  // namespace

Pipeline::Pipeline(PipelineConfig config)
    : config_(std::move(config)), out_dir_(config_.output_dir) {
    instructions_.load_json(config_.instruction_assets);
    closing_patterns_.load_json(config_.closing_pattern_assets);
}

fs::path Pipeline::out(DatasetRole role) const { return out_dir_ / dataset_role_name(role); }

fs::path Pipeline::records_file(DatasetRole role, Mode mode, std::uint64_t seed) const {
    return out(role) / "records" / mode_name(mode) / ("seed-" + std::to_string(seed) + ".jsonl");
}

fs::path Pipeline::scores_file(DatasetRole role, Mode mode) const {
    return out(role) / "scores" / (std::string(mode_name(mode)) + ".json");
}

fs::path Pipeline::verdicts_file(DatasetRole role, Mode mode) const {
    return out(role) / "verdicts" / (std::string(mode_name(mode)) + ".jsonl");
}

fs::path Pipeline::labels_file(DatasetRole role) const {
    return out(role) / "labels" / "labels.jsonl";
}

fs::path Pipeline::signals_file(DatasetRole role) const {
    return out(role) / "signals" / ("signals-" + cutoff_label(config_.cutoff) + ".jsonl");
}

fs::path Pipeline::detector_artifact_path() const {
    return out_dir_ / "detectors" /
           (config_.detector.type + "-" + cutoff_label(config_.cutoff) + ".json");
}

fs::path Pipeline::threshold_path(const std::string& kind) const {
    return out_dir_ / "calibration" /
           ("threshold-" + kind + "-" + cutoff_label(config_.cutoff) + ".json");
}

void Pipeline::ensure_backend() {
    if (backend_) return;
    if (config_.backend.type == "scripted") {
        scripted_fixture_ =
            std::make_shared<ScriptedFixture>(ScriptedFixture::load(config_.backend.fixture));
        if (config_.backend.capability_overrides)
            scripted_fixture_->capabilities = *config_.backend.capability_overrides;
        backend_ = std::make_unique<ScriptedBackend>(*scripted_fixture_);
    } else {
        BackendCapabilities caps;
        caps.supports_trace_prefix = true;
        caps.supports_topk_logprobs = true;
        if (config_.backend.capability_overrides) caps = *config_.backend.capability_overrides;
        backend_ = std::make_unique<HttpBackend>(config_.backend.endpoint, caps);
    }
    if (!config_.cache_dir.empty() && !cache_) {
        cache_lock_ = std::make_unique<DirectoryLock>(config_.cache_dir);
        cache_ = std::make_unique<GenerationCache>(config_.cache_dir);
    }
}

void Pipeline::ensure_translator() {
    if (translator_ || !config_.translator) return;
    if (config_.translator->type == "scripted") {
        std::string path = config_.translator->fixture.empty() ? config_.backend.fixture
                                                               : config_.translator->fixture;
        translator_ = std::make_unique<ScriptedTranslator>(ScriptedFixture::load(path));
    } else {
        translator_ = std::make_unique<HttpTranslator>(config_.translator->endpoint);
    }
}

void Pipeline::ensure_judge() {
    if (judge_ || !config_.judge) return;
    if (config_.judge->type == "scripted") {
        std::string path =
            config_.judge->fixture.empty() ? config_.backend.fixture : config_.judge->fixture;
        judge_ = std::make_unique<ScriptedJudge>(ScriptedFixture::load(path));
    } else {
        judge_ = std::make_unique<HttpJudge>(config_.judge->endpoint);
    }
}

Translator* Pipeline::translator_or_null() {
    ensure_translator();
    return translator_.get();
}

Judge* Pipeline::judge_or_null() {
    ensure_judge();
    return judge_.get();
}

ReasoningBackend& Pipeline::backend() {
    ensure_backend();
    return *backend_;
}

const std::vector<Sample>& Pipeline::samples(DatasetRole role) {
    if (role == DatasetRole::Eval) {
        if (!eval_samples_) {
            eval_samples_ = load_samples(config_.dataset.path);
            if (!config_.languages.empty()) {
                std::set<std::string> keep(config_.languages.begin(), config_.languages.end());
                std::vector<Sample> filtered;
                for (auto& s : *eval_samples_)
                    if (keep.count(s.language.code)) filtered.push_back(std::move(s));
                *eval_samples_ = std::move(filtered);
            }
            if (eval_samples_->empty())
                fail(ErrorKind::Config, "no samples selected from " + config_.dataset.path);
        }
        return *eval_samples_;
    }
    if (!config_.calibration_dataset)
        fail(ErrorKind::Config,
             "this command needs a calibration_dataset entry in the config");
    if (!calibration_samples_) {
        calibration_samples_ = load_samples(config_.calibration_dataset->path);
        if (calibration_samples_->empty())
            fail(ErrorKind::Config, "calibration dataset is empty");
    }
    return *calibration_samples_;
}

std::vector<Mode> Pipeline::modes_for(DatasetRole role) const {
    if (role == DatasetRole::Calibration) return {Mode::Base, Mode::U};
    std::vector<Mode> modes;
    for (Mode m : config_.modes)
        if (m == Mode::Base || m == Mode::U || m == Mode::T || m == Mode::UT) modes.push_back(m);
    return modes;
}

GenerationRecord Pipeline::run_generation(const Sample& sample, Mode mode, std::uint64_t seed,
                                          std::optional<std::int64_t> cutoff,
                                          bool with_captures) {
    InterventionPlan plan = apply_intervention(sample, intervention_mode_from(mode),
                                               config_.prefix_variant, instructions_);
    GenerateRequest request;
    request.sample = sample;
    request.prompt = plan.prompt;
    request.trace_prefix = plan.trace_prefix;
    request.sampling = config_.sampling;
    request.sampling.seed = seed;
    request.trace_cutoff = cutoff;

    const auto& caps = backend_->capabilities();
    json capture_names = json::array();
    if (with_captures) {
        if (caps.supports_topk_logprobs) {
            request.capture.insert(Capture::Topk);
            capture_names.push_back("topk");
        }
        if (caps.supports_prompt_logprobs) {
            request.capture.insert(Capture::PromptNll);
            capture_names.push_back("prompt_nll");
        }
        if (caps.supports_hidden_state) {
            request.capture.insert(Capture::Hidden);
            capture_names.push_back("hidden");
        }
    }

    std::map<std::string, json> extras;
    extras["config_digest"] = config_.generation_digest();
    extras["variant"] = prefix_variant_name(config_.prefix_variant);
    if (cutoff) extras["trace_cutoff"] = *cutoff;
    if (!capture_names.empty()) extras["captures"] = capture_names;

    if (cache_) {
        std::string key =
            cache_key(sample.id, mode, seed, backend_->id(), request.sampling, extras);
        if (auto hit = cache_->lookup(key)) return *hit;
        GenerationRecord record = backend_->generate(request);
        record.mode = mode;
        record.seed = seed;
        cache_->store(key, record);
        return record;
    }
    GenerationRecord record = backend_->generate(request);
    record.mode = mode;
    record.seed = seed;
    return record;
}

void Pipeline::generate_role(DatasetRole role) {
    const auto& role_samples = samples(role);
    BlobStore blobs(out(role) / "records" / "blobs");
    for (Mode mode : modes_for(role)) {
        // Detection signals come from the Base setting; capture them there.
        bool with_captures = mode == Mode::Base;
        for (std::uint64_t seed : config_.seeds) {
            std::vector<GenerationRecord> records(role_samples.size());
            parallel_for(role_samples.size(), [&](std::size_t i) {
                records[i] = run_generation(role_samples[i], mode, seed, std::nullopt,
                                            with_captures);
            });
            save_records(records_file(role, mode, seed), records, blobs);
        }
    }
}

void Pipeline::generate() {
    ensure_backend();
    generate_role(DatasetRole::Eval);
    if (config_.calibration_dataset) generate_role(DatasetRole::Calibration);

    RunManifest manifest;
    manifest.config_digest = config_.generation_digest();
    manifest.dataset_refs.push_back(config_.dataset.path);
    if (config_.calibration_dataset)
        manifest.dataset_refs.push_back(config_.calibration_dataset->path);
    std::set<std::string> languages;
    for (const auto& s : samples(DatasetRole::Eval)) languages.insert(s.language.code);
    manifest.languages.assign(languages.begin(), languages.end());
    manifest.modes = modes_for(DatasetRole::Eval);
    manifest.seeds = config_.seeds;
    manifest.backend_id = backend_->id();
    manifest.created_at = iso_timestamp();
    json manifest_json = manifest.to_json();
    if (!config_.overrides.empty()) manifest_json["cli_overrides"] = config_.overrides;
    write_json_file(out_dir_ / "manifest.json", manifest_json);
}

std::vector<GenerationRecord> Pipeline::load_mode_records(DatasetRole role, Mode mode,
                                                          const char* producer) {
    BlobStore blobs(out(role) / "records" / "blobs");
    std::vector<GenerationRecord> all;
    for (std::uint64_t seed : config_.seeds) {
        fs::path file = records_file(role, mode, seed);
        if (!fs::exists(file))
            fail(ErrorKind::Upstream,
                 "missing records " + file.string() + "; run `" + producer + "` first");
        auto records = load_records(file, blobs);
        all.insert(all.end(), std::make_move_iterator(records.begin()),
                   std::make_move_iterator(records.end()));
    }
    return all;
}

ScoringOptions Pipeline::scoring_options() {
    ScoringOptions options;
    options.closing_patterns = closing_patterns_;
    if (config_.llm_extraction_fallback) options.fallback = judge_or_null();
    return options;
}

void Pipeline::score_role(DatasetRole role) {
    const auto& role_samples = samples(role);
    std::set<std::string> language_set;
    for (const auto& s : role_samples) language_set.insert(s.language.code);
    std::vector<std::string> languages(language_set.begin(), language_set.end());

    for (Mode mode : modes_for(role)) {
        auto records = load_mode_records(role, mode, "generate");
        ScoringOptions options = scoring_options();
        options.answer_source = answer_source_for_mode(mode);
        auto scored = score_records(records, role_samples, options);
        AccuracyTable table = accuracy_from_scored(scored, languages, config_.seeds);

        json scores_json;
        scores_json["mode"] = mode_name(mode);
        scores_json["seeds"] = config_.seeds;
        json cells = json::object();
        json per_seed = json::object();
        json seed_mean = json::object();
        for (const auto& [language, seed_cells] : table.cells) {
            json lang_cells = json::object();
            json lang_acc = json::object();
            for (const auto& [seed, cell] : seed_cells) {
                lang_cells[std::to_string(seed)] = {{"correct", cell.correct},
                                                    {"total", cell.total}};
                lang_acc[std::to_string(seed)] = cell.accuracy();
            }
            cells[language] = lang_cells;
            per_seed[language] = lang_acc;
            seed_mean[language] = table.seed_mean(language);
        }
        scores_json["cells"] = cells;
        scores_json["per_seed_accuracy"] = per_seed;
        scores_json["seed_mean"] = seed_mean;
        write_json_file(scores_file(role, mode), scores_json);

        fs::create_directories(verdicts_file(role, mode).parent_path());
        std::ofstream verdicts(verdicts_file(role, mode));
        for (const auto& v : scored) {
            json j;
            j["sample_id"] = v.sample_id;
            j["language"] = v.language;
            j["seed"] = v.seed;
            j["answer"] = v.answer;
            j["correct"] = v.correct;
            j["method"] = v.method == ExtractionMethod::Pattern ? "pattern" : "llm-fallback";
            verdicts << canonical_json(j) << "\n";
        }
    }
}

void Pipeline::score() {
    score_role(DatasetRole::Eval);
    if (config_.calibration_dataset) score_role(DatasetRole::Calibration);
}

AccuracyTable Pipeline::load_scores(DatasetRole role, Mode mode, const char* producer) {
    json j = read_json_file(scores_file(role, mode), producer);
    AccuracyTable table;
    table.seeds = config_.seeds;
    for (auto it = j.at("cells").begin(); it != j.at("cells").end(); ++it) {
        for (auto seed_it = it.value().begin(); seed_it != it.value().end(); ++seed_it) {
            AccuracyCell cell;
            cell.correct = seed_it.value().at("correct").get<int>();
            cell.total = seed_it.value().at("total").get<int>();
            table.cells[it.key()][std::stoull(seed_it.key())] = cell;
        }
    }
    return table;
}

void Pipeline::attribute() {
    ModeAccuracy accuracy;
    struct ModeSlot {
        Mode mode;
        std::map<std::string, ModeAccuracy::Entry>* entries;
    };
    ModeSlot slots[] = {{Mode::Base, &accuracy.base},
                        {Mode::U, &accuracy.with_u},
                        {Mode::T, &accuracy.with_t},
                        {Mode::UT, &accuracy.with_ut}};
    for (const auto& slot : slots) {
        AccuracyTable table = load_scores(DatasetRole::Eval, slot.mode, "score");
        for (const auto& [language, cells] : table.cells)
            (*slot.entries)[language] = ModeAccuracy::Entry::from_seeds(table.per_seed(language));
    }

    AttributionResult result = attribute_stages(accuracy, config_.welch_alpha);

    json j;
    j["ceiling_language"] = result.ceiling_language;
    j["ceiling"] = result.ceiling;
    json per_language = json::object();
    for (const auto& [language, a] : result.per_language) {
        per_language[language] = {{"s0", a.s0},
                                  {"su", a.su},
                                  {"st", a.st},
                                  {"sut", a.sut},
                                  {"headroom", a.headroom},
                                  {"phi_u", a.phi.phi_u},
                                  {"phi_t", a.phi.phi_t},
                                  {"phi_r", a.phi.phi_r},
                                  {"phi_r_raw", a.phi.phi_r_raw},
                                  {"residual_clamped", a.phi.residual_clamped},
                                  {"included", a.included},
                                  {"u_share", a.shares.understanding},
                                  {"r_share", a.shares.reasoning},
                                  {"g_share", a.shares.generation}};
    }
    j["per_language"] = per_language;
    j["weighted_shares"] = {{"u", result.aggregate.shares.understanding},
                            {"r", result.aggregate.shares.reasoning},
                            {"g", result.aggregate.shares.generation},
                            {"has_gap", result.aggregate.has_gap}};

    // Reasoning performance ratio per mode (Base ceiling as denominator).
    std::map<std::string, double> base_means;
    for (const auto& [language, entry] : accuracy.base) base_means[language] = entry.seed_mean;
    json ratios = json::object();
    for (const auto& slot : slots) {
        std::map<std::string, double> mode_means;
        for (const auto& [language, entry] : *slot.entries)
            mode_means[language] = entry.seed_mean;
        RatioSummary ratio =
            reasoning_performance_ratio(mode_means, base_means, result.ceiling_language);
        ratios[mode_name(slot.mode)] = {{"mean", ratio.mean},
                                        {"sd", ratio.sd},
                                        {"per_language", ratio.per_language}};
    }
    j["reasoning_performance_ratio"] = ratios;
    write_json_file(out_dir_ / "attribution" / "attribution.json", j);

    // Delimited per-language table plus stacked-share plot data.
    std::ostringstream table;
    table << "language\ts0\tsu\tst\tsut\theadroom\tphi_u\tphi_t\tphi_r\tu_share\tr_share\t"
             "g_share\tincluded\n";
    for (const auto& [language, a] : result.per_language) {
        table << language << "\t" << a.s0 << "\t" << a.su << "\t" << a.st << "\t" << a.sut << "\t"
              << a.headroom << "\t" << a.phi.phi_u << "\t" << a.phi.phi_t << "\t" << a.phi.phi_r
              << "\t" << a.shares.understanding << "\t" << a.shares.reasoning << "\t"
              << a.shares.generation << "\t" << (a.included ? 1 : 0) << "\n";
    }
    fs::create_directories(out_dir_ / "attribution");
    std::ofstream(out_dir_ / "attribution" / "per_language.tsv") << table.str();

    std::ostringstream shares;
    shares << "stage\tweighted_share\n";
    shares << "understanding\t" << result.aggregate.shares.understanding << "\n";
    shares << "reasoning\t" << result.aggregate.shares.reasoning << "\n";
    shares << "generation\t" << result.aggregate.shares.generation << "\n";
    std::ofstream(out_dir_ / "attribution" / "weighted_shares.tsv") << shares.str();
}

namespace {

std::vector<CorrectnessRecord> verdicts_for_seed(const fs::path& path, std::uint64_t seed,
                                                 const char* producer) {
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Upstream,
             "missing verdicts " + path.string() + "; run `" + producer + "` first");
    std::vector<CorrectnessRecord> verdicts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) fail(ErrorKind::Schema, "invalid verdict line in " + path.string());
        if (j.at("seed").get<std::uint64_t>() != seed) continue;
        CorrectnessRecord v;
        v.sample_id = j.at("sample_id").get<std::string>();
        v.language = j.at("language").get<std::string>();
        v.correct = j.at("correct").get<bool>();
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

}  // namespace

void Pipeline::label_role(DatasetRole role) {
    std::vector<LabeledInstance> all;
    for (std::uint64_t seed : config_.seeds) {
        auto base = verdicts_for_seed(verdicts_file(role, Mode::Base), seed, "score");
        auto with_u = verdicts_for_seed(verdicts_file(role, Mode::U), seed, "score");
        auto labels = build_labels(base, with_u, seed);
        LabelCounts counts = count_labels(labels);
        info(std::string(dataset_role_name(role)) + " seed " + std::to_string(seed) + ": " +
             std::to_string(counts.understood) + " understood, " +
             std::to_string(counts.not_understood) + " not understood, " +
             std::to_string(counts.excluded) + " excluded");
        all.insert(all.end(), labels.begin(), labels.end());
    }
    fs::create_directories(labels_file(role).parent_path());
    save_labels(labels_file(role).string(), all);
}

void Pipeline::label() {
    label_role(DatasetRole::Eval);
    if (config_.calibration_dataset) label_role(DatasetRole::Calibration);
}

void Pipeline::signals_role(DatasetRole role) {
    ensure_backend();
    const auto& role_samples = samples(role);
    BlobStore blobs(out(role) / "signals" / "blobs");

    std::vector<DetectionSignals> all(role_samples.size() * config_.seeds.size());
    parallel_for(all.size(), [&](std::size_t i) {
        const Sample& sample = role_samples[i / config_.seeds.size()];
        std::uint64_t seed = config_.seeds[i % config_.seeds.size()];
        // Early-detection contract: the generation itself is truncated at the
        // cutoff, so every captured signal depends only on the kept prefix.
        GenerationRecord record =
            run_generation(sample, Mode::Base, seed, config_.cutoff, /*with_captures=*/true);
        all[i] = extract_signals(record, sample.language.code, config_.topk_k, config_.cutoff);
    });

    fs::create_directories(signals_file(role).parent_path());
    std::ofstream out_file(signals_file(role));
    for (const auto& s : all) {
        json j;
        j["sample_id"] = s.sample_id;
        j["language"] = s.language;
        j["seed"] = s.seed;
        j["avg_conf"] = s.avg_conf;
        j["min_conf"] = s.min_conf;
        j["input_nll"] = s.input_nll;
        j["hidden"] = {{"blob", blobs.put(encode_f64(s.hidden))}, {"dim", s.hidden.size()}};
        j["trace"] = s.trace_text;
        j["cutoff"] = s.trace_cutoff ? json(*s.trace_cutoff) : json("full");
        out_file << canonical_json(j) << "\n";
    }
}

void Pipeline::signals() {
    signals_role(DatasetRole::Eval);
    if (config_.calibration_dataset) signals_role(DatasetRole::Calibration);
}

std::vector<DetectionSignals> Pipeline::load_signals(DatasetRole role, const char* producer) {
    fs::path path = signals_file(role);
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Upstream,
             "missing signals " + path.string() + "; run `" + producer + "` first");
    BlobStore blobs(out(role) / "signals" / "blobs");
    std::vector<DetectionSignals> all;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) fail(ErrorKind::Schema, "invalid signals line in " + path.string());
        DetectionSignals s;
        s.sample_id = j.at("sample_id").get<std::string>();
        s.language = j.at("language").get<std::string>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.avg_conf = j.at("avg_conf").get<double>();
        s.min_conf = j.at("min_conf").get<double>();
        s.input_nll = j.at("input_nll").get<double>();
        s.hidden = decode_f64(blobs.get(j.at("hidden").at("blob").get<std::string>()));
        s.trace_text = j.at("trace").get<std::string>();
        s.trace_cutoff = cutoff_from_json(j.at("cutoff"));
        all.push_back(std::move(s));
    }
    return all;
}

std::vector<LabeledInstance> Pipeline::load_role_labels(DatasetRole role, const char* producer) {
    fs::path path = labels_file(role);
    if (!fs::exists(path))
        fail(ErrorKind::Upstream,
             "missing labels " + path.string() + "; run `" + producer + "` first");
    return load_labels(path.string());
}

namespace {

struct JoinedInstance {
    const DetectionSignals* signals;
    const LabeledInstance* label;
};

// Joins signal rows with 0/1 labels by (sample_id, seed); excluded labels drop.
std::vector<JoinedInstance> join_signals_labels(const std::vector<DetectionSignals>& signals,
                                                const std::vector<LabeledInstance>& labels) {
    std::map<std::pair<std::string, std::uint64_t>, const LabeledInstance*> by_key;
    for (const auto& li : labels)
        if (li.label != FailureLabel::Excluded) by_key[{li.sample_id, li.seed}] = &li;
    std::vector<JoinedInstance> joined;
    for (const auto& s : signals) {
        auto it = by_key.find({s.sample_id, s.seed});
        if (it != by_key.end()) joined.push_back({&s, it->second});
    }
    return joined;
}

std::map<std::string, std::string> questions_by_sample(const std::vector<Sample>& samples) {
    std::map<std::string, std::string> out;
    for (const auto& s : samples) out[s.id] = s.question;
    return out;
}

}  // namespace

void Pipeline::train_detector() {
    const std::string& type = config_.detector.type;
    if (!is_supervised(type))
        fail(ErrorKind::Config, "train-detector applies to supervised detectors, not '" + type +
                                    "'; use `calibrate` for threshold detectors");
    auto signals = load_signals(DatasetRole::Calibration, "signals");
    auto labels = load_role_labels(DatasetRole::Calibration, "label");
    auto joined = join_signals_labels(signals, labels);
    if (joined.empty()) fail(ErrorKind::Training, "no labeled calibration signals to train on");

    auto questions = questions_by_sample(samples(DatasetRole::Calibration));

    json artifact;
    artifact["type"] = type;
    artifact["cutoff"] = config_.cutoff ? json(*config_.cutoff) : json("full");
    json by_seed = json::object();
    for (std::uint64_t seed : config_.seeds) {
        std::vector<JoinedInstance> slice;
        for (const auto& ji : joined)
            if (ji.signals->seed == seed) slice.push_back(ji);
        if (slice.empty())
            fail(ErrorKind::Training, "no calibration instances for seed " + std::to_string(seed));

        TrainedDetector trained;
        if (type == "prober") {
            std::vector<VectorInstance> data;
            for (const auto& ji : slice)
                data.push_back({ji.signals->hidden,
                                ji.label->label == FailureLabel::NotUnderstood ? 1 : 0});
            ProberHp hp;
            hp.seed = seed;
            trained = train_prober(data, hp, default_parallel_mode());
        } else {
            HashedNgramEncoder encoder(config_.detector.encoder_dim);
            std::vector<TextInstance> data;
            for (const auto& ji : slice) {
                auto q = questions.find(ji.signals->sample_id);
                data.push_back({q != questions.end() ? q->second : std::string(),
                                ji.signals->trace_text,
                                ji.label->label == FailureLabel::NotUnderstood ? 1 : 0});
            }
            TextClassifierHp hp;
            hp.seed = seed;
            trained = train_text_classifier(data, encoder, hp, default_parallel_mode());
        }
        info("trained " + type + " for seed " + std::to_string(seed) + ": validation F1 " +
             std::to_string(trained.best_val_f1));
        json seed_artifact;
        seed_artifact["model"] = trained.model.to_json();
        seed_artifact["hyperparameters"] = trained.hyperparameters;
        seed_artifact["training_data_digest"] = trained.training_data_digest;
        seed_artifact["encoder_id"] = trained.encoder_id;
        seed_artifact["best_val_f1"] = trained.best_val_f1;
        by_seed[std::to_string(seed)] = seed_artifact;
    }
    artifact["by_seed"] = by_seed;
    artifact["artifact"] = "failure-detector";
    artifact["asset_version"] = assets::kAssetVersion;
    write_json_file(detector_artifact_path(), artifact);
}

void Pipeline::calibrate() {
    auto signals = load_signals(DatasetRole::Calibration, "signals");
    auto labels = load_role_labels(DatasetRole::Calibration, "label");
    auto joined = join_signals_labels(signals, labels);
    if (joined.empty()) fail(ErrorKind::Training, "no labeled calibration signals to calibrate on");

    for (SignalKind kind : {SignalKind::AvgConf, SignalKind::MinConf, SignalKind::InputNll}) {
        json by_seed = json::object();
        for (std::uint64_t seed : config_.seeds) {
            std::vector<double> scores;
            std::vector<int> seed_labels;
            for (const auto& ji : joined) {
                if (ji.signals->seed != seed) continue;
                scores.push_back(signal_value(*ji.signals, kind));
                seed_labels.push_back(ji.label->label == FailureLabel::NotUnderstood ? 1 : 0);
            }
            ThresholdResult r = calibrate_threshold(scores, seed_labels, signal_direction(kind));
            by_seed[std::to_string(seed)] = threshold_to_json(r);
        }
        json j;
        j["signal"] = signal_kind_name(kind);
        j["direction"] = score_direction_name(signal_direction(kind));
        j["cutoff"] = config_.cutoff ? json(*config_.cutoff) : json("full");
        j["by_seed"] = by_seed;
        write_json_file(threshold_path(signal_kind_name(kind)), j);
    }
}

namespace {

// Routes flag/score calls to the seed-specific inner detector.
class PerSeedDetector : public FailureDetector {
  public:
    PerSeedDetector(std::string name,
                    std::map<std::uint64_t, std::unique_ptr<FailureDetector>> by_seed)
        : name_(std::move(name)), by_seed_(std::move(by_seed)) {}

    std::string name() const override { return name_; }
    int flag(const DetectionSignals& signals) const override {
        return inner(signals.seed).flag(signals);
    }
    std::optional<double> score(const DetectionSignals& signals) const override {
        return inner(signals.seed).score(signals);
    }

  private:
    const FailureDetector& inner(std::uint64_t seed) const {
        auto it = by_seed_.find(seed);
        if (it == by_seed_.end())
            fail(ErrorKind::Upstream, "no detector trained for seed " + std::to_string(seed));
        return *it->second;
    }
    std::string name_;
    std::map<std::uint64_t, std::unique_ptr<FailureDetector>> by_seed_;
};

}  // namespace

std::unique_ptr<FailureDetector> Pipeline::build_detector() {
    const std::string& type = config_.detector.type;
    if (type == "scripted") {
        std::set<std::string> flagged(config_.detector.flagged_sample_ids.begin(),
                                      config_.detector.flagged_sample_ids.end());
        return std::make_unique<ScriptedDetector>(std::move(flagged));
    }
    if (is_threshold_signal(type)) {
        SignalKind kind = signal_kind_from_name(type);
        std::map<std::uint64_t, std::unique_ptr<FailureDetector>> by_seed;
        if (config_.detector.threshold) {
            for (std::uint64_t seed : config_.seeds)
                by_seed[seed] =
                    std::make_unique<ThresholdDetector>(kind, *config_.detector.threshold);
        } else {
            json j = read_json_file(threshold_path(type), "calibrate");
            for (std::uint64_t seed : config_.seeds)
                by_seed[seed] = std::make_unique<ThresholdDetector>(
                    kind, threshold_from_json(j.at("by_seed").at(std::to_string(seed))));
        }
        return std::make_unique<PerSeedDetector>(type, std::move(by_seed));
    }
    if (is_supervised(type)) {
        fs::path path = config_.detector.artifact.empty() ? detector_artifact_path()
                                                          : fs::path(config_.detector.artifact);
        json artifact = read_json_file(path, "train-detector");
        std::map<std::uint64_t, std::unique_ptr<FailureDetector>> by_seed;
        std::shared_ptr<const TextEncoder> encoder;
        std::map<std::string, std::string> questions;
        if (type == "text-classifier") {
            encoder = std::make_shared<HashedNgramEncoder>(config_.detector.encoder_dim);
            questions = questions_by_sample(samples(DatasetRole::Eval));
        }
        for (std::uint64_t seed : config_.seeds) {
            const json& seed_artifact = artifact.at("by_seed").at(std::to_string(seed));
            TrainedDetector d;
            d.type = type;
            d.model = MlpClassifier::from_json(seed_artifact.at("model"));
            d.hyperparameters = seed_artifact.value("hyperparameters", json::object());
            d.training_data_digest = seed_artifact.value("training_data_digest", std::string());
            d.encoder_id = seed_artifact.value("encoder_id", std::string());
            d.best_val_f1 = seed_artifact.value("best_val_f1", 0.0);
            if (type == "prober")
                by_seed[seed] = std::make_unique<ProberDetector>(std::move(d));
            else
                by_seed[seed] =
                    std::make_unique<TextClassifierDetector>(std::move(d), encoder, questions);
        }
        return std::make_unique<PerSeedDetector>(type, std::move(by_seed));
    }
    fail(ErrorKind::Config, "detector type '" + type + "' has no selective-translation handle");
}

void Pipeline::eval_detector() {
    const std::string& type = config_.detector.type;
    auto labels = load_role_labels(DatasetRole::Eval, "label");

    std::vector<EvalInstance> instances;
    std::optional<ScoreDirection> direction;
    std::optional<double> report_threshold;

    if (type == "random") {
        auto calibration = load_role_labels(DatasetRole::Calibration, "label");
        for (std::uint64_t seed : config_.seeds) {
            std::vector<LabeledInstance> calibration_slice;
            for (const auto& li : calibration)
                if (li.seed == seed) calibration_slice.push_back(li);
            RandomBaseline baseline = RandomBaseline::from_calibration(calibration_slice, seed);
            for (const auto& li : labels) {
                if (li.seed != seed || li.label == FailureLabel::Excluded) continue;
                EvalInstance inst;
                inst.language = li.language;
                inst.seed = li.seed;
                inst.label = li.label == FailureLabel::NotUnderstood ? 1 : 0;
                inst.prediction = baseline.predict(li.language, li.sample_id);
                instances.push_back(inst);
            }
        }
    } else if (type == "self-reflection" || type == "monitor") {
        ensure_backend();
        if (type == "monitor" && judge_or_null() == nullptr)
            fail(ErrorKind::Config, "monitor detector requires a judge backend");
        auto records = load_mode_records(DatasetRole::Eval, Mode::Base, "generate");
        std::map<std::pair<std::string, std::uint64_t>, const GenerationRecord*> by_key;
        for (const auto& r : records) by_key[{r.sample_id, r.seed}] = &r;
        std::map<std::string, const Sample*> sample_by_id;
        for (const auto& s : samples(DatasetRole::Eval)) sample_by_id[s.id] = &s;

        for (const auto& li : labels) {
            if (li.label == FailureLabel::Excluded) continue;
            auto rec_it = by_key.find({li.sample_id, li.seed});
            if (rec_it == by_key.end())
                fail(ErrorKind::Upstream, "no Base record for labeled sample " + li.sample_id);
            EvalInstance inst;
            inst.language = li.language;
            inst.seed = li.seed;
            inst.label = li.label == FailureLabel::NotUnderstood ? 1 : 0;
            const Sample& sample = *sample_by_id.at(li.sample_id);
            if (type == "self-reflection") {
                inst.prediction = self_reflect(*backend_, sample, rec_it->second->trace).prediction;
            } else {
                MonitorVerdict verdict = judge_->monitor(sample, rec_it->second->trace);
                inst.prediction = verdict.understood ? 0 : 1;
            }
            instances.push_back(inst);
        }
    } else {
        auto signals = load_signals(DatasetRole::Eval, "signals");
        auto joined = join_signals_labels(signals, labels);
        std::unique_ptr<FailureDetector> detector = build_detector();
        if (is_threshold_signal(type)) {
            direction = signal_direction(signal_kind_from_name(type));
            if (config_.detector.threshold) report_threshold = *config_.detector.threshold;
        } else {
            direction = ScoreDirection::HighIndicatesFailure;  // classifier probability
        }
        for (const auto& ji : joined) {
            EvalInstance inst;
            inst.language = ji.signals->language;
            inst.seed = ji.signals->seed;
            inst.label = ji.label->label == FailureLabel::NotUnderstood ? 1 : 0;
            inst.prediction = detector->flag(*ji.signals);
            inst.score = detector->score(*ji.signals);
            instances.push_back(inst);
        }
    }

    DetectorReport report = evaluate_detector(instances, direction, type);
    report.threshold = report_threshold;
    write_json_file(out_dir_ / "detection" /
                        ("report-" + type + "-" + cutoff_label(config_.cutoff) + ".json"),
                    report.to_json());
}

SelectiveContext Pipeline::selective_context() {
    ensure_backend();
    SelectiveContext ctx;
    ctx.backend = backend_.get();
    ctx.translator = translator_or_null();
    ctx.instructions = &instructions_;
    ctx.scoring = scoring_options();
    ctx.sampling = config_.sampling;
    ctx.seeds = config_.seeds;
    ctx.variant = config_.prefix_variant;
    ctx.topk_k = config_.topk_k;
    ctx.cache = cache_.get();
    ctx.config_digest = config_.generation_digest();
    return ctx;
}

void Pipeline::selective() {
    SelectiveContext ctx = selective_context();
    const auto& eval = samples(DatasetRole::Eval);

    SelectiveRunResult base = run_baseline(eval, TranslationStrategy::Base, ctx);
    std::unique_ptr<FailureDetector> detector = build_detector();
    SelectiveRunResult selective_result = run_selective(eval, *detector, ctx, config_.cutoff);
    std::optional<SelectiveRunResult> full;
    if (ctx.translator != nullptr)
        full = run_baseline(eval, TranslationStrategy::Full, ctx);

    json j;
    j["base"] = base.to_json();
    j["selective"] = selective_result.to_json();
    if (full) j["full"] = full->to_json();
    j["detector"] = detector->name();
    std::string label = cutoff_label(config_.cutoff);
    write_json_file(out_dir_ / "selective" / ("results-" + label + ".json"), j);

    // Table-shaped report: per-language accuracy with usage beneath.
    std::ostringstream tsv;
    tsv << "strategy";
    for (const auto& [language, acc] : base.accuracy_by_language) tsv << "\t" << language;
    tsv << "\toverall\n";
    auto emit = [&](const char* name, const SelectiveRunResult& r) {
        tsv << name;
        for (const auto& [language, acc] : r.accuracy_by_language) tsv << "\t" << acc;
        tsv << "\t" << r.overall_accuracy << "\n";
        tsv << name << "_usage";
        for (const auto& [language, usage] : r.usage_by_language) tsv << "\t" << usage;
        tsv << "\t" << r.overall_usage << "\n";
    };
    emit("base", base);
    emit("selective", selective_result);
    if (full) emit("full", *full);
    fs::create_directories(out_dir_ / "selective");
    std::ofstream(out_dir_ / "selective" / ("table-" + label + ".tsv")) << tsv.str();
}

void Pipeline::langdist() {
    struct GroupKey {
        std::string mode;
        std::string segment;
        std::string input_language;
        bool operator<(const GroupKey& other) const {
            return std::tie(mode, segment, input_language) <
                   std::tie(other.mode, other.segment, other.input_language);
        }
    };
    std::map<GroupKey, std::map<std::string, std::size_t>> counts;
    std::map<GroupKey, std::size_t> totals;

    std::map<std::string, const Sample*> sample_by_id;
    for (const auto& s : samples(DatasetRole::Eval)) sample_by_id[s.id] = &s;

    LanguageIdentifier identifier = heuristic_script_identifier;
    for (Mode mode : modes_for(DatasetRole::Eval)) {
        auto records = load_mode_records(DatasetRole::Eval, mode, "generate");
        for (const auto& record : records) {
            auto it = sample_by_id.find(record.sample_id);
            if (it == sample_by_id.end()) continue;
            const std::string& input_language = it->second->language.code;
            for (const char* segment : {"trace", "response"}) {
                const std::string& text =
                    std::string(segment) == "trace" ? record.trace : record.response;
                LanguageDistribution dist = language_distribution(text, identifier);
                GroupKey key{mode_name(mode), segment, input_language};
                totals[key] += dist.valid_sentence_count;
                for (const auto& [detected, proportion] : dist.proportions)
                    counts[key][detected] += static_cast<std::size_t>(
                        std::llround(proportion * dist.valid_sentence_count));
            }
        }
    }

    std::ostringstream tsv;
    tsv << "mode\tsegment\tinput_language\tdetected_language\tproportion\tvalid_sentences\n";
    for (const auto& [key, detected_counts] : counts) {
        std::size_t total = totals[key];
        for (const auto& [detected, count] : detected_counts) {
            double proportion = total == 0 ? 0.0 : static_cast<double>(count) / total;
            tsv << key.mode << "\t" << key.segment << "\t" << key.input_language << "\t"
                << detected << "\t" << proportion << "\t" << total << "\n";
        }
    }
    fs::create_directories(out_dir_ / "langdist");
    std::ofstream(out_dir_ / "langdist" / "distributions.tsv") << tsv.str();
}

void Pipeline::quality() {
    ensure_backend();
    if (judge_or_null() == nullptr)
        fail(ErrorKind::Config, "quality study requires a judge backend");

    json attribution = read_json_file(out_dir_ / "attribution" / "attribution.json", "attribute");
    const json& base_ratios =
        attribution.at("reasoning_performance_ratio").at("base").at("per_language");

    // The model's own translations of the eval questions, judge-scored.
    std::map<std::string, std::vector<TranslationPair>> pairs_by_language;
    for (const auto& sample : samples(DatasetRole::Eval)) {
        if (sample.language.code == "en") continue;
        TranslationPair pair;
        pair.source = sample.question;
        pair.hypothesis = elicit_translation(*backend_, sample);
        pair.src_lang = sample.language.code;
        pairs_by_language[sample.language.code].push_back(std::move(pair));
    }

    std::vector<QualityPoint> points;
    for (const auto& [language, pairs] : pairs_by_language) {
        if (!base_ratios.contains(language)) continue;
        QualityPoint p;
        p.model_id = backend_->id();
        p.language = language;
        p.translation_score = score_translation_corpus(pairs, *judge_);
        p.performance_ratio = base_ratios.at(language).get<double>();
        points.push_back(std::move(p));
    }
    if (points.size() < 2)
        fail(ErrorKind::Precondition, "quality correlation needs at least two language points");

    QualityCorrelation correlation = correlate_quality(points);

    std::ostringstream tsv;
    tsv << "model\tlanguage\ttranslation_score\tperformance_ratio\n";
    for (const auto& p : correlation.points)
        tsv << p.model_id << "\t" << p.language << "\t" << p.translation_score << "\t"
            << p.performance_ratio << "\n";
    fs::create_directories(out_dir_ / "quality");
    std::ofstream(out_dir_ / "quality" / "scatter.tsv") << tsv.str();

    json summary;
    summary["pearson_r"] = correlation.pearson_r;
    summary["trend_slope"] = correlation.trend.slope;
    summary["trend_intercept"] = correlation.trend.intercept;
    summary["points"] = points.size();
    write_json_file(out_dir_ / "quality" / "summary.json", summary);
}

void Pipeline::report() {
    std::ostringstream md;
    md << "# Multilingual reasoning gap report\n";
    bool any_section = false;

    // Accuracy table across modes.
    {
        json per_mode = json::object();
        for (Mode mode : modes_for(DatasetRole::Eval)) {
            fs::path path = scores_file(DatasetRole::Eval, mode);
            if (!fs::exists(path)) continue;
            per_mode[mode_name(mode)] = read_json_file(path, "score");
        }
        if (!per_mode.empty()) {
            any_section = true;
            std::set<std::string> languages;
            for (const auto& [mode, scores] : per_mode.items())
                for (const auto& [language, value] : scores.at("seed_mean").items())
                    languages.insert(language);
            md << "\n## Accuracy by mode and language\n\n|mode|";
            for (const auto& l : languages) md << l << "|";
            md << "avg|\n|---|";
            for (std::size_t i = 0; i <= languages.size(); ++i) md << "---|";
            md << "\n";
            std::ostringstream tsv;
            tsv << "mode\tlanguage\taccuracy\n";
            for (const auto& [mode, scores] : per_mode.items()) {
                md << "|" << mode << "|";
                double sum = 0.0;
                for (const auto& l : languages) {
                    double acc = scores.at("seed_mean").value(l, 0.0);
                    md << acc << "|";
                    sum += acc;
                    tsv << mode << "\t" << l << "\t" << acc << "\n";
                }
                md << (languages.empty() ? 0.0 : sum / languages.size()) << "|\n";
            }
            fs::create_directories(out_dir_ / "report");
            std::ofstream(out_dir_ / "report" / "accuracy.tsv") << tsv.str();
        }
    }

    // Attribution shares and performance ratios.
    if (fs::exists(out_dir_ / "attribution" / "attribution.json")) {
        any_section = true;
        json attribution =
            read_json_file(out_dir_ / "attribution" / "attribution.json", "attribute");
        md << "\n## Stage attribution\n\n";
        md << "Ceiling language: " << attribution.at("ceiling_language").get<std::string>()
           << " (" << attribution.at("ceiling").get<double>() << ")\n\n";
        const json& shares = attribution.at("weighted_shares");
        md << "|stage|weighted share|\n|---|---|\n";
        md << "|understanding|" << shares.at("u").get<double>() << "|\n";
        md << "|reasoning|" << shares.at("r").get<double>() << "|\n";
        md << "|generation|" << shares.at("g").get<double>() << "|\n";
        md << "\n### Reasoning performance ratio\n\n|mode|mean|sd|\n|---|---|---|\n";
        for (const auto& [mode, ratio] : attribution.at("reasoning_performance_ratio").items())
            md << "|" << mode << "|" << ratio.at("mean").get<double>() << "|"
               << ratio.at("sd").get<double>() << "|\n";
        fs::create_directories(out_dir_ / "report");
        fs::copy_file(out_dir_ / "attribution" / "per_language.tsv",
                      out_dir_ / "report" / "attribution.tsv",
                      fs::copy_options::overwrite_existing);
        fs::copy_file(out_dir_ / "attribution" / "weighted_shares.tsv",
                      out_dir_ / "report" / "shares.tsv", fs::copy_options::overwrite_existing);
    }

    // Detection reports (all cutoffs found), plus the early-detection series.
    if (fs::exists(out_dir_ / "detection")) {
        std::vector<fs::path> report_files;
        for (const auto& entry : fs::directory_iterator(out_dir_ / "detection"))
            if (entry.path().extension() == ".json") report_files.push_back(entry.path());
        std::sort(report_files.begin(), report_files.end());
        if (!report_files.empty()) {
            any_section = true;
            md << "\n## Understanding-failure detection\n\n";
            md << "|detector|cutoff|balanced acc|F1|PR-AUC|\n|---|---|---|---|---|\n";
            std::ostringstream tsv;
            tsv << "detector\tcutoff\tbalanced_accuracy\tf1\tpr_auc\n";
            for (const auto& path : report_files) {
                json r = read_json_file(path, "eval-detector");
                std::string name = path.stem().string();  // report-<type>-<cutoff>
                std::string cutoff = name.substr(name.rfind('-') + 1);
                double bal = r.at("balanced_accuracy").at("mean").get<double>();
                double f1 = r.at("f1").at("mean").get<double>();
                std::string auc = r.at("pr_auc").is_null()
                                      ? "-"
                                      : std::to_string(r.at("pr_auc").at("mean").get<double>());
                md << "|" << r.at("detector").get<std::string>() << "|" << cutoff << "|" << bal
                   << "|" << f1 << "|" << auc << "|\n";
                tsv << r.at("detector").get<std::string>() << "\t" << cutoff << "\t" << bal
                    << "\t" << f1 << "\t" << (r.at("pr_auc").is_null() ? "" : auc) << "\n";
            }
            fs::create_directories(out_dir_ / "report");
            std::ofstream(out_dir_ / "report" / "detection.tsv") << tsv.str();
        }
    }

    // Selective translation tables.
    if (fs::exists(out_dir_ / "selective")) {
        std::vector<fs::path> result_files;
        for (const auto& entry : fs::directory_iterator(out_dir_ / "selective"))
            if (entry.path().extension() == ".json") result_files.push_back(entry.path());
        std::sort(result_files.begin(), result_files.end());
        if (!result_files.empty()) {
            any_section = true;
            md << "\n## Selective translation\n\n";
            md << "|strategy|cutoff|avg accuracy|translator usage|\n|---|---|---|---|\n";
            std::ostringstream tsv;
            tsv << "strategy\tcutoff\toverall_accuracy\toverall_usage\n";
            for (const auto& path : result_files) {
                json r = read_json_file(path, "selective");
                for (const char* strategy : {"base", "selective", "full"}) {
                    if (!r.contains(strategy)) continue;
                    const json& s = r.at(strategy);
                    std::string cutoff = s.at("cutoff").is_string()
                                             ? s.at("cutoff").get<std::string>()
                                             : std::to_string(s.at("cutoff").get<std::int64_t>());
                    md << "|" << strategy << "|" << cutoff << "|"
                       << s.at("overall_accuracy").get<double>() << "|"
                       << s.at("overall_usage").get<double>() << "%|\n";
                    tsv << strategy << "\t" << cutoff << "\t"
                        << s.at("overall_accuracy").get<double>() << "\t"
                        << s.at("overall_usage").get<double>() << "\n";
                }
            }
            fs::create_directories(out_dir_ / "report");
            std::ofstream(out_dir_ / "report" / "selective.tsv") << tsv.str();
        }
    }

    // Quality correlation.
    if (fs::exists(out_dir_ / "quality" / "summary.json")) {
        any_section = true;
        json q = read_json_file(out_dir_ / "quality" / "summary.json", "quality");
        md << "\n## Translation quality vs reasoning performance\n\n";
        md << "Pearson r = " << q.at("pearson_r").get<double>() << " over "
           << q.at("points").get<std::size_t>() << " language points (trend slope "
           << q.at("trend_slope").get<double>() << ").\n";
        fs::create_directories(out_dir_ / "report");
        fs::copy_file(out_dir_ / "quality" / "scatter.tsv", out_dir_ / "report" / "quality.tsv",
                      fs::copy_options::overwrite_existing);
    }

    // Language distributions.
    if (fs::exists(out_dir_ / "langdist" / "distributions.tsv")) {
        any_section = true;
        md << "\n## Language distributions\n\nSee report/langdist.tsv for the stacked "
              "per-(mode, segment, language) proportions.\n";
        fs::create_directories(out_dir_ / "report");
        fs::copy_file(out_dir_ / "langdist" / "distributions.tsv",
                      out_dir_ / "report" / "langdist.tsv",
                      fs::copy_options::overwrite_existing);
    }

    if (!any_section)
        fail(ErrorKind::Upstream,
             "no artifacts to report; run `generate`/`score`/... first");
    fs::create_directories(out_dir_ / "report");
    std::ofstream(out_dir_ / "report" / "report.md") << md.str();
}

}  // namespace rgap
