#include "rgap/attribution.hpp"

#include <algorithm>
#include <cmath>

#include "rgap/common.hpp"
#include "rgap/stats.hpp"

namespace rgap {

ModeAccuracy::Entry ModeAccuracy::Entry::from_seeds(std::vector<double> per_seed) {
    Entry e;
    e.seed_mean = mean_of(per_seed);
    e.per_seed = std::move(per_seed);
    return e;
}

void ModeAccuracy::validate() const {
    std::size_t seed_count = 0;
    bool first = true;
    for (const auto* mode_map : {&base, &with_u, &with_t, &with_ut}) {
        for (const auto& [language, entry] : *mode_map) {
            for (double v : entry.per_seed)
                if (v < 0.0 || v > 100.0)
                    fail(ErrorKind::Precondition,
                         "accuracy out of [0,100] for language " + language);
            if (first) {
                seed_count = entry.per_seed.size();
                first = false;
            } else if (entry.per_seed.size() != seed_count) {
                fail(ErrorKind::Precondition,
                     "all modes must share one seed set (language " + language + ")");
            }
        }
    }
}

HeadroomResult compute_headroom(const std::map<std::string, double>& base_seed_means) {
    if (base_seed_means.size() < 2)
        fail(ErrorKind::Precondition, "headroom needs at least two languages");
    HeadroomResult r;
    bool first = true;
    for (const auto& [language, accuracy] : base_seed_means) {
        // std::map iterates codes lexicographically, so ties keep the first code.
        if (first || accuracy > r.ceiling) {
            r.ceiling = accuracy;
            r.ceiling_language = language;
            first = false;
        }
    }
    for (const auto& [language, accuracy] : base_seed_means) {
        if (accuracy == r.ceiling && language != r.ceiling_language)
            info("headroom ceiling tie: keeping " + r.ceiling_language + " over " + language);
        r.headroom[language] = r.ceiling - accuracy;
    }
    return r;
}

ShapleyResult shapley_attribution(double s0, double su, double st, double sut, double headroom) {
    if (headroom < 0.0) fail(ErrorKind::Precondition, "headroom must be non-negative");
    ShapleyResult r;
    r.phi_u_raw = 0.5 * ((su - s0) + (sut - st));
    r.phi_t_raw = 0.5 * ((st - s0) + (sut - su));
    r.phi_u = std::max(0.0, r.phi_u_raw);
    r.phi_t = std::max(0.0, r.phi_t_raw);
    r.phi_r_raw = headroom - r.phi_u - r.phi_t;
    if (r.phi_r_raw < 0.0) {
        r.phi_r = 0.0;
        r.residual_clamped = true;
        warn("negative reasoning residual " + std::to_string(r.phi_r_raw) +
             " clamped to 0 (raw value kept in the report)");
    } else {
        r.phi_r = r.phi_r_raw;
    }
    return r;
}

StageShares normalize_shares(const ShapleyResult& phi, double headroom) {
    if (headroom <= 0.0)
        fail(ErrorKind::Precondition,
             "zero headroom: language must be excluded before computing shares");
    double denom = phi.phi_u + phi.phi_t + phi.phi_r;
    if (denom <= 0.0) denom = headroom;
    StageShares s;
    s.understanding = phi.phi_u / denom;
    s.generation = phi.phi_t / denom;
    s.reasoning = phi.phi_r / denom;
    return s;
}

WeightedShares weighted_shares(const std::map<std::string, StageShares>& per_language,
                               const std::map<std::string, double>& headroom,
                               const std::set<std::string>& included) {
    WeightedShares out;
    double weight_sum = 0.0;
    for (const auto& language : included) {
        auto share_it = per_language.find(language);
        auto h_it = headroom.find(language);
        if (share_it == per_language.end() || h_it == headroom.end())
            fail(ErrorKind::Precondition, "included language missing data: " + language);
        double h = h_it->second;
        out.shares.understanding += h * share_it->second.understanding;
        out.shares.reasoning += h * share_it->second.reasoning;
        out.shares.generation += h * share_it->second.generation;
        weight_sum += h;
    }
    if (weight_sum <= 0.0) {
        // No significant gap anywhere: report the no-gap result.
        return WeightedShares{};
    }
    out.shares.understanding /= weight_sum;
    out.shares.reasoning /= weight_sum;
    out.shares.generation /= weight_sum;
    out.has_gap = true;
    return out;
}

std::set<std::string> welch_filter(
    const std::map<std::string, std::vector<double>>& base_per_seed,
    const std::string& ceiling_language, double alpha) {
    auto ceiling_it = base_per_seed.find(ceiling_language);
    if (ceiling_it == base_per_seed.end())
        fail(ErrorKind::Precondition, "ceiling language missing from per-seed data");
    std::set<std::string> included;
    for (const auto& [language, per_seed] : base_per_seed) {
        if (language == ceiling_language) continue;
        WelchResult w = welch_t_test(per_seed, ceiling_it->second);
        if (w.p_one_sided < alpha) included.insert(language);
    }
    return included;
}

AttributionResult attribute_stages(const ModeAccuracy& accuracy, double alpha) {
    accuracy.validate();

    std::map<std::string, double> base_means;
    std::map<std::string, std::vector<double>> base_per_seed;
    for (const auto& [language, entry] : accuracy.base) {
        base_means[language] = entry.seed_mean;
        base_per_seed[language] = entry.per_seed;
    }

    HeadroomResult headroom = compute_headroom(base_means);
    std::set<std::string> included =
        welch_filter(base_per_seed, headroom.ceiling_language, alpha);

    AttributionResult result;
    result.ceiling_language = headroom.ceiling_language;
    result.ceiling = headroom.ceiling;

    std::map<std::string, StageShares> shares_by_language;
    for (const auto& [language, base_entry] : accuracy.base) {
        PerLanguageAttribution a;
        a.s0 = base_entry.seed_mean;
        a.su = accuracy.with_u.at(language).seed_mean;
        a.st = accuracy.with_t.at(language).seed_mean;
        a.sut = accuracy.with_ut.at(language).seed_mean;
        a.headroom = headroom.headroom.at(language);
        a.phi = shapley_attribution(a.s0, a.su, a.st, a.sut, a.headroom);
        a.included = included.count(language) > 0 && a.headroom > 0.0;
        if (a.included) {
            a.shares = normalize_shares(a.phi, a.headroom);
            shares_by_language[language] = a.shares;
        }
        result.per_language[language] = a;
    }

    std::set<std::string> effective;
    for (const auto& [language, a] : result.per_language)
        if (a.included) effective.insert(language);
    result.aggregate = weighted_shares(shares_by_language, headroom.headroom, effective);
    return result;
}

RatioSummary reasoning_performance_ratio(const std::map<std::string, double>& mode_seed_means,
                                         const std::map<std::string, double>& base_seed_means,
                                         const std::string& ceiling_language) {
    auto ceiling_it = base_seed_means.find(ceiling_language);
    if (ceiling_it == base_seed_means.end())
        fail(ErrorKind::Precondition, "ceiling language missing from Base accuracies");
    double ceiling = ceiling_it->second;
    if (ceiling <= 0.0) fail(ErrorKind::Metric, "ratio undefined: ceiling accuracy is zero");

    RatioSummary summary;
    std::vector<double> ratios;
    for (const auto& [language, accuracy] : mode_seed_means) {
        double ratio = accuracy / ceiling;
        summary.per_language[language] = ratio;
        if (language != ceiling_language) ratios.push_back(ratio);
    }
    if (ratios.empty())
        fail(ErrorKind::Precondition, "ratio summary needs at least one non-ceiling language");
    summary.mean = mean_of(ratios);
    summary.sd = sample_sd(ratios);
    return summary;
}

}  // namespace rgap
