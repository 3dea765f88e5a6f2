#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "rgap/types.hpp"

namespace rgap {

// Per-language accuracies under the four intervention modes: per-seed vectors
// plus their seed means, all in percent.
struct ModeAccuracy {
    struct Entry {
        std::vector<double> per_seed;
        double seed_mean = 0.0;

        static Entry from_seeds(std::vector<double> per_seed);
    };
    // language -> entry, one map per mode
    std::map<std::string, Entry> base, with_u, with_t, with_ut;

    void validate() const;  // values in [0,100], uniform seed counts
};

struct HeadroomResult {
    double ceiling = 0.0;                  // best seed-mean Base accuracy
    std::string ceiling_language;          // argmax (ties: first code, logged)
    std::map<std::string, double> headroom;  // ceiling - base(l), >= 0
};

// Requires >= 2 languages. Headroom is the gap to the best Base language.
HeadroomResult compute_headroom(const std::map<std::string, double>& base_seed_means);

struct ShapleyResult {
    double phi_u_raw = 0.0;  // symmetric average before the zero floor
    double phi_t_raw = 0.0;
    double phi_u = 0.0;      // floored at zero
    double phi_t = 0.0;
    double phi_r_raw = 0.0;  // headroom residual, may be negative
    double phi_r = 0.0;      // floored at zero (warned when clamped)
    bool residual_clamped = false;
};

// Order-invariant two-intervention attribution:
//   phi_u = max{0, [(S_U - S_0) + (S_UT - S_T)] / 2}
//   phi_t = max{0, [(S_T - S_0) + (S_UT - S_U)] / 2}
//   phi_r = H - phi_u - phi_t, clamped at zero with the raw value kept.
ShapleyResult shapley_attribution(double s0, double su, double st, double sut, double headroom);

struct StageShares {
    double understanding = 0.0;
    double reasoning = 0.0;
    double generation = 0.0;
};

// Headroom-normalized shares; requires headroom > 0. When the residual was
// clamped, shares renormalize over the clamped triple so they sum to one.
StageShares normalize_shares(const ShapleyResult& phi, double headroom);

// Headroom-weighted aggregate over the included languages. An empty included
// set yields the no-gap result (all zeros) rather than an error.
struct WeightedShares {
    StageShares shares;
    bool has_gap = false;
};
WeightedShares weighted_shares(const std::map<std::string, StageShares>& per_language,
                               const std::map<std::string, double>& headroom,
                               const std::set<std::string>& included);

// Languages whose per-seed Base accuracy is significantly below the ceiling
// language's (one-sided Welch test at alpha). The ceiling language itself is
// never included.
std::set<std::string> welch_filter(
    const std::map<std::string, std::vector<double>>& base_per_seed,
    const std::string& ceiling_language, double alpha = 0.05);

struct PerLanguageAttribution {
    double s0 = 0.0, su = 0.0, st = 0.0, sut = 0.0;
    double headroom = 0.0;
    ShapleyResult phi;
    StageShares shares;
    bool included = false;  // passed the significance filter and headroom > 0
};

struct AttributionResult {
    std::string ceiling_language;
    double ceiling = 0.0;
    std::map<std::string, PerLanguageAttribution> per_language;
    WeightedShares aggregate;
};

// Full per-dataset attribution: headroom, significance filter, per-language
// decomposition on seed means, and the headroom-weighted aggregate.
AttributionResult attribute_stages(const ModeAccuracy& accuracy, double alpha = 0.05);

// Mean and sample SD of acc_mode(l) / acc_base(ceiling) across languages,
// the ceiling language excluded from the aggregation.
struct RatioSummary {
    double mean = 0.0;
    double sd = 0.0;
    std::map<std::string, double> per_language;
};
RatioSummary reasoning_performance_ratio(const std::map<std::string, double>& mode_seed_means,
                                         const std::map<std::string, double>& base_seed_means,
                                         const std::string& ceiling_language);

}  // namespace rgap
