#ifndef FPR_MATCHING_HPP
#define FPR_MATCHING_HPP

#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "fpr/minutiae.hpp"
#include "fpr/phase.hpp"

namespace fpr {

struct Alignment {
    double dx = 0.0;
    double dy = 0.0;
    double rot = 0.0;
};

struct MatchResult {
    double score = 0.0; // paired^2 / (|reference| * |query|)
    int paired = 0;
    Alignment alignment;
};

struct MatchParams {
    double r0 = 12.0;                      // pairing distance gate, px
    double a0 = std::numbers::pi / 6.0;    // direction difference gate, radians (mod pi)
};

// Alignment-based greedy matcher: every reference-query minutia pair is an
// alignment hypothesis; candidate pairs are greedily consumed in ascending
// distance order. Deterministic tie-breaking throughout.
MatchResult match(const Template& reference, const Template& query, const MatchParams& params = {});

inline bool decide(const MatchResult& result, double threshold = 0.25) {
    return result.score >= threshold;
}

enum class AttackKind { type_I, type_II };

struct AttackReport {
    AttackKind kind = AttackKind::type_I;
    int trials = 0;
    int successes = 0;
    double threshold = 0.25;

    double rate() const { return trials > 0 ? static_cast<double>(successes) / trials : 0.0; }
};

struct AttackEvalResult {
    AttackReport type_one;
    AttackReport type_two;
};

// For each original template: reconstruct it, re-extract the reconstructed
// template, then score it against the original (type-I) and against each
// impression of the same finger (type-II).
AttackEvalResult attack_eval(const std::vector<Template>& originals,
                             const std::map<size_t, std::vector<Template>>& impressions,
                             double threshold = 0.25, const MatchParams& params = {},
                             const FrequencyMap& freq = {});

std::string attack_report_csv(const AttackEvalResult& result);

namespace serial {
MatchResult match(const Template& reference, const Template& query, const MatchParams& params = {});
} // namespace serial

} // namespace fpr

#endif
