#include "fpr/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fpr/orientation.hpp"

namespace fpr {

namespace {

constexpr double kPi = std::numbers::pi;

struct HypothesisScore {
    int paired = 0;
    double mean_dist = std::numeric_limits<double>::infinity();
    long index = std::numeric_limits<long>::max(); // deterministic tie order
    Alignment alignment;

    // Larger paired count wins; ties go to smaller mean paired distance,
    // then to the earlier hypothesis in enumeration order.
    bool better_than(const HypothesisScore& o) const {
        if (paired != o.paired) return paired > o.paired;
        if (mean_dist != o.mean_dist) return mean_dist < o.mean_dist;
        return index < o.index;
    }
};

struct Candidate {
    double dist;
    int ref_idx;
    int query_idx;
};

struct Pairing {
    int paired = 0;
    double mean_dist = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, int>> pairs;
};

// Transform the query by (rot about origin, then translate), gate candidate
// pairs on distance and direction, and pair them greedily by ascending
// distance (ties by lower reference index, then lower query index).
Pairing pair_under_transform(const Template& reference, const Template& query, double rot,
                             double tx, double ty, const MatchParams& params) {
    const int nr = static_cast<int>(reference.size());
    const int nq = static_cast<int>(query.size());
    const double c = std::cos(rot), s = std::sin(rot);
    std::vector<double> qx(static_cast<size_t>(nq)), qy(static_cast<size_t>(nq)), qd(static_cast<size_t>(nq));
    for (int j = 0; j < nq; ++j) {
        const Minutia& m = query.minutiae[static_cast<size_t>(j)];
        qx[static_cast<size_t>(j)] = c * m.x - s * m.y + tx;
        qy[static_cast<size_t>(j)] = s * m.x + c * m.y + ty;
        qd[static_cast<size_t>(j)] = m.direction + rot;
    }

    std::vector<Candidate> candidates;
    for (int i = 0; i < nr; ++i) {
        const Minutia& m = reference.minutiae[static_cast<size_t>(i)];
        for (int j = 0; j < nq; ++j) {
            const double d = std::hypot(m.x - qx[static_cast<size_t>(j)], m.y - qy[static_cast<size_t>(j)]);
            if (d > params.r0) continue;
            if (angular_distance(m.direction, qd[static_cast<size_t>(j)]) > params.a0) continue;
            candidates.push_back({d, i, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.ref_idx != b.ref_idx) return a.ref_idx < b.ref_idx;
        return a.query_idx < b.query_idx;
    });

    std::vector<char> ref_used(static_cast<size_t>(nr), 0), query_used(static_cast<size_t>(nq), 0);
    Pairing result;
    double dist_sum = 0.0;
    for (const Candidate& cand : candidates) {
        if (ref_used[static_cast<size_t>(cand.ref_idx)] || query_used[static_cast<size_t>(cand.query_idx)]) continue;
        ref_used[static_cast<size_t>(cand.ref_idx)] = 1;
        query_used[static_cast<size_t>(cand.query_idx)] = 1;
        ++result.paired;
        dist_sum += cand.dist;
        result.pairs.emplace_back(cand.ref_idx, cand.query_idx);
    }
    if (result.paired > 0) result.mean_dist = dist_sum / result.paired;
    return result;
}

HypothesisScore evaluate_hypothesis(const Template& reference, const Template& query,
                                    int anchor_ref, int anchor_query, double rot, long index,
                                    const MatchParams& params) {
    const Minutia& r = reference.minutiae[static_cast<size_t>(anchor_ref)];
    const Minutia& q = query.minutiae[static_cast<size_t>(anchor_query)];
    const double c = std::cos(rot), s = std::sin(rot);
    const double tx = r.x - (c * q.x - s * q.y);
    const double ty = r.y - (s * q.x + c * q.y);

    Pairing pairing = pair_under_transform(reference, query, rot, tx, ty, params);
    double out_rot = rot, out_tx = tx, out_ty = ty;

    // The anchor's direction fixes the initial rotation, so its noise
    // displaces faraway minutiae proportionally to their lever arm.
    // Re-estimate the rigid transform from all paired minutiae
    // (least-squares / 2-D Procrustes) and re-pair once; keep the
    // refinement only when it pairs at least as well.
    if (pairing.paired >= 2) {
        double rcx = 0.0, rcy = 0.0, qcx = 0.0, qcy = 0.0;
        for (auto [i, j] : pairing.pairs) {
            rcx += reference.minutiae[static_cast<size_t>(i)].x;
            rcy += reference.minutiae[static_cast<size_t>(i)].y;
            qcx += query.minutiae[static_cast<size_t>(j)].x;
            qcy += query.minutiae[static_cast<size_t>(j)].y;
        }
        const double n = static_cast<double>(pairing.paired);
        rcx /= n; rcy /= n; qcx /= n; qcy /= n;
        double sc = 0.0, ss = 0.0;
        for (auto [i, j] : pairing.pairs) {
            const double ax = query.minutiae[static_cast<size_t>(j)].x - qcx;
            const double ay = query.minutiae[static_cast<size_t>(j)].y - qcy;
            const double bx = reference.minutiae[static_cast<size_t>(i)].x - rcx;
            const double by = reference.minutiae[static_cast<size_t>(i)].y - rcy;
            sc += ax * bx + ay * by;
            ss += ax * by - ay * bx;
        }
        if (sc != 0.0 || ss != 0.0) {
            const double rot2 = std::atan2(ss, sc);
            const double c2 = std::cos(rot2), s2 = std::sin(rot2);
            const double tx2 = rcx - (c2 * qcx - s2 * qcy);
            const double ty2 = rcy - (s2 * qcx + c2 * qcy);
            // Refinement may only polish the hypothesis, not replace it:
            // the rotation must stay within the angular gate and the
            // anchor must stay within the distance gate, otherwise a few
            // coincidental pairs could drag the alignment anywhere.
            double drot = std::fmod(rot2 - rot, 2.0 * kPi);
            if (drot > kPi) drot -= 2.0 * kPi;
            if (drot < -kPi) drot += 2.0 * kPi;
            const double ax2 = c2 * q.x - s2 * q.y + tx2;
            const double ay2 = s2 * q.x + c2 * q.y + ty2;
            const bool close = std::abs(drot) <= params.a0 &&
                               std::hypot(ax2 - r.x, ay2 - r.y) <= params.r0;
            const Pairing refined =
                close ? pair_under_transform(reference, query, rot2, tx2, ty2, params) : Pairing{};
            // A genuine anchor-noise correction recovers several pairs at
            // once and tightens the residuals; a one-pair gain or a looser
            // fit is the signature of a coincidental scrape. Demand a
            // minimum consensus of six pairs before trusting the refit —
            // a rigid transform fitted to a handful of points is too easy
            // to steer by coincidence.
            if ((refined.paired >= pairing.paired + 2 && refined.paired >= 6 &&
                 refined.mean_dist < pairing.mean_dist) ||
                (refined.paired == pairing.paired && refined.paired > 0 &&
                 refined.mean_dist < pairing.mean_dist)) {
                pairing = refined;
                out_rot = rot2;
                out_tx = tx2;
                out_ty = ty2;
            }
        }
    }

    HypothesisScore result;
    result.index = index;
    result.alignment = {out_tx, out_ty, normalize_direction(out_rot)};
    result.paired = pairing.paired;
    result.mean_dist = pairing.mean_dist;
    return result;
}

template <bool Parallel>
MatchResult match_impl(const Template& reference, const Template& query, const MatchParams& params) {
    if (reference.empty() || query.empty()) throw EmptyTemplate("match");
    const int nr = static_cast<int>(reference.size());
    const int nq = static_cast<int>(query.size());
    const long nhyp = 2L * nr * nq; // two rotation variants per anchor pair

    HypothesisScore best;
#pragma omp parallel if (Parallel)
    {
        HypothesisScore local;
#pragma omp for schedule(static) nowait
        for (long h = 0; h < nhyp; ++h) {
            const int variant = static_cast<int>(h & 1);
            const long pair = h >> 1;
            const int i = static_cast<int>(pair / nq);
            const int j = static_cast<int>(pair % nq);
            const double rot = reference.minutiae[static_cast<size_t>(i)].direction -
                               query.minutiae[static_cast<size_t>(j)].direction + variant * kPi;
            const HypothesisScore score = evaluate_hypothesis(reference, query, i, j, rot, h, params);
            if (score.better_than(local)) local = score;
        }
#pragma omp critical
        if (local.better_than(best)) best = local;
    }

    MatchResult result;
    result.paired = best.paired;
    result.score = static_cast<double>(best.paired) * best.paired / (static_cast<double>(nr) * nq);
    result.alignment = best.alignment;
    return result;
}

} // namespace

MatchResult match(const Template& reference, const Template& query, const MatchParams& params) {
    return match_impl<true>(reference, query, params);
}

namespace serial {
MatchResult match(const Template& reference, const Template& query, const MatchParams& params) {
    return match_impl<false>(reference, query, params);
}
} // namespace serial

AttackEvalResult attack_eval(const std::vector<Template>& originals,
                             const std::map<size_t, std::vector<Template>>& impressions,
                             double threshold, const MatchParams& params, const FrequencyMap& freq) {
    if (originals.empty()) throw EmptyInput("attack_eval needs at least one original");

    AttackEvalResult result;
    result.type_one = {AttackKind::type_I, 0, 0, threshold};
    result.type_two = {AttackKind::type_II, 0, 0, threshold};

    for (size_t idx = 0; idx < originals.size(); ++idx) {
        const Template& original = originals[idx];
        const GrayImage recon = reconstruct(original, freq);
        const Template reconstructed = extract_minutiae(recon, segment(recon));

        ++result.type_one.trials;
        const bool have_minutiae = !reconstructed.empty();
        if (have_minutiae && decide(match(original, reconstructed, params), threshold))
            ++result.type_one.successes;

        const auto it = impressions.find(idx);
        if (it == impressions.end()) continue;
        for (const Template& impression : it->second) {
            ++result.type_two.trials;
            if (have_minutiae && !impression.empty() &&
                decide(match(impression, reconstructed, params), threshold))
                ++result.type_two.successes;
        }
    }
    return result;
}

std::string attack_report_csv(const AttackEvalResult& result) {
    char buf[128];
    std::string out = "kind,trials,successes,rate\n";
    for (const AttackReport* r : {&result.type_one, &result.type_two}) {
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%.6f\n",
                      r->kind == AttackKind::type_I ? "type-I" : "type-II", r->trials,
                      r->successes, r->rate());
        out += buf;
    }
    return out;
}

} // namespace fpr
