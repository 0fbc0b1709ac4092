#include "hemd/metrics.hpp"

#include <vector>

namespace hemd {

namespace {

void check_pairwise_disjoint(std::span<const Region> family,
                             const char* name) {
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            if (!regions_disjoint(family[i], family[j])) {
                throw OverlapError(std::string(name) + " instances " +
                                   std::to_string(i) + " and " +
                                   std::to_string(j) + " overlap");
            }
        }
    }
}

}  // namespace

std::vector<std::pair<int, int>> match_pairs(std::span<const Region> gt,
                                             std::span<const Region> pred) {
    check_pairwise_disjoint(gt, "ground-truth");
    check_pairwise_disjoint(pred, "predicted");
    const Fraction half(1, 2);
    std::vector<std::pair<int, int>> pairs;
    std::vector<char> gt_used(gt.size(), 0), pred_used(pred.size(), 0);
    for (std::size_t i = 0; i < gt.size(); ++i) {
        for (std::size_t j = 0; j < pred.size(); ++j) {
            if (iou(gt[i], pred[j]) >= half) {
                if (gt_used[i] || pred_used[j]) {
                    throw Error("IoU >= 0.5 matching is not one-to-one");
                }
                gt_used[i] = 1;
                pred_used[j] = 1;
                pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
            }
        }
    }
    return pairs;
}

Fraction f1_score(std::span<const Region> gt, std::span<const Region> pred) {
    if (gt.empty() && pred.empty()) return Fraction(1);
    if (gt.empty() || pred.empty()) return Fraction(0);
    const auto tp = static_cast<std::int64_t>(match_pairs(gt, pred).size());
    // 2TP / (2TP + FP + FN) with FP = |pred|-TP, FN = |gt|-TP.
    const auto denom = static_cast<std::int64_t>(gt.size() + pred.size());
    if (tp == 0) return Fraction(0);
    return Fraction(2 * tp, denom);
}

Fraction aji_score(std::span<const Region> gt, std::span<const Region> pred) {
    check_pairwise_disjoint(gt, "ground-truth");
    check_pairwise_disjoint(pred, "predicted");
    if (gt.empty() && pred.empty()) return Fraction(1);
    BigInt numerator = 0;
    BigInt denominator = 0;
    std::vector<char> pred_used(pred.size(), 0);
    for (const Region& g : gt) {
        int best = -1;
        Fraction best_iou(0);
        for (std::size_t j = 0; j < pred.size(); ++j) {
            const Fraction value = iou(g, pred[j]);
            if (value > best_iou) {  // strict: ties keep the lowest index
                best_iou = value;
                best = static_cast<int>(j);
            }
        }
        if (best < 0) {
            denominator += g.size();
            continue;
        }
        const Region& s = pred[static_cast<std::size_t>(best)];
        const int inter = intersection_size(g, s);
        numerator += inter;
        denominator += g.size() + s.size() - inter;
        pred_used[static_cast<std::size_t>(best)] = 1;
    }
    for (std::size_t j = 0; j < pred.size(); ++j) {
        if (!pred_used[j]) denominator += pred[j].size();
    }
    if (denominator == 0) return Fraction(1);
    return Fraction(numerator, denominator);
}

}  // namespace hemd
