#pragma once

#include <span>
#include <string>

namespace sccd {

enum class NmiNorm { geometric, arithmetic, max_norm };

NmiNorm parse_nmi_norm(const std::string& name);

/// Fraction of exact matches. Supervised setting: prediction and truth share
/// one label space, no permutation matching.
double accuracy(std::span<const int> y_true, std::span<const int> y_pred);

/// Mutual information from the contingency table (natural logs) normalized by
/// the chosen mean of the entropies. Zero-entropy sides: 1 when the
/// partitions are identical up to relabeling, else 0.
double nmi(std::span<const int> y_true, std::span<const int> y_pred,
           NmiNorm norm = NmiNorm::geometric);

/// Unweighted mean over classes present in y_true of per-class F1; a class
/// with precision + recall = 0 scores 0.
double macro_f1(std::span<const int> y_true, std::span<const int> y_pred);

}  // namespace sccd
