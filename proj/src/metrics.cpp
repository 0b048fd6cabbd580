#include "sccd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "sccd/errors.hpp"

namespace sccd {
namespace {

void check_pair(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.empty())
    throw dimension_error("metrics: empty label vectors");
  if (y_true.size() != y_pred.size())
    throw dimension_error("metrics: " + std::to_string(y_true.size()) +
                          " true labels vs " + std::to_string(y_pred.size()) +
                          " predictions");
  for (std::size_t i = 0; i < y_true.size(); ++i)
    if (y_true[i] < 0 || y_pred[i] < 0)
      throw dimension_error("metrics: negative label at position " +
                            std::to_string(i));
}

// Compact labels to 0..k-1 in order of first appearance.
std::vector<int> compact(std::span<const int> y, int& k) {
  std::map<int, int> ids;
  std::vector<int> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto [it, fresh] = ids.emplace(y[i], static_cast<int>(ids.size()));
    out[i] = it->second;
    (void)fresh;
  }
  k = static_cast<int>(ids.size());
  return out;
}

bool same_partition(std::span<const int> a, std::span<const int> b) {
  std::map<int, int> fwd, bwd;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [fit, f_new] = fwd.emplace(a[i], b[i]);
    if (!f_new && fit->second != b[i]) return false;
    auto [bit, b_new] = bwd.emplace(b[i], a[i]);
    if (!b_new && bit->second != a[i]) return false;
  }
  return true;
}

}  // namespace

NmiNorm parse_nmi_norm(const std::string& name) {
  if (name == "geometric") return NmiNorm::geometric;
  if (name == "arithmetic") return NmiNorm::arithmetic;
  if (name == "max") return NmiNorm::max_norm;
  throw config_error("unknown nmi normalization '" + name +
                     "' (geometric|arithmetic|max)");
}

double accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
  check_pair(y_true, y_pred);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i)
    if (y_true[i] == y_pred[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

double nmi(std::span<const int> y_true, std::span<const int> y_pred,
           NmiNorm norm) {
  check_pair(y_true, y_pred);
  const double n = static_cast<double>(y_true.size());
  int ku = 0, kv = 0;
  const auto u = compact(y_true, ku);
  const auto v = compact(y_pred, kv);

  std::vector<double> counts(static_cast<std::size_t>(ku) * kv, 0.0);
  std::vector<double> row(ku, 0.0), col(kv, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    counts[static_cast<std::size_t>(u[i]) * kv + v[i]] += 1.0;
    row[u[i]] += 1.0;
    col[v[i]] += 1.0;
  }

  double hu = 0.0, hv = 0.0;
  for (double c : row)
    if (c > 0.0) hu -= (c / n) * std::log(c / n);
  for (double c : col)
    if (c > 0.0) hv -= (c / n) * std::log(c / n);

  if (hu == 0.0 || hv == 0.0)
    return same_partition(y_true, y_pred) ? 1.0 : 0.0;

  double mi = 0.0;
  for (int a = 0; a < ku; ++a)
    for (int b = 0; b < kv; ++b) {
      const double c = counts[static_cast<std::size_t>(a) * kv + b];
      if (c > 0.0) mi += (c / n) * std::log(n * c / (row[a] * col[b]));
    }

  double denom = 0.0;
  switch (norm) {
    case NmiNorm::geometric: denom = std::sqrt(hu * hv); break;
    case NmiNorm::arithmetic: denom = 0.5 * (hu + hv); break;
    case NmiNorm::max_norm: denom = std::max(hu, hv); break;
  }
  const double value = mi / denom;
  // clamp away tiny negative or >1 floating point residue
  return std::min(1.0, std::max(0.0, value));
}

double macro_f1(std::span<const int> y_true, std::span<const int> y_pred) {
  check_pair(y_true, y_pred);
  std::vector<int> classes(y_true.begin(), y_true.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  double total = 0.0;
  for (int c : classes) {
    double tp = 0.0, fp = 0.0, fn = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      const bool t = y_true[i] == c;
      const bool p = y_pred[i] == c;
      if (t && p) tp += 1.0;
      if (!t && p) fp += 1.0;
      if (t && !p) fn += 1.0;
    }
    const double prec = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
    const double rec = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
    total += (prec + rec) > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
  }
  return total / static_cast<double>(classes.size());
}

}  // namespace sccd
