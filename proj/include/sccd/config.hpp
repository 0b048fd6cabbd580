#pragma once

#include <string>

#include "sccd/pipeline.hpp"

namespace sccd {

/// Flat key = value run configuration. Unknown keys are rejected; every run
/// directory stores the fully resolved form, whose FNV-1a hash identifies the
/// configuration in reports.
struct RunConfig {
  std::string edges;         // required for data-bearing commands
  std::string attrs;         // optional
  std::string labels;        // optional
  std::string mining_cache;  // optional directory with mined artifacts
  std::string patterns = "triangle";
  std::string nmi_norm = "geometric";
  Index pretrain_epochs = 1000;
  Index detect_epochs = 500;
  double lr = 5e-4;
  double tau = 1.0;
  Index d = 32;
  Index sss_hidden = 128;
  Index gcn_hidden = 128;
  Index l_out = 64;
  Index head_hidden = 64;
  Index patience = 50;
  std::uint64_t seed = 0;
  bool use_s = true;
  bool use_sss = true;
  bool use_scl = true;
  bool no_attributes = false;

  static RunConfig from_file(const std::string& path);

  /// Apply one "key = value" assignment (CLI overrides use this too).
  void set(const std::string& key, const std::string& value);

  /// Canonical serialization: fixed key order, one assignment per line.
  std::string resolved_text() const;
  std::string hash() const;

  TrainConfig train_config() const;
};

}  // namespace sccd
