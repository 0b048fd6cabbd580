#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sccd/encoders.hpp"
#include "sccd/graph.hpp"
#include "sccd/loss.hpp"
#include "sccd/metrics.hpp"
#include "sccd/mining.hpp"

namespace sccd {

struct TrainConfig {
  Index pretrain_epochs = 1000;
  Index detect_epochs = 500;
  double lr = 5e-4;
  double tau = 1.0;
  Index d = 32;          // semantic feature width
  Index sss_hidden = 128;
  Index gcn_hidden = 128;
  Index l_out = 64;      // encoder output width
  Index head_hidden = 64;
  Index patience = 50;   // early-stop patience on validation accuracy
  std::uint64_t seed = 0;
  bool use_s = true;    // structure similarity signal
  bool use_sss = true;  // semantic encoder
  bool use_scl = true;  // structure contrastive training
  bool no_attribute_mode = false;
  PatternSet patterns{{{PatternKind::triangle, 0}}};
  NmiNorm nmi_norm = NmiNorm::geometric;

  void validate() const;
};

/// Pretraining state: working graph (attributes swapped for adjacency in
/// no-attribute mode), mined structure view, similarity input (identity when
/// ablated), pair context, normalized adjacencies of both views, and the
/// trainable parameters. Wiring honors the ablation flags.
class PretrainModel {
 public:
  PretrainModel(const DataGraph& g, const TrainConfig& cfg,
                const StructureView* cached_view = nullptr);

  /// Encoder forward for both views: (Z, Z^H), unnormalized.
  std::pair<TensorPtr, TensorPtr> encode(Tape& tape) const;
  TensorPtr contrastive_loss(Tape& tape, TensorPtr z1, TensorPtr z2) const;

  std::vector<TensorPtr> trainables() const;
  std::vector<std::pair<std::string, TensorPtr>> named_params() const;

  const PairContext& pair_context() const { return ctx_; }
  const StructureView& view() const { return view_; }
  Index n_nodes() const { return n_; }

 private:
  Index n_ = 0;
  TrainConfig cfg_;
  StructureView view_;
  SparseMatPtr sim_;        // structure similarity or identity (w/o S)
  SparseMatPtr norm_adj_;   // original view
  SparseMatPtr norm_high_;  // high-level view
  TensorPtr attrs_;         // dense N x F, constant
  SparseMatPtr attrs_sparse_;  // sparse mirror when attrs are mostly zero
  PairContext ctx_;
  bool has_sss_ = true;
  SssParams sss_;
  GcnParams gcn_;
  TensorPtr proj_s_, proj_x_;  // fixed random projections (w/o SSS wiring)
};

struct PretrainResult {
  TensorPtr embeddings;  // N x l_out, rows L2-normalized
  std::vector<double> loss_history;
  Index epochs_run = 0;
  std::vector<std::pair<std::string, TensorPtr>> checkpoint;
};

/// Pretraining: mine the structure view once, then per epoch encode both
/// views, evaluate the contrastive loss, and take one Adam step. With
/// training ablated (use_scl = false) the randomly initialized encoders are
/// applied once and returned untrained. Embeddings are the view-1 encoder
/// output at the final parameters.
PretrainResult pretrain(const DataGraph& g, const TrainConfig& cfg,
                        const StructureView* cached_view = nullptr);

struct DetectResult {
  std::vector<int> predicted;  // argmax labels for all nodes
  GcnParams head;
  Index epochs_run = 0;
  Index best_epoch = 0;
  double best_val_accuracy = 0.0;
};

/// Supervised detection phase: a 2-layer GCN over the original adjacency with
/// the pretrained embeddings as node features, cross-entropy on train nodes,
/// early stop on validation accuracy (best parameters restored).
DetectResult detect(const DataGraph& g, const TensorPtr& embeddings,
                    const SplitAssignment& split, const TrainConfig& cfg);

/// Forward pass of a trained detection head; returns argmax labels.
std::vector<int> predict_labels(const DataGraph& g, const GcnParams& head,
                                const TensorPtr& embeddings);

struct EvalReport {
  double acc = 0.0;
  double nmi = 0.0;
  double mf1 = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;
  Index pretrain_epochs_run = 0;
  Index detect_epochs_run = 0;
};

/// Metrics over the test split.
EvalReport evaluate_on_split(const DataGraph& g,
                             std::span<const int> predicted,
                             const SplitAssignment& split,
                             NmiNorm norm = NmiNorm::geometric);

}  // namespace sccd
