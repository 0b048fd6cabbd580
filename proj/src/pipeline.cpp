#include "sccd/pipeline.hpp"

#include <cmath>

#include "sccd/adam.hpp"
#include "sccd/errors.hpp"

namespace sccd {
namespace {

Csr identity_csr(Index n) {
  Csr id;
  id.rows = id.cols = n;
  id.offsets.resize(static_cast<std::size_t>(n) + 1);
  id.targets.resize(n);
  id.values.assign(n, 1.0);
  for (Index i = 0; i <= n; ++i) id.offsets[i] = i;
  for (Index i = 0; i < n; ++i) id.targets[i] = i;
  return id;
}

// Sparse mirror of a mostly-zero attribute matrix. Skipping stored zeros does
// not change the accumulation order of the remaining terms, so products stay
// bit-identical with the dense path.
SparseMatPtr sparse_mirror(const Tensor& x) {
  const Index n = x.rows * x.cols;
  if (n < 16384) return nullptr;
  Index nnz = 0;
  for (double v : x.data)
    if (v != 0.0) ++nnz;
  if (4 * nnz > n) return nullptr;
  Csr s;
  s.rows = x.rows;
  s.cols = x.cols;
  s.offsets.assign(static_cast<std::size_t>(x.rows) + 1, 0);
  s.targets.reserve(nnz);
  s.values.reserve(nnz);
  for (Index i = 0; i < x.rows; ++i) {
    for (Index j = 0; j < x.cols; ++j) {
      const double v = x.at(i, j);
      if (v != 0.0) {
        s.targets.push_back(j);
        s.values.push_back(v);
      }
    }
    s.offsets[i + 1] = static_cast<Index>(s.targets.size());
  }
  return SparseMat::general(std::move(s));
}

std::vector<int> argmax_rows(const Tensor& logits) {
  std::vector<int> out(logits.rows);
  for (Index i = 0; i < logits.rows; ++i) {
    Index best = 0;
    for (Index j = 1; j < logits.cols; ++j)
      if (logits.at(i, j) > logits.at(i, best)) best = j;
    out[i] = static_cast<int>(best);
  }
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (pretrain_epochs <= 0 || detect_epochs <= 0)
    throw config_error("epoch counts must be positive");
  if (lr <= 0.0) throw config_error("learning rate must be positive");
  if (tau <= 0.0) throw config_error("temperature must be positive");
  if (d <= 0 || sss_hidden <= 0 || gcn_hidden <= 0 || l_out <= 0 ||
      head_hidden <= 0)
    throw config_error("layer widths must be positive");
  if (patience <= 0) throw config_error("patience must be positive");
  if (patterns.patterns.empty()) throw config_error("pattern set is empty");
}

PretrainModel::PretrainModel(const DataGraph& g, const TrainConfig& cfg,
                             const StructureView* cached_view)
    : n_(g.n_nodes), cfg_(cfg) {
  cfg.validate();

  const DataGraph* working = &g;
  DataGraph swapped;
  if (cfg.no_attribute_mode) {
    swapped = adjacency_as_attrs(g);
    working = &swapped;
  } else if (!g.has_attrs()) {
    throw config_error(
        "graph has no attributes; enable no-attribute mode to use the "
        "adjacency instead");
  }

  view_ = cached_view ? *cached_view
                      : build_structure_view(*working, cfg.patterns);
  ctx_ = PairContext::from_high_adj(view_.high_adj, cfg.tau);

  sim_ = cfg.use_s ? SparseMat::symmetric(view_.sim)
                   : SparseMat::symmetric(identity_csr(n_));
  norm_adj_ = SparseMat::symmetric(normalize_adjacency(working->adj));
  norm_high_ = SparseMat::symmetric(normalize_adjacency(view_.high_adj));

  attrs_ = make_tensor(n_, working->n_attrs);
  attrs_->data = working->attrs;
  attrs_sparse_ = sparse_mirror(*attrs_);

  has_sss_ = cfg.use_sss;
  if (has_sss_) {
    Rng init = named_stream(cfg.seed, "init-sss");
    sss_ = make_sss_params(n_, working->n_attrs, cfg.sss_hidden, cfg.d, init);
  } else {
    // Fixed seeded projections stand in for the semantic layer so the GCN
    // input keeps width 2d.
    Rng proj = named_stream(cfg.seed, "ablation-proj");
    proj_s_ = glorot_param(n_, cfg.d, proj);
    proj_s_->requires_grad = false;
    proj_x_ = glorot_param(working->n_attrs, cfg.d, proj);
    proj_x_->requires_grad = false;
  }
  Rng init_gcn = named_stream(cfg.seed, "init-gcn");
  gcn_ = make_gcn_params(2 * cfg.d, cfg.gcn_hidden, cfg.l_out, init_gcn);
}

std::pair<TensorPtr, TensorPtr> PretrainModel::encode(Tape& tape) const {
  if (has_sss_)
    return encode_views(tape, sss_, gcn_, sim_, attrs_, norm_adj_, norm_high_,
                        attrs_sparse_);
  auto s_feat = tape.sparse_matmul(sim_, proj_s_);
  auto x_feat = attrs_sparse_ ? tape.sparse_matmul(attrs_sparse_, proj_x_)
                              : tape.matmul(attrs_, proj_x_);
  auto h0 = aggregate(tape, s_feat, x_feat);
  auto p1 = tape.matmul(h0, gcn_.w1);
  auto encode_one = [&](SparseMatPtr a) {
    auto h1 = tape.relu(tape.add_rowvec(tape.sparse_matmul(a, p1), gcn_.b1));
    return tape.add_rowvec(tape.sparse_matmul(a, tape.matmul(h1, gcn_.w2)),
                           gcn_.b2);
  };
  return {encode_one(norm_adj_), encode_one(norm_high_)};
}

TensorPtr PretrainModel::contrastive_loss(Tape& tape, TensorPtr z1,
                                          TensorPtr z2) const {
  return total_loss(tape, z1, z2, ctx_);
}

std::vector<TensorPtr> PretrainModel::trainables() const {
  std::vector<TensorPtr> out;
  if (has_sss_)
    for (auto& t : sss_.trainable()) out.push_back(t);
  for (auto& t : gcn_.trainable()) out.push_back(t);
  return out;
}

std::vector<std::pair<std::string, TensorPtr>> PretrainModel::named_params()
    const {
  std::vector<std::pair<std::string, TensorPtr>> out;
  if (has_sss_) {
    out.emplace_back("sss.s.w1", sss_.f_s.w1);
    out.emplace_back("sss.s.b1", sss_.f_s.b1);
    out.emplace_back("sss.s.w2", sss_.f_s.w2);
    out.emplace_back("sss.s.b2", sss_.f_s.b2);
    out.emplace_back("sss.x.w1", sss_.f_x.w1);
    out.emplace_back("sss.x.b1", sss_.f_x.b1);
    out.emplace_back("sss.x.w2", sss_.f_x.w2);
    out.emplace_back("sss.x.b2", sss_.f_x.b2);
  }
  out.emplace_back("gcn.w1", gcn_.w1);
  out.emplace_back("gcn.b1", gcn_.b1);
  out.emplace_back("gcn.w2", gcn_.w2);
  out.emplace_back("gcn.b2", gcn_.b2);
  return out;
}

PretrainResult pretrain(const DataGraph& g, const TrainConfig& cfg,
                        const StructureView* cached_view) {
  PretrainModel model(g, cfg, cached_view);

  PretrainResult result;
  if (cfg.use_scl) {
    Adam adam(model.trainables(), {.lr = cfg.lr});
    for (Index epoch = 1; epoch <= cfg.pretrain_epochs; ++epoch) {
      Tape tape;
      auto [z1, z2] = model.encode(tape);
      auto loss = model.contrastive_loss(tape, z1, z2);
      if (!std::isfinite(loss->data[0]))
        throw training_error("non-finite loss at epoch " +
                             std::to_string(epoch));
      adam.zero_grad();
      tape.backward(loss);
      adam.step();
      result.loss_history.push_back(loss->data[0]);
    }
    result.epochs_run = cfg.pretrain_epochs;
  }

  // Final-state embeddings: one forward pass at the current parameters (the
  // untouched initialization when training is ablated), view 1 only.
  Tape tape;
  auto [z1, z2] = model.encode(tape);
  (void)z2;
  auto emb = make_tensor(z1->rows, z1->cols);
  emb->data = z1->data;
  if (!emb->finite())
    throw training_error("non-finite embeddings after pretraining");
  l2_normalize_rows(*emb);
  result.embeddings = emb;
  result.checkpoint = model.named_params();
  return result;
}

namespace {

double subset_accuracy(const std::vector<int>& pred,
                       std::span<const int> truth,
                       std::span<const Index> nodes) {
  if (nodes.empty()) return 0.0;
  std::size_t hits = 0;
  for (Index i : nodes)
    if (pred[i] == truth[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(nodes.size());
}

}  // namespace

DetectResult detect(const DataGraph& g, const TensorPtr& embeddings,
                    const SplitAssignment& split, const TrainConfig& cfg) {
  cfg.validate();
  if (!g.has_labels()) throw config_error("detect requires labels");
  if (embeddings->rows != g.n_nodes)
    throw dimension_error("detect: " + std::to_string(embeddings->rows) +
                          " embeddings for " + std::to_string(g.n_nodes) +
                          " nodes");
  const auto train_nodes = split.nodes_with(SplitRole::train);
  const auto val_nodes = split.nodes_with(SplitRole::val);

  int first = -1;
  bool multi_class = false;
  for (Index i : train_nodes) {
    if (first < 0) first = g.labels[i];
    if (g.labels[i] != first) {
      multi_class = true;
      break;
    }
  }
  if (!multi_class)
    throw degenerate_input_error("training split has a single class");

  auto features = embeddings;
  if (features->requires_grad) {
    features = make_tensor(embeddings->rows, embeddings->cols);
    features->data = embeddings->data;
  }
  auto norm_adj = SparseMat::symmetric(normalize_adjacency(g.adj));

  Rng init = named_stream(cfg.seed, "init-head");
  GcnParams head =
      make_gcn_params(features->cols, cfg.head_hidden, g.n_communities, init);
  Adam adam(head.trainable(), {.lr = cfg.lr});

  DetectResult result;
  result.best_val_accuracy = -1.0;
  std::vector<std::vector<double>> best_params;
  Index since_best = 0;

  for (Index epoch = 1; epoch <= cfg.detect_epochs; ++epoch) {
    {
      Tape tape;
      auto logits = gcn_forward(tape, head, norm_adj, features);
      auto loss = tape.cross_entropy(logits, g.labels, train_nodes);
      if (!std::isfinite(loss->data[0]))
        throw training_error("non-finite detection loss at epoch " +
                             std::to_string(epoch));
      adam.zero_grad();
      tape.backward(loss);
      adam.step();
    }
    result.epochs_run = epoch;

    Tape eval_tape;
    auto logits = gcn_forward(eval_tape, head, norm_adj, features);
    const double val_acc =
        subset_accuracy(argmax_rows(*logits), g.labels, val_nodes);
    if (val_acc > result.best_val_accuracy) {
      result.best_val_accuracy = val_acc;
      result.best_epoch = epoch;
      best_params.clear();
      for (const auto& p : head.trainable()) best_params.push_back(p->data);
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }

  auto params = head.trainable();
  for (std::size_t i = 0; i < params.size(); ++i)
    params[i]->data = best_params[i];

  result.predicted = predict_labels(g, head, features);
  result.head = head;
  return result;
}

std::vector<int> predict_labels(const DataGraph& g, const GcnParams& head,
                                const TensorPtr& embeddings) {
  Tape tape;
  auto norm_adj = SparseMat::symmetric(normalize_adjacency(g.adj));
  auto logits = gcn_forward(tape, head, norm_adj, embeddings);
  return argmax_rows(*logits);
}

EvalReport evaluate_on_split(const DataGraph& g,
                             std::span<const int> predicted,
                             const SplitAssignment& split, NmiNorm norm) {
  if (static_cast<Index>(predicted.size()) != g.n_nodes)
    throw dimension_error("evaluate: prediction length mismatch");
  const auto test_nodes = split.nodes_with(SplitRole::test);
  std::vector<int> yt, yp;
  yt.reserve(test_nodes.size());
  yp.reserve(test_nodes.size());
  for (Index i : test_nodes) {
    yt.push_back(g.labels[i]);
    yp.push_back(predicted[i]);
  }
  EvalReport report;
  report.acc = accuracy(yt, yp);
  report.nmi = nmi(yt, yp, norm);
  report.mf1 = macro_f1(yt, yp);
  report.seed = split.seed;
  return report;
}

}  // namespace sccd
