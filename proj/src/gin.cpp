#include "gbd/gin.hpp"

#include <cmath>
#include <string>

#include "gbd/errors.hpp"
#include "gbd/smoothing.hpp"

namespace gbd {

namespace {

constexpr double kProbabilityFloor = 1e-12;

Eigen::MatrixXd glorot(Eigen::Index rows, Eigen::Index cols, double fan_in, double fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = (2.0 * uniform01(rng) - 1.0) * a;
  }
  return m;
}

/// (1 + eps) h_v + sum_{u in N(v)} h_u. The adjacency is symmetric, so the
/// same map propagates gradients backwards.
Eigen::MatrixXd aggregate(const Graph& g, const Eigen::MatrixXd& h, double epsilon) {
  Eigen::MatrixXd out = (1.0 + epsilon) * h;
  for (const Edge& e : g.edges()) {
    out.row(e.u) += h.row(e.v);
    out.row(e.v) += h.row(e.u);
  }
  return out;
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& x) { return x.cwiseMax(0.0); }

Eigen::MatrixXd relu_mask(const Eigen::MatrixXd& x) { return (x.array() > 0.0).cast<double>().matrix(); }

struct LayerTrace {
  Eigen::MatrixXd aggregated;
  Eigen::MatrixXd z1;
  Eigen::MatrixXd z2;
};

struct ForwardTrace {
  std::vector<LayerTrace> layers;
  Eigen::RowVectorXd readout;
  Eigen::VectorXd probabilities;
};

ForwardTrace run_forward(const GinModel& model, const Graph& g) {
  if (g.node_count() == 0) throw EmptyGraphError("cannot classify a graph with no nodes");
  ForwardTrace trace;
  Eigen::MatrixXd h = g.features();
  for (const GinLayer& layer : model.params.layers) {
    LayerTrace lt;
    lt.aggregated = aggregate(g, h, model.config.epsilon);
    lt.z1 = (lt.aggregated * layer.w1).rowwise() + layer.b1.row(0);
    lt.z2 = (relu(lt.z1) * layer.w2).rowwise() + layer.b2.row(0);
    h = relu(lt.z2);
    trace.layers.push_back(std::move(lt));
  }
  trace.readout = h.colwise().sum();
  Eigen::RowVectorXd logits = trace.readout * model.params.w_out + model.params.b_out;
  const double shift = logits.maxCoeff();
  Eigen::RowVectorXd exps = (logits.array() - shift).exp().matrix();
  trace.probabilities = (exps / exps.sum()).transpose();
  return trace;
}

GinParameters zeros_like(const GinParameters& p) {
  GinParameters z = p;
  for (Eigen::MatrixXd* block : parameter_blocks(z)) block->setZero();
  return z;
}

}  // namespace

void validate(const GinConfig& cfg) {
  if (cfg.num_layers < 1) throw InvalidParameterError("num_layers must be at least 1");
  if (cfg.hidden_dim < 1) throw InvalidParameterError("hidden_dim must be at least 1");
  if (cfg.num_classes < 2) throw InvalidParameterError("num_classes must be at least 2");
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw InvalidParameterError("learning_rate must be a finite non-negative number");
  }
  if (cfg.batch_size < 1) throw InvalidParameterError("batch_size must be at least 1");
  if (cfg.max_epochs < 0) throw InvalidParameterError("max_epochs must be non-negative");
  if (cfg.subsample_training && !(cfg.subsample_beta > 0.0 && cfg.subsample_beta <= 1.0)) {
    throw InvalidParameterError("subsample_beta must lie in (0, 1]");
  }
}

std::vector<Eigen::MatrixXd*> parameter_blocks(GinParameters& p) {
  std::vector<Eigen::MatrixXd*> blocks;
  for (GinLayer& layer : p.layers) {
    blocks.insert(blocks.end(), {&layer.w1, &layer.b1, &layer.w2, &layer.b2});
  }
  blocks.push_back(&p.w_out);
  blocks.push_back(&p.b_out);
  return blocks;
}

std::vector<const Eigen::MatrixXd*> parameter_blocks(const GinParameters& p) {
  std::vector<const Eigen::MatrixXd*> blocks;
  for (const GinLayer& layer : p.layers) {
    blocks.insert(blocks.end(), {&layer.w1, &layer.b1, &layer.w2, &layer.b2});
  }
  blocks.push_back(&p.w_out);
  blocks.push_back(&p.b_out);
  return blocks;
}

std::size_t parameter_count(const GinParameters& p) {
  std::size_t count = 0;
  for (const Eigen::MatrixXd* block : parameter_blocks(p)) count += static_cast<std::size_t>(block->size());
  return count;
}

bool all_finite(const GinParameters& p) {
  for (const Eigen::MatrixXd* block : parameter_blocks(p)) {
    if (!block->allFinite()) return false;
  }
  return true;
}

void axpy(double scale, const GinParameters& b, GinParameters& a) {
  auto dst = parameter_blocks(a);
  auto src = parameter_blocks(b);
  for (std::size_t i = 0; i < dst.size(); ++i) *dst[i] += scale * *src[i];
}

GinModel init_model(const GinConfig& cfg, int feature_dim) {
  validate(cfg);
  Rng rng = make_rng(cfg.seed);
  GinModel model{cfg, {}};
  const double hidden = cfg.hidden_dim;
  int in_dim = feature_dim;
  for (int l = 0; l < cfg.num_layers; ++l) {
    GinLayer layer;
    layer.w1 = glorot(in_dim, cfg.hidden_dim, in_dim, hidden, rng);
    layer.b1 = glorot(1, cfg.hidden_dim, in_dim, hidden, rng);
    layer.w2 = glorot(cfg.hidden_dim, cfg.hidden_dim, hidden, hidden, rng);
    layer.b2 = glorot(1, cfg.hidden_dim, hidden, hidden, rng);
    model.params.layers.push_back(std::move(layer));
    in_dim = cfg.hidden_dim;
  }
  model.params.w_out = glorot(cfg.hidden_dim, cfg.num_classes, hidden, cfg.num_classes, rng);
  model.params.b_out = glorot(1, cfg.num_classes, hidden, cfg.num_classes, rng);
  return model;
}

Eigen::VectorXd forward(const GinModel& model, const Graph& g) { return run_forward(model, g).probabilities; }

int argmax(const Eigen::VectorXd& values) {
  int best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) > values(best)) best = static_cast<int>(i);
  }
  return best;
}

int predict(const GinModel& model, const Graph& g) { return argmax(forward(model, g)); }

double loss(const GinModel& model, std::span<const LabeledGraph> batch) {
  if (batch.empty()) throw InvalidParameterError("loss of an empty batch");
  double total = 0.0;
  for (const LabeledGraph& item : batch) {
    const Eigen::VectorXd p = forward(model, item.graph);
    total -= std::log(std::max(p(item.label), kProbabilityFloor));
  }
  return total / static_cast<double>(batch.size());
}

double loss(const GinModel& model, const LabeledDataset& batch) { return loss(model, std::span(batch.items)); }

namespace {

/// Adds weight * d loss(g, label) / d params to `grad`; returns the clamped
/// per-example loss.
double accumulate_example(const GinModel& model, const Graph& g, int label, double weight, GinParameters& grad) {
  const GinParameters& params = model.params;
  ForwardTrace trace = run_forward(model, g);
  const double example_loss = -std::log(std::max(trace.probabilities(label), kProbabilityFloor));

  // Softmax cross-entropy: d loss / d logits = p - onehot. The clamp only
  // guards the reported loss; badly misclassified examples keep their signal.
  Eigen::RowVectorXd d_logits = weight * trace.probabilities.transpose();
  d_logits(label) -= weight;
  grad.w_out.noalias() += trace.readout.transpose() * d_logits;
  grad.b_out += d_logits;

  const Eigen::RowVectorXd d_readout = d_logits * params.w_out.transpose();
  Eigen::MatrixXd d_h = d_readout.replicate(g.node_count(), 1);
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const GinLayer& layer = params.layers[l];
    const LayerTrace& lt = trace.layers[l];
    GinLayer& g_layer = grad.layers[l];

    const Eigen::MatrixXd d_z2 = d_h.cwiseProduct(relu_mask(lt.z2));
    g_layer.w2.noalias() += relu(lt.z1).transpose() * d_z2;
    g_layer.b2 += d_z2.colwise().sum();
    const Eigen::MatrixXd d_z1 = (d_z2 * layer.w2.transpose()).cwiseProduct(relu_mask(lt.z1));
    g_layer.w1.noalias() += lt.aggregated.transpose() * d_z1;
    g_layer.b1 += d_z1.colwise().sum();
    if (l > 0) d_h = aggregate(g, d_z1 * layer.w1.transpose(), model.config.epsilon);
  }
  return example_loss;
}

}  // namespace

LossAndGradient loss_and_gradient(const GinModel& model, std::span<const LabeledGraph> batch) {
  if (batch.empty()) throw InvalidParameterError("gradient of an empty batch");
  LossAndGradient out{0.0, zeros_like(model.params)};
  const double weight = 1.0 / static_cast<double>(batch.size());
  for (const LabeledGraph& item : batch) {
    out.loss += weight * accumulate_example(model, item.graph, item.label, weight, out.gradient);
  }
  return out;
}

GinParameters gradient(const GinModel& model, std::span<const LabeledGraph> batch) {
  return loss_and_gradient(model, batch).gradient;
}

GinModel train(const GinModel& model, const LabeledDataset& dataset, const GinConfig& cfg, Rng& rng,
               std::vector<double>* epoch_losses) {
  validate(cfg);
  if (dataset.empty()) throw InvalidParameterError("cannot train on an empty dataset");
  GinModel trained = model;
  trained.config = cfg;

  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);

  GinParameters grad = zeros_like(trained.params);
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    shuffle(order, rng);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t stop = std::min(order.size(), start + batch_size);
      const double weight = 1.0 / static_cast<double>(stop - start);
      for (Eigen::MatrixXd* block : parameter_blocks(grad)) block->setZero();
      double batch_loss = 0.0;
      for (std::size_t i = start; i < stop; ++i) {
        const LabeledGraph& item = dataset.items[order[i]];
        if (cfg.subsample_training) {
          const std::size_t s = pair_count(item.graph.node_count());
          const Graph view = subsample_graph(item.graph, kept_entry_count(s, cfg.subsample_beta), rng);
          batch_loss += weight * accumulate_example(trained, view, item.label, weight, grad);
        } else {
          batch_loss += weight * accumulate_example(trained, item.graph, item.label, weight, grad);
        }
      }
      if (!std::isfinite(batch_loss) || !all_finite(grad)) {
        throw TrainingDivergedError("non-finite loss at epoch " + std::to_string(epoch));
      }
      axpy(-cfg.learning_rate, grad, trained.params);
      epoch_loss += batch_loss;
      ++batches;
    }
    if (!all_finite(trained.params)) {
      throw TrainingDivergedError("non-finite parameters after epoch " + std::to_string(epoch));
    }
    if (epoch_losses != nullptr) epoch_losses->push_back(epoch_loss / static_cast<double>(batches));
  }
  return trained;
}

}  // namespace gbd
