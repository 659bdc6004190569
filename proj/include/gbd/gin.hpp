#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gbd/dataset.hpp"
#include "gbd/graph.hpp"
#include "gbd/rng.hpp"

namespace gbd {

struct GinConfig {
  int num_layers = 2;
  int hidden_dim = 16;
  int num_classes = 2;
  double epsilon = 0.0;
  double learning_rate = 0.001;
  int batch_size = 32;
  int max_epochs = 100;
  std::uint64_t seed = 0;
  /// Replace every batch graph by a subsampled copy before each step.
  bool subsample_training = false;
  double subsample_beta = 0.1;
};

/// Throws InvalidParameterError on non-positive sizes or learning rate.
void validate(const GinConfig& cfg);

/// One GIN layer: h_v <- relu(relu(a_v W1 + b1) W2 + b2) where
/// a_v = (1 + eps) h_v + sum of neighbour embeddings. Biases are 1 x k.
struct GinLayer {
  Eigen::MatrixXd w1;
  Eigen::MatrixXd b1;
  Eigen::MatrixXd w2;
  Eigen::MatrixXd b2;
};

/// Model parameters; gradients share the same shape.
struct GinParameters {
  std::vector<GinLayer> layers;
  Eigen::MatrixXd w_out;  ///< hidden x classes
  Eigen::MatrixXd b_out;  ///< 1 x classes
};

std::vector<Eigen::MatrixXd*> parameter_blocks(GinParameters& p);
std::vector<const Eigen::MatrixXd*> parameter_blocks(const GinParameters& p);
std::size_t parameter_count(const GinParameters& p);
bool all_finite(const GinParameters& p);

/// a += scale * b, blockwise.
void axpy(double scale, const GinParameters& b, GinParameters& a);

struct GinModel {
  GinConfig config;
  GinParameters params;
};

/// Glorot-uniform initialization (weights and biases) seeded by cfg.seed.
GinModel init_model(const GinConfig& cfg, int feature_dim = 1);

/// Class probabilities. Sum readout over the final layer, linear head,
/// softmax. Throws EmptyGraphError on a zero-node graph.
Eigen::VectorXd forward(const GinModel& model, const Graph& g);

/// Index of the largest entry; ties go to the lowest index.
int argmax(const Eigen::VectorXd& values);

int predict(const GinModel& model, const Graph& g);

/// Mean cross-entropy with probabilities clamped at 1e-12.
double loss(const GinModel& model, std::span<const LabeledGraph> batch);
double loss(const GinModel& model, const LabeledDataset& batch);

struct LossAndGradient {
  double loss = 0.0;
  GinParameters gradient;
};

/// Analytic backpropagation of the mean cross-entropy -log p[label]. Equals
/// the derivative of loss() wherever the 1e-12 clamp is inactive.
LossAndGradient loss_and_gradient(const GinModel& model, std::span<const LabeledGraph> batch);
GinParameters gradient(const GinModel& model, std::span<const LabeledGraph> batch);

/// Shuffled minibatch SGD for cfg.max_epochs epochs with theta -= lr * grad.
/// With cfg.subsample_training each batch graph is first subsampled with
/// ratio cfg.subsample_beta. `epoch_losses`, when given, receives the mean
/// batch loss of each epoch. Throws TrainingDivergedError on a non-finite loss.
GinModel train(const GinModel& model, const LabeledDataset& dataset, const GinConfig& cfg, Rng& rng,
               std::vector<double>* epoch_losses = nullptr);

}  // namespace gbd
