#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "rekom/embedding.hpp"
#include "rekom/error.hpp"
#include "rekom/features.hpp"
#include "rekom/graph.hpp"
#include "rekom/matrix.hpp"

namespace rekom {

struct TrainConfig {
  int layers = 2;
  int hidden_dim = 64;
  int embed_dim = 32;
  int epochs = 200;
  double learning_rate = 0.1;
  int negatives_per_positive = 5;
  double validation_fraction = 0.1;
  double supervision_fraction = 0.3;  // share of training edges scored per epoch, the rest carry messages
  std::uint64_t seed = 0;

  /// Throws ValidationError.
  void validate() const;
};

/// Raised when the training loss stops being finite.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, int epoch) : Error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

using IndexPair = std::pair<NodeIndex, NodeIndex>;

/// Row-mean over undirected neighbours: (A h)_i = mean_{j ~ i} h_j, zero for isolated nodes.
class NeighborMean {
 public:
  NeighborMean(std::size_t node_count, std::span<const IndexPair> edges);
  static NeighborMean from_graph(const LineageGraph& graph);

  std::size_t size() const noexcept { return offsets_.size() - 1; }
  Matrix apply(const Matrix& h) const;
  /// A^T g, the adjoint used in backpropagation.
  Matrix apply_transpose(const Matrix& g) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeIndex> targets_;
};

/**
 * Mean-aggregation message-passing encoder.
 *
 *   h0 = x
 *   h(l+1) = relu([h(l) | A h(l)] W(l))   for all but the last layer
 *   z      = [h(L-1) | A h(L-1)] W(L-1)
 *
 * W(l) has shape (2 * in_dim) x out_dim. No bias terms.
 */
class GraphEncoder {
 public:
  /// Glorot-uniform initialisation from `seed`.
  GraphEncoder(std::size_t input_dim, const TrainConfig& config, std::uint64_t seed);
  explicit GraphEncoder(std::vector<Matrix> weights);

  std::span<const Matrix> weights() const noexcept { return weights_; }
  std::vector<Matrix>& weights() noexcept { return weights_; }
  std::size_t input_dim() const { return static_cast<std::size_t>(weights_.front().rows() / 2); }
  std::size_t output_dim() const { return static_cast<std::size_t>(weights_.back().cols()); }

  Matrix forward(const NeighborMean& aggregate, const Matrix& features) const;

 private:
  std::vector<Matrix> weights_;
};

struct LabeledPairs {
  std::vector<IndexPair> pairs;
  std::vector<double> labels;  // 1 for an edge, 0 for a sampled non-edge
};

struct LossGradient {
  double loss = 0.0;
  std::vector<Matrix> weight_gradients;  // same shapes as GraphEncoder::weights()
};

/// Binary cross-entropy of sigmoid(z_u . z_v) over `batch`, averaged per class so positives
/// and negatives weigh equally, and its gradient.
LossGradient link_loss_gradient(const GraphEncoder& encoder, const NeighborMean& aggregate,
                                const Matrix& features, const LabeledPairs& batch);
double link_loss(const GraphEncoder& encoder, const NeighborMean& aggregate, const Matrix& features,
                 const LabeledPairs& batch);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;  // batch loss before this epoch's update
  double val_auc = 0.0;     // held-out AUC after the update; NaN without validation edges
};

struct TrainResult {
  EmbeddingMatrix embedding;  // forward pass over the full graph with the trained weights
  std::vector<EpochRecord> log;
  GraphEncoder encoder;
  double final_val_auc;  // after the last epoch (initial weights when epochs == 0)
  std::vector<IndexPair> validation_edges;
  std::vector<IndexPair> validation_negatives;
};

/// Uniformly samples `count` node pairs that are not edges of `graph`.
std::vector<IndexPair> sample_non_edges(const LineageGraph& graph, std::size_t count, std::uint64_t seed);

/**
 * Full-batch gradient-descent training for link prediction.
 *
 * A `validation_fraction` share of the edges is held out (removed from the
 * message-passing graph) and scored each epoch against a fixed set of sampled
 * non-edges. Each epoch splits the remaining edges into a supervised share,
 * scored against `negatives_per_positive` fresh non-edges each, and a
 * message-passing share. Bit-for-bit deterministic given the config seed.
 */
TrainResult train(const LineageGraph& graph, const FeatureMatrix& features, const TrainConfig& config);

/// Header `epoch,train_loss,val_auc`.
void write_training_log(std::ostream& out, std::span<const EpochRecord> log);

}  // namespace rekom
