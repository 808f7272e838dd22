#include "rekom/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "rekom/format.hpp"
#include "rekom/random.hpp"

namespace rekom {

void TrainConfig::validate() const {
  if (layers < 1) throw ValidationError("layers must be >= 1");
  if (hidden_dim < 1) throw ValidationError("hidden_dim must be >= 1");
  if (embed_dim < 2) throw ValidationError("embed_dim must be >= 2");
  if (epochs < 0) throw ValidationError("epochs must be >= 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning_rate must be a positive number");
  }
  if (negatives_per_positive < 1) throw ValidationError("negatives_per_positive must be >= 1");
  if (!(validation_fraction > 0.0 && validation_fraction < 0.5)) {
    throw ValidationError("validation_fraction must lie in (0, 0.5)");
  }
  if (!(supervision_fraction > 0.0 && supervision_fraction < 1.0)) {
    throw ValidationError("supervision_fraction must lie in (0, 1)");
  }
}

NeighborMean::NeighborMean(std::size_t node_count, std::span<const IndexPair> edges)
    : offsets_(node_count + 1, 0) {
  for (const auto& [a, b] : edges) {
    ++offsets_[a + 1];
    ++offsets_[b + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  targets_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [a, b] : edges) {
    targets_[cursor[a]++] = b;
    targets_[cursor[b]++] = a;
  }
  for (std::size_t i = 0; i < node_count; ++i) {
    std::sort(targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
  }
}

NeighborMean NeighborMean::from_graph(const LineageGraph& graph) {
  std::vector<IndexPair> edges;
  edges.reserve(graph.edge_count());
  for (const auto& e : graph.edges()) edges.emplace_back(e.src, e.dst);
  return NeighborMean(graph.node_count(), edges);
}

Matrix NeighborMean::apply(const Matrix& h) const {
  Matrix out = Matrix::Zero(h.rows(), h.cols());
  for (std::size_t i = 0; i + 1 < offsets_.size(); ++i) {
    const auto begin = offsets_[i], end = offsets_[i + 1];
    if (begin == end) continue;
    auto row = out.row(static_cast<Eigen::Index>(i));
    for (auto p = begin; p < end; ++p) row += h.row(targets_[p]);
    row /= static_cast<double>(end - begin);
  }
  return out;
}

Matrix NeighborMean::apply_transpose(const Matrix& g) const {
  Matrix out = Matrix::Zero(g.rows(), g.cols());
  for (std::size_t i = 0; i + 1 < offsets_.size(); ++i) {
    const auto begin = offsets_[i], end = offsets_[i + 1];
    if (begin == end) continue;
    const auto scaled = g.row(static_cast<Eigen::Index>(i)) / static_cast<double>(end - begin);
    for (auto p = begin; p < end; ++p) out.row(targets_[p]) += scaled;
  }
  return out;
}

GraphEncoder::GraphEncoder(std::size_t input_dim, const TrainConfig& config, std::uint64_t seed) {
  config.validate();
  if (input_dim == 0) throw ValidationError("input dimension must be positive");
  std::mt19937_64 rng(seed);
  std::size_t in = input_dim;
  for (int l = 0; l < config.layers; ++l) {
    const std::size_t out = l + 1 == config.layers ? static_cast<std::size_t>(config.embed_dim)
                                                   : static_cast<std::size_t>(config.hidden_dim);
    const double limit = std::sqrt(6.0 / static_cast<double>(2 * in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Matrix w(static_cast<Eigen::Index>(2 * in), static_cast<Eigen::Index>(out));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
    }
    weights_.push_back(std::move(w));
    in = out;
  }
}

GraphEncoder::GraphEncoder(std::vector<Matrix> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw ValidationError("encoder needs at least one layer");
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (weights_[l].rows() % 2 != 0) throw ValidationError("layer input must be [self | neighbours]");
    if (l > 0 && weights_[l].rows() != 2 * weights_[l - 1].cols()) {
      throw ValidationError("layer " + std::to_string(l) + " shape does not chain");
    }
  }
}

namespace {

struct ForwardTrace {
  std::vector<Matrix> concat;  // [h | A h] per layer
  std::vector<Matrix> pre;     // concat * W per layer
  Matrix output;
};

ForwardTrace run_forward(const std::vector<Matrix>& weights, const NeighborMean& aggregate,
                         const Matrix& features, bool keep_trace) {
  if (static_cast<std::size_t>(features.rows()) != aggregate.size()) {
    throw DataError("feature matrix has " + std::to_string(features.rows()) + " rows, graph has " +
                    std::to_string(aggregate.size()) + " nodes");
  }
  if (features.cols() * 2 != weights.front().rows()) {
    throw DataError("feature matrix has " + std::to_string(features.cols()) + " columns, encoder expects " +
                    std::to_string(weights.front().rows() / 2));
  }
  ForwardTrace trace;
  Matrix h = features;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    Matrix cat(h.rows(), 2 * h.cols());
    cat.leftCols(h.cols()) = h;
    cat.rightCols(h.cols()) = aggregate.apply(h);
    Matrix pre = cat * weights[l];
    h = l + 1 < weights.size() ? Matrix(pre.cwiseMax(0.0)) : pre;
    if (keep_trace) {
      trace.concat.push_back(std::move(cat));
      trace.pre.push_back(std::move(pre));
    }
  }
  trace.output = std::move(h);
  return trace;
}

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double pair_loss(const Matrix& z, const LabeledPairs& batch, Matrix* dz) {
  if (batch.pairs.size() != batch.labels.size()) throw ValidationError("pairs and labels differ in length");
  if (batch.pairs.empty()) throw ValidationError("empty training batch");
  const auto positives = static_cast<std::size_t>(std::count(batch.labels.begin(), batch.labels.end(), 1.0));
  const std::size_t negatives = batch.pairs.size() - positives;
  // Each class contributes half of the loss, or all of it when the other is absent.
  const double halves = positives > 0 && negatives > 0 ? 2.0 : 1.0;
  const double pos_scale = positives ? 1.0 / (halves * static_cast<double>(positives)) : 0.0;
  const double neg_scale = negatives ? 1.0 / (halves * static_cast<double>(negatives)) : 0.0;
  double loss = 0.0;
  for (std::size_t k = 0; k < batch.pairs.size(); ++k) {
    const auto [u, v] = batch.pairs[k];
    const double y = batch.labels[k];
    const double scale = y == 1.0 ? pos_scale : neg_scale;
    const double s = z.row(u).dot(z.row(v));
    // -[y log sigma(s) + (1 - y) log(1 - sigma(s))] = softplus(s) - y s
    loss += scale * (softplus(s) - y * s);
    if (dz) {
      const double g = (sigmoid(s) - y) * scale;
      dz->row(u) += g * z.row(v);
      dz->row(v) += g * z.row(u);
    }
  }
  return loss;
}

}  // namespace

Matrix GraphEncoder::forward(const NeighborMean& aggregate, const Matrix& features) const {
  return run_forward(weights_, aggregate, features, false).output;
}

double link_loss(const GraphEncoder& encoder, const NeighborMean& aggregate, const Matrix& features,
                 const LabeledPairs& batch) {
  const Matrix z = encoder.forward(aggregate, features);
  return pair_loss(z, batch, nullptr);
}

LossGradient link_loss_gradient(const GraphEncoder& encoder, const NeighborMean& aggregate,
                                const Matrix& features, const LabeledPairs& batch) {
  const auto& weights = encoder.weights();
  const std::vector<Matrix> w(weights.begin(), weights.end());
  auto trace = run_forward(w, aggregate, features, true);

  LossGradient result;
  Matrix grad = Matrix::Zero(trace.output.rows(), trace.output.cols());
  result.loss = pair_loss(trace.output, batch, &grad);
  result.weight_gradients.resize(w.size());

  for (std::size_t l = w.size(); l-- > 0;) {
    if (l + 1 < w.size()) grad = grad.cwiseProduct((trace.pre[l].array() > 0.0).cast<double>().matrix());
    result.weight_gradients[l] = trace.concat[l].transpose() * grad;
    if (l == 0) break;
    const Matrix through = grad * w[l].transpose();
    const Eigen::Index d = through.cols() / 2;
    grad = through.leftCols(d) + aggregate.apply_transpose(through.rightCols(d));
  }
  return result;
}

std::vector<IndexPair> sample_non_edges(const LineageGraph& graph, std::size_t count, std::uint64_t seed) {
  std::vector<IndexPair> out;
  const std::size_t n = graph.node_count();
  if (n < 2 || count == 0) return out;
  out.reserve(count);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<NodeIndex> pick(0, static_cast<NodeIndex>(n - 1));
  // Bounded rejection; near-complete graphs yield fewer pairs rather than spinning.
  std::size_t budget = count * 64;
  while (out.size() < count && budget-- > 0) {
    const NodeIndex u = pick(rng);
    const NodeIndex v = pick(rng);
    if (u == v || graph.has_edge(u, v)) continue;
    out.emplace_back(u, v);
  }
  return out;
}

TrainResult train(const LineageGraph& graph, const FeatureMatrix& features, const TrainConfig& config) {
  config.validate();
  const std::size_t n = graph.node_count();
  if (static_cast<std::size_t>(features.values.rows()) != n || features.ids.size() != n) {
    throw DataError("feature matrix has " + std::to_string(features.values.rows()) + " rows, graph has " +
                    std::to_string(n) + " nodes");
  }
  for (NodeIndex i = 0; i < n; ++i) {
    if (features.ids[i] != graph.node(i).id) {
      throw DataError("feature row " + std::to_string(i) + " is `" + features.ids[i] + "`, expected `" +
                      graph.node(i).id + "`");
    }
  }

  std::vector<IndexPair> edges;
  edges.reserve(graph.edge_count());
  for (const auto& e : graph.edges()) edges.emplace_back(e.src, e.dst);
  {
    std::mt19937_64 split_rng(derive_seed(config.seed, 1));
    std::shuffle(edges.begin(), edges.end(), split_rng);
  }
  std::size_t val_count = 0;
  if (edges.size() >= 2) {
    val_count = static_cast<std::size_t>(std::llround(config.validation_fraction * static_cast<double>(edges.size())));
    val_count = std::clamp<std::size_t>(val_count, 1, edges.size() - 1);
  }
  std::vector<IndexPair> val_edges(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(val_count));
  std::vector<IndexPair> train_edges(edges.begin() + static_cast<std::ptrdiff_t>(val_count), edges.end());
  std::sort(val_edges.begin(), val_edges.end());
  std::sort(train_edges.begin(), train_edges.end());

  const auto k = static_cast<std::size_t>(config.negatives_per_positive);
  auto val_negatives = sample_non_edges(graph, val_count * k, derive_seed(config.seed, 2));

  const NeighborMean train_graph(n, train_edges);
  GraphEncoder encoder(static_cast<std::size_t>(features.values.cols()), config, derive_seed(config.seed, 0));

  auto validation_auc = [&](const Matrix& z) {
    if (val_edges.empty() || val_negatives.empty()) return std::numeric_limits<double>::quiet_NaN();
    auto scores = [&](const std::vector<IndexPair>& pairs) {
      std::vector<double> s;
      s.reserve(pairs.size());
      for (const auto& [u, v] : pairs) s.push_back(sigmoid(z.row(u).dot(z.row(v))));
      return s;
    };
    return auc_from_scores(scores(val_edges), scores(val_negatives));
  };

  std::vector<EpochRecord> log;
  double last_auc = validation_auc(encoder.forward(train_graph, features.values));
  if (config.epochs > 0 && train_edges.empty()) throw DataError("graph has no training edges");

  LabeledPairs batch;
  std::vector<IndexPair> order = train_edges;
  std::vector<IndexPair> passing;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto e = static_cast<std::uint64_t>(epoch);
    // Supervised edges are hidden from message passing so the encoder cannot
    // score a pair by spotting one endpoint in the other's neighbourhood.
    std::mt19937_64 split_rng(derive_seed(config.seed, 2000 + e));
    std::shuffle(order.begin(), order.end(), split_rng);
    auto supervised = static_cast<std::size_t>(std::llround(config.supervision_fraction * static_cast<double>(order.size())));
    supervised = std::clamp<std::size_t>(supervised, 1, order.size());
    passing.assign(order.begin() + static_cast<std::ptrdiff_t>(supervised), order.end());
    const NeighborMean epoch_graph(n, passing);

    const auto negatives = sample_non_edges(graph, supervised * k, derive_seed(config.seed, 1000 + e));
    batch.pairs.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(supervised));
    batch.pairs.insert(batch.pairs.end(), negatives.begin(), negatives.end());
    batch.labels.assign(batch.pairs.size(), 0.0);
    std::fill(batch.labels.begin(), batch.labels.begin() + static_cast<std::ptrdiff_t>(supervised), 1.0);

    auto step = link_loss_gradient(encoder, epoch_graph, features.values, batch);
    if (!std::isfinite(step.loss)) {
      throw TrainingError("training loss became non-finite at epoch " + std::to_string(epoch), epoch);
    }
    auto& w = encoder.weights();
    for (std::size_t l = 0; l < w.size(); ++l) w[l] -= config.learning_rate * step.weight_gradients[l];

    last_auc = validation_auc(encoder.forward(train_graph, features.values));
    log.push_back({epoch, step.loss, last_auc});
  }

  Matrix z = encoder.forward(NeighborMean::from_graph(graph), features.values);
  return TrainResult{EmbeddingMatrix(std::move(z), features.ids), std::move(log), std::move(encoder), last_auc,
                     std::move(val_edges), std::move(val_negatives)};
}

void write_training_log(std::ostream& out, std::span<const EpochRecord> log) {
  out << "epoch,train_loss,val_auc\n";
  for (const auto& r : log) {
    out << r.epoch << ',' << format_double(r.train_loss) << ',' << format_double(r.val_auc) << '\n';
  }
}

}  // namespace rekom
