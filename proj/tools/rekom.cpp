// rekom: generate -> derive -> train -> serve
//
// Exit codes: 0 success, 1 usage error, 2 data/runtime error.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rekom/artifacts.hpp"
#include "rekom/error.hpp"
#include "rekom/format.hpp"
#include "rekom/pipeline.hpp"
#include "rekom/service.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kDataError = 2;

rekom::RecommendationService* g_service = nullptr;

void handle_signal(int) {
  if (g_service) g_service->stop();
}

int default_port() {
  if (const char* env = std::getenv("REKOM_PORT")) {
    if (auto port = rekom::parse_number<int>(env); port && *port > 0 && *port < 65536) return *port;
    std::cerr << "warning: ignoring invalid REKOM_PORT=" << env << '\n';
  }
  return 8080;
}

// "type=N"
void apply_counts(rekom::SynthConfig& config, const std::vector<std::string>& specs) {
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    auto n = eq == std::string::npos ? std::nullopt : rekom::parse_number<int>(spec.substr(eq + 1));
    if (!n) throw CLI::ValidationError("--count", "expected TYPE=N, got " + spec);
    config.counts[spec.substr(0, eq)] = *n;
  }
}

// "src:dst=mean"
void apply_fanouts(rekom::SynthConfig& config, const std::vector<std::string>& specs) {
  for (const auto& spec : specs) {
    const auto colon = spec.find(':');
    const auto eq = spec.find('=');
    auto mean = eq == std::string::npos ? std::nullopt : rekom::parse_number<double>(spec.substr(eq + 1));
    if (colon == std::string::npos || eq < colon || !mean) {
      throw CLI::ValidationError("--fanout", "expected SRC:DST=MEAN, got " + spec);
    }
    const auto src = spec.substr(0, colon);
    const auto dst = spec.substr(colon + 1, eq - colon - 1);
    bool replaced = false;
    for (auto& rule : config.lineage) {
      if (rule.src_type == src && rule.dst_type == dst) {
        rule.mean_fanout = *mean;
        replaced = true;
      }
    }
    if (!replaced) config.lineage.push_back({src, dst, "lineage", *mean});
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Link-prediction recommendation workbench over a typed lineage graph"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Synthesize a lineage graph (nodes.csv, edges.csv)");
  std::string gen_out;
  std::uint64_t gen_seed = 0;
  double gen_scale = 1.0;
  std::vector<std::string> gen_counts, gen_fanouts;
  auto synth = rekom::SynthConfig::defaults();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--scale", gen_scale, "Multiply every default node count")->check(CLI::PositiveNumber);
  gen->add_option("--count", gen_counts, "Node count override, TYPE=N (repeatable)");
  gen->add_option("--fanout", gen_fanouts, "Lineage fan-out override, SRC:DST=MEAN (repeatable)");
  gen->add_option("--owns-per-user", synth.owns_per_user, "Mean owned assets per user");
  gen->add_option("--views-per-user", synth.views_per_user, "Mean viewed assets per user");
  gen->add_option("--popularity-sigma", synth.popularity_sigma, "Log-normal spread of per-node activity");

  // derive
  auto* der = app.add_subcommand("derive", "Derive node features (features.csv)");
  std::string der_graph, der_out;
  rekom::DeriveOptions derive_opts;
  der->add_option("--graph-dir", der_graph, "Directory holding nodes.csv and edges.csv")->required();
  der->add_option("--out", der_out, "Output directory (default: graph dir)");
  der->add_option("--seed", derive_opts.community_seed, "Community detection seed");
  der->add_option("--damping", derive_opts.pagerank.damping, "PageRank damping");
  der->add_option("--tol", derive_opts.pagerank.tol, "PageRank L1 tolerance");
  der->add_option("--max-iter", derive_opts.pagerank.max_iter, "PageRank iteration cap");

  // train
  auto* trn = app.add_subcommand("train", "Train the link predictor (embedding.bin, training_log.csv, projection.csv)");
  std::string trn_graph, trn_features, trn_out;
  rekom::TrainConfig train_cfg;
  trn->add_option("--graph-dir", trn_graph, "Directory holding nodes.csv and edges.csv")->required();
  trn->add_option("--features", trn_features, "features.csv (default: <graph-dir>/features.csv)");
  trn->add_option("--out", trn_out, "Output directory (default: graph dir)");
  trn->add_option("--epochs", train_cfg.epochs, "Training epochs");
  trn->add_option("--learning-rate", train_cfg.learning_rate, "Gradient descent step size");
  trn->add_option("--layers", train_cfg.layers, "Message-passing layers");
  trn->add_option("--hidden-dim", train_cfg.hidden_dim, "Hidden layer width");
  trn->add_option("--embed-dim", train_cfg.embed_dim, "Embedding dimension M");
  trn->add_option("--negatives", train_cfg.negatives_per_positive, "Negative samples per positive edge");
  trn->add_option("--validation-fraction", train_cfg.validation_fraction, "Held-out edge share");
  trn->add_option("--supervision-fraction", train_cfg.supervision_fraction,
                  "Share of training edges scored each epoch (the rest carry messages)");
  trn->add_option("--seed", train_cfg.seed, "Random seed");

  // serve
  auto* srv = app.add_subcommand("serve", "Serve the HTTP/JSON API");
  std::string srv_dir, srv_host = "127.0.0.1", srv_ui;
  int srv_port = default_port();
  srv->add_option("--artifacts-dir", srv_dir, "Directory with graph, features, embedding and projection files")
      ->required();
  srv->add_option("--port", srv_port, "Listen port (default: $REKOM_PORT or 8080)")->check(CLI::Range(0, 65535));
  srv->add_option("--host", srv_host, "Listen address");
  srv->add_option("--ui-dir", srv_ui, "Static frontend directory served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (gen->parsed()) {
      if (gen_scale != 1.0) synth = synth.scaled(gen_scale);
      apply_counts(synth, gen_counts);
      apply_fanouts(synth, gen_fanouts);
      synth.seed = gen_seed;
      rekom::run_generate(synth, gen_out, std::cout);
    } else if (der->parsed()) {
      rekom::run_derive(der_graph, der_out.empty() ? der_graph : der_out, derive_opts, std::cout);
    } else if (trn->parsed()) {
      const std::filesystem::path graph_dir = trn_graph;
      const auto features = trn_features.empty() ? graph_dir / rekom::artifact_files::kFeatures
                                                 : std::filesystem::path(trn_features);
      rekom::run_train(graph_dir, features, trn_out.empty() ? graph_dir : std::filesystem::path(trn_out), train_cfg,
                       std::cout);
    } else if (srv->parsed()) {
      const std::filesystem::path dir = srv_dir;
      auto artifacts = std::make_shared<const rekom::Artifacts>(rekom::Artifacts::load(dir));
      auto store = std::make_shared<rekom::AnnotationStore>(dir / rekom::artifact_files::kAnnotations);
      rekom::RecommendationService service(artifacts, store, {srv_ui});
      const int port = service.bind(srv_host, srv_port);
      g_service = &service;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      std::cout << "serving " << artifacts->graph.node_count() << " nodes (model " << artifacts->model_version
                << ") on http://" << srv_host << ':' << port << std::endl;
      service.serve();
      g_service = nullptr;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const rekom::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return 0;
}
