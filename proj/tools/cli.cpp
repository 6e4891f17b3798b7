#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <numeric>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "burnout/dataset.hpp"
#include "burnout/eda.hpp"
#include "burnout/error.hpp"
#include "burnout/eval.hpp"
#include "burnout/modelstore.hpp"
#include "burnout/pipeline.hpp"
#include "burnout/rng.hpp"
#include "burnout/service.hpp"

namespace burnout::cli {

namespace {

std::atomic<bool> g_reload_requested{false};

void on_sighup(int) { g_reload_requested = true; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError(path, "cannot open for writing");
  file << text;
  file.flush();
  if (!file) throw IoError(path, "write failed");
}

data::MissingStrategy strategy_from(const std::string& s) {
  auto parsed = data::parse_strategy(s);
  if (!parsed) throw ValidationError("strategy", "must be impute or drop");
  return *parsed;
}

std::string resolve_bundle_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("BURNOUT_BUNDLE"); env && *env) return env;
  return {};
}

struct TrainOptions {
  std::string csv;
  std::string model = "svr";
  std::string out = "model.bnl.json";
  std::string strategy = "impute";
  double c = 1.0;
  double epsilon = 0.1;
  double gamma = 0.0;  // 0 selects the default heuristic
  std::size_t k = 5;
  std::size_t trees = 100;
  std::size_t max_depth = 16;
  std::size_t min_leaf = 2;
  std::size_t max_features = 0;  // 0 selects max(1, d / 3)
  std::uint64_t seed = 42;
  std::size_t cv_folds = 5;
};

eval::ModelSpec spec_from(const TrainOptions& o, models::ModelKind kind) {
  eval::ModelSpec spec = eval::default_spec(kind);
  spec.svr.c = o.c;
  spec.svr.epsilon = o.epsilon;
  if (o.gamma > 0.0) spec.svr.gamma = o.gamma;
  spec.svr.smo.seed = o.seed;
  spec.knn.k = o.k;
  spec.forest.n_trees = o.trees;
  spec.forest.max_depth = o.max_depth;
  spec.forest.min_samples_leaf = o.min_leaf;
  if (o.max_features > 0) spec.forest.max_features = o.max_features;
  spec.forest.seed = o.seed;
  return spec;
}

int cmd_synth(std::size_t rows, std::uint64_t seed, const std::string& path, std::ostream& out) {
  const data::Table table = data::generate_synthetic(rows, seed);
  if (path.empty() || path == "-") {
    data::write_csv(table, out);
  } else {
    data::save_csv(table, path);
  }
  return kExitOk;
}

int cmd_eda(const std::string& csv, const std::string& path, std::ostream& out) {
  const data::Table table = data::load_csv(csv);
  const std::string text = stats::to_json(stats::build_eda_report(table));
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text(path, text);
  }
  return kExitOk;
}

int cmd_train(const TrainOptions& o, std::ostream& out) {
  const auto kind = models::parse_model_kind(o.model);
  if (!kind) throw ValidationError("model", "must be svr, forest or knn");
  const data::Table table = data::load_csv(o.csv);
  const auto params = data::fit_preprocess(table, strategy_from(o.strategy));
  const auto supervised = data::apply_preprocess(table, params);
  const eval::ModelSpec spec = spec_from(o, *kind);

  store::ModelBundle bundle;
  bundle.created_at = store::utc_timestamp_now();
  bundle.preprocess = params;
  bundle.model = eval::train_model(spec, supervised.features, supervised.targets);
  bundle.training_meta.n_rows = supervised.features.rows();
  bundle.training_meta.seed = o.seed;
  if (const auto* svr = std::get_if<models::SvrModel>(&bundle.model)) {
    bundle.training_meta.c = svr->c;
    bundle.training_meta.epsilon = svr->epsilon;
    bundle.training_meta.gamma = svr->kernel.gamma;
  }
  if (o.cv_folds > 0) {
    const auto raw = data::encode_supervised(table, params);
    const auto plan = eval::make_folds(raw.features.rows(), o.cv_folds, o.seed);
    bundle.training_meta.mean_cv_r2 = eval::cross_validate(spec, raw.features, raw.targets, plan).mean_r2;
  }
  store::save_bundle(bundle, o.out);

  out << "wrote " << o.out << " (" << models::to_string(*kind) << ", " << bundle.training_meta.n_rows << " rows";
  if (bundle.training_meta.mean_cv_r2) {
    out << ", " << o.cv_folds << "-fold CV R^2 " << std::fixed << std::setprecision(4)
        << *bundle.training_meta.mean_cv_r2;
  }
  out << ")\n";
  return kExitOk;
}

struct CompareOptions {
  std::string csv;
  std::size_t folds = 30;
  std::uint64_t seed = 42;
  std::string out = "comparison.json";
  std::size_t threads = 1;
  bool global_scaling = false;
  std::size_t subsample = 0;
  std::string strategy = "impute";
  double alpha = 0.05;
  TrainOptions model;
};

int cmd_compare(const CompareOptions& o, std::ostream& out) {
  const data::Table table = data::load_csv(o.csv);
  const auto params = data::fit_preprocess(table, strategy_from(o.strategy));
  auto raw = data::encode_supervised(table, params);

  if (o.subsample > 0 && o.subsample < raw.features.rows()) {
    std::vector<std::size_t> rows(raw.features.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    Rng rng(o.seed ^ 0x5DEECE66DULL);
    rng.shuffle(std::span<std::size_t>(rows));
    rows.resize(o.subsample);
    std::sort(rows.begin(), rows.end());
    raw.features = raw.features.select_rows(rows);
    raw.targets = select(raw.targets, rows);
  }

  eval::CvOptions cv;
  cv.threads = o.threads;
  cv.per_fold_scaling = !o.global_scaling;
  Matrix features = raw.features;
  if (o.global_scaling) data::Standardizer::fit(features).transform_in_place(features);

  TrainOptions model_opts = o.model;
  model_opts.seed = o.seed;
  const std::vector<eval::ModelSpec> specs = {spec_from(model_opts, models::ModelKind::Knn),
                                              spec_from(model_opts, models::ModelKind::Svr),
                                              spec_from(model_opts, models::ModelKind::Forest)};
  const auto plan = eval::make_folds(features.rows(), o.folds, o.seed);
  const auto report = eval::compare_models(specs, features, raw.targets, plan, cv, o.alpha);
  write_text(o.out, eval::to_json(report));

  out << std::fixed << std::setprecision(4);
  out << "model           mean R^2   std\n";
  for (const auto& r : report.reports) {
    out << std::left << std::setw(15) << r.model_name << ' ' << std::right << std::setw(8) << r.mean_r2 << "  "
        << std::setw(6) << r.std_r2 << '\n';
  }
  out << "comparison                 t-stat   p-value\n";
  for (const auto& p : report.pairwise) {
    out << std::left << std::setw(25) << (p.model_a + " vs " + p.model_b) << std::right;
    if (p.test) {
      out << ' ' << std::setw(7) << std::setprecision(2) << p.test->t_stat << "   " << std::setprecision(3)
          << p.test->p_value << (p.significant ? " *" : "") << std::setprecision(4) << '\n';
    } else {
      out << "  " << p.note << '\n';
    }
  }
  out << "wrote " << o.out << '\n';
  return kExitOk;
}

struct PredictOptions {
  std::string bundle;
  int designation = 0;
  int resource = 0;
  double fatigue = 0.0;
  std::string gender, company, wfh;
};

int cmd_predict(const PredictOptions& o, std::ostream& out) {
  const std::string path = resolve_bundle_path(o.bundle);
  if (path.empty()) throw ValidationError("bundle", "pass --bundle or set BURNOUT_BUNDLE");

  std::vector<FieldError> errors;
  app::PredictRequest req;
  req.designation = o.designation;
  req.resource_allocation = o.resource;
  req.mental_fatigue_score = o.fatigue;
  if (auto g = data::parse_gender(o.gender)) req.gender = *g;
  else errors.push_back({"gender", "must be one of Female, Male"});
  if (auto c = data::parse_company_type(o.company)) req.company_type = *c;
  else errors.push_back({"company_type", "must be one of Service, Product"});
  if (auto w = data::parse_wfh(o.wfh)) req.wfh_setup = *w;
  else errors.push_back({"wfh_setup", "must be one of Yes, No"});
  try {
    req.validate();
  } catch (const ValidationError& e) {
    errors.insert(errors.begin(), e.fields().begin(), e.fields().end());
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));

  const store::ModelBundle bundle = store::load_bundle(path);
  out << app::to_json(app::predict_pipeline(bundle, req)) << '\n';
  return kExitOk;
}

int cmd_serve(const std::string& bundle_flag, const std::string& host, int port, const std::string& static_dir,
              std::ostream& out) {
  const std::string path = resolve_bundle_path(bundle_flag);
  app::PredictionService service;
  if (!path.empty()) service.set_bundle(std::make_shared<const store::ModelBundle>(store::load_bundle(path)));

  app::HttpServer server(service, {host, port, static_dir});
  const int bound = server.bind();
  out << "serving on http://" << host << ':' << bound << (path.empty() ? " (no bundle loaded)" : "") << std::endl;

  // SIGHUP reloads the bundle file; a failed reload keeps the current bundle.
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!done) {
      std::this_thread::sleep_for(std::chrono::milliseconds(200));
      if (g_reload_requested.exchange(false) && !path.empty()) {
        try {
          service.set_bundle(std::make_shared<const store::ModelBundle>(store::load_bundle(path)));
          std::cerr << "reloaded " << path << std::endl;
        } catch (const Error& e) {
          std::cerr << "reload failed: " << e.what() << std::endl;
        }
      }
    }
  });
  std::signal(SIGHUP, on_sighup);
  server.listen();
  done = true;
  watcher.join();
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Employee burnout regression workbench", "burnout"};
  app.require_subcommand(1);

  std::size_t synth_rows = 5000;
  std::uint64_t synth_seed = 1;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic table in the canonical CSV format");
  synth->add_option("--rows", synth_rows, "Number of rows")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_option("--out", synth_out, "Output CSV (stdout when omitted)");

  std::string eda_csv, eda_out;
  auto* eda = app.add_subcommand("eda", "Exploratory statistics report (JSON)");
  eda->add_option("--csv", eda_csv, "Input CSV")->required();
  eda->add_option("--out", eda_out, "Output JSON (stdout when omitted)");

  TrainOptions train_opts;
  auto* train = app.add_subcommand("train", "Fit one model and write a bundle");
  train->add_option("--csv", train_opts.csv, "Input CSV")->required();
  train->add_option("--model", train_opts.model, "svr, forest or knn")->capture_default_str();
  train->add_option("--out", train_opts.out, "Bundle path")->capture_default_str();
  train->add_option("--strategy", train_opts.strategy, "impute or drop")->capture_default_str();
  train->add_option("--c", train_opts.c, "SVR regularization C")->capture_default_str();
  train->add_option("--epsilon", train_opts.epsilon, "SVR tube half-width")->capture_default_str();
  train->add_option("--gamma", train_opts.gamma, "RBF gamma (0 = 1/(d * mean variance))");
  train->add_option("--k", train_opts.k, "KNN neighbours")->capture_default_str();
  train->add_option("--trees", train_opts.trees, "Forest size")->capture_default_str();
  train->add_option("--max-depth", train_opts.max_depth, "Tree depth limit")->capture_default_str();
  train->add_option("--min-leaf", train_opts.min_leaf, "Minimum rows per leaf")->capture_default_str();
  train->add_option("--max-features", train_opts.max_features, "Features tried per split (0 = d/3)");
  train->add_option("--seed", train_opts.seed, "Random seed")->capture_default_str();
  train->add_option("--cv-folds", train_opts.cv_folds, "Folds for the recorded CV score (0 = skip)")
      ->capture_default_str();

  CompareOptions cmp;
  auto* compare = app.add_subcommand("compare", "Cross-validated comparison of KNN, SVR and RandomForest");
  compare->add_option("--csv", cmp.csv, "Input CSV")->required();
  compare->add_option("--folds", cmp.folds, "Number of folds")->capture_default_str();
  compare->add_option("--seed", cmp.seed, "Fold and model seed")->capture_default_str();
  compare->add_option("--out", cmp.out, "Report path")->capture_default_str();
  compare->add_option("--threads", cmp.threads, "Folds trained concurrently")->capture_default_str();
  compare->add_flag("--global-scaling", cmp.global_scaling, "Standardize once on all rows instead of per fold");
  compare->add_option("--subsample", cmp.subsample, "Use a seeded subsample of this many rows");
  compare->add_option("--strategy", cmp.strategy, "impute or drop")->capture_default_str();
  compare->add_option("--alpha", cmp.alpha, "Significance level")->capture_default_str();
  compare->add_option("--c", cmp.model.c, "SVR regularization C")->capture_default_str();
  compare->add_option("--epsilon", cmp.model.epsilon, "SVR tube half-width")->capture_default_str();
  compare->add_option("--gamma", cmp.model.gamma, "RBF gamma (0 = 1/(d * mean variance))");
  compare->add_option("--k", cmp.model.k, "KNN neighbours")->capture_default_str();
  compare->add_option("--trees", cmp.model.trees, "Forest size")->capture_default_str();

  PredictOptions pred;
  auto* predict = app.add_subcommand("predict", "One prediction from command-line inputs");
  predict->add_option("--bundle", pred.bundle, "Bundle path (falls back to BURNOUT_BUNDLE)");
  predict->add_option("--designation", pred.designation, "Hierarchy level 0-5")->required();
  predict->add_option("--resource", pred.resource, "Resource allocation 1-10")->required();
  predict->add_option("--fatigue", pred.fatigue, "Mental fatigue score 0-10")->required();
  predict->add_option("--gender", pred.gender, "Female or Male")->required();
  predict->add_option("--company", pred.company, "Service or Product")->required();
  predict->add_option("--wfh", pred.wfh, "Yes or No")->required();

  std::string serve_bundle, serve_host = "127.0.0.1", serve_static;
  int serve_port = 8600;
  auto* serve = app.add_subcommand("serve", "Start the HTTP prediction service");
  serve->add_option("--bundle", serve_bundle, "Bundle path (falls back to BURNOUT_BUNDLE)");
  serve->add_option("--port", serve_port, "Listen port")->capture_default_str();
  serve->add_option("--host", serve_host, "Listen address")->capture_default_str();
  serve->add_option("--static-dir", serve_static, "Directory with the built web UI, served at /");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("burnout");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_rows, synth_seed, synth_out, out);
    if (eda->parsed()) return cmd_eda(eda_csv, eda_out, out);
    if (train->parsed()) return cmd_train(train_opts, out);
    if (compare->parsed()) return cmd_compare(cmp, out);
    if (predict->parsed()) return cmd_predict(pred, out);
    if (serve->parsed()) return cmd_serve(serve_bundle, serve_host, serve_port, serve_static, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  err << app.help();
  return kExitValidation;
}

}  // namespace burnout::cli
