// difl: fit feature-learning stacks, extract features, and run labeled
// classification experiments from the command line. JSON results go to
// stdout, progress and warnings to stderr.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "difl/difl.hpp"

namespace {

using nlohmann::json;

// validated contents of --config plus the flags that may override it
struct Options {
  std::vector<difl::LayerConfig> layers;
  difl::HistogramConfig hist;
  difl::SvmConfig svm;
  std::uint64_t seed = 0;
};

[[noreturn]] void bad_config(const std::string& field, const std::string& why) {
  throw std::invalid_argument(field + ": " + why);
}

int require_int(const json& j, const std::string& field, int lo, int hi) {
  if (!j.is_number_integer()) bad_config(field, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < lo || v > hi)
    bad_config(field, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

double require_number(const json& j, const std::string& field) {
  if (!j.is_number()) bad_config(field, "expected a number");
  return j.get<double>();
}

std::pair<int, int> parse_patch(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) bad_config(field, "expected [h1, h2]");
  return {require_int(j[0], field + "[0]", 1, 1 << 14),
          require_int(j[1], field + "[1]", 1, 1 << 14)};
}

Options parse_config(const std::string& path) {
  Options opt;
  opt.hist.bits = 0;  // filled from the last layer below
  int patch_h1 = 7, patch_h2 = 7;
  json cfg = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw difl::format_error("cannot open config " + path);
    try {
      in >> cfg;
    } catch (const json::parse_error& e) {
      bad_config("config", std::string("not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) bad_config("config", "top level must be an object");
  }

  for (const auto& [key, value] : cfg.items()) {
    if (key == "seed") {
      if (!value.is_number_integer() || value.get<std::int64_t>() < 0)
        bad_config("seed", "expected a non-negative integer");
      opt.seed = value.get<std::uint64_t>();
    } else if (key == "patch") {
      std::tie(patch_h1, patch_h2) = parse_patch(value, "patch");
    } else if (key == "layers") {
      if (!value.is_array() || value.empty()) bad_config("layers", "expected a non-empty array");
    } else if (key == "histogram" || key == "classifier") {
      if (!value.is_object()) bad_config(key, "expected an object");
    } else {
      bad_config(key, "unknown field");
    }
  }

  if (cfg.contains("layers")) {
    for (std::size_t i = 0; i < cfg["layers"].size(); ++i) {
      const json& jl = cfg["layers"][i];
      const std::string field = "layers[" + std::to_string(i) + "]";
      if (!jl.is_object()) bad_config(field, "expected an object");
      difl::LayerConfig layer;
      layer.h1 = patch_h1;
      layer.h2 = patch_h2;
      for (const auto& [key, value] : jl.items()) {
        if (key == "rules")
          layer.rules = require_int(value, field + ".rules", 1, 65535);
        else if (key == "outputs")
          layer.outputs = require_int(value, field + ".outputs", 1, 24);
        else if (key == "patch")
          std::tie(layer.h1, layer.h2) = parse_patch(value, field + ".patch");
        else
          bad_config(field + "." + key, "unknown field");
      }
      try {
        layer.validate();
      } catch (const std::invalid_argument& e) {
        bad_config(field, e.what());
      }
      opt.layers.push_back(layer);
    }
  } else {
    // stock two-layer setup: K=3, L=8 per layer
    difl::LayerConfig layer;
    layer.h1 = patch_h1;
    layer.h2 = patch_h2;
    opt.layers = {layer, layer};
  }

  opt.hist.block_h1 = patch_h1;
  opt.hist.block_h2 = patch_h2;
  if (cfg.contains("histogram")) {
    for (const auto& [key, value] : cfg["histogram"].items()) {
      if (key == "block")
        std::tie(opt.hist.block_h1, opt.hist.block_h2) = parse_patch(value, "histogram.block");
      else if (key == "overlap")
        opt.hist.overlap = require_number(value, "histogram.overlap");
      else
        bad_config("histogram." + key, "unknown field");
    }
  }
  opt.hist.bits = opt.layers.back().outputs;
  try {
    opt.hist.validate();
  } catch (const std::invalid_argument& e) {
    bad_config("histogram", e.what());
  }

  if (cfg.contains("classifier")) {
    for (const auto& [key, value] : cfg["classifier"].items()) {
      if (key == "lambda") {
        opt.svm.lambda = require_number(value, "classifier.lambda");
        if (opt.svm.lambda <= 0.0) bad_config("classifier.lambda", "must be positive");
      } else if (key == "epochs") {
        opt.svm.epochs = require_int(value, "classifier.epochs", 1, 1000000);
      } else if (key == "normalize") {
        if (!value.is_boolean()) bad_config("classifier.normalize", "expected a boolean");
        opt.svm.normalize = value.get<bool>();
      } else {
        bad_config("classifier." + key, "unknown field");
      }
    }
  }
  return opt;
}

difl::CorruptionSpec parse_corruption(const std::string& text, std::uint64_t seed) {
  const auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size())
    bad_config("corrupt", "expected kind:param, e.g. gaussian:30");
  const std::string kind = text.substr(0, colon);
  double param = 0.0;
  try {
    std::size_t used = 0;
    param = std::stod(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("");
  } catch (const std::exception&) {
    bad_config("corrupt", "parameter is not a number");
  }
  if (kind == "salt_pepper" || kind == "saltPepper")
    return difl::CorruptionSpec::salt_pepper(param, seed);
  if (kind == "gaussian") return difl::CorruptionSpec::gaussian(param, seed);
  if (kind == "occlusion") return difl::CorruptionSpec::occlusion(param, seed);
  bad_config("corrupt", "unknown kind '" + kind + "'");
}

void emit(const json& out) { std::cout << out.dump(2) << "\n"; }

struct Args {
  std::string config, model, images, labels, out;
  std::string test_images, test_labels;
  std::string corrupt_spec;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool baseline = false;
  int per_class_train = 0;
};

Options load_options(const Args& a) {
  Options opt = parse_config(a.config);
  if (a.seed_given) opt.seed = a.seed;
  opt.svm.seed = opt.seed;
  return opt;
}

int cmd_fit(const Args& a) {
  const Options opt = load_options(a);
  const difl::ImageStack images = difl::load_idx_images(a.images);
  std::cerr << "fitting " << opt.layers.size() << " layer(s) on " << images.count
            << " images of " << images.rows << "x" << images.cols << "\n";
  const auto t0 = std::chrono::steady_clock::now();
  const difl::FitResult fitted = difl::fit(images, opt.layers, opt.hist, false);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (fitted.degenerate_clustering)
    std::cerr << "warning: degenerate clustering, duplicated a cluster center\n";
  difl::save_model(fitted.model, a.model);
  emit(json{{"layers", fitted.model.layers.size()},
            {"featureDim", fitted.model.feature_dim()},
            {"fitSeconds", seconds}});
  return 0;
}

int cmd_extract(const Args& a) {
  const difl::TrainedModel model = difl::load_model(a.model);
  const difl::ImageStack images = difl::load_idx_images(a.images);
  const difl::Matrix features = difl::transform(model, images);
  difl::save_features(features, a.out);
  emit(json{{"featureDim", model.feature_dim()}, {"n_images", images.count}, {"out", a.out}});
  return 0;
}

int cmd_eval(const Args& a) {
  const Options opt = load_options(a);
  difl::EvalSettings settings;
  settings.layers = opt.layers;
  settings.hist = opt.hist;
  settings.svm = opt.svm;
  settings.baseline = a.baseline;
  if (!a.corrupt_spec.empty())
    settings.corruption = parse_corruption(a.corrupt_spec, opt.seed);

  difl::LabeledImageSet train, test;
  if (!a.test_images.empty()) {
    if (a.test_labels.empty()) bad_config("test-labels", "required with test-images");
    train = difl::load_idx(a.images, a.labels);
    test = difl::load_idx(a.test_images, a.test_labels);
  } else {
    if (a.per_class_train < 1)
      bad_config("per-class-train", "required when no separate test set is given");
    const difl::LabeledImageSet all = difl::load_idx(a.images, a.labels);
    std::tie(train, test) = difl::stratified_split(all, a.per_class_train, opt.seed);
  }
  std::cerr << "eval: " << train.images.count << " train / " << test.images.count
            << " test images\n";

  std::optional<difl::TrainedModel> pretrained;
  if (!a.model.empty()) pretrained = difl::load_model(a.model);
  const difl::EvalReport report =
      difl::run_eval(train, test, settings, pretrained ? &*pretrained : nullptr);
  if (!pretrained) std::cerr << "fit took " << report.fit_seconds << " s\n";
  json out{{"trainAcc", report.train_acc},
           {"testAcc", report.test_acc},
           {"featureDim", report.feature_dim},
           {"n_train", report.n_train},
           {"n_test", report.n_test}};
  if (report.baseline_train_acc) {
    out["baselineTrainAcc"] = *report.baseline_train_acc;
    out["baselineTestAcc"] = *report.baseline_test_acc;
  }
  emit(out);
  return 0;
}

int cmd_corrupt(const Args& a) {
  if (a.corrupt_spec.empty()) bad_config("corrupt", "required for the corrupt command");
  const difl::CorruptionSpec spec = parse_corruption(a.corrupt_spec, a.seed);
  const difl::ImageStack images = difl::load_idx_images(a.images);
  difl::save_idx_images(a.out, difl::corrupt(images, spec));
  emit(json{{"n_images", images.count}, {"out", a.out}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DIFL feature-learning pipeline"};
  app.require_subcommand(1);
  Args args;

  auto add_common = [&args](CLI::App* cmd) {
    cmd->add_option("--config", args.config, "JSON config file");
    cmd->add_option("--seed", args.seed, "seed for every random choice")
        ->each([&args](const std::string&) { args.seed_given = true; });
  };

  CLI::App* fit = app.add_subcommand("fit", "fit a model on unlabeled images");
  add_common(fit);
  fit->add_option("--images", args.images, "training images (IDX)")->required();
  fit->add_option("--model", args.model, "output model path")->required();

  CLI::App* extract = app.add_subcommand("extract", "extract features with a fitted model");
  extract->add_option("--model", args.model, "model path")->required();
  extract->add_option("--images", args.images, "images to encode (IDX)")->required();
  extract->add_option("--out", args.out, "output feature file")->required();

  CLI::App* eval = app.add_subcommand("eval", "train + score an SVM over extracted features");
  add_common(eval);
  eval->add_option("--model", args.model, "reuse a fitted model instead of refitting");
  eval->add_option("--images", args.images, "images (IDX)")->required();
  eval->add_option("--labels", args.labels, "labels (IDX)")->required();
  eval->add_option("--test-images", args.test_images, "separate test images");
  eval->add_option("--test-labels", args.test_labels, "separate test labels");
  eval->add_option("--per-class-train", args.per_class_train,
                   "stratified split size per class (when no separate test set)");
  eval->add_option("--corrupt", args.corrupt_spec, "corruption kind:param");
  eval->add_flag("--baseline", args.baseline, "also score a raw-pixel SVM");

  CLI::App* corrupt = app.add_subcommand("corrupt", "write a corrupted copy of a dataset");
  corrupt->add_option("--images", args.images, "input images (IDX)")->required();
  corrupt->add_option("--out", args.out, "output images (IDX)")->required();
  corrupt->add_option("--corrupt", args.corrupt_spec, "corruption kind:param")->required();
  corrupt->add_option("--seed", args.seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (fit->parsed()) return cmd_fit(args);
    if (extract->parsed()) return cmd_extract(args);
    if (eval->parsed()) return cmd_eval(args);
    if (corrupt->parsed()) return cmd_corrupt(args);
  } catch (const difl::format_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
