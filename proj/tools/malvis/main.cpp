// malvis: bytecode-to-image encoding, perturbation experiments, ensemble
// evaluation and dataset tooling.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "malvis/batch.hpp"
#include "malvis/encode.hpp"
#include "malvis/ensemble.hpp"
#include "malvis/error.hpp"
#include "malvis/manifest.hpp"
#include "malvis/metrics.hpp"
#include "malvis/perturb.hpp"

namespace {

using namespace malvis;

// ---------------------------------------------------------------------------
// flag parsing helpers

EncodingScheme parse_scheme(const std::string& name, std::uint32_t window,
                            const std::string& alignment) {
  const auto kind = scheme_from_name(name);
  if (!kind) {
    throw CLI::ValidationError("--scheme",
                               "unknown scheme '" + name +
                                   "' (gray|entropy|malvis-a|malvis-b)");
  }
  EncodingScheme scheme;
  scheme.kind = *kind;
  scheme.entropy.window_size = window;
  if (alignment == "trailing") {
    scheme.entropy.alignment = WindowAlignment::Trailing;
  } else if (alignment == "centered") {
    scheme.entropy.alignment = WindowAlignment::Centered;
  } else {
    throw CLI::ValidationError("--alignment", "use 'trailing' or 'centered'");
  }
  return scheme;
}

std::pair<std::uint32_t, std::uint32_t> parse_resize(const std::string& text) {
  const std::size_t x = text.find('x');
  if (x == std::string::npos) {
    throw CLI::ValidationError("--resize", "expected WxH, e.g. 224x224");
  }
  try {
    const unsigned long w = std::stoul(text.substr(0, x));
    const unsigned long h = std::stoul(text.substr(x + 1));
    if (w == 0 || h == 0) throw std::invalid_argument("zero");
    return {static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(h)};
  } catch (const std::exception&) {
    throw CLI::ValidationError("--resize", "expected WxH, e.g. 224x224");
  }
}

AesKey parse_key(const std::string& hex) {
  if (hex.size() != 64) {
    throw CLI::ValidationError("--key", "expected 64 hex characters (32 bytes)");
  }
  AesKey key{};
  for (std::size_t i = 0; i < 32; ++i) {
    const std::string byte = hex.substr(i * 2, 2);
    char* end = nullptr;
    const long v = std::strtol(byte.c_str(), &end, 16);
    if (end != byte.c_str() + 2) {
      throw CLI::ValidationError("--key", "invalid hex at position " +
                                              std::to_string(i * 2));
    }
    key[i] = static_cast<std::uint8_t>(v);
  }
  return key;
}

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string field =
        text.substr(start, comma == std::string::npos ? comma : comma - start);
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "invalid number '" + field + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

unsigned default_workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------
// shared option bundles

struct SchemeFlags {
  std::string scheme = "malvis-b";
  std::uint32_t window = 32;
  std::string alignment = "trailing";
  bool multidex = false;
  bool force = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--scheme", scheme,
                    "Visual encoding: gray|entropy|malvis-a|malvis-b")
        ->capture_default_str();
    cmd->add_option("--window", window, "Entropy window size in bytes")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--alignment", alignment,
                    "Entropy window alignment: trailing|centered")
        ->capture_default_str();
    cmd->add_flag("--multidex", multidex,
                  "Concatenate classes.dex, classes2.dex, ... instead of "
                  "extracting only classes.dex");
    cmd->add_flag("--force", force,
                  "Encode streams that fail the DEX magic check");
  }

  EncodeOptions encode_options() const {
    EncodeOptions options;
    options.scheme = parse_scheme(scheme, window, alignment);
    options.load.policy =
        multidex ? DexPolicy::ConcatenateMultidex : DexPolicy::PrimaryOnly;
    options.load.validate = !force;
    return options;
  }
};

// ---------------------------------------------------------------------------
// subcommand wiring

struct EncodeCmd {
  std::string input;
  std::string out;
  bool square = false;
  std::string resize;
  SchemeFlags flags;

  int run() const {
    EncodeOptions options = flags.encode_options();
    options.native_square = square;
    if (!resize.empty()) options.resize = parse_resize(resize);
    const EncodeReport report = encode_file(input, out, options);
    std::cout << report.output.string() << ": " << report.width << "x"
              << report.height << " from " << report.input_bytes << " bytes in "
              << report.elapsed_ms << " ms\n";
    return 0;
  }
};

struct BatchCmd {
  std::string manifest;
  std::string out_dir;
  std::string report;
  unsigned workers = 0;
  bool no_square = false;
  SchemeFlags flags;

  int run() const {
    BatchOptions options;
    options.encode = flags.encode_options();
    options.encode.native_square = !no_square;
    options.workers = workers == 0 ? default_workers() : workers;

    const DatasetManifest records = read_manifest(manifest);
    std::vector<std::string> inputs;
    inputs.reserve(records.size());
    for (const ManifestRecord& r : records.records()) inputs.push_back(r.path);

    std::filesystem::create_directories(out_dir);
    const BatchSummary summary = encode_batch(inputs, out_dir, options);
    if (!report.empty()) write_batch_report(summary, report);
    std::cout << summary.results.size() - summary.failures << "/"
              << summary.results.size() << " encoded, " << summary.failures
              << " failed\n";
    return summary.failures == 0 ? 0 : 2;
  }
};

struct PerturbCmd {
  std::string input;
  std::string experiment;
  double fraction = 0.30;
  std::string key_hex;
  std::uint64_t seed = 42;
  std::string emit_dir;
  SchemeFlags flags;

  int run() const {
    ExperimentOptions options;
    options.kind = experiment == "encrypt" ? ExperimentKind::Encrypt
                                           : ExperimentKind::Inject;
    options.scheme = parse_scheme(flags.scheme, flags.window, flags.alignment);
    options.fraction = fraction;
    options.seed = seed;
    if (!key_hex.empty()) options.key = parse_key(key_hex);
    if (!emit_dir.empty()) {
      std::filesystem::create_directories(emit_dir);
      options.emit_dir = emit_dir;
      options.emit_stem = std::filesystem::path(input).stem().string();
    }

    LoadOptions load;
    load.policy = flags.multidex ? DexPolicy::ConcatenateMultidex
                                 : DexPolicy::PrimaryOnly;
    load.validate = !flags.force;
    const ByteStream original = load_input(input, load);
    std::cout << format_shift_report(run_experiment(original, options));
    return 0;
  }
};

struct EnsembleCmd {
  std::vector<std::string> pred_files;
  std::vector<std::string> val_files;
  std::string method = "average";
  double threshold = 0.60;
  std::string weights_text;
  std::string accuracies_text;
  std::string labels_from;
  std::string class_names_file;
  std::string out;
  std::string pred_out;
  std::string averaging = "auto";
  double learning_rate = 0.5;
  int epochs = 500;
  std::uint64_t stack_seed = 42;

  EnsembleResult combine(const std::vector<PredictionMatrix>& models) const {
    const auto m = ensemble_method_from_name(method);
    if (!m) {
      throw CLI::ValidationError("--method", "unknown ensemble method '" +
                                                 method + "'");
    }
    switch (*m) {
      case EnsembleMethod::Average: return average_voting(models);
      case EnsembleMethod::Soft: return soft_voting(models);
      case EnsembleMethod::Majority: return majority_voting(models);
      case EnsembleMethod::Median: return median_voting(models);
      case EnsembleMethod::RankBased: return rank_voting(models);
      case EnsembleMethod::MinConfidence:
        return min_confidence_voting(models, threshold);
      case EnsembleMethod::Weighted: {
        std::vector<double> weights;
        if (!weights_text.empty()) {
          weights = parse_double_list(weights_text, "--weights");
        } else if (!accuracies_text.empty()) {
          weights = rank_weights_from_accuracy(
              parse_double_list(accuracies_text, "--accuracies"));
        } else {
          raise(ErrorCode::MissingRankSource,
                "weighted voting needs --weights or --accuracies");
        }
        return weighted_voting(models, weights);
      }
      case EnsembleMethod::Stacking: {
        if (val_files.empty()) {
          raise(ErrorCode::MissingRankSource,
                "stacking needs --val-pred validation prediction files");
        }
        std::vector<PredictionMatrix> val;
        for (const std::string& f : val_files) val.push_back(load_predictions(f));
        StackParams params;
        params.learning_rate = learning_rate;
        params.epochs = epochs;
        params.seed = stack_seed;
        return stack_predict(stack_train(val, params), models);
      }
    }
    raise(ErrorCode::DomainError, "unreachable ensemble method");
  }

  int run() const {
    std::vector<PredictionMatrix> models;
    for (const std::string& f : pred_files) models.push_back(load_predictions(f));
    require_aligned(models);

    std::vector<int> labels = models.front().labels;
    if (!labels_from.empty()) {
      labels = load_labels(labels_from, models.front().sample_ids);
    }
    const std::size_t k = models.front().num_classes();

    const EnsembleResult result = combine(models);

    Averaging mode = Averaging::Weighted;
    if (averaging == "binary" || (averaging == "auto" && k == 2)) {
      mode = Averaging::Binary;
    }
    const EvaluationReport report =
        evaluate(result.predictions, labels, &result.scores, k, mode);

    std::vector<std::string> names(k);
    for (std::size_t c = 0; c < k; ++c) names[c] = "class" + std::to_string(c);
    if (!class_names_file.empty()) names = load_class_names(class_names_file, k);

    std::ostream* sink = &std::cout;
    std::ofstream file;
    if (!out.empty()) {
      file.open(out);
      if (!file) raise(ErrorCode::IoFailure, "cannot write " + out);
      sink = &file;
    }
    *sink << "metric,value\n";
    *sink << "method," << method << "\n";
    *sink << "accuracy," << report.accuracy << "\n";
    *sink << "f1," << report.f1 << "\n";
    *sink << "precision," << report.precision << "\n";
    *sink << "recall," << report.recall << "\n";
    *sink << "mcc," << report.mcc << "\n";
    if (report.roc_auc) *sink << "roc_auc," << *report.roc_auc << "\n";
    *sink << "averaging," << report.averaging_mode << "\n";
    *sink << "confusion\n";
    for (std::size_t t = 0; t < k; ++t) {
      *sink << names[t];
      for (std::size_t p = 0; p < k; ++p) *sink << ',' << report.confusion[t][p];
      *sink << "\n";
    }

    if (!pred_out.empty()) {
      std::ofstream preds(pred_out);
      if (!preds) raise(ErrorCode::IoFailure, "cannot write " + pred_out);
      preds << "sample_id,predicted,predicted_name\n";
      for (std::size_t i = 0; i < result.predictions.size(); ++i) {
        preds << models.front().sample_ids[i] << ',' << result.predictions[i]
              << ',' << names[static_cast<std::size_t>(result.predictions[i])]
              << "\n";
      }
    }
    return 0;
  }
};

struct DatasetCmd {
  // build
  std::string root;
  std::string build_out;
  // split / undersample
  std::string manifest;
  std::string fractions_text = "0.8,0.1,0.1";
  std::uint64_t seed = 0;
  bool guarantee_nonempty = false;
  std::string split_out;
  std::string target_text = "min";
  std::string under_out;

  int run_build() const {
    const DatasetManifest manifest_out = build_manifest(root);
    write_manifest(manifest_out, build_out);
    std::cout << manifest_out.size() << " records, "
              << manifest_out.class_counts().size() << " classes\n";
    return 0;
  }

  int run_split() const {
    const std::vector<double> f = parse_double_list(fractions_text, "--fractions");
    if (f.size() != 3) {
      throw CLI::ValidationError("--fractions", "expected train,val,test");
    }
    const DatasetManifest input = read_manifest(manifest);
    const DatasetManifest result = stratified_split(
        input, SplitFractions{f[0], f[1], f[2]}, seed, guarantee_nonempty);
    write_manifest(result, split_out.empty() ? manifest : split_out);
    return 0;
  }

  int run_undersample() const {
    std::optional<std::size_t> target;
    if (target_text != "min") {
      try {
        target = std::stoul(target_text);
      } catch (const std::exception&) {
        throw CLI::ValidationError("--target", "expected 'min' or a count");
      }
    }
    const DatasetManifest input = read_manifest(manifest);
    const DatasetManifest result = undersample(input, seed, target);
    write_manifest(result, under_out.empty() ? manifest : under_out);
    const auto counts = result.class_counts();
    std::cout << result.size() << " records across " << counts.size()
              << " classes after undersampling\n";
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MalVis bytecode visualization and evaluation toolkit"};
  app.require_subcommand(1);

  EncodeCmd encode_cmd;
  CLI::App* encode = app.add_subcommand(
      "encode", "Encode one APK/DEX/byte file into a PNG visualization");
  encode->add_option("input", encode_cmd.input, "APK, DEX or raw byte file")
      ->required();
  encode->add_option("--out", encode_cmd.out, "Output PNG path")->required();
  encode->add_flag("--square", encode_cmd.square,
                   "Resize the reshaped strip to a 256x256 square");
  encode->add_option("--resize", encode_cmd.resize,
                     "Final nearest-neighbor resize, e.g. 224x224");
  encode_cmd.flags.attach(encode);

  BatchCmd batch_cmd;
  CLI::App* batch = app.add_subcommand(
      "batch", "Encode every file listed in a dataset manifest");
  batch->add_option("--manifest", batch_cmd.manifest, "Manifest CSV (path,label,split)")
      ->required();
  batch->add_option("--out-dir", batch_cmd.out_dir, "Output directory")->required();
  batch->add_option("--report", batch_cmd.report, "Per-file report CSV path");
  batch->add_option("--workers", batch_cmd.workers,
                    "Worker threads (default: MALVIS_WORKERS or CPU count)")
      ->envname("MALVIS_WORKERS");
  batch->add_flag("--no-square", batch_cmd.no_square,
                  "Keep native-height strips instead of 256x256 squares");
  batch_cmd.flags.attach(batch);

  PerturbCmd perturb_cmd;
  CLI::App* perturb = app.add_subcommand(
      "perturb", "Run a prefix-perturbation experiment and report channel shifts");
  perturb->add_option("input", perturb_cmd.input, "APK, DEX or raw byte file")
      ->required();
  perturb->add_option("--experiment", perturb_cmd.experiment, "encrypt|inject")
      ->required()
      ->check(CLI::IsMember({"encrypt", "inject"}));
  perturb
      ->add_option("--fraction", perturb_cmd.fraction,
                   "Prefix fraction to perturb, in (0,1]")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), 1.0))
      ->capture_default_str();
  perturb->add_option("--key", perturb_cmd.key_hex,
                      "AES-256 key as 64 hex chars (default all-zero)");
  perturb->add_option("--seed", perturb_cmd.seed, "Injection RNG seed")
      ->capture_default_str();
  perturb->add_option("--emit-images", perturb_cmd.emit_dir,
                      "Write before/after PNGs into this directory");
  perturb_cmd.flags.attach(perturb);

  EnsembleCmd ensemble_cmd;
  CLI::App* ensemble = app.add_subcommand(
      "ensemble", "Combine per-model prediction files and score the result");
  ensemble->add_option("--pred", ensemble_cmd.pred_files,
                       "Prediction CSV, repeatable (sample_id,label,p0,...)")
      ->required();
  ensemble->add_option("--method", ensemble_cmd.method,
                       "average|majority|weighted|min-confidence|soft|median|"
                       "rank|stacking")
      ->capture_default_str();
  ensemble->add_option("--threshold", ensemble_cmd.threshold,
                       "Min-confidence threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  ensemble->add_option("--weights", ensemble_cmd.weights_text,
                       "Explicit model weights, e.g. 2,1");
  ensemble->add_option("--accuracies", ensemble_cmd.accuracies_text,
                       "Validation accuracies used to derive rank weights");
  ensemble->add_option("--val-pred", ensemble_cmd.val_files,
                       "Validation prediction CSVs for stacking, repeatable");
  ensemble->add_option("--labels-from", ensemble_cmd.labels_from,
                       "Override ground truth with this sample_id,label CSV");
  ensemble->add_option("--class-names", ensemble_cmd.class_names_file,
                       "Optional index,name mapping CSV");
  ensemble->add_option("--out", ensemble_cmd.out, "Report CSV (default stdout)");
  ensemble->add_option("--pred-out", ensemble_cmd.pred_out,
                       "Write combined predictions CSV");
  ensemble->add_option("--averaging", ensemble_cmd.averaging,
                       "Metric averaging: auto|binary|weighted")
      ->check(CLI::IsMember({"auto", "binary", "weighted"}))
      ->capture_default_str();
  ensemble->add_option("--lr", ensemble_cmd.learning_rate,
                       "Stacking learning rate")
      ->capture_default_str();
  ensemble->add_option("--epochs", ensemble_cmd.epochs, "Stacking epochs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ensemble->add_option("--stack-seed", ensemble_cmd.stack_seed,
                       "Stacking initialization seed")
      ->capture_default_str();

  DatasetCmd dataset_cmd;
  CLI::App* dataset = app.add_subcommand(
      "dataset", "Build, split or undersample dataset manifests");
  dataset->require_subcommand(1);

  CLI::App* build = dataset->add_subcommand("build", "Scan class-per-subdirectory trees");
  build->add_option("--root", dataset_cmd.root, "Dataset root directory")->required();
  build->add_option("--out", dataset_cmd.build_out, "Manifest CSV to write")->required();

  CLI::App* split = dataset->add_subcommand("split", "Assign stratified splits");
  split->add_option("--manifest", dataset_cmd.manifest, "Manifest CSV")->required();
  split->add_option("--fractions", dataset_cmd.fractions_text,
                    "train,val,test fractions")
      ->capture_default_str();
  split->add_option("--seed", dataset_cmd.seed, "Shuffle seed")->capture_default_str();
  split->add_flag("--guarantee-nonempty", dataset_cmd.guarantee_nonempty,
                  "Force at least one val and test sample per class");
  split->add_option("--out", dataset_cmd.split_out,
                    "Output CSV (default: rewrite input)");

  CLI::App* under = dataset->add_subcommand("undersample", "Balance class counts");
  under->add_option("--manifest", dataset_cmd.manifest, "Manifest CSV")->required();
  under->add_option("--seed", dataset_cmd.seed, "Sampling seed")->capture_default_str();
  under->add_option("--target", dataset_cmd.target_text,
                    "'min' or an explicit per-class count")
      ->capture_default_str();
  under->add_option("--out", dataset_cmd.under_out,
                    "Output CSV (default: rewrite input)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage
  }

  try {
    if (*encode) return encode_cmd.run();
    if (*batch) return batch_cmd.run();
    if (*perturb) return perturb_cmd.run();
    if (*ensemble) return ensemble_cmd.run();
    if (*build) return dataset_cmd.run_build();
    if (*split) return dataset_cmd.run_split();
    if (*under) return dataset_cmd.run_undersample();
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_category(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
