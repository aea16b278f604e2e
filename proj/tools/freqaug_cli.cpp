// freqaug command-line tool: augment, probe, train, eval-ood, corrupt, stats,
// replay. Every run writes a key=value manifest; `replay` reruns one and
// checks that each output hashes the same.

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "freqaug/freqaug.hpp"
#include "freqaug/manifest.hpp"

namespace fs = std::filesystem;
using namespace freqaug;

namespace {

constexpr int kExitError = 1;
constexpr int kExitMismatch = 3;

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) out += (k ? "," : "") + fmt(xs[k]);
  return out;
}

std::vector<double> parse_radii(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) {
    double v = 0.0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size() || !(v >= 0.0)) {
      throw ArgumentError("bad radius '" + tok + "' in list '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ArgumentError("radius list is empty");
  return out;
}

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  for (char& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e;
}

bool is_npy(const fs::path& p) { return lower_ext(p) == ".npy"; }

// Unlabeled-or-labeled image lists: NPY arrays or CIFAR binary (labels kept).
std::vector<ImageTensor> load_images(const fs::path& p) {
  if (is_npy(p)) return load_npy_u8(p);
  return load_cifar_binary(p, 256).images();
}

void write_text(const fs::path& p, const std::string& text) {
  write_file(p, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

struct Common {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string manifest;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--threads", c.threads, "Worker threads; results do not depend on it")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--manifest", c.manifest, "Manifest path (default: next to the main output)");
}

void record_common(Manifest& m, const Common& c) {
  m.arg("seed", fmt(c.seed));
  m.arg("threads", fmt(static_cast<std::uint64_t>(c.threads)));
}

// Result of one subcommand: its manifest, stdout text and default manifest path.
struct Run {
  Manifest manifest;
  std::string stdout_text;
  fs::path default_manifest;
};

// --- augment -------------------------------------------------------------------

struct AugmentArgs {
  Common common;
  std::string input, output, sample_dir;
  std::size_t classes = 10, sample_count = 0;
  double radius = 4.0, prob = 0.5;
  std::string mode = "rfc", order = "rfc-then-apr";
};

CompositionOrder parse_order(const std::string& s) {
  if (s == "rfc-then-apr") return CompositionOrder::kRfcThenApr;
  if (s == "apr-then-rfc") return CompositionOrder::kAprThenRfc;
  throw ArgumentError("unknown composition order '" + s + "'");
}

Run cmd_augment(const AugmentArgs& a) {
  Run run{Manifest::for_command("augment"), {}, a.output + ".manifest"};
  Manifest& m = run.manifest;
  m.arg("input", a.input);
  m.arg("output", a.output);
  m.arg("classes", fmt(static_cast<std::uint64_t>(a.classes)));
  m.arg("radius", fmt(a.radius));
  m.arg("mode", a.mode);
  m.arg("prob", fmt(a.prob));
  m.arg("order", a.order);
  m.arg("sample-count", fmt(static_cast<std::uint64_t>(a.sample_count)));
  if (!a.sample_dir.empty()) m.arg("sample-dir", a.sample_dir);
  record_common(m, a.common);

  AugmentConfig cfg;
  cfg.radius = a.radius;
  cfg.apply_probability = a.prob;
  cfg.mode = parse_augment_mode(a.mode);
  cfg.order = parse_order(a.order);
  cfg.seed = a.common.seed;
  cfg.validate();

  const LabeledDataset ds = load_cifar_binary(a.input, a.classes);
  m.input("input", a.input);
  const LabeledDataset out = augment_batch(ds, cfg, a.common.threads);
  write_cifar_binary(out, a.output);
  m.output("output", a.output);

  if (a.sample_count > 0) {
    if (a.sample_dir.empty()) throw ArgumentError("--sample-count needs --sample-dir");
    fs::create_directories(a.sample_dir);
    const std::size_t n = std::min(a.sample_count, out.size() - ds.size());
    for (std::size_t k = 0; k < n; ++k) {
      std::ostringstream name;
      name << "sample_" << std::setw(4) << std::setfill('0') << k << ".ppm";
      const fs::path p = fs::path(a.sample_dir) / name.str();
      write_file(p, write_ppm(out[ds.size() + k]));
      m.output("sample." + std::to_string(k), p);
    }
  }
  std::cerr << "augment: " << ds.size() << " input records, " << out.size() - ds.size()
            << " augmented, " << out.size() << " written to " << a.output << "\n";
  return run;
}

// --- train ---------------------------------------------------------------------

struct TrainArgs {
  Common common;
  std::string input, test, model_out, log;
  std::size_t classes = 10, hidden = 256, epochs = 20, batch = 64;
  double lr = 0.1, decay = 0.2, momentum = 0.9, weight_decay = 0.0;
  std::string milestones = "auto";
  bool baseline_aug = true;
  std::string freq_aug = "none", order = "rfc-then-apr";
  double radius = 4.0, prob = 0.5;
};

// "auto" places drops at 30%, 60%, 80% and 95% of the run; "none" keeps the
// rate constant.
std::vector<std::size_t> resolve_milestones(const std::string& text, std::size_t epochs) {
  std::vector<std::size_t> out;
  if (text == "none") return out;
  if (text == "auto") {
    for (double f : {0.3, 0.6, 0.8, 0.95}) {
      const auto m = static_cast<std::size_t>(std::floor(f * static_cast<double>(epochs) + 1e-9));
      if (m > 0 && m < epochs && (out.empty() || m > out.back())) out.push_back(m);
    }
    return out;
  }
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) {
    std::size_t v = 0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size()) {
      throw ArgumentError("bad milestone '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

Run cmd_train(const TrainArgs& a) {
  Run run{Manifest::for_command("train"), {}, a.model_out + ".manifest"};
  Manifest& m = run.manifest;

  SgdSchedule sched;
  sched.total_epochs = a.epochs;
  sched.base_lr = a.lr;
  sched.decay_factor = a.decay;
  sched.momentum = a.momentum;
  sched.weight_decay = a.weight_decay;
  sched.batch_size = a.batch;
  sched.milestone_epochs = resolve_milestones(a.milestones, a.epochs);
  sched.validate();

  m.arg("input", a.input);
  if (!a.test.empty()) m.arg("test", a.test);
  m.arg("model-out", a.model_out);
  if (!a.log.empty()) m.arg("log", a.log);
  m.arg("classes", fmt(static_cast<std::uint64_t>(a.classes)));
  m.arg("hidden", fmt(static_cast<std::uint64_t>(a.hidden)));
  m.arg("epochs", fmt(static_cast<std::uint64_t>(a.epochs)));
  m.arg("batch-size", fmt(static_cast<std::uint64_t>(a.batch)));
  m.arg("lr", fmt(a.lr));
  m.arg("decay", fmt(a.decay));
  m.arg("milestones", sched.milestone_epochs.empty()
                          ? "none"
                          : join(std::vector<std::uint64_t>(sched.milestone_epochs.begin(),
                                                            sched.milestone_epochs.end())));
  m.arg("momentum", fmt(a.momentum));
  m.arg("weight-decay", fmt(a.weight_decay));
  m.arg("baseline-aug", a.baseline_aug ? "true" : "false");
  m.arg("freq-aug", a.freq_aug);
  m.arg("radius", fmt(a.radius));
  m.arg("prob", fmt(a.prob));
  m.arg("order", a.order);
  record_common(m, a.common);

  OnlineAugment online;
  online.baseline = a.baseline_aug;
  if (a.freq_aug != "none") {
    AugmentConfig f;
    f.mode = parse_augment_mode(a.freq_aug);
    f.radius = a.radius;
    f.apply_probability = a.prob;
    f.order = parse_order(a.order);
    online.frequency = f;
  }

  const LabeledDataset ds = load_cifar_binary(a.input, a.classes);
  m.input("input", a.input);
  std::optional<LabeledDataset> test;
  if (!a.test.empty()) {
    test = load_cifar_binary(a.test, a.classes);
    m.input("test", a.test);
  }

  TrainOptions opts;
  opts.hidden_dim = a.hidden;
  opts.seed = a.common.seed;
  if (online.baseline || online.frequency) opts.augment = make_online_transform(online);
  if (test) opts.test_set = &*test;
  const TrainResult result = train(ds, sched, opts);
  for (const auto& e : result.log) {
    std::cerr << "epoch " << e.epoch << " lr " << e.lr << " loss " << e.loss << " train_acc "
              << e.train_accuracy;
    if (e.test_accuracy) std::cerr << " test_acc " << *e.test_accuracy;
    std::cerr << "\n";
  }

  write_file(a.model_out, save_model(result.state));
  m.output("model", a.model_out);
  if (!a.log.empty()) {
    write_text(a.log, training_log_csv(result.log));
    m.output("log", a.log);
  }
  return run;
}

// --- probe ---------------------------------------------------------------------

struct ProbeArgs {
  Common common;
  std::string model, input, mean_from, output, radii = "4,8", format = "csv";
};

ClassifierState load_model_for(const fs::path& model_path, const Shape& shape) {
  ClassifierState state = load_model(read_file(model_path));
  if (state.input_dim != shape.size()) {
    throw ShapeError("model " + model_path.string() + " expects " +
                     std::to_string(state.input_dim) + " inputs, images are " + to_string(shape) +
                     " (" + std::to_string(shape.size()) + ")");
  }
  return state;
}

Run cmd_probe(const ProbeArgs& a) {
  Run run{Manifest::for_command("probe"), {},
          a.output.empty() ? fs::path("freqaug-probe.manifest") : fs::path(a.output + ".manifest")};
  Manifest& m = run.manifest;
  m.arg("model", a.model);
  m.arg("input", a.input);
  if (!a.mean_from.empty()) m.arg("mean-from", a.mean_from);
  if (!a.output.empty()) m.arg("output", a.output);
  m.arg("radii", a.radii);
  m.arg("format", a.format);
  record_common(m, a.common);

  const std::vector<double> radii = parse_radii(a.radii);
  const ClassifierState state = load_model_for(a.model, kCifarShape);
  const LabeledDataset ds = load_cifar_binary(a.input, state.class_count);
  m.input("model", a.model);
  m.input("input", a.input);

  MeanAmplitude mean;
  if (a.mean_from.empty()) {
    mean = mean_amplitude(ds);
  } else {
    mean = mean_amplitude(load_images(a.mean_from));
    m.input("mean-from", a.mean_from);
  }

  const ProbeTable table = probe_table(as_scorer(state), ds, radii, mean, a.common.threads);
  std::string text;
  if (a.format == "csv") {
    text = probe_table_csv(table);
  } else if (a.format == "text") {
    text = probe_table_text(table);
  } else {
    throw ArgumentError("unknown format '" + a.format + "'");
  }
  if (a.output.empty()) {
    run.stdout_text = text;
    m.output_text("stdout", text);
  } else {
    write_text(a.output, text);
    m.output("output", a.output);
  }
  return run;
}

// --- eval-ood ------------------------------------------------------------------

struct EvalArgs {
  Common common;
  std::string model, input, in_scores, ood_scores, scores_dir, method = "model";
  std::vector<std::string> ood;
};

Run cmd_eval_ood(const EvalArgs& a) {
  Run run{Manifest::for_command("eval-ood"), {},
          a.scores_dir.empty() ? fs::path("freqaug-eval-ood.manifest")
                               : fs::path(a.scores_dir) / "eval-ood.manifest"};
  Manifest& m = run.manifest;
  if (!a.model.empty()) m.arg("model", a.model);
  if (!a.input.empty()) m.arg("input", a.input);
  for (const auto& o : a.ood) m.arg("ood", o);
  if (!a.in_scores.empty()) m.arg("in-scores", a.in_scores);
  if (!a.ood_scores.empty()) m.arg("ood-scores", a.ood_scores);
  if (!a.scores_dir.empty()) m.arg("scores-dir", a.scores_dir);
  m.arg("method", a.method);
  record_common(m, a.common);

  const bool csv_mode = !a.in_scores.empty() || !a.ood_scores.empty();
  std::ostringstream out;
  if (csv_mode) {
    if (a.in_scores.empty() || a.ood_scores.empty()) {
      throw ArgumentError("--in-scores and --ood-scores must be given together");
    }
    if (!a.model.empty() || !a.ood.empty()) {
      throw ArgumentError("score CSVs replace --model/--ood; give one or the other");
    }
    ScoreSet scores;
    for (const auto& p : {a.in_scores, a.ood_scores}) {
      const Bytes b = read_file(p);
      parse_scores_csv(std::string(b.begin(), b.end()), scores);
    }
    m.input("in-scores", a.in_scores);
    m.input("ood-scores", a.ood_scores);
    const RocReport report = auroc(scores);
    out << "AUROC " << std::fixed << std::setprecision(4) << report.auroc << "\n";
    if (!a.scores_dir.empty()) {
      fs::create_directories(a.scores_dir);
      const fs::path p = fs::path(a.scores_dir) / "roc.csv";
      write_text(p, roc_csv(report));
      m.output("roc", p);
    }
  } else {
    if (a.model.empty() || a.input.empty() || a.ood.empty()) {
      throw ArgumentError("eval-ood needs --model, --input and at least one --ood NAME=PATH");
    }
    const ClassifierState state = load_model_for(a.model, kCifarShape);
    const LabeledDataset in = load_cifar_binary(a.input, state.class_count);
    m.input("model", a.model);
    m.input("input", a.input);
    std::vector<NamedImages> sets;
    for (const auto& spec : a.ood) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw ArgumentError("--ood expects NAME=PATH, got '" + spec + "'");
      }
      const std::string name = spec.substr(0, eq), path = spec.substr(eq + 1);
      sets.push_back({name, load_images(path)});
      m.input("ood." + name, path);
    }
    const OodTable table = evaluate_ood(as_scorer(state), in, sets, a.common.threads);
    out << format_ood_table(table, a.method);
    for (const auto& row : table.rows) {
      out << "AUROC " << row.name << " " << std::fixed << std::setprecision(4) << row.report.auroc
          << "\n";
    }
    if (!a.scores_dir.empty()) {
      fs::create_directories(a.scores_dir);
      for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& row = table.rows[k];
        ScoreSet s{table.in_scores, score_dataset(as_scorer(state), sets[k].images, a.common.threads)};
        const fs::path sp = fs::path(a.scores_dir) / (row.name + ".scores.csv");
        const fs::path rp = fs::path(a.scores_dir) / (row.name + ".roc.csv");
        write_text(sp, scores_csv(s));
        write_text(rp, roc_csv(row.report));
        m.output("scores." + row.name, sp);
        m.output("roc." + row.name, rp);
      }
    }
  }
  run.stdout_text = out.str();
  m.output_text("stdout", run.stdout_text);
  return run;
}

// --- corrupt -------------------------------------------------------------------

struct CorruptArgs {
  Common common;
  std::string input, output, kind, constants;
  int severity = 1;
};

Run cmd_corrupt(const CorruptArgs& a) {
  Run run{Manifest::for_command("corrupt"), {}, a.output + ".manifest"};
  Manifest& m = run.manifest;
  m.arg("input", a.input);
  m.arg("output", a.output);
  m.arg("kind", a.kind);
  m.arg("severity", std::to_string(a.severity));
  if (!a.constants.empty()) m.arg("constants", a.constants);
  record_common(m, a.common);

  const CorruptionTable table =
      a.constants.empty() ? CorruptionTable::builtin() : CorruptionTable::load(a.constants);
  if (!a.constants.empty()) m.input("constants", a.constants);
  const CorruptionSpec spec{parse_corruption_kind(a.kind), a.severity, a.common.seed};
  table.get(spec.kind, spec.severity);

  if (is_npy(a.input) != is_npy(a.output)) {
    throw ArgumentError("input and output must use the same format (.npy or CIFAR binary)");
  }
  if (is_npy(a.input)) {
    const auto images = load_npy_u8(a.input);
    m.input("input", a.input);
    write_npy_u8(corrupt_all(images, spec, table, a.common.threads), a.output);
  } else {
    const LabeledDataset ds = load_cifar_binary(a.input, 256);
    m.input("input", a.input);
    write_cifar_binary(LabeledDataset(corrupt_all(ds.images(), spec, table, a.common.threads), 256),
                       a.output);
  }
  m.output("output", a.output);
  return run;
}

// --- stats ---------------------------------------------------------------------

struct StatsArgs {
  Common common;
  std::string input;
  double radius = 4.0;
};

Run cmd_stats(const StatsArgs& a) {
  Run run{Manifest::for_command("stats"), {}, a.input + ".stats.manifest"};
  Manifest& m = run.manifest;
  m.arg("input", a.input);
  m.arg("radius", fmt(a.radius));
  record_common(m, a.common);

  const auto images = load_images(a.input);
  m.input("input", a.input);
  std::ostringstream out;
  out << std::setprecision(6);
  out << "records " << images.size() << "\n";
  if (!images.empty()) {
    const Shape shape = images.front().shape();
    out << "shape " << to_string(shape) << "\n";
    std::map<int, std::size_t> per_label;
    for (const auto& img : images)
      if (img.label()) ++per_label[*img.label()];
    for (const auto& [label, n] : per_label) out << "label " << label << " " << n << "\n";
    for (std::size_t c = 0; c < shape.channels; ++c) {
      double sum = 0.0, sq = 0.0;
      for (const auto& img : images) {
        for (double v : img.channel(c)) {
          sum += v;
          sq += v * v;
        }
      }
      const double n = static_cast<double>(images.size() * shape.plane());
      const double mean = sum / n;
      out << "channel " << c << " mean " << mean << " std "
          << std::sqrt(std::max(0.0, sq / n - mean * mean)) << "\n";
    }
    // share of mean-amplitude energy inside the low-pass disk
    const MeanAmplitude amp = mean_amplitude(images);
    const auto [low, high] = make_masks(shape.height, shape.width, a.radius);
    double inside = 0.0, total = 0.0;
    for (std::size_t k = 0; k < amp.amplitude.size(); ++k) {
      const double e = amp.amplitude[k] * amp.amplitude[k];
      total += e;
      if (low.bits[k % shape.plane()]) inside += e;
    }
    out << "low_band_energy r=" << fmt(a.radius) << " " << (total > 0 ? inside / total : 0.0)
        << "\n";
  }
  run.stdout_text = out.str();
  m.output_text("stdout", run.stdout_text);
  return run;
}

// --- driver --------------------------------------------------------------------

int run_args(std::vector<std::string> args);

void save_manifest(const Run& run, const Common& c) {
  const fs::path p = c.manifest.empty() ? run.default_manifest : fs::path(c.manifest);
  run.manifest.save(p);
  std::cerr << "manifest: " << p.string() << "\n";
}

int cmd_replay(const std::string& manifest_path) {
  const Manifest old = Manifest::load(manifest_path);
  if (old.get("version") != kVersion) {
    std::cerr << "warning: manifest written by version " << old.get("version").value_or("?")
              << ", running " << kVersion << "\n";
  }
  for (const auto& [name, value] : old.with_prefix("input.")) {
    const auto [path, digest] = split_digest(value);
    if (file_digest(path) != digest) {
      std::cerr << "error: input " << name << " (" << path << ") changed since the manifest was"
                << " written\n";
      return kExitMismatch;
    }
  }
  const std::string fresh_path = manifest_path + ".replay";
  std::vector<std::string> args{*old.get("command")};
  for (const auto& [name, value] : old.with_prefix("arg.")) args.push_back("--" + name + "=" + value);
  args.push_back("--manifest=" + fresh_path);
  if (const int rc = run_args(args); rc != 0) return rc;

  const Manifest fresh = Manifest::load(fresh_path);
  const auto before = old.with_prefix("output."), after = fresh.with_prefix("output.");
  int diffs = 0;
  for (std::size_t k = 0; k < std::max(before.size(), after.size()); ++k) {
    if (k >= before.size() || k >= after.size() || before[k] != after[k]) {
      std::cerr << "mismatch: "
                << (k < before.size() ? before[k].first + " " + before[k].second : "(none)")
                << " vs "
                << (k < after.size() ? after[k].first + " " + after[k].second : "(none)") << "\n";
      ++diffs;
    }
  }
  if (diffs) {
    std::cerr << "replay: " << diffs << " output(s) differ; new manifest kept at " << fresh_path
              << "\n";
    return kExitMismatch;
  }
  fs::remove(fresh_path);
  std::cerr << "replay: " << before.size() << " output(s) identical\n";
  return 0;
}

int run_args(std::vector<std::string> args) {
  CLI::App app{"Frequency-domain augmentation, probing and OOD evaluation", "freqaug"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  AugmentArgs aug;
  auto* s_aug = app.add_subcommand("augment", "Expand a CIFAR-binary dataset with RFC/APR images");
  s_aug->add_option("--input", aug.input, "CIFAR-binary input")->required();
  s_aug->add_option("--output", aug.output, "CIFAR-binary output")->required();
  s_aug->add_option("--classes", aug.classes, "Class count")->capture_default_str();
  s_aug->add_option("--radius", aug.radius, "Low-pass radius")->capture_default_str();
  s_aug->add_option("--mode", aug.mode, "rfc, apr or rfc+apr")
      ->capture_default_str()
      ->check(CLI::IsMember({"rfc", "apr", "rfc+apr"}));
  s_aug->add_option("--prob", aug.prob, "Per-image apply probability")->capture_default_str();
  s_aug->add_option("--order", aug.order, "rfc-then-apr or apr-then-rfc")
      ->capture_default_str()
      ->check(CLI::IsMember({"rfc-then-apr", "apr-then-rfc"}));
  s_aug->add_option("--sample-count", aug.sample_count, "Augmented images to dump as PPM");
  s_aug->add_option("--sample-dir", aug.sample_dir, "Directory for PPM samples");
  add_common(s_aug, aug.common);

  TrainArgs tr;
  auto* s_tr = app.add_subcommand("train", "Train the MLP classifier");
  s_tr->add_option("--input", tr.input, "CIFAR-binary training set")->required();
  s_tr->add_option("--test", tr.test, "CIFAR-binary test set for per-epoch accuracy");
  s_tr->add_option("--model-out", tr.model_out, "Model file to write")->required();
  s_tr->add_option("--log", tr.log, "Per-epoch CSV log");
  s_tr->add_option("--classes", tr.classes)->capture_default_str();
  s_tr->add_option("--hidden", tr.hidden, "Hidden units")->capture_default_str();
  s_tr->add_option("--epochs", tr.epochs)->capture_default_str();
  s_tr->add_option("--batch-size", tr.batch)->capture_default_str()->check(CLI::PositiveNumber);
  s_tr->add_option("--lr", tr.lr, "Base learning rate")->capture_default_str();
  s_tr->add_option("--decay", tr.decay, "Factor applied at each milestone")->capture_default_str();
  s_tr->add_option("--milestones", tr.milestones, "auto, none, or comma-separated epochs")
      ->capture_default_str();
  s_tr->add_option("--momentum", tr.momentum)->capture_default_str();
  s_tr->add_option("--weight-decay", tr.weight_decay)->capture_default_str();
  s_tr->add_option("--baseline-aug", tr.baseline_aug, "Random crop + flip (true/false)")
      ->capture_default_str();
  s_tr->add_option("--freq-aug", tr.freq_aug, "Online frequency augmentation")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "rfc", "apr", "rfc+apr"}));
  s_tr->add_option("--radius", tr.radius)->capture_default_str();
  s_tr->add_option("--prob", tr.prob)->capture_default_str();
  s_tr->add_option("--order", tr.order)
      ->capture_default_str()
      ->check(CLI::IsMember({"rfc-then-apr", "apr-then-rfc"}));
  add_common(s_tr, tr.common);

  ProbeArgs pr;
  auto* s_pr = app.add_subcommand("probe", "Accuracy on band-limited and phase-only test images");
  s_pr->add_option("--model", pr.model)->required();
  s_pr->add_option("--input", pr.input, "CIFAR-binary test set")->required();
  s_pr->add_option("--radii", pr.radii, "Comma-separated radii")->capture_default_str();
  s_pr->add_option("--mean-from", pr.mean_from, "Images for the mean amplitude (default: input)");
  s_pr->add_option("--output", pr.output, "Output file (default: standard output)");
  s_pr->add_option("--format", pr.format, "csv or text")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "text"}));
  add_common(s_pr, pr.common);

  EvalArgs ev;
  auto* s_ev = app.add_subcommand("eval-ood", "Maximum-softmax OOD detection AUROC");
  s_ev->add_option("--model", ev.model);
  s_ev->add_option("--input", ev.input, "In-distribution CIFAR-binary test set");
  s_ev->add_option("--ood", ev.ood, "NAME=PATH, repeatable (.npy or CIFAR binary)");
  s_ev->add_option("--in-scores", ev.in_scores, "Score CSV (score,is_in_distribution)");
  s_ev->add_option("--ood-scores", ev.ood_scores, "Score CSV (score,is_in_distribution)");
  s_ev->add_option("--scores-dir", ev.scores_dir, "Directory for score and ROC CSVs");
  s_ev->add_option("--method", ev.method, "Row label in the table")->capture_default_str();
  add_common(s_ev, ev.common);

  CorruptArgs co;
  auto* s_co = app.add_subcommand("corrupt", "Apply a corruption at a severity level");
  s_co->add_option("--input", co.input, ".npy or CIFAR binary")->required();
  s_co->add_option("--output", co.output, "Same format as the input")->required();
  s_co->add_option("--kind", co.kind)
      ->required()
      ->check(CLI::IsMember({"gaussian_noise", "gaussian_blur", "fog", "contrast"}));
  s_co->add_option("--severity", co.severity)->capture_default_str()->check(CLI::Range(1, 5));
  s_co->add_option("--constants", co.constants, "Corruption constants file");
  add_common(s_co, co.common);

  StatsArgs st;
  auto* s_st = app.add_subcommand("stats", "Dataset summary");
  s_st->add_option("--input", st.input, ".npy or CIFAR binary")->required();
  s_st->add_option("--radius", st.radius, "Radius for the low-band energy share")
      ->capture_default_str();
  add_common(s_st, st.common);

  std::string replay_path;
  auto* s_re = app.add_subcommand("replay", "Rerun a manifest and compare output hashes");
  s_re->add_option("manifest", replay_path)->required();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    Run run;
    const Common* common = nullptr;
    if (s_aug->parsed()) {
      run = cmd_augment(aug);
      common = &aug.common;
    } else if (s_tr->parsed()) {
      run = cmd_train(tr);
      common = &tr.common;
    } else if (s_pr->parsed()) {
      run = cmd_probe(pr);
      common = &pr.common;
    } else if (s_ev->parsed()) {
      run = cmd_eval_ood(ev);
      common = &ev.common;
    } else if (s_co->parsed()) {
      run = cmd_corrupt(co);
      common = &co.common;
    } else if (s_st->parsed()) {
      run = cmd_stats(st);
      common = &st.common;
    } else {
      return cmd_replay(replay_path);
    }
    std::cout << run.stdout_text << std::flush;
    save_manifest(run, *common);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_args(std::move(args));
}
