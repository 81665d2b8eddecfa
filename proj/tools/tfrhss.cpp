// tfrhss: generate datasets, train the reversible surrogate, reconstruct,
// evaluate, run baselines and render fields.
//
// Every command that writes an artifact also writes `<artifact>.manifest`.
// Outputs are never overwritten unless --force is given. Failures print one
// line `error: <kind>: <message>` to stderr and exit with status 1 (2 for
// usage errors).

#include <malloc.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tfrhss/baselines.hpp"
#include "tfrhss/config.hpp"
#include "tfrhss/datagen.hpp"
#include "tfrhss/presets.hpp"
#include "tfrhss/render.hpp"
#include "tfrhss/trainer.hpp"

using namespace tfrhss;

namespace {

constexpr const char* kVersion = "0.1.0";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutputExists : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void check_writable(const std::vector<std::string>& paths, bool force) {
  for (const auto& p : paths) {
    if (p.empty()) continue;
    if (!force && std::filesystem::exists(p)) throw OutputExists("'" + p + "' exists (use --force to overwrite)");
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw FormatError("write failed: " + path);
}

Manifest base_manifest(const std::string& command) {
  Manifest m;
  m.set("command", command);
  m.set("tool_version", std::string(kVersion));
  return m;
}

// Options common to every artifact-producing command.
struct Common {
  bool force = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& c, bool threads) {
  cmd->add_flag("--force", c.force, "Overwrite existing outputs");
  if (threads) cmd->add_option("--threads", c.threads, "Worker threads (default: TFRHSS_THREADS or 1)")->check(CLI::Range(1, 1024));
}

Dataset load_dataset_for(const std::string& path, const SystemSpec& spec) {
  Dataset ds = read_dataset(path, spec.sensors.fill_value);
  check_compatible(ds, spec);
  return ds;
}

// ---------------------------------------------------------------------------

struct PresetArgs {
  std::string name;
  int n_cells = 64;
  std::string out;
  Common common;
};

void run_preset(const PresetArgs& a) {
  check_writable({a.out, a.out + ".manifest"}, a.common.force);
  const SystemSpec spec = preset_spec(a.name, a.n_cells);
  save_system_spec(spec, a.out);
  Manifest m = base_manifest("preset");
  m.set("preset", a.name);
  m.set("n_cells", static_cast<std::uint64_t>(a.n_cells));
  m.set("sensors", static_cast<std::uint64_t>(spec.sensors.positions.size()));
  m.set("spec_hash", hex64(spec_hash(spec)));
  m.set("output", a.out);
  m.write(a.out + ".manifest");
  std::cout << "wrote " << a.out << " (" << spec.sources.size() << " sources, " << spec.sensors.positions.size()
            << " sensors)\n";
}

struct GenerateArgs {
  std::string spec_file;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  double noise_eta = 0.0;
  double low = 0.0;
  double high = 30000.0;
  double tolerance = 1e-6;
  double omega = 1.9;
  int max_iterations = 0;
  std::string order = "lexicographic";
  std::string out;
  Common common;
};

void run_generate(const GenerateArgs& a) {
  check_writable({a.out, a.out + ".manifest"}, a.common.force);
  const SystemSpec spec = load_system_spec(a.spec_file);
  GenerateOptions opt;
  opt.count = a.count;
  opt.seed = a.seed;
  opt.noise_eta = a.noise_eta;
  opt.intensity_low = a.low;
  opt.intensity_high = a.high;
  opt.solver.tolerance = a.tolerance;
  opt.solver.relaxation_factor = a.omega;
  opt.solver.max_iterations = a.max_iterations;
  opt.solver.order = a.order == "red-black" ? SweepOrder::red_black : SweepOrder::lexicographic;
  opt.threads = resolve_threads(a.common.threads);
  const auto t0 = Clock::now();
  const Dataset ds = generate_dataset(spec, opt);
  write_dataset(ds, a.out);
  Manifest m = base_manifest("generate");
  m.set("spec_file", a.spec_file);
  m.set("spec_hash", hex64(spec_hash(spec)));
  m.set("seed", a.seed);
  m.set("count", static_cast<std::uint64_t>(a.count));
  m.set("noise_eta", a.noise_eta);
  m.set("intensity_low", a.low);
  m.set("intensity_high", a.high);
  m.set("solver_tolerance", a.tolerance);
  m.set("solver_relaxation", a.omega);
  m.set("solver_max_iterations", static_cast<std::uint64_t>(a.max_iterations));
  m.set("solver_order", a.order);
  m.set("output", a.out);
  m.set("seconds", seconds_since(t0));
  m.write(a.out + ".manifest");
  std::cout << "wrote " << ds.size() << " samples to " << a.out << "\n";
}

struct TrainArgs {
  std::string dataset;
  std::string spec_file;
  int epochs = 50;
  int batch = 16;
  double lr = 1e-3;
  double alpha = 1e-3;
  double beta = 1e-3;
  double gamma = 1e-2;
  std::string flip = "main";
  bool vanilla = false;
  std::uint64_t seed = 0;
  double val_fraction = 0.2;
  std::string out;
  std::string history;
  bool quiet = false;
  Common common;
};

void run_train(const TrainArgs& a) {
  const std::string history = a.history.empty() ? a.out + ".history.csv" : a.history;
  check_writable({a.out, a.out + ".manifest", history}, a.common.force);
  const SystemSpec spec = load_system_spec(a.spec_file);
  const Dataset ds = load_dataset_for(a.dataset, spec);

  ModelConfig mc;
  mc.n_cells = ds.n_cells;
  mc.t0 = spec.sensors.fill_value;
  mc.flip = parse_flip_mode(a.flip);
  if (a.vanilla) {
    mc.single_net = true;
    mc.flip = FlipMode::off;
  }
  mc.validate();

  TrainConfig tc;
  tc.epochs = a.epochs;
  tc.batch_size = a.batch;
  tc.learning_rate = a.lr;
  tc.weights.alpha = a.alpha;
  tc.weights.beta = a.beta;
  tc.weights.gamma = a.gamma;
  tc.seed = a.seed;
  tc.val_fraction = a.val_fraction;
  tc.threads = resolve_threads(a.common.threads);
  tc.validate();

  ReversibleNet net(mc, stream_seed(a.seed, 0, 5));
  const auto t0 = Clock::now();
  const TrainHistory h = train(ds, spec, net, tc, [&](const EpochRecord& r) {
    if (a.quiet) return;
    std::printf("epoch %d  lr %.3g  train %.6g  val %.6g  (%.1f s)\n", r.epoch, r.learning_rate, r.train.total,
                r.val.total, r.seconds);
    std::fflush(stdout);
  });
  net.save(a.out);
  write_text(history, h.to_csv());

  Manifest m = base_manifest("train");
  m.set("dataset", a.dataset);
  m.set("spec_file", a.spec_file);
  m.set("spec_hash", hex64(spec_hash(spec)));
  m.set("model", mc.descriptor());
  m.set("seed", a.seed);
  m.set("epochs", static_cast<std::uint64_t>(a.epochs));
  m.set("batch_size", static_cast<std::uint64_t>(a.batch));
  m.set("learning_rate", a.lr);
  m.set("alpha", a.alpha);
  m.set("beta", a.beta);
  m.set("gamma", a.gamma);
  m.set("val_fraction", a.val_fraction);
  m.set("train_samples", static_cast<std::uint64_t>(h.train_count));
  m.set("val_samples", static_cast<std::uint64_t>(h.val_count));
  m.set("best_epoch", static_cast<std::uint64_t>(h.best_epoch));
  m.set("history", history);
  m.set("output", a.out);
  m.set("seconds", seconds_since(t0));
  m.write(a.out + ".manifest");
  std::cout << "wrote " << a.out << " (best epoch " << h.best_epoch << ")\n";
}

struct ReconstructArgs {
  std::string checkpoint;
  std::string dataset;
  std::string spec_file;
  std::string out;
  Common common;
};

void run_reconstruct(const ReconstructArgs& a) {
  check_writable({a.out, a.out + ".manifest"}, a.common.force);
  const SystemSpec spec = load_system_spec(a.spec_file);
  const Dataset ds = load_dataset_for(a.dataset, spec);
  const ReversibleNet net = ReversibleNet::load(a.checkpoint);
  if (net.config().n_cells != ds.n_cells)
    throw ShapeError("checkpoint grid " + std::to_string(net.config().n_cells) + " does not match dataset grid " +
                     std::to_string(ds.n_cells));
  const auto t0 = Clock::now();
  std::vector<Field> fields(ds.size());
  parallel_for(ds.size(), resolve_threads(a.common.threads),
               [&](std::size_t i) { fields[i] = net.predict(ds.samples[i].monitoring.values); });
  const double secs = seconds_since(t0);
  write_fields(fields, a.out);
  Manifest m = base_manifest("reconstruct");
  m.set("checkpoint", a.checkpoint);
  m.set("model", net.config().descriptor());
  m.set("dataset", a.dataset);
  m.set("spec_hash", hex64(spec_hash(spec)));
  m.set("count", static_cast<std::uint64_t>(fields.size()));
  m.set("output", a.out);
  m.set("seconds", secs);
  m.write(a.out + ".manifest");
  std::cout << "wrote " << fields.size() << " fields to " << a.out << "\n";
}

void emit_report(const MetricReport& rep, const std::string& report, const std::string& csv, Manifest m) {
  std::cout << rep.to_text();
  if (!report.empty()) {
    write_text(report, rep.to_text(false));
    m.set("ms_per_sample", rep.ms_per_sample);
    m.set("output", report);
    if (!csv.empty()) m.set("csv", csv);
    m.write(report + ".manifest");
  }
  if (!csv.empty()) write_text(csv, rep.to_csv());
}

struct EvalArgs {
  std::string dataset;
  std::string spec_file;
  std::string checkpoint;
  std::string predictions;
  std::string report;
  std::string csv;
  Common common;
};

void run_eval(const EvalArgs& a) {
  if (a.checkpoint.empty() == a.predictions.empty()) throw UsageError("eval needs exactly one of --checkpoint, --predictions");
  check_writable({a.report, a.report.empty() ? "" : a.report + ".manifest", a.csv}, a.common.force);
  const SystemSpec spec = load_system_spec(a.spec_file);
  const Dataset ds = load_dataset_for(a.dataset, spec);
  Manifest m = base_manifest("eval");
  m.set("dataset", a.dataset);
  m.set("spec_hash", hex64(spec_hash(spec)));
  MetricReport rep;
  if (!a.checkpoint.empty()) {
    const ReversibleNet net = ReversibleNet::load(a.checkpoint);
    if (net.config().n_cells != ds.n_cells) throw ShapeError("checkpoint grid does not match dataset grid");
    m.set("checkpoint", a.checkpoint);
    m.set("model", net.config().descriptor());
    rep = evaluate(net, ds, spec);
  } else {
    const std::vector<Field> fields = read_fields(a.predictions);
    if (fields.size() != ds.size())
      throw FormatError("'" + a.predictions + "' holds " + std::to_string(fields.size()) + " fields, dataset has " +
                        std::to_string(ds.size()));
    if (!fields.empty() && fields[0].n() != ds.n_cells) throw ShapeError("prediction grid does not match dataset grid");
    m.set("predictions", a.predictions);
    rep = evaluate([&](const Sample&, std::size_t i) { return fields[i]; }, ds, spec);
  }
  emit_report(rep, a.report, a.csv, std::move(m));
}

struct BaselineArgs {
  std::string method;
  std::string dataset;
  std::string spec_file;
  double bandwidth = 1.0;
  bool domain_bandwidth = false;
  int degree = 5;
  int steps = 500;
  double step_size = 1e-3;
  double alpha = 1e-3;
  double beta = 1e-3;
  double gamma = 1e-2;
  std::string report;
  std::string csv;
  std::string out_fields;
  Common common;
};

void run_baseline(const BaselineArgs& a) {
  check_writable({a.report, a.report.empty() ? "" : a.report + ".manifest", a.csv, a.out_fields,
                  a.out_fields.empty() ? "" : a.out_fields + ".manifest"},
                 a.common.force);
  const SystemSpec spec = load_system_spec(a.spec_file);
  const Dataset ds = load_dataset_for(a.dataset, spec);
  const Domain domain(spec);
  const Grid& grid = spec.grid;
  Manifest m = base_manifest("baseline");
  m.set("method", a.method);
  m.set("dataset", a.dataset);
  m.set("spec_hash", hex64(spec_hash(spec)));

  Predictor predict;
  if (a.method == "ggi") {
    const double bw = a.domain_bandwidth ? ggi_domain_bandwidth(grid) : a.bandwidth;
    m.set("bandwidth", bw);
    predict = [&grid, bw](const Sample& s, std::size_t) { return ggi_reconstruct(s.monitoring, grid, bw); };
  } else if (a.method == "poly") {
    m.set("degree", static_cast<std::uint64_t>(a.degree));
    predict = [&grid, deg = a.degree](const Sample& s, std::size_t) {
      const PolyModel model = poly_fit(s.monitoring, grid, deg);
      if (model.ridge) std::cerr << "warning: rank-deficient polynomial design, using ridge fallback\n";
      return poly_reconstruct(model, grid);
    };
  } else if (a.method == "direct") {
    DirectOptions opt;
    opt.steps = a.steps;
    opt.step_size = a.step_size;
    opt.weights.alpha = a.alpha;
    opt.weights.beta = a.beta;
    opt.weights.gamma = a.gamma;
    m.set("steps", static_cast<std::uint64_t>(a.steps));
    m.set("step_size", a.step_size);
    m.set("alpha", a.alpha);
    m.set("beta", a.beta);
    m.set("gamma", a.gamma);
    predict = [&domain, opt](const Sample& s, std::size_t) {
      return direct_pirl_optimize(s.monitoring, domain, opt).field;
    };
  } else {
    throw UsageError("unknown baseline method '" + a.method + "' (expected ggi, poly or direct)");
  }

  std::vector<Field> fields(ds.size());
  const MetricReport rep = evaluate(
      [&](const Sample& s, std::size_t i) {
        fields[i] = predict(s, i);
        return fields[i];
      },
      ds, spec);
  if (!a.out_fields.empty()) {
    write_fields(fields, a.out_fields);
    Manifest fm = m;
    fm.set("output", a.out_fields);
    fm.write(a.out_fields + ".manifest");
  }
  emit_report(rep, a.report, a.csv, std::move(m));
}

struct RenderArgs {
  std::string source;
  std::size_t index = 0;
  std::string which = "truth";
  std::string error_against;
  std::string out;
  int size = 0;
  std::optional<double> min;
  std::optional<double> max;
  std::string colormap = "jet";
  Common common;
};

bool has_magic(const std::string& path, const char* magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  char buf[4] = {};
  in.read(buf, 4);
  return in && std::equal(buf, buf + 4, magic);
}

// Field `index` of a dataset (truth or monitoring) or of a fields file.
Field load_field(const std::string& path, std::size_t index, const std::string& which) {
  if (has_magic(path, "TFRD")) {
    Dataset ds = read_dataset(path, 0.0);
    if (index >= ds.size()) throw FormatError("'" + path + "': sample " + std::to_string(index) + " out of range");
    Sample& s = ds.samples[index];
    if (which == "monitoring") return s.monitoring.values;
    if (which != "truth") throw UsageError("--which must be truth or monitoring");
    if (!s.truth) throw FormatError("'" + path + "': sample " + std::to_string(index) + " has no truth");
    return *s.truth;
  }
  std::vector<Field> fields = read_fields(path);
  if (index >= fields.size()) throw FormatError("'" + path + "': field " + std::to_string(index) + " out of range");
  return fields[index];
}

void run_render(const RenderArgs& a) {
  check_writable({a.out, a.out + ".manifest"}, a.common.force);
  Field field = load_field(a.source, a.index, a.which);
  if (!a.error_against.empty()) field = abs_error(field, load_field(a.error_against, a.index, "truth"));
  RenderOptions opt;
  opt.size = a.size;
  opt.min = a.min;
  opt.max = a.max;
  opt.colormap = parse_colormap(a.colormap);
  const Image img = render_field(field, opt);
  write_ppm(img, a.out);
  Manifest m = base_manifest("render");
  m.set("source", a.source);
  m.set("index", static_cast<std::uint64_t>(a.index));
  m.set("which", a.error_against.empty() ? a.which : std::string("abs_error"));
  if (!a.error_against.empty()) m.set("error_against", a.error_against);
  m.set("colormap", a.colormap);
  m.set("size", static_cast<std::uint64_t>(img.width));
  if (a.min) m.set("min", *a.min);
  if (a.max) m.set("max", *a.max);
  m.set("output", a.out);
  m.write(a.out + ".manifest");
  std::cout << "wrote " << a.out << " (" << img.width << "x" << img.height << ")\n";
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return "usage";
  if (dynamic_cast<const OutputExists*>(&e)) return "exists";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const FormatError*>(&e)) return "format";
  if (dynamic_cast<const SpecError*>(&e)) return "spec";
  if (dynamic_cast<const ShapeError*>(&e)) return "shape";
  if (dynamic_cast<const SampleNonConvergence*>(&e)) return "nonconvergence";
  if (dynamic_cast<const NonConvergence*>(&e)) return "nonconvergence";
  if (dynamic_cast<const SingularProblem*>(&e)) return "singular";
  if (dynamic_cast<const NonFiniteError*>(&e)) return "nonfinite";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "usage";
  return "runtime";
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  // Training allocates many short-lived large tensors; keep them out of mmap.
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);

  CLI::App app{"Temperature field reconstruction from sparse sensors"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  PresetArgs pa;
  auto* preset = app.add_subcommand("preset", "Write a built-in system spec (a, b, c or d)");
  preset->add_option("name", pa.name, "Preset name")->required()->check(CLI::IsMember(preset_names()));
  preset->add_option("--n", pa.n_cells, "Cells per side")->check(CLI::Range(16, 4096));
  preset->add_option("--out", pa.out, "Spec file to write")->required();
  add_common(preset, pa.common, false);

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Solve sampled layouts and write a dataset");
  gen->add_option("spec", ga.spec_file, "System spec file")->required()->check(CLI::ExistingFile);
  gen->add_option("--count", ga.count, "Number of samples")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 24));
  gen->add_option("--seed", ga.seed, "Base seed");
  gen->add_option("--noise-eta", ga.noise_eta, "Relative sensor noise level")->check(CLI::NonNegativeNumber);
  gen->add_option("--low", ga.low, "Lowest source intensity (W/m^2)");
  gen->add_option("--high", ga.high, "Highest source intensity (W/m^2)");
  gen->add_option("--tolerance", ga.tolerance, "Solver tolerance (K)");
  gen->add_option("--omega", ga.omega, "SOR relaxation factor");
  gen->add_option("--max-iterations", ga.max_iterations, "Sweep limit (0: 10 N^2)");
  gen->add_option("--order", ga.order, "Sweep order")->check(CLI::IsMember({"lexicographic", "red-black"}));
  gen->add_option("--out", ga.out, "Dataset file to write")->required();
  add_common(gen, ga.common, true);

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "Train the reversible model on monitoring matrices");
  tr->add_option("dataset", ta.dataset, "Training dataset")->required()->check(CLI::ExistingFile);
  tr->add_option("spec", ta.spec_file, "System spec file")->required()->check(CLI::ExistingFile);
  tr->add_option("--epochs", ta.epochs);
  tr->add_option("--batch", ta.batch);
  tr->add_option("--lr", ta.lr);
  tr->add_option("--alpha", ta.alpha);
  tr->add_option("--beta", ta.beta);
  tr->add_option("--gamma", ta.gamma);
  tr->add_option("--flip", ta.flip, "Flip between the nets")->check(CLI::IsMember({"main", "anti", "off"}));
  tr->add_flag("--vanilla", ta.vanilla, "Single encoder-decoder, no Net2");
  tr->add_option("--seed", ta.seed, "Initialisation, split and shuffle seed");
  tr->add_option("--val-fraction", ta.val_fraction);
  tr->add_option("--out-checkpoint", ta.out, "Checkpoint to write")->required();
  tr->add_option("--history", ta.history, "History CSV (default: <checkpoint>.history.csv)");
  tr->add_flag("--quiet", ta.quiet, "No per-epoch lines");
  add_common(tr, ta.common, true);

  ReconstructArgs ra;
  auto* rec = app.add_subcommand("reconstruct", "Predict a field for every sample of a dataset");
  rec->add_option("checkpoint", ra.checkpoint)->required()->check(CLI::ExistingFile);
  rec->add_option("dataset", ra.dataset)->required()->check(CLI::ExistingFile);
  rec->add_option("spec", ra.spec_file)->required()->check(CLI::ExistingFile);
  rec->add_option("--out", ra.out, "Fields file to write")->required();
  add_common(rec, ra.common, true);

  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Metrics of a checkpoint or of stored predictions");
  ev->add_option("dataset", ea.dataset, "Test dataset with truth")->required()->check(CLI::ExistingFile);
  ev->add_option("spec", ea.spec_file)->required()->check(CLI::ExistingFile);
  ev->add_option("--checkpoint", ea.checkpoint)->check(CLI::ExistingFile);
  ev->add_option("--predictions", ea.predictions, "Fields file from reconstruct or baseline")->check(CLI::ExistingFile);
  ev->add_option("--report", ea.report, "Report file to write");
  ev->add_option("--csv", ea.csv, "Per-sample CSV to write");
  add_common(ev, ea.common, false);

  BaselineArgs ba;
  auto* base = app.add_subcommand("baseline", "Classical reconstructions (ggi, poly, direct)");
  base->add_option("method", ba.method)->required()->check(CLI::IsMember({"ggi", "poly", "direct"}));
  base->add_option("dataset", ba.dataset)->required()->check(CLI::ExistingFile);
  base->add_option("spec", ba.spec_file)->required()->check(CLI::ExistingFile);
  auto* bw = base->add_option("--bandwidth", ba.bandwidth, "ggi kernel bandwidth (m)")->check(CLI::PositiveNumber);
  base->add_flag("--domain-bandwidth", ba.domain_bandwidth, "ggi bandwidth = board side")->excludes(bw);
  base->add_option("--degree", ba.degree, "poly degree")->check(CLI::Range(0, 12));
  base->add_option("--steps", ba.steps, "direct: descent steps")->check(CLI::PositiveNumber);
  base->add_option("--step-size", ba.step_size, "direct: initial step")->check(CLI::PositiveNumber);
  base->add_option("--alpha", ba.alpha);
  base->add_option("--beta", ba.beta);
  base->add_option("--gamma", ba.gamma);
  base->add_option("--report", ba.report);
  base->add_option("--csv", ba.csv);
  base->add_option("--out-fields", ba.out_fields, "Fields file to write");
  add_common(base, ba.common, false);

  RenderArgs rda;
  auto* ren = app.add_subcommand("render", "Write a field as a binary PPM image");
  ren->add_option("source", rda.source, "Dataset or fields file")->required()->check(CLI::ExistingFile);
  ren->add_option("--index", rda.index, "Sample or field index");
  ren->add_option("--which", rda.which, "Dataset array")->check(CLI::IsMember({"truth", "monitoring"}));
  ren->add_option("--error-against", rda.error_against, "Dataset whose truth is subtracted")->check(CLI::ExistingFile);
  ren->add_option("--out", rda.out, "Image to write")->required();
  ren->add_option("--size", rda.size, "Pixels per side (default one per cell)")->check(CLI::Range(1, 16384));
  ren->add_option("--min", rda.min);
  ren->add_option("--max", rda.max);
  ren->add_option("--colormap", rda.colormap)->check(CLI::IsMember({"gray", "jet"}));
  add_common(ren, rda.common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    if (*preset) run_preset(pa);
    if (*gen) run_generate(ga);
    if (*tr) run_train(ta);
    if (*rec) run_reconstruct(ra);
    if (*ev) run_eval(ea);
    if (*base) run_baseline(ba);
    if (*ren) run_render(rda);
  } catch (const UsageError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << error_kind(e) << ": " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}
