#include "calibrax/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <CLI11.hpp>

#include "calibrax/bench.hpp"
#include "calibrax/calibrators.hpp"
#include "calibrax/data.hpp"
#include "calibrax/error.hpp"
#include "calibrax/estimator.hpp"
#include "calibrax/io.hpp"
#include "calibrax/metrics.hpp"
#include "calibrax/simulator.hpp"

namespace calibrax {

namespace {

namespace fs = std::filesystem;

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool quiet = false;
  std::string format = "json";
};

class Context {
 public:
  Context(const Globals& g, std::ostream& out, std::ostream& err)
      : globals(g), out_(out), err_(err) {}

  void emit(const std::string& path, const std::string& contents) {
    if (path.empty() || path == "-") {
      out_ << contents;
    } else {
      write_file_atomic(path, contents);
      log("wrote " + path);
    }
  }

  void log(const std::string& msg) {
    if (!globals.quiet) err_ << msg << '\n';
  }

  const Globals& globals;

 private:
  std::ostream& out_;
  std::ostream& err_;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) parts.push_back(item);
  return parts;
}

std::size_t parse_count(const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || s.front() == '-')
    throw Error(ErrorCode::kUsage, "expected a positive integer, got `" + s + "`");
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> parse_counts(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& part : split_list(s)) out.push_back(parse_count(part));
  if (out.empty()) throw Error(ErrorCode::kUsage, "empty list");
  return out;
}

// "a:b:step" or "a,b,c"
std::vector<std::size_t> parse_sizes(const std::string& s) {
  if (s.find(':') == std::string::npos) return parse_counts(s);
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw Error(ErrorCode::kUsage, "sizes must be a:b:step");
  const auto lo = parse_count(parts[0]);
  const auto hi = parse_count(parts[1]);
  const auto step = parse_count(parts[2]);
  if (step == 0 || lo == 0 || lo > hi)
    throw Error(ErrorCode::kUsage, "sizes range must satisfy 0 < a <= b, step > 0");
  std::vector<std::size_t> out;
  for (std::size_t n = lo; n <= hi; n += step) out.push_back(n);
  return out;
}

bool is_logits_path(const std::string& path) {
  return fs::path(path).extension() == ".jsonl";
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json estimator_echo(const EstimatorConfig& c, const CurveFit* fit) {
  Json j{{"scheme_counts", fit ? Json(fit->scheme_counts)
                               : (c.scheme_counts.empty()
                                      ? Json("auto")
                                      : Json(c.scheme_counts))},
         {"init", curve_to_json(c.init)},
         {"max_iterations", c.max_iterations},
         {"tolerance", c.tolerance},
         {"restarts", c.restarts}};
  if (fit) j["fallback_schemes"] = fit->fallback_schemes;
  return j;
}

void add_estimator_options(CLI::App* cmd, EstimatorConfig& cfg,
                           std::string& schemes) {
  cmd->add_option("--schemes", schemes,
                  "equal-mass bin counts: auto or B1,B2,...")
      ->default_val("auto");
  cmd->add_option("--max-iterations", cfg.max_iterations)
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tolerance", cfg.tolerance)->check(CLI::PositiveNumber);
  cmd->add_option("--restarts", cfg.restarts)->check(CLI::NonNegativeNumber);
}

void apply_schemes(EstimatorConfig& cfg, const std::string& schemes) {
  cfg.scheme_counts.clear();
  if (schemes != "auto") cfg.scheme_counts = parse_counts(schemes);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"calibrax: calibration curves, metrics and benchmarks"};
  app.name("calibrax");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "random seed");
  app.add_flag("--quiet", g.quiet, "suppress log output on stderr");
  app.add_option("--format", g.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));

  // ingest-logits
  std::string in_path, out_path;
  auto* ingest = app.add_subcommand("ingest-logits",
                                    "convert logits JSONL to a pairs CSV");
  ingest->add_option("--in", in_path)->required();
  ingest->add_option("--out", out_path);

  // simulate
  std::string dist;
  std::size_t sim_n = 0;
  auto* sim = app.add_subcommand("simulate", "sample a dataset from a known distribution");
  sim->add_option("--dist", dist, "D1..D5 or a spec JSON file")->required();
  sim->add_option("--n", sim_n)->required()->check(CLI::PositiveNumber);
  sim->add_option("--out", out_path);

  // estimate
  EstimatorConfig est;
  std::string schemes = "auto";
  auto* estimate = app.add_subcommand("estimate", "fit the calibration curve");
  estimate->add_option("--in", in_path)->required();
  estimate->add_option("--out", out_path);
  add_estimator_options(estimate, est, schemes);

  // metrics
  std::string metric_list = "ece,debiased,sweep,ks,tcebpm";
  MetricConfig mc;
  std::string binning = "equal-mass";
  auto* metrics = app.add_subcommand("metrics", "compute calibration metrics");
  metrics->add_option("--in", in_path)->required();
  metrics->add_option("--metrics", metric_list);
  metrics->add_option("--bins", mc.bins)->check(CLI::PositiveNumber);
  metrics->add_option("--p", mc.p)->check(CLI::PositiveNumber);
  metrics->add_option("--binning", binning)
      ->check(CLI::IsMember({"equal-mass", "equal-width"}));
  metrics->add_option("--quadrature-points", mc.quadrature_points)
      ->check(CLI::PositiveNumber);
  metrics->add_option("--out", out_path);
  add_estimator_options(metrics, est, schemes);

  // calibrate
  std::string method, train_path, apply_path, map_out;
  std::size_t hb_bins = 15;
  auto* calibrate = app.add_subcommand("calibrate", "fit and apply a calibration map");
  calibrate->add_option("--method", method)
      ->required()
      ->check(CLI::IsMember({"tpm", "hb", "temp", "platt", "isotonic"}));
  calibrate->add_option("--train", train_path)->required();
  calibrate->add_option("--apply", apply_path)->required();
  calibrate->add_option("--out", out_path);
  calibrate->add_option("--bins", hb_bins)->check(CLI::PositiveNumber);
  calibrate->add_option("--map-out", map_out, "also write the fitted map as JSON");
  add_estimator_options(calibrate, est, schemes);

  // benchmark
  std::string kind = "metrics", dists = "D1,D2,D3,D4,D5",
              sizes = "500:5000:500", per_trial;
  BenchmarkConfig bc;
  auto* bench = app.add_subcommand("benchmark", "run the simulation benchmark");
  bench->add_option("--kind", kind)->check(CLI::IsMember({"metrics", "ead"}));
  bench->add_option("--dists", dists);
  bench->add_option("--sizes", sizes);
  bench->add_option("--runs", bc.runs)->check(CLI::PositiveNumber);
  bench->add_option("--metrics", metric_list);
  bench->add_option("--bins", bc.bins)->check(CLI::PositiveNumber);
  bench->add_option("--p", bc.p)->check(CLI::PositiveNumber);
  bench->add_option("--threads", bc.threads);
  bench->add_option("--out", out_path);
  bench->add_option("--per-trial", per_trial);
  add_estimator_options(bench, est, schemes);

  // curve-eval
  std::string curve_path;
  std::size_t grid = 1000;
  auto* curve_eval = app.add_subcommand("curve-eval", "tabulate a fitted curve");
  curve_eval->add_option("--curve", curve_path)->required();
  curve_eval->add_option("--grid", grid)->check(CLI::PositiveNumber);
  curve_eval->add_option("--out", out_path);

  std::vector<std::string> argv_store{"calibrax"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error E_USAGE: " << e.what() << '\n' << app.help();
    return 2;
  }
  g.seed_given = seed_opt->count() > 0;
  Context ctx(g, out, err);

  try {
    if (*ingest) {
      const auto records = load_logits(in_path);
      ctx.emit(out_path, format_pairs(ingest_logits(records)));
    } else if (*sim) {
      const auto spec = resolve_spec(dist);
      ctx.emit(out_path, format_pairs(simulate({spec, sim_n, g.seed})));
    } else if (*estimate) {
      apply_schemes(est, schemes);
      const auto data = load_pairs(in_path);
      const auto fit = estimate_curve(data, est);
      if (g.format == "csv") {
        ctx.emit(out_path, "alpha,beta,c,objective\n" + fmt17(fit.params.alpha) +
                               "," + fmt17(fit.params.beta) + "," +
                               fmt17(fit.params.c) + "," + fmt17(fit.objective) +
                               "\n");
      } else {
        ctx.emit(out_path, dump(curve_to_json(fit)));
      }
    } else if (*metrics) {
      apply_schemes(est, schemes);
      mc.binning = binning == "equal-width" ? BinningKind::kEqualWidth
                                            : BinningKind::kEqualMass;
      const auto data = load_pairs(in_path);
      Json values = Json::object();
      Json details = Json::object();
      CurveFit fit;
      bool fitted = false;
      for (const auto& name : split_list(metric_list)) {
        if (name == "ece") {
          values[name] = ece_bin(data, mc);
        } else if (name == "debiased") {
          values[name] = ece_debiased(data, mc);
        } else if (name == "sweep") {
          const auto sw = ece_sweep_detail(data, mc.p);
          values[name] = sw.value;
          details["sweep_bins"] = sw.bins;
        } else if (name == "ks") {
          values[name] = ks_error(data);
        } else if (name == "tcebpm") {
          const auto r = tce_bpm_detail(data, est, mc);
          values[name] = r.value;
          details["curve"] = curve_to_json(r.fit.params);
          details["xi"] = {{"a1", r.xi.a1}, {"a2", r.xi.a2}};
          fit = r.fit;
          fitted = true;
        } else {
          throw Error(ErrorCode::kUsage, "unknown metric `" + name + "`");
        }
      }
      if (g.format == "csv") {
        std::string csv = "metric,value\n";
        for (const auto& [k, v] : values.items())
          csv += k + "," + fmt17(v.get<double>()) + "\n";
        ctx.emit(out_path, csv);
      } else {
        Json report{{"schema_version", kReportSchemaVersion},
                    {"kind", "metrics"},
                    {"n", data.size()},
                    {"metrics", values},
                    {"details", details},
                    {"config",
                     {{"bins", mc.bins},
                      {"p", mc.p},
                      {"p_assumed", true},
                      {"binning", binning},
                      {"quadrature_points", mc.quadrature_points},
                      {"estimator", estimator_echo(est, fitted ? &fit : nullptr)}}}};
        ctx.emit(out_path, dump(report));
      }
    } else if (*calibrate) {
      apply_schemes(est, schemes);
      const auto map_kind = parse_map_kind(method);
      auto train_records = is_logits_path(train_path)
                               ? load_logits(train_path)
                               : std::vector<LogitRecord>{};
      auto load_dataset = [&](const std::string& path) {
        return is_logits_path(path) ? ingest_logits(load_logits(path))
                                    : load_pairs(path);
      };
      std::optional<CalibrationMap> map;
      switch (map_kind) {
        case MapKind::kTemperature:
          if (train_records.empty())
            throw Error(ErrorCode::kUsage,
                        "temperature scaling needs a logits .jsonl training file");
          map = fit_temperature(train_records);
          break;
        case MapKind::kTpm:
          map = fit_tpm(load_dataset(train_path), est);
          break;
        case MapKind::kHistogram:
          map = fit_histogram_binning(load_dataset(train_path), hb_bins);
          break;
        case MapKind::kPlatt:
          map = fit_platt(load_dataset(train_path));
          break;
        case MapKind::kIsotonic:
          map = fit_isotonic(load_dataset(train_path));
          break;
      }
      Dataset calibrated;
      if (is_logits_path(apply_path)) {
        calibrated = apply_map(*map, load_logits(apply_path));
      } else {
        if (map_kind == MapKind::kTemperature)
          throw Error(ErrorCode::kUsage,
                      "temperature scaling applies to a logits .jsonl file");
        calibrated = apply_map(*map, load_pairs(apply_path));
      }
      if (!map_out.empty()) {
        write_file_atomic(map_out, dump(map_to_json(*map)));
        ctx.log("wrote " + map_out);
      }
      ctx.emit(out_path, format_pairs(calibrated));
    } else if (*bench) {
      apply_schemes(est, schemes);
      bc.estimator = est;
      bc.seed = g.seed;
      bc.sizes = parse_sizes(sizes);
      bc.metrics = split_list(metric_list);
      for (const auto& d : split_list(dists)) bc.specs.push_back(resolve_spec(d));
      const auto report =
          kind == "ead" ? run_ead_benchmark(bc) : run_metric_benchmark(bc);
      if (!per_trial.empty()) {
        write_file_atomic(per_trial, per_trial_csv(report));
        ctx.log("wrote " + per_trial);
      }
      ctx.emit(out_path, g.format == "csv" ? per_trial_csv(report)
                                           : dump(report_to_json(report)));
    } else if (*curve_eval) {
      const auto params = load_curve(curve_path);
      std::string csv = "s,g\n";
      for (std::size_t i = 0; i <= grid; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(grid);
        csv += fmt17(s) + "," + fmt17(g_eval(params, s)) + "\n";
      }
      ctx.emit(out_path, csv);
    }
  } catch (const Error& e) {
    err << "error " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return e.code() == ErrorCode::kUsage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error E_INTERNAL: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace calibrax
