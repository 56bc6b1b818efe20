#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "convbound/bell_stats.hpp"
#include "convbound/deconv.hpp"
#include "convbound/discriminator.hpp"
#include "convbound/errors.hpp"
#include "convbound/histogram.hpp"
#include "convbound/io.hpp"
#include "convbound/joint_density.hpp"
#include "convbound/synth.hpp"
#include "convbound/version.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using namespace convbound;

namespace {

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Flags shared by every subcommand.
struct CommonOpts {
  std::string out_dir;
  std::uint64_t seed = 0;
  bool no_timestamp = false;
};

void add_common_flags(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--out-dir", opts.out_dir,
                  "Output directory (default: $CONVBOUND_OUT, then `.`)");
  sub->add_option("--seed", opts.seed, "Seed for stochastic steps")
      ->default_val(std::uint64_t{0});
  sub->add_flag("--no-timestamp", opts.no_timestamp,
                "Omit the generation-time comment from SVG outputs");
}

fs::path resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("CONVBOUND_OUT"); env != nullptr && *env) {
    return env;
  }
  return ".";
}

// Collects a command's files and finishes with a manifest beside them.
class Run {
 public:
  Run(std::string command, const CommonOpts& opts)
      : command_(std::move(command)),
        dir_(resolve_out_dir(opts.out_dir)),
        seed_(opts.seed),
        timestamp_(!opts.no_timestamp) {
    fs::create_directories(dir_);
  }

  void add_input(const fs::path& path) { inputs_.push_back(path.string()); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  bool timestamp() const { return timestamp_; }

  template <typename WriteFn>
  void write_file(const std::string& name, WriteFn&& write) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw Error("cannot write " + path.string());
    }
    write(out);
    out.flush();
    if (!out) {
      throw Error("failed while writing " + path.string());
    }
    outputs_.push_back(path.string());
  }

  void finish() {
    nlohmann::ordered_json manifest;
    manifest["command"] = command_;
    manifest["inputs"] = inputs_;
    manifest["seed"] = seed_;
    manifest["outputs"] = outputs_;
    manifest["tool_version"] = kVersion;
    const fs::path path = dir_ / (command_ + "_manifest.json");
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw Error("cannot write " + path.string());
    }
    out << manifest.dump(2) << '\n';
  }

 private:
  std::string command_;
  fs::path dir_;
  std::uint64_t seed_;
  bool timestamp_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
};

std::vector<double> probs_as_doubles(const Histogram& h) {
  std::vector<double> out(h.bins.size());
  for (std::size_t n = 0; n < h.bins.size(); ++n) {
    out[n] = static_cast<double>(h.bins[n]);
  }
  return out;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  CommonOpts common;
  std::string preset = "fig2a";
  std::string config_path;
  std::string mode;
  bool seed_given = false;
};

void run_synth(const SynthArgs& args) {
  Run run("synth", args.common);

  ExperimentConfig cfg;
  std::string label = args.preset;
  if (!args.config_path.empty()) {
    cfg = io::load_experiment_config_file(args.config_path);
    label = fs::path(args.config_path).stem().string();
    run.add_input(args.config_path);
  } else {
    cfg = args.preset == "fig2b" ? fig2b_config() : fig2a_config();
  }
  if (!args.mode.empty()) cfg.mode = io::parse_mode(args.mode);
  if (args.seed_given) cfg.seed = args.common.seed;
  run.set_seed(cfg.seed);

  const JointSamples samples = simulate_pairs(cfg);
  const Histogram hist = to_histogram(samples, label);
  const Moments stats = empirical_stats(normalize(hist));

  run.write_file("synth_histogram.csv",
                 [&](std::ostream& out) { io::write_histogram_csv(out, hist); });
  run.write_file("synth_histogram.svg", [&](std::ostream& out) {
    svg::write_bar_chart(out, probs_as_doubles(hist), {},
                         {label + " summed counts", "photon count",
                          "experiments", run.timestamp()});
  });
  if (cfg.mode == DetectionMode::two_detector) {
    const JointDensity joint = empirical_joint(samples);
    run.write_file("synth_samples.csv", [&](std::ostream& out) {
      io::write_samples_csv(out, samples);
    });
    run.write_file("synth_joint.csv", [&](std::ostream& out) {
      io::write_joint_triplets_csv(out, joint);
    });
    run.write_file("synth_joint.svg", [&](std::ostream& out) {
      svg::write_heatmap(out, joint,
                         {label + " joint counts", "ion 2 count",
                          "ion 1 count", run.timestamp()});
    });
  }
  run.finish();

  std::cout << "experiments: " << cfg.n_experiments << '\n'
            << "mean: " << fmt6(stats.mean) << '\n'
            << "variance: " << fmt6(stats.variance) << '\n';
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
  CommonOpts common;
  std::string in_path;
  std::vector<std::uint64_t> seeds{1, 2, 3};
};

void run_bounds(const BoundsArgs& args) {
  Run run("bounds", args.common);
  run.add_input(args.in_path);

  const FrequencyDist f = normalize(io::load_histogram_file(args.in_path));
  const SettingPair setting{3.0 * M_PI / 8.0, 3.0 * M_PI / 8.0, "3pi8-3pi8"};
  const CorrelationReport report = correlation_bounds(f, setting, args.seeds);

  run.write_file("bounds_report.csv", [&](std::ostream& out) {
    io::write_report_csv(out, report);
  });
  run.write_file("bounds_report.svg", [&](std::ostream& out) {
    svg::write_labeled_bars(out, report.per_constructor,
                            {"correlation bounds per constructor",
                             "Pearson r", "", run.timestamp()});
  });
  run.finish();

  for (const auto& [name, r] : report.per_constructor) {
    std::cout << name << ": " << fmt6(r) << '\n';
  }
  std::cout << "min: " << fmt6(report.min_r) << '\n'
            << "max: " << fmt6(report.max_r) << '\n';
}

// ------------------------------------------------------------ deconvolve

struct DeconvArgs {
  CommonOpts common;
  std::string in_path;
  std::string config_path;
  std::string metric;
  bool seed_given = false;
};

void run_deconvolve(const DeconvArgs& args) {
  Run run("deconv", args.common);
  run.add_input(args.in_path);

  DeconvConfig cfg;
  if (!args.config_path.empty()) {
    cfg = io::load_deconv_config_file(args.config_path);
    run.add_input(args.config_path);
  }
  if (!args.metric.empty()) cfg.fitness_metric = io::parse_metric(args.metric);
  if (args.seed_given) cfg.seed = args.common.seed;
  run.set_seed(cfg.seed);

  const FrequencyDist f = normalize(io::load_histogram_file(args.in_path));
  const DeconvResult res = deconvolve(f, cfg);
  const FrequencyDist regen = convolve_pair(res.pair.g, res.pair.h);

  run.write_file("deconv_ion1.csv", [&](std::ostream& out) {
    io::write_frequency_csv(out, res.pair.g);
  });
  run.write_file("deconv_ion2.csv", [&](std::ostream& out) {
    io::write_frequency_csv(out, res.pair.h);
  });
  run.write_file("deconv_trace.csv", [&](std::ostream& out) {
    io::write_trace_csv(out, res.trace);
  });
  run.write_file("deconv_overlay.svg", [&](std::ostream& out) {
    svg::write_bar_chart(out, f.probs, regen.probs,
                         {"original vs regenerated", "photon count",
                          "probability", run.timestamp()});
  });
  run.finish();

  std::cout << "residual: " << fmt6(res.residual) << '\n'
            << "generations: " << res.trace.size() - 1 << '\n'
            << "ion1 mean: " << fmt6(empirical_stats(res.pair.g).mean) << '\n'
            << "ion2 mean: " << fmt6(empirical_stats(res.pair.h).mean) << '\n';
}

// -------------------------------------------------------------- classify

struct ClassifyArgs {
  CommonOpts common;
  std::string in_path;
  std::int64_t t1 = 25;
  std::int64_t t2 = 86;
};

void run_classify(const ClassifyArgs& args) {
  Run run("classify", args.common);
  run.add_input(args.in_path);

  const Histogram hist = io::load_histogram_file(args.in_path);
  const ThresholdConfig t{args.t1, args.t2};
  const CategoryCounts c = classify_counts(normalize(hist), t);

  run.write_file("classify_categories.csv", [&](std::ostream& out) {
    io::write_categories_csv(out, hist.label, c);
  });
  run.finish();

  std::cout << "n0: " << fmt6(c.n0) << '\n'
            << "n1: " << fmt6(c.n1) << '\n'
            << "n2: " << fmt6(c.n2) << '\n'
            << "q: " << fmt6(parity_correlation(c)) << '\n'
            << "q_flipped: " << fmt6(flipped_category_correlation(c)) << '\n';
}

// -------------------------------------------------------------- interpret

struct InterpretArgs {
  CommonOpts common;
  std::string in_path;
  std::int64_t t1 = 25;
  std::int64_t t2 = 86;
  double lambda = 0.5;
};

void run_interpret(const InterpretArgs& args) {
  Run run("interpret", args.common);
  run.add_input(args.in_path);

  const FrequencyDist f = normalize(io::load_histogram_file(args.in_path));
  const ThresholdConfig t{args.t1, args.t2};
  const JointDensity rowe = interpret_rowe(f, t);
  const JointDensity other = interpret_other(f, t);
  const JointDensity mixed = blend_interpretations(f, t, args.lambda);

  run.write_file("interpret_rowe.csv", [&](std::ostream& out) {
    io::write_joint_triplets_csv(out, rowe);
  });
  run.write_file("interpret_other.csv", [&](std::ostream& out) {
    io::write_joint_triplets_csv(out, other);
  });
  run.write_file("interpret_blend.csv", [&](std::ostream& out) {
    io::write_joint_triplets_csv(out, mixed);
  });
  run.write_file("interpret_rowe.svg", [&](std::ostream& out) {
    svg::write_heatmap(out, rowe,
                       {"band reading: axes + diagonal", "ion 2 count",
                        "ion 1 count", run.timestamp()});
  });
  run.write_file("interpret_other.svg", [&](std::ostream& out) {
    svg::write_heatmap(out, other,
                       {"band reading: diagonal + axes", "ion 2 count",
                        "ion 1 count", run.timestamp()});
  });
  run.finish();

  std::cout << "r_rowe: " << fmt6(pearson_correlation(rowe)) << '\n'
            << "r_other: " << fmt6(pearson_correlation(other)) << '\n'
            << "r_blend: " << fmt6(pearson_correlation(mixed)) << '\n';
}

// ------------------------------------------------------------------ plot

struct PlotArgs {
  CommonOpts common;
  std::string in_path;
};

std::vector<std::string> read_csv_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(line);
  }
  if (lines.empty()) {
    throw ValidationError("empty CSV input " + path.string());
  }
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double field_as_double(const std::string& field, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("expected a number, got `" + field + "`", line_no);
  }
  return value;
}

void run_plot(const PlotArgs& args) {
  Run run("plot", args.common);
  run.add_input(args.in_path);

  const std::vector<std::string> lines = read_csv_lines(args.in_path);
  const std::string& header = lines.front();
  const std::string stem = fs::path(args.in_path).stem().string();
  const std::string out_name = stem + ".svg";

  const auto rows = [&](std::size_t expect_fields) {
    std::vector<std::vector<double>> out;
    for (std::size_t k = 1; k < lines.size(); ++k) {
      const std::vector<std::string> fields = split_fields(lines[k]);
      if (fields.size() != expect_fields) {
        throw ParseError("expected " + std::to_string(expect_fields) +
                             " fields",
                         k + 1);
      }
      std::vector<double> numbers;
      numbers.reserve(fields.size());
      for (const std::string& field : fields) {
        numbers.push_back(field_as_double(field, k + 1));
      }
      out.push_back(std::move(numbers));
    }
    return out;
  };

  if (header == "count,frequency" || header == "count,probability") {
    std::vector<double> bars;
    for (const auto& row : rows(2)) {
      const auto idx = static_cast<std::size_t>(row[0]);
      if (idx >= bars.size()) bars.resize(idx + 1, 0.0);
      bars[idx] = row[1];
    }
    run.write_file(out_name, [&](std::ostream& out) {
      svg::write_bar_chart(out, bars, {},
                           {stem, "photon count",
                            header == "count,frequency" ? "experiments"
                                                        : "probability",
                            run.timestamp()});
    });
  } else if (header == "i,j,p") {
    std::size_t max_index = 0;
    const auto triplets = rows(3);
    for (const auto& row : triplets) {
      max_index = std::max({max_index, static_cast<std::size_t>(row[0]),
                            static_cast<std::size_t>(row[1])});
    }
    JointDensity P = zero_joint(max_index);
    for (const auto& row : triplets) {
      P.at(static_cast<std::size_t>(row[0]),
           static_cast<std::size_t>(row[1])) = row[2];
    }
    run.write_file(out_name, [&](std::ostream& out) {
      svg::write_heatmap(
          out, P, {stem, "ion 2 count", "ion 1 count", run.timestamp()});
    });
  } else if (header == "generation,best_fitness") {
    std::vector<std::pair<double, double>> points;
    for (const auto& row : rows(2)) {
      points.emplace_back(row[0], row[1]);
    }
    run.write_file(out_name, [&](std::ostream& out) {
      svg::write_line_chart(
          out, points,
          {stem, "generation", "best residual", run.timestamp()});
    });
  } else if (header == "setting,constructor,r") {
    std::vector<std::pair<std::string, double>> bars;
    for (std::size_t k = 1; k < lines.size(); ++k) {
      const std::vector<std::string> fields = split_fields(lines[k]);
      if (fields.size() != 3) {
        throw ParseError("expected 3 fields", k + 1);
      }
      bars.emplace_back(fields[1], field_as_double(fields[2], k + 1));
    }
    run.write_file(out_name, [&](std::ostream& out) {
      svg::write_labeled_bars(
          out, bars, {stem, "Pearson r", "", run.timestamp()});
    });
  } else if (header == "label,n0,n1,n2,q,q_flipped") {
    std::vector<std::pair<std::string, double>> bars;
    for (std::size_t k = 1; k < lines.size(); ++k) {
      const std::vector<std::string> fields = split_fields(lines[k]);
      if (fields.size() != 6) {
        throw ParseError("expected 6 fields", k + 1);
      }
      bars.emplace_back("n0", field_as_double(fields[1], k + 1));
      bars.emplace_back("n1", field_as_double(fields[2], k + 1));
      bars.emplace_back("n2", field_as_double(fields[3], k + 1));
    }
    run.write_file(out_name, [&](std::ostream& out) {
      svg::write_labeled_bars(
          out, bars, {stem, "experiments", "", run.timestamp()});
    });
  } else {
    throw ValidationError("unrecognized CSV header `" + header + "`");
  }
  run.finish();

  std::cout << "wrote " << out_name << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounds on two-emitter joint photon statistics recoverable "
               "from single-detector count histograms"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand(
      "synth", "Simulate a two-emitter photon counting experiment");
  add_common_flags(synth, synth_args.common);
  CLI::Option* preset_opt =
      synth->add_option("--preset", synth_args.preset,
                        "Built-in experiment preset (fig2a or fig2b)")
          ->check(CLI::IsMember({"fig2a", "fig2b"}));
  synth
      ->add_option("--in", synth_args.config_path,
                   "Experiment config JSON (overrides --preset)")
      ->excludes(preset_opt);
  synth->add_option("--mode", synth_args.mode,
                    "Detection mode: single-pmt or two-detector");

  BoundsArgs bounds_args;
  CLI::App* bounds = app.add_subcommand(
      "bounds", "Correlation range consistent with a summed-count histogram");
  add_common_flags(bounds, bounds_args.common);
  bounds->add_option("--in", bounds_args.in_path, "Histogram CSV/JSON")
      ->required();
  bounds
      ->add_option("--seeds", bounds_args.seeds,
                   "Seeds for the random-filling constructor")
      ->delimiter(',');

  DeconvArgs deconv_args;
  CLI::App* deconv = app.add_subcommand(
      "deconvolve", "Factor a histogram into two independent emitters");
  add_common_flags(deconv, deconv_args.common);
  deconv->add_option("--in", deconv_args.in_path, "Histogram CSV/JSON")
      ->required();
  deconv->add_option("--config", deconv_args.config_path,
                     "Search settings JSON");
  deconv->add_option("--metric", deconv_args.metric,
                     "Fitness metric: l1, l2, or kl");

  ClassifyArgs classify_args;
  CLI::App* classify = app.add_subcommand(
      "classify", "Band masses and category correlation for a histogram");
  add_common_flags(classify, classify_args.common);
  classify->add_option("--in", classify_args.in_path, "Histogram CSV/JSON")
      ->required();
  classify->add_option("--t1", classify_args.t1, "Lower band threshold")
      ->default_val(std::int64_t{25});
  classify->add_option("--t2", classify_args.t2, "Upper band threshold")
      ->default_val(std::int64_t{86});

  InterpretArgs interpret_args;
  CLI::App* interpret = app.add_subcommand(
      "interpret", "Joint densities implied by the two band readings");
  add_common_flags(interpret, interpret_args.common);
  interpret->add_option("--in", interpret_args.in_path, "Histogram CSV/JSON")
      ->required();
  interpret->add_option("--t1", interpret_args.t1, "Lower band threshold")
      ->default_val(std::int64_t{25});
  interpret->add_option("--t2", interpret_args.t2, "Upper band threshold")
      ->default_val(std::int64_t{86});
  interpret
      ->add_option("--lambda", interpret_args.lambda,
                   "Blend weight toward the axes+diagonal reading")
      ->default_val(0.5);

  PlotArgs plot_args;
  CLI::App* plot =
      app.add_subcommand("plot", "Render any toolkit CSV artifact as SVG");
  add_common_flags(plot, plot_args.common);
  plot->add_option("--in", plot_args.in_path, "CSV artifact")->required();

  synth->callback([&] {
    synth_args.seed_given = synth->count("--seed") > 0;
    run_synth(synth_args);
  });
  bounds->callback([&] { run_bounds(bounds_args); });
  deconv->callback([&] {
    deconv_args.seed_given = deconv->count("--seed") > 0;
    run_deconvolve(deconv_args);
  });
  classify->callback([&] { run_classify(classify_args); });
  interpret->callback([&] { run_interpret(interpret_args); });
  plot->callback([&] { run_plot(plot_args); });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
}
