#include "convbound/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_set>

#include <json.hpp>

#include "convbound/errors.hpp"

namespace convbound::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

bool parse_int_field(std::string_view field, std::int64_t& out) {
  field = trim(field);
  if (field.empty()) return false;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

Histogram finish_histogram(std::vector<std::uint64_t> bins,
                           const std::string& label) {
  // canonical form ends at the last nonzero bin
  std::size_t last = 0;
  bool any = false;
  for (std::size_t n = 0; n < bins.size(); ++n) {
    if (bins[n] > 0) {
      last = n;
      any = true;
    }
  }
  if (!any) {
    throw ValidationError("histogram is all zero");
  }
  bins.resize(last + 1);
  Histogram h{std::move(bins), label};
  validate(h);
  return h;
}

nlohmann::json parse_json(std::istream& in) {
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

std::uint64_t require_uint(const nlohmann::json& value, const char* key) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer() && value.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(value.get<std::int64_t>());
  }
  throw ConfigError(std::string(key) + " must be a non-negative integer");
}

double require_number(const nlohmann::json& value, const char* key) {
  if (!value.is_number()) {
    throw ConfigError(std::string(key) + " must be a number");
  }
  return value.get<double>();
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    throw Error("number formatting overflow");
  }
  return std::string(buf, ptr);
}

Histogram load_histogram_csv(std::istream& in, const std::string& label) {
  std::vector<std::uint64_t> bins;
  std::unordered_set<std::int64_t> seen;
  std::string line;
  std::size_t line_no = 0;
  bool saw_data = false;
  bool skipped_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;

    const std::size_t comma = view.find(',');
    if (comma == std::string_view::npos) {
      throw ParseError("expected `count,frequency`", line_no);
    }
    const std::string_view left = view.substr(0, comma);
    const std::string_view right = view.substr(comma + 1);
    if (right.find(',') != std::string_view::npos) {
      throw ParseError("expected exactly two fields", line_no);
    }

    std::int64_t count = 0, freq = 0;
    if (!parse_int_field(left, count) || !parse_int_field(right, freq)) {
      if (!saw_data && !skipped_header) {
        skipped_header = true;  // optional one-line header
        continue;
      }
      throw ParseError("expected integer `count,frequency`", line_no);
    }
    if (count < 0 || freq < 0) {
      throw ValidationError("negative value at line " +
                            std::to_string(line_no));
    }
    if (!seen.insert(count).second) {
      throw ValidationError("duplicate count " + std::to_string(count) +
                            " at line " + std::to_string(line_no));
    }
    const auto idx = static_cast<std::size_t>(count);
    if (idx >= bins.size()) bins.resize(idx + 1, 0);
    bins[idx] = static_cast<std::uint64_t>(freq);
    saw_data = true;
  }
  if (!saw_data) {
    throw ValidationError("empty histogram input");
  }
  return finish_histogram(std::move(bins), label);
}

Histogram load_histogram_json(std::istream& in,
                              const std::string& fallback_label) {
  const nlohmann::json j = parse_json(in);
  if (!j.is_object() || !j.contains("bins") || !j["bins"].is_array()) {
    throw ValidationError("histogram JSON needs a `bins` array");
  }
  std::vector<std::uint64_t> bins;
  bins.reserve(j["bins"].size());
  for (const auto& entry : j["bins"]) {
    if (!entry.is_number_integer() && !entry.is_number_unsigned()) {
      throw ValidationError("histogram bins must be integers");
    }
    const auto v = entry.get<std::int64_t>();
    if (v < 0) {
      throw ValidationError("negative bin value in histogram JSON");
    }
    bins.push_back(static_cast<std::uint64_t>(v));
  }
  if (bins.empty()) {
    throw ValidationError("empty histogram input");
  }
  std::string label = fallback_label;
  if (j.contains("label") && j["label"].is_string()) {
    label = j["label"].get<std::string>();
  }
  return finish_histogram(std::move(bins), label);
}

Histogram load_histogram_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open " + path.string());
  }
  if (path.extension() == ".json") {
    return load_histogram_json(in, path.stem().string());
  }
  return load_histogram_csv(in, path.stem().string());
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "count,frequency\n";
  for (std::size_t n = 0; n < h.bins.size(); ++n) {
    out << n << ',' << h.bins[n] << '\n';
  }
}

void write_frequency_csv(std::ostream& out, const FrequencyDist& f) {
  out << "count,probability\n";
  for (std::size_t n = 0; n < f.probs.size(); ++n) {
    out << n << ',' << format_double(f.probs[n]) << '\n';
  }
}

void write_joint_matrix_csv(std::ostream& out, const JointDensity& P) {
  const std::size_t side = P.side();
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      if (j > 0) out << ',';
      out << format_double(P.at(i, j));
    }
    out << '\n';
  }
}

void write_joint_triplets_csv(std::ostream& out, const JointDensity& P) {
  out << "i,j,p\n";
  const std::size_t side = P.side();
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      const double v = P.at(i, j);
      if (v != 0.0) {
        out << i << ',' << j << ',' << format_double(v) << '\n';
      }
    }
  }
}

void write_report_csv(std::ostream& out, const CorrelationReport& report) {
  out << "setting,constructor,r\n";
  for (const auto& [name, r] : report.per_constructor) {
    out << report.setting.label << ',' << name << ',' << format_double(r)
        << '\n';
  }
  out << report.setting.label << ",min," << format_double(report.min_r)
      << '\n';
  out << report.setting.label << ",max," << format_double(report.max_r)
      << '\n';
}

void write_categories_csv(std::ostream& out, const std::string& label,
                          const CategoryCounts& c) {
  out << "label,n0,n1,n2,q,q_flipped\n";
  out << label << ',' << format_double(c.n0) << ',' << format_double(c.n1)
      << ',' << format_double(c.n2) << ','
      << format_double(parity_correlation(c)) << ','
      << format_double(flipped_category_correlation(c)) << '\n';
}

void write_trace_csv(
    std::ostream& out,
    const std::vector<std::pair<std::size_t, double>>& trace) {
  out << "generation,best_fitness\n";
  for (const auto& [gen, fitness] : trace) {
    out << gen << ',' << format_double(fitness) << '\n';
  }
}

void write_samples_csv(std::ostream& out, const JointSamples& samples) {
  out << "a,b\n";
  for (const auto& [a, b] : samples.pairs) {
    out << a << ',' << b << '\n';
  }
}

FitnessMetric parse_metric(const std::string& name) {
  if (name == "l1" || name == "L1") return FitnessMetric::L1;
  if (name == "l2" || name == "L2") return FitnessMetric::L2;
  if (name == "kl" || name == "KL") return FitnessMetric::KL;
  throw ConfigError("unknown metric `" + name + "` (expected l1, l2, or kl)");
}

DetectionMode parse_mode(const std::string& name) {
  if (name == "single-pmt" || name == "single_pmt") {
    return DetectionMode::single_pmt;
  }
  if (name == "two-detector" || name == "two_detector") {
    return DetectionMode::two_detector;
  }
  throw ConfigError("unknown mode `" + name +
                    "` (expected single-pmt or two-detector)");
}

DeconvConfig load_deconv_config(std::istream& in) {
  const nlohmann::json j = parse_json(in);
  if (!j.is_object()) {
    throw ConfigError("deconvolution config must be a JSON object");
  }
  DeconvConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "population_size") {
      cfg.population_size = require_uint(value, key.c_str());
    } else if (key == "generations") {
      cfg.generations = require_uint(value, key.c_str());
    } else if (key == "mutation_scale") {
      cfg.mutation_scale = require_number(value, key.c_str());
    } else if (key == "crossover_rate") {
      cfg.crossover_rate = require_number(value, key.c_str());
    } else if (key == "seed") {
      cfg.seed = require_uint(value, key.c_str());
    } else if (key == "fitness_metric") {
      if (!value.is_string()) {
        throw ConfigError("fitness_metric must be a string");
      }
      cfg.fitness_metric = parse_metric(value.get<std::string>());
    } else if (key == "target_residual") {
      cfg.target_residual = require_number(value, key.c_str());
    } else if (key == "stall_window") {
      cfg.stall_window = require_uint(value, key.c_str());
    } else if (key == "polish_steps") {
      cfg.polish_steps = require_uint(value, key.c_str());
    } else if (key == "threads") {
      cfg.threads = static_cast<unsigned>(require_uint(value, key.c_str()));
    } else {
      throw ConfigError("unknown deconvolution config key `" + key + "`");
    }
  }
  validate(cfg);
  return cfg;
}

DeconvConfig load_deconv_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open " + path.string());
  }
  return load_deconv_config(in);
}

ExperimentConfig load_experiment_config(std::istream& in) {
  const nlohmann::json j = parse_json(in);
  if (!j.is_object()) {
    throw ConfigError("experiment config must be a JSON object");
  }
  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "n_experiments") {
      cfg.n_experiments = require_uint(value, key.c_str());
    } else if (key == "lambda_dark") {
      cfg.lambda_dark = require_number(value, key.c_str());
    } else if (key == "lambda_bright") {
      cfg.lambda_bright = require_number(value, key.c_str());
    } else if (key == "class_weights") {
      if (!value.is_array() || value.size() != 3) {
        throw ConfigError("class_weights must be an array of 3 numbers");
      }
      for (std::size_t k = 0; k < 3; ++k) {
        cfg.class_weights[k] = require_number(value[k], "class_weights");
      }
    } else if (key == "seed") {
      cfg.seed = require_uint(value, key.c_str());
    } else if (key == "mode") {
      if (!value.is_string()) {
        throw ConfigError("mode must be a string");
      }
      cfg.mode = parse_mode(value.get<std::string>());
    } else {
      throw ConfigError("unknown experiment config key `" + key + "`");
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_experiment_config_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open " + path.string());
  }
  return load_experiment_config(in);
}

}  // namespace convbound::io
