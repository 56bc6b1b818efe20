#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "convbound/bell_stats.hpp"
#include "convbound/deconv.hpp"
#include "convbound/discriminator.hpp"
#include "convbound/histogram.hpp"
#include "convbound/joint_density.hpp"
#include "convbound/synth.hpp"

namespace convbound::io {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

// CSV histogram: `count,frequency` rows, optional header, '#' comments,
// LF or CRLF, gaps zero-filled. Duplicate counts, negative values, and
// empty input all throw (ParseError / ValidationError).
Histogram load_histogram_csv(std::istream& in, const std::string& label = "");

// JSON histogram: object with "bins" array and optional "label".
Histogram load_histogram_json(std::istream& in,
                              const std::string& fallback_label = "");

// Dispatches on extension: ".json" to the JSON loader, anything else CSV.
// The file stem becomes the label unless the file carries its own.
Histogram load_histogram_file(const std::filesystem::path& path);

void write_histogram_csv(std::ostream& out, const Histogram& h);

// `count,probability` rows (per-ion distributions, frequency exports).
void write_frequency_csv(std::ostream& out, const FrequencyDist& f);

// Dense matrix, one CSV row per ion-1 count.
void write_joint_matrix_csv(std::ostream& out, const JointDensity& P);

// Sparse `i,j,p` rows for nonzero cells, row-major order.
void write_joint_triplets_csv(std::ostream& out, const JointDensity& P);

// `setting,constructor,r` rows followed by min/max summary rows.
void write_report_csv(std::ostream& out, const CorrelationReport& report);

// `label,n0,n1,n2,q,q_flipped` single data row.
void write_categories_csv(std::ostream& out, const std::string& label,
                          const CategoryCounts& c);

// `generation,best_fitness` rows.
void write_trace_csv(
    std::ostream& out,
    const std::vector<std::pair<std::size_t, double>>& trace);

// `a,b` rows, one per experiment.
void write_samples_csv(std::ostream& out, const JointSamples& samples);

FitnessMetric parse_metric(const std::string& name);  // "l1" | "l2" | "kl"
DetectionMode parse_mode(const std::string& name);  // "single-pmt" | "two-detector"

// JSON key-value DeconvConfig. Missing keys keep defaults; unknown keys
// throw ConfigError so typos cannot silently run with defaults.
DeconvConfig load_deconv_config(std::istream& in);
DeconvConfig load_deconv_config_file(const std::filesystem::path& path);

// JSON ExperimentConfig, same strictness.
ExperimentConfig load_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config_file(const std::filesystem::path& path);

}  // namespace convbound::io
