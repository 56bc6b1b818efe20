#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "convbound/discriminator.hpp"
#include "convbound/histogram.hpp"
#include "convbound/io.hpp"

#ifndef _WIN32
#include <sys/wait.h>
#endif

extern std::string g_cli_path;

using namespace convbound;

namespace {

namespace fs = std::filesystem;

const std::string& cli() {
  REQUIRE_MESSAGE(!g_cli_path.empty(),
                  "pass the binary path as an argument or set "
                  "CONVBOUND_CLI_PATH");
  return g_cli_path;
}

struct TempDir {
  fs::path path;

  TempDir() {
    static std::atomic<unsigned> counter{0};
    const auto stamp =
        std::chrono::steady_clock::now().time_since_epoch().count();
    path = fs::temp_directory_path() /
           ("convbound-cli-" + std::to_string(stamp) + "-" +
            std::to_string(counter.fetch_add(1)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  fs::path operator/(const std::string& name) const { return path / name; }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int decode_status(int status) {
#ifdef _WIN32
  return status;
#else
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#endif
}

// Runs the binary with the given arguments, stderr captured into the
// directory; an optional env assignment prefixes the command.
int run_cli(const std::string& args, const TempDir& dir,
            std::string* err_text = nullptr, const std::string& env = "") {
  const fs::path err_file = dir / "stderr.txt";
  std::string cmd = env.empty() ? "" : env + " ";
  cmd += "\"" + cli() + "\" " + args + " >/dev/null 2>\"" +
         err_file.string() + "\"";
  const int code = decode_status(std::system(cmd.c_str()));
  if (err_text) *err_text = read_file(err_file);
  return code;
}

std::string help_text(const std::string& sub) {
  TempDir dir;
  const fs::path out = dir / "help.txt";
  const std::string cmd =
      "\"" + cli() + "\" " + sub + " --help >\"" + out.string() + "\" 2>&1";
  REQUIRE(decode_status(std::system(cmd.c_str())) == 0);
  return read_file(out);
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help covers every documented flag and subcommand") {
  const std::string top = help_text("");
  for (const char* sub :
       {"synth", "bounds", "deconvolve", "classify", "interpret", "plot"}) {
    CHECK_MESSAGE(contains(top, sub), "missing subcommand ", sub);
  }

  const struct {
    const char* sub;
    std::vector<const char*> flags;
  } expected[] = {
      {"synth", {"--preset", "--in", "--mode"}},
      {"bounds", {"--in", "--seeds"}},
      {"deconvolve", {"--in", "--config", "--metric"}},
      {"classify", {"--in", "--t1", "--t2"}},
      {"interpret", {"--in", "--t1", "--t2", "--lambda"}},
      {"plot", {"--in"}},
  };
  for (const auto& e : expected) {
    const std::string text = help_text(e.sub);
    for (const char* flag : {"--out-dir", "--seed", "--no-timestamp"}) {
      CHECK_MESSAGE(contains(text, flag), e.sub, " help missing ", flag);
    }
    for (const char* flag : e.flags) {
      CHECK_MESSAGE(contains(text, flag), e.sub, " help missing ", flag);
    }
  }
}

TEST_CASE("unknown flags exit 1") {
  TempDir dir;
  CHECK(run_cli("--definitely-not-a-flag", dir) == 1);
  CHECK(run_cli("classify --in missing.csv --bogus", dir) == 1);
}

TEST_CASE("empty histogram input is a validation error") {
  TempDir dir;
  write_text(dir / "empty.csv", "");
  std::string err;
  const int code = run_cli("deconvolve --in \"" + (dir / "empty.csv").string() +
                               "\" --out-dir \"" + dir.path.string() + "\"",
                           dir, &err);
  CHECK(code == 1);
  CHECK(!err.empty());
}

TEST_CASE("synth runs are byte-identical and manifests list real files") {
  TempDir a;
  TempDir b;
  const std::string args = "synth --preset fig2b --seed 5 --no-timestamp";
  REQUIRE(run_cli(args + " --out-dir \"" + a.path.string() + "\"", a) == 0);
  REQUIRE(run_cli(args + " --out-dir \"" + b.path.string() + "\"", b) == 0);

  for (const char* name :
       {"synth_histogram.csv", "synth_histogram.svg", "synth_manifest.json"}) {
    CHECK_MESSAGE(read_file(a / name) == read_file(b / name),
                  name, " differs between identical runs");
  }

  const nlohmann::json manifest =
      nlohmann::json::parse(read_file(a / "synth_manifest.json"));
  CHECK(manifest["command"] == "synth");
  CHECK(manifest["seed"] == 5);
  CHECK(manifest["tool_version"].is_string());
  REQUIRE(manifest["outputs"].is_array());
  CHECK(!manifest["outputs"].empty());
  for (const auto& out : manifest["outputs"]) {
    const fs::path p = a.path / fs::path(out.get<std::string>()).filename();
    CHECK_MESSAGE(fs::exists(p), "manifest lists missing file ", p.string());
  }
}

TEST_CASE("CONVBOUND_OUT selects the output directory") {
  TempDir dir;
  const fs::path target = dir / "routed";
  REQUIRE(run_cli("synth --preset fig2b", dir, nullptr,
                  "CONVBOUND_OUT=\"" + target.string() + "\"") == 0);
  CHECK(fs::exists(target / "synth_histogram.csv"));
  CHECK(fs::exists(target / "synth_manifest.json"));
}

TEST_CASE("classify output matches the library on the same input") {
  TempDir dir;
  REQUIRE(run_cli("synth --preset fig2a --out-dir \"" + dir.path.string() +
                      "\"",
                  dir) == 0);
  REQUIRE(run_cli("classify --in \"" + (dir / "synth_histogram.csv").string() +
                      "\" --out-dir \"" + dir.path.string() + "\"",
                  dir) == 0);

  const Histogram hist =
      io::load_histogram_file((dir / "synth_histogram.csv").string());
  const CategoryCounts expect =
      classify_counts(normalize(hist), ThresholdConfig{25, 86});

  std::ifstream in(dir / "classify_categories.csv");
  std::string header, line;
  REQUIRE(std::getline(in, header));
  REQUIRE(std::getline(in, line));
  const std::vector<std::string> fields = split_csv_line(line);
  REQUIRE(fields.size() == 6);
  CHECK(std::stod(fields[1]) == doctest::Approx(expect.n0).epsilon(1e-12));
  CHECK(std::stod(fields[2]) == doctest::Approx(expect.n1).epsilon(1e-12));
  CHECK(std::stod(fields[3]) == doctest::Approx(expect.n2).epsilon(1e-12));
  CHECK(std::stod(fields[4]) ==
        doctest::Approx(parity_correlation(expect)).epsilon(1e-12));
  CHECK(std::stod(fields[5]) ==
        doctest::Approx(flipped_category_correlation(expect)).epsilon(1e-12));
}

TEST_CASE("bounds report carries the documented constructor rows") {
  TempDir dir;
  REQUIRE(run_cli("synth --preset fig2b --out-dir \"" + dir.path.string() +
                      "\"",
                  dir) == 0);
  REQUIRE(run_cli("bounds --in \"" + (dir / "synth_histogram.csv").string() +
                      "\" --seeds 1 2 3 --out-dir \"" + dir.path.string() +
                      "\"",
                  dir) == 0);

  const std::string report = read_file(dir / "bounds_report.csv");
  for (const char* row : {",edge,", ",diagonal,", ",uniform,", ",random_1,",
                          ",random_2,", ",random_3,", ",min,", ",max,"}) {
    CHECK_MESSAGE(contains(report, row), "report missing row ", row);
  }
  CHECK(fs::exists(dir / "bounds_report.svg"));
}

TEST_CASE("interpret emits both readings and the blend") {
  TempDir dir;
  REQUIRE(run_cli("synth --preset fig2b --out-dir \"" + dir.path.string() +
                      "\"",
                  dir) == 0);
  REQUIRE(run_cli("interpret --in \"" +
                      (dir / "synth_histogram.csv").string() +
                      "\" --lambda 0.25 --out-dir \"" + dir.path.string() +
                      "\"",
                  dir) == 0);
  for (const char* name : {"interpret_rowe.csv", "interpret_other.csv",
                           "interpret_blend.csv", "interpret_rowe.svg",
                           "interpret_other.svg"}) {
    CHECK_MESSAGE(fs::exists(dir / name), "missing ", name);
  }
}

TEST_CASE("deconvolve artifacts are complete and reproducible") {
  TempDir a;
  TempDir b;
  write_text(a / "tiny.csv", "count,frequency\n0,25\n1,50\n2,25\n");
  write_text(b / "tiny.csv", "count,frequency\n0,25\n1,50\n2,25\n");

  const std::string args = " --seed 3 --no-timestamp";
  REQUIRE(run_cli("deconvolve --in \"" + (a / "tiny.csv").string() +
                      "\" --out-dir \"" + a.path.string() + "\"" + args,
                  a) == 0);
  REQUIRE(run_cli("deconvolve --in \"" + (b / "tiny.csv").string() +
                      "\" --out-dir \"" + b.path.string() + "\"" + args,
                  b) == 0);

  for (const char* name :
       {"deconv_ion1.csv", "deconv_ion2.csv", "deconv_trace.csv",
        "deconv_overlay.svg", "deconv_manifest.json"}) {
    CHECK(fs::exists(a / name));
    CHECK_MESSAGE(read_file(a / name) == read_file(b / name),
                  name, " differs between identical runs");
  }

  // the trace never worsens
  std::ifstream trace(a / "deconv_trace.csv");
  std::string line;
  REQUIRE(std::getline(trace, line));
  double last = std::numeric_limits<double>::infinity();
  while (std::getline(trace, line)) {
    const std::vector<std::string> fields = split_csv_line(line);
    REQUIRE(fields.size() == 2);
    const double fitness = std::stod(fields[1]);
    CHECK(fitness <= last);
    last = fitness;
  }
}

TEST_CASE("plot renders a csv artifact to svg") {
  TempDir dir;
  REQUIRE(run_cli("synth --preset fig2b --out-dir \"" + dir.path.string() +
                      "\"",
                  dir) == 0);
  const fs::path plotted = dir / "plotted";
  REQUIRE(run_cli("plot --in \"" + (dir / "synth_histogram.csv").string() +
                      "\" --out-dir \"" + plotted.string() + "\"",
                  dir) == 0);
  const std::string svg = read_file(plotted / "synth_histogram.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(contains(svg, "</svg>"));
}

}  // TEST_SUITE
