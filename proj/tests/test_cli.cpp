#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "support/temp_dir.hpp"

using blobtrack::testing::TempDir;
namespace cli = blobtrack::cli;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "blobtrack");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::parse_and_run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("cli: version is JSON") {
  const auto r = call({"--version"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["name"] == "blobtrack");
  CHECK(j["version"] == "0.1.0");
}

TEST_CASE("cli: help lists every parameter flag with its default") {
  const auto r = call({"detect", "--help"});
  CHECK(r.code == 0);
  for (const char* expected :
       {"--alpha", "--beta", "--min-absden", "--min-rden", "--min-area", "--min-abs-mden", "--min-mden",
        "--max-abs-mden", "--max-jump", "--max-area-change", "--min-frames", "--max-frames", "--workers",
        "--params", "--rmin", "--t-start", "2.05", "1.2", "2.15", "1.3", "2.75", "0.04", "25", "100"}) {
    CHECK_MESSAGE(r.out.find(expected) != std::string::npos, expected);
  }
}

TEST_CASE("cli: usage errors exit 2") {
  CHECK(call({}).code == cli::kExitUsage);
  CHECK(call({"detect"}).code == cli::kExitUsage);
  CHECK(call({"detect", "--input", "/nonexistent/file.fcf"}).code == cli::kExitUsage);
  CHECK(call({"frobnicate"}).code == cli::kExitUsage);
  CHECK(call({"generate", "--no-such-flag"}).code == cli::kExitUsage);
  const auto r = call({"generate", "--width", "0.001"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find('\n') == r.err.size() - 1);
}

TEST_CASE("cli: generate, detect and fitdist") {
  const TempDir dir;
  const std::string out_dir = dir.path().string();
  auto gen = [&](const std::string& name) {
    return call({"generate", "--seed", "7", "--bumps", "3", "--frames", "64", "--output-dir", out_dir, "--output",
                 name});
  };
  REQUIRE(gen("a.fcf").code == 0);
  REQUIRE(gen("b.fcf").code == 0);
  CHECK(slurp(dir / "a.fcf") == slurp(dir / "b.fcf"));
  CHECK(slurp(dir / "a.truth.json") == slurp(dir / "b.truth.json"));

  const auto input = (dir / "a.fcf").string();
  auto r = call({"detect", "--input", input, "--rmin", "1.6", "--rmax", "2.4", "--zmin", "-0.9", "--zmax", "0.9",
                 "--t-start", "1", "--t-end", "64", "--output-dir", out_dir, "--prefix", "run-", "--workers", "2"});
  REQUIRE(r.code == 0);
  const auto summary = nlohmann::json::parse(r.out);
  CHECK(summary["frames"] == 64);
  CHECK(summary["tracks"] == 3);
  CHECK(std::filesystem::exists(dir / "run-blobs.jsonl"));
  CHECK(std::filesystem::exists(dir / "run-tracks.jsonl"));
  CHECK(std::filesystem::exists(dir / "run-centers.csv"));

  // A stricter jump gate from the command line splits every track.
  r = call({"detect", "--input", input, "--output-dir", out_dir, "--max-jump", "0.001"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["tracks"] == 0);

  CHECK(call({"detect", "--input", input, "--rmin", "1.6"}).code == cli::kExitUsage);
  CHECK(call({"detect", "--input", input, "--t-start", "9", "--t-end", "3"}).code == cli::kExitUsage);
  CHECK(call({"detect", "--input", input, "--min-area", "2"}).code == cli::kExitUsage);
  r = call({"detect", "--input", input, "--t-end", "65", "--output-dir", out_dir});
  CHECK(r.code == cli::kExitRuntime);
  CHECK(r.err.find("65") != std::string::npos);

  r = call({"fitdist", "--input", input, "--frame", "10"});
  REQUIRE(r.code == 0);
  const auto fit = nlohmann::json::parse(r.out);
  CHECK(fit.contains("extreme_value"));
  CHECK(fit.contains("log_normal"));
}

TEST_CASE("cli: parameter file with flag override") {
  const TempDir dir;
  const auto params = dir / "p.json";
  {
    std::ofstream out(params);
    out << R"({"tracking": {"minFrames": 200, "maxFrames": 300}})";
  }
  REQUIRE(call({"generate", "--frames", "12", "--z-min", "-0.5", "--z-max", "0.5", "--drift-z", "0.01", "--amplitude-min", "3",
                "--output-dir", dir.path().string()})
              .code == 0);
  const auto input = (dir / "synthetic.fcf").string();
  auto r = call({"detect", "--input", input, "--params", params.string(), "--output-dir", dir.path().string()});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["tracks"] == 0);
  r = call({"detect", "--input", input, "--params", params.string(), "--min-frames", "3", "--output-dir",
            dir.path().string()});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["tracks"] == 3);
}

TEST_CASE("cli: environment overrides") {
  const TempDir dir;
  ::setenv("BLOBTRACK_OUTPUT_DIR", dir.path().string().c_str(), 1);
  ::setenv("BLOBTRACK_WORKERS", "3", 1);
  const auto r = call({"generate", "--frames", "6", "--z-min", "-0.5", "--z-max", "0.5", "--drift-z", "0.01"});
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(dir / "synthetic.fcf"));
  const auto d = call({"detect", "--input", (dir / "synthetic.fcf").string()});
  CHECK(d.code == 0);
  ::unsetenv("BLOBTRACK_OUTPUT_DIR");
  ::unsetenv("BLOBTRACK_WORKERS");
  CHECK(std::filesystem::exists(dir / "blobs.jsonl"));
}

TEST_CASE("cli: bench prints a scaling table") {
  const TempDir dir;
  REQUIRE(call({"generate", "--frames", "6", "--spacing", "0.02", "--z-min", "-0.5", "--z-max", "0.5", "--drift-z",
                "0.01", "--output-dir", dir.path().string()})
              .code == 0);
  const auto r = call({"bench", "--input", (dir / "synthetic.fcf").string(), "--worker-list", "1,2", "--frames", "4"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("workers\tframes\tseconds", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);
  const auto w = call({"bench", "--input", (dir / "synthetic.fcf").string(), "--mode", "weak", "--worker-list", "2",
                       "--frames", "2", "--format", "json"});
  REQUIRE(w.code == 0);
  CHECK(std::count(w.out.begin(), w.out.end(), '\n') == 2);
}
