#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "blobtrack/blobtrack.hpp"

namespace blobtrack::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// Flag values that are inconsistent with each other; reported like a parse error.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
std::string show(const T& value) {
  std::ostringstream s;
  s << value;
  return s.str();
}

struct ParamFlags {
  std::optional<std::string> file;
  std::optional<double> alpha, beta, min_absden, min_rden;
  std::optional<std::string> pooling;
  std::optional<std::size_t> min_area;
  std::optional<double> min_abs_mden, min_mden, max_abs_mden;
  std::optional<double> max_jump, max_area_change;
  std::optional<std::size_t> min_frames, max_frames;
  std::optional<std::string> area_mode;
  std::optional<int> refine_levels;
};

void add_param_flags(CLI::App& cmd, ParamFlags& f) {
  const Parameters d;
  cmd.add_option("--params", f.file, "Parameter file (JSON); flags below override it")->check(CLI::ExistingFile);
  auto* g = "Parameters";
  cmd.add_option("--alpha", f.alpha, "First outlier pass: multiple of sigma")->default_str(show(d.detection.alpha))->group(g);
  cmd.add_option("--beta", f.beta, "Second outlier pass: multiple of sigma2")->default_str(show(d.detection.beta))->group(g);
  cmd.add_option("--min-absden", f.min_absden, "minAbsden: absolute density floor")
      ->default_str(show(d.detection.min_abs_density))->group(g);
  cmd.add_option("--min-rden", f.min_rden, "minRden: density floor as multiple of mu2")
      ->default_str(show(d.detection.min_rel_density))->group(g);
  cmd.add_option("--pooling", f.pooling, "Statistics over planes")
      ->check(CLI::IsMember({"pooled", "per-plane"}))->default_str(std::string(to_string(d.detection.pooling)))->group(g);
  cmd.add_option("--min-area", f.min_area, "minArea: minimum blob vertex count")
      ->default_str(show(d.blob.min_area))->group(g);
  cmd.add_option("--min-abs-mden", f.min_abs_mden, "minAbsMden: absolute median floor")
      ->default_str(show(d.blob.min_abs_median))->group(g);
  cmd.add_option("--min-mden", f.min_mden, "minMden: median floor as multiple of mu2")
      ->default_str(show(d.blob.min_rel_median))->group(g);
  cmd.add_option("--max-abs-mden", f.max_abs_mden, "maxAbsMden: cap on the relative median floor")
      ->default_str(show(d.blob.max_abs_median))->group(g);
  cmd.add_option("--max-jump", f.max_jump, "maxJump: largest center move between frames")
      ->default_str(show(d.tracking.max_jump))->group(g);
  cmd.add_option("--max-area-change", f.max_area_change, "maxAreaChange: largest area change between frames")
      ->default_str(show(d.tracking.max_area_change))->group(g);
  cmd.add_option("--min-frames", f.min_frames, "minFrames: shortest reported track")
      ->default_str(show(d.tracking.min_frames))->group(g);
  cmd.add_option("--max-frames", f.max_frames, "maxFrames: longest track before it is closed")
      ->default_str(show(d.tracking.max_frames))->group(g);
  cmd.add_option("--area-change-mode", f.area_mode, "Area gate as vertex count or percent")
      ->check(CLI::IsMember({"absolute", "relative"}))->default_str(std::string(to_string(d.tracking.area_mode)))->group(g);
  cmd.add_option("--refine-levels", f.refine_levels, "Midpoint refinement levels (0 = none)")
      ->default_str(show(d.refine_levels))->group(g);
}

Parameters resolve(const ParamFlags& f) {
  try {
    Parameters p = f.file ? load_parameters(*f.file) : Parameters{};
    if (f.alpha) p.detection.alpha = *f.alpha;
    if (f.beta) p.detection.beta = *f.beta;
    if (f.min_absden) p.detection.min_abs_density = *f.min_absden;
    if (f.min_rden) p.detection.min_rel_density = *f.min_rden;
    if (f.pooling) p.detection.pooling = parse_pooling(*f.pooling);
    if (f.min_area) p.blob.min_area = *f.min_area;
    if (f.min_abs_mden) p.blob.min_abs_median = *f.min_abs_mden;
    if (f.min_mden) p.blob.min_rel_median = *f.min_mden;
    if (f.max_abs_mden) p.blob.max_abs_median = *f.max_abs_mden;
    if (f.max_jump) p.tracking.max_jump = *f.max_jump;
    if (f.max_area_change) p.tracking.max_area_change = *f.max_area_change;
    if (f.min_frames) p.tracking.min_frames = *f.min_frames;
    if (f.max_frames) p.tracking.max_frames = *f.max_frames;
    if (f.area_mode) p.tracking.area_mode = parse_area_mode(*f.area_mode);
    if (f.refine_levels) p.refine_levels = *f.refine_levels;
    p.validate();
    return p;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

struct RoiFlags {
  std::optional<double> rmin, rmax, zmin, zmax;
};

void add_roi_flags(CLI::App& cmd, RoiFlags& f) {
  auto* g = "Region of interest (all four or none; default whole mesh)";
  cmd.add_option("--rmin", f.rmin, "Lower R bound")->group(g);
  cmd.add_option("--rmax", f.rmax, "Upper R bound")->group(g);
  cmd.add_option("--zmin", f.zmin, "Lower Z bound")->group(g);
  cmd.add_option("--zmax", f.zmax, "Upper Z bound")->group(g);
}

std::optional<RegionOfInterest> resolve(const RoiFlags& f) {
  const int given = f.rmin.has_value() + f.rmax.has_value() + f.zmin.has_value() + f.zmax.has_value();
  if (given == 0) return std::nullopt;
  if (given != 4) throw UsageError("--rmin, --rmax, --zmin and --zmax must be given together");
  RegionOfInterest roi{*f.rmin, *f.rmax, *f.zmin, *f.zmax};
  try {
    roi.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return roi;
}

struct CommonOptions {
  std::string output_dir = ".";
  std::size_t workers = 1;
  int verbosity = 0;
};

void add_output_dir(CLI::App& cmd, CommonOptions& c) {
  cmd.add_option("--output-dir", c.output_dir, "Directory for output files")
      ->envname("BLOBTRACK_OUTPUT_DIR")
      ->capture_default_str();
}

void add_workers(CLI::App& cmd, CommonOptions& c) {
  cmd.add_option("--workers", c.workers, "Parallel frame workers")
      ->envname("BLOBTRACK_WORKERS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

fs::path ensure_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw InputError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

// ---- detect ---------------------------------------------------------------

struct DetectOptions {
  std::string input;
  std::int64_t t_start = 1;
  std::int64_t t_end = 0;
  std::string prefix;
  bool timing = false;
};

int run_detect(const DetectOptions& o, const CommonOptions& c, const Parameters& params,
               const std::optional<RegionOfInterest>& roi, std::ostream& out, std::ostream& err) {
  const ContainerSource source(o.input);
  RunConfig config;
  config.roi = roi;
  config.t_start = o.t_start;
  config.t_end = o.t_end;
  config.workers = c.workers;
  config.params = params;
  config.log = [&](std::string_view line) { err << line << '\n'; };
  const auto result = run(config, source);

  const auto dir = ensure_dir(c.output_dir);
  const auto files = write_results(result.frames, result.tracks, dir / o.prefix);
  std::size_t blobs = 0;
  std::size_t skipped = 0;
  for (const auto& f : result.frames) {
    blobs += f.blobs.size();
    skipped += f.error.has_value();
  }
  ordered_json summary{{"frames", result.frames.size()},
                       {"skipped", skipped},
                       {"blobs", blobs},
                       {"tracks", result.tracks.size()},
                       {"blob_records", files.blobs.string()},
                       {"track_records", files.tracks.string()},
                       {"centers", files.centers.string()}};
  if (o.timing) {
    const auto path = dir / (o.prefix + "timing.tsv");
    std::ofstream t(path);
    if (!t) throw InputError("cannot write '" + path.string() + "'");
    write_timing_table(t, result.timing);
    summary["timing"] = path.string();
  }
  if (c.verbosity > 0) {
    err << "total " << result.timing.total_seconds << " s, baseline " << result.timing.baseline_seconds << " s\n";
  }
  out << summary.dump() << '\n';
  return kExitOk;
}

// ---- generate -------------------------------------------------------------

struct GenerateOptions {
  SyntheticSpec spec;
  std::string output = "synthetic.fcf";
  std::optional<std::string> truth;
  std::string encoding = "binary";
};

int run_generate(const GenerateOptions& o, const CommonOptions& c, std::ostream& out) {
  const auto data = generate_synthetic(o.spec);
  const auto dir = ensure_dir(c.output_dir);
  fs::path container_path = fs::path(o.output).is_absolute() ? fs::path(o.output) : dir / o.output;
  fs::path truth_path = o.truth ? fs::path(*o.truth) : fs::path(container_path).replace_extension(".truth.json");
  if (!truth_path.is_absolute() && o.truth) truth_path = dir / truth_path;

  auto container = data.container;
  container.header.encoding = o.encoding == "text" ? PayloadEncoding::text : PayloadEncoding::binary;
  write_container(container_path, container);
  std::ofstream t(truth_path);
  if (!t) throw InputError("cannot write '" + truth_path.string() + "'");
  t << to_json(data.truth) << '\n';
  if (!t) throw InputError("failed writing '" + truth_path.string() + "'");

  out << ordered_json{{"container", container_path.string()},
                      {"truth", truth_path.string()},
                      {"vertices", container.mesh.vertex_count()},
                      {"triangles", container.mesh.triangle_count()},
                      {"frames", container.frames.size()}}
             .dump()
      << '\n';
  return kExitOk;
}

// ---- bench ----------------------------------------------------------------

struct BenchOptions {
  std::optional<std::string> input;
  std::string mode = "strong";
  std::vector<std::size_t> worker_list{1, 2, 4, 8};
  std::size_t frames = 0;
  std::string format = "table";
  std::uint64_t seed = 1;
};

int run_bench(const BenchOptions& o, const Parameters& params, const std::optional<RegionOfInterest>& roi,
              std::ostream& out) {
  const ScalingMode mode = o.mode == "weak" ? ScalingMode::weak : ScalingMode::strong;
  const std::size_t frames = o.frames != 0 ? o.frames : (mode == ScalingMode::strong ? 256 : 32);

  std::unique_ptr<FrameSource> source;
  if (o.input) {
    source = std::make_unique<ContainerSource>(*o.input);
  } else {
    SyntheticSpec spec;
    spec.seed = o.seed;
    source = std::make_unique<MemorySource>(generate_synthetic(spec).container);
  }
  RunConfig config;
  config.roi = roi;
  config.params = params;
  const auto rows = benchmark(config, *source, o.worker_list, mode, frames);
  if (o.format == "json") {
    write_scaling_records(out, rows);
  } else {
    write_scaling_table(out, rows);
  }
  return kExitOk;
}

// ---- fitdist --------------------------------------------------------------

struct FitOptionsCli {
  std::string input;
  std::int64_t frame = 2;
  int plane = 0;
  std::string families = "both";
  bool raw = false;
};

ordered_json fit_json(const DistributionFit& f) {
  return {{"family", std::string(to_string(f.family))},
          {"location", f.location},
          {"scale", f.scale},
          {"log_likelihood", f.log_likelihood}};
}

int run_fitdist(const FitOptionsCli& o, const std::optional<RegionOfInterest>& roi, std::ostream& out) {
  const ContainerReader reader(o.input);
  const auto restriction =
      roi ? restrict_to(reader.mesh(), *roi) : Restriction{reader.mesh(), {}, {}};
  auto pick = [&](std::int64_t t) {
    const auto frame = reader.read_frame(t, o.plane);
    return roi ? restrict_field(restriction, frame.values) : frame.values;
  };
  std::vector<double> values = pick(o.frame);
  if (!o.raw) values = normalize(values, pick(1));

  FitOptions options;
  options.extreme_value = o.families != "log-normal";
  options.log_normal = o.families != "extreme-value";
  const auto report = fit_distribution(values, options);
  ordered_json j{{"frame", o.frame},
                 {"plane", o.plane},
                 {"quantity", o.raw ? "density" : "normalized density"},
                 {"samples", report.sample_count},
                 {"best", std::string(to_string(report.best))}};
  if (report.extreme_value) j["extreme_value"] = fit_json(*report.extreme_value);
  if (report.log_normal) j["log_normal"] = fit_json(*report.log_normal);
  out << j.dump() << '\n';
  return kExitOk;
}

std::string version_json() {
  return ordered_json{{"name", "blobtrack"},
                      {"version", std::string(kVersion)},
                      {"container_version", kContainerVersion}}
      .dump();
}

}  // namespace

int parse_and_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Blob-filament detection and tracking on triangular meshes", "blobtrack"};
  app.set_version_flag("--version", version_json(), "Print version information as JSON and exit");
  app.require_subcommand(1);

  CommonOptions common;
  app.add_flag("-v,--verbose", common.verbosity, "More diagnostics on stderr");

  ParamFlags param_flags;
  RoiFlags roi_flags;

  DetectOptions detect;
  auto* detect_cmd = app.add_subcommand("detect", "Detect and track blobs in a frame container");
  detect_cmd->add_option("--input", detect.input, "Frame container")->required()->check(CLI::ExistingFile);
  detect_cmd->add_option("--t-start", detect.t_start, "First time frame (1-based)")->capture_default_str();
  detect_cmd->add_option("--t-end", detect.t_end, "Last time frame (0 = last in file)")->capture_default_str();
  detect_cmd->add_option("--prefix", detect.prefix, "File name prefix for result files");
  detect_cmd->add_flag("--timing", detect.timing, "Also write a per-frame timing table");
  add_output_dir(*detect_cmd, common);
  add_workers(*detect_cmd, common);
  add_roi_flags(*detect_cmd, roi_flags);
  add_param_flags(*detect_cmd, param_flags);

  GenerateOptions gen;
  auto& s = gen.spec;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic container and its ground truth");
  gen_cmd->add_option("--output", gen.output, "Container path (relative to --output-dir)")->capture_default_str();
  gen_cmd->add_option("--truth", gen.truth, "Ground-truth JSON path (default: next to the container)");
  gen_cmd->add_option("--encoding", gen.encoding, "Payload encoding")
      ->check(CLI::IsMember({"binary", "text"}))
      ->capture_default_str();
  gen_cmd->add_option("--seed", s.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--bumps", s.bumps, "Number of bumps")->capture_default_str();
  gen_cmd->add_option("--frames", s.frames, "Time frames, including the bump-free baseline")->capture_default_str();
  gen_cmd->add_option("--planes", s.planes, "Planes per time frame")->capture_default_str();
  gen_cmd->add_option("--drift-r", s.drift_r, "Bump drift in R per frame")->capture_default_str();
  gen_cmd->add_option("--drift-z", s.drift_z, "Bump drift in Z per frame")->capture_default_str();
  gen_cmd->add_option("--noise", s.noise_sigma, "Gaussian noise sigma")->capture_default_str();
  gen_cmd->add_option("--spacing", s.spacing, "Grid spacing")->capture_default_str();
  gen_cmd->add_option("--width", s.width, "Bump width (Gaussian sigma)")->capture_default_str();
  gen_cmd->add_option("--amplitude-min", s.amplitude_min, "Smallest bump amplitude")->capture_default_str();
  gen_cmd->add_option("--amplitude-max", s.amplitude_max, "Largest bump amplitude")->capture_default_str();
  gen_cmd->add_option("--r-min", s.r_min, "Domain lower R")->capture_default_str();
  gen_cmd->add_option("--r-max", s.r_max, "Domain upper R")->capture_default_str();
  gen_cmd->add_option("--z-min", s.z_min, "Domain lower Z")->capture_default_str();
  gen_cmd->add_option("--z-max", s.z_max, "Domain upper Z")->capture_default_str();
  gen_cmd->add_option("--dt", s.dt, "Seconds between frames")->capture_default_str();
  add_output_dir(*gen_cmd, common);

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Strong or weak scaling sweep over worker counts");
  bench_cmd->add_option("--input", bench.input, "Frame container (default: synthetic scenario)")
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--seed", bench.seed, "Seed of the synthetic scenario")->capture_default_str();
  bench_cmd->add_option("--mode", bench.mode, "Scaling mode")
      ->check(CLI::IsMember({"strong", "weak"}))
      ->capture_default_str();
  bench_cmd->add_option("--worker-list", bench.worker_list, "Worker counts to sweep")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--frames", bench.frames, "Total frames (strong) or frames per worker (weak)")
      ->default_str("256 strong, 32 weak");
  bench_cmd->add_option("--format", bench.format, "Output format")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();
  add_roi_flags(*bench_cmd, roi_flags);
  add_param_flags(*bench_cmd, param_flags);

  FitOptionsCli fit;
  auto* fit_cmd = app.add_subcommand("fitdist", "Fit extreme-value and log-normal laws to one frame");
  fit_cmd->add_option("--input", fit.input, "Frame container")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--frame", fit.frame, "Time frame (1-based)")->capture_default_str();
  fit_cmd->add_option("--plane", fit.plane, "Plane index")->capture_default_str();
  fit_cmd->add_option("--families", fit.families, "Families to fit")
      ->check(CLI::IsMember({"both", "extreme-value", "log-normal"}))
      ->capture_default_str();
  fit_cmd->add_flag("--raw", fit.raw, "Fit raw density instead of normalized density");
  add_roi_flags(*fit_cmd, roi_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream diag;
    const int code = app.exit(e, out, diag);
    if (code == 0) return kExitOk;
    std::string line = diag.str();
    line = line.substr(0, line.find('\n'));
    err << "blobtrack: " << line << '\n';
    return kExitUsage;
  }

  try {
    if (detect_cmd->parsed()) {
      if (detect.t_end != 0 && detect.t_start > detect.t_end) throw UsageError("--t-start must not exceed --t-end");
      if (detect.t_start < 1) throw UsageError("--t-start must be >= 1");
      return run_detect(detect, common, resolve(param_flags), resolve(roi_flags), out, err);
    }
    if (gen_cmd->parsed()) {
      try {
        gen.spec.validate();
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      return run_generate(gen, common, out);
    }
    if (bench_cmd->parsed()) return run_bench(bench, resolve(param_flags), resolve(roi_flags), out);
    if (fit_cmd->parsed()) return run_fitdist(fit, resolve(roi_flags), out);
  } catch (const UsageError& e) {
    err << "blobtrack: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "blobtrack: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace blobtrack::cli
