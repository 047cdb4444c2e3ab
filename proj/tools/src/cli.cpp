// Copyright 2026 The ive Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ive_cli/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ive/errors.hpp"
#include "ive/evaluation.hpp"
#include "ive/extraction.hpp"
#include "ive/scenario.hpp"
#include "ive/stft.hpp"
#include "ive/wav.hpp"

#ifndef IVE_VERSION
#define IVE_VERSION "0.0.0"
#endif

namespace ive::cli {
namespace {

using Json = nlohmann::json;
namespace fs = std::filesystem;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct SynthArgs {
  int sources = 1;
  int mics = 4;
  int noises = 1;
  double snr_db = 0.0;
  double duration = 10.0;
  int sample_rate = 16000;
  std::string mixing = "inst";
  std::uint64_t seed = 0;
  int fir_taps = 8;
  double max_condition = 100.0;
  int frame = 4096;
  int hop = 1024;
  std::string out;
};

struct ExtractArgs {
  std::string input;
  std::string algo = "ive-ip2-new";
  int sources = 1;
  int iters = 50;
  double beta = 0.1;
  int frame = 4096;
  int hop = 1024;
  int power_iters = linalg::kPowerIterations;
  double power_tol = linalg::kPowerTolerance;
  bool exact_eig = false;
  double trace_loading = 1e-3;
  double phi_clip = 1e5;
  double stop_tol = 0.0;
  int stop_window = 3;
  bool iva_gaussian_noise = false;
  std::string steering;
  int known = 0;
  int threads = 1;
  std::uint64_t seed = 0;
  std::string out;
  std::string from_manifest;
};

struct EvalArgs {
  std::string est;
  std::string ref;
  std::string out;
  std::uint64_t seed = 0;
};

struct BenchArgs {
  std::string scenario;
  std::vector<std::string> algos{"ive-ip1", "ive-ip2-old", "ive-ip2-new"};
  int iters = 50;
  double beta = 0.1;
  int power_iters = linalg::kPowerIterations;
  bool exact_eig = false;
  double trace_loading = 1e-3;
  double phi_clip = 1e5;
  int known = 1;
  int threads = 1;
  std::uint64_t seed = 0;
  std::string out;
};

// Doubles go through JSON as numbers, except +-inf which JSON cannot hold.
Json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

double read_number(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw UsageError("bad number '" + s + "' in manifest");
  }
  return j.get<double>();
}

Json to_json(const SynthArgs& a) {
  return {{"sources", a.sources},   {"mics", a.mics},
          {"noises", a.noises},     {"snr_db", number(a.snr_db)},
          {"duration", a.duration}, {"sample_rate", a.sample_rate},
          {"mixing", a.mixing},     {"seed", a.seed},
          {"fir_taps", a.fir_taps}, {"max_condition", a.max_condition},
          {"frame", a.frame},       {"hop", a.hop},
          {"out", a.out}};
}

Json to_json(const ExtractArgs& a) {
  return {{"input", a.input},
          {"algo", a.algo},
          {"sources", a.sources},
          {"iters", a.iters},
          {"beta", a.beta},
          {"frame", a.frame},
          {"hop", a.hop},
          {"power_iters", a.power_iters},
          {"power_tol", a.power_tol},
          {"exact_eig", a.exact_eig},
          {"trace_loading", a.trace_loading},
          {"phi_clip", a.phi_clip},
          {"stop_tol", a.stop_tol},
          {"stop_window", a.stop_window},
          {"iva_gaussian_noise", a.iva_gaussian_noise},
          {"steering", a.steering},
          {"known", a.known},
          {"threads", a.threads},
          {"seed", a.seed},
          {"out", a.out}};
}

ExtractArgs extract_from_json(const Json& j) {
  ExtractArgs a;
  try {
    a.input = j.at("input").get<std::string>();
    a.algo = j.at("algo").get<std::string>();
    a.sources = j.at("sources").get<int>();
    a.iters = j.at("iters").get<int>();
    a.beta = read_number(j.at("beta"));
    a.frame = j.at("frame").get<int>();
    a.hop = j.at("hop").get<int>();
    a.power_iters = j.at("power_iters").get<int>();
    a.power_tol = read_number(j.at("power_tol"));
    a.exact_eig = j.at("exact_eig").get<bool>();
    a.trace_loading = read_number(j.at("trace_loading"));
    a.phi_clip = read_number(j.at("phi_clip"));
    a.stop_tol = read_number(j.at("stop_tol"));
    a.stop_window = j.at("stop_window").get<int>();
    a.iva_gaussian_noise = j.at("iva_gaussian_noise").get<bool>();
    a.steering = j.at("steering").get<std::string>();
    a.known = j.at("known").get<int>();
    a.threads = j.at("threads").get<int>();
    a.seed = j.at("seed").get<std::uint64_t>();
    a.out = j.at("out").get<std::string>();
  } catch (const Json::exception& e) {
    throw UsageError(std::string("malformed manifest config: ") + e.what());
  }
  return a;
}

Json to_json(const EvalArgs& a) {
  return {{"est", a.est}, {"ref", a.ref}, {"out", a.out}, {"seed", a.seed}};
}

Json to_json(const BenchArgs& a) {
  return {{"scenario", a.scenario},
          {"algos", a.algos},
          {"iters", a.iters},
          {"beta", a.beta},
          {"power_iters", a.power_iters},
          {"exact_eig", a.exact_eig},
          {"trace_loading", a.trace_loading},
          {"phi_clip", a.phi_clip},
          {"known", a.known},
          {"threads", a.threads},
          {"seed", a.seed},
          {"out", a.out}};
}

Json file_entry(const fs::path& path) {
  return {{"path", path.string()}, {"sha256", sha256_file(path.string())}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  os << text;
  if (!os) throw Error("write failed for '" + path.string() + "'");
}

// Output paths are stored relative to the output directory so two runs into
// different directories produce identical manifests apart from the echo.
void write_manifest(const fs::path& dir, const std::string& command, const Json& config,
                    std::uint64_t seed, const std::vector<fs::path>& inputs,
                    const std::vector<std::string>& outputs) {
  Json j;
  j["command"] = command;
  j["tool_version"] = version();
  j["seed"] = seed;
  j["config"] = config;
  j["inputs"] = Json::array();
  for (const auto& p : inputs) j["inputs"].push_back(file_entry(p));
  j["outputs"] = Json::array();
  for (const auto& name : outputs) {
    Json e = file_entry(dir / name);
    e["path"] = name;
    j["outputs"].push_back(e);
  }
  write_text(dir / "manifest.json", j.dump(1) + "\n");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create directory '" + dir.string() + "'");
}

std::vector<std::string> list_files(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

// <prefix>_<n>.wav sorted by n. Returns an empty list when n is not 1..N.
std::vector<fs::path> numbered_wavs(const fs::path& dir, const std::string& prefix) {
  const std::regex pattern(prefix + "_([0-9]+)\\.wav");
  std::map<int, fs::path> found;
  for (const auto& name : list_files(dir)) {
    std::smatch m;
    if (std::regex_match(name, m, pattern)) found[std::stoi(m[1].str())] = dir / name;
  }
  std::vector<fs::path> out;
  int expect = 1;
  for (const auto& [n, p] : found) {
    if (n != expect++) {
      throw UsageError("'" + dir.string() + "': " + prefix + "_<i>.wav files are not numbered 1..N");
    }
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  ScenarioConfig cfg;
  cfg.sources = a.sources;
  cfg.mics = a.mics;
  cfg.noises = a.noises;
  cfg.snr_db = a.snr_db;
  cfg.duration = a.duration;
  cfg.sample_rate = a.sample_rate;
  cfg.mixing = parse_mixing(a.mixing);
  cfg.seed = a.seed;
  cfg.fir_taps = a.fir_taps;
  cfg.max_condition = a.max_condition;
  cfg.validate();
  StftConfig stft;
  stft.frame_len = a.frame;
  stft.hop = a.hop;
  stft.validate();

  const Scenario scenario = make_scenario(cfg);
  const fs::path dir(a.out);
  ensure_dir(dir);
  save_scenario(dir.string(), scenario, stft);

  std::vector<std::string> outputs{"mixture.wav", "scenario.json", "steering.json"};
  for (int i = 1; i <= cfg.sources; ++i) outputs.push_back("image_" + std::to_string(i) + ".wav");
  write_manifest(dir, "synth", to_json(a), a.seed, {}, outputs);
  out << "wrote scenario to " << dir.string() << " (" << scenario.mixture.num_samples()
      << " samples, " << cfg.mics << " channels)\n";
  return kExitOk;
}

ExtractionConfig extraction_config(const ExtractArgs& a) {
  ExtractionConfig c;
  c.variant = parse_variant(a.algo);
  c.num_sources = a.sources;
  c.iterations = a.iters;
  c.beta = a.beta;
  c.power_iters = a.power_iters;
  c.power_tol = a.power_tol;
  c.exact_eigensolver = a.exact_eig;
  c.trace_loading = a.trace_loading;
  c.phi_clip = a.phi_clip;
  c.stop_tol = a.stop_tol;
  c.stop_window = a.stop_window;
  c.iva_gaussian_noise = a.iva_gaussian_noise;
  c.threads = a.threads;
  c.validate();
  return c;
}

void write_trajectory(const fs::path& path, const TrajectoryLog& log) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "iteration,surrogate,nll,wall_seconds,stationarity\n";
  for (const auto& r : log.records) {
    os << r.iteration << ',' << r.surrogate << ',' << r.nll << ',' << r.wall_seconds << ','
       << r.stationarity << '\n';
  }
  write_text(path, os.str());
}

int cmd_extract(ExtractArgs a, bool out_given, std::ostream& out) {
  std::vector<fs::path> inputs;
  if (!a.from_manifest.empty()) {
    std::ifstream is(a.from_manifest);
    if (!is) throw UsageError("cannot open manifest '" + a.from_manifest + "'");
    Json m;
    try {
      m = Json::parse(is);
    } catch (const Json::exception& e) {
      throw UsageError(std::string("malformed manifest: ") + e.what());
    }
    if (m.value("command", std::string()) != "extract") {
      throw UsageError("manifest was not written by extract");
    }
    const std::string override_out = a.out;
    a = extract_from_json(m.at("config"));
    if (out_given) a.out = override_out;
    for (const auto& e : m.at("inputs")) {
      const auto path = e.at("path").get<std::string>();
      if (sha256_file(path) != e.at("sha256").get<std::string>()) {
        throw ConfigMismatch("input '" + path + "' changed since the manifest was written");
      }
    }
  }
  if (a.input.empty()) throw UsageError("--input is required");
  if (a.out.empty()) throw UsageError("--out is required");

  const Variant variant = parse_variant(a.algo);
  const bool semi = variant == Variant::kSemiIve;
  if (semi && a.steering.empty()) throw UsageError("semi-ive requires --steering");
  if (!semi && !a.steering.empty()) throw UsageError("--steering only applies to semi-ive");
  const ExtractionConfig cfg = extraction_config(a);

  StftConfig stft;
  stft.frame_len = a.frame;
  stft.hop = a.hop;
  stft.validate();

  inputs.push_back(a.input);
  const Waveform mixture = read_wav(a.input);
  if (a.sources >= mixture.num_channels()) throw UsageError("K < M required");
  const Spectrogram x = analyze(mixture, stft);

  SteeringSet steering;
  if (semi) {
    inputs.push_back(a.steering);
    steering = load_steering(a.steering);
    const int known = a.known == 0 ? std::min(steering.known(), a.sources) : a.known;
    if (known < 1 || known > a.sources) throw UsageError("--known must satisfy 1 <= L <= K");
    if (known > steering.known()) {
      throw UsageError("steering file holds " + std::to_string(steering.known()) +
                       " vectors, --known asks for " + std::to_string(known));
    }
    if (steering.num_freqs() != x.num_freqs() ||
        steering.a.front().rows() != x.num_channels()) {
      throw DimensionMismatch("steering file does not match the mixture's STFT shape");
    }
    steering = steering.leading(known);
    a.known = known;
  }

  const ExtractionResult res = run_extraction(x, cfg, semi ? &steering : nullptr);

  const fs::path dir(a.out);
  ensure_dir(dir);
  std::vector<std::string> outputs;
  for (std::size_t i = 0; i < res.images.size(); ++i) {
    const std::string name = "est_" + std::to_string(i + 1) + ".wav";
    write_wav((dir / name).string(),
              synthesize(res.images[i], stft, mixture.sample_rate, mixture.num_samples()));
    outputs.push_back(name);
  }
  write_trajectory(dir / "trajectory.csv", res.log);
  outputs.push_back("trajectory.csv");
  write_manifest(dir, "extract", to_json(a), a.seed, inputs, outputs);

  out << a.algo << ": " << res.log.records.size() << " iterations";
  if (!res.log.records.empty()) {
    out << ", final nll " << std::setprecision(10) << res.log.records.back().nll;
  }
  out << ", wrote " << res.images.size() << " estimates to " << dir.string() << '\n';
  return kExitOk;
}

Json report_json(const SdrReport& r) {
  return {{"sdr", r.sdr}, {"mean", r.mean}, {"assignment", r.assignment}};
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const fs::path est_dir(a.est), ref_dir(a.ref);
  const auto est_paths = numbered_wavs(est_dir, "est");
  auto ref_paths = numbered_wavs(ref_dir, "image");
  if (ref_paths.empty()) ref_paths = numbered_wavs(ref_dir, "est");
  if (est_paths.empty()) throw UsageError("no est_<i>.wav files in '" + a.est + "'");
  if (ref_paths.empty()) throw UsageError("no image_<i>.wav files in '" + a.ref + "'");
  if (est_paths.size() < ref_paths.size()) {
    throw DimensionMismatch("fewer estimates than references");
  }

  std::vector<Waveform> est, ref;
  for (const auto& p : est_paths) est.push_back(read_wav(p.string()));
  for (const auto& p : ref_paths) ref.push_back(read_wav(p.string()));
  for (const auto& e : est) {
    if (e.num_channels() != ref.front().num_channels() ||
        e.num_samples() != ref.front().num_samples()) {
      throw DimensionMismatch("estimate and reference shapes differ");
    }
  }
  const SdrReport report = match_and_score(est, ref);
  const std::string text = report_json(report).dump(1) + "\n";
  out << text;

  if (!a.out.empty()) {
    const fs::path dir(a.out);
    ensure_dir(dir);
    write_text(dir / "sdr.json", text);
    std::vector<fs::path> inputs(est_paths);
    inputs.insert(inputs.end(), ref_paths.begin(), ref_paths.end());
    write_manifest(dir, "eval", to_json(a), a.seed, inputs, {"sdr.json"});
  }
  return kExitOk;
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  const LoadedScenario sc = load_scenario(a.scenario);
  const Spectrogram x = analyze(sc.mixture, sc.stft);
  std::vector<Spectrogram> refs;
  for (const auto& img : sc.images) {
    if (img.num_channels() != sc.mixture.num_channels() ||
        img.num_samples() != sc.mixture.num_samples()) {
      throw DimensionMismatch("image and mixture shapes differ");
    }
    refs.push_back(analyze(img, sc.stft));
  }

  std::vector<ExtractionConfig> configs;
  bool any_semi = false;
  for (const auto& name : a.algos) {
    ExtractionConfig c;
    c.variant = parse_variant(name);
    c.num_sources = sc.config.sources;
    c.iterations = a.iters;
    c.beta = a.beta;
    c.power_iters = a.power_iters;
    c.exact_eigensolver = a.exact_eig;
    c.trace_loading = a.trace_loading;
    c.phi_clip = a.phi_clip;
    c.threads = a.threads;
    c.validate();
    any_semi = any_semi || c.variant == Variant::kSemiIve;
    configs.push_back(c);
  }
  if (configs.empty()) throw UsageError("--algos is empty");

  const fs::path scenario_dir(a.scenario);
  std::vector<fs::path> inputs{scenario_dir / "mixture.wav"};
  for (int i = 1; i <= sc.config.sources; ++i) {
    inputs.push_back(scenario_dir / ("image_" + std::to_string(i) + ".wav"));
  }
  SteeringSet steering;
  if (any_semi) {
    if (a.known < 1 || a.known > sc.config.sources) {
      throw UsageError("--known must satisfy 1 <= L <= K");
    }
    inputs.push_back(scenario_dir / "steering.json");
    steering = load_steering((scenario_dir / "steering.json").string());
    if (steering.known() < a.known) throw UsageError("steering.json holds too few vectors");
    steering = steering.leading(a.known);
  }

  const auto scorer = [&](const std::vector<Spectrogram>& images) {
    return match_and_score(images, refs);
  };
  const BenchResult result =
      bench_run(x, configs, scorer, sc.mixture.duration(), any_semi ? &steering : nullptr);

  const fs::path dir(a.out);
  ensure_dir(dir);
  std::ostringstream csv;
  write_bench_csv(csv, result);
  write_text(dir / "bench.csv", csv.str());
  write_text(dir / "summary.json", bench_summary_json(result) + "\n");
  write_manifest(dir, "bench", to_json(a), a.seed, inputs, {"bench.csv", "summary.json"});

  out << std::fixed << std::setprecision(3);
  for (const auto& s : result.summaries) {
    out << s.variant << ": " << s.iterations << " iterations, " << s.total_seconds << " s, rtf "
        << s.rtf << ", final sdr " << s.final_sdr_mean << " dB\n";
  }
  return kExitOk;
}

}  // namespace

std::string version() { return IVE_VERSION; }

std::string sha256_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path + "' for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest init failed");
  }
  std::array<char, 1 << 16> buf{};
  while (is) {
    is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (is.gcount() > 0 &&
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(is.gcount())) != 1) {
      throw Error("sha256: digest update failed");
    }
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) throw Error("sha256: digest failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return hex.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Independent vector extraction toolkit", "ive"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic scenario directory");
  s->add_option("--sources", synth.sources, "Target sources K")->capture_default_str();
  s->add_option("--mics", synth.mics, "Microphones M")->capture_default_str();
  s->add_option("--noises", synth.noises, "Noise sources J")->capture_default_str();
  s->add_option("--snr-db", synth.snr_db, "Target-to-noise ratio (inf for none)")
      ->capture_default_str();
  s->add_option("--duration", synth.duration, "Seconds")->capture_default_str();
  s->add_option("--sample-rate", synth.sample_rate)->capture_default_str();
  s->add_option("--mixing", synth.mixing)
      ->check(CLI::IsMember({"inst", "fir", "identity"}))
      ->capture_default_str();
  s->add_option("--fir-taps", synth.fir_taps)->capture_default_str();
  s->add_option("--max-condition", synth.max_condition)->capture_default_str();
  s->add_option("--frame", synth.frame, "STFT frame for steering.json")->capture_default_str();
  s->add_option("--hop", synth.hop)->capture_default_str();
  s->add_option("--seed", synth.seed)->capture_default_str();
  s->add_option("--out", synth.out, "Output directory")->required();

  ExtractArgs ext;
  auto* e = app.add_subcommand("extract", "Extract target sources from a mixture");
  e->add_option("--input", ext.input, "Multichannel mixture WAV")->check(CLI::ExistingFile);
  e->add_option("--algo", ext.algo)
      ->check(CLI::IsMember({"iva-ip1", "ive-ip1", "ive-ip2-old", "ive-ip2-new", "semi-ive"}))
      ->capture_default_str();
  e->add_option("--sources", ext.sources, "Target sources K")->capture_default_str();
  e->add_option("--iters", ext.iters)->capture_default_str();
  e->add_option("--beta", ext.beta, "Generalized Gaussian shape")->capture_default_str();
  e->add_option("--frame", ext.frame)->capture_default_str();
  e->add_option("--hop", ext.hop)->capture_default_str();
  e->add_option("--power-iters", ext.power_iters)->capture_default_str();
  e->add_option("--power-tol", ext.power_tol)->capture_default_str();
  e->add_flag("--exact-eig", ext.exact_eig, "Full generalized eigensolver");
  e->add_option("--trace-loading", ext.trace_loading)->capture_default_str();
  e->add_option("--phi-clip", ext.phi_clip)->capture_default_str();
  e->add_option("--stop-tol", ext.stop_tol)->capture_default_str();
  e->add_option("--stop-window", ext.stop_window)->capture_default_str();
  e->add_flag("--iva-gaussian-noise", ext.iva_gaussian_noise,
              "iva-ip1: Gaussian model for the last M - K outputs");
  e->add_option("--steering", ext.steering, "steering.json (semi-ive)")
      ->check(CLI::ExistingFile);
  e->add_option("--known", ext.known, "Known sources L (default: all in the file, up to K)");
  e->add_option("--threads", ext.threads)->capture_default_str();
  e->add_option("--seed", ext.seed)->capture_default_str();
  auto* ext_out = e->add_option("--out", ext.out, "Output directory");
  e->add_option("--from-manifest", ext.from_manifest, "Re-run from a manifest.json")
      ->check(CLI::ExistingFile);

  EvalArgs ev;
  auto* v = app.add_subcommand("eval", "Score estimates against reference images");
  v->add_option("--est", ev.est, "Directory with est_<i>.wav")
      ->required()
      ->check(CLI::ExistingDirectory);
  v->add_option("--ref", ev.ref, "Directory with image_<i>.wav")
      ->required()
      ->check(CLI::ExistingDirectory);
  v->add_option("--out", ev.out, "Directory for sdr.json and manifest.json");
  v->add_option("--seed", ev.seed)->capture_default_str();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Compare variants on one scenario");
  b->add_option("--scenario", bench.scenario)->required()->check(CLI::ExistingDirectory);
  b->add_option("--algos", bench.algos)
      ->delimiter(',')
      ->check(CLI::IsMember({"iva-ip1", "ive-ip1", "ive-ip2-old", "ive-ip2-new", "semi-ive"}))
      ->capture_default_str();
  b->add_option("--iters", bench.iters)->capture_default_str();
  b->add_option("--beta", bench.beta)->capture_default_str();
  b->add_option("--power-iters", bench.power_iters)->capture_default_str();
  b->add_flag("--exact-eig", bench.exact_eig);
  b->add_option("--trace-loading", bench.trace_loading)->capture_default_str();
  b->add_option("--phi-clip", bench.phi_clip)->capture_default_str();
  b->add_option("--known", bench.known, "Known sources L for semi-ive")->capture_default_str();
  b->add_option("--threads", bench.threads)->capture_default_str();
  b->add_option("--seed", bench.seed)->capture_default_str();
  b->add_option("--out", bench.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& ok) {
    return app.exit(ok, out, err);
  } catch (const CLI::ParseError& pe) {
    app.exit(pe, out, err);
    return kExitUsage;
  }

  try {
    if (s->parsed()) return cmd_synth(synth, out);
    if (e->parsed()) return cmd_extract(ext, ext_out->count() > 0, out);
    if (v->parsed()) return cmd_eval(ev, out);
    if (b->parsed()) return cmd_bench(bench, out);
  } catch (const SingularMatrix& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitSingular;
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const DimensionMismatch& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const ConfigMismatch& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace ive::cli
