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

#include "ive/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include <json.hpp>

#include "ive/errors.hpp"
#include "ive/wav.hpp"

namespace ive {
namespace {

using Json = nlohmann::json;

// Independent generator per (seed, stream).
std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    stream};
  return std::mt19937_64(seq);
}

enum Stream : std::uint32_t { kSources = 1, kNoise = 1000, kMixing = 2000 };

double condition_number(const Eigen::MatrixXcd& a) {
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues();
  const double smin = sv(sv.size() - 1);
  return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

double channel_variance(const Waveform& w) {
  double acc = 0.0;
  for (int m = 0; m < w.num_channels(); ++m) {
    const auto row = w.samples.row(m);
    const double mean = row.mean();
    acc += (row.array() - mean).square().mean();
  }
  return acc / w.num_channels();
}

double spectral_power(const Spectrogram& s) {
  return s.energy() / (static_cast<double>(s.num_freqs()) * s.num_frames() * s.num_channels());
}

Complex complex_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  const double im = n(rng);
  return Complex(re, im) / std::sqrt(2.0);
}

RealMatrix instantaneous_mixing(const ScenarioConfig& cfg, std::mt19937_64& rng, int& rejected) {
  const int cols = cfg.sources + cfg.noises;
  std::normal_distribution<double> n(0.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    RealMatrix a(cfg.mics, cols);
    for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = n(rng);
    a.colwise().normalize();
    if (condition_number(a.cast<Complex>()) <= cfg.max_condition) return a;
    ++rejected;
  }
  throw Error("could not draw a mixing matrix with condition number <= " +
              std::to_string(cfg.max_condition) + " in 100 attempts");
}

// taps[k] is an M x taps matrix of filters from source k to every mic.
std::vector<RealMatrix> fir_mixing(const ScenarioConfig& cfg, std::mt19937_64& rng, int& rejected) {
  const int cols = cfg.sources + cfg.noises;
  constexpr int kGrid = 32;
  std::normal_distribution<double> n(0.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<RealMatrix> h(static_cast<std::size_t>(cols), RealMatrix(cfg.mics, cfg.fir_taps));
    for (auto& hk : h) {
      for (Eigen::Index k = 0; k < hk.size(); ++k) hk(k) = n(rng);
      hk /= hk.norm();
    }
    double worst = 0.0;
    for (int g = 0; g <= kGrid / 2; ++g) {
      Eigen::MatrixXcd a(cfg.mics, cols);
      for (int k = 0; k < cols; ++k) {
        for (int m = 0; m < cfg.mics; ++m) {
          Complex acc = 0.0;
          for (int tap = 0; tap < cfg.fir_taps; ++tap) {
            acc += h[static_cast<std::size_t>(k)](m, tap) *
                   std::polar(1.0, -2.0 * std::numbers::pi * g * tap / kGrid);
          }
          a(m, k) = acc;
        }
      }
      worst = std::max(worst, condition_number(a));
    }
    if (worst <= cfg.max_condition) return h;
    ++rejected;
  }
  throw Error("could not draw FIR mixing filters with condition number <= " +
              std::to_string(cfg.max_condition) + " in 100 attempts");
}

Waveform apply_fir(const RealMatrix& h, const RealVector& s, int rate) {
  const int n = static_cast<int>(s.size());
  Waveform out(rate, static_cast<int>(h.rows()), n);
  for (int m = 0; m < h.rows(); ++m) {
    for (int tap = 0; tap < h.cols(); ++tap) {
      const double g = h(m, tap);
      if (tap >= n) break;
      out.samples.row(m).segment(tap, n - tap) += g * s.head(n - tap).transpose();
    }
  }
  return out;
}

Json complex_matrix_json(const Matrix& a) {
  Json cols = Json::array();
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    Json col = Json::array();
    for (Eigen::Index r = 0; r < a.rows(); ++r) col.push_back({a(r, c).real(), a(r, c).imag()});
    cols.push_back(col);
  }
  return cols;
}

std::string image_name(int i) { return "image_" + std::to_string(i + 1) + ".wav"; }

}  // namespace

std::string to_string(MixingMode mode) {
  switch (mode) {
    case MixingMode::kInstantaneous: return "inst";
    case MixingMode::kFir: return "fir";
    case MixingMode::kIdentity: return "identity";
  }
  return "inst";
}

MixingMode parse_mixing(const std::string& name) {
  if (name == "inst") return MixingMode::kInstantaneous;
  if (name == "fir") return MixingMode::kFir;
  if (name == "identity") return MixingMode::kIdentity;
  throw InvalidArgument("unknown mixing mode '" + name + "'");
}

RealMatrix sample_sources(int count, int num_samples, std::uint64_t seed, int block) {
  if (count < 0 || num_samples < 0 || block < 1) throw InvalidArgument("sample_sources: bad sizes");
  RealMatrix out(count, num_samples);
  for (int i = 0; i < count; ++i) {
    auto rng = make_rng(seed, kSources + static_cast<std::uint32_t>(i));
    std::normal_distribution<double> carrier(0.0, 1.0);
    std::exponential_distribution<double> envelope(1.0);
    double level = 0.0;
    for (int t = 0; t < num_samples; ++t) {
      if (t % block == 0) level = envelope(rng);
      out(i, t) = level * carrier(rng);
    }
    const double rms = std::sqrt(out.row(i).squaredNorm() / std::max(num_samples, 1));
    if (rms > 0.0) out.row(i) /= rms;
  }
  return out;
}

double excess_kurtosis(const RealVector& x) {
  const double mean = x.mean();
  const RealVector c = x.array() - mean;
  const double m2 = c.squaredNorm() / static_cast<double>(c.size());
  const double m4 = c.array().pow(4).mean();
  return m4 / (m2 * m2) - 3.0;
}

void ScenarioConfig::validate() const {
  if (sources < 1) throw InvalidArgument("at least one source is required");
  if (sources >= mics) throw InvalidArgument("K < M required");
  if (noises < 0) throw InvalidArgument("noise count must be >= 0");
  if (!(duration > 0.0) || sample_rate < 1) throw InvalidArgument("duration and rate must be positive");
  if (std::isnan(snr_db)) throw InvalidArgument("snr_db is NaN");
  if (fir_taps < 1) throw InvalidArgument("fir_taps must be >= 1");
  if (!(max_condition >= 1.0)) throw InvalidArgument("max_condition must be >= 1");
}

double scenario_snr_db(const std::vector<Waveform>& images, const std::vector<Waveform>& noise) {
  double src = 0.0;
  for (const auto& w : images) src += channel_variance(w);
  src /= static_cast<double>(images.size());
  double nz = 0.0;
  for (const auto& w : noise) nz += channel_variance(w);
  return 10.0 * std::log10(src / nz);
}

Scenario make_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(std::lround(cfg.duration * cfg.sample_rate));
  const int k_count = cfg.sources;
  const int j_count = cfg.noises;
  Scenario out;
  out.config = cfg;

  const RealMatrix s = sample_sources(k_count, n, cfg.seed);
  RealMatrix z(j_count, n);
  {
    std::normal_distribution<double> g(0.0, 1.0);
    for (int j = 0; j < j_count; ++j) {
      auto rng = make_rng(cfg.seed, kNoise + static_cast<std::uint32_t>(j));
      for (int t = 0; t < n; ++t) z(j, t) = g(rng);
    }
  }

  auto rng = make_rng(cfg.seed, kMixing);
  std::vector<Waveform> images;
  std::vector<Waveform> noise;
  switch (cfg.mixing) {
    case MixingMode::kInstantaneous: {
      const RealMatrix a = instantaneous_mixing(cfg, rng, out.rejected_draws);
      for (int k = 0; k < k_count + j_count; ++k) {
        Waveform w(cfg.sample_rate, cfg.mics, n);
        const RealVector sig = k < k_count ? RealVector(s.row(k).transpose())
                                           : RealVector(z.row(k - k_count).transpose());
        w.samples = a.col(k) * sig.transpose();
        (k < k_count ? images : noise).push_back(std::move(w));
      }
      break;
    }
    case MixingMode::kFir: {
      const auto h = fir_mixing(cfg, rng, out.rejected_draws);
      for (int k = 0; k < k_count + j_count; ++k) {
        const RealVector sig = k < k_count ? RealVector(s.row(k).transpose())
                                           : RealVector(z.row(k - k_count).transpose());
        (k < k_count ? images : noise)
            .push_back(apply_fir(h[static_cast<std::size_t>(k)], sig, cfg.sample_rate));
      }
      break;
    }
    case MixingMode::kIdentity: {
      const int spare = cfg.mics - k_count;
      for (int k = 0; k < k_count + j_count; ++k) {
        Waveform w(cfg.sample_rate, cfg.mics, n);
        if (k < k_count) {
          w.samples.row(k) = s.row(k);
          images.push_back(std::move(w));
        } else {
          w.samples.row(k_count + (k - k_count) % spare) = z.row(k - k_count);
          noise.push_back(std::move(w));
        }
      }
      break;
    }
  }

  if (j_count > 0) {
    double scale = 0.0;
    if (std::isfinite(cfg.snr_db)) {
      const double current = scenario_snr_db(images, noise);
      scale = std::pow(10.0, (current - cfg.snr_db) / 20.0);
    } else if (cfg.snr_db < 0.0) {
      throw InvalidArgument("snr_db = -inf is not meaningful");
    }
    for (auto& w : noise) w.samples *= scale;
  }

  out.mixture = Waveform(cfg.sample_rate, cfg.mics, n);
  for (const auto& w : images) out.mixture.samples += w.samples;
  for (const auto& w : noise) out.mixture.samples += w.samples;
  out.images = std::move(images);
  out.noise_images = std::move(noise);
  return out;
}

SpectralScenario make_spectral_scenario(const SpectralScenarioConfig& cfg) {
  if (cfg.sources < 1 || cfg.sources >= cfg.mics) throw InvalidArgument("K < M required");
  if (cfg.noises < 0 || cfg.num_freqs < 1 || cfg.num_frames < 1) {
    throw InvalidArgument("spectral scenario: bad sizes");
  }
  const int k_count = cfg.sources;
  const int j_count = cfg.noises;
  const int cols = k_count + j_count;
  const int dim = cfg.mics;
  auto mix_rng = make_rng(cfg.seed, kMixing);
  auto src_rng = make_rng(cfg.seed, kSources);
  auto noise_rng = make_rng(cfg.seed, kNoise);

  SpectralScenario out;
  out.images.assign(static_cast<std::size_t>(k_count), Spectrogram(cfg.num_freqs, cfg.num_frames, dim));
  out.noise = Spectrogram(cfg.num_freqs, cfg.num_frames, dim);
  out.steering.a.resize(static_cast<std::size_t>(cfg.num_freqs));

  std::exponential_distribution<double> envelope(1.0);
  RealMatrix env(k_count, cfg.num_frames);
  for (Eigen::Index k = 0; k < env.size(); ++k) env(k) = envelope(src_rng);

  for (int f = 0; f < cfg.num_freqs; ++f) {
    Matrix a(dim, cols);
    if (cfg.identity_mixing) {
      a.setZero();
      for (int k = 0; k < cols; ++k) {
        a(k < k_count ? k : k_count + (k - k_count) % (dim - k_count), k) = 1.0;
      }
    } else {
      int attempt = 0;
      do {
        if (++attempt > 100) throw Error("could not draw a well-conditioned mixing matrix");
        for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = complex_normal(mix_rng);
        a.colwise().normalize();
      } while (condition_number(a) > cfg.max_condition);
    }
    out.steering.a[static_cast<std::size_t>(f)] = a.leftCols(k_count);
    for (int k = 0; k < k_count; ++k) {
      Eigen::RowVectorXcd s(cfg.num_frames);
      for (int t = 0; t < cfg.num_frames; ++t) s(t) = env(k, t) * complex_normal(src_rng);
      out.images[static_cast<std::size_t>(k)].bins[static_cast<std::size_t>(f)] = a.col(k) * s;
    }
    for (int j = 0; j < j_count; ++j) {
      Eigen::RowVectorXcd z(cfg.num_frames);
      for (int t = 0; t < cfg.num_frames; ++t) z(t) = complex_normal(noise_rng);
      out.noise.bins[static_cast<std::size_t>(f)] += a.col(k_count + j) * z;
    }
  }

  if (j_count > 0) {
    double src = 0.0;
    for (const auto& img : out.images) src += spectral_power(img);
    src /= k_count;
    double scale = 0.0;
    if (std::isfinite(cfg.snr_db)) {
      scale = std::sqrt(src / (spectral_power(out.noise) * std::pow(10.0, cfg.snr_db / 10.0)));
    }
    out.noise *= scale;
  }
  out.mixture = out.noise;
  for (const auto& img : out.images) out.mixture += img;
  return out;
}

std::vector<Vector> estimate_steering(const Spectrogram& image) {
  std::vector<Vector> out;
  out.reserve(image.bins.size());
  for (int f = 0; f < image.num_freqs(); ++f) {
    const Matrix& x = image.bins[static_cast<std::size_t>(f)];
    const Matrix r = x * x.adjoint() / static_cast<double>(x.cols());
    if (!(r.trace().real() > 0.0)) throw ZeroImage("spatial image is silent", f);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(r);
    Vector a = eig.eigenvectors().col(r.rows() - 1);
    a.normalize();
    linalg::normalize_phase(a);
    out.push_back(std::move(a));
  }
  return out;
}

SteeringSet steering_from_images(const std::vector<Spectrogram>& images, int count) {
  if (count < 0 || count > static_cast<int>(images.size())) {
    throw InvalidArgument("steering_from_images: not enough images");
  }
  SteeringSet out;
  if (count == 0) return out;
  const int num_freqs = images.front().num_freqs();
  const int dim = images.front().num_channels();
  out.a.assign(static_cast<std::size_t>(num_freqs), Matrix(dim, count));
  for (int l = 0; l < count; ++l) {
    const auto vecs = estimate_steering(images[static_cast<std::size_t>(l)]);
    for (int f = 0; f < num_freqs; ++f) {
      out.a[static_cast<std::size_t>(f)].col(l) = vecs[static_cast<std::size_t>(f)];
    }
  }
  return out;
}

void save_steering(const std::string& path, const SteeringSet& steering) {
  Json j;
  j["num_sources"] = steering.known();
  j["num_freqs"] = steering.num_freqs();
  j["num_channels"] = steering.a.empty() ? 0 : steering.a.front().rows();
  Json per_source = Json::array();
  for (int l = 0; l < steering.known(); ++l) {
    Json per_freq = Json::array();
    for (const auto& a : steering.a) per_freq.push_back(complex_matrix_json(a.col(l)).front());
    per_source.push_back(per_freq);
  }
  j["steering"] = per_source;
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path + "'");
  os << j.dump(1) << '\n';
}

SteeringSet load_steering(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(is);
    const auto& per_source = j.at("steering");
    const int count = static_cast<int>(per_source.size());
    SteeringSet out;
    if (count == 0) return out;
    const int num_freqs = static_cast<int>(per_source.at(0).size());
    const int dim = static_cast<int>(per_source.at(0).at(0).size());
    out.a.assign(static_cast<std::size_t>(num_freqs), Matrix(dim, count));
    for (int l = 0; l < count; ++l) {
      const auto& src = per_source.at(static_cast<std::size_t>(l));
      if (static_cast<int>(src.size()) != num_freqs) throw InvalidArgument("ragged steering file");
      for (int f = 0; f < num_freqs; ++f) {
        const auto& vec = src.at(static_cast<std::size_t>(f));
        if (static_cast<int>(vec.size()) != dim) throw InvalidArgument("ragged steering file");
        for (int m = 0; m < dim; ++m) {
          out.a[static_cast<std::size_t>(f)](m, l) =
              Complex(vec.at(static_cast<std::size_t>(m)).at(0).get<double>(),
                      vec.at(static_cast<std::size_t>(m)).at(1).get<double>());
        }
      }
    }
    return out;
  } catch (const Json::exception& e) {
    throw InvalidArgument("malformed steering file '" + path + "': " + e.what());
  }
}

void save_scenario(const std::string& dir, const Scenario& scenario, const StftConfig& stft) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path root(dir);
  write_wav((root / "mixture.wav").string(), scenario.mixture);
  std::vector<Spectrogram> specs;
  for (std::size_t i = 0; i < scenario.images.size(); ++i) {
    write_wav((root / image_name(static_cast<int>(i))).string(), scenario.images[i]);
    specs.push_back(analyze(scenario.images[i], stft));
  }
  save_steering((root / "steering.json").string(),
                steering_from_images(specs, static_cast<int>(specs.size())));

  const ScenarioConfig& c = scenario.config;
  Json j;
  j["sources"] = c.sources;
  j["mics"] = c.mics;
  j["noises"] = c.noises;
  j["noise_free"] = !std::isfinite(c.snr_db);
  j["snr_db"] = std::isfinite(c.snr_db) ? Json(c.snr_db) : Json(nullptr);
  j["measured_snr_db"] = scenario.noise_images.empty() || !std::isfinite(c.snr_db)
                             ? Json(nullptr)
                             : Json(scenario_snr_db(scenario.images, scenario.noise_images));
  j["duration"] = c.duration;
  j["sample_rate"] = c.sample_rate;
  j["num_samples"] = scenario.mixture.num_samples();
  j["mixing"] = to_string(c.mixing);
  j["fir_taps"] = c.fir_taps;
  j["max_condition"] = c.max_condition;
  j["rejected_draws"] = scenario.rejected_draws;
  j["noises_exceed_noise_dim"] = c.noises > c.mics - c.sources;
  j["seed"] = c.seed;
  j["stft"] = {{"frame_len", stft.frame_len}, {"hop", stft.hop}, {"window", stft.window}};
  std::ofstream os(root / "scenario.json");
  if (!os) throw Error("cannot write scenario.json in '" + dir + "'");
  os << j.dump(1) << '\n';
}

LoadedScenario load_scenario(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::ifstream is(root / "scenario.json");
  if (!is) throw Error("'" + dir + "' has no scenario.json");
  LoadedScenario out;
  try {
    const Json j = Json::parse(is);
    ScenarioConfig& c = out.config;
    c.sources = j.at("sources").get<int>();
    c.mics = j.at("mics").get<int>();
    c.noises = j.at("noises").get<int>();
    c.snr_db = j.at("snr_db").is_null() ? std::numeric_limits<double>::infinity()
                                        : j.at("snr_db").get<double>();
    c.duration = j.at("duration").get<double>();
    c.sample_rate = j.at("sample_rate").get<int>();
    c.mixing = parse_mixing(j.at("mixing").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.fir_taps = j.value("fir_taps", 8);
    c.max_condition = j.value("max_condition", 100.0);
    const auto& s = j.at("stft");
    out.stft.frame_len = s.at("frame_len").get<int>();
    out.stft.hop = s.at("hop").get<int>();
    out.stft.window = s.value("window", std::string("sqrt-hann"));
  } catch (const Json::exception& e) {
    throw InvalidArgument("malformed scenario.json in '" + dir + "': " + e.what());
  }
  out.mixture = read_wav((root / "mixture.wav").string());
  for (int i = 0; i < out.config.sources; ++i) {
    out.images.push_back(read_wav((root / image_name(i)).string()));
  }
  return out;
}

}  // namespace ive
