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

#include "ive/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "ive/errors.hpp"

namespace ive {
namespace {

constexpr std::uint16_t kPcm = 1;
constexpr std::uint16_t kFloat = 3;
constexpr std::uint16_t kExtensible = 0xFFFE;

template <class T>
void put(std::ostream& os, T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

std::uint32_t u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}
std::uint16_t u16(const unsigned char* p) { return std::uint16_t(p[0] | p[1] << 8); }

}  // namespace

void write_wav(const std::string& path, const Waveform& wave) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  const std::uint16_t channels = static_cast<std::uint16_t>(wave.num_channels());
  const std::uint32_t frames = static_cast<std::uint32_t>(wave.num_samples());
  const std::uint32_t data_bytes = frames * channels * 4u;
  os.write("RIFF", 4);
  put<std::uint32_t>(os, 36u + data_bytes);
  os.write("WAVEfmt ", 8);
  put<std::uint32_t>(os, 16u);
  put<std::uint16_t>(os, kFloat);
  put<std::uint16_t>(os, channels);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(wave.sample_rate));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(wave.sample_rate) * channels * 4u);
  put<std::uint16_t>(os, static_cast<std::uint16_t>(channels * 4u));
  put<std::uint16_t>(os, 32);
  os.write("data", 4);
  put<std::uint32_t>(os, data_bytes);
  std::vector<float> buf(static_cast<std::size_t>(frames) * channels);
  for (std::uint32_t t = 0; t < frames; ++t) {
    for (std::uint16_t m = 0; m < channels; ++m) {
      buf[static_cast<std::size_t>(t) * channels + m] = static_cast<float>(wave.samples(m, t));
    }
  }
  os.write(reinterpret_cast<const char*>(buf.data()),
           static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!os) throw Error("failed writing '" + path + "'");
}

Waveform read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path + "'");
  std::vector<unsigned char> raw((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (raw.size() < 12 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
      std::memcmp(raw.data() + 8, "WAVE", 4) != 0) {
    throw Error("'" + path + "' is not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= raw.size()) {
    const unsigned char* chunk = raw.data() + pos;
    const std::uint32_t len = u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + len > raw.size()) throw Error("'" + path + "' is truncated");
    if (std::memcmp(chunk, "fmt ", 4) == 0 && len >= 16) {
      format = u16(chunk + 8);
      channels = u16(chunk + 10);
      rate = u32(chunk + 12);
      bits = u16(chunk + 22);
      if (format == kExtensible && len >= 40) format = u16(chunk + 32);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_len = len;
    }
    pos = body + len + (len & 1u);
  }
  if (data == nullptr || channels == 0) throw Error("'" + path + "' has no audio data");
  const bool is_float = format == kFloat && bits == 32;
  const bool is_pcm = format == kPcm && (bits == 16 || bits == 24 || bits == 32);
  if (!is_float && !is_pcm) throw Error("'" + path + "': unsupported sample format");
  const std::size_t width = bits / 8u;
  const std::size_t frames = data_len / (width * channels);

  Waveform out(static_cast<int>(rate), channels, static_cast<int>(frames));
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::uint16_t m = 0; m < channels; ++m) {
      const unsigned char* p = data + (t * channels + m) * width;
      double v = 0.0;
      if (is_float) {
        float f;
        std::memcpy(&f, p, 4);
        v = f;
      } else if (bits == 16) {
        v = static_cast<std::int16_t>(u16(p)) / 32768.0;
      } else if (bits == 24) {
        std::int32_t s = std::int32_t(p[0]) | std::int32_t(p[1]) << 8 | std::int32_t(p[2]) << 16;
        if (s & 0x800000) s -= 0x1000000;
        v = s / 8388608.0;
      } else {
        v = static_cast<std::int32_t>(u32(p)) / 2147483648.0;
      }
      out.samples(m, static_cast<Eigen::Index>(t)) = v;
    }
  }
  return out;
}

}  // namespace ive
