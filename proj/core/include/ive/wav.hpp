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

// RIFF/WAVE reading and writing. Files are written as 32-bit IEEE float,
// channel-interleaved; 16/24/32-bit integer PCM is accepted on input.

#ifndef IVE_WAV_HPP_
#define IVE_WAV_HPP_

#include <string>

#include "ive/stft.hpp"

namespace ive {

void write_wav(const std::string& path, const Waveform& wave);
Waveform read_wav(const std::string& path);

}  // namespace ive

#endif  // IVE_WAV_HPP_
