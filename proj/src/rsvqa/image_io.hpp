// Copyright 2026 The rsvqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RSVQA_IMAGE_IO_HPP_
#define RSVQA_IMAGE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

namespace rsvqa {

// Row-major H x W x C array of channel values, nominally in [0, 1].
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  Image() = default;
  Image(int h, int w, int c, double fill = 0.0)
      : height(h), width(w), channels(c),
        data(static_cast<std::size_t>(h) * w * c, fill) {}

  double& at(int y, int x, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double at(int y, int x, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  bool operator==(const Image&) const = default;
};

// Reads an 8-bit PNG as RGB scaled to [0, 1]. Throws DataError on failure.
Image read_png(const std::filesystem::path& path);

// Writes an RGB image as an 8-bit PNG, clamping values to [0, 1].
// Throws ExternalError on I/O failure.
void write_png(const Image& image, const std::filesystem::path& path);

// Same as write_png but returns the encoded bytes.
std::vector<std::uint8_t> encode_png(const Image& image);

}  // namespace rsvqa

#endif  // RSVQA_IMAGE_IO_HPP_
