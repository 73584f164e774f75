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

#include "rsvqa/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "rsvqa/errors.hpp"

namespace rsvqa {
namespace {

std::vector<png_byte> to_bytes(const Image& image) {
  if (image.channels != 3) {
    throw UsageError("write_png: expected 3 channels, got " +
                     std::to_string(image.channels));
  }
  std::vector<png_byte> bytes(image.data.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const double v = std::clamp(image.data[i], 0.0, 1.0);
    bytes[i] = static_cast<png_byte>(std::lround(v * 255.0));
  }
  return bytes;
}

png_image make_header(const Image& image) {
  png_image header;
  std::memset(&header, 0, sizeof(header));
  header.version = PNG_IMAGE_VERSION;
  header.width = static_cast<png_uint_32>(image.width);
  header.height = static_cast<png_uint_32>(image.height);
  header.format = PNG_FORMAT_RGB;
  return header;
}

}  // namespace

Image read_png(const std::filesystem::path& path) {
  png_image header;
  std::memset(&header, 0, sizeof(header));
  header.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&header, path.string().c_str())) {
    throw DataError("cannot read PNG '" + path.string() + "': " + header.message);
  }
  header.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(header));
  if (!png_image_finish_read(&header, nullptr, buffer.data(), 0, nullptr)) {
    std::string message = header.message;
    png_image_free(&header);
    throw DataError("cannot decode PNG '" + path.string() + "': " + message);
  }
  Image image(static_cast<int>(header.height), static_cast<int>(header.width), 3);
  if (image.height <= 0 || image.width <= 0) {
    throw DataError("PNG '" + path.string() + "' has an empty raster");
  }
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    image.data[i] = static_cast<double>(buffer[i]) / 255.0;
  }
  return image;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  auto bytes = to_bytes(image);
  png_image header = make_header(image);
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&header, nullptr, &size, 0, bytes.data(), 0,
                                 nullptr)) {
    throw ExternalError(std::string("PNG encoding failed: ") + header.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&header, out.data(), &size, 0, bytes.data(), 0,
                                 nullptr)) {
    throw ExternalError(std::string("PNG encoding failed: ") + header.message);
  }
  out.resize(size);
  return out;
}

void write_png(const Image& image, const std::filesystem::path& path) {
  const auto encoded = encode_png(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ExternalError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(encoded.data()),
            static_cast<std::streamsize>(encoded.size()));
  if (!out) throw ExternalError("failed writing '" + path.string() + "'");
}

}  // namespace rsvqa
