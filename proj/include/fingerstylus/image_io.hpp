// Copyright 2026 The Finger-Stylus Authors.
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

#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>

#include "fingerstylus/imaging.hpp"

namespace fingerstylus::image_io {

class ImageDecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decodes PNG, binary PPM (P6, maxval 255) or baseline JPEG, sniffed from
/// the leading bytes. Result is always 8-bit RGB.
imaging::FrameRgb decode_image(std::span<const std::uint8_t> bytes);

imaging::FrameRgb read_image_file(const std::filesystem::path& path);

/// 8-bit RGB PNG. The encoder writes no time chunk, so output is a pure
/// function of the pixels.
std::string encode_png(const imaging::FrameRgb& frame);

std::string encode_ppm(const imaging::FrameRgb& frame);

void write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace fingerstylus::image_io
