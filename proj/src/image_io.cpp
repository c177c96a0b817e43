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

#include "fingerstylus/image_io.hpp"

#include <png.h>

#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include <jpeglib.h>

namespace fingerstylus::image_io {

using imaging::FrameRgb;
using imaging::Rgb;

namespace {

FrameRgb from_packed(int w, int h, const std::uint8_t* data) {
  imaging::check_dimensions(w, h);
  std::vector<Rgb> px(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = {data[3 * i], data[3 * i + 1], data[3 * i + 2]};
  }
  return FrameRgb(w, h, std::move(px));
}

std::vector<std::uint8_t> to_packed(const FrameRgb& f) {
  std::vector<std::uint8_t> out;
  out.reserve(f.pixels().size() * 3);
  for (const Rgb& p : f.pixels()) {
    out.push_back(p.r);
    out.push_back(p.g);
    out.push_back(p.b);
  }
  return out;
}

FrameRgb decode_png(std::span<const std::uint8_t> bytes) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw ImageDecodeError(std::string("png: ") + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  if (img.width > static_cast<png_uint_32>(imaging::kMaxFrameDim) ||
      img.height > static_cast<png_uint_32>(imaging::kMaxFrameDim)) {
    png_image_free(&img);
    imaging::check_dimensions(img.width, img.height);
  }
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    throw ImageDecodeError(std::string("png: ") + img.message);
  }
  return from_packed(static_cast<int>(img.width), static_cast<int>(img.height),
                     buf.data());
}

FrameRgb decode_ppm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 2;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&]() -> long {
    skip_space();
    long v = 0;
    std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(bytes[pos]) && pos - start < 9) {
      v = v * 10 + (bytes[pos] - '0');
      ++pos;
    }
    if (pos == start) throw ImageDecodeError("ppm: malformed header");
    return v;
  };
  const long w = number();
  const long h = number();
  const long maxval = number();
  if (maxval != 255) throw ImageDecodeError("ppm: only maxval 255 is supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw ImageDecodeError("ppm: malformed header");
  }
  ++pos;
  imaging::check_dimensions(w, h);
  const std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (bytes.size() - pos < need) throw ImageDecodeError("ppm: truncated data");
  return from_packed(static_cast<int>(w), static_cast<int>(h), bytes.data() + pos);
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

FrameRgb decode_jpeg(std::span<const std::uint8_t> bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = jpeg_error_exit;
  std::vector<std::uint8_t> buf;
  int w = 0;
  int h = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw ImageDecodeError(std::string("jpeg: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  w = static_cast<int>(cinfo.output_width);
  h = static_cast<int>(cinfo.output_height);
  if (w > imaging::kMaxFrameDim || h > imaging::kMaxFrameDim || w < 1 || h < 1) {
    jpeg_destroy_decompress(&cinfo);
    imaging::check_dimensions(w, h);
  }
  buf.resize(static_cast<std::size_t>(w) * h * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = buf.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return from_packed(w, h, buf.data());
}

}  // namespace

FrameRgb decode_image(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kPng[] = {0x89, 'P', 'N', 'G'};
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kPng, 4) == 0) {
    return decode_png(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') {
    return decode_ppm(bytes);
  }
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    return decode_jpeg(bytes);
  }
  throw ImageDecodeError("unrecognised image format");
}

FrameRgb read_image_file(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  return decode_image({reinterpret_cast<const std::uint8_t*>(data.data()), data.size()});
}

std::string encode_png(const FrameRgb& frame) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(frame.width());
  img.height = static_cast<png_uint_32>(frame.height());
  img.format = PNG_FORMAT_RGB;
  const std::vector<std::uint8_t> packed = to_packed(frame);
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, packed.data(), 0, nullptr)) {
    throw std::runtime_error(std::string("png encode: ") + img.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, packed.data(), 0,
                                 nullptr)) {
    throw std::runtime_error(std::string("png encode: ") + img.message);
  }
  out.resize(size);
  return out;
}

std::string encode_ppm(const FrameRgb& frame) {
  std::string out = "P6\n" + std::to_string(frame.width()) + " " +
                    std::to_string(frame.height()) + "\n255\n";
  const std::vector<std::uint8_t> packed = to_packed(frame);
  out.append(packed.begin(), packed.end());
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace fingerstylus::image_io
