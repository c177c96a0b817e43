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

#include "fingerstylus/wire.hpp"

#include "fingerstylus/image_io.hpp"

namespace fingerstylus::wire {

namespace {

template <typename T>
void put_be(std::string& out, T v) {
  for (int shift = static_cast<int>(sizeof(T) * 8) - 8; shift >= 0; shift -= 8) {
    out.push_back(static_cast<char>((v >> shift) & 0xFF));
  }
}

template <typename T>
T get_be(const std::uint8_t* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v = static_cast<T>((v << 8) | p[i]);
  return v;
}

}  // namespace

std::string encode_header(const FrameHeader& h) {
  std::string out;
  out.reserve(kHeaderSize);
  out.push_back(static_cast<char>(h.type));
  put_be(out, h.width);
  put_be(out, h.height);
  put_be(out, h.timestamp_ms);
  return out;
}

std::string encode_raw_frame(const imaging::FrameRgb& f) {
  std::string out = encode_header({MsgType::Raw, static_cast<std::uint32_t>(f.width()),
                                   static_cast<std::uint32_t>(f.height()),
                                   static_cast<std::uint64_t>(f.timestamp_ms())});
  out.reserve(kHeaderSize + f.pixels().size() * 3);
  for (const imaging::Rgb& p : f.pixels()) {
    out.push_back(static_cast<char>(p.r));
    out.push_back(static_cast<char>(p.g));
    out.push_back(static_cast<char>(p.b));
  }
  return out;
}

std::string encode_encoded_frame(std::string_view image_bytes, std::uint32_t width,
                                 std::uint32_t height, std::uint64_t timestamp_ms) {
  std::string out = encode_header({MsgType::Encoded, width, height, timestamp_ms});
  out.append(image_bytes);
  return out;
}

std::string encode_flush(std::uint64_t timestamp_ms) {
  return encode_header({MsgType::Flush, 0, 0, timestamp_ms});
}

ClientMessage decode_client_message(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) {
    return WireError{WireErrorKind::Malformed, "message shorter than the 17-byte header"};
  }
  const std::uint8_t type = bytes[0];
  const auto width = get_be<std::uint32_t>(bytes.data() + 1);
  const auto height = get_be<std::uint32_t>(bytes.data() + 5);
  const auto ts = get_be<std::uint64_t>(bytes.data() + 9);
  const auto payload = bytes.subspan(kHeaderSize);

  if (type == static_cast<std::uint8_t>(MsgType::Flush)) {
    if (!payload.empty()) return WireError{WireErrorKind::Malformed, "flush carries a payload"};
    return FlushMessage{ts};
  }
  if (type != static_cast<std::uint8_t>(MsgType::Raw) &&
      type != static_cast<std::uint8_t>(MsgType::Encoded)) {
    return WireError{WireErrorKind::Malformed, "unknown msg_type " + std::to_string(type)};
  }
  if (width < 1 || height < 1 || width > imaging::kMaxFrameDim ||
      height > imaging::kMaxFrameDim) {
    return WireError{WireErrorKind::Rejected,
                     "frame " + std::to_string(width) + "x" + std::to_string(height) +
                         " outside [1," + std::to_string(imaging::kMaxFrameDim) + "]"};
  }
  if (ts > static_cast<std::uint64_t>(INT64_MAX)) {
    return WireError{WireErrorKind::Malformed, "timestamp out of range"};
  }

  if (type == static_cast<std::uint8_t>(MsgType::Raw)) {
    const std::size_t need = static_cast<std::size_t>(width) * height * 3;
    if (payload.size() != need) {
      return WireError{WireErrorKind::Malformed,
                       "raw payload is " + std::to_string(payload.size()) +
                           " bytes, header implies " + std::to_string(need)};
    }
    std::vector<imaging::Rgb> px(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < px.size(); ++i) {
      px[i] = {payload[3 * i], payload[3 * i + 1], payload[3 * i + 2]};
    }
    return FrameMessage{imaging::FrameRgb(static_cast<int>(width), static_cast<int>(height),
                                          std::move(px), static_cast<std::int64_t>(ts))};
  }

  try {
    imaging::FrameRgb f = image_io::decode_image(payload);
    if (f.width() != static_cast<int>(width) || f.height() != static_cast<int>(height)) {
      return WireError{WireErrorKind::Rejected, "encoded image size does not match header"};
    }
    f.set_timestamp_ms(static_cast<std::int64_t>(ts));
    return FrameMessage{std::move(f)};
  } catch (const std::exception& e) {
    return WireError{WireErrorKind::Rejected, std::string("cannot decode image: ") + e.what()};
  }
}

nlohmann::ordered_json detection_event(const pipeline::FrameResult& r,
                                       const std::string& session_id,
                                       std::int64_t dropped) {
  nlohmann::ordered_json j;
  j["seq"] = 0;
  j["type"] = "detection";
  j["frame_index"] = r.frame_index;
  j["t_ms"] = r.timestamp_ms;
  if (r.detection) {
    j["tip"] = {{"fx", r.detection->tip.x},
                {"fy", r.detection->tip.y},
                {"sx", r.screen_tip->x},
                {"sy", r.screen_tip->y}};
    j["session_id"] = session_id;
  } else {
    j["tip"] = nullptr;
    j["session_id"] = nullptr;
  }
  j["dropped"] = dropped;
  return j;
}

nlohmann::ordered_json session_event(const stroke::SessionEvent& e) {
  nlohmann::ordered_json j;
  j["seq"] = 0;
  if (const auto* s = std::get_if<stroke::SessionStarted>(&e)) {
    j["type"] = "session_start";
    j["session_id"] = s->session_id;
    j["t_ms"] = s->t_ms;
  } else if (const auto* p = std::get_if<stroke::PointAdded>(&e)) {
    j["type"] = "point";
    j["session_id"] = p->session_id;
    j["fx"] = p->point.fx;
    j["fy"] = p->point.fy;
    j["sx"] = p->point.sx;
    j["sy"] = p->point.sy;
    j["t_ms"] = p->point.t_ms;
  } else {
    const auto& end = std::get<stroke::SessionEnded>(e);
    j["type"] = "session_end";
    j["session_id"] = end.stroke.session_id;
    j["stroke"] = stroke::stroke_to_json(end.stroke);
  }
  return j;
}

nlohmann::ordered_json error_event(const std::string& message) {
  nlohmann::ordered_json j;
  j["seq"] = 0;
  j["type"] = "error";
  j["message"] = message;
  return j;
}

}  // namespace fingerstylus::wire
