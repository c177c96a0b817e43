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

// Binary client->server frame messages and JSON server->client events of
// the live drawing connection.
//
// Client message: 17-byte header, then payload.
//   byte 0      msg_type  1 = raw RGB8, 2 = encoded image (PNG/JPEG/PPM),
//                         3 = flush (end the active session; no payload)
//   bytes 1-4   width     u32 big-endian
//   bytes 5-8   height    u32 big-endian
//   bytes 9-16  timestamp u64 big-endian, milliseconds
// A raw payload is exactly width*height*3 bytes.

#include <cstdint>
#include <span>
#include <string>
#include <variant>

#include <json.hpp>

#include "fingerstylus/imaging.hpp"
#include "fingerstylus/pipeline.hpp"
#include "fingerstylus/stroke.hpp"

namespace fingerstylus::wire {

inline constexpr std::size_t kHeaderSize = 17;

enum class MsgType : std::uint8_t { Raw = 1, Encoded = 2, Flush = 3 };

struct FrameHeader {
  MsgType type = MsgType::Raw;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint64_t timestamp_ms = 0;
};

std::string encode_header(const FrameHeader& h);
std::string encode_raw_frame(const imaging::FrameRgb& f);
std::string encode_encoded_frame(std::string_view image_bytes, std::uint32_t width,
                                 std::uint32_t height, std::uint64_t timestamp_ms);
std::string encode_flush(std::uint64_t timestamp_ms);

struct FrameMessage {
  imaging::FrameRgb frame;
};
struct FlushMessage {
  std::uint64_t timestamp_ms = 0;
};

enum class WireErrorKind {
  /// Unparseable framing; the connection is closed after the error event.
  Malformed,
  /// Well-framed but unusable (too large, undecodable); connection stays open.
  Rejected,
};

struct WireError {
  WireErrorKind kind = WireErrorKind::Malformed;
  std::string message;
};

using ClientMessage = std::variant<FrameMessage, FlushMessage, WireError>;

ClientMessage decode_client_message(std::span<const std::uint8_t> bytes);

// Server events. `seq` is filled in by the writer, in send order.

nlohmann::ordered_json detection_event(const pipeline::FrameResult& r,
                                       const std::string& session_id,
                                       std::int64_t dropped);
nlohmann::ordered_json session_event(const stroke::SessionEvent& e);
nlohmann::ordered_json error_event(const std::string& message);

}  // namespace fingerstylus::wire
