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

#include "triauth/encoding.hpp"

#include <array>

#include "triauth/error.hpp"

namespace triauth {

namespace {

constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

constexpr std::array<std::int8_t, 256> make_b64_reverse() {
  std::array<std::int8_t, 256> table{};
  for (auto& v : table) v = -1;
  for (int i = 0; i < 64; ++i) {
    table[static_cast<unsigned char>(kB64Alphabet[i])] =
        static_cast<std::int8_t>(i);
  }
  return table;
}

constexpr auto kB64Reverse = make_b64_reverse();

constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

std::string b64url_encode(std::span<const std::uint8_t> data) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= data.size()) {
    std::uint32_t n = (static_cast<std::uint32_t>(data[i]) << 16) |
                      (static_cast<std::uint32_t>(data[i + 1]) << 8) |
                      static_cast<std::uint32_t>(data[i + 2]);
    out.push_back(kB64Alphabet[(n >> 18) & 0x3f]);
    out.push_back(kB64Alphabet[(n >> 12) & 0x3f]);
    out.push_back(kB64Alphabet[(n >> 6) & 0x3f]);
    out.push_back(kB64Alphabet[n & 0x3f]);
    i += 3;
  }
  const std::size_t rest = data.size() - i;
  if (rest == 1) {
    std::uint32_t n = static_cast<std::uint32_t>(data[i]) << 16;
    out.push_back(kB64Alphabet[(n >> 18) & 0x3f]);
    out.push_back(kB64Alphabet[(n >> 12) & 0x3f]);
  } else if (rest == 2) {
    std::uint32_t n = (static_cast<std::uint32_t>(data[i]) << 16) |
                      (static_cast<std::uint32_t>(data[i + 1]) << 8);
    out.push_back(kB64Alphabet[(n >> 18) & 0x3f]);
    out.push_back(kB64Alphabet[(n >> 12) & 0x3f]);
    out.push_back(kB64Alphabet[(n >> 6) & 0x3f]);
  }
  return out;
}

std::string b64url_encode(std::string_view data) {
  return b64url_encode(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::vector<std::uint8_t> b64url_decode(std::string_view text) {
  const std::size_t rem = text.size() % 4;
  if (rem == 1) throw Error(errc::bad_encoding, "base64url: impossible length");

  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3 + 2);

  std::size_t i = 0;
  auto value = [&](char c) -> std::uint32_t {
    std::int8_t v = kB64Reverse[static_cast<unsigned char>(c)];
    if (v < 0) throw Error(errc::bad_encoding, "base64url: invalid character");
    return static_cast<std::uint32_t>(v);
  };

  while (i + 4 <= text.size()) {
    std::uint32_t n = (value(text[i]) << 18) | (value(text[i + 1]) << 12) |
                      (value(text[i + 2]) << 6) | value(text[i + 3]);
    out.push_back(static_cast<std::uint8_t>((n >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((n >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>(n & 0xff));
    i += 4;
  }
  if (rem == 2) {
    std::uint32_t n = (value(text[i]) << 6) | value(text[i + 1]);
    if (n & 0xf) throw Error(errc::bad_encoding, "base64url: nonzero padding bits");
    out.push_back(static_cast<std::uint8_t>((n >> 4) & 0xff));
  } else if (rem == 3) {
    std::uint32_t n =
        (value(text[i]) << 12) | (value(text[i + 1]) << 6) | value(text[i + 2]);
    if (n & 0x3) throw Error(errc::bad_encoding, "base64url: nonzero padding bits");
    out.push_back(static_cast<std::uint8_t>((n >> 10) & 0xff));
    out.push_back(static_cast<std::uint8_t>((n >> 2) & 0xff));
  }
  return out;
}

std::string hex_encode(std::span<const std::uint8_t> data) {
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0xf]);
  }
  return out;
}

std::vector<std::uint8_t> hex_decode(std::string_view text) {
  if (text.size() % 2 != 0) throw Error(errc::bad_encoding, "hex: odd length");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 2);
  for (std::size_t i = 0; i < text.size(); i += 2) {
    int hi = hex_value(text[i]);
    int lo = hex_value(text[i + 1]);
    if (hi < 0 || lo < 0) throw Error(errc::bad_encoding, "hex: invalid character");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

}  // namespace triauth
