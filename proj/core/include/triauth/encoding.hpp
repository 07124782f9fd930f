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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace triauth {

// Unpadded base64url (RFC 4648 §5). Decoding is strict: non-alphabet
// characters, padding, impossible lengths and nonzero trailing bits are all
// rejected, so distinct encodings never decode to the same bytes.
std::string b64url_encode(std::span<const std::uint8_t> data);
std::string b64url_encode(std::string_view data);
std::vector<std::uint8_t> b64url_decode(std::string_view text);  // throws bad_encoding

// Lowercase hex; decode rejects uppercase and odd lengths.
std::string hex_encode(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> hex_decode(std::string_view text);  // throws bad_encoding

}  // namespace triauth
