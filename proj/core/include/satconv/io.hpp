// Copyright 2026 The satconv Authors. All Rights Reserved.
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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "satconv/model.hpp"
#include "satconv/tensor.hpp"

namespace satconv {

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kTensorFormatVersion = 1;

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws FormatError on characters outside the alphabet or bad padding.
std::vector<std::uint8_t> base64_decode(std::string_view text);

// `.sacnn`: UTF-8 JSON manifest with base64 little-endian parameter blobs.
std::string model_to_json(const Model& model);
// Parses and validates. FormatError for malformed input, ValidationError for
// invariant violations.
Model model_from_json(std::string_view text);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

// `.sact`: "SACT", u8 version, u8 dtype, u8 ndim, ndim x u32 dims, payload.
// All integers little-endian.
enum class TensorDType : std::uint8_t { kInt8 = 0, kInt32 = 1 };

struct TensorFile {
  TensorDType dtype = TensorDType::kInt8;
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> payload;  // raw little-endian bytes

  friend bool operator==(const TensorFile&, const TensorFile&) = default;
};

std::vector<std::uint8_t> encode_tensor_file(const TensorFile& file);
TensorFile decode_tensor_file(std::span<const std::uint8_t> bytes);

// Writes an int8 tensor with its NHWC dims. Quantization parameters are not
// part of the format; they come from the model.
void save_tensor(const QuantTensor& t, const std::filesystem::path& path);
// Reads an int8 tensor of rank 1..4 (leading dims padded to NHWC). The result
// carries `quant`.
QuantTensor load_tensor(const std::filesystem::path& path,
                        QuantParams quant = {});

void save_int32_tensor(std::span<const std::uint32_t> dims,
                       std::span<const std::int32_t> values,
                       const std::filesystem::path& path);
std::vector<std::int32_t> load_int32_tensor(const std::filesystem::path& path,
                                            std::vector<std::uint32_t>* dims);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace satconv
