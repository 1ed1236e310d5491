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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace satconv {

// NHWC dimensions, each >= 1.
struct Shape {
  int n = 1;
  int h = 1;
  int w = 1;
  int c = 1;

  std::size_t elements() const {
    return static_cast<std::size_t>(n) * h * w * c;
  }
  std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

struct QuantParams {
  double scale = 1.0;
  std::int32_t zero_point = 0;

  friend bool operator==(const QuantParams&, const QuantParams&) = default;
};

// int8 tensor with per-tensor affine quantization. Row-major NHWC.
class QuantTensor {
 public:
  QuantTensor() = default;
  QuantTensor(Shape shape, QuantParams q);
  QuantTensor(Shape shape, QuantParams q, std::vector<std::int8_t> data);

  const Shape& shape() const { return shape_; }
  const QuantParams& quant() const { return quant_; }
  std::span<const std::int8_t> data() const { return data_; }
  std::span<std::int8_t> data() { return data_; }

  std::size_t offset(int n, int y, int x, int c) const {
    return ((static_cast<std::size_t>(n) * shape_.h + y) * shape_.w + x) *
               shape_.c +
           c;
  }
  std::int8_t at(int n, int y, int x, int c) const {
    return data_[offset(n, y, x, c)];
  }
  std::int8_t& at(int n, int y, int x, int c) {
    return data_[offset(n, y, x, c)];
  }

  friend bool operator==(const QuantTensor&, const QuantTensor&) = default;

 private:
  Shape shape_;
  QuantParams quant_;
  std::vector<std::int8_t> data_;
};

// Throws ValidationError naming the offending field.
void validate(const Shape& s, const std::string& where);
void validate(const QuantParams& q, const std::string& where);

}  // namespace satconv
