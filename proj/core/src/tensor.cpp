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

#include "satconv/tensor.hpp"

#include <cmath>
#include <string>

#include "satconv/error.hpp"

namespace satconv {

std::string Shape::str() const {
  return std::to_string(n) + "x" + std::to_string(h) + "x" +
         std::to_string(w) + "x" + std::to_string(c);
}

QuantTensor::QuantTensor(Shape shape, QuantParams q)
    : shape_(shape), quant_(q), data_(shape.elements(), 0) {
  validate(shape_, "tensor");
  validate(quant_, "tensor");
}

QuantTensor::QuantTensor(Shape shape, QuantParams q,
                         std::vector<std::int8_t> data)
    : shape_(shape), quant_(q), data_(std::move(data)) {
  validate(shape_, "tensor");
  validate(quant_, "tensor");
  if (data_.size() != shape_.elements()) {
    throw ValidationError("tensor: data length " +
                          std::to_string(data_.size()) + " != " +
                          std::to_string(shape_.elements()) + " for shape " +
                          shape_.str());
  }
}

void validate(const Shape& s, const std::string& where) {
  if (s.n < 1 || s.h < 1 || s.w < 1 || s.c < 1) {
    throw ValidationError(where + ".shape: every dimension must be >= 1, got " +
                          s.str());
  }
}

void validate(const QuantParams& q, const std::string& where) {
  if (!(q.scale > 0.0) || !std::isfinite(q.scale)) {
    throw ValidationError(where + ".scale: must be positive, got " +
                          std::to_string(q.scale));
  }
  if (q.zero_point < -128 || q.zero_point > 127) {
    throw ValidationError(where + ".zero_point: outside int8 range");
  }
}

}  // namespace satconv
