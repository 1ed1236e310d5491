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

#include "satconv/io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "satconv/error.hpp"

namespace satconv {

using json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char ch) {
  if (ch >= 'A' && ch <= 'Z') return ch - 'A';
  if (ch >= 'a' && ch <= 'z') return ch - 'a' + 26;
  if (ch >= '0' && ch <= '9') return ch - '0' + 52;
  if (ch == '+') return 62;
  if (ch == '/') return 63;
  return -1;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b) {
  return static_cast<std::uint32_t>(b[0]) |
         static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 |
         static_cast<std::uint32_t>(b[3]) << 24;
}

json shape_json(const Shape& s) { return json::array({s.n, s.h, s.w, s.c}); }

json tensor_spec_json(const Shape& s, const QuantParams& q) {
  json j;
  j["shape"] = shape_json(s);
  j["scale"] = q.scale;
  j["zero_point"] = q.zero_point;
  return j;
}

Shape shape_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) {
    throw FormatError(where + ".shape: expected [N, H, W, C]");
  }
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

QuantParams quant_from(const json& j) {
  return {j.at("scale").get<double>(), j.at("zero_point").get<std::int32_t>()};
}

std::string padding_name(Padding p) {
  return p == Padding::kSame ? "same" : "valid";
}

Padding parse_padding(const std::string& s, const std::string& where) {
  if (s == "same") return Padding::kSame;
  if (s == "valid") return Padding::kValid;
  throw FormatError(where + ".padding: unknown value '" + s + "'");
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_binary_file(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v = bytes[i] << 16 | bytes[i + 1] << 8 | bytes[i + 2];
    out += kAlphabet[v >> 18];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[v >> 18];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = bytes[i] << 16 | bytes[i + 1] << 8;
    out += kAlphabet[v >> 18];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) {
    throw FormatError("base64: length is not a multiple of 4");
  }
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    int pad = 0;
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) {
      const char ch = text[i + k];
      int d = 0;
      if (ch == '=' && last && k >= 2) {
        ++pad;
      } else {
        if (pad > 0) throw FormatError("base64: data after padding");
        d = decode_char(ch);
        if (d < 0) throw FormatError("base64: invalid character");
      }
      v = v << 6 | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(v >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v));
  }
  return out;
}

std::string model_to_json(const Model& model) {
  json root;
  root["version"] = kModelFormatVersion;
  root["name"] = model.name;
  root["preset"] = model.preset;
  root["seed"] = model.seed;
  root["input"] = tensor_spec_json(model.input_shape, model.input_quant);
  json layers = json::array();
  for (const LayerSpec& l : model.layers) {
    json j;
    j["kind"] = std::string(to_string(l.kind));
    if (l.kind != LayerKind::kFullyConnected && l.kind != LayerKind::kReduceMax) {
      j["kernel"] = json::array({l.geometry.kernel_h, l.geometry.kernel_w});
      j["stride"] = l.geometry.stride;
      j["padding"] = padding_name(l.geometry.padding);
    }
    j["output"] = tensor_spec_json(l.output_shape, l.output_quant);
    if (is_accumulating(l.kind)) {
      json rq = json::array();
      for (const RequantParams& p : l.requant) {
        rq.push_back({{"M", p.multiplier},
                      {"s", p.shift},
                      {"zo", p.zero_point},
                      {"q_lo", p.q_lo},
                      {"q_hi", p.q_hi}});
      }
      j["requant"] = std::move(rq);
      std::vector<std::uint8_t> wbytes(l.weights.size());
      std::memcpy(wbytes.data(), l.weights.data(), wbytes.size());
      j["weights_b64"] = base64_encode(wbytes);
      std::vector<std::uint8_t> bbytes;
      bbytes.reserve(4 * l.bias.size());
      for (std::int32_t b : l.bias) put_u32(bbytes, static_cast<std::uint32_t>(b));
      j["bias_b64"] = base64_encode(bbytes);
    }
    layers.push_back(std::move(j));
  }
  root["layers"] = std::move(layers);
  return root.dump(1) + "\n";
}

Model model_from_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  Model model;
  try {
    if (root.at("version").get<int>() != kModelFormatVersion) {
      throw FormatError("version: unsupported model format version");
    }
    model.name = root.at("name").get<std::string>();
    model.preset = root.value("preset", "");
    model.seed = root.value("seed", std::uint64_t{0});
    const json& in = root.at("input");
    model.input_shape = shape_from(in.at("shape"), "input");
    model.input_quant = quant_from(in);

    Shape shape = model.input_shape;
    QuantParams quant = model.input_quant;
    const json& layers = root.at("layers");
    if (!layers.is_array()) throw FormatError("layers: expected an array");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const json& j = layers[i];
      const std::string ctx = "layers[" + std::to_string(i) + "]";
      LayerSpec l;
      l.kind = parse_layer_kind(j.at("kind").get<std::string>());
      if (j.contains("kernel")) {
        const json& k = j.at("kernel");
        if (!k.is_array() || k.size() != 2) {
          throw FormatError(ctx + ".kernel: expected [kh, kw]");
        }
        l.geometry.kernel_h = k[0].get<int>();
        l.geometry.kernel_w = k[1].get<int>();
        l.geometry.stride = j.value("stride", 1);
        l.geometry.padding =
            parse_padding(j.value("padding", std::string("valid")), ctx);
      }
      l.input_shape = shape;
      l.input_quant = quant;
      const json& out = j.at("output");
      l.output_shape = shape_from(out.at("shape"), ctx + ".output");
      l.output_quant = quant_from(out);
      if (is_accumulating(l.kind)) {
        for (const json& p : j.at("requant")) {
          l.requant.push_back({p.at("M").get<std::int32_t>(),
                               p.at("s").get<int>(),
                               p.at("zo").get<std::int32_t>(),
                               p.at("q_lo").get<std::int32_t>(),
                               p.at("q_hi").get<std::int32_t>()});
        }
        std::vector<std::uint8_t> wbytes;
        std::vector<std::uint8_t> bbytes;
        try {
          wbytes = base64_decode(j.at("weights_b64").get<std::string>());
          bbytes = base64_decode(j.at("bias_b64").get<std::string>());
        } catch (const FormatError& e) {
          throw FormatError(ctx + ": " + e.what());
        }
        l.weights.resize(wbytes.size());
        std::memcpy(l.weights.data(), wbytes.data(), wbytes.size());
        if (bbytes.size() % 4 != 0) {
          throw FormatError(ctx + ".bias_b64: length " +
                            std::to_string(bbytes.size()) +
                            " is not a multiple of 4");
        }
        for (std::size_t b = 0; b < bbytes.size(); b += 4) {
          l.bias.push_back(static_cast<std::int32_t>(
              get_u32(std::span<const std::uint8_t>(bbytes).subspan(b, 4))));
        }
      }
      shape = l.output_shape;
      quant = l.output_quant;
      model.layers.push_back(std::move(l));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  validate(model);
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  write_text_file(path, model_to_json(model));
}

Model load_model(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return model_from_json(text);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_tensor_file(const TensorFile& file) {
  std::vector<std::uint8_t> out = {'S', 'A', 'C', 'T'};
  out.push_back(kTensorFormatVersion);
  out.push_back(static_cast<std::uint8_t>(file.dtype));
  out.push_back(static_cast<std::uint8_t>(file.dims.size()));
  for (std::uint32_t d : file.dims) put_u32(out, d);
  out.insert(out.end(), file.payload.begin(), file.payload.end());
  return out;
}

TensorFile decode_tensor_file(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 7 || std::memcmp(bytes.data(), "SACT", 4) != 0) {
    throw FormatError("tensor: bad magic");
  }
  if (bytes[4] != kTensorFormatVersion) {
    throw FormatError("tensor: unsupported version " + std::to_string(bytes[4]));
  }
  TensorFile file;
  if (bytes[5] > 1) throw FormatError("tensor: unknown dtype " + std::to_string(bytes[5]));
  file.dtype = static_cast<TensorDType>(bytes[5]);
  const std::size_t ndim = bytes[6];
  std::size_t pos = 7;
  if (bytes.size() < pos + 4 * ndim) throw FormatError("tensor: truncated header");
  std::size_t count = 1;
  for (std::size_t i = 0; i < ndim; ++i, pos += 4) {
    file.dims.push_back(get_u32(bytes.subspan(pos, 4)));
    count *= file.dims.back();
  }
  const std::size_t elem = file.dtype == TensorDType::kInt8 ? 1 : 4;
  if (bytes.size() - pos != count * elem) {
    throw FormatError("tensor: payload length " + std::to_string(bytes.size() - pos) +
                      " does not match dims product " + std::to_string(count) +
                      " x " + std::to_string(elem));
  }
  file.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return file;
}

void save_tensor(const QuantTensor& t, const std::filesystem::path& path) {
  TensorFile file;
  const Shape& s = t.shape();
  file.dims = {static_cast<std::uint32_t>(s.n), static_cast<std::uint32_t>(s.h),
               static_cast<std::uint32_t>(s.w), static_cast<std::uint32_t>(s.c)};
  file.payload.resize(t.data().size());
  std::memcpy(file.payload.data(), t.data().data(), file.payload.size());
  write_binary_file(path, encode_tensor_file(file));
}

QuantTensor load_tensor(const std::filesystem::path& path, QuantParams quant) {
  const std::vector<std::uint8_t> bytes = read_binary_file(path);
  TensorFile file;
  try {
    file = decode_tensor_file(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (file.dtype != TensorDType::kInt8) {
    throw FormatError(path.string() + ": tensor: expected dtype int8");
  }
  if (file.dims.empty() || file.dims.size() > 4) {
    throw FormatError(path.string() + ": tensor: rank must be 1..4");
  }
  std::array<int, 4> nhwc = {1, 1, 1, 1};
  const std::size_t lead = 4 - file.dims.size();
  for (std::size_t i = 0; i < file.dims.size(); ++i) {
    nhwc[lead + i] = static_cast<int>(file.dims[i]);
  }
  std::vector<std::int8_t> data(file.payload.size());
  std::memcpy(data.data(), file.payload.data(), data.size());
  return QuantTensor({nhwc[0], nhwc[1], nhwc[2], nhwc[3]}, quant, std::move(data));
}

void save_int32_tensor(std::span<const std::uint32_t> dims,
                       std::span<const std::int32_t> values,
                       const std::filesystem::path& path) {
  TensorFile file;
  file.dtype = TensorDType::kInt32;
  file.dims.assign(dims.begin(), dims.end());
  for (std::int32_t v : values) put_u32(file.payload, static_cast<std::uint32_t>(v));
  write_binary_file(path, encode_tensor_file(file));
}

std::vector<std::int32_t> load_int32_tensor(const std::filesystem::path& path,
                                            std::vector<std::uint32_t>* dims) {
  const std::vector<std::uint8_t> bytes = read_binary_file(path);
  TensorFile file;
  try {
    file = decode_tensor_file(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (file.dtype != TensorDType::kInt32) {
    throw FormatError(path.string() + ": tensor: expected dtype int32");
  }
  if (dims != nullptr) *dims = file.dims;
  std::vector<std::int32_t> values;
  for (std::size_t i = 0; i < file.payload.size(); i += 4) {
    values.push_back(static_cast<std::int32_t>(
        get_u32(std::span<const std::uint8_t>(file.payload).subspan(i, 4))));
  }
  return values;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

}  // namespace satconv
