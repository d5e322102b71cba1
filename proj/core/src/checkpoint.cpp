// Copyright 2026 The ASGN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "asgn/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "asgn/errors.hpp"
#include "asgn/rng.hpp"

namespace asgn {

namespace {

constexpr char kMagic[8] = {'A', 'S', 'G', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

class Writer {
 public:
  void raw(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  void u8(std::uint8_t v) { raw(&v, 1); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  void f64s(std::span<const double> v) { raw(v.data(), v.size() * sizeof(double)); }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::string_view bytes, std::string_view source) : bytes_(bytes), source_(source) {}
  void raw(void* p, std::size_t n) {
    if (n > bytes_.size() - pos_) fail("truncated checkpoint");
    std::memcpy(p, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::uint8_t u8() {
    std::uint8_t v;
    raw(&v, 1);
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, 4);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    raw(&v, 8);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    std::string s(n, '\0');
    raw(s.data(), n);
    return s;
  }
  void f64s(std::span<double> out) { raw(out.data(), out.size() * sizeof(double)); }
  std::size_t pos() const { return pos_; }
  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(std::string(source_) + ": " + what + " at byte " + std::to_string(pos_));
  }

 private:
  std::string_view bytes_;
  std::string_view source_;
  std::size_t pos_ = 0;
};

std::string meta_or_throw(const std::map<std::string, std::string>& meta, const std::string& key) {
  auto it = meta.find(key);
  if (it == meta.end()) throw ArchitectureError("checkpoint metadata lacks '" + key + "'");
  return it->second;
}

std::size_t meta_size(const std::map<std::string, std::string>& meta, const std::string& key) {
  const std::string v = meta_or_throw(meta, key);
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ArchitectureError("checkpoint metadata '" + key + "' is not an integer");
  }
  return out;
}

std::vector<std::string> split_commas(std::string_view s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    out.emplace_back(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string encode_doubles(std::span<const double> values) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    auto res = std::to_chars(buf, buf + sizeof(buf), values[i], std::chars_format::hex);
    out.append(buf, res.ptr);
  }
  return out;
}

std::vector<double> decode_doubles(std::string_view text) {
  std::vector<double> out;
  for (const auto& tok : split_commas(text)) {
    std::string_view t = tok;
    bool neg = false;
    if (!t.empty() && t.front() == '-') {
      neg = true;
      t.remove_prefix(1);
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v, std::chars_format::hex);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      // Non-hex fallback for hand-written values.
      auto [p2, ec2] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec2 != std::errc() || p2 != t.data() + t.size()) {
        throw ConfigError("cannot decode number '" + tok + "'");
      }
    }
    out.push_back(neg ? -v : v);
  }
  return out;
}

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  w.u64(ckpt.config_hash);
  w.u32(static_cast<std::uint32_t>(ckpt.vocabulary.size()));
  for (const auto& s : ckpt.vocabulary) w.str(s);
  w.f64(ckpt.grid.start);
  w.f64(ckpt.grid.stop);
  w.f64(ckpt.grid.step);
  w.f64(ckpt.grid.gamma);
  w.u32(static_cast<std::uint32_t>(ckpt.metadata.size()));
  for (const auto& [k, v] : ckpt.metadata) {
    w.str(k);
    w.str(v);
  }
  w.u64(ckpt.params.step());
  w.u8(ckpt.include_optimizer ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(ckpt.params.size()));
  for (const auto& [name, p] : ckpt.params.entries()) {
    w.str(name);
    w.u64(p.value.rows());
    w.u64(p.value.cols());
    w.f64s(p.value.values());
    if (ckpt.include_optimizer) {
      w.f64s(p.first_moment.values());
      w.f64s(p.second_moment.values());
    }
  }
  w.u64(fnv1a64(w.buffer()));
  return std::move(w.buffer());
}

Checkpoint deserialize_checkpoint(std::string_view bytes, std::string_view source) {
  if (bytes.size() < sizeof(kMagic) + 8) throw IoError(std::string(source) + ": not a checkpoint (too short)");
  const std::string_view body = bytes.substr(0, bytes.size() - 8);
  std::uint64_t stored = 0;
  std::memcpy(&stored, bytes.data() + body.size(), 8);
  if (stored != fnv1a64(body)) throw IoError(std::string(source) + ": checkpoint checksum mismatch");

  Reader r(body, source);
  char magic[8];
  r.raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) r.fail("bad magic");
  if (r.u32() != kVersion) r.fail("unsupported checkpoint version");
  Checkpoint c;
  c.config_hash = r.u64();
  const std::uint32_t nv = r.u32();
  for (std::uint32_t i = 0; i < nv; ++i) c.vocabulary.push_back(r.str());
  c.grid.start = r.f64();
  c.grid.stop = r.f64();
  c.grid.step = r.f64();
  c.grid.gamma = r.f64();
  const std::uint32_t nm = r.u32();
  for (std::uint32_t i = 0; i < nm; ++i) {
    std::string k = r.str();
    c.metadata[k] = r.str();
  }
  const std::uint64_t step = r.u64();
  c.include_optimizer = r.u8() != 0;
  const std::uint32_t np = r.u32();
  for (std::uint32_t i = 0; i < np; ++i) {
    const std::string name = r.str();
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    if (rows * cols > (body.size() - r.pos()) / sizeof(double)) r.fail("parameter '" + name + "' overruns file");
    Parameter& p = c.params.add(name, rows, cols);
    r.f64s(p.value.values());
    if (c.include_optimizer) {
      r.f64s(p.first_moment.values());
      r.f64s(p.second_moment.values());
    }
  }
  c.params.set_step(step);
  if (r.pos() != body.size()) r.fail("trailing bytes");
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes, path.string());
}

Checkpoint to_checkpoint(const ModelBundle& model, std::uint64_t config_hash, bool include_optimizer) {
  Checkpoint c;
  c.vocabulary = model.vocabulary.symbols();
  c.grid = model.backbone.grid;
  c.config_hash = config_hash;
  c.include_optimizer = include_optimizer;
  c.params = model.params;
  auto& m = c.metadata;
  m["backbone.dim"] = std::to_string(model.backbone.dim);
  m["backbone.layers"] = std::to_string(model.backbone.layers);
  m["backbone.outputs"] = std::to_string(model.backbone.outputs);
  m["backbone.head_hidden"] = std::to_string(model.backbone.head_hidden);
  m["backbone.readout"] = std::string(to_string(model.backbone.readout));
  m["backbone.activation"] = std::string(to_string(model.backbone.activation));
  m["norm.mean"] = encode_doubles(model.norm.mean);
  m["norm.std"] = encode_doubles(model.norm.stddev);
  std::string props;
  for (const auto& p : model.properties) props += (props.empty() ? "" : ",") + p;
  m["properties"] = props;
  return c;
}

ModelBundle from_checkpoint(const Checkpoint& ckpt) {
  ModelBundle b;
  const auto& m = ckpt.metadata;
  b.vocabulary = AtomVocabulary(ckpt.vocabulary);
  b.backbone.vocab_size = b.vocabulary.size();
  b.backbone.grid = ckpt.grid;
  b.backbone.dim = meta_size(m, "backbone.dim");
  b.backbone.layers = meta_size(m, "backbone.layers");
  b.backbone.outputs = meta_size(m, "backbone.outputs");
  b.backbone.head_hidden = meta_size(m, "backbone.head_hidden");
  b.backbone.readout = readout_from_string(meta_or_throw(m, "backbone.readout"));
  b.backbone.activation = activation_from_string(meta_or_throw(m, "backbone.activation"));
  b.norm.mean = decode_doubles(meta_or_throw(m, "norm.mean"));
  b.norm.stddev = decode_doubles(meta_or_throw(m, "norm.std"));
  b.properties = split_commas(meta_or_throw(m, "properties"));
  b.params = ckpt.params;

  // Shape audit against a freshly laid-out network.
  ParameterSet layout;
  RngStream rng(0);
  Mpgnn(b.backbone).init_parameters(layout, rng);
  for (const auto& [name, p] : layout.entries()) {
    if (!b.params.contains(name)) throw ArchitectureError("checkpoint lacks parameter '" + name + "'");
    if (!b.params.at(name).value.same_shape(p.value)) {
      throw ArchitectureError("checkpoint parameter '" + name + "' has the wrong shape");
    }
  }
  if (b.norm.size() != b.backbone.outputs) throw ArchitectureError("checkpoint normalization width mismatch");
  return b;
}

}  // namespace asgn
