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

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "asgn/errors.hpp"
#include "asgn/molgraph.hpp"

namespace asgn {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

void append_number(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

double parse_qm9_number(std::string_view token) {
  std::string text(token);
  if (auto pos = text.find("*^"); pos != std::string::npos) text.replace(pos, 2, "e");
  if (!text.empty() && text.front() == '+') text.erase(0, 1);
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw std::invalid_argument("not a number: '" + std::string(token) + "'");
  }
  return v;
}

Qm9Record parse_qm9_xyz(std::istream& in, std::string_view source) {
  const std::string src(source);
  std::size_t line_no = 0;
  std::string line;
  auto next_line = [&](const char* what) -> std::string& {
    ++line_no;
    if (!std::getline(in, line)) throw ParseError(src, line_no, std::string("missing ") + what);
    return line;
  };

  Qm9Record rec;

  auto count_fields = split_ws(next_line("atom count line"));
  long n_atoms = 0;
  if (count_fields.size() != 1) throw ParseError(src, line_no, "atom count line must hold a single integer");
  {
    auto f = count_fields[0];
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), n_atoms);
    if (ec != std::errc() || ptr != f.data() + f.size() || n_atoms <= 0) {
      throw ParseError(src, line_no, "malformed atom count '" + std::string(f) + "'");
    }
  }

  auto props = split_ws(next_line("property line"));
  if (props.size() != 2 + kQm9PropertyCount) {
    const long found = static_cast<long>(props.size()) - 2;
    throw ParseError(src, line_no,
                     "expected tag, index and " + std::to_string(kQm9PropertyCount) +
                         " property values, found " + std::to_string(found < 0 ? 0 : found) + " values");
  }
  rec.tag = std::string(props[0]);
  {
    auto f = props[1];
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), rec.index);
    if (ec != std::errc() || ptr != f.data() + f.size()) {
      throw ParseError(src, line_no, "malformed molecule index '" + std::string(f) + "'");
    }
  }
  rec.properties.values.reserve(kQm9PropertyCount);
  for (std::size_t k = 0; k < kQm9PropertyCount; ++k) {
    try {
      rec.properties.values.push_back(parse_qm9_number(props[2 + k]));
    } catch (const std::invalid_argument&) {
      throw ParseError(src, line_no, "non-numeric property value '" + std::string(props[2 + k]) + "'");
    }
  }

  for (long a = 0; a < n_atoms; ++a) {
    auto fields = split_ws(next_line("atom line"));
    if (fields.size() != 5) {
      throw ParseError(src, line_no,
                       "atom line must be 'symbol x y z charge', found " + std::to_string(fields.size()) +
                           " fields");
    }
    if (atomic_number(fields[0]) == 0) {
      throw ParseError(src, line_no, "unknown element symbol '" + std::string(fields[0]) + "'");
    }
    Vec3 r{};
    double q = 0.0;
    try {
      for (int k = 0; k < 3; ++k) r[k] = parse_qm9_number(fields[1 + k]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(src, line_no, std::string("non-numeric coordinate: ") + e.what());
    }
    try {
      q = parse_qm9_number(fields[4]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(src, line_no, std::string("non-numeric charge: ") + e.what());
    }
    rec.symbols.emplace_back(fields[0]);
    rec.coordinates.push_back(r);
    rec.charges.push_back(q);
  }
  // Frequencies, SMILES and InChI lines follow; they are not used.
  return rec;
}

Qm9Record parse_qm9_xyz(std::string_view text, std::string_view source) {
  std::istringstream in{std::string(text)};
  return parse_qm9_xyz(in, source);
}

Qm9Record read_qm9_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_qm9_xyz(in, path.string());
}

std::string write_qm9_xyz(const Qm9Record& record) {
  std::string out;
  out += std::to_string(record.symbols.size());
  out += '\n';
  out += record.tag;
  out += ' ';
  out += std::to_string(record.index);
  for (double v : record.properties.values) {
    out += '\t';
    append_number(out, v);
  }
  out += '\n';
  for (std::size_t a = 0; a < record.symbols.size(); ++a) {
    out += record.symbols[a];
    for (double c : record.coordinates[a]) {
      out += '\t';
      append_number(out, c);
    }
    out += '\t';
    append_number(out, a < record.charges.size() ? record.charges[a] : 0.0);
    out += '\n';
  }
  return out;
}

}  // namespace asgn
