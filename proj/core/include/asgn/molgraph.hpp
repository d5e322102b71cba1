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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace asgn {

using Vec3 = std::array<double, 3>;

double distance(const Vec3& a, const Vec3& b);

// Unordered atom pair, i < j.
struct Edge {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  double distance = 0.0;  // Angstrom
};

// Complete weighted graph over the atoms, pairs in (i, j) lexicographic
// order. A single atom yields no edges; coincident atoms throw GeometryError.
std::vector<Edge> build_edges(std::span<const Vec3> coordinates);

// Periodic-table lookup; 0 for unknown symbols.
int atomic_number(std::string_view symbol);

// Element symbols present in a dataset, ordered by atomic number. The code of
// an atom is its position in this list.
class AtomVocabulary {
 public:
  AtomVocabulary() = default;
  explicit AtomVocabulary(std::vector<std::string> symbols);

  // H, C, N, O, F.
  static AtomVocabulary qm9();
  // Distinct symbols of the input, sorted by atomic number.
  static AtomVocabulary from_symbols(std::span<const std::string> symbols);

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::string& symbol(int code) const { return symbols_.at(static_cast<std::size_t>(code)); }
  std::optional<int> find(std::string_view symbol) const;
  // Throws ConfigError naming the symbol when absent.
  int code(std::string_view symbol) const;

  friend bool operator==(const AtomVocabulary&, const AtomVocabulary&) = default;

 private:
  std::vector<std::string> symbols_;
};

struct MolecularGraph {
  std::size_t id = 0;
  std::string name;
  std::vector<int> atom_types;  // codes into the dataset vocabulary
  std::vector<Vec3> coordinates;
  std::vector<Edge> edges;

  std::size_t atom_count() const noexcept { return atom_types.size(); }
};

enum class PhysicalUnit { None, Hartree, GHz, Debye, Bohr3, Bohr2, CalPerMolK };

// Hartree -> eV.
inline constexpr double kHartreeToEv = 27.211386;

struct PropertySchema {
  std::vector<std::string> names;
  std::vector<PhysicalUnit> units;

  // A B C mu alpha homo lumo gap r2 zpve U0 U H G Cv.
  static PropertySchema qm9();

  std::size_t size() const noexcept { return names.size(); }
  // Throws ConfigError listing the valid names.
  std::size_t index_of(std::string_view name) const;
  // Factor from the stored unit to the reported unit (eV for Hartree).
  double report_scale(std::size_t index) const;
  std::string report_unit(std::size_t index) const;
};

struct PropertyVector {
  std::vector<double> values;

  friend bool operator==(const PropertyVector&, const PropertyVector&) = default;
};

// One QM9 extended-XYZ file, as written on disk.
struct Qm9Record {
  std::string tag = "gdb";
  long index = 0;
  std::vector<std::string> symbols;
  std::vector<Vec3> coordinates;
  std::vector<double> charges;
  PropertyVector properties;  // 15 scalars in QM9 order

  friend bool operator==(const Qm9Record&, const Qm9Record&) = default;
};

inline constexpr std::size_t kQm9PropertyCount = 15;

// Parses the QM9 layout: atom count, property line, atom lines, ignored
// trailer. Accepts Mathematica-style "1.2*^-2" exponents. Errors are
// ParseError carrying the 1-based line number.
Qm9Record parse_qm9_xyz(std::istream& in, std::string_view source = "<stream>");
Qm9Record parse_qm9_xyz(std::string_view text, std::string_view source = "<string>");
Qm9Record read_qm9_file(const std::filesystem::path& path);

// Canonical serialization: shortest round-trip decimal for every scalar, no
// trailer. parse(write(r)) == r.
std::string write_qm9_xyz(const Qm9Record& record);

// Rewrites "*^" to "e" and parses a full double; throws std::invalid_argument.
double parse_qm9_number(std::string_view token);

// Record -> graph (codes + complete edge set).
MolecularGraph make_graph(const Qm9Record& record, const AtomVocabulary& vocab, std::size_t id);

}  // namespace asgn
