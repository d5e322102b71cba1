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

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include "asgn/rng.hpp"
#include "asgn/tensor.hpp"

namespace asgn {

// Graph embeddings keyed by molecule id; row r belongs to ids[r].
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::vector<std::size_t> ids, Tensor2 rows);

  const std::vector<std::size_t>& ids() const noexcept { return ids_; }
  const Tensor2& rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return rows_.cols(); }
  bool contains(std::size_t id) const { return index_.contains(id); }
  std::span<const double> row_of(std::size_t id) const;

 private:
  std::vector<std::size_t> ids_;
  Tensor2 rows_;
  std::unordered_map<std::size_t, std::size_t> index_;
};

struct SelectionBatch {
  std::vector<std::size_t> ids;  // pick order
  std::vector<double> radii;     // min distance at pick time; empty for random picks
};

double euclidean(std::span<const double> a, std::span<const double> b);

// Exact min Euclidean distance from each candidate to the reference set.
// Throws SelectionError for an empty reference set.
std::vector<double> min_dist_to_set(const EmbeddingMatrix& embs, std::span<const std::size_t> candidates,
                                    std::span<const std::size_t> reference);

// Greedy k-center: each pick maximizes the min distance to labeled plus
// already-picked points, ties to the lowest molecule id.
SelectionBatch k_center_select(const EmbeddingMatrix& embs, std::span<const std::size_t> labeled,
                               std::span<const std::size_t> unlabeled, std::size_t b);

// Uniform sample without replacement.
SelectionBatch random_select(std::span<const std::size_t> unlabeled, std::size_t b, RngStream& rng);

}  // namespace asgn
