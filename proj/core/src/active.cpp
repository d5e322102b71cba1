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

#include "asgn/active.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asgn/errors.hpp"

namespace asgn {

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::size_t> ids, Tensor2 rows)
    : ids_(std::move(ids)), rows_(std::move(rows)) {
  if (ids_.size() != rows_.rows()) throw ShapeError("EmbeddingMatrix: one row per id required");
  check_finite(rows_, "embedding matrix");
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    if (!index_.emplace(ids_[r], r).second) throw SelectionError("EmbeddingMatrix: duplicate id");
  }
}

std::span<const double> EmbeddingMatrix::row_of(std::size_t id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw SelectionError("no embedding for molecule " + std::to_string(id));
  return rows_.row(it->second);
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return std::sqrt(s);
}

std::vector<double> min_dist_to_set(const EmbeddingMatrix& embs, std::span<const std::size_t> candidates,
                                    std::span<const std::size_t> reference) {
  if (reference.empty()) throw SelectionError("min_dist_to_set: empty reference set");
  std::vector<std::span<const double>> ref;
  ref.reserve(reference.size());
  for (std::size_t id : reference) ref.push_back(embs.row_of(id));
  std::vector<double> out(candidates.size(), std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto x = embs.row_of(candidates[c]);
    for (const auto& r : ref) out[c] = std::min(out[c], euclidean(x, r));
  }
  return out;
}

SelectionBatch k_center_select(const EmbeddingMatrix& embs, std::span<const std::size_t> labeled,
                               std::span<const std::size_t> unlabeled, std::size_t b) {
  if (b > unlabeled.size()) {
    throw SelectionError("k-center: batch of " + std::to_string(b) + " exceeds the " +
                         std::to_string(unlabeled.size()) + " unlabeled molecules");
  }
  if (labeled.empty()) {
    throw SelectionError("k-center: labeled pool is empty; seed the first batch with random selection");
  }
  std::vector<std::size_t> cand(unlabeled.begin(), unlabeled.end());
  std::sort(cand.begin(), cand.end());
  std::vector<double> dist = min_dist_to_set(embs, cand, labeled);
  std::vector<char> taken(cand.size(), 0);
  std::vector<std::span<const double>> rows;
  rows.reserve(cand.size());
  for (std::size_t id : cand) rows.push_back(embs.row_of(id));

  SelectionBatch out;
  out.ids.reserve(b);
  out.radii.reserve(b);
  for (std::size_t t = 0; t < b; ++t) {
    std::size_t best = cand.size();
    for (std::size_t c = 0; c < cand.size(); ++c) {
      if (taken[c]) continue;
      // Strict '>' keeps the lowest id on ties since cand is sorted.
      if (best == cand.size() || dist[c] > dist[best]) best = c;
    }
    taken[best] = 1;
    out.ids.push_back(cand[best]);
    out.radii.push_back(dist[best]);
    const auto picked = rows[best];
    for (std::size_t c = 0; c < cand.size(); ++c) {
      if (!taken[c]) dist[c] = std::min(dist[c], euclidean(rows[c], picked));
    }
  }
  return out;
}

SelectionBatch random_select(std::span<const std::size_t> unlabeled, std::size_t b, RngStream& rng) {
  if (b > unlabeled.size()) {
    throw SelectionError("random selection: batch of " + std::to_string(b) + " exceeds the " +
                         std::to_string(unlabeled.size()) + " unlabeled molecules");
  }
  std::vector<std::size_t> sorted(unlabeled.begin(), unlabeled.end());
  std::sort(sorted.begin(), sorted.end());
  SelectionBatch out;
  for (std::size_t idx : rng.sample_without_replacement(sorted.size(), b)) out.ids.push_back(sorted[idx]);
  return out;
}

}  // namespace asgn
