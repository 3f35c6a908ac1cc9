// Copyright 2026 The qnswap Authors
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

#include "qnswap/ctmc.hpp"

namespace qnswap {

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) fail(ErrorCode::InvalidArgument, "state space must not be empty");
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (!index_.emplace(labels_[i], static_cast<Eigen::Index>(i)).second)
      fail(ErrorCode::InvalidArgument, "duplicate state label " + labels_[i]);
}

StateSpace StateSpace::blocking_node() {
  using namespace blocking_state;
  return StateSpace({std::string(kIdle), std::string(kBusy), std::string(kBlocked)});
}

StateSpace StateSpace::occupancy(int capacity) {
  std::vector<std::string> labels;
  for (int level = 0; level <= capacity; ++level) labels.push_back(std::to_string(level));
  return StateSpace(std::move(labels));
}

bool StateSpace::contains(std::string_view label) const {
  return index_.find(std::string(label)) != index_.end();
}

Eigen::Index StateSpace::index(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) fail(ErrorCode::UnknownState, std::string(label));
  return it->second;
}

}  // namespace qnswap
