// Copyright 2026 The ncergo Authors
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

#include <string>
#include <vector>

namespace ncergo {

/// One named numerical check: the residual found and the tolerance it was
/// held to.
struct ResidualRecord {
  std::string check;
  std::vector<int> indices;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline ResidualRecord make_record(std::string check, std::vector<int> indices,
                                  double residual, double tolerance) {
  return {std::move(check), std::move(indices), residual, tolerance,
          residual <= tolerance};
}

}  // namespace ncergo
