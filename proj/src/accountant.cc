//
// Copyright 2026 The ldptext Authors
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
//

#include "ldptext/accountant.h"

#include <cmath>

#include "ldptext/errors.h"

namespace ldptext {

double EpsilonFor(const ClipBounds& bounds, double temperature, int n_tokens) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidParameterError("temperature must be positive");
  }
  if (n_tokens < 1) {
    throw InvalidParameterError("n_tokens must be >= 1");
  }
  return 2.0 * static_cast<double>(n_tokens) * bounds.width() / temperature;
}

Epsilon DecodeEpsilon(const std::optional<ClipBounds>& bounds,
                      double temperature, int n_tokens, bool top_k_applied) {
  if (!bounds.has_value() || top_k_applied) {
    // Still validate the arguments so bad configs fail the same way.
    EpsilonFor(ClipBounds::Scalar(0, 0, 0), temperature, n_tokens);
    return Epsilon::Unbounded();
  }
  return Epsilon::Of(EpsilonFor(*bounds, temperature, n_tokens));
}

}  // namespace ldptext
