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

#ifndef LDPTEXT_ACCOUNTANT_H_
#define LDPTEXT_ACCOUNTANT_H_

#include <optional>

#include "ldptext/types.h"

namespace ldptext {

// Document-level privacy loss of n_tokens decoding steps, each an
// exponential-mechanism draw over logits clipped to 'bounds' and divided by
// 'temperature'. One step costs at most 2 * width / T (the softmax numerator
// and the normalizer each move by at most exp(width / T)); steps compose
// sequentially.
//
//   epsilon = 2 * n_tokens * bounds.width() / temperature
//
// Throws InvalidParameterError for temperature <= 0 or n_tokens < 1.
double EpsilonFor(const ClipBounds& bounds, double temperature, int n_tokens);

// Epsilon attached to a decode run: unbounded when clipping is disabled or
// top-k filtering was applied.
Epsilon DecodeEpsilon(const std::optional<ClipBounds>& bounds,
                      double temperature, int n_tokens, bool top_k_applied);

}  // namespace ldptext

#endif  // LDPTEXT_ACCOUNTANT_H_
