/*
 * Copyright 2026 The cdp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CDP_CDP_HPP_
#define CDP_CDP_HPP_

// Convenience header pulling in the whole library (except the CLI layer).

#include "cdp/baselines.hpp"
#include "cdp/core.hpp"
#include "cdp/dcsbm.hpp"
#include "cdp/evaluation.hpp"
#include "cdp/graph_core.hpp"
#include "cdp/io.hpp"
#include "cdp/pipeline.hpp"
#include "cdp/procrustes.hpp"
#include "cdp/spectral.hpp"

#endif  // CDP_CDP_HPP_
