// Copyright 2026 The UniGrad Authors.
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

#ifndef UNIGRAD_UNIGRAD_HPP_
#define UNIGRAD_UNIGRAD_HPP_

#include "unigrad/algorithms.hpp"
#include "unigrad/base_learners.hpp"
#include "unigrad/cli.hpp"
#include "unigrad/common.hpp"
#include "unigrad/environments.hpp"
#include "unigrad/geometry.hpp"
#include "unigrad/losses.hpp"
#include "unigrad/meta_adaptprod.hpp"
#include "unigrad/meta_msmwc.hpp"
#include "unigrad/metrics.hpp"
#include "unigrad/rng.hpp"
#include "unigrad/runner.hpp"

#endif  // UNIGRAD_UNIGRAD_HPP_
