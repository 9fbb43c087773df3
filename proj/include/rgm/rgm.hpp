// Copyright 2026 The RGM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Umbrella header for the RGM toolkit.
#pragma once

#include "rgm/accountant.hpp"
#include "rgm/errors.hpp"
#include "rgm/fedsim.hpp"
#include "rgm/generators.hpp"
#include "rgm/libsvm.hpp"
#include "rgm/linalg.hpp"
#include "rgm/mechanisms.hpp"
#include "rgm/numerics.hpp"
#include "rgm/optim.hpp"
#include "rgm/quadratic.hpp"
#include "rgm/rng.hpp"
#include "rgm/sensitivity.hpp"
#include "rgm/serialize.hpp"
#include "rgm/verify.hpp"
