// Copyright 2026 The QRA Lab Authors
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

#include "qra/rng.hpp"
#include "qra/sim_core.hpp"
#include "qra/noise.hpp"
#include "qra/features.hpp"
#include "qra/readout.hpp"
#include "qra/reservoir.hpp"
#include "qra/protocol.hpp"
#include "qra/baselines.hpp"
#include "qra/stats.hpp"
#include "qra/serialization.hpp"
#include "qra/harness.hpp"
#include "qra/selftest.hpp"
