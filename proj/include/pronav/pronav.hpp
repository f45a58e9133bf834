// Copyright 2026 The pronav Authors.
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

#include "pronav/calibration.hpp"
#include "pronav/commands.hpp"
#include "pronav/config.hpp"
#include "pronav/errors.hpp"
#include "pronav/features.hpp"
#include "pronav/fusion.hpp"
#include "pronav/gait_policy.hpp"
#include "pronav/metrics.hpp"
#include "pronav/pipeline.hpp"
#include "pronav/plot.hpp"
#include "pronav/profile.hpp"
#include "pronav/projection.hpp"
#include "pronav/safety.hpp"
#include "pronav/simulator.hpp"
#include "pronav/telemetry.hpp"
#include "pronav/terrain_model.hpp"
#include "pronav/types.hpp"
