// SPDX-License-Identifier: Apache-2.0
//
// raindoa: direction finding for uniform linear arrays under rain-induced distortion
// Copyright (C) 2026 The raindoa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#pragma once

#include "raindoa/array_sim.hpp"
#include "raindoa/core.hpp"
#include "raindoa/distortion_model.hpp"
#include "raindoa/doa_estimators.hpp"
#include "raindoa/experiment.hpp"
#include "raindoa/ht_calibration.hpp"
#include "raindoa/io.hpp"
