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

#include "raindoa/core.hpp"

namespace raindoa {

/// Uniform linear array geometry. Element spacing is given in wavelengths.
struct ArrayConfig {
    int n_elements = 8;
    double spacing = 0.5;       // d0 / lambda0
    double wavelength_m = 0.0039; // 77 GHz carrier

    void validate() const
    {
        if (n_elements < 2)
            throw DomainError("ArrayConfig: need at least 2 elements");
        if (!(spacing > 0.0))
            throw DomainError("ArrayConfig: spacing must be positive");
        if (!(wavelength_m > 0.0))
            throw DomainError("ArrayConfig: wavelength must be positive");
    }

    double aperture_wavelengths() const { return (n_elements - 1) * spacing; }

    // The empirical decorrelation model is only fitted up to 8 wavelengths of separation.
    bool exceeds_model_aperture() const { return aperture_wavelengths() > 8.0; }

    // Below half-wavelength spacing some root phases cannot be mapped back to an angle.
    bool root_mapping_restricted() const { return spacing < 0.5; }
};

} // namespace raindoa
