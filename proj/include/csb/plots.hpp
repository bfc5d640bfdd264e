// Copyright 2026 The CSB Authors
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

#ifndef CSB_PLOTS_HPP
#define CSB_PLOTS_HPP

#include <span>
#include <string>
#include <vector>

#include "csb/estimation.hpp"
#include "csb/fitting.hpp"
#include "csb/protocol.hpp"

namespace csb {

/// a,b,L,p_hat,six_term[,matrix_pencil]
std::string curves_csv(std::span<const DecayCurve> curves, std::span<const ExponentialFit> fits,
                       std::span<const ExponentialFit> baseline);

/// One row per fitted term with polar coordinates and the filter verdict.
std::string eigenvalues_csv(std::span<const FilteredEigenvalue> eigenvalues);

/// bin_low,bin_high,count over the bootstrap means.
std::string histogram_csv(std::span<const double> samples, int bins = 40);

/// Grid of small panels, data as dots and the fitted model as a line.
std::string curves_svg(std::span<const DecayCurve> curves, std::span<const ExponentialFit> fits);

/// Unit disk with ideal values, rejected terms and kept terms.
std::string polar_svg(std::span<const FilteredEigenvalue> eigenvalues);

/// Bootstrap histogram with the interval ends and optional reference lines.
std::string histogram_svg(const FidelityReport& report);

}  // namespace csb

#endif  // CSB_PLOTS_HPP
