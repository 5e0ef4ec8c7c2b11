/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#pragma once

#include <illusion/synthdata.hpp>

#include <string>
#include <vector>

namespace illusion::harness::presets {

/// Named two-class Gaussian populations usable from configuration files.
///
///   delta2           2D, mu0 = (0,0), mu1 = (2,0), identity covariance,
///                    equal priors. Bayes error 0.1587.
///   delta2-prior07   Same geometry with class-1 prior 0.7.
///   dr-gauss3        3D, mu0 = (0,0,0), mu1 = (2,0,0), identity covariance,
///                    equal priors. Two noise coordinates reward restraint.
///
/// Unknown names raise ConfigurationError listing the catalogue.
synth::GaussianClassSpec gaussian(const std::string& name);
std::vector<std::string> gaussian_names();

/// Named drift scenarios usable from configuration files.
///
///   stationary-control   delta2 population, zero drift, 60 batches of 400
///                        rows. Performance over time should show no trend.
///   mean-drift           delta2 population, class-1 mean moving at
///                        (0.03, 0) per batch, 80 batches of 500 rows.
///                        A frozen rule decays monotonically in expectation.
///   crossing-v1          Single standard-normal blob with labels defined by
///                        a moving threshold on min(x1, x2) while the class-1
///                        mean drifts along (v, -v). Early on, the boundary
///                        is a corner that a small tree fits better than a
///                        linear rule; late batches favour the linear rule,
///                        so the two cost curves cross. 5 percent label
///                        noise.
synth::DriftScenario drift(const std::string& name);
std::vector<std::string> drift_names();

} // namespace illusion::harness::presets
