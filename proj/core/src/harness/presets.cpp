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
#include <illusion/errors.hpp>
#include <illusion/presets.hpp>

namespace illusion::harness::presets {

namespace {

std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += names[i];
    }
    return out;
}

synth::GaussianClassSpec two_gaussians(double separation, double prior1) {
    Eigen::VectorXd mean0 = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd mean1 = Eigen::VectorXd::Zero(2);
    mean1(0) = separation;
    return {mean0, mean1, Eigen::MatrixXd::Identity(2, 2), prior1};
}

} // namespace

std::vector<std::string> gaussian_names() {
    return {"delta2", "delta2-prior07", "dr-gauss3"};
}

synth::GaussianClassSpec gaussian(const std::string& name) {
    if (name == "delta2") {
        return two_gaussians(2.0, 0.5);
    }
    if (name == "delta2-prior07") {
        return two_gaussians(2.0, 0.7);
    }
    if (name == "dr-gauss3") {
        Eigen::VectorXd mean0 = Eigen::VectorXd::Zero(3);
        Eigen::VectorXd mean1 = Eigen::VectorXd::Zero(3);
        mean1(0) = 2.0;
        return {mean0, mean1, Eigen::MatrixXd::Identity(3, 3), 0.5};
    }
    throw ConfigurationError("unknown population preset '" + name + "' (available: " +
                             join(gaussian_names()) + ")");
}

std::vector<std::string> drift_names() {
    return {"stationary-control", "mean-drift", "crossing-v1"};
}

synth::DriftScenario drift(const std::string& name) {
    if (name == "stationary-control") {
        synth::DriftScenario scenario{two_gaussians(2.0, 0.5),
                                      Eigen::VectorXd::Zero(2)};
        scenario.steps = 60;
        scenario.batch_size = 400;
        scenario.label_noise_delta = 0.1;
        return scenario;
    }
    if (name == "mean-drift") {
        Eigen::VectorXd velocity(2);
        velocity << 0.03, 0.0;
        synth::DriftScenario scenario{two_gaussians(2.0, 0.5), velocity};
        scenario.steps = 80;
        scenario.batch_size = 500;
        return scenario;
    }
    if (name == "crossing-v1") {
        // A single standard-normal blob whose labels come from thresholding
        // min(x1, x2): class 1 sits in the upper-right corner region. The
        // blob drifts along (v, -v) while the threshold falls at the same
        // rate, so relative to the blob the x2 arm of the corner stays put
        // and the x1 arm recedes; the boundary degrades into a half-plane a
        // frozen axis-aligned rule misplaces but a frozen linear rule
        // tolerates (its normal is orthogonal to the drift).
        const double v = 0.04;
        const double corner = -0.6;
        const int steps = 110;
        Eigen::VectorXd velocity(2);
        velocity << v, -v;
        synth::DriftScenario scenario{two_gaussians(0.0, 0.5), velocity};
        scenario.drift_mu0 = true;
        scenario.steps = steps;
        scenario.batch_size = 400;
        scenario.label_noise_delta = 0.05;
        scenario.latent = synth::LatentKind::min_coordinate;
        scenario.redefinition_path.resize(static_cast<std::size_t>(steps));
        for (int t = 0; t < steps; ++t) {
            scenario.redefinition_path[static_cast<std::size_t>(t)] = corner - v * t;
        }
        return scenario;
    }
    throw ConfigurationError("unknown drift preset '" + name + "' (available: " +
                             join(drift_names()) + ")");
}

} // namespace illusion::harness::presets
