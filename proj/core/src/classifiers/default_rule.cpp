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
#include <illusion/classifiers.hpp>

#include <illusion/errors.hpp>

namespace illusion::classifiers {

ClassifierModel fit_default(const Dataset& data) {
    data.validate();
    const auto counts = data.class_counts();
    DefaultRuleParams params;
    // An exact tie goes to class 0.
    params.majority_class = counts[1] > counts[0] ? 1 : 0;
    params.class1_rate =
        static_cast<double>(counts[1]) / static_cast<double>(counts[0] + counts[1]);
    return ClassifierModel(ModelKind::default_rule, data.cols(), params);
}

} // namespace illusion::classifiers
