// Copyright 2026 The rsvqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RSVQA_EMBEDDED_DATA_HPP_
#define RSVQA_EMBEDDED_DATA_HPP_

#include <string_view>

// Contents of the files under data/, compiled into the library.
namespace rsvqa::embedded {

std::string_view mock_rules(std::string_view pivot);  // empty if unknown
std::string_view synth_paraphrase_rules();

}  // namespace rsvqa::embedded

#endif  // RSVQA_EMBEDDED_DATA_HPP_
