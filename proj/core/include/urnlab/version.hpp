// Copyright 2026 The urnlab Authors
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

#ifndef URNLAB_VERSION_HPP_
#define URNLAB_VERSION_HPP_

#include <string_view>

namespace urnlab {

// Project version plus `git describe` output captured at configure time.
std::string_view artifact_version();

}  // namespace urnlab

#endif  // URNLAB_VERSION_HPP_
