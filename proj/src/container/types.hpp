// Copyright 2026 The dependsim Authors.
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

#include <cstdint>
#include <string>

namespace dependsim::container {

struct InvokeRequest {
  std::string container_id;
  std::uint64_t request_id = 0;
  std::uint32_t slot = 0;
  std::string request;
};

struct InvokeResponse {
  std::string container_id;
  std::uint64_t request_id = 0;
  std::uint32_t slot = 0;
  bool ok = true;
  std::string value;
};

}  // namespace dependsim::container
