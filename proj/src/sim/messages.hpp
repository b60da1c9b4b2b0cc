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

#include <string>
#include <variant>

#include "container/types.hpp"
#include "membership/types.hpp"
#include "repair/notice.hpp"

namespace dependsim::sim {

using Message =
    std::variant<membership::GossipDigest, membership::SummaryMessage,
                 container::InvokeRequest, container::InvokeResponse,
                 repair::NoticeMessage, repair::NoticeAck>;

/// Short tag used in send/deliver trace entries.
const char* message_type(const Message& msg);

}  // namespace dependsim::sim
