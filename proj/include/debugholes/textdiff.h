// Copyright 2026 The Debugholes Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DEBUGHOLES_TEXTDIFF_H_
#define DEBUGHOLES_TEXTDIFF_H_

#include <string>
#include <string_view>

namespace debugholes {

// Line-based unified diff; empty when the texts are equal.
std::string UnifiedDiff(std::string_view a, std::string_view b,
                        std::string_view label_a, std::string_view label_b,
                        int context = 3);

}  // namespace debugholes

#endif  // DEBUGHOLES_TEXTDIFF_H_
