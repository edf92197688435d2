// Copyright 2026 The resel Authors.
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

// Internal: one-time verification of the BLAS backend.

#pragma once

#include <string>

namespace resel {

// Checks a dense dgemm against a plain loop product once per process. Some
// OpenBLAS dynamic-architecture builds pick kernels that return wrong
// results on virtualized CPUs; in that case a conservative kernel set the CPU
// supports is selected instead. Throws Error(kNumerical) when no kernel set
// passes.
void EnsureReliableBlas();

// Backend name and kernel set, e.g. "OpenBLAS SkylakeX".
std::string BlasBackendDescription();

}  // namespace resel
