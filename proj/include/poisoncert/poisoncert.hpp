// Copyright 2026 The poisoncert Authors
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

#ifndef POISONCERT_POISONCERT_HPP_
#define POISONCERT_POISONCERT_HPP_

#include "poisoncert/bilp.hpp"
#include "poisoncert/bound.hpp"
#include "poisoncert/core.hpp"
#include "poisoncert/decompose.hpp"
#include "poisoncert/hash_bagging.hpp"
#include "poisoncert/io.hpp"
#include "poisoncert/oracle.hpp"
#include "poisoncert/samplewise.hpp"
#include "poisoncert/solver.hpp"

#endif  // POISONCERT_POISONCERT_HPP_
