// Copyright 2026 The arfcpp Authors
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

#pragma once

#include "arf/error.hpp"
#include "arf/random.hpp"
#include "arf/normal.hpp"
#include "arf/parallel.hpp"
#include "arf/tabular.hpp"
#include "arf/forest.hpp"
#include "arf/adversarial.hpp"
#include "arf/forde.hpp"
#include "arf/forge.hpp"
#include "arf/simgen.hpp"
#include "arf/learners.hpp"
#include "arf/evalbench.hpp"
#include "arf/model_io.hpp"
