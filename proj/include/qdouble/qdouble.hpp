// Copyright 2026 The qdouble Authors
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

#ifndef QDOUBLE_QDOUBLE_HPP
#define QDOUBLE_QDOUBLE_HPP

#include "qdouble/catalog.hpp"
#include "qdouble/cellulation.hpp"
#include "qdouble/factor_system.hpp"
#include "qdouble/feedforward.hpp"
#include "qdouble/gates.hpp"
#include "qdouble/groups.hpp"
#include "qdouble/irreps.hpp"
#include "qdouble/kwmaps.hpp"
#include "qdouble/protocols.hpp"
#include "qdouble/register.hpp"
#include "qdouble/verify.hpp"

#endif
