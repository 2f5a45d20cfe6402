// Copyright 2026 The dfgp Authors. All rights reserved.
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


#ifndef DFGP_DFGP_HPP_
#define DFGP_DFGP_HPP_

#include "dfgp/certify.hpp"
#include "dfgp/core.hpp"
#include "dfgp/engine.hpp"
#include "dfgp/equilibrium.hpp"
#include "dfgp/estimators.hpp"
#include "dfgp/feasible_set.hpp"
#include "dfgp/game.hpp"
#include "dfgp/games.hpp"
#include "dfgp/parallel.hpp"
#include "dfgp/restart.hpp"
#include "dfgp/sampling.hpp"
#include "dfgp/smoothing.hpp"
#include "dfgp/verification.hpp"

#endif  // DFGP_DFGP_HPP_
