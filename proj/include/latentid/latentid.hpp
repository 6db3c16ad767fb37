/*
 * Copyright 2026 The latentid authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Umbrella header: generic finite identifiability of Gaussian
// one-latent-source DAG models, decided by graphical criteria, exact
// Jacobian rank tests, and tetrad analysis.

#include "latentid/criteria.hpp"
#include "latentid/enumerate.hpp"
#include "latentid/errors.hpp"
#include "latentid/graph.hpp"
#include "latentid/jacobian.hpp"
#include "latentid/maps.hpp"
#include "latentid/matrix.hpp"
#include "latentid/params.hpp"
#include "latentid/rational.hpp"
#include "latentid/rng.hpp"
#include "latentid/spearman.hpp"
