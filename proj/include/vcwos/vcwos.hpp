// SPDX-License-Identifier: Apache-2.0
#pragma once

// Umbrella header.

#include "vcwos/types.hpp"
#include "vcwos/specfun.hpp"
#include "vcwos/rng.hpp"
#include "vcwos/kernels.hpp"
#include "vcwos/geometry/scene.hpp"
#include "vcwos/geometry/io.hpp"
#include "vcwos/coefficients/problem.hpp"
#include "vcwos/coefficients/transform.hpp"
#include "vcwos/estimators/solve.hpp"
#include "vcwos/harness/catalog.hpp"
#include "vcwos/harness/report.hpp"
#include "vcwos/harness/studies.hpp"
#include "vcwos/io/config.hpp"
#include "vcwos/io/images.hpp"
#include "vcwos/io/run.hpp"
