// SPDX-License-Identifier: MIT
#pragma once

#include "cpdiverge/als.hpp"
#include "cpdiverge/cp.hpp"
#include "cpdiverge/degeneracy.hpp"
#include "cpdiverge/errors.hpp"
#include "cpdiverge/families.hpp"
#include "cpdiverge/io.hpp"
#include "cpdiverge/rng.hpp"
#include "cpdiverge/sgsd.hpp"
#include "cpdiverge/tensor.hpp"
