#pragma once

#include "ddpc/controllers.hpp"
#include "ddpc/hankel.hpp"
#include "ddpc/harness.hpp"
#include "ddpc/horizon.hpp"
#include "ddpc/plant.hpp"
#include "ddpc/predictor.hpp"
#include "ddpc/qp.hpp"
#include "ddpc/rng.hpp"
