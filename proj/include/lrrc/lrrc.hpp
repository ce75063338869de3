#pragma once

#include "lrrc/code_core.hpp"
#include "lrrc/connect.hpp"
#include "lrrc/error.hpp"
#include "lrrc/exact6321.hpp"
#include "lrrc/galois.hpp"
#include "lrrc/mfhs_model.hpp"
#include "lrrc/rng.hpp"
#include "lrrc/simulate.hpp"
