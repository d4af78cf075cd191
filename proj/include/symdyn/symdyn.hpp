#pragma once

// Umbrella header.

#include "decomposition.hpp"
#include "entropy.hpp"
#include "ergopt.hpp"
#include "hofbauer.hpp"
#include "shifts.hpp"
#include "spec_parse.hpp"
#include "thermo.hpp"

namespace symdyn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace symdyn
