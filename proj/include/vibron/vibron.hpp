#pragma once

#include "vibron/angle_model.hpp"
#include "vibron/basis.hpp"
#include "vibron/classical.hpp"
#include "vibron/error.hpp"
#include "vibron/evolve.hpp"
#include "vibron/experiments.hpp"
#include "vibron/irreps.hpp"
#include "vibron/ladder_ops.hpp"
#include "vibron/model.hpp"
#include "vibron/observables.hpp"
#include "vibron/phase_space.hpp"
#include "vibron/quantum_state.hpp"
#include "vibron/sign_operator.hpp"
#include "vibron/spectral.hpp"
#include "vibron/states.hpp"
