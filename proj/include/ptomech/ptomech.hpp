#pragma once

#include "ptomech/basin.hpp"
#include "ptomech/covariance.hpp"
#include "ptomech/dynamics.hpp"
#include "ptomech/entanglement.hpp"
#include "ptomech/io.hpp"
#include "ptomech/params.hpp"
#include "ptomech/pipeline.hpp"
#include "ptomech/stability.hpp"
#include "ptomech/steady_state.hpp"
#include "ptomech/supermodes.hpp"
#include "ptomech/sweep.hpp"
