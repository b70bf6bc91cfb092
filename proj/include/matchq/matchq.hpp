#pragma once

// Matched-queue performance analysis: stability classification, stationary
// level distribution of the two-sided level-dependent process, performance
// measures, a phase-type upper bound on customer sojourn time, plus
// independent verification backends (closed form, brute force, simulation).

#include "matchq/errors.hpp"
#include "matchq/linalg.hpp"
#include "matchq/map_process.hpp"
#include "matchq/model_io.hpp"
#include "matchq/oracle.hpp"
#include "matchq/performance.hpp"
#include "matchq/qbd_solver.hpp"
#include "matchq/queue_model.hpp"
#include "matchq/simulator.hpp"
#include "matchq/sojourn.hpp"
#include "matchq/stability.hpp"
