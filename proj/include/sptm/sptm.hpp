#pragma once

// Umbrella header for the whole library.

#include "sptm/bits.hpp"
#include "sptm/check.hpp"
#include "sptm/depth.hpp"
#include "sptm/engine.hpp"
#include "sptm/entropy.hpp"
#include "sptm/error.hpp"
#include "sptm/joint.hpp"
#include "sptm/machine.hpp"
#include "sptm/oracle.hpp"
#include "sptm/prior.hpp"
#include "sptm/rational.hpp"
#include "sptm/report.hpp"
#include "sptm/step.hpp"
#include "sptm/trajectory.hpp"
#include "sptm/zoo.hpp"
