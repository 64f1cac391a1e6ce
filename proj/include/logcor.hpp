#pragma once

// Umbrella header.

#include "logcor/binary_io.hpp"
#include "logcor/brw.hpp"
#include "logcor/cue.hpp"
#include "logcor/errors.hpp"
#include "logcor/field.hpp"
#include "logcor/gff.hpp"
#include "logcor/iid.hpp"
#include "logcor/parallel.hpp"
#include "logcor/primes.hpp"
#include "logcor/report.hpp"
#include "logcor/rng.hpp"
#include "logcor/stats.hpp"
#include "logcor/theory.hpp"
#include "logcor/zeta.hpp"
#include "logcor/experiments/registry.hpp"
