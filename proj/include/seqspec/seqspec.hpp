#pragma once

#include "seqspec/csv.hpp"
#include "seqspec/datagen.hpp"
#include "seqspec/error.hpp"
#include "seqspec/gp.hpp"
#include "seqspec/harness.hpp"
#include "seqspec/limits.hpp"
#include "seqspec/model.hpp"
#include "seqspec/monitor.hpp"
#include "seqspec/mp.hpp"
#include "seqspec/parallel.hpp"
#include "seqspec/rng.hpp"
#include "seqspec/seqcov.hpp"
