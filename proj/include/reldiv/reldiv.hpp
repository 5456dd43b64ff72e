// File: include/reldiv/reldiv.hpp
// Umbrella header: the whole library in one include.
#pragma once

#include "reldiv/catalog.hpp"
#include "reldiv/commands.hpp"
#include "reldiv/diversity.hpp"
#include "reldiv/error.hpp"
#include "reldiv/evaluation.hpp"
#include "reldiv/item.hpp"
#include "reldiv/random.hpp"
#include "reldiv/report.hpp"
#include "reldiv/schema.hpp"
#include "reldiv/similarity.hpp"
#include "reldiv/synthetic.hpp"
