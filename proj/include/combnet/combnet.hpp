#pragma once

#include "combnet/analysis.hpp"
#include "combnet/cauchy.hpp"
#include "combnet/combinatorics.hpp"
#include "combnet/delivery_base.hpp"
#include "combnet/delivery_improved.hpp"
#include "combnet/errors.hpp"
#include "combnet/experiment.hpp"
#include "combnet/gf.hpp"
#include "combnet/placement.hpp"
#include "combnet/plan.hpp"
#include "combnet/plan_io.hpp"
#include "combnet/rational.hpp"
#include "combnet/symbol.hpp"
#include "combnet/topology.hpp"
#include "combnet/verification.hpp"
