#pragma once

#include "common.hpp"
#include "rng.hpp"
#include "digraph.hpp"
#include "scc.hpp"
#include "structural.hpp"
#include "simplex_qp.hpp"
#include "dataset.hpp"
#include "fusion.hpp"
#include "synth.hpp"
#include "metrics.hpp"
#include "report.hpp"
