#pragma once

#include "diagnosis.hpp"
#include "engine.hpp"
#include "fault.hpp"
#include "generators.hpp"
#include "implication_graph.hpp"
#include "learning.hpp"
#include "logic5.hpp"
#include "netlist.hpp"
#include "oracle.hpp"
#include "report.hpp"
#include "satbridge.hpp"
