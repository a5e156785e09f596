#pragma once

// Umbrella header: algebraic signatures and instantiations, high-level
// Petri-net schemata with a token game, the associative module-composition
// calculus, partial-order run recording, bounded exploration with declared
// invariants, and desk-scale mining statistics.

#include "heraklit/composition.hpp"
#include "heraklit/dot_export.hpp"
#include "heraklit/dsl.hpp"
#include "heraklit/error.hpp"
#include "heraklit/explore.hpp"
#include "heraklit/invariants.hpp"
#include "heraklit/json_io.hpp"
#include "heraklit/mining.hpp"
#include "heraklit/multiset.hpp"
#include "heraklit/net.hpp"
#include "heraklit/report.hpp"
#include "heraklit/runs.hpp"
#include "heraklit/service_system.hpp"
#include "heraklit/signature.hpp"
#include "heraklit/sorts.hpp"
#include "heraklit/structure.hpp"
#include "heraklit/term.hpp"
#include "heraklit/value.hpp"
