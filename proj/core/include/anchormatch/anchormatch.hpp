#pragma once

#include "anchormatch/anchors.hpp"
#include "anchormatch/bench.hpp"
#include "anchormatch/error.hpp"
#include "anchormatch/graph.hpp"
#include "anchormatch/io.hpp"
#include "anchormatch/matcher.hpp"
#include "anchormatch/proximity.hpp"
#include "anchormatch/signatures.hpp"
