#pragma once

#include "nply/series.hpp"
#include "nply/operators.hpp"
#include "nply/targets.hpp"
#include "nply/classes.hpp"
#include "nply/generators.hpp"
#include "nply/io.hpp"
#include "nply/harness.hpp"
#include "nply/svg.hpp"
