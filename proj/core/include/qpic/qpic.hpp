#pragma once

#include "qpic/circuit.hpp"
#include "qpic/cmt.hpp"
#include "qpic/csv.hpp"
#include "qpic/detection.hpp"
#include "qpic/dispersion.hpp"
#include "qpic/elements.hpp"
#include "qpic/error.hpp"
#include "qpic/numeric.hpp"
#include "qpic/parallel.hpp"
#include "qpic/source.hpp"
#include "qpic/units.hpp"
