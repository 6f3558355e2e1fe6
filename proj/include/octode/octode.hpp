#pragma once

// everything except the cli (which needs the vendored CLI11/json headers)
#include "algebra.hpp"
#include "calculus.hpp"
#include "expression.hpp"
#include "functions.hpp"
#include "odes.hpp"
#include "phrase.hpp"
#include "series.hpp"
