#pragma once

#include "odes/first_order.hpp"
#include "odes/flow.hpp"
#include "odes/higher_order.hpp"
#include "odes/implicit.hpp"
#include "odes/problem.hpp"
