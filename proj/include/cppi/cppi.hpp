#pragma once

#include "cppi/backtest.hpp"
#include "cppi/config.hpp"
#include "cppi/error.hpp"
#include "cppi/format.hpp"
#include "cppi/io.hpp"
#include "cppi/model.hpp"
#include "cppi/parallel.hpp"
#include "cppi/pricer.hpp"
#include "cppi/random.hpp"
#include "cppi/strategy.hpp"
