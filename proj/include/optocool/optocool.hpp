#pragma once

#include "optocool/errors.hpp"
#include "optocool/params.hpp"
#include "optocool/atom.hpp"
#include "optocool/chain.hpp"
#include "optocool/cooling.hpp"
#include "optocool/scenario.hpp"
#include "optocool/scenario_file.hpp"
#include "optocool/sweep.hpp"
#include "optocool/table.hpp"
#include "optocool/commands.hpp"
