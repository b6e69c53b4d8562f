#pragma once

#include "nestedeq/numeric.hpp"
#include "nestedeq/game.hpp"
#include "nestedeq/payoff.hpp"
#include "nestedeq/type_space.hpp"
#include "nestedeq/simplex_grid.hpp"
#include "nestedeq/hierarchy.hpp"
#include "nestedeq/verifier.hpp"
#include "nestedeq/lp.hpp"
#include "nestedeq/aux_game.hpp"
#include "nestedeq/nash.hpp"
#include "nestedeq/discretize.hpp"
#include "nestedeq/pipeline.hpp"
