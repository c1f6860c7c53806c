#pragma once

#include "uwbpc/brpc.hpp"
#include "uwbpc/channel.hpp"
#include "uwbpc/efficiency.hpp"
#include "uwbpc/game.hpp"
#include "uwbpc/lsa.hpp"
#include "uwbpc/params.hpp"
#include "uwbpc/rake.hpp"
#include "uwbpc/rng.hpp"
#include "uwbpc/root_find.hpp"
#include "uwbpc/social.hpp"
