#pragma once

#include "gossip_aoi/chain.hpp"
#include "gossip_aoi/errors.hpp"
#include "gossip_aoi/experiments.hpp"
#include "gossip_aoi/model.hpp"
#include "gossip_aoi/policies.hpp"
#include "gossip_aoi/rvi.hpp"
#include "gossip_aoi/simulator.hpp"
#include "gossip_aoi/structure.hpp"
