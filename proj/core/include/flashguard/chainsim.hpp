#pragma once

#include "flashguard/chainsim/block.hpp"
#include "flashguard/chainsim/execution.hpp"
#include "flashguard/chainsim/program.hpp"
#include "flashguard/chainsim/world.hpp"
