// Umbrella header.

#pragma once

#include "wuhan/rng.hpp"
#include "wuhan/statevec.hpp"
#include "wuhan/states.hpp"
#include "wuhan/channels.hpp"
#include "wuhan/protocol.hpp"
#include "wuhan/qsdc.hpp"
#include "wuhan/attacks.hpp"
#include "wuhan/harness.hpp"
#include "wuhan/selftest.hpp"
