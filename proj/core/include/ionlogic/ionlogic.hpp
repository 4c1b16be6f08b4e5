#pragma once

#include "ionlogic/coupling.hpp"
#include "ionlogic/errors.hpp"
#include "ionlogic/experiments.hpp"
#include "ionlogic/pulses.hpp"
#include "ionlogic/readout.hpp"
#include "ionlogic/seeding.hpp"
#include "ionlogic/spectator.hpp"
#include "ionlogic/state.hpp"
