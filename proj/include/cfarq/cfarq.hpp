#pragma once

#include "cfarq/channel.hpp"
#include "cfarq/config.hpp"
#include "cfarq/dual.hpp"
#include "cfarq/error.hpp"
#include "cfarq/cf_model.hpp"
#include "cfarq/msfg.hpp"
#include "cfarq/protocol.hpp"
#include "cfarq/report.hpp"
#include "cfarq/sim.hpp"
#include "cfarq/uncoded.hpp"
#include "cfarq/validation.hpp"
