#pragma once

#include "tcasim/error.hpp"
#include "tcasim/units.hpp"

#include "tcasim/modes/codec.hpp"
#include "tcasim/modes/crc.hpp"
#include "tcasim/modes/frame.hpp"

#include "tcasim/phy/channel.hpp"
#include "tcasim/phy/dbpsk.hpp"
#include "tcasim/phy/ppm.hpp"
#include "tcasim/phy/sample_block.hpp"

#include "tcasim/sim/event.hpp"
#include "tcasim/sim/kinematics.hpp"
#include "tcasim/sim/world.hpp"

#include "tcasim/tcas/aircraft_entity.hpp"
#include "tcasim/tcas/logic.hpp"
#include "tcasim/tcas/tcas_unit.hpp"
#include "tcasim/tcas/types.hpp"

#include "tcasim/attack/flood.hpp"
#include "tcasim/attack/phantom.hpp"
#include "tcasim/attack/plan.hpp"

#include "tcasim/fta/risk.hpp"

#include "tcasim/harness/fta_report.hpp"
#include "tcasim/harness/metrics.hpp"
#include "tcasim/harness/scenario.hpp"
#include "tcasim/harness/simulate.hpp"
#include "tcasim/harness/sweep.hpp"
