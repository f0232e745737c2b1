#pragma once

#include "diskrot/acceptance.hpp"
#include "diskrot/action.hpp"
#include "diskrot/config.hpp"
#include "diskrot/ergodic.hpp"
#include "diskrot/errors.hpp"
#include "diskrot/experiment.hpp"
#include "diskrot/farey.hpp"
#include "diskrot/foliation.hpp"
#include "diskrot/isotopy.hpp"
#include "diskrot/report.hpp"
#include "diskrot/winding.hpp"
