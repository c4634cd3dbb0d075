#pragma once

// Umbrella header for the whole toolkit.

#include "vamos/common.hpp"
#include "vamos/rng.hpp"
#include "vamos/special.hpp"
#include "vamos/image.hpp"
#include "vamos/volume.hpp"
#include "vamos/phantom.hpp"
#include "vamos/corruption.hpp"
#include "vamos/projection.hpp"
#include "vamos/loss.hpp"
#include "vamos/grad_check.hpp"
#include "vamos/net.hpp"
#include "vamos/train.hpp"
#include "vamos/metrics.hpp"
#include "vamos/checkpoint.hpp"
#include "vamos/config.hpp"
#include "vamos/experiment.hpp"
