#pragma once

#include "sspinv/error.hpp"
#include "sspinv/profile.hpp"
#include "sspinv/spatiotemporal.hpp"
#include "sspinv/clustering.hpp"
#include "sspinv/profile_io.hpp"
#include "sspinv/linalg.hpp"
#include "sspinv/eof.hpp"
#include "sspinv/extension.hpp"
#include "sspinv/ray.hpp"
#include "sspinv/network.hpp"
#include "sspinv/mtl.hpp"
#include "sspinv/world.hpp"
#include "sspinv/baselines.hpp"
#include "sspinv/metrics.hpp"
#include "sspinv/benchmark.hpp"
#include "sspinv/config.hpp"
#include "sspinv/serialization.hpp"
#include "sspinv/report.hpp"
