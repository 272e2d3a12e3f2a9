#pragma once

#include "fluxq/calibration.hpp"
#include "fluxq/compensation.hpp"
#include "fluxq/coupled.hpp"
#include "fluxq/dynamics.hpp"
#include "fluxq/errors.hpp"
#include "fluxq/io.hpp"
#include "fluxq/optimize.hpp"
#include "fluxq/pauli.hpp"
#include "fluxq/reduction.hpp"
#include "fluxq/squid.hpp"
#include "fluxq/stoquastic.hpp"
#include "fluxq/sweep.hpp"
#include "fluxq/units.hpp"
