#pragma once

#include "proxsweep/analysis.hpp"
#include "proxsweep/bprofile.hpp"
#include "proxsweep/core.hpp"
#include "proxsweep/field.hpp"
#include "proxsweep/io.hpp"
#include "proxsweep/oracle.hpp"
#include "proxsweep/periodic.hpp"
#include "proxsweep/rng.hpp"
#include "proxsweep/scenarios.hpp"
#include "proxsweep/sets.hpp"
#include "proxsweep/sweep.hpp"
