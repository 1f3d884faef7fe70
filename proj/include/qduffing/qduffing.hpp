#pragma once

#include "qduffing/banded.hpp"
#include "qduffing/classical.hpp"
#include "qduffing/engines.hpp"
#include "qduffing/error.hpp"
#include "qduffing/lyapunov.hpp"
#include "qduffing/noise.hpp"
#include "qduffing/output.hpp"
#include "qduffing/parallel.hpp"
#include "qduffing/params.hpp"
#include "qduffing/quantum.hpp"
#include "qduffing/scans.hpp"
#include "qduffing/semiclassical.hpp"
#include "qduffing/trajectory.hpp"
