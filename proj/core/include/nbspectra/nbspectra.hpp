#pragma once

#include "nbspectra/cover_solver.hpp"
#include "nbspectra/error.hpp"
#include "nbspectra/finite_spectrum.hpp"
#include "nbspectra/graph.hpp"
#include "nbspectra/lifts.hpp"
#include "nbspectra/numerics.hpp"
#include "nbspectra/operator.hpp"
#include "nbspectra/ratio_system.hpp"
#include "nbspectra/scanner.hpp"
#include "nbspectra/version.hpp"
