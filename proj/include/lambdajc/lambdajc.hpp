// Umbrella header.
#pragma once

#include "lambdajc/specfun.hpp"
#include "lambdajc/params.hpp"
#include "lambdajc/effective.hpp"
#include "lambdajc/eigen3x3.hpp"
#include "lambdajc/spectrum.hpp"
#include "lambdajc/driven.hpp"
#include "lambdajc/hilbert.hpp"
#include "lambdajc/hamiltonian.hpp"
#include "lambdajc/propagate.hpp"
#include "lambdajc/config.hpp"
#include "lambdajc/io.hpp"
#include "lambdajc/runner.hpp"
