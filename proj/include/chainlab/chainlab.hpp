#pragma once

#include "chainlab/config.hpp"
#include "chainlab/error.hpp"
#include "chainlab/fit.hpp"
#include "chainlab/flow.hpp"
#include "chainlab/fourier.hpp"
#include "chainlab/hamiltonian.hpp"
#include "chainlab/io.hpp"
#include "chainlab/jet.hpp"
#include "chainlab/local_taylor.hpp"
#include "chainlab/moments.hpp"
#include "chainlab/ode.hpp"
#include "chainlab/series.hpp"
#include "chainlab/sphere.hpp"
#include "chainlab/surface.hpp"
