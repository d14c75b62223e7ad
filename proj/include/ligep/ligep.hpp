#pragma once

#include "ligep/errors.hpp"
#include "ligep/grid.hpp"
#include "ligep/linalg.hpp"
#include "ligep/kahan.hpp"
#include "ligep/model.hpp"
#include "ligep/fom.hpp"
#include "ligep/pod.hpp"
#include "ligep/rom.hpp"
#include "ligep/diagnostics.hpp"
