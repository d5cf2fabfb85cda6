#pragma once

#include "mpid/errors.hpp"
#include "mpid/precision.hpp"
#include "mpid/matrix.hpp"
#include "mpid/mgsqr.hpp"
#include "mpid/id.hpp"
#include "mpid/synth.hpp"
