// granular.hpp — umbrella header.
#pragma once

#include "granular/balance.hpp"
#include "granular/chaplygin.hpp"
#include "granular/core.hpp"
#include "granular/meerson.hpp"
#include "granular/residual.hpp"
#include "granular/uniform_deformation.hpp"
