#pragma once

#include "polinflux/model.hpp"
#include "polinflux/linalg.hpp"
#include "polinflux/influence.hpp"
#include "polinflux/equilibrium.hpp"
#include "polinflux/statics.hpp"
#include "polinflux/affective.hpp"
#include "polinflux/validation.hpp"
#include "polinflux/simulation.hpp"
#include "polinflux/scenario.hpp"
