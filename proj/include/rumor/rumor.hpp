#pragma once

#include "rumor/abm.hpp"
#include "rumor/closed_forms.hpp"
#include "rumor/dynamics.hpp"
#include "rumor/equilibrium.hpp"
#include "rumor/io.hpp"
#include "rumor/parallel.hpp"
#include "rumor/params.hpp"
#include "rumor/rng.hpp"
#include "rumor/steady_state.hpp"
#include "rumor/verification.hpp"
