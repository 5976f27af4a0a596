#pragma once

#include "cablelife/bct.hpp"
#include "cablelife/charge_state.hpp"
#include "cablelife/constants.hpp"
#include "cablelife/errors.hpp"
#include "cablelife/field.hpp"
#include "cablelife/fit.hpp"
#include "cablelife/geometry.hpp"
#include "cablelife/io.hpp"
#include "cablelife/life.hpp"
#include "cablelife/load_program.hpp"
#include "cablelife/macro.hpp"
#include "cablelife/params.hpp"
#include "cablelife/pea.hpp"
#include "cablelife/scenarios.hpp"
